//! Edge-list text format and DOT export.
//!
//! Edge lists start with a header line `n m`, followed by exactly `m` lines
//! `u v` with `0 <= u, v < n` and `u != v`. Blank lines and lines starting
//! with `#` are ignored. Repeated arcs are rejected.

use std::fmt::Write as _;

use super::{Digraph, Vertex};
use crate::error::{Error, Result};

impl Digraph {
    pub fn parse_edge_list(text: &str) -> Result<Digraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `n m` header"))?;
        let (n, m) = parse_pair(hline, header)?;
        let mut g = Digraph::with_vertices(0..n as Vertex);
        let mut seen = 0usize;
        for (line, content) in lines {
            if seen == m {
                return Err(Error::parse(
                    line,
                    format!("more than the declared {m} arcs"),
                ));
            }
            let (u, v) = parse_pair(line, content)?;
            if u >= n || v >= n {
                return Err(Error::parse(line, format!("endpoint out of range 0..{n}")));
            }
            if u == v {
                return Err(Error::parse(line, format!("self-loop on {u}")));
            }
            if !g.insert_arc(u as Vertex, v as Vertex) {
                return Err(Error::parse(line, format!("duplicate arc {u} {v}")));
            }
            seen += 1;
        }
        if seen != m {
            return Err(Error::parse(
                text.lines().count().max(1),
                format!("expected {m} arcs, found {seen}"),
            ));
        }
        Ok(g)
    }

    /// Writes the edge-list format; vertices are renumbered `0..n` in id order.
    pub fn to_edge_list(&self) -> String {
        let (g, _) = self.compact();
        let mut s = format!("{} {}\n", g.vertex_count(), g.arc_count());
        for (u, v) in g.arcs() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// DOT rendering with one edge per adjacent pair; bidirected pairs carry
    /// `dir=both`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for v in self.vertices() {
            let _ = writeln!(s, "  {v};");
        }
        for (u, v) in self.arcs() {
            if self.has_arc(v, u) {
                if u < v {
                    let _ = writeln!(s, "  {u} -> {v} [dir=both];");
                }
            } else {
                let _ = writeln!(s, "  {u} -> {v};");
            }
        }
        s.push_str("}\n");
        s
    }
}

fn parse_pair(line: usize, content: &str) -> Result<(usize, usize)> {
    let mut it = content.split_whitespace();
    let mut field = |name: &str| -> Result<usize> {
        let tok = it
            .next()
            .ok_or_else(|| Error::parse(line, format!("missing {name}")))?;
        tok.parse().map_err(|_| {
            Error::parse(
                line,
                format!("{name} `{tok}` is not a non-negative integer"),
            )
        })
    };
    let a = field("first field")?;
    let b = field("second field")?;
    if let Some(extra) = it.next() {
        return Err(Error::parse(line, format!("unexpected token `{extra}`")));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_writes_back() {
        let text = "3 3\n0 1\n1 0\n1 2\n";
        let g = Digraph::parse_edge_list(text).unwrap();
        assert_eq!(g.arc_count(), 3);
        assert_eq!(g.to_edge_list(), text);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let g = Digraph::parse_edge_list("# k2\n2 2\n\n0 1\n1 0\n").unwrap();
        assert!(g.is_bidirected(0, 1));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = |t: &str| match Digraph::parse_edge_list(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(err("2 2\n0 1\n0 1\n"), 3);
        assert_eq!(err("2 1\n0 0\n"), 2);
        assert_eq!(err("2 1\n0 2\n"), 2);
        assert_eq!(err("2 1\nx 1\n"), 2);
        assert_eq!(err("2 1\n0 1 1\n"), 2);
        assert_eq!(err("2 1\n0 1\n1 0\n"), 3);
        assert_eq!(err(""), 1);
    }

    #[test]
    fn missing_arcs_are_reported() {
        assert!(Digraph::parse_edge_list("3 2\n0 1\n").is_err());
    }

    #[test]
    fn dot_merges_bidirected_pairs() {
        let g = Digraph::from_arcs(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("0 -> 1 [dir=both];"));
        assert!(!dot.contains("1 -> 0"));
        assert!(dot.contains("1 -> 2;"));
    }

    #[test]
    fn writing_compacts_ids() {
        let g = Digraph::from_arcs(3, [(0, 2)]).unwrap();
        let mut h = g.clone();
        h.remove_vertex_unchecked(1);
        assert_eq!(h.to_edge_list(), "2 1\n0 1\n");
    }
}
