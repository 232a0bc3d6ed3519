//! Canonical labelling for small digraphs.
//!
//! Colour refinement (out- and in-neighbour colour multisets) splits vertices
//! by degree structure; remaining ties are broken by individualising each
//! candidate of the first non-singleton cell and recursing. Every leaf is a
//! vertex order, and the canonical form is the lexicographically largest
//! adjacency matrix over all leaves. Transposition twins inside a cell give
//! identical subtrees, so only one of them is expanded.

use super::dense::{bit, Dense};
use super::Digraph;
use crate::error::Result;
use crate::limits::{self, Limits};

/// Isomorphism-invariant fingerprint of a digraph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    canonical_bytes: Vec<u8>,
    vertices: usize,
    arcs: usize,
}

impl CanonicalForm {
    pub fn canonical_bytes(&self) -> &[u8] {
        &self.canonical_bytes
    }

    /// `(vertex count, arc count)`.
    pub fn size_hint(&self) -> (usize, usize) {
        (self.vertices, self.arcs)
    }
}

pub fn canonical_form(g: &Digraph) -> Result<CanonicalForm> {
    canonical_form_with(g, Limits::default().canonical)
}

pub fn canonical_form_with(g: &Digraph, max_vertices: usize) -> Result<CanonicalForm> {
    limits::check("canonical form", g.vertex_count(), max_vertices)?;
    let d = Dense::from_digraph(g);
    Ok(CanonicalForm {
        canonical_bytes: canonical_bytes(&d),
        vertices: d.n(),
        arcs: d.arc_count(),
    })
}

pub fn are_isomorphic(a: &Digraph, b: &Digraph) -> Result<bool> {
    if a.vertex_count() != b.vertex_count() || a.arc_count() != b.arc_count() {
        return Ok(false);
    }
    let max = a.vertex_count();
    Ok(canonical_form_with(a, max)? == canonical_form_with(b, max)?)
}

pub(crate) fn canonical_bytes(d: &Dense) -> Vec<u8> {
    let n = d.n();
    let mut best: Option<Vec<u8>> = None;
    let colors = refine(d, vec![0; n]);
    search(d, colors, &mut best);
    let mut bytes = Vec::with_capacity(1 + n * n / 8 + 1);
    bytes.push(n as u8);
    bytes.extend(best.unwrap_or_default());
    bytes
}

fn search(d: &Dense, colors: Vec<u32>, best: &mut Option<Vec<u8>>) {
    let n = d.n();
    // first non-singleton cell, by colour
    let mut counts = vec![0usize; n];
    for &c in &colors {
        counts[c as usize] += 1;
    }
    let Some(target) = (0..n).find(|&c| counts[c] > 1) else {
        let code = encode(d, &colors);
        if best.as_ref().is_none_or(|b| &code > b) {
            *best = Some(code);
        }
        return;
    };
    let cell: Vec<usize> = (0..n).filter(|&v| colors[v] as usize == target).collect();
    let mut tried: Vec<usize> = Vec::new();
    for &v in &cell {
        if tried.iter().any(|&t| are_twins(d, t, v)) {
            continue;
        }
        tried.push(v);
        let split: Vec<u32> = (0..n)
            .map(|x| {
                let c = colors[x] * 2;
                if colors[x] as usize == target && x != v {
                    c + 1
                } else {
                    c
                }
            })
            .collect();
        search(d, refine(d, split), best);
    }
}

/// Swapping `x` and `y` is an automorphism.
fn are_twins(d: &Dense, x: usize, y: usize) -> bool {
    let strip = |m: u64| m & !(bit(x) | bit(y));
    strip(d.out[x]) == strip(d.out[y])
        && strip(d.inn[x]) == strip(d.inn[y])
        && d.has(x, y) == d.has(y, x)
}

/// Iterated colour refinement; output colours are dense `0..k` and ordered
/// consistently with the input colours.
fn refine(d: &Dense, mut colors: Vec<u32>) -> Vec<u32> {
    let n = d.n();
    let mut classes = distinct(&colors);
    loop {
        let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut outs = neighbour_colors(d.out[v], &colors);
                let mut ins = neighbour_colors(d.inn[v], &colors);
                outs.sort_unstable();
                ins.sort_unstable();
                (colors[v], outs, ins)
            })
            .collect();
        let mut sorted: Vec<&(u32, Vec<u32>, Vec<u32>)> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        let next: Vec<u32> = sigs
            .iter()
            .map(|s| sorted.binary_search(&s).expect("signature present") as u32)
            .collect();
        let k = sorted.len();
        colors = next;
        if k == classes {
            return colors;
        }
        classes = k;
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn neighbour_colors(mut mask: u64, colors: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        out.push(colors[i]);
    }
    out
}

/// Row-major adjacency matrix in the order given by a discrete colouring.
fn encode(d: &Dense, colors: &[u32]) -> Vec<u8> {
    let n = d.n();
    let mut order = vec![0usize; n];
    for (v, &c) in colors.iter().enumerate() {
        order[c as usize] = v;
    }
    let mut bytes = vec![0u8; (n * n).div_ceil(8)];
    let mut k = 0;
    for &a in &order {
        for &b in &order {
            if d.has(a, b) {
                bytes[k / 8] |= 0x80 >> (k % 8);
            }
            k += 1;
        }
    }
    bytes
}
