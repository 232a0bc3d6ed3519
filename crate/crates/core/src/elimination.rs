//! Directed elimination orderings, exact Kelly-width and greedy recognition
//! of partial 0-DAGs and partial 1-DAGs.

use std::collections::BTreeSet;

use crate::digraph::{Dense, Digraph, Vertex, VertexSet};
use crate::error::{Error, Result};
use crate::limits::{self, Limits};
use crate::minor_ops::{self, MinorOperation};

/// Eliminates `v`: adds `(u, w)` for every in-neighbour `u` and out-neighbour
/// `w` of `v` with `u != w`, then deletes `v`.
pub fn eliminate_vertex(g: &Digraph, v: Vertex) -> Result<Digraph> {
    g.require(v)?;
    let mut h = g.clone();
    h.remove_vertex_unchecked(v);
    for &u in g.in_neighbors(v) {
        for &w in g.out_neighbors(v) {
            if u != w {
                h.insert_arc(u, w);
            }
        }
    }
    Ok(h)
}

/// A vertex order with the out-neighbourhood each vertex had at the moment it
/// was eliminated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrdering {
    pub order: Vec<Vertex>,
    pub supports: Vec<VertexSet>,
    pub width: usize,
}

impl EliminationOrdering {
    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.order.iter().position(|&x| x == v)
    }
}

/// Replays `order` step by step and records supports and width.
pub fn ordering_width(g: &Digraph, order: &[Vertex]) -> Result<EliminationOrdering> {
    let distinct: VertexSet = order.iter().copied().collect();
    if distinct.len() != order.len() || distinct != g.vertex_set() {
        return Err(Error::Invalid(format!(
            "{order:?} is not a permutation of the vertex set"
        )));
    }
    let mut cur = g.clone();
    let mut supports = Vec::with_capacity(order.len());
    for &v in order {
        supports.push(cur.out_neighbors(v).clone());
        cur = eliminate_vertex(&cur, v)?;
    }
    let width = supports.iter().map(BTreeSet::len).max().unwrap_or(0);
    Ok(EliminationOrdering {
        order: order.to_vec(),
        supports,
        width,
    })
}

/// `supp(v, T)`: vertices outside `T ∪ {v}` reachable from `v` by a directed
/// path whose interior lies in `T`. Equals the out-neighbourhood of `v` after
/// eliminating `T` in any order.
pub fn support(g: &Digraph, v: Vertex, eliminated: &VertexSet) -> Result<VertexSet> {
    g.require(v)?;
    g.require_all(eliminated)?;
    if eliminated.contains(&v) {
        return Err(Error::Invalid(format!("{v} is already eliminated")));
    }
    let d = Dense::from_digraph(g);
    let pos = |x: Vertex| d.ids.binary_search(&x).expect("checked above");
    let mask = eliminated.iter().fold(0u64, |m, &x| m | 1 << pos(x));
    let s = dense_support(&d, pos(v), mask);
    Ok((0..d.n())
        .filter(|&i| s & (1 << i) != 0)
        .map(|i| d.ids[i])
        .collect())
}

fn dense_support(d: &Dense, v: usize, eliminated: u64) -> u64 {
    let inner = d.reach_within(d.out[v] & eliminated, eliminated);
    let mut reach = d.out[v];
    let mut m = inner;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        reach |= d.out[i];
    }
    reach & !eliminated & !(1u64 << v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KellyWidth {
    /// Kelly-width; one more than the best elimination width (0 for the null digraph).
    pub width: usize,
    pub ordering: EliminationOrdering,
}

pub fn exact_kelly_width(g: &Digraph) -> Result<KellyWidth> {
    exact_kelly_width_with(g, &Limits::default())
}

/// Subset dynamic programme over eliminated sets:
/// `Q(S) = min over v in S of max(Q(S - v), |supp(v, S - v)|)`.
pub fn exact_kelly_width_with(g: &Digraph, limits: &Limits) -> Result<KellyWidth> {
    let n = g.vertex_count();
    limits::check("exact Kelly-width", n, limits.kelly_width.min(30))?;
    if n == 0 {
        return Ok(KellyWidth {
            width: 0,
            ordering: EliminationOrdering {
                order: vec![],
                supports: vec![],
                width: 0,
            },
        });
    }
    let d = Dense::from_digraph(g);
    let size = 1usize << n;
    let mut best = vec![u8::MAX; size];
    let mut last = vec![0u8; size];
    best[0] = 0;
    for s in 1..size {
        let mut m = s;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let rest = s & !(1 << v);
            let cost = best[rest].max(dense_support(&d, v, rest as u64).count_ones() as u8);
            if cost < best[s] {
                best[s] = cost;
                last[s] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = size - 1;
    while s != 0 {
        let v = last[s] as usize;
        order.push(d.ids[v]);
        s &= !(1 << v);
    }
    order.reverse();
    let ordering = ordering_width(g, &order)?;
    debug_assert_eq!(ordering.width, best[size - 1] as usize);
    if ordering.width != best[size - 1] as usize {
        return Err(Error::invariant(
            "reconstructed ordering disagrees with the DP optimum",
        ));
    }
    Ok(KellyWidth {
        width: ordering.width + 1,
        ordering,
    })
}

/// What is left after greedily eliminating low out-degree vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualCore {
    pub core: Digraph,
    /// Each eliminated vertex with the minor operation its elimination equals.
    pub peeled: Vec<(Vertex, MinorOperation)>,
}

impl ResidualCore {
    pub fn peel_ops(&self) -> Vec<MinorOperation> {
        self.peeled.iter().map(|(_, op)| op.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recognition {
    Yes(EliminationOrdering),
    No(ResidualCore),
}

impl Recognition {
    pub fn is_yes(&self) -> bool {
        matches!(self, Recognition::Yes(_))
    }
}

/// Decides whether `g` is a partial `k`-DAG for `k` in {0, 1} by repeatedly
/// eliminating the smallest vertex of out-degree at most `k`.
///
/// Such an elimination is a vertex deletion (out-degree 0) or an
/// out-contraction (out-degree 1), so the residue is a directed minor of `g`.
pub fn recognize_partial_k(g: &Digraph, k: usize) -> Result<Recognition> {
    if k > 1 {
        return Err(Error::Unsupported(format!(
            "greedy recognition is exact only for k <= 1, got k = {k}"
        )));
    }
    let (order, supports, peeled, core) = peel(g, k);
    if core.is_empty() {
        let width = supports.iter().map(BTreeSet::len).max().unwrap_or(0);
        Ok(Recognition::Yes(EliminationOrdering {
            order,
            supports,
            width,
        }))
    } else {
        Ok(Recognition::No(ResidualCore { core, peeled }))
    }
}

/// Greedy peel of every vertex with out-degree <= 1; the remaining core is
/// empty exactly when `g` is a partial 1-DAG.
pub fn residual_core(g: &Digraph) -> ResidualCore {
    let (_, _, peeled, core) = peel(g, 1);
    ResidualCore { core, peeled }
}

#[allow(clippy::type_complexity)]
fn peel(
    g: &Digraph,
    k: usize,
) -> (
    Vec<Vertex>,
    Vec<VertexSet>,
    Vec<(Vertex, MinorOperation)>,
    Digraph,
) {
    let mut cur = g.clone();
    let mut ready: BTreeSet<Vertex> = cur.vertices().filter(|&v| cur.out_degree(v) <= k).collect();
    let mut order = Vec::new();
    let mut supports = Vec::new();
    let mut peeled = Vec::new();
    while let Some(v) = ready.pop_first() {
        let outs = cur.out_neighbors(v).clone();
        let op = match outs.iter().next() {
            None => MinorOperation::DeleteVertex(v),
            Some(&w) => MinorOperation::OutContract(v, w),
        };
        let preds: Vec<Vertex> = cur.in_neighbors(v).iter().copied().collect();
        cur = match &op {
            MinorOperation::DeleteVertex(_) => minor_ops::delete_vertex(&cur, v),
            _ => eliminate_vertex(&cur, v),
        }
        .expect("peeled vertex is present");
        for x in preds {
            if cur.out_degree(x) <= k {
                ready.insert(x);
            }
        }
        order.push(v);
        supports.push(outs);
        peeled.push((v, op));
    }
    (order, supports, peeled, cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn eliminating_middle_of_path_adds_shortcut() {
        let g = Digraph::directed_path(3);
        let h = eliminate_vertex(&g, 1).unwrap();
        assert_eq!(h.arcs().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn eliminating_from_k2_suppresses_loop() {
        let h = eliminate_vertex(&Digraph::complete(2), 0).unwrap();
        assert_eq!(h.vertex_count(), 1);
        assert_eq!(h.arc_count(), 0);
    }

    #[test]
    fn eliminating_from_k3_leaves_k2() {
        let h = eliminate_vertex(&Digraph::complete(3), 2).unwrap();
        assert_eq!(h, Digraph::complete(2));
    }

    #[test]
    fn dag_sinks_first_has_width_zero() {
        let g = Digraph::from_arcs(4, [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]).unwrap();
        let e = ordering_width(&g, &[3, 2, 1, 0]).unwrap();
        assert_eq!(e.width, 0);
    }

    #[test]
    fn k3_any_order_has_width_two() {
        for order in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
            assert_eq!(
                ordering_width(&Digraph::complete(3), &order).unwrap().width,
                2
            );
        }
    }

    #[test]
    fn n4_in_label_order_has_width_two() {
        // p1 goes with out-set {p2, p3}; afterwards p2 has {p3}, p3 has {p4}, p4 none
        let e = ordering_width(&catalog::n4(), &[0, 1, 2, 3]).unwrap();
        assert_eq!(e.supports[0], VertexSet::from([1, 2]));
        assert_eq!(e.supports[1], VertexSet::from([2]));
        assert_eq!(e.supports[2], VertexSet::from([3]));
        assert!(e.supports[3].is_empty());
        assert_eq!(e.width, 2);
    }

    #[test]
    fn ordering_must_be_a_permutation() {
        let g = Digraph::complete(3);
        assert!(ordering_width(&g, &[0, 1]).is_err());
        assert!(ordering_width(&g, &[0, 1, 1]).is_err());
        assert!(ordering_width(&g, &[0, 1, 5]).is_err());
    }

    #[test]
    fn exact_width_of_small_graphs() {
        assert_eq!(exact_kelly_width(&Digraph::complete(3)).unwrap().width, 3);
        assert_eq!(exact_kelly_width(&Digraph::complete(2)).unwrap().width, 2);
        assert_eq!(
            exact_kelly_width(&Digraph::directed_path(5)).unwrap().width,
            1
        );
        assert_eq!(
            exact_kelly_width(&Digraph::with_vertices([4]))
                .unwrap()
                .width,
            1
        );
        assert_eq!(exact_kelly_width(&Digraph::new()).unwrap().width, 0);
        assert_eq!(exact_kelly_width(&catalog::m5()).unwrap().width, 3);
        assert_eq!(exact_kelly_width(&catalog::n4()).unwrap().width, 3);
    }

    #[test]
    fn exact_width_capacity() {
        let g = Digraph::with_vertices(0..19);
        assert!(matches!(exact_kelly_width(&g), Err(Error::Capacity { .. })));
    }

    #[test]
    fn support_matches_elimination_on_k3() {
        let g = Digraph::complete(3);
        let s = support(&g, 0, &VertexSet::from([1])).unwrap();
        assert_eq!(s, VertexSet::from([2]));
    }

    #[test]
    fn recognise_path_as_partial_zero_dag() {
        assert!(recognize_partial_k(&Digraph::directed_path(3), 0)
            .unwrap()
            .is_yes());
    }

    #[test]
    fn three_cycle_is_not_partial_zero_dag() {
        let c3 = Digraph::directed_cycle(3);
        match recognize_partial_k(&c3, 0).unwrap() {
            Recognition::No(core) => {
                assert_eq!(core.core, c3);
                assert!(core.peeled.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(recognize_partial_k(&c3, 1).unwrap().is_yes());
    }

    #[test]
    fn n4_core_is_itself() {
        match recognize_partial_k(&catalog::n4(), 1).unwrap() {
            Recognition::No(core) => assert_eq!(core.core, catalog::n4()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn k_above_one_is_unsupported() {
        assert!(matches!(
            recognize_partial_k(&Digraph::complete(3), 2),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn peel_ops_replay_to_core() {
        // pendant path into K3 plus a tail out of it
        let mut g = Digraph::complete(3);
        for v in 3..6 {
            g.add_vertex(v);
        }
        g.add_arc(3, 0).unwrap();
        g.add_arc(4, 3).unwrap();
        g.add_arc(1, 5).unwrap();
        let core = residual_core(&g);
        let mut cur = g.clone();
        for op in core.peel_ops() {
            cur = op.apply(&cur).unwrap();
        }
        assert_eq!(cur, core.core);
        assert!(core.core.vertices().all(|v| core.core.out_degree(v) >= 2));
    }
}
