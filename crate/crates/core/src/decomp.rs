//! Kelly-decompositions: the guarding predicate, a validator for the three
//! decomposition axioms, and a builder from an elimination ordering.
//!
//! The root clause of the third axiom is read literally: each root after the
//! first must have its bag inside the bags below the earlier roots. Since the
//! bags partition the vertex set, every root except the first then has an
//! empty bag. The first root is unconstrained. The builder therefore hangs
//! everything below a single root, adding an empty-bag root when the natural
//! construction has more than one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, VertexSet};
use crate::elimination::EliminationOrdering;
use crate::error::{Error, Result};

pub type NodeId = u32;

/// Whether `x` guards `w`: the two are disjoint and every arc leaving `w`
/// ends in `x`.
pub fn guards(g: &Digraph, x: &VertexSet, w: &VertexSet) -> Result<bool> {
    g.require_all(x)?;
    g.require_all(w)?;
    if !x.is_disjoint(w) {
        return Ok(false);
    }
    Ok(w.iter().all(|&u| {
        g.out_neighbors(u)
            .iter()
            .all(|v| w.contains(v) || x.contains(v))
    }))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KellyDecomposition {
    pub nodes: Vec<NodeId>,
    /// Arcs `(parent, child)` of the decomposition DAG.
    pub edges: Vec<(NodeId, NodeId)>,
    #[serde(rename = "W")]
    pub w: BTreeMap<NodeId, VertexSet>,
    #[serde(rename = "X")]
    pub x: BTreeMap<NodeId, VertexSet>,
    #[serde(default)]
    pub child_order: BTreeMap<NodeId, Vec<NodeId>>,
    #[serde(default)]
    pub root_order: Vec<NodeId>,
}

impl KellyDecomposition {
    fn bag(map: &BTreeMap<NodeId, VertexSet>, i: NodeId) -> &VertexSet {
        static EMPTY: VertexSet = VertexSet::new();
        map.get(&i).unwrap_or(&EMPTY)
    }

    pub fn w_bag(&self, i: NodeId) -> &VertexSet {
        Self::bag(&self.w, i)
    }

    pub fn x_bag(&self, i: NodeId) -> &VertexSet {
        Self::bag(&self.x, i)
    }

    /// `max |W_i ∪ X_i|`, or 0 without nodes.
    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|&i| self.w_bag(i).union(self.x_bag(i)).count())
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("decomposition JSON: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    Kw1,
    Kw2,
    Kw3,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Kw1 => "KW-1",
            Clause::Kw2 => "KW-2",
            Clause::Kw3 => "KW-3",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    /// The offending node; `None` for partition failures not tied to one node.
    pub node: Option<NodeId>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some(i) => write!(f, "{} at node {i}: {}", self.clause, self.detail),
            None => write!(f, "{}: {}", self.clause, self.detail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid { width: usize },
    Invalid(Violation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }
}

/// Checks the three axioms in order and reports the first failure.
///
/// Malformed input (cycles in the DAG, edges or bags naming unknown nodes,
/// child or root orders that are not permutations of the actual children or
/// roots) is an [`Error::Structural`]; bags naming vertices outside `g` are
/// [`Error::UnknownVertex`].
pub fn validate_decomposition(g: &Digraph, d: &KellyDecomposition) -> Result<Verdict> {
    let shape = Shape::new(d)?;
    for bag in d.w.values().chain(d.x.values()) {
        g.require_all(bag)?;
    }

    // KW-1
    let mut covered = VertexSet::new();
    for &i in &d.nodes {
        for &v in d.w_bag(i) {
            if !covered.insert(v) {
                return Ok(violation(
                    Clause::Kw1,
                    Some(i),
                    format!("vertex {v} lies in two W bags"),
                ));
            }
        }
    }
    if let Some(v) = g.vertices().find(|v| !covered.contains(v)) {
        return Ok(violation(
            Clause::Kw1,
            None,
            format!("vertex {v} lies in no W bag"),
        ));
    }

    let below = shape.w_below(d);

    // KW-2
    for &i in &d.nodes {
        if !guards(g, d.x_bag(i), &below[&i])? {
            return Ok(violation(
                Clause::Kw2,
                Some(i),
                format!("X = {:?} does not guard {:?}", d.x_bag(i), below[&i]),
            ));
        }
    }

    // KW-3
    for &i in &d.nodes {
        let mut allowed: VertexSet = d.w_bag(i).union(d.x_bag(i)).copied().collect();
        for &j in shape.children_in_order(d, i) {
            if let Some(v) = d.x_bag(j).iter().find(|v| !allowed.contains(v)) {
                return Ok(violation(
                    Clause::Kw3,
                    Some(i),
                    format!("child {j} has guard {v} outside W, X and earlier siblings"),
                ));
            }
            allowed.extend(&below[&j]);
        }
    }
    let mut earlier = VertexSet::new();
    for (q, &r) in d.root_order.iter().enumerate() {
        if q > 0 {
            if let Some(v) = d.w_bag(r).iter().find(|v| !earlier.contains(v)) {
                return Ok(violation(
                    Clause::Kw3,
                    Some(r),
                    format!("root {r} has {v} in W outside the earlier roots"),
                ));
            }
        }
        earlier.extend(&below[&r]);
    }

    Ok(Verdict::Valid { width: d.width() })
}

fn violation(clause: Clause, node: Option<NodeId>, detail: String) -> Verdict {
    Verdict::Invalid(Violation {
        clause,
        node,
        detail,
    })
}

/// Adjacency of a decomposition DAG after the structural checks.
struct Shape {
    children: BTreeMap<NodeId, BTreeSet<NodeId>>,
    /// Nodes with every child before its parent.
    postorder: Vec<NodeId>,
}

impl Shape {
    fn new(d: &KellyDecomposition) -> Result<Self> {
        let structural = |m: String| Err(Error::Structural(m));
        let nodes: BTreeSet<NodeId> = d.nodes.iter().copied().collect();
        if nodes.len() != d.nodes.len() {
            return structural("repeated node id".into());
        }
        let known = |i: &NodeId| nodes.contains(i);
        if let Some(i) =
            d.w.keys()
                .chain(d.x.keys())
                .chain(d.child_order.keys())
                .find(|i| !known(i))
        {
            return structural(format!("bag or order for unknown node {i}"));
        }
        let mut children: BTreeMap<NodeId, BTreeSet<NodeId>> =
            nodes.iter().map(|&i| (i, BTreeSet::new())).collect();
        let mut indegree: BTreeMap<NodeId, usize> = nodes.iter().map(|&i| (i, 0)).collect();
        for &(a, b) in &d.edges {
            if !known(&a) || !known(&b) {
                return structural(format!("edge ({a}, {b}) names an unknown node"));
            }
            if children.get_mut(&a).expect("known").insert(b) {
                *indegree.get_mut(&b).expect("known") += 1;
            }
        }

        for &i in &nodes {
            let actual = &children[&i];
            let listed = d.child_order.get(&i).map(Vec::as_slice).unwrap_or(&[]);
            let as_set: BTreeSet<NodeId> = listed.iter().copied().collect();
            if as_set.len() != listed.len() || &as_set != actual {
                return structural(format!(
                    "child order {listed:?} of node {i} does not list its children {actual:?}"
                ));
            }
        }
        let roots: BTreeSet<NodeId> = indegree
            .iter()
            .filter(|(_, &c)| c == 0)
            .map(|(&i, _)| i)
            .collect();
        let listed: BTreeSet<NodeId> = d.root_order.iter().copied().collect();
        if listed.len() != d.root_order.len() || listed != roots {
            return structural(format!(
                "root order {:?} does not list the roots {roots:?}",
                d.root_order
            ));
        }

        // Kahn's algorithm; leftovers sit on a cycle.
        let mut ready: Vec<NodeId> = roots.into_iter().collect();
        let mut topo = Vec::with_capacity(nodes.len());
        while let Some(i) = ready.pop() {
            topo.push(i);
            for &j in &children[&i] {
                let c = indegree.get_mut(&j).expect("known");
                *c -= 1;
                if *c == 0 {
                    ready.push(j);
                }
            }
        }
        if topo.len() != nodes.len() {
            return structural("the decomposition DAG has a directed cycle".into());
        }
        topo.reverse();
        Ok(Shape {
            children,
            postorder: topo,
        })
    }

    fn children_in_order<'a>(&self, d: &'a KellyDecomposition, i: NodeId) -> &'a [NodeId] {
        d.child_order.get(&i).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `W_{⪰i}` for every node.
    fn w_below(&self, d: &KellyDecomposition) -> BTreeMap<NodeId, VertexSet> {
        let mut below: BTreeMap<NodeId, VertexSet> = BTreeMap::new();
        for &i in &self.postorder {
            let mut set = d.w_bag(i).clone();
            for j in &self.children[&i] {
                set.extend(&below[j]);
            }
            below.insert(i, set);
        }
        below
    }
}

/// Builds a decomposition with one node per vertex, `W = {v}` and `X` the
/// support of `v` under `e`.
///
/// Node `v` sits above every vertex reachable from `v` through vertices
/// eliminated no later than `v`; the DAG is the transitive reduction of that
/// relation. Guarding then holds because every arc leaving such a reach set
/// ends in the support of `v`. Children are listed latest-eliminated first,
/// which makes each child's support available from its earlier siblings.
/// When several nodes are maximal, an extra node with empty bags becomes the
/// single root. The result is checked by [`validate_decomposition`] before it
/// is returned.
pub fn build_decomposition(g: &Digraph, e: &EliminationOrdering) -> Result<KellyDecomposition> {
    let order = &e.order;
    if order.len() != g.vertex_count()
        || order.iter().copied().collect::<VertexSet>() != g.vertex_set()
    {
        return Err(Error::Precondition(
            "ordering is not a permutation of the vertex set".into(),
        ));
    }
    let pos: BTreeMap<_, _> = order.iter().enumerate().map(|(p, &v)| (v, p)).collect();

    // reach[p]: vertices reachable from order[p] using only positions <= p.
    let reach: Vec<VertexSet> = (0..order.len())
        .map(|p| {
            let allowed: VertexSet = order[..=p].iter().copied().collect();
            let blocked: VertexSet = order[p + 1..].iter().copied().collect();
            let seen = g.reach_avoiding([order[p]], &blocked);
            debug_assert!(seen.is_subset(&allowed));
            seen
        })
        .collect();

    let mut d = KellyDecomposition::default();
    for (p, &v) in order.iter().enumerate() {
        let id = v;
        d.nodes.push(id);
        d.w.insert(id, [v].into_iter().collect());
        d.x.insert(id, e.supports[p].clone());
    }
    let mut has_parent = VertexSet::new();
    for (p, &v) in order.iter().enumerate() {
        // u is a child of v when no intermediate node lies between them
        let below: Vec<_> = reach[p].iter().copied().filter(|&u| u != v).collect();
        let mut kids: Vec<_> = below
            .iter()
            .copied()
            .filter(|&u| !below.iter().any(|&m| m != u && reach[pos[&m]].contains(&u)))
            .collect();
        kids.sort_by_key(|u| std::cmp::Reverse(pos[u]));
        for &u in &kids {
            d.edges.push((v, u));
            has_parent.insert(u);
        }
        d.child_order.insert(v, kids);
    }
    let mut roots: Vec<_> = order
        .iter()
        .copied()
        .filter(|v| !has_parent.contains(v))
        .collect();
    roots.sort_by_key(|u| std::cmp::Reverse(pos[u]));
    if roots.len() > 1 {
        let top = g.fresh_id();
        d.nodes.push(top);
        for &r in &roots {
            d.edges.push((top, r));
        }
        d.child_order.insert(top, roots);
        d.root_order = vec![top];
    } else {
        d.root_order = roots;
    }
    d.edges.sort_unstable();

    match validate_decomposition(g, &d)? {
        Verdict::Valid { width } if width == e.width + 1 || g.is_empty() => Ok(d),
        Verdict::Valid { width } => Err(Error::invariant(format!(
            "built decomposition has width {width}, ordering width is {}",
            e.width
        ))),
        Verdict::Invalid(v) => Err(Error::invariant(format!(
            "built decomposition is invalid: {v}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{k3, m5, n4};
    use crate::elimination::{exact_kelly_width, ordering_width};

    fn set(vs: &[u32]) -> VertexSet {
        vs.iter().copied().collect()
    }

    #[test]
    fn guarding_basics() {
        let path = Digraph::directed_path(3);
        assert!(guards(&path, &set(&[1]), &set(&[0])).unwrap());
        assert!(!guards(&path, &set(&[]), &set(&[0])).unwrap());
        assert!(!guards(&path, &set(&[0]), &set(&[0])).unwrap());
        assert!(guards(&path, &set(&[]), &set(&[0, 1, 2])).unwrap());
        assert!(guards(&path, &set(&[9]), &set(&[0])).is_err());
    }

    #[test]
    fn single_bag_is_valid() {
        let g = Digraph::directed_path(4);
        let d = KellyDecomposition {
            nodes: vec![0],
            w: [(0, g.vertex_set())].into_iter().collect(),
            root_order: vec![0],
            ..Default::default()
        };
        assert_eq!(
            validate_decomposition(&g, &d).unwrap(),
            Verdict::Valid { width: 4 }
        );
    }

    #[test]
    fn builder_on_single_vertex() {
        let g = Digraph::with_vertices([7]);
        let e = ordering_width(&g, &[7]).unwrap();
        let d = build_decomposition(&g, &e).unwrap();
        assert_eq!(d.nodes, vec![7]);
        assert!(d.x_bag(7).is_empty());
        assert_eq!(d.width(), 1);
    }

    #[test]
    fn builder_on_path() {
        let g = Digraph::directed_path(3);
        let e = ordering_width(&g, &[0, 1, 2]).unwrap();
        let d = build_decomposition(&g, &e).unwrap();
        assert_eq!(d.x_bag(0), &set(&[1]));
        assert_eq!(d.x_bag(1), &set(&[2]));
        assert_eq!(d.width(), 2);
    }

    #[test]
    fn builder_matches_exact_width_on_obstructions() {
        for g in [k3(), n4(), m5()] {
            let kw = exact_kelly_width(&g).unwrap();
            let d = build_decomposition(&g, &kw.ordering).unwrap();
            assert_eq!(d.width(), kw.width);
            assert_eq!(d.width(), 3);
        }
    }

    #[test]
    fn every_order_of_k3_builds() {
        let g = k3();
        for order in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
            let e = ordering_width(&g, &order).unwrap();
            let d = build_decomposition(&g, &e).unwrap();
            assert_eq!(d.width(), 3);
        }
    }

    #[test]
    fn dropping_a_guard_breaks_kw2() {
        let g = Digraph::directed_path(3);
        let e = ordering_width(&g, &[0, 1, 2]).unwrap();
        let mut d = build_decomposition(&g, &e).unwrap();
        d.x.get_mut(&0).unwrap().clear();
        match validate_decomposition(&g, &d).unwrap() {
            Verdict::Invalid(v) => assert_eq!(v.clause, Clause::Kw2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overlapping_bags_break_kw1() {
        let g = Digraph::with_vertices([0, 1]);
        let d = KellyDecomposition {
            nodes: vec![0, 1],
            edges: vec![(0, 1)],
            w: [(0, set(&[0, 1])), (1, set(&[1]))].into_iter().collect(),
            child_order: [(0, vec![1])].into_iter().collect(),
            root_order: vec![0],
            ..Default::default()
        };
        match validate_decomposition(&g, &d).unwrap() {
            Verdict::Invalid(v) => assert_eq!(v.clause, Clause::Kw1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn second_root_with_own_vertex_breaks_kw3() {
        let g = Digraph::with_vertices([0, 1]);
        let d = KellyDecomposition {
            nodes: vec![0, 1],
            w: [(0, set(&[0])), (1, set(&[1]))].into_iter().collect(),
            root_order: vec![0, 1],
            ..Default::default()
        };
        match validate_decomposition(&g, &d).unwrap() {
            Verdict::Invalid(v) => assert_eq!((v.clause, v.node), (Clause::Kw3, Some(1))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cycles_are_structural_errors() {
        let g = Digraph::with_vertices([0]);
        let d = KellyDecomposition {
            nodes: vec![0, 1],
            edges: vec![(0, 1), (1, 0)],
            w: [(0, set(&[0]))].into_iter().collect(),
            child_order: [(0, vec![1]), (1, vec![0])].into_iter().collect(),
            ..Default::default()
        };
        assert!(matches!(
            validate_decomposition(&g, &d),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = n4();
        let kw = exact_kelly_width(&g).unwrap();
        let d = build_decomposition(&g, &kw.ordering).unwrap();
        let text = d.to_json();
        assert!(text.contains("\"W\""));
        assert_eq!(KellyDecomposition::from_json(&text).unwrap(), d);
    }
}
