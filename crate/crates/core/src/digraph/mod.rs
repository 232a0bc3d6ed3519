//! Finite simple digraphs over opaque integer vertex ids.

pub(crate) mod canon;
mod dense;
mod format;

pub use canon::{are_isomorphic, canonical_form, canonical_form_with, CanonicalForm};
pub(crate) use dense::{full, Dense};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub type Vertex = u32;
pub type VertexSet = BTreeSet<Vertex>;

/// A finite simple digraph: no self-loops, no parallel arcs.
///
/// Antiparallel arcs `(u, v)` and `(v, u)` may both be present; together they
/// form a bidirected edge. Iteration over vertices and arcs is always in
/// ascending id order.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Digraph {
    succ: BTreeMap<Vertex, VertexSet>,
    pred: BTreeMap<Vertex, VertexSet>,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Edgeless digraph on the given vertices.
    pub fn with_vertices(vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut g = Digraph::new();
        for v in vertices {
            g.add_vertex(v);
        }
        g
    }

    /// Builds a digraph on `0..n` from an arc list.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut g = Digraph::with_vertices(0..n as Vertex);
        for (u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    /// Builds a digraph on `0..n` where every listed pair becomes a bidirected edge.
    pub fn bidirected(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut g = Digraph::with_vertices(0..n as Vertex);
        for (u, v) in edges {
            g.add_arc(u, v)?;
            g.add_arc(v, u)?;
        }
        Ok(g)
    }

    /// Complete digraph on `0..n` (every ordered pair of distinct vertices).
    pub fn complete(n: usize) -> Self {
        let mut g = Digraph::with_vertices(0..n as Vertex);
        for u in 0..n as Vertex {
            for v in 0..n as Vertex {
                if u != v {
                    g.insert_arc(u, v);
                }
            }
        }
        g
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`; `n >= 2`.
    pub fn directed_cycle(n: usize) -> Self {
        let mut g = Digraph::with_vertices(0..n as Vertex);
        for i in 0..n {
            let j = (i + 1) % n;
            if i != j {
                g.insert_arc(i as Vertex, j as Vertex);
            }
        }
        g
    }

    /// Directed path `0 -> 1 -> ... -> n-1`.
    pub fn directed_path(n: usize) -> Self {
        let mut g = Digraph::with_vertices(0..n as Vertex);
        for i in 1..n {
            g.insert_arc(i as Vertex - 1, i as Vertex);
        }
        g
    }

    pub fn add_vertex(&mut self, v: Vertex) -> bool {
        if self.succ.contains_key(&v) {
            return false;
        }
        self.succ.insert(v, VertexSet::new());
        self.pred.insert(v, VertexSet::new());
        true
    }

    /// Inserts `(u, v)`; returns whether the arc was new.
    pub fn add_arc(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        self.require(u)?;
        self.require(v)?;
        Ok(self.insert_arc(u, v))
    }

    pub(crate) fn insert_arc(&mut self, u: Vertex, v: Vertex) -> bool {
        debug_assert!(u != v);
        let fresh = self.succ.get_mut(&u).expect("tail present").insert(v);
        self.pred.get_mut(&v).expect("head present").insert(u);
        fresh
    }

    pub(crate) fn remove_arc_unchecked(&mut self, u: Vertex, v: Vertex) -> bool {
        let had = self.succ.get_mut(&u).is_some_and(|s| s.remove(&v));
        if had {
            self.pred.get_mut(&v).expect("head present").remove(&u);
        }
        had
    }

    pub(crate) fn remove_vertex_unchecked(&mut self, v: Vertex) {
        if let Some(outs) = self.succ.remove(&v) {
            for w in outs {
                self.pred.get_mut(&w).expect("head present").remove(&v);
            }
        }
        if let Some(ins) = self.pred.remove(&v) {
            for u in ins {
                self.succ.get_mut(&u).expect("tail present").remove(&v);
            }
        }
    }

    pub(crate) fn require(&self, v: Vertex) -> Result<()> {
        if self.succ.contains_key(&v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub(crate) fn require_all<'a>(&self, vs: impl IntoIterator<Item = &'a Vertex>) -> Result<()> {
        vs.into_iter().try_for_each(|&v| self.require(v))
    }

    pub(crate) fn require_arc(&self, u: Vertex, v: Vertex) -> Result<()> {
        if self.has_arc(u, v) {
            Ok(())
        } else {
            Err(Error::MissingArc(u, v))
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn arc_count(&self) -> usize {
        self.succ.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.succ.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.succ.keys().copied().collect()
    }

    /// All arcs, sorted by `(tail, head)`.
    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.succ
            .iter()
            .flat_map(|(&u, outs)| outs.iter().map(move |&v| (u, v)))
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.succ.contains_key(&v)
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        self.succ.get(&u).is_some_and(|s| s.contains(&v))
    }

    pub fn is_bidirected(&self, u: Vertex, v: Vertex) -> bool {
        self.has_arc(u, v) && self.has_arc(v, u)
    }

    /// Out-neighbours of `v`; empty for unknown vertices.
    pub fn out_neighbors(&self, v: Vertex) -> &VertexSet {
        static EMPTY: VertexSet = VertexSet::new();
        self.succ.get(&v).unwrap_or(&EMPTY)
    }

    pub fn in_neighbors(&self, v: Vertex) -> &VertexSet {
        static EMPTY: VertexSet = VertexSet::new();
        self.pred.get(&v).unwrap_or(&EMPTY)
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out_neighbors(v).len()
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.in_neighbors(v).len()
    }

    pub fn max_id(&self) -> Option<Vertex> {
        self.succ.keys().next_back().copied()
    }

    /// The id given to a vertex created by cycle contraction: one past the largest id.
    pub fn fresh_id(&self) -> Vertex {
        self.max_id().map_or(0, |m| m + 1)
    }

    pub fn min_out_degree(&self) -> Option<usize> {
        self.succ.values().map(BTreeSet::len).min()
    }

    /// Unordered pairs `{u, v}` (reported with `u < v`) carrying both arcs.
    pub fn bidirected_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.arcs()
            .filter(move |&(u, v)| u < v && self.has_arc(v, u))
    }

    /// Arcs `(u, v)` whose reverse is absent.
    pub fn directed_arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.arcs().filter(move |&(u, v)| !self.has_arc(v, u))
    }

    /// Subgraph induced by `keep` (ids outside the graph are ignored).
    pub fn induced(&self, keep: &VertexSet) -> Digraph {
        let mut g = Digraph::with_vertices(keep.iter().copied().filter(|&v| self.has_vertex(v)));
        for (u, v) in self.arcs() {
            if keep.contains(&u) && keep.contains(&v) {
                g.insert_arc(u, v);
            }
        }
        g
    }

    /// Renames vertices through `map`, which must be injective on `V(self)`.
    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> Result<Digraph> {
        let mut g = Digraph::new();
        for v in self.vertices() {
            let image = *map.get(&v).ok_or(Error::UnknownVertex(v))?;
            if !g.add_vertex(image) {
                return Err(Error::Invalid(format!(
                    "relabelling is not injective at {image}"
                )));
            }
        }
        for (u, v) in self.arcs() {
            g.insert_arc(map[&u], map[&v]);
        }
        Ok(g)
    }

    /// Relabels vertices to `0..n` preserving their relative order.
    pub fn compact(&self) -> (Digraph, BTreeMap<Vertex, Vertex>) {
        let map: BTreeMap<Vertex, Vertex> = self
            .vertices()
            .enumerate()
            .map(|(i, v)| (v, i as Vertex))
            .collect();
        let g = self
            .relabel(&map)
            .expect("order-preserving map is injective");
        (g, map)
    }

    /// `Reach(sources)`: every vertex with a directed path from some source.
    pub fn reachable_set(&self, sources: &VertexSet) -> Result<VertexSet> {
        self.require_all(sources)?;
        Ok(self.reach_avoiding(sources.iter().copied(), &VertexSet::new()))
    }

    /// Reachability in `self \ blocked`; sources inside `blocked` are dropped.
    pub(crate) fn reach_avoiding(
        &self,
        sources: impl IntoIterator<Item = Vertex>,
        blocked: &VertexSet,
    ) -> VertexSet {
        let mut seen = VertexSet::new();
        let mut queue = VecDeque::new();
        for s in sources {
            if !blocked.contains(&s) && seen.insert(s) {
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &y in self.out_neighbors(x) {
                if !blocked.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Shortest directed path `from -> ... -> to` whose vertices other than the
    /// endpoints avoid `blocked`. Ties go to the smallest id at each BFS layer.
    pub fn shortest_path_avoiding(
        &self,
        from: Vertex,
        to: Vertex,
        blocked: &VertexSet,
    ) -> Option<Vec<Vertex>> {
        if from == to {
            return Some(vec![from]);
        }
        let mut parent: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        parent.insert(from, from);
        while let Some(x) = queue.pop_front() {
            for &y in self.out_neighbors(x) {
                if parent.contains_key(&y) {
                    continue;
                }
                if y == to {
                    let mut path = vec![to, x];
                    let mut cur = x;
                    while cur != from {
                        cur = parent[&cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                if blocked.contains(&y) {
                    continue;
                }
                parent.insert(y, x);
                queue.push_back(y);
            }
        }
        None
    }

    /// Strongly connected components in topological order of the condensation:
    /// every arc between two components goes from an earlier to a later one.
    pub fn strongly_connected_components(&self) -> Vec<VertexSet> {
        // iterative Tarjan; emits components sinks-first, reversed at the end
        let mut index: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut low: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut on_stack = VertexSet::new();
        let mut stack: Vec<Vertex> = Vec::new();
        let mut out: Vec<VertexSet> = Vec::new();
        let mut next = 0usize;

        for root in self.vertices() {
            if index.contains_key(&root) {
                continue;
            }
            let mut call: Vec<(Vertex, Vec<Vertex>)> = Vec::new();
            index.insert(root, next);
            low.insert(root, next);
            next += 1;
            stack.push(root);
            on_stack.insert(root);
            call.push((
                root,
                self.out_neighbors(root).iter().rev().copied().collect(),
            ));

            while let Some((v, pending)) = call.last_mut() {
                let v = *v;
                if let Some(w) = pending.pop() {
                    if let std::collections::btree_map::Entry::Vacant(e) = index.entry(w) {
                        e.insert(next);
                        low.insert(w, next);
                        next += 1;
                        stack.push(w);
                        on_stack.insert(w);
                        call.push((w, self.out_neighbors(w).iter().rev().copied().collect()));
                    } else if on_stack.contains(&w) {
                        let lw = index[&w];
                        let lv = low.get_mut(&v).unwrap();
                        *lv = (*lv).min(lw);
                    }
                    continue;
                }
                call.pop();
                if let Some((parent, _)) = call.last() {
                    let lv = low[&v];
                    let lp = low.get_mut(parent).unwrap();
                    *lp = (*lp).min(lv);
                }
                if low[&v] == index[&v] {
                    let mut comp = VertexSet::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack.remove(&w);
                        comp.insert(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
        out.reverse();
        out
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.strongly_connected_components().len() <= 1
    }

    pub fn is_acyclic(&self) -> bool {
        self.strongly_connected_components()
            .iter()
            .all(|c| c.len() == 1)
    }

    /// Components with no arc leaving them (sinks of the condensation).
    pub fn terminal_components(&self) -> Vec<VertexSet> {
        self.strongly_connected_components()
            .into_iter()
            .filter(|c| {
                c.iter()
                    .all(|&u| self.out_neighbors(u).iter().all(|v| c.contains(v)))
            })
            .collect()
    }

    /// Weakly connected components, each as a vertex set, ordered by smallest id.
    pub fn weak_components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut comps = Vec::new();
        for s in self.vertices() {
            if seen.contains(&s) {
                continue;
            }
            let mut comp = VertexSet::from([s]);
            let mut queue = VecDeque::from([s]);
            seen.insert(s);
            while let Some(x) = queue.pop_front() {
                for &y in self.out_neighbors(x).iter().chain(self.in_neighbors(x)) {
                    if seen.insert(y) {
                        comp.insert(y);
                        queue.push_back(y);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    pub fn canonical_form(&self) -> Result<CanonicalForm> {
        canonical_form(self)
    }

    pub fn is_isomorphic(&self, other: &Digraph) -> Result<bool> {
        are_isomorphic(self, other)
    }

    /// Whether `map` (defined on all of `V(self)`) is an isomorphism onto `other`.
    pub fn is_isomorphism(&self, other: &Digraph, map: &BTreeMap<Vertex, Vertex>) -> bool {
        if self.vertex_count() != other.vertex_count() || self.arc_count() != other.arc_count() {
            return false;
        }
        match self.relabel(map) {
            Ok(image) => &image == other,
            Err(_) => false,
        }
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Digraph {{ V: {:?}, E: {:?} }}",
            self.vertex_set(),
            self.arcs().collect::<Vec<_>>()
        )
    }
}
