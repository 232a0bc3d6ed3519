//! Brute-force directed minor containment.
//!
//! The search only branches on contractions. Edge and vertex deletions can
//! always be postponed to the end of a minor sequence: every operation is
//! monotone under taking spanning subgraphs, and deleting a vertex commutes
//! with any operation not touching it. So `H` is a directed minor of `G`
//! exactly when some sequence of out-, in- and cycle contractions produces a
//! graph containing a subgraph isomorphic to `H`. Each contraction state is
//! tested for such a subgraph directly.
//!
//! States are pruned when they have fewer vertices or arcs than the pattern,
//! or when their largest strong component is smaller than the pattern's
//! (no operation merges strong components), and refuted states are memoised
//! by canonical form.
//!
//! [`contains_minor_exhaustive`] is the unoptimised reference that branches on
//! all five operations; tests cross-check the two.

use std::collections::{BTreeMap, HashSet};

use crate::catalog::Obstruction;
use crate::digraph::canon::canonical_bytes;
use crate::digraph::{canonical_form_with, Dense, Digraph, Vertex};
use crate::elimination::{exact_kelly_width_with, recognize_partial_k};
use crate::error::Result;
use crate::limits::{self, Limits};
use crate::minor_ops::{self, MinorOperation, WitnessScript};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    Yes(WitnessScript),
    No,
}

impl Containment {
    pub fn is_yes(&self) -> bool {
        matches!(self, Containment::Yes(_))
    }

    pub fn witness(&self) -> Option<&WitnessScript> {
        match self {
            Containment::Yes(w) => Some(w),
            Containment::No => None,
        }
    }
}

/// Canonical forms of search states already shown not to contain the target.
/// Tied to one target; switching targets clears it.
#[derive(Debug, Default)]
pub struct SearchMemo {
    target: Option<Vec<u8>>,
    refuted: HashSet<Vec<u8>>,
}

impl SearchMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.refuted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.refuted.is_empty()
    }

    fn bind(&mut self, target: &Dense) {
        let key = canonical_bytes(target);
        if self.target.as_ref() != Some(&key) {
            self.refuted.clear();
            self.target = Some(key);
        }
    }
}

pub fn contains_minor(g: &Digraph, h: &Digraph) -> Result<Containment> {
    contains_minor_with(g, h, &Limits::default(), &mut SearchMemo::new())
}

pub fn contains_minor_with(
    g: &Digraph,
    h: &Digraph,
    limits: &Limits,
    memo: &mut SearchMemo,
) -> Result<Containment> {
    limits::check("minor search", g.vertex_count(), limits.minor_search)?;
    let target = Dense::from_digraph(h);
    memo.bind(&target);
    let pattern = Pattern::new(&target);
    let mut path = Vec::new();
    let found = search(&Dense::from_digraph(g), &pattern, memo, &mut path);
    match found {
        None => Ok(Containment::No),
        Some((state, embedding)) => {
            let script = finish_script(name_of(h), path, &state, &target, h, &embedding);
            Ok(Containment::Yes(script))
        }
    }
}

fn name_of(h: &Digraph) -> String {
    [
        Obstruction::K2,
        Obstruction::K3,
        Obstruction::N4,
        Obstruction::M5,
    ]
    .into_iter()
    .find(|o| &o.graph() == h)
    .map_or_else(|| "pattern".to_string(), |o| o.name().to_string())
}

/// Checks `K3`, `N4`, `M5` in that order and returns the first hit.
pub fn contains_any_obstruction(g: &Digraph) -> Result<Option<(Obstruction, WitnessScript)>> {
    contains_any_obstruction_with(g, &Limits::default())
}

pub fn contains_any_obstruction_with(
    g: &Digraph,
    limits: &Limits,
) -> Result<Option<(Obstruction, WitnessScript)>> {
    limits::check("minor search", g.vertex_count(), limits.minor_search)?;
    for o in Obstruction::PARTIAL_1_DAG {
        let mut memo = SearchMemo::new();
        if let Containment::Yes(w) = contains_minor_with(g, &o.graph(), limits, &mut memo)? {
            return Ok(Some((o, w)));
        }
    }
    Ok(None)
}

/// Whether `h` is not a partial `k`-DAG while every graph one operation away
/// from it is.
pub fn is_minimal_obstruction(h: &Digraph, k: usize) -> Result<bool> {
    is_minimal_obstruction_with(h, k, &Limits::default())
}

pub fn is_minimal_obstruction_with(h: &Digraph, k: usize, limits: &Limits) -> Result<bool> {
    limits::check("minimality check", h.vertex_count(), limits.minimality)?;
    let is_partial = |g: &Digraph| -> Result<bool> {
        if k <= 1 {
            Ok(recognize_partial_k(g, k)?.is_yes())
        } else {
            Ok(exact_kelly_width_with(g, limits)?.width <= k + 1)
        }
    };
    if is_partial(h)? {
        return Ok(false);
    }
    for (_, g) in minor_ops::successors(h) {
        if !is_partial(&g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Pattern<'a> {
    graph: &'a Dense,
    arcs: usize,
    largest_scc: usize,
    /// pattern vertices, most constrained first
    order: Vec<usize>,
}

impl<'a> Pattern<'a> {
    fn new(graph: &'a Dense) -> Self {
        let mut order: Vec<usize> = (0..graph.n()).collect();
        order.sort_by_key(|&i| {
            std::cmp::Reverse(graph.out[i].count_ones() + graph.inn[i].count_ones())
        });
        Pattern {
            graph,
            arcs: graph.arc_count(),
            largest_scc: graph.largest_scc(),
            order,
        }
    }
}

fn search(
    state: &Dense,
    pattern: &Pattern,
    memo: &mut SearchMemo,
    path: &mut Vec<MinorOperation>,
) -> Option<(Dense, Vec<usize>)> {
    if state.n() < pattern.graph.n()
        || state.arc_count() < pattern.arcs
        || state.largest_scc() < pattern.largest_scc
    {
        return None;
    }
    let key = canonical_bytes(state);
    if memo.refuted.contains(&key) {
        return None;
    }
    if let Some(e) = embed(pattern, state) {
        return Some((state.clone(), e));
    }
    for (op, next) in contractions(state) {
        path.push(op);
        if let Some(hit) = search(&next, pattern, memo, path) {
            return Some(hit);
        }
        path.pop();
    }
    memo.refuted.insert(key);
    None
}

/// Out-contractions, in-contractions, then cycle contractions.
fn contractions(d: &Dense) -> Vec<(MinorOperation, Dense)> {
    let n = d.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if d.has(i, j) {
                out.push((
                    MinorOperation::OutContract(d.ids[i], d.ids[j]),
                    d.out_contract(i, j),
                ));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if d.has(i, j) {
                out.push((
                    MinorOperation::InContract(d.ids[i], d.ids[j]),
                    d.in_contract(i, j),
                ));
            }
        }
    }
    for cycle in d.simple_cycles(usize::MAX) {
        let mask = cycle.iter().fold(0u64, |m, &i| m | 1 << i);
        let ids = cycle.iter().map(|&i| d.ids[i]).collect();
        out.push((MinorOperation::ContractCycle(ids), d.contract_set(mask)));
    }
    out
}

/// A witness for `h` inside `state` using deletions only, appended to `steps`.
pub(crate) fn witness_by_deletion(
    target: &str,
    steps: Vec<MinorOperation>,
    state: &Digraph,
    h: &Digraph,
) -> Option<WitnessScript> {
    let d = Dense::from_digraph(state);
    let hd = Dense::from_digraph(h);
    let pattern = Pattern::new(&hd);
    if d.n() < hd.n() || d.arc_count() < pattern.arcs {
        return None;
    }
    let e = embed(&pattern, &d)?;
    Some(finish_script(target.to_string(), steps, &d, &hd, h, &e))
}

/// Injective map from pattern positions to state positions carrying every
/// pattern arc onto a state arc.
fn embed(pattern: &Pattern, state: &Dense) -> Option<Vec<usize>> {
    let k = pattern.graph.n();
    let mut image = vec![usize::MAX; k];
    if extend(pattern, state, 0, 0, &mut image) {
        Some(image)
    } else {
        None
    }
}

fn extend(pattern: &Pattern, state: &Dense, depth: usize, used: u64, image: &mut [usize]) -> bool {
    if depth == pattern.order.len() {
        return true;
    }
    let p = pattern.order[depth];
    let h = pattern.graph;
    let (need_out, need_in) = (h.out[p].count_ones(), h.inn[p].count_ones());
    for s in 0..state.n() {
        if used & (1 << s) != 0
            || state.out[s].count_ones() < need_out
            || state.inn[s].count_ones() < need_in
        {
            continue;
        }
        let consistent = pattern.order[..depth].iter().all(|&q| {
            let t = image[q];
            (!h.has(p, q) || state.has(s, t)) && (!h.has(q, p) || state.has(t, s))
        });
        if !consistent {
            continue;
        }
        image[p] = s;
        if extend(pattern, state, depth + 1, used | (1 << s), image) {
            return true;
        }
    }
    image[p] = usize::MAX;
    false
}

/// Appends the deletions that cut `state` down to the embedded copy of the
/// pattern and packages the script.
fn finish_script(
    target: String,
    mut steps: Vec<MinorOperation>,
    state: &Dense,
    pattern: &Dense,
    claimed: &Digraph,
    embedding: &[usize],
) -> WitnessScript {
    let used: u64 = embedding.iter().fold(0, |m, &s| m | 1 << s);
    for s in 0..state.n() {
        if used & (1 << s) == 0 {
            steps.push(MinorOperation::DeleteVertex(state.ids[s]));
        }
    }
    let mut wanted = HashSet::new();
    for p in 0..pattern.n() {
        for q in 0..pattern.n() {
            if pattern.has(p, q) {
                wanted.insert((embedding[p], embedding[q]));
            }
        }
    }
    for &a in embedding_sorted(embedding).iter() {
        for &b in embedding_sorted(embedding).iter() {
            if state.has(a, b) && !wanted.contains(&(a, b)) {
                steps.push(MinorOperation::DeleteEdge(state.ids[a], state.ids[b]));
            }
        }
    }
    let vertex_map: BTreeMap<Vertex, Vertex> = (0..pattern.n())
        .map(|p| (pattern.ids[p], state.ids[embedding[p]]))
        .collect();
    WitnessScript::new(target, steps, claimed.clone(), vertex_map)
}

fn embedding_sorted(embedding: &[usize]) -> Vec<usize> {
    let mut v = embedding.to_vec();
    v.sort_unstable();
    v
}

/// Reference search over all five operations with canonical-form memoisation.
/// Exponentially slower than [`contains_minor`]; meant for cross-checking on
/// graphs with at most five or six vertices.
pub fn contains_minor_exhaustive(g: &Digraph, h: &Digraph, max_vertices: usize) -> Result<bool> {
    limits::check("exhaustive minor search", g.vertex_count(), max_vertices)?;
    let target = canonical_form_with(h, h.vertex_count())?;
    let mut seen = HashSet::new();
    let mut stack = vec![g.clone()];
    while let Some(cur) = stack.pop() {
        if cur.vertex_count() < h.vertex_count() || cur.arc_count() < h.arc_count() {
            continue;
        }
        let form = canonical_form_with(&cur, cur.vertex_count())?;
        if form == target {
            return Ok(true);
        }
        if !seen.insert(form) {
            continue;
        }
        for (_, next) in minor_ops::successors(&cur) {
            stack.push(next);
        }
    }
    Ok(false)
}

/// Convenience used by the CLI: a named catalogue target.
pub fn contains_obstruction(
    g: &Digraph,
    which: Obstruction,
    limits: &Limits,
) -> Result<Containment> {
    contains_minor_with(g, &which.graph(), limits, &mut SearchMemo::new())
}
