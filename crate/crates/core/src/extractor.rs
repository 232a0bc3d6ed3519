//! Constructive extraction of `K3`, `N4` or `M5` from a digraph in which
//! every vertex has out-degree at least 2.
//!
//! The procedure follows the minimal-counterexample proof that such graphs
//! always contain one of the three, turned into a loop. Wherever the proof
//! appeals to minimality, the loop checks the corresponding condition and,
//! if it fails, applies the reduction that would have produced a smaller
//! counterexample:
//!
//! 1. trim every out-degree to exactly 2 and restrict to a terminal strong
//!    component;
//! 2. a graph made only of bidirected edges is a bidirected cycle, which
//!    shrinks to `K3` by contracting 2-cycles;
//! 3. a directed arc with no blocker is out-contracted;
//! 4. a bidirected edge with neither a common in-neighbour nor a common
//!    out-neighbour is contracted.
//!
//! Once none of these applies, a bidirected edge `{u, v}` and a third vertex
//! `w` fall into one of four configurations, each of which yields a witness
//! by contracting a few paths onto a core of three to five vertices.
//!
//! Every case builds its contractions on a scratch copy and checks that the
//! core really carries the claimed target before committing. Should a case
//! fail that check, the loop falls back to any single operation that keeps
//! minimum out-degree 2, and failing that to the brute-force oracle on small
//! graphs. The [`Extraction::trace`] records which rules fired, so tests can
//! tell whether the fallbacks are ever used.

use std::collections::{BTreeSet, VecDeque};

use crate::catalog::Obstruction;
use crate::digraph::{Digraph, Vertex, VertexSet};
use crate::elimination::residual_core;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::minor_ops::{self, replay, MinorOperation, WitnessScript};
use crate::oracle::{contains_any_obstruction_with, witness_by_deletion};

/// A normalized working graph: every out-degree exactly 2, strongly
/// connected, with the operations that produced it from the input.
#[derive(Clone, Debug)]
pub struct ExtractionContext {
    pub current: Digraph,
    pub pending_ops: Vec<MinorOperation>,
    /// Arcs whose reverse is absent.
    pub directed_count: usize,
    /// Unordered pairs carrying both arcs.
    pub bidirected_count: usize,
}

impl ExtractionContext {
    fn counting_identity_holds(&self) -> bool {
        self.directed_count + 2 * self.bidirected_count == 2 * self.current.vertex_count()
    }
}

/// Keeps the two smallest out-neighbours of every vertex, then restricts to
/// the terminal strong component containing the smallest id.
pub fn normalize(g: &Digraph) -> Result<ExtractionContext> {
    check_precondition(g)?;
    let mut cur = g.clone();
    let mut ops = Vec::new();
    for v in g.vertices() {
        for &w in g.out_neighbors(v).iter().skip(2) {
            let op = MinorOperation::DeleteEdge(v, w);
            cur = op.apply(&cur)?;
            ops.push(op);
        }
    }
    let keep = cur
        .terminal_components()
        .into_iter()
        .min_by_key(|c| c.first().copied())
        .expect("a nonempty digraph has a terminal component");
    for v in g.vertices().filter(|v| !keep.contains(v)) {
        let op = MinorOperation::DeleteVertex(v);
        cur = op.apply(&cur)?;
        ops.push(op);
    }
    let ctx = ExtractionContext {
        directed_count: cur.directed_arcs().count(),
        bidirected_count: cur.bidirected_edges().count(),
        current: cur,
        pending_ops: ops,
    };
    if !ctx.counting_identity_holds() {
        return Err(Error::invariant(format!(
            "normalized graph has {} directed and {} bidirected edges on {} vertices",
            ctx.directed_count,
            ctx.bidirected_count,
            ctx.current.vertex_count()
        )));
    }
    Ok(ctx)
}

fn check_precondition(g: &Digraph) -> Result<()> {
    match g.min_out_degree() {
        None => Err(Error::Precondition(
            "extraction needs a nonempty digraph".into(),
        )),
        Some(d) if d < 2 => Err(Error::Precondition(format!(
            "extraction needs minimum out-degree 2, found {d}"
        ))),
        Some(_) => Ok(()),
    }
}

/// Smallest `w` with arcs to both ends of the directed arc `(u, v)`.
pub fn find_blocker(g: &Digraph, (u, v): (Vertex, Vertex)) -> Result<Option<Vertex>> {
    g.require_arc(u, v)?;
    if g.has_arc(v, u) {
        return Err(Error::Invalid(format!(
            "({u}, {v}) is bidirected and has no blockers"
        )));
    }
    Ok(common_in(g, u, v, &[]))
}

fn common_in(g: &Digraph, a: Vertex, b: Vertex, skip: &[Vertex]) -> Option<Vertex> {
    g.in_neighbors(a)
        .intersection(g.in_neighbors(b))
        .copied()
        .find(|x| !skip.contains(x))
}

fn common_out(g: &Digraph, a: Vertex, b: Vertex) -> Option<Vertex> {
    g.out_neighbors(a)
        .intersection(g.out_neighbors(b))
        .copied()
        .next()
}

/// The witness together with the rules applied on the way.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub target: Obstruction,
    pub script: WitnessScript,
    pub trace: Vec<&'static str>,
}

impl Extraction {
    pub fn used_fallback(&self) -> bool {
        self.trace.iter().any(|r| r.starts_with("fallback"))
    }
}

pub fn extract(g: &Digraph) -> Result<WitnessScript> {
    Ok(extract_traced(g)?.script)
}

pub fn extract_traced(g: &Digraph) -> Result<Extraction> {
    check_precondition(g)?;
    let mut prefix: Vec<MinorOperation> = Vec::new();
    let mut cur = g.clone();
    let mut trace = Vec::new();

    let (target, script) = loop {
        let ctx = normalize(&cur)?;
        prefix.extend(ctx.pending_ops);
        cur = ctx.current;

        if ctx.directed_count == 0 {
            if cur.vertex_count() == 3 {
                trace.push("bidirected triangle");
                break finish(&cur, &prefix, &cur.vertex_set(), Obstruction::K3)
                    .ok_or_else(|| Error::invariant("a bidirected triangle is K3"))?;
            }
            trace.push("bidirected cycle: contract 2-cycle");
            let v0 = cur.vertices().next().expect("nonempty");
            let v1 = *cur.out_neighbors(v0).first().expect("out-degree 2");
            step(
                &mut cur,
                &mut prefix,
                MinorOperation::ContractCycle(vec![v0, v1]),
            )?;
            continue;
        }

        let unblocked = cur
            .directed_arcs()
            .find(|&(u, v)| common_in(&cur, u, v, &[]).is_none());
        if let Some((u, v)) = unblocked {
            trace.push("unblocked arc: out-contract");
            step(&mut cur, &mut prefix, MinorOperation::OutContract(u, v))?;
            continue;
        }

        let isolated = cur.bidirected_edges().find(|&(u, v)| {
            common_in(&cur, u, v, &[]).is_none() && common_out(&cur, u, v).is_none()
        });
        if let Some((u, v)) = isolated {
            trace.push("isolated bidirected edge: contract");
            step(
                &mut cur,
                &mut prefix,
                MinorOperation::ContractCycle(vec![u, v]),
            )?;
            continue;
        }

        if let Some(built) = dispatch(&cur)? {
            trace.extend(built.labels);
            break finish(
                &built.graph,
                &[prefix.clone(), built.ops].concat(),
                &built.core,
                built.claim,
            )
            .ok_or_else(|| Error::invariant("checked construction did not finish"))?;
        }

        if let Some((op, next)) = shrinking_reduction(&cur) {
            trace.push("fallback: generic reduction");
            prefix.push(op);
            cur = next;
            continue;
        }

        trace.push("fallback: oracle");
        let limits = Limits::default();
        match contains_any_obstruction_with(&cur, &limits) {
            Ok(Some((o, w))) => break (o, w.prepend(&prefix)),
            Ok(None) => {
                return Err(Error::invariant(
                    "a graph of minimum out-degree 2 contains none of K3, N4, M5",
                ))
            }
            Err(_) => {
                return Err(Error::invariant(format!(
                    "no proof case applies to a {}-vertex graph",
                    cur.vertex_count()
                )))
            }
        }
    };

    let outcome = replay(g, &script)?;
    if !outcome.verified() {
        return Err(Error::invariant(format!(
            "emitted {} script does not replay to its target",
            script.target
        )));
    }
    Ok(Extraction {
        target,
        script,
        trace,
    })
}

fn step(cur: &mut Digraph, prefix: &mut Vec<MinorOperation>, op: MinorOperation) -> Result<()> {
    *cur = op.apply(cur)?;
    prefix.push(op);
    Ok(())
}

/// Deletes everything outside `core`, then matches the claimed target (or,
/// failing that, any of the three) inside what is left.
fn finish(
    g: &Digraph,
    prefix: &[MinorOperation],
    core: &VertexSet,
    claim: Obstruction,
) -> Option<(Obstruction, WitnessScript)> {
    let mut steps = prefix.to_vec();
    steps.extend(
        g.vertices()
            .filter(|v| !core.contains(v))
            .map(MinorOperation::DeleteVertex),
    );
    let small = g.induced(core);
    let mut order = vec![claim];
    order.extend(
        Obstruction::PARTIAL_1_DAG
            .into_iter()
            .filter(|&o| o != claim),
    );
    order.into_iter().find_map(|o| {
        witness_by_deletion(o.name(), steps.clone(), &small, &o.graph()).map(|w| (o, w))
    })
}

/// Any single operation after which minimum out-degree 2 survives.
fn shrinking_reduction(g: &Digraph) -> Option<(MinorOperation, Digraph)> {
    minor_ops::successors(g)
        .into_iter()
        .find(|(_, h)| h.min_out_degree().is_some_and(|d| d >= 2))
}

/// Result of one proof case, built on a scratch copy of the graph.
struct Built {
    graph: Digraph,
    ops: Vec<MinorOperation>,
    core: VertexSet,
    claim: Obstruction,
    labels: Vec<&'static str>,
}

/// Scratch graph plus the operations applied to it.
struct Work {
    g: Digraph,
    ops: Vec<MinorOperation>,
    labels: Vec<&'static str>,
}

impl Work {
    fn new(g: &Digraph) -> Self {
        Work {
            g: g.clone(),
            ops: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn apply(&mut self, op: MinorOperation) -> Option<()> {
        self.g = op.apply(&self.g).ok()?;
        self.ops.push(op);
        Some(())
    }

    fn out_contract(&mut self, u: Vertex, v: Vertex) -> Option<()> {
        self.apply(MinorOperation::OutContract(u, v))
    }

    /// Out-contracts `p[n-1]`, then `p[n-2]`, ..., then `p[0]` into the last
    /// vertex of the path.
    fn contract_backwards(&mut self, path: &[Vertex]) -> Option<()> {
        let (&last, rest) = path.split_last()?;
        for &p in rest.iter().rev() {
            self.out_contract(p, last)?;
        }
        Some(())
    }

    /// Out-contracts `(p0, p1)`, `(p1, p2)`, ... so the whole path ends up
    /// identified with its last vertex.
    fn contract_forwards(&mut self, path: &[Vertex]) -> Option<()> {
        for pair in path.windows(2) {
            self.out_contract(pair[0], pair[1])?;
        }
        Some(())
    }

    /// Two paths from the same start: identifies the start with the last
    /// vertex `x` of `second` lying on `first`, then shrinks both remaining
    /// tails to single arcs out of `x`. Returns `x`.
    fn merge_paths(&mut self, first: &[Vertex], second: &[Vertex]) -> Option<Vertex> {
        let on_first: BTreeSet<Vertex> = first.iter().copied().collect();
        let j = second.iter().rposition(|x| on_first.contains(x))?;
        let x = second[j];
        let i = first.iter().position(|&y| y == x)?;
        if i + 1 == first.len() || j + 1 == second.len() {
            return None;
        }
        self.contract_forwards(&first[..=i])?;
        self.contract_backwards(&first[i + 1..])?;
        self.contract_backwards(&second[j + 1..])?;
        Some(x)
    }

    fn done(self, core: &[Vertex], claim: Obstruction) -> Option<Built> {
        let core: VertexSet = core.iter().copied().collect();
        let small = self.g.induced(&core);
        // only commit to a case whose core carries some target
        Obstruction::PARTIAL_1_DAG
            .iter()
            .any(|o| witness_by_deletion(o.name(), Vec::new(), &small, &o.graph()).is_some())
            .then_some(Built {
                graph: self.g,
                ops: self.ops,
                core,
                claim,
                labels: self.labels,
            })
    }
}

/// Breadth-first path from `from` to the first vertex of `targets` reached;
/// interior vertices avoid `avoid` and `targets`. Ties go to smaller ids.
fn path_to(g: &Digraph, from: Vertex, targets: &[Vertex], avoid: &[Vertex]) -> Option<Vec<Vertex>> {
    if targets.contains(&from) {
        return Some(vec![from]);
    }
    let mut parent = std::collections::BTreeMap::from([(from, from)]);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for &y in g.out_neighbors(x) {
            if parent.contains_key(&y) {
                continue;
            }
            parent.insert(y, x);
            if targets.contains(&y) {
                let mut path = vec![y];
                let mut cur = y;
                while cur != from {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            if !avoid.contains(&y) {
                queue.push_back(y);
            }
        }
    }
    None
}

fn other_out(g: &Digraph, v: Vertex, known: Vertex) -> Option<Vertex> {
    let outs = g.out_neighbors(v);
    if outs.len() != 2 || !outs.contains(&known) {
        return None;
    }
    outs.iter().copied().find(|&x| x != known)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Config {
    /// `w` and both ends pairwise bidirected.
    One,
    /// `w -> u`, `w -> v`, `u -> w`, not `v -> w`.
    Two,
    /// `w -> u`, `w -> v` and no arc back.
    Three,
    /// `u -> w`, `v -> w` and no arc back.
    Four,
}

/// Finds a bidirected edge with a third vertex in the most favourable
/// configuration and runs the matching case.
fn dispatch(g: &Digraph) -> Result<Option<Built>> {
    let mut found: Vec<(Config, Vertex, Vertex, Vertex)> = Vec::new();
    for (p, q) in g.bidirected_edges() {
        for &w in g.in_neighbors(p).intersection(g.in_neighbors(q)) {
            match (g.has_arc(p, w), g.has_arc(q, w)) {
                (true, true) => found.push((Config::One, p, q, w)),
                (true, false) => found.push((Config::Two, p, q, w)),
                (false, true) => found.push((Config::Two, q, p, w)),
                (false, false) => found.push((Config::Three, p, q, w)),
            }
        }
        for &w in g.out_neighbors(p).intersection(g.out_neighbors(q)) {
            if !g.has_arc(w, p) && !g.has_arc(w, q) {
                found.push((Config::Four, p, q, w));
            }
        }
    }
    found.sort();
    let only_four = found.first().is_some_and(|f| f.0 == Config::Four);
    for &(config, u, v, w) in &found {
        let built = match config {
            Config::One => {
                let mut work = Work::new(g);
                work.labels.push("case 1");
                work.done(&[u, v, w], Obstruction::K3)
            }
            Config::Two => case2(Work::new(g), u, v, w),
            Config::Three => case3(g, u, v, w),
            Config::Four if only_four => case4(g, u, v, w)?,
            Config::Four => None,
        };
        if built.is_some() {
            return Ok(built);
        }
    }
    Ok(None)
}

/// `u <-> v`, `u <-> w`, `w -> v`, and `v -> w` absent.
fn case2(mut work: Work, u: Vertex, v: Vertex, w: Vertex) -> Option<Built> {
    let g = work.g.clone();
    if !(g.is_bidirected(u, v) && g.is_bidirected(u, w) && g.has_arc(w, v) && !g.has_arc(v, w)) {
        return None;
    }
    let a = other_out(&g, v, u)?;
    let core = [u, v, w];
    let p = path_to(&g, a, &core, &core)?;
    let end = *p.last()?;

    if end == w {
        work.labels.push("case 2.1");
        work.contract_backwards(&p)?;
        return work.done(&core, Obstruction::K3);
    }

    if end == u {
        if g.has_arc(a, v) {
            work.labels.push("case 2.2.1");
            work.contract_backwards(&p[1..])?;
            return work.done(&[u, v, w, a], Obstruction::N4);
        }
        work.labels.push("case 2.2.2");
        let b = common_in(&g, v, a, &[u, w])?;
        let p_ab = path_to(&g, a, &[b], &[u, v, w])?;
        if p.contains(&b) {
            return None;
        }
        let x = work.merge_paths(&p_ab, &p)?;
        work.out_contract(b, v)?;
        return work.done(&[u, v, w, x], Obstruction::N4);
    }

    // the path from a ended at v
    if g.has_arc(a, v) {
        if g.has_arc(a, u) {
            work.labels.push("case 2.3.1.2");
            return work.done(&[u, v, w, a], Obstruction::N4);
        }
        work.labels.push("case 2.3.1.1");
        let b = common_in(&g, v, a, &[u, w])?;
        let p_ab = path_to(&g, a, &[b], &[u, v, w])?;
        work.contract_backwards(&p_ab[1..])?;
        return work.done(&[u, v, w, a, b], Obstruction::M5);
    }

    let b = common_in(&g, v, a, &[u, w])?;
    let c = common_in(&g, b, v, &[u, w])?;
    if g.has_arc(a, b) {
        work.labels.push("case 2.3.2.1");
        let p_ac = path_to(&g, a, &[c], &[u, v, w, b])?;
        work.contract_backwards(&p_ac)?;
        return work.done(&[u, v, w, c, b], Obstruction::M5);
    }
    work.labels.push("case 2.3.2.2");
    let d = common_in(&g, a, b, &[u, v, w, c])?;
    let p_ad = path_to(&g, a, &[d], &[u, v, w, b, c])?;
    let p_ac = path_to(&g, a, &[c], &[u, v, w, b, d])?;
    let x = work.merge_paths(&p_ad, &p_ac)?;
    work.out_contract(c, v)?;
    work.out_contract(d, b)?;
    work.done(&[u, v, w, x, b], Obstruction::M5)
}

/// `u <-> v`, `w -> u`, `w -> v`, and no arc from `u` or `v` to `w`.
fn case3(g: &Digraph, u: Vertex, v: Vertex, w: Vertex) -> Option<Built> {
    let a = other_out(g, v, u)?;
    let b = other_out(g, u, v)?;
    let mut work = Work::new(g);
    if a == b {
        work.labels.push("case 3, shared out-neighbour");
        let p = path_to(g, a, &[w], &[u, v])?;
        work.contract_backwards(&p)?;
        return work.done(&[u, v, w], Obstruction::K3);
    }
    let p_aw = path_to(g, a, &[w], &[u, v]);
    let p_bw = path_to(g, b, &[w], &[u, v]);
    match (p_aw, p_bw) {
        (Some(pa), Some(pb)) => {
            work.labels.push("case 3.1");
            let on_b: BTreeSet<Vertex> = pb.iter().copied().collect();
            let i = pa.iter().position(|x| on_b.contains(x))?;
            work.contract_backwards(&pa[..=i])?;
            work.contract_backwards(&pb)?;
            work.done(&[u, v, w], Obstruction::K3)
        }
        // Shrinking the path from a onto w gives v -> w, which is the second
        // configuration with the roles of u and v exchanged.
        (Some(pa), None) => {
            work.labels.push("case 3.2");
            work.contract_backwards(&pa)?;
            case2(work, v, u, w)
        }
        (None, Some(pb)) => {
            work.labels.push("case 3.2, mirrored");
            work.contract_backwards(&pb)?;
            case2(work, u, v, w)
        }
        (None, None) => None,
    }
}

/// `u <-> v`, `u -> w`, `v -> w`, no arc back, and every other bidirected
/// edge looks the same.
fn case4(g: &Digraph, u: Vertex, v: Vertex, w: Vertex) -> Result<Option<Built>> {
    let outs: Vec<Vertex> = g.out_neighbors(w).iter().copied().collect();
    let [x, y] = outs[..] else {
        return Ok(None);
    };
    // w blocks the directed arc (a, b)
    let (a, b) = match (g.has_arc(x, y), g.has_arc(y, x)) {
        (true, false) => (x, y),
        (false, true) => (y, x),
        _ => return Ok(None),
    };
    if !g.has_arc(a, w) {
        return Err(Error::invariant(format!(
            "case 4.1 reached: {w} blocks ({a}, {b}) but ({a}, {w}) is absent"
        )));
    }
    let mut work = Work::new(g);
    work.labels.push("case 4.2");
    // a path from b reaches {u, v}; name its endpoint v
    let (p, u, v) = match path_to(g, b, &[v], &[u, w, a]) {
        Some(p) => (p, u, v),
        None => match path_to(g, b, &[u], &[v, w, a]) {
            Some(p) => (p, v, u),
            None => return Ok(None),
        },
    };
    if work.contract_backwards(&p).is_none() {
        return Ok(None);
    }
    Ok(work.done(&[u, v, w, a], Obstruction::N4))
}

/// Outcome of the full pipeline on an arbitrary digraph.
#[derive(Clone, Debug)]
pub enum ObstructionVerdict {
    /// Peeling removed every vertex.
    Partial1Dag,
    Found(Extraction),
}

/// Peels vertices of out-degree at most 1, then extracts from the residual
/// core; the peel operations are prepended to the witness.
pub fn find_obstruction(g: &Digraph) -> Result<ObstructionVerdict> {
    let rc = residual_core(g);
    if rc.core.is_empty() {
        return Ok(ObstructionVerdict::Partial1Dag);
    }
    let mut ex = extract_traced(&rc.core)?;
    ex.script = ex.script.prepend(&rc.peel_ops());
    let outcome = replay(g, &ex.script)?;
    if !outcome.verified() {
        return Err(Error::invariant(
            "peeled witness does not replay on the input",
        ));
    }
    Ok(ObstructionVerdict::Found(ex))
}
