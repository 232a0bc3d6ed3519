//! The directed minor operations and replayable witness scripts.
//!
//! Every operation removes self-loops and parallel arcs it would create.
//! Contractions keep the surviving endpoint's id (the head for an
//! out-contraction, the tail for an in-contraction); a contracted cycle
//! becomes a fresh vertex with id `max + 1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::digraph::{are_isomorphic, Dense, Digraph, Vertex, VertexSet};
use crate::error::{Error, Result};

pub fn delete_vertex(g: &Digraph, v: Vertex) -> Result<Digraph> {
    g.require(v)?;
    let mut h = g.clone();
    h.remove_vertex_unchecked(v);
    Ok(h)
}

pub fn delete_edge(g: &Digraph, (u, v): (Vertex, Vertex)) -> Result<Digraph> {
    g.require_arc(u, v)?;
    let mut h = g.clone();
    h.remove_arc_unchecked(u, v);
    Ok(h)
}

/// Drops every out-arc of `u`, redirects its in-arcs to `v`, deletes `u`.
pub fn out_contract(g: &Digraph, (u, v): (Vertex, Vertex)) -> Result<Digraph> {
    g.require_arc(u, v)?;
    let mut h = g.clone();
    let preds: Vec<Vertex> = g
        .in_neighbors(u)
        .iter()
        .copied()
        .filter(|&x| x != v)
        .collect();
    h.remove_vertex_unchecked(u);
    for x in preds {
        h.insert_arc(x, v);
    }
    Ok(h)
}

/// Drops every in-arc of `v`, moves its out-arcs to `u`, deletes `v`.
pub fn in_contract(g: &Digraph, (u, v): (Vertex, Vertex)) -> Result<Digraph> {
    g.require_arc(u, v)?;
    let mut h = g.clone();
    let succs: Vec<Vertex> = g
        .out_neighbors(v)
        .iter()
        .copied()
        .filter(|&x| x != u)
        .collect();
    h.remove_vertex_unchecked(v);
    for x in succs {
        h.insert_arc(u, x);
    }
    Ok(h)
}

/// Replaces the directed cycle `cycle[0] -> cycle[1] -> ... -> cycle[0]` by a
/// fresh vertex that inherits every arc between the cycle and the rest.
pub fn contract_cycle(g: &Digraph, cycle: &[Vertex]) -> Result<Digraph> {
    g.require_all(cycle)?;
    let members: VertexSet = cycle.iter().copied().collect();
    let closed = (0..cycle.len()).all(|i| g.has_arc(cycle[i], cycle[(i + 1) % cycle.len()]));
    if cycle.len() < 2 || members.len() != cycle.len() || !closed {
        return Err(Error::NotACycle(cycle.to_vec()));
    }
    let fresh = g.fresh_id();
    let mut h = g.clone();
    let mut outs = VertexSet::new();
    let mut ins = VertexSet::new();
    for &c in cycle {
        outs.extend(g.out_neighbors(c).iter().filter(|x| !members.contains(x)));
        ins.extend(g.in_neighbors(c).iter().filter(|x| !members.contains(x)));
        h.remove_vertex_unchecked(c);
    }
    h.add_vertex(fresh);
    for x in outs {
        h.insert_arc(fresh, x);
    }
    for x in ins {
        h.insert_arc(x, fresh);
    }
    Ok(h)
}

/// One directed minor operation, addressed by live vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawOperation", into = "RawOperation")]
pub enum MinorOperation {
    DeleteVertex(Vertex),
    DeleteEdge(Vertex, Vertex),
    ContractCycle(Vec<Vertex>),
    OutContract(Vertex, Vertex),
    InContract(Vertex, Vertex),
}

impl MinorOperation {
    pub fn apply(&self, g: &Digraph) -> Result<Digraph> {
        match self {
            MinorOperation::DeleteVertex(v) => delete_vertex(g, *v),
            MinorOperation::DeleteEdge(u, v) => delete_edge(g, (*u, *v)),
            MinorOperation::ContractCycle(c) => contract_cycle(g, c),
            MinorOperation::OutContract(u, v) => out_contract(g, (*u, *v)),
            MinorOperation::InContract(u, v) => in_contract(g, (*u, *v)),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MinorOperation::DeleteVertex(_) => "delete_vertex",
            MinorOperation::DeleteEdge(..) => "delete_edge",
            MinorOperation::ContractCycle(_) => "contract_cycle",
            MinorOperation::OutContract(..) => "out_contract",
            MinorOperation::InContract(..) => "in_contract",
        }
    }

    pub fn args(&self) -> Vec<Vertex> {
        match self {
            MinorOperation::DeleteVertex(v) => vec![*v],
            MinorOperation::DeleteEdge(u, v)
            | MinorOperation::OutContract(u, v)
            | MinorOperation::InContract(u, v) => vec![*u, *v],
            MinorOperation::ContractCycle(c) => c.clone(),
        }
    }
}

impl fmt::Display for MinorOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.kind(), self.args())
    }
}

#[derive(Serialize, Deserialize)]
struct RawOperation {
    kind: String,
    args: Vec<Vertex>,
}

impl From<MinorOperation> for RawOperation {
    fn from(op: MinorOperation) -> Self {
        RawOperation {
            kind: op.kind().to_string(),
            args: op.args(),
        }
    }
}

impl TryFrom<RawOperation> for MinorOperation {
    type Error = String;

    fn try_from(raw: RawOperation) -> std::result::Result<Self, String> {
        let pair = |a: &[Vertex]| match a {
            [u, v] => Ok((*u, *v)),
            _ => Err(format!("`{}` takes two vertex ids", raw.kind)),
        };
        match raw.kind.as_str() {
            "delete_vertex" => match raw.args.as_slice() {
                [v] => Ok(MinorOperation::DeleteVertex(*v)),
                _ => Err("`delete_vertex` takes one vertex id".into()),
            },
            "delete_edge" => pair(&raw.args).map(|(u, v)| MinorOperation::DeleteEdge(u, v)),
            "out_contract" => pair(&raw.args).map(|(u, v)| MinorOperation::OutContract(u, v)),
            "in_contract" => pair(&raw.args).map(|(u, v)| MinorOperation::InContract(u, v)),
            "contract_cycle" => Ok(MinorOperation::ContractCycle(raw.args)),
            other => Err(format!("unknown operation kind `{other}`")),
        }
    }
}

/// Every digraph one operation away from `g`, in a fixed order: vertex
/// deletions, edge deletions, out-contractions, in-contractions, then cycle
/// contractions (simple cycles rooted at their smallest id), each
/// lexicographic by arguments.
pub fn successors(g: &Digraph) -> Vec<(MinorOperation, Digraph)> {
    let mut ops: Vec<MinorOperation> = Vec::new();
    ops.extend(g.vertices().map(MinorOperation::DeleteVertex));
    ops.extend(g.arcs().map(|(u, v)| MinorOperation::DeleteEdge(u, v)));
    ops.extend(g.arcs().map(|(u, v)| MinorOperation::OutContract(u, v)));
    ops.extend(g.arcs().map(|(u, v)| MinorOperation::InContract(u, v)));
    ops.extend(
        simple_cycles(g)
            .into_iter()
            .map(MinorOperation::ContractCycle),
    );
    ops.into_iter()
        .map(|op| {
            let h = op.apply(g).expect("enumerated operation is applicable");
            (op, h)
        })
        .collect()
}

/// All simple directed cycles of length >= 2, each starting at its smallest id,
/// sorted lexicographically.
pub fn simple_cycles(g: &Digraph) -> Vec<Vec<Vertex>> {
    let d = Dense::from_digraph(g);
    let mut cycles: Vec<Vec<Vertex>> = d
        .simple_cycles(usize::MAX)
        .into_iter()
        .map(|c| c.into_iter().map(|i| d.ids[i]).collect())
        .collect();
    cycles.sort();
    cycles
}

/// A replayable certificate that `claimed_result` is a directed minor of the
/// graph the steps are applied to. `vertex_map` sends each vertex of
/// `claimed_result` to the surviving id it corresponds to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessScript {
    pub target: String,
    pub steps: Vec<MinorOperation>,
    pub vertex_map: BTreeMap<Vertex, Vertex>,
    #[serde(rename = "result")]
    pub claimed_result: Digraph,
}

impl WitnessScript {
    pub fn new(
        target: impl Into<String>,
        steps: Vec<MinorOperation>,
        claimed_result: Digraph,
        vertex_map: BTreeMap<Vertex, Vertex>,
    ) -> Self {
        WitnessScript {
            target: target.into(),
            steps,
            vertex_map,
            claimed_result,
        }
    }

    /// Same certificate with `prefix` run first.
    pub fn prepend(mut self, prefix: &[MinorOperation]) -> Self {
        let mut steps = prefix.to_vec();
        steps.append(&mut self.steps);
        self.steps = steps;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness scripts serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub result: Digraph,
    /// Final graph is isomorphic to the claimed result (canonical forms agree).
    pub isomorphic: bool,
    /// `vertex_map` is itself an isomorphism from the claimed result onto the final graph.
    pub mapping_valid: bool,
}

impl ReplayOutcome {
    pub fn verified(&self) -> bool {
        self.isomorphic && self.mapping_valid
    }
}

/// Runs `script` on `g`; a failing step is reported by its index.
pub fn replay(g: &Digraph, script: &WitnessScript) -> Result<ReplayOutcome> {
    let mut cur = g.clone();
    for (step, op) in script.steps.iter().enumerate() {
        cur = op.apply(&cur).map_err(|e| Error::Replay {
            step,
            source: Box::new(e),
        })?;
    }
    let isomorphic = are_isomorphic(&cur, &script.claimed_result)?;
    let mapping_valid = script.claimed_result.vertex_count() == script.vertex_map.len()
        && script
            .claimed_result
            .is_isomorphism(&cur, &script.vertex_map);
    Ok(ReplayOutcome {
        result: cur,
        isomorphic,
        mapping_valid,
    })
}

/// Wire form of a digraph inside witness JSON.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<Vertex>,
    arcs: Vec<(Vertex, Vertex)>,
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            vertices: self.vertices().collect(),
            arcs: self.arcs().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        let mut g = Digraph::with_vertices(raw.vertices);
        for (u, v) in raw.arcs {
            g.add_arc(u, v).map_err(serde::de::Error::custom)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcs(g: &Digraph) -> Vec<(Vertex, Vertex)> {
        g.arcs().collect()
    }

    #[test]
    fn deleting_a_vertex_of_k3_leaves_k2() {
        for v in 0..3 {
            let h = delete_vertex(&Digraph::complete(3), v).unwrap();
            assert_eq!(h.vertex_count(), 2);
            assert_eq!(h.arc_count(), 2);
        }
    }

    #[test]
    fn deleting_one_arc_of_k2() {
        let h = delete_edge(&Digraph::complete(2), (0, 1)).unwrap();
        assert_eq!(arcs(&h), vec![(1, 0)]);
    }

    #[test]
    fn deleting_the_only_vertex_gives_null_graph() {
        let h = delete_vertex(&Digraph::with_vertices([0]), 0).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn missing_targets_are_domain_errors() {
        let g = Digraph::directed_path(2);
        assert_eq!(delete_vertex(&g, 9), Err(Error::UnknownVertex(9)));
        assert_eq!(delete_edge(&g, (1, 0)), Err(Error::MissingArc(1, 0)));
        assert_eq!(out_contract(&g, (1, 0)), Err(Error::MissingArc(1, 0)));
        assert_eq!(in_contract(&g, (1, 0)), Err(Error::MissingArc(1, 0)));
    }

    #[test]
    fn out_contraction_drops_other_out_arcs() {
        // u=0, v=1, w=2
        let g = Digraph::from_arcs(3, [(0, 1), (0, 2)]).unwrap();
        let h = out_contract(&g, (0, 1)).unwrap();
        assert_eq!(h.vertex_set(), VertexSet::from([1, 2]));
        assert_eq!(h.arc_count(), 0);
    }

    #[test]
    fn out_contraction_redirects_in_arcs() {
        // x=0, u=1, v=2
        let g = Digraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(arcs(&out_contract(&g, (1, 2)).unwrap()), vec![(0, 2)]);
    }

    #[test]
    fn out_contracting_a_two_cycle_removes_the_loop() {
        let h = out_contract(&Digraph::complete(2), (0, 1)).unwrap();
        assert_eq!(h.vertex_set(), VertexSet::from([1]));
        assert_eq!(h.arc_count(), 0);
    }

    #[test]
    fn in_contraction_moves_out_arcs() {
        // u=0, v=1, x=2
        let g = Digraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(arcs(&in_contract(&g, (0, 1)).unwrap()), vec![(0, 2)]);
    }

    #[test]
    fn in_contraction_drops_other_in_arcs() {
        // u=0, v=1, w=2
        let g = Digraph::from_arcs(3, [(0, 1), (2, 1)]).unwrap();
        let h = in_contract(&g, (0, 1)).unwrap();
        assert_eq!(h.vertex_set(), VertexSet::from([0, 2]));
        assert_eq!(h.arc_count(), 0);
    }

    #[test]
    fn in_contracting_a_two_cycle_keeps_the_tail() {
        let h = in_contract(&Digraph::complete(2), (0, 1)).unwrap();
        assert_eq!(h.vertex_set(), VertexSet::from([0]));
        assert_eq!(h.arc_count(), 0);
    }

    #[test]
    fn contracting_a_bidirected_edge_of_c4_gives_k3() {
        // hand replay: C4 on 0-1-2-3-0, contract {0,1} into fresh 4.
        // outside neighbours of {0,1} are 3 and 2 in both directions, and
        // 2-3 stays bidirected, so the result is the complete digraph on {2,3,4}.
        let c4 = Digraph::bidirected(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let h = contract_cycle(&c4, &[0, 1]).unwrap();
        let expected: Vec<(Vertex, Vertex)> = vec![(2, 3), (2, 4), (3, 2), (3, 4), (4, 2), (4, 3)];
        assert_eq!(arcs(&h), expected);
    }

    #[test]
    fn contracting_a_whole_cycle_leaves_one_vertex() {
        let h = contract_cycle(&Digraph::directed_cycle(3), &[0, 1, 2]).unwrap();
        assert_eq!(h.vertex_set(), VertexSet::from([3]));
        assert_eq!(h.arc_count(), 0);
    }

    #[test]
    fn contracting_a_two_cycle_keeps_outside_arcs() {
        // u=0, v=1, x=2
        let g = Digraph::from_arcs(3, [(0, 1), (1, 0), (2, 0)]).unwrap();
        let h = contract_cycle(&g, &[0, 1]).unwrap();
        assert_eq!(arcs(&h), vec![(2, 3)]);
    }

    #[test]
    fn non_cycles_are_rejected() {
        let g = Digraph::directed_path(3);
        assert!(matches!(
            contract_cycle(&g, &[0, 1, 2]),
            Err(Error::NotACycle(_))
        ));
        assert!(matches!(contract_cycle(&g, &[0]), Err(Error::NotACycle(_))));
        let k3 = Digraph::complete(3);
        assert!(matches!(
            contract_cycle(&k3, &[0, 1, 0]),
            Err(Error::NotACycle(_))
        ));
    }

    #[test]
    fn operation_json_shape() {
        let op = MinorOperation::OutContract(3, 4);
        assert_eq!(
            serde_json::to_string(&op).unwrap(),
            r#"{"kind":"out_contract","args":[3,4]}"#
        );
        let back: MinorOperation =
            serde_json::from_str(r#"{"kind":"contract_cycle","args":[1,2,3]}"#).unwrap();
        assert_eq!(back, MinorOperation::ContractCycle(vec![1, 2, 3]));
        assert!(
            serde_json::from_str::<MinorOperation>(r#"{"kind":"delete_vertex","args":[1,2]}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<MinorOperation>(r#"{"kind":"fold","args":[1]}"#).is_err());
    }

    #[test]
    fn empty_script_replays_identity() {
        let k3 = Digraph::complete(3);
        let map = (0..3).map(|v| (v, v)).collect();
        let s = WitnessScript::new("k3", vec![], k3.clone(), map);
        assert!(replay(&k3, &s).unwrap().verified());
    }

    #[test]
    fn deleting_a_vertex_does_not_replay_to_k3() {
        let k3 = Digraph::complete(3);
        let s = WitnessScript::new(
            "k3",
            vec![MinorOperation::DeleteVertex(0)],
            k3.clone(),
            BTreeMap::new(),
        );
        let out = replay(&k3, &s).unwrap();
        assert!(!out.isomorphic);
        assert!(!out.verified());
    }

    #[test]
    fn three_cycle_out_contracts_to_k2() {
        let s = WitnessScript::new(
            "k2",
            vec![MinorOperation::OutContract(0, 1)],
            Digraph::complete(2),
            BTreeMap::from([(0, 1), (1, 2)]),
        );
        let out = replay(&Digraph::directed_cycle(3), &s).unwrap();
        assert!(out.verified(), "{:?}", out.result);
    }

    #[test]
    fn replay_names_the_failing_step() {
        let s = WitnessScript::new(
            "k2",
            vec![
                MinorOperation::DeleteVertex(0),
                MinorOperation::DeleteVertex(0),
            ],
            Digraph::complete(2),
            BTreeMap::new(),
        );
        match replay(&Digraph::complete(3), &s) {
            Err(Error::Replay { step, .. }) => assert_eq!(step, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn witness_json_roundtrip() {
        let s = WitnessScript::new(
            "k2",
            vec![
                MinorOperation::OutContract(0, 1),
                MinorOperation::ContractCycle(vec![1, 2]),
            ],
            Digraph::complete(2),
            BTreeMap::from([(0, 1), (1, 2)]),
        );
        let text = s.to_json();
        assert!(text.contains("\"target\": \"k2\""));
        assert_eq!(WitnessScript::from_json(&text).unwrap(), s);
    }

    #[test]
    fn successor_order_is_deletions_first() {
        let succ = successors(&Digraph::complete(2));
        let kinds: Vec<&str> = succ.iter().map(|(op, _)| op.kind()).collect();
        assert_eq!(
            kinds,
            vec![
                "delete_vertex",
                "delete_vertex",
                "delete_edge",
                "delete_edge",
                "out_contract",
                "out_contract",
                "in_contract",
                "in_contract",
                "contract_cycle"
            ]
        );
    }
}
