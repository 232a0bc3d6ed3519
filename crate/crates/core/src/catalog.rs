//! The forbidden directed minors of partial 0-DAGs and partial 1-DAGs.
//!
//! `N4` and `M5` are named after the shape their bidirected edges trace:
//! a path `p1 - p2 - p3 - p4` (resp. `p1 - ... - p5`) plus two single arcs
//! pointing into the path, so that every vertex has out-degree exactly 2.
//! Vertex `p_i` carries id `i - 1`.

use crate::digraph::Digraph;

/// The bidirected edge on two vertices.
pub fn k2() -> Digraph {
    Digraph::complete(2)
}

/// The complete digraph on three vertices.
pub fn k3() -> Digraph {
    Digraph::complete(3)
}

/// Bidirected `p1p2, p2p3, p3p4`; arcs `p1 -> p3`, `p4 -> p2`.
pub fn n4() -> Digraph {
    let mut g = Digraph::bidirected(4, [(0, 1), (1, 2), (2, 3)]).expect("valid");
    g.add_arc(0, 2).expect("valid");
    g.add_arc(3, 1).expect("valid");
    g
}

/// Bidirected `p1p2, p2p3, p3p4, p4p5`; arcs `p1 -> p3`, `p5 -> p3`.
pub fn m5() -> Digraph {
    let mut g = Digraph::bidirected(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).expect("valid");
    g.add_arc(0, 2).expect("valid");
    g.add_arc(4, 2).expect("valid");
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Obstruction {
    K2,
    K3,
    N4,
    M5,
}

impl Obstruction {
    /// The partial 1-DAG obstructions in search order.
    pub const PARTIAL_1_DAG: [Obstruction; 3] = [Obstruction::K3, Obstruction::N4, Obstruction::M5];

    pub fn graph(self) -> Digraph {
        match self {
            Obstruction::K2 => k2(),
            Obstruction::K3 => k3(),
            Obstruction::N4 => n4(),
            Obstruction::M5 => m5(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Obstruction::K2 => "k2",
            Obstruction::K3 => "k3",
            Obstruction::N4 => "n4",
            Obstruction::M5 => "m5",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "k2" => Some(Obstruction::K2),
            "k3" => Some(Obstruction::K3),
            "n4" => Some(Obstruction::N4),
            "m5" => Some(Obstruction::M5),
            _ => None,
        }
    }
}

/// All four obstruction graphs in one value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCatalog {
    pub k2: Digraph,
    pub k3: Digraph,
    pub n4: Digraph,
    pub m5: Digraph,
}

impl Default for ObstructionCatalog {
    fn default() -> Self {
        ObstructionCatalog {
            k2: k2(),
            k3: k3(),
            n4: n4(),
            m5: m5(),
        }
    }
}
