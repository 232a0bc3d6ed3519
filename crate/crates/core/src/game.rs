//! Cops and an invisible, inert robber.
//!
//! The robber is tracked as the set of vertices it might occupy. Cops move by
//! helicopter from one placement to another in a single step. A possible
//! robber position is only disturbed when a cop is about to land on it; the
//! robber may then run along any directed path avoiding the cops that stay
//! put during the move. The cops win once no vertex is contaminated.
//!
//! The solver searches the full state space without assuming monotone
//! strategies, so it can serve as an independent check on Kelly-width.

use std::collections::{HashSet, VecDeque};

use crate::digraph::{full, Dense, Digraph, VertexSet};
use crate::error::{Error, Result};
use crate::limits::{self, Limits};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GameState {
    pub cops: VertexSet,
    /// Vertices the robber may occupy; disjoint from `cops`.
    pub contaminated: VertexSet,
}

impl GameState {
    /// No cops placed, robber anywhere.
    pub fn initial(g: &Digraph) -> Self {
        GameState {
            cops: VertexSet::new(),
            contaminated: g.vertex_set(),
        }
    }

    pub fn is_won(&self) -> bool {
        self.contaminated.is_empty()
    }
}

/// Moves the cops from `s.cops` to `new_cops` and updates the contamination.
pub fn resolve_move(
    g: &Digraph,
    s: &GameState,
    new_cops: &VertexSet,
    budget: usize,
) -> Result<GameState> {
    if new_cops.len() > budget {
        return Err(Error::Invalid(format!(
            "{} cops requested, budget is {budget}",
            new_cops.len()
        )));
    }
    g.require_all(new_cops)?;
    g.require_all(&s.cops)?;
    g.require_all(&s.contaminated)?;
    let staying: VertexSet = s.cops.intersection(new_cops).copied().collect();
    let threatened = s.contaminated.intersection(new_cops).copied();
    let fled = g.reach_avoiding(threatened, &staying);
    let contaminated = s
        .contaminated
        .union(&fled)
        .filter(|v| !new_cops.contains(v))
        .copied()
        .collect();
    Ok(GameState {
        cops: new_cops.clone(),
        contaminated,
    })
}

/// Fewest cops that can clear the whole graph from the initial state.
pub fn min_cops(g: &Digraph) -> Result<usize> {
    min_cops_with(g, &Limits::default())
}

pub fn min_cops_with(g: &Digraph, limits: &Limits) -> Result<usize> {
    limits::check("cops and robber game", g.vertex_count(), limits.game)?;
    let d = Dense::from_digraph(g);
    let n = d.n();
    for k in 0..=n {
        if cops_win(&d, k) {
            return Ok(k);
        }
    }
    Err(Error::invariant("placing a cop on every vertex must win"))
}

/// Whether `k` cops can clear `g`.
pub fn cops_can_win(g: &Digraph, k: usize) -> Result<bool> {
    limits::check(
        "cops and robber game",
        g.vertex_count(),
        Limits::default().game,
    )?;
    Ok(cops_win(&Dense::from_digraph(g), k))
}

/// Breadth-first search over `(cops, contaminated)` pairs. Every cop move has
/// a single outcome, so a win exists exactly when a cleared state is
/// reachable; revisiting a state never helps.
fn cops_win(d: &Dense, k: usize) -> bool {
    let n = d.n();
    let all = full(n);
    if all == 0 {
        return true;
    }
    let placements: Vec<u64> = (0..=all).filter(|m| m.count_ones() as usize <= k).collect();
    let start = (0u64, all);
    let mut seen: HashSet<(u64, u64)> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((cops, dirty)) = queue.pop_front() {
        for &next in &placements {
            let staying = cops & next;
            let threatened = dirty & next;
            let fled = if threatened == 0 {
                0
            } else {
                d.reach_within(threatened, all & !staying)
            };
            let after = (dirty | fled) & !next;
            if after == 0 {
                return true;
            }
            if seen.insert((next, after)) {
                queue.push_back((next, after));
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{k2, k3, m5, n4};

    fn set(vs: &[u32]) -> VertexSet {
        vs.iter().copied().collect()
    }

    #[test]
    fn landing_on_the_only_vertex_captures() {
        let g = Digraph::with_vertices([0]);
        let s = resolve_move(&g, &GameState::initial(&g), &set(&[0]), 1).unwrap();
        assert!(s.is_won());
    }

    #[test]
    fn unthreatened_robber_stays_put() {
        let g = Digraph::directed_cycle(4);
        let s = GameState {
            cops: set(&[]),
            contaminated: set(&[2, 3]),
        };
        let t = resolve_move(&g, &s, &set(&[0]), 1).unwrap();
        assert_eq!(t.contaminated, set(&[2, 3]));
    }

    #[test]
    fn robber_escapes_one_cop_on_bidirected_edge() {
        let g = k2();
        let s = resolve_move(&g, &GameState::initial(&g), &set(&[0]), 1).unwrap();
        assert_eq!(s.contaminated, set(&[1]));
        let t = resolve_move(&g, &s, &set(&[1]), 1).unwrap();
        assert_eq!(t.contaminated, set(&[0]));
    }

    #[test]
    fn staying_cops_block_the_escape() {
        let g = Digraph::directed_path(3);
        let s = GameState {
            cops: set(&[1]),
            contaminated: set(&[0, 2]),
        };
        let t = resolve_move(&g, &s, &set(&[0, 1]), 2).unwrap();
        assert_eq!(t.contaminated, set(&[2]));
    }

    #[test]
    fn budget_is_enforced() {
        let g = k3();
        assert!(resolve_move(&g, &GameState::initial(&g), &set(&[0, 1]), 1).is_err());
    }

    #[test]
    fn small_cop_numbers() {
        assert_eq!(min_cops(&Digraph::new()).unwrap(), 0);
        assert_eq!(min_cops(&Digraph::directed_path(5)).unwrap(), 1);
        assert_eq!(min_cops(&Digraph::directed_cycle(3)).unwrap(), 2);
        assert_eq!(min_cops(&k2()).unwrap(), 2);
        assert_eq!(min_cops(&k3()).unwrap(), 3);
        assert_eq!(min_cops(&n4()).unwrap(), 3);
        assert_eq!(min_cops(&m5()).unwrap(), 3);
        assert_eq!(min_cops(&Digraph::complete(5)).unwrap(), 5);
    }

    #[test]
    fn capacity_is_checked() {
        assert!(matches!(
            min_cops(&Digraph::directed_path(9)),
            Err(Error::Capacity { .. })
        ));
    }
}
