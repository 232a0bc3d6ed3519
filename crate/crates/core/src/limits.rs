//! Desk-scale capacity bounds for the exhaustive algorithms.
//!
//! Every exponential routine checks its input against one of these bounds
//! and fails with [`Error::Capacity`](crate::Error::Capacity) instead of
//! running for hours. The CLI lets `KELLY_MAX_N` raise or lower all of them
//! at once; the dense bitset representation caps everything at 64.

use crate::error::{Error, Result};

/// Hard ceiling imposed by the `u64` adjacency rows used internally.
pub const DENSE_MAX: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub canonical: usize,
    pub minor_search: usize,
    pub minimality: usize,
    pub kelly_width: usize,
    pub game: usize,
    pub enumerate: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            canonical: 10,
            minor_search: 8,
            minimality: 6,
            kelly_width: 18,
            game: 8,
            enumerate: 4,
        }
    }
}

impl Limits {
    /// Every bound set to `n` (clamped to what the representation can hold).
    pub fn uniform(n: usize) -> Self {
        let n = n.min(DENSE_MAX);
        Limits {
            canonical: n,
            minor_search: n,
            minimality: n,
            kelly_width: n.min(30),
            game: n.min(30),
            enumerate: n.min(5),
        }
    }

    /// Reads `KELLY_MAX_N`; falls back to the defaults when unset or unparsable.
    pub fn from_env() -> Self {
        match std::env::var("KELLY_MAX_N")
            .ok()
            .and_then(|s| s.trim().parse().ok())
        {
            Some(n) => Limits::uniform(n),
            None => Limits::default(),
        }
    }
}

pub(crate) fn check(what: &'static str, size: usize, max: usize) -> Result<()> {
    if size > max.min(DENSE_MAX) {
        Err(Error::capacity(what, size, max.min(DENSE_MAX)))
    } else {
        Ok(())
    }
}
