//! Seeded instance generators and exhaustive enumeration.
//!
//! All randomness comes from ChaCha8 seeded through `seed_from_u64`, so a
//! [`GenSpec`] always reproduces the same graph on every platform.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{canonical_form_with, Digraph, Vertex};
use crate::error::{Error, Result};
use crate::limits::{self, Limits};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A `k`-DAG grown from the complete digraph on `k` vertices by `n - k`
/// random steps. Each new vertex `v` gets an out-set `X` of uniformly random
/// size in `0..=k`, chosen uniformly among the existing vertices, and then an
/// arc `(u, v)` from every old `u` that already has arcs to all of `X \ {u}`.
pub fn generate_kdag(n: usize, k: usize, seed: u64) -> Result<Digraph> {
    if n < k {
        return Err(Error::Precondition(format!(
            "k-DAG needs n >= k, got n = {n}, k = {k}"
        )));
    }
    let mut r = rng(seed);
    let mut g = Digraph::complete(k);
    for v in k..n {
        let size = r.gen_range(0..=k);
        let out: Vec<Vertex> = sample(&mut r, v, size)
            .into_iter()
            .map(|i| i as Vertex)
            .collect();
        let v = v as Vertex;
        let back: Vec<Vertex> = (0..v)
            .filter(|&u| out.iter().all(|&w| w == u || g.has_arc(u, w)))
            .collect();
        g.add_vertex(v);
        for &w in &out {
            g.insert_arc(v, w);
        }
        for u in back {
            g.insert_arc(u, v);
        }
    }
    Ok(g)
}

/// A `k`-DAG with each arc kept independently with probability 1/2.
pub fn generate_partial_kdag(n: usize, k: usize, seed: u64) -> Result<Digraph> {
    generate_partial_kdag_with(n, k, seed, 0.5)
}

/// Like [`generate_partial_kdag`] with an explicit keep probability.
pub fn generate_partial_kdag_with(n: usize, k: usize, seed: u64, keep: f64) -> Result<Digraph> {
    check_prob(keep)?;
    let full = generate_kdag(n, k, seed)?;
    // a separate stream so the underlying k-DAG does not depend on `keep`
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut g = Digraph::with_vertices(full.vertices());
    for (u, v) in full.arcs() {
        if r.gen_bool(keep) {
            g.insert_arc(u, v);
        }
    }
    Ok(g)
}

/// Each ordered pair of distinct vertices becomes an arc with probability `p`.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> Result<Digraph> {
    check_prob(p)?;
    let mut r = rng(seed);
    let mut g = Digraph::with_vertices(0..n as Vertex);
    for u in 0..n as Vertex {
        for v in 0..n as Vertex {
            if u != v && r.gen_bool(p) {
                g.insert_arc(u, v);
            }
        }
    }
    Ok(g)
}

/// A random digraph with every out-degree at least 2, arc density 0.3 before
/// repair.
pub fn random_min_out_degree_2(n: usize, seed: u64) -> Result<Digraph> {
    random_min_out_degree_2_with(n, 0.3, seed)
}

/// Draws [`random_digraph`] and then adds random out-arcs to every vertex of
/// out-degree below 2. The repair only adds arcs.
pub fn random_min_out_degree_2_with(n: usize, p: f64, seed: u64) -> Result<Digraph> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "minimum out-degree 2 without loops needs n >= 3, got {n}"
        )));
    }
    let mut g = random_digraph(n, p, seed)?;
    let mut r = rng(seed.wrapping_add(1));
    for u in 0..n as Vertex {
        while g.out_degree(u) < 2 {
            let v = r.gen_range(0..n as Vertex);
            if v != u {
                g.insert_arc(u, v);
            }
        }
    }
    Ok(g)
}

/// One representative per isomorphism class of digraphs on `n` vertices, in
/// order of first appearance when labelled graphs are listed by arc bitmask.
pub fn enumerate_all(n: usize) -> Result<Vec<Digraph>> {
    enumerate_all_with(n, &Limits::default())
}

pub fn enumerate_all_with(n: usize, limits: &Limits) -> Result<Vec<Digraph>> {
    limits::check("enumeration", n, limits.enumerate)?;
    let pairs: Vec<(Vertex, Vertex)> = (0..n as Vertex)
        .flat_map(|u| {
            (0..n as Vertex)
                .filter(move |&v| v != u)
                .map(move |v| (u, v))
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let arcs = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &a)| a);
        let g = Digraph::from_arcs(n, arcs)?;
        let key = canonical_form_with(&g, n)?.canonical_bytes().to_vec();
        if seen.insert(key) {
            out.push(g);
        }
    }
    Ok(out)
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("probability {p} is outside [0, 1]")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    Kdag,
    PartialKdag,
    RandomDigraph,
    #[serde(rename = "out_degree_ge_2")]
    OutDegreeGe2,
    Exhaustive,
}

impl GenKind {
    pub fn label(self) -> &'static str {
        match self {
            GenKind::Kdag => "kdag",
            GenKind::PartialKdag => "partial_kdag",
            GenKind::RandomDigraph => "random_digraph",
            GenKind::OutDegreeGe2 => "out_degree_ge_2",
            GenKind::Exhaustive => "exhaustive",
        }
    }
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            GenKind::Kdag,
            GenKind::PartialKdag,
            GenKind::RandomDigraph,
            GenKind::OutDegreeGe2,
            GenKind::Exhaustive,
        ]
        .into_iter()
        .find(|k| k.label() == s)
        .ok_or_else(|| Error::Invalid(format!("unknown generator kind `{s}`")))
    }
}

/// A reproducible generator request.
///
/// `edge_prob` is the arc probability for `random_digraph` and
/// `out_degree_ge_2`, and the keep probability for `partial_kdag`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_prob")]
    pub edge_prob: f64,
}

fn default_prob() -> f64 {
    0.5
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize, k: usize, seed: u64) -> Self {
        GenSpec {
            kind,
            n,
            k,
            seed,
            edge_prob: default_prob(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_prob(self.edge_prob)?;
        if matches!(self.kind, GenKind::Kdag | GenKind::PartialKdag) && self.n < self.k {
            return Err(Error::Precondition(format!(
                "n = {} is smaller than k = {}",
                self.n, self.k
            )));
        }
        Ok(())
    }

    /// The graphs this spec stands for: one for the random kinds, every
    /// isomorphism class for `exhaustive`.
    pub fn generate(&self) -> Result<Vec<Digraph>> {
        self.validate()?;
        let one = |g: Result<Digraph>| g.map(|g| vec![g]);
        match self.kind {
            GenKind::Kdag => one(generate_kdag(self.n, self.k, self.seed)),
            GenKind::PartialKdag => one(generate_partial_kdag_with(
                self.n,
                self.k,
                self.seed,
                self.edge_prob,
            )),
            GenKind::RandomDigraph => one(random_digraph(self.n, self.edge_prob, self.seed)),
            GenKind::OutDegreeGe2 => one(random_min_out_degree_2_with(
                self.n,
                self.edge_prob,
                self.seed,
            )),
            GenKind::Exhaustive => enumerate_all(self.n),
        }
    }

    /// Corpus file name for the `index`-th graph of this spec. The `k` of the
    /// k-DAG kinds is folded into the kind label; for `exhaustive` the seed
    /// slot carries the index.
    pub fn file_name(&self, index: usize) -> String {
        match self.kind {
            GenKind::Kdag | GenKind::PartialKdag => {
                format!(
                    "{}_k{}_n{}_s{}.dg",
                    self.kind.label(),
                    self.k,
                    self.n,
                    self.seed
                )
            }
            GenKind::Exhaustive => format!("exhaustive_n{}_s{index}.dg", self.n),
            kind => format!("{}_n{}_s{}.dg", kind.label(), self.n, self.seed),
        }
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kind={},n={},k={},seed={},p={}",
            self.kind.label(),
            self.n,
            self.k,
            self.seed,
            self.edge_prob
        )
    }
}

/// Parses `kind=partial_kdag,n=8,k=1,seed=3,p=0.4`; only `kind` and `n` are
/// required.
impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut spec = GenSpec::new(GenKind::RandomDigraph, 0, 0, 0);
        let mut have_n = false;
        for field in s.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("expected key=value, got `{field}`")))?;
            let bad = |_| Error::Invalid(format!("bad value for {key}: `{value}`"));
            match key {
                "kind" => kind = Some(value.parse()?),
                "n" => {
                    spec.n = value.parse().map_err(bad)?;
                    have_n = true;
                }
                "k" => spec.k = value.parse().map_err(bad)?,
                "seed" => spec.seed = value.parse().map_err(bad)?,
                "p" | "edge_prob" => {
                    spec.edge_prob = value
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad value for {key}: `{value}`")))?
                }
                _ => return Err(Error::Invalid(format!("unknown key `{key}`"))),
            }
        }
        spec.kind = kind.ok_or_else(|| Error::Invalid("missing kind=".into()))?;
        if !have_n {
            return Err(Error::Invalid("missing n=".into()));
        }
        spec.validate()?;
        Ok(spec)
    }
}
