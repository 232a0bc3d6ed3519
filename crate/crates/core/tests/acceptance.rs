//! Acceptance suite. Every criterion is checked at zero tolerance and
//! reports a single PASS or FAIL line; the process exits non-zero if any
//! criterion fails.
//!
//! Each criterion compares a production routine against an independent
//! oracle: brute-force minor search, exhaustive permutation of elimination
//! orderings, step-by-step elimination, or the cops-and-robber game.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kelly_core::catalog::{k2, k3, m5, n4};
use kelly_core::decomp::{build_decomposition, validate_decomposition, Verdict};
use kelly_core::elimination::{
    eliminate_vertex, exact_kelly_width, ordering_width, recognize_partial_k, support,
};
use kelly_core::extractor::extract_traced;
use kelly_core::game::min_cops;
use kelly_core::genlab::{
    enumerate_all, generate_partial_kdag, random_digraph, random_min_out_degree_2,
};
use kelly_core::minor_ops::{replay, successors};
use kelly_core::oracle::{
    contains_any_obstruction, contains_minor, contains_obstruction, is_minimal_obstruction,
};
use kelly_core::{Digraph, Limits, Vertex, VertexSet};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn small_graphs() -> Vec<Digraph> {
    (1..=4)
        .flat_map(|n| enumerate_all(n).expect("n <= 4 enumerates"))
        .collect()
}

/// Random digraphs on `lo..=hi` vertices with densities spread over a range
/// so both verdicts of each equivalence are well represented.
fn random_graphs(count: usize, lo: usize, hi: usize, stream: u64) -> Vec<Digraph> {
    const DENSITIES: [f64; 5] = [0.12, 0.2, 0.3, 0.4, 0.55];
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(lo..=hi);
            random_digraph(n, DENSITIES[i % DENSITIES.len()], rng.gen()).unwrap()
        })
        .collect()
}

fn describe(g: &Digraph) -> String {
    format!("{:?}", g.arcs().collect::<Vec<_>>())
}

/// 1 + the best width over every permutation of the vertex set.
fn brute_force_kelly_width(g: &Digraph) -> usize {
    fn permute(g: &Digraph, rest: &mut Vec<Vertex>, prefix: &mut Vec<Vertex>, best: &mut usize) {
        if rest.is_empty() {
            let w = ordering_width(g, prefix).unwrap().width;
            *best = (*best).min(w);
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            permute(g, rest, prefix, best);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut best = usize::MAX;
    permute(g, &mut g.vertices().collect(), &mut Vec::new(), &mut best);
    best + 1
}

fn criterion_1() -> Check {
    let mut graphs = small_graphs();
    let exhaustive = graphs.len();
    graphs.extend(random_graphs(2000, 5, 7, 1));
    let (mut yes, mut no) = (0, 0);
    for g in &graphs {
        let recognized = recognize_partial_k(g, 1).unwrap().is_yes();
        let free = contains_any_obstruction(g).unwrap().is_none();
        if recognized != free {
            return Err(format!(
                "recognize={recognized}, obstruction-free={free} on {}",
                describe(g)
            ));
        }
        if recognized {
            yes += 1;
        } else {
            no += 1;
        }
    }
    Ok(format!(
        "{exhaustive} exhaustive + 2000 random; {yes} partial 1-DAGs, {no} with an obstruction"
    ))
}

fn criterion_2() -> Check {
    let mut graphs = small_graphs();
    graphs.extend(random_graphs(1000, 1, 7, 2));
    let mut dags = 0;
    for g in &graphs {
        let acyclic = g.is_acyclic();
        let no_k2 = !contains_minor(g, &k2()).unwrap().is_yes();
        let recognized = recognize_partial_k(g, 0).unwrap().is_yes();
        if acyclic != no_k2 || acyclic != recognized {
            return Err(format!(
                "acyclic={acyclic}, no K2 minor={no_k2}, partial 0-DAG={recognized} on {}",
                describe(g)
            ));
        }
        dags += acyclic as usize;
    }
    Ok(format!("{} graphs, {dags} acyclic", graphs.len()))
}

fn criterion_3() -> Check {
    let mut graphs = small_graphs();
    graphs.extend(random_graphs(200, 1, 6, 3));
    for g in &graphs {
        let kw = exact_kelly_width(g).unwrap();
        let cops = min_cops(g).unwrap();
        let d = build_decomposition(g, &kw.ordering).unwrap();
        let decomp_width = match validate_decomposition(g, &d).unwrap() {
            Verdict::Valid { width } => width,
            Verdict::Invalid(v) => {
                return Err(format!(
                    "built decomposition invalid ({v}) on {}",
                    describe(g)
                ))
            }
        };
        let brute = brute_force_kelly_width(g);
        if [cops, decomp_width, brute].iter().any(|&w| w != kw.width) {
            return Err(format!(
                "dp={}, cops={cops}, decomposition={decomp_width}, permutations={brute} on {}",
                kw.width,
                describe(g)
            ));
        }
    }
    Ok(format!("{} graphs agree on all four widths", graphs.len()))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pairs = 0;
    while pairs < 2000 {
        let n = rng.gen_range(2..=7);
        let g = random_digraph(n, rng.gen_range(0.15..0.6), rng.gen()).unwrap();
        let options = successors(&g);
        if options.is_empty() {
            continue;
        }
        let (op, h) = &options[rng.gen_range(0..options.len())];
        let (wg, wh) = (
            exact_kelly_width(&g).unwrap().width,
            exact_kelly_width(h).unwrap().width,
        );
        if wh > wg {
            return Err(format!(
                "{op:?} raised width {wg} -> {wh} on {}",
                describe(&g)
            ));
        }
        pairs += 1;
    }
    Ok(format!("{pairs} single-operation pairs"))
}

fn criterion_5() -> Check {
    for (name, h) in [("K3", k3()), ("N4", n4()), ("M5", m5())] {
        if !is_minimal_obstruction(&h, 1).unwrap() {
            return Err(format!("{name} is not a minimal obstruction"));
        }
        let w = exact_kelly_width(&h).unwrap().width;
        if w != 3 {
            return Err(format!("{name} has Kelly-width {w}"));
        }
    }
    Ok("K3, N4, M5 minimal with Kelly-width 3".into())
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let limits = Limits::default();
    let (mut confirmed, mut fallbacks) = (0, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(3..=12);
        let g = random_min_out_degree_2(n, rng.gen()).unwrap();
        let ex =
            extract_traced(&g).map_err(|e| format!("extract failed ({e}) on {}", describe(&g)))?;
        let outcome = replay(&g, &ex.script)
            .map_err(|e| format!("replay failed ({e}) on {}", describe(&g)))?;
        if !outcome.verified() || !outcome.result.is_isomorphic(&ex.target.graph()).unwrap() {
            return Err(format!(
                "script does not replay to {} on {}",
                ex.target.name(),
                describe(&g)
            ));
        }
        fallbacks += ex.used_fallback() as usize;
        if n <= 7 {
            if !contains_obstruction(&g, ex.target, &limits)
                .unwrap()
                .is_yes()
            {
                return Err(format!(
                    "oracle denies {} in {}",
                    ex.target.name(),
                    describe(&g)
                ));
            }
            confirmed += 1;
        }
    }
    Ok(format!(
        "1000 extractions replayed, {confirmed} confirmed by the oracle, {fallbacks} needed the fallback"
    ))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = 0usize;
    for g in random_graphs(200, 1, 7, 70) {
        let vs: Vec<Vertex> = g.vertices().collect();
        for mask in 0u32..(1 << vs.len()) {
            let t: VertexSet = (0..vs.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| vs[i])
                .collect();
            let expected: Vec<(Vertex, VertexSet)> = vs
                .iter()
                .filter(|v| !t.contains(v))
                .map(|&v| (v, support(&g, v, &t).unwrap()))
                .collect();
            for _ in 0..3 {
                let mut order: Vec<Vertex> = t.iter().copied().collect();
                for i in (1..order.len()).rev() {
                    order.swap(i, rng.gen_range(0..=i));
                }
                let mut cur = g.clone();
                for &x in &order {
                    cur = eliminate_vertex(&cur, x).unwrap();
                }
                for (v, supp) in &expected {
                    if cur.out_neighbors(*v) != supp || cur.out_degree(*v) != supp.len() {
                        return Err(format!(
                            "supp({v}, {t:?}) = {supp:?} but eliminating {order:?} leaves {:?} on {}",
                            cur.out_neighbors(*v),
                            describe(&g)
                        ));
                    }
                }
            }
            pairs += expected.len();
        }
    }
    Ok(format!("{pairs} (v, T) pairs across 3 orders each"))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut widths = BTreeSet::new();
    for _ in 0..500 {
        let k = rng.gen_range(0..=2);
        let n = rng.gen_range(k.max(1)..=10);
        let g = generate_partial_kdag(n, k, rng.gen()).unwrap();
        let w = exact_kelly_width(&g).unwrap().width;
        if w > k + 1 {
            return Err(format!(
                "k={k} sample has Kelly-width {w}: {}",
                describe(&g)
            ));
        }
        widths.insert((k, w));
    }
    Ok(format!("500 samples; observed (k, width) pairs {widths:?}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("partial 1-DAG iff no K3, N4, M5 minor", criterion_1),
        ("acyclic iff no K2 minor", criterion_2),
        (
            "DP width = cops = decomposition = permutations",
            criterion_3,
        ),
        ("Kelly-width is minor-monotone", criterion_4),
        ("K3, N4, M5 are minimal width-3 obstructions", criterion_5),
        ("extraction scripts replay and are confirmed", criterion_6),
        ("supports match step-by-step elimination", criterion_7),
        ("partial k-DAG samples have width at most k+1", criterion_8),
    ];
    let results: Vec<Check> = thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(*f)).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err("panicked".into())))
            .collect()
    });
    let mut failed = false;
    for (i, ((title, _), result)) in criteria.iter().zip(&results).enumerate() {
        match result {
            Ok(detail) => println!("criterion {}: PASS  {title} ({detail})", i + 1),
            Err(detail) => {
                failed = true;
                println!("criterion {}: FAIL  {title}: {detail}", i + 1);
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
