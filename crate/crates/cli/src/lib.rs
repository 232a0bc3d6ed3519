//! The `kelly` command line tool.
//!
//! Every verb reads graphs in the edge-list format, prints one verdict per
//! line (or a single JSON object with `--json`) and maps its outcome to an
//! exit code:
//!
//! | code | meaning                                  |
//! |------|------------------------------------------|
//! | 0    | success, or a "yes" verdict              |
//! | 1    | a "no" verdict                           |
//! | 2    | usage error or malformed input           |
//! | 3    | input exceeds a capacity bound           |
//! | 4    | internal invariant violated (a bug)      |
//!
//! `KELLY_MAX_N` overrides every capacity bound at once.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use kelly_core::decomp::{
    build_decomposition, validate_decomposition, KellyDecomposition, Verdict,
};
use kelly_core::elimination::{exact_kelly_width_with, recognize_partial_k, Recognition};
use kelly_core::extractor::{extract_traced, find_obstruction, ObstructionVerdict};
use kelly_core::game::min_cops_with;
use kelly_core::genlab::{enumerate_all_with, GenSpec};
use kelly_core::minor_ops::replay;
use kelly_core::oracle::{contains_minor_with, Containment, SearchMemo};
use kelly_core::{Digraph, Error, Limits, Obstruction, WitnessScript};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "kelly",
    version,
    about = "Kelly-width, directed minors and the obstructions K3, N4, M5"
)]
struct Cli {
    /// Print one JSON object instead of human-readable lines.
    #[arg(long, global = true)]
    json: bool,

    /// Also write a DOT rendering: the minor when a witness is produced,
    /// otherwise the input graph.
    #[arg(long, global = true, value_name = "OUT")]
    dot: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact Kelly-width and an optimal elimination ordering.
    Width { file: PathBuf },
    /// Greedy recognition of partial 0-DAGs or partial 1-DAGs.
    Recognize {
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        k: u8,
        file: PathBuf,
    },
    /// Brute-force directed minor test.
    Minor {
        /// One of k2, k3, n4, m5.
        #[arg(long, conflicts_with = "pattern", required_unless_present = "pattern")]
        target: Option<String>,
        /// Edge-list file holding the pattern.
        #[arg(long)]
        pattern: Option<PathBuf>,
        /// Write the witness script here.
        #[arg(long, value_name = "OUT")]
        witness: Option<PathBuf>,
        file: PathBuf,
    },
    /// Decides partial 1-DAG membership by peeling and extraction.
    Obstruct {
        #[arg(long, value_name = "OUT")]
        witness: Option<PathBuf>,
        file: PathBuf,
    },
    /// Extracts K3, N4 or M5 from a graph of minimum out-degree 2.
    Extract {
        #[arg(long, value_name = "OUT")]
        witness: Option<PathBuf>,
        file: PathBuf,
    },
    /// Fewest cops that catch an invisible, inert robber.
    Game { file: PathBuf },
    /// Builds and validates a Kelly-decomposition, or validates a given one.
    Decomp {
        /// Validate this decomposition JSON instead of building one.
        #[arg(long, value_name = "DECOMP")]
        check: Option<PathBuf>,
        /// Write the built decomposition here.
        #[arg(long, value_name = "OUT")]
        out: Option<PathBuf>,
        file: PathBuf,
    },
    /// Writes generated graphs as edge-list files plus a manifest.
    Gen {
        /// e.g. `kind=partial_kdag,n=8,k=1,seed=3`
        spec: String,
        /// Number of consecutive seeds starting at the spec's seed.
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Prints one graph per isomorphism class on N vertices.
    Enumerate { n: usize },
    /// Replays a witness script against a graph.
    Verify { file: PathBuf, script: PathBuf },
}

/// Failure of a verb, already classified by exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } => EXIT_CAPACITY,
            Error::Invariant(_) => EXIT_INVARIANT,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = std::result::Result<(i32, String), Failure>;

struct Ctx {
    json: bool,
    dot: Option<PathBuf>,
    limits: Limits,
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code. Output is written in one piece once the verb has finished.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let text = e.render().to_string();
            let _ = if code == EXIT_YES {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let ctx = Ctx {
        json: cli.json,
        dot: cli.dot,
        limits: Limits::from_env(),
    };
    match dispatch(&ctx, cli.command) {
        Ok((code, text)) => {
            let _ = stdout.write_all(text.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(ctx: &Ctx, command: Command) -> Outcome {
    match command {
        Command::Width { file } => width(ctx, &file),
        Command::Recognize { k, file } => recognize(ctx, k as usize, &file),
        Command::Minor {
            target,
            pattern,
            witness,
            file,
        } => minor(ctx, target, pattern, witness, &file),
        Command::Obstruct { witness, file } => obstruct(ctx, witness, &file),
        Command::Extract { witness, file } => extract(ctx, witness, &file),
        Command::Game { file } => game(ctx, &file),
        Command::Decomp { check, out, file } => decomp(ctx, check, out, &file),
        Command::Gen { spec, count, out } => gen(ctx, &spec, count, &out),
        Command::Enumerate { n } => enumerate(ctx, n),
        Command::Verify { file, script } => verify(ctx, &file, &script),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Digraph, Failure> {
    Digraph::parse_edge_list(&read_text(path)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit_dot(ctx: &Ctx, g: &Digraph) -> Result<(), Failure> {
    match &ctx.dot {
        Some(path) => write_text(path, &g.to_dot()),
        None => Ok(()),
    }
}

fn join(vs: impl IntoIterator<Item = impl ToString>) -> String {
    vs.into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn json_line(value: serde_json::Value) -> String {
    format!("{value}\n")
}

/// Saves the witness if requested and renders the minor as DOT.
fn publish_witness(
    ctx: &Ctx,
    g: &Digraph,
    script: &WitnessScript,
    path: Option<&Path>,
) -> Result<(), Failure> {
    if let Some(p) = path {
        write_text(p, &script.to_json())?;
    }
    if ctx.dot.is_some() {
        let minor = replay(g, script)?.result;
        emit_dot(ctx, &minor)?;
    }
    Ok(())
}

fn script_value(script: &WitnessScript) -> serde_json::Value {
    serde_json::to_value(script).expect("scripts serialize")
}

fn width(ctx: &Ctx, file: &Path) -> Outcome {
    let g = read_graph(file)?;
    let kw = exact_kelly_width_with(&g, &ctx.limits)?;
    emit_dot(ctx, &g)?;
    let text = if ctx.json {
        json_line(json!({ "width": kw.width, "ordering": kw.ordering.order }))
    } else {
        format!(
            "kelly-width: {}\nordering: {}\n",
            kw.width,
            join(&kw.ordering.order)
        )
    };
    Ok((EXIT_YES, text))
}

fn recognize(ctx: &Ctx, k: usize, file: &Path) -> Outcome {
    let g = read_graph(file)?;
    match recognize_partial_k(&g, k)? {
        Recognition::Yes(order) => {
            emit_dot(ctx, &g)?;
            let text = if ctx.json {
                json_line(
                    json!({ "verdict": "yes", "k": k, "ordering": order.order, "width": order.width }),
                )
            } else {
                format!(
                    "partial {k}-DAG: yes\nelimination order: {}\n",
                    join(&order.order)
                )
            };
            Ok((EXIT_YES, text))
        }
        Recognition::No(rc) => {
            emit_dot(ctx, &rc.core)?;
            let text = if ctx.json {
                json_line(json!({ "verdict": "no", "k": k, "residual_core": rc.core }))
            } else {
                format!(
                    "partial {k}-DAG: no\nresidual core: {} vertices, arcs {}\n",
                    rc.core.vertex_count(),
                    join(rc.core.arcs().map(|(u, v)| format!("{u}->{v}")))
                )
            };
            Ok((EXIT_NO, text))
        }
    }
}

fn minor(
    ctx: &Ctx,
    target: Option<String>,
    pattern: Option<PathBuf>,
    witness: Option<PathBuf>,
    file: &Path,
) -> Outcome {
    let h = match (target, pattern) {
        (Some(name), None) => Obstruction::from_name(&name)
            .ok_or_else(|| {
                usage(format!(
                    "unknown target `{name}`; expected k2, k3, n4 or m5"
                ))
            })?
            .graph(),
        (None, Some(path)) => read_graph(&path)?,
        _ => return Err(usage("give exactly one of --target and --pattern")),
    };
    let g = read_graph(file)?;
    match contains_minor_with(&g, &h, &ctx.limits, &mut SearchMemo::new())? {
        Containment::Yes(script) => {
            publish_witness(ctx, &g, &script, witness.as_deref())?;
            let text = if ctx.json {
                json_line(json!({ "verdict": "yes", "witness": script_value(&script) }))
            } else {
                format!("minor {}: yes\n{}\n", script.target, script.to_json())
            };
            Ok((EXIT_YES, text))
        }
        Containment::No => {
            emit_dot(ctx, &g)?;
            let text = if ctx.json {
                json_line(json!({ "verdict": "no" }))
            } else {
                "minor: no\n".to_string()
            };
            Ok((EXIT_NO, text))
        }
    }
}

fn obstruct(ctx: &Ctx, witness: Option<PathBuf>, file: &Path) -> Outcome {
    let g = read_graph(file)?;
    match find_obstruction(&g)? {
        ObstructionVerdict::Partial1Dag => {
            emit_dot(ctx, &g)?;
            let text = if ctx.json {
                json_line(json!({ "partial_1_dag": true, "obstruction": null }))
            } else {
                "partial 1-DAG: yes; no obstruction\n".to_string()
            };
            Ok((EXIT_YES, text))
        }
        ObstructionVerdict::Found(ex) => {
            publish_witness(ctx, &g, &ex.script, witness.as_deref())?;
            let name = ex.target.name();
            let text = if ctx.json {
                json_line(json!({
                    "partial_1_dag": false,
                    "obstruction": name,
                    "witness": script_value(&ex.script),
                }))
            } else {
                format!(
                    "partial 1-DAG: no; contains {name}\n{}\n",
                    ex.script.to_json()
                )
            };
            Ok((EXIT_NO, text))
        }
    }
}

fn extract(ctx: &Ctx, witness: Option<PathBuf>, file: &Path) -> Outcome {
    let g = read_graph(file)?;
    let ex = extract_traced(&g)?;
    publish_witness(ctx, &g, &ex.script, witness.as_deref())?;
    let text = if ctx.json {
        json_line(json!({
            "target": ex.target.name(),
            "rules": ex.trace,
            "witness": script_value(&ex.script),
        }))
    } else {
        format!("extracted: {}\n{}\n", ex.target.name(), ex.script.to_json())
    };
    Ok((EXIT_YES, text))
}

fn game(ctx: &Ctx, file: &Path) -> Outcome {
    let g = read_graph(file)?;
    let cops = min_cops_with(&g, &ctx.limits)?;
    emit_dot(ctx, &g)?;
    let text = if ctx.json {
        json_line(json!({ "min_cops": cops }))
    } else {
        format!("min cops: {cops}\n")
    };
    Ok((EXIT_YES, text))
}

fn decomp(ctx: &Ctx, check: Option<PathBuf>, out: Option<PathBuf>, file: &Path) -> Outcome {
    let g = read_graph(file)?;
    emit_dot(ctx, &g)?;
    let d = match check {
        Some(path) => KellyDecomposition::from_json(&read_text(&path)?)?,
        None => {
            let kw = exact_kelly_width_with(&g, &ctx.limits)?;
            build_decomposition(&g, &kw.ordering)?
        }
    };
    if let Some(path) = &out {
        write_text(path, &d.to_json())?;
    }
    let verdict = validate_decomposition(&g, &d)?;
    let (code, text) = match &verdict {
        Verdict::Valid { width } if ctx.json => (
            EXIT_YES,
            json_line(json!({
                "valid": true,
                "width": width,
                "decomposition": serde_json::to_value(&d).expect("decompositions serialize"),
            })),
        ),
        Verdict::Valid { width } => (EXIT_YES, format!("decomposition: valid\nwidth: {width}\n")),
        Verdict::Invalid(v) if ctx.json => (
            EXIT_NO,
            json_line(json!({
                "valid": false,
                "clause": v.clause.to_string(),
                "node": v.node,
                "detail": v.detail,
            })),
        ),
        Verdict::Invalid(v) => (EXIT_NO, format!("decomposition: invalid\nviolation: {v}\n")),
    };
    Ok((code, text))
}

fn gen(ctx: &Ctx, spec: &str, count: u64, dir: &Path) -> Outcome {
    let base: GenSpec = spec.parse()?;
    fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let mut manifest = Vec::new();
    for offset in 0..count {
        let spec = GenSpec {
            seed: base.seed.wrapping_add(offset),
            ..base.clone()
        };
        let graphs = spec.generate()?;
        let mut files = Vec::new();
        for (i, g) in graphs.iter().enumerate() {
            let name = spec.file_name(i);
            write_text(&dir.join(&name), &g.to_edge_list())?;
            files.push(name);
        }
        manifest.push(json!({ "spec": spec, "files": files }));
        written.extend(files);
    }
    let manifest_text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_text(&dir.join("manifest.json"), &format!("{manifest_text}\n"))?;
    let text = if ctx.json {
        json_line(json!({ "files": written }))
    } else {
        written.iter().map(|f| format!("{f}\n")).collect()
    };
    Ok((EXIT_YES, text))
}

fn enumerate(ctx: &Ctx, n: usize) -> Outcome {
    let classes = enumerate_all_with(n, &ctx.limits)?;
    let mut text = String::new();
    for (i, g) in classes.iter().enumerate() {
        if ctx.json {
            text.push_str(&json_line(
                serde_json::to_value(g).expect("graphs serialize"),
            ));
        } else {
            let _ = write!(text, "# class {i}\n{}\n", g.to_edge_list());
        }
    }
    Ok((EXIT_YES, text))
}

fn verify(ctx: &Ctx, file: &Path, script_path: &Path) -> Outcome {
    let g = read_graph(file)?;
    let script = WitnessScript::from_json(&read_text(script_path)?)?;
    let (ok, detail, minor) = match replay(&g, &script) {
        Ok(outcome) if outcome.verified() => (
            true,
            format!("replays to {}", script.target),
            Some(outcome.result),
        ),
        Ok(outcome) if !outcome.isomorphic => (
            false,
            "result is not isomorphic to the claimed graph".into(),
            Some(outcome.result),
        ),
        Ok(outcome) => (
            false,
            "vertex map is not an isomorphism".into(),
            Some(outcome.result),
        ),
        Err(e) => (false, e.to_string(), None),
    };
    emit_dot(ctx, minor.as_ref().unwrap_or(&g))?;
    let text = if ctx.json {
        json_line(json!({ "verified": ok, "detail": detail }))
    } else {
        format!("verified: {}\n{detail}\n", if ok { "yes" } else { "no" })
    };
    Ok((if ok { EXIT_YES } else { EXIT_NO }, text))
}
