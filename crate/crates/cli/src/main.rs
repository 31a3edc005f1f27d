use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use l1cwc::bounds::{known_value, upper_bound, BoundKind, BoundResult};
use l1cwc::code::{type_census, verify_code, Code, CodeParams, UNBOUNDED};
use l1cwc::construct::{construct, BuildOptions};
use l1cwc::designs::{catalog, provenance, write_design, Design, GDD_CATALOG};
use l1cwc::develop::{develop_file, table_text, verify_table_text, ERRATA_TABLES, TABLES};
use l1cwc::io::{parse_code_file, read_code_file, write_code, write_code_with_footer};
use l1cwc::search::{max_code_exact, Budget, SearchConfig};
use l1cwc::Error;

const EXIT_INVALID: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_NO_RECIPE: u8 = 5;

#[derive(Parser)]
#[command(name = "l1cwc", version, about = "Constant-weight codes in the l1 metric")]
struct Cli {
    /// Seed for randomized constructions and heuristics.
    #[arg(long, global = true, default_value_t = l1cwc::designs::DEFAULT_SEED)]
    seed: u64,

    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long)]
    n: u32,
    /// Alphabet size, or `inf` for nonnegative integers.
    #[arg(long, value_parser = parse_q)]
    q: u32,
    #[arg(long)]
    w: u32,
    #[arg(long)]
    d: u32,
}

fn parse_q(s: &str) -> Result<u32, String> {
    match s {
        "inf" | "Inf" | "INF" => Ok(UNBOUNDED),
        _ => match s.parse::<u32>() {
            Ok(q) if q >= 2 => Ok(q),
            _ => Err(format!("expected an integer >= 2 or `inf`, got `{s}`")),
        },
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Best known value or upper bound.
    Bound(ParamArgs),
    /// Build a code and write it with a provenance footer.
    Construct {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a code file and print the full report.
    Verify {
        #[arg(long)]
        file: PathBuf,
    },
    /// Develop a base-block file under its permutation.
    Develop {
        #[arg(long)]
        file: PathBuf,
        /// Also check the declared expectations.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact maximum code by branch and bound.
    Search {
        #[command(flatten)]
        p: ParamArgs,
        /// `60s`, `1e7nodes`, or both comma-separated.
        #[arg(long)]
        budget: Option<String>,
        /// Extra pruning; only `census` is recognised.
        #[arg(long)]
        prune: Option<String>,
        /// Code file used as a starting lower bound.
        #[arg(long)]
        warm: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bundled tables and designs.
    Catalog {
        #[arg(long)]
        list: bool,
        /// Print one entry (table id or GDD type such as `6^7`).
        #[arg(long)]
        show: Option<String>,
    },
}

struct Outcome {
    code: u8,
    text: String,
    payload: Value,
}

impl Outcome {
    fn ok(text: String, payload: Value) -> Self {
        Outcome { code: 0, text, payload }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) | Error::TableMismatch { .. } | Error::PackingViolation { .. } => EXIT_VERIFY,
        Error::NotFound(_) | Error::PackingUnavailable(_) | Error::RulerUnavailable { .. } => EXIT_BUDGET,
        Error::NoRecipe { .. } => EXIT_NO_RECIPE,
        _ => EXIT_INVALID,
    }
}

fn params(a: &ParamArgs) -> l1cwc::Result<CodeParams> {
    let (p, notice) = CodeParams::normalize(a.n, a.q, a.w, a.d)?;
    if let Some(msg) = notice {
        eprintln!("note: {msg}");
    }
    Ok(p)
}

fn bound_json(b: &BoundResult) -> Value {
    match b.kind {
        BoundKind::Exact(v) => json!({"kind": "exact", "value": v.to_string(), "source": b.source}),
        BoundKind::UpperOnly(v) => json!({"kind": "upper", "value": v.to_string(), "source": b.source}),
        BoundKind::Range(lo, hi) => {
            json!({"kind": "range", "lower": lo.to_string(), "upper": hi.to_string(), "source": b.source})
        }
    }
}

fn code_summary(c: &Code) -> Value {
    let (x, y, z) = type_census(c).xyz();
    json!({
        "params": {"n": c.params.n, "q": c.params.q_label(), "w": c.params.w, "d": c.params.d},
        "size": c.len(),
        "census": type_census(c).counts.iter().map(|(k, v)| (l1cwc::TypeCensus::label(k), *v)).collect::<std::collections::BTreeMap<_, _>>(),
        "xyz": [x, y, z],
    })
}

fn write_out(path: &Option<PathBuf>, text: &str) -> anyhow::Result<Option<String>> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(Error::from)?;
            Ok(Some(p.display().to_string()))
        }
        None => Ok(None),
    }
}

fn cmd_bound(a: &ParamArgs) -> anyhow::Result<Outcome> {
    let p = params(a)?;
    let known = known_value(&p);
    let upper = upper_bound(&p).ok();
    let mut payload = json!({"params": p.to_string(), "known": bound_json(&known)});
    if let Some(u) = &upper {
        payload["upper_bound"] = bound_json(u);
    }
    Ok(Outcome::ok(known.to_string(), payload))
}

fn cmd_construct(a: &ParamArgs, out: &Option<PathBuf>, seed: u64) -> anyhow::Result<Outcome> {
    let p = params(a)?;
    let opts = BuildOptions { seed, ..BuildOptions::default() };
    let built = construct(&p, &opts)?;
    let rep = verify_code(&built.code);
    let known = known_value(&p);
    let footer = vec![
        format!("recipe: {}", built.recipe),
        format!("size: {} (known value {known})", built.code.len()),
        format!("seed: {seed}"),
        format!("verified: {}", rep.is_valid()),
    ];
    let text = write_code_with_footer(&built.code, &footer);
    let file = write_out(out, &text)?;
    let mut payload = code_summary(&built.code);
    payload["recipe"] = json!(built.recipe);
    payload["known"] = bound_json(&known);
    payload["valid"] = json!(rep.is_valid());
    payload["file"] = json!(file);
    let human = if file.is_some() {
        format!("wrote {} words: {}", built.code.len(), footer.join("; "))
    } else {
        text
    };
    Ok(Outcome { code: if rep.is_valid() { 0 } else { EXIT_VERIFY }, text: human, payload })
}

fn cmd_verify(file: &Path) -> anyhow::Result<Outcome> {
    let f = read_code_file(file)?;
    let rep = verify_code(&f.code);
    let mut text = rep.to_string();
    for (i, j, _) in rep.distance_violations.iter().take(1) {
        text.push_str(&format!("\nviolating pair: {} and {}", f.code.words[*i], f.code.words[*j]));
    }
    let payload = json!({"report": serde_json::to_value(&rep)?, "valid": rep.is_valid()});
    Ok(Outcome { code: if rep.is_valid() { 0 } else { EXIT_VERIFY }, text, payload })
}

fn cmd_develop(file: &Path, check: bool, out: &Option<PathBuf>) -> anyhow::Result<Outcome> {
    let raw = std::fs::read_to_string(file).map_err(Error::from)?;
    let f = parse_code_file(&raw)?;
    let code = develop_file(&f)?;
    let rep = verify_code(&code);
    let mut payload = code_summary(&code);
    payload["valid"] = json!(rep.is_valid());
    if check {
        let id = file.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
        verify_table_text(&id, &raw)?;
        payload["expectations"] = json!("met");
    }
    let text = write_code(&code);
    payload["file"] = json!(write_out(out, &text)?);
    let human = if out.is_some() { format!("developed {} words; valid {}", code.len(), rep.is_valid()) } else { text };
    Ok(Outcome { code: if rep.is_valid() { 0 } else { EXIT_VERIFY }, text: human, payload })
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    a: &ParamArgs,
    budget: &Option<String>,
    prune: &Option<String>,
    warm: &Option<PathBuf>,
    out: &Option<PathBuf>,
    seed: u64,
) -> anyhow::Result<Outcome> {
    let p = params(a)?;
    let budget: Budget = match budget {
        Some(s) => s.parse()?,
        None => Budget::unlimited(),
    };
    let prune_with_census = match prune.as_deref() {
        None => false,
        Some("census") => true,
        Some(other) => return Err(Error::InvalidParams(format!("unknown pruning `{other}`")).into()),
    };
    let initial_lower = match warm {
        Some(path) => Some(read_code_file(path)?.code),
        None => None,
    };
    let cfg = SearchConfig { budget, seed, prune_with_census, initial_lower, ..Default::default() };
    let res = max_code_exact(&p, &cfg)?;
    let text = write_code(&res.code);
    let file = write_out(out, &text)?;
    let mut payload = code_summary(&res.code);
    payload["proven_optimal"] = json!(res.proven_optimal);
    payload["budget_exhausted"] = json!(res.budget_exhausted);
    payload["nodes"] = json!(res.nodes);
    payload["file"] = json!(file);
    let status = if res.proven_optimal { "proven optimal" } else { "budget exhausted, best found" };
    let human = format!("size {} ({status}, {} nodes)\n{}", res.code.len(), res.nodes, if out.is_some() { "" } else { &text });
    Ok(Outcome { code: if res.budget_exhausted { EXIT_BUDGET } else { 0 }, text: human.trim_end().to_string(), payload })
}

fn cmd_catalog(list: bool, show: &Option<String>) -> anyhow::Result<Outcome> {
    if let Some(id) = show {
        if let Ok(t) = table_text(id) {
            return Ok(Outcome::ok(t.trim_end().to_string(), json!({"id": id, "kind": "table", "text": t})));
        }
        let g = catalog(id)?;
        let text = write_design(&Design::Gdd(g));
        return Ok(Outcome::ok(text.trim_end().to_string(), json!({"id": id, "kind": "gdd", "text": text})));
    }
    if !list {
        return Err(Error::InvalidParams("use --list or --show ID".into()).into());
    }
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    for (id, text) in TABLES {
        let f = parse_code_file(text)?;
        let size = f.expect.as_ref().and_then(|e| e.size);
        let how = if f.perm.is_some() { "base codewords" } else { "full listing" };
        lines.push(format!("table {id:<8} n={:<4} size={:<5} {how}", f.code.params.n, size.unwrap_or(0)));
        entries.push(json!({"id": id, "kind": "table", "n": f.code.params.n, "size": size, "source": how}));
    }
    for (id, _) in ERRATA_TABLES {
        lines.push(format!("table {id:<8} errata: kept as printed, fails verification"));
        entries.push(json!({"id": id, "kind": "errata"}));
    }
    for (id, _, text) in GDD_CATALOG {
        let prov = provenance(text).join(" | ");
        lines.push(format!("gdd   {id:<8} {prov}"));
        entries.push(json!({"id": id, "kind": "gdd", "source": prov}));
    }
    lines.push("gdd   3^u      built on demand for odd u >= 3".into());
    Ok(Outcome::ok(lines.join("\n"), json!({"entries": entries})))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Bound(a) => cmd_bound(a),
        Cmd::Construct { p, out } => cmd_construct(p, out, cli.seed),
        Cmd::Verify { file } => cmd_verify(file),
        Cmd::Develop { file, verify, out } => cmd_develop(file, *verify, out),
        Cmd::Search { p, budget, prune, warm, out } => cmd_search(p, budget, prune, warm, out, cli.seed),
        Cmd::Catalog { list, show } => cmd_catalog(*list, show),
    };
    match res {
        Ok(o) => {
            if cli.json {
                let mut v = o.payload;
                v["status"] = json!(o.code);
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
            } else {
                println!("{}", o.text);
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            let code = e.downcast_ref::<Error>().map_or(1, exit_code);
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&json!({"status": code, "error": format!("{e:#}")})).unwrap());
            }
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
