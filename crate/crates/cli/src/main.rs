use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use subfam::bench::{named_suite, rerun, run_bench, BenchOptions, BenchReport, Suite};
use subfam::boolean_algebra::{
    determining_subfamily, enumerate_with, AlgebraError, EnumerateOptions,
};
use subfam::bounds::{bounds_profile, BoundsContext, BoundsProfile};
use subfam::constructions::{
    bd_extremal_family, chain_product, co_singleton_family, erdos_shelah_family, geometric_levels,
    leveled_family, power_set, LeveledSpec,
};
use subfam::extraction::{
    default_probability, greedy_extract, kleitman_extract, random_deletion_bd_free,
    ExtractionResult, GreedyOrder,
};
use subfam::format::{parse_family, write_family};
use subfam::grid::{column_prune, es_grid_bound, grid_violation, render, row_sizes, to_grid};
use subfam::manifest::{Output, RunManifest, Timing};
use subfam::oracle::{max_subfamily, min_over_families, OracleResult};
use subfam::rank::rank_partition;
use subfam::search::SearchConfig;
use subfam::turan::{
    base_case_bound, build_kdk, count_kd2, ex_exact, family_hypergraph_bijection, link_diagnostics,
    turan_bound, MultipartiteHypergraph,
};
use subfam::{Property, SetFamily};

#[derive(Parser)]
#[command(
    name = "subfam",
    version,
    about = "Large union-free and B_d-free subfamilies of set families"
)]
struct Cli {
    /// Output format; JSON is canonical, CSV a flat projection. `generate`
    /// writes the family text format unless json is asked for.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "SUBFAM_THREADS", global = true)]
    threads: Option<usize>,
    /// Record wall-clock timing in the manifest (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named family in the text format.
    Generate(GenerateArgs),
    /// Parse a family file and summarize it.
    Validate { input: PathBuf },
    /// Enumerate Boolean subalgebras of dimension d.
    Detect(DetectArgs),
    /// Grid view of a subfamily of F_ES(k).
    Grid(GridArgs),
    /// Extract a large subfamily with a property.
    Extract(ExtractArgs),
    /// Exact maximum subfamily by branch and bound.
    Exact(ExactArgs),
    /// Minimum of the exact maximum over all m-member families on [n].
    ExactMin(ExactMinArgs),
    /// Turán numbers of K_{d*2} in the multipartite host.
    Turan(TuranArgs),
    /// Evaluate every bound that applies to the given parameters.
    Bounds(BoundsArgs),
    /// Join a result file with a bounds file into CSV rows.
    Report(ReportArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    ChainProduct,
    Es,
    BdExtremal,
    Leveled,
    Geometric,
    CoSingleton,
    PowerSet,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Chain lengths for chain-product, level sizes for leveled.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    input: PathBuf,
    #[arg(long)]
    d: usize,
    /// Stop after this many witnesses (exit status 1).
    #[arg(long)]
    limit: Option<usize>,
    /// Require a nonempty base atom.
    #[arg(long)]
    strict: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    a: usize,
    /// Print the k×k matrix instead of JSON.
    #[arg(long)]
    show: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExtractMethod {
    RandomDeletion,
    Kleitman,
    Greedy,
}

#[derive(Args)]
struct ExtractArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    method: ExtractMethod,
    /// bd:D, uf:A or abuf:A,B
    #[arg(long)]
    property: Property,
    /// Keep probability for random deletion: `auto` or a number in (0, 1].
    #[arg(long, default_value = "auto")]
    p: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "given")]
    order: GreedyOrder,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    property: Property,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExactMinArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    property: Property,
    /// Maximum number of candidate families before giving up.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u128,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TuranArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Explicit part sizes instead of k, k², …
    #[arg(long, value_delimiter = ',')]
    parts: Vec<usize>,
    #[arg(long, group = "mode")]
    exact: bool,
    #[arg(long, group = "mode")]
    bound: bool,
    #[arg(long, group = "mode")]
    bijection: bool,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Parameters as `key=value` pairs, e.g. `m=64,d=2`; individual flags win.
    #[arg(long)]
    context: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Output of `extract` or `exact`.
    #[arg(long)]
    result: PathBuf,
    /// Output of `bounds`.
    #[arg(long)]
    bounds: PathBuf,
    /// Family label (default: the input path recorded in the result).
    #[arg(long)]
    family: Option<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Built-in suite name (b2-small, uf-es, empty) or a suite JSON file.
    #[arg(long, required_unless_present = "rerun")]
    suite: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 50_000_000)]
    node_limit: u64,
    /// Re-execute the manifest embedded in an earlier bench output.
    #[arg(long, conflicts_with = "suite")]
    rerun: Option<PathBuf>,
    /// With --rerun: fail unless the new output matches the old byte for byte.
    #[arg(long, requires = "rerun")]
    check: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

struct Ctx {
    format: Format,
    explicit_json: bool,
    timing: bool,
    start: Instant,
}

impl Ctx {
    fn finish(&self, mut manifest: RunManifest) -> RunManifest {
        if self.timing {
            manifest.timing = Some(Timing {
                elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
            });
        }
        manifest
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => print_out(text),
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_out(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn json_text<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// JSON with embedded manifest, or the CSV projection with the manifest in
/// a sidecar file when writing to disk.
fn emit<T: serde::Serialize>(
    ctx: &Ctx,
    manifest: RunManifest,
    result: &T,
    csv: impl FnOnce() -> Result<String>,
    output: Option<&Path>,
) -> Result<()> {
    let manifest = ctx.finish(manifest);
    match ctx.format {
        Format::Json => write_out(output, &json_text(&Output { manifest, result })),
        Format::Csv => {
            if let Some(p) = output {
                write_sidecar(p, &manifest)?;
            }
            write_out(output, &csv()?)
        }
    }
}

fn write_sidecar(path: &Path, manifest: &RunManifest) -> Result<()> {
    let mut side = path.as_os_str().to_owned();
    side.push(".manifest.json");
    fs::write(PathBuf::from(side), json_text(manifest)).context("writing manifest sidecar")
}

fn read_family(path: &Path) -> Result<(SetFamily, Vec<u8>)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).context("family file is not UTF-8")?;
    let family = parse_family(text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok((family, bytes))
}

fn seed_or_fresh(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    eprintln!("seed: {seed}");
    seed
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn generate(ctx: &Ctx, args: GenerateArgs) -> Result<()> {
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| anyhow!("--{name} is required for this kind"))
    };
    let family = match args.kind {
        Kind::ChainProduct => chain_product(&args.sizes)?,
        Kind::Es => erdos_shelah_family(need(args.k, "k")?)?,
        Kind::BdExtremal => bd_extremal_family(need(args.k, "k")?, need(args.d, "d")?)?,
        Kind::Leveled => {
            let spec = if args.sizes.is_empty() {
                LeveledSpec::uniform(need(args.q, "q")?, need(args.k, "k")?)
            } else {
                LeveledSpec {
                    level_sizes: args.sizes.clone(),
                }
            };
            leveled_family(&spec)?
        }
        Kind::Geometric => {
            let g = geometric_levels(need(args.a, "a")?, need(args.k, "k")?, need(args.q, "q")?)?;
            leveled_family(&g.spec)?
        }
        Kind::CoSingleton => co_singleton_family(need(args.m, "m")?)?,
        Kind::PowerSet => power_set(need(args.n, "n")?)?,
    };
    let kind = args
        .kind
        .to_possible_value()
        .unwrap()
        .get_name()
        .to_string();
    let manifest = RunManifest::new("generate")
        .flag("kind", kind)
        .flag("sizes", &args.sizes)
        .flag("k", args.k)
        .flag("d", args.d)
        .flag("q", args.q)
        .flag("a", args.a)
        .flag("m", args.m)
        .flag("n", args.n);
    let manifest = ctx.finish(manifest);
    if ctx.explicit_json {
        return write_out(
            args.output.as_deref(),
            &json_text(&Output {
                manifest,
                result: &family,
            }),
        );
    }
    if let Some(p) = &args.output {
        write_sidecar(p, &manifest)?;
    }
    write_out(args.output.as_deref(), &write_family(&family))
}

fn validate(ctx: &Ctx, input: &Path) -> Result<bool> {
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let text = String::from_utf8_lossy(&bytes);
    let (ok, body) = match parse_family(&text) {
        Ok(f) => {
            let t = rank_partition(&f);
            let levels: Vec<usize> = t.levels.iter().map(Vec::len).collect();
            (
                true,
                json!({"ok": true, "m": f.len(), "n": f.universe_size(), "max_rank": t.max_rank, "level_sizes": levels}),
            )
        }
        Err(e) => (false, json!({"ok": false, "error": parse_error_json(&e)})),
    };
    match ctx.format {
        Format::Json => print_out(&json_text(&body))?,
        Format::Csv => {
            let cell = |k: &str| body.get(k).map(|v| v.to_string()).unwrap_or_default();
            let levels = body["level_sizes"]
                .as_array()
                .map(|a| join(a, ";"))
                .unwrap_or_default();
            let err = body
                .get("error")
                .map(|e| e["message"].as_str().unwrap_or("").to_string());
            print_out(&csv_text(
                &["ok", "m", "n", "max_rank", "level_sizes", "error"],
                &[vec![
                    cell("ok"),
                    cell("m"),
                    cell("n"),
                    cell("max_rank"),
                    levels,
                    err.unwrap_or_default(),
                ]],
            )?)?;
        }
    }
    Ok(ok)
}

fn parse_error_json(e: &subfam::format::ParseError) -> Value {
    use subfam::format::ParseError::*;
    let mut v = match e {
        Syntax { line, .. } => json!({"kind": "syntax", "line": line}),
        ElementOutOfRange {
            line,
            position,
            element,
            universe,
        } => {
            json!({"kind": "element-out-of-range", "line": line, "position": position, "element": element, "n": universe})
        }
        Duplicate { first, second } => json!({"kind": "duplicate", "lines": [first, second]}),
    };
    v["message"] = json!(e.to_string());
    v
}

fn detect(ctx: &Ctx, args: DetectArgs) -> Result<bool> {
    let (family, bytes) = read_family(&args.input)?;
    let opts = EnumerateOptions {
        limit: args.limit,
        strict: args.strict,
    };
    let (witnesses, complete) = match enumerate_with(&family, args.d, opts) {
        Ok(w) => (w, true),
        Err(AlgebraError::LimitExceeded { partial, .. }) => (partial, false),
    };
    let items: Vec<Value> = witnesses
        .iter()
        .map(|w| {
            let witness: Value = serde_json::from_str(&w.to_json()).expect("witness json");
            json!({"witness": witness, "determining": determining_subfamily(w)})
        })
        .collect();
    let result = json!({"d": args.d, "strict": args.strict, "count": witnesses.len(), "complete": complete, "witnesses": items});
    let manifest = RunManifest::new("detect")
        .flag("input", args.input.display().to_string())
        .flag("d", args.d)
        .flag("limit", args.limit)
        .flag("strict", args.strict)
        .with_input(&bytes);
    let csv = || {
        let rows: Vec<Vec<String>> = witnesses
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let atoms: Vec<String> = w.atoms.iter().map(|a| join(&a.elements(), " ")).collect();
                vec![
                    i.to_string(),
                    join(&w.member_indices(), ";"),
                    atoms.join(";"),
                    join(&determining_subfamily(w).indices, ";"),
                ]
            })
            .collect();
        csv_text(&["witness", "members", "atoms", "determining"], &rows)
    };
    emit(ctx, manifest, &result, csv, args.output.as_deref())?;
    if !complete {
        eprintln!(
            "limit of {} witnesses reached; enumeration incomplete",
            args.limit.unwrap_or(0)
        );
    }
    Ok(complete)
}

fn grid(ctx: &Ctx, args: GridArgs) -> Result<()> {
    let (family, _) = read_family(&args.input)?;
    let g = to_grid(family.members(), args.k)?;
    if args.show {
        print_out(&render(&g))?;
        return Ok(());
    }
    let violation = grid_violation(&g, args.a);
    let pruned = row_sizes(&column_prune(&g, args.a));
    let body = json!({
        "k": args.k,
        "a": args.a,
        "points": g.points,
        "union_free": violation.is_none(),
        "violation": violation,
        "pruned_row_sizes": pruned,
        "es_grid_bound": es_grid_bound(args.k, args.a),
    });
    match ctx.format {
        Format::Json => print_out(&json_text(&body))?,
        Format::Csv => print_out(&csv_text(
            &[
                "k",
                "a",
                "points",
                "union_free",
                "pruned_row_sizes",
                "es_grid_bound",
            ],
            &[vec![
                args.k.to_string(),
                args.a.to_string(),
                g.points.len().to_string(),
                violation.is_none().to_string(),
                join(&pruned, ";"),
                es_grid_bound(args.k, args.a).to_string(),
            ]],
        )?)?,
    }
    Ok(())
}

fn extraction_csv(r: &ExtractionResult, m: usize) -> Result<String> {
    let (best, mean) = r
        .trials
        .as_ref()
        .map(|t| (t.best.to_string(), t.mean.to_string()))
        .unwrap_or_default();
    csv_text(
        &[
            "method",
            "property",
            "m",
            "size",
            "guarantee",
            "pessimistic",
            "seed",
            "best",
            "mean",
            "indices",
        ],
        &[vec![
            r.method.clone(),
            r.property.to_string(),
            m.to_string(),
            r.size().to_string(),
            r.guarantee.to_string(),
            r.pessimistic.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            best,
            mean,
            join(&r.indices, ";"),
        ]],
    )
}

fn extract(ctx: &Ctx, args: ExtractArgs) -> Result<()> {
    let (family, bytes) = read_family(&args.input)?;
    let mut manifest = RunManifest::new("extract")
        .flag("input", args.input.display().to_string())
        .flag("m", family.len())
        .flag(
            "method",
            args.method.to_possible_value().unwrap().get_name(),
        )
        .flag("property", args.property.to_string())
        .with_input(&bytes);
    let result = match (args.method, args.property) {
        (ExtractMethod::RandomDeletion, Property::BdFree { d }) => {
            let p = match args.p.as_str() {
                "auto" => default_probability(family.len(), d),
                v => v.parse::<f64>().with_context(|| format!("bad --p {v:?}"))?,
            };
            let seed = seed_or_fresh(args.seed);
            manifest = manifest.flag("p", p).flag("trials", args.trials);
            manifest.seed = Some(seed);
            random_deletion_bd_free(&family, d, p, seed, args.trials)?
        }
        (ExtractMethod::RandomDeletion, p) => {
            bail!("random-deletion needs a bd:D property, got {p}")
        }
        (ExtractMethod::Kleitman, Property::UnionFree { a }) => kleitman_extract(&family, a)?,
        (ExtractMethod::Kleitman, p) => bail!("kleitman needs a uf:A property, got {p}"),
        (ExtractMethod::Greedy, p) => {
            manifest = manifest.flag("order", args.order);
            greedy_extract(&family, p, args.order)?
        }
    };
    let m = family.len();
    emit(
        ctx,
        manifest,
        &result,
        || extraction_csv(&result, m),
        args.output.as_deref(),
    )
}

fn search_config(node_limit: Option<u64>, time_limit: Option<f64>) -> SearchConfig {
    SearchConfig {
        node_limit,
        time_limit: time_limit.map(Duration::from_secs_f64),
        initial: None,
    }
}

fn oracle_csv(r: &OracleResult, m: usize, property: Property) -> Result<String> {
    csv_text(
        &[
            "method", "property", "m", "size", "proven", "nodes", "indices",
        ],
        &[vec![
            "exact".into(),
            property.to_string(),
            m.to_string(),
            r.optimum.to_string(),
            r.proven.to_string(),
            r.nodes.to_string(),
            join(&r.witness, ";"),
        ]],
    )
}

fn exact(ctx: &Ctx, args: ExactArgs) -> Result<()> {
    let (family, bytes) = read_family(&args.input)?;
    let cfg = search_config(args.node_limit, args.time_limit);
    let r = max_subfamily(&family, args.property, &cfg)?;
    if !r.proven {
        eprintln!("search limit reached: {} is a lower bound only", r.optimum);
    }
    let manifest = RunManifest::new("exact")
        .flag("input", args.input.display().to_string())
        .flag("m", family.len())
        .flag("method", "exact")
        .flag("property", args.property.to_string())
        .flag("node_limit", args.node_limit)
        .flag("time_limit", args.time_limit)
        .with_input(&bytes);
    let m = family.len();
    emit(
        ctx,
        manifest,
        &r,
        || oracle_csv(&r, m, args.property),
        args.output.as_deref(),
    )
}

fn exact_min(ctx: &Ctx, args: ExactMinArgs) -> Result<()> {
    let cfg = search_config(args.node_limit, None);
    let r = min_over_families(args.m, args.n, args.property, &cfg, args.budget)?;
    let manifest = RunManifest::new("exact-min")
        .flag("m", args.m)
        .flag("n", args.n)
        .flag("property", args.property.to_string())
        .flag("budget", args.budget.to_string())
        .flag("node_limit", args.node_limit);
    let csv = || {
        csv_text(
            &["m", "n", "property", "value", "classes", "proven"],
            &[vec![
                args.m.to_string(),
                args.n.to_string(),
                args.property.to_string(),
                r.value.to_string(),
                r.classes.to_string(),
                r.proven.to_string(),
            ]],
        )
    };
    emit(ctx, manifest, &r, csv, args.output.as_deref())
}

fn turan(ctx: &Ctx, args: TuranArgs) -> Result<()> {
    let host = || -> Result<MultipartiteHypergraph> {
        Ok(if args.parts.is_empty() {
            build_kdk(args.k, args.d)?
        } else {
            MultipartiteHypergraph::complete(&args.parts)?
        })
    };
    let mut manifest = RunManifest::new("turan")
        .flag("k", args.k)
        .flag("d", args.d)
        .flag("parts", &args.parts);
    let bound = turan_bound(args.k, args.d);
    let base = (args.d == 2).then(|| base_case_bound(args.k));
    let result = if args.bijection {
        let seed = seed_or_fresh(args.seed);
        manifest = manifest
            .flag("mode", "bijection")
            .flag("samples", args.samples);
        manifest.seed = Some(seed);
        serde_json::to_value(family_hypergraph_bijection(
            args.k,
            args.d,
            args.samples,
            seed,
        )?)?
    } else if args.exact {
        let h = host()?;
        manifest = manifest
            .flag("mode", "exact")
            .flag("node_limit", args.node_limit);
        let r = ex_exact(&h, &search_config(args.node_limit, None));
        let links = link_diagnostics(&h.restrict(&r.witness));
        json!({
            "part_sizes": h.part_sizes,
            "edges": h.edges.len(),
            "copies": count_kd2(&h),
            "ex": r.optimum,
            "proven": r.proven,
            "nodes": r.nodes,
            "witness_edges": r.witness.iter().map(|&e| &h.edges[e]).collect::<Vec<_>>(),
            "turan_bound": bound,
            "base_case_bound": base,
            "below_bound": (r.optimum as f64) < bound,
            "links": links,
        })
    } else {
        manifest = manifest.flag("mode", "bound");
        json!({"k": args.k, "d": args.d, "turan_bound": bound, "base_case_bound": base})
    };
    let csv = || {
        let obj = result.as_object().unwrap();
        let keys: Vec<&str> = obj
            .iter()
            .filter(|(_, v)| !v.is_array() && !v.is_object())
            .map(|(k, _)| k.as_str())
            .collect();
        let row: Vec<String> = keys.iter().map(|k| obj[*k].to_string()).collect();
        csv_text(&keys, &[row])
    };
    emit(ctx, manifest, &result, csv, args.output.as_deref())
}

fn bounds(ctx: &Ctx, args: BoundsArgs) -> Result<()> {
    let mut context = BoundsContext::default();
    for pair in args
        .context
        .iter()
        .flat_map(|c| c.split(','))
        .filter(|p| !p.trim().is_empty())
    {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("bad context entry {pair:?}, expected key=value"))?;
        let value: usize = value
            .trim()
            .parse()
            .with_context(|| format!("bad value in {pair:?}"))?;
        let slot = match key.trim() {
            "m" => &mut context.m,
            "n" => &mut context.n,
            "d" => &mut context.d,
            "a" => &mut context.a,
            "b" => &mut context.b,
            "k" => &mut context.k,
            "q" => &mut context.q,
            other => bail!("unknown context key {other:?}"),
        };
        *slot = Some(value);
    }
    for (slot, flag) in [
        (&mut context.m, args.m),
        (&mut context.n, args.n),
        (&mut context.d, args.d),
        (&mut context.a, args.a),
        (&mut context.b, args.b),
        (&mut context.k, args.k),
        (&mut context.q, args.q),
    ] {
        if flag.is_some() {
            *slot = flag;
        }
    }
    let profile = bounds_profile(&context)?;
    let manifest = RunManifest::new("bounds").flag("context", &context);
    let csv = || {
        let rows: Vec<Vec<String>> = profile
            .bounds
            .iter()
            .map(|b| {
                vec![
                    b.name.clone(),
                    b.kind.clone(),
                    b.formula.clone(),
                    b.value.to_string(),
                    b.exact.clone().unwrap_or_default(),
                    b.asymptotic.to_string(),
                    b.external.to_string(),
                    b.caveat.clone().unwrap_or_default(),
                ]
            })
            .collect();
        csv_text(
            &[
                "name",
                "kind",
                "formula",
                "value",
                "exact",
                "asymptotic",
                "external",
                "caveat",
            ],
            &rows,
        )
    };
    emit(ctx, manifest, &profile, csv, args.output.as_deref())
}

fn load_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))
}

fn report(args: ReportArgs) -> Result<()> {
    let res = load_json(&args.result)?;
    let body = res.get("result").unwrap_or(&res);
    let flags = &res["manifest"]["flags"];
    let size = body["indices"]
        .as_array()
        .map(Vec::len)
        .or_else(|| body["optimum"].as_u64().map(|x| x as usize))
        .ok_or_else(|| {
            anyhow!(
                "{} holds neither an extraction nor an oracle result",
                args.result.display()
            )
        })?;
    let method = body["method"].as_str().unwrap_or("exact").to_string();
    let family = args
        .family
        .or_else(|| flags["input"].as_str().map(String::from))
        .unwrap_or_default();
    let m = flags["m"]
        .as_u64()
        .map(|x| x.to_string())
        .unwrap_or_default();

    let b = load_json(&args.bounds)?;
    let profile: BoundsProfile = serde_json::from_value(b.get("result").unwrap_or(&b).clone())
        .with_context(|| format!("{} is not a bounds profile", args.bounds.display()))?;
    let rows: Vec<Vec<String>> = profile
        .bounds
        .iter()
        .filter(|e| !e.name.starts_with("e_d"))
        .map(|e| {
            // nonnegative slack means the result is consistent with the bound
            let slack = match e.kind.as_str() {
                "lower" => size as f64 - e.value,
                _ => e.value - size as f64,
            };
            vec![
                family.clone(),
                m.clone(),
                method.clone(),
                size.to_string(),
                e.name.clone(),
                e.value.to_string(),
                slack.to_string(),
            ]
        })
        .collect();
    let text = csv_text(
        &[
            "family",
            "m",
            "method",
            "size",
            "bound",
            "bound_value",
            "slack",
        ],
        &rows,
    )?;
    write_out(args.output.as_deref(), &text)
}

fn bench_csv(report: &BenchReport) -> Result<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let bounds: Vec<String> = r.bounds.iter().map(|(k, v)| format!("{k}={v}")).collect();
            vec![
                r.family.clone(),
                r.m.to_string(),
                r.method.clone(),
                r.property.to_string(),
                opt(r.size.map(|x| x.to_string())),
                opt(r.guarantee.map(|x| x.to_string())),
                opt(r.proven.map(|x| x.to_string())),
                bounds.join(";"),
                opt(r.runtime_ms.map(|x| x.to_string())),
                opt(r.error.clone()),
            ]
        })
        .collect();
    csv_text(
        &[
            "family",
            "m",
            "method",
            "property",
            "size",
            "guarantee",
            "proven",
            "bounds",
            "runtime_ms",
            "error",
        ],
        &rows,
    )
}

fn bench(ctx: &Ctx, args: BenchArgs) -> Result<bool> {
    if let Some(path) = &args.rerun {
        let old =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let parsed: Output<Value> = serde_json::from_str(&old).context("not a bench output")?;
        let out = rerun(&parsed.manifest)?;
        let text = json_text(&out);
        if args.check && text != old {
            bail!(
                "rerun of {} differs from the recorded output",
                path.display()
            );
        }
        write_out(args.output.as_deref(), &text)?;
        return Ok(!out.result.failed());
    }
    let name = args.suite.as_deref().unwrap();
    let suite: Suite = if Path::new(name).is_file() {
        serde_json::from_str(&fs::read_to_string(name)?)
            .with_context(|| format!("{name} is not a suite file"))?
    } else {
        named_suite(name)?
    };
    let opts = BenchOptions {
        seed: seed_or_fresh(args.seed),
        trials: args.trials,
        node_limit: Some(args.node_limit),
        timing: ctx.timing,
    };
    let out = run_bench(&suite, &opts);
    let failed = out.result.failed();
    match ctx.format {
        Format::Json => write_out(args.output.as_deref(), &json_text(&out))?,
        Format::Csv => {
            if let Some(p) = &args.output {
                write_sidecar(p, &out.manifest)?;
            }
            write_out(args.output.as_deref(), &bench_csv(&out.result)?)?;
        }
    }
    for r in out.result.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "row {} / {} failed: {}",
            r.family,
            r.method,
            r.error.as_deref().unwrap()
        );
    }
    Ok(!failed)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let ctx = Ctx {
        format: cli.format.unwrap_or(Format::Json),
        explicit_json: cli.format == Some(Format::Json),
        timing: cli.timing,
        start: Instant::now(),
    };
    match cli.command {
        Command::Generate(a) => generate(&ctx, a).map(|_| true),
        Command::Validate { input } => validate(&ctx, &input),
        Command::Detect(a) => detect(&ctx, a),
        Command::Grid(a) => grid(&ctx, a).map(|_| true),
        Command::Extract(a) => extract(&ctx, a).map(|_| true),
        Command::Exact(a) => exact(&ctx, a).map(|_| true),
        Command::ExactMin(a) => exact_min(&ctx, a).map(|_| true),
        Command::Turan(a) => turan(&ctx, a).map(|_| true),
        Command::Bounds(a) => bounds(&ctx, a).map(|_| true),
        Command::Report(a) => report(a).map(|_| true),
        Command::Bench(a) => bench(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("{}", json!({"error": chain.join(": ")}));
            ExitCode::FAILURE
        }
    }
}
