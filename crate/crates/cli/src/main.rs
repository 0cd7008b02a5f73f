//! `srgswitch`: build seeds, explore switching classes, analyse stores.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use srgswitch::analyze::{self, AnalyzeError, PgOrders, PgVerdict};
use srgswitch::explorer::{self, ExplorationConfig, ExplorationState, ExploreError, ResumeOptions, RunStatus};
use srgswitch::seeds::NamedSeed;
use srgswitch::switching::{SwitchError, SwitchKind};
use srgswitch::{aut_group_order, emit_graph6_string, parse_graph6, verify_srg, Graph};

const EXIT_OTHER: u8 = 1;
const EXIT_REFUSED: u8 = 2;
const EXIT_TRUNCATED: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "srgswitch", version, about = "Explore switching classes of strongly regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a seed graph as graph6; parameters and group order go to stderr.
    Seed(SeedArgs),
    /// Explore the switching class of a seed.
    Explore(ExploreArgs),
    /// Continue an exploration from its checkpoint directory.
    Resume(ResumeArgs),
    /// Report on a store of graph6 graphs as CSV.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SeedSource {
    /// Seed constructor and parameters, e.g. `sp 3 2` or `appendix sts19-srg57`.
    #[arg(long = "seed", num_args = 1.., value_name = "NAME ARGS")]
    tokens: Option<Vec<String>>,
    /// A file whose first line is the seed in graph6.
    #[arg(long = "from-file", value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct SeedArgs {
    /// Seed constructor and parameters.
    #[arg(num_args = 0.., conflicts_with = "from_file")]
    tokens: Vec<String>,
    #[arg(long, value_name = "PATH")]
    from_file: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    #[command(flatten)]
    seed: SeedSource,
    #[arg(long)]
    switch: SwitchKind,
    /// Number of switching steps.
    #[arg(long, conflicts_with = "closure", required_unless_present = "closure")]
    depth: Option<usize>,
    /// Explore until no new graphs appear.
    #[arg(long)]
    closure: bool,
    /// Stop, without storing the level, before the total would exceed this.
    #[arg(long, default_value_t = explorer::DEFAULT_MAX_TOTAL)]
    max_graphs: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, env = "SRGSWITCH_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct ResumeArgs {
    #[arg(long, env = "SRGSWITCH_OUT")]
    out: PathBuf,
    /// New depth bound; defaults to the stored one.
    #[arg(long, conflicts_with = "closure")]
    depth: Option<usize>,
    #[arg(long)]
    closure: bool,
    #[arg(long)]
    max_graphs: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// A checkpoint directory or a graph6 file.
    #[arg(long)]
    store: PathBuf,
    /// One of: aut | cliques S | cocliques S | packing S | pg S T ALPHA | ramsey A B
    #[arg(long, num_args = 1..=4, value_name = "REPORT")]
    report: Vec<String>,
    /// Run `packing` and `pg` on complements.
    #[arg(long)]
    complement: bool,
    #[arg(long, default_value_t = analyze::DEFAULT_PACKING_CAP)]
    cap: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Debug)]
enum Report {
    Aut,
    Cliques(usize, bool),
    Packing(usize),
    Pg(PgOrders),
    Ramsey(usize, usize),
}

impl Report {
    fn parse(words: &[String]) -> anyhow::Result<Report> {
        let nums = |expect: usize| -> anyhow::Result<Vec<usize>> {
            let rest = &words[1..];
            if rest.len() != expect {
                bail!("report {} takes {expect} numbers", words[0]);
            }
            rest.iter().map(|w| w.parse().with_context(|| format!("bad number {w:?}"))).collect()
        };
        let r = match words.first().map(String::as_str) {
            Some("aut") => {
                nums(0)?;
                Report::Aut
            }
            Some("cliques") => Report::Cliques(nums(1)?[0], false),
            Some("cocliques") => Report::Cliques(nums(1)?[0], true),
            Some("packing") => Report::Packing(nums(1)?[0]),
            Some("pg") => {
                let v = nums(3)?;
                Report::Pg(PgOrders { s: v[0], t: v[1], alpha: v[2] })
            }
            Some("ramsey") => {
                let v = nums(2)?;
                Report::Ramsey(v[0], v[1])
            }
            _ => bail!("unknown report {:?}; expected aut, cliques, cocliques, packing, pg or ramsey", words.join(" ")),
        };
        if let Report::Cliques(s, _) | Report::Packing(s) = r {
            if s < 2 {
                bail!("clique size must be at least 2");
            }
        }
        Ok(r)
    }
}

/// Errors tagged with the exit code they map to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let err = e.into();
        Failure { code: exit_code(&err), err }
    }
}

fn refused(err: anyhow::Error) -> Failure {
    Failure { code: EXIT_REFUSED, err }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
        if let Some(e) = cause.downcast_ref::<ExploreError>() {
            return match e {
                ExploreError::Io { .. } => EXIT_IO,
                ExploreError::Integrity { .. } | ExploreError::Metadata { .. } | ExploreError::Internal(_) => EXIT_OTHER,
                _ => EXIT_REFUSED,
            };
        }
        if let Some(e) = cause.downcast_ref::<AnalyzeError>() {
            return match e {
                AnalyzeError::Io { .. } => EXIT_IO,
                AnalyzeError::Store { .. } => EXIT_OTHER,
                _ => EXIT_REFUSED,
            };
        }
        if cause.is::<SwitchError>() || cause.is::<srgswitch::NotSrg>() {
            return EXIT_REFUSED;
        }
    }
    EXIT_OTHER
}

#[derive(Serialize)]
struct Manifest {
    command: Vec<String>,
    config_hash: String,
    seed: String,
    params: String,
    switch: String,
    version: &'static str,
    started: String,
    wall_clock_secs: f64,
    status: RunStatus,
    new: Vec<u64>,
    totals: Vec<u64>,
    switched_graphs: u64,
    partitions: u64,
}

fn write_manifest(state: &ExplorationState, seed: &str, started: chrono::DateTime<chrono::Utc>, clock: Instant) -> anyhow::Result<()> {
    let m = &state.metadata;
    let manifest = Manifest {
        command: std::env::args().collect(),
        config_hash: m.config_hash.clone(),
        seed: seed.to_string(),
        params: m.params.to_string(),
        switch: m.switch.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        started: started.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        wall_clock_secs: clock.elapsed().as_secs_f64(),
        status: m.status,
        new: state.news(),
        totals: state.totals(),
        switched_graphs: m.switched_graphs,
        partitions: m.partitions,
    };
    let path = state.dir.join("manifest.json");
    let tmp = state.dir.join("manifest.json.tmp");
    fs::write(&tmp, serde_json::to_string_pretty(&manifest)? + "\n").with_context(|| tmp.display().to_string())?;
    fs::rename(&tmp, &path).with_context(|| path.display().to_string())?;
    Ok(())
}

/// A graph plus a reproducible description of where it came from.
fn load_seed(tokens: Option<&[String]>, file: Option<&Path>) -> Result<(Graph, String), Failure> {
    if let Some(path) = file {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let line = bytes.split(|&b| b == b'\n').find(|l| !l.is_empty()).ok_or_else(|| anyhow!("{}: empty file", path.display()))?;
        let line = line.strip_prefix(b">>graph6<<").unwrap_or(line);
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        let g = parse_graph6(line).with_context(|| format!("{}: line 1", path.display())).map_err(refused)?;
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        return Ok((g, format!("file {} sha256 {digest}", path.display())));
    }
    let tokens = tokens.unwrap_or_default();
    if tokens.is_empty() {
        return Err(refused(anyhow!("no seed given")));
    }
    let named = NamedSeed::parse(tokens).map_err(|e| refused(e.into()))?;
    let g = named.build().map_err(|e| refused(e.into()))?;
    Ok((g, named.to_string()))
}

/// New/Total with the depth running across columns.
fn level_table(news: &[u64], totals: &[u64]) -> String {
    let cells = |label: &str, xs: &mut dyn Iterator<Item = String>| {
        let mut row = format!("{label:<6}");
        for x in xs {
            let _ = write!(row, " {x:>10}");
        }
        row
    };
    let head = cells("i", &mut (0..news.len()).map(|i| i.to_string()));
    let new = cells("New", &mut news.iter().map(u64::to_string));
    let total = cells("Total", &mut totals.iter().map(u64::to_string));
    format!("{head}\n{new}\n{total}\n")
}

fn stats_csv(news: &[u64], totals: &[u64]) -> String {
    let mut s = String::from("depth,new,total\n");
    for (i, (n, t)) in news.iter().zip(totals).enumerate() {
        let _ = writeln!(s, "{i},{n},{t}");
    }
    s
}

fn report_run(state: &ExplorationState) -> Result<(), Failure> {
    print!("{}", level_table(&state.news(), &state.totals()));
    println!();
    print!("{}", stats_csv(&state.news(), &state.totals()));
    eprintln!("status: {}; {} graphs in {}", state.status(), state.total(), state.dir.display());
    if state.status() == RunStatus::Truncated {
        return Err(Failure { code: EXIT_TRUNCATED, err: anyhow!("graph limit reached; the last level was not stored") });
    }
    Ok(())
}

fn cmd_seed(args: SeedArgs) -> Result<(), Failure> {
    let tokens = (!args.tokens.is_empty()).then_some(args.tokens.as_slice());
    let (g, ident) = load_seed(tokens, args.from_file.as_deref())?;
    let params = verify_srg(&g).map_err(|e| refused(e.into()))?;
    let aut = aut_group_order(&g);
    println!("{}", emit_graph6_string(&g));
    eprintln!("{ident}: SRG{params}, aut {}", aut.order);
    Ok(())
}

fn cmd_explore(args: ExploreArgs) -> Result<(), Failure> {
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let (g, ident) = load_seed(args.seed.tokens.as_deref(), args.seed.file.as_deref())?;
    let mut cfg = ExplorationConfig::new(args.switch, &args.out).max_total(args.max_graphs).workers(args.workers);
    cfg.max_depth = if args.closure { None } else { args.depth };
    let state = explorer::explore(&g, &cfg)?;
    write_manifest(&state, &ident, started, clock)?;
    report_run(&state)
}

fn cmd_resume(args: ResumeArgs) -> Result<(), Failure> {
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let previous: Option<String> = fs::read_to_string(args.out.join("manifest.json"))
        .ok()
        .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).ok())
        .and_then(|v| v.get("seed").and_then(|s| s.as_str()).map(String::from));
    let opts = ResumeOptions {
        switch: None,
        max_depth: if args.closure { Some(None) } else { args.depth.map(Some) },
        max_total: args.max_graphs,
        workers: Some(args.workers),
    };
    let state = explorer::resume(&args.out, &opts)?;
    let ident = previous.unwrap_or_else(|| format!("key {}", state.metadata.seed_key));
    write_manifest(&state, &ident, started, clock)?;
    report_run(&state)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let report = Report::parse(&args.report).map_err(refused)?;
    if args.workers < 1 {
        return Err(refused(anyhow!("worker count must be at least 1")));
    }
    rayon::ThreadPoolBuilder::new().num_threads(args.workers).build_global().map_err(|e| anyhow!(e))?;
    if !args.store.exists() {
        return Err(Failure { code: EXIT_IO, err: anyhow!("{}: no such store", args.store.display()) });
    }
    let graphs = analyze::read_store(&args.store)?;
    let out = match report {
        Report::Aut => analyze::histogram_csv(&analyze::aut_histogram(&graphs)),
        Report::Cliques(s, co) => analyze::histogram_csv(&analyze::clique_census(&graphs, s, co)),
        Report::Packing(s) => {
            let mut out = String::from("graph,cliques,packing,capped\n");
            for (i, g) in graphs.iter().enumerate() {
                let p = analyze::clique_packing(g, s, args.complement, args.cap);
                let _ = writeln!(out, "{i},{},{},{}", p.cliques, p.size, p.capped);
            }
            out
        }
        Report::Pg(orders) => {
            let mut out = String::from("graph,verdict,lines\n");
            let mut found = 0;
            for (i, g) in graphs.iter().enumerate() {
                let row = match analyze::detect_partial_geometry(g, orders, args.complement, args.cap) {
                    Ok(PgVerdict::Found(lines)) => {
                        found += 1;
                        let text: Vec<String> =
                            lines.iter().map(|l| l.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")).collect();
                        format!("found,{}", text.join(";"))
                    }
                    Ok(PgVerdict::NotFound) => "none,".to_string(),
                    Ok(PgVerdict::Capped { cliques }) => format!("capped at {cliques} cliques,"),
                    Err(AnalyzeError::NotApplicable(why)) => format!("not applicable: {},", why.replace(',', ";")),
                    Err(e) => return Err(e.into()),
                };
                let _ = writeln!(out, "{i},{row}");
            }
            eprintln!("{found} of {} graphs carry a pg({},{},{})", graphs.len(), orders.s, orders.t, orders.alpha);
            out
        }
        Report::Ramsey(a, b) => {
            let mut out = format!("graph,k{a}_minus_e,complement_k{b}_minus_e,witness\n");
            let mut witnesses = 0;
            for (i, g) in graphs.iter().enumerate() {
                let v = analyze::ramsey_witness_check(g, a, b).map_err(|e| refused(e.into()))?;
                witnesses += v.is_witness() as usize;
                let _ = writeln!(out, "{i},{},{},{}", v.graph_hit.is_some(), v.complement_hit.is_some(), v.is_witness());
            }
            eprintln!("{witnesses} of {} graphs are witnesses", graphs.len());
            out
        }
    };
    print!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Seed(a) => cmd_seed(a),
        Command::Explore(a) => cmd_explore(a),
        Command::Resume(a) => cmd_resume(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        s.split(' ').map(String::from).collect()
    }

    #[test]
    fn report_specs() {
        assert!(matches!(Report::parse(&words("aut")), Ok(Report::Aut)));
        assert!(matches!(Report::parse(&words("cocliques 7")), Ok(Report::Cliques(7, true))));
        assert!(matches!(Report::parse(&words("pg 5 5 2")), Ok(Report::Pg(PgOrders { s: 5, t: 5, alpha: 2 }))));
        assert!(matches!(Report::parse(&words("ramsey 5 7")), Ok(Report::Ramsey(5, 7))));
        for bad in ["aut 3", "cliques", "cliques 1", "pg 5 5", "ramsey x 7", "census 3"] {
            assert!(Report::parse(&words(bad)).is_err(), "{bad}");
        }
    }

    #[test]
    fn table_runs_across() {
        let t = level_table(&[1, 2, 52], &[1, 3, 55]);
        let rows: Vec<Vec<&str>> = t.lines().map(|l| l.split_whitespace().collect()).collect();
        assert_eq!(rows, [vec!["i", "0", "1", "2"], vec!["New", "1", "2", "52"], vec!["Total", "1", "3", "55"]]);
        assert_eq!(stats_csv(&[1], &[1]), "depth,new,total\n0,1,1\n");
    }
}
