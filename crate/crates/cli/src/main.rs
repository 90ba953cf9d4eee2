//! `hyperlace`: solve, verify, fuzz and benchmark Hamiltonian-path
//! construction in hypercubes with faulty edges.
//!
//! Exit codes: 0 ok, 1 usage or parse error, 2 inadmissible input,
//! 3 verification failure or oracle disagreement, 4 construction failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

mod harness;

use hyperlace::fault::format_instance;
use hyperlace::oracle::{exhaustive_ham_path, random_instance, InstanceSpec, OracleOutcome, SearchBudget};
use hyperlace::solver::{ham_path_laceable_with, SolveOptions};
use hyperlace::{check_conditions, parse_instance, verify_hamiltonian_path, Path, SolveError, SolveRequest, Vertex};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INADMISSIBLE: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;
pub const EXIT_CONSTRUCTION: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "hyperlace", version, about = "Hamiltonian paths in hypercubes with faulty edges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Base seed for generated instances.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Trials per dimension (fuzz, bench, sampled oracle runs).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Print the recursion trace.
    #[arg(long, global = true)]
    pub trace: bool,
    /// One tab-separated `key=value` record per result.
    #[arg(long, global = true)]
    pub machine: bool,
    /// Search inadmissible instances anyway, without any guarantee.
    #[arg(long, global = true)]
    pub force: bool,
    /// Search-node budget for a single solve.
    #[arg(long, global = true)]
    pub budget_nodes: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a Hamiltonian path of Q_n - F between two vertices.
    Solve {
        instance: PathBuf,
        /// Start vertex; defaults to the `# endpoints` line of the instance.
        x: Option<String>,
        /// End vertex.
        y: Option<String>,
    },
    /// Check a path file against an instance.
    Verify {
        instance: PathBuf,
        path: PathBuf,
        /// Expected start; defaults to the first vertex of the path.
        x: Option<String>,
        /// Expected end; defaults to the last vertex of the path.
        y: Option<String>,
    },
    /// Solve and verify random instances over a range of dimensions.
    Fuzz {
        /// Dimension or range `lo..hi` (inclusive).
        #[arg(long, default_value = "7..9")]
        n: String,
        /// Draw fault sets without the admissibility filter.
        #[arg(long)]
        inadmissible: bool,
    },
    /// Compare the engine against the exhaustive oracle.
    Oracle {
        #[arg(long, default_value_t = 4)]
        n: u32,
        /// Enumerate every fault set up to this size.
        #[arg(long)]
        max_faults: Option<usize>,
        /// Sample fault sets of exactly this size instead of enumerating.
        #[arg(long)]
        sample_faults: Option<usize>,
    },
    /// Time the engine on fixed seeds at the maximal fault count.
    Bench {
        #[arg(long, default_value = "5..12")]
        n: String,
    },
    /// Print a random instance in the instance text format.
    Gen {
        #[arg(long)]
        n: u32,
        /// Number of faulty edges; defaults to 4n-17.
        #[arg(long)]
        faults: Option<usize>,
        #[arg(long)]
        inadmissible: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let common = cli.common;
    match cli.command {
        Command::Solve { instance, x, y } => solve(&common, &instance, x, y),
        Command::Verify { instance, path, x, y } => verify(&instance, &path, x, y),
        Command::Fuzz { n, inadmissible } => {
            let range = parse_range(&n)?;
            Ok(harness::fuzz(&common, range, inadmissible))
        }
        Command::Oracle { n, max_faults, sample_faults } => harness::oracle(&common, n, max_faults, sample_faults),
        Command::Bench { n } => {
            let range = parse_range(&n)?;
            Ok(harness::bench(&common, range))
        }
        Command::Gen { n, faults, inadmissible } => gen(&common, n, faults, inadmissible),
    }
}

/// `7`, `7..9` or `7..=9`, both ends inclusive.
pub fn parse_range(s: &str) -> Result<(u32, u32)> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let lo: u32 = lo.parse().with_context(|| format!("bad dimension {lo:?}"))?;
    let hi: u32 = hi.parse().with_context(|| format!("bad dimension {hi:?}"))?;
    if lo == 0 || lo > hi {
        bail!("empty dimension range {s:?}");
    }
    Ok((lo, hi))
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn vertex(s: &str, n: u32) -> Result<Vertex> {
    let v: Vertex = s.parse().with_context(|| format!("bad vertex {s:?}"))?;
    if v.cube_dim() != n {
        bail!("vertex {s} has {} coordinates, expected {n}", v.cube_dim());
    }
    Ok(v)
}

/// Endpoints from a `# endpoints <x> <y>` comment line.
fn embedded_endpoints(text: &str) -> Option<(String, String)> {
    text.lines().find_map(|l| {
        let rest = l.trim().strip_prefix('#')?.trim().strip_prefix("endpoints")?;
        let mut it = rest.split_whitespace();
        Some((it.next()?.to_string(), it.next()?.to_string()))
    })
}

fn solve(common: &Common, instance: &PathBuf, x: Option<String>, y: Option<String>) -> Result<u8> {
    let text = read(instance)?;
    let faults = parse_instance(&text).with_context(|| format!("in {}", instance.display()))?;
    let n = faults.cube_dim();
    let (xs, ys) = match (x, y) {
        (Some(x), Some(y)) => (x, y),
        (None, None) => embedded_endpoints(&text).context("no endpoints given and no `# endpoints` line")?,
        _ => bail!("give both endpoints or neither"),
    };
    let (x, y) = (vertex(&xs, n)?, vertex(&ys, n)?);
    let mut opts = SolveOptions::default();
    if let Some(b) = common.budget_nodes {
        opts.node_budget = b;
    }
    let req = SolveRequest::new(faults.clone(), x, y);
    match ham_path_laceable_with(&req, &opts) {
        Ok((path, trace)) => {
            let report = verify_hamiltonian_path(&faults, x, y, &path);
            if !report.passed() {
                eprintln!("constructed path failed verification:\n{report}");
                return Ok(EXIT_VERIFY);
            }
            if common.machine {
                println!("{}", path_record("ok", n, faults.len(), x, y, &path, trace.fallbacks()));
            } else {
                print!("{path}");
            }
            if common.trace {
                eprint!("{trace}");
            }
            Ok(EXIT_OK)
        }
        Err(SolveError::Inadmissible(report)) => {
            if common.force {
                return forced(common, &faults, x, y);
            }
            if common.machine {
                println!("solve\tstatus=inadmissible\t{}", report_fields(&report));
            } else {
                eprintln!("inadmissible instance: {report}");
                for v in report.violations() {
                    eprintln!("  {v}");
                }
            }
            Ok(EXIT_INADMISSIBLE)
        }
        Err(SolveError::ConstructionFailed { reason, trace }) => {
            eprintln!("construction failed: {reason}\n{trace}");
            Ok(EXIT_CONSTRUCTION)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(e.exit_status())
        }
    }
}

fn forced(common: &Common, faults: &hyperlace::FaultSet, x: Vertex, y: Vertex) -> Result<u8> {
    let n = faults.cube_dim();
    let budget = SearchBudget::nodes(common.budget_nodes.unwrap_or(100_000_000));
    let out = exhaustive_ham_path(faults, x, y, budget).map_err(|e| anyhow::anyhow!("{e}"))?;
    match out {
        OracleOutcome::Found(path) => {
            if !verify_hamiltonian_path(faults, x, y, &path).passed() {
                return Ok(EXIT_VERIFY);
            }
            if common.machine {
                println!("{}\tguarantee=none", path_record("ok", n, faults.len(), x, y, &path, 0));
            } else {
                println!("# no guarantee: heuristic search on an inadmissible instance");
                print!("{path}");
            }
            Ok(EXIT_OK)
        }
        OracleOutcome::ProvenAbsent => {
            eprintln!("no guarantee: search proved that no such path exists");
            Ok(EXIT_INADMISSIBLE)
        }
        OracleOutcome::BudgetExhausted => {
            eprintln!("no guarantee: search budget exhausted");
            Ok(EXIT_CONSTRUCTION)
        }
    }
}

fn path_record(status: &str, n: u32, faults: usize, x: Vertex, y: Vertex, path: &Path, fallbacks: usize) -> String {
    let verts: Vec<String> = path.vertices().iter().map(|v| v.to_string()).collect();
    format!(
        "solve\tstatus={status}\tn={n}\tfaults={faults}\tx={x}\ty={y}\tlength={}\tfallbacks={fallbacks}\tpath={}",
        path.len(),
        verts.join(",")
    )
}

fn report_fields(r: &hyperlace::ConditionReport) -> String {
    format!(
        "n={}\tfaults={}\tbound={}\tmin_degree={}\tdegree2={}\treason={}",
        r.n,
        r.fault_count,
        r.fault_bound(),
        r.min_degree,
        r.degree2_count,
        r.violations().join("; ")
    )
}

fn verify(instance: &PathBuf, path_file: &PathBuf, x: Option<String>, y: Option<String>) -> Result<u8> {
    let faults = parse_instance(&read(instance)?).with_context(|| format!("in {}", instance.display()))?;
    let path = Path::parse(&read(path_file)?).with_context(|| format!("in {}", path_file.display()))?;
    let n = faults.cube_dim();
    let x = match x {
        Some(s) => vertex(&s, n)?,
        None => path.start().context("empty path")?,
    };
    let y = match y {
        Some(s) => vertex(&s, n)?,
        None => path.end().context("empty path")?,
    };
    let report = verify_hamiltonian_path(&faults, x, y, &path);
    println!("{report}");
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
}

fn gen(common: &Common, n: u32, faults: Option<usize>, inadmissible: bool) -> Result<u8> {
    let fault_count = faults.unwrap_or_else(|| (4 * i64::from(n) - 17).max(0) as usize);
    let spec = InstanceSpec { n, fault_count, admissible: !inadmissible, seed: common.seed };
    let inst = random_instance(&spec).map_err(|e| anyhow::anyhow!("{e}"))?;
    print!("{}", format_instance(&inst.faults));
    println!("# endpoints {} {}", inst.x, inst.y);
    println!("# seed {} admissible {}", common.seed, check_conditions(&inst.faults).admissible);
    Ok(EXIT_OK)
}
