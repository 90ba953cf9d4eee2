//! Batch runs: fuzzing, oracle comparison and timing.

use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use rayon::prelude::*;

use hyperlace::fault::{check_conditions, degree_conditions_hold};
use hyperlace::oracle::{
    exhaustive_ham_path, fault_sets_up_to, random_instance, InstanceSpec, OracleOutcome, SearchBudget,
    EXHAUSTIVE_MAX_DIM,
};
use hyperlace::solver::{base_solve, ham_path_laceable_with, SolveOptions};
use hyperlace::{verify_hamiltonian_path, FaultSet, SolveError, SolveRequest, Vertex};

use crate::{Common, EXIT_CONSTRUCTION, EXIT_OK, EXIT_USAGE, EXIT_VERIFY};

/// Seed of trial `t` at dimension `n`; `gen --seed` with this value and the
/// reported fault count reproduces the instance.
pub fn trial_seed(base: u64, n: u32, t: usize) -> u64 {
    base.wrapping_add(u64::from(n) << 32).wrapping_add(t as u64)
}

fn max_faults(n: u32) -> usize {
    (4 * i64::from(n) - 17).max(0) as usize
}

/// Even trials use the maximal count, odd ones a count in `1..=max`.
fn fuzz_fault_count(n: u32, seed: u64, t: usize, inadmissible: bool) -> usize {
    let bound = max_faults(n);
    if inadmissible {
        return 1 + (seed % (bound as u64 + u64::from(n))) as usize;
    }
    match bound {
        0 => 0,
        b if t % 2 == 0 => b,
        b => 1 + (seed % b as u64) as usize,
    }
}

enum Trial {
    Verified(Duration),
    Inadmissible,
    Failed(String),
}

fn options(common: &Common) -> SolveOptions {
    let mut opts = SolveOptions::default();
    if let Some(b) = common.budget_nodes {
        opts.node_budget = b;
    }
    opts
}

fn run_trial(opts: &SolveOptions, faults: FaultSet, x: Vertex, y: Vertex) -> Trial {
    let start = Instant::now();
    let req = SolveRequest::new(faults, x, y);
    match ham_path_laceable_with(&req, opts) {
        Ok((path, _)) => {
            let elapsed = start.elapsed();
            let report = verify_hamiltonian_path(&req.faults, x, y, &path);
            if report.passed() {
                Trial::Verified(elapsed)
            } else {
                Trial::Failed(format!("verification: {}", report.to_string().replace('\n', "; ")))
            }
        }
        Err(SolveError::Inadmissible(_)) => Trial::Inadmissible,
        Err(e) => Trial::Failed(e.to_string()),
    }
}

fn percentile(sorted: &[Duration], q: f64) -> Duration {
    if sorted.is_empty() {
        return Duration::ZERO;
    }
    let idx = ((sorted.len() as f64 - 1.0) * q).round() as usize;
    sorted[idx]
}

fn micros(d: Duration) -> u128 {
    d.as_micros()
}

pub fn fuzz(common: &Common, (lo, hi): (u32, u32), inadmissible: bool) -> u8 {
    let trials = common.trials.unwrap_or(200);
    let opts = options(common);
    let mut failed_total = 0;
    if !common.machine {
        println!("{:>3} {:>7} {:>9} {:>12} {:>7} {:>9} {:>9} {:>9}", "n", "trials", "verified", "inadmissible", "failed", "p50_us", "p99_us", "max_us");
    }
    for n in lo..=hi {
        let results: Vec<(u64, usize, Trial)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(common.seed, n, t);
                let k = fuzz_fault_count(n, seed, t, inadmissible);
                let spec = InstanceSpec { n, fault_count: k, admissible: !inadmissible, seed };
                let trial = match random_instance(&spec) {
                    Ok(inst) => run_trial(&opts, inst.faults, inst.x, inst.y),
                    Err(e) => Trial::Failed(format!("generation: {e}")),
                };
                (seed, k, trial)
            })
            .collect();
        let mut times = Vec::new();
        let (mut inadm, mut failed) = (0, 0);
        for (seed, k, r) in &results {
            match r {
                Trial::Verified(d) => times.push(*d),
                Trial::Inadmissible => inadm += 1,
                Trial::Failed(reason) => {
                    failed += 1;
                    if common.machine {
                        println!("fuzz-failure\tn={n}\tseed={seed}\tfaults={k}\treason={reason}");
                    } else {
                        eprintln!("FAIL n={n} seed={seed} faults={k}: {reason}");
                    }
                }
            }
        }
        failed_total += failed;
        times.sort();
        let (p50, p99, max) = (percentile(&times, 0.5), percentile(&times, 0.99), times.last().copied().unwrap_or_default());
        if common.machine {
            println!(
                "fuzz\tn={n}\ttrials={trials}\tverified={}\tinadmissible={inadm}\tfailed={failed}\tp50_us={}\tp99_us={}\tmax_us={}",
                times.len(),
                micros(p50),
                micros(p99),
                micros(max)
            );
        } else {
            println!(
                "{n:>3} {trials:>7} {:>9} {inadm:>12} {failed:>7} {:>9} {:>9} {:>9}",
                times.len(),
                micros(p50),
                micros(p99),
                micros(max)
            );
        }
    }
    if failed_total > 0 {
        EXIT_CONSTRUCTION
    } else {
        EXIT_OK
    }
}

/// Admissibility used by the oracle comparison. Below `n = 5` the main
/// bound is negative and the base bound `3n - 11` applies instead.
pub fn comparison_admissible(f: &FaultSet) -> bool {
    let n = f.cube_dim();
    if f.is_empty() {
        return true;
    }
    if n >= 5 {
        check_conditions(f).admissible
    } else {
        degree_conditions_hold(f) && f.len() as i64 <= 3 * i64::from(n) - 11
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Comparison {
    Agree,
    EngineFailed(String),
    OracleAbsent,
}

fn compare(faults: &FaultSet, x: Vertex, y: Vertex) -> Comparison {
    let engine = if faults.cube_dim() >= 5 {
        ham_path_laceable_with(&SolveRequest::new(faults.clone(), x, y), &SolveOptions::default()).map(|(p, _)| p)
    } else {
        base_solve(faults, x, y)
    };
    let oracle = exhaustive_ham_path(faults, x, y, SearchBudget::exhaustive());
    match (engine, oracle) {
        (_, Ok(OracleOutcome::ProvenAbsent)) => Comparison::OracleAbsent,
        (Ok(p), _) if verify_hamiltonian_path(faults, x, y, &p).passed() => Comparison::Agree,
        (Ok(_), _) => Comparison::EngineFailed("engine path failed verification".into()),
        (Err(e), _) => Comparison::EngineFailed(e.to_string()),
    }
}

fn opposite_pairs(n: u32) -> Vec<(Vertex, Vertex)> {
    let all: Vec<Vertex> = (0..1u64 << n).map(|l| Vertex::new(n, l).expect("label in range")).collect();
    let mut out = Vec::new();
    for &x in all.iter().filter(|v| v.parity() == 0) {
        for &y in all.iter().filter(|v| v.parity() == 1) {
            out.push((x, y));
        }
    }
    out
}

pub fn oracle(common: &Common, n: u32, max: Option<usize>, sample: Option<usize>) -> Result<u8> {
    if n == 0 || n > EXHAUSTIVE_MAX_DIM {
        bail!("oracle comparison needs 1 <= n <= {EXHAUSTIVE_MAX_DIM}");
    }
    let cases: Vec<(String, FaultSet, Vertex, Vertex)> = match sample {
        Some(k) => {
            if n < 5 {
                bail!("sampling needs n >= 5");
            }
            let trials = common.trials.unwrap_or(10_000);
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(common.seed, n, t);
                    let spec = InstanceSpec { n, fault_count: k, admissible: true, seed };
                    random_instance(&spec).map(|i| (format!("seed={seed}"), i.faults, i.x, i.y))
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| anyhow::anyhow!("{e}"))?
        }
        None => {
            let default = if n >= 5 { max_faults(n).min(2) } else { (3 * n as i64 - 11).max(0) as usize };
            let k = max.unwrap_or(default);
            let sets: Vec<FaultSet> = fault_sets_up_to(n, k).filter(comparison_admissible).collect();
            let pairs = opposite_pairs(n);
            let mut out = Vec::with_capacity(sets.len() * pairs.len());
            for (i, f) in sets.iter().enumerate() {
                for &(x, y) in &pairs {
                    out.push((format!("set={i}"), f.clone(), x, y));
                }
            }
            out
        }
    };
    let results: Vec<Comparison> = cases.par_iter().map(|(_, f, x, y)| compare(f, *x, *y)).collect();
    let mut disagreements = 0;
    let mut absent = 0;
    for ((tag, f, x, y), r) in cases.iter().zip(&results) {
        let what = match r {
            Comparison::Agree => continue,
            Comparison::OracleAbsent => {
                absent += 1;
                "oracle proved absence on an admissible instance".to_string()
            }
            Comparison::EngineFailed(e) => {
                disagreements += 1;
                format!("engine failed where the oracle found a path: {e}")
            }
        };
        let edges: Vec<String> = f.iter().map(|e| e.to_string()).collect();
        eprintln!("DISAGREE {tag} x={x} y={y} F=[{}]: {what}", edges.join(", "));
    }
    if common.machine {
        println!("oracle\tn={n}\tinstances={}\tdisagreements={disagreements}\tproven_absent={absent}", cases.len());
    } else {
        println!("n={n} instances={} disagreements={disagreements} proven-absent={absent}", cases.len());
    }
    Ok(if disagreements + absent == 0 { EXIT_OK } else { EXIT_VERIFY })
}

pub fn bench(common: &Common, (lo, hi): (u32, u32)) -> u8 {
    let trials = common.trials.unwrap_or(20);
    let opts = options(common);
    let mut code = EXIT_OK;
    if !common.machine {
        println!("{:>3} {:>7} {:>7} {:>10} {:>10} {:>10}", "n", "faults", "trials", "median_us", "p99_us", "max_us");
    }
    for n in lo..=hi {
        let k = max_faults(n);
        let mut times = Vec::with_capacity(trials);
        for t in 0..trials {
            let seed = trial_seed(common.seed, n, t);
            let spec = InstanceSpec { n, fault_count: k, admissible: true, seed };
            let inst = match random_instance(&spec) {
                Ok(i) => i,
                Err(e) => {
                    eprintln!("n={n} seed={seed}: {e}");
                    return EXIT_USAGE;
                }
            };
            match run_trial(&opts, inst.faults, inst.x, inst.y) {
                Trial::Verified(d) => times.push(d),
                Trial::Inadmissible => {}
                Trial::Failed(reason) => {
                    eprintln!("FAIL n={n} seed={seed} faults={k}: {reason}");
                    code = EXIT_CONSTRUCTION;
                }
            }
        }
        times.sort();
        let (med, p99, max) = (percentile(&times, 0.5), percentile(&times, 0.99), times.last().copied().unwrap_or_default());
        if common.machine {
            println!(
                "bench\tn={n}\tfaults={k}\ttrials={trials}\tmedian_us={}\tp99_us={}\tmax_us={}",
                micros(med),
                micros(p99),
                micros(max)
            );
        } else {
            println!("{n:>3} {k:>7} {trials:>7} {:>10} {:>10} {:>10}", micros(med), micros(p99), micros(max));
        }
    }
    code
}
