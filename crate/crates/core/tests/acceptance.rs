//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p hyperlace --test acceptance`. Every check uses
//! the checkers in this file as well as the library verifier, so a bug in
//! the verifier cannot hide a bad path.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use hyperlace::cube::all_edges;
use hyperlace::oracle::{
    exhaustive_ham_path, fault_sets_up_to, random_instance, InstanceSpec, OracleOutcome, SearchBudget,
};
use hyperlace::solver::{base_solve, spanning_3path_minus_edge, spanning_k_path};
use hyperlace::{
    choose_direction, ham_path_laceable, layer_edges, verify_hamiltonian_path, verify_spanning_k_path, Dim, Edge,
    EndpointPairSet, FaultSet, Path, SolveError, SolveRequest, Vertex,
};

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("hamiltonian-path audit", hamiltonian_path_audit),
        ("oracle equivalence", oracle_equivalence),
        ("direction-selection audit", direction_audit),
        ("spanning 3-path audit", three_path_audit),
        ("k-path inequality gate", k_path_gate),
        ("structural invariants", structural_invariants),
        ("negative fixtures", negative_fixtures),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// Independent helpers on raw labels.

fn key(a: u64, b: u64) -> (u64, u64) {
    (a.min(b), a.max(b))
}

fn raw_faults(f: &FaultSet) -> HashSet<(u64, u64)> {
    f.iter()
        .map(|e| {
            let (a, b) = e.endpoints();
            key(a.label(), b.label())
        })
        .collect()
}

fn labels(p: &Path) -> Vec<u64> {
    p.vertices().iter().map(|v| v.label()).collect()
}

/// Paths `a_i -> b_i` that avoid the faults, are vertex-disjoint and cover
/// all of `Q_n`.
fn check_cover(n: u32, faults: &HashSet<(u64, u64)>, pairs: &[(u64, u64)], paths: &[Vec<u64>]) -> Result<(), String> {
    if paths.len() != pairs.len() {
        return Err(format!("{} paths for {} pairs", paths.len(), pairs.len()));
    }
    let mut seen = HashSet::new();
    for (p, &(a, b)) in paths.iter().zip(pairs) {
        if p.first() != Some(&a) || p.last() != Some(&b) {
            return Err(format!("path does not run {a:b} -> {b:b}"));
        }
        for w in p.windows(2) {
            let d = w[0] ^ w[1];
            if d.count_ones() != 1 || w[0] >> n != 0 || w[1] >> n != 0 {
                return Err(format!("{:b} {:b} not adjacent", w[0], w[1]));
            }
            if faults.contains(&key(w[0], w[1])) {
                return Err(format!("faulty edge {:b} {:b} used", w[0], w[1]));
            }
        }
        for &v in p {
            if !seen.insert(v) {
                return Err(format!("vertex {v:b} visited twice"));
            }
        }
    }
    if seen.len() as u64 != 1u64 << n {
        return Err(format!("covers {} of {} vertices", seen.len(), 1u64 << n));
    }
    Ok(())
}

fn degrees(n: u32, faults: &HashSet<(u64, u64)>) -> Vec<u32> {
    let mut deg = vec![n; 1 << n];
    for &(a, b) in faults {
        deg[a as usize] -= 1;
        deg[b as usize] -= 1;
    }
    deg
}

fn degree_ok(deg: &[u32]) -> bool {
    deg.iter().all(|&d| d >= 2) && deg.iter().filter(|&&d| d == 2).count() <= 1
}

fn bound(n: u32) -> usize {
    (4 * n as i64 - 17).max(0) as usize
}

fn mix(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn vx(n: u32, label: u64) -> Vertex {
    Vertex::new(n, label).unwrap()
}

fn instance(n: u32, k: usize, seed: u64) -> (FaultSet, Vertex, Vertex) {
    let inst = random_instance(&InstanceSpec { n, fault_count: k, admissible: true, seed }).expect("instance");
    (inst.faults, inst.x, inst.y)
}

/// Solves and checks one instance with both verifiers.
fn solve_checked(f: &FaultSet, x: Vertex, y: Vertex) -> Result<(), String> {
    let n = f.cube_dim();
    let raw = raw_faults(f);
    if raw.len() > bound(n) || !degree_ok(&degrees(n, &raw)) {
        return Err("generator produced an inadmissible fault set".into());
    }
    let (path, trace) = ham_path_laceable(&SolveRequest::new(f.clone(), x, y)).map_err(|e| e.to_string())?;
    if !verify_hamiltonian_path(f, x, y, &path).passed() {
        return Err("library verifier rejected the path".into());
    }
    check_cover(n, &raw, &[(x.label(), y.label())], &[labels(&path)])?;
    if let Some(l) = trace.levels.iter().find(|l| !l.case_consistent()) {
        return Err(format!("case label inconsistent with |F0|: {l}"));
    }
    Ok(())
}

fn hamiltonian_path_audit() -> Result<String, String> {
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for n in 5..=10u32 {
        let b = bound(n);
        let start = Instant::now();
        let errors: Vec<String> = (0..1000u64)
            .into_par_iter()
            .filter_map(|t| {
                let seed = u64::from(n) * 1_000_000 + t;
                let k = if t < 500 { b } else { 1 + (mix(seed) % b as u64) as usize };
                let (f, x, y) = instance(n, k, seed);
                solve_checked(&f, x, y).err().map(|e| format!("n={n} seed={seed} |F|={k}: {e}"))
            })
            .collect();
        let secs = start.elapsed().as_secs_f64();
        if secs > 60.0 {
            failures.push(format!("n={n} took {secs:.1}s"));
        }
        report.push(format!("n={n} {}/1000 in {secs:.1}s", 1000 - errors.len()));
        failures.extend(errors.into_iter().take(5));
    }
    if failures.is_empty() {
        Ok(report.join(", "))
    } else {
        Err(format!("{}; {}", report.join(", "), failures.join("; ")))
    }
}

#[derive(Default)]
struct Tally {
    instances: usize,
    disagreements: Vec<String>,
    absent: usize,
}

fn compare_one(f: &FaultSet, x: Vertex, y: Vertex, use_base: bool) -> Result<(), String> {
    let n = f.cube_dim();
    let oracle = exhaustive_ham_path(f, x, y, SearchBudget::exhaustive()).map_err(|e| e.to_string())?;
    let raw = raw_faults(f);
    match &oracle {
        OracleOutcome::Found(p) => check_cover(n, &raw, &[(x.label(), y.label())], &[labels(p)])
            .map_err(|e| format!("oracle path invalid: {e}"))?,
        OracleOutcome::ProvenAbsent => return Err("ABSENT".into()),
        OracleOutcome::BudgetExhausted => return Err("oracle ran out of budget".into()),
    }
    let engine = if use_base {
        base_solve(f, x, y)
    } else {
        ham_path_laceable(&SolveRequest::new(f.clone(), x, y)).map(|(p, _)| p)
    };
    let p = engine.map_err(|e| format!("engine failed where the oracle found a path: {e}"))?;
    check_cover(n, &raw, &[(x.label(), y.label())], &[labels(&p)])
}

fn tally(cases: Vec<(FaultSet, Vertex, Vertex)>, use_base: bool, t: &mut Tally) {
    t.instances += cases.len();
    let errs: Vec<String> = cases
        .par_iter()
        .filter_map(|(f, x, y)| {
            compare_one(f, *x, *y, use_base).err().map(|e| {
                let edges: Vec<String> = f.iter().map(|e| e.to_string()).collect();
                format!("{e} at x={x} y={y} F=[{}]", edges.join(","))
            })
        })
        .collect();
    for e in errs {
        if e.starts_with("ABSENT") {
            t.absent += 1;
        }
        t.disagreements.push(e);
    }
}

fn all_pairs(n: u32) -> Vec<(Vertex, Vertex)> {
    let mut out = Vec::new();
    for x in (0..1u64 << n).filter(|l| l.count_ones() % 2 == 0) {
        for y in (0..1u64 << n).filter(|l| l.count_ones() % 2 == 1) {
            out.push((vx(n, x), vx(n, y)));
        }
    }
    out
}

fn oracle_equivalence() -> Result<String, String> {
    let mut t = Tally::default();
    // n = 4 lies below the main bound; the base regime allows |F| <= 3n-11 = 1.
    let pairs4 = all_pairs(4);
    let sets4: Vec<FaultSet> = fault_sets_up_to(4, 1).collect();
    let cases4 = sets4.iter().flat_map(|f| pairs4.iter().map(move |&(x, y)| (f.clone(), x, y))).collect();
    tally(cases4, true, &mut t);
    let n4 = t.instances;

    let pairs5 = all_pairs(5);
    let sets5: Vec<FaultSet> = fault_sets_up_to(5, 2).collect();
    for chunk in sets5.chunks(200) {
        let cases = chunk.iter().flat_map(|f| pairs5.iter().map(move |&(x, y)| (f.clone(), x, y))).collect();
        tally(cases, false, &mut t);
    }
    let n5_full = t.instances - n4;

    let sampled = (0..10_000u64).map(|s| instance(5, 3, 77_000_000 + s)).collect();
    tally(sampled, false, &mut t);

    let summary = format!(
        "n=4 |F|<=1: {n4} instances, n=5 |F|<=2: {n5_full} instances, n=5 |F|=3: 10000 sampled; \
         {} disagreements, {} proven absent",
        t.disagreements.len(),
        t.absent
    );
    if t.disagreements.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; first: {}", t.disagreements.iter().take(3).cloned().collect::<Vec<_>>().join("; ")))
    }
}

fn direction_audit() -> Result<String, String> {
    let mut failures = Vec::new();
    let mut total = 0;
    for n in 7..=9u32 {
        let b = bound(n);
        for t in 0..1000u64 {
            let seed = 5_000_000 + u64::from(n) * 10_000 + t;
            let k = 1 + (mix(seed) % b as u64) as usize;
            let (f, _, _) = instance(n, k, seed);
            total += 1;
            let choice = match choose_direction(&f) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("n={n} seed={seed}: {e}"));
                    continue;
                }
            };
            let bit = n - choice.dim.get();
            let raw = raw_faults(&f);
            let crossing = raw.iter().filter(|&&(a, b)| a ^ b == 1 << bit).count();
            let mut ok = crossing >= 1;
            for theta in 0..2u64 {
                let half: HashSet<(u64, u64)> = raw
                    .iter()
                    .copied()
                    .filter(|&(a, b)| a ^ b != 1 << bit && (a >> bit) & 1 == theta)
                    .collect();
                let deg = degrees(n, &half);
                let in_half: Vec<u32> =
                    (0..1u64 << n).filter(|v| (v >> bit) & 1 == theta).map(|v| deg[v as usize] - 1).collect();
                ok &= degree_ok(&in_half);
            }
            let sides = choice.split.side_faults(0).len() + choice.split.side_faults(1).len();
            ok &= sides + crossing == f.len() && choice.split.crossing().len() == crossing;
            if !ok {
                failures.push(format!("n={n} seed={seed}: direction {} fails the audit", choice.dim));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{total}/{total} directions pass for n=7,8,9"))
    } else {
        Err(format!("{} of {total} failed; {}", failures.len(), failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ")))
    }
}

fn random_edge(n: u32, r: u64) -> (u64, u64) {
    let v = r % (1 << n);
    let b = (r >> 32) % u64::from(n);
    key(v, v ^ (1 << b))
}

fn three_path_audit() -> Result<String, String> {
    let mut failures = Vec::new();
    let mut total = 0;
    for n in 5..=6u32 {
        for t in 0..500u64 {
            let seed = 9_000_000 + u64::from(n) * 10_000 + t;
            let mut r = mix(seed);
            let mut next = || {
                r = mix(r);
                r
            };
            let f = random_edge(n, next());
            let uv = loop {
                let e = random_edge(n, next());
                if e.0 != f.0 && e.0 != f.1 && e.1 != f.0 && e.1 != f.1 {
                    break e;
                }
            };
            let mut used = vec![uv.0, uv.1];
            let mut pick = |parity: Option<u32>| loop {
                let v = next() % (1 << n);
                if !used.contains(&v) && parity.map_or(true, |p| v.count_ones() % 2 != p) {
                    used.push(v);
                    break v;
                }
            };
            let x = pick(None);
            let y = pick(Some(x.count_ones() % 2));
            let w = pick(None);
            let z = pick(Some(w.count_ones() % 2));
            total += 1;
            let fe = Edge::new(vx(n, f.0), vx(n, f.1)).unwrap();
            let uve = Edge::new(vx(n, uv.0), vx(n, uv.1)).unwrap();
            let res = spanning_3path_minus_edge(n, fe, uve, (vx(n, x), vx(n, y)), (vx(n, w), vx(n, z)));
            let outcome = res.map_err(|e| e.to_string()).and_then(|(sys, _)| {
                let pairs = [(uv.0, uv.1), (x, y), (w, z)];
                let (u, v) = uve.endpoints();
                let set = EndpointPairSet::new(vec![(u, v), (vx(n, x), vx(n, y)), (vx(n, w), vx(n, z))]).unwrap();
                let faults = FaultSet::from_edges(n, [fe]).unwrap();
                if !verify_spanning_k_path(&faults, &set, &sys).passed() {
                    return Err("library verifier rejected the system".into());
                }
                let paths: Vec<Vec<u64>> = sys.paths.iter().map(labels).collect();
                check_cover(n, &HashSet::from([f]), &pairs, &paths)
            });
            if let Err(e) = outcome {
                failures.push(format!("n={n} seed={seed}: {e}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{total}/{total} verified at n=5,6"))
    } else {
        Err(format!("{} of {total} failed; {}", failures.len(), failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ")))
    }
}

fn k_path_gate() -> Result<String, String> {
    let n = 4u32;
    let verts: Vec<u64> = (0..16).collect();
    let mut configs: Vec<Vec<(u64, u64)>> = Vec::new();
    for i in 0..16 {
        for j in i + 1..16 {
            configs.push(vec![(verts[i], verts[j])]);
        }
    }
    for a in 0..16u64 {
        for b in a + 1..16 {
            for c in a + 1..16 {
                for d in c + 1..16 {
                    if [c, d].contains(&b) {
                        continue;
                    }
                    configs.push(vec![(a, b), (c, d)]);
                }
            }
        }
    }
    let mut mismatches = Vec::new();
    let (mut accepted, mut rejected) = (0, 0);
    for pairs in &configs {
        let k = pairs.len() as i64;
        let even = pairs.iter().flat_map(|&(a, b)| [a, b]).filter(|v| v.count_ones() % 2 == 0).count() as i64;
        let balanced = 2 * even == 2 * k;
        let adjacent = pairs.iter().filter(|&&(a, b)| (a ^ b).count_ones() == 1).count() as i64;
        let expect = balanced && 2 * k - adjacent < i64::from(n);
        let set = EndpointPairSet::new(pairs.iter().map(|&(a, b)| (vx(n, a), vx(n, b))).collect()).unwrap();
        match (expect, spanning_k_path(n, &set)) {
            (true, Ok(sys)) => {
                let paths: Vec<Vec<u64>> = sys.paths.iter().map(labels).collect();
                match check_cover(n, &HashSet::new(), pairs, &paths) {
                    Ok(()) => accepted += 1,
                    Err(e) => mismatches.push(format!("{pairs:?}: {e}")),
                }
            }
            (false, Err(e)) => {
                let right_kind = if balanced { matches!(e, SolveError::ConditionViolated(_)) } else { true };
                if right_kind {
                    rejected += 1;
                } else {
                    mismatches.push(format!("{pairs:?}: wrong rejection {e}"));
                }
            }
            (true, Err(e)) => mismatches.push(format!("{pairs:?}: rejected ({e})")),
            (false, Ok(_)) => mismatches.push(format!("{pairs:?}: accepted past the gate")),
        }
    }
    let summary = format!("{} configurations at n=4: {accepted} accepted and verified, {rejected} rejected", configs.len());
    if mismatches.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {} mismatches, first: {}", mismatches.len(), mismatches[0]))
    }
}

fn structural_invariants() -> Result<String, String> {
    for n in 1..=6u32 {
        let half = 1usize << (n - 1);
        let edges = all_edges(n);
        let distinct: HashSet<Edge> = edges.iter().copied().collect();
        if edges.len() != n as usize * half || distinct.len() != edges.len() {
            return Err(format!("n={n}: {} edges, expected {}", edges.len(), n as usize * half));
        }
        let mut union = HashSet::new();
        for j in 1..=n {
            let d = Dim::new(n, j).unwrap();
            let layer = layer_edges(n, d);
            if layer.len() != half {
                return Err(format!("n={n}: layer {j} has {} edges", layer.len()));
            }
            for e in layer {
                let (a, b) = e.endpoints();
                if a.label() ^ b.label() != 1 << (n - j) || e.dim() != d || !union.insert(e) {
                    return Err(format!("n={n}: edge {e} misplaced in layer {j}"));
                }
            }
        }
        if union != distinct {
            return Err(format!("n={n}: layers do not partition the edge set"));
        }
        let white = Vertex::all(n).filter(|v| v.parity() == 0).count();
        if white != half {
            return Err(format!("n={n}: {white} white vertices"));
        }
        for a in 0..1u64 << n {
            for b in 0..1u64 << n {
                let (va, vb) = (vx(n, a), vx(n, b));
                let odd = (a ^ b).count_ones() % 2 == 1;
                if va.hamming(vb) != (a ^ b).count_ones() || odd != (va.parity() != vb.parity()) {
                    return Err(format!("n={n}: parity and distance disagree at {va} {vb}"));
                }
            }
        }
    }
    Ok("edge counts, layer partition, colour balance and parity-distance hold for n=1..6".into())
}

fn negative_fixtures() -> Result<String, String> {
    let mut total = 0;
    let mut failures = Vec::new();
    let mut expect = |what: String, res: Result<(Path, hyperlace::SolveTrace), SolveError>, want: &str| {
        total += 1;
        match res {
            Err(e) if e.exit_status() == 2 && e.to_string().contains(want) => {}
            Err(SolveError::Inadmissible(r)) if r.violations().iter().any(|v| v.contains(want)) => {}
            Err(e) => failures.push(format!("{what}: {e} (exit {})", e.exit_status())),
            Ok(_) => failures.push(format!("{what}: accepted")),
        }
    };
    for n in 5..=10u32 {
        for s in 0..10u64 {
            // One fault over the bound, degree conditions intact.
            let seed = 3_000_000 + u64::from(n) * 100 + s;
            let (mut f, x, y) = instance(n, bound(n), seed);
            let raw = raw_faults(&f);
            let deg = degrees(n, &raw);
            let mut r = mix(seed);
            loop {
                r = mix(r);
                let (a, b) = random_edge(n, r);
                if !raw.contains(&(a, b)) && deg[a as usize] > 3 && deg[b as usize] > 3 {
                    f.insert(Edge::new(vx(n, a), vx(n, b)).unwrap()).unwrap();
                    break;
                }
            }
            let req = SolveRequest::new(f.clone(), x, y);
            expect(format!("n={n} |F|=4n-16 seed={seed}"), ham_path_laceable(&req), "fault bound exceeded");

            // Same-parity endpoints.
            let (g, x, _) = instance(n, bound(n), seed + 50);
            let y = vx(n, x.label() ^ 0b11);
            expect(format!("n={n} same parity seed={seed}"), ham_path_laceable(&SolveRequest::new(g, x, y)), "same parity");

            // A vertex left with degree 1.
            let v = mix(seed + 99) % (1 << n);
            let edges = (0..n - 1).map(|b| Edge::new(vx(n, v), vx(n, v ^ (1 << b))).unwrap());
            let h = FaultSet::from_edges(n, edges).unwrap();
            let x = vx(n, v);
            let y = vx(n, v ^ 1 ^ (1 << (n - 1)) ^ 2);
            let y = if y.parity() == x.parity() { vx(n, y.label() ^ 4) } else { y };
            expect(format!("n={n} degree 1 seed={seed}"), ham_path_laceable(&SolveRequest::new(h, x, y)), "minimum degree 1");
        }
    }
    if failures.is_empty() {
        Ok(format!("{total}/{total} fixtures rejected with exit status 2"))
    } else {
        Err(format!("{} of {total} not rejected; {}", failures.len(), failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ")))
    }
}

fn determinism() -> Result<String, String> {
    let run = || -> Vec<(FaultSet, Vertex, Vertex, Result<(Path, hyperlace::SolveTrace), String>)> {
        let mut out = Vec::new();
        for n in 7..=9u32 {
            for s in 0..50u64 {
                let (f, x, y) = instance(n, bound(n), 8_000_000 + u64::from(n) * 100 + s);
                let res = ham_path_laceable(&SolveRequest::new(f.clone(), x, y)).map_err(|e| e.to_string());
                out.push((f, x, y, res));
            }
        }
        out
    };
    let (a, b) = (run(), run());
    if a == b {
        Ok(format!("{} instances, paths and traces identical across two runs", a.len()))
    } else {
        let i = a.iter().zip(&b).position(|(p, q)| p != q).unwrap_or(0);
        Err(format!("run mismatch at instance {i}"))
    }
}
