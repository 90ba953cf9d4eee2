//! Ground truth for small cubes: exhaustive search for Hamiltonian paths and
//! spanning path systems, plus seeded random instances.
//!
//! The search here shares no code with the solver's own searches. It keeps
//! the path on an explicit stack, tries the unvisited neighbor with the
//! fewest unvisited neighbors first (ties by label), and cuts a branch as
//! soon as some unvisited vertex has too few usable neighbors left.

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cube::{all_edges, Edge, Vertex};
use crate::fault::{check_conditions, fault_bound, FaultSet};
use crate::path::{Path, PathSystem};

/// Largest cube searched in exhaustive mode.
pub const EXHAUSTIVE_MAX_DIM: u32 = 6;

/// Largest cube searched at all.
pub const HEURISTIC_MAX_DIM: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exhaustive search is limited to n <= {EXHAUSTIVE_MAX_DIM}, got n = {0}")]
    TooLarge(u32),
    #[error("vertex {0} is not in Q_{1}")]
    WrongCube(Vertex, u32),
    #[error("endpoint {0} appears more than once")]
    RepeatedEndpoint(Vertex),
    #[error("no instance satisfies the request: {0}")]
    Unsatisfiable(String),
}

/// Limits for one search. An exhaustive search ignores both limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub exhaustive: bool,
}

impl SearchBudget {
    pub fn exhaustive() -> SearchBudget {
        SearchBudget { node_limit: None, time_limit: None, exhaustive: true }
    }

    pub fn nodes(limit: u64) -> SearchBudget {
        SearchBudget { node_limit: Some(limit), time_limit: None, exhaustive: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome<T> {
    Found(T),
    /// The whole search tree was explored without success.
    ProvenAbsent,
    BudgetExhausted,
}

impl<T> OracleOutcome<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, OracleOutcome::Found(_))
    }
}

/// Searches for a Hamiltonian path of `Q_n - F` from `x` to `y`.
pub fn exhaustive_ham_path(
    faults: &FaultSet,
    x: Vertex,
    y: Vertex,
    budget: SearchBudget,
) -> Result<OracleOutcome<Path>, OracleError> {
    Ok(match exhaustive_spanning_k(faults, &[(x, y)], budget)? {
        OracleOutcome::Found(mut sys) => OracleOutcome::Found(sys.paths.remove(0)),
        OracleOutcome::ProvenAbsent => OracleOutcome::ProvenAbsent,
        OracleOutcome::BudgetExhausted => OracleOutcome::BudgetExhausted,
    })
}

/// Searches for vertex-disjoint paths `a_i -> b_i` of `Q_n - F` that cover
/// every vertex. A pair `(a, a)` asks for the one-vertex path.
pub fn exhaustive_spanning_k(
    faults: &FaultSet,
    pairs: &[(Vertex, Vertex)],
    budget: SearchBudget,
) -> Result<OracleOutcome<PathSystem>, OracleError> {
    let n = faults.cube_dim();
    let cap = if budget.exhaustive { EXHAUSTIVE_MAX_DIM } else { HEURISTIC_MAX_DIM };
    if n > cap {
        return Err(OracleError::TooLarge(n));
    }
    let mut seen = std::collections::HashSet::new();
    for &(a, b) in pairs {
        for v in [a, b] {
            if v.cube_dim() != n {
                return Err(OracleError::WrongCube(v, n));
            }
        }
        if !seen.insert(a) {
            return Err(OracleError::RepeatedEndpoint(a));
        }
        if a != b && !seen.insert(b) {
            return Err(OracleError::RepeatedEndpoint(b));
        }
    }
    if pairs.is_empty() {
        return Ok(OracleOutcome::ProvenAbsent);
    }
    let raw: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a.label() as usize, b.label() as usize)).collect();
    let mut dfs = Dfs::new(faults, raw, budget);
    Ok(match dfs.run() {
        Some(true) => {
            let paths = dfs.split_paths().into_iter().map(|p| to_path(n, &p)).collect();
            OracleOutcome::Found(PathSystem::new(paths))
        }
        Some(false) => OracleOutcome::ProvenAbsent,
        None => OracleOutcome::BudgetExhausted,
    })
}

fn to_path(n: u32, labels: &[usize]) -> Path {
    Path::new(labels.iter().map(|&v| Vertex::new(n, v as u64).expect("label in range")).collect())
}

struct Frame {
    v: usize,
    /// Index of the pair whose path `v` lies on.
    pair: usize,
    moves: Vec<usize>,
    next: usize,
}

struct Dfs {
    adj: Vec<Vec<usize>>,
    pairs: Vec<(usize, usize)>,
    /// Pair index owning each endpoint.
    owner: Vec<Option<usize>>,
    visited: Vec<bool>,
    /// Unvisited neighbors of each vertex.
    open: Vec<u32>,
    count: usize,
    frames: Vec<Frame>,
    nodes: u64,
    budget: SearchBudget,
    started: Instant,
}

impl Dfs {
    fn new(faults: &FaultSet, pairs: Vec<(usize, usize)>, budget: SearchBudget) -> Dfs {
        let n = faults.cube_dim();
        let size = 1usize << n;
        let adj: Vec<Vec<usize>> = (0..size)
            .map(|v| {
                let x = Vertex::new(n, v as u64).expect("label in range");
                (0..n)
                    .map(|b| v ^ (1 << b))
                    .filter(|&w| faults.is_live(x, Vertex::new(n, w as u64).expect("label in range")))
                    .collect()
            })
            .collect();
        let mut owner = vec![None; size];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            owner[a] = Some(i);
            owner[b] = Some(i);
        }
        let open = adj.iter().map(|a| a.len() as u32).collect();
        Dfs {
            adj,
            pairs,
            owner,
            visited: vec![false; size],
            open,
            count: 0,
            frames: Vec::new(),
            nodes: 0,
            budget,
            started: Instant::now(),
        }
    }

    fn visit(&mut self, v: usize) {
        self.visited[v] = true;
        self.count += 1;
        for &w in &self.adj[v] {
            self.open[w] -= 1;
        }
    }

    fn unvisit(&mut self, v: usize) {
        self.visited[v] = false;
        self.count -= 1;
        for &w in &self.adj[v] {
            self.open[w] += 1;
        }
    }

    /// Unvisited vertex `w` still has enough usable neighbors given `head`.
    fn viable(&self, w: usize, head: usize) -> bool {
        let usable = self.open[w] + u32::from(self.adj[w].contains(&head));
        match self.owner[w] {
            None => usable >= 2,
            Some(i) if self.pairs[i].0 == self.pairs[i].1 => true,
            Some(_) => usable >= 1,
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.budget.exhaustive {
            return false;
        }
        if self.budget.node_limit.is_some_and(|l| self.nodes > l) {
            return true;
        }
        if self.nodes % 4096 == 0 {
            if let Some(t) = self.budget.time_limit {
                return self.started.elapsed() > t;
            }
        }
        false
    }

    /// Moves available from `v` on pair `pair`, fewest onward options first.
    fn moves(&self, v: usize, pair: usize) -> Vec<usize> {
        let (_, target) = self.pairs[pair];
        if v == target {
            return match self.pairs.get(pair + 1) {
                Some(&(a, _)) if !self.visited[a] => vec![a],
                _ => Vec::new(),
            };
        }
        let mut out: Vec<usize> = self.adj[v]
            .iter()
            .copied()
            .filter(|&w| !self.visited[w] && (self.owner[w].is_none() || w == target))
            .collect();
        out.sort_by_key(|&w| (self.open[w], w));
        out
    }

    /// Cheap dead-end test after `head` was entered from `prev`.
    fn dead(&self, prev: Option<usize>, head: usize) -> bool {
        let check = |around: usize| self.adj[around].iter().any(|&w| !self.visited[w] && !self.viable(w, head));
        match prev {
            Some(p) if self.adj[p].contains(&head) => check(p) || check(head),
            _ => (0..self.visited.len()).any(|w| !self.visited[w] && !self.viable(w, head)),
        }
    }

    fn complete(&self, v: usize, pair: usize) -> bool {
        pair + 1 == self.pairs.len() && v == self.pairs[pair].1 && self.count == self.visited.len()
    }

    /// `Some(found)` when the search ended, `None` when the budget ran out.
    fn run(&mut self) -> Option<bool> {
        let a0 = self.pairs[0].0;
        self.visit(a0);
        let moves = self.moves(a0, 0);
        self.frames.push(Frame { v: a0, pair: 0, moves, next: 0 });
        if self.complete(a0, 0) {
            return Some(true);
        }
        loop {
            let Some(top) = self.frames.last_mut() else { return Some(false) };
            if top.next < top.moves.len() {
                let w = top.moves[top.next];
                top.next += 1;
                let from = top.v;
                let pair = if from == self.pairs[top.pair].1 { top.pair + 1 } else { top.pair };
                self.nodes += 1;
                if self.out_of_budget() {
                    return None;
                }
                self.visit(w);
                if self.complete(w, pair) {
                    self.frames.push(Frame { v: w, pair, moves: Vec::new(), next: 0 });
                    return Some(true);
                }
                if self.dead(Some(from), w) {
                    self.unvisit(w);
                    continue;
                }
                let moves = self.moves(w, pair);
                self.frames.push(Frame { v: w, pair, moves, next: 0 });
            } else {
                let f = self.frames.pop().expect("non-empty stack");
                self.unvisit(f.v);
            }
        }
    }

    fn split_paths(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.pairs.len()];
        for f in &self.frames {
            out[f.pair].push(f.v);
        }
        out
    }
}

/// What [`random_instance`] should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub n: u32,
    pub fault_count: usize,
    /// Reject draws until the fault set is admissible.
    pub admissible: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub faults: FaultSet,
    pub x: Vertex,
    pub y: Vertex,
}

/// Draws with a fixed seed give up after this many rejected fault sets.
pub const MAX_DRAWS: usize = 100_000;

/// Seeded random fault set with distinct opposite-parity endpoints.
///
/// Fault sets are drawn uniformly among sets of the requested size and
/// redrawn until admissible when that is requested.
pub fn random_instance(spec: &InstanceSpec) -> Result<Instance, OracleError> {
    let n = spec.n;
    if n == 0 || n > HEURISTIC_MAX_DIM {
        return Err(OracleError::Unsatisfiable(format!("n = {n} is outside 1..={HEURISTIC_MAX_DIM}")));
    }
    let edges = all_edges(n);
    if spec.fault_count > edges.len() {
        return Err(OracleError::Unsatisfiable(format!("Q_{n} has only {} edges", edges.len())));
    }
    if spec.admissible && spec.fault_count as i64 > fault_bound(n) {
        return Err(OracleError::Unsatisfiable(format!(
            "{} faults exceed the bound 4n-17 = {}",
            spec.fault_count,
            fault_bound(n)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut faults = None;
    for _ in 0..MAX_DRAWS {
        let picked: Vec<Edge> = sample(&mut rng, edges.len(), spec.fault_count).into_iter().map(|i| edges[i]).collect();
        let f = FaultSet::from_edges(n, picked).expect("distinct edges");
        if !spec.admissible || check_conditions(&f).admissible {
            faults = Some(f);
            break;
        }
    }
    let faults = faults.ok_or_else(|| OracleError::Unsatisfiable(format!("no admissible draw in {MAX_DRAWS} tries")))?;
    let size = 1u64 << n;
    let x = Vertex::new(n, rng.gen_range(0..size)).expect("label in range");
    let y = loop {
        let y = Vertex::new(n, rng.gen_range(0..size)).expect("label in range");
        if y.parity() != x.parity() {
            break y;
        }
    };
    Ok(Instance { faults, x, y })
}

/// Every fault set of `Q_n` with at most `max_faults` edges, in
/// lexicographic order of edge indices.
pub fn fault_sets_up_to(n: u32, max_faults: usize) -> impl Iterator<Item = FaultSet> {
    let edges = all_edges(n);
    (0..=max_faults.min(edges.len())).flat_map(move |k| {
        let edges = edges.clone();
        Combinations::new(edges.len(), k).map(move |idx| {
            FaultSet::from_edges(n, idx.iter().map(|&i| edges[i])).expect("distinct edges")
        })
    })
}

struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Combinations {
        Combinations { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for t in i + 1..k {
                    self.idx[t] = self.idx[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
