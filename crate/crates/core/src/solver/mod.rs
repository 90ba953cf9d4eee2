//! Hamiltonian-path construction in faulty hypercubes.
//!
//! [`ham_path_laceable`] is the main entry point. It splits the cube along a
//! direction chosen by [`choose_direction`](crate::fault::choose_direction),
//! recurses into the heavier half with a few of its faults set aside, and
//! splices the other half in through crossing edges. The subsolvers below
//! provide the spanning-path capabilities the splices need.

use std::fmt;

use thiserror::Error;

use crate::cube::{Dim, Edge, Vertex};
use crate::fault::{ConditionReport, DirectionRule};

mod engine;
mod search;
mod spanning;
mod subsolvers;
mod three_path;

pub use engine::{base_solve, ham_path_laceable, ham_path_laceable_with};
pub use subsolvers::{
    ham_path_avoiding_edge, ham_path_fault_free, ham_path_through_edge, spanning_2path, spanning_k_path,
};
pub use three_path::{spanning_3path_minus_edge, ThreePathPlan};


#[derive(Debug, Error)]
pub enum SolveError {
    #[error("inadmissible instance: {0}")]
    Inadmissible(ConditionReport),
    #[error("endpoints {0} and {1} have the same parity")]
    SameParity(Vertex, Vertex),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("condition violated: {0}")]
    ConditionViolated(String),
    #[error("no path system found")]
    NotFound,
    #[error("construction failed: {reason}")]
    ConstructionFailed { reason: String, trace: SolveTrace },
}

impl SolveError {
    /// Process exit status for the command-line front end: 1 usage, 2
    /// inadmissible input, 4 construction failure.
    pub fn exit_status(&self) -> u8 {
        match self {
            SolveError::ContractViolation(_) => 1,
            SolveError::Inadmissible(_) | SolveError::SameParity(..) | SolveError::ConditionViolated(_) => 2,
            SolveError::NotFound | SolveError::ConstructionFailed { .. } => 4,
        }
    }
}

/// One Hamiltonian-path query: faults of `Q_n` and the two ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveRequest {
    pub faults: crate::fault::FaultSet,
    pub x: Vertex,
    pub y: Vertex,
}

impl SolveRequest {
    pub fn new(faults: crate::fault::FaultSet, x: Vertex, y: Vertex) -> SolveRequest {
        SolveRequest { faults, x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Search nodes shared by every search the construction runs.
    pub node_budget: u64,
    /// Check every intermediate path against the verifier.
    pub verify_steps: bool,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions { node_budget: 200_000_000, verify_steps: cfg!(debug_assertions) }
    }
}

/// What a recursion level did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// No faults: the classic fault-free construction.
    FaultFree,
    /// Small cube: direct search.
    Base,
    /// Split step, numbered by the size of the heavier half's fault set
    /// (`case`) and by where the two ends lie (`sub`: 1 both in the
    /// heavier half, 2 split, 3 both in the lighter half).
    Case { case: u8, sub: u8 },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::FaultFree => f.write_str("fault-free"),
            Step::Base => f.write_str("base"),
            Step::Case { case, sub } => write!(f, "case {case}.{sub}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelRecord {
    pub depth: usize,
    pub n: u32,
    pub step: Step,
    pub dim: Option<Dim>,
    pub rule: Option<DirectionRule>,
    /// The first direction, when the level re-split on a second one.
    pub resplit_from: Option<Dim>,
    /// `|F_0|`, `|F_1|` after relabeling so that `|F_0| >= |F_1|`.
    pub side_faults: [usize; 2],
    pub crossing_faults: usize,
    /// Faults of the heavier half set aside before recursing.
    pub freed: Vec<Edge>,
    /// Path edges replaced by excursions into the other half.
    pub selected: Vec<Edge>,
    pub detours: usize,
    pub calls: Vec<&'static str>,
    /// The split plans all failed and a direct search finished the level.
    pub fallback: bool,
}

impl LevelRecord {
    pub(crate) fn new(depth: usize, n: u32, step: Step) -> LevelRecord {
        LevelRecord {
            depth,
            n,
            step,
            dim: None,
            rule: None,
            resplit_from: None,
            side_faults: [0, 0],
            crossing_faults: 0,
            freed: Vec::new(),
            selected: Vec::new(),
            detours: 0,
            calls: Vec::new(),
            fallback: false,
        }
    }

    /// True when the recorded case matches `|F_0|` against `4n-21 .. 4n-18`.
    pub fn case_consistent(&self) -> bool {
        let Step::Case { case, .. } = self.step else { return true };
        classify(self.n, self.side_faults[0]) == Some(case)
    }
}

impl fmt::Display for LevelRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:indent$}n={} {}", "", self.n, self.step, indent = 2 * self.depth)?;
        if let Some(j) = self.dim {
            write!(f, " j={j}")?;
        }
        if let Some(rule) = self.rule {
            write!(f, " rule={rule}")?;
        }
        if let Some(k) = self.resplit_from {
            write!(f, " resplit-from={k}")?;
        }
        if matches!(self.step, Step::Case { .. }) {
            write!(
                f,
                " |F0|={} |F1|={} |Fc|={}",
                self.side_faults[0], self.side_faults[1], self.crossing_faults
            )?;
        }
        if !self.freed.is_empty() {
            let s: Vec<String> = self.freed.iter().map(|e| format!("[{e}]")).collect();
            write!(f, " freed={}", s.join(","))?;
        }
        if !self.selected.is_empty() {
            let s: Vec<String> = self.selected.iter().map(|e| format!("[{e}]")).collect();
            write!(f, " selected={}", s.join(","))?;
        }
        if self.detours > 0 {
            write!(f, " detours={}", self.detours)?;
        }
        if !self.calls.is_empty() {
            write!(f, " calls={}", self.calls.join(","))?;
        }
        if self.fallback {
            f.write_str(" fallback")?;
        }
        Ok(())
    }
}

/// Recursion log of one construction, outermost level first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveTrace {
    pub levels: Vec<LevelRecord>,
}

impl SolveTrace {
    pub fn fallbacks(&self) -> usize {
        self.levels.iter().filter(|l| l.fallback).count()
    }
}

impl fmt::Display for SolveTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for level in &self.levels {
            writeln!(f, "{level}")?;
        }
        Ok(())
    }
}

/// Case number for a heavier half carrying `f0` faults in `Q_n`.
pub fn classify(n: u32, f0: usize) -> Option<u8> {
    let f0 = f0 as i64;
    let n = i64::from(n);
    match f0 - (4 * n - 21) {
        d if d <= 0 => Some(1),
        1 => Some(2),
        2 => Some(3),
        3 => Some(4),
        _ => None,
    }
}
