//! Faulty-edge sets, the degree conditions of the fault model, and the two
//! procedures that pick a splitting direction.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::cube::{check_cube_dim, CubeError, Dim, Edge, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FaultError {
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error("edge {0} belongs to Q_{1}, expected Q_{2}")]
    WrongCube(Edge, u32, u32),
    #[error("edge {0} listed twice")]
    Duplicate(Edge),
    #[error("edges {0} and {1} share a vertex")]
    NotDisjoint(Edge, Edge),
    #[error("no direction keeps both halves within the degree conditions")]
    NoDirection,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A set of faulty edges of `Q_n` with cached per-vertex fault counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultSet {
    n: u32,
    edges: BTreeSet<Edge>,
    // number of faulty edges at each vertex; absent means zero
    incident: HashMap<u64, u32>,
}

impl FaultSet {
    pub fn new(n: u32) -> Result<FaultSet, FaultError> {
        check_cube_dim(n)?;
        Ok(FaultSet { n, edges: BTreeSet::new(), incident: HashMap::new() })
    }

    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: u32, edges: I) -> Result<FaultSet, FaultError> {
        let mut set = FaultSet::new(n)?;
        for e in edges {
            if !set.insert(e)? {
                return Err(FaultError::Duplicate(e));
            }
        }
        Ok(set)
    }

    /// Adds `e`; returns false when it was already present.
    pub fn insert(&mut self, e: Edge) -> Result<bool, FaultError> {
        if e.cube_dim() != self.n {
            return Err(FaultError::WrongCube(e, e.cube_dim(), self.n));
        }
        if !self.edges.insert(e) {
            return Ok(false);
        }
        let (a, b) = e.endpoints();
        *self.incident.entry(a.label()).or_default() += 1;
        *self.incident.entry(b.label()).or_default() += 1;
        Ok(true)
    }

    pub fn remove(&mut self, e: Edge) -> bool {
        if !self.edges.remove(&e) {
            return false;
        }
        for v in [e.endpoints().0, e.endpoints().1] {
            let c = self.incident.get_mut(&v.label()).expect("cached count");
            *c -= 1;
            if *c == 0 {
                self.incident.remove(&v.label());
            }
        }
        true
    }

    /// A copy with the given edges removed.
    pub fn without(&self, edges: &[Edge]) -> FaultSet {
        let mut out = self.clone();
        for &e in edges {
            out.remove(e);
        }
        out
    }

    pub fn cube_dim(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    /// True when `x` and `y` are adjacent and the edge between them is not faulty.
    pub fn is_live(&self, x: Vertex, y: Vertex) -> bool {
        x.is_adjacent(y) && !self.edges.contains(&Edge::from_raw(self.n, x.label(), y.label()))
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    /// Number of faulty edges at `v`.
    pub fn faults_at(&self, v: Vertex) -> u32 {
        self.incident.get(&v.label()).copied().unwrap_or(0)
    }

    /// Degree of `v` in `Q_n - F`.
    pub fn degree(&self, v: Vertex) -> u32 {
        self.n - self.faults_at(v)
    }

    /// Vertices touched by at least one faulty edge, in label order.
    pub fn touched_vertices(&self) -> Vec<Vertex> {
        let mut labels: Vec<u64> = self.incident.keys().copied().collect();
        labels.sort_unstable();
        labels.into_iter().map(|l| Vertex::from_raw(self.n, l)).collect()
    }

    /// Faulty edges incident to `v`.
    pub fn edges_at(&self, v: Vertex) -> Vec<Edge> {
        Dim::all(self.n).map(|j| Edge::along(v, j)).filter(|e| self.edges.contains(e)).collect()
    }

    /// Number of faulty edges of direction `j`.
    pub fn layer_count(&self, j: Dim) -> usize {
        let bit = j.bit(self.n);
        self.edges.iter().filter(|e| e.bit() == bit).count()
    }

    /// Minimum degree of `Q_n - F` and the number of vertices attaining degree 2.
    fn degree_profile(&self) -> (u32, usize) {
        let total: u128 = 1u128 << self.n;
        let untouched = total - self.incident.len() as u128;
        let mut min = if untouched > 0 { self.n } else { u32::MAX };
        let mut deg2 = if self.n == 2 { untouched as usize } else { 0 };
        for &c in self.incident.values() {
            let d = self.n - c;
            min = min.min(d);
            if d == 2 {
                deg2 += 1;
            }
        }
        (min, deg2)
    }
}

/// Outcome of checking the fault-model conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionReport {
    pub n: u32,
    pub fault_count: usize,
    pub min_degree: u32,
    pub degree2_count: usize,
    pub fault_bound_ok: bool,
    pub admissible: bool,
}

impl ConditionReport {
    /// `4n - 17`, which is negative below `n = 5`.
    pub fn fault_bound(&self) -> i64 {
        fault_bound(self.n)
    }

    /// One human-readable line per violated condition.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.fault_bound_ok {
            out.push(format!(
                "fault bound exceeded: |F| = {} > 4n-17 = {}",
                self.fault_count,
                self.fault_bound()
            ));
        }
        if self.min_degree < 2 {
            out.push(format!("minimum degree {} < 2", self.min_degree));
        }
        if self.degree2_count > 1 {
            out.push(format!("{} vertices of degree 2 (at most 1 allowed)", self.degree2_count));
        }
        out
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} |F|={} bound={} min_degree={} degree2_count={} admissible={}",
            self.n,
            self.fault_count,
            self.fault_bound(),
            self.min_degree,
            self.degree2_count,
            self.admissible
        )
    }
}

pub fn fault_bound(n: u32) -> i64 {
    4 * i64::from(n) - 17
}

/// Checks `|F| <= 4n - 17`, minimum degree at least 2, and at most one vertex
/// of degree exactly 2 in `Q_n - F`.
pub fn check_conditions(faults: &FaultSet) -> ConditionReport {
    let (min_degree, degree2_count) = faults.degree_profile();
    let n = faults.cube_dim();
    let fault_bound_ok = faults.len() as i64 <= fault_bound(n);
    ConditionReport {
        n,
        fault_count: faults.len(),
        min_degree,
        degree2_count,
        fault_bound_ok,
        admissible: fault_bound_ok && min_degree >= 2 && degree2_count <= 1,
    }
}

/// The degree part of the conditions only (no bound on `|F|`).
pub fn degree_conditions_hold(faults: &FaultSet) -> bool {
    let (min, deg2) = faults.degree_profile();
    min >= 2 && deg2 <= 1
}

/// `Q_n` split along direction `j` into two halves, with the fault set
/// partitioned into the two halves and the crossing layer.
///
/// Halves are indexed by *side* 0 and 1; `side_value[s]` is the value of
/// coordinate `j` on side `s`. A freshly split view has the identity
/// labeling; [`SplitView::heavier_first`] relabels so side 0 carries at
/// least as many faults as side 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitView {
    n: u32,
    j: Dim,
    side_value: [u8; 2],
    sides: [FaultSet; 2],
    crossing: Vec<Edge>,
}

impl SplitView {
    pub fn dim(&self) -> Dim {
        self.j
    }

    pub fn cube_dim(&self) -> u32 {
        self.n
    }

    /// Faults inside side `s`, in the coordinates of `Q_{n-1}`.
    pub fn side_faults(&self, s: usize) -> &FaultSet {
        &self.sides[s]
    }

    /// Faulty edges of direction `j`, in `Q_n` coordinates.
    pub fn crossing(&self) -> &[Edge] {
        &self.crossing
    }

    pub fn side_value(&self, s: usize) -> u8 {
        self.side_value[s]
    }

    /// True when the labels were swapped relative to coordinate values.
    pub fn is_swapped(&self) -> bool {
        self.side_value[0] == 1
    }

    /// Side index of `v` and its image in `Q_{n-1}`.
    pub fn locate(&self, v: Vertex) -> (usize, Vertex) {
        let (theta, sub) = v.project(self.j);
        (usize::from(theta != self.side_value[0]), sub)
    }

    /// Vertex of `Q_n` for `sub` on side `s`.
    pub fn lift(&self, s: usize, sub: Vertex) -> Vertex {
        Vertex::embed(sub, self.j, self.side_value[s])
    }

    /// True when the crossing edge at `v` is faulty.
    pub fn crossing_faulty(&self, v: Vertex) -> bool {
        self.crossing.contains(&Edge::along(v, self.j))
    }

    /// Relabels sides so that side 0 has at least as many faults as side 1.
    pub fn heavier_first(mut self) -> SplitView {
        if self.sides[1].len() > self.sides[0].len() {
            self.sides.swap(0, 1);
            self.side_value.swap(0, 1);
        }
        self
    }

    /// Checks the degree conditions in both halves.
    pub fn halves_admissible(&self) -> bool {
        self.sides.iter().all(degree_conditions_hold)
    }
}

/// Partitions `F` along direction `j`.
pub fn split(faults: &FaultSet, j: Dim) -> SplitView {
    let n = faults.cube_dim();
    assert!(n >= 2, "cannot split Q_1");
    let mut sides = [FaultSet::new(n - 1).unwrap(), FaultSet::new(n - 1).unwrap()];
    let mut crossing = Vec::new();
    for e in faults.iter() {
        if e.dim() == j {
            crossing.push(e);
            continue;
        }
        let (a, b) = e.endpoints();
        let (ta, pa) = a.project(j);
        let (_, pb) = b.project(j);
        sides[usize::from(ta)]
            .insert(Edge::new(pa, pb).expect("projection keeps adjacency"))
            .expect("projection keeps edges distinct");
    }
    SplitView { n, j, side_value: [0, 1], sides, crossing }
}

/// Smallest direction that puts the disjoint edges `e` and `f` into different
/// halves, each edge lying inside its half.
pub fn separating_direction(e: Edge, f: Edge) -> Result<Dim, FaultError> {
    let n = e.cube_dim();
    if f.cube_dim() != n {
        return Err(CubeError::DimensionMismatch(n, f.cube_dim()).into());
    }
    if e.touches(f) {
        return Err(FaultError::NotDisjoint(e, f));
    }
    let (ea, _) = e.endpoints();
    let (fa, _) = f.endpoints();
    Dim::all(n)
        .find(|&j| j != e.dim() && j != f.dim() && ea.coord(j) != fa.coord(j))
        .ok_or(FaultError::NoDirection)
}

/// Which branch of the direction-selection argument produced the direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionRule {
    /// Minimum degree at least 3 and at most one vertex of degree 3: densest faulty layer.
    DensestLayer,
    /// Two vertices of degree 3 sharing a direction of faulty edges.
    TwoDegreeThree,
    /// Three vertices of degree 3: direction of a faulty edge joining two of them.
    ThreeDegreeThree,
    /// Unique degree-2 vertex `w` and one degree-3 vertex: a direction faulty at both.
    DegreeTwoWithOne,
    /// Unique degree-2 vertex `w` and two degree-3 vertices: direction of the faulty edge from `w`.
    DegreeTwoWithTwo,
    /// Unique degree-2 vertex `w`, all others degree at least 4: any faulty direction at `w`.
    DegreeTwoAlone,
    /// The case rules gave no passing direction; smallest passing direction from a full scan.
    Scan,
}

impl fmt::Display for DirectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DirectionRule::DensestLayer => "densest-layer",
            DirectionRule::TwoDegreeThree => "two-degree-3",
            DirectionRule::ThreeDegreeThree => "three-degree-3",
            DirectionRule::DegreeTwoWithOne => "degree-2+one-degree-3",
            DirectionRule::DegreeTwoWithTwo => "degree-2+two-degree-3",
            DirectionRule::DegreeTwoAlone => "degree-2-alone",
            DirectionRule::Scan => "scan",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct DirectionChoice {
    pub dim: Dim,
    pub rule: DirectionRule,
    /// The split along `dim`, relabeled heavier side first.
    pub split: SplitView,
}

/// Audits direction `j`: both halves satisfy the degree conditions and at
/// least one faulty edge crosses.
pub fn direction_passes(faults: &FaultSet, j: Dim) -> Option<SplitView> {
    let sv = split(faults, j);
    (!sv.crossing.is_empty() && sv.halves_admissible()).then_some(sv)
}

/// Picks a direction `j` such that both halves of `Q_n - F` keep minimum
/// degree 2 with at most one vertex of degree 2.
///
/// The candidate directions come from the case analysis on the low-degree
/// vertices of `Q_n - F`; every candidate is re-audited and, if none passes,
/// all directions are scanned.
pub fn choose_direction(faults: &FaultSet) -> Result<DirectionChoice, FaultError> {
    let n = faults.cube_dim();
    if n < 2 || faults.is_empty() {
        return Err(FaultError::NoDirection);
    }
    let (rule, candidates) = case_candidates(faults);
    for j in candidates {
        if let Some(sv) = direction_passes(faults, j) {
            return Ok(DirectionChoice { dim: j, rule, split: sv.heavier_first() });
        }
    }
    for j in Dim::all(n) {
        if let Some(sv) = direction_passes(faults, j) {
            return Ok(DirectionChoice { dim: j, rule: DirectionRule::Scan, split: sv.heavier_first() });
        }
    }
    Err(FaultError::NoDirection)
}

fn case_candidates(faults: &FaultSet) -> (DirectionRule, Vec<Dim>) {
    let n = faults.cube_dim();
    let touched = faults.touched_vertices();
    let with_degree = |d: u32| -> Vec<Vertex> {
        touched.iter().copied().filter(|&v| faults.degree(v) == d).collect()
    };
    let faulty_dims = |v: Vertex| -> BTreeSet<Dim> { faults.edges_at(v).into_iter().map(Edge::dim).collect() };
    let deg2 = with_degree(2);
    let deg3 = with_degree(3);

    if deg2.is_empty() {
        match deg3.len() {
            0 | 1 => {
                let best = Dim::all(n).map(|j| faults.layer_count(j)).max().unwrap_or(0);
                let dims = Dim::all(n).filter(|&j| faults.layer_count(j) == best).collect();
                (DirectionRule::DensestLayer, dims)
            }
            2 => {
                let a = faulty_dims(deg3[0]);
                let b = faulty_dims(deg3[1]);
                (DirectionRule::TwoDegreeThree, a.intersection(&b).copied().collect())
            }
            _ => {
                let set: BTreeSet<Vertex> = deg3.iter().copied().collect();
                let mut dims = BTreeSet::new();
                for &u in &deg3 {
                    for e in faults.edges_at(u) {
                        if set.contains(&e.other(u).unwrap()) {
                            dims.insert(e.dim());
                        }
                    }
                }
                (DirectionRule::ThreeDegreeThree, dims.into_iter().collect())
            }
        }
    } else {
        let w = deg2[0];
        let at_w = faulty_dims(w);
        match deg3.len() {
            0 => (DirectionRule::DegreeTwoAlone, at_w.into_iter().collect()),
            1 => {
                let v = deg3[0];
                let dims = at_w
                    .intersection(&faulty_dims(v))
                    .copied()
                    .filter(|&j| Edge::along(w, j) != Edge::along(v, j))
                    .collect();
                (DirectionRule::DegreeTwoWithOne, dims)
            }
            _ => {
                let dims = deg3
                    .iter()
                    .filter(|&&v| w.is_adjacent(v) && faults.contains(Edge::new(w, v).unwrap()))
                    .map(|&v| Edge::new(w, v).unwrap().dim())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                (DirectionRule::DegreeTwoWithTwo, dims)
            }
        }
    }
}

/// Parses the instance text format: a `n=<int>` header, then one edge per
/// line as two binary strings. `#` starts a comment; blank lines are ignored.
pub fn parse_instance(text: &str) -> Result<FaultSet, FaultError> {
    let mut faults: Option<FaultSet> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| FaultError::Parse { line: line_no, message };
        match faults.as_mut() {
            None => {
                let value = line
                    .strip_prefix("n=")
                    .ok_or_else(|| parse_err(format!("expected header `n=<int>`, found {line:?}")))?;
                let n: u32 = value.trim().parse().map_err(|_| parse_err(format!("bad dimension {value:?}")))?;
                faults = Some(FaultSet::new(n).map_err(|e| parse_err(e.to_string()))?);
            }
            Some(set) => {
                let e: Edge = line.parse().map_err(|e: CubeError| parse_err(e.to_string()))?;
                match set.insert(e) {
                    Ok(true) => {}
                    Ok(false) => return Err(parse_err(format!("duplicate edge {e}"))),
                    Err(err) => return Err(parse_err(err.to_string())),
                }
            }
        }
    }
    faults.ok_or(FaultError::Parse { line: 0, message: "missing header `n=<int>`".into() })
}

/// Writes `F` in the instance text format.
pub fn format_instance(faults: &FaultSet) -> String {
    let mut out = format!("n={}\n", faults.cube_dim());
    for e in faults.iter() {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}
