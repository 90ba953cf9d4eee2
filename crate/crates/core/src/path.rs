//! Paths, path systems, the shared verifier, and the splice combinators used
//! to glue sub-cube paths together.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::cube::{CubeError, Dim, Edge, Vertex};
use crate::fault::FaultSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error("edge {0} is not on the path")]
    DropNotOnPath(Edge),
    #[error("crossing edges do not connect the dropped edge to the inserted path's ends")]
    CrossMismatch,
    #[error("edge {0} is faulty")]
    FaultyEdge(Edge),
    #[error("splice pattern does not match: {0}")]
    Pattern(String),
    #[error("no path edge satisfies the selection constraints")]
    NoEdge,
    #[error("endpoint pairs are not pairwise distinct")]
    RepeatedEndpoint,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An ordered vertex sequence. Validity (adjacency, no repeats) is checked by
/// the verifier, not on construction, so malformed input can be reported.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    vertices: Vec<Vertex>,
}

impl Path {
    pub fn new(vertices: Vec<Vertex>) -> Path {
        Path { vertices }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vertex> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn start(&self) -> Option<Vertex> {
        self.vertices.first().copied()
    }

    pub fn end(&self) -> Option<Vertex> {
        self.vertices.last().copied()
    }

    pub fn reversed(&self) -> Path {
        let mut v = self.vertices.clone();
        v.reverse();
        Path { vertices: v }
    }

    /// Consecutive pairs as edges, in path order. Non-adjacent steps are skipped.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices.windows(2).filter_map(|w| Edge::new(w[0], w[1]).ok())
    }

    /// Index of the first vertex of `e` along the path, if `e` is a path edge.
    pub fn edge_position(&self, e: Edge) -> Option<usize> {
        self.vertices
            .windows(2)
            .position(|w| Edge::new(w[0], w[1]).map(|x| x == e).unwrap_or(false))
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.edge_position(e).is_some()
    }

    /// Parses one vertex per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Path, PathError> {
        let mut sys = PathSystem::parse(text)?;
        match sys.paths.len() {
            0 => Ok(Path::new(Vec::new())),
            1 => Ok(sys.paths.pop().unwrap()),
            k => Err(PathError::Parse { line: 0, message: format!("expected one path, found {k}") }),
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Prescribed endpoint pairs `{a_i, b_i}` with all `2k` vertices distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointPairSet {
    pairs: Vec<(Vertex, Vertex)>,
}

impl EndpointPairSet {
    pub fn new(pairs: Vec<(Vertex, Vertex)>) -> Result<EndpointPairSet, PathError> {
        let mut seen = HashSet::new();
        for &(a, b) in &pairs {
            if a.cube_dim() != b.cube_dim() {
                return Err(CubeError::DimensionMismatch(a.cube_dim(), b.cube_dim()).into());
            }
            if !seen.insert(a) || !seen.insert(b) {
                return Err(PathError::RepeatedEndpoint);
            }
        }
        Ok(EndpointPairSet { pairs })
    }

    pub fn pairs(&self) -> &[(Vertex, Vertex)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Equal numbers of white and black endpoints.
    pub fn is_balanced(&self) -> bool {
        let white = self.pairs.iter().flat_map(|&(a, b)| [a, b]).filter(|v| v.parity() == 0).count();
        2 * white == 2 * self.pairs.len()
    }

    /// Number of pairs whose two vertices are adjacent in the cube.
    pub fn adjacent_pairs(&self) -> usize {
        self.pairs.iter().filter(|(a, b)| a.is_adjacent(*b)).count()
    }
}

/// `k` paths intended to be disjoint and jointly spanning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSystem {
    pub paths: Vec<Path>,
}

impl PathSystem {
    pub fn new(paths: Vec<Path>) -> PathSystem {
        PathSystem { paths }
    }

    /// Paths separated by blank lines, one vertex per line.
    pub fn parse(text: &str) -> Result<PathSystem, PathError> {
        let mut paths = Vec::new();
        let mut current = Vec::new();
        let mut n = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                if !raw.trim_start().starts_with('#') && !current.is_empty() {
                    paths.push(Path::new(std::mem::take(&mut current)));
                }
                continue;
            }
            let v: Vertex = line
                .parse()
                .map_err(|e: CubeError| PathError::Parse { line: idx + 1, message: e.to_string() })?;
            match n {
                None => n = Some(v.cube_dim()),
                Some(d) if d != v.cube_dim() => {
                    return Err(PathError::Parse {
                        line: idx + 1,
                        message: format!("vertex {v} has {} coordinates, expected {d}", v.cube_dim()),
                    })
                }
                _ => {}
            }
            current.push(v);
        }
        if !current.is_empty() {
            paths.push(Path::new(current));
        }
        Ok(PathSystem { paths })
    }
}

impl fmt::Display for PathSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.paths.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// One violated clause of a path contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    WrongCube(Vertex),
    WrongPathCount { expected: usize, found: usize },
    WrongStart { path: usize, expected: Vertex, found: Vertex },
    WrongEnd { path: usize, expected: Vertex, found: Vertex },
    NotAdjacent(Vertex, Vertex),
    UsesFaultyEdge(Edge),
    VertexRepeated(Vertex),
    NotDisjoint(Vertex),
    NotSpanning { covered: u64, expected: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty path"),
            Violation::WrongCube(v) => write!(f, "vertex {v} has the wrong number of coordinates"),
            Violation::WrongPathCount { expected, found } => {
                write!(f, "expected {expected} paths, found {found}")
            }
            Violation::WrongStart { path, expected, found } => {
                write!(f, "path {path} starts at {found}, expected {expected}")
            }
            Violation::WrongEnd { path, expected, found } => {
                write!(f, "path {path} ends at {found}, expected {expected}")
            }
            Violation::NotAdjacent(a, b) => write!(f, "consecutive vertices {a} and {b} are not adjacent"),
            Violation::UsesFaultyEdge(e) => write!(f, "uses faulty edge {e}"),
            Violation::VertexRepeated(v) => write!(f, "vertex repeated: {v}"),
            Violation::NotDisjoint(v) => write!(f, "not disjoint: {v} lies on two paths"),
            Violation::NotSpanning { covered, expected } => {
                write!(f, "not spanning: covers {covered} of {expected} vertices")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks that `path` is a Hamiltonian path of `Q_n - F` from `x` to `y`.
pub fn verify_hamiltonian_path(faults: &FaultSet, x: Vertex, y: Vertex, path: &Path) -> VerifyReport {
    let pairs = [(x, y)];
    verify_paths(faults, &pairs, std::slice::from_ref(path))
}

/// Checks that `sys` is a spanning k-path of `Q_n - F` realising `pairs`.
pub fn verify_spanning_k_path(faults: &FaultSet, pairs: &EndpointPairSet, sys: &PathSystem) -> VerifyReport {
    verify_paths(faults, pairs.pairs(), &sys.paths)
}

pub(crate) fn verify_paths(faults: &FaultSet, pairs: &[(Vertex, Vertex)], paths: &[Path]) -> VerifyReport {
    let n = faults.cube_dim();
    let mut out = Vec::new();
    if pairs.len() != paths.len() {
        out.push(Violation::WrongPathCount { expected: pairs.len(), found: paths.len() });
    }
    let mut owner: HashMap<Vertex, usize> = HashMap::new();
    for (i, path) in paths.iter().enumerate() {
        let Some((&first, &last)) = path.vertices.first().zip(path.vertices.last()) else {
            out.push(Violation::Empty);
            continue;
        };
        if let Some(&(a, b)) = pairs.get(i) {
            if first != a {
                out.push(Violation::WrongStart { path: i, expected: a, found: first });
            }
            if last != b {
                out.push(Violation::WrongEnd { path: i, expected: b, found: last });
            }
        }
        for &v in &path.vertices {
            if v.cube_dim() != n {
                out.push(Violation::WrongCube(v));
                continue;
            }
            match owner.insert(v, i) {
                Some(j) if j == i => out.push(Violation::VertexRepeated(v)),
                Some(_) => out.push(Violation::NotDisjoint(v)),
                None => {}
            }
        }
        for w in path.vertices.windows(2) {
            if w[0].cube_dim() != n || w[1].cube_dim() != n {
                continue;
            }
            match Edge::new(w[0], w[1]) {
                Ok(e) if faults.contains(e) => out.push(Violation::UsesFaultyEdge(e)),
                Ok(_) => {}
                Err(_) => out.push(Violation::NotAdjacent(w[0], w[1])),
            }
        }
    }
    let expected = 1u64 << n;
    if owner.len() as u64 != expected {
        out.push(Violation::NotSpanning { covered: owner.len() as u64, expected });
    }
    VerifyReport { violations: out }
}

/// Rebuilds the single path from `start` to `end` formed by `edges`.
///
/// Fails unless the edges form exactly one simple path with those ends.
fn assemble(start: Vertex, end: Vertex, edges: &[Edge]) -> Result<Path, PathError> {
    let mut adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for e in edges {
        let (a, b) = e.endpoints();
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|v| v.len() > 2) {
        return Err(PathError::Pattern("a vertex would get three path edges".into()));
    }
    if edges.is_empty() {
        return if start == end {
            Ok(Path::new(vec![start]))
        } else {
            Err(PathError::Pattern("no edges".into()))
        };
    }
    let mut out = vec![start];
    let mut prev: Option<Vertex> = None;
    let mut cur = start;
    while cur != end {
        let next = adj
            .get(&cur)
            .and_then(|ns| ns.iter().copied().find(|&w| Some(w) != prev))
            .ok_or_else(|| PathError::Pattern(format!("walk from {start} stops at {cur}")))?;
        prev = Some(cur);
        cur = next;
        out.push(cur);
        if out.len() > edges.len() + 1 {
            return Err(PathError::Pattern("edges contain a cycle".into()));
        }
    }
    if out.len() != edges.len() + 1 {
        return Err(PathError::Pattern("edges do not form a single path".into()));
    }
    Ok(Path::new(out))
}

fn edge_list(paths: &[&Path]) -> Vec<Edge> {
    paths.iter().flat_map(|p| p.edges()).collect()
}

fn remove_edges(edges: &mut Vec<Edge>, drop: &[Edge]) -> Result<(), PathError> {
    for &d in drop {
        let pos = edges.iter().position(|&e| e == d).ok_or(PathError::DropNotOnPath(d))?;
        edges.swap_remove(pos);
    }
    Ok(())
}

/// Absorbs `inserted` into `base`: drops the path edge `drop = u0v0` and joins
/// `u0`, `v0` to the two ends of `inserted` through the `cross` edges.
pub fn splice_cross(base: &Path, inserted: &Path, drop: Edge, cross: (Edge, Edge)) -> Result<Path, PathError> {
    let (Some(start), Some(end)) = (base.start(), base.end()) else {
        return Err(PathError::Pattern("empty base path".into()));
    };
    let (Some(i0), Some(i1)) = (inserted.start(), inserted.end()) else {
        return Err(PathError::Pattern("empty inserted path".into()));
    };
    if !base.contains_edge(drop) {
        return Err(PathError::DropNotOnPath(drop));
    }
    let (u0, v0) = drop.endpoints();
    let ok = |c: Edge, a: Vertex, b: Vertex| c.contains(a) && c.contains(b);
    let joins = (ok(cross.0, u0, i0) && ok(cross.1, v0, i1))
        || (ok(cross.0, u0, i1) && ok(cross.1, v0, i0))
        || (ok(cross.1, u0, i0) && ok(cross.0, v0, i1))
        || (ok(cross.1, u0, i1) && ok(cross.0, v0, i0));
    if !joins {
        return Err(PathError::CrossMismatch);
    }
    let mut edges = edge_list(&[base, inserted]);
    remove_edges(&mut edges, &[drop])?;
    edges.extend([cross.0, cross.1]);
    assemble(start, end, &edges)
}

/// Reroutes `base` around a vertex `u0` whose crossing edge is unusable.
///
/// Drops the path edges `u0v0` and `u0'v0'`, adds the sub-cube edge `u0u0'`,
/// and enters `inserted` (running between the crossing partners of `v0` and
/// `v0'`) through the crossing edges at `v0` and `v0'`. The crossing direction
/// is the one separating `base` from `inserted`.
pub fn splice_detour(
    faults: &FaultSet,
    base: &Path,
    inserted: &Path,
    u0: Vertex,
    v0: Vertex,
    u0p: Vertex,
    v0p: Vertex,
) -> Result<Path, PathError> {
    let (Some(start), Some(end)) = (base.start(), base.end()) else {
        return Err(PathError::Pattern("empty base path".into()));
    };
    let (Some(i0), Some(i1)) = (inserted.start(), inserted.end()) else {
        return Err(PathError::Pattern("empty inserted path".into()));
    };
    let shortcut = Edge::new(u0, u0p)?;
    if faults.contains(shortcut) {
        return Err(PathError::FaultyEdge(shortcut));
    }
    let d1 = Edge::new(u0, v0)?;
    let d2 = Edge::new(u0p, v0p)?;
    let (c1, c2) = if v0.is_adjacent(i0) && v0p.is_adjacent(i1) {
        (Edge::new(v0, i0)?, Edge::new(v0p, i1)?)
    } else if v0.is_adjacent(i1) && v0p.is_adjacent(i0) {
        (Edge::new(v0, i1)?, Edge::new(v0p, i0)?)
    } else {
        return Err(PathError::CrossMismatch);
    };
    let mut edges = edge_list(&[base, inserted]);
    remove_edges(&mut edges, &[d1, d2])?;
    edges.extend([shortcut, c1, c2]);
    assemble(start, end, &edges)
}

/// General absorption: the union of `parts`, minus `dropped`, plus `added`,
/// must form one path from `start` to `end`.
pub fn splice_absorb(
    parts: &[&Path],
    dropped: &[Edge],
    added: &[Edge],
    start: Vertex,
    end: Vertex,
) -> Result<Path, PathError> {
    let mut edges = edge_list(parts);
    remove_edges(&mut edges, dropped)?;
    edges.extend_from_slice(added);
    let path = assemble(start, end, &edges)?;
    let total: usize = parts.iter().map(|p| p.len()).sum();
    if path.len() != total {
        return Err(PathError::Pattern(format!("result has {} vertices, parts have {total}", path.len())));
    }
    Ok(path)
}

/// Picks an edge of `path` for splicing across direction `j`.
///
/// An edge of `must_contain` lying on the path wins outright. Otherwise the
/// first edge from the start is returned whose endpoints avoid `avoid` and
/// whose crossing edges are not in `forbidden_cross`.
pub fn select_path_edge(
    path: &Path,
    j: Dim,
    forbidden_cross: &[Edge],
    avoid: &[Vertex],
    must_contain: &[Edge],
) -> Result<Edge, PathError> {
    if let Some(e) = path.edges().find(|e| must_contain.contains(e)) {
        return Ok(e);
    }
    path.edges()
        .find(|&e| {
            let (a, b) = e.endpoints();
            e.dim() != j
                && !avoid.contains(&a)
                && !avoid.contains(&b)
                && !forbidden_cross.contains(&Edge::along(a, j))
                && !forbidden_cross.contains(&Edge::along(b, j))
        })
        .ok_or(PathError::NoEdge)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn p(items: &[&str]) -> Path {
        Path::new(items.iter().map(|s| v(s)).collect())
    }

    fn e(s: &str) -> Edge {
        s.parse().unwrap()
    }

    #[test]
    fn trivial_hamiltonian_path() {
        let f = FaultSet::new(1).unwrap();
        assert!(verify_hamiltonian_path(&f, v("0"), v("1"), &p(&["0", "1"])).passed());
    }

    #[test]
    fn verifier_reports_each_clause() {
        let f = FaultSet::from_edges(2, [e("00 01")]).unwrap();
        let r = verify_hamiltonian_path(&f, v("00"), v("01"), &p(&["00", "10", "11"]));
        assert!(r.violations.iter().any(|x| matches!(x, Violation::NotSpanning { covered: 3, expected: 4 })));
        assert!(r.to_string().contains("not spanning"));

        let r = verify_hamiltonian_path(&f, v("00"), v("11"), &p(&["00", "01", "11", "10"]));
        assert!(r.to_string().contains("uses faulty edge"));

        let r = verify_hamiltonian_path(&f, v("00"), v("10"), &p(&["00", "10", "11", "10"]));
        assert!(r.to_string().contains("vertex repeated"));

        let r = verify_hamiltonian_path(&f, v("00"), v("01"), &p(&["00", "11", "10", "01"]));
        assert!(r.violations.iter().any(|x| matches!(x, Violation::NotAdjacent(..))));
    }

    #[test]
    fn k_path_checks() {
        let f = FaultSet::new(2).unwrap();
        let pairs = EndpointPairSet::new(vec![(v("00"), v("01")), (v("10"), v("11"))]).unwrap();
        let good = PathSystem::new(vec![p(&["00", "01"]), p(&["10", "11"])]);
        assert!(verify_spanning_k_path(&f, &pairs, &good).passed());
        let shared = PathSystem::new(vec![p(&["00", "01"]), p(&["10", "00", "01", "11"])]);
        assert!(verify_spanning_k_path(&f, &pairs, &shared).to_string().contains("not disjoint"));
        let single = EndpointPairSet::new(vec![(v("00"), v("01"))]).unwrap();
        let path = p(&["00", "10", "11", "01"]);
        assert_eq!(
            verify_spanning_k_path(&f, &single, &PathSystem::new(vec![path.clone()])),
            verify_hamiltonian_path(&f, v("00"), v("01"), &path)
        );
        assert!(EndpointPairSet::new(vec![(v("00"), v("01")), (v("01"), v("11"))]).is_err());
    }

    #[test]
    fn cross_splice_builds_q3_path() {
        // Q^0 = {0xx}, Q^1 = {1xx} along direction 1.
        let base = p(&["000", "001", "011", "010"]);
        let inserted = p(&["101", "111", "110", "100"]);
        let out = splice_cross(&base, &inserted, e("000 001"), (e("000 100"), e("001 101"))).unwrap();
        assert_eq!(out.len(), base.len() + inserted.len());
        let f = FaultSet::new(3).unwrap();
        assert!(verify_hamiltonian_path(&f, v("000"), v("010"), &out).passed());
        assert_eq!(
            splice_cross(&base, &inserted, e("000 001"), (e("000 100"), e("011 111"))),
            Err(PathError::CrossMismatch)
        );
        assert!(matches!(
            splice_cross(&base, &inserted, e("000 010"), (e("000 100"), e("010 110"))),
            Err(PathError::DropNotOnPath(_))
        ));
    }

    #[test]
    fn detour_splice() {
        // Q_4 split along direction 1; the crossing edge at u0 = 0001 is faulty,
        // so the path rotates through u0' = 0101 and enters the other half at
        // v0 = 0011 and v0' = 0100.
        let base = p(&["0000", "0001", "0011", "0010", "0110", "0111", "0101", "0100"]);
        let inserted = p(&["1011", "1010", "1000", "1001", "1101", "1111", "1110", "1100"]);
        let f = FaultSet::from_edges(4, [e("0001 1001")]).unwrap();
        let out = splice_detour(&f, &base, &inserted, v("0001"), v("0011"), v("0101"), v("0100")).unwrap();
        assert_eq!(out.len(), base.len() + inserted.len());
        assert!(verify_hamiltonian_path(&f, v("0000"), v("0100"), &out).passed());

        let faulty = FaultSet::from_edges(4, [e("0001 0101")]).unwrap();
        assert_eq!(
            splice_detour(&faulty, &base, &inserted, v("0001"), v("0011"), v("0101"), v("0100")),
            Err(PathError::FaultyEdge(e("0001 0101")))
        );
    }

    #[test]
    fn selection_rules() {
        let path = p(&["000", "001", "011", "010", "110", "111", "101", "100"]);
        let j = Dim::new(3, 1).unwrap();
        assert_eq!(select_path_edge(&path, j, &[], &[], &[e("011 010")]).unwrap(), e("011 010"));
        assert_eq!(select_path_edge(&path, j, &[], &[], &[]).unwrap(), e("000 001"));
        let got = select_path_edge(&path, j, &[e("000 100")], &[v("011")], &[]).unwrap();
        assert_eq!(got, e("110 111"));
        assert_eq!(
            select_path_edge(&p(&["000", "001"]), j, &[e("000 100")], &[], &[]),
            Err(PathError::NoEdge)
        );
    }

    #[test]
    fn text_forms() {
        let sys = PathSystem::new(vec![p(&["00", "01"]), p(&["10", "11"])]);
        let text = sys.to_string();
        assert_eq!(PathSystem::parse(&text).unwrap(), sys);
        assert_eq!(Path::parse("# c\n00\n01\n").unwrap(), p(&["00", "01"]));
        assert!(matches!(Path::parse("00\n011\n"), Err(PathError::Parse { line: 2, .. })));
    }
}
