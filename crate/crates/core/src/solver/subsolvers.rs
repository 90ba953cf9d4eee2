//! Spanning-path capabilities used by the main construction.
//!
//! The fault-free Hamiltonian path is built by the classic halving
//! recursion. The others run the divide-and-conquer search of
//! [`spanning`](super::spanning) on a dense copy of the cube.

use crate::cube::{Edge, Vertex};
use crate::fault::FaultSet;
use crate::graph::{drop_label, lift_label, LiveCube, DENSE_MAX_DIM};
use crate::path::{verify_paths, EndpointPairSet, Path, PathSystem};

use super::spanning::{self, Budget};
use super::SolveError;

pub(crate) fn dense(faults: &FaultSet) -> Result<LiveCube, SolveError> {
    if faults.cube_dim() > DENSE_MAX_DIM {
        return Err(SolveError::ContractViolation(format!(
            "n = {} exceeds the largest supported dimension {DENSE_MAX_DIM}",
            faults.cube_dim()
        )));
    }
    Ok(LiveCube::from_faults(faults))
}

pub(crate) fn to_path(n: u32, labels: &[usize]) -> Path {
    Path::new(labels.iter().map(|&v| Vertex::from_raw(n, v as u64)).collect())
}

fn label(v: Vertex) -> usize {
    v.label() as usize
}

fn same_cube(n: u32, vs: &[Vertex]) -> Result<(), SolveError> {
    match vs.iter().find(|v| v.cube_dim() != n) {
        Some(v) => Err(SolveError::ContractViolation(format!("vertex {v} is not in Q_{n}"))),
        None => Ok(()),
    }
}

/// Hamiltonian path of the fault-free `Q_n` between labels of opposite parity.
pub(crate) fn fault_free_labels(n: u32, x: usize, y: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(1 << n);
    fault_free_into(n, x, y, &mut out);
    out
}

fn fault_free_into(n: u32, x: usize, y: usize, out: &mut Vec<usize>) {
    if n == 1 {
        out.extend([x, y]);
        return;
    }
    let bit = (x ^ y).trailing_zeros();
    let side = ((x >> bit) & 1) as u8;
    let (xs, ys) = (drop_label(x, bit), drop_label(y, bit));
    let r = xs ^ 1;
    let start = out.len();
    fault_free_into(n - 1, xs, r, out);
    let mid = out.len();
    fault_free_into(n - 1, r, ys, out);
    for v in &mut out[start..mid] {
        *v = lift_label(*v, bit, side);
    }
    for v in &mut out[mid..] {
        *v = lift_label(*v, bit, 1 - side);
    }
}

/// Hamiltonian path of the fault-free `Q_n` from `x` to `y`.
pub fn ham_path_fault_free(n: u32, x: Vertex, y: Vertex) -> Result<Path, SolveError> {
    same_cube(n, &[x, y])?;
    if n > DENSE_MAX_DIM {
        return Err(SolveError::ContractViolation(format!("n = {n} is too large to enumerate")));
    }
    if x.parity() == y.parity() {
        return Err(SolveError::SameParity(x, y));
    }
    Ok(to_path(n, &fault_free_labels(n, label(x), label(y))))
}

/// Runs the spanning search and converts the result back to vertices.
pub(crate) fn dense_system(
    g: &LiveCube,
    pairs: &[(Vertex, Vertex)],
    budget: &mut Budget,
) -> Result<Vec<Path>, SolveError> {
    let raw: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (label(a), label(b))).collect();
    let paths = spanning::solve(g, &raw, budget).ok_or(SolveError::NotFound)?;
    Ok(paths.iter().map(|p| to_path(g.n(), p)).collect())
}

fn checked(faults: &FaultSet, pairs: &[(Vertex, Vertex)], paths: Vec<Path>) -> Result<Vec<Path>, SolveError> {
    let report = verify_paths(faults, pairs, &paths);
    if report.passed() {
        Ok(paths)
    } else {
        Err(SolveError::ConstructionFailed { reason: report.to_string(), trace: Default::default() })
    }
}

/// Hamiltonian path of `Q_n` from `x` to `y` that uses the edge `f`.
pub fn ham_path_through_edge(n: u32, f: Edge, x: Vertex, y: Vertex) -> Result<Path, SolveError> {
    same_cube(n, &[x, y])?;
    if f.cube_dim() != n {
        return Err(SolveError::ContractViolation(format!("edge {f} is not in Q_{n}")));
    }
    if n < 2 {
        return Err(SolveError::ContractViolation("the prescribed-edge path needs n >= 2".into()));
    }
    if x.parity() == y.parity() {
        return Err(SolveError::SameParity(x, y));
    }
    if f.contains(x) && f.contains(y) {
        return Err(SolveError::ContractViolation(format!("the prescribed edge {f} joins the two ends")));
    }
    let faults = FaultSet::new(n).expect("valid dimension");
    let g = dense(&faults)?;
    let (a, b) = f.endpoints();
    let mut budget = Budget::default();
    for (p, q) in [(a, b), (b, a)] {
        // x .. p, the edge pq, then q .. y
        let pairs = [(x, p), (q, y)];
        if let Ok(parts) = dense_system(&g, &pairs, &mut budget) {
            let mut vs = parts[0].vertices().to_vec();
            vs.extend_from_slice(parts[1].vertices());
            return Ok(Path::new(vs));
        }
    }
    Err(SolveError::NotFound)
}

/// Hamiltonian path of `Q_n - f` from `x` to `y`.
pub fn ham_path_avoiding_edge(n: u32, f: Edge, x: Vertex, y: Vertex) -> Result<Path, SolveError> {
    same_cube(n, &[x, y])?;
    if f.cube_dim() != n {
        return Err(SolveError::ContractViolation(format!("edge {f} is not in Q_{n}")));
    }
    if n < 3 {
        return Err(SolveError::ContractViolation("a path avoiding one edge needs n >= 3".into()));
    }
    if x.parity() == y.parity() {
        return Err(SolveError::SameParity(x, y));
    }
    let faults = FaultSet::from_edges(n, [f]).expect("one valid edge");
    let g = dense(&faults)?;
    let pairs = [(x, y)];
    let paths = dense_system(&g, &pairs, &mut Budget::default())?;
    Ok(checked(&faults, &pairs, paths)?.remove(0))
}

/// Spanning 2-path `P_uv + P_xy` of `Q_n - F` for `|F| <= 2n - 7`.
///
/// With `edge_if_adjacent` and `F` empty, adjacent `u`, `v` are joined by
/// their edge alone.
pub fn spanning_2path(
    faults: &FaultSet,
    (u, v): (Vertex, Vertex),
    (x, y): (Vertex, Vertex),
    edge_if_adjacent: bool,
) -> Result<PathSystem, SolveError> {
    let n = faults.cube_dim();
    same_cube(n, &[u, v, x, y])?;
    let pairs = EndpointPairSet::new(vec![(u, v), (x, y)])
        .map_err(|e| SolveError::ContractViolation(e.to_string()))?;
    if !pairs.is_balanced() {
        return Err(SolveError::ContractViolation("endpoint set is not balanced".into()));
    }
    if faults.is_empty() {
        if n < 2 {
            return Err(SolveError::ContractViolation("a 2-path needs n >= 2".into()));
        }
    } else {
        if n < 4 {
            return Err(SolveError::ContractViolation("a 2-path with faults needs n >= 4".into()));
        }
        if faults.len() as i64 > 2 * i64::from(n) - 7 {
            return Err(SolveError::ContractViolation(format!(
                "|F| = {} exceeds 2n-7 = {}",
                faults.len(),
                2 * i64::from(n) - 7
            )));
        }
    }
    let mut g = dense(faults)?;
    let forced = edge_if_adjacent && faults.is_empty() && u.is_adjacent(v);
    if forced {
        // isolate uv so the search can only use the edge itself
        for end in [u, v] {
            for w in g.neighbors(label(end)).collect::<Vec<_>>() {
                if w != label(u) && w != label(v) {
                    g.kill(label(end), w);
                }
            }
        }
    }
    let list = [(u, v), (x, y)];
    let paths = dense_system(&g, &list, &mut Budget::default())?;
    Ok(PathSystem::new(checked(faults, &list, paths)?))
}

/// Fault-free spanning k-path for a balanced pair set with
/// `2k - (adjacent pairs) < n`.
pub fn spanning_k_path(n: u32, pairs: &EndpointPairSet) -> Result<PathSystem, SolveError> {
    let list = pairs.pairs();
    let flat: Vec<Vertex> = list.iter().flat_map(|&(a, b)| [a, b]).collect();
    same_cube(n, &flat)?;
    if !pairs.is_balanced() {
        return Err(SolveError::ContractViolation("endpoint set is not balanced".into()));
    }
    let lhs = 2 * pairs.len() as i64 - pairs.adjacent_pairs() as i64;
    if lhs >= i64::from(n) {
        return Err(SolveError::ConditionViolated(format!(
            "2k - |adjacent pairs| = {lhs} is not below n = {n}"
        )));
    }
    let faults = FaultSet::new(n).expect("valid dimension");
    if let [(a, b)] = list {
        return Ok(PathSystem::new(vec![ham_path_fault_free(n, *a, *b)?]));
    }
    let g = dense(&faults)?;
    let paths = dense_system(&g, list, &mut Budget::default())?;
    Ok(PathSystem::new(checked(&faults, list, paths)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{verify_hamiltonian_path, verify_spanning_k_path};

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    #[test]
    fn fault_free_all_pairs_q5() {
        let empty = FaultSet::new(5).unwrap();
        for x in Vertex::all(5) {
            for y in Vertex::all(5).filter(|y| y.parity() != x.parity()) {
                let p = ham_path_fault_free(5, x, y).unwrap();
                assert!(verify_hamiltonian_path(&empty, x, y, &p).passed(), "{x} {y}");
            }
        }
        assert_eq!(ham_path_fault_free(1, v("0"), v("1")).unwrap().vertices(), &[v("0"), v("1")]);
        assert!(matches!(ham_path_fault_free(3, v("000"), v("011")), Err(SolveError::SameParity(..))));
    }

    #[test]
    fn through_edge_square() {
        let f: Edge = "01 11".parse().unwrap();
        let p = ham_path_through_edge(2, f, v("00"), v("10")).unwrap();
        assert_eq!(p.vertices(), &[v("00"), v("01"), v("11"), v("10")]);
        let xy: Edge = "00 01".parse().unwrap();
        assert!(ham_path_through_edge(2, xy, v("00"), v("01")).is_err());
    }

    #[test]
    fn avoiding_edge_exhaustive_q3() {
        for f in crate::cube::all_edges(3) {
            let faults = FaultSet::from_edges(3, [f]).unwrap();
            for x in Vertex::all(3) {
                for y in Vertex::all(3).filter(|y| y.parity() != x.parity()) {
                    let p = ham_path_avoiding_edge(3, f, x, y).unwrap();
                    assert!(verify_hamiltonian_path(&faults, x, y, &p).passed());
                }
            }
        }
        assert!(ham_path_avoiding_edge(2, "00 01".parse().unwrap(), v("00"), v("10")).is_err());
    }

    #[test]
    fn two_path_edge_option() {
        let empty = FaultSet::new(4).unwrap();
        let sys = spanning_2path(&empty, (v("0000"), v("0001")), (v("0011"), v("0111")), true).unwrap();
        assert_eq!(sys.paths[0].vertices(), &[v("0000"), v("0001")]);
        let pairs = EndpointPairSet::new(vec![(v("0000"), v("0001")), (v("0011"), v("0111"))]).unwrap();
        assert!(verify_spanning_k_path(&empty, &pairs, &sys).passed());
        assert!(spanning_2path(&empty, (v("0000"), v("0011")), (v("0101"), v("0110")), false).is_err());
    }

    #[test]
    fn k_path_gate() {
        let ok = EndpointPairSet::new(vec![(v("00000"), v("00111")), (v("11000"), v("11111"))]).unwrap();
        assert!(spanning_k_path(5, &ok).is_ok());
        let bad = EndpointPairSet::new(vec![(v("0000"), v("0111")), (v("1000"), v("1111"))]).unwrap();
        assert!(matches!(spanning_k_path(4, &bad), Err(SolveError::ConditionViolated(_))));
    }
}
