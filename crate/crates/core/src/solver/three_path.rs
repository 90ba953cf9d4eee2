//! Spanning 3-path `P_uv + P_xy + P_wz` of `Q_n - f`.
//!
//! The cube is split so that `uv` and `f` fall into different halves. `P_uv`
//! stays in the half of `uv`; each of the other pairs either stays in one
//! half or crosses once through a vertex next to its end in the `uv` half.
//! When the half of `f` receives no pair it is absorbed into an edge of the
//! longest path in the other half.

use crate::cube::{Dim, Edge, Vertex};
use crate::fault::FaultSet;
use crate::graph::{drop_label, lift_label, parity, LiveCube};
use crate::path::{verify_paths, Path, PathSystem};

use super::spanning::{self, Budget, Paths};
use super::subsolvers::{dense, to_path};
use super::SolveError;

/// How the 3-path was put together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreePathPlan {
    /// One pair in each half, `P_uv` beside one of them.
    Separate,
    /// At least one pair crosses between the halves.
    Crossing,
    /// Both pairs in the half of `f`; `P_uv` covers the other half.
    FaultSideHoldsBoth,
    /// All three pairs in the half of `uv`; the half of `f` is absorbed.
    EdgeSideHoldsAll,
    /// No split plan worked; direct search on the whole cube.
    Fallback,
}

/// Builds the spanning 3-path and returns it with the plan that produced it.
/// Paths are returned in the order `P_uv`, `P_xy`, `P_wz`.
pub fn spanning_3path_minus_edge(
    n: u32,
    f: Edge,
    uv: Edge,
    (x, y): (Vertex, Vertex),
    (w, z): (Vertex, Vertex),
) -> Result<(PathSystem, ThreePathPlan), SolveError> {
    let bad = |m: String| Err(SolveError::ContractViolation(m));
    if n < 5 {
        return bad("the 3-path construction needs n >= 5".into());
    }
    if f.cube_dim() != n || uv.cube_dim() != n || [x, y, w, z].iter().any(|v| v.cube_dim() != n) {
        return bad(format!("all inputs must lie in Q_{n}"));
    }
    if f.touches(uv) {
        return bad(format!("edges {f} and {uv} share a vertex"));
    }
    let (u, v) = uv.endpoints();
    let ends = [u, v, x, y, w, z];
    for i in 0..ends.len() {
        for k in i + 1..ends.len() {
            if ends[i] == ends[k] {
                return bad(format!("endpoint {} appears twice", ends[i]));
            }
        }
    }
    if x.parity() == y.parity() {
        return Err(SolveError::SameParity(x, y));
    }
    if w.parity() == z.parity() {
        return Err(SolveError::SameParity(w, z));
    }

    let faults = FaultSet::from_edges(n, [f]).expect("one valid edge");
    let g = dense(&faults)?;
    let lab = |t: Vertex| t.label() as usize;
    let pairs = [(lab(u), lab(v)), (lab(x), lab(y)), (lab(w), lab(z))];
    let mut budget = Budget::default();

    let (ua, _) = uv.endpoints();
    let (fa, _) = f.endpoints();
    let dims: Vec<Dim> = Dim::all(n)
        .filter(|&j| j != uv.dim() && j != f.dim() && ua.coord(j) != fa.coord(j))
        .collect();
    let mut found: Option<(Paths, ThreePathPlan)> = None;
    for j in dims {
        let bit = j.bit(n);
        if let Some(hit) = along(&g, &pairs, bit, &mut budget) {
            found = Some(hit);
            break;
        }
    }
    if found.is_none() {
        found = spanning::solve(&g, &pairs, &mut budget).map(|p| (p, ThreePathPlan::Fallback));
    }
    let (raw, plan) = found.ok_or(SolveError::NotFound)?;
    let paths: Vec<Path> = raw.iter().map(|p| to_path(n, p)).collect();
    let list = [(u, v), (x, y), (w, z)];
    let report = verify_paths(&faults, &list, &paths);
    if !report.passed() {
        return Err(SolveError::ConstructionFailed { reason: report.to_string(), trace: Default::default() });
    }
    Ok((PathSystem::new(paths), plan))
}

#[derive(Clone, Copy)]
enum Place {
    Stay(usize),
    /// `(end in the uv half, end in the other half, pair was given reversed)`
    Cross(usize, usize, bool),
}

fn along(g: &LiveCube, pairs: &[(usize, usize); 3], bit: u32, budget: &mut Budget) -> Option<(Paths, ThreePathPlan)> {
    let side = |t: usize| (t >> bit) & 1;
    let flip = 1usize << bit;
    let e = side(pairs[0].0);
    let other = 1 - e;
    let places: Vec<Place> = pairs[1..]
        .iter()
        .map(|&(a, b)| match (side(a) == e, side(b) == e) {
            (true, true) => Place::Stay(e),
            (false, false) => Place::Stay(other),
            (true, false) => Place::Cross(a, b, false),
            (false, true) => Place::Cross(b, a, true),
        })
        .collect();
    let endpoints: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let crossing: Vec<usize> = places
        .iter()
        .filter_map(|p| match p {
            Place::Cross(a, _, _) => Some(*a),
            _ => None,
        })
        .collect();

    // crossing vertices: neighbors of the end first, then any vertex of the right colour
    let candidates = |a: usize| -> Vec<usize> {
        let mut out: Vec<usize> = g
            .neighbors(a)
            .filter(|&c| side(c) == e)
            .chain((0..g.size()).filter(|&c| side(c) == e && parity(c) != parity(a)))
            .filter(|&c| !endpoints.contains(&c) && !endpoints.contains(&(c ^ flip)) && g.is_live(c, c ^ flip))
            .collect();
        out.dedup();
        let mut seen = Vec::new();
        out.retain(|c| {
            let fresh = !seen.contains(c);
            seen.push(*c);
            fresh
        });
        out.truncate(6);
        out
    };
    let cand: Vec<Vec<usize>> = crossing.iter().map(|&a| candidates(a)).collect();
    let combos: Vec<Vec<usize>> = match cand.as_slice() {
        [] => vec![vec![]],
        [c0] => c0.iter().map(|&c| vec![c]).collect(),
        [c0, c1] => c0
            .iter()
            .flat_map(|&a| c1.iter().filter(move |&&b| b != a).map(move |&b| vec![a, b]))
            .take(12)
            .collect(),
        _ => unreachable!(),
    };
    let plan = if !crossing.is_empty() {
        ThreePathPlan::Crossing
    } else {
        match (places[0], places[1]) {
            (Place::Stay(s), Place::Stay(t)) if s == e && t == e => ThreePathPlan::EdgeSideHoldsAll,
            (Place::Stay(s), Place::Stay(t)) if s == other && t == other => ThreePathPlan::FaultSideHoldsBoth,
            _ => ThreePathPlan::Separate,
        }
    };
    let halves = [g.half(bit, 0), g.half(bit, 1)];
    let local = |t: usize| drop_label(t, bit);

    for chosen in combos {
        let mut side_pairs: [Vec<(usize, usize)>; 2] = Default::default();
        side_pairs[e].push(pairs[0]);
        let mut t = 0;
        for (k, place) in places.iter().enumerate() {
            match *place {
                Place::Stay(s) => side_pairs[s].push(pairs[k + 1]),
                Place::Cross(a, b, _) => {
                    let c = chosen[t];
                    t += 1;
                    side_pairs[e].push((a, c));
                    side_pairs[other].push((c ^ flip, b));
                }
            }
        }
        let to_local = |list: &[(usize, usize)]| -> Vec<(usize, usize)> {
            list.iter().map(|&(a, b)| (local(a), local(b))).collect()
        };
        let Some(sol_e) = spanning::solve(&halves[e], &to_local(&side_pairs[e]), budget) else {
            continue;
        };
        let lift_e: Paths = sol_e.iter().map(|p| p.iter().map(|&t| lift_label(t, bit, e as u8)).collect()).collect();
        let lift_o: Paths;
        let mut absorbed: Option<(usize, usize, Vec<usize>)> = None;
        if side_pairs[other].is_empty() {
            // the longest path gives up one edge to the other half
            let longest = (0..lift_e.len()).max_by_key(|&i| (lift_e[i].len(), usize::MAX - i)).unwrap();
            let p = &lift_e[longest];
            let mut done = None;
            for pos in 0..p.len() - 1 {
                let (s0, r0) = (p[pos], p[pos + 1]);
                if !g.is_live(s0, s0 ^ flip) || !g.is_live(r0, r0 ^ flip) {
                    continue;
                }
                let inner = [(local(s0 ^ flip), local(r0 ^ flip))];
                if let Some(mut sol) = spanning::solve(&halves[other], &inner, budget) {
                    let lifted = sol.pop().unwrap().into_iter().map(|t| lift_label(t, bit, other as u8)).collect();
                    done = Some((longest, pos, lifted));
                    break;
                }
                if pos >= 8 {
                    break;
                }
            }
            let Some(hit) = done else { continue };
            absorbed = Some(hit);
            lift_o = Vec::new();
        } else {
            let Some(sol_o) = spanning::solve(&halves[other], &to_local(&side_pairs[other]), budget) else {
                continue;
            };
            lift_o = sol_o.iter().map(|p| p.iter().map(|&t| lift_label(t, bit, other as u8)).collect()).collect();
        }

        let find = |list: &Paths, owner: &[(usize, usize)], a: usize, b: usize| -> Vec<usize> {
            let i = owner.iter().position(|&q| q == (a, b)).expect("segment assigned");
            list[i].clone()
        };
        let mut out: Paths = Vec::with_capacity(3);
        let mut uv_path = find(&lift_e, &side_pairs[e], pairs[0].0, pairs[0].1);
        let mut t = 0;
        let mut rest: Paths = Vec::new();
        for (k, place) in places.iter().enumerate() {
            let (a, b) = pairs[k + 1];
            let path = match *place {
                Place::Stay(s) if s == e => find(&lift_e, &side_pairs[e], a, b),
                Place::Stay(_) => find(&lift_o, &side_pairs[other], a, b),
                Place::Cross(ae, bo, rev) => {
                    let c = chosen[t];
                    t += 1;
                    let mut p = find(&lift_e, &side_pairs[e], ae, c);
                    p.extend(find(&lift_o, &side_pairs[other], c ^ flip, bo));
                    if rev {
                        p.reverse();
                    }
                    p
                }
            };
            rest.push(path);
        }
        if let Some((longest, pos, inner)) = absorbed {
            // side_pairs[e] lists uv first, then the stay pairs in order
            let target = if longest == 0 { &mut uv_path } else { &mut rest[longest - 1] };
            let tail = target.split_off(pos + 1);
            target.extend(inner);
            target.extend(tail);
        }
        out.push(uv_path);
        out.extend(rest);
        return Some((out, plan));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{verify_spanning_k_path, EndpointPairSet};

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn e(s: &str) -> Edge {
        s.parse().unwrap()
    }

    fn run(f: &str, uv: &str, xy: (&str, &str), wz: (&str, &str)) -> ThreePathPlan {
        let (f, uv) = (e(f), e(uv));
        let (x, y, w, z) = (v(xy.0), v(xy.1), v(wz.0), v(wz.1));
        let n = x.cube_dim();
        let (sys, plan) = spanning_3path_minus_edge(n, f, uv, (x, y), (w, z)).unwrap();
        let (u, vv) = uv.endpoints();
        let pairs = EndpointPairSet::new(vec![(u, vv), (x, y), (w, z)]).unwrap();
        let faults = FaultSet::from_edges(n, [f]).unwrap();
        assert!(verify_spanning_k_path(&faults, &pairs, &sys).passed());
        plan
    }

    #[test]
    fn pairs_on_the_fault_side() {
        // f in the half with first coordinate 1, uv in the other
        let plan = run("10000 10001", "00000 00001", ("11000", "11100"), ("10110", "10010"));
        assert_eq!(plan, ThreePathPlan::FaultSideHoldsBoth);
    }

    #[test]
    fn every_layout() {
        assert_eq!(run("10000 10001", "00000 00001", ("00110", "00111"), ("11000", "11100")), ThreePathPlan::Separate);
        assert_eq!(run("10000 10001", "00000 00001", ("00110", "11001"), ("01000", "11110")), ThreePathPlan::Crossing);
        assert_eq!(
            run("10000 10001", "00000 00001", ("00110", "00111"), ("01000", "01100")),
            ThreePathPlan::EdgeSideHoldsAll
        );
    }

    #[test]
    fn rejects_overlap() {
        let r = spanning_3path_minus_edge(5, e("10000 10001"), e("00000 00001"), (v("00000"), v("00011")), (v("01000"), v("01100")));
        assert!(matches!(r, Err(SolveError::ContractViolation(_))));
    }
}
