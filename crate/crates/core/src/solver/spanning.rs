//! Divide-and-conquer construction of spanning k-paths in `Q_n - F` for the
//! lightly faulted sub-problems the main construction hands out.
//!
//! A cube of dimension at most [`SEARCH_BELOW`] is solved by search. A larger
//! cube is split along a direction; pairs with both ends in one half stay
//! there, pairs split by the direction get one crossing edge each, and a half
//! left without any pair is absorbed into a path edge of the other half.
//! Directions and crossing edges are tried in a fixed order, so the result is
//! deterministic.

use crate::graph::{lift_label, parity, LiveCube};
use crate::solver::search::{find_paths, SearchOutcome};

/// Cubes up to this dimension go straight to search.
pub(crate) const SEARCH_BELOW: u32 = 5;

/// Search nodes granted to one leaf search.
const LEAF_NODE_LIMIT: u64 = 400_000;

/// Crossing-vertex candidates tried per crossing pair.
const CROSS_WIDTH: usize = 4;

/// Path edges tried when absorbing an empty half.
const ABSORB_TRIES: usize = 12;

/// Shared search allowance for one top-level construction.
#[derive(Debug, Clone)]
pub(crate) struct Budget {
    pub nodes_left: u64,
}

impl Budget {
    pub fn new(nodes: u64) -> Budget {
        Budget { nodes_left: nodes }
    }

    pub fn exhausted(&self) -> bool {
        self.nodes_left == 0
    }
}

impl Default for Budget {
    fn default() -> Budget {
        Budget::new(50_000_000)
    }
}

pub(crate) type Paths = Vec<Vec<usize>>;

fn colour(v: usize) -> i32 {
    if parity(v) == 0 {
        1
    } else {
        -1
    }
}

/// White-minus-black count of a path from `a` to `b` that alternates colours.
fn surplus(a: usize, b: usize) -> i32 {
    if a == b {
        colour(a)
    } else {
        (colour(a) + colour(b)) / 2
    }
}

/// Cheap necessary conditions: distinct endpoints, colour balance, degrees.
pub(crate) fn plausible(g: &LiveCube, pairs: &[(usize, usize)]) -> bool {
    if pairs.is_empty() {
        return false;
    }
    let size = g.size();
    let mut role = vec![0u8; size]; // 1 = endpoint of a real path, 2 = one-vertex path
    for &(a, b) in pairs {
        if a >= size || b >= size || role[a] != 0 || role[b] != 0 {
            return false;
        }
        if a == b {
            role[a] = 2;
        } else {
            role[a] = 1;
            role[b] = 1;
        }
    }
    let total: i32 = pairs.iter().map(|&(a, b)| surplus(a, b)).sum();
    if total != 0 {
        return false;
    }
    (0..size).all(|v| match role[v] {
        0 => g.degree(v) >= 2,
        1 => g.degree(v) >= 1,
        _ => true,
    })
}

/// Disjoint paths `a_i -> b_i` covering all of `g`, or `None`.
pub(crate) fn solve(g: &LiveCube, pairs: &[(usize, usize)], budget: &mut Budget) -> Option<Paths> {
    if budget.exhausted() || !plausible(g, pairs) {
        return None;
    }
    if g.n() <= SEARCH_BELOW {
        return leaf(g, pairs, budget);
    }
    let mut dims: Vec<(usize, usize, u32)> = (0..g.n())
        .map(|bit| {
            let (deficient, load) = direction_score(g, pairs, bit);
            (deficient, load, bit)
        })
        .collect();
    dims.sort_unstable();
    for &(_, _, bit) in &dims {
        if let Some(p) = solve_along(g, pairs, bit, budget) {
            return Some(p);
        }
        if budget.exhausted() {
            return None;
        }
    }
    None
}

fn leaf(g: &LiveCube, pairs: &[(usize, usize)], budget: &mut Budget) -> Option<Paths> {
    let limit = LEAF_NODE_LIMIT.min(budget.nodes_left);
    let before = budget.nodes_left;
    let out = find_paths(g, pairs, limit);
    // charge the full limit on exhaustion, a token amount otherwise
    budget.nodes_left = match out {
        SearchOutcome::Exhausted => before - limit,
        _ => before.saturating_sub(1),
    };
    match out {
        SearchOutcome::Found(p) => Some(p),
        _ => None,
    }
}

fn half_degree(g: &LiveCube, v: usize, bit: u32) -> u32 {
    (g.mask(v) & !(1u32 << bit)).count_ones()
}

fn crossing_live(g: &LiveCube, v: usize, bit: u32) -> bool {
    g.mask(v) >> bit & 1 == 1
}

/// (number of non-endpoints that must use their crossing edge, pair imbalance).
fn direction_score(g: &LiveCube, pairs: &[(usize, usize)], bit: u32) -> (usize, usize) {
    let endpoint = endpoint_mask(g.size(), pairs);
    let deficient = (0..g.size()).filter(|&v| !endpoint[v] && half_degree(g, v, bit) < 2).count();
    let mut count = [0usize; 2];
    for &(a, b) in pairs {
        count[a >> bit & 1] += 1;
        count[b >> bit & 1] += 1;
    }
    (deficient, count[0].abs_diff(count[1]))
}

fn endpoint_mask(size: usize, pairs: &[(usize, usize)]) -> Vec<bool> {
    let mut m = vec![false; size];
    for &(a, b) in pairs {
        m[a] = true;
        m[b] = true;
    }
    m
}

/// A pair as seen by one split: segments in each half, in full-cube labels.
#[derive(Debug, Clone, Copy)]
enum Route {
    Stay { side: usize, a: usize, b: usize },
    Cross { a: usize, c: usize, b: usize },
}

fn solve_along(g: &LiveCube, pairs: &[(usize, usize)], bit: u32, budget: &mut Budget) -> Option<Paths> {
    let side = |v: usize| v >> bit & 1;
    let size = g.size();
    let endpoint = endpoint_mask(size, pairs);
    let deficient: Vec<usize> = (0..size).filter(|&v| !endpoint[v] && half_degree(g, v, bit) < 2).collect();
    if deficient.iter().any(|&v| !crossing_live(g, v, bit)) {
        return None;
    }
    // real endpoints stranded in their half must cross at once
    let stranded: Vec<usize> = pairs
        .iter()
        .filter(|(a, b)| a != b)
        .flat_map(|&(a, b)| [a, b])
        .filter(|&v| half_degree(g, v, bit) == 0)
        .collect();

    let crossing: Vec<usize> = (0..pairs.len()).filter(|&i| side(pairs[i].0) != side(pairs[i].1)).collect();
    let mut same_surplus = [0i32; 2];
    for &(a, b) in pairs {
        if side(a) == side(b) {
            same_surplus[side(a)] += surplus(a, b);
        }
    }
    for &v in &stranded {
        let i = pairs.iter().position(|&(a, b)| a == v || b == v).unwrap();
        if !crossing.contains(&i) {
            return None;
        }
    }

    // colour of the side-of-a crossing vertex for each crossing pair
    let k = crossing.len();
    let mut colourings: Vec<Vec<i32>> = Vec::new();
    for mask in 0..1u32 << k {
        let cols: Vec<i32> = (0..k).map(|t| if mask >> t & 1 == 1 { 1 } else { -1 }).collect();
        let mut s0 = same_surplus[0];
        for (t, &i) in crossing.iter().enumerate() {
            let (a, _) = pairs[i];
            if side(a) == 0 {
                s0 += (colour(a) + cols[t]) / 2;
            } else {
                // side-0 segment is (c', b) with colour(c') = -cols[t]
                s0 += (-cols[t] + colour(pairs[i].1)) / 2;
            }
        }
        if s0 == 0 {
            colourings.push(cols);
        }
    }
    if k == 0 {
        colourings.push(Vec::new());
    }

    for cols in colourings {
        let cands: Vec<Vec<usize>> = crossing
            .iter()
            .zip(&cols)
            .map(|(&i, &col)| crossing_candidates(g, pairs, &endpoint, &deficient, bit, i, col))
            .collect();
        if cands.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut choice = vec![0usize; k];
        loop {
            let picked: Vec<usize> = (0..k).map(|t| cands[t][choice[t]]).collect();
            if let Some(p) = try_assignment(g, pairs, bit, &crossing, &picked, &deficient, &stranded, budget) {
                return Some(p);
            }
            if budget.exhausted() || !advance(&mut choice, &cands) {
                break;
            }
        }
    }
    None
}

/// Odometer over candidate indices; false once every combination was visited.
fn advance(choice: &mut [usize], cands: &[Vec<usize>]) -> bool {
    for t in (0..choice.len()).rev() {
        if choice[t] + 1 < cands[t].len() {
            choice[t] += 1;
            for later in choice.iter_mut().skip(t + 1) {
                *later = 0;
            }
            return true;
        }
    }
    false
}

/// Crossing vertices `c` (in the half of `a`) of the requested colour, best first.
fn crossing_candidates(
    g: &LiveCube,
    pairs: &[(usize, usize)],
    endpoint: &[bool],
    deficient: &[usize],
    bit: u32,
    i: usize,
    col: i32,
) -> Vec<usize> {
    let (a, b) = pairs[i];
    let flip = 1usize << bit;
    let usable = |c: usize| {
        colour(c) == col
            && crossing_live(g, c, bit)
            && (c == a || !endpoint[c])
            && (c ^ flip == b || !endpoint[c ^ flip])
            && !(c == a && c ^ flip == b && false)
    };
    let mut out: Vec<usize> = Vec::new();
    let push = |c: usize, out: &mut Vec<usize>| {
        if usable(c) && !out.contains(&c) {
            out.push(c);
        }
    };
    for &d in deficient {
        if (d >> bit & 1) == (a >> bit & 1) {
            push(d, &mut out);
        } else {
            push(d ^ flip, &mut out);
        }
    }
    push(a, &mut out);
    push(b ^ flip, &mut out);
    for w in g.neighbors(a).filter(|&w| w != a ^ flip) {
        push(w, &mut out);
    }
    for w in g.neighbors(b).filter(|&w| w != b ^ flip) {
        push(w ^ flip, &mut out);
    }
    let limit = CROSS_WIDTH.max(out.len().min(CROSS_WIDTH + deficient.len()));
    if out.len() < limit {
        let half = a & flip;
        for c in (0..g.size()).filter(|&c| c & flip == half) {
            push(c, &mut out);
            if out.len() >= limit {
                break;
            }
        }
    }
    out.truncate(limit);
    out
}

#[allow(clippy::too_many_arguments)]
fn try_assignment(
    g: &LiveCube,
    pairs: &[(usize, usize)],
    bit: u32,
    crossing: &[usize],
    picked: &[usize],
    deficient: &[usize],
    stranded: &[usize],
    budget: &mut Budget,
) -> Option<Paths> {
    let flip = 1usize << bit;
    let side = |v: usize| v >> bit & 1;
    // crossing edges must be vertex-disjoint
    let mut used: Vec<usize> = Vec::new();
    for &c in picked {
        if used.contains(&c) || used.contains(&(c ^ flip)) {
            return None;
        }
        used.extend([c, c ^ flip]);
    }
    if deficient.iter().any(|d| !used.contains(d)) {
        let covered_later = picked.is_empty();
        if !covered_later {
            return None;
        }
    }
    for &v in stranded {
        // an endpoint without edges in its half is its own crossing vertex
        if !used.contains(&v) {
            return None;
        }
    }
    let routes: Vec<Route> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| match crossing.iter().position(|&x| x == i) {
            Some(t) => Route::Cross { a, c: picked[t], b },
            None => Route::Stay { side: side(a), a, b },
        })
        .collect();

    let mut side_pairs: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
    for r in &routes {
        match *r {
            Route::Stay { side, a, b } => side_pairs[side].push((a, b)),
            Route::Cross { a, c, b } => {
                side_pairs[side(a)].push((a, c));
                side_pairs[side(b)].push((c ^ flip, b));
            }
        }
    }
    let to_half = |v: usize| crate::graph::drop_label(v, bit);
    let halves = [g.half(bit, 0), g.half(bit, 1)];
    let local = |s: usize| -> Vec<(usize, usize)> { side_pairs[s].iter().map(|&(a, b)| (to_half(a), to_half(b))).collect() };

    let mut solved: [Option<Paths>; 2] = [None, None];
    let empty: Vec<usize> = (0..2).filter(|&s| side_pairs[s].is_empty()).collect();
    match empty.as_slice() {
        [] => {
            if deficient.iter().any(|d| !used.contains(d)) {
                return None;
            }
            for s in 0..2 {
                let p = solve(&halves[s], &local(s), budget)?;
                solved[s] = Some(p);
            }
        }
        [e] => {
            let full = 1 - e;
            let e = *e;
            if deficient.iter().any(|&d| side(d) == full && !used.contains(&d)) {
                return None;
            }
            let p = solve(&halves[full], &local(full), budget)?;
            let must: Vec<usize> = deficient.iter().copied().filter(|&d| side(d) == e).map(to_half).collect();
            if must.len() > 2 {
                return None;
            }
            let (absorbed, inner) = absorb(&halves[e], &p, bit, g, full, &must, budget)?;
            return Some(stitch_absorbed(&p, absorbed, inner, bit, full as u8, e as u8, &routes, pairs));
        }
        _ => return None,
    }
    let [Some(p0), Some(p1)] = solved else { return None };
    Some(stitch(&[p0, p1], &side_pairs, bit, &routes, pairs))
}

/// Finds a path edge `uv` of `paths` (in half `full`) whose crossing partners
/// admit a Hamiltonian path of the empty half. Returns the path index, the
/// edge position, and the inner path (half-local labels).
fn absorb(
    empty_half: &LiveCube,
    paths: &Paths,
    bit: u32,
    g: &LiveCube,
    full: usize,
    must: &[usize],
    budget: &mut Budget,
) -> Option<((usize, usize), Vec<usize>)> {
    let mut tries = 0;
    for (pi, p) in paths.iter().enumerate() {
        for pos in 0..p.len().saturating_sub(1) {
            let (u, v) = (p[pos], p[pos + 1]);
            let (ug, vg) = (lift_label(u, bit, full as u8), lift_label(v, bit, full as u8));
            if !crossing_live(g, ug, bit) || !crossing_live(g, vg, bit) {
                continue;
            }
            if must.iter().any(|&m| m != u && m != v) {
                continue;
            }
            tries += 1;
            if let Some(mut inner) = solve(empty_half, &[(u, v)], budget) {
                return Some(((pi, pos), inner.pop().unwrap()));
            }
            if tries >= ABSORB_TRIES || budget.exhausted() {
                return None;
            }
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn stitch_absorbed(
    paths: &Paths,
    (pi, pos): (usize, usize),
    inner: Vec<usize>,
    bit: u32,
    full: u8,
    empty: u8,
    routes: &[Route],
    pairs: &[(usize, usize)],
) -> Paths {
    let lifted: Paths = paths
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut out: Vec<usize> = Vec::with_capacity(p.len() + if i == pi { inner.len() } else { 0 });
            for (t, &v) in p.iter().enumerate() {
                out.push(lift_label(v, bit, full));
                if i == pi && t == pos {
                    out.extend(inner.iter().map(|&w| lift_label(w, bit, empty)));
                }
            }
            out
        })
        .collect();
    // with an empty half there are no crossing pairs: paths map one-to-one
    debug_assert!(routes.iter().all(|r| matches!(r, Route::Stay { .. })));
    debug_assert_eq!(lifted.len(), pairs.len());
    lifted
}

fn stitch(
    solved: &[Paths; 2],
    side_pairs: &[Vec<(usize, usize)>; 2],
    bit: u32,
    routes: &[Route],
    pairs: &[(usize, usize)],
) -> Paths {
    let flip = 1usize << bit;
    let side = |v: usize| v >> bit & 1;
    let find = |s: usize, a: usize, b: usize| -> Vec<usize> {
        let idx = side_pairs[s].iter().position(|&p| p == (a, b)).expect("segment was assigned");
        solved[s][idx].iter().map(|&v| lift_label(v, bit, s as u8)).collect()
    };
    let out: Paths = routes
        .iter()
        .map(|r| match *r {
            Route::Stay { side: s, a, b } => find(s, a, b),
            Route::Cross { a, c, b } => {
                let mut first = find(side(a), a, c);
                first.extend(find(side(b), c ^ flip, b));
                first
            }
        })
        .collect();
    debug_assert_eq!(out.len(), pairs.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn check(g: &LiveCube, pairs: &[(usize, usize)], paths: &Paths) {
        let mut seen = vec![false; g.size()];
        assert_eq!(paths.len(), pairs.len());
        for (p, &(a, b)) in paths.iter().zip(pairs) {
            assert_eq!((p[0], *p.last().unwrap()), (a, b));
            for w in p.windows(2) {
                assert!(g.is_live(w[0], w[1]), "{} {}", w[0], w[1]);
            }
            for &v in p {
                assert!(!seen[v], "vertex {v} repeated");
                seen[v] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn hamiltonian_paths_in_q7() {
        let g = LiveCube::full(7);
        for (x, y) in [(0, 1), (0, 127), (5, 7), (100, 3)] {
            let mut b = Budget::default();
            let p = solve(&g, &[(x, y)], &mut b).expect("path");
            check(&g, &[(x, y)], &p);
        }
    }

    #[test]
    fn two_paths_with_faults_in_q6() {
        let mut g = LiveCube::full(6);
        g.kill(0, 2);
        g.kill(9, 13);
        g.kill(40, 41);
        let pairs = [(0, 7), (21, 60)];
        let mut b = Budget::default();
        let p = solve(&g, &pairs, &mut b).expect("2-path");
        check(&g, &pairs, &p);
    }

    #[test]
    fn rejects_unbalanced() {
        let g = LiveCube::full(6);
        let mut b = Budget::default();
        assert!(solve(&g, &[(0, 3)], &mut b).is_none());
    }
}
