//! Pruned backtracking for spanning k-paths in cubes of at most 64 vertices.
//!
//! Paths are grown one after another from `a_i` until they reach `b_i`.
//! Pruning per node: every free non-endpoint vertex keeps two usable
//! neighbors, every pending endpoint keeps one, the white/black surplus of
//! the free vertices matches what the remaining paths can absorb, and every
//! free vertex is reachable from a live path end. A free vertex whose only
//! other usable neighbor is the current head forces the next move.

use crate::graph::LiveCube;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SearchOutcome {
    Found(Vec<Vec<usize>>),
    Absent,
    Exhausted,
}

pub(crate) const SEARCH_MAX_DIM: u32 = 6;

struct Search<'a> {
    pairs: &'a [(usize, usize)],
    nbr: Vec<u64>,
    white: u64,
    // endpoints of pairs strictly after index i
    later_endpoints: Vec<u64>,
    // white-minus-black contribution of pairs strictly after index i
    later_surplus: Vec<i32>,
    later_starts: Vec<u64>,
    trivial: u64,
    nodes: u64,
    limit: u64,
    exhausted: bool,
    stack: Vec<usize>,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

fn surplus(white: u64, a: usize, b: usize) -> i32 {
    let c = |v: usize| if white >> v & 1 == 1 { 1 } else { -1 };
    if a == b {
        c(a)
    } else {
        (c(a) + c(b)) / 2
    }
}

impl<'a> Search<'a> {
    fn new(g: &LiveCube, pairs: &'a [(usize, usize)], limit: u64) -> Search<'a> {
        let size = g.size();
        let nbr: Vec<u64> = (0..size)
            .map(|v| g.neighbors(v).fold(0u64, |m, w| m | 1u64 << w))
            .collect();
        let white = (0..size).filter(|&v| v.count_ones() % 2 == 0).fold(0u64, |m, v| m | 1u64 << v);
        let k = pairs.len();
        let mut later_endpoints = vec![0u64; k];
        let mut later_surplus = vec![0i32; k];
        let mut later_starts = vec![0u64; k];
        for i in (0..k.saturating_sub(1)).rev() {
            let (a, b) = pairs[i + 1];
            later_endpoints[i] = later_endpoints[i + 1] | 1u64 << a | 1u64 << b;
            later_surplus[i] = later_surplus[i + 1] + surplus(white, a, b);
            later_starts[i] = later_starts[i + 1] | if a == b { 0 } else { 1u64 << a };
        }
        let trivial = pairs.iter().filter(|(a, b)| a == b).fold(0u64, |m, &(a, _)| m | 1u64 << a);
        Search {
            trivial,
            pairs,
            nbr,
            white,
            later_endpoints,
            later_surplus,
            later_starts,
            nodes: 0,
            limit,
            exhausted: false,
            stack: Vec::new(),
        }
    }

    /// Necessary conditions for completing the search from this node.
    /// Returns the forced next move if there is exactly one, `Err` on a dead node.
    fn check(&self, head: usize, i: usize, free: u64) -> Result<Option<usize>, ()> {
        let target = self.pairs[i].1;
        let later = self.later_endpoints[i];
        let avail = free | 1u64 << head;
        let mut forced = None;
        let mut forced_count = 0;
        for v in bits(free) {
            let nb = self.nbr[v];
            if v == target {
                let d = (nb & avail).count_ones();
                if d == 0 {
                    return Err(());
                }
                if d == 1 && nb >> head & 1 == 1 {
                    forced_count += 1;
                    forced = Some(v);
                }
            } else if later >> v & 1 == 1 {
                if self.trivial >> v & 1 == 0 && nb & free == 0 {
                    return Err(());
                }
            } else {
                let d = (nb & avail).count_ones();
                if d < 2 {
                    return Err(());
                }
                if d == 2 && nb >> head & 1 == 1 {
                    forced_count += 1;
                    forced = Some(v);
                }
            }
        }
        if forced_count > 1 {
            return Err(());
        }
        // colour surplus of everything still to be covered
        let whites = (avail & self.white).count_ones() as i32;
        let blacks = avail.count_ones() as i32 - whites;
        if whites - blacks != surplus(self.white, head, target) + self.later_surplus[i] {
            return Err(());
        }
        // reachability from the head and from later path starts
        let seeds = (1u64 << head) | (self.later_starts[i] & free);
        let mut seen = seeds;
        let mut frontier = seeds;
        while frontier != 0 {
            let mut next = 0u64;
            for v in bits(frontier) {
                next |= self.nbr[v];
            }
            next &= avail & !seen;
            seen |= next;
            frontier = next;
        }
        if avail & !seen != 0 {
            return Err(());
        }
        Ok(if forced_count == 1 { forced } else { None })
    }

    fn dfs(&mut self, head: usize, i: usize, free: u64) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.exhausted = true;
            return false;
        }
        let (_, target) = self.pairs[i];
        if head == target {
            if i + 1 == self.pairs.len() {
                return free == 0;
            }
            let (a, _) = self.pairs[i + 1];
            if free >> a & 1 == 0 {
                return false;
            }
            self.stack.push(a);
            if self.dfs(a, i + 1, free & !(1u64 << a)) {
                return true;
            }
            self.stack.pop();
            return false;
        }
        let forced = match self.check(head, i, free) {
            Err(()) => return false,
            Ok(f) => f,
        };
        let allowed = self.nbr[head] & free & !self.later_endpoints[i];
        let mut cands: Vec<(u32, usize)> = match forced {
            Some(v) if allowed >> v & 1 == 1 => vec![(0, v)],
            Some(_) => return false,
            None => bits(allowed).map(|w| ((self.nbr[w] & free).count_ones(), w)).collect(),
        };
        cands.sort_unstable();
        let last = i + 1 == self.pairs.len();
        for (_, w) in cands {
            let rest = free & !(1u64 << w);
            if w == target && last && rest != 0 {
                continue;
            }
            self.stack.push(w);
            if self.dfs(w, i, rest) {
                return true;
            }
            self.stack.pop();
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

/// Looks for disjoint paths `a_i -> b_i` covering every vertex of `g`.
/// A pair with `a_i == b_i` stands for the one-vertex path.
pub(crate) fn find_paths(g: &LiveCube, pairs: &[(usize, usize)], limit: u64) -> SearchOutcome {
    assert!(g.n() <= SEARCH_MAX_DIM);
    if pairs.is_empty() {
        return SearchOutcome::Absent;
    }
    let size = g.size();
    let all = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
    let mut seen = 0u64;
    for &(a, b) in pairs {
        if a >= size || b >= size {
            return SearchOutcome::Absent;
        }
        let m = 1u64 << a | 1u64 << b;
        if seen & m != 0 {
            return SearchOutcome::Absent;
        }
        seen |= m;
    }
    let mut s = Search::new(g, pairs, limit);
    let a0 = pairs[0].0;
    s.stack.push(a0);
    if s.dfs(a0, 0, all & !(1u64 << a0)) {
        let mut out = Vec::with_capacity(pairs.len());
        let mut rest = s.stack.as_slice();
        for &(_, b) in pairs {
            let end = rest.iter().position(|&v| v == b).expect("path reaches its target");
            out.push(rest[..=end].to_vec());
            rest = &rest[end + 1..];
        }
        return SearchOutcome::Found(out);
    }
    if s.exhausted {
        SearchOutcome::Exhausted
    } else {
        SearchOutcome::Absent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_valid(g: &LiveCube, pairs: &[(usize, usize)], paths: &[Vec<usize>]) {
        let mut seen = vec![false; g.size()];
        for (p, &(a, b)) in paths.iter().zip(pairs) {
            assert_eq!((p[0], *p.last().unwrap()), (a, b));
            for w in p.windows(2) {
                assert!(g.is_live(w[0], w[1]));
            }
            for &v in p {
                assert!(!seen[v]);
                seen[v] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn square() {
        let g = LiveCube::full(2);
        match find_paths(&g, &[(0, 1)], 1000) {
            SearchOutcome::Found(p) => assert_eq!(p, vec![vec![0, 2, 3, 1]]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn same_parity_is_absent() {
        let g = LiveCube::full(3);
        assert_eq!(find_paths(&g, &[(0, 3)], 100_000), SearchOutcome::Absent);
    }

    #[test]
    fn all_pairs_q4() {
        let g = LiveCube::full(4);
        for x in 0..16 {
            for y in 0..16 {
                if (x ^ y as usize).count_ones() % 2 == 1 {
                    let SearchOutcome::Found(p) = find_paths(&g, &[(x, y)], 1_000_000) else {
                        panic!("{x} {y}");
                    };
                    assert_valid(&g, &[(x, y)], &p);
                }
            }
        }
    }

    #[test]
    fn two_paths_with_trivial_piece() {
        let g = LiveCube::full(3);
        let pairs = [(0, 1), (7, 7)];
        // 7 alone leaves 7 vertices for one path from a white to a black vertex: impossible
        assert_eq!(find_paths(&g, &pairs, 100_000), SearchOutcome::Absent);
        let pairs = [(0, 0), (1, 2)];
        let SearchOutcome::Found(p) = find_paths(&g, &pairs, 100_000) else { panic!() };
        assert_valid(&g, &pairs, &p);
    }

    #[test]
    fn six_cube_hamiltonian() {
        let g = LiveCube::full(6);
        let SearchOutcome::Found(p) = find_paths(&g, &[(0, 63 ^ 1)], 1_000_000) else { panic!() };
        assert_valid(&g, &[(0, 62)], &p);
    }
}
