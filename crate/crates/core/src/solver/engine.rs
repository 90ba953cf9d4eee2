//! The recursive construction behind [`ham_path_laceable`].
//!
//! Each level picks a direction, relabels so the heavier half is side 0 and
//! classifies `|F_0|` into four cases. The heavier half is solved by
//! recursion after setting aside `|F_0| - (4(n-1)-17)` of its faults; every
//! set-aside fault that the recursive path uses is replaced by an excursion
//! into side 1, and side 1 is finished by a spanning path system. When a
//! crossing edge needed for an excursion is faulty, the path is rotated
//! through a neighbor instead (a detour).

use std::collections::{HashMap, HashSet};

use crate::cube::{Dim, Edge, Vertex};
use crate::fault::{
    check_conditions, choose_direction, direction_passes, fault_bound, FaultSet, SplitView,
};
use crate::graph::{LiveCube, DENSE_MAX_DIM};
use crate::path::{select_path_edge, splice_absorb, verify_hamiltonian_path, verify_paths, Path};

use super::search::{find_paths, SearchOutcome};
use super::spanning::{self, Budget};
use super::subsolvers::{fault_free_labels, to_path};
use super::{classify, LevelRecord, SolveError, SolveOptions, SolveRequest, SolveTrace, Step};

/// Dimension up to which a level is solved by search.
const BASE_MAX_DIM: u32 = 6;

/// Search nodes for one base-level search before switching to the split search.
const BASE_NODE_LIMIT: u64 = 2_000_000;

/// Set-aside fault choices tried per level.
const FREED_TRIES: usize = 4;

/// Crossing vertices tried when the ends lie in different halves.
const CROSS_TRIES: usize = 3;

/// Hamiltonian path of `Q_n - F` between `x` and `y`, with the recursion log.
pub fn ham_path_laceable(req: &SolveRequest) -> Result<(Path, SolveTrace), SolveError> {
    ham_path_laceable_with(req, &SolveOptions::default())
}

pub fn ham_path_laceable_with(req: &SolveRequest, opts: &SolveOptions) -> Result<(Path, SolveTrace), SolveError> {
    let SolveRequest { faults, x, y } = req;
    let (x, y) = (*x, *y);
    let n = faults.cube_dim();
    check_ends(n, x, y)?;
    if !faults.is_empty() {
        let report = check_conditions(faults);
        if !report.admissible {
            return Err(SolveError::Inadmissible(report));
        }
    }
    if n > DENSE_MAX_DIM {
        return Err(SolveError::ContractViolation(format!("n = {n} exceeds the supported maximum {DENSE_MAX_DIM}")));
    }
    let mut ctx = Ctx { budget: Budget::new(opts.node_budget), verify: opts.verify_steps, trace: SolveTrace::default() };
    let path = match ctx.laceable(faults, x, y, 0) {
        Ok(p) => p,
        Err(reason) => return Err(SolveError::ConstructionFailed { reason, trace: ctx.trace }),
    };
    let report = verify_hamiltonian_path(faults, x, y, &path);
    if !report.passed() {
        return Err(SolveError::ConstructionFailed { reason: report.to_string(), trace: ctx.trace });
    }
    Ok((path, ctx.trace))
}

/// Hamiltonian path of `Q_n - F` for `n <= 6` by complete search.
pub fn base_solve(faults: &FaultSet, x: Vertex, y: Vertex) -> Result<Path, SolveError> {
    let n = faults.cube_dim();
    check_ends(n, x, y)?;
    if n > BASE_MAX_DIM {
        return Err(SolveError::ContractViolation(format!("direct search is limited to n <= {BASE_MAX_DIM}")));
    }
    let mut budget = Budget::default();
    let path = base_search(faults, x, y, &mut budget).ok_or(SolveError::NotFound)?;
    let report = verify_hamiltonian_path(faults, x, y, &path);
    if !report.passed() {
        return Err(SolveError::ConstructionFailed { reason: report.to_string(), trace: SolveTrace::default() });
    }
    Ok(path)
}

fn check_ends(n: u32, x: Vertex, y: Vertex) -> Result<(), SolveError> {
    if x.cube_dim() != n || y.cube_dim() != n {
        return Err(SolveError::ContractViolation(format!("ends {x} and {y} must lie in Q_{n}")));
    }
    if x == y {
        return Err(SolveError::ContractViolation(format!("both ends are {x}")));
    }
    if x.parity() == y.parity() {
        return Err(SolveError::SameParity(x, y));
    }
    Ok(())
}

fn base_search(faults: &FaultSet, x: Vertex, y: Vertex, budget: &mut Budget) -> Option<Path> {
    let n = faults.cube_dim();
    let g = LiveCube::from_faults(faults);
    let pair = [(x.label() as usize, y.label() as usize)];
    let limit = if n < BASE_MAX_DIM { budget.nodes_left } else { BASE_NODE_LIMIT.min(budget.nodes_left) };
    match find_paths(&g, &pair, limit) {
        SearchOutcome::Found(p) => {
            budget.nodes_left = budget.nodes_left.saturating_sub(1);
            Some(to_path(n, &p[0]))
        }
        SearchOutcome::Absent => None,
        SearchOutcome::Exhausted => {
            budget.nodes_left -= limit;
            spanning::solve(&g, &pair, budget).map(|p| to_path(n, &p[0]))
        }
    }
}

/// Replacements of path edges by excursions into the other half.
#[derive(Debug, Default)]
struct Splice {
    /// Ends of the excursion paths, in `Q_n` labels on the other side.
    pairs: Vec<(Vertex, Vertex)>,
    dropped: Vec<Edge>,
    added: Vec<Edge>,
    selected: Vec<Edge>,
    detours: usize,
}

struct Ctx {
    budget: Budget,
    verify: bool,
    trace: SolveTrace,
}

type Level = Result<Path, String>;

impl Ctx {
    fn laceable(&mut self, faults: &FaultSet, x: Vertex, y: Vertex, depth: usize) -> Level {
        let n = faults.cube_dim();
        if faults.is_empty() {
            self.trace.levels.push(LevelRecord::new(depth, n, Step::FaultFree));
            return Ok(to_path(n, &fault_free_labels(n, x.label() as usize, y.label() as usize)));
        }
        if n <= BASE_MAX_DIM {
            let mut rec = LevelRecord::new(depth, n, Step::Base);
            rec.calls.push("search");
            self.trace.levels.push(rec);
            return base_search(faults, x, y, &mut self.budget)
                .ok_or_else(|| format!("no Hamiltonian path found in Q_{n} between {x} and {y}"));
        }
        let choice = choose_direction(faults).map_err(|e| e.to_string())?;
        let mut sv = choice.split;
        let first = choice.dim;
        let mut resplit = None;
        if classify(n, sv.side_faults(0).len()) == Some(4) {
            if let Some(alt) = resplit_direction(faults, &sv) {
                resplit = Some(first);
                sv = alt;
            }
        }
        let f0 = sv.side_faults(0).len();
        let case = classify(n, f0).ok_or_else(|| format!("|F0| = {f0} is outside every case at n = {n}"))?;
        let (sx, _) = sv.locate(x);
        let (sy, _) = sv.locate(y);
        let sub = match (sx, sy) {
            (0, 0) => 1,
            (1, 1) if case == 1 => 1,
            (1, 1) => 3,
            _ => 2,
        };
        let mut rec = LevelRecord::new(depth, n, Step::Case { case, sub });
        rec.dim = Some(sv.dim());
        rec.rule = Some(choice.rule);
        rec.resplit_from = resplit;
        rec.side_faults = [f0, sv.side_faults(1).len()];
        rec.crossing_faults = sv.crossing().len();
        let idx = self.trace.levels.len();
        self.trace.levels.push(rec);

        let free = (f0 as i64 - fault_bound(n - 1)).max(0) as usize;
        let attempt = match (sx, sy) {
            (0, 0) => self.same_side(faults, &sv, 0, x, y, free, depth, idx),
            (1, 1) if free == 0 => self.same_side(faults, &sv, 1, x, y, 0, depth, idx),
            (1, 1) => self.far_side(faults, &sv, x, y, free, depth, idx),
            (0, _) => self.split_ends(faults, &sv, x, y, free, depth, idx),
            _ => self.split_ends(faults, &sv, y, x, free, depth, idx).map(|p| p.reversed()),
        };
        let path = match attempt {
            Some(p) => p,
            None => {
                self.trace.levels.truncate(idx + 1);
                let rec = &mut self.trace.levels[idx];
                rec.fallback = true;
                rec.calls.push("search");
                let g = LiveCube::from_faults(faults);
                let pair = [(x.label() as usize, y.label() as usize)];
                let p = spanning::solve(&g, &pair, &mut self.budget)
                    .ok_or_else(|| format!("every plan failed in Q_{n} between {x} and {y}"))?;
                to_path(n, &p[0])
            }
        };
        if self.verify {
            let report = verify_hamiltonian_path(faults, x, y, &path);
            if !report.passed() {
                return Err(format!("level n = {n} produced an invalid path: {report}"));
            }
        }
        Ok(path)
    }

    /// Both ends on side `m`: recurse there, then splice side `1 - m` in.
    #[allow(clippy::too_many_arguments)]
    fn same_side(
        &mut self,
        faults: &FaultSet,
        sv: &SplitView,
        m: usize,
        x: Vertex,
        y: Vertex,
        free: usize,
        depth: usize,
        idx: usize,
    ) -> Option<Path> {
        let o = 1 - m;
        for freed in freed_sets(sv, free, &[]) {
            let mark = self.trace.levels.len();
            let result = self.same_side_with(faults, sv, m, o, x, y, &freed, depth, idx);
            if result.is_some() {
                return result;
            }
            self.trace.levels.truncate(mark);
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn same_side_with(
        &mut self,
        faults: &FaultSet,
        sv: &SplitView,
        m: usize,
        o: usize,
        x: Vertex,
        y: Vertex,
        freed: &[Edge],
        depth: usize,
        idx: usize,
    ) -> Option<Path> {
        let fm = sv.side_faults(m).without(freed);
        let (_, xs) = sv.locate(x);
        let (_, ys) = sv.locate(y);
        let pm = lift_path(sv, m, &self.laceable(&fm, xs, ys, depth + 1).ok()?);
        let must = lifted_on_path(sv, m, freed, &pm);
        let mut used = [HashSet::new(), HashSet::new()];
        let splice = plan_splices(faults, sv, &pm, &must, must.is_empty(), &mut used)?;
        let others = self.other_side(sv, o, &splice.pairs, depth, idx)?;
        let mut parts: Vec<&Path> = vec![&pm];
        parts.extend(others.iter());
        let path = splice_absorb(&parts, &splice.dropped, &splice.added, x, y).ok()?;
        self.note(idx, freed_lifted(sv, freed), splice);
        Some(path)
    }

    /// `x` on side 0, `y` on side 1: a path from `x` to a crossing vertex
    /// `r0`, then from its partner to `y`.
    #[allow(clippy::too_many_arguments)]
    fn split_ends(
        &mut self,
        faults: &FaultSet,
        sv: &SplitView,
        x: Vertex,
        y: Vertex,
        free: usize,
        depth: usize,
        idx: usize,
    ) -> Option<Path> {
        let j = sv.dim();
        let y0 = y.neighbor(j);
        for freed in freed_sets(sv, free, &[y0]) {
            let touched: HashSet<Vertex> =
                freed_lifted(sv, &freed).iter().flat_map(|e| [e.endpoints().0, e.endpoints().1]).collect();
            let candidates: Vec<Vertex> = Vertex::all(faults.cube_dim())
                .filter(|&r| {
                    sv.locate(r).0 == 0
                        && r.parity() != x.parity()
                        && r != x
                        && r.neighbor(j) != y
                        && !touched.contains(&r)
                        && !sv.crossing_faulty(r)
                })
                .take(CROSS_TRIES)
                .collect();
            for r0 in candidates {
                let mark = self.trace.levels.len();
                if let Some(p) = self.split_ends_with(faults, sv, x, y, r0, &freed, depth, idx) {
                    return Some(p);
                }
                self.trace.levels.truncate(mark);
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn split_ends_with(
        &mut self,
        faults: &FaultSet,
        sv: &SplitView,
        x: Vertex,
        y: Vertex,
        r0: Vertex,
        freed: &[Edge],
        depth: usize,
        idx: usize,
    ) -> Option<Path> {
        let j = sv.dim();
        let r1 = r0.neighbor(j);
        let f0 = sv.side_faults(0).without(freed);
        let (_, xs) = sv.locate(x);
        let (_, rs) = sv.locate(r0);
        let p0 = lift_path(sv, 0, &self.laceable(&f0, xs, rs, depth + 1).ok()?);
        let must = lifted_on_path(sv, 0, freed, &p0);
        let mut used = [HashSet::from([r0]), HashSet::from([r1, y])];
        let mut splice = plan_splices(faults, sv, &p0, &must, false, &mut used)?;
        splice.pairs.insert(0, (r1, y));
        splice.added.push(Edge::new(r0, r1).expect("crossing edge"));
        let others = self.other_side(sv, 1, &splice.pairs, depth, idx)?;
        let mut parts: Vec<&Path> = vec![&p0];
        parts.extend(others.iter());
        let path = splice_absorb(&parts, &splice.dropped, &splice.added, x, y).ok()?;
        self.note(idx, freed_lifted(sv, freed), splice);
        Some(path)
    }

    /// Both ends on the lighter side while faults must be set aside: side 0
    /// is covered by a path between the ends of one set-aside fault, whose
    /// partners connect to `x` and `y`.
    #[allow(clippy::too_many_arguments)]
    fn far_side(
        &mut self,
        faults: &FaultSet,
        sv: &SplitView,
        x: Vertex,
        y: Vertex,
        free: usize,
        depth: usize,
        idx: usize,
    ) -> Option<Path> {
        let j = sv.dim();
        let avoid = [x.neighbor(j), y.neighbor(j)];
        for freed in freed_sets(sv, free, &avoid) {
            for anchor in freed_lifted(sv, &freed) {
                let (a, b) = anchor.endpoints();
                if sv.crossing_faulty(a) || sv.crossing_faulty(b) || avoid.contains(&a) || avoid.contains(&b) {
                    continue;
                }
                // x runs to the partner of a, the partner of b runs to y
                let (a, b) = if a.parity() == x.parity() { (a, b) } else { (b, a) };
                let mark = self.trace.levels.len();
                if let Some(p) = self.far_side_with(faults, sv, x, y, (a, b), &freed, depth, idx) {
                    return Some(p);
                }
                self.trace.levels.truncate(mark);
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn far_side_with(
        &mut self,
        faults: &FaultSet,
        sv: &SplitView,
        x: Vertex,
        y: Vertex,
        (a, b): (Vertex, Vertex),
        freed: &[Edge],
        depth: usize,
        idx: usize,
    ) -> Option<Path> {
        let j = sv.dim();
        let (a1, b1) = (a.neighbor(j), b.neighbor(j));
        let f0 = sv.side_faults(0).without(freed);
        let (_, asub) = sv.locate(a);
        let (_, bsub) = sv.locate(b);
        let p0 = lift_path(sv, 0, &self.laceable(&f0, asub, bsub, depth + 1).ok()?);
        let anchor = Edge::new(a, b).expect("set-aside fault");
        let rest: Vec<Edge> = freed.iter().map(|&e| lift_edge(sv, 0, e)).filter(|&e| e != anchor).collect();
        let must: Vec<Edge> = rest.into_iter().filter(|&e| p0.contains_edge(e)).collect();
        let mut used = [HashSet::from([a, b]), HashSet::from([x, y, a1, b1])];
        let mut splice = plan_splices(faults, sv, &p0, &must, false, &mut used)?;
        splice.pairs.insert(0, (x, a1));
        splice.pairs.insert(1, (b1, y));
        splice.added.push(Edge::new(a, a1).expect("crossing edge"));
        splice.added.push(Edge::new(b, b1).expect("crossing edge"));
        splice.selected.insert(0, anchor);
        let others = self.other_side(sv, 1, &splice.pairs, depth, idx)?;
        let mut parts: Vec<&Path> = vec![&p0];
        parts.extend(others.iter());
        let path = splice_absorb(&parts, &splice.dropped, &splice.added, x, y).ok()?;
        self.note(idx, freed_lifted(sv, freed), splice);
        Some(path)
    }

    /// Spanning path system of side `o` for `pairs` (given in `Q_n` labels),
    /// returned in `Q_n` labels.
    fn other_side(
        &mut self,
        sv: &SplitView,
        o: usize,
        pairs: &[(Vertex, Vertex)],
        depth: usize,
        idx: usize,
    ) -> Option<Vec<Path>> {
        let faults = sv.side_faults(o);
        let local: Vec<(Vertex, Vertex)> = pairs.iter().map(|&(a, b)| (sv.locate(a).1, sv.locate(b).1)).collect();
        let paths: Vec<Path> = if let [(a, b)] = local.as_slice() {
            let fits = faults.is_empty() || check_conditions(faults).admissible;
            if fits {
                self.trace.levels[idx].calls.push("recurse");
                vec![self.laceable(faults, *a, *b, depth + 1).ok()?]
            } else {
                self.trace.levels[idx].calls.push("path-search");
                vec![self.dense(faults, &local)?.remove(0)]
            }
        } else {
            self.trace.levels[idx].calls.push(match local.len() {
                2 => "2-path",
                3 => "3-path",
                _ => "k-path",
            });
            self.dense(faults, &local)?
        };
        if self.verify && !verify_paths(faults, &local, &paths).passed() {
            return None;
        }
        Some(paths.iter().map(|p| lift_path(sv, o, p)).collect())
    }

    fn dense(&mut self, faults: &FaultSet, pairs: &[(Vertex, Vertex)]) -> Option<Vec<Path>> {
        let g = LiveCube::from_faults(faults);
        let raw: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a.label() as usize, b.label() as usize)).collect();
        let sol = spanning::solve(&g, &raw, &mut self.budget)?;
        Some(sol.iter().map(|p| to_path(g.n(), p)).collect())
    }

    fn note(&mut self, idx: usize, freed: Vec<Edge>, splice: Splice) {
        let rec = &mut self.trace.levels[idx];
        rec.freed = freed;
        rec.selected = splice.selected;
        rec.detours = splice.detours;
    }
}

/// The fault-count-reducing re-split used when `|F_0| = 4n-18`: a vertex `u`
/// of degree 4 and the end `t0` of the single crossing fault share a faulty
/// direction `k`.
fn resplit_direction(faults: &FaultSet, sv: &SplitView) -> Option<SplitView> {
    let n = faults.cube_dim();
    let t = sv.crossing().first()?;
    let (a, b) = t.endpoints();
    let t0 = if sv.locate(a).0 == 0 { a } else { b };
    let t_dims: HashSet<Dim> = faults.edges_at(t0).into_iter().map(|e| e.dim()).collect();
    for u in faults.touched_vertices() {
        if u == t0 || faults.degree(u) != 4 {
            continue;
        }
        for e in faults.edges_at(u) {
            let k = e.dim();
            if k == sv.dim() || !t_dims.contains(&k) {
                continue;
            }
            if let Some(alt) = direction_passes(faults, k) {
                let alt = alt.heavier_first();
                if classify(n, alt.side_faults(0).len()).is_some_and(|c| c < 4) {
                    return Some(alt);
                }
            }
        }
    }
    None
}

fn lift_edge(sv: &SplitView, s: usize, e: Edge) -> Edge {
    let (a, b) = e.endpoints();
    Edge::new(sv.lift(s, a), sv.lift(s, b)).expect("lifting keeps adjacency")
}

fn freed_lifted(sv: &SplitView, freed: &[Edge]) -> Vec<Edge> {
    freed.iter().map(|&e| lift_edge(sv, 0, e)).collect()
}

fn lift_path(sv: &SplitView, s: usize, p: &Path) -> Path {
    Path::new(p.vertices().iter().map(|&v| sv.lift(s, v)).collect())
}

fn lifted_on_path(sv: &SplitView, s: usize, freed: &[Edge], p: &Path) -> Vec<Edge> {
    freed.iter().map(|&e| lift_edge(sv, s, e)).filter(|&e| p.contains_edge(e)).collect()
}

/// Candidate sets of `count` pairwise disjoint side-0 faults to set aside,
/// best first: faults whose crossing edges are intact, away from `avoid`
/// and from the crossing faults.
fn freed_sets(sv: &SplitView, count: usize, avoid: &[Vertex]) -> Vec<Vec<Edge>> {
    if count == 0 {
        return vec![Vec::new()];
    }
    let crossing_ends: HashSet<Vertex> =
        sv.crossing().iter().flat_map(|e| [e.endpoints().0, e.endpoints().1]).collect();
    let mut ranked: Vec<((usize, usize, usize), Edge)> = sv
        .side_faults(0)
        .iter()
        .map(|e| {
            let (a, b) = lift_edge(sv, 0, e).endpoints();
            let broken = usize::from(sv.crossing_faulty(a)) + usize::from(sv.crossing_faulty(b));
            let blocked = usize::from(avoid.contains(&a)) + usize::from(avoid.contains(&b));
            let near = usize::from(crossing_ends.contains(&a)) + usize::from(crossing_ends.contains(&b));
            ((broken, blocked, near), e)
        })
        .collect();
    ranked.sort();
    let order: Vec<Edge> = ranked.into_iter().map(|(_, e)| e).collect();
    let mut out: Vec<Vec<Edge>> = Vec::new();
    for start in 0..order.len().min(FREED_TRIES) {
        let mut pick: Vec<Edge> = Vec::new();
        for &e in order[start..].iter().chain(order[..start].iter()) {
            if pick.len() == count {
                break;
            }
            if pick.iter().all(|p| !p.touches(e)) {
                pick.push(e);
            }
        }
        if pick.len() == count {
            pick.sort();
            if !out.contains(&pick) {
                out.push(pick);
            }
        }
    }
    out
}

/// Plans the excursions for path `p` (in `Q_n` labels, inside one half).
///
/// Every edge of `must` is replaced. With `want_one` and `must` empty, one
/// path edge with intact crossing edges is replaced so the other half gets
/// covered. `used[0]` holds vertices of `p`'s half that may not take part,
/// `used[1]` vertices of the other half already spoken for.
fn plan_splices(
    faults: &FaultSet,
    sv: &SplitView,
    p: &Path,
    must: &[Edge],
    want_one: bool,
    used: &mut [HashSet<Vertex>; 2],
) -> Option<Splice> {
    let j = sv.dim();
    let vs = p.vertices();
    let pos: HashMap<Vertex, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = Splice::default();
    let usable = |v: Vertex, used: &[HashSet<Vertex>; 2]| {
        !sv.crossing_faulty(v) && !used[1].contains(&v.neighbor(j)) && !used[0].contains(&v)
    };

    for &e in must {
        let (a, b) = e.endpoints();
        if used[0].contains(&a) || used[0].contains(&b) {
            return None;
        }
        match (usable(a, used), usable(b, used)) {
            (true, true) => {
                let (a1, b1) = (a.neighbor(j), b.neighbor(j));
                out.pairs.push((a1, b1));
                out.dropped.push(e);
                out.added.push(Edge::along(a, j));
                out.added.push(Edge::along(b, j));
                out.selected.push(e);
                used[0].extend([a, b]);
                used[1].extend([a1, b1]);
            }
            (false, true) => detour(faults, sv, vs, &pos, must, (a, b), used, &mut out)?,
            (true, false) => detour(faults, sv, vs, &pos, must, (b, a), used, &mut out)?,
            (false, false) => return None,
        }
    }

    if want_one && must.is_empty() {
        let avoid: Vec<Vertex> =
            used[0].iter().copied().chain(used[1].iter().map(|&w| w.neighbor(j))).collect();
        let e = select_path_edge(p, j, sv.crossing(), &avoid, &[]).ok()?;
        let (a, b) = e.endpoints();
        let (a1, b1) = (a.neighbor(j), b.neighbor(j));
        out.pairs.push((a1, b1));
        out.dropped.push(e);
        out.added.push(Edge::along(a, j));
        out.added.push(Edge::along(b, j));
        out.selected.push(e);
        used[0].extend([a, b]);
        used[1].extend([a1, b1]);
    }
    let _ = faults;
    Some(out)
}

/// Replaces the path edge `u0 v0` whose crossing at `u0` is unusable: `u0`
/// is joined to a neighbor `u0'` in its half, the path edge `u0' v0'` on
/// the matching side is dropped, and the excursion runs between the
/// partners of `v0` and `v0'`.
#[allow(clippy::too_many_arguments)]
fn detour(
    faults: &FaultSet,
    sv: &SplitView,
    vs: &[Vertex],
    pos: &HashMap<Vertex, usize>,
    must: &[Edge],
    (u0, v0): (Vertex, Vertex),
    used: &mut [HashSet<Vertex>; 2],
    out: &mut Splice,
) -> Option<()> {
    let j = sv.dim();
    let n = faults.cube_dim();
    let (iu, iv) = (pos[&u0], pos[&v0]);
    let step = iv as isize - iu as isize;
    let v1 = v0.neighbor(j);
    if used[1].contains(&v1) || sv.crossing_faulty(v0) {
        return None;
    }
    for k in Dim::all(n).filter(|&k| k != j) {
        let up = u0.neighbor(k);
        if !faults.is_live(u0, up) || used[0].contains(&up) {
            continue;
        }
        let ik = pos[&up];
        if ik.abs_diff(iu) == 1 {
            continue;
        }
        let iw = ik as isize + step;
        if iw < 0 || iw as usize >= vs.len() {
            continue;
        }
        let vp = vs[iw as usize];
        let vp1 = vp.neighbor(j);
        let dropped = Edge::new(up, vp).expect("consecutive path vertices");
        if used[0].contains(&vp)
            || sv.crossing_faulty(vp)
            || used[1].contains(&vp1)
            || vp1 == v1
            || must.contains(&dropped)
            || out.dropped.contains(&dropped)
        {
            continue;
        }
        out.pairs.push((v1, vp1));
        out.dropped.push(Edge::new(u0, v0).expect("path edge"));
        out.dropped.push(dropped);
        out.added.push(Edge::new(u0, up).expect("neighbors"));
        out.added.push(Edge::along(v0, j));
        out.added.push(Edge::along(vp, j));
        out.selected.push(Edge::new(u0, v0).expect("path edge"));
        out.detours += 1;
        used[0].extend([u0, v0, up, vp]);
        used[1].extend([v1, vp1]);
        return Some(());
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    #[test]
    fn fault_free_q5() {
        let req = SolveRequest::new(FaultSet::new(5).unwrap(), v("00000"), v("00001"));
        let (p, trace) = ham_path_laceable(&req).unwrap();
        assert_eq!(p.len(), 32);
        assert_eq!(trace.levels[0].step, Step::FaultFree);
    }

    #[test]
    fn base_square() {
        let p = base_solve(&FaultSet::new(2).unwrap(), v("00"), v("01")).unwrap();
        assert_eq!(p.vertices(), &[v("00"), v("10"), v("11"), v("01")]);
    }

    #[test]
    fn rejects_bad_requests() {
        let f = FaultSet::new(5).unwrap();
        assert!(matches!(
            ham_path_laceable(&SolveRequest::new(f.clone(), v("00000"), v("00011"))),
            Err(SolveError::SameParity(..))
        ));
        let mut g = FaultSet::new(5).unwrap();
        for e in ["00000 00001", "00000 00010", "00000 00100", "00000 01000"] {
            g.insert(e.parse().unwrap()).unwrap();
        }
        assert!(matches!(
            ham_path_laceable(&SolveRequest::new(g, v("00000"), v("00001"))),
            Err(SolveError::Inadmissible(_))
        ));
    }
}
