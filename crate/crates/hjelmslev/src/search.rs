//! Exact search for (n,u)-arcs and multiarcs on the condensed system.
//!
//! The solver is a depth-first branch-and-bound over the orbit selection
//! vector x: selecting orbit j with multiplicity v adds `v * M[t][j]` points
//! to every line of line-orbit t, and a feasible arc keeps every line load
//! at most u. Two prunes drive the search: a per-line cap on the assignable
//! multiplicity, and an optimistic bound on the orbit mass still reachable
//! under the current loads.
//!
//! For parallel runs the tree is split at a fixed shallow depth into
//! independent subtrees. Subtrees never share mutable search state; they
//! only publish monotone information (the best size found so far, or the
//! smallest subtree index holding a solution) that is safe to read stale.
//! Together with a static per-subtree node budget this makes the result
//! identical for every worker count.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::matrix::Mat3;
use crate::orbits::{point_permutation, CondensedSystem, OrbitPartition};
use crate::par;
use crate::plane::Plane;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SearchMode {
    FixedN(u64),
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArcKind {
    Projective,
    /// Nonnegative multiplicities, capped per orbit (None means cap = u).
    Multiarc { cap: Option<u32> },
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

pub struct SearchProblem<'a> {
    pub system: &'a CondensedSystem,
    pub u: u32,
    pub mode: SearchMode,
    pub kind: ArcKind,
    pub budget: Budget,
}

/// A solution of the slack system M^G x + y = u 1: the orbit selection x,
/// the expanded size n and the per-line-orbit slacks y.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcSolution {
    pub x: Vec<u32>,
    pub n: u64,
    pub slack: Vec<u32>,
    pub attains_u: bool,
}

#[derive(Debug)]
pub enum FixedOutcome {
    Found(ArcSolution),
    /// The whole space was exhausted; no solution exists.
    Infeasible,
    /// The budget ran out before the space was exhausted.
    Inconclusive,
}

#[derive(Debug)]
pub struct FixedResult {
    pub outcome: FixedOutcome,
    pub nodes: u64,
}

#[derive(Debug)]
pub struct MaximizeResult {
    pub best: Option<ArcSolution>,
    /// True only if every larger size was exhaustively refuted in budget.
    pub optimal: bool,
    pub nodes: u64,
}

struct Ctx<'a> {
    mat: &'a [Vec<u32>],
    sizes: &'a [u64],
    /// sparse columns: (row, coefficient) pairs
    cols: Vec<Vec<(u32, u32)>>,
    /// branch order: descending orbit size, ascending index on ties
    order: Vec<usize>,
    caps: Vec<u32>,
    u: u32,
    target: Option<u64>,
}

impl<'a> Ctx<'a> {
    fn new(problem: &SearchProblem<'a>) -> Ctx<'a> {
        let system = problem.system;
        let k = system.point_orbit_sizes.len();
        let mut cols = vec![Vec::new(); k];
        for (t, row) in system.matrix.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c > 0 {
                    cols[j].push((t as u32, c));
                }
            }
        }
        let user_cap = match problem.kind {
            ArcKind::Projective => 1,
            ArcKind::Multiarc { cap } => cap.unwrap_or(problem.u).max(1),
        };
        let caps: Vec<u32> = (0..k)
            .map(|j| {
                let line_cap = cols[j]
                    .iter()
                    .map(|&(_, c)| problem.u / c)
                    .min()
                    .unwrap_or(problem.u);
                user_cap.min(line_cap)
            })
            .collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&j| (std::cmp::Reverse(system.point_orbit_sizes[j]), j));
        Ctx {
            mat: &system.matrix,
            sizes: &system.point_orbit_sizes,
            cols,
            order,
            caps,
            u: problem.u,
            target: match problem.mode {
                SearchMode::FixedN(n) => Some(n),
                SearchMode::Maximize => None,
            },
        }
    }

    fn num_vars(&self) -> usize {
        self.sizes.len()
    }

    /// Largest multiplicity assignable to variable j under current loads.
    fn max_value(&self, j: usize, loads: &[u32]) -> u32 {
        let mut hi = self.caps[j];
        for &(t, c) in &self.cols[j] {
            hi = hi.min((self.u - loads[t as usize]) / c);
            if hi == 0 {
                break;
            }
        }
        hi
    }

    /// Optimistic orbit mass still reachable from branch position `depth`.
    fn optimistic(&self, depth: usize, loads: &[u32]) -> u64 {
        let mut total = 0u64;
        for &j in &self.order[depth..] {
            let mv = self.max_value(j, loads);
            if mv > 0 {
                total += self.sizes[j] * mv as u64;
            }
        }
        total
    }
}

/// Monotone cross-subtree signals; safe to read stale in any order.
struct Shared {
    /// maximize: the largest n found anywhere so far
    best_floor: AtomicU64,
    /// fixed-n: smallest subtree index that holds a solution
    winner: AtomicU64,
}

struct SubtreeTask {
    index: u64,
    x: Vec<u32>,
    loads: Vec<u32>,
    n_cur: u64,
    depth: usize,
}

struct SubtreeOutcome {
    found: Option<Vec<u32>>,
    best: Option<(u64, Vec<u32>)>,
    exhausted: bool,
    nodes: u64,
}

struct Dfs<'a> {
    ctx: &'a Ctx<'a>,
    shared: &'a Shared,
    my_index: u64,
    loads: Vec<u32>,
    x: Vec<u32>,
    n_cur: u64,
    nodes: u64,
    node_budget: u64,
    deadline: Option<Instant>,
    cut: bool,
    best: Option<(u64, Vec<u32>)>,
    found: Option<Vec<u32>>,
}

impl<'a> Dfs<'a> {
    /// Returns true when the search should stop unwinding (solution found,
    /// budget cut, or another subtree already won).
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.ctx.num_vars() {
            match self.ctx.target {
                Some(n) => {
                    if self.n_cur == n {
                        self.found = Some(self.x.clone());
                        return true;
                    }
                }
                None => {
                    let best_n = self.best.as_ref().map_or(0, |b| b.0);
                    if self.best.is_none() || self.n_cur > best_n {
                        self.best = Some((self.n_cur, self.x.clone()));
                        self.shared.best_floor.fetch_max(self.n_cur, Ordering::Relaxed);
                    }
                }
            }
            return false;
        }
        let var = self.ctx.order[depth];
        let w = self.ctx.sizes[var];
        let mut hi = self.ctx.max_value(var, &self.loads);
        if let Some(n) = self.ctx.target {
            hi = hi.min(((n - self.n_cur) / w.max(1)) as u32);
        }
        for v in (0..=hi).rev() {
            self.nodes += 1;
            if self.nodes > self.node_budget {
                self.cut = true;
                return true;
            }
            if self.nodes % 1024 == 0 {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        self.cut = true;
                        return true;
                    }
                }
                if self.ctx.target.is_some()
                    && self.shared.winner.load(Ordering::Relaxed) < self.my_index
                {
                    // another, earlier subtree already has a solution
                    self.cut = true;
                    return true;
                }
            }
            if v > 0 {
                for &(t, c) in &self.ctx.cols[var] {
                    self.loads[t as usize] += v * c;
                }
                self.n_cur += v as u64 * w;
                self.x[var] = v;
            }
            let bound = self.n_cur + self.ctx.optimistic(depth + 1, &self.loads);
            let explore = match self.ctx.target {
                Some(n) => bound >= n,
                None => {
                    let local = self.best.as_ref().map_or(0, |b| b.0);
                    let floor = self.shared.best_floor.load(Ordering::Relaxed);
                    (self.best.is_none() || bound > local) && bound >= floor
                }
            };
            let stop = explore && self.run(depth + 1);
            if v > 0 {
                for &(t, c) in &self.ctx.cols[var] {
                    self.loads[t as usize] -= v * c;
                }
                self.n_cur -= v as u64 * w;
                self.x[var] = 0;
            }
            if stop {
                return true;
            }
        }
        false
    }
}

/// Enumerate the feasible prefixes at the fixed partition depth, in the same
/// value order the sequential search would visit them.
fn enumerate_prefixes(ctx: &Ctx<'_>, depth: usize) -> Vec<SubtreeTask> {
    let k_rows = ctx.mat.len();
    let mut tasks = Vec::new();
    let mut x = vec![0u32; ctx.num_vars()];
    let mut loads = vec![0u32; k_rows];
    fn rec(
        ctx: &Ctx<'_>,
        d: usize,
        depth: usize,
        x: &mut Vec<u32>,
        loads: &mut Vec<u32>,
        n_cur: u64,
        tasks: &mut Vec<SubtreeTask>,
    ) {
        if d == depth {
            tasks.push(SubtreeTask {
                index: tasks.len() as u64,
                x: x.clone(),
                loads: loads.clone(),
                n_cur,
                depth,
            });
            return;
        }
        let var = ctx.order[d];
        let w = ctx.sizes[var];
        let mut hi = ctx.max_value(var, loads);
        if let Some(n) = ctx.target {
            hi = hi.min(((n - n_cur) / w.max(1)) as u32);
        }
        for v in (0..=hi).rev() {
            if v > 0 {
                for &(t, c) in &ctx.cols[var] {
                    loads[t as usize] += v * c;
                }
                x[var] = v;
            }
            rec(ctx, d + 1, depth, x, loads, n_cur + v as u64 * w, tasks);
            if v > 0 {
                for &(t, c) in &ctx.cols[var] {
                    loads[t as usize] -= v * c;
                }
                x[var] = 0;
            }
        }
    }
    rec(ctx, 0, depth, &mut x, &mut loads, 0, &mut tasks);
    tasks
}

/// Fixed partition depth: enough prefix variables that the tree splits into
/// at least ~128 subtrees, independent of the worker count.
fn partition_depth(ctx: &Ctx<'_>) -> usize {
    let mut prod: u64 = 1;
    for (d, &j) in ctx.order.iter().enumerate() {
        if prod >= 128 {
            return d;
        }
        prod = prod.saturating_mul(ctx.caps[j] as u64 + 1);
    }
    ctx.num_vars()
}

fn solution_from_x(system: &CondensedSystem, u: u32, x: &[u32]) -> ArcSolution {
    let n = x
        .iter()
        .zip(&system.point_orbit_sizes)
        .map(|(&v, &w)| v as u64 * w)
        .sum();
    let slack: Vec<u32> = system
        .matrix
        .iter()
        .map(|row| {
            let load: u32 = row.iter().zip(x).map(|(&c, &v)| c * v).sum();
            u - load
        })
        .collect();
    let attains_u = slack.contains(&0);
    ArcSolution {
        x: x.to_vec(),
        n,
        slack,
        attains_u,
    }
}

fn run_subtrees(problem: &SearchProblem<'_>, ctx: &Ctx<'_>) -> (Vec<SubtreeOutcome>, u64) {
    let depth = partition_depth(ctx);
    let tasks = enumerate_prefixes(ctx, depth);
    let shared = Shared {
        best_floor: AtomicU64::new(0),
        winner: AtomicU64::new(u64::MAX),
    };
    let per_budget = match problem.budget.max_nodes {
        Some(total) => total.div_ceil(tasks.len().max(1) as u64),
        None => u64::MAX,
    };
    let deadline = problem
        .budget
        .max_seconds
        .map(|s| Instant::now() + Duration::from_secs_f64(s));
    let prefix_nodes = tasks.len() as u64;
    let outcomes = par::map_collect(&tasks, |task| {
        let mut dfs = Dfs {
            ctx,
            shared: &shared,
            my_index: task.index,
            loads: task.loads.clone(),
            x: task.x.clone(),
            n_cur: task.n_cur,
            nodes: 0,
            node_budget: per_budget,
            deadline,
            cut: false,
            best: None,
            found: None,
        };
        if ctx.target.is_some() && shared.winner.load(Ordering::Relaxed) < task.index {
            return SubtreeOutcome {
                found: None,
                best: None,
                exhausted: false,
                nodes: 0,
            };
        }
        dfs.run(task.depth);
        if dfs.found.is_some() {
            shared.winner.fetch_min(task.index, Ordering::Relaxed);
        }
        SubtreeOutcome {
            found: dfs.found,
            best: dfs.best,
            exhausted: !dfs.cut,
            nodes: dfs.nodes,
        }
    });
    (outcomes, prefix_nodes)
}

/// Find one selection with expanded size exactly n and every line-orbit load
/// at most u, or prove there is none.
pub fn solve_fixed_n(problem: &SearchProblem<'_>) -> FixedResult {
    let n = match problem.mode {
        SearchMode::FixedN(n) => n,
        SearchMode::Maximize => panic!("solve_fixed_n requires fixed-n mode"),
    };
    let total_mass: u64 = problem.system.point_orbit_sizes.iter().sum();
    let ctx = Ctx::new(problem);
    if n > total_mass.saturating_mul(ctx.caps.iter().map(|&c| c as u64).max().unwrap_or(1)) {
        return FixedResult {
            outcome: FixedOutcome::Infeasible,
            nodes: 0,
        };
    }
    let (outcomes, prefix_nodes) = run_subtrees(problem, &ctx);
    let nodes = prefix_nodes + outcomes.iter().map(|o| o.nodes).sum::<u64>();
    for o in &outcomes {
        if let Some(x) = &o.found {
            return FixedResult {
                outcome: FixedOutcome::Found(solution_from_x(problem.system, problem.u, x)),
                nodes,
            };
        }
    }
    // aborted subtrees only happen after some subtree found a solution
    if outcomes.iter().all(|o| o.exhausted) {
        FixedResult {
            outcome: FixedOutcome::Infeasible,
            nodes,
        }
    } else {
        FixedResult {
            outcome: FixedOutcome::Inconclusive,
            nodes,
        }
    }
}

/// Search the whole tree for the largest feasible size. The witness is the
/// deterministic aggregation of per-subtree first-found maxima: largest n
/// first, lexicographically smallest x on ties.
pub fn maximize(problem: &SearchProblem<'_>) -> MaximizeResult {
    assert!(
        matches!(problem.mode, SearchMode::Maximize),
        "maximize requires maximize mode"
    );
    let ctx = Ctx::new(problem);
    let (outcomes, prefix_nodes) = run_subtrees(problem, &ctx);
    let nodes = prefix_nodes + outcomes.iter().map(|o| o.nodes).sum::<u64>();
    let optimal = outcomes.iter().all(|o| o.exhausted);
    let mut best: Option<(u64, Vec<u32>)> = None;
    for o in &outcomes {
        if let Some((n, x)) = &o.best {
            let better = match &best {
                None => true,
                Some((bn, bx)) => n > bn || (n == bn && x < bx),
            };
            if better {
                best = Some((*n, x.clone()));
            }
        }
    }
    MaximizeResult {
        best: best.map(|(_, x)| solution_from_x(problem.system, problem.u, &x)),
        optimal,
        nodes,
    }
}

// ---------------------------------------------------------------------------
// Arc-level operations on the plane
// ---------------------------------------------------------------------------

/// A point multiset: (point index, multiplicity) pairs, sorted by index.
pub type PointMultiset = Vec<(u32, u32)>;

/// Expand an orbit selection into the union of its orbits, respecting
/// multiplicities.
pub fn expand(x: &[u32], partition: &OrbitPartition) -> PointMultiset {
    let mut out: PointMultiset = Vec::new();
    for (j, &mult) in x.iter().enumerate() {
        if mult == 0 {
            continue;
        }
        for &p in &partition.point_orbits[j] {
            out.push((p, mult));
        }
    }
    out.sort_unstable();
    out
}

pub fn multiset_size(points: &[(u32, u32)]) -> u64 {
    points.iter().map(|&(_, m)| m as u64).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub max_line_count: u64,
    pub is_arc: bool,
    pub attains_u: bool,
    pub projective: bool,
}

fn line_loads(points: &[(u32, u32)], plane: &Plane) -> Result<Vec<u64>> {
    let mut loads = vec![0u64; plane.num_lines()];
    for &(p, mult) in points {
        if p as usize >= plane.num_points() {
            return Err(Error::InvalidParameter(format!(
                "point index {} out of range",
                p
            )));
        }
        for &l in plane.lines_through_point(p as usize) {
            loads[l as usize] += mult as u64;
        }
    }
    Ok(loads)
}

/// Check the arc property directly against plane incidence, independently of
/// any solver data.
pub fn verify(points: &[(u32, u32)], plane: &Plane, u: u32) -> Result<VerifyReport> {
    let loads = line_loads(points, plane)?;
    let max_line_count = loads.iter().copied().max().unwrap_or(0);
    Ok(VerifyReport {
        max_line_count,
        is_arc: max_line_count <= u as u64,
        attains_u: max_line_count == u as u64,
        projective: points.iter().all(|&(_, m)| m <= 1),
    })
}

/// Census of lines by their intersection count with the arc.
pub fn secant_distribution(points: &[(u32, u32)], plane: &Plane) -> Result<BTreeMap<u64, u64>> {
    let loads = line_loads(points, plane)?;
    let mut hist = BTreeMap::new();
    for &l in &loads {
        *hist.entry(l).or_insert(0u64) += 1;
    }
    Ok(hist)
}

/// Greedily add admissible points (ascending index) until the arc is
/// extension-maximal. Added points get multiplicity 1.
pub fn extend(points: &[(u32, u32)], plane: &Plane, u: u32) -> Result<PointMultiset> {
    let report = verify(points, plane, u)?;
    if !report.is_arc {
        return Err(Error::InvalidParameter(
            "cannot extend: input already violates the arc condition".into(),
        ));
    }
    let mut loads = line_loads(points, plane)?;
    let mut mult = vec![0u32; plane.num_points()];
    for &(p, m) in points {
        mult[p as usize] += m;
    }
    for cand in 0..plane.num_points() {
        if mult[cand] > 0 {
            continue;
        }
        let admissible = plane
            .lines_through_point(cand)
            .iter()
            .all(|&l| loads[l as usize] < u as u64);
        if admissible {
            mult[cand] = 1;
            for &l in plane.lines_through_point(cand) {
                loads[l as usize] += 1;
            }
        }
    }
    Ok(mult
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m > 0)
        .map(|(p, &m)| (p as u32, m))
        .collect())
}

/// True iff the multiset is invariant under every generator.
pub fn group_invariant(
    points: &[(u32, u32)],
    plane: &Plane,
    generators: &[Mat3],
) -> Result<bool> {
    for g in generators {
        let perm = point_permutation(plane, g)?;
        let mut image: PointMultiset = points
            .iter()
            .map(|&(p, m)| (perm[p as usize], m))
            .collect();
        image.sort_unstable();
        if image != points {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{condense, orbits, singer_lift};
    use crate::ring::GaloisRing;

    fn z4_setup() -> (Plane, OrbitPartition, CondensedSystem) {
        let ring = GaloisRing::new(2, 1, 2, None).unwrap();
        let plane = Plane::new(&ring).unwrap();
        let part = orbits(&[], &plane).unwrap();
        let sys = condense(&plane, &part);
        (plane, part, sys)
    }

    /// Independent oracle: exhaustive search over all point subsets with
    /// load pruning, using only the plane incidence lists.
    fn brute_force_max_arc(plane: &Plane, u: u32) -> (u64, Vec<u32>) {
        fn rec(
            plane: &Plane,
            u: u64,
            next: usize,
            loads: &mut Vec<u64>,
            chosen: &mut Vec<u32>,
            best: &mut (u64, Vec<u32>),
        ) {
            let remaining = (plane.num_points() - next) as u64;
            if chosen.len() as u64 + remaining <= best.0 {
                return;
            }
            if next == plane.num_points() {
                if (chosen.len() as u64) > best.0 {
                    *best = (chosen.len() as u64, chosen.clone());
                }
                return;
            }
            let ok = plane
                .lines_through_point(next)
                .iter()
                .all(|&l| loads[l as usize] < u);
            if ok {
                for &l in plane.lines_through_point(next) {
                    loads[l as usize] += 1;
                }
                chosen.push(next as u32);
                rec(plane, u, next + 1, loads, chosen, best);
                chosen.pop();
                for &l in plane.lines_through_point(next) {
                    loads[l as usize] -= 1;
                }
            }
            rec(plane, u, next + 1, loads, chosen, best);
        }
        let mut loads = vec![0u64; plane.num_lines()];
        let mut chosen = Vec::new();
        let mut best = (0, Vec::new());
        rec(plane, u as u64, 0, &mut loads, &mut chosen, &mut best);
        best
    }

    #[test]
    fn fixed_n_zero_gives_the_empty_arc() {
        let (_, _, sys) = z4_setup();
        let problem = SearchProblem {
            system: &sys,
            u: 2,
            mode: SearchMode::FixedN(0),
            kind: ArcKind::Projective,
            budget: Budget::default(),
        };
        let result = solve_fixed_n(&problem);
        match result.outcome {
            FixedOutcome::Found(sol) => {
                assert_eq!(sol.n, 0);
                assert!(sol.x.iter().all(|&v| v == 0));
                assert!(sol.slack.iter().all(|&y| y == 2));
                assert!(!sol.attains_u);
            }
            other => panic!("expected empty solution, got {:?}", other),
        }
    }

    #[test]
    fn maximize_matches_brute_force_on_z4() {
        let (plane, part, sys) = z4_setup();
        let (oracle_n, _witness) = brute_force_max_arc(&plane, 2);
        let problem = SearchProblem {
            system: &sys,
            u: 2,
            mode: SearchMode::Maximize,
            kind: ArcKind::Projective,
            budget: Budget::default(),
        };
        let result = maximize(&problem);
        assert!(result.optimal);
        let sol = result.best.unwrap();
        assert_eq!(sol.n, oracle_n);
        // the witness passes independent verification
        let points = expand(&sol.x, &part);
        let report = verify(&points, &plane, 2).unwrap();
        assert!(report.is_arc);
        assert_eq!(report.max_line_count, 2);
    }

    #[test]
    fn slack_matches_independent_secant_counts() {
        let ring = GaloisRing::new(2, 2, 2, None).unwrap();
        let plane = Plane::new(&ring).unwrap();
        let a = singer_lift(&ring).unwrap();
        let part = orbits(&[a], &plane).unwrap();
        let sys = condense(&plane, &part);
        let problem = SearchProblem {
            system: &sys,
            u: 8,
            mode: SearchMode::FixedN(126),
            kind: ArcKind::Projective,
            budget: Budget::default(),
        };
        let result = solve_fixed_n(&problem);
        let sol = match result.outcome {
            FixedOutcome::Found(sol) => sol,
            other => panic!("no solution: {:?}", other),
        };
        assert_eq!(sol.x.iter().filter(|&&v| v == 1).count(), 6);
        let points = expand(&sol.x, &part);
        assert_eq!(multiset_size(&points), 126);
        // slack identity: y_t = u - |arc ∩ L| for any line L in orbit t
        let loads = line_loads(&points, &plane).unwrap();
        for (t, orbit) in part.line_orbits.iter().enumerate() {
            for &l in orbit {
                assert_eq!(8 - loads[l as usize], sol.slack[t] as u64);
            }
        }
        // group invariance of the expanded arc
        assert!(group_invariant(&points, &plane, &[a]).unwrap());
    }

    #[test]
    fn multiarc_mode_allows_multiplicities() {
        let (plane, part, sys) = z4_setup();
        // a single point with multiplicity 2 is a (2,2)-multiarc
        let problem = SearchProblem {
            system: &sys,
            u: 2,
            mode: SearchMode::FixedN(2),
            kind: ArcKind::Multiarc { cap: None },
            budget: Budget::default(),
        };
        let result = solve_fixed_n(&problem);
        let sol = match result.outcome {
            FixedOutcome::Found(sol) => sol,
            other => panic!("no solution: {:?}", other),
        };
        assert_eq!(sol.n, 2);
        let points = expand(&sol.x, &part);
        let report = verify(&points, &plane, 2).unwrap();
        assert!(report.is_arc);
        if sol.x.contains(&2) {
            assert!(!report.projective);
        }
        // a multiplicity-2 orbit contributes each point twice
        let doubled = expand(&[2, 0, 0], &part);
        assert_eq!(doubled, vec![(part.point_orbits[0][0], 2)]);
    }

    #[test]
    fn budget_exhaustion_is_reported_as_inconclusive() {
        let (_, _, sys) = z4_setup();
        let problem = SearchProblem {
            system: &sys,
            u: 2,
            // unreachable size: max is far below 28 at u = 2
            mode: SearchMode::FixedN(20),
            kind: ArcKind::Projective,
            budget: Budget {
                max_nodes: Some(50),
                max_seconds: None,
            },
        };
        let result = solve_fixed_n(&problem);
        assert!(matches!(result.outcome, FixedOutcome::Inconclusive));
        // with no budget the same size is proven infeasible
        let problem = SearchProblem {
            system: &sys,
            u: 2,
            mode: SearchMode::FixedN(20),
            kind: ArcKind::Projective,
            budget: Budget::default(),
        };
        assert!(matches!(
            solve_fixed_n(&problem).outcome,
            FixedOutcome::Infeasible
        ));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let ring = GaloisRing::new(2, 2, 2, None).unwrap();
        let plane = Plane::new(&ring).unwrap();
        let a = singer_lift(&ring).unwrap();
        let part = orbits(&[a], &plane).unwrap();
        let sys = condense(&plane, &part);
        let run = |workers: usize| {
            crate::par::run_with_workers(workers, || {
                let problem = SearchProblem {
                    system: &sys,
                    u: 2,
                    mode: SearchMode::Maximize,
                    kind: ArcKind::Projective,
                    budget: Budget::default(),
                };
                let r = maximize(&problem);
                r.best.map(|s| (s.n, s.x))
            })
        };
        let single = run(1);
        let multi = run(4);
        assert_eq!(single, multi);

        let run_fixed = |workers: usize| {
            crate::par::run_with_workers(workers, || {
                let problem = SearchProblem {
                    system: &sys,
                    u: 8,
                    mode: SearchMode::FixedN(126),
                    kind: ArcKind::Projective,
                    budget: Budget::default(),
                };
                match solve_fixed_n(&problem).outcome {
                    FixedOutcome::Found(s) => Some(s.x),
                    _ => None,
                }
            })
        };
        assert_eq!(run_fixed(1), run_fixed(4));
    }

    #[test]
    fn extend_is_deterministic_and_maximal() {
        let (plane, _, _) = z4_setup();
        let empty: PointMultiset = Vec::new();
        let ext = extend(&empty, &plane, 2).unwrap();
        let report = verify(&ext, &plane, 2).unwrap();
        assert!(report.is_arc);
        // extension-maximal: no further point fits
        let again = extend(&ext, &plane, 2).unwrap();
        assert_eq!(again, ext);
        // bounded by the brute-force maximum
        let (oracle_n, _) = brute_force_max_arc(&plane, 2);
        assert!(multiset_size(&ext) <= oracle_n);
        // bad input is rejected
        let bad: PointMultiset = (0..10).map(|p| (p, 1)).collect();
        if !verify(&bad, &plane, 2).unwrap().is_arc {
            assert!(extend(&bad, &plane, 2).is_err());
        }
    }

    #[test]
    fn verify_rejects_out_of_range_points() {
        let (plane, _, _) = z4_setup();
        let bad: PointMultiset = vec![(1000, 1)];
        assert!(verify(&bad, &plane, 2).is_err());
    }

    #[test]
    fn single_point_has_max_line_count_one() {
        let (plane, _, _) = z4_setup();
        let single: PointMultiset = vec![(0, 1)];
        let report = verify(&single, &plane, 5).unwrap();
        assert_eq!(report.max_line_count, 1);
        assert!(report.projective);
        let hist = secant_distribution(&single, &plane).unwrap();
        let lines_through = plane.lines_through_point(0).len() as u64;
        assert_eq!(hist[&1], lines_through);
        assert_eq!(hist[&0], plane.num_lines() as u64 - lines_through);
        // empty arc: all lines have intersection 0
        let empty_hist = secant_distribution(&Vec::new(), &plane).unwrap();
        assert_eq!(empty_hist[&0], plane.num_lines() as u64);
    }
}
