//! Gradual matching: build an extendable perfect 2-set from a filtered
//! bipartite matching plus the absorber, extend it one part at a time, and
//! read the disjoint k-cliques off the final star subset.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::absorber::{build_absorber, select_a_star, Absorber, AbsorberOptions};
use crate::analysis::RTuple;
use crate::bits;
use crate::constants::Constants;
use crate::error::{Error, Result, StageFailure};
use crate::matching::{hopcroft_karp, BipartiteGraph};
use crate::order::{LeftGraph, VertexOrder};
use crate::seed::RngSeed;
use crate::tournament::Tournament;

/// n disjoint r-tuples covering the first r parts; `star_subset` indexes the
/// n-k+1 of them that are cliques inside the chosen friendly vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectRSet {
    pub r: usize,
    pub tuples: Vec<RTuple>,
    pub star_subset: Vec<usize>,
}

impl PerfectRSet {
    pub fn star_tuples(&self) -> impl Iterator<Item = &RTuple> + '_ {
        self.star_subset.iter().map(|&i| &self.tuples[i])
    }

    fn non_star_tuples(&self) -> Vec<&RTuple> {
        let star: HashSet<usize> = self.star_subset.iter().copied().collect();
        (0..self.tuples.len())
            .filter(|i| !star.contains(i))
            .map(|i| &self.tuples[i])
            .collect()
    }

    /// Checks disjointness, coverage of parts `0..r`, and that star tuples
    /// are cliques drawn from `a_star`.
    pub fn validate(&self, l: &LeftGraph, a_star: &[Vec<usize>]) -> Result<()> {
        let layout = l.layout();
        let mut seen = vec![false; l.num_vertices()];
        for t in &self.tuples {
            if t.len() != self.r {
                return Err(Error::Structural(format!(
                    "tuple {:?} has length {}",
                    t.vertices(),
                    t.len()
                )));
            }
            for (i, &v) in t.vertices().iter().enumerate() {
                if v >= seen.len() || layout.part_of(v) != i || seen[v] {
                    return Err(Error::Structural(format!(
                        "tuple {:?} is not a fresh transversal",
                        t.vertices()
                    )));
                }
                seen[v] = true;
            }
        }
        if (0..self.r).any(|p| layout.range(p).any(|v| !seen[v])) {
            return Err(Error::Structural(
                "tuples do not cover every vertex of the first parts".into(),
            ));
        }
        for t in self.star_tuples() {
            let v = t.vertices();
            if !l.is_clique(v) || v.iter().enumerate().any(|(i, u)| !a_star[i].contains(u)) {
                return Err(Error::Structural(format!(
                    "star tuple {v:?} is not a clique in the chosen vertices"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub edges_before: usize,
    pub edges_after: usize,
    /// Largest number of removed edges at a single left tuple or right vertex.
    pub max_removed_per_vertex: usize,
}

/// Statistics for one matching stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: String,
    pub left: usize,
    pub right: usize,
    pub filter: FilterStats,
    pub matching_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptTrace {
    pub seed: RngSeed,
    pub absorber_attempts: usize,
    /// The absorber this attempt worked with, for replaying a failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub absorber: Option<Absorber>,
    pub stages: Vec<StageStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<StageFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PackingStatus {
    Success,
    StageFailure(StageFailure),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingResult {
    pub status: PackingStatus,
    pub cliques: Vec<RTuple>,
    pub trace: Vec<AttemptTrace>,
}

impl PackingResult {
    pub fn is_success(&self) -> bool {
        self.status == PackingStatus::Success
    }

    pub fn failure(&self) -> Option<&StageFailure> {
        match &self.status {
            PackingStatus::StageFailure(f) => Some(f),
            PackingStatus::Success => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingOptions {
    /// Extra pipeline attempts, each with a fresh absorber.
    pub retries: usize,
    pub absorber: AbsorberOptions,
    /// Re-check the common-neighborhood guarantee after every stage.
    pub check_extendable: bool,
}

impl Default for PackingOptions {
    fn default() -> Self {
        Self {
            retries: 3,
            absorber: AbsorberOptions::default(),
            check_extendable: true,
        }
    }
}

/// Per part, the chosen friendly vertices not reserved by absorber levels
/// that reach that part. Part 0 loses every absorber vertex.
pub fn compute_b_sets(absorber: &Absorber, k: usize) -> Vec<Vec<usize>> {
    (0..k)
        .map(|p| {
            let used: HashSet<usize> = absorber.used_in_part(p, (p + 1).max(2)).into_iter().collect();
            absorber.a_star[p]
                .iter()
                .copied()
                .filter(|v| !used.contains(v))
                .collect()
        })
        .collect()
}

fn part_masks(l: &LeftGraph, sets: &[Vec<usize>]) -> Vec<Vec<u64>> {
    let layout = l.layout();
    sets.iter()
        .enumerate()
        .map(|(p, s)| bits::mask_from_locals(layout.part_size(p), s.iter().map(|&v| layout.local(v))))
        .collect()
}

/// Edges `p v` (v adjacent to every coordinate of p) whose joint common
/// neighborhood in each later B-set meets the threshold for r = |p|.
fn filtered_graph(
    l: &LeftGraph,
    left: &[RTuple],
    right: &[usize],
    b_masks: &[Vec<u64>],
    constants: &Constants,
) -> (BipartiteGraph, FilterStats) {
    let r = left.first().map_or(1, RTuple::len);
    let threshold = constants.thresholds.edge(r);
    let k = l.k();
    let mut stats = FilterStats::default();
    let mut removed_right = vec![0usize; right.len()];
    let mut scratch = Vec::with_capacity(r + 1);
    let adj = left
        .iter()
        .map(|p| {
            let mut keep = Vec::new();
            let mut removed = 0;
            for (j, &v) in right.iter().enumerate() {
                if !p.vertices().iter().all(|&u| l.adjacent(u, v)) {
                    continue;
                }
                stats.edges_before += 1;
                scratch.clear();
                scratch.extend_from_slice(p.vertices());
                scratch.push(v);
                let friendly = (r + 1..k).all(|t| l.common_count_masked(&scratch, t, &b_masks[t]) as f64 >= threshold);
                if friendly {
                    keep.push(j);
                } else {
                    removed += 1;
                    removed_right[j] += 1;
                }
            }
            stats.max_removed_per_vertex = stats.max_removed_per_vertex.max(removed);
            keep
        })
        .collect();
    let g = BipartiteGraph::new(right.len(), adj);
    stats.edges_after = g.num_edges();
    stats.max_removed_per_vertex = stats
        .max_removed_per_vertex
        .max(removed_right.into_iter().max().unwrap_or(0));
    (g, stats)
}

/// The first matching graph between B-sets of parts 0 and 1, friendly-filtered.
pub fn friendly_h1_filter(
    l: &LeftGraph,
    b_sets: &[Vec<usize>],
    constants: &Constants,
) -> (BipartiteGraph, FilterStats) {
    let left: Vec<RTuple> = b_sets[0].iter().map(|&v| RTuple::from_vec(vec![v])).collect();
    filtered_graph(l, &left, &b_sets[1], &part_masks(l, b_sets), constants)
}

/// Matching graph between r-tuples `j_r` and the B-set of part r, friendly-filtered.
pub fn friendly_hr_filter(
    l: &LeftGraph,
    j_r: &[RTuple],
    b_sets: &[Vec<usize>],
    constants: &Constants,
    r: usize,
) -> Result<(BipartiteGraph, FilterStats)> {
    if r == 0 || r >= l.k() || j_r.iter().any(|p| p.len() != r) {
        return Err(Error::parameter(format!("tuples must have length r = {r} < k")));
    }
    Ok(filtered_graph(l, j_r, &b_sets[r], &part_masks(l, b_sets), constants))
}

fn expected_b_size(n: usize, k: usize, m: usize, part: usize) -> isize {
    let levels = if part == 0 { k.saturating_sub(2) } else { k - 1 - part };
    (n - k + 1) as isize - (levels * m) as isize
}

fn check_b_sizes(b_sets: &[Vec<usize>], n: usize, k: usize, m: usize) -> Result<()> {
    for (p, b) in b_sets.iter().enumerate() {
        let want = expected_b_size(n, k, m, p);
        if b.len() as isize != want {
            return Err(Error::Structural(format!(
                "B-set of part {p} has {} vertices, expected {want}",
                b.len()
            )));
        }
    }
    Ok(())
}

fn match_or_fail(stage: &str, g: &BipartiteGraph, left: &[RTuple], right: &[usize]) -> Result<Vec<(usize, usize)>> {
    let m = hopcroft_karp(g);
    if m.size() == left.len() {
        return Ok(m.pairs());
    }
    let mut f = StageFailure::new(
        stage,
        format!("maximum matching has {} of {} edges", m.size(), left.len()),
    );
    if let Some(h) = m.hall_violator(g) {
        debug_assert!(h.verify(g));
        f.hall_set = Some(h.left.iter().map(|&i| left[i].vertices().to_vec()).collect());
        f.hall_neighborhood = Some(h.neighborhood.iter().map(|&j| right[j]).collect());
    }
    Err(f.into())
}

/// The extendability requirement on star tuples of a perfect r-set:
/// at least the r-threshold common neighbors in every later part.
fn check_extendable(l: &LeftGraph, set: &PerfectRSet, constants: &Constants) -> Result<()> {
    let th = constants.thresholds.extendable(set.r);
    for t in set.star_tuples() {
        for part in set.r..l.k() {
            let c = l.common_count(t.vertices(), part);
            if (c as f64) < th {
                let mut f = StageFailure::new(
                    format!("extendable_{}", set.r),
                    format!(
                        "tuple {:?} has {c} common neighbors in part {part}, need {th}",
                        t.vertices()
                    ),
                );
                f.tuple = Some(t.vertices().to_vec());
                f.part = Some(part);
                return Err(f.into());
            }
        }
    }
    Ok(())
}

fn leftovers(l: &LeftGraph, a_star: &[Vec<usize>], part: usize) -> Vec<usize> {
    let chosen: HashSet<usize> = a_star[part].iter().copied().collect();
    l.layout().range(part).filter(|v| !chosen.contains(v)).collect()
}

/// Perfect 2-set: a perfect matching of the filtered first graph, the
/// first two coordinates of every absorber tuple, and the leftover vertices
/// of parts 0 and 1 paired in ascending order.
pub fn build_p2(
    l: &LeftGraph,
    absorber: &Absorber,
    constants: &Constants,
    check: bool,
) -> Result<(PerfectRSet, StageStats)> {
    let (n, k, m) = (l.n(), l.k(), constants.m);
    let b_sets = compute_b_sets(absorber, k);
    check_b_sizes(&b_sets, n, k, m)?;
    let (g, filter) = friendly_h1_filter(l, &b_sets, constants);
    let left: Vec<RTuple> = b_sets[0].iter().map(|&v| RTuple::from_vec(vec![v])).collect();
    let pairs = match_or_fail("p2", &g, &left, &b_sets[1])?;
    let stats = StageStats {
        stage: "p2".into(),
        left: left.len(),
        right: b_sets[1].len(),
        filter,
        matching_size: pairs.len(),
    };
    let mut tuples: Vec<RTuple> = pairs
        .iter()
        .map(|&(i, j)| RTuple::from_vec(vec![b_sets[0][i], b_sets[1][j]]))
        .collect();
    tuples.extend(absorber.levels.values().flatten().map(|t| t.prefix(2)));
    let star = tuples.len();
    let rest0 = leftovers(l, &absorber.a_star, 0);
    let rest1 = leftovers(l, &absorber.a_star, 1);
    tuples.extend(rest0.iter().zip(&rest1).map(|(&a, &b)| RTuple::from_vec(vec![a, b])));
    let set = PerfectRSet {
        r: 2,
        tuples,
        star_subset: (0..star).collect(),
    };
    if check {
        check_extendable(l, &set, constants)?;
    }
    Ok((set, stats))
}

/// Star tuples of `p_r` that are not prefixes of absorber tuples longer than r.
pub fn j_set(p_r: &PerfectRSet, absorber: &Absorber) -> Vec<RTuple> {
    let r = p_r.r;
    let higher: HashSet<&[usize]> = absorber
        .levels
        .range(r + 1..)
        .flat_map(|(_, ts)| ts)
        .map(|t| &t.vertices()[..r])
        .collect();
    p_r.star_tuples()
        .filter(|t| !higher.contains(t.vertices()))
        .cloned()
        .collect()
}

/// Extends a perfect r-set to a perfect (r+1)-set through the filtered
/// r-th matching graph.
pub fn extend_set(
    l: &LeftGraph,
    p_r: &PerfectRSet,
    absorber: &Absorber,
    constants: &Constants,
    check: bool,
) -> Result<(PerfectRSet, StageStats)> {
    let (n, k, m) = (l.n(), l.k(), constants.m);
    let r = p_r.r;
    if r < 2 || r >= k {
        return Err(Error::parameter(format!(
            "cannot extend a perfect {r}-set with k = {k}"
        )));
    }
    let higher: Vec<&RTuple> = absorber.levels.range(r + 1..).flat_map(|(_, ts)| ts).collect();
    let j_r = j_set(p_r, absorber);
    let b_sets = compute_b_sets(absorber, k);
    check_b_sizes(&b_sets, n, k, m)?;
    let want = expected_b_size(n, k, m, r);
    if j_r.len() as isize != want {
        return Err(Error::Structural(format!(
            "J_{r} has {} tuples, expected {want}",
            j_r.len()
        )));
    }
    let stage = format!("extend_{}", r + 1);
    let (g, filter) = friendly_hr_filter(l, &j_r, &b_sets, constants, r)?;
    let pairs = match_or_fail(&stage, &g, &j_r, &b_sets[r])?;
    let stats = StageStats {
        stage,
        left: j_r.len(),
        right: b_sets[r].len(),
        filter,
        matching_size: pairs.len(),
    };
    let mut tuples: Vec<RTuple> = pairs.iter().map(|&(i, j)| j_r[i].extended(b_sets[r][j])).collect();
    tuples.extend(higher.iter().map(|t| t.prefix(r + 1)));
    let star = tuples.len();
    let rest = leftovers(l, &absorber.a_star, r);
    let non_star = p_r.non_star_tuples();
    tuples.extend(non_star.iter().zip(&rest).map(|(t, &v)| t.extended(v)));
    let set = PerfectRSet {
        r: r + 1,
        tuples,
        star_subset: (0..star).collect(),
    };
    if check {
        check_extendable(l, &set, constants)?;
    }
    Ok((set, stats))
}

/// True iff the tuples are pairwise disjoint, each has one vertex in every
/// part, and each is a clique of `l`.
pub fn verify_packing<T: AsRef<[usize]>>(l: &LeftGraph, cliques: &[T]) -> bool {
    let layout = l.layout();
    let mut seen = vec![false; l.num_vertices()];
    for c in cliques {
        let c = c.as_ref();
        if c.len() != l.k() {
            return false;
        }
        let mut parts = vec![false; l.k()];
        for &v in c {
            if v >= seen.len() || seen[v] || parts[layout.part_of(v)] {
                return false;
            }
            seen[v] = true;
            parts[layout.part_of(v)] = true;
        }
        if !l.is_clique(c) {
            return false;
        }
    }
    true
}

fn run_attempt(
    l: &LeftGraph,
    a_star: &[Vec<usize>],
    constants: &Constants,
    seed: RngSeed,
    opts: &PackingOptions,
    trace: &mut AttemptTrace,
) -> Result<Vec<RTuple>> {
    let built = build_absorber(l, a_star, constants, &mut seed.rng(), opts.absorber)?;
    trace.absorber_attempts = built.attempts;
    trace.absorber = Some(built.absorber.clone());
    let absorber = built.absorber;
    let (mut set, stats) = build_p2(l, &absorber, constants, opts.check_extendable)?;
    trace.stages.push(stats);
    while set.r < l.k() {
        let (next, stats) = extend_set(l, &set, &absorber, constants, opts.check_extendable)?;
        trace.stages.push(stats);
        set = next;
    }
    let mut cliques: Vec<RTuple> = set.star_tuples().cloned().collect();
    cliques.sort();
    Ok(cliques)
}

/// Runs the whole pipeline on `L_π(T)`. Stage failures are reported in the
/// result status; only invalid inputs return `Err`.
pub fn find_clique_packing(
    t: &Tournament,
    pi: &VertexOrder,
    constants: &Constants,
    seed: RngSeed,
    opts: PackingOptions,
) -> Result<PackingResult> {
    let layout = t.layout();
    if !layout.is_equal_parts() {
        return Err(Error::precondition(
            "parts must have equal sizes; reduce the tournament first",
        ));
    }
    let (n, k) = (layout.part_size(0), layout.k());
    if constants.k != k || constants.n != n {
        return Err(Error::parameter(format!(
            "constants are for k={}, n={} but the tournament has k={k}, n={n}",
            constants.k, constants.n
        )));
    }
    if (0..k).any(|p| expected_b_size(n, k, constants.m, p) < 1) {
        return Err(Error::precondition(format!(
            "n = {n} is too small for k = {k} and absorber size m = {}",
            constants.m
        )));
    }
    let l = LeftGraph::new(t, pi)?;
    let a_star = match select_a_star(&l, constants) {
        Ok(a) => a,
        Err(Error::Stage(f)) => {
            return Ok(PackingResult {
                status: PackingStatus::StageFailure(*f),
                cliques: Vec::new(),
                trace: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    // with no absorber levels the pipeline is deterministic
    let attempts = if k < 3 { 1 } else { opts.retries + 1 };
    let mut trace = Vec::new();
    for attempt in 0..attempts {
        let attempt_seed = seed.derive(attempt as u64, 0);
        let mut at = AttemptTrace {
            seed: attempt_seed,
            absorber_attempts: 0,
            absorber: None,
            stages: Vec::new(),
            failure: None,
        };
        match run_attempt(&l, &a_star, constants, attempt_seed, &opts, &mut at) {
            Ok(cliques) => {
                trace.push(at);
                debug_assert!(verify_packing(&l, &cliques));
                return Ok(PackingResult {
                    status: PackingStatus::Success,
                    cliques,
                    trace,
                });
            }
            Err(Error::Stage(f)) => {
                at.failure = Some(*f);
                trace.push(at);
            }
            Err(e) => return Err(e),
        }
    }
    let last = trace
        .last()
        .and_then(|a| a.failure.clone())
        .expect("failed attempt recorded");
    Ok(PackingResult {
        status: PackingStatus::StageFailure(last),
        cliques: Vec::new(),
        trace,
    })
}
