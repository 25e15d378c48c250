//! Randomized absorber: for each clique size r = 2..k-1, a level of m
//! disjoint friendly r-cliques inside the chosen friendly vertices, such that
//! every chosen vertex of the next part extends many of them.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::analysis::{friendly_prefix_ok, friendly_vertices, RTuple};
use crate::bits;
use crate::constants::Constants;
use crate::error::{Error, Result, StageFailure};
use crate::order::LeftGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Absorber {
    /// Clique size r mapped to its m tuples.
    pub levels: BTreeMap<usize, Vec<RTuple>>,
    /// Per part, the n-k+1 friendly vertices the pipeline works inside.
    pub a_star: Vec<Vec<usize>>,
}

impl Absorber {
    pub fn empty(a_star: Vec<Vec<usize>>) -> Self {
        Self {
            levels: BTreeMap::new(),
            a_star,
        }
    }

    pub fn level(&self, r: usize) -> Option<&[RTuple]> {
        self.levels.get(&r).map(Vec::as_slice)
    }

    /// All absorber vertices, level by level.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels
            .values()
            .flatten()
            .flat_map(|t| t.vertices().iter().copied())
    }

    /// Vertices of `part` used by levels of size at least `min_level`.
    pub fn used_in_part(&self, part: usize, min_level: usize) -> Vec<usize> {
        self.levels
            .range(min_level..)
            .flat_map(|(_, ts)| ts.iter().filter_map(move |t| t.vertices().get(part).copied()))
            .collect()
    }

    /// Checks disjointness, level sizes, friendliness and absorption against `l`.
    pub fn validate(&self, l: &LeftGraph, constants: &Constants) -> Result<()> {
        let mut seen = vec![false; l.num_vertices()];
        for (&r, tuples) in &self.levels {
            if tuples.len() != constants.m {
                return Err(Error::Structural(format!(
                    "level {r} has {} tuples, expected {}",
                    tuples.len(),
                    constants.m
                )));
            }
            for t in tuples {
                if t.len() != r {
                    return Err(Error::Structural(format!(
                        "level {r} holds a tuple of length {}",
                        t.len()
                    )));
                }
                for (i, &v) in t.vertices().iter().enumerate() {
                    if v >= seen.len() || seen[v] {
                        return Err(Error::Structural(format!("vertex {v} used twice in the absorber")));
                    }
                    seen[v] = true;
                    if !self.a_star[i].contains(&v) {
                        return Err(Error::Structural(format!("vertex {v} is outside the chosen part {i}")));
                    }
                }
                let v = t.vertices();
                if !l.is_clique(v) || !(1..=r).all(|len| friendly_prefix_ok(l, &v[..len], r, &constants.thresholds)) {
                    return Err(Error::Structural(format!("tuple {v:?} is not a friendly clique")));
                }
            }
            if let Some(f) = absorption_failure(l, self, r, constants.thresholds.absorber_extension) {
                return Err(f.into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorberOptions {
    pub max_retries: usize,
    /// Enumerate all candidates when the search space is at most this large;
    /// otherwise sample.
    pub candidate_budget: u64,
    /// Rejection-sampling draws allowed per selected tuple.
    pub sample_attempts: usize,
}

impl Default for AbsorberOptions {
    fn default() -> Self {
        Self {
            max_retries: 20,
            candidate_budget: 10_000_000,
            sample_attempts: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorberBuild {
    pub absorber: Absorber,
    /// 1 on first-try success.
    pub attempts: usize,
}

/// The lowest-id `n-k+1` friendly vertices of every part.
pub fn select_a_star(l: &LeftGraph, constants: &Constants) -> Result<Vec<Vec<usize>>> {
    if !l.layout().is_equal_parts() {
        return Err(Error::precondition("parts must have equal sizes"));
    }
    let (n, k) = (l.n(), l.k());
    if n < k {
        return Err(Error::precondition(format!(
            "part size {n} leaves no room for n-k+1 >= 1"
        )));
    }
    let want = n - k + 1;
    let friendly = friendly_vertices(l, constants.thresholds.friendly_vertex);
    let mut out = Vec::with_capacity(k);
    for (p, mut f) in friendly.into_iter().enumerate() {
        if f.len() < want {
            let mut fail = StageFailure::new(
                "friendly_vertices",
                format!("part {p} has {} friendly vertices, need {want}", f.len()),
            );
            fail.part = Some(p);
            return Err(fail.into());
        }
        f.truncate(want);
        out.push(f);
    }
    Ok(out)
}

/// Number of tuples of level `r` that `v` extends to an (r+1)-clique.
pub fn absorption_degree(l: &LeftGraph, absorber: &Absorber, v: usize, r: usize) -> Result<usize> {
    let level = absorber
        .level(r)
        .ok_or_else(|| Error::parameter(format!("absorber has no level {r}")))?;
    l.layout().check_vertex(v)?;
    if l.layout().part_of(v) != r {
        return Err(Error::parameter(format!("vertex {v} is not in part {r}")));
    }
    Ok(extension_count(l, level, v))
}

fn extension_count(l: &LeftGraph, level: &[RTuple], v: usize) -> usize {
    level
        .iter()
        .filter(|q| q.vertices().iter().all(|&u| l.adjacent(u, v)))
        .count()
}

fn absorption_failure(l: &LeftGraph, absorber: &Absorber, r: usize, threshold: f64) -> Option<StageFailure> {
    let level = absorber.level(r)?;
    absorber.a_star[r].iter().find_map(|&v| {
        let deg = extension_count(l, level, v);
        ((deg as f64) < threshold).then(|| {
            let mut f = StageFailure::new(
                "absorber",
                format!("vertex {v} extends {deg} tuples of level {r}, need {threshold}"),
            );
            f.level = Some(r);
            f.vertex = Some(v);
            f
        })
    })
}

/// Builds the absorber, retrying the whole construction with fresh
/// randomness up to `opts.max_retries` times.
pub fn build_absorber<R: Rng + ?Sized>(
    l: &LeftGraph,
    a_star: &[Vec<usize>],
    constants: &Constants,
    rng: &mut R,
    opts: AbsorberOptions,
) -> Result<AbsorberBuild> {
    let k = l.k();
    if a_star.len() != k {
        return Err(Error::parameter(format!(
            "a_star has {} parts, graph has {k}",
            a_star.len()
        )));
    }
    for (p, s) in a_star.iter().enumerate() {
        for &v in s {
            l.layout().check_vertex(v)?;
            if l.layout().part_of(v) != p {
                return Err(Error::parameter(format!("a_star part {p} contains vertex {v}")));
            }
        }
    }
    if k < 3 {
        return Ok(AbsorberBuild {
            absorber: Absorber::empty(a_star.to_vec()),
            attempts: 1,
        });
    }
    let mut last = None;
    for attempt in 0..=opts.max_retries {
        match attempt_build(l, a_star, constants, rng, opts) {
            Ok(absorber) => {
                return Ok(AbsorberBuild {
                    absorber,
                    attempts: attempt + 1,
                })
            }
            Err(f) => last = Some(f),
        }
    }
    let mut f = last.expect("at least one attempt");
    f.message = format!("{} (after {} attempts)", f.message, opts.max_retries + 1);
    Err(f.into())
}

#[allow(clippy::result_large_err)]
fn attempt_build<R: Rng + ?Sized>(
    l: &LeftGraph,
    a_star: &[Vec<usize>],
    constants: &Constants,
    rng: &mut R,
    opts: AbsorberOptions,
) -> std::result::Result<Absorber, StageFailure> {
    let k = l.k();
    let m = constants.m;
    let mut used = vec![false; l.num_vertices()];
    let mut absorber = Absorber::empty(a_star.to_vec());
    for r in 2..k {
        let avail: Vec<Vec<usize>> = a_star[..r]
            .iter()
            .map(|s| s.iter().copied().filter(|&v| !used[v]).collect())
            .collect();
        let space: f64 = avail.iter().map(|s| s.len() as f64).product();
        let chosen = if space <= opts.candidate_budget as f64 {
            select_enumerated(l, &avail, r, m, constants, rng)
        } else {
            select_sampled(l, &avail, r, m, constants, rng, opts.sample_attempts)
        };
        if chosen.len() < m {
            let mut f = StageFailure::new(
                "absorber",
                format!(
                    "only {} disjoint friendly {r}-cliques available, need {m}",
                    chosen.len()
                ),
            );
            f.level = Some(r);
            return Err(f);
        }
        for t in &chosen {
            for &v in t.vertices() {
                used[v] = true;
            }
        }
        absorber.levels.insert(r, chosen);
    }
    let th = constants.thresholds.absorber_extension;
    for r in 2..k {
        if let Some(f) = absorption_failure(l, &absorber, r, th) {
            return Err(f);
        }
    }
    Ok(absorber)
}

/// Enumerates every friendly r-clique over `avail`, shuffles, and keeps
/// the first `m` that are pairwise disjoint.
fn select_enumerated<R: Rng + ?Sized>(
    l: &LeftGraph,
    avail: &[Vec<usize>],
    r: usize,
    m: usize,
    constants: &Constants,
    rng: &mut R,
) -> Vec<RTuple> {
    let layout = l.layout();
    let masks: Vec<Vec<u64>> = avail
        .iter()
        .enumerate()
        .map(|(p, s)| bits::mask_from_locals(layout.part_size(p), s.iter().map(|&v| layout.local(v))))
        .collect();
    let mut flat: Vec<u32> = Vec::new();
    let mut prefix = Vec::with_capacity(r);
    enumerate_cliques(l, &masks, r, constants, &mut prefix, &mut flat);
    let count = flat.len() / r;
    let mut idx: Vec<usize> = (0..count).collect();
    idx.shuffle(rng);
    let mut taken = vec![false; l.num_vertices()];
    let mut out = Vec::with_capacity(m);
    for i in idx {
        if out.len() == m {
            break;
        }
        let t = &flat[i * r..(i + 1) * r];
        if t.iter().all(|&v| !taken[v as usize]) {
            t.iter().for_each(|&v| taken[v as usize] = true);
            out.push(RTuple::from_vec(t.iter().map(|&v| v as usize).collect()));
        }
    }
    out
}

fn enumerate_cliques(
    l: &LeftGraph,
    masks: &[Vec<u64>],
    r: usize,
    constants: &Constants,
    prefix: &mut Vec<usize>,
    out: &mut Vec<u32>,
) {
    let depth = prefix.len();
    if depth == r {
        out.extend(prefix.iter().map(|&v| v as u32));
        return;
    }
    let cand = l.common_mask(prefix, depth, Some(&masks[depth]));
    let start = l.layout().range(depth).start;
    for i in bits::ones(&cand) {
        prefix.push(start + i);
        if friendly_prefix_ok(l, prefix, r, &constants.thresholds) {
            enumerate_cliques(l, masks, r, constants, prefix, out);
        }
        prefix.pop();
    }
}

/// Picks `m` tuples one at a time, each uniform among the friendly cliques
/// disjoint from earlier picks, by rejection sampling.
fn select_sampled<R: Rng + ?Sized>(
    l: &LeftGraph,
    avail: &[Vec<usize>],
    r: usize,
    m: usize,
    constants: &Constants,
    rng: &mut R,
    attempts: usize,
) -> Vec<RTuple> {
    let mut pools: Vec<Vec<usize>> = avail.to_vec();
    let mut out = Vec::with_capacity(m);
    let mut tuple = vec![0usize; r];
    let mut pos = vec![0usize; r];
    'pick: while out.len() < m {
        if pools.iter().any(Vec::is_empty) {
            break;
        }
        for _ in 0..attempts {
            for i in 0..r {
                pos[i] = rng.gen_range(0..pools[i].len());
                tuple[i] = pools[i][pos[i]];
            }
            if l.is_clique(&tuple) && (1..=r).all(|len| friendly_prefix_ok(l, &tuple[..len], r, &constants.thresholds))
            {
                for i in 0..r {
                    pools[i].swap_remove(pos[i]);
                }
                out.push(RTuple::from_vec(tuple.clone()));
                continue 'pick;
            }
        }
        break;
    }
    out
}
