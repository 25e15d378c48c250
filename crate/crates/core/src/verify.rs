//! Monte Carlo drivers: sample random witnesses for the structural properties
//! and count how often each bound holds.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    check_property1_sample, check_property2_sample, check_property3, check_property4, unfriendly_counts,
    DirectionVector, Property2Options, RTuple,
};
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::order::{LeftGraph, VertexOrder};
use crate::seed::RngSeed;
use crate::tournament::Tournament;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// Edge density between disjoint tuples and a later part.
    P1,
    /// Friendly clique counts over large sets.
    P2,
    /// Size of Ŵ-inconsistent sets.
    P3,
    /// Size of D-consistent sets for a sequence within one part.
    P4,
    /// At most k-1 non-friendly vertices per part.
    Friendly,
}

impl std::str::FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "p1" => Ok(Self::P1),
            "2" | "p2" => Ok(Self::P2),
            "3" | "p3" => Ok(Self::P3),
            "4" | "p4" => Ok(Self::P4),
            "friendly" => Ok(Self::Friendly),
            _ => Err(Error::parameter(format!("unknown property {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub property: Property,
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub passes: usize,
    /// Trials outside the regime the property covers (counted as passes).
    pub informational: usize,
    /// Largest observed count divided by its bound (or bound divided by
    /// count for lower bounds); at most 1 when every trial passes.
    pub worst_ratio: f64,
    pub parameters: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Distinct tournaments the trials cycle through.
    pub tournaments: usize,
    /// Largest q (property 4) or d (property 3).
    pub max_len: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tournaments: 10,
            max_len: 5,
        }
    }
}

struct Outcome {
    pass: bool,
    informational: bool,
    ratio: f64,
}

fn upper(count: usize, bound: f64, pass: bool) -> Outcome {
    Outcome {
        pass,
        informational: false,
        ratio: count as f64 / bound.max(f64::MIN_POSITIVE),
    }
}

fn lower(count: f64, bound: f64, pass: bool) -> Outcome {
    Outcome {
        pass,
        informational: false,
        ratio: if count > 0.0 { bound / count } else { f64::INFINITY },
    }
}

/// `count` disjoint random transversal r-tuples.
fn random_tuples<R: Rng + ?Sized>(t: &Tournament, r: usize, count: usize, rng: &mut R) -> Vec<RTuple> {
    let layout = t.layout();
    let picks: Vec<Vec<usize>> = (0..r)
        .map(|p| {
            index::sample(rng, layout.part_size(p), count)
                .into_iter()
                .map(|i| layout.vertex(p, i))
                .collect()
        })
        .collect();
    (0..count)
        .map(|j| RTuple::new(layout, picks.iter().map(|p| p[j]).collect()).expect("transversal"))
        .collect()
}

fn random_subset<R: Rng + ?Sized>(t: &Tournament, part: usize, size: usize, rng: &mut R) -> Vec<usize> {
    let layout = t.layout();
    let mut s: Vec<usize> = index::sample(rng, layout.part_size(part), size)
        .into_iter()
        .map(|i| layout.vertex(part, i))
        .collect();
    s.sort_unstable();
    s
}

fn random_left_graph(t: &Tournament, seed: RngSeed) -> LeftGraph {
    LeftGraph::new(t, &VertexOrder::random(t.num_vertices(), &mut seed.rng())).expect("sizes match")
}

fn trial(
    property: Property,
    t: &Tournament,
    constants: &Constants,
    seed: RngSeed,
    opts: &VerifyOptions,
) -> Result<Outcome> {
    let (k, n) = (t.k(), t.layout().part_size(0));
    let mut rng = seed.rng();
    Ok(match property {
        Property::P1 => {
            let l = random_left_graph(t, seed.derive(0, 1));
            let r = rng.gen_range(1..k);
            let rs = rng.gen_range(n / 4..=n / 2).max(1);
            let ss = rng.gen_range(n / 4..=n / 2).max(1);
            let tuples = random_tuples(t, r, rs, &mut rng);
            let s = random_subset(t, r, ss, &mut rng);
            let o = check_property1_sample(&l, &tuples, &s, r, constants.epsilon)?;
            Outcome {
                informational: o.informational,
                ..lower(o.edge_count as f64, o.bound, o.pass)
            }
        }
        Property::P2 => {
            let l = random_left_graph(t, seed.derive(0, 1));
            let r = rng.gen_range(1..k);
            let size = ((constants.mu * n as f64).ceil() as usize).clamp(1, n);
            let sets: Vec<Vec<usize>> = (0..r).map(|p| random_subset(t, p, size, &mut rng)).collect();
            let o = check_property2_sample(&l, &sets, constants, Property2Options::default(), &mut rng)?;
            lower(o.friendly_count, o.bound, o.pass)
        }
        Property::P3 => {
            let r = rng.gen_range(1..k);
            let d = rng.gen_range(1..=opts.max_len).min(n);
            let tuples = random_tuples(t, r, d, &mut rng);
            let w: Vec<DirectionVector> = (0..d)
                .map(|_| DirectionVector::random(r, &mut rng))
                .collect::<Result<_>>()?;
            let target = rng.gen_range(r..k);
            let o = check_property3(t, &tuples, &w, target, d, r)?;
            upper(o.count, o.bound, o.pass)
        }
        Property::P4 => {
            let p = rng.gen_range(0..k);
            let q = rng.gen_range(1..=opts.max_len).min(n);
            let mut seq = random_subset(t, p, q, &mut rng);
            seq.shuffle(&mut rng);
            let d = DirectionVector::random(q, &mut rng)?;
            let s = (p + rng.gen_range(1..k)) % k;
            let o = check_property4(t, &seq, &d, s)?;
            upper(o.count, o.bound, o.pass)
        }
        Property::Friendly => {
            let l = random_left_graph(t, seed.derive(0, 1));
            let worst = unfriendly_counts(&l, constants.thresholds.friendly_vertex)
                .into_iter()
                .max()
                .unwrap_or(0);
            upper(worst, (k - 1) as f64, worst < k)
        }
    })
}

/// Runs `trials` independent witnesses. Tournaments come from
/// `seed.derive(j, 0)`, witness i uses tournament `i % tournaments` and
/// `seed.derive(i, 1)`; properties that need an order draw a fresh one per
/// witness.
pub fn verify_property(
    property: Property,
    constants: &Constants,
    trials: usize,
    seed: RngSeed,
    opts: VerifyOptions,
) -> Result<VerifyReport> {
    let (k, n) = (constants.k, constants.n);
    if trials == 0 {
        return Err(Error::parameter("trials must be at least 1"));
    }
    if k < 2 || n == 0 {
        return Err(Error::parameter("need k >= 2 and n >= 1"));
    }
    if opts.max_len == 0 {
        return Err(Error::parameter("max_len must be at least 1"));
    }
    let per_tournament = matches!(property, Property::P3 | Property::P4);
    let count = if per_tournament {
        opts.tournaments.clamp(1, trials)
    } else {
        trials
    };
    let tournaments: Vec<Tournament> = (0..count)
        .into_par_iter()
        .map(|j| Tournament::sample_random(n, k, seed.derive(j as u64, 0)))
        .collect::<Result<_>>()?;
    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            trial(
                property,
                &tournaments[i % count],
                constants,
                seed.derive(i as u64, 1),
                &opts,
            )
        })
        .collect::<Result<_>>()?;
    Ok(VerifyReport {
        property,
        k,
        n,
        trials,
        passes: outcomes.iter().filter(|o| o.pass || o.informational).count(),
        informational: outcomes.iter().filter(|o| o.informational).count(),
        worst_ratio: outcomes.iter().map(|o| o.ratio).fold(0.0, f64::max),
        parameters: serde_json::json!({
            "seed": seed.0,
            "tournaments": count,
            "max_len": opts.max_len,
            "mode": constants.mode,
            "friendly_vertex_threshold": constants.thresholds.friendly_vertex,
            "epsilon": constants.epsilon,
        }),
    })
}
