//! Proof constants (μ, ρ, d, δ, ε, m) and the thresholds derived from them.
//!
//! Theoretical mode evaluates the definitions exactly; they only become
//! non-vacuous for astronomically large n. Practical mode keeps the same
//! functional forms with desk-scale parameters.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantsMode {
    Theoretical,
    Practical,
}

impl std::str::FromStr for ConstantsMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(Self::Theoretical),
            "practical" => Ok(Self::Practical),
            _ => Err(Error::parameter(format!("unknown constants mode {s:?}"))),
        }
    }
}

/// Count thresholds used by the friendliness predicates. A count `c` meets
/// threshold `x` iff `c as f64 >= x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Minimum L-degree into every other part for a friendly vertex.
    pub friendly_vertex: f64,
    /// Keyed by prefix length r': common neighbors of the first r' clique
    /// vertices required in each later part.
    pub friendly_clique: BTreeMap<usize, f64>,
    /// Keyed by r: common neighbors in each later B-set required to keep an
    /// edge of H_r (r = 1 is the first matching graph).
    pub friendly_edge: BTreeMap<usize, f64>,
    /// Keyed by r: common neighbors in each later part required of every
    /// star tuple of an extendable perfect r-set.
    pub extendable: BTreeMap<usize, f64>,
    /// Minimum number of absorber extensions per vertex.
    pub absorber_extension: f64,
}

impl Thresholds {
    pub fn clique(&self, prefix: usize) -> f64 {
        self.friendly_clique.get(&prefix).copied().unwrap_or(0.0)
    }

    pub fn edge(&self, r: usize) -> f64 {
        self.friendly_edge.get(&r).copied().unwrap_or(0.0)
    }

    pub fn extendable(&self, r: usize) -> f64 {
        self.extendable.get(&r).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub k: usize,
    pub n: usize,
    pub mode: ConstantsMode,
    pub mu: f64,
    pub rho: f64,
    pub d: u64,
    pub delta: f64,
    pub epsilon: f64,
    /// Absorber level size.
    pub m: usize,
    pub thresholds: Thresholds,
}

impl Constants {
    /// `0.5 μ^r n^r 2^{-C(r,2)}`, the friendly r-clique count bound.
    pub fn friendly_clique_count_bound(&self, r: usize) -> f64 {
        0.5 * (self.mu * self.n as f64).powi(r as i32) * 2f64.powi(-(binom2(r) as i32))
    }
}

fn binom2(r: usize) -> usize {
    r * r.saturating_sub(1) / 2
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rat_pow(base: &BigRational, exp: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

fn mu_exact() -> BigRational {
    rat(1, 18)
}

/// Both families of inequalities that define `d`, for all r in 1..=k:
/// `(μ − d^{1−2r})/(dr+1) > (1−2^{−r})^d` and `(d^{2−2r} − d^{1−2r})/(d+1) > 2^{−d}`.
pub fn d_inequalities_hold(k: usize, d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mu = mu_exact();
    let dq = BigRational::from_integer(BigInt::from(d));
    let half = rat(1, 2);
    (1..=k as u64).all(|r| {
        let d_pow_1m2r = rat_pow(&dq, 2 * r - 1).recip();
        let d_pow_2m2r = rat_pow(&dq, 2 * r - 2).recip();
        let first_lhs = (&mu - &d_pow_1m2r) / BigRational::from_integer(BigInt::from(d * r + 1));
        let first_rhs = rat_pow(&(BigRational::one() - rat_pow(&half, r)), d);
        if first_lhs <= first_rhs {
            return false;
        }
        let second_lhs = (d_pow_2m2r - d_pow_1m2r) / BigRational::from_integer(BigInt::from(d + 1));
        second_lhs > rat_pow(&half, d)
    })
}

/// Smallest positive integer `d` satisfying [`d_inequalities_hold`].
pub fn smallest_d(k: usize) -> Result<u64> {
    if k < 2 {
        return Err(Error::parameter("k must be at least 2"));
    }
    // LHS decays like 1/d, RHS geometrically; the scan terminates.
    Ok((1..).find(|&d| d_inequalities_hold(k, d)).expect("unbounded scan"))
}

pub fn theoretical_constants(k: usize, n: usize) -> Result<Constants> {
    if n == 0 {
        return Err(Error::parameter("n must be at least 1"));
    }
    let d = smallest_d(k)?;
    let mu = mu_exact();
    let rho = rat(1, 4) * rat_pow(&mu, k as u64) * rat_pow(&rat(1, 2), binom2(k) as u64);
    let k_sq = BigRational::from_integer(BigInt::from((k * k) as u64));
    let dq = BigRational::from_integer(BigInt::from(d));
    let second = (BigRational::from_integer(BigInt::from(2 * k as u64)) * rat_pow(&dq, 2 * k as u64)).recip();
    let first = &rho / k_sq;
    let delta = if first < second { first } else { second };
    let epsilon = &delta * &rho / BigRational::from_integer(BigInt::from(5));
    let m_exact = (&delta * BigRational::from_integer(BigInt::from(n as u64))).ceil();
    let m = m_exact.to_integer().to_usize().unwrap_or(usize::MAX);

    let nf = n as f64;
    let df = d as f64;
    let rho_f = rho.to_f64().unwrap_or(0.0);
    let delta_f = delta.to_f64().unwrap_or(0.0);
    let thresholds = Thresholds {
        friendly_vertex: nf / 17.0,
        friendly_clique: (1..=k).map(|r| (r, nf / 2f64.powi(r as i32 + 1))).collect(),
        friendly_edge: (1..k).map(|r| (r, nf / df.powi(2 * r as i32))).collect(),
        extendable: (2..=k).map(|r| (r, nf / df.powi(2 * r as i32 - 2))).collect(),
        absorber_extension: delta_f * rho_f * nf / 4.0,
    };
    Ok(Constants {
        k,
        n,
        mode: ConstantsMode::Theoretical,
        mu: mu.to_f64().unwrap_or(1.0 / 18.0),
        rho: rho_f,
        d,
        delta: delta_f,
        epsilon: epsilon.to_f64().unwrap_or(0.0),
        m,
        thresholds,
    })
}

/// Keys accepted by [`practical_constants`].
pub const OVERRIDE_KEYS: &[&str] = &[
    "mu",
    "d",
    "delta",
    "absorber_fraction",
    "vertex_scale",
    "clique_scale",
    "edge_scale",
];

pub const PRACTICAL_D: u64 = 4;
pub const PRACTICAL_DELTA: f64 = 0.2;
pub const PRACTICAL_ABSORBER_FRACTION: f64 = 0.02;
pub const PRACTICAL_CLIQUE_SCALE: f64 = 0.5;

/// Desk-scale constants. Defaults: d = 4, δ = 0.2, friendly vertices at n/17,
/// friendly cliques at half of n/2^(r'+1), edge thresholds n/d^(2r) floored
/// at 1, absorber extension max(1, ⌈0.02 m⌉).
pub fn practical_constants(k: usize, n: usize, overrides: &BTreeMap<String, f64>) -> Result<Constants> {
    if k < 2 {
        return Err(Error::parameter("k must be at least 2"));
    }
    if n == 0 {
        return Err(Error::parameter("n must be at least 1"));
    }
    for (key, &v) in overrides {
        if !OVERRIDE_KEYS.contains(&key.as_str()) {
            return Err(Error::parameter(format!("unknown override {key:?}")));
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::parameter(format!("override {key} = {v} must be positive")));
        }
    }
    let get = |key: &str, default: f64| overrides.get(key).copied().unwrap_or(default);
    let mu = get("mu", 1.0 / 18.0);
    let d_raw = get("d", PRACTICAL_D as f64);
    if d_raw.fract() != 0.0 {
        return Err(Error::parameter(format!("override d = {d_raw} must be an integer")));
    }
    let d = d_raw as u64;
    let delta = get("delta", PRACTICAL_DELTA);
    let absorber_fraction = get("absorber_fraction", PRACTICAL_ABSORBER_FRACTION);
    let vertex_scale = get("vertex_scale", 1.0);
    let clique_scale = get("clique_scale", PRACTICAL_CLIQUE_SCALE);
    let edge_scale = get("edge_scale", 1.0);

    let nf = n as f64;
    let df = d as f64;
    let rho = 0.25 * mu.powi(k as i32) * 2f64.powi(-(binom2(k) as i32));
    let m = (delta * nf).ceil() as usize;
    let thresholds = Thresholds {
        friendly_vertex: vertex_scale * nf / 17.0,
        friendly_clique: (1..=k)
            .map(|r| (r, clique_scale * nf / 2f64.powi(r as i32 + 1)))
            .collect(),
        friendly_edge: (1..k)
            .map(|r| (r, (edge_scale * nf / df.powi(2 * r as i32)).max(1.0)))
            .collect(),
        extendable: (2..=k)
            .map(|r| (r, (edge_scale * nf / df.powi(2 * r as i32 - 2)).max(1.0)))
            .collect(),
        absorber_extension: (absorber_fraction * m as f64).ceil().max(1.0),
    };
    Ok(Constants {
        k,
        n,
        mode: ConstantsMode::Practical,
        mu,
        rho,
        d,
        delta,
        epsilon: delta * rho / 5.0,
        m,
        thresholds,
    })
}

/// Constants for `mode` with no overrides.
pub fn constants_for(mode: ConstantsMode, k: usize, n: usize) -> Result<Constants> {
    match mode {
        ConstantsMode::Theoretical => theoretical_constants(k, n),
        ConstantsMode::Practical => practical_constants(k, n, &BTreeMap::new()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_d_small_k() {
        assert_eq!(smallest_d(2).unwrap(), 24);
        let d3 = smallest_d(3).unwrap();
        assert!((55..=70).contains(&d3));
        assert!(smallest_d(1).is_err());
    }

    #[test]
    fn smallest_d_is_monotone() {
        let ds: Vec<u64> = (2..=5).map(|k| smallest_d(k).unwrap()).collect();
        assert!(ds.windows(2).all(|w| w[0] <= w[1]), "{ds:?}");
    }

    #[test]
    fn theoretical_k2() {
        let c = theoretical_constants(2, 1000).unwrap();
        assert_eq!(c.mu, 1.0 / 18.0);
        assert!((c.rho - 1.0 / 2592.0).abs() < 1e-18);
        assert!((c.delta - 1.0 / 1_327_104.0).abs() < 1e-20);
        assert_eq!(c.m, 1);
        assert!(c.epsilon < c.delta && c.delta < c.rho && c.rho < 1.0);
        assert_eq!(c.thresholds.clique(1), 250.0);
        assert_eq!(c.thresholds.edge(1), 1000.0 / 576.0);
    }

    #[test]
    fn theoretical_m_is_ceiling() {
        // δ = 1/1327104 at k = 2
        assert_eq!(theoretical_constants(2, 1_327_104).unwrap().m, 1);
        assert_eq!(theoretical_constants(2, 1_327_105).unwrap().m, 2);
    }

    #[test]
    fn practical_defaults() {
        let c = practical_constants(3, 120, &BTreeMap::new()).unwrap();
        assert_eq!(c.d, 4);
        assert_eq!(c.m, 24);
        assert_eq!(c.thresholds.absorber_extension, 1.0);
        assert_eq!(c.thresholds.edge(1), 7.5);
        assert_eq!(c.thresholds.edge(2), 1.0);
        assert_eq!(c.thresholds.clique(2), 7.5);

        let mut o = BTreeMap::new();
        o.insert("delta".to_string(), 0.05);
        assert_eq!(practical_constants(3, 120, &o).unwrap().m, 6);
    }

    #[test]
    fn practical_rejects_bad_overrides() {
        for (k, v) in [("delta", 0.0), ("d", -1.0), ("d", 2.5), ("bogus", 1.0)] {
            let mut o = BTreeMap::new();
            o.insert(k.to_string(), v);
            assert!(
                matches!(practical_constants(3, 100, &o), Err(Error::Parameter(_))),
                "{k}={v}"
            );
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("practical".parse::<ConstantsMode>().unwrap(), ConstantsMode::Practical);
        assert!("other".parse::<ConstantsMode>().is_err());
    }
}
