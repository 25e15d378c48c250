//! Structural predicates on tournaments and left graphs: D-consistency,
//! Ŵ-inconsistency, friendly vertices and cliques, and per-witness checks of
//! the four random-tournament properties the packing argument relies on.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::bits::{self, PartLayout};
use crate::constants::{Constants, Thresholds};
use crate::error::{Error, Result};
use crate::order::LeftGraph;
use crate::tournament::{Direction, Tournament};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    /// `+` selects out-neighbors of the sequence vertex, `-` in-neighbors.
    pub fn direction(self) -> Direction {
        match self {
            Sign::Plus => Direction::Out,
            Sign::Minus => Direction::In,
        }
    }
}

/// A nonempty sign pattern (the D of D-consistency, or one W of Ŵ).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Sign>", into = "Vec<Sign>")]
pub struct DirectionVector(Vec<Sign>);

impl DirectionVector {
    pub fn new(signs: Vec<Sign>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::parameter("direction vector must be nonempty"));
        }
        Ok(Self(signs))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        Self::new(
            (0..len)
                .map(|_| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus })
                .collect(),
        )
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<Sign>> for DirectionVector {
    type Error = Error;
    fn try_from(v: Vec<Sign>) -> Result<Self> {
        DirectionVector::new(v)
    }
}

impl From<DirectionVector> for Vec<Sign> {
    fn from(d: DirectionVector) -> Self {
        d.0
    }
}

impl std::str::FromStr for DirectionVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(Error::parameter(format!("bad sign {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }
}

/// `(a_1, ..., a_r)` with `a_i` in part `i` (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RTuple(Vec<usize>);

impl RTuple {
    pub fn new(layout: &PartLayout, vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() || vertices.len() > layout.k() {
            return Err(Error::parameter(format!(
                "tuple length {} not in 1..={}",
                vertices.len(),
                layout.k()
            )));
        }
        for (i, &v) in vertices.iter().enumerate() {
            layout.check_vertex(v)?;
            if layout.part_of(v) != i {
                return Err(Error::parameter(format!(
                    "tuple entry {i} is vertex {v} from part {}",
                    layout.part_of(v)
                )));
            }
        }
        Ok(Self(vertices))
    }

    /// Unchecked constructor for internal callers that build tuples part by part.
    pub(crate) fn from_vec(vertices: Vec<usize>) -> Self {
        Self(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, len: usize) -> RTuple {
        RTuple(self.0[..len].to_vec())
    }

    pub fn extended(&self, v: usize) -> RTuple {
        let mut out = self.0.clone();
        out.push(v);
        RTuple(out)
    }
}

impl AsRef<[usize]> for RTuple {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

fn check_disjoint(tuples: &[RTuple]) -> Result<()> {
    let mut seen = HashSet::new();
    for t in tuples {
        for &v in t.vertices() {
            if !seen.insert(v) {
                return Err(Error::parameter(format!("vertex {v} appears in two tuples")));
            }
        }
    }
    Ok(())
}

/// `floor(n^{2/3})`.
pub fn n_two_thirds(n: usize) -> f64 {
    ((n as f64).powf(2.0 / 3.0) + 1e-9).floor()
}

/// Part-local bitset of the vertices of `target` that are D-consistent with
/// `seq`: for each j, `seq[j] -> v` when `D(j) = +` and `v -> seq[j]` when `-`.
fn consistent_mask(t: &Tournament, seq: &[usize], d: &[Sign], target: usize) -> Vec<u64> {
    let mut acc = bits::full_mask(t.layout().part_size(target));
    for (&u, &s) in seq.iter().zip(d) {
        let nb = t.neighbor_mask(u, s.direction(), target);
        for (a, b) in acc.iter_mut().zip(&nb) {
            *a &= b;
        }
    }
    acc
}

fn locals_to_vertices(layout: &PartLayout, part: usize, mask: &[u64]) -> Vec<usize> {
    let start = layout.range(part).start;
    bits::ones(mask).map(|i| start + i).collect()
}

/// `C_D(seq) ∩ A_target`.
pub fn consistent_set(t: &Tournament, seq: &[usize], d: &DirectionVector, target: usize) -> Result<Vec<usize>> {
    if seq.len() != d.len() {
        return Err(Error::parameter(format!(
            "sequence has {} vertices, direction vector {} signs",
            seq.len(),
            d.len()
        )));
    }
    t.layout().check_part(target)?;
    let mut seen = HashSet::new();
    for &v in seq {
        t.layout().check_vertex(v)?;
        if !seen.insert(v) {
            return Err(Error::parameter(format!("vertex {v} repeated in sequence")));
        }
    }
    let mask = consistent_mask(t, seq, d.signs(), target);
    Ok(locals_to_vertices(t.layout(), target, &mask))
}

/// `I_Ŵ(p̂, target)`: vertices of `target` that fail `W_i`-consistency with
/// `p_i` for every i.
pub fn inconsistent_set(
    t: &Tournament,
    tuples: &[RTuple],
    w_hat: &[DirectionVector],
    target: usize,
) -> Result<Vec<usize>> {
    if tuples.len() != w_hat.len() {
        return Err(Error::parameter(format!(
            "{} tuples but {} direction vectors",
            tuples.len(),
            w_hat.len()
        )));
    }
    t.layout().check_part(target)?;
    for (p, w) in tuples.iter().zip(w_hat) {
        if p.len() != w.len() {
            return Err(Error::parameter("direction vector length differs from tuple length"));
        }
        if target < p.len() {
            return Err(Error::parameter(format!(
                "target part {target} must come after the tuple parts 0..{}",
                p.len()
            )));
        }
        RTuple::new(t.layout(), p.vertices().to_vec())?;
    }
    check_disjoint(tuples)?;
    let mut acc = bits::full_mask(t.layout().part_size(target));
    for (p, w) in tuples.iter().zip(w_hat) {
        let cons = consistent_mask(t, p.vertices(), w.signs(), target);
        for (a, c) in acc.iter_mut().zip(&cons) {
            *a &= !c;
        }
    }
    Ok(locals_to_vertices(t.layout(), target, &acc))
}

/// Per part, the vertices with at least `threshold` L-neighbors in every other part.
pub fn friendly_vertices(l: &LeftGraph, threshold: f64) -> Vec<Vec<usize>> {
    let layout = l.layout();
    (0..l.k())
        .map(|r| {
            layout
                .range(r)
                .filter(|&v| (0..l.k()).all(|p| p == r || l.degree_in_part(v, p) as f64 >= threshold))
                .collect()
        })
        .collect()
}

/// Per part, the number of vertices that are not friendly at `threshold`.
pub fn unfriendly_counts(l: &LeftGraph, threshold: f64) -> Vec<usize> {
    friendly_vertices(l, threshold)
        .iter()
        .enumerate()
        .map(|(p, f)| l.layout().part_size(p) - f.len())
        .collect()
}

/// Friendliness conditions that involve only the first `prefix.len()`
/// vertices of a clique that will have `clique_len` vertices.
pub(crate) fn friendly_prefix_ok(l: &LeftGraph, prefix: &[usize], clique_len: usize, th: &Thresholds) -> bool {
    let need = th.clique(prefix.len());
    (clique_len..l.k()).all(|t| l.common_count(prefix, t) as f64 >= need)
}

/// A transversal clique `(v_1..v_r)` is friendly if for every later part t
/// and every prefix length r', the first r' vertices have at least the
/// r'-threshold common L-neighbors in `A_t`.
pub fn is_friendly_clique(l: &LeftGraph, clique: &RTuple, constants: &Constants) -> Result<bool> {
    if !l.is_clique(clique.vertices()) {
        return Err(Error::precondition("tuple does not induce a clique in the left graph"));
    }
    let v = clique.vertices();
    Ok((1..=v.len()).all(|len| friendly_prefix_ok(l, &v[..len], v.len(), &constants.thresholds)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Property1Outcome {
    pub edge_count: usize,
    pub bound: f64,
    pub pass: bool,
    /// `|R|` or `|S|` is below εn, outside the regime the property speaks about.
    pub informational: bool,
}

/// Counts edges of `L(P, T)` between `r_set` (disjoint r-tuples) and `s_set ⊆ A_{r+1}`:
/// `p v` is an edge when `v` is L-adjacent to every coordinate of `p`.
/// Passes when the count is at least `|R||S| / 2^{r+1}`.
pub fn check_property1_sample(
    l: &LeftGraph,
    r_set: &[RTuple],
    s_set: &[usize],
    r: usize,
    epsilon: f64,
) -> Result<Property1Outcome> {
    if r == 0 || r >= l.k() {
        return Err(Error::parameter(format!("r = {r} not in 1..k")));
    }
    for p in r_set {
        if p.len() != r {
            return Err(Error::parameter("tuple length differs from r"));
        }
        RTuple::new(l.layout(), p.vertices().to_vec())?;
    }
    check_disjoint(r_set)?;
    let layout = l.layout();
    for &v in s_set {
        layout.check_vertex(v)?;
        if layout.part_of(v) != r {
            return Err(Error::parameter(format!("S vertex {v} is not in part {r}")));
        }
    }
    let s_mask = bits::mask_from_locals(layout.part_size(r), s_set.iter().map(|&v| layout.local(v)));
    let edge_count = r_set
        .iter()
        .map(|p| bits::and_count(&l.common_mask(p.vertices(), r, None), &s_mask))
        .sum();
    let bound = (r_set.len() * s_set.len()) as f64 / 2f64.powi(r as i32 + 1);
    let floor = epsilon * l.n() as f64;
    Ok(Property1Outcome {
        edge_count,
        bound,
        pass: edge_count as f64 >= bound,
        informational: (r_set.len() as f64) < floor || (s_set.len() as f64) < floor,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Property2Outcome {
    pub friendly_count: f64,
    pub estimated: bool,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Property2Options {
    /// Maximum number of tuple inspections for exhaustive counting.
    pub budget: u64,
    /// Fall back to sampling when the budget is exceeded.
    pub allow_estimate: bool,
    pub samples: usize,
}

impl Default for Property2Options {
    fn default() -> Self {
        Self {
            budget: 100_000_000,
            allow_estimate: true,
            samples: 200_000,
        }
    }
}

/// Counts friendly r-cliques with the i-th vertex in `sets[i]` (r = `sets.len()`),
/// against the bound `0.5 μ^r n^r 2^{-C(r,2)}`.
pub fn check_property2_sample<R: Rng + ?Sized>(
    l: &LeftGraph,
    sets: &[Vec<usize>],
    constants: &Constants,
    opts: Property2Options,
    rng: &mut R,
) -> Result<Property2Outcome> {
    let r = sets.len();
    if r == 0 || r >= l.k() {
        return Err(Error::parameter(format!("r = {r} not in 1..k")));
    }
    let layout = l.layout();
    for (i, s) in sets.iter().enumerate() {
        for &v in s {
            layout.check_vertex(v)?;
            if layout.part_of(v) != i {
                return Err(Error::parameter(format!(
                    "S_{} contains vertex {v} of part {}",
                    i + 1,
                    layout.part_of(v)
                )));
            }
        }
    }
    let bound = constants.friendly_clique_count_bound(r);
    let space: f64 = sets.iter().map(|s| s.len() as f64).product();
    if space == 0.0 {
        return Ok(Property2Outcome {
            friendly_count: 0.0,
            estimated: false,
            bound,
            pass: 0.0 >= bound,
        });
    }
    let th = &constants.thresholds;
    let (count, estimated) = if space <= opts.budget as f64 {
        let mut count = 0u64;
        let mut prefix = Vec::with_capacity(r);
        count_friendly(l, sets, th, &mut prefix, &mut count);
        (count as f64, false)
    } else if opts.allow_estimate {
        let mut hits = 0usize;
        let mut tuple = vec![0; r];
        for _ in 0..opts.samples {
            for (slot, s) in tuple.iter_mut().zip(sets) {
                *slot = s[rng.gen_range(0..s.len())];
            }
            if l.is_clique(&tuple) && (1..=r).all(|len| friendly_prefix_ok(l, &tuple[..len], r, th)) {
                hits += 1;
            }
        }
        (hits as f64 / opts.samples.max(1) as f64 * space, true)
    } else {
        return Err(Error::Resource(format!(
            "{space} tuple inspections exceed budget {}",
            opts.budget
        )));
    };
    Ok(Property2Outcome {
        friendly_count: count,
        estimated,
        bound,
        pass: count >= bound,
    })
}

fn count_friendly(l: &LeftGraph, sets: &[Vec<usize>], th: &Thresholds, prefix: &mut Vec<usize>, count: &mut u64) {
    let depth = prefix.len();
    if depth == sets.len() {
        *count += 1;
        return;
    }
    for &v in &sets[depth] {
        if prefix.iter().all(|&u| l.adjacent(u, v)) {
            prefix.push(v);
            if friendly_prefix_ok(l, prefix, sets.len(), th) {
                count_friendly(l, sets, th, prefix, count);
            }
            prefix.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundOutcome {
    pub count: usize,
    pub bound: f64,
    pub pass: bool,
}

/// `|I_Ŵ(p̂, target)| <= n (1 - 2^{-r})^d + n^{2/3}` with `d = tuples.len()`.
pub fn check_property3(
    t: &Tournament,
    tuples: &[RTuple],
    w_hat: &[DirectionVector],
    target: usize,
    d: usize,
    r: usize,
) -> Result<BoundOutcome> {
    if d != tuples.len() {
        return Err(Error::parameter(format!("d = {d} but {} tuples given", tuples.len())));
    }
    if r == 0 || tuples.iter().any(|p| p.len() != r) {
        return Err(Error::parameter("every tuple must have length r >= 1"));
    }
    let count = inconsistent_set(t, tuples, w_hat, target)?.len();
    let n = t.layout().part_size(target);
    let bound = n as f64 * (1.0 - 2f64.powi(-(r as i32))).powi(d as i32) + n_two_thirds(n);
    Ok(BoundOutcome {
        count,
        bound,
        pass: count as f64 <= bound,
    })
}

/// `|C_D(seq) ∩ A_s| <= n 2^{-q} + n^{2/3}` for a sequence inside one part.
pub fn check_property4(t: &Tournament, seq: &[usize], d: &DirectionVector, s: usize) -> Result<BoundOutcome> {
    if let Some(&first) = seq.first() {
        t.layout().check_vertex(first)?;
        let part = t.layout().part_of(first);
        if seq
            .iter()
            .any(|&v| v >= t.num_vertices() || t.layout().part_of(v) != part)
        {
            return Err(Error::parameter("sequence spans more than one part"));
        }
    }
    let count = consistent_set(t, seq, d, s)?.len();
    let n = t.layout().part_size(s);
    let bound = n as f64 * 2f64.powi(-(seq.len() as i32)) + n_two_thirds(n);
    Ok(BoundOutcome {
        count,
        bound,
        pass: count as f64 <= bound,
    })
}
