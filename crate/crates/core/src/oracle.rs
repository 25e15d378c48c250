//! Exact ground truth for tiny instances: maximum transversal clique packing,
//! f_k as a minimum over all vertex orders, and exhaustive tournament enumeration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::analysis::RTuple;
use crate::bits::PartLayout;
use crate::error::{Error, Result};
use crate::matching::bipartite_max_matching;
use crate::order::{LeftGraph, VertexOrder};
use crate::tournament::Tournament;

/// Largest part size the branch and bound accepts for k >= 3.
pub const EXACT_MAX_N: usize = 8;
/// Largest vertex count for which f_k is computed over all orders.
pub const FK_MAX_VERTICES: usize = 8;
/// Largest number of cross pairs for exhaustive enumeration.
pub const ENUM_MAX_PAIRS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactPacking {
    pub size: usize,
    pub witness: Vec<RTuple>,
}

/// Maximum number of disjoint transversal k-cliques in `l`.
pub fn max_transversal_packing(l: &LeftGraph) -> Result<ExactPacking> {
    max_transversal_packing_with(l, EXACT_MAX_N)
}

pub fn max_transversal_packing_with(l: &LeftGraph, max_n: usize) -> Result<ExactPacking> {
    let layout = l.layout();
    if l.k() == 2 {
        let left: Vec<usize> = layout.range(0).collect();
        let right: Vec<usize> = layout.range(1).collect();
        let (_, m) = bipartite_max_matching(&left, &right, |&u, &v| l.adjacent(u, v));
        let witness: Vec<RTuple> = m
            .pairs()
            .into_iter()
            .map(|(i, j)| RTuple::from_vec(vec![left[i], right[j]]))
            .collect();
        return Ok(ExactPacking {
            size: witness.len(),
            witness,
        });
    }
    branch_and_bound_packing(l, max_n)
}

/// Branch and bound over transversal cliques, for any k. Parts may have at
/// most `max_n` vertices.
pub fn branch_and_bound_packing(l: &LeftGraph, max_n: usize) -> Result<ExactPacking> {
    let layout = l.layout();
    let biggest = layout.sizes().iter().copied().max().unwrap_or(0);
    if biggest > max_n {
        return Err(Error::Resource(format!(
            "exact packing limited to parts of size {max_n}, got {biggest}"
        )));
    }
    let cliques = transversal_cliques(l);
    let mut search = Search {
        layout,
        cliques: &cliques,
        by_first: (0..layout.part_size(0))
            .map(|i| {
                let v = layout.vertex(0, i);
                (0..cliques.len()).filter(|&c| cliques[c][0] == v).collect()
            })
            .collect(),
        used: vec![false; l.num_vertices()],
        current: Vec::new(),
        best: Vec::new(),
    };
    search.greedy();
    search.branch(0);
    let witness = search
        .best
        .iter()
        .map(|&c| RTuple::from_vec(cliques[c].clone()))
        .collect::<Vec<_>>();
    Ok(ExactPacking {
        size: witness.len(),
        witness,
    })
}

fn transversal_cliques(l: &LeftGraph) -> Vec<Vec<usize>> {
    fn go(l: &LeftGraph, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let part = prefix.len();
        if part == l.k() {
            out.push(prefix.clone());
            return;
        }
        for v in l.layout().range(part) {
            if prefix.iter().all(|&u| l.adjacent(u, v)) {
                prefix.push(v);
                go(l, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(l, &mut Vec::new(), &mut out);
    out
}

struct Search<'a> {
    layout: &'a PartLayout,
    cliques: &'a [Vec<usize>],
    by_first: Vec<Vec<usize>>,
    used: Vec<bool>,
    current: Vec<usize>,
    best: Vec<usize>,
}

impl Search<'_> {
    fn fits(&self, c: usize) -> bool {
        self.cliques[c].iter().all(|&v| !self.used[v])
    }

    fn toggle(&mut self, c: usize, on: bool) {
        for &v in &self.cliques[c] {
            self.used[v] = on;
        }
    }

    fn greedy(&mut self) {
        let mut picked = Vec::new();
        for c in 0..self.cliques.len() {
            if self.fits(c) {
                self.toggle(c, true);
                picked.push(c);
            }
        }
        for &c in &picked {
            self.toggle(c, false);
        }
        self.best = picked;
    }

    /// Upper bound: the smallest number of free vertices in any part, with
    /// part 0 restricted to vertices at or after `from`.
    fn bound(&self, from: usize) -> usize {
        let free0 = (from..self.layout.part_size(0))
            .filter(|&i| !self.used[self.layout.vertex(0, i)] && !self.by_first[i].is_empty())
            .count();
        (1..self.layout.k())
            .map(|p| self.layout.range(p).filter(|&v| !self.used[v]).count())
            .fold(free0, usize::min)
    }

    /// Decides the part-0 vertices in ascending local order: cover it with
    /// one of its cliques, or leave it uncovered.
    fn branch(&mut self, from: usize) {
        if self.current.len() + self.bound(from) <= self.best.len() {
            return;
        }
        let Some(i) = (from..self.layout.part_size(0)).find(|&i| !self.by_first[i].is_empty()) else {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            return;
        };
        for idx in 0..self.by_first[i].len() {
            let c = self.by_first[i][idx];
            if self.fits(c) {
                self.toggle(c, true);
                self.current.push(c);
                self.branch(i + 1);
                self.current.pop();
                self.toggle(c, false);
            }
        }
        self.branch(i + 1);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FkResult {
    pub fk: usize,
    /// An order attaining the minimum.
    pub order: VertexOrder,
    pub packing: ExactPacking,
}

/// Exact f_k(T): the minimum over all vertex orders of the maximum packing in `L_π(T)`.
pub fn brute_force_fk(t: &Tournament) -> Result<usize> {
    Ok(brute_force_fk_detailed(t)?.fk)
}

pub fn brute_force_fk_detailed(t: &Tournament) -> Result<FkResult> {
    let nv = t.num_vertices();
    if nv > FK_MAX_VERTICES {
        return Err(Error::Resource(format!(
            "f_k over all orders limited to {FK_MAX_VERTICES} vertices, got {nv}"
        )));
    }
    let edges: Vec<(usize, usize)> = t.edges().collect();
    let mut perm: Vec<usize> = (0..nv).collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut best: Option<FkResult> = None;
    let mut err = None;
    heap_permutations(&mut perm, &mut |p| {
        let mut pos = vec![0; nv];
        for (i, &v) in p.iter().enumerate() {
            pos[v] = i;
        }
        // dedupe orders that give the same left graph
        let key = edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| pos[u] < pos[v])
            .fold(0u64, |acc, (i, _)| acc | 1 << i);
        if !seen.insert(key) {
            return true;
        }
        let order = VertexOrder::from_sequence(p.to_vec()).expect("permutation");
        let packing = match LeftGraph::new(t, &order).and_then(|l| max_transversal_packing(&l)) {
            Ok(p) => p,
            Err(e) => {
                err = Some(e);
                return false;
            }
        };
        if best.as_ref().is_none_or(|b| packing.size < b.fk) {
            best = Some(FkResult {
                fk: packing.size,
                order,
                packing,
            });
        }
        best.as_ref().unwrap().fk > 0
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(best.expect("at least one order"))
}

/// Visits every permutation (Heap's algorithm) until `f` returns false.
fn heap_permutations(a: &mut [usize], f: &mut impl FnMut(&[usize]) -> bool) {
    let n = a.len();
    if !f(a) {
        return;
    }
    let mut c = vec![0; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            if !f(a) {
                return;
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// All `2^P` tournaments on `part_sizes`, the i-th having the binary digits
/// of i as its orientation bits (first cross pair most significant).
pub fn enumerate_tournaments(part_sizes: Vec<usize>) -> Result<impl Iterator<Item = Tournament>> {
    let layout = PartLayout::new(part_sizes.clone())?;
    let pairs = cross_pair_count(&layout);
    if pairs > ENUM_MAX_PAIRS {
        return Err(Error::Resource(format!(
            "{pairs} cross pairs exceed the enumeration limit {ENUM_MAX_PAIRS}"
        )));
    }
    Ok((0..1u64 << pairs).map(move |i| tournament_from_index(&part_sizes, pairs, i)))
}

fn cross_pair_count(layout: &PartLayout) -> usize {
    let total = layout.num_vertices();
    let same: usize = layout.sizes().iter().map(|s| s * s.saturating_sub(1) / 2).sum();
    total * total.saturating_sub(1) / 2 - same
}

/// The `index`-th tournament in enumeration order.
pub fn tournament_from_index(part_sizes: &[usize], pairs: usize, index: u64) -> Tournament {
    let mut j = 0;
    Tournament::from_fn(part_sizes.to_vec(), |_, _| {
        let bit = (index >> (pairs - 1 - j)) & 1 == 1;
        j += 1;
        bit
    })
    .expect("valid sizes")
}

/// One line of an exhaustive run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustRow {
    /// Orientation bits as '0'/'1'.
    pub tournament: String,
    pub fk: usize,
    pub bound: usize,
    pub bound_tight: bool,
}

/// `f_k` and the `max(0, s-k+1)` bound for every tournament with `k` parts of size `n`.
pub fn exhaust(k: usize, n: usize) -> Result<Vec<ExhaustRow>> {
    let sizes = vec![n; k];
    let layout = PartLayout::new(sizes.clone())?;
    let pairs = cross_pair_count(&layout);
    if pairs > ENUM_MAX_PAIRS {
        return Err(Error::Resource(format!(
            "{pairs} cross pairs exceed the enumeration limit {ENUM_MAX_PAIRS}"
        )));
    }
    if n * k > FK_MAX_VERTICES {
        return Err(Error::Resource(format!(
            "f_k over all orders limited to {FK_MAX_VERTICES} vertices, got {}",
            n * k
        )));
    }
    let bound = (n + 1).saturating_sub(k);
    (0..1u64 << pairs)
        .into_par_iter()
        .map(|i| {
            let t = tournament_from_index(&sizes, pairs, i);
            let fk = brute_force_fk(&t)?;
            Ok(ExhaustRow {
                tournament: t.orientation_bits().map(|b| if b { '1' } else { '0' }).collect(),
                fk,
                bound,
                bound_tight: fk == bound,
            })
        })
        .collect()
}
