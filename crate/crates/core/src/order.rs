//! Vertex orders and the feedback arc sets they induce.
//!
//! For an order π, the left graph `L_π(T)` keeps every tournament edge that
//! points from the π-earlier endpoint to the π-later one. Its complement is
//! acyclic (π reversed is a topological order of it), so it is a feedback arc
//! set, and every minimal feedback arc set is the left graph of some order.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

use crate::bits::{PartBits, PartLayout};
use crate::error::{Error, Result};
use crate::tournament::Tournament;

/// A permutation of the vertices, stored both as the π-ordered sequence and
/// as the inverse map vertex -> position. Serialized as the sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct VertexOrder {
    sequence: Vec<usize>,
    position: Vec<usize>,
}

impl VertexOrder {
    pub fn from_sequence(sequence: Vec<usize>) -> Result<Self> {
        let n = sequence.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in sequence.iter().enumerate() {
            if v >= n {
                return Err(Error::parameter(format!("order entry {v} out of range 0..{n}")));
            }
            if position[v] != usize::MAX {
                return Err(Error::parameter(format!("vertex {v} appears twice in order")));
            }
            position[v] = i;
        }
        Ok(Self { sequence, position })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sequence: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut seq: Vec<usize> = (0..n).collect();
        seq.shuffle(rng);
        Self::from_sequence(seq).expect("shuffle is a permutation")
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    #[inline]
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn reversed(&self) -> Self {
        let mut seq = self.sequence.clone();
        seq.reverse();
        Self::from_sequence(seq).expect("reversal is a permutation")
    }
}

impl TryFrom<Vec<usize>> for VertexOrder {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        VertexOrder::from_sequence(v)
    }
}

impl From<VertexOrder> for Vec<usize> {
    fn from(o: VertexOrder) -> Self {
        o.sequence
    }
}

/// Undirected k-partite graph of left-to-right edges of a tournament under an order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftGraph {
    layout: PartLayout,
    adj: PartBits,
    order: VertexOrder,
}

impl LeftGraph {
    pub fn new(t: &Tournament, order: &VertexOrder) -> Result<Self> {
        if order.len() != t.num_vertices() {
            return Err(Error::parameter(format!(
                "order has {} vertices, tournament has {}",
                order.len(),
                t.num_vertices()
            )));
        }
        let layout = t.layout().clone();
        let mut adj = PartBits::zeros(&layout);
        for (u, v) in t.edges() {
            if order.position(u) < order.position(v) {
                adj.set(&layout, u, v);
                adj.set(&layout, v, u);
            }
        }
        Ok(Self {
            layout,
            adj,
            order: order.clone(),
        })
    }

    /// Realizes an arbitrary k-partite graph as a left graph: orient every
    /// listed edge from the smaller id to the larger, every other cross pair
    /// the other way, and take the identity order.
    pub fn from_edges(sizes: Vec<usize>, edges: &[(usize, usize)]) -> Result<(Tournament, Self)> {
        let layout = PartLayout::new(sizes.clone())?;
        let mut want = PartBits::zeros(&layout);
        for &(u, v) in edges {
            layout.check_vertex(u)?;
            layout.check_vertex(v)?;
            if layout.part_of(u) == layout.part_of(v) {
                return Err(Error::parameter(format!("edge {u}-{v} inside one part")));
            }
            want.set(&layout, u, v);
        }
        let t = Tournament::from_fn(sizes, |u, v| want.get(&layout, u, v) || want.get(&layout, v, u))?;
        let l = LeftGraph::new(&t, &VertexOrder::identity(t.num_vertices()))?;
        Ok((t, l))
    }

    /// Complete k-partite graph on equal parts.
    pub fn complete(n: usize, k: usize) -> Result<(Tournament, Self)> {
        let t = Tournament::from_fn(vec![n; k], |_, _| true)?;
        let l = LeftGraph::new(&t, &VertexOrder::identity(t.num_vertices()))?;
        Ok((t, l))
    }

    pub fn layout(&self) -> &PartLayout {
        &self.layout
    }

    pub fn order(&self) -> &VertexOrder {
        &self.order
    }

    pub fn k(&self) -> usize {
        self.layout.k()
    }

    /// Common part size; meaningful for equal-part graphs.
    pub fn n(&self) -> usize {
        self.layout.part_size(0)
    }

    pub fn num_vertices(&self) -> usize {
        self.layout.num_vertices()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj.get(&self.layout, u, v)
    }

    pub fn segment(&self, v: usize, part: usize) -> &[u64] {
        self.adj.segment(&self.layout, v, part)
    }

    pub fn degree_in_part(&self, v: usize, part: usize) -> usize {
        self.adj.count_in_part(&self.layout, v, part)
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.k()).map(|p| self.degree_in_part(v, p)).sum()
    }

    /// Number of vertices of `part` adjacent to all of `vertices`.
    pub fn common_count(&self, vertices: &[usize], part: usize) -> usize {
        self.adj.common_count(&self.layout, vertices, part)
    }

    /// Part-local bitset of common neighbors in `part`, optionally masked.
    pub fn common_mask(&self, vertices: &[usize], part: usize, mask: Option<&[u64]>) -> Vec<u64> {
        self.adj.common_in_part(&self.layout, vertices, part, mask)
    }

    /// Like [`common_count`](Self::common_count) but only counting vertices in `mask`.
    pub fn common_count_masked(&self, vertices: &[usize], part: usize, mask: &[u64]) -> usize {
        let mut total = 0;
        for (i, &m) in mask.iter().enumerate() {
            let mut acc = m;
            for &v in vertices {
                if acc == 0 {
                    break;
                }
                acc &= self.segment(v, part)[i];
            }
            total += acc.count_ones() as usize;
        }
        total
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }

    pub fn num_edges(&self) -> usize {
        (0..self.num_vertices()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges oriented left to right, i.e. as they appear in the tournament.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for u in 0..self.num_vertices() {
            for p in self.layout.part_of(u) + 1..self.k() {
                let start = self.layout.range(p).start;
                for i in crate::bits::ones(self.segment(u, p)) {
                    let v = start + i;
                    if self.order.position(u) < self.order.position(v) {
                        out.push((u, v));
                    } else {
                        out.push((v, u));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Out-adjacency of `t` minus a removed edge set.
struct Remainder {
    out: Vec<Vec<usize>>,
}

impl Remainder {
    fn new(t: &Tournament, removed: &BTreeSet<(usize, usize)>) -> Self {
        let mut out = vec![Vec::new(); t.num_vertices()];
        for (u, v) in t.edges() {
            if !removed.contains(&(u, v)) {
                out[u].push(v);
            }
        }
        Self { out }
    }

    fn is_acyclic(&self) -> bool {
        let n = self.out.len();
        let mut indeg = vec![0usize; n];
        for vs in &self.out {
            for &v in vs {
                indeg[v] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop_front() {
            seen += 1;
            for &v in &self.out[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        seen == n
    }

    fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.out.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            for &v in &self.out[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    }
}

fn edge_set(t: &Tournament, edges: &[(usize, usize)]) -> Result<BTreeSet<(usize, usize)>> {
    edges
        .iter()
        .map(|&(u, v)| {
            t.layout().check_vertex(u)?;
            t.layout().check_vertex(v)?;
            if t.has_edge(u, v) {
                Ok((u, v))
            } else {
                Err(Error::parameter(format!("({u}, {v}) is not an edge of the tournament")))
            }
        })
        .collect()
}

/// `true` iff removing `edges` from `t` leaves an acyclic digraph.
pub fn is_feedback_arc_set(t: &Tournament, edges: &[(usize, usize)]) -> Result<bool> {
    let removed = edge_set(t, edges)?;
    Ok(Remainder::new(t, &removed).is_acyclic())
}

/// Greedily drops edges in ascending `(source, target)` order while the set
/// stays a feedback arc set. One pass suffices: the complement only grows, so
/// an edge that closes a cycle once keeps closing it.
pub fn minimalize_fas(t: &Tournament, edges: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
    let fas = edge_set(t, edges)?;
    let mut rest = Remainder::new(t, &fas);
    if !rest.is_acyclic() {
        return Err(Error::precondition("input edge set is not a feedback arc set"));
    }
    let mut kept = Vec::new();
    for (u, v) in fas {
        if rest.reaches(v, u) {
            kept.push((u, v));
        } else {
            rest.out[u].push(v);
        }
    }
    Ok(kept)
}

/// Order realizing the star-removal upper bound `f_k <= s - k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBoundWitness {
    pub order: VertexOrder,
    /// `u_1..u_{k-1}`, the first vertices of the smallest part.
    pub excluded: Vec<usize>,
    /// Part paired with each excluded vertex.
    pub paired_parts: Vec<usize>,
    /// Every tournament edge except those joining `u_i` to its paired part.
    pub fas: Vec<(usize, usize)>,
}

/// Picks the first smallest part `V_k`, its first `k-1` vertices `u_i`, and
/// pairs `u_i` with the i-th other part `V_i`. The order lists, for each i,
/// the out-neighbors of `u_i` in `V_i`, then `u_i`, then its in-neighbors, so
/// every edge between `u_i` and `V_i` points right to left; the rest of `V_k`
/// goes last.
pub fn upper_bound_witness(t: &Tournament) -> Result<UpperBoundWitness> {
    let layout = t.layout();
    let k = t.k();
    let s = layout.min_part_size();
    if s + 1 < k {
        return Err(Error::precondition(format!(
            "smallest part has {s} vertices, need at least k-1 = {}",
            k - 1
        )));
    }
    let small = (0..k).find(|&p| layout.part_size(p) == s).expect("k >= 2");
    let others: Vec<usize> = (0..k).filter(|&p| p != small).collect();
    let small_range = layout.range(small);
    let excluded: Vec<usize> = small_range.clone().take(k - 1).collect();

    let mut seq = Vec::with_capacity(t.num_vertices());
    for (&u, &part) in excluded.iter().zip(&others) {
        let (outs, ins): (Vec<usize>, Vec<usize>) = layout.range(part).partition(|&w| t.has_edge(u, w));
        seq.extend(outs);
        seq.push(u);
        seq.extend(ins);
    }
    seq.extend(small_range.skip(k - 1));
    let order = VertexOrder::from_sequence(seq)?;

    let mut fas: Vec<(usize, usize)> = t
        .edges()
        .filter(|&(a, b)| {
            !excluded
                .iter()
                .zip(&others)
                .any(|(&u, &p)| (a == u && layout.part_of(b) == p) || (b == u && layout.part_of(a) == p))
        })
        .collect();
    fas.sort_unstable();
    Ok(UpperBoundWitness {
        order,
        excluded,
        paired_parts: others,
        fas,
    })
}

impl UpperBoundWitness {
    /// No left-graph edge joins an excluded vertex to its paired part, so no
    /// k-clique of the left graph can use an excluded vertex.
    pub fn validate(&self, l: &LeftGraph) -> bool {
        self.excluded
            .iter()
            .zip(&self.paired_parts)
            .all(|(&u, &p)| l.degree_in_part(u, p) == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::RngSeed;

    fn three_cycle() -> Tournament {
        // 0 -> 1 -> 2 -> 0
        Tournament::from_fn(vec![1, 1, 1], |u, v| !(u == 0 && v == 2)).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(VertexOrder::from_sequence(vec![1, 0, 2]).is_ok());
        assert!(VertexOrder::from_sequence(vec![1, 1, 2]).is_err());
        assert!(VertexOrder::from_sequence(vec![0, 3, 1]).is_err());
        let o: VertexOrder = serde_json::from_str("[2,0,1]").unwrap();
        assert_eq!(o.position(2), 0);
        assert_eq!(serde_json::to_string(&o).unwrap(), "[2,0,1]");
        assert!(serde_json::from_str::<VertexOrder>("[0,0]").is_err());
    }

    #[test]
    fn single_edge_left_graph() {
        let t = Tournament::from_fn(vec![1, 1], |_, _| true).unwrap();
        let l = LeftGraph::new(&t, &VertexOrder::from_sequence(vec![0, 1]).unwrap()).unwrap();
        assert!(l.adjacent(0, 1));
        let l = LeftGraph::new(&t, &VertexOrder::from_sequence(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(l.num_edges(), 0);
        assert!(LeftGraph::new(&t, &VertexOrder::identity(3)).is_err());
    }

    #[test]
    fn from_edges_realizes_graph() {
        let (_, l) = LeftGraph::from_edges(vec![2, 2, 1], &[(0, 2), (3, 4), (1, 4)]).unwrap();
        assert_eq!(l.num_edges(), 3);
        assert!(l.adjacent(2, 0) && l.adjacent(4, 3) && l.adjacent(1, 4));
        assert!(!l.adjacent(0, 3));
        assert!(LeftGraph::from_edges(vec![2, 2], &[(0, 1)]).is_err());
    }

    #[test]
    fn three_cycle_fas() {
        let t = three_cycle();
        assert!(is_feedback_arc_set(&t, &[(1, 2)]).unwrap());
        assert!(!is_feedback_arc_set(&t, &[]).unwrap());
        let all: Vec<_> = t.edges().collect();
        assert!(is_feedback_arc_set(&t, &all).unwrap());
        assert!(matches!(is_feedback_arc_set(&t, &[(2, 1)]), Err(Error::Parameter(_))));
    }

    #[test]
    fn minimalize_three_cycle() {
        let t = three_cycle();
        let all: Vec<_> = t.edges().collect();
        let min = minimalize_fas(&t, &all).unwrap();
        // exhaustive: every minimal FAS of a 3-cycle is a single edge
        for mask in 0u32..8 {
            let sub: Vec<_> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
            let is_fas = is_feedback_arc_set(&t, &sub).unwrap();
            assert_eq!(is_fas, !sub.is_empty());
        }
        assert_eq!(min, vec![(2, 0)]);
        assert_eq!(minimalize_fas(&t, &min).unwrap(), min);
        assert!(matches!(minimalize_fas(&t, &[]), Err(Error::Precondition(_))));
    }

    #[test]
    fn minimalize_acyclic_is_empty() {
        let t = Tournament::from_fn(vec![2, 3, 2], |_, _| true).unwrap();
        let all: Vec<_> = t.edges().collect();
        assert!(minimalize_fas(&t, &all).unwrap().is_empty());
    }

    #[test]
    fn left_graph_is_fas_with_acyclic_complement() {
        for seed in 0..20 {
            let t = Tournament::sample_random(4, 3, RngSeed(seed)).unwrap();
            let pi = VertexOrder::random(12, &mut RngSeed(seed + 100).rng());
            let l = LeftGraph::new(&t, &pi).unwrap();
            let fas = l.directed_edges();
            assert!(is_feedback_arc_set(&t, &fas).unwrap());
            for (u, v) in t.edges() {
                if !l.adjacent(u, v) {
                    assert!(pi.position(u) > pi.position(v));
                }
            }
        }
    }

    #[test]
    fn witness_isolates_excluded_vertices() {
        for seed in 0..20 {
            let t = Tournament::sample_with_sizes(vec![4, 3, 5], RngSeed(seed)).unwrap();
            let w = upper_bound_witness(&t).unwrap();
            assert_eq!(w.excluded, vec![4, 5]);
            assert_eq!(w.paired_parts, vec![0, 2]);
            let l = LeftGraph::new(&t, &w.order).unwrap();
            assert!(w.validate(&l));
            assert!(is_feedback_arc_set(&t, &w.fas).unwrap());
            for e in l.directed_edges() {
                assert!(w.fas.binary_search(&e).is_ok());
            }
        }
    }

    #[test]
    fn witness_precondition() {
        let t = Tournament::sample_with_sizes(vec![1, 3, 3], RngSeed(0)).unwrap();
        assert!(matches!(upper_bound_witness(&t), Err(Error::Precondition(_))));
    }
}
