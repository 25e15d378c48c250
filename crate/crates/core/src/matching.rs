//! Maximum bipartite matching (Hopcroft–Karp) with Hall-violator certificates.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Bipartite graph on left `0..left` and right `0..right`, as left adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(right: usize, adj: Vec<Vec<usize>>) -> Self {
        debug_assert!(adj.iter().flatten().all(|&j| j < right));
        Self { right, adj }
    }

    pub fn from_predicate(left: usize, right: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let adj = (0..left)
            .map(|i| (0..right).filter(|&j| edge(i, j)).collect())
            .collect();
        Self { right, adj }
    }

    pub fn left_len(&self) -> usize {
        self.adj.len()
    }

    pub fn right_len(&self) -> usize {
        self.right
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(&j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    left_mate: Vec<usize>,
    right_mate: Vec<usize>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.left_mate.iter().filter(|&&j| j != FREE).count()
    }

    pub fn mate_of_left(&self, i: usize) -> Option<usize> {
        Some(self.left_mate[i]).filter(|&j| j != FREE)
    }

    pub fn mate_of_right(&self, j: usize) -> Option<usize> {
        Some(self.right_mate[j]).filter(|&i| i != FREE)
    }

    /// Matched `(left, right)` pairs in ascending left order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.left_mate
            .iter()
            .enumerate()
            .filter(|(_, &j)| j != FREE)
            .map(|(i, &j)| (i, j))
            .collect()
    }

    pub fn is_left_perfect(&self) -> bool {
        self.left_mate.iter().all(|&j| j != FREE)
    }

    /// Checks the pairs are edges of `g` and vertex-disjoint.
    pub fn is_valid_for(&self, g: &BipartiteGraph) -> bool {
        let mut used = vec![false; g.right_len()];
        for (i, j) in self.pairs() {
            if j >= g.right_len() || used[j] || !g.has_edge(i, j) || self.right_mate[j] != i {
                return false;
            }
            used[j] = true;
        }
        true
    }

    /// `true` iff an augmenting path exists (so the matching is not maximum).
    pub fn has_augmenting_path(&self, g: &BipartiteGraph) -> bool {
        let (_, _, free_right_reached) = self.alternating_reach(g);
        free_right_reached
    }

    /// Left vertices reachable from free left vertices by alternating paths,
    /// right vertices reached, and whether a free right vertex was reached.
    fn alternating_reach(&self, g: &BipartiteGraph) -> (Vec<bool>, Vec<bool>, bool) {
        let mut left_seen = vec![false; g.left_len()];
        let mut right_seen = vec![false; g.right_len()];
        let mut queue: VecDeque<usize> = (0..g.left_len()).filter(|&i| self.left_mate[i] == FREE).collect();
        for &i in &queue {
            left_seen[i] = true;
        }
        let mut augmenting = false;
        while let Some(i) = queue.pop_front() {
            for &j in g.neighbors(i) {
                if right_seen[j] {
                    continue;
                }
                right_seen[j] = true;
                match self.right_mate[j] {
                    FREE => augmenting = true,
                    i2 if !left_seen[i2] => {
                        left_seen[i2] = true;
                        queue.push_back(i2);
                    }
                    _ => {}
                }
            }
        }
        (left_seen, right_seen, augmenting)
    }

    /// For a maximum matching that misses some left vertex, the set of left
    /// vertices alternating-reachable from unmatched left vertices has a
    /// neighborhood smaller than itself (König). `None` if left-perfect.
    pub fn hall_violator(&self, g: &BipartiteGraph) -> Option<HallViolator> {
        if self.is_left_perfect() {
            return None;
        }
        let (left_seen, right_seen, augmenting) = self.alternating_reach(g);
        if augmenting {
            return None;
        }
        let left: Vec<usize> = (0..g.left_len()).filter(|&i| left_seen[i]).collect();
        let neighborhood: Vec<usize> = (0..g.right_len()).filter(|&j| right_seen[j]).collect();
        Some(HallViolator { left, neighborhood })
    }
}

/// A left set `R` whose neighborhood `N(R)` is smaller than `R`, certifying
/// that no left-perfect matching exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallViolator {
    pub left: Vec<usize>,
    pub neighborhood: Vec<usize>,
}

impl HallViolator {
    /// Recomputes `N(R)` from `g` and checks `|N(R)| < |R|`.
    pub fn verify(&self, g: &BipartiteGraph) -> bool {
        let mut hit = vec![false; g.right_len()];
        for &i in &self.left {
            if i >= g.left_len() {
                return false;
            }
            for &j in g.neighbors(i) {
                hit[j] = true;
            }
        }
        let n_r = hit.iter().filter(|&&h| h).count();
        n_r < self.left.len()
    }
}

/// Maximum-cardinality matching in O(E √V). Deterministic given adjacency order.
pub fn hopcroft_karp(g: &BipartiteGraph) -> Matching {
    let n_left = g.left_len();
    let mut left_mate = vec![FREE; n_left];
    let mut right_mate = vec![FREE; g.right_len()];
    let mut dist = vec![usize::MAX; n_left];
    let mut cursor = vec![0usize; n_left];

    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for i in 0..n_left {
            if left_mate[i] == FREE {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in g.neighbors(i) {
                match right_mate[j] {
                    FREE => found = true,
                    i2 if dist[i2] == usize::MAX => {
                        dist[i2] = dist[i] + 1;
                        queue.push_back(i2);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        cursor.iter_mut().for_each(|c| *c = 0);
        for i in 0..n_left {
            if left_mate[i] == FREE {
                augment(g, i, &mut left_mate, &mut right_mate, &mut dist, &mut cursor);
            }
        }
    }
    Matching { left_mate, right_mate }
}

/// Iterative layered DFS for one augmenting path from free left vertex `root`.
fn augment(
    g: &BipartiteGraph,
    root: usize,
    left_mate: &mut [usize],
    right_mate: &mut [usize],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    // stack of (left vertex, right vertex used to reach the next level)
    let mut stack: Vec<(usize, usize)> = vec![(root, FREE)];
    while let Some(&(i, _)) = stack.last() {
        let adj = g.neighbors(i);
        let mut advanced = false;
        while cursor[i] < adj.len() {
            let j = adj[cursor[i]];
            cursor[i] += 1;
            let i2 = right_mate[j];
            if i2 == FREE {
                // flip the path
                stack.last_mut().unwrap().1 = j;
                for &(li, rj) in &stack {
                    left_mate[li] = rj;
                    right_mate[rj] = li;
                }
                return true;
            }
            if dist[i2] == dist[i] + 1 {
                stack.last_mut().unwrap().1 = j;
                stack.push((i2, FREE));
                advanced = true;
                break;
            }
        }
        if !advanced {
            dist[i] = usize::MAX;
            stack.pop();
        }
    }
    false
}

/// Maximum matching between `left` and `right` under `adjacent`; pairs are
/// index pairs into the two slices.
pub fn bipartite_max_matching<L, R>(
    left: &[L],
    right: &[R],
    mut adjacent: impl FnMut(&L, &R) -> bool,
) -> (BipartiteGraph, Matching) {
    let g = BipartiteGraph::from_predicate(left.len(), right.len(), |i, j| adjacent(&left[i], &right[j]));
    let m = hopcroft_karp(&g);
    (g, m)
}
