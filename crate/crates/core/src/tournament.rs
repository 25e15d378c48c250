//! k-partite tournaments: orientations of complete multipartite graphs.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bits::{self, PartBits, PartLayout};
use crate::error::{Error, Result};
use crate::seed::RngSeed;

pub const KPT_MAGIC: &[u8; 4] = b"KPT1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

/// An orientation of the complete k-partite graph on `layout`.
///
/// `out` holds bit `(u, v)` iff `u -> v`. Same-part bits are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tournament {
    layout: PartLayout,
    out: PartBits,
}

impl Tournament {
    /// Builds a tournament by asking `orient(u, v)` for every cross-part pair
    /// `u < v` in canonical order; `true` means `u -> v`.
    pub fn from_fn(sizes: Vec<usize>, mut orient: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let layout = PartLayout::new(sizes)?;
        let mut out = PartBits::zeros(&layout);
        for (u, v) in cross_pairs(&layout) {
            if orient(u, v) {
                out.set(&layout, u, v);
            } else {
                out.set(&layout, v, u);
            }
        }
        Ok(Self { layout, out })
    }

    /// Tournament with the given part sizes and every cross pair oriented by
    /// an independent fair coin drawn from `seed`.
    pub fn sample_with_sizes(sizes: Vec<usize>, seed: RngSeed) -> Result<Self> {
        let mut rng = seed.rng();
        let mut buf = 0u64;
        let mut left = 0u32;
        Self::from_fn(sizes, |_, _| {
            if left == 0 {
                buf = rng.next_u64();
                left = 64;
            }
            let bit = buf & 1 == 1;
            buf >>= 1;
            left -= 1;
            bit
        })
    }

    /// Uniform random tournament with `k` parts of `n` vertices each.
    pub fn sample_random(n: usize, k: usize, seed: RngSeed) -> Result<Self> {
        if n == 0 {
            return Err(Error::parameter("n must be at least 1"));
        }
        if k < 2 {
            return Err(Error::parameter("k must be at least 2"));
        }
        Self::sample_with_sizes(vec![n; k], seed)
    }

    /// Random orientation of the Turán graph on `total` vertices with `k`
    /// parts; the `total mod k` larger parts come first.
    pub fn sample_turan(total: usize, k: usize, seed: RngSeed) -> Result<Self> {
        Self::sample_with_sizes(turan_sizes(total, k)?, seed)
    }

    pub fn layout(&self) -> &PartLayout {
        &self.layout
    }

    pub fn k(&self) -> usize {
        self.layout.k()
    }

    pub fn part_sizes(&self) -> &[usize] {
        self.layout.sizes()
    }

    pub fn num_vertices(&self) -> usize {
        self.layout.num_vertices()
    }

    /// `true` iff `u -> v` is an edge.
    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out.get(&self.layout, u, v)
    }

    /// `true` iff `u` and `v` lie in different parts.
    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.layout.part_of(u) != self.layout.part_of(v)
    }

    /// Part-local bitset of the out-neighbors of `v` in `part`.
    pub fn out_segment(&self, v: usize, part: usize) -> &[u64] {
        self.out.segment(&self.layout, v, part)
    }

    /// Part-local bitset of the `dir`-neighbors of `v` in `part`.
    pub fn neighbor_mask(&self, v: usize, dir: Direction, part: usize) -> Vec<u64> {
        if part == self.layout.part_of(v) {
            return vec![0; self.out_segment(v, part).len()];
        }
        let seg = self.out_segment(v, part);
        match dir {
            Direction::Out => seg.to_vec(),
            Direction::In => bits::full_mask(self.layout.part_size(part))
                .into_iter()
                .zip(seg)
                .map(|(f, s)| f & !s)
                .collect(),
        }
    }

    /// All vertices of `part` that are `dir`-neighbors of `v`; empty when
    /// `part` is the part of `v`.
    pub fn neighbors(&self, v: usize, dir: Direction, part: usize) -> Result<Vec<usize>> {
        self.layout.check_vertex(v)?;
        self.layout.check_part(part)?;
        let start = self.layout.range(part).start;
        Ok(bits::ones(&self.neighbor_mask(v, dir, part))
            .map(|i| start + i)
            .collect())
    }

    pub fn out_degree(&self, v: usize) -> usize {
        (0..self.k()).map(|p| self.out.count_in_part(&self.layout, v, p)).sum()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        let own = self.layout.part_size(self.layout.part_of(v));
        self.num_vertices() - own - self.out_degree(v)
    }

    /// Cross-part pairs `u < v` in canonical order.
    pub fn cross_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        cross_pairs(&self.layout)
    }

    pub fn num_cross_pairs(&self) -> usize {
        num_cross_pairs(self.layout.sizes()) as usize
    }

    /// Directed edges `(source, target)` ordered by the canonical pair order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cross_pairs()
            .map(|(u, v)| if self.has_edge(u, v) { (u, v) } else { (v, u) })
    }

    /// Orientation bits in canonical pair order (`true` means `u -> v`, `u < v`).
    pub fn orientation_bits(&self) -> impl Iterator<Item = bool> + '_ {
        self.cross_pairs().map(|(u, v)| self.has_edge(u, v))
    }

    /// Sub-tournament induced by `keep` (ascending ids). Parts emptied by the
    /// selection are an error.
    pub fn induced(&self, keep: &[usize]) -> Result<Self> {
        let mut sizes = vec![0; self.k()];
        for w in keep.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::parameter("induced: vertex list must be strictly ascending"));
            }
        }
        for &v in keep {
            self.layout.check_vertex(v)?;
            sizes[self.layout.part_of(v)] += 1;
        }
        Self::from_fn(sizes, |a, b| self.has_edge(keep[a], keep[b]))
    }

    /// Drops the last vertex of every part larger than the smallest one.
    pub fn reduce_to_equal_parts(&self) -> Result<Self> {
        let min = self.layout.min_part_size();
        let max = self.part_sizes().iter().copied().max().unwrap_or(min);
        if max - min >= 2 {
            return Err(Error::precondition(format!(
                "part sizes differ by {} (at most 1 allowed)",
                max - min
            )));
        }
        if max == min {
            return Ok(self.clone());
        }
        let keep: Vec<usize> = (0..self.k())
            .flat_map(|p| {
                let r = self.layout.range(p);
                r.start..r.start + min
            })
            .collect();
        self.induced(&keep)
    }

    /// `.kpt` encoding: magic, k and part sizes as little-endian u32, then the
    /// canonical orientation bits packed MSB-first and zero-padded.
    pub fn to_kpt_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 4 * self.k() + self.num_cross_pairs() / 8 + 1);
        out.extend_from_slice(KPT_MAGIC);
        out.extend_from_slice(&(self.k() as u32).to_le_bytes());
        for &s in self.part_sizes() {
            out.extend_from_slice(&(s as u32).to_le_bytes());
        }
        let mut byte = 0u8;
        let mut filled = 0;
        for bit in self.orientation_bits() {
            byte = (byte << 1) | bit as u8;
            filled += 1;
            if filled == 8 {
                out.push(byte);
                byte = 0;
                filled = 0;
            }
        }
        if filled > 0 {
            out.push(byte << (8 - filled));
        }
        out
    }

    pub fn from_kpt_bytes(bytes: &[u8]) -> Result<Self> {
        let read_u32 = |off: usize| -> Result<u32> {
            bytes
                .get(off..off + 4)
                .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
                .ok_or_else(|| Error::parse(bytes.len(), "truncated header"))
        };
        if bytes.len() < 4 {
            return Err(Error::parse(bytes.len(), "truncated magic"));
        }
        if &bytes[..4] != KPT_MAGIC {
            return Err(Error::parse(0, "bad magic (expected \"KPT1\")"));
        }
        let k = read_u32(4)? as usize;
        if k < 2 {
            return Err(Error::parse(4, format!("k = {k} (need at least 2)")));
        }
        let header_len = 8usize
            .checked_add(k.checked_mul(4).ok_or_else(|| Error::parse(4, "k too large"))?)
            .ok_or_else(|| Error::parse(4, "k too large"))?;
        if bytes.len() < header_len {
            return Err(Error::parse(bytes.len(), "truncated header"));
        }
        let mut sizes = Vec::with_capacity(k);
        for p in 0..k {
            let off = 8 + 4 * p;
            let s = read_u32(off)? as usize;
            if s == 0 {
                return Err(Error::parse(off, format!("part {p} has size 0")));
            }
            sizes.push(s);
        }
        let pairs = num_cross_pairs(&sizes);
        let body_len = pairs.div_ceil(8);
        let expected = header_len as u128 + body_len;
        if (bytes.len() as u128) < expected {
            return Err(Error::parse(
                bytes.len(),
                format!("truncated orientation bits: expected {expected} bytes total"),
            ));
        }
        if (bytes.len() as u128) > expected {
            return Err(Error::parse(
                expected as usize,
                format!(
                    "{} trailing bytes after orientation bits",
                    bytes.len() as u128 - expected
                ),
            ));
        }
        let pad = (body_len * 8 - pairs) as u32;
        if pad > 0 {
            let last = bytes[bytes.len() - 1];
            if last & ((1u8 << pad) - 1) != 0 {
                return Err(Error::parse(bytes.len() - 1, "nonzero padding bits"));
            }
        }
        let body = &bytes[header_len..];
        let mut idx = 0usize;
        Self::from_fn(sizes, |_, _| {
            let bit = body[idx / 8] >> (7 - idx % 8) & 1 == 1;
            idx += 1;
            bit
        })
        .map_err(|e| Error::parse(8, e.to_string()))
    }

    pub fn to_json(&self) -> TournamentJson {
        TournamentJson {
            k: self.k(),
            part_sizes: self.part_sizes().to_vec(),
            bits: self.orientation_bits().map(|b| if b { '1' } else { '0' }).collect(),
        }
    }

    pub fn from_json(j: &TournamentJson) -> Result<Self> {
        if j.k != j.part_sizes.len() {
            return Err(Error::parse(
                0,
                format!("k = {} but {} part sizes", j.k, j.part_sizes.len()),
            ));
        }
        let layout = PartLayout::new(j.part_sizes.clone())?;
        let pairs = num_cross_pairs(layout.sizes());
        if j.bits.len() as u128 != pairs {
            return Err(Error::parse(
                0,
                format!("expected {pairs} orientation bits, got {}", j.bits.len()),
            ));
        }
        let chars: Vec<char> = j.bits.chars().collect();
        if let Some(i) = chars.iter().position(|c| *c != '0' && *c != '1') {
            return Err(Error::parse(i, "orientation bits must be '0' or '1'"));
        }
        let mut it = chars.into_iter();
        Self::from_fn(j.part_sizes.clone(), |_, _| it.next() == Some('1'))
    }
}

/// JSON debug form of a [`Tournament`]: same fields as `.kpt`, bits as a
/// `'0'`/`'1'` string in canonical pair order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentJson {
    pub k: usize,
    pub part_sizes: Vec<usize>,
    pub bits: String,
}

/// Part sizes of the Turán graph T(total, k), larger parts first.
pub fn turan_sizes(total: usize, k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::parameter("k must be at least 2"));
    }
    if total < k {
        return Err(Error::parameter(format!("N = {total} is smaller than k = {k}")));
    }
    let (q, rem) = (total / k, total % k);
    Ok((0..k).map(|i| if i < rem { q + 1 } else { q }).collect())
}

fn num_cross_pairs(sizes: &[usize]) -> u128 {
    let total: u128 = sizes.iter().map(|&s| s as u128).sum();
    let same: u128 = sizes.iter().map(|&s| (s as u128) * (s as u128)).sum();
    (total * total - same) / 2
}

fn cross_pairs(layout: &PartLayout) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = layout.num_vertices();
    (0..n).flat_map(move |u| {
        let next = layout.range(layout.part_of(u)).end;
        (next..n).map(move |v| (u, v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair_tournament() {
        let t = Tournament::sample_random(1, 2, RngSeed(3)).unwrap();
        assert_eq!(t.edges().count(), 1);
        assert!(t.has_edge(0, 1) ^ t.has_edge(1, 0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = Tournament::sample_random(2, 3, RngSeed(11)).unwrap();
        let b = Tournament::sample_random(2, 3, RngSeed(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_kpt_bytes(), b.to_kpt_bytes());
    }

    #[test]
    fn sampling_rejects_bad_parameters() {
        assert!(matches!(
            Tournament::sample_random(0, 2, RngSeed(0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            Tournament::sample_random(3, 1, RngSeed(0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            Tournament::sample_turan(2, 3, RngSeed(0)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn turan_part_sizes() {
        assert_eq!(turan_sizes(7, 3).unwrap(), vec![3, 2, 2]);
        assert_eq!(turan_sizes(6, 3).unwrap(), vec![2, 2, 2]);
        let t = Tournament::sample_turan(4, 2, RngSeed(5)).unwrap();
        assert_eq!(t, Tournament::sample_random(2, 2, RngSeed(5)).unwrap());
    }

    #[test]
    fn reduce_drops_last_vertex_of_large_parts() {
        let t = Tournament::sample_turan(7, 3, RngSeed(9)).unwrap();
        let r = t.reduce_to_equal_parts().unwrap();
        assert_eq!(r.part_sizes(), &[2, 2, 2]);
        // old ids 0,1 | 3,4 | 5,6 map to new 0,1 | 2,3 | 4,5
        let map = [0, 1, 3, 4, 5, 6];
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(r.has_edge(a, b), t.has_edge(map[a], map[b]));
            }
        }
        let even = Tournament::sample_random(2, 2, RngSeed(1)).unwrap();
        assert_eq!(even.reduce_to_equal_parts().unwrap(), even);
        let lopsided = Tournament::sample_with_sizes(vec![4, 2], RngSeed(1)).unwrap();
        assert!(matches!(lopsided.reduce_to_equal_parts(), Err(Error::Precondition(_))));
    }

    #[test]
    fn neighbors_single_edge() {
        let t = Tournament::from_fn(vec![1, 1], |_, _| true).unwrap();
        assert_eq!(t.neighbors(0, Direction::Out, 1).unwrap(), vec![1]);
        assert!(t.neighbors(0, Direction::In, 1).unwrap().is_empty());
        assert!(t.neighbors(0, Direction::Out, 0).unwrap().is_empty());
    }

    #[test]
    fn neighbors_partition_other_part() {
        let t = Tournament::sample_random(50, 2, RngSeed(77)).unwrap();
        for v in [0, 17, 49, 50, 99] {
            let other = 1 - t.layout().part_of(v);
            let o = t.neighbors(v, Direction::Out, other).unwrap();
            let i = t.neighbors(v, Direction::In, other).unwrap();
            assert_eq!(o.len() + i.len(), 50);
            assert_eq!(t.out_degree(v) + t.in_degree(v), 50);
        }
    }

    #[test]
    fn kpt_round_trip_and_errors() {
        let t = Tournament::sample_with_sizes(vec![3, 2, 4], RngSeed(2)).unwrap();
        let bytes = t.to_kpt_bytes();
        assert_eq!(Tournament::from_kpt_bytes(&bytes).unwrap(), t);

        let err = Tournament::from_kpt_bytes(&bytes[..bytes.len() - 1]).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(
            Tournament::from_kpt_bytes(&long),
            Err(Error::Parse { offset, .. }) if offset == bytes.len()
        ));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            Tournament::from_kpt_bytes(&bad),
            Err(Error::Parse { offset: 0, .. })
        ));
        assert!(Tournament::from_kpt_bytes(b"KP").is_err());
    }

    #[test]
    fn kpt_layout_is_exact() {
        // k=2, n=1, edge 0 -> 1
        let t = Tournament::from_fn(vec![1, 1], |_, _| true).unwrap();
        assert_eq!(
            t.to_kpt_bytes(),
            vec![b'K', b'P', b'T', b'1', 2, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0b1000_0000]
        );
        let mut padded = t.to_kpt_bytes();
        *padded.last_mut().unwrap() |= 1;
        assert!(matches!(Tournament::from_kpt_bytes(&padded), Err(Error::Parse { .. })));
    }

    #[test]
    fn json_round_trip() {
        let t = Tournament::sample_random(3, 3, RngSeed(4)).unwrap();
        let j = serde_json::to_string(&t.to_json()).unwrap();
        let back: TournamentJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Tournament::from_json(&back).unwrap(), t);
    }
}
