//! Part-sliced bit matrices.
//!
//! Every row of a [`PartBits`] matrix is split into one word-aligned segment
//! per vertex part, so a neighborhood restricted to a single part is a
//! contiguous `&[u64]` and common-neighborhood counts reduce to AND + popcount.

use serde::{Deserialize, Serialize};
use std::ops::Range;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Vertex partition into contiguous id ranges, one per part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PartLayout {
    sizes: Vec<usize>,
    starts: Vec<usize>,
    word_starts: Vec<usize>,
    vertex_part: Vec<usize>,
}

impl PartLayout {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::parameter(format!("need at least 2 parts, got {}", sizes.len())));
        }
        if let Some(p) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::parameter(format!("part {p} is empty")));
        }
        let mut starts = Vec::with_capacity(sizes.len() + 1);
        let mut word_starts = Vec::with_capacity(sizes.len() + 1);
        let (mut s, mut w) = (0, 0);
        for &size in &sizes {
            starts.push(s);
            word_starts.push(w);
            s += size;
            w += words_for(size);
        }
        starts.push(s);
        word_starts.push(w);
        let vertex_part = sizes
            .iter()
            .enumerate()
            .flat_map(|(p, &size)| std::iter::repeat_n(p, size))
            .collect();
        Ok(Self {
            sizes,
            starts,
            word_starts,
            vertex_part,
        })
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn part_size(&self, part: usize) -> usize {
        self.sizes[part]
    }

    pub fn num_vertices(&self) -> usize {
        self.starts[self.k()]
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.vertex_part[v]
    }

    /// Index of `v` inside its own part.
    pub fn local(&self, v: usize) -> usize {
        v - self.starts[self.vertex_part[v]]
    }

    pub fn range(&self, part: usize) -> Range<usize> {
        self.starts[part]..self.starts[part + 1]
    }

    pub fn vertex(&self, part: usize, local: usize) -> usize {
        self.starts[part] + local
    }

    pub fn min_part_size(&self) -> usize {
        self.sizes.iter().copied().min().unwrap_or(0)
    }

    pub fn is_equal_parts(&self) -> bool {
        self.sizes.iter().all(|&s| s == self.sizes[0])
    }

    pub(crate) fn stride(&self) -> usize {
        self.word_starts[self.k()]
    }

    pub(crate) fn segment_words(&self, part: usize) -> Range<usize> {
        self.word_starts[part]..self.word_starts[part + 1]
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.num_vertices() {
            return Err(Error::parameter(format!(
                "vertex {v} out of range (|V| = {})",
                self.num_vertices()
            )));
        }
        Ok(())
    }

    pub fn check_part(&self, part: usize) -> Result<()> {
        if part >= self.k() {
            return Err(Error::parameter(format!("part {part} out of range (k = {})", self.k())));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for PartLayout {
    type Error = Error;
    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        PartLayout::new(sizes)
    }
}

impl From<PartLayout> for Vec<usize> {
    fn from(layout: PartLayout) -> Self {
        layout.sizes
    }
}

/// Square bit matrix over the vertices of a [`PartLayout`], rows sliced by part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartBits {
    stride: usize,
    words: Vec<u64>,
}

impl PartBits {
    pub fn zeros(layout: &PartLayout) -> Self {
        let stride = layout.stride();
        Self {
            stride,
            words: vec![0; stride * layout.num_vertices()],
        }
    }

    #[inline]
    fn locate(layout: &PartLayout, v: usize) -> (usize, u64) {
        let part = layout.part_of(v);
        let local = layout.local(v);
        (layout.word_starts[part] + local / WORD, 1u64 << (local % WORD))
    }

    #[inline]
    pub fn get(&self, layout: &PartLayout, row: usize, col: usize) -> bool {
        let (w, mask) = Self::locate(layout, col);
        self.words[row * self.stride + w] & mask != 0
    }

    #[inline]
    pub fn set(&mut self, layout: &PartLayout, row: usize, col: usize) {
        let (w, mask) = Self::locate(layout, col);
        self.words[row * self.stride + w] |= mask;
    }

    #[inline]
    pub fn segment(&self, layout: &PartLayout, row: usize, part: usize) -> &[u64] {
        let r = layout.segment_words(part);
        let base = row * self.stride;
        &self.words[base + r.start..base + r.end]
    }

    /// Popcount of `row` restricted to `part`.
    pub fn count_in_part(&self, layout: &PartLayout, row: usize, part: usize) -> usize {
        popcount(self.segment(layout, row, part))
    }

    /// Number of columns in `part` set in every one of `rows`.
    /// With no rows this is the whole part.
    pub fn common_count(&self, layout: &PartLayout, rows: &[usize], part: usize) -> usize {
        match rows {
            [] => layout.part_size(part),
            [r] => self.count_in_part(layout, *r, part),
            [first, rest @ ..] => {
                let seg0 = self.segment(layout, *first, part);
                let mut total = 0;
                for (i, &w0) in seg0.iter().enumerate() {
                    let mut acc = w0;
                    for &r in rest {
                        acc &= self.segment(layout, r, part)[i];
                        if acc == 0 {
                            break;
                        }
                    }
                    total += acc.count_ones() as usize;
                }
                total
            }
        }
    }

    /// Column vertices in `part` set in every one of `rows`, masked by `mask`
    /// (a part-local bitset) when given.
    pub fn common_in_part(&self, layout: &PartLayout, rows: &[usize], part: usize, mask: Option<&[u64]>) -> Vec<u64> {
        let len = layout.segment_words(part).len();
        let mut acc = match mask {
            Some(m) => m.to_vec(),
            None => full_mask(layout.part_size(part)),
        };
        debug_assert_eq!(acc.len(), len);
        for &r in rows {
            for (a, w) in acc.iter_mut().zip(self.segment(layout, r, part)) {
                *a &= *w;
            }
        }
        acc
    }
}

pub fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Part-local bitset with the low `bits` bits set.
pub fn full_mask(bits: usize) -> Vec<u64> {
    let mut v = vec![u64::MAX; words_for(bits)];
    if !bits.is_multiple_of(WORD) {
        if let Some(last) = v.last_mut() {
            *last = (1u64 << (bits % WORD)) - 1;
        }
    }
    v
}

/// Part-local bitset from a list of local indices.
pub fn mask_from_locals(bits: usize, locals: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut v = vec![0u64; words_for(bits)];
    for i in locals {
        v[i / WORD] |= 1u64 << (i % WORD);
    }
    v
}

/// Indices of set bits, ascending.
pub fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            }
        })
    })
}

/// Popcount of `a & b`.
pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_ranges_are_contiguous() {
        let l = PartLayout::new(vec![3, 70, 2]).unwrap();
        assert_eq!(l.num_vertices(), 75);
        assert_eq!(l.range(1), 3..73);
        assert_eq!(l.part_of(72), 1);
        assert_eq!(l.local(72), 69);
        assert_eq!(l.part_of(73), 2);
        assert_eq!(l.stride(), 1 + 2 + 1);
    }

    #[test]
    fn layout_rejects_bad_sizes() {
        assert!(PartLayout::new(vec![3]).is_err());
        assert!(PartLayout::new(vec![3, 0]).is_err());
    }

    #[test]
    fn common_count_intersects_rows() {
        let l = PartLayout::new(vec![2, 100]).unwrap();
        let mut m = PartBits::zeros(&l);
        for c in [2, 3, 70, 101] {
            m.set(&l, 0, c);
        }
        for c in [3, 70, 90] {
            m.set(&l, 1, c);
        }
        assert_eq!(m.common_count(&l, &[0], 1), 4);
        assert_eq!(m.common_count(&l, &[0, 1], 1), 2);
        assert_eq!(m.common_count(&l, &[], 1), 100);
        let common = m.common_in_part(&l, &[0, 1], 1, None);
        assert_eq!(ones(&common).collect::<Vec<_>>(), vec![1, 68]);
    }

    #[test]
    fn masks() {
        assert_eq!(popcount(&full_mask(65)), 65);
        assert_eq!(popcount(&full_mask(64)), 64);
        let m = mask_from_locals(70, [0, 64, 69]);
        assert_eq!(ones(&m).collect::<Vec<_>>(), vec![0, 64, 69]);
    }
}
