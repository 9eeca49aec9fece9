//! Affine maps `y -> n*y + x` of the circle.

use num::BigInt;
use rayon::prelude::*;

use crate::arcset::ArcSet;
use crate::circle::{int, CirclePoint, Rational};
use crate::error::{Error, Result};

pub const MAX_GRID: u64 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineCircleMap {
    pub multiplier: u64,
    pub offset: CirclePoint,
}

impl AffineCircleMap {
    pub fn new(multiplier: u64, offset: CirclePoint) -> Self {
        AffineCircleMap { multiplier, offset }
    }

    /// `y -> n*y`.
    pub fn dilation(multiplier: u64) -> Self {
        Self::new(multiplier, CirclePoint::zero())
    }

    pub fn apply(&self, y: &CirclePoint) -> CirclePoint {
        CirclePoint::normalize(y.value() * int(self.multiplier) + self.offset.value())
    }

    fn require_nonconstant(&self) -> Result<()> {
        if self.multiplier == 0 {
            Err(Error::MultiplierTooSmall { min: 1, got: 0 })
        } else {
            Ok(())
        }
    }

    /// Exact preimage. Each piece `[a, b)` pulls back to the `n` arcs
    /// `[(a - x + k)/n, (b - x + k)/n)`, `k = 0..n`.
    pub fn preimage(&self, set: &ArcSet) -> Result<ArcSet> {
        self.require_nonconstant()?;
        let n = int(self.multiplier);
        let x = self.offset.value();
        let mut arcs = Vec::new();
        for (lo, hi) in set.pieces() {
            let length = (hi - lo) / &n;
            for k in 0..self.multiplier {
                arcs.push(((lo - x + int(k)) / &n, length.clone()));
            }
        }
        Ok(ArcSet::from_arcs(arcs))
    }

    /// Whether `measure(T^-1(S)) = measure(S)` for every `S` in `sample`.
    pub fn is_measure_preserving_on(&self, sample: &[ArcSet]) -> Result<bool> {
        self.require_nonconstant()?;
        for s in sample {
            if self.preimage(s)?.measure() != s.measure() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_invariant(&self, set: &ArcSet) -> Result<bool> {
        Ok(self.preimage(set)? == *set)
    }

    /// Every union of grid cells `[j/k, (j+1)/k)` that is exactly invariant,
    /// ordered by the cell bitmask (bit `j` set when cell `j` is included).
    ///
    /// All `2^k` subsets are enumerated. The circle is cut at every grid
    /// point and every endpoint of a cell preimage; each subset and its
    /// preimage are then bitmasks over the resulting atoms, so the test per
    /// subset is a word-wise comparison.
    pub fn invariant_set_search(&self, grid: u64) -> Result<Vec<ArcSet>> {
        self.require_nonconstant()?;
        if !(1..=MAX_GRID).contains(&grid) {
            return Err(Error::GridOutOfRange(grid));
        }
        let k = grid as usize;
        let cells: Vec<ArcSet> = (0..grid).map(|j| grid_cell(j, grid)).collect();
        let pulled: Vec<ArcSet> = cells.iter().map(|c| self.preimage(c)).collect::<Result<_>>()?;

        let mut cuts: Vec<Rational> = (0..=grid).map(|j| Rational::new(BigInt::from(j), BigInt::from(grid))).collect();
        for p in &pulled {
            for (lo, hi) in p.pieces() {
                cuts.push(lo.clone());
                cuts.push(hi.clone());
            }
        }
        cuts.sort();
        cuts.dedup();
        let mids: Vec<CirclePoint> = cuts
            .windows(2)
            .map(|w| CirclePoint::normalize((&w[0] + &w[1]) / BigInt::from(2)))
            .collect();
        let words = mids.len().div_ceil(64);
        let mask_of = |s: &ArcSet| -> Vec<u64> {
            let mut m = vec![0u64; words];
            for (i, x) in mids.iter().enumerate() {
                if s.contains(x) {
                    m[i / 64] |= 1 << (i % 64);
                }
            }
            m
        };
        let cell_masks: Vec<Vec<u64>> = cells.iter().map(&mask_of).collect();
        let pre_masks: Vec<Vec<u64>> = pulled.iter().map(&mask_of).collect();

        let hits: Vec<u64> = (0..1u64 << k)
            .into_par_iter()
            .filter(|&subset| {
                let mut own = vec![0u64; words];
                let mut pre = vec![0u64; words];
                for j in 0..k {
                    if subset >> j & 1 == 1 {
                        for w in 0..words {
                            own[w] |= cell_masks[j][w];
                            pre[w] |= pre_masks[j][w];
                        }
                    }
                }
                own == pre
            })
            .collect();

        Ok(hits
            .into_iter()
            .map(|subset| {
                let chosen = (0..k).filter(|j| subset >> j & 1 == 1).map(|j| &cells[j]);
                ArcSet::union_all(chosen)
            })
            .collect())
    }
}

fn grid_cell(j: u64, k: u64) -> ArcSet {
    ArcSet::interval(Rational::new(BigInt::from(j), BigInt::from(k)), Rational::new(BigInt::from(j + 1), BigInt::from(k)))
}

/// Checks `e ∘ g ∘ e⁻¹ = f` on `sample`, where `f(y) = n*y`,
/// `g(y) = n*y + x` and `e` is translation by `x/(n-1)`.
pub fn conjugation_check(n: u64, x: &CirclePoint, sample: &[CirclePoint]) -> Result<bool> {
    if n < 2 {
        return Err(Error::MultiplierTooSmall { min: 2, got: n });
    }
    let shift = CirclePoint::normalize(x.value() / int(n - 1));
    let f = AffineCircleMap::dilation(n);
    let g = AffineCircleMap::new(n, x.clone());
    Ok(sample.iter().all(|y| {
        let pulled = y - &shift;
        &g.apply(&pulled) + &shift == f.apply(y)
    }))
}

/// Same identity, but computed from an arbitrary rational representative of
/// the offset (`x_rep` need not lie in `[0, 1)`).
pub fn conjugation_check_with_representative(n: u64, x_rep: &Rational, sample: &[CirclePoint]) -> Result<bool> {
    if n < 2 {
        return Err(Error::MultiplierTooSmall { min: 2, got: n });
    }
    let shift = CirclePoint::normalize(x_rep / int(n - 1));
    let g = AffineCircleMap::new(n, CirclePoint::normalize(x_rep.clone()));
    let f = AffineCircleMap::dilation(n);
    Ok(sample.iter().all(|y| &g.apply(&(y - &shift)) + &shift == f.apply(y)))
}
