//! Finite unions of half-open arcs on the circle.
//!
//! An [`ArcSet`] is stored as a sorted list of disjoint, non-adjacent
//! intervals `[lo, hi)` with `0 <= lo < hi <= 1`. An arc that wraps past 0
//! is held as two pieces `[a, 1)` and `[0, b)`; [`ArcSet::arcs`] joins them
//! back. Since every set has exactly one such form, set equality is
//! structural equality.

use std::cmp::Ordering;

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circle::{int, rational_str, CirclePoint, Rational};
use crate::error::{Error, Result};

/// The half-open arc `{start + t : 0 <= t < length}`, `0 < length <= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub start: CirclePoint,
    #[serde(with = "rational_str")]
    pub length: Rational,
}

impl Arc {
    pub fn new(start: CirclePoint, length: Rational) -> Result<Self> {
        if !length.is_positive() || length > Rational::one() {
            return Err(Error::Parse(format!("arc length {length} outside (0, 1]")));
        }
        Ok(Arc { start, length })
    }

    pub fn end(&self) -> CirclePoint {
        CirclePoint::normalize(self.start.value() + &self.length)
    }

    pub fn contains(&self, x: &CirclePoint) -> bool {
        (x - &self.start).value() < &self.length
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Interval {
    lo: Rational,
    hi: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ArcSet {
    pieces: Vec<Interval>,
}

/// Pushes the arc starting at `start` (any rational) of `length` as one or
/// two unit-interval pieces. Lengths `>= 1` give the full circle.
fn push_arc(out: &mut Vec<Interval>, start: &Rational, length: &Rational) {
    if !length.is_positive() {
        return;
    }
    if *length >= Rational::one() {
        out.push(Interval { lo: Rational::zero(), hi: Rational::one() });
        return;
    }
    let lo = start - start.floor();
    let hi = &lo + length;
    if hi <= Rational::one() {
        out.push(Interval { lo, hi });
    } else {
        out.push(Interval { lo, hi: Rational::one() });
        out.push(Interval { lo: Rational::zero(), hi: hi - Rational::one() });
    }
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { pieces: Vec::new() }
    }

    pub fn full() -> Self {
        ArcSet { pieces: vec![Interval { lo: Rational::zero(), hi: Rational::one() }] }
    }

    /// Canonicalises an arbitrary list of pieces: sort, then merge overlaps
    /// and touching ends.
    fn from_pieces(mut pieces: Vec<Interval>) -> Self {
        pieces.retain(|p| p.lo < p.hi);
        pieces.sort_unstable_by(|a, b| a.lo.cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                    }
                }
                _ => merged.push(p),
            }
        }
        ArcSet { pieces: merged }
    }

    /// Union of arcs given as `(start, length)`; non-positive lengths are
    /// skipped and lengths of at least 1 cover the circle.
    pub fn from_arcs<I>(arcs: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut pieces = Vec::new();
        for (start, length) in arcs {
            push_arc(&mut pieces, &start, &length);
        }
        Self::from_pieces(pieces)
    }

    pub fn arc(start: &CirclePoint, length: &Rational) -> Self {
        Self::from_arcs([(start.value().clone(), length.clone())])
    }

    /// The unit-interval piece `[lo, hi)`, both ends in `[0, 1]`.
    pub fn interval(lo: Rational, hi: Rational) -> Self {
        assert!(!lo.is_negative() && hi <= Rational::one(), "interval outside [0, 1]");
        Self::from_pieces(vec![Interval { lo, hi }])
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].lo.is_zero() && self.pieces[0].hi.is_one()
    }

    /// Pieces of the internal unit-interval form, as `(lo, hi)`.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.pieces.iter().map(|p| (&p.lo, &p.hi))
    }

    /// Arcs of the set with wrap-around pieces joined, sorted by start.
    pub fn arcs(&self) -> Vec<Arc> {
        let n = self.pieces.len();
        let wraps = n >= 2 && self.pieces[0].lo.is_zero() && self.pieces[n - 1].hi.is_one();
        let mut out = Vec::with_capacity(n);
        let inner = if wraps { &self.pieces[1..n - 1] } else { &self.pieces[..] };
        for p in inner {
            out.push(Arc { start: CirclePoint::normalize(p.lo.clone()), length: &p.hi - &p.lo });
        }
        if wraps {
            let first = &self.pieces[0];
            let last = &self.pieces[n - 1];
            out.push(Arc {
                start: CirclePoint::normalize(last.lo.clone()),
                length: (&last.hi - &last.lo) + &first.hi,
            });
        }
        out
    }

    pub fn measure(&self) -> Rational {
        self.pieces.iter().fold(Rational::zero(), |acc, p| acc + (&p.hi - &p.lo))
    }

    pub fn contains(&self, x: &CirclePoint) -> bool {
        let v = x.value();
        // last piece with lo <= v
        let idx = self.pieces.partition_point(|p| p.lo <= *v);
        idx > 0 && *v < self.pieces[idx - 1].hi
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut pieces = Vec::with_capacity(self.pieces.len() + other.pieces.len());
        pieces.extend(self.pieces.iter().cloned());
        pieces.extend(other.pieces.iter().cloned());
        Self::from_pieces(pieces)
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a ArcSet>>(sets: I) -> ArcSet {
        Self::from_pieces(sets.into_iter().flat_map(|s| s.pieces.iter().cloned()).collect())
    }

    pub fn inter(&self, other: &ArcSet) -> ArcSet {
        let (a, b) = (&self.pieces, &other.pieces);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = std::cmp::max(&a[i].lo, &b[j].lo);
            let hi = std::cmp::min(&a[i].hi, &b[j].hi);
            if lo < hi {
                out.push(Interval { lo: lo.clone(), hi: hi.clone() });
            }
            match a[i].hi.cmp(&b[j].hi) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        // pieces of the inputs are non-adjacent, so the overlaps are too
        ArcSet { pieces: out }
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        let mut cursor = Rational::zero();
        for p in &self.pieces {
            if cursor < p.lo {
                out.push(Interval { lo: cursor, hi: p.lo.clone() });
            }
            cursor = p.hi.clone();
        }
        if cursor < Rational::one() {
            out.push(Interval { lo: cursor, hi: Rational::one() });
        }
        ArcSet { pieces: out }
    }

    pub fn diff(&self, other: &ArcSet) -> ArcSet {
        self.inter(&other.complement())
    }

    pub fn is_subset(&self, other: &ArcSet) -> bool {
        self.diff(other).is_empty()
    }

    /// `measure(self \ other) + measure(other \ self)`.
    pub fn symm_diff_measure(&self, other: &ArcSet) -> Rational {
        self.diff(other).measure() + other.diff(self).measure()
    }

    /// Image under `y -> a + y`.
    pub fn translate(&self, a: &CirclePoint) -> ArcSet {
        let shift = a.value();
        Self::from_arcs(self.pieces.iter().map(|p| (&p.lo + shift, &p.hi - &p.lo)))
    }

    /// Image under `y -> m*y`: an arc of length `l` at `s` maps onto the arc
    /// of length `min(1, m*l)` at `m*s`.
    pub fn scale_image(&self, m: u64) -> ArcSet {
        assert!(m >= 1, "scale factor must be positive");
        let factor = int(m);
        Self::from_arcs(self.arcs().into_iter().map(|a| (a.start.value() * &factor, a.length * &factor)))
    }

    /// Points within open distance `delta` of some point in `points`, as
    /// half-open arcs `[y - delta, y + delta)`.
    pub fn thicken(points: &[CirclePoint], delta: &Rational) -> ArcSet {
        if !delta.is_positive() || points.is_empty() {
            return ArcSet::empty();
        }
        let width = delta * BigInt::from(2);
        if width >= Rational::one() {
            return ArcSet::full();
        }
        Self::from_arcs(points.iter().map(|y| (y.value() - delta, width.clone())))
    }
}

#[derive(Serialize, Deserialize)]
struct ArcSetJson {
    arcs: Vec<Arc>,
}

impl Serialize for ArcSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArcSetJson { arcs: self.arcs() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArcSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ArcSetJson::deserialize(d)?;
        for a in &raw.arcs {
            if !a.length.is_positive() || a.length > Rational::one() {
                return Err(serde::de::Error::custom(format!("arc length {} outside (0, 1]", a.length)));
            }
        }
        Ok(ArcSet::from_arcs(raw.arcs.into_iter().map(|a| (a.start.into_value(), a.length))))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::circle::ratio;
    use proptest::prelude::*;

    fn iv(a: (i64, i64), b: (i64, i64)) -> ArcSet {
        ArcSet::interval(ratio(a.0, a.1), ratio(b.0, b.1))
    }

    fn pt(n: i64, d: i64) -> CirclePoint {
        CirclePoint::from_ratio(n, d)
    }

    /// Measure of `{x : member(x)}` by testing the midpoint of every cell of
    /// the partition cut at `breaks`. Valid whenever membership is constant
    /// on each open cell.
    fn measure_by_cells(breaks: &[Rational], member: impl Fn(&CirclePoint) -> bool) -> Rational {
        let mut cuts: Vec<Rational> = breaks.iter().map(|b| CirclePoint::normalize(b.clone()).into_value()).collect();
        cuts.push(Rational::zero());
        cuts.push(Rational::one());
        cuts.sort();
        cuts.dedup();
        let mut total = Rational::zero();
        for w in cuts.windows(2) {
            let mid = CirclePoint::normalize((&w[0] + &w[1]) / BigInt::from(2));
            if member(&mid) {
                total += &w[1] - &w[0];
            }
        }
        total
    }

    #[test]
    fn boolean_examples() {
        assert_eq!(iv((0, 1), (1, 4)).union(&iv((1, 4), (1, 2))), iv((0, 1), (1, 2)));
        assert_eq!(iv((0, 1), (1, 2)).union(&iv((1, 4), (1, 2))).arcs().len(), 1);
        assert_eq!(iv((0, 1), (1, 2)).inter(&iv((1, 4), (3, 4))), iv((1, 4), (1, 2)));
        let c = ArcSet::empty().complement();
        assert!(c.is_full());
        assert_eq!(c.measure(), ratio(1, 1));
        assert_eq!(iv((0, 1), (1, 2)).diff(&iv((1, 4), (3, 4))), iv((0, 1), (1, 4)));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(iv((0, 1), (1, 3)).measure(), ratio(1, 3));
        assert_eq!(ArcSet::empty().measure(), ratio(0, 1));
        let s = iv((0, 1), (1, 8)).union(&iv((1, 2), (3, 4)));
        assert_eq!(s.measure(), ratio(3, 8));
    }

    #[test]
    fn symm_diff_examples() {
        let half = iv((0, 1), (1, 2));
        assert_eq!(half.symm_diff_measure(&half), ratio(0, 1));
        assert_eq!(half.symm_diff_measure(&iv((1, 2), (1, 1))), ratio(1, 1));
        let t = iv((1, 4), (3, 4));
        let breaks = [ratio(0, 1), ratio(1, 2), ratio(1, 4), ratio(3, 4)];
        let oracle = measure_by_cells(&breaks, |x| {
            let in_s = *x.value() < ratio(1, 2);
            let in_t = *x.value() >= ratio(1, 4) && *x.value() < ratio(3, 4);
            in_s != in_t
        });
        assert_eq!(oracle, ratio(1, 2));
        assert_eq!(half.symm_diff_measure(&t), oracle);
    }

    #[test]
    fn translate_examples() {
        assert_eq!(iv((0, 1), (1, 4)).translate(&pt(1, 2)), iv((1, 2), (3, 4)));
        let s = iv((1, 8), (1, 3)).union(&iv((1, 2), (5, 7)));
        assert_eq!(s.translate(&pt(0, 1)), s);
        assert_eq!(iv((1, 2), (1, 1)).translate(&pt(3, 4)), iv((1, 4), (3, 4)));
    }

    #[test]
    fn scale_image_examples() {
        assert_eq!(iv((0, 1), (1, 4)).scale_image(2), iv((0, 1), (1, 2)));
        assert!(iv((0, 1), (1, 2)).scale_image(3).is_full());

        let r = ratio(1, 100);
        let s = ArcSet::thicken(&[pt(1, 3), pt(2, 3)], &r);
        let img = s.scale_image(2);
        // oracle: y is in the image iff some preimage y/2 or (y+1)/2 lies in s
        let mut breaks = Vec::new();
        for c in [ratio(1, 3), ratio(2, 3)] {
            for k in [-2i64, 2] {
                breaks.push(&c + ratio(k, 100));
            }
        }
        let expected = ArcSet::thicken(&[pt(2, 3), pt(1, 3)], &ratio(2, 100));
        assert_eq!(img, expected);
        let oracle = measure_by_cells(&breaks, |y| {
            let half = y.value() / BigInt::from(2);
            s.contains(&CirclePoint::normalize(half.clone()))
                || s.contains(&CirclePoint::normalize(half + ratio(1, 2)))
        });
        assert_eq!(img.measure(), oracle);
        assert_eq!(oracle, ratio(8, 100));
    }

    #[test]
    fn thicken_examples() {
        let t = ArcSet::thicken(&[pt(0, 1)], &ratio(1, 4));
        assert_eq!(t, iv((3, 4), (1, 1)).union(&iv((0, 1), (1, 4))));
        assert_eq!(t.measure(), ratio(1, 2));
        assert_eq!(t.arcs(), vec![Arc { start: pt(3, 4), length: ratio(1, 2) }]);

        assert!(ArcSet::thicken(&[pt(1, 3)], &ratio(0, 1)).is_empty());
        assert!(ArcSet::thicken(&[pt(1, 3)], &ratio(-1, 5)).is_empty());
        assert!(ArcSet::thicken(&[pt(1, 3)], &ratio(1, 2)).is_full());
        assert!(ArcSet::thicken(&[], &ratio(1, 2)).is_empty());

        let d = ratio(1, 100);
        let two = ArcSet::thicken(&[pt(1, 4), pt(3, 4)], &d);
        assert_eq!(two.arcs().len(), 2);
        let breaks: Vec<Rational> =
            [ratio(1, 4), ratio(3, 4)].iter().flat_map(|c| [c - &d, c + &d]).collect();
        let oracle = measure_by_cells(&breaks, |x| x.dist(&pt(1, 4)) < d || x.dist(&pt(3, 4)) < d);
        assert_eq!(oracle, ratio(4, 100));
        assert_eq!(two.measure(), oracle);
    }

    #[test]
    fn contains_respects_half_open() {
        let s = iv((1, 4), (1, 2));
        assert!(s.contains(&pt(1, 4)));
        assert!(!s.contains(&pt(1, 2)));
        assert!(!s.contains(&pt(0, 1)));
        assert!(ArcSet::full().contains(&pt(0, 1)));
        let arc = Arc::new(pt(3, 4), ratio(1, 2)).unwrap();
        assert!(arc.contains(&pt(0, 1)));
        assert!(!arc.contains(&pt(1, 4)));
        assert_eq!(arc.end(), pt(1, 4));
    }

    #[test]
    fn json_round_trip_and_wrap_join() {
        let s = ArcSet::thicken(&[pt(0, 1), pt(1, 2)], &ratio(1, 8));
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"arcs":[{"start":"3/8","length":"1/4"},{"start":"7/8","length":"1/4"}]}"#
        );
        let back: ArcSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(
            serde_json::to_string(&ArcSet::full()).unwrap(),
            r#"{"arcs":[{"start":"0","length":"1"}]}"#
        );
        assert!(serde_json::from_str::<ArcSet>(r#"{"arcs":[{"start":"0","length":"0"}]}"#).is_err());
        assert!(serde_json::from_str::<ArcSet>(r#"{"arcs":[{"start":"0","length":"3/2"}]}"#).is_err());
        // overlapping input arcs are merged on load
        let merged: ArcSet =
            serde_json::from_str(r#"{"arcs":[{"start":"0","length":"1/2"},{"start":"1/4","length":"1/2"}]}"#).unwrap();
        assert_eq!(merged, iv((0, 1), (3, 4)));
    }

    pub(crate) fn arc_set() -> impl Strategy<Value = ArcSet> {
        prop::collection::vec((0i64..24, 1i64..12, 1i64..24), 0..5).prop_map(|v| {
            ArcSet::from_arcs(v.into_iter().map(|(s, l, d)| (ratio(s, d), ratio(l, d.max(l)) )))
        })
    }

    proptest! {
        #[test]
        fn boolean_laws(a in arc_set(), b in arc_set(), c in arc_set()) {
            prop_assert_eq!(a.union(&b), b.union(&a));
            prop_assert_eq!(a.inter(&b), b.inter(&a));
            prop_assert_eq!(a.union(&b.union(&c)), a.union(&b).union(&c));
            prop_assert_eq!(a.inter(&b.inter(&c)), a.inter(&b).inter(&c));
            prop_assert_eq!(a.inter(&b.union(&c)), a.inter(&b).union(&a.inter(&c)));
            prop_assert_eq!(a.union(&b.inter(&c)), a.union(&b).inter(&a.union(&c)));
            prop_assert_eq!(a.union(&b).complement(), a.complement().inter(&b.complement()));
            prop_assert_eq!(a.inter(&b).complement(), a.complement().union(&b.complement()));
            prop_assert_eq!(a.union(&a.inter(&b)), a.clone());
            prop_assert_eq!(a.inter(&a.union(&b)), a.clone());
            prop_assert_eq!(a.complement().complement(), a.clone());
        }

        #[test]
        fn measure_laws(a in arc_set(), b in arc_set(), t in (0i64..50, 1i64..50)) {
            prop_assert_eq!(a.union(&b).measure() + a.inter(&b).measure(), a.measure() + b.measure());
            prop_assert_eq!(a.translate(&pt(t.0, t.1)).measure(), a.measure());
            prop_assert_eq!(a.measure() + a.complement().measure(), ratio(1, 1));
            prop_assert!(a.measure() >= ratio(0, 1) && a.measure() <= ratio(1, 1));
        }

        #[test]
        fn canonical_form_is_idempotent(a in arc_set()) {
            let again = ArcSet::from_arcs(a.arcs().into_iter().map(|x| (x.start.into_value(), x.length)));
            prop_assert_eq!(&again, &a);
            prop_assert_eq!(ArcSet::from_pieces(a.pieces.clone()), a.clone());
            for w in a.pieces.windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
        }

        #[test]
        fn symm_diff_zero_iff_equal(a in arc_set(), b in arc_set()) {
            prop_assert_eq!(a.symm_diff_measure(&b).is_zero(), a == b);
        }

        #[test]
        fn thickening_is_monotone(
            pts in prop::collection::vec((0i64..30, 1i64..30), 1..5),
            d1 in (1i64..20, 1i64..80),
            extra in (0i64..20, 1i64..80),
        ) {
            let pts: Vec<CirclePoint> = pts.into_iter().map(|(n, d)| pt(n, d)).collect();
            let small = ratio(d1.0, d1.1);
            let big = &small + ratio(extra.0, extra.1);
            prop_assert!(ArcSet::thicken(&pts, &small).is_subset(&ArcSet::thicken(&pts, &big)));
        }
    }
}
