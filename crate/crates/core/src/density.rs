//! Balls, the doubling bound for arc-length measure, and density ratios at
//! fixed centres.

use num::{BigInt, One, Signed};
use serde::{Deserialize, Serialize};

use crate::arcset::ArcSet;
use crate::circle::{rational_str, CirclePoint, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: CirclePoint,
    #[serde(with = "rational_str")]
    pub radius: Rational,
}

impl BallSpec {
    pub fn new(center: CirclePoint, radius: Rational) -> Result<Self> {
        if radius.is_negative() {
            return Err(Error::NotPositive { what: "radius", value: radius.to_string() });
        }
        Ok(BallSpec { center, radius })
    }
}

/// `[c - r, c + r)`; radius 0 gives the empty set (same measure as the
/// closed ball `{c}`).
pub fn ball(b: &BallSpec) -> ArcSet {
    ArcSet::thicken(std::slice::from_ref(&b.center), &b.radius)
}

/// `min(1, 2r)`.
pub fn ball_measure(radius: &Rational) -> Rational {
    let twice = radius * BigInt::from(2);
    if twice > Rational::one() {
        Rational::one()
    } else {
        twice
    }
}

/// `measure(B(x, 2eps)) <= 2 * measure(B(x, eps))`.
pub fn doubling_check(eps: &Rational) -> Result<bool> {
    require_positive(eps)?;
    Ok(ball_measure(&(eps * BigInt::from(2))) <= ball_measure(eps) * BigInt::from(2))
}

pub fn density_ratio(set: &ArcSet, x: &CirclePoint, eps: &Rational) -> Result<Rational> {
    require_positive(eps)?;
    let b = ball(&BallSpec { center: x.clone(), radius: eps.clone() });
    Ok(set.inter(&b).measure() / b.measure())
}

/// Density ratios along a strictly decreasing schedule of radii.
pub fn density_profile(set: &ArcSet, x: &CirclePoint, schedule: &[Rational]) -> Result<Vec<(Rational, Rational)>> {
    if schedule.is_empty() {
        return Err(Error::InvalidSchedule("empty schedule".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSchedule("radii must be strictly decreasing".into()));
    }
    schedule
        .iter()
        .map(|eps| density_ratio(set, x, eps).map(|r| (eps.clone(), r)))
        .collect()
}

/// Largest `m` such that `B(x, m)` lies inside `set`, when `x` is an
/// interior point. Full circle gives `1/2`.
pub fn interior_margin(set: &ArcSet, x: &CirclePoint) -> Option<Rational> {
    if set.is_full() {
        return Some(Rational::new(BigInt::from(1), BigInt::from(2)));
    }
    set.arcs().into_iter().find_map(|arc| {
        let offset = (x - &arc.start).into_value();
        if offset < arc.length && offset.is_positive() {
            let to_end = &arc.length - &offset;
            Some(if offset < to_end { offset } else { to_end })
        } else {
            None
        }
    })
}

fn require_positive(eps: &Rational) -> Result<()> {
    if eps.is_positive() {
        Ok(())
    } else {
        Err(Error::NotPositive { what: "epsilon", value: eps.to_string() })
    }
}
