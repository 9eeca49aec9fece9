//! Approximate-order sets and their truncated tail unions.
//!
//! `AO(n, delta)` is the open `delta`-thickening of the points of additive
//! order exactly `n`. A tail union collects `AO(i, delta_i)` over a finite
//! index window filtered by an [`IndexPredicate`]; the limsup itself is the
//! decreasing intersection of such unions as the window start grows and is
//! never built.

use std::str::FromStr;

use num::{BigInt, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arcset::ArcSet;
use crate::circle::{int, parse_rational, rational_str, CirclePoint, Rational};
use crate::error::{Error, Result};
use crate::numtheory::{gcd, is_prime, totient, IndexPredicate};

/// A rational sequence `n -> delta_n`, defined for `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DeltaSequence {
    /// `delta_n = c * n^(-a)`.
    Power {
        #[serde(with = "rational_str")]
        c: Rational,
        a: u32,
    },
    Constant {
        #[serde(with = "rational_str")]
        c: Rational,
    },
    /// `values[i]` is `delta_(i+1)`; indices past the end give 0.
    Table {
        #[serde(with = "rational_vec")]
        values: Vec<Rational>,
    },
}

mod rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl DeltaSequence {
    pub fn power(c: Rational, a: u32) -> Self {
        DeltaSequence::Power { c, a }
    }

    pub fn constant(c: Rational) -> Self {
        DeltaSequence::Constant { c }
    }

    pub fn table(values: Vec<Rational>) -> Self {
        DeltaSequence::Table { values }
    }

    pub fn eval_at(&self, n: u64) -> Rational {
        assert!(n >= 1, "delta sequences are indexed from 1");
        match self {
            DeltaSequence::Power { c, a } => c / num::pow(BigInt::from(n), *a as usize),
            DeltaSequence::Constant { c } => c.clone(),
            DeltaSequence::Table { values } => {
                values.get((n - 1) as usize).cloned().unwrap_or_else(Rational::zero)
            }
        }
    }

    /// The same sequence multiplied termwise by `m`.
    pub fn scaled(&self, m: &Rational) -> Self {
        match self {
            DeltaSequence::Power { c, a } => DeltaSequence::Power { c: c * m, a: *a },
            DeltaSequence::Constant { c } => DeltaSequence::Constant { c: c * m },
            DeltaSequence::Table { values } => DeltaSequence::Table { values: values.iter().map(|v| v * m).collect() },
        }
    }

    /// Whether `delta_n` visibly fails to tend to 0.
    pub fn is_non_decaying(&self) -> bool {
        match self {
            DeltaSequence::Power { c, a } => *a == 0 && c.is_positive(),
            DeltaSequence::Constant { c } => c.is_positive(),
            DeltaSequence::Table { .. } => false,
        }
    }
}

impl FromStr for DeltaSequence {
    type Err = Error;

    /// JSON (`{"kind":...}`) or the inline forms `power:c:a`, `constant:c`,
    /// `table:v1,v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad delta JSON: {e}")));
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad delta sequence {s:?}")))?;
        match kind {
            "power" => {
                let (c, a) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected power:c:a, got {s:?}")))?;
                let a = a.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
                Ok(DeltaSequence::power(parse_rational(c)?, a))
            }
            "constant" => Ok(DeltaSequence::constant(parse_rational(rest)?)),
            "table" => {
                let values = if rest.trim().is_empty() {
                    Vec::new()
                } else {
                    rest.split(',').map(parse_rational).collect::<Result<_>>()?
                };
                Ok(DeltaSequence::table(values))
            }
            _ => Err(Error::Parse(format!("unknown delta kind {kind:?}"))),
        }
    }
}

/// Finite window `n_min..=n_max` of a bounded limsup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailUnionSpec {
    pub n_min: u64,
    pub n_max: u64,
    pub pred: IndexPredicate,
    pub delta: DeltaSequence,
}

impl TailUnionSpec {
    pub fn new(n_min: u64, n_max: u64, pred: IndexPredicate, delta: DeltaSequence) -> Result<Self> {
        check_range(n_min, n_max)?;
        Ok(TailUnionSpec { n_min, n_max, pred, delta })
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        (self.n_min.max(1)..=self.n_max).filter(move |&i| self.pred.evaluate(i))
    }
}

fn check_range(n_min: u64, n_max: u64) -> Result<()> {
    if n_min == 0 || n_min > n_max {
        Err(Error::InvalidRange { n_min, n_max })
    } else {
        Ok(())
    }
}

/// The `totient(n)` points `[m/n]` with `gcd(m, n) = 1`, in increasing order.
pub fn finite_order_points(n: u64) -> Vec<CirclePoint> {
    assert!(n >= 1, "order must be positive");
    (0..n)
        .filter(|&m| gcd(m, n) == 1)
        .map(|m| CirclePoint::normalize(Rational::new(BigInt::from(m), BigInt::from(n))))
        .collect()
}

pub fn approx_order_set(n: u64, delta: &Rational) -> ArcSet {
    ArcSet::thicken(&finite_order_points(n), delta)
}

/// Union of `AO(i, delta_i)` over the indices selected by `spec`. Terms are
/// built in parallel; the canonical form makes the result order-independent.
pub fn tail_union(spec: &TailUnionSpec) -> ArcSet {
    let indices: Vec<u64> = spec.indices().collect();
    let terms: Vec<ArcSet> = indices
        .par_iter()
        .map(|&i| approx_order_set(i, &spec.delta.eval_at(i)))
        .collect();
    ArcSet::union_all(&terms)
}

/// `sum 2 * totient(n) * max(delta_n, 0)` over the indices of `spec`, an
/// upper bound for `measure(tail_union(spec))`.
pub fn subadditive_bound(spec: &TailUnionSpec) -> Rational {
    spec.indices().fold(Rational::zero(), |acc, n| {
        let d = spec.delta.eval_at(n);
        if d.is_positive() {
            acc + d * int(2 * totient(n))
        } else {
            acc
        }
    })
}

/// `m * AO(n, delta) ⊆ AO(n, m * delta)` for coprime `m`, `n`.
pub fn check_inclusion_i(m: u64, n: u64, delta: &Rational) -> Result<bool> {
    check_positive_index(m)?;
    check_positive_index(n)?;
    if gcd(m, n) != 1 {
        return Err(Error::NotCoprime(m, n));
    }
    let lhs = approx_order_set(n, delta).scale_image(m);
    Ok(lhs.is_subset(&approx_order_set(n, &(delta * int(m)))))
}

/// `m * AO(n*m, delta) ⊆ AO(n, m * delta)`.
pub fn check_inclusion_ii(m: u64, n: u64, delta: &Rational) -> Result<bool> {
    check_positive_index(m)?;
    check_positive_index(n)?;
    let lhs = approx_order_set(n * m, delta).scale_image(m);
    Ok(lhs.is_subset(&approx_order_set(n, &(delta * int(m)))))
}

/// `a + AO(n, delta) ⊆ AO(o(a)*n, delta)` when `o(a)` and `n` are coprime.
pub fn check_inclusion_iii(a: &CirclePoint, n: u64, delta: &Rational) -> Result<bool> {
    check_positive_index(n)?;
    let order = a.add_order_of();
    if gcd(order, n) != 1 {
        return Err(Error::NotCoprime(order, n));
    }
    let lhs = approx_order_set(n, delta).translate(a);
    Ok(lhs.is_subset(&approx_order_set(order * n, delta)))
}

/// `a + AO(n, delta) = AO(n, delta)` when `o(a)^2` divides `n`.
pub fn check_inclusion_iv(a: &CirclePoint, n: u64, delta: &Rational) -> Result<bool> {
    check_positive_index(n)?;
    let order = a.add_order_of();
    if n % (order * order) != 0 {
        return Err(Error::OrderSquareNotDividing { order, n });
    }
    let set = approx_order_set(n, delta);
    Ok(set.translate(a) == set)
}

fn check_positive_index(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::NotPositive { what: "index", value: "0".into() })
    } else {
        Ok(())
    }
}

/// Truncated pieces of the well-approximable set split by how often a prime
/// `p` divides the index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Indices with `p ∤ n`.
    pub a: ArcSet,
    /// Indices with `p ∥ n`.
    pub b: ArcSet,
    /// Indices with `p² | n`.
    pub c: ArcSet,
}

impl Decomposition {
    pub fn union(&self) -> ArcSet {
        ArcSet::union_all([&self.a, &self.b, &self.c])
    }
}

pub fn gallagher_decomposition(p: u64, n_min: u64, n_max: u64, delta: &DeltaSequence) -> Result<Decomposition> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    check_range(n_min, n_max)?;
    let part = |pred| tail_union(&TailUnionSpec { n_min, n_max, pred, delta: delta.clone() });
    Ok(Decomposition {
        a: part(IndexPredicate::NotDiv(p)),
        b: part(IndexPredicate::ExactlyOnce(p)),
        c: part(IndexPredicate::DivBySquare(p)),
    })
}
