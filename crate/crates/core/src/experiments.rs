//! Experiment drivers and their reports.
//!
//! Every report carries exact rationals; the decimal column is a 12
//! significant digit rendering for reading, rounded half to even.

use std::fmt::Write as _;

use num::{BigInt, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::approx::{approx_order_set, subadditive_bound, tail_union, DeltaSequence, TailUnionSpec};
use crate::arcset::ArcSet;
use crate::circle::{int, rational_str, CirclePoint, Rational};
use crate::error::{Error, Result};
use crate::numtheory::{totient_table, IndexPredicate};

pub const DECIMAL_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    #[serde(with = "rational_str")]
    pub exact: Rational,
    pub decimal: String,
}

impl ReportRow {
    pub fn new(label: impl Into<String>, exact: Rational) -> Self {
        let decimal = to_decimal(&exact, DECIMAL_DIGITS);
        ReportRow { label: label.into(), exact, decimal }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictedClass {
    Null,
    Full,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub series: SeriesVerdict,
    pub predicted: PredictedClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: serde_json::Value,
    pub rows: Vec<ReportRow>,
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
}

impl ExperimentReport {
    fn new(experiment: &str, params: serde_json::Value) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            params,
            rows: Vec::new(),
            verdicts: Vec::new(),
            classification: None,
        }
    }

    fn row(&mut self, label: impl Into<String>, exact: Rational) {
        self.rows.push(ReportRow::new(label, exact));
    }

    fn verdict(&mut self, name: &str, pass: bool) {
        self.verdicts.push(Verdict { name: name.to_string(), pass });
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn find(&self, label: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn verdict_named(&self, name: &str) -> Option<bool> {
        self.verdicts.iter().find(|v| v.name == name).map(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// `label,exact,decimal` rows, then one `verdict:<name>,<pass>,` row per
    /// verdict.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,exact,decimal\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.label, r.exact, r.decimal);
        }
        for v in &self.verdicts {
            let _ = writeln!(out, "verdict:{},{},", v.name, v.pass);
        }
        out
    }
}

/// Renders `r` with `digits` significant digits, rounding half to even.
/// Plain positional notation for magnitudes in `[1e-6, 1e12)`, scientific
/// otherwise; trailing fractional zeros are dropped.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    assert!(digits >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let ten = BigInt::from(10);
    let a = r.abs();
    let mut exp = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let pow10 = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(num::pow(ten.clone(), e as usize))
        } else {
            Rational::new(BigInt::one(), num::pow(ten.clone(), (-e) as usize))
        }
    };
    while a >= pow10(exp + 1) {
        exp += 1;
    }
    while a < pow10(exp) {
        exp -= 1;
    }
    let scaled = &a * pow10(digits as i64 - 1 - exp);
    let mut q = round_half_even(&scaled);
    if q == num::pow(ten.clone(), digits) {
        q = num::pow(ten.clone(), digits - 1);
        exp += 1;
    }
    let ds = q.to_string();
    debug_assert_eq!(ds.len(), digits);
    let sign = if r.is_negative() { "-" } else { "" };
    if (-6..12).contains(&exp) {
        let body = if exp >= digits as i64 - 1 {
            format!("{}{}", ds, "0".repeat((exp - (digits as i64 - 1)) as usize))
        } else if exp >= 0 {
            let (int_part, frac) = ds.split_at(exp as usize + 1);
            trim_fraction(int_part, frac)
        } else {
            let frac = format!("{}{}", "0".repeat((-exp - 1) as usize), ds);
            trim_fraction("0", &frac)
        };
        format!("{sign}{body}")
    } else {
        let (lead, frac) = ds.split_at(1);
        format!("{sign}{}e{exp}", trim_fraction(lead, frac))
    }
}

fn trim_fraction(int_part: &str, frac: &str) -> String {
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        int_part.to_string()
    } else {
        format!("{int_part}.{frac}")
    }
}

fn round_half_even(x: &Rational) -> BigInt {
    let fl = x.floor().to_integer();
    let rem = x - Rational::from_integer(fl.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    match rem.cmp(&half) {
        std::cmp::Ordering::Less => fl,
        std::cmp::Ordering::Greater => fl + 1,
        std::cmp::Ordering::Equal => {
            if fl.is_even() {
                fl
            } else {
                fl + 1
            }
        }
    }
}

fn delta_json(delta: &DeltaSequence) -> serde_json::Value {
    serde_json::to_value(delta).expect("delta serialises")
}

/// Tail-union measures `measure(⋃_{N <= n <= n_max} AO(n, delta_n))` for each
/// `N` in `schedule`, with the subadditive bound `sum 2 phi(n) max(delta_n, 0)`.
pub fn gallagher_experiment(delta: &DeltaSequence, schedule: &[u64], n_max: u64) -> Result<ExperimentReport> {
    if schedule.is_empty() {
        return Err(Error::InvalidSchedule("empty schedule".into()));
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[1] <= w[0]) || *schedule.last().unwrap() > n_max {
        return Err(Error::InvalidSchedule(format!(
            "need increasing starts in 1..={n_max}, got {schedule:?}"
        )));
    }
    let mut report = ExperimentReport::new(
        "gallagher",
        json!({
            "delta": delta_json(delta),
            "n_min_schedule": schedule,
            "n_max": n_max,
            "delta_non_decaying": delta.is_non_decaying(),
        }),
    );

    // Walk the schedule from the largest start down, growing one union.
    let mut acc = ArcSet::empty();
    let mut upper = n_max;
    let mut per_start: Vec<(u64, Rational, Rational)> = Vec::with_capacity(schedule.len());
    for &start in schedule.iter().rev() {
        let chunk = TailUnionSpec::new(start, upper, IndexPredicate::All, delta.clone())?;
        let fresh = tail_union(&chunk);
        acc = acc.union(&fresh);
        upper = start - 1;
        let full = TailUnionSpec::new(start, n_max, IndexPredicate::All, delta.clone())?;
        per_start.push((start, acc.measure(), subadditive_bound(&full)));
        if upper == 0 {
            break;
        }
    }
    per_start.reverse();

    let mut monotone = true;
    let mut bounded = true;
    for (i, (start, measure, bound)) in per_start.iter().enumerate() {
        if i > 0 && *measure > per_start[i - 1].1 {
            monotone = false;
        }
        if measure > bound {
            bounded = false;
        }
        report.row(format!("measure[N={start}]"), measure.clone());
        report.row(format!("bound[N={start}]"), bound.clone());
    }
    report.verdict("measure_non_increasing_in_N", monotone);
    report.verdict("measure_within_subadditive_bound", bounded);
    Ok(report)
}

/// Compares the tail unions with radii `delta_n` and `M * delta_n`.
pub fn cassels_experiment(
    delta: &DeltaSequence,
    scale: &Rational,
    pred: &IndexPredicate,
    n_min: u64,
    n_max: u64,
) -> Result<ExperimentReport> {
    if !scale.is_positive() {
        return Err(Error::NotPositive { what: "M", value: scale.to_string() });
    }
    let base = TailUnionSpec::new(n_min, n_max, pred.clone(), delta.clone())?;
    let scaled = TailUnionSpec::new(n_min, n_max, pred.clone(), delta.scaled(scale))?;
    let w1 = tail_union(&base);
    let wm = tail_union(&scaled);

    let mut report = ExperimentReport::new(
        "cassels",
        json!({
            "delta": delta_json(delta),
            "M": scale.to_string(),
            "pred": pred.to_string(),
            "n_min": n_min,
            "n_max": n_max,
        }),
    );
    let only_1 = w1.diff(&wm).measure();
    let only_m = wm.diff(&w1).measure();
    report.row("measure[W_1]", w1.measure());
    report.row("measure[W_M]", wm.measure());
    report.row("measure[W_1 \\ W_M]", only_1.clone());
    report.row("measure[W_M \\ W_1]", only_m.clone());
    report.row("measure[W_1 symdiff W_M]", only_1.clone() + only_m.clone());
    if *scale >= Rational::one() {
        report.verdict("W_1_subset_W_M", only_1.is_zero());
    }
    if *scale <= Rational::one() {
        report.verdict("W_M_subset_W_1", only_m.is_zero());
    }
    Ok(report)
}

/// `1, 2, 4, ...` up to `cap`, plus `cap` itself.
pub fn doubling_schedule(cap: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = 1u64;
    while m <= cap {
        out.push(m);
        match m.checked_mul(2) {
            Some(next) => m = next,
            None => break,
        }
    }
    if out.last() != Some(&cap) {
        out.push(cap);
    }
    out
}

/// Analytic rule for the power and constant families: `sum phi(n) c n^-a`
/// diverges iff `a <= 2` (for `c > 0`); non-positive `c` makes every
/// clipped term zero.
pub fn classify_series(delta: &DeltaSequence) -> Classification {
    let series = match delta {
        DeltaSequence::Power { c, a } if c.is_positive() => {
            if *a <= 2 {
                SeriesVerdict::Divergent
            } else {
                SeriesVerdict::Convergent
            }
        }
        DeltaSequence::Constant { c } if c.is_positive() => SeriesVerdict::Divergent,
        DeltaSequence::Power { .. } | DeltaSequence::Constant { .. } => SeriesVerdict::Convergent,
        DeltaSequence::Table { .. } => SeriesVerdict::Undetermined,
    };
    let predicted = match series {
        SeriesVerdict::Convergent => PredictedClass::Null,
        SeriesVerdict::Divergent => PredictedClass::Full,
        SeriesVerdict::Undetermined => PredictedClass::Undetermined,
    };
    Classification { series, predicted }
}

pub fn duffin_schaeffer_classify(delta: &DeltaSequence, partial_sum_cap: u64) -> Result<ExperimentReport> {
    if partial_sum_cap == 0 {
        return Err(Error::NotPositive { what: "partial sum cap", value: "0".into() });
    }
    let cap = usize::try_from(partial_sum_cap).map_err(|_| Error::InvalidSchedule("cap too large".into()))?;
    let phi = totient_table(cap);
    let schedule = doubling_schedule(partial_sum_cap);

    let mut report = ExperimentReport::new(
        "duffin-schaeffer",
        json!({ "delta": delta_json(delta), "partial_sum_cap": partial_sum_cap, "schedule": schedule }),
    );
    let mut sum = Rational::zero();
    let mut next = schedule.iter().peekable();
    let mut sums = Vec::with_capacity(schedule.len());
    for n in 1..=partial_sum_cap {
        let d = delta.eval_at(n);
        if d.is_positive() {
            sum += d * int(phi[n as usize]);
        }
        if next.peek() == Some(&&n) {
            next.next();
            report.row(format!("partial_sum[M={n}]"), sum.clone());
            sums.push(sum.clone());
        }
    }
    report.verdict("partial_sums_non_decreasing", sums.windows(2).all(|w| w[0] <= w[1]));
    report.classification = Some(classify_series(delta));
    Ok(report)
}

/// Indices `n <= n_max` whose order-`n` points come within open distance
/// `delta_n` of `x`.
pub fn membership_witnesses(x: &CirclePoint, delta: &DeltaSequence, n_max: u64) -> Vec<u64> {
    (1..=n_max)
        .filter(|&n| {
            let d = delta.eval_at(n);
            d.is_positive() && x.dist_to_order_n(n) < d
        })
        .collect()
}

/// Report for a single approximate-order set.
pub fn approx_order_report(n: u64, delta: &Rational) -> (ArcSet, ExperimentReport) {
    let set = approx_order_set(n, delta);
    let mut report = ExperimentReport::new("ao", json!({ "n": n, "delta": delta.to_string() }));
    report.row("arcs", int(set.arcs().len() as u64));
    report.row("measure", set.measure());
    (set, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{parse_rational, ratio};
    use proptest::prelude::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&ratio(1, 3), 12), "0.333333333333");
        assert_eq!(to_decimal(&ratio(2, 3), 12), "0.666666666667");
        assert_eq!(to_decimal(&ratio(1, 2), 12), "0.5");
        assert_eq!(to_decimal(&ratio(0, 1), 12), "0");
        assert_eq!(to_decimal(&ratio(7, 1), 12), "7");
        assert_eq!(to_decimal(&ratio(-1, 8), 12), "-0.125");
        assert_eq!(to_decimal(&ratio(1, 1_000_000_000), 12), "1e-9");
        assert_eq!(to_decimal(&ratio(1, 7_000_000), 12), "1.42857142857e-7");
        assert_eq!(to_decimal(&ratio(123_456_789_012_345, 1), 12), "1.23456789012e14");
        assert_eq!(to_decimal(&ratio(999_999_999_999_9, 10), 12), "1e12");
        assert_eq!(to_decimal(&ratio(999_999_999_999_4, 10), 12), "999999999999");
        // ties go to the even neighbour
        assert_eq!(to_decimal(&ratio(1_000_000_000_005, 10), 12), "100000000000");
        assert_eq!(to_decimal(&ratio(1_000_000_000_015, 10), 12), "100000000002");
        assert_eq!(to_decimal(&ratio(25, 10), 1), "2");
        assert_eq!(to_decimal(&ratio(35, 10), 1), "4");
    }

    proptest! {
        #[test]
        fn decimal_is_faithful(n in -1_000_000_000i64..1_000_000_000, d in 1i64..1_000_000_007) {
            let r = ratio(n, d);
            let text = to_decimal(&r, DECIMAL_DIGITS);
            let back = parse_decimal(&text);
            if !r.is_zero() {
                // |back - r| <= |r| * 5e-12
                let err = (back - &r).abs();
                prop_assert!(err * BigInt::from(200_000_000_000i64) <= r.abs(), "{} -> {}", r, text);
            } else {
                prop_assert_eq!(text, "0");
            }
        }
    }

    fn parse_decimal(s: &str) -> Rational {
        let (mant, exp) = match s.split_once('e') {
            Some((m, e)) => (m, e.parse::<i64>().unwrap()),
            None => (s, 0),
        };
        let neg = mant.starts_with('-');
        let mant = mant.trim_start_matches('-');
        let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
        let digits: BigInt = format!("{ip}{fp}").parse().unwrap();
        let e = exp - fp.len() as i64;
        let mut v = Rational::from_integer(digits);
        let ten = Rational::from_integer(BigInt::from(10));
        for _ in 0..e.abs() {
            if e > 0 {
                v *= &ten;
            } else {
                v /= &ten;
            }
        }
        if neg { -v } else { v }
    }

    #[test]
    fn gallagher_convergent_case() {
        let report = gallagher_experiment(&DeltaSequence::power(ratio(1, 1), 3), &[2, 5, 10], 60).unwrap();
        assert!(report.all_pass());
        for n in [2i64, 5, 10] {
            let m = &report.find(&format!("measure[N={n}]")).unwrap().exact;
            let b = &report.find(&format!("bound[N={n}]")).unwrap().exact;
            assert!(m <= b);
            assert!(*b <= ratio(2, n - 1));
        }
    }

    #[test]
    fn gallagher_zero_delta() {
        let report = gallagher_experiment(&DeltaSequence::constant(ratio(0, 1)), &[1, 3, 7], 20).unwrap();
        assert!(report.rows.iter().all(|r| r.exact.is_zero()));
        assert!(report.all_pass());
    }

    #[test]
    fn gallagher_incremental_matches_direct() {
        let delta = DeltaSequence::power(ratio(1, 1), 2);
        let report = gallagher_experiment(&delta, &[2, 3, 7, 19], 30).unwrap();
        for n in [2u64, 3, 7, 19] {
            let direct = tail_union(&TailUnionSpec::new(n, 30, IndexPredicate::All, delta.clone()).unwrap());
            assert_eq!(report.find(&format!("measure[N={n}]")).unwrap().exact, direct.measure());
        }
    }

    #[test]
    fn gallagher_schedule_validation() {
        let d = DeltaSequence::power(ratio(1, 1), 2);
        assert!(gallagher_experiment(&d, &[], 10).is_err());
        assert!(gallagher_experiment(&d, &[5, 3], 10).is_err());
        assert!(gallagher_experiment(&d, &[3, 3], 10).is_err());
        assert!(gallagher_experiment(&d, &[2, 11], 10).is_err());
        assert!(gallagher_experiment(&d, &[0, 2], 10).is_err());
    }

    #[test]
    fn cassels_examples() {
        let d = DeltaSequence::power(ratio(1, 1), 2);
        let r = cassels_experiment(&d, &ratio(1, 1), &IndexPredicate::All, 2, 20).unwrap();
        assert!(r.find("measure[W_1 symdiff W_M]").unwrap().exact.is_zero());
        assert_eq!(r.verdicts.len(), 2);
        assert!(r.all_pass());

        let r = cassels_experiment(&d, &ratio(2, 1), &IndexPredicate::All, 2, 20).unwrap();
        assert_eq!(r.verdict_named("W_1_subset_W_M"), Some(true));
        assert_eq!(r.verdict_named("W_M_subset_W_1"), None);
        assert!(r.find("measure[W_M \\ W_1]").unwrap().exact.is_positive());

        let r = cassels_experiment(&d, &ratio(1, 2), &IndexPredicate::NotDiv(3), 2, 20).unwrap();
        assert_eq!(r.verdict_named("W_M_subset_W_1"), Some(true));

        assert!(cassels_experiment(&d, &ratio(0, 1), &IndexPredicate::All, 2, 20).is_err());
        assert!(cassels_experiment(&d, &ratio(-1, 1), &IndexPredicate::All, 2, 20).is_err());
    }

    #[test]
    fn schedule_is_doubling() {
        assert_eq!(doubling_schedule(1), vec![1]);
        assert_eq!(doubling_schedule(8), vec![1, 2, 4, 8]);
        assert_eq!(doubling_schedule(10), vec![1, 2, 4, 8, 10]);
    }

    #[test]
    fn duffin_schaeffer_examples() {
        let r = duffin_schaeffer_classify(&DeltaSequence::power(ratio(1, 1), 2), 64).unwrap();
        assert_eq!(r.classification, Some(Classification { series: SeriesVerdict::Divergent, predicted: PredictedClass::Full }));
        assert!(r.all_pass());
        // phi(1)/1 + phi(2)/4 = 1 + 1/4
        assert_eq!(r.find("partial_sum[M=2]").unwrap().exact, ratio(5, 4));

        let r = duffin_schaeffer_classify(&DeltaSequence::power(ratio(1, 1), 3), 64).unwrap();
        assert_eq!(r.classification.as_ref().unwrap().series, SeriesVerdict::Convergent);
        assert_eq!(r.classification.as_ref().unwrap().predicted, PredictedClass::Null);

        let r = duffin_schaeffer_classify(&DeltaSequence::constant(ratio(0, 1)), 16).unwrap();
        assert!(r.rows.iter().all(|x| x.exact.is_zero()));
        assert_eq!(r.classification.as_ref().unwrap().predicted, PredictedClass::Null);

        let r = duffin_schaeffer_classify(&DeltaSequence::constant(ratio(1, 10)), 16).unwrap();
        assert_eq!(r.classification.as_ref().unwrap().series, SeriesVerdict::Divergent);

        let r = duffin_schaeffer_classify(&DeltaSequence::table(vec![ratio(1, 4)]), 16).unwrap();
        assert_eq!(r.classification.as_ref().unwrap().series, SeriesVerdict::Undetermined);

        assert!(duffin_schaeffer_classify(&DeltaSequence::constant(ratio(1, 10)), 0).is_err());
    }

    #[test]
    fn witness_examples() {
        let w = membership_witnesses(&CirclePoint::from_ratio(1, 3), &DeltaSequence::power(ratio(1, 1), 2), 10);
        assert!(w.contains(&3));
        let x = CirclePoint::from_ratio(89, 144);
        let delta = DeltaSequence::power(ratio(1, 1), 2);
        let w = membership_witnesses(&x, &delta, 144);
        // independent scan: nearest fraction m/n by rounding, then reduce
        let brute: Vec<u64> = (1..=144u64)
            .filter(|&n| {
                (0..n).any(|m| {
                    num::integer::gcd(m, n) == 1 && {
                        let diff = (ratio(89, 144) - ratio(m as i64, n as i64)).abs();
                        let diff = std::cmp::min(diff.clone(), ratio(1, 1) - diff);
                        diff < ratio(1, (n * n) as i64)
                    }
                })
            })
            .collect();
        assert_eq!(w, brute);
        for f in [2, 3, 5, 8, 13, 21, 34, 55, 144] {
            assert!(w.contains(&f), "missing {f}");
        }
        assert!(membership_witnesses(&x, &DeltaSequence::constant(ratio(0, 1)), 144).is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn witnesses_monotone_in_delta(x in (0i64..200, 1i64..200), c in 1i64..10, extra in 0i64..10) {
            let x = CirclePoint::from_ratio(x.0, x.1);
            let small = DeltaSequence::power(ratio(c, 10), 2);
            let big = DeltaSequence::power(ratio(c + extra, 10), 2);
            let ws = membership_witnesses(&x, &small, 40);
            let wb = membership_witnesses(&x, &big, 40);
            prop_assert!(ws.iter().all(|n| wb.contains(n)));
        }
    }

    #[test]
    fn report_serialisation() {
        let (set, report) = approx_order_report(5, &ratio(1, 100));
        assert_eq!(set.arcs().len(), 4);
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["experiment"], "ao");
        assert_eq!(json["rows"][1]["exact"], "2/25");
        assert_eq!(json["rows"][1]["decimal"], "0.08");
        assert!(json.get("classification").is_none());
        let csv = report.to_csv();
        assert!(csv.starts_with("label,exact,decimal\narcs,4,4\nmeasure,2/25,0.08\n"));
        let back: ExperimentReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
        assert_eq!(parse_rational(&back.rows[1].exact.to_string()).unwrap(), ratio(2, 25));
    }
}
