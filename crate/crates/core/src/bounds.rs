//! Closed-form thresholds and the best known lower bounds on `D_d(p)`.
//!
//! `D_d(p)` is the smallest essential supremum of the best path density over
//! all invariant percolations with marginal `p`. Nothing here estimates it;
//! every value is a proven lower bound with a tag saying where it came from.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::tree::TreeParams;

/// Marginal at which the max of `k` iid copies has marginal `2/d`:
/// `a(d,k) = 1 - (1 - 2/d)^(1/k)`.
pub fn a_threshold(params: TreeParams, k: u32) -> Result<f64> {
    if k == 0 {
        return domain("copy count k must be at least 1");
    }
    let d = f64::from(params.d());
    if k == 1 {
        return Ok(2.0 / d);
    }
    // 1 - exp(ln(1 - 2/d) / k), without cancellation for large k
    Ok(-((1.0 - 2.0 / d).ln() / f64::from(k)).exp_m1())
}

/// Marginal above which every invariant percolation has an infinite cluster.
pub fn haggstrom_threshold(params: TreeParams) -> f64 {
    2.0 / f64::from(params.d())
}

/// Path density bound for Bernoulli percolation with marginal `eps`:
/// `log(2(d-1)) / log(1/eps)`. Values above 1 are vacuous and returned as is.
pub fn f_bound(params: TreeParams, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("eps = {eps} outside (0, 1)"));
    }
    let d = f64::from(params.d());
    Ok((2.0 * (d - 1.0)).ln() / (1.0 / eps).ln())
}

/// Modulus of continuity `f_d(3 (q - p))`; infinite (vacuous) once `3 (q - p) >= 1`.
pub fn continuity_modulus(params: TreeParams, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || q <= p {
        return domain(format!("need 0 <= p < q <= 1, got p = {p}, q = {q}"));
    }
    let eps = 3.0 * (q - p);
    if eps >= 1.0 {
        return Ok(f64::INFINITY);
    }
    f_bound(params, eps)
}

/// Binary relative entropy `a log(a/p) + (1-a) log((1-a)/(1-p))`.
pub fn relative_entropy(a: f64, p: f64) -> f64 {
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    term(a, p) + term(1.0 - a, 1.0 - p)
}

pub const SHARP_BOUND_TOL: f64 = 1e-10;

/// First-moment density bound for Bernoulli percolation: the `a > p` where
/// the expected number of paths with density `a` stops growing,
/// `KL(a || p) = log(d - 1)`. Returns 1 when no such `a < 1` exists.
pub fn sharp_bernoulli_density_bound(params: TreeParams, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p = {p} outside (0, 1)"));
    }
    let target = f64::from(params.d() - 1).ln();
    if (1.0 / p).ln() <= target {
        return Ok(1.0);
    }
    // relative_entropy(., p) increases on (p, 1)
    let (mut lo, mut hi) = (p, 1.0);
    while hi - lo > SHARP_BOUND_TOL {
        let mid = 0.5 * (lo + hi);
        if relative_entropy(mid, p) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "source", content = "k")]
pub enum BoundSource {
    Trivial,
    Haggstrom,
    KCopies(u32),
    /// Continuity from a known bound at a larger marginal.
    Continuity,
}

impl BoundSource {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundSource::Trivial => "trivial",
            BoundSource::Haggstrom => "haggstrom",
            BoundSource::KCopies(_) => "k-copies",
            BoundSource::Continuity => "continuity",
        }
    }

    pub fn k(&self) -> Option<u32> {
        match self {
            BoundSource::KCopies(k) => Some(*k),
            _ => None,
        }
    }
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsPoint {
    pub p: f64,
    pub lower: f64,
    pub source: BoundSource,
}

/// Known bound at `p` from the trivial, Häggström and k-copies arguments only.
fn direct_bound(params: TreeParams, p: f64) -> (f64, BoundSource) {
    if p >= haggstrom_threshold(params) {
        return (1.0, BoundSource::Haggstrom);
    }
    let mut k = 2u32;
    while 1.0 / f64::from(k) > p {
        // a(d,k) decreases in k, so the first k with a(d,k) <= p gives the largest 1/k
        if a_threshold(params, k).expect("k >= 1") <= p {
            return (1.0 / f64::from(k), BoundSource::KCopies(k));
        }
        k += 1;
    }
    (p, BoundSource::Trivial)
}

/// Best known lower bound on `D_d(p)`.
///
/// Combines `D_d(p) >= p`, `D_d(p) = 1` for `p >= 2/d`, `D_d(a(d,k)) >= 1/k`
/// with monotonicity, and the continuity estimate
/// `D_d(p) >= D_d(q) - f_d(3 (q - p))` applied at the next known jump `q > p`.
pub fn lower_bound_curve(params: TreeParams, p: f64) -> Result<BoundsPoint> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p = {p} outside (0, 1)"));
    }
    let (mut lower, mut source) = direct_bound(params, p);
    if source == BoundSource::Haggstrom {
        return Ok(BoundsPoint { p, lower, source });
    }
    // candidate jump points above p: 2/d (value 1) and a(d,k) (value 1/k) while 1/k > p
    let mut jumps = vec![(haggstrom_threshold(params), 1.0)];
    let mut k = 2u32;
    while 1.0 / f64::from(k) > p {
        let a = a_threshold(params, k)?;
        if a > p {
            jumps.push((a, 1.0 / f64::from(k)));
        }
        k += 1;
    }
    for (q, value) in jumps {
        if value <= lower {
            continue;
        }
        let modulus = continuity_modulus(params, p, q)?;
        let candidate = value - modulus;
        if candidate > lower {
            lower = candidate;
            source = BoundSource::Continuity;
        }
    }
    Ok(BoundsPoint { p, lower, source })
}

/// Largest grid point below `2/d` where the known bound is still just `p`.
pub fn trivial_frontier(params: TreeParams, step: f64) -> Result<Option<f64>> {
    if !(step > 0.0 && step < 1.0) {
        return domain(format!("grid step {step} outside (0, 1)"));
    }
    let top = haggstrom_threshold(params);
    let mut i = (top / step).ceil() as u64;
    while i > 0 {
        let p = i as f64 * step;
        if p < top && lower_bound_curve(params, p)?.source == BoundSource::Trivial {
            return Ok(Some(p));
        }
        i -= 1;
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopyInterval {
    pub k: u32,
    /// `a(d,k)`, included.
    pub lo: f64,
    /// `1/k`, excluded.
    pub hi: f64,
    /// `a(d,k) <= 1/(k+1)`: this interval overlaps the next one.
    pub overlaps_next: bool,
}

impl CopyInterval {
    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p < self.hi
    }
}

/// Maximal run of uncovered grid points: `lo` is the first uncovered point,
/// `hi` the next covered grid point (or 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub d: u32,
    pub k_max: u32,
    pub step: f64,
    pub intervals: Vec<CopyInterval>,
    pub gaps: Vec<Gap>,
}

impl CoverageReport {
    pub fn all_overlap(&self) -> bool {
        self.intervals.iter().all(|iv| iv.overlaps_next)
    }
}

/// Smallest `k` with `a(d,k) <= p`.
fn first_k_below(params: TreeParams, p: f64) -> u32 {
    let d = f64::from(params.d());
    let guess = ((1.0 - 2.0 / d).ln() / (1.0 - p).ln()).ceil().max(1.0);
    let mut k = if guess.is_finite() && guess < f64::from(u32::MAX) {
        guess as u32
    } else {
        u32::MAX - 1
    };
    while k > 1 && a_threshold(params, k - 1).expect("k >= 1") <= p {
        k -= 1;
    }
    while a_threshold(params, k).expect("k >= 1") > p {
        k += 1;
    }
    k
}

/// Whether `p` lies in `[a(d,k), 1/k)` for some `k >= 1`.
pub fn is_covered(params: TreeParams, p: f64) -> bool {
    if p <= 0.0 || p >= 1.0 {
        return false;
    }
    // the first interval reaching down to p has the largest right end among those that do
    let k = first_k_below(params, p);
    p < 1.0 / f64::from(k)
}

/// Coverage of `(0,1)` by the intervals `[a(d,k), 1/k)`.
///
/// Intervals and the overlap criterion are listed for `k <= k_max`; the
/// gap scan at grid points `step, 2 step, ... < 1` tests membership in the
/// full union over all `k`.
pub fn interval_coverage(params: TreeParams, k_max: u32, step: f64) -> Result<CoverageReport> {
    if k_max == 0 {
        return domain("k_max must be at least 1");
    }
    if !(step > 0.0 && step < 1.0) {
        return domain(format!("grid step {step} outside (0, 1)"));
    }
    let intervals = (1..=k_max)
        .map(|k| {
            let lo = a_threshold(params, k)?;
            Ok(CopyInterval {
                k,
                lo,
                hi: 1.0 / f64::from(k),
                overlaps_next: lo <= 1.0 / f64::from(k + 1),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let points = ((1.0 / step) - 1e-9).ceil() as u64;
    let mut gaps = Vec::new();
    let mut open: Option<f64> = None;
    for i in 1..points {
        let p = i as f64 * step;
        match (is_covered(params, p), open) {
            (false, None) => open = Some(p),
            (true, Some(lo)) => {
                gaps.push(Gap { lo, hi: p });
                open = None;
            }
            _ => {}
        }
    }
    if let Some(lo) = open {
        gaps.push(Gap { lo, hi: 1.0 });
    }
    Ok(CoverageReport {
        d: params.d(),
        k_max,
        step,
        intervals,
        gaps,
    })
}

/// Overlap criterion `(1 - 1/(k+1))^k <= 1 - 2/d`, equivalent to `a(d,k) <= 1/(k+1)`.
pub fn overlap_criterion(params: TreeParams, k: u32) -> bool {
    let k = f64::from(k);
    (1.0 - 1.0 / (k + 1.0)).powf(k) <= 1.0 - 2.0 / f64::from(params.d())
}

/// Known lower bound on `D_inf(x)`: `1/k` for the smallest `k` with `1/k < x`.
pub fn dinf_lower(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("x = {x} outside (0, 1)"));
    }
    let mut k = (1.0 / x).floor().max(1.0) as u64;
    while 1.0 / (k as f64) >= x {
        k += 1;
    }
    while k > 2 && 1.0 / ((k - 1) as f64) < x {
        k -= 1;
    }
    Ok(1.0 / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(d: u32) -> TreeParams {
        TreeParams::new(d).unwrap()
    }

    #[test]
    fn thresholds() {
        assert!((a_threshold(t(3), 1).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((a_threshold(t(3), 2).unwrap() - (1.0 - 1.0 / 3f64.sqrt())).abs() < 1e-15);
        assert!((a_threshold(t(3), 6).unwrap() - 0.167_316_822_344_395_7).abs() < 1e-12);
        assert!((a_threshold(t(3), 5).unwrap() - 0.197_258_438_239_769_3).abs() < 1e-12);
        assert!(a_threshold(t(3), 0).is_err());
        assert_eq!(haggstrom_threshold(t(4)), 0.5);
        assert!((haggstrom_threshold(t(100)) - 0.02).abs() < 1e-17);
    }

    #[test]
    fn a_threshold_monotone() {
        for d in 3..12 {
            let xs: Vec<f64> = (1..200).map(|k| a_threshold(t(d), k).unwrap()).collect();
            assert!(xs.windows(2).all(|w| w[1] < w[0]));
        }
        for k in 1..50 {
            let xs: Vec<f64> = (3..40).map(|d| a_threshold(t(d), k).unwrap()).collect();
            assert!(xs.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn f_bound_values() {
        assert!((f_bound(t(3), 0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!((f_bound(t(3), 0.01).unwrap() - 0.301_029_995_663_981_1).abs() < 1e-12);
        assert!(f_bound(t(3), 0.0).is_err());
        assert!(f_bound(t(3), 1.0).is_err());
        for d in 3..10 {
            let at = f_bound(t(d), 1.0 / (2.0 * f64::from(d - 1))).unwrap();
            assert!((at - 1.0).abs() < 1e-14);
            let grid: Vec<f64> = (1..60).map(|i| 0.5f64.powi(i)).collect();
            let ys: Vec<f64> = grid.iter().map(|&e| f_bound(t(d), e).unwrap()).collect();
            assert!(ys.windows(2).all(|w| w[1] < w[0]));
            assert!(*ys.last().unwrap() < 0.07);
        }
    }

    #[test]
    fn continuity_values() {
        assert!((continuity_modulus(t(3), 0.5, 0.5 + 1.0 / 12.0).unwrap() - 1.0).abs() < 1e-12);
        let m = continuity_modulus(t(3), 0.2, 0.203).unwrap();
        assert!((m - 0.294_296_852_929).abs() < 1e-6, "{m}");
        assert!(continuity_modulus(t(3), 0.3, 0.3).is_err());
        assert_eq!(continuity_modulus(t(3), 0.1, 0.9).unwrap(), f64::INFINITY);
        let ms: Vec<f64> = (1..30)
            .map(|i| continuity_modulus(t(3), 0.4, 0.4 + 0.1 * 0.5f64.powi(i)).unwrap())
            .collect();
        assert!(ms.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn sharp_bound_solves_its_equation() {
        let b = sharp_bernoulli_density_bound(t(3), 0.01).unwrap();
        assert!((b - 0.277_095_217_717).abs() < 1e-8, "{b}");
        assert!(b <= f_bound(t(3), 0.01).unwrap());
        for d in 3..8 {
            for &p in &[0.001, 0.01, 0.05, 0.1, 0.2] {
                let b = sharp_bernoulli_density_bound(t(d), p).unwrap();
                assert!(b > p && b <= 1.0);
                if b < 1.0 {
                    let r = relative_entropy(b, p) - f64::from(d - 1).ln();
                    assert!(r.abs() < 1e-8, "d {d} p {p}: {r}");
                }
                let f = f_bound(t(d), p).unwrap();
                assert!(b <= f.min(1.0) + 1e-12);
            }
        }
        assert_eq!(sharp_bernoulli_density_bound(t(3), 0.6).unwrap(), 1.0);
        let tiny = sharp_bernoulli_density_bound(t(3), 1e-12).unwrap();
        assert!(tiny < 0.03);
    }

    #[test]
    fn curve_examples() {
        let pt = lower_bound_curve(t(3), 0.45).unwrap();
        assert_eq!((pt.lower, pt.source), (0.5, BoundSource::KCopies(2)));
        let pt = lower_bound_curve(t(3), 0.7).unwrap();
        assert_eq!((pt.lower, pt.source), (1.0, BoundSource::Haggstrom));
        let pt = lower_bound_curve(t(4), 0.21).unwrap();
        assert!((pt.lower - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(pt.source, BoundSource::KCopies(3));
        let pt = lower_bound_curve(t(3), 0.55).unwrap();
        assert_eq!((pt.lower, pt.source), (0.55, BoundSource::Trivial));
    }

    #[test]
    fn continuity_lifts_the_curve_just_below_two_thirds() {
        let pt = lower_bound_curve(t(3), 0.666).unwrap();
        assert_eq!(pt.source, BoundSource::Continuity);
        let expected = 1.0 - f_bound(t(3), 3.0 * (2.0 / 3.0 - 0.666)).unwrap();
        assert!((pt.lower - expected).abs() < 1e-15);
        assert!(pt.lower > 0.666);
        let frontier = trivial_frontier(t(3), 1e-4).unwrap().unwrap();
        assert!(frontier > 0.6 && frontier < 2.0 / 3.0, "{frontier}");
        assert_eq!(lower_bound_curve(t(3), frontier).unwrap().source, BoundSource::Trivial);
    }

    #[test]
    fn curve_is_monotone() {
        for d in [3, 4, 5] {
            let mut prev = 0.0;
            for i in 1..10_000 {
                let p = i as f64 * 1e-4;
                let pt = lower_bound_curve(t(d), p).unwrap();
                assert!(pt.lower >= prev - 1e-15, "d {d} p {p}");
                assert!(pt.lower >= p && pt.lower <= 1.0);
                prev = pt.lower;
            }
        }
    }

    #[test]
    fn coverage_d4_has_no_gaps() {
        let r = interval_coverage(t(4), 64, 1e-4).unwrap();
        assert!(r.gaps.is_empty(), "{:?}", &r.gaps[..r.gaps.len().min(3)]);
        assert!(r.all_overlap());
        assert_eq!(r.intervals.len(), 64);
    }

    #[test]
    fn coverage_d3_gaps() {
        let r = interval_coverage(t(3), 64, 1e-4).unwrap();
        let big = r.gaps.iter().find(|g| (g.lo - 0.5).abs() <= 1e-4).expect("gap at 1/2");
        assert!((big.hi - 2.0 / 3.0).abs() <= 1e-4);
        // 1/6 falls below every nonempty interval
        assert!(r
            .gaps
            .iter()
            .any(|g| g.lo <= 1.0 / 6.0 && a_threshold(t(3), 6).unwrap() <= g.hi));
        let a = |k| a_threshold(t(3), k).unwrap();
        let expected = [
            (1e-4, a(5)),
            (0.2, a(4)),
            (0.25, a(3)),
            (1.0 / 3.0, a(2)),
            (0.5, 2.0 / 3.0),
        ];
        assert_eq!(r.gaps.len(), expected.len());
        for (g, (lo, hi)) in r.gaps.iter().zip(expected) {
            assert!(
                (g.lo - lo).abs() <= 1e-4 && (g.hi - hi).abs() <= 1e-4,
                "{g:?} vs [{lo}, {hi})"
            );
        }
        assert!(!is_covered(t(3), 1.0 / 6.0));
        assert!(!is_covered(t(3), 0.55));
        assert!(is_covered(t(3), 0.45));
    }

    #[test]
    fn overlap_criterion_matches_interval_form() {
        assert!(overlap_criterion(t(4), 1));
        for d in 3..12 {
            for k in 1..200 {
                let direct = a_threshold(t(d), k).unwrap() <= 1.0 / f64::from(k + 1);
                assert_eq!(overlap_criterion(t(d), k), direct, "d {d} k {k}");
            }
        }
    }

    #[test]
    fn dinf_values() {
        assert_eq!(dinf_lower(0.3).unwrap(), 0.25);
        assert!((dinf_lower(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(dinf_lower(0.999).unwrap(), 0.5);
        assert_eq!(dinf_lower(0.5 + 1e-12).unwrap(), 0.5);
        assert!(dinf_lower(0.0).is_err());
        for i in 1..10_000 {
            let x = i as f64 * 1e-4;
            assert!(dinf_lower(x).unwrap() < x);
        }
    }
}
