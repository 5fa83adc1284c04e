//! Scalar (`N = 1`) pairing moments by an open-arc dynamic program.
//!
//! For the geometric kernel the weight `p^(m - l)` of an arc factors into one
//! factor of `p` per unit gap it spans. Sweeping the points left to right and
//! tracking only the number of currently open arcs therefore reproduces the
//! full pairing sum in `O(k^2)` time and `O(k)` memory:
//!
//! * at each site either open a new arc (`m -> m + 1`) or close one
//!   (`m -> m - 1`, with multiplicity `m` for all pairings and `1` for
//!   non-crossing ones, where only the innermost arc may close);
//! * across each gap every open arc contributes a factor `p`.
//!
//! General kernels do not factor over gaps, so they are only served by the
//! enumeration in [`crate::pairings`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairings::PairingClass;
use crate::polynomial::WeightPoly;

/// A value the arc DP can propagate.
pub trait DpValue: Clone {
    /// Per-gap weight data (e.g. a power table of `p`, or `ln p`).
    type Weight;

    fn nil() -> Self;
    fn unit() -> Self;
    fn vanishes(&self) -> bool;
    /// `self += multiplicity * other`.
    fn add_scaled(&mut self, other: &Self, multiplicity: usize);
    /// `self *= p^open`.
    fn apply_gap(&mut self, weight: &Self::Weight, open: usize);
    /// Rescales the state in place, returning the log of the factor removed.
    fn renormalize(_values: &mut [Self]) -> f64 {
        0.0
    }
}

impl DpValue for BigRational {
    /// `p^0, p^1, ..., p^k`.
    type Weight = Vec<BigRational>;

    fn nil() -> Self {
        Zero::zero()
    }

    fn unit() -> Self {
        One::one()
    }

    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_scaled(&mut self, other: &Self, multiplicity: usize) {
        if multiplicity == 1 {
            *self += other;
        } else {
            *self += other * BigRational::from_integer(BigInt::from(multiplicity));
        }
    }

    fn apply_gap(&mut self, powers: &Vec<BigRational>, open: usize) {
        if open > 0 {
            *self *= &powers[open];
        }
    }
}

impl DpValue for WeightPoly {
    type Weight = ();

    fn nil() -> Self {
        WeightPoly::zero()
    }

    fn unit() -> Self {
        WeightPoly::one()
    }

    fn vanishes(&self) -> bool {
        WeightPoly::is_zero(self)
    }

    fn add_scaled(&mut self, other: &Self, multiplicity: usize) {
        for (e, c) in other.terms() {
            self.add_term(e, c * BigInt::from(multiplicity));
        }
    }

    fn apply_gap(&mut self, _: &(), open: usize) {
        *self = self.shift(open as u32);
    }
}

/// Natural logarithm of a non-negative value; `-inf` encodes zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue(pub f64);

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl DpValue for LogValue {
    /// `ln p`.
    type Weight = f64;

    fn nil() -> Self {
        LogValue(f64::NEG_INFINITY)
    }

    fn unit() -> Self {
        LogValue(0.0)
    }

    fn vanishes(&self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    fn add_scaled(&mut self, other: &Self, multiplicity: usize) {
        let term = if multiplicity == 1 {
            other.0
        } else {
            other.0 + (multiplicity as f64).ln()
        };
        self.0 = log_add(self.0, term);
    }

    fn apply_gap(&mut self, ln_p: &f64, open: usize) {
        if open > 0 && !self.vanishes() {
            self.0 += ln_p * open as f64;
        }
    }

    fn renormalize(values: &mut [Self]) -> f64 {
        let max = values.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return 0.0;
        }
        for v in values.iter_mut() {
            v.0 -= max;
        }
        max
    }
}

/// State of the left-to-right sweep: `values[m]` is the weighted sum over
/// partial pairings of the first `site` points with exactly `m` open arcs.
#[derive(Clone, Debug)]
pub struct DpState<T> {
    pub values: Vec<T>,
    pub site: usize,
    pub k: usize,
    /// Accumulated log of renormalisation factors (log-space backend only).
    pub log_offset: f64,
}

impl<T: DpValue> DpState<T> {
    pub fn new(k: usize) -> Self {
        let mut values = vec![T::nil(); k + 1];
        values[0] = T::unit();
        Self {
            values,
            site: 0,
            k,
            log_offset: 0.0,
        }
    }

    /// Largest open-arc count reachable after `site` points.
    pub fn band(&self, site: usize) -> usize {
        site.min(2 * self.k - site)
    }

    pub fn is_complete(&self) -> bool {
        self.site == 2 * self.k
    }

    /// Processes the next point, then the gap that follows it.
    pub fn advance(&mut self, class: PairingClass, weight: &T::Weight) {
        assert!(!self.is_complete(), "sweep already complete");
        let site = self.site + 1;
        let prev_band = self.band(self.site);
        let band = self.band(site);
        let mut next = vec![T::nil(); self.k + 1];
        for m in 0..=prev_band {
            let v = &self.values[m];
            if v.vanishes() {
                continue;
            }
            if m < band {
                next[m + 1].add_scaled(v, 1);
            }
            if m >= 1 {
                let mult = match class {
                    PairingClass::All => m,
                    PairingClass::NonCrossing => 1,
                };
                next[m - 1].add_scaled(v, mult);
            }
        }
        if site < 2 * self.k {
            for (m, v) in next.iter_mut().enumerate().take(band + 1).skip(1) {
                v.apply_gap(weight, m);
            }
        }
        self.log_offset += T::renormalize(&mut next);
        self.values = next;
        self.site = site;
    }

    pub fn run(mut self, class: PairingClass, weight: &T::Weight) -> Self {
        while !self.is_complete() {
            self.advance(class, weight);
        }
        self
    }
}

fn sweep<T: DpValue>(k: usize, class: PairingClass, weight: &T::Weight) -> DpState<T> {
    DpState::new(k).run(class, weight)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Exact,
    LogSpace,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactOptions {
    /// Accept `p > 1`; only meaningful for algebraic experiments.
    pub allow_p_above_one: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MomentValue {
    Exact(BigRational),
    /// Natural logarithm of the moment.
    Log(f64),
}

impl MomentValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            MomentValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            MomentValue::Log(l) => l.exp(),
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            MomentValue::Exact(r) => ln_rational(r),
            MomentValue::Log(l) => *l,
        }
    }
}

/// `ln` of a positive rational without overflowing `f64` on huge values.
pub fn ln_rational(r: &BigRational) -> f64 {
    fn ln_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits < 1000 {
            return n.to_f64().unwrap_or(f64::NAN).ln();
        }
        let shift = bits - 64;
        let top: BigInt = n >> shift;
        top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
    }
    if !r.is_positive() {
        return if r.is_zero() { f64::NEG_INFINITY } else { f64::NAN };
    }
    ln_int(r.numer()) - ln_int(r.denom())
}

fn check_exact_weight(p: &BigRational, opts: &ExactOptions) -> Result<()> {
    if !p.is_positive() {
        return Err(Error::InvalidWeight(format!("p must be positive, got {p}")));
    }
    if !opts.allow_p_above_one && *p > BigRational::one() {
        return Err(Error::InvalidWeight(format!(
            "p = {p} exceeds 1 (pass allow_p_above_one for algebraic experiments)"
        )));
    }
    Ok(())
}

fn check_log_weight(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidWeight(format!(
            "log-space backend needs 0 < p <= 1, got {p}"
        )));
    }
    Ok(())
}

/// Exact pairing moment `sum_omega p^{sum |l - m|}` at a rational `p`.
pub fn moment_exact(k: usize, class: PairingClass, p: &BigRational, opts: &ExactOptions) -> Result<BigRational> {
    check_exact_weight(p, opts)?;
    let mut powers = Vec::with_capacity(k + 1);
    let mut acc = BigRational::one();
    for _ in 0..=k {
        powers.push(acc.clone());
        acc *= p;
    }
    Ok(sweep::<BigRational>(k, class, &powers).values[0].clone())
}

/// Natural log of the pairing moment at `0 < p <= 1`, computed entirely in
/// log space with per-site renormalisation.
pub fn log_moment(k: usize, class: PairingClass, p: f64) -> Result<f64> {
    check_log_weight(p)?;
    let state = sweep::<LogValue>(k, class, &p.ln());
    Ok(state.values[0].0 + state.log_offset)
}

/// The full moment polynomial in `p`, obtained from the same sweep with
/// polynomial-valued states.
pub fn moment_poly(k: usize, class: PairingClass) -> WeightPoly {
    sweep::<WeightPoly>(k, class, &()).values[0].clone()
}

/// All-pairings moment (the `N = 1` Gaussian product moment).
pub fn scalar_moment_dp(k: usize, p: &BigRational, backend: Backend) -> Result<MomentValue> {
    moment_dp(k, PairingClass::All, p, backend, &ExactOptions::default())
}

/// Non-crossing moment, equal to `B_k(p)`.
pub fn noncrossing_moment_dp(k: usize, p: &BigRational, backend: Backend) -> Result<MomentValue> {
    moment_dp(k, PairingClass::NonCrossing, p, backend, &ExactOptions::default())
}

pub fn moment_dp(
    k: usize,
    class: PairingClass,
    p: &BigRational,
    backend: Backend,
    opts: &ExactOptions,
) -> Result<MomentValue> {
    match backend {
        Backend::Exact => moment_exact(k, class, p, opts).map(MomentValue::Exact),
        Backend::LogSpace => {
            let pf = p
                .to_f64()
                .ok_or_else(|| Error::InvalidWeight(format!("{p} is not representable")))?;
            log_moment(k, class, pf).map(MomentValue::Log)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub k: usize,
    pub p: f64,
    /// `ln S_k(p)`.
    pub log_moment: f64,
    /// `(1/k) ln S_k(p)`.
    pub growth_rate: f64,
}

pub const EXTRAPOLATION_METHOD: &str = "least-squares line in 1/k over the top half of the k grid";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub p: f64,
    /// Intercept of the fitted line at `1/k = 0`; a finite-k estimate only.
    pub estimate: f64,
    pub k_used: Vec<usize>,
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCurve {
    pub class: PairingClass,
    pub points: Vec<GrowthPoint>,
    pub extrapolation: Option<Extrapolation>,
}

fn check_k_grid(k_list: &[usize]) -> Result<()> {
    if k_list.is_empty() {
        return Err(Error::InvalidArgument("empty k grid".into()));
    }
    if k_list[0] == 0 || k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "k grid must be strictly ascending positive integers".into(),
        ));
    }
    Ok(())
}

/// `(1/k) ln S_k(p)` for each `k`, plus the `1/k -> 0` extrapolation when at
/// least two points fall in the top half of the grid.
pub fn growth_curve(k_list: &[usize], p: f64, class: PairingClass) -> Result<GrowthCurve> {
    check_k_grid(k_list)?;
    check_log_weight(p)?;
    let points = k_list
        .par_iter()
        .map(|&k| {
            let log_moment = log_moment(k, class, p)?;
            Ok(GrowthPoint {
                k,
                p,
                log_moment,
                growth_rate: log_moment / k as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let extrapolation = extrapolate(&points);
    Ok(GrowthCurve {
        class,
        points,
        extrapolation,
    })
}

fn extrapolate(points: &[GrowthPoint]) -> Option<Extrapolation> {
    let top = &points[points.len() / 2..];
    if top.len() < 2 {
        return None;
    }
    let n = top.len() as f64;
    let xs: Vec<f64> = top.iter().map(|pt| 1.0 / pt.k as f64).collect();
    let ys: Vec<f64> = top.iter().map(|pt| pt.growth_rate).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Some(Extrapolation {
        p: top[0].p,
        estimate: my - slope * mx,
        k_used: top.iter().map(|pt| pt.k).collect(),
        method: EXTRAPOLATION_METHOD.to_string(),
    })
}

/// Eight evenly spaced probe sizes `k_probe * j / 8`, deduplicated.
pub fn probe_grid(k_probe: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = (1..=8).map(|j| (k_probe * j / 8).max(1)).collect();
    grid.dedup();
    grid
}

/// Extrapolated growth estimate at `p` on the probe grid of `k_probe`; falls
/// back to the raw value at `k_probe` when the grid is too small to fit.
pub fn growth_estimate(p: f64, k_probe: usize, class: PairingClass) -> Result<f64> {
    let curve = growth_curve(&probe_grid(k_probe), p, class)?;
    Ok(match curve.extrapolation {
        Some(ex) => ex.estimate,
        None => curve.points.last().map(|pt| pt.growth_rate).unwrap_or(f64::NAN),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcBracket {
    pub p_lo: f64,
    pub p_hi: f64,
    pub width: f64,
    pub growth_lo: f64,
    pub growth_hi: f64,
    pub k_probe: usize,
    pub probe_grid: Vec<usize>,
    pub tol: f64,
    pub class: PairingClass,
    pub iterations: usize,
    pub method: String,
    pub label: String,
}

/// Bisects on `p` for the sign change of the extrapolated growth rate. The
/// result is a finite-k estimate of the critical weight, not a proven value.
pub fn pc_bracket(p_lo: f64, p_hi: f64, k_probe: usize, tol: f64, class: PairingClass) -> Result<PcBracket> {
    check_log_weight(p_lo)?;
    check_log_weight(p_hi)?;
    if p_lo > p_hi {
        return Err(Error::InvalidArgument(format!("p_lo = {p_lo} > p_hi = {p_hi}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if k_probe == 0 {
        return Err(Error::InvalidArgument("k_probe must be positive".into()));
    }
    let (mut lo, mut hi) = (p_lo, p_hi);
    let mut g_lo = growth_estimate(lo, k_probe, class)?;
    let mut g_hi = growth_estimate(hi, k_probe, class)?;
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::NoSignChange {
            p_lo,
            p_hi,
            growth_lo: g_lo,
            growth_hi: g_hi,
        });
    }
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let g = growth_estimate(mid, k_probe, class)?;
        if g < 0.0 {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
            g_hi = g;
        }
        iterations += 1;
    }
    Ok(PcBracket {
        p_lo: lo,
        p_hi: hi,
        width: hi - lo,
        growth_lo: g_lo,
        growth_hi: g_hi,
        k_probe,
        probe_grid: probe_grid(k_probe),
        tol,
        class,
        iterations,
        method: format!("bisection on the sign of the extrapolated growth rate ({EXTRAPOLATION_METHOD})"),
        label: "finite-k estimate of p_c".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_small_cases() {
        let o = ExactOptions::default();
        assert_eq!(moment_exact(1, PairingClass::All, &rat(1, 3), &o).unwrap(), rat(1, 3));
        assert_eq!(moment_exact(2, PairingClass::All, &rat(1, 2), &o).unwrap(), rat(3, 8));
        assert_eq!(moment_exact(3, PairingClass::All, &rat(1, 1), &o).unwrap(), rat(15, 1));
        assert_eq!(
            moment_exact(2, PairingClass::NonCrossing, &rat(1, 2), &o).unwrap(),
            rat(5, 16)
        );
        assert_eq!(
            moment_exact(3, PairingClass::NonCrossing, &rat(1, 1), &o).unwrap(),
            rat(5, 1)
        );
        assert_eq!(moment_exact(0, PairingClass::All, &rat(1, 2), &o).unwrap(), rat(1, 1));
    }

    #[test]
    fn weight_validation() {
        let o = ExactOptions::default();
        assert!(matches!(
            moment_exact(2, PairingClass::All, &rat(3, 2), &o),
            Err(Error::InvalidWeight(_))
        ));
        assert!(moment_exact(2, PairingClass::All, &rat(0, 1), &o).is_err());
        let lax = ExactOptions {
            allow_p_above_one: true,
        };
        // p^2 + 2p^4 at p = 2
        assert_eq!(
            moment_exact(2, PairingClass::All, &rat(2, 1), &lax).unwrap(),
            rat(36, 1)
        );
        assert!(log_moment(2, PairingClass::All, 1.5).is_err());
        assert!(log_moment(2, PairingClass::All, 0.0).is_err());
        assert!(log_moment(2, PairingClass::All, f64::NAN).is_err());
    }

    #[test]
    fn symbolic_sweep_matches_small_polynomials() {
        assert_eq!(
            moment_poly(2, PairingClass::All),
            WeightPoly::from_terms([(2u32, 1), (4, 2)])
        );
        assert_eq!(
            moment_poly(3, PairingClass::NonCrossing),
            WeightPoly::from_terms([(3u32, 1), (5, 2), (7, 1), (9, 1)])
        );
    }

    #[test]
    fn band_and_nonnegativity() {
        let k = 6;
        let powers: Vec<BigRational> = (0..=k).map(|e| num_traits::pow(rat(2, 3), e)).collect();
        let mut state = DpState::<BigRational>::new(k);
        while !state.is_complete() {
            state.advance(PairingClass::All, &powers);
            let band = state.band(state.site);
            for (m, v) in state.values.iter().enumerate() {
                assert!(!v.is_negative());
                if m > band {
                    assert!(Zero::is_zero(v), "site {} m {m}", state.site);
                }
                // parity: m has the parity of the site
                if (m + state.site) % 2 == 1 {
                    assert!(Zero::is_zero(v));
                }
            }
        }
    }

    #[test]
    fn log_space_survives_tiny_weights() {
        // S_k(p) >= p^k; at p = 1e-3 and k = 400 that is 1e-1200.
        let l = log_moment(400, PairingClass::All, 1e-3).unwrap();
        assert!(l.is_finite());
        assert!(l >= 400.0 * 1e-3f64.ln());
        assert!((l / 400.0 - 1e-3f64.ln()).abs() < 1e-2);
    }

    #[test]
    fn log_of_big_rational() {
        let big = BigRational::from_integer(num_traits::pow(BigInt::from(10), 500));
        assert!((ln_rational(&big) - 500.0 * 10f64.ln()).abs() < 1e-9);
        assert!((ln_rational(&rat(1, 8)) + 8f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn growth_curve_basics() {
        let curve = growth_curve(&[1], 0.37, PairingClass::All).unwrap();
        assert!((curve.points[0].growth_rate - 0.37f64.ln()).abs() < 1e-15);
        assert!(curve.extrapolation.is_none());

        let curve = growth_curve(&[1], 1.0, PairingClass::All).unwrap();
        assert_eq!(curve.points[0].growth_rate, 0.0);

        // (1/10) ln(19!!) with 19!! = 654729075
        let curve = growth_curve(&[10], 1.0, PairingClass::All).unwrap();
        let want = (654_729_075f64).ln() / 10.0;
        assert!((curve.points[0].growth_rate - want).abs() < 1e-12);

        assert!(growth_curve(&[], 0.5, PairingClass::All).is_err());
        assert!(growth_curve(&[3, 2], 0.5, PairingClass::All).is_err());
        assert!(growth_curve(&[0, 2], 0.5, PairingClass::All).is_err());
    }

    #[test]
    fn extrapolation_recovers_linear_model() {
        let pts: Vec<GrowthPoint> = [10usize, 20, 40, 80]
            .iter()
            .map(|&k| GrowthPoint {
                k,
                p: 0.5,
                log_moment: 0.0,
                growth_rate: -0.25 + 3.0 / k as f64,
            })
            .collect();
        let ex = extrapolate(&pts).unwrap();
        assert_eq!(ex.k_used, vec![40, 80]);
        assert!((ex.estimate + 0.25).abs() < 1e-12);
    }

    #[test]
    fn probe_grid_shape() {
        assert_eq!(probe_grid(800), vec![100, 200, 300, 400, 500, 600, 700, 800]);
        assert_eq!(probe_grid(2), vec![1, 2]);
        assert_eq!(probe_grid(1), vec![1]);
    }

    #[test]
    fn pc_bracket_preconditions() {
        // Same point, positive growth.
        assert!(matches!(
            pc_bracket(1.0, 1.0, 50, 1e-3, PairingClass::All),
            Err(Error::NoSignChange { .. })
        ));
        assert!(pc_bracket(0.9, 0.5, 50, 1e-3, PairingClass::All).is_err());
        assert!(pc_bracket(0.1, 0.9, 50, 0.0, PairingClass::All).is_err());
        assert!(log_moment(500, PairingClass::All, 1.0).unwrap() > 0.0);
    }
}
