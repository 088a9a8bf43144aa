//! Numeric kernels: the arithmetic-geometric mean, adaptive quadrature over
//! unbounded domains, and partial-sum diagnostics for non-negative series.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};

const AGM_MAX_ITER: usize = 64;

/// Arithmetic-geometric mean of two positive numbers.
pub fn agm(a: f64, b: f64) -> Result<f64> {
    require(a.is_finite() && a > 0.0, "a", "finite and > 0", a)?;
    require(b.is_finite() && b > 0.0, "b", "finite and > 0", b)?;
    let (mut a, mut b) = (a, b);
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = a.sqrt() * b.sqrt();
        a = next;
    }
    Ok(0.5 * (a + b))
}

/// `ln AGM(1 + delta, 1)` for `delta >= 0`, accurate to full relative
/// precision as `delta → 0`.
///
/// The iteration is carried on the excesses `a - 1`, `b - 1` so no digits
/// are lost when both means sit next to one.
pub fn ln_agm_one_plus(delta: f64) -> Result<f64> {
    require(delta.is_finite() && delta >= 0.0, "delta", "finite and >= 0", delta)?;
    if delta == 0.0 {
        return Ok(0.0);
    }
    let (mut ea, mut eb) = (delta, 0.0f64);
    for _ in 0..AGM_MAX_ITER {
        if (ea - eb).abs() <= 1e-16 * ea {
            break;
        }
        let next = 0.5 * (ea + eb);
        eb = (0.5 * (ea.ln_1p() + eb.ln_1p())).exp_m1();
        ea = next;
    }
    Ok((0.5 * (ea + eb)).ln_1p())
}

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    /// Whether the error estimate met the requested tolerance.
    pub fn converged(&self, tol: f64) -> bool {
        self.abs_error_estimate <= tol
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn kronrod15<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = g(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        *slot = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() || !error.is_finite() {
        error = f64::INFINITY;
    }
    Panel { lo, hi, value, error }
}

const EVALS_PER_PANEL: usize = 15;

/// Globally adaptive Gauss–Kronrod integration over a list of initial cuts.
fn adaptive<G: Fn(f64) -> f64>(g: G, cuts: &[f64], tol: f64, budget: usize) -> QuadratureResult {
    let mut heap: BinaryHeap<Panel> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod15(&g, w[0], w[1]))
        .collect();
    let mut evaluations = heap.len() * EVALS_PER_PANEL;
    let mut finished: Vec<Panel> = Vec::new();

    loop {
        let total_err: f64 = heap.iter().chain(&finished).map(|p| p.error).sum();
        if total_err <= tol || evaluations + 2 * EVALS_PER_PANEL > budget {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel cannot be split further in floating point.
            finished.push(worst);
            continue;
        }
        heap.push(kronrod15(&g, worst.lo, mid));
        heap.push(kronrod15(&g, mid, worst.hi));
        evaluations += 2 * EVALS_PER_PANEL;
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(finished);
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value = neumaier_sum(panels.iter().map(|p| p.value));
    let abs_error_estimate = panels.iter().map(|p| p.error).sum();
    QuadratureResult {
        value,
        abs_error_estimate,
        evaluations: evaluations.max(1),
    }
}

/// Adaptive quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Absolute error target.
    pub tol: f64,
    /// Upper bound on integrand evaluations.
    pub max_evaluations: usize,
    /// Equal-width panels the transformed domain is cut into before
    /// adaptive refinement starts.
    pub initial_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            tol: 1e-10,
            max_evaluations: 1_000_000,
            initial_panels: 8,
        }
    }
}

impl Quadrature {
    pub fn with_tol(tol: f64) -> Self {
        Quadrature {
            tol,
            ..Default::default()
        }
    }

    fn check(&self) -> Result<()> {
        require(
            self.tol.is_finite() && self.tol > 0.0,
            "tol",
            "finite and > 0",
            self.tol,
        )?;
        require(
            self.initial_panels >= 1,
            "initial_panels",
            ">= 1",
            self.initial_panels as f64,
        )
    }

    fn cuts(&self, lo: f64, hi: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
        let n = self.initial_panels;
        let mut cuts: Vec<f64> = (0..=n)
            .map(|k| lo + (hi - lo) * k as f64 / n as f64)
            .chain(extra.into_iter().filter(|u| *u > lo && *u < hi))
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }

    /// `∫_ℝ f(x) dx` through `x = tan u`, `u ∈ (-π/2, π/2)`.
    ///
    /// `breakpoints` are points of the real line where the integrand has
    /// features (peaks, kinks); they become initial panel boundaries.
    pub fn real_line<F: Fn(f64) -> f64>(&self, f: F, breakpoints: &[f64]) -> Result<QuadratureResult> {
        self.check()?;
        let g = |u: f64| {
            let c = u.cos();
            f(u.tan()) / (c * c)
        };
        let cuts = self.cuts(
            -FRAC_PI_2,
            FRAC_PI_2,
            breakpoints.iter().filter(|x| x.is_finite()).map(|x| x.atan()),
        );
        Ok(adaptive(g, &cuts, self.tol, self.max_evaluations))
    }

    /// `∫_0^∞ f(x) dx` through `x = tan u`, `u ∈ (0, π/2)`.
    pub fn half_line<F: Fn(f64) -> f64>(&self, f: F) -> Result<QuadratureResult> {
        self.check()?;
        let g = |u: f64| {
            let c = u.cos();
            f(u.tan()) / (c * c)
        };
        let cuts = self.cuts(0.0, FRAC_PI_2, []);
        Ok(adaptive(g, &cuts, self.tol, self.max_evaluations))
    }

    /// `∫_a^b f(x) dx` over a finite interval.
    pub fn interval<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult> {
        self.check()?;
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Domain {
                name: "interval",
                requirement: "finite endpoints",
                value: if a.is_finite() { b } else { a },
            });
        }
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                evaluations: 1,
            });
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut r = adaptive(&f, &self.cuts(lo, hi, []), self.tol, self.max_evaluations);
        r.value *= sign;
        Ok(r)
    }
}

/// Integrates `f` over the whole real line to absolute tolerance `tol` with
/// the default evaluation budget.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<QuadratureResult> {
    Quadrature::with_tol(tol).real_line(f, &[])
}

/// Compensated summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Coarse trend of a series' partial sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Plateauing,
    Growing,
    Indeterminate,
}

/// Tail ratio at or below which a series is labelled plateauing.
pub const PLATEAU_RATIO: f64 = 0.6;
/// Tail ratio at or above which a series is labelled growing.
pub const GROWTH_RATIO: f64 = 0.85;
const RATIO_FLOOR: f64 = 1e-300;

/// Partial sums at a quarter, half and the full horizon, plus a heuristic
/// convergence label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostics {
    pub checkpoints: [usize; 3],
    pub partial_sums: [f64; 3],
    /// `(S_H - S_{H/2}) / (S_{H/2} - S_{H/4})` when the denominator is
    /// resolvable.
    pub tail_ratio: Option<f64>,
    pub trend: Trend,
}

impl SeriesDiagnostics {
    pub fn total(&self) -> f64 {
        self.partial_sums[2]
    }
}

/// Summarizes the first `horizon` entries of a non-negative series.
///
/// A p-series has tail ratio `2^(1-p)`, so `∑ n⁻²` sits at 0.5 and the
/// harmonic series at 1. Labels are advisory.
pub fn partial_sum_diagnostics(terms: &[f64], horizon: usize) -> Result<SeriesDiagnostics> {
    if horizon < 16 {
        return Err(Error::HorizonTooSmall { horizon, min: 16 });
    }
    if terms.len() < horizon {
        return Err(Error::TooFewTerms {
            available: terms.len(),
            required: horizon,
        });
    }
    if let Some(bad) = terms[..horizon].iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(Error::Domain {
            name: "term",
            requirement: ">= 0",
            value: *bad,
        });
    }
    let checkpoints = [horizon / 4, horizon / 2, horizon];
    let mut partial_sums = [0.0; 3];
    for (slot, &n) in partial_sums.iter_mut().zip(&checkpoints) {
        *slot = neumaier_sum(terms[..n].iter().copied());
    }
    let near = partial_sums[1] - partial_sums[0];
    let far = partial_sums[2] - partial_sums[1];
    let tail_ratio = (near > RATIO_FLOOR).then(|| far / near);
    let trend = match tail_ratio {
        _ if far <= RATIO_FLOOR => Trend::Plateauing,
        Some(r) if r <= PLATEAU_RATIO => Trend::Plateauing,
        Some(r) if r >= GROWTH_RATIO => Trend::Growing,
        _ => Trend::Indeterminate,
    };
    Ok(SeriesDiagnostics {
        checkpoints,
        partial_sums,
        tail_ratio,
        trend,
    })
}
