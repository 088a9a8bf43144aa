//! Divergences between Cauchy laws.
//!
//! Every quantity here depends on the pair `(z, w)` only through
//! [`chi`](crate::halfplane::chi), so each has a `*_from_chi` form used by
//! the sequence classifier.
//!
//! # Hellinger affinity in closed form
//!
//! The affinity `I(z, w) = ∫ √(p_z p_w)` is Möbius invariant, so it equals
//! its value on the canonical pair `(λi, i)`:
//!
//! ```text
//! I(λi, i) = (√λ / π) ∫_ℝ dx / √((x² + λ²)(x² + 1))
//!          = (√λ / π) · π / AGM(λ, 1)
//!          = 1 / (√λ · AGM(1, 1/λ)),
//! ```
//!
//! using the complete elliptic integral
//! `∫_0^∞ dx / √((x² + a²)(x² + b²)) = π / (2 AGM(a, b))`.
//! One AGM step takes `(√λ, 1/√λ)` to `((λ + 1) / (2√λ), 1)`, and
//! `((λ + 1) / (2√λ))² = 1 + t/4` with `t = chi`, hence
//!
//! ```text
//! J(t) = 1 / AGM(√(1 + t/4), 1).
//! ```
//!
//! The Kakutani term `-ln J(t)` is evaluated from the last form with the
//! AGM iteration carried on excesses over one, which keeps full relative
//! precision as `t → 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::halfplane::{chi, UHPoint};
use crate::numerics::{agm, ln_agm_one_plus};

/// Density of the Cauchy law with parameter `z` at `x`.
pub fn cauchy_pdf(z: UHPoint, x: f64) -> f64 {
    let dx = x - z.location();
    let y = z.scale();
    y / (PI * (dx * dx + y * y))
}

/// Kullback–Leibler divergence `K(P_z | P_w) = ln(1 + chi/4)`. Symmetric.
pub fn kl_divergence(z: UHPoint, w: UHPoint) -> f64 {
    kl_from_chi(chi(z, w))
}

pub fn kl_from_chi(t: f64) -> f64 {
    (0.25 * t).ln_1p()
}

/// `ln (dP_w / dP_z)(x)`.
pub fn log_density_ratio(z: UHPoint, w: UHPoint, x: f64) -> f64 {
    let dz = x - z.location();
    let dw = x - w.location();
    let (yz, yw) = (z.scale(), w.scale());
    yw.ln() - yz.ln() + (dz * dz + yz * yz).ln() - (dw * dw + yw * yw).ln()
}

/// Bound `C₂` on the density ratio (either direction) valid for every pair
/// with `chi <= c1`: `C₂ = 2·C₃ + c1`, where `C₃ ≥ 1` bounds the scale
/// ratio, `C₃ + 1/C₃ = c1 + 2`.
pub fn log_ratio_bound(c1: f64) -> Result<f64> {
    require(c1.is_finite() && c1 >= 0.0, "c1", "finite and >= 0", c1)?;
    let s = c1 + 2.0;
    let c3 = 0.5 * (s + ((s - 2.0) * (s + 2.0)).sqrt());
    Ok(2.0 * c3 + c1)
}

/// The function `J` with `J(chi(z, w)) = I(z, w)`.
pub fn affinity_from_chi(t: f64) -> Result<f64> {
    require(t.is_finite() && t >= 0.0, "t", "finite and >= 0", t)?;
    Ok(agm((1.0 + 0.25 * t).sqrt(), 1.0)?.recip())
}

/// Hellinger affinity (Bhattacharyya coefficient) `∫ √(p_z p_w) dx`.
pub fn hellinger_affinity(z: UHPoint, w: UHPoint) -> f64 {
    affinity_from_chi(chi(z, w)).expect("chi is finite and non-negative")
}

/// `-ln J(t)`.
pub fn kakutani_from_chi(t: f64) -> Result<f64> {
    require(t.is_finite() && t >= 0.0, "t", "finite and >= 0", t)?;
    let q = 0.25 * t;
    // √(1 + q) - 1 without cancellation.
    let delta = q / ((1.0 + q).sqrt() + 1.0);
    ln_agm_one_plus(delta)
}

/// Per-factor term of Kakutani's series, `-ln ∫ √(p_z p_w)`.
pub fn kakutani_term(z: UHPoint, w: UHPoint) -> f64 {
    kakutani_from_chi(chi(z, w)).expect("chi is finite and non-negative")
}

/// The three per-factor quantities bounding each other in the
/// convergent direction: `kakutani ≤ half_kl ≤ chi_eighth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainTriple {
    pub kakutani: f64,
    pub half_kl: f64,
    pub chi_eighth: f64,
}

impl ChainTriple {
    pub fn from_chi(t: f64) -> Result<Self> {
        Ok(ChainTriple {
            kakutani: kakutani_from_chi(t)?,
            half_kl: 0.5 * kl_from_chi(t),
            chi_eighth: 0.125 * t,
        })
    }

    /// Whether the chain holds with additive slack `slack`.
    pub fn holds(&self, slack: f64) -> bool {
        self.kakutani >= 0.0 && self.kakutani <= self.half_kl + slack && self.half_kl <= self.chi_eighth + slack
    }
}

/// A pair of parameters with its invariant cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergencePair {
    pub z: UHPoint,
    pub w: UHPoint,
    pub chi: f64,
}

impl DivergencePair {
    pub fn new(z: UHPoint, w: UHPoint) -> Self {
        DivergencePair { z, w, chi: chi(z, w) }
    }

    pub fn kl(&self) -> f64 {
        kl_from_chi(self.chi)
    }

    pub fn affinity(&self) -> f64 {
        affinity_from_chi(self.chi).expect("cached chi is valid")
    }

    pub fn kakutani(&self) -> f64 {
        kakutani_from_chi(self.chi).expect("cached chi is valid")
    }

    pub fn chain(&self) -> ChainTriple {
        ChainTriple::from_chi(self.chi).expect("cached chi is valid")
    }

    pub fn log_density_ratio(&self, x: f64) -> f64 {
        log_density_ratio(self.z, self.w, x)
    }
}
