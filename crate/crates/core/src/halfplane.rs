//! The upper half-plane as the parameter space of the Cauchy family.
//!
//! A Cauchy law with location `x` and scale `y > 0` is identified with the
//! point `z = x + iy`. Real Möbius maps of determinant one act on these
//! points, and the pair invariant
//!
//! ```text
//! chi(z, w) = |z - w|^2 / (Im z · Im w)
//! ```
//!
//! is constant on orbits and separates them. Every pair can therefore be
//! moved to the canonical representative `(λi, i)` with `λ ≥ 1` and
//! `chi = (λ - 1)^2 / λ`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};

/// Tolerance on `ad - bc = 1` accepted by [`MoebiusMap::new`].
pub const DETERMINANT_TOLERANCE: f64 = 1e-12;

/// A point of the upper half-plane, i.e. a Cauchy parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct UHPoint {
    location: f64,
    scale: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    location: f64,
    scale: f64,
}

impl TryFrom<RawPoint> for UHPoint {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        UHPoint::new(raw.location, raw.scale)
    }
}

impl From<UHPoint> for RawPoint {
    fn from(p: UHPoint) -> Self {
        RawPoint {
            location: p.location,
            scale: p.scale,
        }
    }
}

impl UHPoint {
    /// The imaginary unit `i`, i.e. the standard Cauchy law.
    pub const I: UHPoint = UHPoint {
        location: 0.0,
        scale: 1.0,
    };

    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if location.is_finite() && scale.is_finite() && scale > 0.0 {
            Ok(UHPoint { location, scale })
        } else {
            Err(Error::InvalidPoint { location, scale })
        }
    }

    /// The point `y·i` on the imaginary axis.
    pub fn on_axis(scale: f64) -> Result<Self> {
        Self::new(0.0, scale)
    }

    /// Real part.
    pub fn location(&self) -> f64 {
        self.location
    }

    /// Imaginary part, always strictly positive.
    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl std::fmt::Display for UHPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} + {}i", self.location, self.scale)
    }
}

/// The maximal invariant of a pair of parameters.
pub fn chi(z: UHPoint, w: UHPoint) -> f64 {
    let dx = z.location - w.location;
    let dy = z.scale - w.scale;
    (dx * dx + dy * dy) / (z.scale * w.scale)
}

/// A real 2×2 matrix with unit determinant acting by fractional linear
/// transformations `z ↦ (az + b) / (cz + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds the map, rejecting entries whose determinant is further than
    /// [`DETERMINANT_TOLERANCE`] from one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || (det - 1.0).abs() > DETERMINANT_TOLERANCE {
            return Err(Error::DeterminantNotOne {
                det,
                tol: DETERMINANT_TOLERANCE,
            });
        }
        Ok(MoebiusMap { a, b, c, d })
    }

    /// Builds the map from any matrix of positive determinant by dividing
    /// every entry by `√det`.
    pub fn normalized(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::NonPositiveDeterminant(det));
        }
        let k = det.sqrt().recip();
        Ok(MoebiusMap {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        })
    }

    /// `z ↦ z + shift`.
    pub fn translation(shift: f64) -> Self {
        MoebiusMap {
            a: 1.0,
            b: shift,
            c: 0.0,
            d: 1.0,
        }
    }

    /// `z ↦ factor·z`, for `factor > 0`.
    pub fn dilation(factor: f64) -> Result<Self> {
        require(factor.is_finite() && factor > 0.0, "factor", "finite and > 0", factor)?;
        let s = factor.sqrt();
        Ok(MoebiusMap {
            a: s,
            b: 0.0,
            c: 0.0,
            d: s.recip(),
        })
    }

    /// Rotation `(cos θ, sin θ; -sin θ, cos θ)`; fixes `i`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        MoebiusMap {
            a: c,
            b: s,
            c: -s,
            d: c,
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Matrix product `self · other` (apply `other` first), renormalized to
    /// unit determinant.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        // Product of two SL(2,R) matrices has determinant 1 up to rounding.
        MoebiusMap::normalized(a, b, c, d).unwrap_or(MoebiusMap { a, b, c, d })
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Image of a single point.
    pub fn act(&self, z: UHPoint) -> UHPoint {
        let (x, y) = (z.location, z.scale);
        let re_den = self.c * x + self.d;
        let im_den = self.c * y;
        let den = re_den * re_den + im_den * im_den;
        let re_num = (self.a * x + self.b) * re_den + self.a * self.c * y * y;
        UHPoint {
            location: re_num / den,
            scale: y / den,
        }
    }

    /// Componentwise image of a pair.
    pub fn act_pair(&self, z: UHPoint, w: UHPoint) -> (UHPoint, UHPoint) {
        (self.act(z), self.act(w))
    }
}

impl Default for MoebiusMap {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Canonical orbit representative of a pair: `map` sends `(z, w)` to
/// `(lambda·i, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub lambda: f64,
    pub map: MoebiusMap,
}

/// The unique `λ ≥ 1` with `(λ - 1)^2 / λ = t`.
pub fn canonical_lambda(t: f64) -> Result<f64> {
    Ok(1.0 + canonical_lambda_excess(t)?)
}

/// `λ - 1` for [`canonical_lambda`], without the rounding of adding one.
pub fn canonical_lambda_excess(t: f64) -> Result<f64> {
    require(t.is_finite() && t >= 0.0, "t", "finite and >= 0", t)?;
    Ok(0.5 * t + 0.5 * (t * (t + 4.0)).sqrt())
}

/// Finds the map sending `w` to `i` and `z` to `λi` with `λ ≥ 1`.
///
/// `w = u + vi` is first moved to `i` by `z ↦ (z - u)/v`; a rotation about
/// `i` then brings the image of `z` onto the imaginary axis. Of the two
/// rotation angles that do so, the one landing at or above `i` is kept.
pub fn reduce_to_canonical(z: UHPoint, w: UHPoint) -> CanonicalForm {
    let t = chi(z, w);
    let lambda = 1.0 + 0.5 * t + 0.5 * (t * (t + 4.0)).sqrt();

    let sv = w.scale.sqrt();
    let to_i = MoebiusMap {
        a: sv.recip(),
        b: -w.location / sv,
        c: 0.0,
        d: sv,
    };
    if z == w {
        return CanonicalForm { lambda, map: to_i };
    }

    let zp = to_i.act(z);
    let (p, q) = (zp.location, zp.scale);
    let radial = p * p + (q - 1.0) * (q + 1.0);
    let theta = 0.5 * (2.0 * p).atan2(radial);

    let best = [theta, theta + FRAC_PI_2]
        .into_iter()
        .map(MoebiusMap::rotation)
        .max_by(|r1, r2| r1.act(zp).scale.total_cmp(&r2.act(zp).scale))
        .expect("two candidates");

    CanonicalForm {
        lambda,
        map: best.compose(&to_i),
    }
}
