//! Landau energy of the triangle-to-centred-rectangle transformation, its
//! three strain wells, and the linear and finite strain measures.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{QScalar, Scalar};
use crate::linalg::{Mat2, SymMat2};

/// Coefficients of the Landau polynomial.
///
/// `a1` (bulk coefficient) has no reference value; it does not enter the
/// wells and defaults to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandauParams {
    #[serde(rename = "A1", default = "one")]
    pub a1: f64,
    #[serde(rename = "A", default = "one")]
    pub a: f64,
    #[serde(rename = "B", default = "default_b")]
    pub b: f64,
    #[serde(rename = "C", default = "default_c")]
    pub c: f64,
    #[serde(rename = "T", default = "default_t")]
    pub t: f64,
    #[serde(rename = "Tc", default = "one")]
    pub tc: f64,
}

fn one() -> f64 {
    1.0
}
fn default_b() -> f64 {
    -30.0
}
fn default_c() -> f64 {
    200.0
}
fn default_t() -> f64 {
    0.8
}

impl Default for LandauParams {
    /// `A = 1, B = −30, C = 200, T = 0.8, Tc = 1` (so `ε ≈ 0.156`).
    fn default() -> Self {
        LandauParams { a1: 1.0, a: 1.0, b: -30.0, c: 200.0, t: 0.8, tc: 1.0 }
    }
}

impl LandauParams {
    /// Reads `KEY = value` lines (TOML) with keys `A1, A, B, C, T, Tc`;
    /// missing keys keep their defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let p: LandauParams = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a1, self.a, self.b, self.c, self.t, self.tc];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("Landau coefficients must be finite".into()));
        }
        if self.c <= 0.0 {
            return Err(Error::InvalidParameter(format!("C must be positive, got {}", self.c)));
        }
        Ok(())
    }

    /// Three absolute minima exist for `B < 0` below the transition temperature.
    pub fn is_three_well(&self) -> bool {
        t0_of(self).map(|t0| self.b < 0.0 && self.t < t0).unwrap_or(false)
    }
}

/// Transformation strain `ε = (−B + √(B² − 4CA(T − Tc)))/(2C)`.
pub fn epsilon_of(p: &LandauParams) -> Result<f64> {
    let disc = p.b * p.b - 4.0 * p.c * p.a * (p.t - p.tc);
    if disc < 0.0 {
        return Err(Error::NegativeDiscriminant(disc));
    }
    if p.c == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok((-p.b + disc.sqrt()) / (2.0 * p.c))
}

/// First-order transition temperature `T₀ = Tc + 2B²/(9AC)`.
pub fn t0_of(p: &LandauParams) -> Result<f64> {
    if p.a * p.c == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(p.tc + 2.0 * p.b * p.b / (9.0 * p.a * p.c))
}

/// Constant that puts the minimum of the energy at zero.
pub fn m_offset(p: &LandauParams) -> Result<f64> {
    let e = epsilon_of(p)?;
    Ok(-(p.a / 2.0 * (p.t - p.tc) * e * e + p.b / 3.0 * e.powi(3) + p.c / 4.0 * e.powi(4)))
}

/// Symmetry-adapted strains `(e₁, e₂, e₃)`: dilatation, deviatoric stretch, shear.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrainTriple<S = f64> {
    pub e1: S,
    pub e2: S,
    pub e3: S,
}

impl<S: Scalar> StrainTriple<S> {
    pub fn to_f64(&self) -> StrainTriple<f64> {
        StrainTriple { e1: self.e1.to_f64(), e2: self.e2.to_f64(), e3: self.e3.to_f64() }
    }
}

/// Landau energy density; the same polynomial serves linear and finite strains.
pub fn psi_l(s: &StrainTriple, p: &LandauParams) -> Result<f64> {
    Ok(psi_with_offset(s, p, m_offset(p)?))
}

/// `psi_l` with a precomputed offset, for tight loops.
pub fn psi_with_offset(s: &StrainTriple, p: &LandauParams, m: f64) -> f64 {
    let r2 = s.e2 * s.e2 + s.e3 * s.e3;
    p.a1 / 2.0 * s.e1 * s.e1
        + p.a / 2.0 * (p.t - p.tc) * r2
        + p.b / 3.0 * (s.e2.powi(3) - 3.0 * s.e2 * s.e3 * s.e3)
        + p.c / 4.0 * r2 * r2
        + m
}

/// The three wells `E₁, E₂, E₃` for a transformation strain `eps`.
pub fn wells<S: Scalar>(eps: &S) -> [SymMat2<S>; 3] {
    let q = |a: i64, b: i64, c: i64, d: i64| S::from_q(&QScalar::from_parts(a, b, c, d));
    let e1 = Mat2::new(q(1, 1, 0, 1), S::zero(), S::zero(), q(-1, 1, 0, 1));
    let e2 = Mat2::new(q(-1, 2, 0, 1), q(0, 1, 1, 2), q(0, 1, 1, 2), q(1, 2, 0, 1));
    let e3 = Mat2::new(q(-1, 2, 0, 1), q(0, 1, -1, 2), q(0, 1, -1, 2), q(1, 2, 0, 1));
    [e1.scale(eps), e2.scale(eps), e3.scale(eps)]
}

/// Strain triples of the three wells: `(0, ε, 0)`, `(0, −ε/2, ±√3ε/2)`.
pub fn well_strains(eps: f64) -> [StrainTriple; 3] {
    let h = 3f64.sqrt() / 2.0 * eps;
    [
        StrainTriple { e1: 0.0, e2: eps, e3: 0.0 },
        StrainTriple { e1: 0.0, e2: -eps / 2.0, e3: h },
        StrainTriple { e1: 0.0, e2: -eps / 2.0, e3: -h },
    ]
}

/// Index (1, 2, 3) of the well equal to `sym`, if any.
pub fn well_index<S: Scalar>(sym: &SymMat2<S>, eps: &S) -> Option<u8> {
    wells(eps).iter().position(|w| w == sym).map(|i| i as u8 + 1)
}

/// Linearised strains of a displacement gradient `H`.
pub fn linear_strains<S: Scalar>(h: &Mat2<S>) -> StrainTriple<S> {
    let half = S::from_q(&QScalar::frac(1, 2));
    StrainTriple {
        e1: half.clone() * (h.get(0, 0) + h.get(1, 1)),
        e2: half.clone() * (h.get(0, 0) - h.get(1, 1)),
        e3: half * (h.get(0, 1) + h.get(1, 0)),
    }
}

/// Finite (Lagrangian) strains of `F = I + H`.
pub fn nonlinear_strains<S: Scalar>(h: &Mat2<S>) -> StrainTriple<S> {
    let f = Mat2::identity() + h.clone();
    let quarter = S::from_q(&QScalar::frac(1, 4));
    let half = S::from_q(&QScalar::frac(1, 2));
    let sq = |i, j| f.get(i, j) * f.get(i, j);
    StrainTriple {
        e1: quarter.clone() * (sq(0, 0) + sq(1, 0) + sq(0, 1) + sq(1, 1) - S::from_i64(2)),
        e2: quarter * (sq(0, 0) + sq(1, 0) - sq(0, 1) - sq(1, 1)),
        e3: half * (f.get(0, 0) * f.get(0, 1) + f.get(1, 0) * f.get(1, 1)),
    }
}
