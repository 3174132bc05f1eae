//! Points and 2×2 matrices over either backend.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::exactnum::{QScalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Point2<S> {
    pub x: S,
    pub y: S,
}

impl<S> Point2<S> {
    pub const fn new(x: S, y: S) -> Self {
        Point2 { x, y }
    }
}

impl<S: Scalar> Point2<S> {
    pub fn zero() -> Self {
        Point2::new(S::zero(), S::zero())
    }

    pub fn scale(&self, s: &S) -> Self {
        Point2::new(s.clone() * self.x.clone(), s.clone() * self.y.clone())
    }

    pub fn dot(&self, o: &Self) -> S {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    pub fn norm2(&self) -> S {
        self.dot(self)
    }

    pub fn to_f64(&self) -> Point2<f64> {
        Point2::new(self.x.to_f64(), self.y.to_f64())
    }

    /// `(1 − s)·self + s·other`.
    pub fn lerp(&self, other: &Self, s: &S) -> Self {
        self.clone() + (other.clone() - self.clone()).scale(s)
    }
}

impl Point2<QScalar> {
    pub fn from_f64(p: Point2<f64>) -> Option<Self> {
        Some(Point2::new(QScalar::from_f64(p.x)?, QScalar::from_f64(p.y)?))
    }
}

impl Point2<f64> {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl<S: Scalar> Add for Point2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Point2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Scalar> Neg for Point2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Point2::new(-self.x, -self.y)
    }
}

impl Serialize for Point2<f64> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        [self.x, self.y].serialize(s)
    }
}

/// A 2×2 matrix stored row-major: `[[m11, m12], [m21, m22]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2<S> {
    pub m: [[S; 2]; 2],
}

/// Symmetric matrices share the representation; symmetry is an invariant
/// kept by the constructors that return them.
pub type SymMat2<S> = Mat2<S>;

impl<S: Scalar> Mat2<S> {
    pub fn new(m11: S, m12: S, m21: S, m22: S) -> Self {
        Mat2 { m: [[m11, m12], [m21, m22]] }
    }

    pub fn zero() -> Self {
        Mat2::new(S::zero(), S::zero(), S::zero(), S::zero())
    }

    pub fn identity() -> Self {
        Mat2::new(S::from_i64(1), S::zero(), S::zero(), S::from_i64(1))
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.m[i][j].clone()
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.get(0, 0), self.get(1, 0), self.get(0, 1), self.get(1, 1))
    }

    pub fn trace(&self) -> S {
        self.get(0, 0) + self.get(1, 1)
    }

    pub fn det(&self) -> S {
        self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0)
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|v| s.clone() * v.clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Mat2::new(f(&self.m[0][0]), f(&self.m[0][1]), f(&self.m[1][0]), f(&self.m[1][1]))
    }

    pub fn apply(&self, p: &Point2<S>) -> Point2<S> {
        Point2::new(
            self.get(0, 0) * p.x.clone() + self.get(0, 1) * p.y.clone(),
            self.get(1, 0) * p.x.clone() + self.get(1, 1) * p.y.clone(),
        )
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let e = |i: usize, j: usize| self.get(i, 0) * o.get(0, j) + self.get(i, 1) * o.get(1, j);
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    /// Outer product `a ⊗ n`, entries `a_i n_j`.
    pub fn outer(a: &Point2<S>, n: &Point2<S>) -> Self {
        Mat2::new(
            a.x.clone() * n.x.clone(),
            a.x.clone() * n.y.clone(),
            a.y.clone() * n.x.clone(),
            a.y.clone() * n.y.clone(),
        )
    }

    /// Frobenius inner product `tr(A Bᵀ)`.
    pub fn frobenius(&self, o: &Self) -> S {
        self.get(0, 0) * o.get(0, 0)
            + self.get(0, 1) * o.get(0, 1)
            + self.get(1, 0) * o.get(1, 0)
            + self.get(1, 1) * o.get(1, 1)
    }

    pub fn sym(&self) -> Self {
        let off = half(self.get(0, 1) + self.get(1, 0));
        Mat2::new(self.get(0, 0), off.clone(), off, self.get(1, 1))
    }

    pub fn skew(&self) -> Self {
        let w = half(self.get(0, 1) - self.get(1, 0));
        Mat2::new(S::zero(), w.clone(), -w, S::zero())
    }

    /// Upper off-diagonal entry of the skew part, `(m12 − m21)/2`.
    pub fn skew_entry(&self) -> S {
        half(self.get(0, 1) - self.get(1, 0))
    }

    pub fn to_f64(&self) -> Mat2<f64> {
        self.map_to(|v| v.to_f64())
    }

    pub fn map_to<T>(&self, f: impl Fn(&S) -> T) -> Mat2<T> {
        Mat2 { m: [[f(&self.m[0][0]), f(&self.m[0][1])], [f(&self.m[1][0]), f(&self.m[1][1])]] }
    }

    /// Orthogonal split `M = M_dev + M_sph + M_skew`.
    pub fn decompose(&self) -> Decomposition<S> {
        let sym = self.sym();
        let mean = half(self.trace());
        let sph = Mat2::new(mean.clone(), S::zero(), S::zero(), mean);
        let dev = sym - sph.clone();
        Decomposition { dev, sph, skew: self.skew() }
    }
}

fn half<S: Scalar>(v: S) -> S {
    v * S::from_q(&QScalar::frac(1, 2))
}

impl<S: Scalar> Add for Mat2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Mat2::new(
            self.get(0, 0) + o.get(0, 0),
            self.get(0, 1) + o.get(0, 1),
            self.get(1, 0) + o.get(1, 0),
            self.get(1, 1) + o.get(1, 1),
        )
    }
}

impl<S: Scalar> Sub for Mat2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<S: Scalar> Neg for Mat2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|v| -v.clone())
    }
}

impl<S: Scalar> Mul<&Point2<S>> for &Mat2<S> {
    type Output = Point2<S>;
    fn mul(self, p: &Point2<S>) -> Point2<S> {
        self.apply(p)
    }
}

impl Serialize for Mat2<f64> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        self.m.serialize(s)
    }
}

/// Deviatoric, spherical and skew parts of a 2×2 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<S> {
    pub dev: Mat2<S>,
    pub sph: Mat2<S>,
    pub skew: Mat2<S>,
}

impl<S: Scalar> Decomposition<S> {
    pub fn reconstruct(&self) -> Mat2<S> {
        self.dev.clone() + self.sph.clone() + self.skew.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type M = Mat2<QScalar>;

    fn arb_q() -> impl Strategy<Value = QScalar> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9).prop_map(|(a, b, c, d)| QScalar::from_parts(a, b, c, d))
    }

    fn arb_m() -> impl Strategy<Value = M> {
        (arb_q(), arb_q(), arb_q(), arb_q()).prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
    }

    #[test]
    fn identity_is_purely_spherical() {
        let d = M::identity().decompose();
        assert_eq!(d.dev, M::zero());
        assert_eq!(d.sph, M::identity());
        assert_eq!(d.skew, M::zero());
    }

    #[test]
    fn outer_product_has_zero_det() {
        let a = Point2::new(QScalar::int(3), QScalar::sqrt3());
        let n = Point2::new(QScalar::frac(1, 2), QScalar::from_parts(0, 1, 1, 2));
        assert!(M::outer(&a, &n).det().is_zero());
    }

    proptest! {
        #[test]
        fn decomposition_is_exact_and_orthogonal(m in arb_m()) {
            let d = m.decompose();
            prop_assert_eq!(d.reconstruct(), m.clone());
            prop_assert!(d.dev.frobenius(&d.sph).is_zero());
            prop_assert!(d.dev.frobenius(&d.skew).is_zero());
            prop_assert!(d.sph.frobenius(&d.skew).is_zero());
            prop_assert!(d.dev.trace().is_zero());
            prop_assert_eq!(d.dev.transpose(), d.dev.clone());
            prop_assert_eq!(d.skew.transpose(), -d.skew.clone());
        }
    }
}
