//! The piecewise-affine displacement field on the kite tiling.
//!
//! On `ω_{X_k}` the field is `ε(v_{X_k} + v_{o,k})`: an affine piece whose
//! gradient has symmetric part in `{E₁, E₂, E₃}` plus a generation offset
//! `v_{o,k} = L·S_k·(√3 − 2, 1)` with `S_k = Σ_{j=1..k} t^(2j−2)`. At the
//! origin the field takes its limit value; a rigid motion can be added.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exactnum::{t_power, QScalar, Scalar};
use crate::geometry::{Family, Geometry, InterfaceId, InterfaceKind, Location, RegionId, TilingParams};
use crate::linalg::{Mat2, Point2};
use crate::wells::wells;

/// `p ↦ gradient·p + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePiece<S> {
    pub gradient: Mat2<S>,
    pub offset: Point2<S>,
}

impl<S: Scalar> AffinePiece<S> {
    pub fn eval(&self, p: &Point2<S>) -> Point2<S> {
        self.gradient.apply(p) + self.offset.clone()
    }

    pub fn to_f64(&self) -> AffinePiece<f64> {
        AffinePiece { gradient: self.gradient.to_f64(), offset: self.offset.to_f64() }
    }
}

/// Infinitesimal rigid motion `p ↦ [[0, z1], [−z1, 0]]·p + (z2, z3)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidMotion {
    pub z1: QScalar,
    pub z2: QScalar,
    pub z3: QScalar,
}

impl RigidMotion {
    pub fn new(z1: QScalar, z2: QScalar, z3: QScalar) -> Self {
        RigidMotion { z1, z2, z3 }
    }

    pub fn skew(&self) -> Mat2<QScalar> {
        Mat2::new(QScalar::zero(), self.z1.clone(), -&self.z1, QScalar::zero())
    }

    pub fn translation(&self) -> Point2<QScalar> {
        Point2::new(self.z2.clone(), self.z3.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.z1.is_zero() && self.z2.is_zero() && self.z3.is_zero()
    }

    /// Parses `z1,z2,z3`, each an element of Q(√3) such as `3/2√3`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected z1,z2,z3, got {s:?}")));
        }
        Ok(RigidMotion::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?))
    }
}

/// Gradient on one region, split as well + generation skew (+ extra skew).
#[derive(Clone, Debug, PartialEq)]
pub struct GradientParts {
    pub h: Mat2<QScalar>,
    /// 1, 2 or 3.
    pub well: u8,
    /// `W_k = ε[[0, 2√3k], [−2√3k, 0]]`.
    pub w_k: Mat2<QScalar>,
    /// `ε[[0, −√3], [√3, 0]]` on the `B`, `C`, `D` regions.
    pub w_tilde: Option<Mat2<QScalar>>,
    pub rigid: Option<Mat2<QScalar>>,
}

/// Both one-sided values of the field at a point of an interface, and the
/// value of the closed-form trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub point: Point2<QScalar>,
    /// From the region on the negative side of the normal.
    pub left: Point2<QScalar>,
    /// From the region on the positive side of the normal.
    pub right: Point2<QScalar>,
    pub printed: Point2<QScalar>,
}

impl Trace {
    pub fn is_consistent(&self) -> bool {
        self.left == self.right && self.right == self.printed
    }
}

/// Generations whose float pieces are precomputed.
const FLOAT_CACHE: u32 = 40;

#[derive(Debug)]
pub struct DisplacementField {
    params: TilingParams,
    eps: QScalar,
    rigid: Option<RigidMotion>,
    geo: Geometry<QScalar>,
    geo_f: Geometry<f64>,
    float_pieces: OnceLock<Vec<[AffinePiece<f64>; 6]>>,
}

impl Clone for DisplacementField {
    fn clone(&self) -> Self {
        DisplacementField {
            params: self.params.clone(),
            eps: self.eps.clone(),
            rigid: self.rigid.clone(),
            geo: self.geo.clone(),
            geo_f: self.geo_f.clone(),
            float_pieces: OnceLock::new(),
        }
    }
}

/// `S_k = (1 − t^(2k))/(1 − t²)`.
pub fn offset_sum(k: u32) -> QScalar {
    (QScalar::one() - t_power(2 * k)) / (QScalar::one() - t_power(2))
}

fn q(an: i64, ad: i64, bn: i64, bd: i64) -> QScalar {
    QScalar::from_parts(an, ad, bn, bd)
}

fn s3() -> QScalar {
    QScalar::sqrt3()
}

/// Gradient and constant term of `v_{X_k}` (without `ε`), `lt = L·t^(2k)`.
fn v_piece(family: Family, k: u32, lt: &QScalar) -> (Mat2<QScalar>, Point2<QScalar>) {
    let k = QScalar::int(k as i64);
    let two_k = QScalar::int(2) * &k;
    let half = QScalar::frac(1, 2);
    let zero = QScalar::zero;
    match family {
        Family::A => (
            Mat2::new(-&half, (&two_k - &half) * s3(), -s3() * (&half + &two_k), half.clone()),
            Point2::new(zero(), lt.clone()),
        ),
        Family::B => (
            Mat2::new(QScalar::one(), (&two_k - QScalar::one()) * s3(), (QScalar::one() - &two_k) * s3(), -QScalar::one()),
            Point2::new(lt * &half, lt * q(2, 1, 1, 1) * &half),
        ),
        Family::C => (
            Mat2::new(-&half, s3() * (&two_k - &half), q(0, 1, 3, 2) - &two_k * s3(), half.clone()),
            Point2::new(zero(), zero()),
        ),
        Family::D => (
            Mat2::new(-&half, &two_k * s3() - q(0, 1, 3, 2), q(0, 1, 1, 2) - &two_k * s3(), half.clone()),
            Point2::new(-(lt * q(1, 2, 1, 2)), lt * q(1, 1, 1, 1) * &half),
        ),
        Family::E => (
            Mat2::new(-&half, (&half + &two_k) * s3(), (&half - &two_k) * s3(), half.clone()),
            Point2::new(lt * q(1, 2, -1, 2), lt * q(1, 2, 1, 2)),
        ),
        Family::F => (
            Mat2::new(QScalar::one(), &two_k * s3(), -(&two_k * s3()), -QScalar::one()),
            Point2::new(-(lt * &half), lt * s3() * &half),
        ),
    }
}

/// Well carried by each family: `E₁ ← F, B`, `E₂ ← E, C`, `E₃ ← A, D`.
pub fn well_of(family: Family) -> u8 {
    match family {
        Family::B | Family::F => 1,
        Family::C | Family::E => 2,
        Family::A | Family::D => 3,
    }
}

impl DisplacementField {
    pub fn new(params: TilingParams, eps: QScalar) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
        }
        Ok(DisplacementField {
            geo: Geometry::new(&params),
            geo_f: Geometry::new(&params),
            params,
            eps,
            rigid: None,
            float_pieces: OnceLock::new(),
        })
    }

    /// Same field plus a rigid motion; `z = 0` gives the field back unchanged.
    pub fn with_rigid_motion(&self, z: RigidMotion) -> Self {
        let mut f = self.clone();
        f.rigid = if z.is_zero() { None } else { Some(z) };
        f
    }

    pub fn params(&self) -> &TilingParams {
        &self.params
    }

    pub fn eps(&self) -> &QScalar {
        &self.eps
    }

    pub fn rigid(&self) -> Option<&RigidMotion> {
        self.rigid.as_ref()
    }

    pub fn geometry(&self) -> &Geometry<QScalar> {
        &self.geo
    }

    pub fn geometry_f64(&self) -> &Geometry<f64> {
        &self.geo_f
    }

    /// `ε·v_{o,k}`.
    fn generation_offset(&self, k: u32) -> Point2<QScalar> {
        let ls = &self.params.l * offset_sum(k);
        Point2::new(&ls * (s3() - QScalar::int(2)), ls).scale(&self.eps)
    }

    fn add_rigid(&self, mut piece: AffinePiece<QScalar>) -> AffinePiece<QScalar> {
        if let Some(z) = &self.rigid {
            piece.gradient = piece.gradient + z.skew();
            piece.offset = piece.offset + z.translation();
        }
        piece
    }

    fn rigid_at(&self, p: &Point2<QScalar>) -> Point2<QScalar> {
        match &self.rigid {
            Some(z) => z.skew().apply(p) + z.translation(),
            None => Point2::zero(),
        }
    }

    /// The affine map of the field on `ω_{X_k}`.
    pub fn piece(&self, id: RegionId) -> AffinePiece<QScalar> {
        let lt = &self.params.l * t_power(2 * id.k);
        let (g, c) = v_piece(id.family, id.k, &lt);
        let piece = AffinePiece {
            gradient: g.scale(&self.eps),
            offset: c.scale(&self.eps) + self.generation_offset(id.k),
        };
        self.add_rigid(piece)
    }

    pub fn piece_f64(&self, id: RegionId) -> AffinePiece<f64> {
        if id.k < FLOAT_CACHE {
            let cache = self.float_pieces.get_or_init(|| {
                (0..FLOAT_CACHE).map(|k| Family::ALL.map(|f| self.piece(RegionId::new(f, k)).to_f64())).collect()
            });
            return cache[id.k as usize][id.family.index()].clone();
        }
        self.piece(id).to_f64()
    }

    /// `∇u` on a region with its well/skew decomposition.
    pub fn grad_u(&self, id: RegionId) -> GradientParts {
        let well = well_of(id.family);
        let e = wells(&self.eps)[well as usize - 1].clone();
        let wk = QScalar::int(2 * id.k as i64) * s3() * &self.eps;
        let w_k = Mat2::new(QScalar::zero(), wk.clone(), -wk, QScalar::zero());
        let w_tilde = matches!(id.family, Family::B | Family::C | Family::D).then(|| {
            let w = s3() * &self.eps;
            Mat2::new(QScalar::zero(), -&w, w, QScalar::zero())
        });
        let rigid = self.rigid.as_ref().map(RigidMotion::skew);
        let mut h = e + w_k.clone();
        if let Some(w) = &w_tilde {
            h = h + w.clone();
        }
        if let Some(r) = &rigid {
            h = h + r.clone();
        }
        GradientParts { h, well, w_k, w_tilde, rigid }
    }

    /// `εL(√3 − 2, 1)/(1 − t²)`, plus the rigid translation if any.
    pub fn origin_value(&self) -> Point2<QScalar> {
        let c = &self.eps * &self.params.l / (QScalar::one() - t_power(2));
        Point2::new(&c * (s3() - QScalar::int(2)), c) + self.rigid_at(&Point2::zero())
    }

    /// Field value at an exact point of the closed disk.
    pub fn eval_u(&self, p: &Point2<QScalar>) -> Result<Point2<QScalar>> {
        let id = match self.geo.locate(p) {
            Location::Origin => return Ok(self.origin_value()),
            Location::OutsideDisk => return Err(Error::OutsideDisk(p.x.to_f64(), p.y.to_f64())),
            Location::Region(id) | Location::Boundary(id) => id,
            Location::OnInterface(i) => i.plus().min(i.minus()),
        };
        Ok(self.piece(id).eval(p))
    }

    /// Region used for a float point: the located region, or, for points
    /// that rounding puts on a line, the region with the largest margin.
    pub fn region_f64(&self, p: &Point2<f64>) -> Result<Option<RegionId>> {
        let r2 = *self.geo_f.radius_sq();
        let n2 = p.norm2();
        if n2.is_nan() || n2 > r2 * (1.0 + 1e-12) {
            return Err(Error::OutsideDisk(p.x, p.y));
        }
        match self.geo_f.locate(p) {
            Location::Origin => Ok(None),
            Location::Region(id) | Location::Boundary(id) => Ok(Some(id)),
            Location::OnInterface(i) => Ok(Some(i.plus().min(i.minus()))),
            Location::OutsideDisk => Ok(Some(self.best_margin_region(p))),
        }
    }

    fn best_margin_region(&self, p: &Point2<f64>) -> RegionId {
        let l = self.params.l.to_f64();
        let reach = 0.5 + 3f64.sqrt() / 3.0;
        let m = p.x.abs().max(p.y.abs()).max(f64::MIN_POSITIVE);
        let t2 = t_power(2).to_f64();
        let kb = ((m / (l * reach)).ln() / t2.ln()).floor().max(0.0) as u32;
        let mut best = (f64::NEG_INFINITY, RegionId::new(Family::A, 0));
        for k in kb.saturating_sub(2)..=kb + 2 {
            for f in Family::ALL {
                let id = RegionId::new(f, k);
                let margin = self
                    .geo_f
                    .region_constraints(id)
                    .into_iter()
                    .map(|(iface, positive)| {
                        let v = self.geo_f.interface(iface).side(p);
                        if positive {
                            v
                        } else {
                            -v
                        }
                    })
                    .fold(f64::INFINITY, f64::min);
                if margin > best.0 {
                    best = (margin, id);
                }
            }
        }
        best.1
    }

    /// Field value at a float point of the closed disk.
    pub fn eval_u_f64(&self, p: &Point2<f64>) -> Result<Point2<f64>> {
        Ok(match self.region_f64(p)? {
            None => self.origin_value().to_f64(),
            Some(id) => self.piece_f64(id).eval(p),
        })
    }

    /// Closed-form value at `A_k`, `B_k` or `C_k`.
    pub fn vertex_value(&self, family: Family, k: u32) -> Result<Point2<QScalar>> {
        let kq = QScalar::int(k as i64);
        let lt = &self.params.l * t_power(2 * k);
        let ls = &self.params.l * offset_sum(k);
        let (cx, cy) = match family {
            Family::A => (q(-1, 2, -1, 3) + &kq * q(2, 1, 1, 1), q(1, 1, 1, 6) - &kq),
            Family::B => (&kq * q(-1, 1, 1, 1) + q(1, 2, -1, 3), &kq * q(-1, 1, 1, 1) + q(1, 1, 1, 6)),
            Family::C => (&kq * q(2, 1, -1, 1) + q(-1, 2, 1, 6), q(1, 2, 1, 6) - &kq),
            _ => {
                return Err(Error::InvalidParameter(format!("no closed-form vertex value for {family}")));
            }
        };
        let v = Point2::new(&lt * cx + &ls * (s3() - QScalar::int(2)), &lt * cy + ls).scale(&self.eps);
        let vertex = self.geo.vertex(family, k);
        Ok(v + self.rigid_at(&vertex))
    }

    /// Both one-sided values at `(1 − s)P₀ + sP₁` on an interface, and the
    /// closed-form trace.
    pub fn interface_trace(&self, id: InterfaceId, s: &QScalar) -> Trace {
        let seg = self.geo.interface(id);
        let point = seg.point_at(s);
        let right = self.piece(id.plus()).eval(&point);
        let left = self.piece(id.minus()).eval(&point);
        let lt = &self.params.l * t_power(2 * id.k);
        let printed = printed_trace(id.kind, id.k, &point, &lt).scale(&self.eps)
            + self.generation_offset(id.k)
            + self.rigid_at(&point);
        Trace { point, left, right, printed }
    }
}

/// The one-sided limits as written out per interface family (without `ε`
/// and without the generation offset).
fn printed_trace(kind: InterfaceKind, k: u32, p: &Point2<QScalar>, lt: &QScalar) -> Point2<QScalar> {
    use InterfaceKind::*;
    let k = QScalar::int(k as i64);
    let (x, y) = (&p.x, &p.y);
    let i = QScalar::int;
    let r3 = s3();
    let inv_r3 = q(0, 1, 1, 3);
    match kind {
        BA => Point2::new(
            i(-2) * x + i(6) * &k * x + lt * (i(2) * &k - QScalar::frac(1, 2)),
            i(-2) * &r3 * &k * x + lt * q(0, 1, 1, 6) + lt,
        ),
        EB => Point2::new(
            i(2) * &k * x + lt * i(2) * &k * &inv_r3 + lt * q(0, 1, 1, 6) * (&r3 - i(2)),
            i(2) * &inv_r3 * x - i(2) * &k * &r3 * x + lt * &r3 * QScalar::frac(1, 2) + QScalar::frac(2, 3) * lt,
        ),
        ED => Point2::new(
            -(x * QScalar::frac(1, 2)) - lt * &k - lt * q(-1, 4, 1, 2),
            q(0, 1, 1, 2) * x - i(2) * &k * &r3 * x - lt * q(0, 1, 1, 12) + lt * q(1, 2, 1, 2),
        ),
        DF => Point2::new(
            x - i(2) * &k * x - &inv_r3 * lt * i(2) * &k - lt * QScalar::frac(1, 2),
            &inv_r3 * x - i(2) * &k * &r3 * x + lt * QScalar::frac(1, 3) + lt * q(0, 1, 1, 2),
        ),
        CF => Point2::new(
            x - i(6) * &k * x - lt * QScalar::frac(1, 2) + i(2) * &k * lt,
            i(-2) * &k * &r3 * x + &r3 * x + lt * q(0, 1, 1, 6),
        ),
        CA => Point2::new(
            -(lt * q(0, 1, 1, 12)) + i(2) * &k * &r3 * y - q(0, 1, 1, 2) * y,
            -(&k * lt) + y * QScalar::frac(1, 2) + QScalar::frac(3, 4) * lt,
        ),
        BANext => Point2::new(
            i(-2) * &k * x + i(2) * &k * lt * (i(2) * &inv_r3 - i(1)) + lt * q(1, 2, -1, 3),
            i(-2) * &inv_r3 * x - i(2) * &r3 * &k * x + lt * q(4, 3, -1, 6),
        ),
        BENext => Point2::new(
            i(-2) * x - i(6) * &k * x + lt * (QScalar::frac(-1, 2) - i(4) * &k + i(2) * &k * &r3),
            i(-2) * &k * x * &r3 + lt * q(1, 1, 1, 6),
        ),
        DENext => Point2::new(
            &r3 * (QScalar::frac(1, 2) + i(2) * &k) * y + lt * q(1, 4, -1, 3),
            y * QScalar::frac(1, 2) + lt * (i(2) * &k - &k * &r3 + q(0, 1, 3, 4)),
        ),
        DFNext => Point2::new(
            x + i(6) * &k * x - lt * QScalar::frac(1, 2) + i(2) * &k * &r3 * lt - i(4) * &k * lt,
            x * (-&r3 - i(2) * &k * &r3) + lt * q(-1, 1, 7, 6),
        ),
        FCNext => Point2::new(
            x * (i(1) + i(2) * &k) + lt * (i(2) * &k - i(4) * &k * &inv_r3 - QScalar::frac(1, 2)),
            x * (i(-2) * &k * &r3 - &inv_r3) + lt * q(2, 3, 1, 6),
        ),
        ACNext => Point2::new(
            -(x * QScalar::frac(1, 2)) + lt * (q(-1, 2, 1, 4) + i(2) * &k - &r3 * &k),
            -(q(0, 1, 1, 2) * x) - i(2) * &k * &r3 * x + lt * q(3, 4, 1, 6),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::InterfaceKind;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qs(s: &str) -> QScalar {
        s.parse().unwrap()
    }

    fn unit_field() -> DisplacementField {
        DisplacementField::new(TilingParams::unit(), QScalar::one()).unwrap()
    }

    fn field(eps: &str) -> DisplacementField {
        DisplacementField::new(TilingParams::unit(), qs(eps)).unwrap()
    }

    #[test]
    fn generation_zero_pieces() {
        let f = field("39/250");
        let e = qs("39/250");
        let a = f.piece(RegionId::new(Family::A, 0));
        assert_eq!(a.gradient, Mat2::new(qs("-1/2"), qs("-1/2√3"), qs("-1/2√3"), qs("1/2")).scale(&e));
        assert_eq!(a.offset, Point2::new(QScalar::zero(), e.clone()));
        let fp = f.piece(RegionId::new(Family::F, 0));
        assert_eq!(fp.gradient, Mat2::new(qs("1"), qs("0"), qs("0"), qs("-1")).scale(&e));
        assert_eq!(fp.offset, Point2::new(qs("-1/2"), qs("1/2√3")).scale(&e));
    }

    #[test]
    fn offsets_use_the_closed_form_sum() {
        let t2 = t_power(2);
        assert_eq!(offset_sum(0), QScalar::zero());
        assert_eq!(offset_sum(2), QScalar::one() + &t2);
        let mut acc = QScalar::zero();
        for k in 1..=12u32 {
            acc += &t_power(2 * k - 2);
            assert_eq!(offset_sum(k), acc);
        }
        let f = unit_field();
        let b2 = f.piece(RegionId::new(Family::B, 2));
        let (_, c) = v_piece(Family::B, 2, &t_power(4));
        assert_eq!(b2.offset.x - c.x, (s3() - QScalar::int(2)) * (QScalar::one() + t2));
    }

    #[test]
    fn piece_gradients_match_the_gradient_table() {
        let f = field("1/7");
        for k in 0..=8 {
            for fam in Family::ALL {
                let id = RegionId::new(fam, k);
                let g = f.grad_u(id);
                assert_eq!(f.piece(id).gradient, g.h, "{id}");
                assert_eq!(g.h.sym(), wells(f.eps())[g.well as usize - 1], "{id}");
            }
        }
        let e = qs("1/7");
        assert_eq!(f.grad_u(RegionId::new(Family::B, 0)).h, Mat2::new(qs("1"), qs("-√3"), qs("√3"), qs("-1")).scale(&e));
        assert_eq!(f.grad_u(RegionId::new(Family::B, 1)).h, Mat2::new(qs("1"), qs("√3"), qs("-√3"), qs("-1")).scale(&e));
    }

    #[test]
    fn origin_value() {
        let f = unit_field();
        let o = f.origin_value();
        assert_eq!(o, Point2::new((s3() - QScalar::int(2)) / qs("-6+4√3"), QScalar::one() / qs("-6+4√3")));
        assert!((o.x.to_f64() + 0.2886751).abs() < 1e-7);
        assert!((o.y.to_f64() - 1.0773503).abs() < 1e-7);
        assert_eq!(f.eval_u(&Point2::zero()).unwrap(), o);
        let double = DisplacementField::new(TilingParams::new(QScalar::int(2), 8).unwrap(), QScalar::one()).unwrap();
        assert_eq!(double.origin_value(), o.scale(&QScalar::int(2)));
        let moved = f.with_rigid_motion(RigidMotion::new(qs("5"), qs("1/3"), qs("√3")));
        assert_eq!(moved.origin_value(), o + Point2::new(qs("1/3"), qs("√3")));
    }

    #[test]
    fn value_at_a0() {
        let f = unit_field();
        let a = f.geometry().vertex(Family::A, 0);
        let v = f.eval_u(&a).unwrap();
        assert_eq!(v, Point2::new(qs("-1/2-1/3√3"), qs("1+1/6√3")));
        assert!((v.x.to_f64() + 1.077350).abs() < 1e-6);
        assert!((v.y.to_f64() - 1.288675).abs() < 1e-6);
    }

    #[test]
    fn vertex_values_match_the_pieces() {
        let f = field("3/19");
        for k in 0..=10u32 {
            let a = RegionId::new(Family::A, k);
            for fam in [Family::A, Family::B, Family::C] {
                let vx = f.geometry().vertex(fam, k);
                let closed = f.vertex_value(fam, k).unwrap();
                assert_eq!(closed, f.piece(a).eval(&vx), "{fam}{k}");
                assert_eq!(closed, f.eval_u(&vx).unwrap(), "{fam}{k}");
            }
        }
        let e = qs("3/19");
        let t2 = t_power(2);
        let b1 = Point2::new(&t2 * qs("-1+√3+1/2-1/3√3") + qs("-2+√3"), &t2 * qs("-1+√3+1+1/6√3") + QScalar::one());
        assert_eq!(f.vertex_value(Family::B, 1).unwrap(), b1.scale(&e));
        assert!(f.vertex_value(Family::D, 0).is_err());
    }

    #[test]
    fn vertex_values_converge_to_the_origin_value() {
        let f = unit_field();
        let o = f.origin_value();
        for k in 1..=30u32 {
            let bound = 4.0 * k as f64 * t_power(2 * k).to_f64();
            for fam in [Family::A, Family::B, Family::C] {
                let d = (f.vertex_value(fam, k).unwrap() - o.clone()).to_f64();
                assert!(d.x.abs() <= bound && d.y.abs() <= bound, "{fam}{k}");
            }
        }
    }

    #[test]
    fn every_interface_trace_is_continuous_and_matches_the_closed_form() {
        let f = field("2/13").with_rigid_motion(RigidMotion::new(qs("3/2√3"), qs("0"), qs("0")));
        let ss = ["0", "1/4", "1/2", "3/4", "1"].map(qs);
        for id in InterfaceId::all_up_to(6) {
            for s in &ss {
                let tr = f.interface_trace(id, s);
                assert_eq!(tr.left, tr.right, "{id} at {s}");
                assert_eq!(tr.right, tr.printed, "{id} at {s}");
            }
        }
    }

    #[test]
    fn trace_examples() {
        let f = unit_field();
        let mid = f.interface_trace(InterfaceId::new(InterfaceKind::BA, 0), &qs("1/2"));
        assert!(mid.is_consistent());
        assert_eq!(f.eval_u(&mid.point).unwrap(), mid.left);
        let at_b0 = f.interface_trace(InterfaceId::new(InterfaceKind::BANext, 0), &QScalar::zero());
        assert_eq!(at_b0.printed, f.vertex_value(Family::B, 0).unwrap());
        let ed3 = f.interface_trace(InterfaceId::new(InterfaceKind::ED, 3), &qs("1/3"));
        assert!(ed3.is_consistent());
    }

    #[test]
    fn boundary_triple_points() {
        let f = field("5/31");
        let g = f.geometry();
        let at = |fam, p: &Point2<QScalar>| f.piece(RegionId::new(fam, 0)).eval(p);
        let (a, e, fv) = (g.vertex(Family::A, 0), g.vertex(Family::E, 0), g.vertex(Family::F, 0));
        assert_eq!(at(Family::A, &a), at(Family::B, &a));
        assert_eq!(at(Family::B, &a), at(Family::C, &a));
        assert_eq!(at(Family::C, &fv), at(Family::F, &fv));
        assert_eq!(at(Family::F, &fv), at(Family::D, &fv));
        assert_eq!(at(Family::D, &e), at(Family::E, &e));
        assert_eq!(at(Family::E, &e), at(Family::B, &e));
    }

    #[test]
    fn values_on_omega_k_lie_between_vertex_extrema() {
        let f = unit_field();
        let g = f.geometry();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..=5u32 {
            let ids: Vec<RegionId> = Family::ALL
                .iter()
                .map(|&fam| RegionId::new(fam, k))
                .filter(|id| !id.is_clipped())
                .collect();
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for id in &ids {
                for v in g.region_polygon(*id) {
                    let u = f.piece(*id).eval(&v).to_f64();
                    lo = [lo[0].min(u.x), lo[1].min(u.y)];
                    hi = [hi[0].max(u.x), hi[1].max(u.y)];
                }
            }
            for id in &ids {
                let poly: Vec<Point2<f64>> = g.region_polygon(*id).iter().map(|p| p.to_f64()).collect();
                for _ in 0..50 {
                    let mut w: Vec<f64> = (0..poly.len()).map(|_| rng.gen::<f64>()).collect();
                    let sum: f64 = w.iter().sum();
                    w.iter_mut().for_each(|x| *x /= sum);
                    let p = poly.iter().zip(&w).fold(Point2::new(0.0, 0.0), |acc, (v, wi)| acc + v.scale(wi));
                    let u = f.eval_u_f64(&p).unwrap();
                    let tol = 1e-12;
                    assert!(u.x >= lo[0] - tol && u.x <= hi[0] + tol, "{id}");
                    assert!(u.y >= lo[1] - tol && u.y <= hi[1] + tol, "{id}");
                }
            }
        }
    }

    #[test]
    fn finite_differences_recover_the_gradient() {
        let f = field("1/5");
        let g = f.geometry();
        for k in 0..=4u32 {
            for fam in Family::ALL {
                let id = RegionId::new(fam, k);
                let poly = g.region_polygon(id);
                let n = QScalar::int(poly.len() as i64);
                let mut c = Point2::zero();
                for v in &poly {
                    c = c + v.clone();
                }
                let c = c.scale(&(QScalar::one() / n)).to_f64();
                let h = 1e-7 * t_power(2 * k).to_f64();
                let ux = (f.eval_u_f64(&Point2::new(c.x + h, c.y)).unwrap() - f.eval_u_f64(&Point2::new(c.x - h, c.y)).unwrap())
                    .scale(&(0.5 / h));
                let uy = (f.eval_u_f64(&Point2::new(c.x, c.y + h)).unwrap() - f.eval_u_f64(&Point2::new(c.x, c.y - h)).unwrap())
                    .scale(&(0.5 / h));
                let hm = f.grad_u(id).h.to_f64();
                let scale = 1.0 + k as f64;
                assert!((ux.x - hm.get(0, 0)).abs() < 1e-6 * scale, "{id}");
                assert!((ux.y - hm.get(1, 0)).abs() < 1e-6 * scale, "{id}");
                assert!((uy.x - hm.get(0, 1)).abs() < 1e-6 * scale, "{id}");
                assert!((uy.y - hm.get(1, 1)).abs() < 1e-6 * scale, "{id}");
            }
        }
    }

    #[test]
    fn outside_the_disk_is_an_error() {
        let f = unit_field();
        assert!(matches!(f.eval_u(&Point2::new(QScalar::int(2), QScalar::zero())), Err(Error::OutsideDisk(..))));
        assert!(f.eval_u_f64(&Point2::new(0.0, 1.2)).is_err());
        assert!(DisplacementField::new(TilingParams::unit(), QScalar::zero()).is_err());
    }

    #[test]
    fn rigid_motion_parsing() {
        let z = RigidMotion::parse("3/2√3, 0, 0").unwrap();
        assert_eq!(z.z1, qs("3/2√3"));
        assert!(RigidMotion::parse("1,2").is_err());
        let f = unit_field();
        assert!(f.with_rigid_motion(RigidMotion::parse("0,0,0").unwrap()).rigid().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn rigid_motion_keeps_symmetric_gradients(z1 in -5i64..5, z2 in -5i64..5, z3 in -5i64..5, zb in -5i64..5) {
            let f = field("1/6");
            let z = RigidMotion::new(QScalar::from_parts(z1, 3, zb, 2), QScalar::int(z2), QScalar::int(z3));
            let moved = f.with_rigid_motion(z);
            for k in 0..=6u32 {
                for fam in Family::ALL {
                    let id = RegionId::new(fam, k);
                    prop_assert_eq!(moved.grad_u(id).h.sym(), f.grad_u(id).h.sym());
                    prop_assert_eq!(moved.piece(id).gradient.sym(), f.piece(id).gradient.sym());
                }
            }
        }

        #[test]
        fn float_and_exact_evaluation_agree(x in -0.9f64..0.9, y in -0.9f64..0.9) {
            let f = field("1/6");
            let p = Point2::new(x, y);
            prop_assume!(p.norm2() < f.params().radius_sq().to_f64());
            let exact = f.eval_u(&Point2::<QScalar>::from_f64(p).unwrap()).unwrap().to_f64();
            let float = f.eval_u_f64(&p).unwrap();
            prop_assert!((exact - float).norm() < 1e-12);
        }
    }
}
