//! The nested kite tiling of the disk `Ω = B_R(0)` with `R² = L²(2/3 + 1/√3)`.
//!
//! Generation `k` consists of six open regions `A_k … F_k`, each a copy of
//! generation zero scaled by `t^(2k)`, `t = 2 − √3`. Regions are described
//! by the strict inequality sets of their bounding lines, so every point off
//! the interfaces belongs to exactly one region and the classification is
//! exact in the `QScalar` backend.

use std::fmt;

use serde::Serialize;

use crate::clip;
use crate::exactnum::{t_power, QScalar, Scalar};
use crate::linalg::{Mat2, Point2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::A, Family::B, Family::C, Family::D, Family::E, Family::F];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Vertex of generation zero at `L = 1`.
    pub fn base_vertex(self) -> Point2<QScalar> {
        let q = QScalar::from_parts;
        match self {
            Family::A => Point2::new(q(0, 1, 1, 6), q(1, 2, 1, 3)),
            Family::B => Point2::new(q(-1, 2, 1, 6), q(1, 2, -1, 6)),
            Family::C => Point2::new(q(0, 1, 1, 6), q(-1, 2, 1, 3)),
            Family::D => Point2::new(q(1, 2, -1, 3), q(0, 1, -1, 6)),
            Family::E => Point2::new(q(-1, 2, -1, 3), q(0, 1, -1, 6)),
            Family::F => Point2::new(q(1, 2, 1, 6), q(-1, 2, -1, 6)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for Family {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            "F" => Ok(Family::F),
            _ => Err(crate::Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// One tile `ω_{X_k}`. Ordered by family first, then generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RegionId {
    pub family: Family,
    pub k: u32,
}

impl RegionId {
    pub const fn new(family: Family, k: u32) -> Self {
        RegionId { family, k }
    }

    /// `B_0`, `C_0` and `D_0` reach the circle; everything else is a kite.
    pub fn is_clipped(&self) -> bool {
        self.k == 0 && matches!(self.family, Family::B | Family::C | Family::D)
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.k)
    }
}

/// The twelve families of interface segments. The first six lie inside a
/// generation, the last six (`*Next`) join generation `k` to `k + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum InterfaceKind {
    BA,
    CA,
    CF,
    DF,
    ED,
    EB,
    BANext,
    ACNext,
    FCNext,
    DFNext,
    DENext,
    BENext,
}

impl InterfaceKind {
    pub const ALL: [InterfaceKind; 12] = [
        InterfaceKind::BA,
        InterfaceKind::CA,
        InterfaceKind::CF,
        InterfaceKind::DF,
        InterfaceKind::ED,
        InterfaceKind::EB,
        InterfaceKind::BANext,
        InterfaceKind::ACNext,
        InterfaceKind::FCNext,
        InterfaceKind::DFNext,
        InterfaceKind::DENext,
        InterfaceKind::BENext,
    ];

    pub fn is_cross_generation(self) -> bool {
        self as usize >= 6
    }

    pub fn name(self) -> &'static str {
        match self {
            InterfaceKind::BA => "BA",
            InterfaceKind::CA => "CA",
            InterfaceKind::CF => "CF",
            InterfaceKind::DF => "DF",
            InterfaceKind::ED => "ED",
            InterfaceKind::EB => "EB",
            InterfaceKind::BANext => "BA+",
            InterfaceKind::ACNext => "AC+",
            InterfaceKind::FCNext => "FC+",
            InterfaceKind::DFNext => "DF+",
            InterfaceKind::DENext => "DE+",
            InterfaceKind::BENext => "BE+",
        }
    }

    /// Line at `L = 1, k = 0`: either `y = slope·x + c` or `x = c`.
    fn base_line(self) -> LineShape<QScalar> {
        let q = QScalar::from_parts;
        use InterfaceKind::*;
        match self {
            BA => LineShape::YOfX { slope: q(0, 1, 1, 1), intercept: q(0, 1, 1, 3) },
            CA => LineShape::XOfY { value: q(0, 1, 1, 6) },
            CF => LineShape::YOfX { slope: q(0, 1, -1, 1), intercept: q(0, 1, 1, 3) },
            DF => LineShape::YOfX { slope: q(0, 1, -1, 3), intercept: q(-1, 3, 0, 1) },
            ED => LineShape::YOfX { slope: q(0, 1, 0, 1), intercept: q(0, 1, -1, 6) },
            EB => LineShape::YOfX { slope: q(0, 1, 1, 3), intercept: q(1, 3, 0, 1) },
            BANext => LineShape::YOfX { slope: q(0, 1, -1, 3), intercept: q(2, 3, -1, 3) },
            ACNext => LineShape::YOfX { slope: q(0, 1, 0, 1), intercept: q(-1, 2, 1, 3) },
            FCNext => LineShape::YOfX { slope: q(0, 1, 1, 3), intercept: q(-2, 3, 1, 3) },
            DFNext => LineShape::YOfX { slope: q(0, 1, 1, 1), intercept: q(1, 1, -2, 3) },
            DENext => LineShape::XOfY { value: q(1, 2, -1, 3) },
            BENext => LineShape::YOfX { slope: q(0, 1, -1, 1), intercept: q(1, 1, -2, 3) },
        }
    }

    /// Endpoints as (family, generation offset).
    pub fn endpoints(self) -> [(Family, u32); 2] {
        use Family::*;
        use InterfaceKind::*;
        match self {
            BA => [(B, 0), (A, 0)],
            CA => [(C, 0), (A, 0)],
            CF => [(C, 0), (F, 0)],
            DF => [(D, 0), (F, 0)],
            ED => [(E, 0), (D, 0)],
            EB => [(E, 0), (B, 0)],
            BANext => [(B, 0), (A, 1)],
            ACNext => [(A, 1), (C, 0)],
            FCNext => [(F, 1), (C, 0)],
            DFNext => [(D, 0), (F, 1)],
            DENext => [(D, 0), (E, 1)],
            BENext => [(B, 0), (E, 1)],
        }
    }

    /// Regions on the side the normal points into (`+`) and away from (`−`),
    /// as (family, generation offset).
    pub fn sides(self) -> [(Family, u32); 2] {
        use Family::*;
        use InterfaceKind::*;
        match self {
            BA => [(B, 0), (A, 0)],
            CA => [(C, 0), (A, 0)],
            CF => [(C, 0), (F, 0)],
            DF => [(F, 0), (D, 0)],
            ED => [(E, 0), (D, 0)],
            EB => [(B, 0), (E, 0)],
            BANext => [(A, 0), (B, 1)],
            ACNext => [(A, 0), (C, 1)],
            FCNext => [(C, 1), (F, 0)],
            DFNext => [(D, 1), (F, 0)],
            DENext => [(D, 1), (E, 0)],
            BENext => [(B, 1), (E, 0)],
        }
    }
}

impl fmt::Display for InterfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for InterfaceKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        InterfaceKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| crate::Error::Parse(format!("unknown interface family {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InterfaceId {
    pub kind: InterfaceKind,
    pub k: u32,
}

impl InterfaceId {
    pub const fn new(kind: InterfaceKind, k: u32) -> Self {
        InterfaceId { kind, k }
    }

    pub fn plus(&self) -> RegionId {
        let (f, dk) = self.kind.sides()[0];
        RegionId::new(f, self.k + dk)
    }

    pub fn minus(&self) -> RegionId {
        let (f, dk) = self.kind.sides()[1];
        RegionId::new(f, self.k + dk)
    }

    /// All interfaces up to and including generation `kmax`.
    pub fn all_up_to(kmax: u32) -> impl Iterator<Item = InterfaceId> {
        (0..=kmax).flat_map(|k| InterfaceKind::ALL.into_iter().map(move |kind| InterfaceId::new(kind, k)))
    }
}

impl fmt::Display for InterfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.kind, self.k)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum LineShape<S> {
    YOfX { slope: S, intercept: S },
    XOfY { value: S },
}

/// An interface line, its segment, and its unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSegment<S> {
    pub id: InterfaceId,
    pub p0: Point2<S>,
    pub p1: Point2<S>,
    pub normal: Point2<S>,
    shape: LineShape<S>,
}

impl<S: Scalar> LineSegment<S> {
    /// `y − g(x)` or `x − g(y)`; positive on the side the normal points to.
    pub fn side(&self, p: &Point2<S>) -> S {
        match &self.shape {
            LineShape::YOfX { slope, intercept } => p.y.clone() - (slope.clone() * p.x.clone() + intercept.clone()),
            LineShape::XOfY { value } => p.x.clone() - value.clone(),
        }
    }

    /// `Some((slope, intercept))` for `y = slope·x + intercept`, `None` for a vertical line.
    pub fn slope_intercept(&self) -> Option<(S, S)> {
        match &self.shape {
            LineShape::YOfX { slope, intercept } => Some((slope.clone(), intercept.clone())),
            LineShape::XOfY { .. } => None,
        }
    }

    /// Closed-segment incidence.
    pub fn contains(&self, p: &Point2<S>) -> bool {
        if self.side(p) != S::zero() {
            return false;
        }
        let d = self.p1.clone() - self.p0.clone();
        let from0 = (p.clone() - self.p0.clone()).dot(&d);
        let from1 = (self.p1.clone() - p.clone()).dot(&d);
        from0 >= S::zero() && from1 >= S::zero()
    }

    pub fn point_at(&self, s: &S) -> Point2<S> {
        self.p0.lerp(&self.p1, s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingParams {
    /// Characteristic length `L > 0`.
    pub l: QScalar,
    /// Truncation generation for sums and sweeps.
    pub kmax: u32,
}

impl TilingParams {
    pub fn new(l: QScalar, kmax: u32) -> crate::Result<Self> {
        if !l.is_positive() {
            return Err(crate::Error::InvalidParameter(format!("L must be positive, got {l}")));
        }
        Ok(TilingParams { l, kmax })
    }

    pub fn unit() -> Self {
        TilingParams { l: QScalar::one(), kmax: 8 }
    }

    /// `R² = L²(2/3 + 1/√3)`, exact.
    pub fn radius_sq(&self) -> QScalar {
        &self.l * &self.l * QScalar::from_parts(2, 3, 1, 3)
    }

    pub fn disk_area(&self) -> f64 {
        std::f64::consts::PI * self.radius_sq().to_f64()
    }
}

/// Classification of a point of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Location {
    Region(RegionId),
    OnInterface(InterfaceId),
    /// On the circle `|p| = R` inside the closure of a clipped region.
    Boundary(RegionId),
    Origin,
    OutsideDisk,
}

/// The tiling evaluated in one arithmetic backend.
#[derive(Clone, Debug)]
pub struct Geometry<S> {
    params: TilingParams,
    l: S,
    t2: S,
    radius_sq: S,
    base: [Point2<S>; 6],
    lines: Vec<LineShape<S>>,
    normals: Vec<Point2<S>>,
    /// `L·t^(2k)` for small `k`.
    scales: Vec<S>,
    /// Largest of `|x|`, `|y|` over the base vertices (`1/2 + 1/√3`).
    reach: S,
}

const SCALE_CACHE: usize = 48;

impl<S: Scalar> Geometry<S> {
    pub fn new(params: &TilingParams) -> Self {
        let l = S::from_q(&params.l);
        let t2 = S::from_q(&t_power(2));
        let base = Family::ALL.map(|f| {
            let v = f.base_vertex();
            Point2::new(S::from_q(&v.x), S::from_q(&v.y))
        });
        let lines = InterfaceKind::ALL
            .iter()
            .map(|k| match k.base_line() {
                LineShape::YOfX { slope, intercept } => {
                    LineShape::YOfX { slope: S::from_q(&slope), intercept: S::from_q(&intercept) }
                }
                LineShape::XOfY { value } => LineShape::XOfY { value: S::from_q(&value) },
            })
            .collect();
        let normals = InterfaceKind::ALL.iter().map(|k| {
            let n = exact_normal(*k);
            Point2::new(S::from_q(&n.x), S::from_q(&n.y))
        });
        let mut scales = Vec::with_capacity(SCALE_CACHE);
        let mut s = l.clone();
        for _ in 0..SCALE_CACHE {
            scales.push(s.clone());
            s = s * t2.clone();
        }
        Geometry {
            params: params.clone(),
            radius_sq: S::from_q(&params.radius_sq()),
            l,
            t2,
            base,
            lines,
            normals: normals.collect(),
            scales,
            reach: S::from_q(&QScalar::from_parts(1, 2, 1, 3)),
        }
    }

    pub fn params(&self) -> &TilingParams {
        &self.params
    }

    pub fn radius_sq(&self) -> &S {
        &self.radius_sq
    }

    /// `L·t^(2k)`.
    pub fn scale(&self, k: u32) -> S {
        let k = k as usize;
        if k < self.scales.len() {
            return self.scales[k].clone();
        }
        let mut s = self.scales[self.scales.len() - 1].clone();
        for _ in self.scales.len() - 1..k {
            s = s * self.t2.clone();
        }
        s
    }

    /// Vertex `X_k = t^(2k)·X`.
    pub fn vertex(&self, family: Family, k: u32) -> Point2<S> {
        self.base[family.index()].scale(&self.scale(k))
    }

    pub fn interface(&self, id: InterfaceId) -> LineSegment<S> {
        let s = self.scale(id.k);
        let shape = match &self.lines[id.kind as usize] {
            LineShape::YOfX { slope, intercept } => {
                LineShape::YOfX { slope: slope.clone(), intercept: intercept.clone() * s }
            }
            LineShape::XOfY { value } => LineShape::XOfY { value: value.clone() * s },
        };
        let [(f0, d0), (f1, d1)] = id.kind.endpoints();
        LineSegment {
            id,
            p0: self.vertex(f0, id.k + d0),
            p1: self.vertex(f1, id.k + d1),
            normal: self.normals[id.kind as usize].clone(),
            shape,
        }
    }

    /// Bounding interfaces of a region with the required sign of `side()`.
    pub fn region_constraints(&self, id: RegionId) -> Vec<(InterfaceId, bool)> {
        use InterfaceKind::*;
        let k = id.k;
        let here = |kind| InterfaceId::new(kind, k);
        let prev = |kind| InterfaceId::new(kind, k.wrapping_sub(1));
        let mut c = match id.family {
            Family::A => vec![(here(BA), false), (here(CA), false), (here(BANext), true), (here(ACNext), true)],
            Family::B => vec![(here(BA), true), (here(EB), true)],
            Family::C => vec![(here(CF), true), (here(CA), true)],
            Family::D => vec![(here(ED), false), (here(DF), false)],
            Family::E => vec![(here(ED), true), (here(EB), false), (here(BENext), false), (here(DENext), false)],
            Family::F => vec![(here(CF), false), (here(DF), true), (here(FCNext), false), (here(DFNext), false)],
        };
        if k >= 1 {
            match id.family {
                Family::B => c.extend([(prev(BANext), false), (prev(BENext), true)]),
                Family::C => c.extend([(prev(ACNext), false), (prev(FCNext), true)]),
                Family::D => c.extend([(prev(DENext), true), (prev(DFNext), true)]),
                _ => {}
            }
        }
        c
    }

    fn satisfies(&self, p: &Point2<S>, id: RegionId) -> bool {
        self.region_constraints(id).into_iter().all(|(iface, positive)| {
            let v = self.interface(iface).side(p);
            if positive {
                v > S::zero()
            } else {
                v < S::zero()
            }
        })
    }

    /// Membership in the open region (strict inequalities, inside the open disk).
    pub fn region_contains(&self, p: &Point2<S>, id: RegionId) -> bool {
        p.norm2() < self.radius_sq && self.satisfies(p, id)
    }

    /// Kite vertices in counter-clockwise order; for the clipped regions the
    /// wedge apex followed by its two arm endpoints on the circle.
    pub fn region_polygon(&self, id: RegionId) -> Vec<Point2<S>> {
        use Family::*;
        let k = id.k;
        let v = |f, k| self.vertex(f, k);
        match (id.family, k) {
            (A, _) => vec![v(A, k), v(B, k), v(A, k + 1), v(C, k)],
            (E, _) => vec![v(E, k), v(D, k), v(E, k + 1), v(B, k)],
            (F, _) => vec![v(F, k), v(C, k), v(F, k + 1), v(D, k)],
            (B, 0) => vec![v(B, 0), v(A, 0), v(E, 0)],
            (C, 0) => vec![v(C, 0), v(F, 0), v(A, 0)],
            (D, 0) => vec![v(D, 0), v(E, 0), v(F, 0)],
            (B, _) => vec![v(B, k - 1), v(E, k), v(B, k), v(A, k)],
            (C, _) => vec![v(C, k - 1), v(A, k), v(C, k), v(F, k)],
            (D, _) => vec![v(D, k - 1), v(F, k), v(D, k), v(E, k)],
        }
    }

    /// Exact point classification.
    pub fn locate(&self, p: &Point2<S>) -> Location {
        if p.x == S::zero() && p.y == S::zero() {
            return Location::Origin;
        }
        let r2 = p.norm2();
        if r2 > self.radius_sq {
            return Location::OutsideDisk;
        }
        let on_circle = r2 == self.radius_sq;
        let k = self.generation_bracket(p);
        let lo = k.saturating_sub(2);
        let hi = k + 2;
        if let Some(loc) = self.scan(p, lo, hi, on_circle) {
            return loc;
        }
        // the bracket is sound, but a full scan costs nothing compared to a wrong answer
        self.scan(p, 0, hi + 2, on_circle).unwrap_or(Location::OutsideDisk)
    }

    fn scan(&self, p: &Point2<S>, lo: u32, hi: u32, on_circle: bool) -> Option<Location> {
        for k in lo..=hi {
            for f in Family::ALL {
                let id = RegionId::new(f, k);
                if self.satisfies(p, id) {
                    return Some(if on_circle { Location::Boundary(id) } else { Location::Region(id) });
                }
            }
        }
        for k in lo.saturating_sub(1)..=hi {
            for kind in InterfaceKind::ALL {
                let id = InterfaceId::new(kind, k);
                if self.interface(id).contains(p) {
                    return Some(Location::OnInterface(id));
                }
            }
        }
        None
    }

    /// Largest `k` with `L·t^(2k)·reach ≥ max(|x|, |y|)`.
    fn generation_bracket(&self, p: &Point2<S>) -> u32 {
        let abs = |v: &S| if *v < S::zero() { -v.clone() } else { v.clone() };
        let (ax, ay) = (abs(&p.x), abs(&p.y));
        let m = if ax > ay { ax } else { ay };
        let mut level = self.reach.clone() * self.l.clone();
        let mut k = 0;
        loop {
            let next = level.clone() * self.t2.clone();
            if next < m || k > 4096 {
                return k;
            }
            level = next;
            k += 1;
        }
    }
}

/// Unit normal of an interface family, exact (`|n| = 1` in Q(√3)).
pub fn exact_normal(kind: InterfaceKind) -> Point2<QScalar> {
    match kind.base_line() {
        LineShape::XOfY { .. } => Point2::new(QScalar::one(), QScalar::zero()),
        LineShape::YOfX { slope, .. } => {
            let len2 = &slope * &slope + QScalar::one();
            let len = len2.sqrt_exact().expect("interface normals have lengths in Q(√3)");
            Point2::new(-slope / &len, QScalar::one() / &len)
        }
    }
}

/// Area of a region: exact for kites, numeric for the three clipped regions.
#[derive(Clone, Debug, PartialEq)]
pub enum Area {
    Exact(QScalar),
    Numeric(f64),
}

impl Area {
    pub fn to_f64(&self) -> f64 {
        match self {
            Area::Exact(q) => q.to_f64(),
            Area::Numeric(v) => *v,
        }
    }
}

impl Geometry<QScalar> {
    /// Shoelace area of a kite, exact.
    pub fn kite_area_shoelace(&self, id: RegionId) -> QScalar {
        let poly = self.region_polygon(id);
        let mut twice = QScalar::zero();
        for i in 0..poly.len() {
            let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
            twice += &(&a.x * &b.y - &b.x * &a.y);
        }
        (twice * QScalar::frac(1, 2)).abs()
    }

    pub fn region_area(&self, id: RegionId) -> Area {
        if id.is_clipped() {
            Area::Numeric(self.clipped_area(id))
        } else {
            Area::Exact(kite_area_closed_form(&self.params.l, id))
        }
    }

    /// Area of a wedge region intersected with the disk, by analytic
    /// circle-polygon clipping.
    pub fn clipped_area(&self, id: RegionId) -> f64 {
        let poly: Vec<Point2<f64>> = self.region_polygon(id).iter().map(|p| p.to_f64()).collect();
        let apex = poly[0];
        let r = self.params.radius_sq().to_f64().sqrt();
        // extend both arms well past the circle so the wedge becomes a triangle
        let reach = 4.0 * r / (poly[1] - apex).norm().min((poly[2] - apex).norm());
        let far = |q: Point2<f64>| apex + (q - apex).scale(&reach);
        clip::disk_polygon_area(&[apex, far(poly[1]), far(poly[2])], r)
    }
}

/// `L²t^(4k+1)` for the `A, E, F` kites and `L²t^(4k−1)` for the `B, C, D`
/// kites (`k ≥ 1`).
pub fn kite_area_closed_form(l: &QScalar, id: RegionId) -> QScalar {
    let l2 = l * l;
    match id.family {
        Family::A | Family::E | Family::F => l2 * t_power(4 * id.k + 1),
        _ => {
            assert!(id.k >= 1, "clipped regions have no closed form");
            l2 * t_power(4 * id.k - 1)
        }
    }
}

/// Clockwise rotation by 2π/3.
pub fn rotate_cw_2pi_3() -> Mat2<QScalar> {
    let c = QScalar::frac(-1, 2);
    let s = QScalar::from_parts(0, 1, 1, 2);
    Mat2::new(c.clone(), s.clone(), -s, c)
}

#[derive(Clone, Debug, Serialize)]
pub struct AreaCheck {
    pub kmax: u32,
    /// `Σ_{k ≤ kmax} ℒ²(ω_k)`.
    pub partial_sum: f64,
    /// Exact geometric tail `Σ_{k > kmax} ℒ²(ω_k)`.
    pub tail: f64,
    pub tail_exact: String,
    pub total: f64,
    pub disk_area: f64,
    pub defect: f64,
    /// Area of all kites together, `(√3/2)L²`.
    pub kite_total: f64,
    pub kite_total_exact: String,
}

/// Area of generations strictly above `kmax`, exact:
/// `3L² t^(4(kmax+1)) (t + 1/t) / (1 − t⁴)`.
pub fn area_tail(l: &QScalar, kmax: u32) -> QScalar {
    let t = t_power(1);
    let l2 = l * l;
    let num = QScalar::int(3) * l2 * t_power(4 * (kmax + 1)) * (&t + QScalar::one() / &t);
    num / (QScalar::one() - t_power(4))
}

/// Total area of every kite, `3t/(1 − t²)·L² = (√3/2)L²`.
pub fn kite_total(l: &QScalar) -> QScalar {
    let t = t_power(1);
    QScalar::int(3) * l * l * &t / (QScalar::one() - t_power(2))
}

pub fn generation_area(geo: &Geometry<QScalar>, k: u32) -> f64 {
    let mut exact = QScalar::zero();
    let mut numeric = 0.0;
    for f in Family::ALL {
        match geo.region_area(RegionId::new(f, k)) {
            Area::Exact(q) => exact += &q,
            Area::Numeric(v) => numeric += v,
        }
    }
    exact.to_f64() + numeric
}

pub fn tiling_area_check(params: &TilingParams) -> AreaCheck {
    let geo = Geometry::<QScalar>::new(params);
    let partial_sum: f64 = (0..=params.kmax).map(|k| generation_area(&geo, k)).sum();
    let tail = area_tail(&params.l, params.kmax);
    let total = partial_sum + tail.to_f64();
    let disk_area = params.disk_area();
    let kites = kite_total(&params.l);
    AreaCheck {
        kmax: params.kmax,
        partial_sum,
        tail: tail.to_f64(),
        tail_exact: tail.to_string(),
        total,
        disk_area,
        defect: (total - disk_area).abs(),
        kite_total: kites.to_f64(),
        kite_total_exact: kites.to_string(),
    }
}
