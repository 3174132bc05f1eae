//! Rank-one (Hadamard) compatibility of gradients across interfaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::QScalar;
use crate::field::DisplacementField;
use crate::geometry::{Family, InterfaceId, RegionId};
use crate::linalg::{Mat2, Point2, SymMat2};

/// `D − W(w) = a ⊗ n` with `W(w) = ε[[0, −w], [w, 0]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpSolution {
    /// Amplitude, including the factor `ε`.
    pub a: Point2<QScalar>,
    /// Unit normal.
    pub n: Point2<QScalar>,
    /// Skew parameter in units of `ε`.
    pub w: QScalar,
}

/// `det(H⁺ − H⁻)`; zero iff the two gradients are rank-one connected.
pub fn rank_one_defect(hp: &Mat2<QScalar>, hm: &Mat2<QScalar>) -> QScalar {
    (hp.clone() - hm.clone()).det()
}

fn skew_w(eps: &QScalar, w: &QScalar) -> Mat2<QScalar> {
    let s = eps * w;
    Mat2::new(QScalar::zero(), -&s, s, QScalar::zero())
}

/// Given the normal, find `w` and `a` with
/// `E⁺ + S⁺ − E⁻ − W(w) = a ⊗ n`.
pub fn solve_jump(
    e_plus: &SymMat2<QScalar>,
    skew_plus: &Mat2<QScalar>,
    e_minus: &SymMat2<QScalar>,
    n: &Point2<QScalar>,
    eps: &QScalar,
) -> Result<JumpSolution> {
    if n.norm2() != QScalar::one() {
        return Err(Error::InvalidParameter(format!("normal ({}, {}) is not a unit vector", n.x, n.y)));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let d0 = e_plus.clone() + skew_plus.clone() - e_minus.clone();
    // (D₀ − W)n⊥ = 0 and W n⊥ = −εw n, so D₀n⊥ = −εw n.
    let n_perp = Point2::new(-&n.y, n.x.clone());
    let r = d0.apply(&n_perp);
    let (ri, ni, rj, nj) =
        if n.x.abs() >= n.y.abs() { (&r.x, &n.x, &r.y, &n.y) } else { (&r.y, &n.y, &r.x, &n.x) };
    let w = -(ri / (eps * ni));
    if rj + eps * &w * nj != QScalar::zero() {
        return Err(Error::NoJumpSolution(n.x.to_string(), n.y.to_string()));
    }
    let m = d0 - skew_w(eps, &w);
    let a = m.apply(n);
    if Mat2::outer(&a, n) != m {
        return Err(Error::NoJumpSolution(n.x.to_string(), n.y.to_string()));
    }
    Ok(JumpSolution { a, n: n.clone(), w })
}

/// Every `(w, a, n)` making the jump rank-one: the roots of
/// `det(D₀ − W(w)) = 0`, each factored with `n₂ > 0` (or `n = (1, 0)`).
pub fn enumerate_jumps(
    e_plus: &SymMat2<QScalar>,
    skew_plus: &Mat2<QScalar>,
    e_minus: &SymMat2<QScalar>,
    eps: &QScalar,
) -> Result<Vec<JumpSolution>> {
    let d0 = e_plus.clone() + skew_plus.clone() - e_minus.clone();
    // with s = εw: s² + (d₁₂ − d₂₁)s + det D₀ = 0
    let b = d0.get(0, 1) - d0.get(1, 0);
    let disc = &b * &b - QScalar::int(4) * d0.det();
    if disc.is_negative() {
        return Ok(Vec::new());
    }
    let root = disc.sqrt_exact().ok_or_else(|| Error::NotInField(format!("√({disc})")))?;
    let half = QScalar::frac(1, 2);
    let mut roots = vec![(-&b - &root) * &half];
    if !root.is_zero() {
        roots.push((-&b + &root) * &half);
    }
    let mut out = Vec::new();
    for s in roots {
        let w = &s / eps;
        let m = d0.clone() - skew_w(eps, &w);
        let r0 = Point2::new(m.get(0, 0), m.get(0, 1));
        let r1 = Point2::new(m.get(1, 0), m.get(1, 1));
        let row = if r0.norm2() >= r1.norm2() { r0 } else { r1 };
        if row.norm2().is_zero() {
            out.push(JumpSolution { a: Point2::zero(), n: Point2::new(QScalar::one(), QScalar::zero()), w });
            continue;
        }
        let len = row.norm2().sqrt_exact().ok_or_else(|| Error::NotInField(format!("√({})", row.norm2())))?;
        let mut n = row.scale(&(QScalar::one() / len));
        if n.y.is_negative() || (n.y.is_zero() && n.x.is_negative()) {
            n = -n;
        }
        let a = m.apply(&n);
        debug_assert_eq!(Mat2::outer(&a, &n), m);
        out.push(JumpSolution { a, n, w });
    }
    Ok(out)
}

/// `a` with `m = a ⊗ n` for a given unit `n`, if it exists.
pub fn factor_with_normal(m: &Mat2<QScalar>, n: &Point2<QScalar>) -> Option<Point2<QScalar>> {
    let a = m.apply(n);
    (Mat2::outer(&a, n) == *m).then_some(a)
}

/// Splits a rank-one matrix into `a ⊗ v` with `a` its larger-norm column
/// direction and `v` an (unnormalised) row vector.
pub fn factor_rank_one(m: &Mat2<QScalar>) -> Option<(Point2<QScalar>, Point2<QScalar>)> {
    if !m.det().is_zero() {
        return None;
    }
    let c0 = Point2::new(m.get(0, 0), m.get(1, 0));
    let c1 = Point2::new(m.get(0, 1), m.get(1, 1));
    let a = if c0.norm2() >= c1.norm2() { c0 } else { c1 };
    if a.norm2().is_zero() {
        return Some((Point2::zero(), Point2::zero()));
    }
    // v_j = (a · column_j)/|a|²
    let inv = QScalar::one() / a.norm2();
    let v = Point2::new(
        (m.get(0, 0) * &a.x + m.get(1, 0) * &a.y) * &inv,
        (m.get(0, 1) * &a.x + m.get(1, 1) * &a.y) * &inv,
    );
    Some((a, v))
}

/// Fault injected into the gradients before checking (test hook).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Negate the skew part of `H_{B₀}`.
    NegateSkewB0,
}

impl std::str::FromStr for Mutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skew-B0" => Ok(Mutation::NegateSkewB0),
            _ => Err(Error::Parse(format!("unknown mutation {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InterfaceCheck {
    pub interface: InterfaceId,
    pub plus: RegionId,
    pub minus: RegionId,
    /// `det(H⁺ − H⁻)` as an exact string.
    pub defect: String,
    pub defect_f64: f64,
    pub rank_one: bool,
    /// `H⁺ − H⁻ = a ⊗ n` with the interface normal.
    pub reconstructs: bool,
    /// The factored row vector is parallel to the interface normal.
    pub normal_parallel: bool,
    pub amplitude: Option<[String; 2]>,
}

impl InterfaceCheck {
    pub fn passed(&self) -> bool {
        self.rank_one && self.reconstructs && self.normal_parallel
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatReport {
    pub kmax: u32,
    pub checks: Vec<InterfaceCheck>,
    pub failures: Vec<InterfaceId>,
}

impl CompatReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `∇u` on a region, with the fault applied if one is given.
pub fn gradient(field: &DisplacementField, id: RegionId, mutation: Option<Mutation>) -> Mat2<QScalar> {
    let h = field.grad_u(id).h;
    match mutation {
        Some(Mutation::NegateSkewB0) if id == RegionId::new(Family::B, 0) => h.sym() - h.skew(),
        _ => h,
    }
}

pub fn check_interface(field: &DisplacementField, id: InterfaceId, mutation: Option<Mutation>) -> InterfaceCheck {
    let (plus, minus) = (id.plus(), id.minus());
    let jump = gradient(field, plus, mutation) - gradient(field, minus, mutation);
    let n = field.geometry().interface(id).normal;
    let defect = jump.det();
    let a = factor_with_normal(&jump, &n);
    let normal_parallel = match factor_rank_one(&jump) {
        Some((_, v)) => (&v.x * &n.y - &v.y * &n.x).is_zero(),
        None => false,
    };
    InterfaceCheck {
        interface: id,
        plus,
        minus,
        defect_f64: defect.to_f64(),
        rank_one: defect.is_zero(),
        defect: defect.to_string(),
        reconstructs: a.is_some(),
        normal_parallel,
        amplitude: a.map(|a| [a.x.to_string(), a.y.to_string()]),
    }
}

/// Checks all twelve interface families for `k ≤ kmax`.
pub fn verify_tiling(field: &DisplacementField, kmax: u32, mutation: Option<Mutation>) -> CompatReport {
    let checks: Vec<InterfaceCheck> =
        InterfaceId::all_up_to(kmax).map(|id| check_interface(field, id, mutation)).collect();
    let failures = checks.iter().filter(|c| !c.passed()).map(|c| c.interface).collect();
    CompatReport { kmax, checks, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{InterfaceKind, TilingParams};
    use crate::wells::wells;
    use proptest::prelude::*;

    fn qs(s: &str) -> QScalar {
        s.parse().unwrap()
    }

    fn unit(x: &str, y: &str) -> Point2<QScalar> {
        Point2::new(qs(x), qs(y))
    }

    #[test]
    fn bare_wells_are_not_rank_one_connected() {
        let eps = qs("1/5");
        let [e1, e2, _] = wells(&eps);
        assert_eq!(rank_one_defect(&e1, &e2), QScalar::int(-3) * &eps * &eps);
        assert!(rank_one_defect(&e1, &e1).is_zero());
    }

    #[test]
    fn worked_example_solutions() {
        let eps = qs("39/250");
        let [e1, _, e3] = wells(&eps);
        let zero = Mat2::zero();
        let s1 = solve_jump(&e3, &zero, &e1, &unit("-1/2√3", "1/2"), &eps).unwrap();
        assert_eq!(s1.w, qs("√3"));
        assert_eq!(s1.a, Point2::new(qs("√3"), qs("3")).scale(&eps));
        let s2 = solve_jump(&e3, &zero, &e1, &unit("1/2", "1/2√3"), &eps).unwrap();
        assert_eq!(s2.w, qs("-√3"));
        assert_eq!(s2.a, Point2::new(qs("-3"), qs("√3")).scale(&eps));
    }

    #[test]
    fn equal_wells_need_no_jump() {
        let eps = QScalar::one();
        let [e1, _, _] = wells(&eps);
        for n in [unit("1", "0"), unit("1/2", "1/2√3"), unit("-1/2√3", "-1/2")] {
            let s = solve_jump(&e1, &Mat2::zero(), &e1, &n, &eps).unwrap();
            assert!(s.w.is_zero());
            assert_eq!(s.a, Point2::zero());
        }
    }

    #[test]
    fn incompatible_normal_is_rejected() {
        let eps = QScalar::one();
        let [e1, _, e3] = wells(&eps);
        assert!(matches!(solve_jump(&e3, &Mat2::zero(), &e1, &unit("1", "0"), &eps), Err(Error::NoJumpSolution(..))));
        assert!(solve_jump(&e3, &Mat2::zero(), &e1, &unit("1", "1"), &eps).is_err());
    }

    #[test]
    fn enumeration_finds_both_branches() {
        let eps = qs("1/3");
        let [e1, _, e3] = wells(&eps);
        let sols = enumerate_jumps(&e3, &Mat2::zero(), &e1, &eps).unwrap();
        assert_eq!(sols.len(), 2);
        let n1sq: Vec<QScalar> = sols.iter().map(|s| &s.n.x * &s.n.x).collect();
        assert!(n1sq.contains(&qs("3/4")) && n1sq.contains(&qs("1/4")));
        for s in &sols {
            let direct = solve_jump(&e3, &Mat2::zero(), &e1, &s.n, &eps).unwrap();
            assert_eq!(&direct, s);
        }
        let same = enumerate_jumps(&e1, &Mat2::zero(), &e1, &eps).unwrap();
        assert_eq!(same.len(), 1);
        assert!(same[0].w.is_zero());
    }

    #[test]
    fn canonical_tiling_is_compatible() {
        let f = DisplacementField::new(TilingParams::unit(), qs("39/250")).unwrap();
        let r = verify_tiling(&f, 8, None);
        assert_eq!(r.checks.len(), 12 * 9);
        assert!(r.passed(), "{:?}", r.failures);
        let moved = f.with_rigid_motion(crate::field::RigidMotion::new(qs("3/2√3"), qs("1"), qs("-2")));
        assert!(verify_tiling(&moved, 4, None).passed());
    }

    #[test]
    fn negated_b0_skew_breaks_the_ba_interface() {
        let f = DisplacementField::new(TilingParams::unit(), QScalar::one()).unwrap();
        let r = verify_tiling(&f, 2, Some(Mutation::NegateSkewB0));
        assert!(!r.passed());
        assert!(r.failures.contains(&InterfaceId::new(InterfaceKind::BA, 0)));
        assert!(r.failures.iter().all(|i| i.plus().is_clipped() || i.minus().is_clipped()));
    }

    fn arb_q() -> impl Strategy<Value = QScalar> {
        (-9i64..9, 1i64..5, -9i64..9, 1i64..5).prop_map(|(a, b, c, d)| QScalar::from_parts(a, b, c, d))
    }

    fn arb_unit() -> impl Strategy<Value = Point2<QScalar>> {
        // unit vectors in Q(√3)²: multiples of π/6 and rational Pythagorean ones
        prop_oneof![
            (0usize..12).prop_map(|i| {
                let c = ["1", "1/2√3", "1/2", "0", "-1/2", "-1/2√3", "-1", "-1/2√3", "-1/2", "0", "1/2", "1/2√3"];
                let s = ["0", "1/2", "1/2√3", "1", "1/2√3", "1/2", "0", "-1/2", "-1/2√3", "-1", "-1/2√3", "-1/2"];
                Point2::new(c[i].parse().unwrap(), s[i].parse().unwrap())
            }),
            (1i64..6, 1i64..6).prop_map(|(m, n)| {
                let d = m * m + n * n;
                Point2::new(QScalar::frac(m * m - n * n, d), QScalar::frac(2 * m * n, d))
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn solve_then_reconstruct(a in (arb_q(), arb_q()), n in arb_unit(), w in arb_q(), e in 1i64..9) {
            let eps = QScalar::frac(e, 7);
            let a = Point2::new(a.0, a.1);
            // build a jump that is rank-one after removing W(w)
            let target = Mat2::outer(&a, &n) + skew_w(&eps, &w);
            let e_minus = wells(&eps)[0].clone();
            let e_plus = e_minus.clone() + target.sym();
            let s = solve_jump(&e_plus, &target.skew(), &e_minus, &n, &eps).unwrap();
            let d0 = e_plus + target.skew() - e_minus;
            prop_assert_eq!(Mat2::outer(&s.a, &s.n) + skew_w(&eps, &s.w), d0);
            if !a.norm2().is_zero() {
                prop_assert_eq!(s.a, a);
                prop_assert_eq!(s.w, w);
            }
        }

        #[test]
        fn swapping_sides_negates_the_amplitude(i in 0usize..3, j in 0usize..3, n in arb_unit()) {
            let eps = QScalar::frac(1, 4);
            let ws = wells(&eps);
            let zero = Mat2::zero();
            if let Ok(s) = solve_jump(&ws[i], &zero, &ws[j], &n, &eps) {
                let back = solve_jump(&ws[j], &zero, &ws[i], &n, &eps).unwrap();
                prop_assert_eq!(back.a, -s.a.clone());
                prop_assert_eq!(back.w, -s.w.clone());
                let flipped = solve_jump(&ws[i], &zero, &ws[j], &(-n), &eps).unwrap();
                prop_assert_eq!(flipped.a, -s.a);
                prop_assert_eq!(flipped.w, s.w);
            }
        }
    }
}
