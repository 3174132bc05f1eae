//! Derived quantities of the construction: phase fractions, coverage of the
//! first generations, extrema sequences, skew growth, Lᵖ norms of the skew
//! gradient, maximum displacement and the `ξ_k` length scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{t_power, QScalar};
use crate::field::{well_of, DisplacementField};
use crate::geometry::{area_tail, Area, Family, Geometry, Location, RegionId, TilingParams};
use crate::linalg::Point2;

#[derive(Clone, Debug, Serialize)]
pub struct PhaseFractionReport {
    /// Area carrying `E₁`, `E₂`, `E₃`.
    pub areas: [f64; 3],
    pub kmax: u32,
    pub tail_included: bool,
    /// `πR²/3`.
    pub expected: f64,
    pub disk_area: f64,
}

impl PhaseFractionReport {
    pub fn max_error(&self) -> f64 {
        self.areas.iter().map(|a| (a - self.expected).abs()).fold(0.0, f64::max)
    }
}

/// Areas per well: generations `0..=kmax` region by region, plus the exact
/// geometric tail (one `A/E/F` kite and one `B/C/D` kite per well and generation).
pub fn phase_fractions(params: &TilingParams, kmax: u32) -> PhaseFractionReport {
    let geo = Geometry::<QScalar>::new(params);
    let mut exact = [QScalar::zero(), QScalar::zero(), QScalar::zero()];
    let mut numeric = [0.0; 3];
    for k in 0..=kmax {
        for f in Family::ALL {
            let w = well_of(f) as usize - 1;
            match geo.region_area(RegionId::new(f, k)) {
                Area::Exact(a) => exact[w] += &a,
                Area::Numeric(a) => numeric[w] += a,
            }
        }
    }
    // each well gets a third of the three-family tail
    let tail = area_tail(&params.l, kmax) * QScalar::frac(1, 3);
    let areas = [0, 1, 2].map(|w| (&exact[w] + &tail).to_f64() + numeric[w]);
    let disk_area = params.disk_area();
    PhaseFractionReport { areas, kmax, tail_included: true, expected: disk_area / 3.0, disk_area }
}

/// `αx + βy + γ` and whether the region lies on its positive side.
type Constraint = ([f64; 3], bool);

/// Fast float classifier used for sampling. Generation `k ≥ 1` is a scaled
/// copy of generation 1, so deep points are rescaled before testing.
pub struct WellClassifier {
    /// Per generation 0..=5: region and its constraints `αx + βy + γ ≷ 0`.
    regions: Vec<(RegionId, Vec<Constraint>)>,
    radius_sq: f64,
    inv_t2: f64,
    level: f64,
    ln_t2: f64,
    geo: Geometry<f64>,
}

const CLASSIFIER_GENERATIONS: u32 = 5;

impl WellClassifier {
    pub fn new(params: &TilingParams) -> Self {
        let geo = Geometry::<f64>::new(params);
        let mut regions = Vec::new();
        for k in 0..=CLASSIFIER_GENERATIONS {
            for f in Family::ALL {
                let id = RegionId::new(f, k);
                let cons = geo
                    .region_constraints(id)
                    .into_iter()
                    .map(|(iface, positive)| {
                        let seg = geo.interface(iface);
                        let g = seg.side(&Point2::new(0.0, 0.0));
                        let a = seg.side(&Point2::new(1.0, 0.0)) - g;
                        let b = seg.side(&Point2::new(0.0, 1.0)) - g;
                        ([a, b, g], positive)
                    })
                    .collect();
                regions.push((id, cons));
            }
        }
        let t2 = t_power(2).to_f64();
        WellClassifier {
            regions,
            radius_sq: *geo.radius_sq(),
            inv_t2: 1.0 / t2,
            level: params.l.to_f64() * (0.5 + 3f64.sqrt() / 3.0),
            ln_t2: t2.ln(),
            geo,
        }
    }

    fn scan(&self, p: Point2<f64>, lo: u32, hi: u32) -> Option<RegionId> {
        let start = lo as usize * 6;
        let end = (hi as usize + 1) * 6;
        self.regions[start..end.min(self.regions.len())]
            .iter()
            .find(|(_, cons)| {
                cons.iter().all(|([a, b, g], positive)| {
                    let v = a * p.x + b * p.y + g;
                    if *positive {
                        v > 0.0
                    } else {
                        v < 0.0
                    }
                })
            })
            .map(|(id, _)| *id)
    }

    /// Region containing `p`, or `None` on interfaces, the origin and outside.
    pub fn region(&self, p: Point2<f64>) -> Option<RegionId> {
        if p.norm2() >= self.radius_sq || (p.x == 0.0 && p.y == 0.0) {
            return None;
        }
        let m = p.x.abs().max(p.y.abs());
        let kb = ((m / self.level).ln() / self.ln_t2).floor().max(0.0) as u32;
        if kb < 3 {
            if let Some(id) = self.scan(p, 0, CLASSIFIER_GENERATIONS) {
                return Some(id);
            }
        } else {
            let j = kb - 2;
            let q = p.scale(&self.inv_t2.powi(j as i32));
            if let Some(id) = self.scan(q, 1, CLASSIFIER_GENERATIONS) {
                return Some(RegionId::new(id.family, id.k + j));
            }
        }
        match self.geo.locate(&p) {
            Location::Region(id) => Some(id),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloReport {
    pub samples: u64,
    pub areas: [f64; 3],
    /// One standard error of each area estimate.
    pub sigma: [f64; 3],
    /// Samples that fell on an interface or could not be classified.
    pub unclassified: u64,
}

/// Uniform sampling of the disk, classified by well. Deterministic for a
/// given `seed`; chunks are seeded independently.
pub fn monte_carlo_phase_fractions(params: &TilingParams, samples: u64, seed: u64) -> MonteCarloReport {
    const CHUNKS: u64 = 64;
    let cls = WellClassifier::new(params);
    let r = cls.radius_sq.sqrt();
    let mut counts = [0u64; 4];
    for c in 0..CHUNKS {
        let n = samples / CHUNKS + u64::from(c < samples % CHUNKS);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(c));
        let mut done = 0;
        while done < n {
            let p = Point2::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
            if p.norm2() >= cls.radius_sq {
                continue;
            }
            done += 1;
            match cls.region(p) {
                Some(id) => counts[well_of(id.family) as usize - 1] += 1,
                None => counts[3] += 1,
            }
        }
    }
    let disk = params.disk_area();
    let total = samples as f64;
    let frac = |i: usize| counts[i] as f64 / total;
    MonteCarloReport {
        samples,
        areas: [0, 1, 2].map(|i| disk * frac(i)),
        sigma: [0, 1, 2].map(|i| disk * (frac(i) * (1.0 - frac(i)) / total).sqrt()),
        unclassified: counts[3],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AreaRatio {
    /// `(ℒ²(ω₀) + 3ℒ²(ω_{B₁}))/ℒ²(Ω)`.
    pub ratio: f64,
    /// `1 − ratio` from the exact tail of generations `k ≥ 2` plus the
    /// `A₁, E₁, F₁` kites.
    pub complement_from_tail: f64,
}

pub fn area_ratio_k01(params: &TilingParams) -> AreaRatio {
    let geo = Geometry::<QScalar>::new(params);
    let gen0: f64 = Family::ALL.iter().map(|&f| geo.region_area(RegionId::new(f, 0)).to_f64()).sum();
    let b1 = geo.region_area(RegionId::new(Family::B, 1)).to_f64();
    let disk = params.disk_area();
    let l2 = &params.l * &params.l;
    let rest = area_tail(&params.l, 1) + QScalar::int(3) * l2 * t_power(5);
    AreaRatio { ratio: (gen0 + 3.0 * b1) / disk, complement_from_tail: rest.to_f64() / disk }
}

/// Componentwise supremum `M_k` and infimum `m_k` of the field over `ω_k`,
/// taken over the polygon vertices of its six regions.
pub fn extrema_sequences(field: &DisplacementField, k: u32) -> (Point2<QScalar>, Point2<QScalar>) {
    let geo = field.geometry();
    let mut values = Vec::new();
    for f in Family::ALL {
        let id = RegionId::new(f, k);
        let piece = field.piece(id);
        values.extend(geo.region_polygon(id).iter().map(|v| piece.eval(v)));
    }
    let pick = |sel: fn(&Point2<QScalar>) -> &QScalar, max: bool| {
        let it = values.iter().map(sel);
        if max { it.max() } else { it.min() }.cloned().expect("six regions have vertices")
    };
    let hi = Point2::new(pick(|p| &p.x, true), pick(|p| &p.y, true));
    let lo = Point2::new(pick(|p| &p.x, false), pick(|p| &p.y, false));
    (hi, lo)
}

/// Skew bounds `c₁k ≤ |(∇u)_skew,12| ≤ c₂k` (`k ≥ 1`): `c₁ = √3ε`, `c₂ = 2√3ε`.
pub fn skew_bounds(eps: &QScalar) -> (QScalar, QScalar) {
    (QScalar::sqrt3() * eps, QScalar::int(2) * QScalar::sqrt3() * eps)
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationSkew {
    pub k: u32,
    /// `|skew₁₂|` per family `A … F`, exact.
    pub magnitudes: [String; 6],
    pub max: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub generations: Vec<GenerationSkew>,
    /// Least-squares slope of the per-generation maximum against `k`.
    pub slope: f64,
    pub c1: f64,
    pub c2: f64,
    /// `c₁k ≤ |skew| ≤ c₂k` for every region with `k ≥ 1`, widened by the
    /// rigid rotation if there is one.
    pub bounds_hold: bool,
}

/// `|(∇u)_skew,12|` per family for one generation.
pub fn skew_magnitudes(field: &DisplacementField, k: u32) -> [QScalar; 6] {
    Family::ALL.map(|f| field.grad_u(RegionId::new(f, k)).h.skew_entry().abs())
}

pub fn growth(field: &DisplacementField, kmax: u32) -> GrowthReport {
    let (c1, c2) = skew_bounds(field.eps());
    // a rigid rotation shifts every skew entry by the same amount
    let slack = field.rigid().map(|z| z.skew().skew_entry().abs()).unwrap_or_else(QScalar::zero);
    let mut generations = Vec::new();
    let mut bounds_hold = true;
    for k in 0..=kmax {
        let mags = skew_magnitudes(field, k);
        if k >= 1 {
            let kq = QScalar::int(k as i64);
            bounds_hold &= mags.iter().all(|m| m + &slack >= &c1 * &kq && *m <= &c2 * &kq + &slack);
        }
        let max = mags.iter().max().expect("six families").to_f64();
        generations.push(GenerationSkew { k, magnitudes: mags.map(|m| m.to_string()), max });
    }
    let pts: Vec<(f64, f64)> = generations.iter().filter(|g| g.k >= 1).map(|g| (g.k as f64, g.max)).collect();
    GrowthReport { slope: fit_slope(&pts), c1: c1.to_f64(), c2: c2.to_f64(), bounds_hold, generations }
}

/// Ordinary least-squares slope; `NaN` with fewer than two points.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, Serialize)]
pub struct LpNorm {
    pub p: f64,
    pub kmax: u32,
    /// `Σ_{k ≤ kmax} Σ_X |skew₁₂|ᵖ ℒ²(ω_{X_k})`.
    pub partial: f64,
    /// Upper bound for the remaining generations.
    pub tail_bound: f64,
    /// Contribution of generation `kmax` alone.
    pub last_increment: f64,
}

/// `∫_Ω |(∇u)_skew,12|ᵖ`: exact products of constant values and areas,
/// with a geometric bound for `k > kmax`.
pub fn grad_lp_norm(field: &DisplacementField, p: f64, kmax: u32) -> Result<LpNorm> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("p must be a finite number ≥ 1, got {p}")));
    }
    let geo = field.geometry();
    let mut partial = 0.0;
    let mut last_increment = 0.0;
    for k in 0..=kmax {
        let mags = skew_magnitudes(field, k);
        let inc: f64 = Family::ALL
            .iter()
            .zip(&mags)
            .map(|(&f, m)| m.to_f64().powf(p) * geo.region_area(RegionId::new(f, k)).to_f64())
            .sum();
        partial += inc;
        last_increment = inc;
    }
    // |skew| ≤ c₂k + |z₁| on generation k ≥ 1
    let c2 = skew_bounds(field.eps()).1.to_f64();
    let z1 = field.rigid().map(|z| z.z1.to_f64().abs()).unwrap_or(0.0);
    let t = t_power(1).to_f64();
    let l2 = field.params().l.to_f64().powi(2);
    let tail_bound = 3.0 * l2 * (t + 1.0 / t) * tail_series(|k| (c2 * k + z1).powf(p), t.powi(4), kmax + 1);
    Ok(LpNorm { p, kmax, partial, tail_bound, last_increment })
}

/// Upper bound of `Σ_{k ≥ k0} g(k) rᵏ` for a positive `g` with `g(k+1)/g(k)`
/// non-increasing: explicit terms until the ratio is below 1/2, then a
/// geometric majorant.
fn tail_series(g: impl Fn(f64) -> f64, r: f64, k0: u32) -> f64 {
    let mut sum = 0.0;
    let mut k = k0 as f64;
    loop {
        let term = g(k) * r.powf(k);
        let q = g(k + 1.0) / g(k) * r;
        if q < 0.5 || term == 0.0 {
            return sum + term / (1.0 - q);
        }
        sum += term;
        k += 1.0;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxDisplacement {
    /// `max |u|` over every vertex, the origin and sampled boundary arcs.
    pub max_norm: f64,
    /// `max |u|` over vertices and the origin only.
    pub vertex_max: f64,
    pub max: [f64; 2],
    pub min: [f64; 2],
    /// Generations swept.
    pub generations: u32,
}

/// Arc samples per clipped region.
const ARC_SAMPLES: usize = 2048;

/// Extrema of `u` over the closed disk. Each piece is affine, so on a kite
/// the extrema sit at vertices; the three clipped regions also get their
/// boundary arc sampled.
pub fn max_displacement(field: &DisplacementField) -> MaxDisplacement {
    let geo = field.geometry();
    let mut pts: Vec<Point2<f64>> = vec![field.origin_value().to_f64()];
    let mut k = 0;
    loop {
        for f in Family::ALL {
            let id = RegionId::new(f, k);
            let piece = field.piece(id);
            pts.extend(geo.region_polygon(id).iter().map(|v| piece.eval(v).to_f64()));
        }
        // vertex values are within ~k t^(2k) εL of the origin value from here on
        if (k as f64 + 1.0) * t_power(2 * k).to_f64() < 1e-17 {
            break;
        }
        k += 1;
    }
    let vertex_max = pts.iter().map(|u| u.norm()).fold(0.0, f64::max);
    let r = field.params().radius_sq().to_f64().sqrt();
    for f in [Family::B, Family::C, Family::D] {
        let id = RegionId::new(f, 0);
        let poly = geo.region_polygon(id);
        let piece = field.piece_f64(id);
        let (a0, a1) = (poly[1].to_f64(), poly[2].to_f64());
        let (th0, mut th1) = (a0.y.atan2(a0.x), a1.y.atan2(a1.x));
        // the arc runs counter-clockwise from the first arm to the second
        while th1 <= th0 {
            th1 += std::f64::consts::TAU;
        }
        for i in 0..=ARC_SAMPLES {
            let th = th0 + (th1 - th0) * i as f64 / ARC_SAMPLES as f64;
            pts.push(piece.eval(&Point2::new(r * th.cos(), r * th.sin())));
        }
    }
    let mut out = MaxDisplacement {
        max_norm: 0.0,
        vertex_max,
        max: [f64::NEG_INFINITY; 2],
        min: [f64::INFINITY; 2],
        generations: k,
    };
    for u in pts {
        out.max_norm = out.max_norm.max(u.norm());
        out.max = [out.max[0].max(u.x), out.max[1].max(u.y)];
        out.min = [out.min[0].min(u.x), out.min[1].min(u.y)];
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct XiPoint {
    pub k: u32,
    pub point: Point2<f64>,
    pub location: Location,
    /// `|ξ_k|`, in the units of `L`.
    pub distance: f64,
}

/// `ξ_k = L t^(2k) (5/√3 − 3, 3 − 5/√3)`, the midpoint of `B_k` and `B_{k+1}`.
pub fn xi_point(k: u32, params: &TilingParams) -> XiPoint {
    let c = QScalar::from_parts(-3, 1, 5, 3);
    let s = &params.l * t_power(2 * k);
    let p = Point2::new(&c * &s, -(&c * &s));
    let geo = Geometry::<QScalar>::new(params);
    XiPoint { k, location: geo.locate(&p), distance: p.to_f64().norm(), point: p.to_f64() }
}
