//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code: 0 on success, 1 on a usage or
//! configuration error, 2 when a verification fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::analysis::{
    area_ratio_k01, grad_lp_norm, growth, max_displacement, phase_fractions, xi_point, LpNorm,
};
use crate::compat::{check_interface, enumerate_jumps, gradient, solve_jump, JumpSolution, Mutation};
use crate::exactnum::{t_power, QScalar};
use crate::field::{well_of, DisplacementField, RigidMotion};
use crate::geometry::{tiling_area_check, Family, InterfaceId, Location, RegionId, TilingParams};
use crate::linalg::{Mat2, Point2};
use crate::wells::{epsilon_of, linear_strains, nonlinear_strains, psi_l, well_strains, wells, LandauParams};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

/// Generations summed for the `Lᵖ` norms in reports.
const LP_KMAX: u32 = 40;

#[derive(Parser, Debug)]
#[command(name = "tripole", version, about = "Construct and verify the tripole-star microstructure")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Characteristic length L (decimal, fraction or a+b√3).
    #[arg(long = "L", global = true, default_value = "1")]
    pub l: String,
    /// Transformation strain ε, or `landau` to derive it from the parameters.
    #[arg(long, global = true, default_value = "1")]
    pub epsilon: String,
    #[arg(long, global = true, default_value_t = 8)]
    pub kmax: u32,
    /// Grid points per axis.
    #[arg(long, global = true, default_value_t = 256)]
    pub grid: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Rigid motion `z1,z2,z3`: skew z1, translation (z2, z3).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rigid: Option<String>,
    /// TOML file with Landau coefficients A1, A, B, C, T, Tc.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Defaults to exact for verification and float for sampling.
    #[arg(long, global = true, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check compatibility, continuity and well inclusion on every interface.
    Verify {
        /// Inject a fault (`skew-B0`).
        #[arg(long)]
        mutate: Option<String>,
    },
    /// Sample u and the strains on a grid over the disk.
    Grid,
    /// Strains along a segment.
    Profile {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Solve the jump condition between two variants.
    Jump {
        #[arg(long)]
        plus: u8,
        #[arg(long)]
        minus: u8,
        /// Unit normal `n1,n2`.
        #[arg(long, allow_hyphen_values = true)]
        normal: Option<String>,
        /// List every normal that admits a solution.
        #[arg(long)]
        enumerate: bool,
    },
    /// Tiling completeness, phase fractions and the coverage ratio.
    Areas,
    /// Verification checks plus every summary.
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

/// Validated settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub l: QScalar,
    pub epsilon: QScalar,
    pub kmax: u32,
    pub grid: usize,
    pub format: Format,
    pub rigid: Option<RigidMotion>,
    pub landau: LandauParams,
    pub backend: Backend,
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs, default_backend: Backend) -> Result<Self> {
        let landau = match &a.params {
            Some(path) => LandauParams::from_file(path)?,
            None => LandauParams::default(),
        };
        let l: QScalar = a.l.parse()?;
        if !l.is_positive() {
            return Err(Error::InvalidParameter(format!("L must be positive, got {l}")));
        }
        let epsilon = if a.epsilon.trim() == "landau" {
            let e = epsilon_of(&landau)?;
            QScalar::from_f64(e).ok_or_else(|| Error::InvalidParameter(format!("ε = {e} is not finite")))?
        } else {
            a.epsilon.parse()?
        };
        if !epsilon.is_positive() {
            return Err(Error::InvalidParameter(format!("ε must be positive, got {epsilon}")));
        }
        if a.grid < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {}", a.grid)));
        }
        let rigid = a.rigid.as_deref().map(RigidMotion::parse).transpose()?;
        Ok(RunConfig {
            l,
            epsilon,
            kmax: a.kmax,
            grid: a.grid,
            format: a.format,
            rigid,
            landau,
            backend: a.backend.unwrap_or(default_backend),
        })
    }

    pub fn tiling(&self) -> Result<TilingParams> {
        TilingParams::new(self.l.clone(), self.kmax)
    }

    pub fn field(&self) -> Result<DisplacementField> {
        let f = DisplacementField::new(self.tiling()?, self.epsilon.clone())?;
        Ok(match &self.rigid {
            Some(z) => f.with_rigid_motion(z.clone()),
            None => f,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "L": self.l.to_string(),
            "epsilon": self.epsilon.to_string(),
            "epsilon_f64": self.epsilon.to_f64(),
            "kmax": self.kmax,
            "grid": self.grid,
            "format": self.format,
            "backend": self.backend,
            "rigid": self.rigid.as_ref().map(|z| [z.z1.to_string(), z.z2.to_string(), z.z3.to_string()]),
            "params": self.landau,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One line of the verification report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub family: Option<String>,
    pub k: Option<u32>,
    pub status: Status,
    pub residual: f64,
    /// Exact residual, when the check ran in exact arithmetic.
    pub exact: Option<String>,
}

impl Check {
    fn new(name: String, family: Option<String>, k: Option<u32>, ok: bool, residual: f64, exact: Option<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Check { name, family, k, status, residual, exact }
    }

    fn exact(name: String, family: String, k: u32, residual: QScalar) -> Self {
        let ok = residual.is_zero();
        Check::new(name, Some(family), Some(k), ok, residual.to_f64(), Some(residual.to_string()))
    }

    fn float(name: String, family: String, k: u32, residual: f64, tol: f64) -> Self {
        Check::new(name, Some(family), Some(k), residual <= tol, residual, None)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn max_abs_q(vals: impl IntoIterator<Item = QScalar>) -> QScalar {
    vals.into_iter().map(|v| v.abs()).max().unwrap_or_else(QScalar::zero)
}

fn max_abs(vals: impl IntoIterator<Item = f64>) -> f64 {
    vals.into_iter().map(f64::abs).fold(0.0, f64::max)
}

fn entries<S: crate::exactnum::Scalar>(m: &Mat2<S>) -> [S; 4] {
    [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)]
}

const TRACE_PARAMS: [(i64, i64); 5] = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)];

fn interface_checks(field: &DisplacementField, id: InterfaceId, mutation: Option<Mutation>, backend: Backend) -> Vec<Check> {
    let fam = id.kind.name().to_string();
    let k = id.k;
    let name = |what: &str| format!("{what}:{id}");
    let jump = gradient(field, id.plus(), mutation) - gradient(field, id.minus(), mutation);
    let n = field.geometry().interface(id).normal;
    let mut out = Vec::with_capacity(4);
    match backend {
        Backend::Exact => {
            let c = check_interface(field, id, mutation);
            let n_perp = Point2::new(-&n.y, n.x.clone());
            let jn = jump.apply(&n);
            let recon = max_abs_q(entries(&(jump.clone() - Mat2::outer(&jn, &n))));
            let tangential = jump.apply(&n_perp);
            let along = max_abs_q([tangential.x, tangential.y]);
            let det = c.defect.parse::<QScalar>().map(|d| d.abs()).unwrap_or_else(|_| jump.det().abs());
            out.push(Check::exact(name("rank_one"), fam.clone(), k, det));
            out.push(Check::exact(name("reconstruction"), fam.clone(), k, recon));
            let mut normal = Check::exact(name("normal"), fam.clone(), k, along);
            if !c.normal_parallel {
                normal.status = Status::Fail;
            }
            out.push(normal);
            let mut worst = QScalar::zero();
            for (a, b) in TRACE_PARAMS {
                let t = field.interface_trace(id, &QScalar::frac(a, b));
                let r = max_abs_q([
                    &t.left.x - &t.right.x,
                    &t.left.y - &t.right.y,
                    &t.right.x - &t.printed.x,
                    &t.right.y - &t.printed.y,
                ]);
                worst = worst.max(r);
            }
            out.push(Check::exact(name("continuity"), fam, k, worst));
        }
        Backend::Float => {
            let j = jump.to_f64();
            let nf = n.to_f64();
            let scale = 1.0 + max_abs(entries(&j));
            let tol = 1e-12 * scale * scale;
            out.push(Check::float(name("rank_one"), fam.clone(), k, j.det().abs(), tol));
            let jn = j.apply(&nf);
            let recon = max_abs(entries(&(j.clone() - Mat2::outer(&jn, &nf))));
            out.push(Check::float(name("reconstruction"), fam.clone(), k, recon, 1e-12 * scale));
            let tangential = j.apply(&Point2::new(-nf.y, nf.x));
            out.push(Check::float(name("normal"), fam.clone(), k, max_abs([tangential.x, tangential.y]), 1e-12 * scale));
            let seg = field.geometry_f64().interface(id);
            let (plus, minus) = (field.piece_f64(id.plus()), field.piece_f64(id.minus()));
            let mut worst: f64 = 0.0;
            let mut size: f64 = 1.0;
            for (a, b) in TRACE_PARAMS {
                let p = seg.point_at(&(a as f64 / b as f64));
                let (r, l) = (plus.eval(&p), minus.eval(&p));
                size = size.max(r.norm());
                worst = worst.max(max_abs([r.x - l.x, r.y - l.y]));
            }
            out.push(Check::float(name("continuity"), fam, k, worst, 1e-11 * size * (k as f64 + 1.0)));
        }
    }
    out
}

fn region_checks(field: &DisplacementField, id: RegionId, mutation: Option<Mutation>, backend: Backend) -> Check {
    let h = gradient(field, id, mutation);
    let well = wells(field.eps())[well_of(id.family) as usize - 1].clone();
    let name = format!("well:{id}");
    let fam = id.family.to_string();
    match backend {
        Backend::Exact => Check::exact(name, fam, id.k, max_abs_q(entries(&(h.sym() - well)))),
        Backend::Float => {
            let r = max_abs(entries(&(h.to_f64().sym() - well.to_f64())));
            Check::float(name, fam, id.k, r, 1e-12 * (1.0 + field.eps().to_f64()))
        }
    }
}

/// Every verification check for the configured field.
pub fn verification_checks(cfg: &RunConfig, mutation: Option<Mutation>) -> Result<Vec<Check>> {
    let field = cfg.field()?;
    let params = cfg.tiling()?;
    let mut checks = Vec::new();
    for id in InterfaceId::all_up_to(cfg.kmax) {
        checks.extend(interface_checks(&field, id, mutation, cfg.backend));
    }
    for k in 0..=cfg.kmax {
        for f in Family::ALL {
            checks.push(region_checks(&field, RegionId::new(f, k), mutation, cfg.backend));
        }
    }

    // the Landau energy vanishes on the three wells it defines
    match epsilon_of(&cfg.landau) {
        Ok(e) if cfg.landau.is_three_well() => {
            for (i, s) in well_strains(e).iter().enumerate() {
                let v = psi_l(s, &cfg.landau)?;
                checks.push(Check::new(format!("landau_zero:E{}", i + 1), None, None, v.abs() <= 1e-12, v.abs(), None));
            }
        }
        _ => checks.push(Check::new("landau_three_wells".into(), None, None, false, f64::NAN, None)),
    }

    // vertex values approach the origin value like k t^(2k)
    let origin = field.origin_value();
    let k = cfg.kmax;
    let lt = (&cfg.l * t_power(2 * k)).to_f64();
    let z1 = cfg.rigid.as_ref().map(|z| z.z1.to_f64().abs()).unwrap_or(0.0);
    let bound = lt * (4.0 * (k as f64 + 1.0) * cfg.epsilon.to_f64() + 2.0 * z1);
    for f in [Family::A, Family::B, Family::C] {
        let v = field.vertex_value(f, k)?;
        let d = max_abs_q([&v.x - &origin.x, &v.y - &origin.y]);
        let r = d.to_f64();
        checks.push(Check::new(format!("origin_limit:{f}{k}"), Some(f.to_string()), Some(k), r <= bound, r, Some(d.to_string())));
    }

    let area = tiling_area_check(&params);
    checks.push(Check::new(
        "tiling_area".into(),
        None,
        None,
        area.defect <= 1e-12 * area.disk_area,
        area.defect,
        None,
    ));
    let pf = phase_fractions(&params, cfg.kmax);
    let err = pf.max_error();
    checks.push(Check::new("phase_fractions".into(), None, None, err <= 1e-9 * (1.0 + pf.expected), err, None));
    let g = growth(&field, cfg.kmax);
    checks.push(Check::new("skew_growth_bounds".into(), None, None, g.bounds_hold, 0.0, None));
    Ok(checks)
}

fn lp_norms(field: &DisplacementField, kmax: u32) -> Result<Vec<LpNorm>> {
    (1..=4).map(|p| grad_lp_norm(field, p as f64, kmax.max(LP_KMAX))).collect()
}

fn summaries(cfg: &RunConfig, field: &DisplacementField) -> Result<Map<String, Value>> {
    let params = cfg.tiling()?;
    let origin = field.origin_value();
    let mut m = Map::new();
    m.insert("phase_fractions".into(), serde_json::to_value(phase_fractions(&params, cfg.kmax))?);
    m.insert("area_ratio".into(), serde_json::to_value(area_ratio_k01(&params))?);
    m.insert(
        "origin_value".into(),
        json!({
            "value": origin.to_f64(),
            "exact": [origin.x.to_string(), origin.y.to_string()],
        }),
    );
    m.insert("lp_norms".into(), serde_json::to_value(lp_norms(field, cfg.kmax)?)?);
    m.insert("growth".into(), serde_json::to_value(growth(field, cfg.kmax))?);
    Ok(m)
}

fn report_value(cfg: &RunConfig, checks: &[Check], summaries: Map<String, Value>) -> Value {
    json!({
        "config": cfg.to_json(),
        "checks": checks,
        "summaries": summaries,
    })
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

fn write_checks_csv(out: &mut dyn Write, checks: &[Check]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["name", "family", "k", "status", "residual", "exact"]).map_err(csv_err)?;
    for c in checks {
        let status = if c.passed() { "pass" } else { "fail" };
        w.write_record([
            c.name.clone(),
            c.family.clone().unwrap_or_default(),
            c.k.map(|k| k.to_string()).unwrap_or_default(),
            status.to_string(),
            num(c.residual),
            c.exact.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, rows)),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

/// Writes a JSON document as `key,value` rows with dotted paths.
fn write_flat_csv(out: &mut dyn Write, v: &Value) -> Result<()> {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut w = csv_writer(out);
    w.write_record(["key", "value"]).map_err(csv_err)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// A numeric table: CSV with a header row, or JSON `{config, columns, rows}`.
fn write_table(out: &mut dyn Write, cfg: &RunConfig, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    match cfg.format {
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(columns).map_err(csv_err)?;
            for r in rows {
                w.write_record(r.iter().map(|x| num(*x))).map_err(csv_err)?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Json => write_json(out, &json!({ "config": cfg.to_json(), "columns": columns, "rows": rows })),
    }
}

/// Region whose gradient applies at a located point; interfaces take the
/// smaller of their two sides.
fn located_region(loc: Location) -> Option<RegionId> {
    match loc {
        Location::Region(id) | Location::Boundary(id) => Some(id),
        Location::OnInterface(i) => Some(i.plus().min(i.minus())),
        Location::Origin | Location::OutsideDisk => None,
    }
}

struct Sample {
    u: Point2<f64>,
    region: Option<RegionId>,
    on_interface: bool,
}

fn sample(field: &DisplacementField, p: &Point2<QScalar>, backend: Backend) -> Result<Option<Sample>> {
    match backend {
        Backend::Exact => {
            let loc = field.geometry().locate(p);
            if loc == Location::OutsideDisk {
                return Ok(None);
            }
            let u = field.eval_u(p)?.to_f64();
            Ok(Some(Sample { u, region: located_region(loc), on_interface: matches!(loc, Location::OnInterface(_)) }))
        }
        Backend::Float => {
            let pf = p.to_f64();
            let loc = field.geometry_f64().locate(&pf);
            if loc == Location::OutsideDisk {
                return Ok(None);
            }
            let region = field.region_f64(&pf)?;
            let u = field.eval_u_f64(&pf)?;
            Ok(Some(Sample { u, region, on_interface: matches!(loc, Location::OnInterface(_)) }))
        }
    }
}

fn strains_of(field: &DisplacementField, id: Option<RegionId>) -> ([f64; 3], [f64; 3]) {
    match id {
        Some(id) => {
            let h = field.grad_u(id).h;
            let lin = linear_strains(&h).to_f64();
            let non = nonlinear_strains(&h).to_f64();
            ([lin.e1, lin.e2, lin.e3], [non.e1, non.e2, non.e3])
        }
        None => ([f64::NAN; 3], [f64::NAN; 3]),
    }
}

pub const GRID_COLUMNS: [&str; 8] = ["x", "y", "u1", "u2", "well_index", "eps1", "eps2", "eps3"];

/// Rows of the grid dump over the bounding square of the disk.
pub fn grid_rows(cfg: &RunConfig) -> Result<Vec<Vec<f64>>> {
    let field = cfg.field()?;
    let r = field.params().radius_sq().to_f64().sqrt();
    let n = cfg.grid;
    let mut rows = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let x = -r + 2.0 * r * i as f64 / (n - 1) as f64;
            let y = -r + 2.0 * r * j as f64 / (n - 1) as f64;
            let p = Point2::new(x, y);
            let exact = Point2::from_f64(p).ok_or_else(|| Error::InvalidParameter("non-finite grid point".into()))?;
            let row = match sample(&field, &exact, cfg.backend)? {
                None => vec![x, y, f64::NAN, f64::NAN, 0.0, f64::NAN, f64::NAN, f64::NAN],
                Some(s) => {
                    let (lin, _) = strains_of(&field, s.region);
                    let well = match s.region {
                        Some(id) if !s.on_interface => well_of(id.family) as f64,
                        _ => 0.0,
                    };
                    vec![x, y, s.u.x, s.u.y, well, lin[0], lin[1], lin[2]]
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

pub const PROFILE_COLUMNS: [&str; 9] = ["s", "x", "y", "eps2", "eps3", "eps1", "e1", "e2", "e3"];

fn parse_point(s: &str) -> Result<Point2<QScalar>> {
    let (x, y) = s.split_once(',').ok_or_else(|| Error::Parse(format!("expected x,y, got {s:?}")))?;
    Ok(Point2::new(x.parse()?, y.parse()?))
}

/// Rows of a strain profile along the segment `from → to`.
pub fn profile_rows(cfg: &RunConfig, from: &Point2<QScalar>, to: &Point2<QScalar>, samples: usize) -> Result<Vec<Vec<f64>>> {
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("a profile needs at least 2 samples, got {samples}")));
    }
    let field = cfg.field()?;
    let r2 = field.params().radius_sq();
    for p in [from, to] {
        if p.norm2() > r2 {
            let pf = p.to_f64();
            return Err(Error::OutsideDisk(pf.x, pf.y));
        }
    }
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = QScalar::frac(i as i64, samples as i64 - 1);
        let p = from.lerp(to, &s);
        let smp = sample(&field, &p, cfg.backend)?.ok_or_else(|| {
            let pf = p.to_f64();
            Error::OutsideDisk(pf.x, pf.y)
        })?;
        let (lin, non) = strains_of(&field, smp.region);
        let pf = p.to_f64();
        rows.push(vec![s.to_f64(), pf.x, pf.y, lin[1], lin[2], lin[0], non[0], non[1], non[2]]);
    }
    Ok(rows)
}

fn jump_json(s: &JumpSolution) -> Value {
    json!({
        "w": s.w.to_string(),
        "a": [s.a.x.to_string(), s.a.y.to_string()],
        "n": [s.n.x.to_string(), s.n.y.to_string()],
        "w_f64": s.w.to_f64(),
        "a_f64": s.a.to_f64(),
        "n_f64": s.n.to_f64(),
    })
}

/// Jump solutions between wells `plus` and `minus` (1, 2 or 3).
pub fn jump_solutions(cfg: &RunConfig, plus: u8, minus: u8, normal: Option<&str>, enumerate: bool) -> Result<Vec<JumpSolution>> {
    let pick = |v: u8| -> Result<Mat2<QScalar>> {
        if !(1..=3).contains(&v) {
            return Err(Error::InvalidParameter(format!("variant must be 1, 2 or 3, got {v}")));
        }
        Ok(wells(&cfg.epsilon)[v as usize - 1].clone())
    };
    let (ep, em) = (pick(plus)?, pick(minus)?);
    let zero = Mat2::zero();
    match (normal, enumerate) {
        (_, true) => enumerate_jumps(&ep, &zero, &em, &cfg.epsilon),
        (Some(n), false) => Ok(vec![solve_jump(&ep, &zero, &em, &parse_point(n)?, &cfg.epsilon)?]),
        (None, false) => Err(Error::InvalidParameter("jump needs --normal or --enumerate".into())),
    }
}

fn open_out<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

enum Outcome {
    Ok,
    Failed,
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome> {
    let default_backend = match cli.command {
        Command::Grid | Command::Profile { .. } => Backend::Float,
        _ => Backend::Exact,
    };
    let cfg = RunConfig::from_args(&cli.common, default_backend)?;
    // validate everything before producing output
    cfg.field()?;
    let mut out = open_out(&cli.common.out, stdout)?;
    let outcome = match &cli.command {
        Command::Verify { mutate } => {
            let mutation = mutate.as_deref().map(str::parse::<Mutation>).transpose()?;
            let checks = verification_checks(&cfg, mutation)?;
            match cfg.format {
                Format::Csv => write_checks_csv(&mut out, &checks)?,
                Format::Json => {
                    let field = cfg.field()?;
                    write_json(&mut out, &report_value(&cfg, &checks, summaries(&cfg, &field)?))?
                }
            }
            report_failures(&checks, stderr)?
        }
        Command::Report => {
            let field = cfg.field()?;
            let checks = verification_checks(&cfg, None)?;
            let mut s = summaries(&cfg, &field)?;
            s.insert("tiling_area".into(), serde_json::to_value(tiling_area_check(&cfg.tiling()?))?);
            s.insert("max_displacement".into(), serde_json::to_value(max_displacement(&field))?);
            s.insert("xi_2".into(), serde_json::to_value(xi_point(2, &cfg.tiling()?))?);
            let v = report_value(&cfg, &checks, s);
            match cfg.format {
                Format::Csv => write_flat_csv(&mut out, &v)?,
                Format::Json => write_json(&mut out, &v)?,
            }
            report_failures(&checks, stderr)?
        }
        Command::Areas => {
            let params = cfg.tiling()?;
            let v = json!({
                "config": cfg.to_json(),
                "tiling_area": tiling_area_check(&params),
                "phase_fractions": phase_fractions(&params, cfg.kmax),
                "area_ratio": area_ratio_k01(&params),
            });
            match cfg.format {
                Format::Csv => write_flat_csv(&mut out, &v)?,
                Format::Json => write_json(&mut out, &v)?,
            }
            Outcome::Ok
        }
        Command::Grid => {
            write_table(&mut out, &cfg, &GRID_COLUMNS, &grid_rows(&cfg)?)?;
            Outcome::Ok
        }
        Command::Profile { from, to, samples } => {
            let rows = profile_rows(&cfg, &parse_point(from)?, &parse_point(to)?, *samples)?;
            write_table(&mut out, &cfg, &PROFILE_COLUMNS, &rows)?;
            Outcome::Ok
        }
        Command::Jump { plus, minus, normal, enumerate } => {
            match jump_solutions(&cfg, *plus, *minus, normal.as_deref(), *enumerate) {
                Ok(sols) => {
                    match cfg.format {
                        Format::Json => {
                            let v = json!({
                                "config": cfg.to_json(),
                                "solutions": sols.iter().map(jump_json).collect::<Vec<_>>(),
                            });
                            write_json(&mut out, &v)?
                        }
                        Format::Csv => {
                            let mut w = csv_writer(&mut out);
                            w.write_record(["w", "a1", "a2", "n1", "n2", "w_f64", "a1_f64", "a2_f64", "n1_f64", "n2_f64"])
                                .map_err(csv_err)?;
                            for s in &sols {
                                let (a, n) = (s.a.to_f64(), s.n.to_f64());
                                w.write_record([
                                    s.w.to_string(),
                                    s.a.x.to_string(),
                                    s.a.y.to_string(),
                                    s.n.x.to_string(),
                                    s.n.y.to_string(),
                                    num(s.w.to_f64()),
                                    num(a.x),
                                    num(a.y),
                                    num(n.x),
                                    num(n.y),
                                ])
                                .map_err(csv_err)?;
                            }
                            w.flush()?;
                        }
                    }
                    Outcome::Ok
                }
                Err(e @ Error::NoJumpSolution(..)) => {
                    writeln!(stderr, "error: {e}")?;
                    Outcome::Failed
                }
                Err(e) => return Err(e),
            }
        }
    };
    out.flush()?;
    Ok(outcome)
}

fn report_failures(checks: &[Check], stderr: &mut dyn Write) -> Result<Outcome> {
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed()).collect();
    for c in &failed {
        writeln!(stderr, "FAIL {} (residual {})", c.name, c.residual)?;
    }
    writeln!(stderr, "{} checks, {} failed", checks.len(), failed.len())?;
    Ok(if failed.is_empty() { Outcome::Ok } else { Outcome::Failed })
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Failed) => EXIT_FAILED,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CONFIG
        }
    }
}
