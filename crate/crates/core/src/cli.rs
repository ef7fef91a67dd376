//! The `ew` command line: argument and config parsing, dispatch, and the
//! json, csv, svg and text renderings of each command's document.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, serde_str, serde_str_vec, Q};
use crate::classify::{self, Check, Contraction, WallReport};
use crate::error::Error;
use crate::hn::{self, MinCodim};
use crate::hyperbolic::{build_sublattice, ConeOrientation, RankTwoLattice, RootKind, Wall};
use crate::lattice::{MukaiVector, ParityClass, SurfaceModel};
use crate::slice::{self, WallEquation, WallLocus};
use crate::weyl::{self, ReflectionWord};

pub const FORMAT_VERSION: &str = "1";
/// Cap on the number of decompositions `decompose` lists.
pub const DECOMPOSITION_LIMIT: usize = 20_000;

#[derive(Parser, Debug)]
#[command(name = "ew", version, about = "Walls for moduli of Bridgeland-semistable objects on Enriques surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify the wall spanned by v and w.
    Classify(Opts),
    /// Find the potential walls of v on the slice of an ample class.
    Walls(Opts),
    /// Reduce v to the minimal class of its orbit.
    Orbit(Opts),
    /// List the decompositions of v on a wall with their codimensions.
    Decompose(Opts),
    /// Draw the walls of v on the (s, t) half-plane.
    SlicePlot(Opts),
}

#[derive(Args, Debug, Default, Clone)]
pub struct Opts {
    /// Surface model: a JSON file, or builtin:U, builtin:U-nodal, builtin:enriques.
    #[arg(long)]
    pub surface: Option<String>,
    /// JSON run config; flags given on the command line override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mukai vector: {"r":..,"c1":[..],"s2":..} or [r, [c1..], third].
    #[arg(long)]
    pub v: Option<String>,
    /// Second generator of the wall lattice.
    #[arg(long)]
    pub w: Option<String>,
    #[arg(long, value_enum)]
    pub det: Option<Det>,
    #[arg(long)]
    pub bound: Option<u32>,
    /// Ample class as a JSON list of c1 coordinates.
    #[arg(long)]
    pub ample: Option<String>,
    /// Class of positive square in the wall lattice fixing the effective side;
    /// without it or --ample, a generic perturbation of v is used.
    #[arg(long)]
    pub orient: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Det {
    #[value(name = "L")]
    L,
    #[value(name = "LK")]
    LK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

/// Why a run did not finish with exit code 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Config(String),
    Outside(String),
    Invariant(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Outside(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Invariant(e.to_string()),
            Error::OutsideHypotheses(_) => Failure::Outside(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

// ---------------------------------------------------------------- documents

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub basis: [MukaiVector; 2],
    /// `[⟨b1,b1⟩, ⟨b1,b2⟩, ⟨b2,b2⟩]`.
    #[serde(with = "serde_str_vec")]
    pub gram: Vec<BigInt>,
    #[serde(with = "serde_str")]
    pub disc: BigInt,
}

impl From<&RankTwoLattice> for LatticeDoc {
    fn from(h: &RankTwoLattice) -> Self {
        LatticeDoc { basis: h.basis.clone(), gram: vec![h.gram2[0][0].clone(), h.gram2[0][1].clone(), h.gram2[1][1].clone()], disc: h.disc() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyDoc {
    pub surface: String,
    pub lattice: LatticeDoc,
    pub orientation: ConeOrientation,
    pub report: WallReport,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallEntry {
    pub generator: MukaiVector,
    pub lattice: LatticeDoc,
    pub locus: WallLocus,
    pub equation: WallEquation,
    pub orientation: Option<ConeOrientation>,
    pub report: Option<WallReport>,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallsDoc {
    pub surface: String,
    pub v: MukaiVector,
    pub determinant: ParityClass,
    #[serde(with = "serde_str_vec")]
    pub ample: Vec<BigInt>,
    pub bound: u32,
    /// Below this `s` the slice is in the Gieseker chamber side, for `r > 0`.
    pub gieseker_bound: Option<String>,
    pub walls: Vec<WallEntry>,
    /// Lattices found by the search whose wall misses the slice.
    pub off_slice: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDoc {
    pub surface: String,
    pub lattice: LatticeDoc,
    pub orientation: ConeOrientation,
    pub v: MukaiVector,
    pub v0: MukaiVector,
    pub word: ReflectionWord,
    pub kinds: Vec<RootKind>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub parts: Vec<MukaiVector>,
    #[serde(with = "serde_str")]
    pub codim: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeDoc {
    pub surface: String,
    pub lattice: LatticeDoc,
    pub orientation: ConeOrientation,
    pub v: MukaiVector,
    pub rows: Vec<DecompositionRow>,
    pub min_codim: MinCodim,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Body {
    Classify(ClassifyDoc),
    Walls(WallsDoc),
    Orbit(OrbitDoc),
    Decompose(DecomposeDoc),
    SlicePlot(WallsDoc),
}

/// One output document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub version: String,
    #[serde(flatten)]
    pub body: Body,
}

impl Document {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialise")
    }

    pub fn from_json(s: &str) -> Result<Self, Failure> {
        let d: Document = serde_json::from_str(s).map_err(|e| config_err(format!("bad document: {e}")))?;
        if d.version != FORMAT_VERSION {
            return Err(config_err(format!("unsupported document version {}", d.version)));
        }
        Ok(d)
    }

    /// Exit status implied by the content: 2 outside hypotheses, 3 an
    /// unexplained disagreement with the oracle.
    pub fn status(&self) -> i32 {
        let (reports, checks): (Vec<&WallReport>, Vec<&Check>) = match &self.body {
            Body::Classify(d) => (vec![&d.report], d.checks.iter().collect()),
            Body::Walls(d) | Body::SlicePlot(d) => (d.walls.iter().filter_map(|w| w.report.as_ref()).collect(), d.walls.iter().flat_map(|w| &w.checks).collect()),
            _ => (vec![], vec![]),
        };
        if checks.iter().any(|c| c.unexplained_failure()) {
            3
        } else if matches!(self.body, Body::Classify(_)) && reports.iter().any(|r| r.outside_hypotheses()) {
            2
        } else {
            0
        }
    }
}

// ------------------------------------------------------------------ inputs

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    version: Option<serde_json::Value>,
    surface: Option<serde_json::Value>,
    v: Option<serde_json::Value>,
    w: Option<serde_json::Value>,
    det: Option<Det>,
    bound: Option<u32>,
    ample: Option<serde_json::Value>,
    orient: Option<serde_json::Value>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

/// Options after merging the config file under the flags.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub surface: SurfaceModel,
    pub v: Option<serde_json::Value>,
    pub w: Option<serde_json::Value>,
    pub det: Det,
    pub bound: u32,
    pub ample: Option<serde_json::Value>,
    pub orient: Option<serde_json::Value>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn parse_json(flag: &str, s: &str) -> Result<serde_json::Value, Failure> {
    serde_json::from_str(s).map_err(|e| config_err(format!("--{flag}: {e}")))
}

pub fn load_surface(spec: &serde_json::Value) -> Result<SurfaceModel, Failure> {
    match spec {
        serde_json::Value::String(s) => match s.as_str() {
            "builtin:U" => Ok(SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new())?),
            "builtin:U-nodal" => Ok(SurfaceModel::hyperbolic_plane(vec![vec![1, 0], vec![0, 1], vec![1, 1]])?),
            "builtin:enriques" => Ok(SurfaceModel::unnodal()),
            path => {
                let text = std::fs::read_to_string(Path::new(path)).map_err(|e| config_err(format!("surface {path}: {e}")))?;
                Ok(SurfaceModel::from_json(&text)?)
            }
        },
        obj @ serde_json::Value::Object(_) => Ok(SurfaceModel::from_json_value(obj)?),
        _ => Err(config_err("surface must be a path, a builtin name or an object")),
    }
}

pub fn resolve(o: &Opts) -> Result<Resolved, Failure> {
    let cfg: ConfigFile = match &o.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| config_err(format!("config {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| config_err(format!("config {}: {e}", p.display())))?
        }
        None => ConfigFile::default(),
    };
    if let Some(ver) = &cfg.version {
        if ver.as_str() != Some(FORMAT_VERSION) && ver.as_u64() != Some(1) {
            return Err(config_err(format!("unsupported config version {ver}")));
        }
    }
    let pick = |flag: &Option<String>, name: &str, fallback: &Option<serde_json::Value>| -> Result<Option<serde_json::Value>, Failure> {
        match flag {
            Some(s) => parse_json(name, s).map(Some),
            None => Ok(fallback.clone()),
        }
    };
    let surface_spec = match &o.surface {
        Some(s) => serde_json::Value::String(s.clone()),
        None => cfg.surface.clone().ok_or_else(|| config_err("no surface given (--surface)"))?,
    };
    Ok(Resolved {
        surface: load_surface(&surface_spec)?,
        v: pick(&o.v, "v", &cfg.v)?,
        w: pick(&o.w, "w", &cfg.w)?,
        det: o.det.or(cfg.det).unwrap_or(Det::L),
        bound: o.bound.or(cfg.bound).unwrap_or(10),
        ample: pick(&o.ample, "ample", &cfg.ample)?,
        orient: pick(&o.orient, "orient", &cfg.orient)?,
        out: o.out.clone().or(cfg.out),
        format: o.format.or(cfg.format).unwrap_or(Format::Json),
    })
}

/// A Mukai vector from either JSON form, checked against the surface.
pub fn parse_vector(j: &serde_json::Value, s: &SurfaceModel) -> Result<MukaiVector, Failure> {
    let v = match j {
        serde_json::Value::Array(xs) if xs.len() == 3 => {
            let r = arith::int_from_json(&xs[0]).map_err(config_err)?;
            let c1 = xs[1]
                .as_array()
                .ok_or_else(|| config_err("c1 must be a list"))?
                .iter()
                .map(|x| arith::int_from_json(x).map_err(config_err))
                .collect::<Result<Vec<_>, _>>()?;
            let s2 = arith::rational_from_json(&xs[2]).map_err(config_err)? * arith::q(2);
            if !s2.is_integer() {
                return Err(config_err("the third component must be a multiple of 1/2"));
            }
            MukaiVector::new(r, c1, s2.to_integer())?
        }
        obj @ serde_json::Value::Object(_) => serde_json::from_value(obj.clone()).map_err(|e| config_err(format!("vector: {e}")))?,
        other => return Err(config_err(format!("cannot read a Mukai vector from {other}"))),
    };
    s.check(&v)?;
    Ok(v)
}

fn parse_ample(j: &serde_json::Value, s: &SurfaceModel) -> Result<Vec<BigInt>, Failure> {
    let a = j
        .as_array()
        .ok_or_else(|| config_err("ample must be a list of integers"))?
        .iter()
        .map(|x| arith::int_from_json(x).map_err(config_err))
        .collect::<Result<Vec<_>, _>>()?;
    slice::check_ample(&a, s)?;
    Ok(a)
}

fn need<'a>(x: &'a Option<serde_json::Value>, flag: &str) -> Result<&'a serde_json::Value, Failure> {
    x.as_ref().ok_or_else(|| config_err(format!("--{flag} is required")))
}

fn determinant(v: &MukaiVector, d: Det) -> ParityClass {
    ParityClass { eps: v.c1_residue(), kappa: u8::from(d == Det::LK) }
}

/// The wall through `v` and `w`, oriented by `--orient`, else by the slice
/// of `--ample`, else by a generic perturbation of `v` (see `Wall::near`).
pub fn wall_from(r: &Resolved) -> Result<(MukaiVector, Wall), Failure> {
    let s = &r.surface;
    let v = parse_vector(need(&r.v, "v")?, s)?;
    let w = parse_vector(need(&r.w, "w")?, s)?;
    if r.orient.is_none() && r.ample.is_none() {
        let wall = Wall::near(&v, &w, s)?;
        return Ok((v, wall));
    }
    let h = build_sublattice(&v, &w, s)?;
    let o = if let Some(c) = &r.orient {
        ConeOrientation::from_class(&h, &parse_vector(c, s)?, s)?
    } else if let Some(a) = &r.ample {
        let a = parse_ample(a, s)?;
        let locus = slice::wall_locus(&v, &w, &a, s)?;
        let (ps, t2) = locus.representative().ok_or_else(|| config_err(format!("the wall of v and w does not meet the slice ({})", locus.kind())))?;
        slice::orientation_at(&v, &h, &ps, &t2, &a, s)?
    } else {
        unreachable!("handled above")
    };
    Ok((v, Wall::new(h, s.clone(), o)?))
}

// ---------------------------------------------------------------- commands

pub fn cmd_classify(r: &Resolved) -> Result<Document, Failure> {
    let (v, wall) = wall_from(r)?;
    let report = classify::classify(&v, &determinant(&v, r.det), &wall)?;
    let checks = classify::cross_validate(&report, &wall);
    Ok(doc(Body::Classify(ClassifyDoc {
        surface: r.surface.name().to_string(),
        lattice: wall.lattice().into(),
        orientation: wall.orientation().clone(),
        report,
        checks,
    })))
}

pub fn walls_doc(r: &Resolved) -> Result<WallsDoc, Failure> {
    let s = &r.surface;
    let v = parse_vector(need(&r.v, "v")?, s)?;
    if !s.square(&v).is_positive() {
        return Err(config_err(format!("v² = {} must be positive", s.square(&v))));
    }
    let a = parse_ample(need(&r.ample, "ample")?, s)?;
    let det = determinant(&v, r.det);
    let (found, off_slice) = slice::potential_walls(&v, &a, r.bound, s)?;
    let walls: Vec<WallEntry> = found
        .par_iter()
        .map(|p| {
            let equation = slice::wall_equation(&v, &p.generator, &a, s).expect("checked inputs");
            let mut e = WallEntry {
                generator: p.generator.clone(),
                lattice: (&p.lattice).into(),
                locus: p.locus.clone(),
                equation,
                orientation: None,
                report: None,
                checks: Vec::new(),
                error: None,
            };
            let (ps, t2) = p.locus.representative().expect("walls meet the slice");
            let built = slice::orientation_at(&v, &p.lattice, &ps, &t2, &a, s).and_then(|o| Wall::new(p.lattice.clone(), s.clone(), o));
            match built.and_then(|wall| Ok((classify::classify(&v, &det, &wall)?, wall))) {
                Ok((rep, wall)) => {
                    e.orientation = Some(wall.orientation().clone());
                    e.checks = classify::cross_validate(&rep, &wall);
                    e.report = Some(rep);
                }
                Err(err) => e.error = Some(err.to_string()),
            }
            e
        })
        .collect();
    Ok(WallsDoc {
        surface: s.name().to_string(),
        v: v.clone(),
        determinant: det,
        ample: a.clone(),
        bound: r.bound,
        gieseker_bound: slice::gieseker_bound(&v, &a, s)?.map(|q| arith::rational_to_string(&q)),
        walls,
        off_slice,
    })
}

pub fn cmd_orbit(r: &Resolved) -> Result<Document, Failure> {
    let (v, wall) = wall_from(r)?;
    let (v0, word) = weyl::minimalize(&v, &wall)?;
    let kinds = weyl::word_kinds(&word);
    Ok(doc(Body::Orbit(OrbitDoc {
        surface: r.surface.name().to_string(),
        lattice: wall.lattice().into(),
        orientation: wall.orientation().clone(),
        v,
        v0,
        word,
        kinds,
    })))
}

pub fn cmd_decompose(r: &Resolved) -> Result<Document, Failure> {
    let (v, wall) = wall_from(r)?;
    let ds = hn::enumerate_decompositions(&v, &wall, DECOMPOSITION_LIMIT)?;
    let mut rows = ds
        .iter()
        .map(|d| Ok(DecompositionRow { parts: d.parts.clone(), codim: hn::codim(d, &wall)? }))
        .collect::<Result<Vec<_>, Error>>()?;
    rows.sort_by(|a, b| a.codim.cmp(&b.codim).then_with(|| a.parts.cmp(&b.parts)));
    let min_codim = hn::min_codim(&v, &wall)?;
    Ok(doc(Body::Decompose(DecomposeDoc {
        surface: r.surface.name().to_string(),
        lattice: wall.lattice().into(),
        orientation: wall.orientation().clone(),
        v,
        rows,
        min_codim,
    })))
}

fn doc(body: Body) -> Document {
    Document { version: FORMAT_VERSION.to_string(), body }
}

pub fn execute(command: &Command) -> Result<(Document, Resolved), Failure> {
    let (opts, kind) = match command {
        Command::Classify(o) => (o, 0),
        Command::Walls(o) => (o, 1),
        Command::Orbit(o) => (o, 2),
        Command::Decompose(o) => (o, 3),
        Command::SlicePlot(o) => (o, 4),
    };
    let r = resolve(opts)?;
    let d = match kind {
        0 => cmd_classify(&r)?,
        1 => doc(Body::Walls(walls_doc(&r)?)),
        2 => cmd_orbit(&r)?,
        3 => cmd_decompose(&r)?,
        _ => doc(Body::SlicePlot(walls_doc(&r)?)),
    };
    Ok((d, r))
}

// --------------------------------------------------------------- rendering

pub fn render(d: &Document, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(d.to_json() + "\n"),
        Format::Csv => render_csv(d),
        Format::Text => Ok(render_text(d)),
        Format::Svg => match &d.body {
            Body::Walls(w) | Body::SlicePlot(w) => Ok(render_svg(w)),
            _ => Err(config_err("svg output is only available for walls and slice-plot")),
        },
    }
}

fn tags(rep: &WallReport) -> String {
    let mut t: Vec<String> = rep.per_determinant[rep.determinant.label()].tss.iter().map(|x| format!("{x:?}")).collect();
    t.extend(rep.contraction.iter().map(|c| c.to_string()));
    t.extend(rep.non_normal_flags.iter().map(|f| format!("{f:?}")));
    t.join(" ")
}

fn locus_fields(l: &WallLocus) -> [String; 3] {
    match l {
        WallLocus::Circle { center, radius2 } => ["circle".into(), arith::rational_to_string(center), arith::rational_to_string(radius2)],
        WallLocus::VerticalLine { s } => ["vertical_line".into(), arith::rational_to_string(s), String::new()],
        other => [other.kind().into(), String::new(), String::new()],
    }
}

fn render_csv(d: &Document) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = |x: csv::Error| Failure::Invariant(x.to_string());
    match &d.body {
        Body::Classify(c) => {
            w.write_record(["v", "determinant", "tss", "contraction", "non_normal", "min_codim"]).map_err(e)?;
            for (label, r) in &c.report.per_determinant {
                let contraction: Vec<String> = r.contraction.iter().map(|x| x.to_string()).collect();
                w.write_record([
                    c.report.v.to_string(),
                    label.clone(),
                    format!("{:?}", r.tss),
                    contraction.join(" "),
                    format!("{:?}", r.non_normal_flags),
                    c.report.oracle.display_value(),
                ])
                .map_err(e)?;
            }
        }
        Body::Walls(x) | Body::SlicePlot(x) => {
            w.write_record(["kind", "center_or_s", "radius2", "w", "tags", "error"]).map_err(e)?;
            for entry in &x.walls {
                let [k, c, r] = locus_fields(&entry.locus);
                let t = entry.report.as_ref().map(tags).unwrap_or_default();
                w.write_record([k, c, r, entry.generator.to_string(), t, entry.error.clone().unwrap_or_default()]).map_err(e)?;
            }
        }
        Body::Orbit(o) => {
            w.write_record(["step", "root", "kind"]).map_err(e)?;
            for (i, root) in o.word.steps.iter().enumerate() {
                w.write_record([(i + 1).to_string(), root.class.to_string(), root.kind.to_string()]).map_err(e)?;
            }
        }
        Body::Decompose(x) => {
            w.write_record(["codim", "parts"]).map_err(e)?;
            for row in &x.rows {
                let parts: Vec<String> = row.parts.iter().map(|p| p.to_string()).collect();
                w.write_record([row.codim.to_string(), parts.join(" + ")]).map_err(e)?;
            }
        }
    }
    String::from_utf8(w.into_inner().map_err(|x| Failure::Invariant(x.to_string()))?).map_err(|x| Failure::Invariant(x.to_string()))
}

fn render_text(d: &Document) -> String {
    let mut out = String::new();
    match &d.body {
        Body::Classify(c) => {
            let r = &c.report;
            let _ = writeln!(out, "v = {}  v² = {}  lattice {}", r.v, r.v_square, r.lattice_case.tag);
            let _ = writeln!(out, "minimal v0 = {} after {} reflections", r.minimal.v0, r.minimal.word.len());
            let _ = writeln!(out, "min codim (oracle) = {}", r.oracle.display_value());
            for (label, p) in &r.per_determinant {
                let contraction: Vec<String> = p.contraction.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "{label:>4}: tss {:?}  contraction [{}]  non-normal {:?}", p.tss, contraction.join(", "), p.non_normal_flags);
            }
            for n in &r.notes {
                let _ = writeln!(out, "note: {n}");
            }
            for ch in c.checks.iter().filter(|c| !c.pass) {
                let why = ch.explained.as_deref().unwrap_or("UNEXPLAINED");
                let _ = writeln!(out, "check failed [{}] {}: {} ({why})", ch.determinant, ch.name, ch.detail);
            }
        }
        Body::Walls(x) | Body::SlicePlot(x) => {
            let _ = writeln!(out, "{} walls for v = {} (bound {}, {} lattices off the slice)", x.walls.len(), x.v, x.bound, x.off_slice);
            for e in &x.walls {
                let [k, c, r] = locus_fields(&e.locus);
                let t = e.report.as_ref().map(tags).or_else(|| e.error.clone()).unwrap_or_default();
                let _ = writeln!(out, "{k:<13} {c:>8} {r:>8}  w = {}  {t}", e.generator);
            }
        }
        Body::Orbit(o) => {
            let _ = writeln!(out, "v = {} -> v0 = {} in {} steps", o.v, o.v0, o.word.len());
            for (i, root) in o.word.steps.iter().enumerate() {
                let _ = writeln!(out, "{:>3}. reflect in {} ({})", i + 1, root.class, root.kind);
            }
        }
        Body::Decompose(x) => {
            let _ = writeln!(out, "{} decompositions of {}; min codim {}", x.rows.len(), x.v, x.min_codim.display_value());
            for row in &x.rows {
                let parts: Vec<String> = row.parts.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(out, "{:>4}  {}", row.codim, parts.join(" + "));
            }
        }
    }
    out
}

fn colour(rep: Option<&WallReport>) -> &'static str {
    let Some(r) = rep else { return "#bbbbbb" };
    match r.contraction.first() {
        Some(c) if c.is_divisorial() => "#c0392b",
        Some(c) if c.is_fibration() => "#8e44ad",
        Some(Contraction::Flopping(_)) => "#2471a3",
        _ => "#7f8c8d",
    }
}

fn f64_of(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn render_svg(x: &WallsDoc) -> String {
    let (w, h, pad) = (800.0, 420.0, 30.0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut top: f64 = 1.0;
    for e in &x.walls {
        match &e.locus {
            WallLocus::Circle { center, radius2 } => {
                let (c, r) = (f64_of(center), f64_of(radius2).sqrt());
                lo = lo.min(c - r);
                hi = hi.max(c + r);
                top = top.max(r);
            }
            WallLocus::VerticalLine { s } => {
                lo = lo.min(f64_of(s) - 1.0);
                hi = hi.max(f64_of(s) + 1.0);
            }
            _ => {}
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 1.0);
    }
    let sx = (w - 2.0 * pad) / (hi - lo);
    let sy = (h - 2.0 * pad) / (top * 1.1);
    let px = |s: f64| pad + (s - lo) * sx;
    let py = |t: f64| h - pad - t * sy;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(out, r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000000"/>"##, pad, py(0.0), w - pad, py(0.0));
    let _ = writeln!(out, r##"<text x="{}" y="{}" font-size="12">v = {} on s + it, s in [{lo:.3}, {hi:.3}]</text>"##, pad, pad - 10.0, x.v);
    for e in &x.walls {
        let stroke = colour(e.report.as_ref());
        let title = e.report.as_ref().map(tags).or_else(|| e.error.clone()).unwrap_or_default();
        match &e.locus {
            WallLocus::Circle { center, radius2 } => {
                let (c, r) = (f64_of(center), f64_of(radius2).sqrt());
                let _ = writeln!(
                    out,
                    r#"<path d="M {:.2} {:.2} A {:.2} {:.2} 0 0 1 {:.2} {:.2}" fill="none" stroke="{stroke}" stroke-width="1.5"><title>{title}</title></path>"#,
                    px(c - r),
                    py(0.0),
                    r * sx,
                    r * sy,
                    px(c + r),
                    py(0.0)
                );
            }
            WallLocus::VerticalLine { s } => {
                let _ = writeln!(
                    out,
                    r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{stroke}" stroke-width="1.5"><title>{title}</title></line>"#,
                    px(f64_of(s)),
                    py(0.0),
                    pad
                );
            }
            _ => {}
        }
    }
    out.push_str("</svg>\n");
    out
}

// ------------------------------------------------------------------ driver

fn threads() -> Result<Option<usize>, Failure> {
    match std::env::var("EW_THREADS") {
        Ok(s) => s.trim().parse::<usize>().ok().filter(|&n| n > 0).map(Some).ok_or_else(|| config_err(format!("EW_THREADS={s} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// Runs one command and returns the rendered output and the exit status.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) { 0 } else { 1 };
            return (code, if code == 0 { e.to_string() } else { String::new() }, if code == 0 { String::new() } else { e.to_string() });
        }
    };
    let job = || -> Result<(i32, String, Option<PathBuf>), Failure> {
        let (d, r) = execute(&cli.command)?;
        Ok((d.status(), render(&d, r.format)?, r.out))
    };
    let result = match threads() {
        Ok(Some(n)) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(job),
            Err(e) => Err(Failure::Invariant(e.to_string())),
        },
        Ok(None) => job(),
        Err(f) => Err(f),
    };
    match result {
        Ok((code, text, None)) => (code, text, String::new()),
        Ok((code, text, Some(path))) => match std::fs::write(&path, text) {
            Ok(()) => (code, String::new(), String::new()),
            Err(e) => (1, String::new(), format!("cannot write {}: {e}\n", path.display())),
        },
        Err(f) => {
            let msg = match &f {
                Failure::Config(m) => format!("error: {m}\n"),
                Failure::Outside(m) => format!("outside hypotheses: {m}\n"),
                Failure::Invariant(m) => format!("invariant violated: {m}\n"),
            };
            (f.code(), String::new(), msg)
        }
    }
}
