//! Rank-two hyperbolic sublattices of the Mukai lattice, their roots and
//! their positive and effective cones.
//!
//! Elements of a [`RankTwoLattice`] are handled in basis coordinates
//! `(p, q)`. Roots are found exactly: a root with prescribed value of a
//! linear functional is the intersection of a line with a conic, and the
//! infinite families in the non-isotropic case are generated by the Pell
//! automorph of the binary form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, qi, Q};
use crate::error::{Error, Result};
use crate::lattice::{self, MukaiVector, SurfaceModel};
use crate::pell;

/// Row-style Hermite normal form; zero rows are dropped.
pub fn hnf_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    if a.is_empty() {
        return a;
    }
    let ncols = a[0].len();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        // Euclid down the column until one nonzero entry is left at row r
        loop {
            let piv = (r..a.len()).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs());
            let Some(p) = piv else { break };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].div_floor(&a[r][c]);
                for j in c..ncols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for j in c..ncols {
                a[r][j] = -&a[r][j];
            }
        }
        for i in 0..r {
            let f = a[i][c].div_floor(&a[r][c]);
            if !f.is_zero() {
                for j in c..ncols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

fn content(x: &[BigInt]) -> BigInt {
    arith::gcd_all(x.iter())
}

/// An integer vector `y` with `y · e = 1` for a primitive `e`.
fn dual_unit(e: &[BigInt]) -> Vec<BigInt> {
    let mut y = vec![BigInt::zero(); e.len()];
    let mut g = BigInt::zero();
    for (i, ei) in e.iter().enumerate() {
        let (ng, a, b) = arith::ext_gcd(&g, ei);
        // new combination: a * (old combination) + b * e_i
        for yj in y.iter_mut().take(i) {
            *yj *= &a;
        }
        y[i] = b;
        g = ng;
    }
    debug_assert!(g.is_one());
    y
}

/// A saturated or unsaturated rank-two sublattice of signature (1,1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTwoLattice {
    pub basis: [MukaiVector; 2],
    pub gram2: [[BigInt; 2]; 2],
    pub saturated: bool,
    minor: (usize, usize),
}

impl RankTwoLattice {
    pub fn from_basis(b1: MukaiVector, b2: MukaiVector, s: &SurfaceModel) -> Result<Self> {
        s.check(&b1)?;
        s.check(&b2)?;
        let c1 = b1.coords();
        let c2 = b2.coords();
        let n = c1.len();
        let mut g = BigInt::zero();
        let mut minor = None;
        for i in 0..n {
            for j in i + 1..n {
                let m = &c1[i] * &c2[j] - &c1[j] * &c2[i];
                if !m.is_zero() && minor.is_none() {
                    minor = Some((i, j));
                }
                g = g.gcd(&m);
            }
        }
        let minor = minor.ok_or_else(|| Error::Degenerate("generators are linearly dependent".into()))?;
        let gram2 = [[s.square(&b1), s.pair(&b1, &b2)], [s.pair(&b1, &b2), s.square(&b2)]];
        let det = &gram2[0][0] * &gram2[1][1] - &gram2[0][1] * &gram2[0][1];
        if !det.is_negative() {
            return Err(Error::Degenerate(format!("span has Gram determinant {det}; signature (1,1) needs it negative")));
        }
        Ok(RankTwoLattice { basis: [b1, b2], gram2, saturated: g.is_one(), minor })
    }

    pub fn a(&self) -> &BigInt {
        &self.gram2[0][0]
    }
    pub fn b(&self) -> &BigInt {
        &self.gram2[0][1]
    }
    pub fn c(&self) -> &BigInt {
        &self.gram2[1][1]
    }

    /// Determinant of the Gram matrix (negative).
    pub fn disc(&self) -> BigInt {
        self.a() * self.c() - self.b() * self.b()
    }

    /// `b² − ac > 0`; a perfect square exactly when the lattice is isotropic.
    pub fn delta(&self) -> BigInt {
        -self.disc()
    }

    pub fn is_isotropic(&self) -> bool {
        arith::exact_sqrt(&self.delta()).is_some()
    }

    pub fn element(&self, p: &BigInt, q: &BigInt) -> MukaiVector {
        &self.basis[0].scale(p) + &self.basis[1].scale(q)
    }

    pub fn form(&self, p: &BigInt, q: &BigInt) -> BigInt {
        self.a() * p * p + self.b() * p * q * 2 + self.c() * q * q
    }

    pub fn bilinear(&self, x: &(BigInt, BigInt), y: &(BigInt, BigInt)) -> BigInt {
        self.a() * &x.0 * &y.0 + self.b() * (&x.0 * &y.1 + &x.1 * &y.0) + self.c() * &x.1 * &y.1
    }

    /// Rational coordinates of `x` if it lies in the rational span.
    pub fn rational_coords(&self, x: &MukaiVector) -> Option<(Q, Q)> {
        let (i, j) = self.minor;
        let c1 = self.basis[0].coords();
        let c2 = self.basis[1].coords();
        let cx = x.coords();
        if cx.len() != c1.len() {
            return None;
        }
        let det = &c1[i] * &c2[j] - &c1[j] * &c2[i];
        let p = Q::new(&cx[i] * &c2[j] - &cx[j] * &c2[i], det.clone());
        let q = Q::new(&c1[i] * &cx[j] - &c1[j] * &cx[i], det);
        let ok = (0..cx.len()).all(|k| &p * qi(&c1[k]) + &q * qi(&c2[k]) == qi(&cx[k]));
        ok.then_some((p, q))
    }

    pub fn coords(&self, x: &MukaiVector) -> Option<(BigInt, BigInt)> {
        let (p, q) = self.rational_coords(x)?;
        (p.is_integer() && q.is_integer()).then(|| (p.to_integer(), q.to_integer()))
    }

    pub fn contains(&self, x: &MukaiVector) -> bool {
        self.coords(x).is_some()
    }

    /// Hermite normal form of the basis in ambient coordinates; equal for
    /// equal lattices.
    pub fn canonical_basis(&self) -> Vec<Vec<BigInt>> {
        hnf_rows(&[self.basis[0].coords(), self.basis[1].coords()])
    }

    pub fn same_lattice(&self, other: &RankTwoLattice) -> bool {
        self.canonical_basis() == other.canonical_basis()
    }

    /// Residue of `c1` mod 2 of the element with coordinates `(p, q)`.
    pub fn residue(&self, p: &BigInt, q: &BigInt) -> Vec<u8> {
        self.element(p, q).c1_residue()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "basis": [self.basis[0], self.basis[1]],
            "gram2": self.gram2.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "discriminant": self.disc().to_string(),
            "saturated": self.saturated,
            "isotropic": self.is_isotropic(),
        })
    }
}

/// The saturation of `Zv + Zw` in the Mukai lattice, with an HNF basis.
pub fn build_sublattice(v: &MukaiVector, w: &MukaiVector, s: &SurfaceModel) -> Result<RankTwoLattice> {
    s.check(v)?;
    s.check(w)?;
    let rows = hnf_rows(&[v.coords(), w.coords()]);
    if rows.len() < 2 {
        return Err(Error::Degenerate("v and w are linearly dependent".into()));
    }
    let e: Vec<BigInt> = {
        let c = content(&rows[1]);
        rows[1].iter().map(|x| x / &c).collect()
    };
    let y = dual_unit(&e);
    let t: BigInt = y.iter().zip(&rows[0]).map(|(a, b)| a * b).sum();
    let proj: Vec<BigInt> = rows[0].iter().zip(&e).map(|(h, ei)| h - &t * ei).collect();
    let c = content(&proj);
    let b1: Vec<BigInt> = proj.iter().map(|x| x / &c).collect();
    let basis = hnf_rows(&[b1, e]);
    let h = RankTwoLattice::from_basis(MukaiVector::from_coords(&basis[0]), MukaiVector::from_coords(&basis[1]), s)?;
    if !h.saturated || !h.contains(v) || !h.contains(w) {
        return Err(Error::Invariant("saturation failed".into()));
    }
    Ok(h)
}

/// The two primitive isotropic classes of `H` (signs not normalised), or
/// `None` when the form represents zero only trivially.
pub fn find_isotropic(h: &RankTwoLattice) -> Option<(MukaiVector, MukaiVector)> {
    let (u1, u2) = isotropic_coords(h)?;
    Some((h.element(&u1.0, &u1.1), h.element(&u2.0, &u2.1)))
}

fn primitive_pair(p: BigInt, q: BigInt) -> (BigInt, BigInt) {
    let g = p.gcd(&q);
    (p / &g, q / g)
}

fn isotropic_coords(h: &RankTwoLattice) -> Option<((BigInt, BigInt), (BigInt, BigInt))> {
    let d = arith::exact_sqrt(&h.delta())?;
    let (a, b, c) = (h.a(), h.b(), h.c());
    if a.is_zero() {
        // (1,0) and the solution of 2b p + c q = 0
        return Some(((int(1), int(0)), primitive_pair(c.clone(), -b * 2u32)));
    }
    // p/q = (-b ± d)/a
    let u1 = primitive_pair(-b + &d, a.clone());
    let u2 = primitive_pair(-b - &d, a.clone());
    Some((u1, u2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RootKind {
    Exceptional,
    Spherical,
}

impl RootKind {
    pub fn square(self) -> i64 {
        match self {
            RootKind::Exceptional => -1,
            RootKind::Spherical => -2,
        }
    }

    /// The `c` in `R_w(u) = u + c⟨u,w⟩w`.
    pub fn reflection_coefficient(self) -> i64 {
        match self {
            RootKind::Exceptional => 2,
            RootKind::Spherical => 1,
        }
    }

    fn from_m(m: u8) -> Self {
        if m == 1 {
            RootKind::Exceptional
        } else {
            RootKind::Spherical
        }
    }

    fn m(self) -> u8 {
        match self {
            RootKind::Exceptional => 1,
            RootKind::Spherical => 2,
        }
    }
}

impl fmt::Display for RootKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootKind::Exceptional => "exceptional",
            RootKind::Spherical => "spherical",
        })
    }
}

/// A class of square −1, or of square −2 whose `c1` is a nodal residue.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub class: MukaiVector,
    pub kind: RootKind,
}

/// Classifies a class as a root, if it is one.
pub fn root_kind(x: &MukaiVector, s: &SurfaceModel) -> Option<RootKind> {
    let sq = s.square(x);
    if sq == int(-1) {
        Some(RootKind::Exceptional)
    } else if sq == int(-2) && s.is_nodal_residue(&x.c1_residue()) {
        Some(RootKind::Spherical)
    } else {
        None
    }
}

/// Integer points `(p, q)` with `f0 p + f1 q = k` and `Q(p, q) = target`.
/// At most two, since the line is not isotropic for the callers here.
fn line_conic(h: &RankTwoLattice, f: &(BigInt, BigInt), k: &BigInt, target: &BigInt) -> Vec<(BigInt, BigInt)> {
    let (g, x, y) = arith::ext_gcd(&f.0, &f.1);
    if g.is_zero() || !k.is_multiple_of(&g) {
        return Vec::new();
    }
    let kk = k / &g;
    let p0 = &x * &kk;
    let q0 = &y * &kk;
    let dp = &f.1 / &g;
    let dq = -(&f.0 / &g);
    // Q(p0 + t dp, q0 + t dq) = A t² + B t + C
    let a_ = h.form(&dp, &dq);
    let b_ = h.bilinear(&(p0.clone(), q0.clone()), &(dp.clone(), dq.clone())) * 2u32;
    let c_ = h.form(&p0, &q0) - target;
    let mut ts = Vec::new();
    if a_.is_zero() {
        if b_.is_zero() {
            return Vec::new();
        }
        if (-&c_).is_multiple_of(&b_) {
            ts.push(-&c_ / &b_);
        }
    } else {
        let disc = &b_ * &b_ - &a_ * &c_ * 4u32;
        if let Some(r) = arith::exact_sqrt(&disc) {
            let den = &a_ * 2u32;
            for num in [-&b_ + &r, -&b_ - &r] {
                if num.is_multiple_of(&den) {
                    let t = num / &den;
                    if !ts.contains(&t) {
                        ts.push(t);
                    }
                }
            }
        }
    }
    ts.into_iter().map(|t| (&p0 + &t * &dp, &q0 + &t * &dq)).collect()
}

/// All roots of `H` whose basis coordinates are bounded by `bound` in
/// absolute value, together with their kinds.
pub fn enumerate_roots(h: &RankTwoLattice, s: &SurfaceModel, bound: u64) -> Vec<Root> {
    let bound = BigInt::from(bound);
    let mut out = Vec::new();
    for m in [1u8, 2] {
        let target = -int(m as i64);
        let mut p = -bound.clone();
        while p <= bound {
            // c q² + 2 b p q + (a p² - target) = 0
            let (a2, b2, c2) = (h.c().clone(), h.b() * &p * 2u32, h.a() * &p * &p - &target);
            let mut qs = Vec::new();
            if a2.is_zero() {
                if !b2.is_zero() && (-&c2).is_multiple_of(&b2) {
                    qs.push(-&c2 / &b2);
                }
            } else {
                let disc = &b2 * &b2 - &a2 * &c2 * 4u32;
                if let Some(r) = arith::exact_sqrt(&disc) {
                    for num in [-&b2 + &r, -&b2 - &r] {
                        let den = &a2 * 2u32;
                        if num.is_multiple_of(&den) {
                            let qv = num / den;
                            if !qs.contains(&qv) {
                                qs.push(qv);
                            }
                        }
                    }
                }
            }
            for qv in qs {
                if qv.abs() <= bound {
                    let x = h.element(&p, &qv);
                    if m == 1 || s.is_nodal_residue(&x.c1_residue()) {
                        out.push(Root { class: x, kind: RootKind::from_m(m) });
                    }
                }
            }
            p += 1;
        }
    }
    out.sort();
    out
}

/// Which side of `v^⊥`-free space counts as effective: the functional
/// `f(x) = ⟨h, x⟩` for a class `h ∈ H_Q` of positive square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeOrientation {
    /// `f(p, q) = f0 p + f1 q` in basis coordinates, primitive.
    #[serde(with = "crate::arith::serde_str_pair")]
    pub functional: (BigInt, BigInt),
}

impl ConeOrientation {
    /// Orientation from integer coefficients of the functional on the basis.
    pub fn from_functional(h: &RankTwoLattice, f0: BigInt, f1: BigInt) -> Result<Self> {
        if f0.is_zero() && f1.is_zero() {
            return Err(Error::Orientation("zero functional".into()));
        }
        let g = f0.gcd(&f1);
        let f = (f0 / &g, f1 / &g);
        let kern = (f.1.clone(), -f.0.clone());
        if !h.form(&kern.0, &kern.1).is_negative() {
            return Err(Error::Orientation("kernel is not negative definite".into()));
        }
        Ok(ConeOrientation { functional: f })
    }

    /// Orientation from rational coefficients, e.g. real parts of central charges.
    pub fn from_rational_functional(h: &RankTwoLattice, f0: &Q, f1: &Q) -> Result<Self> {
        let den = f0.denom().lcm(f1.denom());
        let a = (f0 * qi(&den)).to_integer();
        let b = (f1 * qi(&den)).to_integer();
        Self::from_functional(h, a, b)
    }

    /// `f = ⟨c, ·⟩` for a class `c ∈ H` of positive square.
    pub fn from_class(h: &RankTwoLattice, c: &MukaiVector, s: &SurfaceModel) -> Result<Self> {
        if !h.contains(c) {
            return Err(Error::NotInLattice(c.to_string()));
        }
        if !s.square(c).is_positive() {
            return Err(Error::Orientation("the orienting class must have positive square".into()));
        }
        Self::from_functional(h, s.pair(c, &h.basis[0]), s.pair(c, &h.basis[1]))
    }

    /// The effective half-plane containing both generators.
    pub fn from_generators(h: &RankTwoLattice, g1: &MukaiVector, g2: &MukaiVector, s: &SurfaceModel) -> Result<Self> {
        let sum = g1 + g2;
        let o = Self::from_class(h, &sum, s)?;
        if o.eval(h, g1).is_positive() && o.eval(h, g2).is_positive() {
            Ok(o)
        } else {
            Err(Error::Orientation("generators do not span a proper cone around a positive class".into()))
        }
    }

    pub fn eval_coords(&self, p: &BigInt, q: &BigInt) -> BigInt {
        &self.functional.0 * p + &self.functional.1 * q
    }

    /// `f(x)`; `x` must lie in `H`.
    pub fn eval(&self, h: &RankTwoLattice, x: &MukaiVector) -> BigInt {
        let (p, q) = h.coords(x).expect("class must lie in H");
        self.eval_coords(&p, &q)
    }

    /// Primitive generator of the kernel.
    pub fn kernel(&self) -> (BigInt, BigInt) {
        (self.functional.1.clone(), -self.functional.0.clone())
    }

    /// `h²` for the class `h ∈ H_Q` with `f = ⟨h, ·⟩`.
    pub fn h_square(&self, h: &RankTwoLattice) -> Q {
        let k = self.kernel();
        Q::new(h.form(&k.0, &k.1), h.disc())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeTag {
    NoNegatives,
    OneExceptional,
    OneSpherical,
    TwoSpherical,
    TwoExceptional,
    MixedSphericalExceptional,
}

impl fmt::Display for LatticeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCase {
    pub tag: LatticeTag,
    pub witnesses: Vec<Root>,
}

/// An extremal ray of the effective cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConeRay {
    Root { root: Root },
    Isotropic { class: MukaiVector },
    /// The ray through `(p, q)` with `p = (p_rat + p_surd √disc) / den`, `q = 1`.
    Irrational { p_rat: String, p_surd: String, disc: String, den: String },
}

type Mat2 = [[BigInt; 2]; 2];

fn mat_apply(m: &Mat2, x: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&m[0][0] * &x.0 + &m[0][1] * &x.1, &m[1][0] * &x.0 + &m[1][1] * &x.1)
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

#[derive(Clone, Debug)]
enum Structure {
    Isotropic {
        /// Effective primitive isotropic classes, coordinates.
        rays: [(BigInt, BigInt); 2],
        root: Option<(BigInt, BigInt, RootKind)>,
    },
    NonIsotropic {
        /// Extremal effective roots on the branches `⟨x, n⟩ > 0` and `< 0`.
        extremal: Option<[(BigInt, BigInt, RootKind); 2]>,
    },
}

/// A potential wall: a saturated hyperbolic lattice with a choice of
/// effective side.
#[derive(Clone, Debug)]
pub struct Wall {
    lattice: RankTwoLattice,
    surface: SurfaceModel,
    orient: ConeOrientation,
    structure: Structure,
}

impl Wall {
    pub fn new(lattice: RankTwoLattice, surface: SurfaceModel, orient: ConeOrientation) -> Result<Self> {
        if !lattice.saturated {
            return Err(Error::Precondition("the wall lattice must be saturated".into()));
        }
        let k = orient.kernel();
        if !lattice.form(&k.0, &k.1).is_negative() {
            return Err(Error::Orientation("kernel is not negative definite".into()));
        }
        if let Some(kind) = root_kind(&lattice.element(&k.0, &k.1), &surface) {
            return Err(Error::Orientation(format!("a root of kind {kind} lies on the kernel; choose a generic orientation")));
        }
        let mut wall = Wall {
            lattice,
            surface,
            orient,
            structure: Structure::NonIsotropic { extremal: None },
        };
        wall.structure = wall.analyse()?;
        Ok(wall)
    }

    /// The wall through `v` and `w` oriented by `⟨c, ·⟩` for the first class
    /// `c = N v ± b_i` (`N = 1, 2, …`, `b_i` the basis of `H`) that is generic
    /// and keeps `v` effective: a small perturbation of `v` itself.
    pub fn near(v: &MukaiVector, w: &MukaiVector, s: &SurfaceModel) -> Result<Self> {
        let h = build_sublattice(v, w, s)?;
        for n in 1..=64u32 {
            for b in [&h.basis[0], &h.basis[1]] {
                for c in [&v.scale(&n.into()) + b, &v.scale(&n.into()) - b] {
                    let Ok(o) = ConeOrientation::from_class(&h, &c, s) else { continue };
                    match Wall::new(h.clone(), s.clone(), o) {
                        Ok(wall) if wall.in_cone(v)? => return Ok(wall),
                        Ok(_) | Err(Error::Orientation(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Err(Error::Orientation(format!("no generic orientation near {v}")))
    }

    /// The wall through `v` and `w`, with the effective side given by `⟨c, ·⟩`.
    pub fn through(v: &MukaiVector, w: &MukaiVector, orient_class: &MukaiVector, s: &SurfaceModel) -> Result<Self> {
        let h = build_sublattice(v, w, s)?;
        let o = ConeOrientation::from_class(&h, orient_class, s)?;
        Wall::new(h, s.clone(), o)
    }

    pub fn lattice(&self) -> &RankTwoLattice {
        &self.lattice
    }

    pub fn surface(&self) -> &SurfaceModel {
        &self.surface
    }

    pub fn orientation(&self) -> &ConeOrientation {
        &self.orient
    }

    pub fn pair(&self, a: &MukaiVector, b: &MukaiVector) -> BigInt {
        self.surface.pair(a, b)
    }

    fn el(&self, x: &(BigInt, BigInt)) -> MukaiVector {
        self.lattice.element(&x.0, &x.1)
    }

    /// `f(x)` for `x ∈ H`.
    pub fn f(&self, x: &MukaiVector) -> Result<BigInt> {
        let (p, q) = self.lattice.coords(x).ok_or_else(|| Error::NotInLattice(x.to_string()))?;
        Ok(self.orient.eval_coords(&p, &q))
    }

    fn fc(&self, x: &(BigInt, BigInt)) -> BigInt {
        self.orient.eval_coords(&x.0, &x.1)
    }

    /// Which side of the orienting line: sign of `⟨x, n⟩` for the kernel
    /// generator `n`.
    fn branch(&self, x: &(BigInt, BigInt)) -> i32 {
        arith::sgn(&self.lattice.bilinear(x, &self.orient.kernel()))
    }

    fn kind_at(&self, x: &(BigInt, BigInt), m: u8) -> Option<RootKind> {
        if m == 1 {
            Some(RootKind::Exceptional)
        } else if self.surface.is_nodal_residue(&self.lattice.residue(&x.0, &x.1)) {
            Some(RootKind::Spherical)
        } else {
            None
        }
    }

    fn analyse(&self) -> Result<Structure> {
        let h = &self.lattice;
        if let Some((u1, u2)) = isotropic_coords(h) {
            let sign = |u: (BigInt, BigInt)| if self.fc(&u).is_positive() { u } else { (-u.0, -u.1) };
            let rays = [sign(u1), sign(u2)];
            let roots = self.isotropic_roots(&rays);
            let effective: Vec<_> = roots.into_iter().filter(|(p, q, _)| self.fc(&(p.clone(), q.clone())).is_positive()).collect();
            if effective.len() > 1 {
                return Err(Error::Invariant("isotropic lattice with more than one effective root".into()));
            }
            return Ok(Structure::Isotropic { rays, root: effective.into_iter().next() });
        }
        let form = pell::Form { a: h.a().clone(), b: h.b() * 2u32, c: h.c().clone() };
        let m = pell::automorph(&form)?;
        let m_inv: Mat2 = [[m[1][1].clone(), -&m[0][1]], [-&m[1][0], m[0][0].clone()]];
        // smallest power acting trivially mod 2 on coordinates
        let mut period = 1;
        let mut pw = m.clone();
        while !(pw[0][0].is_odd() && pw[1][1].is_odd() && pw[0][1].is_even() && pw[1][0].is_even()) {
            pw = mat_mul(&pw, &m);
            period += 1;
        }
        let mut step = m.clone();
        let mut step_inv = m_inv.clone();
        for _ in 1..period {
            step = mat_mul(&step, &m);
            step_inv = mat_mul(&step_inv, &m_inv);
        }
        let mut best: [Option<(BigInt, BigInt, RootKind)>; 2] = [None, None];
        for mm in [1u8, 2] {
            for rep in pell::represent(&form, &-int(mm as i64))? {
                // each orbit of m splits into `period` orbits of `step`
                let mut x = rep;
                for _ in 0..period {
                    if let Some(kind) = self.kind_at(&x, mm) {
                        let low = self.lowest_positive(&x, &step, &step_inv);
                        let slot = if self.branch(&low) > 0 { 0 } else { 1 };
                        let better = match &best[slot] {
                            None => true,
                            Some((p, q, kd)) => {
                                // compare m / f²: larger is further out
                                let fo = self.fc(&(p.clone(), q.clone()));
                                let fl = self.fc(&low);
                                int(kind.m() as i64) * &fo * &fo > int(kd.m() as i64) * &fl * &fl
                            }
                        };
                        if better {
                            best[slot] = Some((low.0, low.1, kind));
                        }
                    }
                    x = mat_apply(&m, &x);
                }
            }
        }
        let extremal = match best {
            [Some(a), Some(b)] => Some([a, b]),
            [None, None] => None,
            _ => return Err(Error::Invariant("effective roots on only one branch of a non-isotropic lattice".into())),
        };
        Ok(Structure::NonIsotropic { extremal })
    }

    /// Element of the orbit of `x` under `step` with the least positive `f`.
    fn lowest_positive(&self, x: &(BigInt, BigInt), step: &Mat2, step_inv: &Mat2) -> (BigInt, BigInt) {
        let fx = self.fc(x);
        let up = mat_apply(step, x);
        let (inc, dec) = if self.fc(&up) > fx { (step, step_inv) } else { (step_inv, step) };
        let mut y = x.clone();
        while !self.fc(&y).is_positive() {
            y = mat_apply(inc, &y);
        }
        loop {
            let z = mat_apply(dec, &y);
            if self.fc(&z).is_positive() {
                y = z;
            } else {
                return y;
            }
        }
    }

    fn isotropic_roots(&self, rays: &[(BigInt, BigInt); 2]) -> Vec<(BigInt, BigInt, RootKind)> {
        let h = &self.lattice;
        let (u1, u2) = (&rays[0], &rays[1]);
        let index = (&u1.0 * &u2.1 - &u1.1 * &u2.0).abs();
        let pu = h.bilinear(u1, u2);
        let mut out = Vec::new();
        for mm in [1u8, 2] {
            // x = (A u1 + B u2) / I with 2 A B ⟨u1,u2⟩ = -m I²
            let num = int(mm as i64) * &index * &index;
            let den = &pu * 2u32;
            if !num.is_multiple_of(&den) {
                continue;
            }
            let n = (num / den).abs();
            for a in divisors(&n) {
                for sa in [1i64, -1] {
                    let aa = &a * sa;
                    let bb = -(&n / &a) * sa * arith::sgn(&pu);
                    let p = &aa * &u1.0 + &bb * &u2.0;
                    let q = &aa * &u1.1 + &bb * &u2.1;
                    if p.is_multiple_of(&index) && q.is_multiple_of(&index) {
                        let x = (p / &index, q / &index);
                        debug_assert_eq!(h.form(&x.0, &x.1), -int(mm as i64));
                        if let Some(kind) = self.kind_at(&x, mm) {
                            out.push((x.0, x.1, kind));
                        }
                    }
                }
            }
        }
        out
    }

    /// The effective primitive isotropic classes, if `H` is isotropic.
    pub fn isotropic_classes(&self) -> Option<[MukaiVector; 2]> {
        match &self.structure {
            Structure::Isotropic { rays, .. } => Some([self.el(&rays[0]), self.el(&rays[1])]),
            _ => None,
        }
    }

    /// `(u1, u2)` labelled for isotropic walls:
    /// with an effective root `w`, `u1` is the one with `⟨u1, w⟩ > 0`;
    /// otherwise `ℓ(u1) ≥ ℓ(u2)`, ties broken by `⟨v, u1⟩ ≥ ⟨v, u2⟩`.
    pub fn isotropic_labelled(&self, v: &MukaiVector) -> Option<[MukaiVector; 2]> {
        let [a, b] = self.isotropic_classes()?;
        let swap = match self.effective_isotropic_root() {
            Some(w) => !self.pair(&a, &w.class).is_positive(),
            None => {
                let (la, lb) = (lattice::ell(&a).ok()?, lattice::ell(&b).ok()?);
                la < lb || (la == lb && self.pair(v, &a) < self.pair(v, &b))
            }
        };
        Some(if swap { [b, a] } else { [a, b] })
    }

    fn effective_isotropic_root(&self) -> Option<Root> {
        match &self.structure {
            Structure::Isotropic { root: Some((p, q, kind)), .. } => Some(Root { class: self.lattice.element(p, q), kind: *kind }),
            _ => None,
        }
    }

    /// A class of square −2 that is not a root (non-nodal residue), if the
    /// lattice is isotropic and has one.
    pub fn non_nodal_minus_two(&self) -> Option<MukaiVector> {
        let Structure::Isotropic { rays, .. } = &self.structure else { return None };
        let h = &self.lattice;
        let (u1, u2) = (&rays[0], &rays[1]);
        let index = (&u1.0 * &u2.1 - &u1.1 * &u2.0).abs();
        let pu = h.bilinear(u1, u2);
        let num = int(2) * &index * &index;
        let den = &pu * 2u32;
        if !num.is_multiple_of(&den) {
            return None;
        }
        let n = (num / den).abs();
        for a in divisors(&n) {
            let bb = -(&n / &a) * arith::sgn(&pu);
            let p = &a * &u1.0 + &bb * &u2.0;
            let q = &a * &u1.1 + &bb * &u2.1;
            if p.is_multiple_of(&index) && q.is_multiple_of(&index) {
                let x = h.element(&(p / &index), &(q / &index));
                if !self.surface.is_nodal_residue(&x.c1_residue()) {
                    return Some(x);
                }
            }
        }
        None
    }

    /// The extremal effective roots (stable classes) of the effective cone.
    pub fn stable_roots(&self) -> Vec<Root> {
        match &self.structure {
            Structure::Isotropic { .. } => self.effective_isotropic_root().into_iter().collect(),
            Structure::NonIsotropic { extremal: Some(e), .. } => {
                e.iter().map(|(p, q, kind)| Root { class: self.lattice.element(p, q), kind: *kind }).collect()
            }
            Structure::NonIsotropic { extremal: None, .. } => Vec::new(),
        }
    }

    pub fn lattice_case(&self) -> LatticeCase {
        let w = self.stable_roots();
        let tag = match (&self.structure, w.as_slice()) {
            (_, []) => LatticeTag::NoNegatives,
            (Structure::Isotropic { .. }, [r]) => match r.kind {
                RootKind::Exceptional => LatticeTag::OneExceptional,
                RootKind::Spherical => LatticeTag::OneSpherical,
            },
            (_, [a, b]) => match (a.kind, b.kind) {
                (RootKind::Exceptional, RootKind::Exceptional) => LatticeTag::TwoExceptional,
                (RootKind::Spherical, RootKind::Spherical) => LatticeTag::TwoSpherical,
                _ => LatticeTag::MixedSphericalExceptional,
            },
            _ => unreachable!("non-isotropic walls have zero or two stable roots"),
        };
        LatticeCase { tag, witnesses: w }
    }

    /// Extremal rays `(g1, g2)` of the effective cone.
    pub fn effective_cone(&self) -> (ConeRay, ConeRay) {
        match &self.structure {
            Structure::Isotropic { rays, root } => {
                let u = [self.el(&rays[0]), self.el(&rays[1])];
                match root {
                    None => (ConeRay::Isotropic { class: u[0].clone() }, ConeRay::Isotropic { class: u[1].clone() }),
                    Some(_) => {
                        let w = self.effective_isotropic_root().unwrap();
                        let u1 = if self.pair(&u[0], &w.class).is_positive() { u[0].clone() } else { u[1].clone() };
                        (ConeRay::Isotropic { class: u1 }, ConeRay::Root { root: w })
                    }
                }
            }
            Structure::NonIsotropic { extremal: Some(_), .. } => {
                let w = self.stable_roots();
                (ConeRay::Root { root: w[0].clone() }, ConeRay::Root { root: w[1].clone() })
            }
            Structure::NonIsotropic { extremal: None, .. } => {
                let h = &self.lattice;
                let d = h.delta();
                let ray = |sign: i64| {
                    if h.a().is_zero() {
                        // cannot happen: a = 0 makes (1,0) isotropic
                        unreachable!()
                    }
                    ConeRay::Irrational { p_rat: (-h.b()).to_string(), p_surd: sign.to_string(), disc: d.to_string(), den: h.a().to_string() }
                };
                (ray(1), ray(-1))
            }
        }
    }

    /// Whether `a ∈ H` is the class of an object on the wall: positive
    /// side, and its primitive part is positive, isotropic, or a root.
    pub fn is_effective(&self, a: &MukaiVector) -> Result<bool> {
        let fa = self.f(a)?;
        if !fa.is_positive() {
            return Ok(false);
        }
        let (_, b) = a.primitive_part()?;
        let sq = self.surface.square(&b);
        Ok(!sq.is_negative() || root_kind(&b, &self.surface).is_some())
    }

    /// Membership in the closed effective cone.
    pub fn in_cone(&self, x: &MukaiVector) -> Result<bool> {
        if x.is_zero() {
            return Ok(true);
        }
        let c = self.lattice.rational_coords(x).ok_or_else(|| Error::NotInLattice(x.to_string()))?;
        let f = &qi(&self.orient.functional.0) * &c.0 + &qi(&self.orient.functional.1) * &c.1;
        if !f.is_positive() {
            return Ok(false);
        }
        if !self.surface.square(x).is_negative() {
            return Ok(true);
        }
        let n = self.orient.kernel();
        let side = |p: &Q, q: &Q| qi(self.lattice.a()) * p * qi(&n.0) + qi(self.lattice.b()) * (p * qi(&n.1) + q * qi(&n.0)) + qi(self.lattice.c()) * q * qi(&n.1);
        let xn = side(&c.0, &c.1);
        let br = arith::sgn_q(&xn);
        let gens: Vec<(BigInt, BigInt)> = match &self.structure {
            Structure::Isotropic { root: Some((p, q, _)), .. } => vec![(p.clone(), q.clone())],
            Structure::NonIsotropic { extremal: Some(e), .. } => e.iter().map(|(p, q, _)| (p.clone(), q.clone())).collect(),
            _ => Vec::new(),
        };
        for g in gens {
            if self.branch(&g) != br {
                continue;
            }
            let fg = qi(&self.fc(&g));
            let gn = qi(&self.lattice.bilinear(&g, &n));
            // |⟨x,n⟩| / f(x) ≤ |⟨g,n⟩| / f(g)
            return Ok(xn.abs() * &fg <= gn.abs() * &f);
        }
        Ok(false)
    }

    /// Roots (of any sign) with `⟨t, x⟩ = k`.
    pub fn roots_with_pairing(&self, t: &MukaiVector, k: &BigInt) -> Result<Vec<Root>> {
        let func = (self.pair(t, &self.lattice.basis[0]), self.pair(t, &self.lattice.basis[1]));
        let mut out = Vec::new();
        for mm in [1u8, 2] {
            for x in line_conic(&self.lattice, &func, k, &-int(mm as i64)) {
                if let Some(kind) = self.kind_at(&x, mm) {
                    out.push(Root { class: self.el(&x), kind });
                }
            }
        }
        Ok(out)
    }

    pub fn effective_roots_with_pairing(&self, t: &MukaiVector, k: &BigInt) -> Result<Vec<Root>> {
        Ok(self.roots_with_pairing(t, k)?.into_iter().filter(|r| self.f(&r.class).map(|f| f.is_positive()).unwrap_or(false)).collect())
    }

    /// Largest `K` such that an effective root `w` with `⟨t, w⟩ ≤ 0` has
    /// `⟨t, w⟩ ≥ −K`. `t` must have positive square and lie in `H`.
    pub fn nonpositive_pairing_bound(&self, t: &MukaiVector) -> Result<BigInt> {
        let t2 = self.surface.square(t);
        if !t2.is_positive() {
            return Err(Error::Precondition("bound needs a class of positive square".into()));
        }
        let h = &self.lattice;
        let al = self.pair(t, &h.basis[0]);
        let be = self.pair(t, &h.basis[1]);
        let g = al.gcd(&be);
        let n = (&be / &g, -(&al / &g));
        let n2 = -h.form(&n.0, &n.1);
        let fnv = self.fc(&n);
        let h2 = self.orient.h_square(h);
        // k² < 2 t² f(n)² / (|n²| h²)
        let bound = qi(&(int(2) * &t2 * &fnv * &fnv)) / (qi(&n2) * h2);
        Ok(arith::floor_sqrt_q(&bound) + 1)
    }

    /// Effective roots `w` with `⟨t, w⟩ < 0`, most negative first.
    pub fn negative_effective_roots(&self, t: &MukaiVector) -> Result<Vec<(BigInt, Root)>> {
        let kmax = self.nonpositive_pairing_bound(t)?;
        let mut out = Vec::new();
        let mut k = -kmax;
        while k < BigInt::zero() {
            for r in self.effective_roots_with_pairing(t, &k)? {
                out.push((k.clone(), r));
            }
            k += 1;
        }
        Ok(out)
    }

    /// Effective root orthogonal to `t`, if any (at most one).
    pub fn orthogonal_effective_root(&self, t: &MukaiVector) -> Result<Option<Root>> {
        Ok(self.effective_roots_with_pairing(t, &BigInt::zero())?.into_iter().next())
    }

    /// Integer points of `H` on the line `f = k` with square at least `min_sq`.
    pub fn points_on_level(&self, k: &BigInt, min_sq: &BigInt) -> Vec<MukaiVector> {
        let h = &self.lattice;
        let f = &self.orient.functional;
        let (g, x, y) = arith::ext_gcd(&f.0, &f.1);
        if !k.is_multiple_of(&g) {
            return Vec::new();
        }
        let kk = k / &g;
        let p0 = &x * &kk;
        let q0 = &y * &kk;
        let dp = &f.1 / &g;
        let dq = -(&f.0 / &g);
        // A t² + B t + C ≥ min_sq with A < 0
        let a_ = h.form(&dp, &dq);
        let b_ = h.bilinear(&(p0.clone(), q0.clone()), &(dp.clone(), dq.clone())) * 2u32;
        let c_ = h.form(&p0, &q0) - min_sq;
        let disc = &b_ * &b_ - &a_ * &c_ * 4u32;
        if disc.is_negative() {
            return Vec::new();
        }
        let r: BigInt = arith::isqrt(&disc) + 1u32;
        // roots (-B ± √disc) / 2A, A < 0
        let den = &a_ * 2u32;
        let lo: BigInt = (-&b_ + &r).div_floor(&den) - 1;
        let hi: BigInt = (-&b_ - &r).div_floor(&den) + 1;
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mut out = Vec::new();
        let mut t = lo;
        while t <= hi {
            let p = &p0 + &t * &dp;
            let q = &q0 + &t * &dq;
            if h.form(&p, &q) >= *min_sq {
                out.push(h.element(&p, &q));
            }
            t += 1;
        }
        out
    }

    /// Generators of the chain of effective roots used for chambers:
    /// `(w0, w1)` with `w0` exceptional when the kinds are mixed.
    pub fn chain_start(&self) -> Option<(Root, Root)> {
        let w = self.stable_roots();
        if w.len() != 2 {
            return None;
        }
        let (a, b) = (w[0].clone(), w[1].clone());
        if a.kind == RootKind::Spherical && b.kind == RootKind::Exceptional {
            Some((b, a))
        } else {
            Some((a, b))
        }
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            small.push(d.clone());
            let e = &n / &d;
            if e != d {
                large.push(e);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Convenience wrappers with the argument order of the operation list.
pub fn lattice_case(w: &Wall) -> LatticeCase {
    w.lattice_case()
}

pub fn effective_cone(w: &Wall) -> (ConeRay, ConeRay) {
    w.effective_cone()
}

pub fn is_effective(a: &MukaiVector, w: &Wall) -> Result<bool> {
    w.is_effective(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(r: i64, c: &[i64], s: i64) -> MukaiVector {
        MukaiVector::from_ints(r, c, s)
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf_rows(&[vec![int(2), int(4), int(6)], vec![int(1), int(1), int(1)]]);
        let b = hnf_rows(&[vec![int(3), int(5), int(7)], vec![int(1), int(1), int(1)]]);
        assert_eq!(a, b);
        assert_eq!(a[0][0], int(1));
    }

    #[test]
    fn ideal_sheaf_wall_lattice() {
        let s = SurfaceModel::unnodal();
        let mut z = vec![0; 10];
        let v = mv(1, &z, -1);
        let w = mv(0, &z, 2);
        let h = build_sublattice(&v, &w, &s).unwrap();
        assert!(h.saturated);
        assert_eq!(h.disc(), int(-1));
        assert!(h.contains(&v) && h.contains(&w));
        let (p, q) = h.coords(&v).unwrap();
        assert_eq!(h.form(&p, &q), int(1));
        let h2 = build_sublattice(&v, &(&v.scale_i(2) + &w), &s).unwrap();
        assert!(h.same_lattice(&h2));
        z[0] = 1;
        assert!(!h.contains(&mv(0, &z, 0)));
    }

    #[test]
    fn saturation_adds_the_half() {
        let s = SurfaceModel::unnodal();
        let z = vec![0; 10];
        let v = mv(2, &z, -2);
        let w = mv(1, &z, 1);
        let h = build_sublattice(&v, &w, &s).unwrap();
        assert!(h.contains(&mv(1, &z, -1)));
        let unsat = RankTwoLattice::from_basis(v, w, &s).unwrap();
        assert!(!unsat.saturated);
    }

    #[test]
    fn isotropic_pair_and_roots_of_exceptional_plane() {
        let s = SurfaceModel::unnodal();
        let z = vec![0; 10];
        // u = (0,0,1), w = O_X: gram [[0,-1],[-1,-1]]
        let u = mv(0, &z, 2);
        let o = mv(1, &z, 1);
        let h = build_sublattice(&u, &o, &s).unwrap();
        assert!(h.is_isotropic());
        let (a, b) = find_isotropic(&h).unwrap();
        assert_eq!(s.square(&a), int(0));
        assert_eq!(s.square(&b), int(0));
        let roots = enumerate_roots(&h, &s, 20);
        assert!(roots.iter().all(|r| r.kind == RootKind::Exceptional));
        assert_eq!(roots.len(), 2);
    }
}

#[cfg(test)]
pub(crate) mod oracle_tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn surfaces() -> Vec<SurfaceModel> {
        vec![
            SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new()).unwrap(),
            SurfaceModel::hyperbolic_plane(vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap(),
            SurfaceModel::hyperbolic_plane(vec![vec![1, 0]]).unwrap(),
        ]
    }

    fn random_vector(rng: &mut ChaCha8Rng, rho: usize, span: i64) -> MukaiVector {
        let r = rng.gen_range(-span..=span);
        let c: Vec<i64> = (0..rho).map(|_| rng.gen_range(-span..=span)).collect();
        let mut s = rng.gen_range(-2 * span..=2 * span);
        if (r - s) % 2 != 0 {
            s += 1;
        }
        MukaiVector::from_ints(r, &c, s)
    }

    /// Random walls `(v, wall)` with `v² > 0` orienting the cone.
    pub(crate) fn random_walls(seed: u64, count: usize) -> Vec<(MukaiVector, Wall)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let ss = surfaces();
        while out.len() < count {
            let s = &ss[rng.gen_range(0..ss.len())];
            let v = random_vector(&mut rng, s.rho(), 3);
            let w = random_vector(&mut rng, s.rho(), 3);
            if !s.square(&v).is_positive() {
                continue;
            }
            let Ok(h) = build_sublattice(&v, &w, s) else { continue };
            let Ok(o) = ConeOrientation::from_class(&h, &v, s) else { continue };
            match Wall::new(h, s.clone(), o) {
                Ok(wall) => out.push((v, wall)),
                Err(Error::Orientation(_)) => continue,
                Err(e) => panic!("wall construction failed for v={v}, w={w}: {e}"),
            }
        }
        out
    }

    #[test]
    fn cone_matches_box_enumeration() {
        for (v, wall) in random_walls(7, 300) {
            let h = wall.lattice();
            let roots = enumerate_roots(h, wall.surface(), 40);
            let eff: Vec<&Root> = roots.iter().filter(|r| wall.f(&r.class).unwrap().is_positive()).collect();
            let case = wall.lattice_case();
            if !eff.is_empty() {
                assert_ne!(case.tag, LatticeTag::NoNegatives, "v={v} H={:?}", h.gram2);
            }
            // per branch, the box root with the largest m / f² never beats the stable root
            for w in &case.witnesses {
                let wc = h.coords(&w.class).unwrap();
                let fw = wall.fc(&wc);
                let mw = int(-w.kind.square());
                for r in &eff {
                    let rc = h.coords(&r.class).unwrap();
                    if wall.branch(&rc) != wall.branch(&wc) || h.form(&rc.0, &rc.1) == int(0) {
                        continue;
                    }
                    let fr = wall.fc(&rc);
                    let mr = int(-r.kind.square());
                    assert!(&mr * &fw * &fw <= &mw * &fr * &fr, "root {} beyond stable {} for v={v}", r.class, w.class);
                }
            }
            for w in &case.witnesses {
                assert!(wall.is_effective(&w.class).unwrap());
                assert_eq!(root_kind(&w.class, wall.surface()), Some(w.kind));
            }
            for r in &eff {
                assert!(wall.in_cone(&r.class).unwrap(), "effective root {} outside cone, v={v}", r.class);
            }
            // roots with negative pairing against v agree with the bounded search
            let neg: Vec<_> = wall.negative_effective_roots(&v).unwrap().into_iter().map(|(_, r)| r).collect();
            for r in &eff {
                if wall.pair(&v, &r.class).is_negative() {
                    assert!(neg.contains(r), "missed negative root {} for v={v}", r.class);
                }
            }
            if let Some([u1, u2]) = wall.isotropic_classes() {
                assert!(wall.in_cone(&u1).unwrap() && wall.in_cone(&u2).unwrap());
                assert_eq!(wall.surface().square(&u1), int(0));
            }
        }
    }

    #[test]
    fn effectivity_matches_definition() {
        for (_, wall) in random_walls(11, 100) {
            let h = wall.lattice().clone();
            for p in -6i64..=6 {
                for q in -6i64..=6 {
                    if p == 0 && q == 0 {
                        continue;
                    }
                    let x = h.element(&int(p), &int(q));
                    let (_, b) = x.primitive_part().unwrap();
                    let sq = wall.surface().square(&b);
                    let expect = wall.f(&x).unwrap().is_positive()
                        && (sq >= int(0) || sq == int(-1) || (sq == int(-2) && wall.surface().is_nodal_residue(&b.c1_residue())));
                    assert_eq!(wall.is_effective(&x).unwrap(), expect);
                    if expect {
                        assert!(wall.in_cone(&x).unwrap());
                    }
                }
            }
        }
    }
}
