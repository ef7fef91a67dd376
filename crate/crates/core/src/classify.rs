//! Wall types for a Mukai vector on a potential wall, per determinant.
//!
//! Lattice conditions are evaluated on the minimal representative `v0` of
//! the orbit of `v` under the reflections in effective roots; the
//! determinant is carried along the reflection word. Only the
//! totally-semistable flag `TSS1` looks at `v` itself.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{int, serde_str};
use crate::error::{Error, Result};
use crate::hn::{self, MinCodim};
use crate::hyperbolic::{root_kind, LatticeCase, LatticeTag, Root, RootKind, Wall};
use crate::lattice::{self, det_parities, MukaiVector, ParityClass, SurfaceModel};
use crate::weyl::{self, ReflectionWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tss {
    TSS1,
    TSS2,
    TSS3,
    TSS4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Flop {
    SumPositive,
    ExceptionalFlop1,
    ExceptionalFlop2,
    SphericalFlop1,
    SphericalFlop2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "sub")]
pub enum Contraction {
    DivisorialBrillNoether,
    DivisorialHilbertChow,
    DivisorialLGU,
    DivisorialInducedLGU,
    P1FibrationExceptional,
    P1FibrationSpherical,
    Flopping(Flop),
    FakeOrNoWall,
}

impl Contraction {
    pub fn is_divisorial(self) -> bool {
        matches!(
            self,
            Contraction::DivisorialBrillNoether
                | Contraction::DivisorialHilbertChow
                | Contraction::DivisorialLGU
                | Contraction::DivisorialInducedLGU
        )
    }

    pub fn is_fibration(self) -> bool {
        matches!(self, Contraction::P1FibrationExceptional | Contraction::P1FibrationSpherical)
    }
}

impl fmt::Display for Contraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Contraction::Flopping(k) => write!(f, "Flopping({k:?})"),
            other => write!(f, "{other:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NonNormal {
    TwoV0SquareOne,
    SquareTwoNodal,
}

/// The verdict for one determinant class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminantReport {
    pub determinant: ParityClass,
    /// The determinant carried to `v0` along the reflection word.
    pub determinant_at_minimal: ParityClass,
    pub tss: Vec<Tss>,
    /// In clause order; empty only when `outside_hypotheses`.
    pub contraction: Vec<Contraction>,
    pub non_normal_flags: Vec<NonNormal>,
    /// A divisor of strictly semistable objects that the wall does not contract.
    pub divisor_not_contracted: bool,
    /// Non-primitive `v` with no totally-semistable, divisorial or fibration tag.
    pub outside_hypotheses: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Minimal {
    pub v0: MukaiVector,
    pub word: ReflectionWord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallReport {
    pub v: MukaiVector,
    #[serde(with = "serde_str")]
    pub v_square: BigInt,
    pub primitive: bool,
    pub lattice_case: LatticeCase,
    /// `(u1, u2)` for isotropic lattices.
    pub isotropic: Option<[MukaiVector; 2]>,
    pub minimal: Minimal,
    pub oracle: MinCodim,
    /// The determinant that was asked for; `tss`, `contraction` and
    /// `non_normal_flags` repeat its entry of `per_determinant`.
    pub determinant: ParityClass,
    pub tss: Option<Tss>,
    pub contraction: Vec<Contraction>,
    pub non_normal_flags: Vec<NonNormal>,
    /// Keyed by `L` and `L+K`.
    pub per_determinant: BTreeMap<String, DeterminantReport>,
    pub notes: Vec<String>,
}

impl WallReport {
    pub fn requested(&self) -> &DeterminantReport {
        &self.per_determinant[self.determinant.label()]
    }

    pub fn outside_hypotheses(&self) -> bool {
        self.requested().outside_hypotheses
    }
}

/// `L ≡ D + (r/2 + shift) K_X` with `D` a nodal cycle; false for odd `r`.
fn nodal_type(l: &ParityClass, r: &BigInt, s: &SurfaceModel, shift: u8) -> bool {
    r.is_even() && s.is_nodal_residue(&l.eps) && l.kappa == half_rank_parity(r, shift)
}

/// `L ≡ (r/2) K_X`; false for odd `r`.
fn half_rank_type(l: &ParityClass, r: &BigInt) -> bool {
    r.is_even() && l.is_even() && l.kappa == half_rank_parity(r, 0)
}

/// `L ≡ K_X`.
fn canonical_type(l: &ParityClass) -> bool {
    l.is_even() && l.kappa == 1
}

fn half_rank_parity(r: &BigInt, shift: u8) -> u8 {
    ((r / 2u32 + shift as u32).mod_floor(&int(2)) == BigInt::one()) as u8
}

/// Carries a determinant class along a reflection word. A spherical twist
/// by `T` changes the determinant by `k·det T` with `det T ≡ D + (r_T/2) K_X`;
/// the twist by `T ⊕ T(K_X)` changes it by `k·(2 det T + r_T K_X)`.
pub fn transport_determinant(l: &ParityClass, word: &ReflectionWord, s: &SurfaceModel) -> Result<ParityClass> {
    if l.eps != word.source.c1_residue() {
        return Err(Error::Precondition(format!("determinant residue {:?} does not lie over c1 of {}", l.eps, word.source)));
    }
    let mut x = word.source.clone();
    let mut kappa = l.kappa;
    for step in &word.steps {
        let k = s.pair(&x, &step.class);
        let flip = match step.kind {
            RootKind::Spherical => k.is_odd() && half_rank_parity(&step.class.r, 0) == 1,
            RootKind::Exceptional => k.is_odd(),
        };
        if flip {
            kappa ^= 1;
        }
        x = weyl::reflect_root(&x, &step.class, s)?;
    }
    Ok(ParityClass { eps: x.c1_residue(), kappa })
}

/// Lattice data at `v0` shared by both determinants.
struct Facts {
    v0: MukaiVector,
    v0_sq: BigInt,
    tag: LatticeTag,
    /// Primitive effective isotropic classes with `ℓ` and `⟨v0, u⟩`.
    iso: Vec<(MukaiVector, u8, BigInt)>,
    sph_perp: Option<Root>,
    exc_perp: Option<Root>,
    flops: Vec<Flop>,
    /// Decompositions into two positive-cone classes, flagged when both
    /// parts are isotropic with `ℓ = 2`.
    sum_positive: Vec<bool>,
    footnote: bool,
}

impl Facts {
    fn u_with(&self, pairing: i64, l: u8) -> bool {
        self.iso.iter().any(|(_, lu, p)| *lu == l && *p == int(pairing))
    }

    fn u_pairing_equals_ell(&self) -> Option<u8> {
        self.iso.iter().find(|(_, lu, p)| *p == int(*lu as i64)).map(|(_, l, _)| *l)
    }
}

fn gather(v0: &MukaiVector, wall: &Wall) -> Result<Facts> {
    let s = wall.surface();
    let v0_sq = s.square(v0);
    let tag = wall.lattice_case().tag;
    let iso = match wall.isotropic_labelled(v0) {
        Some(us) => us
            .into_iter()
            .map(|u| Ok((u.clone(), lattice::ell(&u)?, s.pair(v0, &u))))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let perp = wall.orthogonal_effective_root(v0)?;
    let sph_perp = perp.clone().filter(|r| r.kind == RootKind::Spherical);
    let exc_perp = perp.filter(|r| r.kind == RootKind::Exceptional);

    let mut flops = Vec::new();
    let mut sum_positive = Vec::new();
    if v0_sq >= int(3) {
        let fv = wall.f(v0)?;
        let mut k = BigInt::one();
        while k < fv {
            for a in wall.points_on_level(&k, &BigInt::zero()) {
                let b = v0 - &a;
                if s.square(&b).is_negative() {
                    continue;
                }
                let both_l2 = [&a, &b].iter().all(|x| {
                    s.square(x).is_zero() && x.primitive_part().ok().and_then(|(_, p)| lattice::ell(&p).ok()) == Some(2)
                });
                sum_positive.push(both_l2);
            }
            k += 1;
        }
    }
    // Roots with 0 ≤ ⟨w, v0⟩ ≤ v0²/2.
    let half = v0_sq.div_floor(&int(2));
    let mut k = BigInt::zero();
    while k <= half {
        for r in wall.roots_with_pairing(v0, &k)? {
            let twice = &k * 2u32;
            match r.kind {
                RootKind::Exceptional => {
                    if k.is_positive() {
                        push_unique(&mut flops, Flop::ExceptionalFlop1);
                    } else if v0_sq >= int(3) {
                        push_unique(&mut flops, Flop::ExceptionalFlop2);
                    }
                }
                RootKind::Spherical => {
                    let signed = wall.is_effective(&r.class)? || wall.is_effective(&-&r.class)?;
                    if !signed || !k.is_positive() {
                        continue;
                    }
                    if twice < v0_sq {
                        push_unique(&mut flops, Flop::SphericalFlop1);
                    } else if root_kind(&(v0 - &r.class), s) == Some(RootKind::Spherical) {
                        push_unique(&mut flops, Flop::SphericalFlop2);
                    }
                }
            }
        }
        k += 1;
    }
    flops.sort();
    let footnote = tag == LatticeTag::NoNegatives && wall.non_nodal_minus_two().is_some();
    Ok(Facts { v0: v0.clone(), v0_sq, tag, iso, sph_perp, exc_perp, flops, sum_positive, footnote })
}

fn push_unique<T: PartialEq>(xs: &mut Vec<T>, x: T) {
    if !xs.contains(&x) {
        xs.push(x);
    }
}

fn judge(facts: &Facts, non_minimal: bool, l: &ParityClass, l0: &ParityClass, v: &MukaiVector, primitive: bool, s: &SurfaceModel) -> DeterminantReport {
    let f = facts;
    let r0 = &f.v0.r;
    let sq = &f.v0_sq;
    let isotropic = !f.iso.is_empty();
    let sph_det = nodal_type(l0, r0, s, 0);

    let mut tss = Vec::new();
    if non_minimal {
        tss.push(Tss::TSS1);
    }
    if f.u_with(1, 2) {
        tss.push(Tss::TSS2);
    }
    let u_eq_l = f.u_pairing_equals_ell();
    if u_eq_l.is_some() && f.sph_perp.is_some() && sph_det {
        tss.push(Tss::TSS3);
    }
    let tss4 = f.u_with(2, 2) && f.exc_perp.is_some();
    if tss4 && canonical_type(l0) {
        tss.push(Tss::TSS4);
    }

    let mut con = Vec::new();
    let bn_sph = f.sph_perp.is_some()
        && (!isotropic || f.iso.first().is_some_and(|(_, lu, p)| *p > int(*lu as i64)));
    let bn_exc = f.exc_perp.as_ref().is_some_and(|w| {
        let rest = &f.v0 - &w.class.scale_i(2);
        root_kind(&rest, s) == Some(RootKind::Spherical) && sph_det
    });
    if bn_sph || bn_exc {
        con.push(Contraction::DivisorialBrillNoether);
    }
    if f.u_with(1, 2) && *sq > BigInt::one() {
        con.push(Contraction::DivisorialHilbertChow);
    }
    let lgu_square = match f.tag {
        LatticeTag::OneExceptional => *sq >= int(3) && *sq != int(4),
        LatticeTag::OneSpherical => *sq > int(2),
        _ => *sq >= int(4),
    };
    if f.u_with(2, 2) && lgu_square {
        con.push(Contraction::DivisorialLGU);
    }
    if f.u_with(1, 1) && *sq >= int(3) {
        con.push(Contraction::DivisorialInducedLGU);
    }
    if tss4 && canonical_type(l0) {
        con.push(Contraction::P1FibrationExceptional);
    }
    if u_eq_l.is_some() && f.sph_perp.is_some() && sph_det {
        con.push(Contraction::P1FibrationSpherical);
    }

    let mut outside = false;
    if con.is_empty() {
        if primitive {
            let mut flops = Vec::new();
            if *sq >= int(3) && f.sum_positive.iter().any(|&both_l2| !both_l2 || half_rank_type(l0, r0)) {
                flops.push(Flop::SumPositive);
            }
            flops.extend(f.flops.iter().copied());
            flops.sort();
            con.extend(flops.into_iter().map(Contraction::Flopping));
            if con.is_empty() {
                con.push(Contraction::FakeOrNoWall);
            }
        } else if tss.is_empty() {
            outside = true;
        }
    }

    let contracted = con.iter().any(|c| c.is_divisorial() || c.is_fibration());
    let v0_tss = tss.iter().any(|t| *t != Tss::TSS1);
    let divisor_not_contracted = !contracted
        && !v0_tss
        && (f.exc_perp.is_some()
            || (u_eq_l == Some(1) && f.u_with(1, 1) && f.sph_perp.is_some())
            || (f.tag == LatticeTag::NoNegatives && isotropic && f.u_with(1, 1) && *sq == int(2)));

    let mut nn = Vec::new();
    let v_sq = s.square(v);
    if let Some(half) = v.div_exact(&int(2)) {
        if s.square(&half) == BigInt::one() && half_rank_type(l, &v.r) {
            nn.push(NonNormal::TwoV0SquareOne);
        }
    }
    if v_sq == int(2) && nodal_type(l, &v.r, s, 0) {
        nn.push(NonNormal::SquareTwoNodal);
    }

    DeterminantReport {
        determinant: l.clone(),
        determinant_at_minimal: l0.clone(),
        tss,
        contraction: con,
        non_normal_flags: nn,
        divisor_not_contracted,
        outside_hypotheses: outside,
    }
}

/// Classifies the wall for `v` and reports both determinants; `l` selects
/// the one mirrored at the top level.
pub fn classify(v: &MukaiVector, l: &ParityClass, wall: &Wall) -> Result<WallReport> {
    let s = wall.surface();
    s.check(v)?;
    let v_sq = s.square(v);
    if !v_sq.is_positive() {
        return Err(Error::Precondition(format!("v² = {v_sq} must be positive")));
    }
    if !wall.lattice().contains(v) {
        return Err(Error::NotInLattice(v.to_string()));
    }
    if !wall.in_cone(v)? {
        return Err(Error::Orientation(format!("{v} is not on the effective side of the wall")));
    }
    if l.eps != v.c1_residue() || l.kappa > 1 {
        return Err(Error::Precondition(format!("determinant {l:?} does not lie over c1 of {v}")));
    }
    let primitive = lattice::is_primitive(v)?;
    let (v0, word) = weyl::minimalize(v, wall)?;
    let facts = gather(&v0, wall)?;
    let oracle = hn::min_codim(v, wall)?;

    let mut per = BTreeMap::new();
    let (la, lb) = det_parities(v);
    for det in [la, lb] {
        let l0 = transport_determinant(&det, &word, s)?;
        let rep = judge(&facts, !word.is_empty(), &det, &l0, v, primitive, s);
        per.insert(det.label().to_string(), rep);
    }
    let mine = per[l.label()].clone();

    let mut notes = Vec::new();
    if facts.footnote {
        notes.push("isotropic lattice without effective roots but with a non-nodal class of square -2: u2 relation taken from that class".into());
    }
    if oracle.isotropic_bound {
        notes.push("oracle witness uses the upper bound for an isotropic multiple".into());
    }
    if mine.outside_hypotheses {
        notes.push("v is not primitive and no totally semistable, divisorial or fibration clause applies".into());
    }
    let la = per["L"].contraction.clone();
    let lb = per["L+K"].contraction.clone();
    if la != lb {
        notes.push(format!("determinants differ: L {:?}, L+K {:?}", la, lb));
    }

    Ok(WallReport {
        v: v.clone(),
        v_square: v_sq,
        primitive,
        lattice_case: wall.lattice_case(),
        isotropic: wall.isotropic_labelled(&v0),
        minimal: Minimal { v0, word },
        oracle,
        determinant: l.clone(),
        tss: mine.tss.first().copied(),
        contraction: mine.contraction.clone(),
        non_normal_flags: mine.non_normal_flags.clone(),
        per_determinant: per,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub determinant: String,
    pub pass: bool,
    pub detail: String,
    /// For a failure, the known reason the oracle and the lattice criteria
    /// disagree; `None` on a failure is an invariant violation.
    pub explained: Option<String>,
}

impl Check {
    pub fn unexplained_failure(&self) -> bool {
        !self.pass && self.explained.is_none()
    }
}

/// Consistency of a report with the HN-codimension oracle and with the
/// Hilbert–Chow witness.
pub fn cross_validate(report: &WallReport, wall: &Wall) -> Vec<Check> {
    let s = wall.surface();
    let min = report.oracle.value.clone();
    let mut out = Vec::new();
    for (label, d) in &report.per_determinant {
        let other_gated = report
            .per_determinant
            .iter()
            .any(|(l, e)| l != label && e.tss.iter().any(|t| matches!(t, Tss::TSS3 | Tss::TSS4)));
        let mut push = |name: &str, pass: bool, detail: String, explained: Option<&str>| {
            let explained = if pass { None } else { explained.map(String::from) };
            out.push(Check { name: name.into(), determinant: label.clone(), pass, detail, explained });
        };
        let tss = !d.tss.is_empty();
        let explained = if d.tss.contains(&Tss::TSS1) && min.as_ref().is_some_and(|m| m.is_negative()) {
            Some("v is not minimal: the expected dimensions of the strata exceed dim M(v), so the minimum is negative")
        } else if !tss && min == Some(BigInt::zero()) && other_gated {
            Some("the oracle ignores the determinant and the other determinant is totally semistable")
        } else {
            None
        };
        push(
            "tss iff min codim 0",
            tss == (min == Some(BigInt::zero())),
            format!("tss {:?}, min codim {}", d.tss, report.oracle.display_value()),
            explained,
        );
        if d.contraction.iter().any(|c| c.is_divisorial() || c.is_fibration()) {
            push(
                "divisorial or fibration implies min codim <= 1",
                min.as_ref().is_some_and(|m| *m <= BigInt::one()),
                format!("min codim {}", report.oracle.display_value()),
                None,
            );
        }
        if d.contraction == [Contraction::FakeOrNoWall] {
            let empty = hn::enumerate_decompositions(&report.v, wall, 1).map(|x| x.is_empty()).unwrap_or(false);
            if empty {
                push("no decomposition implies infinite min codim", min.is_none(), format!("min codim {}", report.oracle.display_value()), None);
            }
        }
        if d.contraction.contains(&Contraction::DivisorialHilbertChow) {
            let v0 = &report.minimal.v0;
            let v0_sq = s.square(v0);
            let witness = report.isotropic.iter().flatten().find(|u| s.pair(v0, u).is_one() && lattice::ell(u).ok() == Some(2));
            let ok = v0_sq.is_odd()
                && witness.is_some_and(|u| {
                    let e = v0 - &u.scale(&((&v0_sq + 1u32) / 2u32));
                    wall.lattice().contains(&e) && root_kind(&e, s) == Some(RootKind::Exceptional)
                });
            push("hilbert-chow implies odd square and exceptional witness", ok, format!("v0² = {v0_sq}"), None);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::Wall;

    fn det(v: &MukaiVector, kappa: u8) -> ParityClass {
        ParityClass { eps: v.c1_residue(), kappa }
    }

    fn tags(rep: &WallReport, label: &str) -> (Vec<Tss>, Vec<Contraction>) {
        let d = &rep.per_determinant[label];
        (d.tss.clone(), d.contraction.clone())
    }

    #[test]
    fn hilbert_chow_and_its_v_square_one_degeneration() {
        let s = SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new()).unwrap();
        // C_p[-1]: the effective isotropic class with ⟨v, u⟩ = 1
        let u = MukaiVector::from_ints(0, &[0, 0], -2);
        for n in [1i64, 2, 3] {
            // ideal sheaf class (1, 0, 1/2 − n), v² = 2n − 1
            let v = MukaiVector::from_ints(1, &[0, 0], 1 - 2 * n);
            let orient = &v.scale_i(3) + &u;
            let wall = Wall::through(&v, &u, &orient, &s).unwrap();
            let rep = classify(&v, &det(&v, 0), &wall).unwrap();
            assert_eq!(rep.v_square, int(2 * n - 1));
            for label in ["L", "L+K"] {
                let (t, c) = tags(&rep, label);
                assert_eq!(t, vec![Tss::TSS2]);
                if n == 1 {
                    assert_eq!(c, vec![Contraction::FakeOrNoWall]);
                } else {
                    assert_eq!(c, vec![Contraction::DivisorialHilbertChow]);
                }
            }
            assert!(cross_validate(&rep, &wall).iter().all(|c| c.pass), "{:?}", cross_validate(&rep, &wall));
        }
    }

    #[test]
    fn determinant_transport_is_identity_for_minimal_classes() {
        let s = SurfaceModel::hyperbolic_plane(vec![vec![1, 1]]).unwrap();
        let v = MukaiVector::from_ints(2, &[1, 1], 0);
        let word = ReflectionWord { steps: vec![], source: v.clone(), target: v.clone() };
        let l = det(&v, 1);
        assert_eq!(transport_determinant(&l, &word, &s).unwrap(), l);
    }

    #[test]
    fn classification_is_invariant_under_reflections() {
        for (v, wall) in crate::hyperbolic::oracle_tests::random_walls(11, 120) {
            let s = wall.surface();
            if !s.square(&v).is_positive() {
                continue;
            }
            let Ok(rep) = classify(&v, &det(&v, 0), &wall) else { continue };
            let v0 = rep.minimal.v0.clone();
            if v0 == v {
                continue;
            }
            for (label, d) in &rep.per_determinant {
                let r0 = classify(&v0, &d.determinant_at_minimal, &wall).unwrap();
                let m = r0.requested();
                assert_eq!(m.contraction, d.contraction, "{v} {label}");
                let strip = |t: &[Tss]| t.iter().copied().filter(|x| *x != Tss::TSS1).collect::<Vec<_>>();
                assert_eq!(strip(&m.tss), strip(&d.tss));
                assert!(d.tss.contains(&Tss::TSS1));
            }
        }
    }
}

