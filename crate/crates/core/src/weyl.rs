//! Reflections in roots, reduction to the minimal class of a `G_H`-orbit,
//! chamber indices, and the reflections that compare moduli spaces across
//! totally semistable and LGU-type walls.

use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::arith::{int, qi, Q};
use crate::error::{Error, Result};
use crate::hyperbolic::{root_kind, Root, RootKind, Wall};
use crate::lattice::{self, MukaiVector, RationalVector, SurfaceModel};

/// `R_w(v) = v + c⟨v, w⟩ w` with `c = 2` for `w² = −1` and `c = 1` for `w² = −2`.
pub fn reflect_root(v: &MukaiVector, w: &MukaiVector, s: &SurfaceModel) -> Result<MukaiVector> {
    s.check(v)?;
    s.check(w)?;
    let c = match s.square(w) {
        x if x == int(-1) => 2,
        x if x == int(-2) => 1,
        x => return Err(Error::Precondition(format!("reflection needs w² ∈ {{-1, -2}}, got {x}"))),
    };
    Ok(v + &w.scale(&(s.pair(v, w) * c)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionWord {
    /// Applied left to right.
    pub steps: Vec<Root>,
    pub source: MukaiVector,
    pub target: MukaiVector,
}

impl ReflectionWord {
    pub fn apply(&self, x: &MukaiVector, s: &SurfaceModel) -> Result<MukaiVector> {
        self.steps.iter().try_fold(x.clone(), |acc, r| reflect_root(&acc, &r.class, s))
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The word taking `target` back to `source`.
    pub fn inverse(&self) -> ReflectionWord {
        ReflectionWord { steps: self.steps.iter().rev().cloned().collect(), source: self.target.clone(), target: self.source.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Reflect in the effective root most negatively paired with the current class.
    Steepest,
    /// Walk back through the chambers `C_n, C_{n−1}, …, C_0` along the root chain.
    Chain,
    /// Reflect in a uniformly chosen negatively paired effective root.
    Random(u64),
}

pub const MINIMALIZE_CAP: usize = 1_000_000;

/// The minimal class `v0` of the `G_H`-orbit of `v` and a word taking `v` to it.
pub fn minimalize(v: &MukaiVector, wall: &Wall) -> Result<(MukaiVector, ReflectionWord)> {
    minimalize_with(v, wall, Strategy::Steepest)
}

pub fn minimalize_with(v: &MukaiVector, wall: &Wall, strategy: Strategy) -> Result<(MukaiVector, ReflectionWord)> {
    let s = wall.surface();
    check_positive(v, wall)?;
    let mut steps = Vec::new();
    let mut cur = v.clone();
    match strategy {
        Strategy::Chain => {
            let n = match chamber_index(v, wall)? {
                Chamber::Interior(n) => n,
                Chamber::Boundary(n) => {
                    // on ⟨v, w_n⟩ = 0 the class is fixed by R_{w_n}; use the chamber on the positive side
                    if n > 0 { n - 1 } else { n }
                }
            };
            let chain = root_chain(wall, n.unsigned_abs() as usize + 1)?;
            if n > 0 {
                for k in (1..=n).rev() {
                    let w = chain.get(k).clone();
                    cur = reflect_root(&cur, &w.class, s)?;
                    steps.push(w);
                }
            } else {
                for k in n + 1..=0 {
                    let w = chain.get(k).clone();
                    cur = reflect_root(&cur, &w.class, s)?;
                    steps.push(w);
                }
            }
        }
        Strategy::Steepest | Strategy::Random(_) => {
            let mut rng = match strategy {
                Strategy::Random(seed) => Some(StdRng::seed_from_u64(seed)),
                _ => None,
            };
            loop {
                let neg = wall.negative_effective_roots(&cur)?;
                if neg.is_empty() {
                    break;
                }
                if steps.len() >= MINIMALIZE_CAP {
                    return Err(Error::IterationCap { cap: MINIMALIZE_CAP, detail: format!("minimalizing {v}, reached {cur}") });
                }
                let w = match rng.as_mut() {
                    None => neg[0].1.clone(),
                    Some(r) => neg[r.gen_range(0..neg.len())].1.clone(),
                };
                cur = reflect_root(&cur, &w.class, s)?;
                steps.push(w);
            }
        }
    }
    if let Some((k, w)) = wall.negative_effective_roots(&cur)?.into_iter().next() {
        return Err(Error::Invariant(format!("{cur} pairs to {k} with effective root {}", w.class)));
    }
    let word = ReflectionWord { steps, source: v.clone(), target: cur.clone() };
    Ok((cur, word))
}

fn check_positive(v: &MukaiVector, wall: &Wall) -> Result<()> {
    if !wall.surface().square(v).is_positive() || !wall.f(v)?.is_positive() {
        return Err(Error::Precondition(format!("{v} is not in the positive cone of the wall")));
    }
    Ok(())
}

/// The chain `w_n` of effective roots, indexed by `n ∈ [−len, len]`.
#[derive(Clone, Debug)]
pub struct RootChain {
    neg: Vec<Root>,
    pos: Vec<Root>,
}

impl RootChain {
    /// `w_n`; panics outside the generated range.
    pub fn get(&self, n: i64) -> &Root {
        if n >= 0 {
            &self.pos[n as usize]
        } else {
            &self.neg[(-n - 1) as usize]
        }
    }

    pub fn range(&self) -> std::ops::RangeInclusive<i64> {
        -(self.neg.len() as i64)..=(self.pos.len() as i64 - 1)
    }
}

/// `w_0, w_1` are the stable roots (the exceptional one first in the mixed
/// case); `w_2 = R_{w_1}(w_0)`, `w_{n+1} = −R_{w_n}(w_{n−1})` for `n ≥ 2`,
/// `w_{−1} = R_{w_0}(w_1)` and `w_{n−1} = −R_{w_n}(w_{n+1})` for `n ≤ −1`.
/// With a single stable root the chain is just `w_0`.
pub fn root_chain(wall: &Wall, len: usize) -> Result<RootChain> {
    let s = wall.surface();
    let mk = |x: MukaiVector| -> Result<Root> {
        let kind = root_kind(&x, s).ok_or_else(|| Error::Invariant(format!("{x} in the root chain is not a root")))?;
        Ok(Root { class: x, kind })
    };
    match wall.chain_start() {
        None => {
            let w = wall.stable_roots();
            Ok(RootChain { neg: Vec::new(), pos: w })
        }
        Some((w0, w1)) => {
            let mut pos = vec![w0.clone(), w1.clone()];
            while pos.len() < len + 2 {
                let n = pos.len() - 1;
                let r = reflect_root(&pos[n - 1].class, &pos[n].class, s)?;
                pos.push(mk(if n == 1 { r } else { -&r })?);
            }
            let mut neg = vec![mk(reflect_root(&w1.class, &w0.class, s)?)?];
            while neg.len() < len + 1 {
                // w_{n−1} = −R_{w_n}(w_{n+1}) with n = −neg.len()
                let wn = &neg[neg.len() - 1];
                let wn1 = if neg.len() == 1 { &w0 } else { &neg[neg.len() - 2] };
                let r = reflect_root(&wn1.class, &wn.class, s)?;
                neg.push(mk(-&r)?);
            }
            Ok(RootChain { neg, pos })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "n", rename_all = "snake_case")]
pub enum Chamber {
    Interior(i64),
    /// `⟨v, w_n⟩ = 0`.
    Boundary(i64),
}

const CHAMBER_CAP: usize = 100_000;

/// The `n` with `v ∈ C_n`, or the boundary `⟨v, w_n⟩ = 0` it lies on.
pub fn chamber_index(v: &MukaiVector, wall: &Wall) -> Result<Chamber> {
    check_positive(v, wall)?;
    let s = wall.surface();
    let Some((w0, w1)) = wall.chain_start() else {
        return Ok(match wall.stable_roots().first() {
            None => Chamber::Interior(0),
            Some(w) => match s.pair(v, &w.class).sign() {
                num_bigint::Sign::Plus => Chamber::Interior(0),
                num_bigint::Sign::NoSign => Chamber::Boundary(0),
                num_bigint::Sign::Minus => Chamber::Interior(-1),
            },
        });
    };
    let a0 = s.pair(v, &w0.class);
    let a1 = s.pair(v, &w1.class);
    if a0.is_zero() {
        return Ok(Chamber::Boundary(0));
    }
    if a1.is_zero() {
        return Ok(Chamber::Boundary(1));
    }
    if a0.is_positive() && a1.is_positive() {
        return Ok(Chamber::Interior(0));
    }
    if a0.is_negative() && a1.is_negative() {
        return Err(Error::Invariant(format!("{v} pairs negatively with both stable roots")));
    }
    // walk outward, extending the chain geometrically
    let mut len = 8;
    loop {
        let chain = root_chain(wall, len)?;
        if a1.is_negative() {
            // ⟨v, w_n⟩ < 0 < ⟨v, w_{n+1}⟩
            for n in 1..=len as i64 {
                let next = s.pair(v, &chain.get(n + 1).class);
                if next.is_zero() {
                    return Ok(Chamber::Boundary(n + 1));
                }
                if next.is_positive() {
                    return Ok(Chamber::Interior(n));
                }
            }
        } else {
            // ⟨v, w_{n+1}⟩ < 0 < ⟨v, w_n⟩ for n < 0
            for n in (-(len as i64)..=-1).rev() {
                let cur = s.pair(v, &chain.get(n).class);
                if cur.is_zero() {
                    return Ok(Chamber::Boundary(n));
                }
                if cur.is_positive() {
                    return Ok(Chamber::Interior(n));
                }
            }
        }
        if len > CHAMBER_CAP {
            return Err(Error::IterationCap { cap: CHAMBER_CAP, detail: format!("chamber of {v}") });
        }
        len *= 2;
    }
}

/// `−(x + 2v0²⟨x,u0⟩u0 − 2⟨x,v0⟩u0 − 2⟨x,u0⟩v0)`: the identity on
/// `span(u0, v0)` and `−1` on its orthogonal complement.
pub fn ilgu_reflection(x: &MukaiVector, v0: &MukaiVector, u0: &MukaiVector, s: &SurfaceModel) -> Result<MukaiVector> {
    for y in [x, v0, u0] {
        s.check(y)?;
    }
    if !s.square(u0).is_zero() || !lattice::is_primitive(u0)? {
        return Err(Error::Precondition("u0 must be primitive isotropic".into()));
    }
    if !s.pair(u0, v0).is_one() {
        return Err(Error::Precondition("⟨u0, v0⟩ must be 1".into()));
    }
    if lattice::ell(u0)? != 1 {
        return Err(Error::Precondition("ℓ(u0) must be 1".into()));
    }
    let xu = s.pair(x, u0);
    let xv = s.pair(x, v0);
    let v2 = s.square(v0);
    let inner = x + &(&u0.scale(&(&v2 * &xu * 2u32 - &xv * 2u32)) - &v0.scale(&(&xu * 2u32)));
    Ok(-&inner)
}

/// `x + 2v²⟨x,u⟩u − 2⟨x,v⟩u − 2⟨x,u⟩v`, which agrees with the reflection in
/// `d = v − v²u` on `v^⊥`.
pub fn theta_transport(x: &MukaiVector, v: &MukaiVector, u: &MukaiVector, s: &SurfaceModel) -> Result<MukaiVector> {
    for y in [x, v, u] {
        s.check(y)?;
    }
    if !s.square(u).is_zero() {
        return Err(Error::Precondition("u must be isotropic".into()));
    }
    if !s.pair(v, u).is_one() {
        return Err(Error::Precondition("⟨v, u⟩ must be 1".into()));
    }
    let xu = s.pair(x, u);
    let xv = s.pair(x, v);
    let v2 = s.square(v);
    Ok(x + &(&u.scale(&(&v2 * &xu * 2u32 - &xv * 2u32)) - &v.scale(&(&xu * 2u32))))
}

/// `R_d(z) = z − 2⟨z,d⟩/d² · d` over the rationals.
pub fn reflect_in_d(z: &RationalVector, d: &RationalVector, s: &SurfaceModel) -> Result<RationalVector> {
    let d2 = s.pair_q(d, d);
    if d2.is_zero() {
        return Err(Error::Precondition("d must not be isotropic".into()));
    }
    let k = qi(&int(2)) * s.pair_q(z, d) / d2;
    Ok(z.sub(&d.scale(&k)))
}

/// `d = v − (v²/⟨v,u⟩) u`, the class whose reflection compares polarisations
/// across a wall with isotropic `u`.
pub fn d_vector(v: &MukaiVector, u: &MukaiVector, s: &SurfaceModel) -> Result<RationalVector> {
    let vu = s.pair(v, u);
    if vu.is_zero() {
        return Err(Error::Precondition("⟨v, u⟩ must be nonzero".into()));
    }
    let k = Q::new(s.square(v), vu);
    Ok(RationalVector::from(v).sub(&RationalVector::from(u).scale(&k)))
}

/// Kinds of the steps, for reports.
pub fn word_kinds(word: &ReflectionWord) -> Vec<RootKind> {
    word.steps.iter().map(|r| r.kind).collect()
}


#[cfg(test)]
mod oracle_tests {
    use super::*;
    use crate::hyperbolic::{enumerate_roots, oracle_tests::random_walls};
    use num_bigint::BigInt;

    fn positive_classes(wall: &Wall, span: i64) -> Vec<MukaiVector> {
        let h = wall.lattice();
        let mut out = Vec::new();
        for p in -span..=span {
            for q in -span..=span {
                let x = h.element(&int(p), &int(q));
                if wall.surface().square(&x).is_positive() && wall.f(&x).unwrap().is_positive() {
                    out.push(x);
                }
            }
        }
        out
    }

    #[test]
    fn strategies_agree_and_reach_the_fundamental_chamber() {
        let mut trials = 0;
        for (i, (_, wall)) in random_walls(21, 60).into_iter().enumerate() {
            let s = wall.surface().clone();
            let box_roots: Vec<_> = enumerate_roots(wall.lattice(), &s, 30).into_iter().filter(|r| wall.f(&r.class).unwrap().is_positive()).collect();
            for v in positive_classes(&wall, 4) {
                let (a, wa) = minimalize_with(&v, &wall, Strategy::Steepest).unwrap();
                let (b, wb) = minimalize_with(&v, &wall, Strategy::Random(i as u64 * 1000 + trials)).unwrap();
                let (c, wc) = minimalize_with(&v, &wall, Strategy::Chain).unwrap();
                assert_eq!(a, b, "v={v}");
                assert_eq!(a, c, "v={v}");
                for w in [&wa, &wb, &wc] {
                    assert_eq!(w.apply(&v, &s).unwrap(), a);
                    assert_eq!(w.inverse().apply(&a, &s).unwrap(), v);
                }
                assert_eq!(s.square(&a), s.square(&v));
                for r in &box_roots {
                    assert!(!s.pair(&a, &r.class).is_negative(), "v0={a} pairs negatively with {}", r.class);
                }
                match chamber_index(&v, &wall).unwrap() {
                    Chamber::Interior(n) => {
                        assert_eq!(wc.len() as i64, n.abs());
                        assert_eq!(wa.len() % 2, (n.unsigned_abs() % 2) as usize, "parity of word length");
                    }
                    Chamber::Boundary(n) => assert!(s.pair(&v, &root_chain(&wall, n.unsigned_abs() as usize + 1).unwrap().get(n).class).is_zero()),
                }
                trials += 1;
            }
        }
        assert!(trials > 1000);
    }

    #[test]
    fn chamber_sign_patterns() {
        for (_, wall) in random_walls(5, 60) {
            if wall.chain_start().is_none() {
                continue;
            }
            let s = wall.surface().clone();
            let chain = root_chain(&wall, 12).unwrap();
            for n in chain.range() {
                assert!(wall.is_effective(&chain.get(n).class).unwrap());
            }
            // composition identity along the chain
            let r01 = |x: &MukaiVector| reflect_root(&reflect_root(x, &chain.get(0).class, &s).unwrap(), &chain.get(1).class, &s).unwrap();
            for i in -3..6i64 {
                let ri = |x: &MukaiVector| reflect_root(&reflect_root(x, &chain.get(i).class, &s).unwrap(), &chain.get(i + 1).class, &s).unwrap();
                for x in positive_classes(&wall, 2) {
                    assert_eq!(ri(&x), r01(&x), "composition at i={i}");
                }
            }
            for v in positive_classes(&wall, 5) {
                let pairs: Vec<(i64, BigInt)> = chain.range().map(|n| (n, s.pair(&v, &chain.get(n).class))).collect();
                let get = |n: i64| pairs.iter().find(|(k, _)| *k == n).map(|(_, x)| x.clone());
                let ch = chamber_index(&v, &wall).unwrap();
                let ok = match ch {
                    Chamber::Boundary(n) => get(n).unwrap().is_zero(),
                    Chamber::Interior(0) => get(0).unwrap().is_positive() && get(1).unwrap().is_positive(),
                    Chamber::Interior(n) if n > 0 => get(n + 1).unwrap().is_positive() && get(n).unwrap().is_negative(),
                    Chamber::Interior(n) => get(n + 1).unwrap().is_negative() && get(n).unwrap().is_positive(),
                };
                assert!(ok, "v={v} chamber {ch:?}");
            }
        }
    }
}
