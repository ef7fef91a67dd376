//! Dimensions of moduli stacks of semistable objects on a wall and of the
//! HN strata they give off the wall.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::int;
use crate::error::{Error, Result};
use crate::hyperbolic::Wall;
use crate::lattice::{self, MukaiVector, SurfaceModel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub parts: Vec<MukaiVector>,
    pub total: MukaiVector,
}

impl Decomposition {
    pub fn new(parts: Vec<MukaiVector>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Precondition("empty decomposition".into()))?;
        let total = parts.iter().skip(1).fold(first.clone(), |acc, p| &acc + p);
        Ok(Decomposition { parts, total })
    }
}

/// Dimension of the stack of semistable objects of class `a` on the wall.
/// Isotropic multiples use the bound `⌊mℓ/2⌋` as their value.
pub fn stack_dim(a: &MukaiVector, wall: &Wall) -> Result<BigInt> {
    if !wall.is_effective(a)? {
        return Err(Error::Precondition(format!("{a} is not effective on this wall")));
    }
    let s = wall.surface();
    let (m, b) = a.primitive_part()?;
    let b2 = s.square(&b);
    Ok(if b2.is_positive() {
        s.square(a)
    } else if b2.is_zero() {
        (&m * int(lattice::ell(&b)? as i64)).div_floor(&int(2))
    } else if b2 == int(-2) {
        -(&m * &m)
    } else if m.is_even() {
        -(&m * &m) / 2u32
    } else {
        -(&m * &m + 1u32) / 2u32
    })
}

/// `2·dim − a²`, the contribution of one part to `v² − codim`, doubled.
fn weight(a: &MukaiVector, wall: &Wall) -> Result<BigInt> {
    Ok(stack_dim(a, wall)? * 2u32 - wall.surface().square(a))
}

/// `Σ dim M(v_i) + Σ_{i<j} ⟨v_i, v_j⟩`.
pub fn filtration_dim(d: &Decomposition, wall: &Wall) -> Result<BigInt> {
    let s = wall.surface();
    let mut acc = BigInt::zero();
    for (i, p) in d.parts.iter().enumerate() {
        acc += stack_dim(p, wall)?;
        for q in &d.parts[i + 1..] {
            acc += s.pair(p, q);
        }
    }
    Ok(acc)
}

/// The same value through the recursion `F(v_1..v_s) = F(v_1..v_{s−1}) + dim M(v_s) + ⟨v − v_s, v_s⟩`.
pub fn filtration_dim_recursive(d: &Decomposition, wall: &Wall) -> Result<BigInt> {
    let s = wall.surface();
    let mut acc = BigInt::zero();
    let mut partial: Option<MukaiVector> = None;
    for p in &d.parts {
        acc += stack_dim(p, wall)?;
        if let Some(prev) = &partial {
            acc += s.pair(prev, p);
        }
        partial = Some(match partial {
            None => p.clone(),
            Some(prev) => &prev + p,
        });
    }
    Ok(acc)
}

pub fn codim(d: &Decomposition, wall: &Wall) -> Result<BigInt> {
    let t2 = wall.surface().square(&d.total);
    if !t2.is_positive() {
        return Err(Error::Precondition("the total class must have positive square".into()));
    }
    Ok(t2 - filtration_dim(d, wall)?)
}

/// Whether a part is an isotropic multiple `mu` with `m ≥ 3`, where the
/// dimension is only known to be bounded by `⌊mℓ/2⌋`.
pub fn uses_isotropic_bound(a: &MukaiVector, s: &SurfaceModel) -> bool {
    match a.primitive_part() {
        Ok((m, b)) => s.square(&b).is_zero() && m >= int(3),
        Err(_) => false,
    }
}

/// Effective classes `a` with `a ∈ C_W ∩ (v − C_W)` and `a ≠ v`, sorted by `f`.
fn candidates(v: &MukaiVector, wall: &Wall) -> Result<Vec<(BigInt, MukaiVector)>> {
    let fv = wall.f(v)?;
    let mut out = Vec::new();
    let mut k = BigInt::from(1);
    while k < fv {
        // an effective class m·b with f = k has m ≤ k and b² ≥ −2
        let min_sq = -(&k * &k * 2u32);
        for a in wall.points_on_level(&k, &min_sq) {
            if wall.is_effective(&a)? && wall.in_cone(&(v - &a))? {
                out.push((k.clone(), a));
            }
        }
        k += 1;
    }
    out.sort();
    Ok(out)
}

/// All multisets of at least two effective classes summing to `v`. Stops
/// with an error after `limit` decompositions.
pub fn enumerate_decompositions(v: &MukaiVector, wall: &Wall, limit: usize) -> Result<Vec<Decomposition>> {
    check_total(v, wall)?;
    let cand = candidates(v, wall)?;
    let mut out = Vec::new();
    let mut parts = Vec::new();
    descend(v, 0, &cand, wall, &mut parts, &mut out, limit)?;
    Ok(out)
}

fn check_total(v: &MukaiVector, wall: &Wall) -> Result<()> {
    if !wall.surface().square(v).is_positive() || !wall.in_cone(v)? {
        return Err(Error::Precondition(format!("{v} must be a positive class in the effective cone")));
    }
    Ok(())
}

fn descend(
    target: &MukaiVector,
    start: usize,
    cand: &[(BigInt, MukaiVector)],
    wall: &Wall,
    parts: &mut Vec<MukaiVector>,
    out: &mut Vec<Decomposition>,
    limit: usize,
) -> Result<()> {
    let ft = wall.f(target)?;
    for (j, (fa, a)) in cand.iter().enumerate().skip(start) {
        if *fa > ft {
            break;
        }
        if a == target {
            if !parts.is_empty() {
                let mut p = parts.clone();
                p.push(a.clone());
                out.push(Decomposition::new(p)?);
                if out.len() > limit {
                    return Err(Error::IterationCap { cap: limit, detail: "decomposition enumeration".into() });
                }
            }
            continue;
        }
        let rest = target - a;
        // remaining parts come later in the order, so f(rest) ≥ f(a)
        if &ft - fa < *fa || !wall.in_cone(&rest)? {
            continue;
        }
        parts.push(a.clone());
        descend(&rest, j, cand, wall, parts, out, limit)?;
        parts.pop();
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinCodim {
    /// `None` when `v` has no decomposition (no wall).
    #[serde(with = "crate::arith::serde_str::option")]
    pub value: Option<BigInt>,
    pub witness: Option<Decomposition>,
    /// The witness has an isotropic part `mu` with `m ≥ 3`.
    pub isotropic_bound: bool,
}

impl MinCodim {
    pub fn display_value(&self) -> String {
        match &self.value {
            Some(x) => x.to_string(),
            None => "inf".into(),
        }
    }
}

/// Minimum codimension over all decompositions, by dynamic programming over
/// the remainders `v − a_1 − … − a_k`.
pub fn min_codim(v: &MukaiVector, wall: &Wall) -> Result<MinCodim> {
    check_total(v, wall)?;
    let cand = candidates(v, wall)?;
    let weights: Vec<BigInt> = cand.iter().map(|(_, a)| weight(a, wall)).collect::<Result<_>>()?;
    let mut memo: HashMap<MukaiVector, Option<(BigInt, Vec<usize>)>> = HashMap::new();
    let mut best: Option<(BigInt, Vec<usize>)> = None;
    let fv = wall.f(v)?;
    for (j, (fa, a)) in cand.iter().enumerate() {
        let rest = v - a;
        if *fa >= fv || !wall.in_cone(&rest)? {
            continue;
        }
        if let Some((w, mut idx)) = best_split(&rest, &cand, &weights, wall, &mut memo)? {
            let total = w + &weights[j];
            if best.as_ref().is_none_or(|(b, _)| total > *b) {
                idx.push(j);
                best = Some((total, idx));
            }
        }
    }
    let s = wall.surface();
    Ok(match best {
        None => MinCodim { value: None, witness: None, isotropic_bound: false },
        Some((w, idx)) => {
            let parts: Vec<MukaiVector> = idx.iter().rev().map(|&i| cand[i].1.clone()).collect();
            let iso = parts.iter().any(|p| uses_isotropic_bound(p, s));
            let value = (s.square(v) - w) / 2u32;
            MinCodim { value: Some(value), witness: Some(Decomposition::new(parts)?), isotropic_bound: iso }
        }
    })
}

/// Largest total weight of a decomposition of `t` into one or more parts.
fn best_split(
    t: &MukaiVector,
    cand: &[(BigInt, MukaiVector)],
    weights: &[BigInt],
    wall: &Wall,
    memo: &mut HashMap<MukaiVector, Option<(BigInt, Vec<usize>)>>,
) -> Result<Option<(BigInt, Vec<usize>)>> {
    if let Some(x) = memo.get(t) {
        return Ok(x.clone());
    }
    let ft = wall.f(t)?;
    let mut best: Option<(BigInt, Vec<usize>)> = None;
    for (j, (fa, a)) in cand.iter().enumerate() {
        if *fa > ft {
            break;
        }
        if a == t {
            if best.as_ref().is_none_or(|(b, _)| weights[j] > *b) {
                best = Some((weights[j].clone(), vec![j]));
            }
            continue;
        }
        let rest = t - a;
        if !wall.in_cone(&rest)? || rest.is_zero() {
            continue;
        }
        if let Some((w, mut idx)) = best_split(&rest, cand, weights, wall, memo)? {
            let total = w + &weights[j];
            if best.as_ref().is_none_or(|(b, _)| total > *b) {
                idx.push(j);
                best = Some((total, idx));
            }
        }
    }
    memo.insert(t.clone(), best.clone());
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{build_sublattice, ConeOrientation};

    fn mv(r: i64, c: &[i64], s: i64) -> MukaiVector {
        MukaiVector::from_ints(r, c, s)
    }

    /// `v = w + 2u` with `w` spherical, `u` isotropic, `⟨w, u⟩ = 1`, `ℓ(u) = 1`.
    fn tss_wall() -> (MukaiVector, MukaiVector, MukaiVector, Wall) {
        let s = SurfaceModel::hyperbolic_plane(vec![vec![1, 1]]).unwrap();
        let u = mv(0, &[1, 0], 0);
        let w = mv(0, &[1, -1], 0);
        assert_eq!(s.square(&w), int(-2));
        assert_eq!(s.pair(&w, &u), int(-1));
        let w = -&w; // (0, (-1,1), 0): ⟨w,u⟩ = 1
        let v = &w + &u.scale_i(2);
        let h = build_sublattice(&u, &w, &s).unwrap();
        // v itself is orthogonal to w, so orient by a nearby class
        let o = ConeOrientation::from_class(&h, &(&w + &u.scale_i(3)), &s).unwrap();
        let wall = Wall::new(h, s, o).unwrap();
        (v, w, u, wall)
    }

    #[test]
    fn dimensions_of_basic_parts() {
        let (v, w, u, wall) = tss_wall();
        assert_eq!(stack_dim(&w, &wall).unwrap(), int(-1));
        assert_eq!(stack_dim(&u.scale_i(2), &wall).unwrap(), int(1));
        let d = Decomposition::new(vec![w.clone(), u.scale_i(2)]).unwrap();
        assert_eq!(d.total, v);
        assert_eq!(filtration_dim(&d, &wall).unwrap(), int(2));
        assert_eq!(codim(&d, &wall).unwrap(), int(0));
        let mc = min_codim(&v, &wall).unwrap();
        assert_eq!(mc.value, Some(int(0)));
    }

    #[test]
    fn enumeration_lists_the_expected_splits() {
        let (v, w, u, wall) = tss_wall();
        let all = enumerate_decompositions(&v, &wall, 1000).unwrap();
        let has = |ps: &[MukaiVector]| {
            all.iter().any(|d| {
                let mut a = d.parts.clone();
                let mut b = ps.to_vec();
                a.sort();
                b.sort();
                a == b
            })
        };
        assert!(has(&[w.clone(), u.scale_i(2)]));
        assert!(has(&[w.clone(), u.clone(), u.clone()]));
        assert!(has(&[&w + &u, u.clone()]));
    }
}

#[cfg(test)]
mod oracle_tests {
    use super::*;
    use crate::hyperbolic::oracle_tests::random_walls;
    use crate::hyperbolic::LatticeTag;

    /// Candidate parts by a plain coordinate loop, and the number of
    /// multisets by counting partitions over them.
    fn brute_count(v: &MukaiVector, wall: &Wall, span: i64) -> (usize, usize) {
        let h = wall.lattice();
        let mut cand = Vec::new();
        for p in -span..=span {
            for q in -span..=span {
                let a = h.element(&int(p), &int(q));
                if a.is_zero() || a == *v {
                    continue;
                }
                if wall.is_effective(&a).unwrap() && wall.in_cone(&(v - &a)).unwrap() {
                    cand.push(a);
                }
            }
        }
        fn ways(t: &MukaiVector, i: usize, cand: &[MukaiVector], wall: &Wall, parts: usize) -> usize {
            if t.is_zero() {
                return usize::from(parts >= 2);
            }
            let mut n = 0;
            for j in i..cand.len() {
                let r = t - &cand[j];
                if r.is_zero() || wall.in_cone(&r).unwrap() {
                    n += ways(&r, j, cand, wall, parts + 1);
                }
            }
            n
        }
        let n = ways(v, 0, &cand, wall, 0);
        (cand.len(), n)
    }

    fn small_cases(seed: u64, count: usize, fmax: i64) -> Vec<(MukaiVector, Wall)> {
        random_walls(seed, count * 4)
            .into_iter()
            .filter(|(v, w)| w.f(v).unwrap() <= int(fmax) && w.lattice().delta() <= int(40))
            .take(count)
            .collect()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let cases = small_cases(31, 50, 12);
        assert!(cases.len() >= 30, "only {} cases", cases.len());
        for (v, wall) in cases {
            let all = enumerate_decompositions(&v, &wall, 100_000).unwrap();
            let (_, n) = brute_count(&v, &wall, 14);
            assert_eq!(all.len(), n, "v={v}, H={:?}", wall.lattice().gram2);
            let mc = min_codim(&v, &wall).unwrap();
            let direct = all.iter().map(|d| codim(d, &wall).unwrap()).min();
            assert_eq!(mc.value, direct, "v={v}");
            for d in &all {
                assert_eq!(d.total, v);
                assert_eq!(filtration_dim(d, &wall).unwrap(), filtration_dim_recursive(d, &wall).unwrap());
                let mut rev = d.clone();
                rev.parts.reverse();
                assert_eq!(codim(&rev, &wall).unwrap(), codim(d, &wall).unwrap());
                // HN factors have distinct phases, so proportional parts are excluded here
                let s = wall.surface();
                let proportional = d.parts.iter().enumerate().any(|(i, a)| {
                    d.parts[i + 1..].iter().any(|b| {
                        let ab = s.pair(a, b);
                        &ab * &ab == s.square(a) * s.square(b)
                    })
                });
                if !proportional && d.parts.iter().all(|p| s.square(p).is_positive()) {
                    assert!(codim(d, &wall).unwrap() >= int(2));
                }
            }
        }
    }

    #[test]
    fn non_isotropic_minimal_classes_have_no_low_strata() {
        for (v, wall) in small_cases(41, 80, 16) {
            if wall.lattice().is_isotropic() || wall.lattice_case().tag == LatticeTag::NoNegatives {
                continue;
            }
            let s = wall.surface();
            let positive = wall.stable_roots().iter().all(|w| s.pair(&v, &w.class).is_positive());
            if !positive {
                continue;
            }
            let mc = min_codim(&v, &wall).unwrap();
            if let Some(c) = mc.value {
                assert!(c >= int(2), "v={v} min codim {c}");
            }
        }
    }
}
