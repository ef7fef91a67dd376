//! Seeded generators of walls and classes for sweeps, tests and examples.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;

use crate::error::Error;
use crate::hyperbolic::{build_sublattice, ConeOrientation, RankTwoLattice, Wall};
use crate::lattice::{MukaiVector, SurfaceModel};

/// Rank-two surface models used by the sweeps: unnodal, all residues
/// nodal, and a single nodal residue.
pub fn surfaces() -> Vec<SurfaceModel> {
    vec![
        SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new()).expect("valid"),
        SurfaceModel::hyperbolic_plane(vec![vec![1, 0], vec![0, 1], vec![1, 1]]).expect("valid"),
        SurfaceModel::hyperbolic_plane(vec![vec![1, 0]]).expect("valid"),
    ]
}

pub fn random_vector<R: Rng>(rng: &mut R, rho: usize, span: i64) -> MukaiVector {
    let r = rng.gen_range(-span..=span);
    let c: Vec<i64> = (0..rho).map(|_| rng.gen_range(-span..=span)).collect();
    let mut s = rng.gen_range(-2 * span..=2 * span);
    if (r - s) % 2 != 0 {
        s += 1;
    }
    MukaiVector::from_ints(r, &c, s)
}

/// A class on a wall.
#[derive(Clone, Debug)]
pub struct Instance {
    pub v: MukaiVector,
    pub wall: Wall,
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Bound on `|disc H|`.
    pub max_disc: i64,
    /// Bound on `v²`.
    pub max_square: i64,
    /// Bound on the coordinates of `v` in the reduced basis of `H`.
    pub span: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_disc: 40, max_square: 20, span: 6 }
    }
}

/// Lattices from random pairs of small vectors, then every class `v` with
/// `0 < v² ≤ max_square` and small coordinates, each on a wall with an
/// independent random generic orientation making `v` effective.
pub fn instances(seed: u64, count: usize, lim: Limits) -> Vec<Instance> {
    let mut rng = StdRng::seed_from_u64(seed);
    let ss = surfaces();
    let mut out = Vec::new();
    let mut guard = 0usize;
    while out.len() < count && guard < 1_000_000 {
        guard += 1;
        let s = &ss[rng.gen_range(0..ss.len())];
        let a = random_vector(&mut rng, s.rho(), 2);
        let b = random_vector(&mut rng, s.rho(), 2);
        let Ok(h) = build_sublattice(&a, &b, s) else { continue };
        if h.disc().abs() > BigInt::from(lim.max_disc) {
            continue;
        }
        let classes = positive_classes(&h, s, &lim);
        if classes.is_empty() {
            continue;
        }
        let v = classes[rng.gen_range(0..classes.len())].clone();
        let Some(wall) = orient_for(&v, &h, s, &mut rng) else { continue };
        out.push(Instance { v, wall });
    }
    out
}

fn positive_classes(h: &RankTwoLattice, s: &SurfaceModel, lim: &Limits) -> Vec<MukaiVector> {
    let mut out = Vec::new();
    for p in -lim.span..=lim.span {
        for q in 0..=lim.span {
            if q == 0 && p <= 0 {
                continue;
            }
            let v = h.element(&BigInt::from(p), &BigInt::from(q));
            let sq = s.square(&v).to_i64().unwrap_or(i64::MAX);
            if sq > 0 && sq <= lim.max_square {
                out.push(v);
            }
        }
    }
    out
}

/// A random generic orientation on `h` with `v` in the effective cone; the
/// sign of `v` is not changed, so `None` if no attempt works.
pub fn orient_for<R: Rng>(v: &MukaiVector, h: &RankTwoLattice, s: &SurfaceModel, rng: &mut R) -> Option<Wall> {
    for _ in 0..40 {
        let p = rng.gen_range(-7i64..=7);
        let q = rng.gen_range(-7i64..=7);
        let c = h.element(&BigInt::from(p), &BigInt::from(q));
        if !s.square(&c).is_positive() {
            continue;
        }
        for c in [c.clone(), -&c] {
            let Ok(o) = ConeOrientation::from_class(h, &c, s) else { continue };
            match Wall::new(h.clone(), s.clone(), o) {
                Ok(w) => {
                    if w.in_cone(v).unwrap_or(false) {
                        return Some(w);
                    }
                }
                Err(Error::Orientation(_)) => {}
                Err(_) => return None,
            }
        }
    }
    None
}
