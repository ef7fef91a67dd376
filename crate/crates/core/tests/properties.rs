//! Randomized invariants of the lattice, Pell, reflection, HN and slice layers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use enriques_walls::arith::{self, int, Q};
use enriques_walls::classify::{classify, Contraction, Tss};
use enriques_walls::hn::{self, Decomposition};
use enriques_walls::hyperbolic::{enumerate_roots, ConeRay, LatticeTag};
use enriques_walls::lattice::{det_parities, ell, is_primitive, RationalVector};
use enriques_walls::pell;
use enriques_walls::sample::{self, Instance, Limits};
use enriques_walls::slice::{self, SlicePoint};
use enriques_walls::weyl::{self, Strategy as Reduce};
use enriques_walls::{MukaiVector, SurfaceModel};

fn enriques() -> SurfaceModel {
    SurfaceModel::unnodal()
}

fn vector(rho: usize) -> impl Strategy<Value = MukaiVector> {
    (-20i64..=20, prop::collection::vec(-20i64..=20, rho), -20i64..=20).prop_map(|(r, c, s)| MukaiVector::from_ints(r, &c, 2 * s + r.rem_euclid(2)))
}

fn instance(seed: u64) -> Option<Instance> {
    sample::instances(seed, 1, Limits::default()).pop()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pairing_is_symmetric_and_bilinear(a in vector(10), b in vector(10), c in vector(10), k in -5i64..=5) {
        let s = enriques();
        prop_assert_eq!(s.pair(&a, &b), s.pair(&b, &a));
        prop_assert_eq!(s.pair(&(&a.scale_i(k) + &b), &c), s.pair(&a, &c) * k + s.pair(&b, &c));
    }

    #[test]
    fn ell_of_primitive_vectors(v in vector(10)) {
        prop_assume!(!v.is_zero() && is_primitive(&v).unwrap());
        let l = ell(&v).unwrap();
        prop_assert!(l == 1 || l == 2);
        if l == 2 {
            prop_assert_eq!((&v.r + &v.s).mod_floor(&int(4)), int(2));
            prop_assert!(v.c1.iter().all(|c| (c % 2u32).is_zero()));
        }
    }

    #[test]
    fn brahmagupta_composition_preserves_the_unit_norm(d in 2i64..=200, i in 1u32..4, j in 1u32..4) {
        prop_assume!(arith::exact_sqrt(&int(d)).is_none());
        let e = pell::pell_fundamental(&int(d), 1).unwrap().unwrap();
        let unit = pell::Surd2::new(e.x.clone(), e.y.clone(), 0, int(d));
        let (a, b) = (unit.pow(i), unit.pow(j));
        let (x1, y1) = a.integral().unwrap();
        let (x2, y2) = b.integral().unwrap();
        let x = &x1 * &x2 + int(d) * &y1 * &y2;
        let y = &x1 * &y2 + &x2 * &y1;
        prop_assert_eq!(&x * &x - int(d) * &y * &y, int(1));
    }

    #[test]
    fn isotropic_lattices_pair_as_the_root_predicts(seed in any::<u64>()) {
        let Some(i) = instance(seed) else { return Ok(()) };
        let (w, s) = (&i.wall, i.wall.surface());
        let case = w.lattice_case();
        match w.isotropic_classes() {
            Some([u1, u2]) => {
                let u12 = s.pair(&u1, &u2);
                for r in &case.witnesses {
                    let p = s.pair(&u1, &r.class);
                    prop_assert_eq!(&u12, &(&p * &p * r.kind.reflection_coefficient()));
                }
            }
            None => prop_assert!(!matches!(case.tag, LatticeTag::OneSpherical | LatticeTag::OneExceptional)),
        }
        if matches!(case.tag, LatticeTag::TwoSpherical | LatticeTag::TwoExceptional | LatticeTag::MixedSphericalExceptional) {
            prop_assert!(w.isotropic_classes().is_none());
        }
    }

    #[test]
    fn effective_cone_contains_no_line(seed in any::<u64>()) {
        let Some(i) = instance(seed) else { return Ok(()) };
        let class = |r: &ConeRay| match r {
            ConeRay::Root { root } => Some(root.class.clone()),
            ConeRay::Isotropic { class } => Some(class.clone()),
            ConeRay::Irrational { .. } => None,
        };
        let (a, b) = i.wall.effective_cone();
        if let (Some(x), Some(y)) = (class(&a), class(&b)) {
            let (_, px) = x.primitive_part().unwrap();
            let (_, py) = y.primitive_part().unwrap();
            prop_assert_ne!(px, -&py);
        }
    }

    #[test]
    fn reflections_are_isometric_involutions(seed in any::<u64>(), p in -30i64..=30, q in -30i64..=30) {
        let Some(i) = instance(seed) else { return Ok(()) };
        let (h, s) = (i.wall.lattice(), i.wall.surface());
        let x = h.element(&int(p), &int(q));
        for r in enumerate_roots(h, s, 6) {
            let y = weyl::reflect_root(&x, &r.class, s).unwrap();
            prop_assert_eq!(&weyl::reflect_root(&y, &r.class, s).unwrap(), &x);
            prop_assert_eq!(s.square(&y), s.square(&x));
            prop_assert_eq!(s.pair(&y, &i.v), s.pair(&x, &weyl::reflect_root(&i.v, &r.class, s).unwrap()));
        }
    }

    #[test]
    fn minimalize_is_unique_and_keeps_the_square(seed in any::<u64>(), other in any::<u64>()) {
        let Some(i) = instance(seed) else { return Ok(()) };
        let (a, wa) = weyl::minimalize(&i.v, &i.wall).unwrap();
        let (b, _) = weyl::minimalize_with(&i.v, &i.wall, Reduce::Random(other)).unwrap();
        let (c, _) = weyl::minimalize_with(&i.v, &i.wall, Reduce::Chain).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &c);
        let s = i.wall.surface();
        prop_assert_eq!(s.square(&a), s.square(&i.v));
        prop_assert_eq!(wa.apply(&i.v, s).unwrap(), a.clone());
        let (again, w0) = weyl::minimalize(&a, &i.wall).unwrap();
        prop_assert_eq!(again, a);
        prop_assert!(w0.is_empty());
    }

    #[test]
    fn codim_ignores_the_order_of_parts(seed in any::<u64>(), shift in 0usize..8) {
        let Some(i) = instance(seed) else { return Ok(()) };
        let Ok(all) = hn::enumerate_decompositions(&i.v, &i.wall, 2_000) else { return Ok(()) };
        for d in all.iter().take(50) {
            let mut parts = d.parts.clone();
            let n = parts.len();
            parts.rotate_left(shift % n);
            parts.swap(0, n - 1);
            let e = Decomposition::new(parts).unwrap();
            prop_assert_eq!(hn::codim(&e, &i.wall).unwrap(), hn::codim(d, &i.wall).unwrap());
            prop_assert_eq!(hn::filtration_dim_recursive(&e, &i.wall).unwrap(), hn::filtration_dim(d, &i.wall).unwrap());
        }
    }

    #[test]
    fn classification_is_equivariant_and_consistent(seed in any::<u64>()) {
        let Some(i) = instance(seed) else { return Ok(()) };
        let (la, lb) = det_parities(&i.v);
        for l in [la, lb] {
            let rep = classify(&i.v, &l, &i.wall).unwrap();
            let mine = rep.requested();
            let at_min = classify(&rep.minimal.v0, &mine.determinant_at_minimal, &i.wall).unwrap();
            let theirs = at_min.requested();
            let strip = |t: &[Tss]| t.iter().copied().filter(|x| *x != Tss::TSS1).collect::<Vec<_>>();
            prop_assert_eq!(&mine.contraction, &theirs.contraction);
            prop_assert_eq!(strip(&mine.tss), strip(&theirs.tss));
            prop_assert!(theirs.tss.iter().all(|t| *t != Tss::TSS1));
            let has = |c: Contraction| mine.contraction.contains(&c);
            if has(Contraction::DivisorialLGU) && has(Contraction::DivisorialHilbertChow) {
                // the two tags need two different isotropic classes
                let s = i.wall.surface();
                let us = rep.isotropic.clone().expect("isotropic lattice");
                let with = |k: i64| us.iter().filter(|u| s.pair(&rep.minimal.v0, u) == int(k) && ell(u).unwrap() == 2).count();
                prop_assert!(with(1) == 1 && with(2) == 1);
            }
            if mine.contraction.iter().any(|c| c.is_fibration()) {
                prop_assert!(mine.tss.iter().any(|t| matches!(t, Tss::TSS3 | Tss::TSS4)));
            }
        }
    }

    #[test]
    fn xi_is_orthogonal_to_v(v in vector(2), s_num in -40i64..=40, t_num in 1i64..=40, den in 1i64..=7, a0 in 1i64..4, a1 in 1i64..4) {
        let s = SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new()).unwrap();
        let p = SlicePoint::new(Q::new(int(s_num), int(den)), Q::new(int(t_num), int(den)), vec![int(a0), int(a1)], &s).unwrap();
        if let Ok(x) = slice::xi(&v, &p, &s) {
            prop_assert!(s.pair_q(&x, &RationalVector::from(&v)).is_zero());
        }
    }

    #[test]
    fn gieseker_side_has_positive_imaginary_part(r in 1i64..6, c0 in -6i64..=6, c1 in -6i64..=6, k in -10i64..=10, a0 in 1i64..4, a1 in 1i64..4) {
        let s = SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new()).unwrap();
        let v = MukaiVector::from_ints(r, &[c0, c1], 2 * k + r.rem_euclid(2));
        let a = vec![int(a0), int(a1)];
        let bound = slice::gieseker_bound(&v, &a, &s).unwrap().expect("a bound for positive rank");
        for step in 1..4i64 {
            let p = SlicePoint::new(&bound - Q::from(int(step)), Q::new(int(1), int(step)), a.clone(), &s).unwrap();
            prop_assert!(slice::central_charge(&v, &p, &s).unwrap().im.is_positive());
        }
    }
}

#[test]
fn structure_sheaf_and_point_squares() {
    let s = enriques();
    let z = vec![0; 10];
    assert_eq!(s.square(&MukaiVector::from_ints(1, &z, 1)), int(-1));
    assert_eq!(s.square(&MukaiVector::from_ints(0, &z, 2)), BigInt::zero());
}

#[test]
fn extended_gram_has_signature_two_rho() {
    for s in [enriques(), SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new()).unwrap()] {
        let g: Vec<Vec<Q>> = s.extended_gram().iter().map(|row| row.iter().map(arith::qi).collect()).collect();
        assert_eq!(arith::inertia(&g), (2, s.rho(), 0), "{}", s.name());
    }
}

#[test]
fn sweep_has_no_unexplained_disagreements() {
    let mut rng = StdRng::seed_from_u64(99);
    for i in sample::instances(rng.gen(), 80, Limits::default()) {
        let rep = classify(&i.v, &det_parities(&i.v).0, &i.wall).unwrap();
        for c in enriques_walls::classify::cross_validate(&rep, &i.wall) {
            assert!(!c.unexplained_failure(), "{} at {}: {}", c.name, i.v, c.detail);
        }
    }
}

#[test]
fn removing_a_tag_is_caught() {
    let s = SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new()).unwrap();
    let v = MukaiVector::from_ints(1, &[0, 0], -3);
    let w = MukaiVector::from_ints(0, &[0, 0], 2);
    let wall = enriques_walls::hyperbolic::Wall::near(&v, &w, &s).unwrap();
    let mut rep = classify(&v, &det_parities(&v).0, &wall).unwrap();
    assert!(enriques_walls::classify::cross_validate(&rep, &wall).iter().all(|c| c.pass));
    for d in rep.per_determinant.values_mut() {
        d.tss.clear();
    }
    assert!(enriques_walls::classify::cross_validate(&rep, &wall).iter().any(|c| c.unexplained_failure()));
}
