// Central charges on the slice `β = sA, ω = tA`, the wall loci of `v`,
// the class `ξ` at a point on a wall, and the effective side it induces.

use num_traits::Zero;

use enriques_walls::arith::{int, q};
use enriques_walls::lattice::RationalVector;
use enriques_walls::slice::{self, SlicePoint};
use enriques_walls::{MukaiVector, SurfaceModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new())?;
    let a = vec![int(1), int(1)];
    let v = MukaiVector::from_ints(1, &[0, 0], -3);
    let (walls, off) = slice::potential_walls(&v, &a, 6, &s)?;
    println!("{} walls for {v} meet the slice, {off} miss it", walls.len());
    for p in walls.iter().take(5) {
        println!("  {} from w = {}", p.locus, p.generator);
    }
    let hc = &walls[0];
    let pts = hc.locus.rational_points(3, 1000);
    for (ps, pt) in &pts {
        let p = SlicePoint::new(ps.clone(), pt.clone(), a.clone(), &s)?;
        let xi = slice::xi(&v, &p, &s)?;
        assert!(s.pair_q(&xi, &RationalVector::from(&v)).is_zero());
        let o = slice::orientation_from_point(&v, &hc.lattice, &p, &s)?;
        println!("  at s = {ps}, t = {pt}: Z(v) = {}, ξ = {xi}, side {:?}", slice::central_charge(&v, &p, &s)?, o.functional);
    }
    if let Some(b) = slice::gieseker_bound(&v, &a, &s)? {
        let p = SlicePoint::new(b - q(1), q(1), a.clone(), &s)?;
        println!("Gieseker side: Im Z(v) = {} at s = {}", slice::central_charge(&v, &p, &s)?.im, p.s);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
