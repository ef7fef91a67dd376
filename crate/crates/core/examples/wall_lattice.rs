// The lattice of a potential wall: saturation, the negative classes it
// contains, its isotropic classes and the effective cone for a chosen side.

use enriques_walls::hyperbolic::{build_sublattice, enumerate_roots, ConeRay, Wall};
use enriques_walls::pell;
use enriques_walls::{MukaiVector, SurfaceModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new())?;
    let v = MukaiVector::from_ints(3, &[1, 2], -1);
    let w = MukaiVector::from_ints(1, &[0, 0], 1);
    let h = build_sublattice(&v, &w, &s)?;
    println!("H = <{}, {}>, gram {:?}, disc {}", h.basis[0], h.basis[1], h.gram2, h.disc());

    let roots = enumerate_roots(&h, &s, 30);
    println!("{} roots with coordinates in [-30, 30]:", roots.len());
    for r in roots.iter().take(6) {
        println!("  {} ({})", r.class, r.kind);
    }
    // the exceptional classes of Z w ⊕ Z z, z = -v - ⟨v,w⟩w ⊥ w, from the
    // units of the Pell equation
    let z = &(-&v) - &w.scale(&s.pair(&v, &w));
    let seq = pell::root_sequence(&w, &z, &s, 2)?;
    let seq: Vec<String> = seq.iter().map(|x| x.to_string()).collect();
    println!("z = {z}, z² = {}; sequence {}", s.square(&z), seq.join(", "));

    let wall = Wall::near(&v, &w, &s)?;
    let case = wall.lattice_case();
    println!("case {} with witnesses {:?}", case.tag, case.witnesses.iter().map(|r| r.class.to_string()).collect::<Vec<_>>());
    let (a, b) = wall.effective_cone();
    let ray = |r: &ConeRay| match r {
        ConeRay::Root { root } => format!("root {}", root.class),
        ConeRay::Isotropic { class } => format!("isotropic {class}"),
        ConeRay::Irrational { p_rat, p_surd, disc, den } => format!("p = ({p_rat} + {p_surd}√{disc})/{den}, q = 1"),
    };
    println!("effective cone spanned by {} and {}", ray(&a), ray(&b));
    match wall.isotropic_labelled(&v) {
        Some([u1, u2]) => println!("isotropic u1 = {u1}, u2 = {u2}"),
        None => println!("no isotropic classes"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
