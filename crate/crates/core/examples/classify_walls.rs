// Wall types for the named instances: Hilbert–Chow, LGU, a P¹-fibration
// that depends on the determinant, a flop with an uncontracted divisor and
// the non-normal cases.

use enriques_walls::classify::{classify, cross_validate};
use enriques_walls::hyperbolic::Wall;
use enriques_walls::lattice::det_parities;
use enriques_walls::{MukaiVector, SurfaceModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let u = SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new())?;
    let nodal = SurfaceModel::hyperbolic_plane(vec![vec![1, 0], vec![0, 1], vec![1, 1]])?;
    let point = MukaiVector::from_ints(0, &[0, 0], 2);
    let o = MukaiVector::from_ints(1, &[0, 0], 1);
    let cases = [
        ("Hilbert-Chow, v² = 3", &u, MukaiVector::from_ints(1, &[0, 0], -3), &point),
        ("Hilbert-Chow, v² = 1", &u, MukaiVector::from_ints(1, &[0, 0], -1), &point),
        ("LGU", &u, MukaiVector::from_ints(2, &[0, 0], -4), &point),
        ("P1 fibration", &nodal, MukaiVector::from_ints(2, &[1, 1], 0), &point),
        ("exceptional flop", &u, MukaiVector::from_ints(1, &[1, 1], -1), &o),
        ("v = 2v0", &u, MukaiVector::from_ints(2, &[0, 0], -2), &point),
        ("v² = 2 nodal", &nodal, MukaiVector::from_ints(0, &[1, 1], 2), &o),
    ];
    for (name, s, v, w) in cases {
        let wall = Wall::near(&v, w, s)?;
        let rep = classify(&v, &det_parities(&v).0, &wall)?;
        println!("{name}: v = {v}, v² = {}, {}", rep.v_square, rep.lattice_case.tag);
        for (label, d) in &rep.per_determinant {
            let c: Vec<String> = d.contraction.iter().map(|c| c.to_string()).collect();
            println!(
                "  {label:>3}: tss {:?}, [{}], non-normal {:?}, uncontracted divisor {}",
                d.tss,
                c.join(", "),
                d.non_normal_flags,
                d.divisor_not_contracted
            );
        }
        for c in cross_validate(&rep, &wall).iter().filter(|c| !c.pass) {
            println!("  {} [{}]: {}", c.name, c.determinant, c.explained.as_deref().unwrap_or("unexplained"));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
