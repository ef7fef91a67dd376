// Reducing a class to the minimal member of its orbit under reflections in
// effective roots, with two strategies that must agree.

use enriques_walls::hyperbolic::Wall;
use enriques_walls::weyl::{self, Strategy};
use enriques_walls::{MukaiVector, SurfaceModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new())?;
    let o = MukaiVector::from_ints(1, &[0, 0], 1);
    let v0 = MukaiVector::from_ints(1, &[1, 1], -1);
    let wall = Wall::near(&v0, &o, &s)?;
    // push v0 out of the minimal chamber, then bring it back
    let mut v = v0.clone();
    for r in wall.stable_roots() {
        v = weyl::reflect_root(&v, &r.class, &s)?;
        if !wall.in_cone(&v)? {
            v = weyl::reflect_root(&v, &r.class, &s)?;
        }
    }
    let (a, word) = weyl::minimalize_with(&v, &wall, Strategy::Steepest)?;
    let (b, _) = weyl::minimalize_with(&v, &wall, Strategy::Chain)?;
    assert_eq!(a, b);
    println!("{v} -> {a} in {} reflections: {:?}", word.len(), weyl::word_kinds(&word));
    assert_eq!(word.apply(&v, &s)?, a);
    assert_eq!(s.square(&a), s.square(&v));
    println!("chamber of v: {:?}", weyl::chamber_index(&v, &wall)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
