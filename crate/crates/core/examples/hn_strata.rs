// Decompositions of `v` into effective classes on a wall and the
// codimension of the corresponding strata; the minimum decides whether the
// wall is totally semistable.

use enriques_walls::hn;
use enriques_walls::hyperbolic::Wall;
use enriques_walls::{MukaiVector, SurfaceModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = SurfaceModel::hyperbolic_plane(Vec::<Vec<u8>>::new())?;
    let point = MukaiVector::from_ints(0, &[0, 0], 2);
    for n in 1..=3 {
        let v = MukaiVector::from_ints(1, &[0, 0], 1 - 2 * n);
        let wall = Wall::near(&v, &point, &s)?;
        let ds = hn::enumerate_decompositions(&v, &wall, 10_000)?;
        println!("v = {v}: {} decompositions", ds.len());
        for d in ds.iter().take(4) {
            let parts: Vec<String> = d.parts.iter().map(|p| p.to_string()).collect();
            println!("  codim {:>3}  {}", hn::codim(d, &wall)?, parts.join(" + "));
        }
        let m = hn::min_codim(&v, &wall)?;
        println!("  min codim {}", m.display_value());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
