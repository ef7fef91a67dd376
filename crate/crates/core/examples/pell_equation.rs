// Fundamental solutions of `x² − D y² = N` for `N ∈ {1, 2}` and the
// continued fraction they come from.

use enriques_walls::arith::int;
use enriques_walls::pell;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for d in [2i64, 3, 7, 13, 61, 109] {
        let (a0, period) = pell::sqrt_cf_period(&int(d));
        let period: Vec<String> = period.iter().map(|x| x.to_string()).collect();
        print!("√{d} = [{a0}; {}]", period.join(","));
        for n in [1u8, 2] {
            match pell::pell_fundamental(&int(d), n)? {
                Some(sol) => {
                    assert!(sol.holds());
                    print!("   x² − {d}y² = {n}: ({}, {})", sol.x, sol.y);
                }
                None => print!("   x² − {d}y² = {n}: none"),
            }
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
