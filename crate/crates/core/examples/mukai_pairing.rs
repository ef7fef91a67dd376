// Mukai vectors on the unnodal Enriques lattice `U ⊕ E8(−1)`: pairing,
// primitivity, `ℓ`, and the two determinant classes over `c1`.

use enriques_walls::lattice::{self, det_parities};
use enriques_walls::{MukaiVector, SurfaceModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = SurfaceModel::unnodal();
    let mut f = vec![0i64; 10];
    f[0] = 1;
    // ideal sheaf of n points, O_X, a point, and rank-2 classes
    let samples = [
        MukaiVector::from_ints(1, &[0; 10], -3),
        MukaiVector::from_ints(1, &[0; 10], 1),
        MukaiVector::from_ints(0, &[0; 10], 2),
        MukaiVector::from_ints(2, &f, 0),
        MukaiVector::from_ints(2, &[0; 10], -2),
    ];
    for v in &samples {
        let (l, lk) = det_parities(v);
        let ell = lattice::ell(v).map(|x| x.to_string()).unwrap_or_else(|_| "-".into());
        println!(
            "{v}: v² = {}, primitive {}, ℓ = {ell}, determinants {} / {} over c1 ≡ {:?}",
            s.square(v),
            lattice::is_primitive(v)?,
            l.label(),
            lk.label(),
            l.eps
        );
    }
    let (a, b) = (&samples[0], &samples[2]);
    println!("⟨{a}, {b}⟩ = {}", lattice::mukai_pair(a, b, &s)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
