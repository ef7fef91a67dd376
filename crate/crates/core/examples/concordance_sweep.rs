// Random walls and classes, classified and checked against the
// codimension oracle; failures are tallied by explanation.

use std::collections::BTreeMap;

use enriques_walls::classify::{classify, cross_validate};
use enriques_walls::lattice::det_parities;
use enriques_walls::sample::{self, Limits};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inst = sample::instances(7, 60, Limits::default());
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    for i in &inst {
        let rep = classify(&i.v, &det_parities(&i.v).0, &i.wall)?;
        for c in cross_validate(&rep, &i.wall) {
            let key = match (c.pass, &c.explained) {
                (true, _) => "pass".to_string(),
                (false, Some(why)) => format!("explained: {why}"),
                (false, None) => format!("UNEXPLAINED: {}", c.name),
            };
            *tally.entry(key).or_default() += 1;
        }
    }
    println!("{} instances", inst.len());
    for (k, n) in &tally {
        println!("{n:>5}  {k}");
    }
    assert!(!tally.keys().any(|k| k.starts_with("UNEXPLAINED")));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
