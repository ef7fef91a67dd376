//! The named wall instances: golden files plus direct checks of their tags.

mod common;

use serde_json::Value;

fn fixture(name: &str) -> Value {
    common::FIXTURES.iter().find(|f| f.name == name).expect("fixture").check().unwrap()
}

fn entry<'a>(doc: &'a Value, det: &str) -> &'a Value {
    &doc["report"]["per_determinant"][det]
}

fn tss(doc: &Value, det: &str) -> Vec<String> {
    entry(doc, det)["tss"].as_array().unwrap().iter().map(|t| t.as_str().unwrap().to_string()).collect()
}

fn contraction(doc: &Value, det: &str) -> Vec<String> {
    entry(doc, det)["contraction"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| match c.get("sub") {
            Some(sub) => format!("{}/{}", c["type"].as_str().unwrap(), sub.as_str().unwrap()),
            None => c["type"].as_str().unwrap().to_string(),
        })
        .collect()
}

fn flags(doc: &Value, det: &str) -> Vec<String> {
    entry(doc, det)["non_normal_flags"].as_array().unwrap().iter().map(|t| t.as_str().unwrap().to_string()).collect()
}

#[test]
fn hilbert_chow_contracts_a_divisor_only_above_square_one() {
    for det in ["L", "L+K"] {
        let big = fixture("hilbert_chow_v2_3");
        assert_eq!(tss(&big, det), ["TSS2"]);
        assert_eq!(contraction(&big, det), ["DivisorialHilbertChow"]);
        let small = fixture("hilbert_chow_v2_1");
        assert_eq!(tss(&small, det), ["TSS2"]);
        assert_eq!(contraction(&small, det), ["FakeOrNoWall"]);
    }
}

#[test]
fn lgu_is_divisorial_for_both_determinants() {
    let d = fixture("lgu");
    for det in ["L", "L+K"] {
        assert!(tss(&d, det).is_empty());
        assert_eq!(contraction(&d, det), ["DivisorialLGU"]);
    }
}

#[test]
fn spherical_fibration_depends_on_the_determinant() {
    let d = fixture("p1_spherical");
    assert_eq!(tss(&d, "L+K"), ["TSS3"]);
    assert_eq!(contraction(&d, "L+K"), ["P1FibrationSpherical"]);
    assert_eq!(contraction(&d, "L"), ["FakeOrNoWall"]);
    let other = fixture("p1_spherical_other_det");
    assert_eq!(other["report"]["contraction"], serde_json::json!([{ "type": "FakeOrNoWall" }]));
}

#[test]
fn exceptional_orthogonal_flop_keeps_its_divisor() {
    let d = fixture("exceptional_flop");
    for det in ["L", "L+K"] {
        assert_eq!(contraction(&d, det), ["Flopping/ExceptionalFlop2"]);
        assert_eq!(entry(&d, det)["divisor_not_contracted"], Value::Bool(true));
    }
}

#[test]
fn non_normality_flags() {
    let d = fixture("twice_v0_square_one");
    assert_eq!(tss(&d, "L+K"), ["TSS4"]);
    assert_eq!(flags(&d, "L+K"), ["TwoV0SquareOne"]);
    let other = fixture("twice_v0_square_one_other_det");
    assert_eq!(entry(&other, "L")["outside_hypotheses"], Value::Bool(true));
    let nodal = fixture("nodal_square_two");
    assert_eq!(flags(&nodal, "L"), ["SquareTwoNodal"]);
    assert!(flags(&nodal, "L+K").is_empty());
}

#[test]
fn fixtures_pass_their_own_checks() {
    for f in common::FIXTURES {
        let d = f.check().unwrap();
        for c in d["checks"].as_array().unwrap() {
            assert!(c["pass"].as_bool().unwrap() || !c["explained"].is_null(), "{}: {c}", f.name);
        }
    }
}
