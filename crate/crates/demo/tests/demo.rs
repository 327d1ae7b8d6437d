use serde_json::Value;

use liftcheck_demo::{census_compare_json, cyclic_filtration_json, kummer_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn cyclic_table_matches_over_both_rings() {
    for ring in ["Zmod:4;n=2", "Zmod:4[t]/(t^2);n=2,t"] {
        let v = parse(cyclic_filtration_json(3, ring, 12).unwrap());
        assert_eq!(v["closedFormApplies"], true);
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 13);
        assert!(rows.iter().all(|r| r["matches"] == true), "{ring}");
    }
}

#[test]
fn cyclic_table_flags_rings_outside_hypotheses() {
    let v = parse(cyclic_filtration_json(2, "Zmod:8;n=2", 6).unwrap());
    assert_eq!(v["closedFormApplies"], false);
    assert_eq!(v["rows"][4]["matches"], false);
}

#[test]
fn cyclic_table_rejects_bad_input() {
    assert!(cyclic_filtration_json(0, "Zmod:4;n=2", 3).is_err());
    assert!(cyclic_filtration_json(9, "Zmod:4;n=2", 3).is_err());
    assert!(cyclic_filtration_json(2, "Zmod:4;n=", 3).is_err());
}

#[test]
fn census_compare_small_case() {
    let v = parse(census_compare_json(4, 3, 2).unwrap());
    assert_eq!(v["complexIso"], true);
    assert_eq!(v["rationalIso"], false);
    assert!(census_compare_json(6, 4, 2).is_err());
}

#[test]
fn kummer_table_rows() {
    let v = parse(kummer_json(2, 3).unwrap());
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    // C(8, 4) = 70 has 2-adic valuation 1
    assert_eq!(rows[3], serde_json::json!([4, 1, 1]));
    assert!(kummer_json(3, 7).is_err());
}
