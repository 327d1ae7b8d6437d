use serde_json::json;
use wasm_bindgen::prelude::*;

use liftcheck::census;
use liftcheck::coefring::{binomial_valuation, binomial_valuation_closed_form};
use liftcheck::filtration::cyclic_closed_form;
use liftcheck::parse::parse_ring_spec;

const MAX_CYCLIC_EXPONENT: u32 = 6;

/// Closed-form and computed `Θ^k` for `C_{2^n}`, as JSON rows.
pub fn cyclic_filtration_json(n: u32, ring: &str, depth: usize) -> Result<String, String> {
    if n == 0 || n > MAX_CYCLIC_EXPONENT {
        return Err(format!("n must lie in 1..={MAX_CYCLIC_EXPONENT}"));
    }
    let ring = parse_ring_spec(ring).map_err(|e| e.to_string())?;
    let depth = depth.min((1 << n) + 8);
    let alg = cyclic_closed_form(n, 0).algebra(&ring).map_err(|e| e.to_string())?;
    let theta = alg.theta_powers(depth).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for k in 0..=depth {
        let cf = cyclic_closed_form(n, k);
        let level = theta.level(k).map_err(|e| e.to_string())?;
        let matches = &cf.materialize(&alg).map_err(|e| e.to_string())? == level;
        rows.push(json!({
            "k": k,
            "closedForm": cf.simplified().to_string(),
            "size": level.size().to_string(),
            "matches": matches,
        }));
    }
    // the closed form is only claimed when 4S = 0
    let applies = 4 % ring.flags().characteristic == 0;
    Ok(json!({"ring": ring.spec_string(), "n": n, "closedFormApplies": applies, "rows": rows}).to_string())
}

/// Wedderburn counts of `G(n,m,l)` and `H(n,m,l)`.
pub fn census_compare_json(n: u32, m: u32, l: u32) -> Result<String, String> {
    if n + m + l > 11 {
        return Err("n + m + l must be at most 11 here".into());
    }
    let c = census::compare(n, m, l).map_err(|e| e.to_string())?;
    Ok(c.to_json().to_string())
}

/// Carry counts and the `(p−1)(n−ν(i))` form for `0 < i < p^n`.
pub fn kummer_json(p: u32, n: u32) -> Result<String, String> {
    let top = (p as u64).checked_pow(n).filter(|&t| t <= 1024).ok_or("p^n must be at most 1024")?;
    let mut rows = Vec::new();
    for i in 1..top {
        let carries = binomial_valuation(p as u64, n, i).map_err(|e| e.to_string())?;
        let closed = binomial_valuation_closed_form(p as u64, n, i).map_err(|e| e.to_string())?;
        rows.push(json!([i, carries, closed]));
    }
    Ok(json!({"p": p, "n": n, "rows": rows}).to_string())
}

#[wasm_bindgen]
pub fn cyclic_filtration_table(n: u32, ring: &str, depth: usize) -> Result<String, JsValue> {
    cyclic_filtration_json(n, ring, depth).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn census_compare(n: u32, m: u32, l: u32) -> Result<String, JsValue> {
    census_compare_json(n, m, l).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn kummer_table(p: u32, n: u32) -> Result<String, JsValue> {
    kummer_json(p, n).map_err(|e| JsValue::from_str(&e))
}
