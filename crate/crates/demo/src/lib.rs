//! Browser bindings for a few mdslab operations.
//!
//! Every export takes plain strings or numbers and returns a JSON string;
//! failures come back as `{"error": "..."}` rather than exceptions.

use mdslab::codes::{extended_rs, hyperoval_code, is_mds_codewords, is_mds_minors, rs_code, CodeMatrix};
use mdslab::equivalence::{check_condition_a, yz_from_t};
use mdslab::format::{read_matrix, write_matrix};
use mdslab::FieldCtx;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn to_string(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Generator matrix in the text file format. `kind` is `rs`, `extended`
/// or `hyperoval`.
#[wasm_bindgen]
pub fn build_code(q: u32, k: usize, kind: &str) -> String {
    to_string((|| {
        let field = FieldCtx::of_order(q).map_err(|e| e.to_string())?;
        let code = match kind {
            "rs" => rs_code(&field, k),
            "extended" => extended_rs(&field, k),
            "hyperoval" => hyperoval_code(&field),
            other => return Err(format!("unknown code `{other}`")),
        }
        .map_err(|e| e.to_string())?;
        Ok(json!({ "text": write_matrix(code.matrix()), "k": code.k(), "n": code.n() }))
    })())
}

#[wasm_bindgen]
pub fn check_mds(text: &str) -> String {
    to_string((|| {
        let m = read_matrix(text).map_err(|e| e.to_string())?;
        let code = CodeMatrix::new(m).map_err(|e| e.to_string())?;
        let minors = is_mds_minors(&code);
        let words = is_mds_codewords(&code);
        Ok(json!({
            "q": code.field().q(),
            "k": code.k(),
            "n": code.n(),
            "minors": minors.mds,
            "codewords": words.mds,
            "dependent_columns": minors.dependent,
            "combination": words.combination,
        }))
    })())
}

/// Derives `(Y, Z)` from a `k x q` matrix and reports the five subspace
/// conditions.
#[wasm_bindgen]
pub fn condition_a(text: &str) -> String {
    to_string((|| {
        let t = read_matrix(text).map_err(|e| e.to_string())?;
        let k = t.rows();
        let (y, z) = yz_from_t(&t).map_err(|e| e.to_string())?;
        let r = check_condition_a(&y, &z, k).map_err(|e| e.to_string())?;
        Ok(json!({
            "y": y.basis().to_u32_rows(),
            "z": z.basis().to_u32_rows(),
            "dims": r.dims_ok,
            "span_in_o_k1": r.span_in_ok1,
            "y_in_o_k2": r.y_in_ok2,
            "z_in_o_k2": r.z_in_ok2,
            "meet_in_o_k3": r.meet_in_ok3,
            "all_hold": r.all_hold(),
            "violation": r.witness.map(|w| json!({
                "condition": w.condition,
                "poly": w.poly.map(|p| p.coeffs().to_vec()),
            })),
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn hyperoval_round_trips_through_check() {
        let built = parse(&build_code(4, 3, "hyperoval"));
        let checked = parse(&check_mds(built["text"].as_str().unwrap()));
        assert_eq!(checked["n"], 6);
        assert_eq!(checked["minors"], true);
        assert_eq!(checked["codewords"], true);
    }

    #[test]
    fn errors_are_json() {
        assert!(parse(&build_code(6, 2, "rs"))["error"].is_string());
        assert!(parse(&check_mds("q=4\nk=1 n=1\n9\n"))["error"].is_string());
        assert!(parse(&build_code(5, 2, "conic"))["error"].is_string());
    }

    #[test]
    fn condition_a_on_rs_columns() {
        let t = "q=5\nk=2 n=5\n1 1 1 1 1\n0 1 2 3 4\n";
        let r = parse(&condition_a(t));
        assert_eq!(r["dims"], true);
        assert!(r["all_hold"].is_boolean());
    }
}
