//! Browser bindings for the jsum library: three interactive operations
//! backing the demo page under `www/`. Each returns a JSON string with the
//! same shapes the CLI emits.

use wasm_bindgen::prelude::*;

use jsum_core::charsums::{cyclotomic_numbers, dickson_hurwitz, jacobi_direct};
use jsum_core::fieldtab::IndexedField;
use jsum_core::verify::{precheck, run_with_field, VerifyOptions, DEFAULT_SEED};

/// Dickson-Hurwitz matrix for F_{p^r} at order e:
/// {"e":..,"q":..,"k":..,"bvals":[[..],..]}.
#[wasm_bindgen]
pub fn dickson_matrix(p: u32, r: u32, e: u32) -> Result<String, JsError> {
    dickson_matrix_impl(p, r, e).map_err(|m| JsError::new(&m))
}

/// Jacobi sum J_e(i, j) over F_{p^r}:
/// {"e":..,"q":..,"i":..,"j":..,"value":{"e":..,"coeffs":["..",..]}}.
#[wasm_bindgen]
pub fn jacobi_coefficients(p: u32, r: u32, e: u32, i: i32, j: i32) -> Result<String, JsError> {
    jacobi_coefficients_impl(p, r, e, i, j).map_err(|m| JsError::new(&m))
}

/// Full verification report for (l, p, r), all suites, default seed.
#[wasm_bindgen]
pub fn verification_report(l: u32, p: u32, r: u32) -> Result<String, JsError> {
    verification_report_impl(l, p, r).map_err(|m| JsError::new(&m))
}

fn dickson_matrix_impl(p: u32, r: u32, e: u32) -> Result<String, String> {
    let field = IndexedField::build(p as u64, r).map_err(|e| e.to_string())?;
    let table = cyclotomic_numbers(&field, e as u64).map_err(|e| e.to_string())?;
    let dh = dickson_hurwitz(&table);
    serde_json::to_string(&dh).map_err(|e| e.to_string())
}

fn jacobi_coefficients_impl(p: u32, r: u32, e: u32, i: i32, j: i32) -> Result<String, String> {
    let field = IndexedField::build(p as u64, r).map_err(|e| e.to_string())?;
    let value = jacobi_direct(&field, e as u64, i as i64, j as i64).map_err(|e| e.to_string())?;
    let doc = serde_json::json!({
        "e": e,
        "q": field.q(),
        "i": (i as i64).rem_euclid(e as i64),
        "j": (j as i64).rem_euclid(e as i64),
        "value": value,
    });
    Ok(doc.to_string())
}

fn verification_report_impl(l: u32, p: u32, r: u32) -> Result<String, String> {
    precheck(l as u64, p as u64, r).map_err(|e| e.to_string())?;
    let field = IndexedField::build(p as u64, r).map_err(|e| e.to_string())?;
    let report = run_with_field(
        &field,
        l as u64,
        &VerifyOptions {
            seed: DEFAULT_SEED,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bindings_produce_json() {
        let m = dickson_matrix_impl(19, 1, 18).unwrap();
        assert!(m.starts_with("{\"e\":18,\"q\":19"));
        let j = jacobi_coefficients_impl(19, 1, 18, 1, 1).unwrap();
        assert!(j.contains("\"coeffs\":[\"2\",\"1\",\"0\",\"-4\",\"1\",\"-2\"]"));
        let v = verification_report_impl(3, 19, 1).unwrap();
        assert!(v.contains("\"failures\":0"));
        assert!(dickson_matrix_impl(4, 1, 18).is_err());
        assert!(verification_report_impl(3, 11, 1).is_err());
    }
}
