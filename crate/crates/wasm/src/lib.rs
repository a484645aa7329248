//! Browser bindings. Every export returns a JSON string; errors become JS exceptions.

use detsum_core::asymptotics::{
    code_dmt_segment, dmt_sum_lower_exponent, fit_growth, optimal_dmt_exact, predicted_exponent, profile,
    FitOptions,
};
use detsum_core::constructions::{builtin, BuiltinCode};
use detsum_core::detsum::inverse_det_sum;
use detsum_core::lie::{build_root_data, exponent_table, volume_exponent, Family};
use detsum_core::numeric::parse_grid;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

// enumeration runs on the UI thread; keep the demo responsive
const MAX_POINTS_HINT: f64 = 5e6;

fn fail(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

pub fn dmt_value(n: usize, nr: usize, code: &str) -> Result<Value, String> {
    if n == 0 || nr == 0 {
        return Err("n and n_r must be positive".into());
    }
    let mut out = json!({
        "n": n,
        "nr": nr,
        "optimal": optimal_dmt_exact(n, nr),
        "lower_exponent": dmt_sum_lower_exponent(n, 2 * n * n, nr),
    });
    if !code.is_empty() {
        let c: BuiltinCode = code.parse().map_err(|e: detsum_core::Error| e.to_string())?;
        let l = builtin(c).map_err(|e| e.to_string())?;
        if l.n() != n {
            return Err(format!("{code} has n = {}, not {n}", l.n()));
        }
        let p = profile(&l).map_err(|e| e.to_string())?;
        match code_dmt_segment(p.regime, n, nr) {
            Ok(seg) => out["code"] = serde_json::to_value(seg).map_err(|e| e.to_string())?,
            Err(e) => out["code_note"] = json!(e.to_string()),
        }
    }
    Ok(out)
}

pub fn detsum_value(code: &str, m: u32, radii: &str) -> Result<Value, String> {
    let c: BuiltinCode = code.parse().map_err(|e: detsum_core::Error| e.to_string())?;
    let l = builtin(c).map_err(|e| e.to_string())?;
    let radii = parse_grid(radii).map_err(|e| e.to_string())?;
    let top = radii.iter().cloned().fold(0.0, f64::max);
    // rough ball volume in coefficient space
    let est = top.powi(l.rank() as i32) / l.covolume();
    if est > MAX_POINTS_HINT {
        return Err(format!("radius {top} is too large for the browser (~{est:.1e} points)"));
    }
    let t = inverse_det_sum(&l, m, &radii).map_err(|e| e.to_string())?;
    let fit = fit_growth(&t.radii(), &t.sums(), &FitOptions::all()).ok();
    let prediction = profile(&l)
        .and_then(|p| predicted_exponent(&p, (m as usize / 2).max(1)))
        .ok();
    Ok(json!({
        "table": t,
        "fit": fit,
        "prediction": prediction,
    }))
}

pub fn lie_value(family: &str, n: usize) -> Result<Value, String> {
    let family: Family = family.parse().map_err(|e: detsum_core::Error| e.to_string())?;
    let data = build_root_data(family, n).map_err(|e| e.to_string())?;
    let t = volume_exponent(&data).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = exponent_table(&data, &data.dual_basis_raw)
        .iter()
        .map(|r| {
            json!({
                "j": r.j,
                "psi": r.psi.to_string(),
                "lambda_raw": r.lambda_raw.to_string(),
                "lambda_normalized": r.lambda_normalized.to_string(),
            })
        })
        .collect();
    Ok(json!({
        "family": family,
        "n": n,
        "T": t.to_string(),
        "half_sum": data.half_sum().to_string(),
        "rows": rows,
    }))
}

#[wasm_bindgen]
pub fn dmt(n: usize, nr: usize, code: &str) -> Result<String, JsValue> {
    dmt_value(n, nr, code).map(|v| v.to_string()).map_err(fail)
}

#[wasm_bindgen]
pub fn detsum(code: &str, m: u32, radii: &str) -> Result<String, JsValue> {
    detsum_value(code, m, radii).map(|v| v.to_string()).map_err(fail)
}

#[wasm_bindgen]
pub fn lie(family: &str, n: usize) -> Result<String, JsValue> {
    lie_value(family, n).map(|v| v.to_string()).map_err(fail)
}

#[wasm_bindgen]
pub fn codes() -> String {
    json!(BuiltinCode::ALL.iter().map(|c| c.name()).collect::<Vec<_>>()).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dmt_for_l2() {
        let v = dmt_value(2, 1, "l2").unwrap();
        assert_eq!(v["optimal"], json!([[0, 2], [1, 0]]));
        assert!(v.get("code").is_some() || v.get("code_note").is_some());
    }

    #[test]
    fn alamouti_sum_grows_slowly() {
        let v = detsum_value("alamouti", 2, "4:16:g4").unwrap();
        assert_eq!(v["table"]["rows"].as_array().unwrap().len(), 4);
        assert!(v["fit"]["slope"].as_f64().unwrap() < 1.0);
    }

    #[test]
    fn oversized_radius_is_refused() {
        assert!(detsum_value("golden-order", 2, "1:200:g3").is_err());
    }

    #[test]
    fn lie_table_for_sl3() {
        let v = lie_value("complex", 3).unwrap();
        assert_eq!(v["T"], "12");
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    }
}
