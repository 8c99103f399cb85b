//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every function takes and returns plain strings or numbers so the page
//! needs no glue beyond the generated bindings.

use wasm_bindgen::prelude::*;

use plonka::classify::{classify, ProbeConfig};
use plonka::iso::{describe_map, signature_mismatch};
use plonka::{fixtures, rational, AlgebraHandle, BlockKind, EaterSpec, LocateMode, Param};

fn handle(name: &str) -> Result<AlgebraHandle, String> {
    if let Ok(kind) = name.parse::<BlockKind>() {
        return Ok(AlgebraHandle::Block(kind));
    }
    if let Some(h) = fixtures::by_name(name) {
        return Ok(h);
    }
    EaterSpec::from_json(name).map(AlgebraHandle::structured).map_err(|e| e.to_string())
}

/// Samples `t ↦ y ⊕_t x` at `steps + 1` evenly spaced `t`, as ambient floats.
///
/// `algebra` is a block name, a fixture name, or spec JSON; `x`, `y` are
/// rationals like `1/3`.
pub fn path_values(algebra: &str, x: &str, y: &str, steps: u32) -> Result<Vec<f64>, String> {
    let steps = steps.max(1);
    let alg = handle(algebra)?;
    let at = |s: &str| {
        let q = rational::parse(s).map_err(|e| e.to_string())?;
        alg.point(&q, LocateMode::AllowApprox).map_err(|e| e.to_string())
    };
    let (px, py) = (at(x)?, at(y)?);
    (0..=steps)
        .map(|i| {
            let t = Param::new(rational::ratio(i as i64, steps as i64)).map_err(|e| e.to_string())?;
            alg.gamma(&px, &py, &t).map(|v| v.to_f64()).map_err(|e| e.to_string())
        })
        .collect()
}

/// Recovers the eater set and gap tags of `algebra`; returns spec JSON and provenance.
pub fn classify_text(algebra: &str) -> Result<String, String> {
    let alg = handle(algebra)?;
    let c = classify(&alg, &ProbeConfig::default()).map_err(|e| e.to_string())?;
    Ok(format!("{}\n{}\nprovenance: {}", c.spec, c.spec.to_json(), c.provenance))
}

/// Decides whether two spec JSON documents describe isomorphic algebras.
pub fn iso_text(a: &str, b: &str) -> Result<String, String> {
    let sa = EaterSpec::from_json(a).map_err(|e| format!("first spec: {e}"))?;
    let sb = EaterSpec::from_json(b).map_err(|e| format!("second spec: {e}"))?;
    match signature_mismatch(&sa, &sb) {
        Some(m) => Ok(format!("not isomorphic (signature mismatch at position {}: {} vs {})", m.position, m.left, m.right)),
        None => Ok(format!("isomorphic\n{}", describe_map(&sa, &sb).map_err(|e| e.to_string())?)),
    }
}

#[wasm_bindgen]
pub fn path(algebra: &str, x: &str, y: &str, steps: u32) -> Result<Vec<f64>, JsValue> {
    path_values(algebra, x, y, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = classify)]
pub fn classify_js(algebra: &str) -> Result<String, JsValue> {
    classify_text(algebra).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn iso(a: &str, b: &str) -> Result<String, JsValue> {
    iso_text(a, b).map_err(|e| JsValue::from_str(&e))
}
