//! Browser bindings. Every export returns a JSON string so the page needs no
//! extra glue beyond `JSON.parse`.

use msgraphs::atlas::{general_orders, AtlasSession};
use msgraphs::graphs::invariants;
use msgraphs::spatial::{model_scene, DEFAULT_POLE, MODELS};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn models() -> String {
    serde_json::to_string(MODELS).expect("static list")
}

/// Scene of a polytope skeleton. An empty `pole` selects the default one.
#[wasm_bindgen]
pub fn project_model(name: &str, pole: &[f64], samples: usize) -> Result<String, JsError> {
    let pole = match pole.len() {
        0 => DEFAULT_POLE,
        4 => [pole[0], pole[1], pole[2], pole[3]],
        n => return Err(err(format!("pole needs 4 components, got {n}"))),
    };
    let scene = model_scene(name, pole, samples).map_err(err)?;
    serde_json::to_string(&scene).map_err(err)
}

#[wasm_bindgen]
pub fn arc_ids() -> String {
    serde_json::to_string(&AtlasSession::embedded().atlas.arc_ids()).expect("strings")
}

/// Rebuilds an atlas graph and reports its invariants next to the graph.
#[wasm_bindgen]
pub fn build_arc(id: &str) -> Result<String, JsError> {
    let g = AtlasSession::embedded().graph(id).map_err(err)?;
    let inv = invariants(&g.graph).map_err(err)?;
    let mut doc = g.to_json();
    doc["invariants"] = json!(inv.to_string());
    Ok(doc.to_string())
}

#[wasm_bindgen]
pub fn orders(genus: u32) -> Result<String, JsError> {
    let o = general_orders(genus.into()).map_err(err)?;
    serde_json::to_string(&o).map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_produce_json() {
        let s: serde_json::Value =
            serde_json::from_str(&project_model("tesseract", &[], 8).unwrap()).unwrap();
        assert_eq!(s["polylines"].as_array().unwrap().len(), 32);
        let g: serde_json::Value = serde_json::from_str(&build_arc("O34.a'").unwrap()).unwrap();
        assert_eq!(g["invariants"], "d2=30 d3=20 E=60 D=10 G=12");
        let o: serde_json::Value = serde_json::from_str(&orders(11).unwrap()).unwrap();
        assert_eq!(o["m_g"], 120);
        assert!(arc_ids().contains("O34.a'"));
        assert!(models().contains("600cell"));
    }
}
