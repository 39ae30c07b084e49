//! Browser demo for the conversation analytics crate.
//!
//! Three interactive operations are exported to JavaScript, each returning
//! a JSON view model: activity curve generation plus refit, wiener series
//! over a growing reply tree, and scripted hashtag takeover runs. The view
//! models live in [`viewmodel`] and build on any target; only the
//! `wasm_bindgen` wrappers are wasm-specific. See `www/index.html` for the
//! page that drives them.

pub mod viewmodel;

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    use crate::viewmodel;

    #[wasm_bindgen]
    pub fn activity_demo(
        alpha: f64,
        n_posts: u32,
        n_convs: u32,
        seed: u32,
    ) -> Result<String, JsError> {
        viewmodel::activity_explorer(alpha, n_posts as usize, n_convs as usize, seed as u64)
            .map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn wiener_demo(topology: &str, n_posts: u32, k: u32, seed: u32) -> Result<String, JsError> {
        viewmodel::wiener_explorer(topology, n_posts as usize, k as usize, seed as u64)
            .map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn hijack_demo(label: &str, seed: u32) -> Result<String, JsError> {
        viewmodel::hijack_explorer(label, seed as u64).map_err(|e| JsError::new(&e))
    }
}
