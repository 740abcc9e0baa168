//! Browser bindings. Each export takes the instance text and returns a JSON
//! string; the plain functions underneath are what the native tests exercise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use balanced_jdm::chain::{RsoChain, Sampler};
use balanced_jdm::construct::construct_balanced;
use balanced_jdm::enumerate::enumerate_balanced;
use balanced_jdm::io::parse_jdm;
use balanced_jdm::spectra::{transition_matrix, tv_decay, ChainAnalysis};
use balanced_jdm::Realization;

/// Kept small so a page never hangs on a large instance.
pub const MAX_STATES: usize = 256;
pub const MAX_STEPS: u64 = 2_000_000;
const EXACT_CAP: usize = 16;

#[derive(Debug, Serialize)]
pub struct GraphView {
    pub classes: Vec<usize>,
    pub degrees: Vec<u32>,
    pub edges: Vec<(usize, usize)>,
}

impl GraphView {
    fn of(g: &Realization) -> Self {
        Self {
            classes: g.classes().to_vec(),
            degrees: (0..g.num_vertices()).map(|v| g.degree(v)).collect(),
            edges: g.edges(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Histogram {
    pub state_count: usize,
    /// Visits per enumerated state.
    pub counts: Vec<u64>,
    pub samples: u64,
    pub acceptance_rate: f64,
    /// Total-variation distance of the visit frequencies from uniform.
    pub tv_from_uniform: f64,
    pub last: GraphView,
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub state_count: usize,
    pub eigenvalues: Vec<f64>,
    pub lambda2: Option<f64>,
    pub relaxation: f64,
    pub phi: Option<String>,
    pub tv: Vec<(usize, f64)>,
}

fn load(text: &str) -> Result<RsoChain, String> {
    let jdm = parse_jdm(text).map_err(|e| e.to_string())?;
    RsoChain::new(jdm).map_err(|e| e.to_string())
}

pub fn construct_graph(text: &str) -> Result<GraphView, String> {
    let jdm = parse_jdm(text).map_err(|e| e.to_string())?;
    let g = construct_balanced(&jdm).map_err(|e| e.to_string())?;
    Ok(GraphView::of(&g))
}

pub fn sample_histogram(text: &str, steps: u64, seed: u64) -> Result<Histogram, String> {
    if steps > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps in the browser"));
    }
    let chain = load(text)?;
    let space = enumerate_balanced(&chain, MAX_STATES).map_err(|e| e.to_string())?;
    let start = chain.initial_state().map_err(|e| e.to_string())?;
    let mut counts = vec![0u64; space.len()];
    let mut sampler = Sampler::new(&chain, start, ChaCha8Rng::seed_from_u64(seed), 0, steps, 1);
    for g in sampler.by_ref() {
        let i = space.index_of(&g).ok_or("walk left the enumerated space")?;
        counts[i] += 1;
    }
    let samples: u64 = counts.iter().sum();
    let uniform = 1.0 / space.len() as f64;
    let tv_from_uniform = if samples == 0 {
        0.0
    } else {
        counts.iter().map(|&c| (c as f64 / samples as f64 - uniform).abs()).sum::<f64>() / 2.0
    };
    Ok(Histogram {
        state_count: space.len(),
        counts,
        samples,
        acceptance_rate: sampler.counters().acceptance_rate(),
        tv_from_uniform,
        last: GraphView::of(sampler.state().realization()),
    })
}

pub fn analyze_chain(text: &str, t_max: usize) -> Result<Analysis, String> {
    let chain = load(text)?;
    let space = enumerate_balanced(&chain, MAX_STATES).map_err(|e| e.to_string())?;
    let m = transition_matrix(&chain, &space).map_err(|e| e.to_string())?;
    let tv = tv_decay(&m, 0, t_max, MAX_STATES).map_err(|e| e.to_string())?;
    let a = ChainAnalysis::new(m, EXACT_CAP).map_err(|e| e.to_string())?;
    Ok(Analysis {
        state_count: space.len(),
        lambda2: a.lambda2(),
        relaxation: a.relaxation(),
        phi: a.conductance.as_ref().map(|c| c.phi.to_string()),
        eigenvalues: a.eigenvalues,
        tv: tv.points,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    Ok(serde_json::to_string(&v).expect("view serializes"))
}

#[wasm_bindgen]
pub fn construct(text: &str) -> Result<String, JsError> {
    to_js(construct_graph(text))
}

#[wasm_bindgen]
pub fn sample(text: &str, steps: u32, seed: u32) -> Result<String, JsError> {
    to_js(sample_histogram(text, steps.into(), seed.into()))
}

#[wasm_bindgen]
pub fn analyze(text: &str, t_max: u32) -> Result<String, JsError> {
    to_js(analyze_chain(text, t_max as usize))
}
