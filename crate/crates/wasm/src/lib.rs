//! Browser bindings: run a program, step through it choosing among enabled
//! transitions, and analyse a framework. Values cross the boundary as JSON
//! strings.

use serde_json::json;
use wasm_bindgen::prelude::*;

use tcla_core::af::io::{parse_framework, to_dot};
use tcla_core::af::{extensions, labelling_of, Semantics};
use tcla_core::engine::{run, timeline, SchedulingPolicy};
use tcla_core::session::ExecSession;
use tcla_core::syntax::{parse_program, Diagnostic};

fn diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Runs `source` from the empty store with the seeded scheduler. Returns
/// `{trace, timeline, dot}`.
pub fn run_json(source: &str, seed: u64, bound: usize) -> Result<String, String> {
    let program = parse_program(source).map_err(|ds| diagnostics(&ds))?;
    let trace = run(
        &program,
        &Default::default(),
        SchedulingPolicy::SeededRandom { seed },
        bound,
    )
    .map_err(|e| e.to_string())?;
    let rows = timeline(&trace);
    let dot = to_dot(trace.final_store(), None);
    Ok(to_json(&json!({"trace": trace, "timeline": rows, "dot": dot})))
}

/// Extensions and labellings of a framework given as JSON or apx text.
pub fn analyze_json(framework: &str, semantics: &str) -> Result<String, String> {
    let af = parse_framework(framework).map_err(|e| e.to_string())?;
    let semantics: Semantics = semantics.parse().map_err(|e: tcla_core::af::AfError| e.to_string())?;
    let exts = extensions(&af, semantics).map_err(|e| e.to_string())?;
    let labellings = exts
        .iter()
        .map(|e| labelling_of(&af, e))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(to_json(&json!({"semantics": semantics, "extensions": exts, "labellings": labellings})))
}

/// A program executed one time unit per call.
#[wasm_bindgen]
pub struct Stepper {
    session: ExecSession,
}

impl Stepper {
    pub fn create(source: &str, seed: u64) -> Result<Stepper, String> {
        let program = parse_program(source).map_err(|ds| diagnostics(&ds))?;
        let session = ExecSession::new(program, Default::default(), SchedulingPolicy::SeededRandom { seed })
            .map_err(|e| e.to_string())?;
        Ok(Stepper { session })
    }

    /// Takes choice `choice`, or lets the scheduler pick when negative.
    pub fn advance(&mut self, choice: i32) -> Result<String, String> {
        let choice = usize::try_from(choice).ok();
        self.session.step(choice).map_err(|e| e.to_string())?;
        self.view()
    }

    pub fn view(&self) -> Result<String, String> {
        self.session.state().map(|v| to_json(&v)).map_err(|e| e.to_string())
    }
}

#[wasm_bindgen]
impl Stepper {
    #[wasm_bindgen(constructor)]
    pub fn new(source: &str, seed: u64) -> Result<Stepper, JsValue> {
        Stepper::create(source, seed).map_err(|e| JsValue::from_str(&e))
    }

    pub fn step(&mut self, choice: i32) -> Result<String, JsValue> {
        self.advance(choice).map_err(|e| JsValue::from_str(&e))
    }

    pub fn state(&self) -> Result<String, JsValue> {
        self.view().map_err(|e| JsValue::from_str(&e))
    }
}

#[wasm_bindgen(js_name = runProgram)]
pub fn run_program(source: &str, seed: u64, bound: usize) -> Result<String, JsValue> {
    run_json(source, seed, bound).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn analyze(framework: &str, semantics: &str) -> Result<String, JsValue> {
    analyze_json(framework, semantics).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = presetTable4)]
pub fn preset_table4() -> String {
    tcla_core::presets::TABLE4.to_owned()
}

#[wasm_bindgen(js_name = presetExample6)]
pub fn preset_example6() -> String {
    tcla_core::presets::EXAMPLE6.to_owned()
}
