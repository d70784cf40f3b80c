use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use zerocurve::config::Tolerances;

pub const SCHEMA: u32 = 1;

/// Everything a report needs to be reproduced.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridParams>,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridParams {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl RunConfig {
    pub fn new(command: &str, tolerances: Tolerances) -> Self {
        RunConfig { command: command.to_string(), tolerances, ..Default::default() }
    }

    pub fn input(mut self, name: &str, value: impl ToString) -> Self {
        self.inputs.insert(name.to_string(), value.to_string());
        self
    }

    pub fn param(mut self, name: &str, value: impl Serialize) -> Self {
        self.parameters
            .insert(name.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub operation: String,
    pub config: RunConfig,
    pub results: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, Value>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Report {
            schema: SCHEMA,
            operation: config.command.clone(),
            config,
            results: BTreeMap::new(),
            residuals: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            pass: true,
            error: None,
        }
    }

    pub fn result(&mut self, name: &str, value: impl Serialize) {
        self.results
            .insert(name.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    /// Numeric residual gated by `value <= tol`; non-finite values fail.
    pub fn numeric(&mut self, name: &str, value: f64, tol: f64) {
        self.pass &= value.is_finite() && value <= tol;
        self.residuals.insert(name.to_string(), json!(value));
        self.tolerances.insert(name.to_string(), json!(tol));
    }

    /// Symbolic residual that has to vanish identically.
    pub fn exact(&mut self, name: &str, residual: impl Serialize, vanishes: bool) {
        self.pass &= vanishes;
        self.residuals
            .insert(name.to_string(), serde_json::to_value(residual).unwrap_or(Value::Null));
        self.tolerances.insert(name.to_string(), json!("exact"));
    }

    pub fn fail(&mut self, message: impl ToString) {
        self.pass = false;
        self.error = Some(message.to_string());
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report values serialize");
        text.push('\n');
        text
    }
}
