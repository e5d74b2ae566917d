//! Scenario configuration files.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! label = "riccati-origin"
//! analysis = ["radius"]
//!
//! [model]
//! name = "riccati"
//! initial_state = [0.0]
//!
//! [series]
//! order = 5
//!
//! [multistage]
//! order = 5
//! step = 0.2
//!
//! [grid]
//! t_end = 10.0
//! samples = 201
//!
//! [[expect]]
//! quantity = "radius_exact"
//! value = 1.274
//! abs_tol = 1e-3
//! locus = "radius of convergence about t = 0"
//! ```
//!
//! [`validate_config`] walks the whole document and reports every problem
//! it finds, each tagged with the path of the offending field.

use std::fmt;
use std::path::{Path, PathBuf};

use taylorlab_core::field::{LvParams, SirParams};
use taylorlab_core::integrate::{MAX_TOL, MIN_TOL};
use taylorlab_core::series::DEFAULT_SERIES_ORDER;
use taylorlab_core::ModelInstance;
use toml::{Table, Value};

pub const DEFAULT_REFERENCE_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES: usize = 201;
pub const DEFAULT_RADIUS_ORDER: usize = 30;
pub const DEFAULT_RADIUS_WINDOW: usize = 8;
const MAX_ORDER: usize = 200;
const MAX_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Riccati,
    LotkaVolterra,
    Sir,
}

impl ModelKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "riccati" => Some(ModelKind::Riccati),
            "lotka_volterra" => Some(ModelKind::LotkaVolterra),
            "sir" => Some(ModelKind::Sir),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Riccati => "riccati",
            ModelKind::LotkaVolterra => "lotka_volterra",
            ModelKind::Sir => "sir",
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelKind::Riccati => &[],
            ModelKind::LotkaVolterra => &["a", "b", "c", "d"],
            ModelKind::Sir => &["beta", "gamma"],
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ModelKind::Riccati => 1,
            ModelKind::LotkaVolterra => 2,
            ModelKind::Sir => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Values in the order of [`ModelKind::param_names`].
    pub params: Vec<f64>,
    pub initial_state: Vec<f64>,
}

impl ModelSpec {
    pub fn instance(&self) -> taylorlab_core::Result<ModelInstance> {
        let p = &self.params;
        let s = &self.initial_state;
        match self.kind {
            ModelKind::Riccati => ModelInstance::riccati(s[0]),
            ModelKind::LotkaVolterra => {
                ModelInstance::lotka_volterra(LvParams::new(p[0], p[1], p[2], p[3])?, s[0], s[1])
            }
            ModelKind::Sir => ModelInstance::sir(SirParams::new(p[0], p[1])?, s[0], s[1], s[2]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analysis {
    Radius,
    Endpoints,
    Conserved,
    PhasePlane,
}

impl Analysis {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "radius" => Some(Analysis::Radius),
            "endpoints" => Some(Analysis::Endpoints),
            "conserved" => Some(Analysis::Conserved),
            "phase_plane" => Some(Analysis::PhasePlane),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Analysis::Radius => "radius",
            Analysis::Endpoints => "endpoints",
            Analysis::Conserved => "conserved",
            Analysis::PhasePlane => "phase_plane",
        }
    }

    /// The only model the analysis applies to, if restricted.
    fn required_model(&self) -> Option<ModelKind> {
        match self {
            Analysis::Radius => None,
            Analysis::Endpoints => Some(ModelKind::Sir),
            Analysis::Conserved | Analysis::PhasePlane => Some(ModelKind::LotkaVolterra),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultistageSpec {
    pub order: usize,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSpec {
    pub order: usize,
    pub window: usize,
}

impl Default for RadiusSpec {
    fn default() -> Self {
        Self {
            order: DEFAULT_RADIUS_ORDER,
            window: DEFAULT_RADIUS_WINDOW,
        }
    }
}

/// Pass criterion of one report row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// `|computed - value| <= tol`, or `<= tol * |value|` when relative.
    Near {
        value: f64,
        tol: f64,
        relative: bool,
    },
    Below(f64),
    Above(f64),
    Equals(f64),
}

impl Check {
    pub fn passes(&self, computed: f64) -> bool {
        match *self {
            Check::Near {
                value,
                tol,
                relative,
            } => {
                let allowed = if relative { tol * value.abs() } else { tol };
                (computed - value).abs() <= allowed
            }
            Check::Below(bound) => computed < bound,
            Check::Above(bound) => computed > bound,
            Check::Equals(value) => computed == value,
        }
    }

    pub fn reference(&self) -> f64 {
        match *self {
            Check::Near { value, .. } | Check::Equals(value) => value,
            Check::Below(bound) | Check::Above(bound) => bound,
        }
    }

    /// Tolerance column of the report.
    pub fn describe(&self) -> String {
        match *self {
            Check::Near {
                tol,
                relative: false,
                ..
            } => format!("abs <= {tol:e}"),
            Check::Near {
                tol,
                relative: true,
                ..
            } => format!("rel <= {tol:e}"),
            Check::Below(b) => format!("< {b:e}"),
            Check::Above(b) => format!("> {b:e}"),
            Check::Equals(_) => "exact".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub quantity: String,
    pub check: Check,
    pub locus: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub label: String,
    pub description: Option<String>,
    pub model: ModelSpec,
    pub series_order: usize,
    pub multistage: Option<MultistageSpec>,
    pub grid: GridSpec,
    pub reference_tol: f64,
    pub radius: RadiusSpec,
    pub analyses: Vec<Analysis>,
    pub output: Option<PathBuf>,
    pub expectations: Vec<Expectation>,
}

impl ScenarioConfig {
    pub fn has(&self, analysis: Analysis) -> bool {
        self.analyses.contains(&analysis)
    }

    /// Applies command-line overrides, validating them like file values.
    pub fn apply_overrides(
        &mut self,
        order: Option<usize>,
        tol: Option<f64>,
    ) -> Result<(), Vec<ConfigError>> {
        let mut errors = Vec::new();
        if let Some(order) = order {
            if (1..=MAX_ORDER).contains(&order) {
                self.series_order = order;
            } else {
                errors.push(ConfigError::new(
                    "--order",
                    format!("must lie in [1, {MAX_ORDER}]"),
                ));
            }
        }
        if let Some(tol) = tol {
            if (MIN_TOL..=MAX_TOL).contains(&tol) {
                self.reference_tol = tol;
            } else {
                errors.push(ConfigError::new(
                    "--tol",
                    format!("must lie in [{MIN_TOL:e}, {MAX_TOL:e}]"),
                ));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Reads and validates a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, Vec<ConfigError>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| vec![ConfigError::new(path.display().to_string(), e.to_string())])?;
    validate_config(&text)
}

pub fn validate_config(raw: &str) -> Result<ScenarioConfig, Vec<ConfigError>> {
    let table: Table = raw
        .parse()
        .map_err(|e: toml::de::Error| vec![ConfigError::new("toml", e.message().to_string())])?;
    let mut v = Validator::default();
    let config = v.scenario(&table);
    match config {
        Some(config) if v.errors.is_empty() => Ok(config),
        _ => Err(v.errors),
    }
}

#[derive(Default)]
struct Validator {
    errors: Vec<ConfigError>,
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

impl Validator {
    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ConfigError::new(path, message));
    }

    fn unknown_keys(&mut self, table: &Table, allowed: &[&str], prefix: &str) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                self.error(join(prefix, key), "unknown key");
            }
        }
    }

    fn number_value(&mut self, value: &Value, path: &str) -> Option<f64> {
        let x = match value {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            _ => {
                self.error(path, "expected a number");
                return None;
            }
        };
        if x.is_finite() {
            Some(x)
        } else {
            self.error(path, "must be finite");
            None
        }
    }

    fn number(&mut self, table: &Table, key: &str, prefix: &str) -> Option<f64> {
        let path = join(prefix, key);
        match table.get(key) {
            Some(value) => self.number_value(value, &path),
            None => None,
        }
    }

    fn integer(&mut self, table: &Table, key: &str, prefix: &str) -> Option<usize> {
        let path = join(prefix, key);
        match table.get(key) {
            Some(Value::Integer(i)) if *i >= 0 => Some(*i as usize),
            Some(Value::Integer(_)) => {
                self.error(path, "must be non-negative");
                None
            }
            Some(_) => {
                self.error(path, "expected an integer");
                None
            }
            None => None,
        }
    }

    fn string<'a>(&mut self, table: &'a Table, key: &str, prefix: &str) -> Option<&'a str> {
        match table.get(key) {
            Some(Value::String(s)) => Some(s),
            Some(_) => {
                self.error(join(prefix, key), "expected a string");
                None
            }
            None => None,
        }
    }

    fn section<'a>(&mut self, table: &'a Table, key: &str) -> Option<&'a Table> {
        match table.get(key) {
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                self.error(key, "expected a table");
                None
            }
            None => None,
        }
    }

    fn scenario(&mut self, table: &Table) -> Option<ScenarioConfig> {
        self.unknown_keys(
            table,
            &[
                "label",
                "description",
                "model",
                "series",
                "multistage",
                "grid",
                "reference",
                "radius",
                "analysis",
                "output",
                "expect",
            ],
            "",
        );

        let label = self.label(table);
        let description = self.string(table, "description", "").map(str::to_string);
        let model = self.model(table);
        let series_order = self.series(table);
        let multistage = self.multistage(table);
        let grid = self.grid(table);
        let reference_tol = self.reference(table);
        let radius = self.radius(table);
        let analyses = self.analyses(table, model.as_ref().map(|m| m.kind));
        let output = self.string(table, "output", "").map(PathBuf::from);
        let expectations = self.expectations(table);

        Some(ScenarioConfig {
            label: label?,
            description,
            model: model?,
            series_order: series_order?,
            multistage,
            grid: grid?,
            reference_tol: reference_tol?,
            radius: radius?,
            analyses,
            output,
            expectations,
        })
    }

    fn label(&mut self, table: &Table) -> Option<String> {
        let Some(label) = self.string(table, "label", "") else {
            if !table.contains_key("label") {
                self.error("label", "missing");
            }
            return None;
        };
        let ok_char = |c: char| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.');
        if label.is_empty() || !label.chars().all(ok_char) || label.starts_with('.') {
            self.error(
                "label",
                "must be non-empty and use only letters, digits, '-', '_' or '.'",
            );
            return None;
        }
        Some(label.to_string())
    }

    fn model(&mut self, table: &Table) -> Option<ModelSpec> {
        let Some(model) = self.section(table, "model") else {
            if !table.contains_key("model") {
                self.error("model", "missing");
            }
            return None;
        };
        self.unknown_keys(model, &["name", "params", "initial_state"], "model");
        let kind = match self.string(model, "name", "model") {
            Some(name) => match ModelKind::parse(name) {
                Some(kind) => Some(kind),
                None => {
                    self.error("model", format!("unknown name \"{name}\""));
                    None
                }
            },
            None => {
                if !model.contains_key("name") {
                    self.error("model.name", "missing");
                }
                None
            }
        };
        let kind = kind?;

        let params = self.params(model, kind);
        let initial_state = self.initial_state(model, kind);
        Some(ModelSpec {
            kind,
            params: params?,
            initial_state: initial_state?,
        })
    }

    fn params(&mut self, model: &Table, kind: ModelKind) -> Option<Vec<f64>> {
        let names = kind.param_names();
        let empty = Table::new();
        let params = match model.get("params") {
            Some(Value::Table(t)) => t,
            Some(_) => {
                self.error("model.params", "expected a table");
                return None;
            }
            None => &empty,
        };
        let mut values = Vec::with_capacity(names.len());
        let mut ok = true;
        for key in params.keys() {
            if !names.contains(&key.as_str()) {
                self.error(
                    format!("model.params.{key}"),
                    format!("not a parameter of {}", kind.as_str()),
                );
                ok = false;
            }
        }
        for name in names {
            let path = format!("model.params.{name}");
            match params.get(*name) {
                None => {
                    self.error(path, "missing");
                    ok = false;
                }
                Some(value) => match self.number_value(value, &path) {
                    Some(x) if x > 0.0 => values.push(x),
                    Some(_) => {
                        self.error(path, "must be positive");
                        ok = false;
                    }
                    None => ok = false,
                },
            }
        }
        ok.then_some(values)
    }

    fn initial_state(&mut self, model: &Table, kind: ModelKind) -> Option<Vec<f64>> {
        let path = "model.initial_state";
        let items = match model.get("initial_state") {
            Some(Value::Array(items)) => items,
            Some(_) => {
                self.error(path, "expected an array of numbers");
                return None;
            }
            None => {
                self.error(path, "missing");
                return None;
            }
        };
        if items.len() != kind.dimension() {
            self.error(
                path,
                format!("expected {} values, got {}", kind.dimension(), items.len()),
            );
            return None;
        }
        let mut state = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            let x = self.number_value(item, &format!("{path}[{i}]"))?;
            if kind != ModelKind::Riccati && x < 0.0 {
                self.error(format!("{path}[{i}]"), "populations must be non-negative");
                return None;
            }
            state.push(x);
        }
        Some(state)
    }

    fn series(&mut self, table: &Table) -> Option<usize> {
        let Some(series) = self.section(table, "series") else {
            return (!table.contains_key("series")).then_some(DEFAULT_SERIES_ORDER);
        };
        self.unknown_keys(series, &["order"], "series");
        match self.integer(series, "order", "series") {
            Some(order) if (1..=MAX_ORDER).contains(&order) => Some(order),
            Some(_) => {
                self.error("series.order", format!("must lie in [1, {MAX_ORDER}]"));
                None
            }
            None if series.contains_key("order") => None,
            None => Some(DEFAULT_SERIES_ORDER),
        }
    }

    fn multistage(&mut self, table: &Table) -> Option<MultistageSpec> {
        let multistage = self.section(table, "multistage")?;
        self.unknown_keys(multistage, &["order", "step"], "multistage");
        let order = match self.integer(multistage, "order", "multistage") {
            Some(order) if (2..=MAX_ORDER).contains(&order) => Some(order),
            Some(_) => {
                self.error("multistage.order", format!("must lie in [2, {MAX_ORDER}]"));
                None
            }
            None => {
                if !multistage.contains_key("order") {
                    self.error("multistage.order", "missing");
                }
                None
            }
        };
        let step = match self.number(multistage, "step", "multistage") {
            Some(step) if step > 0.0 => Some(step),
            Some(_) => {
                self.error("multistage.step", "must be positive");
                None
            }
            None => {
                if !multistage.contains_key("step") {
                    self.error("multistage.step", "missing");
                }
                None
            }
        };
        Some(MultistageSpec {
            order: order?,
            step: step?,
        })
    }

    fn grid(&mut self, table: &Table) -> Option<GridSpec> {
        let Some(grid) = self.section(table, "grid") else {
            if !table.contains_key("grid") {
                self.error("grid", "missing");
            }
            return None;
        };
        self.unknown_keys(grid, &["t_end", "samples"], "grid");
        let t_end = match self.number(grid, "t_end", "grid") {
            Some(t) if t > 0.0 => Some(t),
            Some(_) => {
                self.error("grid.t_end", "must be positive");
                None
            }
            None => {
                if !grid.contains_key("t_end") {
                    self.error("grid.t_end", "missing");
                }
                None
            }
        };
        let samples = match self.integer(grid, "samples", "grid") {
            Some(n) if (2..=MAX_SAMPLES).contains(&n) => Some(n),
            Some(_) => {
                self.error("grid.samples", format!("must lie in [2, {MAX_SAMPLES}]"));
                None
            }
            None if grid.contains_key("samples") => None,
            None => Some(DEFAULT_SAMPLES),
        };
        Some(GridSpec {
            t_end: t_end?,
            samples: samples?,
        })
    }

    fn reference(&mut self, table: &Table) -> Option<f64> {
        let Some(reference) = self.section(table, "reference") else {
            return (!table.contains_key("reference")).then_some(DEFAULT_REFERENCE_TOL);
        };
        self.unknown_keys(reference, &["tol"], "reference");
        match self.number(reference, "tol", "reference") {
            Some(tol) if (MIN_TOL..=MAX_TOL).contains(&tol) => Some(tol),
            Some(_) => {
                self.error(
                    "reference.tol",
                    format!("must lie in [{MIN_TOL:e}, {MAX_TOL:e}]"),
                );
                None
            }
            None if reference.contains_key("tol") => None,
            None => Some(DEFAULT_REFERENCE_TOL),
        }
    }

    fn radius(&mut self, table: &Table) -> Option<RadiusSpec> {
        let Some(radius) = self.section(table, "radius") else {
            return (!table.contains_key("radius")).then(RadiusSpec::default);
        };
        self.unknown_keys(radius, &["order", "window"], "radius");
        let defaults = RadiusSpec::default();
        let order = self
            .integer(radius, "order", "radius")
            .unwrap_or(defaults.order);
        let window = self
            .integer(radius, "window", "radius")
            .unwrap_or(defaults.window);
        let mut ok = true;
        if window < 4 {
            self.error("radius.window", "must be at least 4");
            ok = false;
        }
        if order < window || order > MAX_ORDER {
            self.error("radius.order", format!("must lie in [window, {MAX_ORDER}]"));
            ok = false;
        }
        ok.then_some(RadiusSpec { order, window })
    }

    fn analyses(&mut self, table: &Table, kind: Option<ModelKind>) -> Vec<Analysis> {
        let items = match table.get("analysis") {
            Some(Value::Array(items)) => items,
            Some(_) => {
                self.error("analysis", "expected an array of names");
                return Vec::new();
            }
            None => return Vec::new(),
        };
        let mut out = Vec::new();
        for item in items {
            let Value::String(name) = item else {
                self.error("analysis", "expected an array of names");
                continue;
            };
            let Some(analysis) = Analysis::parse(name) else {
                self.error("analysis", format!("unknown analysis \"{name}\""));
                continue;
            };
            if let (Some(required), Some(kind)) = (analysis.required_model(), kind) {
                if required != kind {
                    self.error(
                        "analysis",
                        format!("{} requires {}", analysis.as_str(), required.as_str()),
                    );
                    continue;
                }
            }
            if !out.contains(&analysis) {
                out.push(analysis);
            }
        }
        out
    }

    fn expectations(&mut self, table: &Table) -> Vec<Expectation> {
        let items = match table.get("expect") {
            Some(Value::Array(items)) => items,
            Some(_) => {
                self.error("expect", "expected an array of tables");
                return Vec::new();
            }
            None => return Vec::new(),
        };
        let mut out = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let prefix = format!("expect[{i}]");
            let Value::Table(row) = item else {
                self.error(prefix, "expected a table");
                continue;
            };
            if let Some(e) = self.expectation(row, &prefix) {
                out.push(e);
            }
        }
        out
    }

    fn expectation(&mut self, row: &Table, prefix: &str) -> Option<Expectation> {
        self.unknown_keys(
            row,
            &[
                "quantity", "locus", "value", "abs_tol", "rel_tol", "below", "above", "equals",
            ],
            prefix,
        );
        let quantity = self.string(row, "quantity", prefix).map(str::to_string);
        if !row.contains_key("quantity") {
            self.error(join(prefix, "quantity"), "missing");
        }
        let locus = match self.string(row, "locus", prefix) {
            Some(l) if !l.trim().is_empty() => Some(l.to_string()),
            Some(_) => {
                self.error(join(prefix, "locus"), "must not be empty");
                None
            }
            None => {
                if !row.contains_key("locus") {
                    self.error(join(prefix, "locus"), "missing");
                }
                None
            }
        };

        let forms: Vec<&str> = ["value", "below", "above", "equals"]
            .into_iter()
            .filter(|k| row.contains_key(*k))
            .collect();
        let check = if forms.len() != 1 {
            self.error(
                prefix,
                "exactly one of value (with abs_tol or rel_tol), below, above, equals is required",
            );
            None
        } else {
            match forms[0] {
                "value" => {
                    let value = self.number(row, "value", prefix);
                    let abs = self.number(row, "abs_tol", prefix);
                    let rel = self.number(row, "rel_tol", prefix);
                    let (tol, relative) = match (abs, rel) {
                        (Some(t), None) => (Some(t), false),
                        (None, Some(t)) => (Some(t), true),
                        _ => {
                            self.error(prefix, "value needs exactly one of abs_tol, rel_tol");
                            (None, false)
                        }
                    };
                    match (value, tol) {
                        (Some(value), Some(tol)) if tol >= 0.0 => Some(Check::Near {
                            value,
                            tol,
                            relative,
                        }),
                        (Some(_), Some(_)) => {
                            let key = if relative { "rel_tol" } else { "abs_tol" };
                            self.error(join(prefix, key), "must be non-negative");
                            None
                        }
                        _ => None,
                    }
                }
                "below" => self.number(row, "below", prefix).map(Check::Below),
                "above" => self.number(row, "above", prefix).map(Check::Above),
                _ => self.number(row, "equals", prefix).map(Check::Equals),
            }
        };
        if forms.first() != Some(&"value") {
            for key in ["abs_tol", "rel_tol"] {
                if row.contains_key(key) {
                    self.error(join(prefix, key), "only allowed together with value");
                }
            }
        }
        Some(Expectation {
            quantity: quantity?,
            check: check?,
            locus: locus?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        label = "demo"
        [model]
        name = "riccati"
        initial_state = [0.0]
        [grid]
        t_end = 2.0
    "#;

    fn messages(raw: &str) -> Vec<String> {
        validate_config(raw)
            .unwrap_err()
            .into_iter()
            .map(|e| e.to_string())
            .collect()
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = validate_config(MINIMAL).unwrap();
        assert_eq!(c.label, "demo");
        assert_eq!(c.series_order, DEFAULT_SERIES_ORDER);
        assert_eq!(c.grid.samples, DEFAULT_SAMPLES);
        assert_eq!(c.reference_tol, DEFAULT_REFERENCE_TOL);
        assert!(c.analyses.is_empty() && c.expectations.is_empty() && c.multistage.is_none());
    }

    #[test]
    fn unknown_model() {
        let raw = MINIMAL.replace("\"riccati\"", "\"seir\"");
        let errs = messages(&raw);
        assert!(
            errs.iter().any(|e| e.starts_with("model: unknown name")),
            "{errs:?}"
        );
    }

    #[test]
    fn conserved_needs_lotka_volterra() {
        let raw = r#"
            label = "x"
            analysis = ["conserved", "endpoints"]
            [model]
            name = "sir"
            params = { beta = 0.01, gamma = 0.02 }
            initial_state = [20, 15, 10]
            [grid]
            t_end = 1
        "#;
        let errs = messages(raw);
        assert_eq!(errs, vec!["analysis: conserved requires lotka_volterra"]);
    }

    #[test]
    fn negative_step() {
        let raw = format!("{MINIMAL}\n[multistage]\norder = 5\nstep = -0.1\n");
        assert_eq!(messages(&raw), vec!["multistage.step: must be positive"]);
    }

    #[test]
    fn all_errors_reported_together() {
        let raw = r#"
            label = "bad label"
            colour = "red"
            analysis = ["phase_plane", "fourier"]
            [model]
            name = "lotka_volterra"
            params = { a = 1, b = -1, c = 1, e = 2 }
            initial_state = [1, 2, 3]
            [series]
            order = 0
            [grid]
            t_end = -1
            samples = 1
            [reference]
            tol = 1.0
            [[expect]]
            quantity = "q"
            value = 1.0
        "#;
        let errs = messages(raw);
        for expected in [
            "label: must be non-empty",
            "colour: unknown key",
            "analysis: unknown analysis \"fourier\"",
            "model.params.e: not a parameter of lotka_volterra",
            "model.params.b: must be positive",
            "model.params.d: missing",
            "model.initial_state: expected 2 values, got 3",
            "series.order: must lie in",
            "grid.t_end: must be positive",
            "grid.samples: must lie in",
            "reference.tol: must lie in",
            "expect[0]: value needs exactly one of abs_tol, rel_tol",
            "expect[0].locus: missing",
        ] {
            assert!(
                errs.iter().any(|e| e.starts_with(expected)),
                "{expected} not in {errs:?}"
            );
        }
    }

    #[test]
    fn syntax_error_is_reported() {
        let errs = messages("label = ");
        assert_eq!(errs.len(), 1);
        assert!(errs[0].starts_with("toml: "));
    }

    #[test]
    fn checks() {
        let near = Check::Near {
            value: 2.0,
            tol: 0.1,
            relative: true,
        };
        assert!(near.passes(2.19) && !near.passes(2.21));
        assert!(Check::Below(1.0).passes(0.5) && !Check::Below(1.0).passes(1.0));
        assert!(Check::Above(0.0).passes(1e-300) && !Check::Above(0.0).passes(0.0));
        assert!(Check::Equals(2.0).passes(2.0) && !Check::Equals(2.0).passes(2.0 + 1e-15));
        assert!(!near.passes(f64::NAN));
    }

    #[test]
    fn overrides_are_validated() {
        let mut c = validate_config(MINIMAL).unwrap();
        c.apply_overrides(Some(12), Some(1e-8)).unwrap();
        assert_eq!((c.series_order, c.reference_tol), (12, 1e-8));
        let errs = c.apply_overrides(Some(0), Some(1.0)).unwrap_err();
        assert_eq!(errs.len(), 2);
    }
}
