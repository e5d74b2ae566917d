//! Scenario files shipped in `scenarios/`, embedded at build time.

use crate::config::{validate_config, ConfigError, ScenarioConfig};

pub const PRESETS: [(&str, &str); 6] = [
    (
        "riccati-abbasbandy",
        include_str!("../../../scenarios/riccati-abbasbandy.toml"),
    ),
    (
        "riccati-y0-5",
        include_str!("../../../scenarios/riccati-y0-5.toml"),
    ),
    (
        "lv-case-i",
        include_str!("../../../scenarios/lv-case-i.toml"),
    ),
    (
        "lv-case-v",
        include_str!("../../../scenarios/lv-case-v.toml"),
    ),
    (
        "sir-biazar",
        include_str!("../../../scenarios/sir-biazar.toml"),
    ),
    (
        "sir-strong",
        include_str!("../../../scenarios/sir-strong.toml"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn source(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// Parsed preset, or `None` for an unknown name.
pub fn load(name: &str) -> Option<Result<ScenarioConfig, Vec<ConfigError>>> {
    source(name).map(validate_config)
}
