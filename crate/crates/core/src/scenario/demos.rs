use super::spec::ScenarioSpec;
use crate::error::{Error, Result};

/// Built-in demos: name, one-line summary and scenario file.
pub const DEMOS: &[(&str, &str, &str)] = &[
    (
        "dichotomy",
        "pairwise singular charges: the extracted limit vanishes",
        include_str!("../../examples/scenarios/dichotomy.json"),
    ),
    (
        "empirical",
        "empirical distributions of multinomial draws over four bins",
        include_str!("../../examples/scenarios/empirical.json"),
    ),
    (
        "posterior",
        "disagreement of two Bayesian posteriors on coin flips",
        include_str!("../../examples/scenarios/posterior.json"),
    ),
    (
        "slln",
        "Cesàro means of independent ±1 functions",
        include_str!("../../examples/scenarios/slln.json"),
    ),
];

pub fn demo_names() -> Vec<&'static str> {
    DEMOS.iter().map(|d| d.0).collect()
}

pub fn demo_spec(name: &str) -> Result<ScenarioSpec> {
    let (_, _, text) = DEMOS.iter().find(|d| d.0 == name).ok_or_else(|| {
        Error::Config(format!(
            "unknown demo `{name}`; available: {}",
            demo_names().join(", ")
        ))
    })?;
    ScenarioSpec::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_demo_parses() {
        for name in demo_names() {
            demo_spec(name).unwrap();
        }
        assert!(demo_spec("nope").is_err());
    }
}
