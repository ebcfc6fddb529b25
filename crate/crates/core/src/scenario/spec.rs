use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set_algebra::AlgebraDescriptor;

/// A declarative run: which sequence to generate and which pipeline to
/// apply to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default)]
    pub name: Option<String>,
    /// Required unless the generator builds its own space
    /// (`product_independent`, `posterior`).
    #[serde(default)]
    pub algebra: Option<AlgebraDescriptor>,
    /// Per-atom masses of `λ`; uniform when absent.
    #[serde(default)]
    pub reference: Option<Vec<f64>>,
    pub generator: GeneratorSpec,
    pub pipeline: Pipeline,
    #[serde(default)]
    pub cfg: RunConfig,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    IidCharges {
        len: usize,
        #[serde(default = "one")]
        concentration: f64,
        /// Number of equally likely sample points for `extract_vector`;
        /// each sample gets its own iid sequence.
        #[serde(default)]
        samples: Option<usize>,
    },
    SingularFamily {
        len: usize,
    },
    Constant {
        charge: Vec<f64>,
        len: usize,
    },
    SignedMixture {
        positive: Vec<f64>,
        scale: f64,
        len: usize,
    },
    UnboundedRamp {
        /// Atoms of the event `B` that carries the ramp.
        b: Vec<usize>,
        mu: Vec<f64>,
        len: usize,
    },
    ProductIndependent {
        coins: usize,
        #[serde(default = "half")]
        bias: f64,
    },
    Empirical {
        /// Bin label of each atom.
        bins: Vec<usize>,
        /// Sampling probability of each ground point.
        probs: Vec<f64>,
        len: usize,
    },
    Posterior {
        /// Number of coin biases `(i + 1/2) / grid`.
        grid: usize,
        true_theta: f64,
        len: usize,
    },
    SllnFunctions {
        len: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl GeneratorSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::IidCharges { .. } => "iid_charges",
            Self::SingularFamily { .. } => "singular_family",
            Self::Constant { .. } => "constant",
            Self::SignedMixture { .. } => "signed_mixture",
            Self::UnboundedRamp { .. } => "unbounded_ramp",
            Self::ProductIndependent { .. } => "product_independent",
            Self::Empirical { .. } => "empirical",
            Self::Posterior { .. } => "posterior",
            Self::SllnFunctions { .. } => "slln_functions",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(
            self,
            Self::IidCharges { .. }
                | Self::Empirical { .. }
                | Self::Posterior { .. }
                | Self::SllnFunctions { .. }
        )
    }

    /// Generators that construct their own algebra.
    pub fn owns_algebra(&self) -> bool {
        matches!(self, Self::ProductIndependent { .. } | Self::Posterior { .. })
    }

    pub fn supports(&self, p: Pipeline) -> bool {
        use Pipeline::*;
        match self {
            Self::IidCharges { .. } => matches!(
                p,
                ExtractPositive | ExtractSigned | ExtractUnbounded | ExtractVector | Orthogonality
            ),
            Self::SingularFamily { .. } | Self::Constant { .. } => matches!(
                p,
                ExtractPositive | ExtractSigned | ExtractUnbounded | Orthogonality
            ),
            Self::SignedMixture { .. } => p == ExtractSigned,
            Self::UnboundedRamp { .. } => p == ExtractUnbounded,
            Self::ProductIndependent { .. } => matches!(p, ExtractIndependent | ExtractPositive),
            Self::Empirical { .. } | Self::Posterior { .. } => {
                matches!(p, ExtractPositive | Orthogonality)
            }
            Self::SllnFunctions { .. } => p == Slln,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    ExtractPositive,
    ExtractSigned,
    ExtractUnbounded,
    ExtractIndependent,
    ExtractVector,
    Slln,
    Orthogonality,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Self::ExtractPositive => "extract_positive",
            Self::ExtractSigned => "extract_signed",
            Self::ExtractUnbounded => "extract_unbounded",
            Self::ExtractIndependent => "extract_independent",
            Self::ExtractVector => "extract_vector",
            Self::Slln => "slln",
            Self::Orthogonality => "orthogonality",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "K")]
    pub levels: u32,
    pub horizon: usize,
    pub block_size: usize,
    pub max_block: Option<usize>,
    pub delta: f64,
    pub tau_conv: f64,
    pub tau_zero: f64,
    pub seed: Option<u64>,
    pub norm_subsequence: Option<bool>,
    /// Tail window of the orthogonality test; a quarter of the horizon when
    /// absent.
    pub window: Option<usize>,
    /// Threshold of the orthogonality test.
    pub tau_orth: f64,
    /// Saturation slack of the unbounded variant.
    pub tau_inf: f64,
    /// `ε` of the independence variant.
    pub epsilon: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            levels: 40,
            horizon: 512,
            block_size: 8,
            max_block: None,
            delta: 1e-3,
            tau_conv: 1e-6,
            tau_zero: 1e-12,
            seed: None,
            norm_subsequence: None,
            window: None,
            tau_orth: 0.05,
            tau_inf: 1e-3,
            epsilon: 0.05,
        }
    }
}

/// Output file names, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub report: String,
    pub certificates: String,
    pub ladder: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            report: "report.json".into(),
            certificates: "certificates.csv".into(),
            ladder: "ladder.csv".into(),
        }
    }
}

fn schema(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => s.push_str(&format!("/{index}")),
            Segment::Map { key } => s.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => s.push_str(&format!("/{variant}")),
            Segment::Unknown => s.push_str("/?"),
        }
    }
    s
}

impl ScenarioSpec {
    /// Parses and validates; errors carry a JSON pointer.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = pointer_of(e.path());
            let message = e.inner().to_string();
            schema(&pointer, message)
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.generator;
        if !g.supports(self.pipeline) {
            return Err(Error::Incompatible {
                generator: g.kind().into(),
                pipeline: self.pipeline.name().into(),
            });
        }
        if g.is_stochastic() && self.cfg.seed.is_none() {
            return Err(schema(
                "/cfg/seed",
                format!("generator `{}` is stochastic and needs a seed", g.kind()),
            ));
        }
        if g.owns_algebra() {
            if self.algebra.is_some() {
                return Err(schema(
                    "/algebra",
                    format!("generator `{}` builds its own algebra", g.kind()),
                ));
            }
            if self.reference.is_some() {
                return Err(schema(
                    "/reference",
                    format!("generator `{}` builds its own reference", g.kind()),
                ));
            }
        } else if self.algebra.is_none() {
            return Err(schema("/algebra", "missing algebra"));
        }
        let c = &self.cfg;
        let positive = [
            ("/cfg/K", c.levels as usize),
            ("/cfg/horizon", c.horizon),
            ("/cfg/block_size", c.block_size),
        ];
        for (p, v) in positive {
            if v == 0 {
                return Err(schema(p, "must be positive"));
            }
        }
        let nonneg = [
            ("/cfg/delta", c.delta),
            ("/cfg/tau_conv", c.tau_conv),
            ("/cfg/tau_zero", c.tau_zero),
            ("/cfg/tau_orth", c.tau_orth),
            ("/cfg/tau_inf", c.tau_inf),
        ];
        for (p, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(schema(p, "must be a finite non-negative number"));
            }
        }
        if !(c.epsilon > 0.0 && c.epsilon < 1.0) {
            return Err(schema("/cfg/epsilon", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// The name used for output directories: `name`, else the file stem.
    pub fn display_name(&self, fallback: &str) -> String {
        self.name.clone().unwrap_or_else(|| fallback.to_string())
    }
}
