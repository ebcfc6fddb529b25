//! Declarative scenarios: a JSON file names a generator, a pipeline and its
//! configuration; running it yields a report and CSV certificate tables.
//!
//! `certificates.csv` columns depend on the pipeline:
//!
//! | pipeline | columns |
//! |---|---|
//! | `extract_positive`, `extract_signed`, `extract_independent` | `n,norm_residual,lambda_Anc,partial_sum,bound` |
//! | `extract_unbounded` | `n,residual` |
//! | `extract_vector` | `n,prob_b,partial_sum,norm_residual` |
//! | `slln` | `k,p,q,gap,bound,r,n_r` |
//! | `orthogonality` | `j,tail_max,below` |
//!
//! Numbers use `.` as decimal separator and twelve-digit scientific notation
//! (exact zeros print as `0`).

mod demos;
mod run;
mod spec;

pub use demos::{demo_names, demo_spec, DEMOS};
pub use run::{run, theta_priors, RunReport};
pub use spec::{GeneratorSpec, Outputs, Pipeline, RunConfig, ScenarioSpec};

/// Environment variable that overrides `tau_conv` of every scenario.
pub const TOL_ENV: &str = "CHARGE_KOMLOS_TOL";

/// Applies the `CHARGE_KOMLOS_TOL` override, if set.
pub fn apply_env_override(spec: &mut ScenarioSpec) -> crate::Result<()> {
    if let Ok(v) = std::env::var(TOL_ENV) {
        let tol: f64 = v
            .trim()
            .parse()
            .map_err(|_| crate::Error::Config(format!("{TOL_ENV}={v} is not a number")))?;
        if !(tol >= 0.0) || !tol.is_finite() {
            return Err(crate::Error::Config(format!("{TOL_ENV}={v} must be non-negative")));
        }
        spec.cfg.tau_conv = tol;
    }
    Ok(())
}
