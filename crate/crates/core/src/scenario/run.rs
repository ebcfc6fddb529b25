use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};

use super::spec::{GeneratorSpec, Pipeline, RunConfig, ScenarioSpec};
use crate::charge::{product_charge, Charge, ProbabilityCharge, Tolerances};
use crate::error::{Error, Result};
use crate::generators;
use crate::komlos::{
    extract_independent, extract_positive, extract_signed, extract_unbounded, mask_string, num,
    pow2, test_asymptotic_orthogonality, ExtractionConfig, ExtractionResult, Failure,
    TruncationLadder,
};
use crate::set_algebra::{make_product, Partition, ProductStructure, SetAlgebra};
use crate::slln::{
    bernoulli_mixture_scenario, empirical_distribution, run_slln, SllnConfig,
};
use crate::vector_charge::{extract_vector, RBoundConfig, SampleSpace, VectorCharge};

/// Ground-set cap for product generators.
const PRODUCT_GROUND_CAP: usize = 1 << 20;

/// Outcome of one scenario. `report.json` is the serialized form; the
/// CSV tables and the wall-clock time are written separately.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: String,
    pub generator: String,
    pub pipeline: String,
    pub passed: bool,
    pub degenerate: bool,
    pub failures: Vec<Failure>,
    pub config: RunConfig,
    pub result: Value,
    #[serde(skip)]
    pub certificates_csv: String,
    #[serde(skip)]
    pub ladder_csv: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Success under the exit-status contract.
    pub fn ok(&self, strict: bool) -> bool {
        self.passed && !(strict && self.degenerate)
    }

    /// Writes the report, both CSV tables and `timing.json` into `dir`.
    pub fn write(&self, dir: &Path, spec: &ScenarioSpec) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(&spec.outputs.report), self.to_json())?;
        std::fs::write(dir.join(&spec.outputs.certificates), &self.certificates_csv)?;
        std::fs::write(dir.join(&spec.outputs.ladder), &self.ladder_csv)?;
        let timing = json!({ "wall_clock_seconds": self.elapsed.as_secs_f64() });
        std::fs::write(
            dir.join("timing.json"),
            serde_json::to_string_pretty(&timing)? + "\n",
        )?;
        Ok(())
    }
}

fn tolerances(c: &RunConfig) -> Tolerances {
    Tolerances {
        zero: c.tau_zero,
        conv: c.tau_conv,
        ..Tolerances::default()
    }
}

fn extraction_config(c: &RunConfig) -> ExtractionConfig {
    let d = ExtractionConfig::default();
    ExtractionConfig {
        levels: c.levels,
        horizon: c.horizon,
        block_size: c.block_size,
        max_block: c.max_block.unwrap_or(d.max_block.max(c.block_size)),
        delta: c.delta,
        norm_subsequence: c.norm_subsequence.unwrap_or(d.norm_subsequence),
        tol: tolerances(c),
    }
}

fn schema(pointer: &str, e: Error) -> Error {
    Error::Schema {
        pointer: pointer.into(),
        message: e.to_string(),
    }
}

fn algebra(spec: &ScenarioSpec) -> Result<Arc<SetAlgebra>> {
    let desc = spec
        .algebra
        .as_ref()
        .ok_or_else(|| schema("/algebra", Error::Config("missing algebra".into())))?;
    SetAlgebra::from_descriptor(desc).map_err(|e| schema("/algebra", e))
}

fn reference(spec: &ScenarioSpec, alg: &Arc<SetAlgebra>) -> Result<ProbabilityCharge> {
    match &spec.reference {
        None => Ok(ProbabilityCharge::uniform(alg)),
        Some(v) => Charge::new(alg, v.clone())
            .and_then(|c| ProbabilityCharge::new(c, &tolerances(&spec.cfg)))
            .map_err(|e| schema("/reference", e)),
    }
}

fn charge_param(alg: &Arc<SetAlgebra>, v: &[f64], pointer: &str) -> Result<Charge> {
    Charge::new(alg, v.to_vec()).map_err(|e| schema(pointer, e))
}

/// A generated sequence of charges with its reference.
struct Charges {
    seq: Vec<Charge>,
    l: ProbabilityCharge,
    product: Option<ProductStructure>,
}

fn charges(spec: &ScenarioSpec) -> Result<Charges> {
    let seed = spec.cfg.seed.unwrap_or(0);
    let plain = |seq: Vec<Charge>, l: ProbabilityCharge| Charges {
        seq,
        l,
        product: None,
    };
    match &spec.generator {
        GeneratorSpec::IidCharges {
            len, concentration, ..
        } => {
            let alg = algebra(spec)?;
            let l = reference(spec, &alg)?;
            let seq = generators::iid_charges(&alg, *len, seed, *concentration)
                .map_err(|e| schema("/generator/params/concentration", e))?;
            Ok(plain(seq, l))
        }
        GeneratorSpec::SingularFamily { len } => {
            let alg = algebra(spec)?;
            let l = reference(spec, &alg)?;
            Ok(plain(generators::singular_family(&l, *len), l))
        }
        GeneratorSpec::Constant { charge, len } => {
            let alg = algebra(spec)?;
            let l = reference(spec, &alg)?;
            let f = charge_param(&alg, charge, "/generator/params/charge")?;
            Ok(plain(generators::constant(&f, *len), l))
        }
        GeneratorSpec::SignedMixture {
            positive,
            scale,
            len,
        } => {
            let alg = algebra(spec)?;
            let l = reference(spec, &alg)?;
            let p = charge_param(&alg, positive, "/generator/params/positive")?;
            Ok(plain(generators::signed_mixture(&p, &l, *scale, *len)?, l))
        }
        GeneratorSpec::UnboundedRamp { b, mu, len } => {
            let alg = algebra(spec)?;
            let l = reference(spec, &alg)?;
            let b = crate::set_algebra::EventSet::from_atoms(&alg, b.iter().copied())
                .map_err(|e| schema("/generator/params/b", e))?;
            let mu = charge_param(&alg, mu, "/generator/params/mu")?;
            Ok(plain(generators::unbounded_ramp(&l, &b, &mu, *len)?, l))
        }
        GeneratorSpec::ProductIndependent { coins, bias } => {
            let (_, ps) = make_product(&vec![2; *coins], PRODUCT_GROUND_CAP)
                .map_err(|e| schema("/generator/params/coins", e))?;
            let l = product_charge(&ps, &vec![vec![1.0 - bias, *bias]; *coins], &Tolerances::default())
                .map_err(|e| schema("/generator/params/bias", e))?;
            let seq = generators::coin_indicators(&l, &ps, &generators::doubling_scales(*coins))?;
            Ok(Charges {
                seq,
                l,
                product: Some(ps),
            })
        }
        GeneratorSpec::Empirical { bins, probs, len } => {
            let alg = algebra(spec)?;
            let l = reference(spec, &alg)?;
            let partition =
                Partition::from_labels(&alg, bins).map_err(|e| schema("/generator/params/bins", e))?;
            if probs.len() != alg.ground_size() {
                return Err(schema(
                    "/generator/params/probs",
                    Error::Length {
                        expected: alg.ground_size(),
                        got: probs.len(),
                    },
                ));
            }
            let points = generators::multinomial_points(probs, *len, seed)
                .map_err(|e| schema("/generator/params/probs", e))?;
            let seq: Vec<Charge> = empirical_distribution(&points, &partition)?
                .into_iter()
                .map(ProbabilityCharge::into_charge)
                .collect();
            let coarse = Arc::clone(seq.first().ok_or(Error::EmptySequence)?.algebra());
            let mut pushed = vec![0.0; coarse.num_atoms()];
            for (a, m) in l.atoms().iter().enumerate() {
                pushed[coarse.atom_of(alg.atom_points(a)[0])] += m;
            }
            let l = ProbabilityCharge::normalized(Charge::new(&coarse, pushed)?)?;
            Ok(plain(seq, l))
        }
        GeneratorSpec::Posterior {
            grid,
            true_theta,
            len,
        } => {
            let alg = SetAlgebra::power_set(*grid).map_err(|e| schema("/generator/params/grid", e))?;
            let (thetas, p1, p2) = theta_priors(&alg, *grid)?;
            let m = bernoulli_mixture_scenario(&thetas, &p1, &p2, *true_theta, *len, seed)
                .map_err(|e| schema("/generator/params/true_theta", e))?;
            Ok(plain(m.disagreements, ProbabilityCharge::uniform(&alg)))
        }
        GeneratorSpec::SllnFunctions { .. } => unreachable!("rejected by validation"),
    }
}

/// Grid `θ_i = (i + 1/2)/grid` with a uniform prior and a prior `∝ 1 + θ`.
pub fn theta_priors(
    alg: &Arc<SetAlgebra>,
    grid: usize,
) -> Result<(Vec<f64>, ProbabilityCharge, ProbabilityCharge)> {
    let thetas: Vec<f64> = (0..grid).map(|i| (i as f64 + 0.5) / grid as f64).collect();
    let p2 = ProbabilityCharge::normalized(Charge::new(
        alg,
        thetas.iter().map(|t| 1.0 + t).collect(),
    )?)?;
    Ok((thetas, ProbabilityCharge::uniform(alg), p2))
}

fn ladders_csv(ladders: &[TruncationLadder]) -> String {
    let mut s = String::from("ladder,k,xi_k_norm,weak_residual\n");
    for (i, l) in ladders.iter().enumerate() {
        for line in l.to_csv().lines().skip(1) {
            let _ = writeln!(s, "{i},{line}");
        }
    }
    s
}

struct Outcome {
    passed: bool,
    degenerate: bool,
    failures: Vec<Failure>,
    result: Value,
    certificates_csv: String,
    ladder_csv: String,
}

fn from_extraction(r: &ExtractionResult, extra: Option<Value>) -> Outcome {
    let mut result = r.to_json();
    if let Some(v) = extra {
        result["orthogonality"] = v;
    }
    Outcome {
        passed: r.passed(),
        degenerate: r.diagnostics.degenerate,
        failures: r.failures.clone(),
        result,
        certificates_csv: r.certificates_csv(),
        ladder_csv: ladders_csv(&r.ladders),
    }
}

fn orthogonality_window(c: &RunConfig, len: usize) -> usize {
    c.window.unwrap_or((len / 4).max(1))
}

/// Runs one validated scenario. Deterministic given the scenario.
pub fn run(spec: &ScenarioSpec) -> Result<RunReport> {
    spec.validate()?;
    let start = Instant::now();
    let c = &spec.cfg;
    let ecfg = extraction_config(c);
    let out = match spec.pipeline {
        Pipeline::Slln => run_slln_pipeline(spec)?,
        Pipeline::ExtractVector => run_vector(spec, &ecfg)?,
        p => {
            let Charges { seq, l, product } = charges(spec)?;
            let h = c.horizon.min(seq.len());
            match p {
                Pipeline::ExtractPositive => {
                    let r = extract_positive(&seq, &l, &ecfg)?;
                    let orth = test_asymptotic_orthogonality(
                        &seq[..h],
                        orthogonality_window(c, h),
                        c.tau_orth,
                    )?;
                    from_extraction(&r, Some(serde_json::to_value(orth)?))
                }
                Pipeline::ExtractSigned => from_extraction(&extract_signed(&seq, &l, &ecfg)?, None),
                Pipeline::ExtractUnbounded => {
                    let r = extract_unbounded(&seq, &l, &ecfg, c.tau_inf)?;
                    let mut cert = String::from("n,residual\n");
                    for (n, v) in r.residuals.iter().enumerate() {
                        let _ = writeln!(cert, "{},{}", n + 1, num(*v));
                    }
                    Outcome {
                        passed: r.passed(),
                        degenerate: false,
                        failures: r.failures.clone(),
                        result: r.to_json(),
                        certificates_csv: cert,
                        ladder_csv: ladders_csv(std::slice::from_ref(&r.ladder)),
                    }
                }
                Pipeline::ExtractIndependent => {
                    let ps = product.expect("only product generators reach here");
                    let r = extract_independent(&seq, &l, &ps, &ecfg, c.epsilon)?;
                    let failures = r.failures.clone();
                    Outcome {
                        passed: r.passed(),
                        degenerate: r.result.diagnostics.degenerate,
                        failures,
                        result: json!({
                            "summary": r.summary,
                            "a_eps": mask_string(&r.a_eps),
                            "row_probabilities": r.row_probabilities,
                            "extraction": r.result.to_json(),
                        }),
                        certificates_csv: r.result.certificates_csv(),
                        ladder_csv: ladders_csv(&r.result.ladders),
                    }
                }
                Pipeline::Orthogonality => {
                    let rep = test_asymptotic_orthogonality(
                        &seq[..h],
                        orthogonality_window(c, h),
                        c.tau_orth,
                    )?;
                    let mut cert = String::from("j,tail_max,below\n");
                    for (j, (v, b)) in rep.tail_max.iter().zip(&rep.below).enumerate() {
                        let _ = writeln!(cert, "{},{},{}", j + 1, num(*v), b);
                    }
                    let mut ladder = String::from("n,norm\n");
                    for (n, f) in seq[..h].iter().enumerate() {
                        let _ = writeln!(ladder, "{},{}", n + 1, num(f.variation_norm()));
                    }
                    let failures = if rep.verdict {
                        Vec::new()
                    } else {
                        vec![Failure {
                            check: "orthogonality".into(),
                            value: rep.tail_max.iter().copied().fold(0.0, f64::max),
                            limit: c.tau_orth,
                        }]
                    };
                    Outcome {
                        passed: rep.verdict,
                        degenerate: false,
                        failures,
                        result: serde_json::to_value(&rep)?,
                        certificates_csv: cert,
                        ladder_csv: ladder,
                    }
                }
                Pipeline::Slln | Pipeline::ExtractVector => unreachable!(),
            }
        }
    };
    Ok(RunReport {
        name: spec.display_name("scenario"),
        generator: spec.generator.kind().into(),
        pipeline: spec.pipeline.name().into(),
        passed: out.passed,
        degenerate: out.degenerate,
        failures: out.failures,
        config: spec.cfg.clone(),
        result: out.result,
        certificates_csv: out.certificates_csv,
        ladder_csv: out.ladder_csv,
        elapsed: start.elapsed(),
    })
}

fn run_vector(spec: &ScenarioSpec, ecfg: &ExtractionConfig) -> Result<Outcome> {
    let GeneratorSpec::IidCharges {
        len,
        concentration,
        samples,
    } = &spec.generator
    else {
        unreachable!("rejected by validation");
    };
    let alg = algebra(spec)?;
    let l = reference(spec, &alg)?;
    let m = samples.unwrap_or(3);
    let space = SampleSpace::uniform(m).map_err(|e| schema("/generator/params/samples", e))?;
    let seed = spec.cfg.seed.unwrap_or(0);
    let per_sample = (0..m as u64)
        .map(|w| generators::iid_charges(&alg, *len, seed.wrapping_add(w), *concentration))
        .collect::<Result<Vec<_>>>()?;
    let seq = (0..*len)
        .map(|n| {
            let slices: Vec<Charge> = per_sample.iter().map(|s| s[n].clone()).collect();
            VectorCharge::from_slices(&slices, &space)
        })
        .collect::<Result<Vec<_>>>()?;
    let r = extract_vector(&seq, &l, &space, ecfg, &RBoundConfig::default())?;

    let mut cert = String::from("n,prob_b,partial_sum,norm_residual\n");
    for row in &r.certificates {
        let _ = writeln!(
            cert,
            "{},{},{},{}",
            row.n,
            num(row.prob_b),
            num(row.partial_sum),
            num(row.norm_residual)
        );
    }
    let mut ladder = String::from("k,xi_k_norm\n");
    for k in 0..=ecfg.levels {
        let cap = pow2(k as i32);
        let norm: f64 = r
            .xi
            .table()
            .iter()
            .zip(l.atoms())
            .map(|(row, la)| {
                row.iter()
                    .zip(space.probs())
                    .map(|(v, p)| p * v.min(cap * la))
                    .sum::<f64>()
            })
            .sum();
        let _ = writeln!(ladder, "{k},{}", num(norm));
    }
    Ok(Outcome {
        passed: r.passed(),
        degenerate: false,
        failures: r.failures.clone(),
        result: json!({
            "xi": r.xi.table(),
            "weights": r.weights.triplets(),
            "certificates": r.certificates,
            "prob_h": r.prob_h,
            "sample_residuals": r.sample_residuals,
            "bound_report": r.bound_report,
            "failures": r.failures,
        }),
        certificates_csv: cert,
        ladder_csv: ladder,
    })
}

fn run_slln_pipeline(spec: &ScenarioSpec) -> Result<Outcome> {
    let GeneratorSpec::SllnFunctions { len } = &spec.generator else {
        unreachable!("rejected by validation");
    };
    let alg = algebra(spec)?;
    let l = reference(spec, &alg)?;
    let seed = spec.cfg.seed.unwrap_or(0);
    let f = generators::pm_one_functions(&alg, *len, seed)?;
    let cfg = SllnConfig {
        horizon: spec.cfg.horizon,
        seed,
        tol: tolerances(&spec.cfg),
        ..SllnConfig::default()
    };
    let (trace, _) = run_slln(&f, &l, &cfg)?;
    let mut ladder = String::from("k,partial_norm\n");
    for (k, v) in trace.partial_norms.iter().enumerate() {
        let _ = writeln!(ladder, "{},{}", k + 1, num(*v));
    }
    Ok(Outcome {
        passed: trace.passed(),
        degenerate: false,
        failures: trace.failures.clone(),
        result: json!({
            "mu_construction": "heuristic: mu(a) proportional to lambda(a) / (1 + sup_n |f_n(a)|)",
            "trace": trace,
        }),
        certificates_csv: trace.to_csv(),
        ladder_csv: ladder,
    })
}
