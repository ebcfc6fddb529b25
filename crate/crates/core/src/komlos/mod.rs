//! Komlós-type extraction for sequences of charges.
//!
//! Given a norm-bounded sequence `F_n ≥ 0` and a reference probability `l`,
//! the extraction produces forward, disjoint convex combinations `G_n` of
//! the inputs, events `A_n = {G_n ≤ 2^n l}` and a limit `ξ` with
//! `‖G_n|A_n − ξ‖ → 0` and `Σ_n l(A_n^c) < ∞`. Every run carries numeric
//! certificates for these claims; a failed certificate is reported in
//! [`ExtractionResult::failures`], never hidden.
//!
//! The limit is estimated as a Cesàro average of the truncated inputs over
//! the tail of the run, and each block of inputs is convexified by projecting
//! the limit onto the block's convex hull.

mod engine;
mod hull;
mod independent;
mod orthogonality;
mod positive;
mod signed;
mod unbounded;

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use independent::{extract_independent, IndependentExtraction};
pub use orthogonality::{test_asymptotic_orthogonality, OrthogonalityReport};
pub use positive::{extract_positive, truncate};
pub use signed::extract_signed;
pub use unbounded::{extract_unbounded, ExtendedCharge, UnboundedExtraction};

pub(crate) use engine::FlatProblem;

use crate::charge::{Charge, Tolerances};
use crate::error::{Error, Result};
use crate::set_algebra::{EventSet, SetAlgebra};

/// Knobs of an extraction run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    /// Top truncation level `K`.
    pub levels: u32,
    /// Number of inputs consumed.
    pub horizon: usize,
    /// Initial number of inputs per convex block.
    pub block_size: usize,
    /// Blocks grow until the limit is reachable or this size is hit.
    pub max_block: usize,
    /// Slack of the lower-bound certificate.
    pub delta: f64,
    /// Keep only inputs whose truncated norm is within `delta` of the
    /// window limsup before averaging.
    pub norm_subsequence: bool,
    pub tol: Tolerances,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            levels: 40,
            horizon: 512,
            block_size: 8,
            max_block: 256,
            delta: 1e-3,
            norm_subsequence: true,
            tol: Tolerances::default(),
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.levels > 1000 {
            return Err(Error::Config(format!(
                "levels must be in 1..=1000, got {}",
                self.levels
            )));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        if self.block_size == 0 {
            return Err(Error::Config("block_size must be positive".into()));
        }
        if self.max_block < self.block_size {
            return Err(Error::Config(format!(
                "max_block ({}) is smaller than block_size ({})",
                self.max_block, self.block_size
            )));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::Config("delta must be non-negative".into()));
        }
        let t = &self.tol;
        if [t.zero, t.conv, t.mass, t.indep].iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Config("tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

/// Sparse row-stochastic weights `α_{n,i}`: row `n` lists `(i, α_{n,i})`
/// with positive weights in increasing input order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightMatrix {
    inputs: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

/// Result of checking the [`WeightMatrix`] invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightCheck {
    pub max_row_sum_error: f64,
    pub forward: bool,
    pub disjoint: bool,
    pub positive: bool,
}

impl WeightCheck {
    /// Row sums within `1e-12`, supports checked exactly.
    pub fn holds(&self) -> bool {
        self.max_row_sum_error <= 1e-12 && self.forward && self.disjoint && self.positive
    }
}

impl WeightMatrix {
    pub fn new(inputs: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        for (n, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::Config(format!("weight row {n} is empty")));
            }
            for w in row.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(Error::Config(format!("weight row {n} is not sorted")));
                }
            }
            if let Some(&(i, _)) = row.iter().find(|(i, _)| *i >= inputs) {
                return Err(Error::Config(format!(
                    "weight row {n} refers to input {i} of {inputs}"
                )));
            }
        }
        Ok(Self { inputs, rows })
    }

    pub fn identity(len: usize) -> Self {
        Self {
            inputs: len,
            rows: (0..len).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn row(&self, n: usize) -> &[(usize, f64)] {
        &self.rows[n]
    }

    /// `(row, input, weight)` triplets.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, r)| r.iter().map(move |&(i, w)| (n, i, w)))
            .collect()
    }

    pub fn check(&self) -> WeightCheck {
        let mut used = vec![false; self.inputs];
        let mut disjoint = true;
        let mut forward = true;
        let mut positive = true;
        let mut max_err = 0.0f64;
        for (n, row) in self.rows.iter().enumerate() {
            let s: f64 = row.iter().map(|(_, w)| w).sum();
            max_err = max_err.max((s - 1.0).abs());
            for &(i, w) in row {
                positive &= w > 0.0;
                forward &= i >= n;
                disjoint &= !used[i];
                used[i] = true;
            }
        }
        WeightCheck {
            max_row_sum_error: max_err,
            forward,
            disjoint,
            positive,
        }
    }

    /// `γ = self · inner`, i.e. `γ_{j,i} = Σ_n self_{j,n} inner_{n,i}`.
    pub fn compose(&self, inner: &WeightMatrix) -> Result<WeightMatrix> {
        if self.inputs != inner.num_rows() {
            return Err(Error::Length {
                expected: inner.num_rows(),
                got: self.inputs,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out: Vec<(usize, f64)> = row
                    .iter()
                    .flat_map(|&(n, b)| inner.row(n).iter().map(move |&(i, a)| (i, b * a)))
                    .collect();
                out.sort_by_key(|&(i, _)| i);
                out.dedup_by(|next, prev| {
                    if next.0 == prev.0 {
                        prev.1 += next.1;
                        true
                    } else {
                        false
                    }
                });
                out
            })
            .collect();
        Ok(WeightMatrix {
            inputs: inner.num_inputs(),
            rows,
        })
    }

    /// `G_n = Σ_i α_{n,i} F_i`.
    pub fn combine(&self, seq: &[Charge]) -> Result<Vec<Charge>> {
        if seq.len() < self.inputs {
            return Err(Error::Length {
                expected: self.inputs,
                got: seq.len(),
            });
        }
        self.rows
            .iter()
            .map(|row| {
                let (first, _) = row[0];
                let mut acc = vec![0.0; seq[first].num_atoms()];
                for &(i, w) in row {
                    for (a, v) in acc.iter_mut().zip(seq[i].atoms()) {
                        *a += w * v;
                    }
                }
                Charge::new(seq[first].algebra(), acc)
            })
            .collect()
    }
}

/// The charges `ξ_k`, `k = 0..=K`, with `ξ_k ≤ 2^k l`.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationLadder {
    #[serde(serialize_with = "ser_charge")]
    pub reference: Charge,
    #[serde(serialize_with = "ser_charges")]
    pub levels: Vec<Charge>,
    /// `max_{k ≤ n ≤ K} ‖ξ_n ∧ 2^k l − ξ_k‖`.
    pub restr_residual: f64,
    /// Per level, `max ‖G_n ∧ 2^k l − ξ_k‖` over the certified tail.
    pub weak_residuals: Vec<f64>,
}

impl TruncationLadder {
    pub fn cap(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.levels.windows(2).all(|w| {
            w[0].atoms()
                .iter()
                .zip(w[1].atoms())
                .all(|(a, b)| *a <= *b + tol)
        })
    }

    pub fn is_dominated(&self, tol: f64) -> bool {
        self.levels.iter().enumerate().all(|(k, xi)| {
            let c = pow2(k as i32);
            xi.atoms()
                .iter()
                .zip(self.reference.atoms())
                .all(|(x, l)| *x <= c * l + tol)
        })
    }

    /// CSV rows `k, xi_k_norm, weak_residual`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,xi_k_norm,weak_residual\n");
        for (k, (xi, r)) in self.levels.iter().zip(&self.weak_residuals).enumerate() {
            let _ = writeln!(s, "{k},{},{}", num(xi.variation_norm()), num(*r));
        }
        s
    }
}

/// One row of per-`n` certificates. `n` is 1-based, and `A_n` compares
/// `G_n` with `2^n l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateRow {
    pub n: usize,
    /// `‖G_n|A_n − ξ‖`.
    pub norm_residual: f64,
    /// `l(A_n^c)`.
    pub lambda_anc: f64,
    /// `Σ_{j ≥ n} l(A_j^c)` over the run.
    pub partial_sum: f64,
    /// `2^{-n}(1 + sup_i ‖F_i‖)`.
    pub bound: f64,
    /// `G_n(A_n) + 2^n l(A_n^c) − ‖G_n ∧ 2^n l‖`; zero up to rounding.
    pub min_cover_gap: f64,
    /// Distance from the block combination to the limit candidate on the
    /// support of `l`.
    pub projection_residual: f64,
}

/// `‖ξ‖ ≥ sup_k limsup_n ‖F_n ∧ 2^k l‖ − δ`, with the limsup taken over the
/// window `[window_start, window_end)` of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound {
    pub window_start: usize,
    pub window_end: usize,
    /// Window limsup per level `k`.
    pub limsup: Vec<f64>,
    pub target: f64,
    pub xi_norm: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub horizon_used: usize,
    /// Inputs kept by the norm subsequence.
    pub selected: usize,
    /// First row (0-based) of the certified tail.
    pub certified_from: usize,
    /// `‖ξ_K − ξ_{K−1}‖`.
    pub stall_gap: f64,
    pub sup_norm: f64,
    /// The inputs carry mass, but none of it on the support of `l`.
    pub degenerate: bool,
    pub weight_check: WeightCheck,
}

/// A certificate that did not meet its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub value: f64,
    pub limit: f64,
}

/// The limits and weights of the two stages of a signed extraction.
#[derive(Debug, Clone)]
pub struct SignedStages {
    /// Extraction on the positive parts (weights `α`, sets `B_n`, limit `χ`).
    pub positive: ExtractionResult,
    /// Extraction on the averaged negative parts (weights `β`, sets `C_j`,
    /// limit `ζ`).
    pub negative: ExtractionResult,
}

#[derive(Debug, Clone)]
pub struct ExtractionResult {
    pub xi: Charge,
    pub weights: WeightMatrix,
    /// `G_n`, one per weight row.
    pub combinations: Vec<Charge>,
    pub restriction_sets: Vec<EventSet>,
    pub certificates: Vec<CertificateRow>,
    pub lower_bound: LowerBound,
    pub ladders: Vec<TruncationLadder>,
    pub diagnostics: Diagnostics,
    pub failures: Vec<Failure>,
    pub stages: Option<Box<SignedStages>>,
}

impl ExtractionResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// `G_n|A_n`.
    pub fn restricted(&self, n: usize) -> Charge {
        self.combinations[n]
            .restrict(&self.restriction_sets[n])
            .expect("same algebra")
    }

    pub fn certified_tail(&self) -> &[CertificateRow] {
        &self.certificates[self.diagnostics.certified_from..]
    }

    pub fn to_json(&self) -> Value {
        let c = &self.certificates;
        let col = |f: fn(&CertificateRow) -> f64| c.iter().map(f).collect::<Vec<_>>();
        let mut v = json!({
            "xi": self.xi.to_doc(),
            "weights": self.weights.triplets(),
            "restriction_sets": self.restriction_sets.iter().map(mask_string).collect::<Vec<_>>(),
            "certificates": {
                "n": c.iter().map(|r| r.n).collect::<Vec<_>>(),
                "norm_residual": col(|r| r.norm_residual),
                "lambda_Anc": col(|r| r.lambda_anc),
                "partial_sum": col(|r| r.partial_sum),
                "bound": col(|r| r.bound),
                "min_cover_gap": col(|r| r.min_cover_gap),
                "projection_residual": col(|r| r.projection_residual),
            },
            "lower_bound": self.lower_bound,
            "ladders": self.ladders,
            "diagnostics": self.diagnostics,
            "failures": self.failures,
            "passed": self.passed(),
        });
        if let Some(st) = &self.stages {
            v["stages"] = json!({
                "chi": st.positive.xi.atoms(),
                "zeta": st.negative.xi.atoms(),
                "alpha": st.positive.weights.triplets(),
                "beta": st.negative.weights.triplets(),
            });
        }
        v
    }

    /// CSV rows `n, norm_residual, lambda_Anc, partial_sum, bound`.
    pub fn certificates_csv(&self) -> String {
        certificates_csv(&self.certificates)
    }
}

pub(crate) fn certificates_csv(rows: &[CertificateRow]) -> String {
    let mut s = String::from("n,norm_residual,lambda_Anc,partial_sum,bound\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.n,
            num(r.norm_residual),
            num(r.lambda_anc),
            num(r.partial_sum),
            num(r.bound)
        );
    }
    s
}

/// Fixed-format float for CSV output.
pub(crate) fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.12e}")
    }
}

pub(crate) fn mask_string(e: &EventSet) -> String {
    e.mask().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub(crate) fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

fn ser_charge<S: serde::Serializer>(c: &Charge, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.atoms().serialize(s)
}

fn ser_charges<S: serde::Serializer>(
    c: &[Charge],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    c.iter().map(Charge::atoms).collect::<Vec<_>>().serialize(s)
}

/// Common checks on the input sequence; returns the shared algebra.
pub(crate) fn check_sequence(seq: &[Charge], l: &Charge) -> Result<Arc<SetAlgebra>> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let alg = l.algebra();
    for f in seq {
        crate::set_algebra::same_algebra(alg, f.algebra())?;
    }
    Ok(Arc::clone(alg))
}
