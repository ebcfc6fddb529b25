//! Charges valued in `X = L^1(W, P)` for a finite sample space `W`.
//!
//! A [`VectorCharge`] is a table of per-(atom, sample) values. The norm of
//! `ba_0(A, X)` is the supremum over partitions of `‖Σ_{A∈π} |F(A)|‖_X`,
//! which the finest partition attains, giving
//! `Σ_w P(w) Σ_a |F(a, w)|`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charge::{Charge, ProbabilityCharge, Tolerances};
use crate::error::{Error, Result};
use crate::komlos::{ExtractionConfig, Failure, FlatProblem, WeightMatrix};
use crate::set_algebra::{
    enumerate_partitions, same_algebra, EventSet, Partition, SetAlgebra, DEFAULT_ENUMERATION_CAP,
};

/// A finite probability space `(W, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpace {
    probs: Vec<f64>,
}

impl SampleSpace {
    pub fn new(probs: Vec<f64>, tol: &Tolerances) -> Result<Arc<Self>> {
        if probs.is_empty() {
            return Err(Error::NotProbability("empty sample space".into()));
        }
        if let Some(w) = probs.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::NotProbability(format!(
                "sample {w} has probability {}",
                probs[w]
            )));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > tol.mass.max(1e-15 * probs.len() as f64) {
            return Err(Error::NotProbability(format!("sample probabilities sum to {mass}")));
        }
        Ok(Arc::new(Self { probs }))
    }

    pub fn uniform(size: usize) -> Result<Arc<Self>> {
        Self::new(vec![1.0 / size.max(1) as f64; size], &Tolerances::default())
    }

    pub fn size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `P(S)` for a mask over samples.
    pub fn prob(&self, mask: &[bool]) -> f64 {
        self.probs
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(p, _)| p)
            .sum()
    }
}

/// An element of `L^1(W, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LOneVector {
    space: Arc<SampleSpace>,
    values: Vec<f64>,
}

impl LOneVector {
    pub fn new(space: &Arc<SampleSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::Length {
                expected: space.size(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("L1 vector has a non-finite value".into()));
        }
        Ok(Self {
            space: Arc::clone(space),
            values,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Σ_w P(w) |x(w)|`.
    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.space.probs())
            .map(|(v, p)| p * v.abs())
            .sum()
    }
}

/// An additive `X`-valued set function, stored as `table[atom][sample]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCharge {
    algebra: Arc<SetAlgebra>,
    space: Arc<SampleSpace>,
    table: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorChargeDoc {
    atoms: usize,
    samples: usize,
    #[serde(rename = "P")]
    probs: Vec<f64>,
    table: Vec<Vec<f64>>,
}

impl VectorCharge {
    pub fn new(
        algebra: &Arc<SetAlgebra>,
        space: &Arc<SampleSpace>,
        table: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if table.len() != algebra.num_atoms() {
            return Err(Error::Length {
                expected: algebra.num_atoms(),
                got: table.len(),
            });
        }
        for row in &table {
            if row.len() != space.size() {
                return Err(Error::Length {
                    expected: space.size(),
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config("vector charge has a non-finite entry".into()));
            }
        }
        Ok(Self {
            algebra: Arc::clone(algebra),
            space: Arc::clone(space),
            table,
        })
    }

    pub fn zero(algebra: &Arc<SetAlgebra>, space: &Arc<SampleSpace>) -> Self {
        Self {
            algebra: Arc::clone(algebra),
            space: Arc::clone(space),
            table: vec![vec![0.0; space.size()]; algebra.num_atoms()],
        }
    }

    /// The same scalar charge at every sample point.
    pub fn embed(charge: &Charge, space: &Arc<SampleSpace>) -> Self {
        Self {
            algebra: Arc::clone(charge.algebra()),
            space: Arc::clone(space),
            table: charge
                .atoms()
                .iter()
                .map(|&v| vec![v; space.size()])
                .collect(),
        }
    }

    /// One scalar charge per sample point.
    pub fn from_slices(slices: &[Charge], space: &Arc<SampleSpace>) -> Result<Self> {
        if slices.len() != space.size() {
            return Err(Error::Length {
                expected: space.size(),
                got: slices.len(),
            });
        }
        let algebra = Arc::clone(slices[0].algebra());
        for s in slices {
            same_algebra(&algebra, s.algebra())?;
        }
        let table = (0..algebra.num_atoms())
            .map(|a| slices.iter().map(|s| s.atoms()[a]).collect())
            .collect();
        Self::new(&algebra, space, table)
    }

    pub fn algebra(&self) -> &Arc<SetAlgebra> {
        &self.algebra
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    /// The scalar charge `F(·)(w)`.
    pub fn slice(&self, w: usize) -> Charge {
        Charge::new(&self.algebra, self.table.iter().map(|r| r[w]).collect())
            .expect("length matches")
    }

    /// `F(A)` as an element of `X`.
    pub fn value(&self, event: &EventSet) -> Result<LOneVector> {
        same_algebra(&self.algebra, event.algebra())?;
        let mut v = vec![0.0; self.space.size()];
        for a in event.atoms() {
            for (x, t) in v.iter_mut().zip(&self.table[a]) {
                *x += t;
            }
        }
        LOneVector::new(&self.space, v)
    }

    /// `Σ_w P(w) Σ_a |F(a, w)|`.
    pub fn ba0_norm(&self) -> f64 {
        self.table
            .iter()
            .map(|row| {
                row.iter()
                    .zip(self.space.probs())
                    .map(|(v, p)| p * v.abs())
                    .sum::<f64>()
            })
            .sum()
    }

    /// `‖Σ_{A∈π} |F(A)|‖_X` maximized over every partition (brute force).
    pub fn ba0_norm_brute_force(&self, cap: usize) -> Result<f64> {
        let parts = enumerate_partitions(&self.algebra, cap)?;
        let mut best = 0.0f64;
        for p in &parts {
            let mut acc = vec![0.0; self.space.size()];
            for b in p.blocks() {
                let v = self.value(b)?;
                for (x, y) in acc.iter_mut().zip(v.values()) {
                    *x += y.abs();
                }
            }
            best = best.max(LOneVector::new(&self.space, acc)?.norm());
        }
        Ok(best)
    }

    /// Tablewise absolute value, the lattice `|F|`.
    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            space: Arc::clone(&self.space),
            table: self
                .table
                .iter()
                .map(|r| r.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        same_algebra(&self.algebra, &other.algebra)?;
        if self.space != other.space {
            return Err(Error::Config("vector charges on different sample spaces".into()));
        }
        Ok(())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Self::new(&self.algebra, &self.space, table)
    }

    /// Tablewise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.check_same(other).is_ok()
            && self
                .table
                .iter()
                .zip(&other.table)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x <= y))
    }

    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.table.iter().flatten().all(|&v| v >= -tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&VectorChargeDoc {
            atoms: self.algebra.num_atoms(),
            samples: self.space.size(),
            probs: self.space.probs().to_vec(),
            table: self.table.clone(),
        })
        .expect("vector charge serializes")
    }

    /// Parses `{"atoms", "samples", "P", "table"}`. The algebra is the power
    /// set of the atoms unless `algebra` is given.
    pub fn from_json(json: &str, algebra: Option<&Arc<SetAlgebra>>) -> Result<Self> {
        let doc: VectorChargeDoc = serde_json::from_str(json)?;
        let algebra = match algebra {
            Some(a) => Arc::clone(a),
            None => SetAlgebra::power_set(doc.atoms)?,
        };
        if algebra.num_atoms() != doc.atoms {
            return Err(Error::Length {
                expected: algebra.num_atoms(),
                got: doc.atoms,
            });
        }
        let space = SampleSpace::new(doc.probs, &Tolerances::default())?;
        if space.size() != doc.samples {
            return Err(Error::Length {
                expected: doc.samples,
                got: space.size(),
            });
        }
        Self::new(&algebra, &space, doc.table)
    }
}

/// `F_π(A) = Σ_{E∈π} |F(A ∩ E)|`, additive on the algebra generated by `π`.
#[derive(Debug, Clone)]
pub struct FPi {
    source: VectorCharge,
    partition: Partition,
    /// `F_π` as a vector charge on the algebra whose atoms are the blocks.
    pub charge: VectorCharge,
}

impl FPi {
    /// `F_π(A)` for any event of the original algebra (subadditive there).
    pub fn evaluate(&self, event: &EventSet) -> Result<LOneVector> {
        let mut acc = vec![0.0; self.source.space.size()];
        for b in self.partition.blocks() {
            let v = self.source.value(&event.intersect(b)?)?;
            for (x, y) in acc.iter_mut().zip(v.values()) {
                *x += y.abs();
            }
        }
        LOneVector::new(&self.source.space, acc)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }
}

pub fn f_pi(f: &VectorCharge, pi: &Partition) -> Result<FPi> {
    same_algebra(&f.algebra, pi.algebra())?;
    let blocks: Vec<Vec<usize>> = pi.blocks().iter().map(EventSet::points).collect();
    let coarse = SetAlgebra::new(f.algebra.ground_size(), blocks)?;
    let table = pi
        .blocks()
        .iter()
        .map(|b| Ok(f.value(b)?.values().iter().map(|v| v.abs()).collect()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(FPi {
        source: f.clone(),
        partition: pi.clone(),
        charge: VectorCharge::new(&coarse, &f.space, table)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorPropertyPReport {
    pub holds: bool,
    /// `‖sup − seq_n‖_{ba0}` per index.
    pub gaps: Vec<f64>,
    pub norm_bound: f64,
}

/// Property (P) on an increasing, norm-bounded sequence: the tablewise
/// supremum must be reached in `ba_0` norm from index `horizon` on.
pub fn check_vector_property_p(
    seq: &[VectorCharge],
    horizon: usize,
    tol: f64,
) -> Result<VectorPropertyPReport> {
    let first = seq.first().ok_or(Error::EmptySequence)?;
    for (i, w) in seq.windows(2).enumerate() {
        w[0].check_same(&w[1])?;
        if let Some(atom) = w[0]
            .table
            .iter()
            .zip(&w[1].table)
            .position(|(a, b)| a.iter().zip(b).any(|(x, y)| x > y))
        {
            return Err(Error::NotMonotone { index: i + 1, atom });
        }
    }
    let mut sup = first.clone();
    for f in &seq[1..] {
        for (r, s) in sup.table.iter_mut().zip(&f.table) {
            for (x, y) in r.iter_mut().zip(s) {
                *x = x.max(*y);
            }
        }
    }
    let gaps = seq
        .iter()
        .map(|f| Ok(sup.try_sub(f)?.ba0_norm()))
        .collect::<Result<Vec<f64>>>()?;
    let norm_bound = seq.iter().map(VectorCharge::ba0_norm).fold(0.0, f64::max);
    let at = horizon.min(seq.len() - 1);
    Ok(VectorPropertyPReport {
        holds: gaps[at..].iter().all(|&g| g <= tol) && norm_bound.is_finite(),
        gaps,
        norm_bound,
    })
}

/// Settings of the boundedness-in-probability check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RBoundConfig {
    /// Largest admissible quantile of the ratio envelope.
    pub ratio_bound: f64,
    /// Quantile level under `P`.
    pub quantile: f64,
    /// Require the bound `P`-almost surely instead of at the quantile.
    pub strict: bool,
    /// Above this many atoms the partition sweep is skipped.
    pub enumeration_cap: usize,
}

impl Default for RBoundConfig {
    fn default() -> Self {
        Self {
            ratio_bound: 2f64.powi(20),
            quantile: 1.0 - 1e-6,
            strict: false,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMethod {
    /// Every partition enumerated.
    PartitionSweep,
    /// Atoms only; exact because a ratio of sums never exceeds the largest
    /// ratio of its terms.
    FinestPartition,
}

/// Where the ratio envelope is largest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioWitness {
    pub index: usize,
    pub atom: usize,
    pub sample: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RBoundReport {
    pub bounded: bool,
    pub method: RatioMethod,
    /// `r_n(w) = sup_π max_{A∈π} F_n(A)(w) / l(A)`, per index and sample.
    pub generators: Vec<Vec<f64>>,
    /// `max_n r_n(w)`; dominates every convex combination of generators.
    pub envelope: Vec<f64>,
    /// The `quantile`-quantile of the envelope under `P` (the essential
    /// supremum in strict mode).
    pub level: f64,
    pub witness: Option<RatioWitness>,
    /// `(index, atom)` pairs with mass on an `l`-null atom; excluded from
    /// the ratios.
    pub null_charged: Vec<(usize, usize)>,
    /// At sweep scale, whether the atom-only ratios agree with the sweep.
    pub sweep_agrees: Option<bool>,
}

fn finest_ratios(f: &VectorCharge, l: &[f64], tol: f64) -> (Vec<f64>, Vec<usize>, Vec<usize>) {
    let m = f.space.size();
    let mut best = vec![0.0f64; m];
    let mut arg = vec![0usize; m];
    let mut null = Vec::new();
    for (a, row) in f.table.iter().enumerate() {
        if l[a] <= tol {
            if row.iter().any(|&v| v > tol) {
                null.push(a);
            }
            continue;
        }
        for w in 0..m {
            let r = row[w] / l[a];
            if r > best[w] {
                best[w] = r;
                arg[w] = a;
            }
        }
    }
    (best, arg, null)
}

fn swept_ratios(f: &VectorCharge, l: &Charge, tol: f64, cap: usize) -> Result<Vec<f64>> {
    let m = f.space.size();
    let mut best = vec![0.0f64; m];
    let null = l.support(tol).complement();
    for p in enumerate_partitions(&f.algebra, cap)? {
        for b in p.blocks() {
            let b = b.intersect(&null.complement())?;
            let lb = l.value(&b)?;
            if lb <= tol {
                continue;
            }
            let v = f.value(&b)?;
            for (x, y) in best.iter_mut().zip(v.values()) {
                *x = x.max(y / lb);
            }
        }
    }
    Ok(best)
}

/// Checks that the convex hull of the ratio generators is bounded in
/// probability under `P` (or `P`-a.s. in strict mode).
///
/// Each convex combination of generators is dominated pointwise by their
/// envelope, so bounding the envelope's quantile bounds the whole hull.
pub fn check_r_bounded(
    seq: &[VectorCharge],
    l: &ProbabilityCharge,
    cfg: &RBoundConfig,
    tol: &Tolerances,
) -> Result<RBoundReport> {
    let first = seq.first().ok_or(Error::EmptySequence)?;
    let space = Arc::clone(&first.space);
    for f in seq {
        same_algebra(f.algebra(), l.algebra())?;
        first.check_same(f)?;
    }
    let sweep = l.num_atoms() <= cfg.enumeration_cap;
    let mut generators = Vec::with_capacity(seq.len());
    let mut args = Vec::with_capacity(seq.len());
    let mut null_charged = Vec::new();
    let mut agrees = true;
    for (n, f) in seq.iter().enumerate() {
        let (r, arg, null) = finest_ratios(f, l.atoms(), tol.zero);
        if sweep {
            let s = swept_ratios(f, l, tol.zero, cfg.enumeration_cap)?;
            agrees &= s
                .iter()
                .zip(&r)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        null_charged.extend(null.into_iter().map(|a| (n, a)));
        generators.push(r);
        args.push(arg);
    }
    let m = space.size();
    let mut envelope = vec![0.0f64; m];
    let mut env_arg = vec![0usize; m];
    for (n, g) in generators.iter().enumerate() {
        for w in 0..m {
            if g[w] > envelope[w] {
                envelope[w] = g[w];
                env_arg[w] = n;
            }
        }
    }

    let mut order: Vec<usize> = (0..m).filter(|&w| space.probs()[w] > 0.0).collect();
    order.sort_by(|&a, &b| envelope[a].total_cmp(&envelope[b]));
    let level = if cfg.strict {
        order.last().map_or(0.0, |&w| envelope[w])
    } else {
        let mut acc = 0.0;
        let mut level = 0.0;
        for &w in &order {
            acc += space.probs()[w];
            level = envelope[w];
            if acc >= cfg.quantile - 1e-15 {
                break;
            }
        }
        level
    };
    let witness = order.last().map(|&w| {
        let n = env_arg[w];
        RatioWitness {
            index: n,
            atom: args[n][w],
            sample: w,
            ratio: envelope[w],
        }
    });
    Ok(RBoundReport {
        bounded: level <= cfg.ratio_bound,
        method: if sweep {
            RatioMethod::PartitionSweep
        } else {
            RatioMethod::FinestPartition
        },
        generators,
        envelope,
        level,
        witness,
        null_charged,
        sweep_agrees: sweep.then_some(agrees),
    })
}

/// Per-row certificates of a vector extraction (1-based `n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorCertificateRow {
    pub n: usize,
    /// `P(B_n)` with `B_n = {w : max_a G_n(a, w) / l(a) ≤ 2^n}`.
    pub prob_b: f64,
    /// `Σ_{j ≥ n} P(B_j^c)`.
    pub partial_sum: f64,
    /// `‖G_n ∧ 2^n l − ξ‖_{ba0}`.
    pub norm_residual: f64,
}

#[derive(Debug, Clone)]
pub struct VectorExtraction {
    pub xi: VectorCharge,
    pub weights: WeightMatrix,
    pub combinations: Vec<VectorCharge>,
    /// `B_n` as masks over samples.
    pub b_sets: Vec<Vec<bool>>,
    pub certificates: Vec<VectorCertificateRow>,
    /// `H = ⋂_{n ≥ N} B_n` over the certified tail.
    pub h_set: Vec<bool>,
    pub prob_h: f64,
    /// `|G_n − ξ|(Ω)(w)` at the last row, per sample.
    pub sample_residuals: Vec<f64>,
    pub bound_report: RBoundReport,
    pub failures: Vec<Failure>,
}

impl VectorExtraction {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Extraction run jointly over the (atom × sample) table, so a single
/// weight sequence serves every sample point.
pub fn extract_vector(
    seq: &[VectorCharge],
    l: &ProbabilityCharge,
    space: &Arc<SampleSpace>,
    cfg: &ExtractionConfig,
    bound: &RBoundConfig,
) -> Result<VectorExtraction> {
    cfg.validate()?;
    let first = seq.first().ok_or(Error::EmptySequence)?;
    if first.space != *space {
        return Err(Error::Config("sequence uses a different sample space".into()));
    }
    let h = cfg.horizon.min(seq.len());
    let seq = &seq[..h];
    for f in seq {
        if !f.is_nonnegative(cfg.tol.zero) {
            return Err(Error::Config("vector charges must be non-negative".into()));
        }
    }
    let report = check_r_bounded(seq, l, bound, &cfg.tol)?;
    if !report.bounded {
        let w = report.witness.expect("unbounded implies a witness");
        return Err(Error::NotBounded(format!(
            "ratio {} at index {}, atom {}, sample {} exceeds {}",
            w.ratio, w.index, w.atom, w.sample, bound.ratio_bound
        )));
    }

    let d = l.num_atoms();
    let m = space.size();
    let flat: Vec<Vec<f64>> = seq
        .iter()
        .map(|f| f.table.iter().flatten().map(|v| v.max(0.0)).collect())
        .collect();
    let reference: Vec<f64> = l.atoms().iter().flat_map(|&x| vec![x; m]).collect();
    let weights: Vec<f64> = (0..d).flat_map(|_| space.probs().iter().copied()).collect();
    let problem = FlatProblem {
        seq: &flat,
        reference: &reference,
        weights: &weights,
    };
    let run = problem.run(cfg);
    let alg = l.algebra();
    let unflatten = |v: &[f64]| -> Result<VectorCharge> {
        VectorCharge::new(alg, space, v.chunks(m).map(<[f64]>::to_vec).collect())
    };
    let xi = unflatten(&run.xi)?;
    let combinations = run
        .blocks
        .iter()
        .map(|b| unflatten(&b.combo))
        .collect::<Result<Vec<_>>>()?;
    let weight_matrix = WeightMatrix::new(
        h,
        run.blocks.iter().map(|b| b.weights.clone()).collect(),
    )?;

    let mut b_sets = Vec::with_capacity(combinations.len());
    let mut rows = Vec::with_capacity(combinations.len());
    for (n, (g, block)) in combinations.iter().zip(&run.blocks).enumerate() {
        let e = n as u32 + 1;
        let c = 2f64.powi(e as i32);
        let mask: Vec<bool> = (0..m)
            .map(|w| (0..d).all(|a| g.table[a][w] <= c * l.atoms()[a]))
            .collect();
        rows.push(VectorCertificateRow {
            n: n + 1,
            prob_b: space.prob(&mask),
            partial_sum: 0.0,
            norm_residual: problem.dist(&problem.truncated(&block.combo, e), &run.xi),
        });
        b_sets.push(mask);
    }
    let mut acc = 0.0;
    for r in rows.iter_mut().rev() {
        acc += 1.0 - r.prob_b;
        r.partial_sum = acc;
    }

    let certified_from = rows.len() / 2;
    let mut h_set = vec![true; m];
    for b in &b_sets[certified_from..] {
        for (x, &y) in h_set.iter_mut().zip(b) {
            *x &= y;
        }
    }
    let prob_h = space.prob(&h_set);
    let sample_residuals: Vec<f64> = match combinations.last() {
        Some(g) => (0..m)
            .map(|w| (0..d).map(|a| (g.table[a][w] - xi.table[a][w]).abs()).sum())
            .collect(),
        None => vec![0.0; m],
    };

    let tol = cfg.tol;
    let mut failures = Vec::new();
    if let Some(last) = rows.last() {
        if !(last.prob_b >= 1.0 - tol.conv) {
            failures.push(Failure {
                check: "prob_b_last".into(),
                value: last.prob_b,
                limit: 1.0 - tol.conv,
            });
        }
        if !(last.norm_residual <= tol.conv) {
            failures.push(Failure {
                check: "final_residual".into(),
                value: last.norm_residual,
                limit: tol.conv,
            });
        }
    }
    if !(prob_h >= 1.0 - tol.conv) {
        failures.push(Failure {
            check: "prob_h".into(),
            value: prob_h,
            limit: 1.0 - tol.conv,
        });
    }
    let worst_on_h = (0..m)
        .filter(|&w| h_set[w] && space.probs()[w] > 0.0)
        .map(|w| sample_residuals[w])
        .fold(0.0, f64::max);
    if !(worst_on_h <= tol.conv) {
        failures.push(Failure {
            check: "sample_residual_on_h".into(),
            value: worst_on_h,
            limit: tol.conv,
        });
    }
    if !(run.stall_gap < tol.conv) {
        failures.push(Failure {
            check: "stall".into(),
            value: run.stall_gap,
            limit: tol.conv,
        });
    }
    let wc = weight_matrix.check();
    if !wc.holds() {
        failures.push(Failure {
            check: "weights".into(),
            value: wc.max_row_sum_error,
            limit: 1e-12,
        });
    }

    Ok(VectorExtraction {
        xi,
        weights: weight_matrix,
        combinations,
        b_sets,
        certificates: rows,
        h_set,
        prob_h,
        sample_residuals,
        bound_report: report,
        failures,
    })
}
