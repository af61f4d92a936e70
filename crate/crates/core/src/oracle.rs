//! Numerical completeness check. Solves the polynomial system that the
//! equation induces on a small finite table by multistart damped least
//! squares, then feeds every root found to the classifier. The result is
//! sampling evidence, not a proof.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::{Scalar, Table};
use crate::semigroup::SemigroupDomain;
use crate::solutions::{
    kannappan_witness, ClassificationReport, Classifier, ClassifyError, FamilySpec, SolutionError, SolutionPair,
};
use crate::tol::Tolerance;

/// Largest table the oracle accepts by default.
pub const DEFAULT_MAX_ORDER: usize = 4;
/// Converged points closer than this (max modulus over all unknowns) merge.
pub const DEDUP_DISTANCE: f64 = 1e-6;
const MAX_ITERATIONS: usize = 100;
const DAMPING_FACTOR: f64 = 10.0;
const START_RADIUS: f64 = 3.0;
/// Refinement continues past the convergence gate until the compensated
/// residual reaches this or stops improving. Multiple roots only pin the
/// point to roughly the square root of the residual, so polishing below
/// f64 round-off is what makes those points classifiable.
const POLISH_TARGET: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("the numeric oracle needs a finite Cayley table")]
    NotFinite,
    #[error("order {order} exceeds the oracle limit {max}")]
    TooLarge { order: usize, max: usize },
    #[error("input {index} is not a solution: residual {residual:.3e} at ({x}, {y})")]
    NotASolution { index: usize, residual: f64, x: usize, y: usize },
    #[error(transparent)]
    Solution(#[from] SolutionError),
}

/// One quadratic residual `g(xyz₀) − g(x)g(y) + f(x)f(y)` per defined pair.
/// Unknowns are laid out as `f` followed by `g`.
#[derive(Debug, Clone)]
pub struct ResidualSystem {
    n: usize,
    equations: Vec<(usize, usize, usize)>,
}

impl ResidualSystem {
    pub fn new(domain: &SemigroupDomain) -> Self {
        let equations = domain
            .defined_pairs()
            .filter_map(|(x, y, _)| domain.compose_z0(x, y).map(|w| (x, y, w)))
            .collect();
        ResidualSystem { n: domain.len(), equations }
    }

    pub fn unknowns(&self) -> usize {
        2 * self.n
    }

    pub fn equations(&self) -> &[(usize, usize, usize)] {
        &self.equations
    }

    pub fn equation_count(&self) -> usize {
        self.equations.len()
    }

    pub fn residuals(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.residuals_split(z, None)
    }

    /// Residuals at the point `hi + lo`, using error-free products and
    /// compensated sums so that they stay accurate far below the size of
    /// the unknowns.
    fn residuals_split(&self, hi: &[Complex64], lo: Option<&[Complex64]>) -> Vec<Complex64> {
        let n = self.n;
        let at = |k: usize| (hi[k], lo.map_or(Complex64::new(0.0, 0.0), |l| l[k]));
        self.equations
            .iter()
            .map(|&(x, y, w)| {
                let (gw, gx, gy) = (at(n + w), at(n + x), at(n + y));
                let (fx, fy) = (at(x), at(y));
                let mut re = Compensated::default();
                let mut im = Compensated::default();
                re.add(gw.0.re);
                re.add(gw.1.re);
                im.add(gw.0.im);
                im.add(gw.1.im);
                for (sign, a, b) in [(-1.0, gx, gy), (1.0, fx, fy)] {
                    re.add_split_product(sign, (a.0.re, a.1.re), (b.0.re, b.1.re));
                    re.add_split_product(-sign, (a.0.im, a.1.im), (b.0.im, b.1.im));
                    im.add_split_product(sign, (a.0.re, a.1.re), (b.0.im, b.1.im));
                    im.add_split_product(sign, (a.0.im, a.1.im), (b.0.re, b.1.re));
                }
                Complex64::new(re.value(), im.value())
            })
            .collect()
    }

    /// Largest residual modulus; zero for a system without equations.
    pub fn residual_norm(&self, z: &[Complex64]) -> f64 {
        self.residuals(z).iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub fn evaluate_pair(&self, pair: &SolutionPair) -> f64 {
        self.residual_norm(&pack(pair))
    }

    /// The residuals are holomorphic, so the complex Jacobian carries the
    /// same information as the stacked real one.
    pub fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.n;
        let (f, g) = z.split_at(n);
        let mut j = DMatrix::zeros(self.equations.len(), 2 * n);
        for (row, &(x, y, w)) in self.equations.iter().enumerate() {
            j[(row, x)] += f[y];
            j[(row, y)] += f[x];
            j[(row, n + w)] += Complex64::new(1.0, 0.0);
            j[(row, n + x)] -= g[y];
            j[(row, n + y)] -= g[x];
        }
        j
    }
}

/// Running sum kept as an unevaluated `hi + lo` pair.
#[derive(Default)]
struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let s = self.hi + v;
        let t = s - self.hi;
        self.lo += (self.hi - (s - t)) + (v - t);
        self.hi = s;
    }

    /// Adds `sign·(a.0 + a.1)(b.0 + b.1)`, dropping the `a.1·b.1` term.
    fn add_split_product(&mut self, sign: f64, a: (f64, f64), b: (f64, f64)) {
        let (x, y) = (sign * a.0, b.0);
        let p = x * y;
        self.add(p);
        self.lo += libm::fma(x, y, -p);
        self.lo += sign * (a.0 * b.1 + a.1 * b.0);
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

fn pack(pair: &SolutionPair) -> Vec<Complex64> {
    pair.f.iter().chain(&pair.g).map(Scalar::to_complex).collect()
}

fn unpack(z: &[Complex64]) -> SolutionPair {
    let n = z.len() / 2;
    let table = |s: &[Complex64]| -> Table { s.iter().map(|c| Scalar::float(c.re, c.im)).collect() };
    SolutionPair::new(table(&z[..n]), table(&z[n..]))
}

fn sum_sq(r: &[Complex64]) -> f64 {
    r.iter().map(|c| c.norm_sqr()).sum()
}

/// Result of refining a single starting point.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub point: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Levenberg–Marquardt descent from `start`. Each step solves the damped
/// problem `[J; √λ·I] δ ≈ [−r; 0]` by SVD rather than through `JᴴJ`: near a
/// multiple root the normal equations square an already large condition
/// number and the iteration stalls.
pub fn refine(system: &ResidualSystem, start: &[Complex64]) -> Refinement {
    let (m, k) = (system.equation_count(), system.unknowns());
    // The iterate is kept as an unevaluated sum `hi + lo`: a multiple root is
    // only determined to about the square root of the residual floor, and
    // plain f64 storage puts that floor near 1e−16.
    let mut hi = start.to_vec();
    let mut lo = vec![Complex64::new(0.0, 0.0); k];
    let mut r = system.residuals_split(&hi, Some(&lo));
    let mut cost = sum_sq(&r);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        if r.iter().all(|c| c.norm() < POLISH_TARGET) {
            break;
        }
        iterations += 1;
        let j = system.jacobian(&hi);
        let mut rhs = DVector::zeros(m + k);
        for (slot, v) in rhs.iter_mut().zip(&r) {
            *slot = -v;
        }
        let mut improved = false;
        while lambda < 1e16 {
            let mut aug = DMatrix::zeros(m + k, k);
            aug.view_mut((0, 0), (m, k)).copy_from(&j);
            for d in 0..k {
                aug[(m + d, d)] = Complex64::new(libm::sqrt(lambda), 0.0);
            }
            let Ok(step) = aug.svd(true, true).solve(&rhs, 0.0) else {
                lambda *= DAMPING_FACTOR;
                continue;
            };
            let (trial_hi, trial_lo) = split_add(&hi, &lo, step.as_slice());
            let trial_r = system.residuals_split(&trial_hi, Some(&trial_lo));
            let trial_cost = sum_sq(&trial_r);
            if trial_cost.is_finite() && trial_cost < cost {
                (hi, lo, r, cost) = (trial_hi, trial_lo, trial_r, trial_cost);
                lambda /= DAMPING_FACTOR;
                improved = true;
                break;
            }
            lambda *= DAMPING_FACTOR;
        }
        if !improved {
            break;
        }
    }
    let point: Vec<Complex64> = hi.iter().zip(&lo).map(|(h, l)| h + l).collect();
    let residual = system.residual_norm(&point);
    Refinement { point, residual, iterations }
}

fn split_add(hi: &[Complex64], lo: &[Complex64], step: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let two_sum = |a: f64, b: f64| {
        let s = a + b;
        let t = s - a;
        (s, (a - (s - t)) + (b - t))
    };
    hi.iter()
        .zip(lo)
        .zip(step)
        .map(|((h, l), d)| {
            let (re, re_err) = two_sum(h.re, d.re + l.re);
            let (im, im_err) = two_sum(h.im, d.im + l.im);
            (Complex64::new(re, im), Complex64::new(re_err, im_err))
        })
        .unzip()
}

/// Multistart settings. `starts = None` means `200·n²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub starts: Option<usize>,
    pub seed: u64,
    pub tol: f64,
    pub max_order: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            starts: None,
            seed: 0,
            tol: crate::tol::RESIDUAL,
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

pub fn default_starts(order: usize) -> usize {
    200 * order * order
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonConvergenceWarning {
    pub starts: usize,
    pub converged: usize,
}

impl core::fmt::Display for NonConvergenceWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "only {} of {} starts converged", self.converged, self.starts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTelemetry {
    pub starts: usize,
    pub converged: usize,
    pub distinct: usize,
    pub warning: Option<NonConvergenceWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericSolutions {
    pub pairs: Vec<SolutionPair>,
    pub residuals: Vec<f64>,
    pub telemetry: SolverTelemetry,
}

fn sample_disc(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = START_RADIUS * libm::sqrt(rng.gen::<f64>());
    let theta = 2.0 * core::f64::consts::PI * rng.gen::<f64>();
    Complex64::new(r * libm::cos(theta), r * libm::sin(theta))
}

fn max_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Random multistart solve of the residual system. Deterministic for a given
/// seed; points are kept in the order their starts were drawn.
pub fn solve_numeric(domain: &SemigroupDomain, opts: &SolveOptions) -> Result<NumericSolutions, OracleError> {
    if !domain.is_finite_table() {
        return Err(OracleError::NotFinite);
    }
    if domain.len() > opts.max_order {
        return Err(OracleError::TooLarge { order: domain.len(), max: opts.max_order });
    }
    let system = ResidualSystem::new(domain);
    let starts = opts.starts.unwrap_or_else(|| default_starts(domain.len()));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut kept: Vec<Refinement> = Vec::new();
    let mut converged = 0;
    for _ in 0..starts {
        let start: Vec<Complex64> = (0..system.unknowns()).map(|_| sample_disc(&mut rng)).collect();
        let out = refine(&system, &start);
        if out.residual.is_nan() || out.residual >= opts.tol {
            continue;
        }
        converged += 1;
        if kept.iter().all(|k| max_distance(&k.point, &out.point) >= DEDUP_DISTANCE) {
            kept.push(out);
        }
    }
    let warning = (converged * 10 < starts).then_some(NonConvergenceWarning { starts, converged });
    Ok(NumericSolutions {
        pairs: kept.iter().map(|k| unpack(&k.point)).collect(),
        residuals: kept.iter().map(|k| k.residual).collect(),
        telemetry: SolverTelemetry { starts, converged, distinct: kept.len(), warning },
    })
}

/// How one numeric solution fared under the classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Classified {
        family: String,
        spec: FamilySpec,
        rebuild_error: f64,
        character_indices: Vec<Option<usize>>,
    },
    Unclassified {
        report: ClassificationReport,
        /// Best family fit under a loose tolerance. Roots on non-reduced
        /// solution components are only located to roughly the cube root of
        /// the residual, and show up here rather than as counterexamples.
        near_miss: Option<NearMiss>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearMiss {
    pub family: String,
    pub rebuild_error: f64,
}

/// Fit tolerance for the near-miss diagnostic on unclassified points.
pub const NEAR_MISS_FIT: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub pair: SolutionPair,
    pub residual: f64,
    pub outcome: Outcome,
}

/// Classified solutions grouped by family tag and character assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub family: String,
    pub character_indices: Vec<Option<usize>>,
    pub members: usize,
    pub max_rebuild_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub order: usize,
    pub z0: usize,
    pub solutions: usize,
    pub classified: usize,
    pub unclassified: usize,
    pub clusters: Vec<Cluster>,
    /// Indices of solutions whose `f ↦ −f` image lands outside every cluster.
    pub negation_misses: Vec<usize>,
    pub telemetry: Option<SolverTelemetry>,
    pub verdict: String,
    pub entries: Vec<CoverageEntry>,
}

impl CoverageReport {
    pub fn passed(&self) -> bool {
        self.unclassified == 0
    }
}

type ClusterKey = (&'static str, Vec<Option<usize>>);

fn outcome_for(classifier: &Classifier, pair: &SolutionPair) -> Result<(Outcome, Option<ClusterKey>), OracleError> {
    match classifier.classify(pair) {
        Ok(report) => match report.primary() {
            Some(m) => {
                let key = (m.spec.tag(), m.character_indices.clone());
                let outcome = Outcome::Classified {
                    family: m.spec.tag().into(),
                    spec: m.spec.clone(),
                    rebuild_error: m.rebuild_error,
                    character_indices: m.character_indices.clone(),
                };
                Ok((outcome, Some(key)))
            }
            None => Ok((Outcome::Unclassified { report, near_miss: None }, None)),
        },
        Err(ClassifyError::Unclassified(report)) => Ok((Outcome::Unclassified { report: *report, near_miss: None }, None)),
        Err(ClassifyError::ResidualTooLarge { residual, x, y }) => {
            Err(OracleError::NotASolution { index: usize::MAX, residual, x, y })
        }
        Err(ClassifyError::Solution(e)) => Err(e.into()),
    }
}

/// Classify every solution and aggregate. Inputs whose residual exceeds
/// `tol.residual` are refused before any classification happens.
pub fn coverage_report(
    domain: &SemigroupDomain,
    solutions: &[SolutionPair],
    tol: Tolerance,
) -> Result<CoverageReport, OracleError> {
    let system = ResidualSystem::new(domain);
    let residuals: Vec<f64> = solutions.iter().map(|p| system.evaluate_pair(p)).collect();
    for (index, (pair, &residual)) in solutions.iter().zip(&residuals).enumerate() {
        if residual.is_nan() || residual >= tol.residual {
            let (x, y, _) = kannappan_witness(domain, pair, 0.0).unwrap_or((0, 0, residual));
            return Err(OracleError::NotASolution { index, residual, x, y });
        }
    }

    let classifier = Classifier::new(domain, tol)?;
    let mut entries = Vec::with_capacity(solutions.len());
    let mut clusters: BTreeMap<ClusterKey, Cluster> = BTreeMap::new();
    let mut keys = Vec::with_capacity(solutions.len());
    for (index, (pair, &residual)) in solutions.iter().zip(&residuals).enumerate() {
        let (outcome, key) = outcome_for(&classifier, pair).map_err(|e| with_index(e, index))?;
        if let (Some(key), Outcome::Classified { rebuild_error, .. }) = (&key, &outcome) {
            let c = clusters.entry(key.clone()).or_insert_with(|| Cluster {
                family: key.0.into(),
                character_indices: key.1.clone(),
                members: 0,
                max_rebuild_error: 0.0,
            });
            c.members += 1;
            c.max_rebuild_error = c.max_rebuild_error.max(*rebuild_error);
        }
        keys.push(key);
        entries.push(CoverageEntry { pair: pair.clone(), residual, outcome });
    }

    if keys.iter().any(Option::is_none) {
        let loose = Classifier::new(domain, Tolerance { fit: NEAR_MISS_FIT, ..tol })?;
        for entry in &mut entries {
            if let Outcome::Unclassified { near_miss, .. } = &mut entry.outcome {
                *near_miss = loose.classify(&entry.pair).ok().and_then(|r| {
                    r.primary().map(|m| NearMiss { family: m.spec.tag().into(), rebuild_error: m.rebuild_error })
                });
            }
        }
    }

    let mut negation_misses = Vec::new();
    for (index, (pair, key)) in solutions.iter().zip(&keys).enumerate() {
        if key.is_none() {
            continue;
        }
        let negated = pair.negate_f();
        let (_, nkey) = outcome_for(&classifier, &negated).map_err(|e| with_index(e, index))?;
        if !nkey.is_some_and(|k| clusters.contains_key(&k)) {
            negation_misses.push(index);
        }
    }

    let unclassified = keys.iter().filter(|k| k.is_none()).count();
    let verdict = if unclassified == 0 {
        format!("no counterexample found among {} converged solutions", solutions.len())
    } else {
        format!(
            "{unclassified} of {} converged solutions matched no family; see unclassified entries",
            solutions.len()
        )
    };
    Ok(CoverageReport {
        order: domain.len(),
        z0: domain.z0(),
        solutions: solutions.len(),
        classified: solutions.len() - unclassified,
        unclassified,
        clusters: clusters.into_values().collect(),
        negation_misses,
        telemetry: None,
        verdict,
        entries,
    })
}

fn with_index(e: OracleError, index: usize) -> OracleError {
    match e {
        OracleError::NotASolution { residual, x, y, .. } => OracleError::NotASolution { index, residual, x, y },
        other => other,
    }
}

/// Solve, then classify: the whole completeness check for one domain.
pub fn verify_domain(
    domain: &SemigroupDomain,
    opts: &SolveOptions,
    tol: Tolerance,
) -> Result<CoverageReport, OracleError> {
    let numeric = solve_numeric(domain, opts)?;
    let mut report = coverage_report(domain, &numeric.pairs, tol)?;
    report.telemetry = Some(numeric.telemetry);
    Ok(report)
}
