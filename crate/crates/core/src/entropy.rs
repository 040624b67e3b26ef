//! Measurement statistics, Shannon and collision entropies (base 2), the
//! average-entropy bounds for `L` mutually unbiased bases, and a numerical
//! probe for vectors unbiased to a whole family.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{MubError, Result};
use crate::lattice::CommutingClass;
use crate::par;
use crate::pauli::Prime;
use crate::spread::union_mask;
use crate::states::{build_basis, Basis, StateVector};

/// Tolerance for entropy saturation and bound checks.
pub const ENTROPY_TOL: f64 = 1e-9;
/// Tolerance on state and distribution normalization.
pub const NORM_TOL: f64 = 1e-10;

/// Outcome probabilities of one basis measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDistribution {
    probs: Vec<f64>,
    normalization_error: f64,
}

impl MeasurementDistribution {
    /// Clips entries to `[0, 1]` and checks the sum within [`NORM_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let probs: Vec<f64> = probs.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
        let normalization_error = (probs.iter().sum::<f64>() - 1.0).abs();
        if normalization_error > NORM_TOL {
            return Err(MubError::Precondition(format!("probabilities sum to 1 ± {normalization_error:e}")));
        }
        Ok(MeasurementDistribution { probs, normalization_error })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `|Σ p − 1|`, reported rather than corrected.
    pub fn normalization_error(&self) -> f64 {
        self.normalization_error
    }
}

/// Distribution `|⟨b_j|ψ⟩|²` over the states of `basis`.
pub fn measure(basis: &Basis, state: &StateVector) -> Result<MeasurementDistribution> {
    if state.len() != basis.dim() {
        return Err(MubError::DimensionMismatch(state.len(), basis.dim()));
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(MubError::NotNormalized(norm));
    }
    MeasurementDistribution::new(basis.states().iter().map(|b| b.dotc(state).norm_sqr()).collect())
}

/// Shannon entropy in bits, `0·log 0 = 0`.
pub fn h1(dist: &MeasurementDistribution) -> f64 {
    -dist.probs.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// Collision entropy in bits.
pub fn h2(dist: &MeasurementDistribution) -> f64 {
    -dist.probs.iter().map(|x| x * x).sum::<f64>().log2()
}

/// `(½·log₂ d, −log₂((L + d − 1)/(L·d)))` for `L` bases in `d = p²`.
pub fn eur_bounds(num_bases: usize, p: Prime) -> Result<(f64, f64)> {
    if num_bases < 2 {
        return Err(MubError::Precondition("entropic bounds need at least two bases".into()));
    }
    let d = p.dim() as f64;
    let l = num_bases as f64;
    Ok((0.5 * d.log2(), -((l + d - 1.0) / (l * d)).log2()))
}

/// Per-basis entropies of one state against a family of bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    #[serde(rename = "L")]
    pub num_bases: usize,
    pub p: u32,
    #[serde(rename = "per_basis_H1")]
    pub per_basis_h1: Vec<f64>,
    #[serde(rename = "per_basis_H2")]
    pub per_basis_h2: Vec<f64>,
    #[serde(rename = "avg_H1")]
    pub avg_h1: f64,
    #[serde(rename = "avg_H2")]
    pub avg_h2: f64,
    #[serde(rename = "bound_H1")]
    pub bound_h1: f64,
    #[serde(rename = "bound_H2")]
    pub bound_h2: f64,
    #[serde(rename = "saturated_H1")]
    pub saturated_h1: bool,
    #[serde(rename = "saturated_H2")]
    pub saturated_h2: bool,
    pub tolerance: f64,
}

impl EntropyReport {
    /// Both averages respect their bounds within tolerance.
    pub fn bounds_hold(&self) -> bool {
        self.avg_h1 >= self.bound_h1 - self.tolerance && self.avg_h2 >= self.bound_h2 - self.tolerance
    }

    /// Every individual entropy equals `value` within tolerance.
    pub fn all_entropies_equal(&self, value: f64) -> bool {
        self.per_basis_h1.iter().chain(&self.per_basis_h2).all(|h| (h - value).abs() <= self.tolerance)
    }
}

/// Entropy report for `state` measured in each of `bases`.
pub fn entropy_report(bases: &[Basis], state: &StateVector, tolerance: f64) -> Result<EntropyReport> {
    let p = bases.first().ok_or_else(|| MubError::Precondition("no bases".into()))?.class().prime();
    let (bound_h1, bound_h2) = eur_bounds(bases.len(), p)?;
    let mut per_basis_h1 = Vec::with_capacity(bases.len());
    let mut per_basis_h2 = Vec::with_capacity(bases.len());
    for b in bases {
        let dist = measure(b, state)?;
        per_basis_h1.push(h1(&dist));
        per_basis_h2.push(h2(&dist));
    }
    let l = bases.len() as f64;
    let avg_h1 = per_basis_h1.iter().sum::<f64>() / l;
    let avg_h2 = per_basis_h2.iter().sum::<f64>() / l;
    Ok(EntropyReport {
        num_bases: bases.len(),
        p: p.get(),
        per_basis_h1,
        per_basis_h2,
        avg_h1,
        avg_h2,
        bound_h1,
        bound_h2,
        saturated_h1: (avg_h1 - bound_h1).abs() <= tolerance,
        saturated_h2: (avg_h2 - bound_h2).abs() <= tolerance,
        tolerance,
    })
}

/// Reports for every common eigenstate of `new_class` against the `p + 1`
/// bases of the classes it was formed from.
pub fn theorem3_check(subset_bases: &[Basis], new_class: &CommutingClass) -> Result<Vec<EntropyReport>> {
    let p = new_class.prime();
    if subset_bases.len() != p.as_usize() + 1 {
        return Err(MubError::WrongSubsetSize { expected: p.as_usize() + 1, got: subset_bases.len() });
    }
    let classes: Vec<&CommutingClass> = subset_bases.iter().map(|b| b.class()).collect();
    for (i, a) in classes.iter().enumerate() {
        if a.prime() != p {
            return Err(MubError::PrimeMismatch(p.get(), a.prime().get()));
        }
        if *a == new_class {
            return Err(MubError::Precondition("new class is one of the subset classes".into()));
        }
        if classes[i + 1..].iter().any(|b| !a.mask().is_disjoint(b.mask())) {
            return Err(MubError::NotDisjoint);
        }
    }
    if !new_class.mask().is_subset(&union_mask(p, classes.iter().copied())) {
        return Err(MubError::Precondition("new class is not formed from the subset".into()));
    }
    let eigen = build_basis(new_class)?;
    par::map(eigen.states(), |s| entropy_report(subset_bases, s, ENTROPY_TOL)).into_iter().collect()
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let mut v =
        StateVector::from_fn(dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    v /= Complex64::new(v.norm(), 0.0);
    v
}

/// `count` Haar-random unit vectors; sample `i` depends only on `(seed, i)`.
pub fn haar_states(dim: usize, count: usize, seed: u64) -> Vec<StateVector> {
    par::map_range(count, |i| gaussian_unit_vector(dim, &mut stream_rng(seed, i as u64)))
}

/// Worst slacks of the average-entropy bounds over sampled states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub samples: usize,
    pub seed: u64,
    /// `min(avg H₁ − bound_H1)`.
    pub min_slack_h1: f64,
    /// `min(avg H₂ − bound_H2)`.
    pub min_slack_h2: f64,
    /// `min(½(H₁ + H₁′) − ½·log₂ d)` over basis pairs.
    pub min_slack_pairwise: f64,
    /// `H₂ ≤ H₁` held on every distribution.
    pub renyi_ordered: bool,
    pub tolerance: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.renyi_ordered
            && self.min_slack_h1 >= -self.tolerance
            && self.min_slack_h2 >= -self.tolerance
            && self.min_slack_pairwise >= -self.tolerance
    }
}

/// Checks both average bounds, the pairwise Shannon bound, and `H₂ ≤ H₁` on
/// `samples` seeded Haar-random states.
pub fn sampled_bound_check(bases: &[Basis], samples: usize, seed: u64, tolerance: f64) -> Result<BoundCheck> {
    let first = bases.first().ok_or_else(|| MubError::Precondition("no bases".into()))?;
    let p = first.class().prime();
    let half_log_d = 0.5 * (p.dim() as f64).log2();
    let states = haar_states(first.dim(), samples, seed);
    let per_state = par::map(&states, |s| -> Result<(f64, f64, f64, bool)> {
        let rep = entropy_report(bases, s, tolerance)?;
        let mut pair: f64 = f64::INFINITY;
        for i in 0..bases.len() {
            for j in i + 1..bases.len() {
                pair = pair.min(0.5 * (rep.per_basis_h1[i] + rep.per_basis_h1[j]) - half_log_d);
            }
        }
        let ordered = rep.per_basis_h2.iter().zip(&rep.per_basis_h1).all(|(a, b)| *a <= b + tolerance);
        Ok((rep.avg_h1 - rep.bound_h1, rep.avg_h2 - rep.bound_h2, pair, ordered))
    });
    let mut check = BoundCheck {
        samples,
        seed,
        min_slack_h1: f64::INFINITY,
        min_slack_h2: f64::INFINITY,
        min_slack_pairwise: f64::INFINITY,
        renyi_ordered: true,
        tolerance,
    };
    for r in per_state {
        let (a, b, c, ok) = r?;
        check.min_slack_h1 = check.min_slack_h1.min(a);
        check.min_slack_h2 = check.min_slack_h2.min(b);
        check.min_slack_pairwise = check.min_slack_pairwise.min(c);
        check.renyi_ordered &= ok;
    }
    Ok(check)
}

/// Settings for [`strong_unext_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop a restart once the objective drops below this.
    pub target: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { restarts: 200, seed: 0, max_iters: 5000, target: 1e-24 }
    }
}

/// Best point found by the probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub min_value: f64,
    pub argmin: StateVector,
    pub best_restart: usize,
    /// Final objective of each restart, in restart order.
    pub restart_values: Vec<f64>,
}

/// `F(v) = Σ_{i,j} (|⟨b_i^j|v⟩|² − 1/d)²`.
pub fn unbiasedness_objective(bases: &[Basis], v: &StateVector) -> f64 {
    let inv_d = 1.0 / v.len() as f64;
    bases
        .iter()
        .flat_map(|b| b.states().iter())
        .map(|s| {
            let r = s.dotc(v).norm_sqr() - inv_d;
            r * r
        })
        .sum()
}

/// Euclidean gradient of the objective with respect to `(Re v, Im v)`,
/// packed as a complex vector.
fn objective_gradient(bases: &[Basis], v: &StateVector) -> StateVector {
    let inv_d = 1.0 / v.len() as f64;
    let mut g = StateVector::zeros(v.len());
    for s in bases.iter().flat_map(|b| b.states().iter()) {
        let a = s.dotc(v);
        let r = a.norm_sqr() - inv_d;
        g += s * (a * (4.0 * r));
    }
    g
}

fn descend(bases: &[Basis], mut v: StateVector, cfg: &ProbeConfig) -> (f64, StateVector) {
    let mut f = unbiasedness_objective(bases, &v);
    let mut step = 1.0;
    for _ in 0..cfg.max_iters {
        if f < cfg.target {
            break;
        }
        let mut g = objective_gradient(bases, &v);
        // project onto the tangent space of the sphere
        let radial = v.dotc(&g).re;
        g -= &v * Complex64::new(radial, 0.0);
        let gnorm2 = g.norm_squared();
        if gnorm2 < 1e-30 {
            break;
        }
        let mut accepted = false;
        while step > 1e-20 {
            let mut trial = &v - &g * Complex64::new(step, 0.0);
            trial /= Complex64::new(trial.norm(), 0.0);
            let ft = unbiasedness_objective(bases, &trial);
            // Armijo condition
            if ft <= f - 1e-4 * step * gnorm2 {
                v = trial;
                f = ft;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step *= 2.0;
    }
    (f, v)
}

/// Random-restart projected gradient descent on the unit sphere for
/// [`unbiasedness_objective`]. A value near zero means some vector is
/// (nearly) unbiased to every basis; a positive floor across restarts is
/// numerical evidence that none exists. Evidence only, not a proof.
pub fn strong_unext_probe(bases: &[Basis], cfg: &ProbeConfig) -> Result<ProbeResult> {
    let first = bases.first().ok_or_else(|| MubError::Precondition("probe needs at least one basis".into()))?;
    let d = first.dim();
    if let Some(b) = bases.iter().find(|b| b.dim() != d) {
        return Err(MubError::DimensionMismatch(b.dim(), d));
    }
    if cfg.restarts == 0 {
        return Err(MubError::Precondition("probe needs at least one restart".into()));
    }
    let runs = par::map_range(cfg.restarts, |i| {
        let start = gaussian_unit_vector(d, &mut stream_rng(cfg.seed, i as u64));
        descend(bases, start, cfg)
    });
    let restart_values: Vec<f64> = runs.iter().map(|(f, _)| *f).collect();
    let (best_restart, (min_value, argmin)) = runs
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
        .expect("at least one restart");
    Ok(ProbeResult { min_value, argmin, best_restart, restart_values })
}
