//! The qDRIFT protocol: mixture channel, seeded trajectories, step-count
//! estimators, and dense verification of the error bound.
//!
//! Two counts are kept apart throughout. `steps` (`r`) is the quantity the
//! bounds solve for; `applications` is the number of sampled channel
//! exponentials a simulator actually executes. The original bound applies
//! `r` channels of duration `tΓ/r`; the tightened bound is stated for
//! `E(t/r)^{rΓ}`, i.e. `rΓ` applications of duration `t/r`. Dense
//! verification always runs an integer number `N` of applications of
//! duration `tΓ/N`, which is the tightened bound at `r = N/Γ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{channel_exp, compose_pow, Superoperator};
use crate::error::{domain, Error, Result};
use crate::exact;
use crate::models::GeneratorDecomposition;
use crate::norms::{choi_sandwich, seesaw_lower, term_norm_bound, DiamondNormBounds, NormConvention, SeesawOptions};
use crate::random::stream_rng;

/// Largest Hilbert-space dimension accepted by [`verify_bound`].
pub const VERIFY_MAX_DIM: usize = 16;

/// Executable description of one qDRIFT run: `applications` channel draws of
/// duration `tau`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QDriftPlan {
    pub time: f64,
    pub gamma: f64,
    pub applications: u64,
    pub tau: f64,
    pub probs: Vec<f64>,
}

impl QDriftPlan {
    /// `N` applications of duration `tΓ/N`.
    pub fn new(decomp: &GeneratorDecomposition, time: f64, applications: u64) -> Result<Self> {
        if applications == 0 {
            return Err(domain("a qDRIFT plan needs at least one application"));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(domain(format!("simulation time must be nonnegative, got {time}")));
        }
        let gamma = decomp.gamma();
        Ok(Self { time, gamma, applications, tau: time * gamma / applications as f64, probs: decomp.probabilities() })
    }

    /// The `r` of the tightened bound matching this plan, `N/Γ`; not an integer in general.
    pub fn equivalent_steps(&self) -> f64 {
        self.applications as f64 / self.gamma
    }
}

/// Per-term exponentials `exp(τ L_k)` for one step duration, shared by the
/// mixture channel and by trajectory sampling.
#[derive(Debug, Clone)]
pub struct StepChannels {
    tau: f64,
    probs: Vec<f64>,
    exps: Vec<Superoperator>,
    sampler: WeightedIndex<f64>,
}

impl StepChannels {
    pub fn new(decomp: &GeneratorDecomposition, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(domain(format!("step duration must be nonnegative, got {tau}")));
        }
        let exps = decomp
            .terms()
            .iter()
            .map(|t| channel_exp(&t.superop()?, tau))
            .collect::<Result<Vec<_>>>()?;
        let probs = decomp.probabilities();
        let sampler = WeightedIndex::new(&probs).map_err(|e| domain(format!("bad sampling weights: {e}")))?;
        Ok(Self { tau, probs, exps, sampler })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn term_channel(&self, k: usize) -> &Superoperator {
        &self.exps[k]
    }

    /// `E(τ) = Σ p_k exp(τ L_k)`.
    pub fn mixture(&self) -> Superoperator {
        let mut acc = Superoperator::zero(self.exps[0].dim());
        for (p, e) in self.probs.iter().zip(&self.exps) {
            if *p > 0.0 {
                acc = &acc + &e.scale(*p);
            }
        }
        acc
    }

    /// `n` independent draws `k ~ p` from stream `(seed, stream)`.
    pub fn sample_indices(&self, n: usize, seed: u64, stream: u64) -> Vec<usize> {
        let mut rng = stream_rng(seed, stream);
        (0..n).map(|_| self.sampler.sample(&mut rng)).collect()
    }

    /// Ordered product of the channels in `indices`, latest applied leftmost.
    pub fn product(&self, indices: &[usize]) -> Result<Superoperator> {
        let mut iter = indices.iter();
        let first = match iter.next() {
            Some(&k) => self.exps[k].clone(),
            None => return Ok(Superoperator::identity(self.exps[0].dim())),
        };
        iter.try_fold(first, |acc, &k| self.exps[k].compose(&acc))
    }

    pub fn trajectory(&self, n: usize, seed: u64, stream: u64) -> Result<Trajectory> {
        let indices = self.sample_indices(n, seed, stream);
        let channel = self.product(&indices)?;
        Ok(Trajectory { indices, channel })
    }
}

/// One sampled realization of the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub indices: Vec<usize>,
    pub channel: Superoperator,
}

/// The averaged single-step channel `E(τ)`.
pub fn exact_qdrift_channel(decomp: &GeneratorDecomposition, tau: f64) -> Result<Superoperator> {
    Ok(StepChannels::new(decomp, tau)?.mixture())
}

/// `n` sampled applications of duration `tau` from stream `(seed, stream)`.
pub fn sample_trajectory(
    decomp: &GeneratorDecomposition,
    tau: f64,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<Trajectory> {
    if n == 0 {
        return Err(domain("a trajectory needs at least one step"));
    }
    StepChannels::new(decomp, tau)?.trajectory(n, seed, stream)
}

/// Monte-Carlo average over independent trajectories.
#[derive(Debug, Clone)]
pub struct SampleSummary {
    pub trajectories: usize,
    pub steps: usize,
    pub mean: Superoperator,
    /// Second moment `Σ ‖Sₘ‖_F² / M`, for standard errors.
    pub mean_sq_frobenius: f64,
    pub counts: Vec<u64>,
}

// Fixed reduction granularity keeps sums independent of the thread count.
const SAMPLE_CHUNK: usize = 64;

/// Averages `trajectories` products of `steps` applications; trajectory `m`
/// draws from stream `m`, and partial sums are reduced in a fixed order so
/// the result is bit-identical for any thread pool.
pub fn sample_mean(channels: &StepChannels, steps: usize, trajectories: usize, seed: u64) -> Result<SampleSummary> {
    if steps == 0 || trajectories == 0 {
        return Err(domain("sampling needs at least one step and one trajectory"));
    }
    let n_terms = channels.probs.len();
    let chunks: Vec<(usize, usize)> = (0..trajectories)
        .step_by(SAMPLE_CHUNK)
        .map(|start| (start, (start + SAMPLE_CHUNK).min(trajectories)))
        .collect();
    let partials = chunks
        .par_iter()
        .map(|&(start, end)| -> Result<(Superoperator, f64, Vec<u64>)> {
            let dim = channels.exps[0].dim();
            let mut sum = Superoperator::zero(dim);
            let mut sq = 0.0;
            let mut counts = vec![0u64; n_terms];
            for m in start..end {
                let traj = channels.trajectory(steps, seed, m as u64)?;
                for &k in &traj.indices {
                    counts[k] += 1;
                }
                sq += traj.channel.matrix().frobenius_norm().powi(2);
                sum = &sum + &traj.channel;
            }
            Ok((sum, sq, counts))
        })
        .collect::<Result<Vec<_>>>()?;

    let dim = channels.exps[0].dim();
    let mut total = Superoperator::zero(dim);
    let mut sq = 0.0;
    let mut counts = vec![0u64; n_terms];
    for (s, q, c) in partials {
        total = &total + &s;
        sq += q;
        for (a, b) in counts.iter_mut().zip(c) {
            *a += b;
        }
    }
    let m = trajectories as f64;
    Ok(SampleSummary {
        trajectories,
        steps,
        mean: total.scale(1.0 / m),
        mean_sq_frobenius: sq / m,
        counts,
    })
}

/// Largest `|countₖ − n pₖ| / √(n pₖ(1−pₖ))` over terms with `0 < pₖ < 1`.
pub fn max_frequency_deviation_sigma(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    counts
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0 && p < 1.0)
        .map(|(&c, &p)| (c as f64 - n * p).abs() / (n * p * (1.0 - p)).sqrt())
        .fold(0.0, f64::max)
}

/// Original step count `⌈(tΓΩ)²/ε⌉`.
pub fn steps_old(t: f64, gamma: f64, omega: f64, eps: f64) -> Result<u128> {
    exact::ceil_count(&old_steps_exact(
        &exact::positive("t", t)?,
        &exact::positive("Γ", gamma)?,
        &exact::positive("Ω", omega)?,
        &exact::positive("ε", eps)?,
    ))
}

fn old_steps_exact(t: &BigRational, gamma: &BigRational, omega: &BigRational, eps: &BigRational) -> BigRational {
    let x = t * gamma * omega;
    &x * &x / eps
}

/// Original bound before dropping the exponential: `(tΓΩ)²/r · exp(tΓΩ/r)`.
pub fn old_bound_value(t: f64, gamma: f64, omega: f64, r: f64) -> Result<f64> {
    for (name, v) in [("t", t), ("Γ", gamma), ("Ω", omega), ("r", r)] {
        exact::positive(name, v)?;
    }
    let x = t * gamma * omega;
    Ok(x * x / r * (x / r).exp())
}

/// `Σ λ_k ν_k²` evaluated exactly.
pub fn weighted_norm_sum(decomp: &GeneratorDecomposition, convention: NormConvention) -> Result<BigRational> {
    decomp.terms().iter().try_fold(BigRational::zero(), |acc, term| {
        let nu = exact::decimal(term_norm_bound(term, convention)?)?;
        Ok(acc + exact::decimal(term.lambda)? * &nu * &nu)
    })
}

/// Tightened step count `⌈(t²/ε) Σ λ_k ν_k²⌉`.
pub fn steps_new(t: f64, decomp: &GeneratorDecomposition, eps: f64, convention: NormConvention) -> Result<u128> {
    let t = exact::positive("t", t)?;
    let eps = exact::positive("ε", eps)?;
    let sum = weighted_norm_sum(decomp, convention)?;
    if sum.is_zero() {
        return Err(domain("Σ λ_k ν_k² is zero"));
    }
    exact::ceil_count(&(&t * &t * sum / eps))
}

/// Closed-system step count `⌈4t²Γ/ε⌉`.
pub fn steps_corollary(t: f64, gamma: f64, eps: f64) -> Result<u128> {
    let t = exact::positive("t", t)?;
    let gamma = exact::positive("Γ", gamma)?;
    let eps = exact::positive("ε", eps)?;
    exact::ceil_count(&corollary_exact(&t, &gamma, &eps))
}

fn corollary_exact(t: &BigRational, gamma: &BigRational, eps: &BigRational) -> BigRational {
    BigRational::from_integer(BigInt::from(4)) * t * t * gamma / eps
}

/// One row of a resource estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepEstimate {
    pub t: f64,
    pub gamma: f64,
    pub omega: f64,
    pub r_old: u128,
    pub r_new: u128,
    pub r_corollary: u128,
    /// Channel applications under the original bound (`r_old` draws of duration `tΓ/r`).
    pub applications_old: u128,
    /// Channel applications under the tightened bound, `⌈r_new · Γ⌉`.
    pub applications_new: u128,
    /// `(tΓΩ)²/ε ÷ (t²/ε)Σλν²` before ceilings.
    pub ratio: f64,
}

struct ExactInputs {
    t: BigRational,
    gamma: BigRational,
    omega: BigRational,
    eps: BigRational,
}

fn finish_estimate(inputs: ExactInputs, new_exact: BigRational) -> Result<StepEstimate> {
    let ExactInputs { t, gamma, omega, eps } = inputs;
    let old = old_steps_exact(&t, &gamma, &omega, &eps);
    let r_new = exact::ceil_count(&new_exact)?;
    let applications_new = exact::ceil_count(&(BigRational::from_integer(BigInt::from(r_new)) * &gamma))?;
    Ok(StepEstimate {
        t: exact::to_f64(&t),
        gamma: exact::to_f64(&gamma),
        omega: exact::to_f64(&omega),
        r_old: exact::ceil_count(&old)?,
        r_new,
        r_corollary: exact::ceil_count(&corollary_exact(&t, &gamma, &eps))?,
        applications_old: exact::ceil_count(&old)?,
        applications_new,
        ratio: exact::to_f64(&(old / new_exact)),
    })
}

/// Estimate for a concrete decomposition with `Ω = max ν_k`.
pub fn estimate_decomposition(
    decomp: &GeneratorDecomposition,
    t: f64,
    eps: f64,
    convention: NormConvention,
) -> Result<StepEstimate> {
    let omega = crate::norms::omega(decomp, convention)?;
    let t_q = exact::positive("t", t)?;
    let eps_q = exact::positive("ε", eps)?;
    let sum = weighted_norm_sum(decomp, convention)?;
    let new_exact = &t_q * &t_q * sum / &eps_q;
    let inputs = ExactInputs { t: t_q, gamma: decomp.gamma_exact(), omega: exact::positive("Ω", omega)?, eps: eps_q };
    finish_estimate(inputs, new_exact)
}

/// Estimate from `(Γ, Ω)` alone, taking `ν_k = Ω` for every term.
pub fn estimate_raw(t: f64, gamma: f64, omega: f64, eps: f64) -> Result<StepEstimate> {
    let inputs = ExactInputs {
        t: exact::positive("t", t)?,
        gamma: exact::positive("Γ", gamma)?,
        omega: exact::positive("Ω", omega)?,
        eps: exact::positive("ε", eps)?,
    };
    let new_exact = &inputs.t * &inputs.t * &inputs.gamma * &inputs.omega * &inputs.omega / &inputs.eps;
    finish_estimate(inputs, new_exact)
}

/// Outcome of one dense bound check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// Channel applications `N`.
    pub steps: u64,
    /// `N/Γ`, the `r` at which the tightened bound is evaluated.
    pub equivalent_r: f64,
    pub lhs_lower: f64,
    pub lhs_upper: f64,
    pub rhs_theorem: f64,
    pub per_step_lhs_lower: f64,
    pub per_step_lhs_upper: f64,
    pub per_step_rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub convention: NormConvention,
    /// See-saw refinement of the lower bounds; `None` keeps the Choi sandwich.
    pub seesaw: Option<SeesawOptions>,
    /// Refinement is skipped above this Hilbert-space dimension.
    pub seesaw_max_dim: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            convention: NormConvention::Tight,
            seesaw: Some(SeesawOptions { restarts: 4, max_iters: 100, tol: 1e-12, seed: 0 }),
            seesaw_max_dim: 4,
        }
    }
}

impl VerifyOptions {
    fn bounds(&self, s: &Superoperator) -> Result<DiamondNormBounds> {
        match &self.seesaw {
            Some(opts) if s.dim() <= self.seesaw_max_dim => seesaw_lower(s, opts),
            _ => choi_sandwich(s),
        }
    }
}

/// Exact evolution `exp(tL)` next to the qDRIFT product for a set of
/// application counts, sharing the expensive pieces.
pub struct BoundVerifier<'a> {
    decomp: &'a GeneratorDecomposition,
    generator: Superoperator,
    time: f64,
    exact: Superoperator,
    weighted_sum: f64,
    per_step_weight: f64,
    options: VerifyOptions,
}

impl<'a> BoundVerifier<'a> {
    pub fn new(decomp: &'a GeneratorDecomposition, time: f64, options: VerifyOptions) -> Result<Self> {
        if decomp.dim() > VERIFY_MAX_DIM {
            return Err(Error::Size {
                what: "dense bound verification (use estimator mode)",
                requested: decomp.dim(),
                limit: VERIFY_MAX_DIM,
            });
        }
        if !(time.is_finite() && time > 0.0) {
            return Err(domain(format!("simulation time must be positive, got {time}")));
        }
        let generator = decomp.generator()?;
        let exact = channel_exp(&generator, time)?;
        let weighted_sum = exact::to_f64(&weighted_norm_sum(decomp, options.convention)?);
        let per_step_weight = weighted_sum / decomp.gamma();
        Ok(Self { decomp, generator, time, exact, weighted_sum, per_step_weight, options })
    }

    /// `Σ λ_k ν_k²` under the configured convention.
    pub fn weighted_sum(&self) -> f64 {
        self.weighted_sum
    }

    pub fn check(&self, applications: u64) -> Result<BoundReport> {
        let plan = QDriftPlan::new(self.decomp, self.time, applications)?;
        let n = applications as f64;
        let step = StepChannels::new(self.decomp, plan.tau)?.mixture();
        let product = compose_pow(&step, applications)?;
        let total = self.options.bounds(&(&self.exact - &product))?;

        let exact_step = channel_exp(&self.generator, self.time / n)?;
        let per_step = self.options.bounds(&(&exact_step - &step))?;

        // r = N/Γ: t²Σλν²/r and its per-application share (t/r)²Σpν².
        let rhs_theorem = self.time * self.time * self.weighted_sum * plan.gamma / n;
        let per_step_rhs = plan.tau * plan.tau * self.per_step_weight;
        Ok(BoundReport {
            steps: applications,
            equivalent_r: plan.equivalent_steps(),
            lhs_lower: total.lower,
            lhs_upper: total.upper,
            rhs_theorem,
            per_step_lhs_lower: per_step.lower,
            per_step_lhs_upper: per_step.upper,
            per_step_rhs,
            pass: total.lower <= rhs_theorem,
        })
    }
}

/// Single-step bound at an arbitrary `r`:
/// `‖Λ(t/(rΓ)) − E(t/r)‖⋄ ≤ (t/r)² Σ p_k ν_k²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepBoundReport {
    pub r: f64,
    pub lhs_lower: f64,
    pub lhs_upper: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl BoundVerifier<'_> {
    /// Evaluates the single-step inequality at `r` (need not be an integer).
    pub fn step_bound_at(&self, r: f64) -> Result<StepBoundReport> {
        if !(r.is_finite() && r > 0.0) {
            return Err(domain(format!("r must be positive, got {r}")));
        }
        let gamma = self.decomp.gamma();
        let tau = self.time / r;
        let step = StepChannels::new(self.decomp, tau)?.mixture();
        let exact_step = channel_exp(&self.generator, tau / gamma)?;
        let bounds = self.options.bounds(&(&exact_step - &step))?;
        let rhs = tau * tau * self.per_step_weight;
        Ok(StepBoundReport { r, lhs_lower: bounds.lower, lhs_upper: bounds.upper, rhs, pass: bounds.lower <= rhs })
    }
}

/// Checks `‖Λ(t) − E(tΓ/N)^N‖⋄ ≤ t²Σλν²·Γ/N` with certified diamond bounds.
pub fn verify_bound(
    decomp: &GeneratorDecomposition,
    t: f64,
    applications: u64,
    options: &VerifyOptions,
) -> Result<BoundReport> {
    BoundVerifier::new(decomp, t, options.clone())?.check(applications)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Count as `f64` for reporting.
pub fn count_as_f64(c: u128) -> f64 {
    c.to_f64().unwrap_or(f64::INFINITY)
}
