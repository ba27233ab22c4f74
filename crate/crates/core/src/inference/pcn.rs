use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::potential::PotentialFn;
use super::prior::{PriorKind, PriorSpec};
use super::stats::{batch_means_se, mean};
use crate::error::{Error, Result};
use crate::rng::{stream, CHAIN_STREAM_BASE};

/// Log acceptance ratios are clamped to this magnitude before `exp`.
const LOG_CLAMP: f64 = 700.0;
/// Burn-in steps between proposal-scale updates.
const ADAPT_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub beta: f64,
    pub n_steps: usize,
    pub burn_in: usize,
    /// Tune `beta` towards acceptance 0.2–0.4 during burn-in, then freeze.
    pub adapt: bool,
    pub seed: u64,
    pub chain_index: u64,
}

impl ChainConfig {
    pub fn new(beta: f64, n_steps: usize, seed: u64) -> Self {
        Self {
            beta,
            n_steps,
            burn_in: 0,
            adapt: false,
            seed,
            chain_index: 0,
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize, adapt: bool) -> Self {
        self.burn_in = burn_in;
        self.adapt = adapt;
        self
    }

    pub fn with_chain_index(mut self, index: u64) -> Self {
        self.chain_index = index;
        self
    }

    /// The chain's own random stream.
    pub fn rng(&self) -> ChaCha8Rng {
        stream(self.seed, CHAIN_STREAM_BASE + self.chain_index)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::config("beta", "must lie in [0, 1]"));
        }
        if self.burn_in > self.n_steps {
            return Err(Error::config("burn_in", "exceeds n_steps"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub theta: Vec<f64>,
    pub phi: f64,
    pub step: usize,
    pub accepted: usize,
    pub beta: f64,
}

impl ChainState {
    /// Whether the recorded potential still equals a fresh evaluation.
    pub fn verify(&self, pot: &impl PotentialFn) -> Result<bool> {
        let fresh = pot.phi(&self.theta)?;
        Ok(fresh == self.phi || (fresh.is_infinite() && self.phi.is_infinite()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub accepted: bool,
    pub phi: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    pub trace: Vec<TraceRow>,
    pub burn_in: usize,
    pub final_beta: f64,
    pub state: ChainState,
}

impl ChainResult {
    pub fn kept(&self) -> &[TraceRow] {
        &self.trace[self.burn_in.min(self.trace.len())..]
    }

    pub fn acceptance_rate(&self) -> f64 {
        let kept = self.kept();
        kept.iter().filter(|r| r.accepted).count() as f64 / kept.len().max(1) as f64
    }

    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.kept().iter().map(|r| r.theta[i]).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        let d = self.state.theta.len();
        (0..d).map(|i| mean(&self.coordinate(i))).collect()
    }

    /// Batch-means standard errors of [`ChainResult::mean`].
    pub fn standard_errors(&self) -> Vec<f64> {
        let d = self.state.theta.len();
        (0..d).map(|i| batch_means_se(&self.coordinate(i))).collect()
    }

    /// `step,accepted,phi,theta_1,...` with shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let d = self.state.theta.len();
        let mut s = String::from("step,accepted,phi");
        for i in 1..=d {
            let _ = write!(s, ",theta_{i}");
        }
        s.push('\n');
        for r in &self.trace {
            let _ = write!(s, "{},{},{}", r.step, u8::from(r.accepted), r.phi);
            for t in &r.theta {
                let _ = write!(s, ",{t}");
            }
            s.push('\n');
        }
        s
    }
}

/// `log(prior density / reference density)` up to a constant.
fn reference_correction(spec: &PriorSpec, theta: &[f64]) -> f64 {
    match spec.kind {
        PriorKind::Uniform => 0.5 * spec.whitened_sq(theta),
        PriorKind::TruncatedGaussian { .. } => 0.0,
    }
}

/// Preconditioned Crank–Nicolson:
/// `θ' = c + sqrt(1-β²)(θ - c) + β ξ` with `ξ` drawn from the Gaussian
/// reference measure of `spec`, proposals outside the V-ball rejected, and
/// acceptance probability `min(1, exp(Φ_eff(θ) - Φ_eff(θ')))`. For the
/// Gaussian kind `Φ_eff = Φ`; for the uniform kind the ratio between the
/// uniform density and the reference density is folded into `Φ_eff`.
pub fn pcn_chain(
    spec: &PriorSpec,
    pot: &impl PotentialFn,
    config: &ChainConfig,
    rng: &mut impl Rng,
    init: Vec<f64>,
) -> Result<ChainResult> {
    config.validate()?;
    spec.validate()?;
    if init.len() != spec.dim() {
        return Err(Error::Mismatch(format!("initial state has {} entries, prior has {}", init.len(), spec.dim())));
    }
    if !spec.contains(&init) {
        return Err(Error::config("init", "lies outside the prior support"));
    }
    let std = spec.reference_std();
    let mut beta = config.beta;
    let phi0 = pot.phi(&init)?;
    let mut state = ChainState {
        theta: init,
        phi: phi0,
        step: 0,
        accepted: 0,
        beta,
    };
    let mut eff = phi0 - reference_correction(spec, &state.theta);
    let mut trace = Vec::with_capacity(config.n_steps);
    let mut window_accepts = 0;

    for step in 1..=config.n_steps {
        let root = (1.0 - beta * beta).sqrt();
        let proposal: Vec<f64> = state
            .theta
            .iter()
            .zip(&spec.center)
            .zip(&std)
            .map(|((t, c), s)| c + root * (t - c) + beta * s * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let u: f64 = rng.gen();
        let mut accepted = false;
        if spec.contains(&proposal) {
            if beta == 0.0 {
                accepted = true;
            } else {
                let phi = pot.phi(&proposal)?;
                let prop_eff = phi - reference_correction(spec, &proposal);
                let log_alpha = (eff - prop_eff).clamp(-LOG_CLAMP, LOG_CLAMP);
                if u.ln() < log_alpha {
                    accepted = true;
                    state.theta = proposal;
                    state.phi = phi;
                    eff = prop_eff;
                }
            }
        }
        state.step = step;
        if accepted {
            state.accepted += 1;
            window_accepts += 1;
        }
        trace.push(TraceRow {
            step,
            accepted,
            phi: state.phi,
            theta: state.theta.clone(),
        });

        if config.adapt && step <= config.burn_in && step % ADAPT_WINDOW == 0 {
            let rate = window_accepts as f64 / ADAPT_WINDOW as f64;
            if rate < 0.2 {
                beta *= 0.7;
            } else if rate > 0.4 {
                beta = (beta * 1.3).min(1.0);
            }
            window_accepts = 0;
        }
        state.beta = beta;
    }
    Ok(ChainResult {
        trace,
        burn_in: config.burn_in,
        final_beta: beta,
        state,
    })
}
