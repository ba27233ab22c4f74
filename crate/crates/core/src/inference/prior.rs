use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::space::ParameterSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PriorKind {
    /// Uniform (Lebesgue) on the V-ball.
    Uniform,
    /// `θ_i ~ N(center_i, τ_i²)` with `τ_i = τ0 ‖k_i‖^{-α}`, conditioned on
    /// the V-ball.
    TruncatedGaussian { tau0: f64, alpha: f64 },
}

/// A prior on a [`ParameterSpace`] whose support is the ball of radius
/// `radius` about `center` in the `H^{m_star}` norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub space: ParameterSpace,
    pub center: Vec<f64>,
    pub radius: f64,
    pub m_star: f64,
    pub kind: PriorKind,
}

/// Consecutive rejections allowed before giving up on the Gaussian kind.
const MAX_TRIES: usize = 100_000;

impl PriorSpec {
    pub fn uniform(space: ParameterSpace, radius: f64, m_star: f64) -> Result<Self> {
        let center = vec![0.0; space.dim()];
        let spec = Self { space, center, radius, m_star, kind: PriorKind::Uniform };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Result<Self> {
        self.center = center;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.center.len() != self.space.dim() {
            return Err(Error::config("prior.center", format!("needs {} entries", self.space.dim())));
        }
        if !(self.radius >= 0.0) {
            return Err(Error::config("prior.radius", "must be non-negative"));
        }
        if let PriorKind::TruncatedGaussian { tau0, alpha } = self.kind {
            if !(tau0 > 0.0) {
                return Err(Error::config("prior.tau0", "must be positive"));
            }
            if !(alpha > self.m_star + 1.0) {
                return Err(Error::config("prior.alpha", format!("must exceed m_star + 1 = {}", self.m_star + 1.0)));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `‖θ - center‖_{m⋆}`.
    pub fn v_distance(&self, theta: &[f64]) -> f64 {
        self.space.distance(theta, &self.center, self.m_star)
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        self.v_distance(theta) <= self.radius
    }

    /// Coordinate standard deviations of the Gaussian reference measure used
    /// by pCN. For the uniform kind these match the ball's own covariance.
    pub fn reference_std(&self) -> Vec<f64> {
        match self.kind {
            PriorKind::Uniform => {
                let d = self.dim() as f64;
                self.space
                    .weights(self.m_star)
                    .iter()
                    .map(|w| self.radius / (w * (d + 2.0)).sqrt())
                    .collect()
            }
            PriorKind::TruncatedGaussian { tau0, alpha } => self
                .space
                .coords()
                .iter()
                .map(|c| {
                    let k = c.terms.iter().map(|t| t.k.norm()).fold(0.0, f64::max);
                    tau0 * k.powf(-alpha)
                })
                .collect(),
        }
    }

    /// Log density with respect to Lebesgue measure, up to a constant;
    /// `None` outside the support.
    pub fn log_density(&self, theta: &[f64]) -> Option<f64> {
        if !self.contains(theta) {
            return None;
        }
        Some(match self.kind {
            PriorKind::Uniform => 0.0,
            PriorKind::TruncatedGaussian { .. } => -0.5 * self.whitened_sq(theta),
        })
    }

    /// `Σ ((θ_i - c_i)/τ_i)²` against the reference deviations.
    pub(crate) fn whitened_sq(&self, theta: &[f64]) -> f64 {
        self.reference_std()
            .iter()
            .zip(theta.iter().zip(&self.center))
            .map(|(s, (t, c))| ((t - c) / s).powi(2))
            .sum()
    }
}

/// Draws prior samples and tracks the rejection rate of the Gaussian kind.
pub struct PriorSampler<'a> {
    spec: &'a PriorSpec,
    tries: usize,
    accepted: usize,
}

impl<'a> PriorSampler<'a> {
    pub fn new(spec: &'a PriorSpec) -> Self {
        Self { spec, tries: 0, accepted: 0 }
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.tries.max(1) as f64
    }

    pub fn sample(&mut self, rng: &mut impl Rng) -> Result<Vec<f64>> {
        let spec = self.spec;
        match spec.kind {
            PriorKind::Uniform => {
                let d = spec.dim();
                let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
                let u: f64 = rng.gen();
                let r = spec.radius * u.powf(1.0 / d as f64) / norm.max(f64::MIN_POSITIVE);
                self.tries += 1;
                self.accepted += 1;
                Ok(spec
                    .space
                    .weights(spec.m_star)
                    .iter()
                    .zip(&z)
                    .zip(&spec.center)
                    .map(|((w, z), c)| if d == 0 { *c } else { c + r * z / w.sqrt() })
                    .collect())
            }
            PriorKind::TruncatedGaussian { .. } => {
                let std = spec.reference_std();
                let mut streak = 0;
                loop {
                    let theta: Vec<f64> = std
                        .iter()
                        .zip(&spec.center)
                        .map(|(s, c)| c + s * rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    self.tries += 1;
                    streak += 1;
                    if spec.contains(&theta) {
                        self.accepted += 1;
                        return Ok(theta);
                    }
                    let hopeless = self.tries >= MAX_TRIES && self.acceptance_rate() < 1e-3;
                    if hopeless || streak >= MAX_TRIES {
                        return Err(Error::PriorRejection { tries: self.tries });
                    }
                }
            }
        }
    }
}

/// One prior draw in parameter coordinates.
pub fn sample_prior(spec: &PriorSpec, rng: &mut impl Rng) -> Result<Vec<f64>> {
    PriorSampler::new(spec).sample(rng)
}
