use super::space::ParameterSpace;
use crate::error::{Error, Result};
use crate::field::FourierVelocityField;
use crate::observe::{ForwardModel, ObservationSet};

/// Anything that assigns a data misfit to a parameter vector.
pub trait PotentialFn: Sync {
    fn phi(&self, theta: &[f64]) -> Result<f64>;
}

/// `Φ ≡ 0`: the sampler then targets the prior.
pub struct FlatPotential;

impl PotentialFn for FlatPotential {
    fn phi(&self, _theta: &[f64]) -> Result<f64> {
        Ok(0.0)
    }
}

/// Wraps a closure as a potential.
pub struct FnPotential<F>(pub F);

impl<F: Fn(&[f64]) -> Result<f64> + Sync> PotentialFn for FnPotential<F> {
    fn phi(&self, theta: &[f64]) -> Result<f64> {
        (self.0)(theta)
    }
}

/// `Φ_N(v) = (1/2σ²) Σ_j (Y_j - G_j(v))²`.
#[derive(Debug, Clone)]
pub struct Potential {
    obs: ObservationSet,
    model: ForwardModel,
    space: ParameterSpace,
}

impl Potential {
    pub fn new(obs: ObservationSet, model: ForwardModel, space: ParameterSpace) -> Result<Self> {
        if obs.pairing() != model.pairing() {
            return Err(Error::Mismatch("observation pairing differs from the forward model".into()));
        }
        if !obs.is_empty() && obs.design().t_final() > model.config().t_final {
            return Err(Error::Mismatch("observations extend past the solver horizon".into()));
        }
        Ok(Self { obs, model, space })
    }

    pub fn observations(&self) -> &ObservationSet {
        &self.obs
    }

    pub fn model(&self) -> &ForwardModel {
        &self.model
    }

    pub fn space(&self) -> &ParameterSpace {
        &self.space
    }

    /// `G_j(v)` for the observed data indices.
    pub fn forward(&self, v: &FourierVelocityField) -> Result<Vec<f64>> {
        if self.obs.is_empty() {
            return Ok(Vec::new());
        }
        let mut g = self.model.forward_map(v, self.obs.design())?;
        g.truncate(self.obs.len());
        Ok(g)
    }

    /// Misfit for precomputed forward values; `σ = 0` gives `0` for a perfect
    /// fit and `+∞` otherwise.
    pub fn phi_from_forward(&self, g: &[f64]) -> f64 {
        let sse: f64 = self.obs.data().iter().zip(g).map(|(o, g)| (o.y - g).powi(2)).sum();
        let sigma = self.obs.sigma_eta();
        if sigma == 0.0 {
            return if sse == 0.0 { 0.0 } else { f64::INFINITY };
        }
        sse / (2.0 * sigma * sigma)
    }

    pub fn phi_field(&self, v: &FourierVelocityField) -> Result<f64> {
        Ok(self.phi_from_forward(&self.forward(v)?))
    }
}

impl PotentialFn for Potential {
    fn phi(&self, theta: &[f64]) -> Result<f64> {
        self.phi_field(&self.space.to_field(theta))
    }
}
