use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Exact diffusion integrating factor with classical RK4 on advection.
    #[default]
    IntegratingFactorRk4,
}

/// Route for the truncated advection product. Both routes compute the same
/// Galerkin projection; `Auto` picks the convolution for velocities with few
/// active modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ProductEvaluation {
    #[default]
    Auto,
    Grid,
    Convolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub kappa: f64,
    pub t_final: f64,
    pub dt_max: f64,
    /// Truncation radius of the scalar field.
    pub k_max: usize,
    /// Side of the physical grid used for the advection product.
    pub grid_n: usize,
    /// Spacing of retained checkpoints; `None` means `t_final / 64`.
    pub checkpoint_spacing: Option<f64>,
    pub scheme: Scheme,
    #[serde(default)]
    pub product: ProductEvaluation,
}

impl SolverConfig {
    /// Defaults: `dt_max = min(0.01, T)`, `grid_n = 3K + 1`, checkpoints every `T/64`.
    pub fn new(kappa: f64, t_final: f64, k_max: usize) -> Self {
        Self {
            kappa,
            t_final,
            dt_max: if t_final > 0.0 { t_final.min(0.01) } else { 0.01 },
            k_max,
            grid_n: default_grid_n(k_max),
            checkpoint_spacing: None,
            scheme: Scheme::default(),
            product: ProductEvaluation::default(),
        }
    }

    pub fn with_dt_max(mut self, dt_max: f64) -> Self {
        self.dt_max = dt_max;
        self
    }

    pub fn with_grid_n(mut self, grid_n: usize) -> Self {
        self.grid_n = grid_n;
        self
    }

    pub fn with_product(mut self, product: ProductEvaluation) -> Self {
        self.product = product;
        self
    }

    pub fn with_checkpoint_spacing(mut self, h: f64) -> Self {
        self.checkpoint_spacing = Some(h);
        self
    }

    pub fn checkpoint_spacing(&self) -> f64 {
        self.checkpoint_spacing.unwrap_or(self.t_final / 64.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::config("kappa", "must be positive and finite"));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::config("t_final", "must be non-negative and finite"));
        }
        if !(self.dt_max > 0.0) || (self.t_final > 0.0 && self.dt_max > self.t_final) {
            return Err(Error::config("dt_max", "must satisfy 0 < dt_max <= T"));
        }
        if self.grid_n < 2 * self.k_max + 1 {
            return Err(Error::config(
                "grid_n",
                format!("must be at least 2K+1 = {}", 2 * self.k_max + 1),
            ));
        }
        if let Some(h) = self.checkpoint_spacing {
            if !(h > 0.0) {
                return Err(Error::config("checkpoint_spacing", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Smallest grid for which the product of two `K`-truncated fields does not
/// alias back onto the retained modes.
pub fn default_grid_n(k_max: usize) -> usize {
    3 * k_max + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_names_the_field() {
        let bad = SolverConfig::new(-1.0, 1.0, 4);
        match bad.validate() {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "kappa"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = SolverConfig::new(0.1, 1.0, 4).with_dt_max(2.0);
        assert!(bad.validate().is_err());
        let bad = SolverConfig::new(0.1, 1.0, 4).with_grid_n(8);
        assert!(bad.validate().is_err());
        assert!(SolverConfig::new(0.1, 0.0, 4).validate().is_ok());
    }
}
