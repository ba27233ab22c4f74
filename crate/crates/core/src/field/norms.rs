use serde::{Deserialize, Serialize};

use super::scalar::FourierScalarField;
use super::velocity::FourierVelocityField;
use crate::error::{Error, Result};

/// Sobolev exponents: `m` for the parameter space `H = H^m`, `m_star` for
/// the higher-regularity space `V = H^{m⋆}`, and `s_ic` for the initial
/// conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndices {
    pub m: f64,
    pub m_star: f64,
    pub s_ic: f64,
}

impl Default for SobolevIndices {
    fn default() -> Self {
        Self {
            m: 2.0,
            m_star: 3.0,
            s_ic: 2.0,
        }
    }
}

impl SobolevIndices {
    pub fn new(m: f64, m_star: f64, s_ic: f64) -> Result<Self> {
        let idx = Self { m, m_star, s_ic };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 1.0) {
            return Err(Error::config("m", "must exceed 1"));
        }
        if !(self.m_star > self.m) {
            return Err(Error::config("m_star", "must exceed m"));
        }
        if !(self.s_ic > 1.0 && self.s_ic <= self.m) {
            return Err(Error::config("s_ic", "must satisfy 1 < s_ic <= m"));
        }
        Ok(())
    }
}

pub trait SobolevNorm {
    /// `sqrt(Σ ‖k‖^{2s} |c_k|²)` with the Euclidean integer norm `‖k‖`.
    fn sobolev_norm(&self, s: f64) -> f64;
}

fn weighted_norm<'a>(
    modes: impl Iterator<Item = super::Wavevector>,
    coeffs: impl Iterator<Item = &'a num_complex::Complex64>,
    s: f64,
) -> f64 {
    modes
        .zip(coeffs)
        .map(|(k, c)| k.norm_sq().powf(s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

impl SobolevNorm for FourierScalarField {
    fn sobolev_norm(&self, s: f64) -> f64 {
        weighted_norm(self.lattice().modes(), self.coeffs().iter(), s)
    }
}

impl SobolevNorm for FourierVelocityField {
    fn sobolev_norm(&self, s: f64) -> f64 {
        // |k⊥/‖k‖| = 1, so the vector coefficient has modulus |v_k|
        weighted_norm(self.lattice().modes(), self.amplitudes().iter(), s)
    }
}

/// `‖v1 − v2‖_{H^s}`, embedding the coarser field into the finer lattice.
pub fn distance_h(v1: &FourierVelocityField, v2: &FourierVelocityField, s: f64) -> Result<f64> {
    let target = if v1.lattice().k_max() >= v2.lattice().k_max() {
        v1.lattice()
    } else {
        v2.lattice()
    };
    let diff = v1.embed(target)?.sub(&v2.embed(target)?)?;
    Ok(diff.sobolev_norm(s))
}
