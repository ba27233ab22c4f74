use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::potential::PotentialFn;
use super::prior::PriorSpec;
use crate::error::{Error, Result};

pub const MAX_QUADRATURE_DIM: usize = 4;
pub const MIN_GRID_PER_DIM: usize = 17;
/// Potential differences above this are treated as this when weighting.
const PHI_CLAMP: f64 = 700.0;

/// Cell-midpoint tensor grid over the bounding box of the prior's V-ball,
/// restricted to nodes inside the support.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    spec: PriorSpec,
    per_dim: usize,
    nodes: Vec<Vec<f64>>,
    /// Normalized prior mass of each node's cell.
    prior: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(spec: &PriorSpec, per_dim: usize) -> Result<Self> {
        spec.validate()?;
        let d = spec.dim();
        if d > MAX_QUADRATURE_DIM {
            return Err(Error::DimensionTooLarge { dim: d, limit: MAX_QUADRATURE_DIM });
        }
        if per_dim < MIN_GRID_PER_DIM {
            return Err(Error::config("grid_per_dim", format!("must be at least {MIN_GRID_PER_DIM}")));
        }
        let half: Vec<f64> = spec
            .space
            .weights(spec.m_star)
            .iter()
            .map(|w| spec.radius / w.sqrt())
            .collect();
        let mut nodes = Vec::new();
        let mut log_prior = Vec::new();
        let total = per_dim.pow(d as u32);
        for flat in 0..total {
            let mut rest = flat;
            let theta: Vec<f64> = (0..d)
                .map(|i| {
                    let j = rest % per_dim;
                    rest /= per_dim;
                    let u = -1.0 + (2 * j + 1) as f64 / per_dim as f64;
                    spec.center[i] + half[i] * u
                })
                .collect();
            if let Some(lp) = spec.log_density(&theta) {
                nodes.push(theta);
                log_prior.push(lp);
            }
        }
        if nodes.is_empty() {
            return Err(Error::config("grid_per_dim", "no grid node falls inside the prior support"));
        }
        let top = log_prior.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = log_prior.iter().map(|lp| (lp - top).exp()).collect();
        let sum: f64 = raw.iter().sum();
        Ok(Self {
            spec: spec.clone(),
            per_dim,
            nodes,
            prior: raw.iter().map(|p| p / sum).collect(),
        })
    }

    pub fn spec(&self) -> &PriorSpec {
        &self.spec
    }

    pub fn per_dim(&self) -> usize {
        self.per_dim
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn prior_weights(&self) -> &[f64] {
        &self.prior
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node closest to `theta` in the `H^s` norm.
    pub fn nearest_node(&self, theta: &[f64], s: f64) -> &[f64] {
        let space = &self.spec.space;
        self.nodes
            .iter()
            .min_by(|a, b| space.distance(a, theta, s).total_cmp(&space.distance(b, theta, s)))
            .expect("grid has nodes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMass {
    pub center_id: String,
    pub radius: f64,
    pub norm: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub normalizer: f64,
    pub log_normalizer: f64,
    pub mean: Vec<f64>,
    pub ball_masses: Vec<BallMass>,
    pub nodes: usize,
    pub grid_per_dim: usize,
}

/// Posterior weights `∝ prior · exp(-Φ)` on a [`QuadratureGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePosterior {
    grid: QuadratureGrid,
    phi: Vec<f64>,
    weights: Vec<f64>,
    log_normalizer: f64,
}

impl QuadraturePosterior {
    pub fn from_potentials(grid: &QuadratureGrid, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != grid.len() {
            return Err(Error::Mismatch(format!("{} potentials for {} nodes", phi.len(), grid.len())));
        }
        if phi.iter().any(|p| p.is_nan()) {
            return Err(Error::NonFinite { step: 0, time: 0.0 });
        }
        let phi_min = phi.iter().copied().fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = if phi_min.is_infinite() {
            // every node is infinitely unlikely; fall back to the prior
            grid.prior.clone()
        } else {
            grid.prior
                .iter()
                .zip(&phi)
                .map(|(p, f)| p * (-(f - phi_min).min(PHI_CLAMP)).exp())
                .collect()
        };
        let sum: f64 = raw.iter().sum();
        Ok(Self {
            grid: grid.clone(),
            log_normalizer: sum.ln() - phi_min,
            weights: raw.iter().map(|w| w / sum).collect(),
            phi,
        })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.grid.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn potentials(&self) -> &[f64] {
        &self.phi
    }

    /// `Z = Σ_i p_i e^{-Φ_i}` against the normalized prior weights.
    pub fn normalizer(&self) -> f64 {
        self.log_normalizer.exp()
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mean(&self) -> Vec<f64> {
        let d = self.grid.spec.dim();
        let mut m = vec![0.0; d];
        for (node, w) in self.grid.nodes.iter().zip(&self.weights) {
            for (mi, x) in m.iter_mut().zip(node) {
                *mi += w * x;
            }
        }
        m
    }

    pub fn mass_where(&self, mut inside: impl FnMut(&[f64]) -> bool) -> f64 {
        self.grid
            .nodes
            .iter()
            .zip(&self.weights)
            .filter(|(n, _)| inside(n))
            .map(|(_, w)| w)
            .sum()
    }

    /// Posterior mass of the closed `H^s` ball about `center`.
    pub fn ball_mass(&self, center: &[f64], radius: f64, s: f64) -> f64 {
        let space = &self.grid.spec.space;
        self.mass_where(|n| space.distance(n, center, s) <= radius)
    }

    pub fn prior_mass_where(&self, mut inside: impl FnMut(&[f64]) -> bool) -> f64 {
        self.grid
            .nodes
            .iter()
            .zip(&self.grid.prior)
            .filter(|(n, _)| inside(n))
            .map(|(_, w)| w)
            .sum()
    }

    /// Total-variation distance between posterior and prior node weights.
    pub fn tv_to_prior(&self) -> f64 {
        0.5 * self
            .weights
            .iter()
            .zip(&self.grid.prior)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    pub fn report(&self, balls: &[(String, Vec<f64>, f64, f64)]) -> QuadratureReport {
        QuadratureReport {
            normalizer: self.normalizer(),
            log_normalizer: self.log_normalizer,
            mean: self.mean(),
            ball_masses: balls
                .iter()
                .map(|(id, c, r, s)| BallMass {
                    center_id: id.clone(),
                    radius: *r,
                    norm: *s,
                    mass: self.ball_mass(c, *r, *s),
                })
                .collect(),
            nodes: self.grid.len(),
            grid_per_dim: self.grid.per_dim,
        }
    }
}

/// Evaluates `Φ` at every in-support node (in parallel, order preserved).
pub fn quadrature_posterior(
    spec: &PriorSpec,
    pot: &impl PotentialFn,
    grid_per_dim: usize,
) -> Result<QuadraturePosterior> {
    let grid = QuadratureGrid::new(spec, grid_per_dim)?;
    let phi = grid
        .nodes
        .par_iter()
        .map(|n| pot.phi(n))
        .collect::<Result<Vec<f64>>>()?;
    QuadraturePosterior::from_potentials(&grid, phi)
}
