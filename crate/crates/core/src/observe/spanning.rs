use serde::{Deserialize, Serialize};

use crate::advect::IcPair;

/// Settings for the grid test of `(∇θ⁽¹⁾)⊥·∇θ⁽²⁾ ≠ 0` almost everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpanningCheck {
    pub grid_n: usize,
    /// `|d|` below `rel_tol · max|d|` counts as degenerate.
    pub rel_tol: f64,
    /// Number of zero curves the threshold allows for; each may cover
    /// `4·grid_n` grid points.
    pub curves: usize,
}

impl Default for SpanningCheck {
    fn default() -> Self {
        Self {
            grid_n: 64,
            rel_tol: 1e-3,
            curves: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpanningReport {
    pub min_abs: f64,
    pub max_abs: f64,
    pub fraction_below: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn check_spanning(pair: &IcPair, check: SpanningCheck) -> SpanningReport {
    let n = check.grid_n.max(1);
    let grad = |f: &crate::field::FourierScalarField| [f.derivative(0).synthesize(n), f.derivative(1).synthesize(n)];
    let [a1, a2] = grad(&pair.first);
    let [b1, b2] = grad(&pair.second);
    // (-∂₂θ⁽¹⁾, ∂₁θ⁽¹⁾) · ∇θ⁽²⁾
    let d: Vec<f64> = (0..n * n)
        .map(|i| (-a2[i] * b1[i] + a1[i] * b2[i]).abs())
        .collect();
    let max_abs = d.iter().copied().fold(0.0, f64::max);
    let min_abs = d.iter().copied().fold(f64::INFINITY, f64::min);
    let cut = check.rel_tol * max_abs;
    let below = d.iter().filter(|&&x| x <= cut).count();
    let fraction_below = below as f64 / (n * n) as f64;
    let threshold = (check.curves * 4 * n) as f64 / (n * n) as f64;
    SpanningReport {
        min_abs,
        max_abs,
        fraction_below,
        threshold,
        pass: max_abs > 0.0 && fraction_below <= threshold,
    }
}
