use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::setup::LabConfig;
use crate::advect::{paired_distance_l2, paired_solve, PairedTrajectory};
use crate::error::{Error, Result};

/// Smallest paired distance over all pairs of distinct grid velocities,
/// with an error estimate from halving the checkpoint spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub velocities: usize,
    pub pairs: usize,
    pub min_distance: f64,
    pub min_pair: [usize; 2],
    /// Largest change of any pairwise distance when the checkpoint spacing
    /// is halved.
    pub error_estimate: f64,
    /// `min_distance / error_estimate`.
    pub margin: f64,
    /// Pairs whose distance is within `10 × error_estimate` of zero.
    pub violations: Vec<[usize; 2]>,
}

impl InjectivityReport {
    pub fn passes(&self, required_margin: f64) -> bool {
        self.margin >= required_margin
    }
}

/// Pairs are distinct when their `H^m` distance exceeds `tol`.
pub fn injectivity_probe(lab: &LabConfig, grid: &[Vec<f64>], tol: f64) -> Result<InjectivityReport> {
    let space = lab.space()?;
    if grid.len() < 2 {
        return Err(Error::config("grid", "needs at least two velocities"));
    }
    let estimated = 4 * grid.len();
    if estimated > lab.budget {
        return Err(Error::Budget { estimated, budget: lab.budget });
    }
    let pair = lab.ic_pair()?;
    let coarse = lab.solver_config()?;
    let h = coarse.checkpoint_spacing();
    let fine = coarse.clone().with_checkpoint_spacing(0.5 * h);
    let solve_all = |config| -> Result<Vec<PairedTrajectory>> {
        grid.par_iter()
            .map(|v| paired_solve(&space.to_field(v), &pair, config, &[]))
            .collect()
    };
    let coarse_traj = solve_all(&coarse)?;
    let fine_traj = solve_all(&fine)?;

    let mut pairs = 0;
    let mut found: Vec<([usize; 2], f64, f64)> = Vec::new();
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            if space.distance(&grid[i], &grid[j], lab.m) <= tol {
                continue;
            }
            pairs += 1;
            let dc = paired_distance_l2(&coarse_traj[i], &coarse_traj[j])?;
            let df = paired_distance_l2(&fine_traj[i], &fine_traj[j])?;
            found.push(([i, j], df, (dc - df).abs()));
        }
    }
    if found.is_empty() {
        return Err(Error::config("grid", "no pair of velocities is further apart than tol"));
    }
    let (min_pair, min_distance, _) = found
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    let largest = found.iter().map(|f| f.1).fold(0.0, f64::max);
    // Floor at round-off so the margin stays finite.
    let error_estimate = found
        .iter()
        .map(|f| f.2)
        .fold(0.0, f64::max)
        .max(1e-14 * largest.max(f64::MIN_POSITIVE));
    let violations = found
        .iter()
        .filter(|f| f.1 <= 10.0 * error_estimate)
        .map(|f| f.0)
        .collect();
    Ok(InjectivityReport {
        velocities: grid.len(),
        pairs,
        min_distance,
        min_pair,
        error_estimate,
        margin: min_distance / error_estimate,
        violations,
    })
}
