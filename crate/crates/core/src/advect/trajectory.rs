use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::solver::PairedTrajectory;
use crate::error::{Error, Result};
use crate::field::FourierScalarField;
use crate::io::write_atomic;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: FourierScalarField,
}

/// Scalar snapshots at strictly increasing times starting at `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTrajectory {
    config: SolverConfig,
    ic_id: String,
    dt_used: f64,
    steps: usize,
    snapshots: Vec<Snapshot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub t: f64,
    pub l2_sq: f64,
    pub dissipation_integral: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub ic_id: String,
    pub kappa: f64,
    pub t_final: f64,
    pub dt_max: f64,
    pub dt: f64,
    pub steps: usize,
    pub grid_n: usize,
    pub k_max: usize,
    pub times: Vec<f64>,
    pub files: Vec<String>,
}

impl ScalarTrajectory {
    pub(crate) fn new(
        config: SolverConfig,
        ic_id: String,
        dt_used: f64,
        steps: usize,
        snapshots: Vec<Snapshot>,
    ) -> Self {
        debug_assert!(snapshots.windows(2).all(|w| w[0].t < w[1].t));
        Self {
            config,
            ic_id,
            dt_used,
            steps,
            snapshots,
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn ic_id(&self) -> &str {
        &self.ic_id
    }

    pub fn dt_used(&self) -> f64 {
        self.dt_used
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    /// Snapshot stored at exactly `t`, if any.
    pub fn at_time(&self, t: f64) -> Option<&FourierScalarField> {
        self.snapshots
            .binary_search_by(|s| s.t.total_cmp(&t))
            .ok()
            .map(|i| &self.snapshots[i].field)
    }

    pub fn final_state(&self) -> &FourierScalarField {
        &self.snapshots.last().expect("trajectory has a snapshot at t=0").field
    }

    pub fn max_sup_norm(&self) -> f64 {
        self.snapshots
            .iter()
            .map(|s| s.field.sup_norm())
            .fold(0.0, f64::max)
    }

    /// Residual of `‖θ(t)‖² + 2κ∫₀ᵗ‖∇θ‖² ds − ‖θ0‖²`, with the time integral
    /// taken by composite Simpson over pairs of (possibly unequal) snapshot
    /// intervals. A trailing odd interval is integrated with the quadratic
    /// through its last three snapshots.
    pub fn energy_report(&self) -> Vec<EnergyRecord> {
        let kappa = self.config.kappa;
        let times = self.times();
        let grad: Vec<f64> = self.snapshots.iter().map(|s| s.field.grad_norm_sq()).collect();
        let cumulative = cumulative_integral(&times, &grad);
        let l2_0 = self.snapshots[0].field.l2_norm_sq();
        self.snapshots
            .iter()
            .zip(cumulative)
            .map(|(s, integral)| {
                let l2_sq = s.field.l2_norm_sq();
                let dissipation_integral = 2.0 * kappa * integral;
                EnergyRecord {
                    t: s.t,
                    l2_sq,
                    dissipation_integral,
                    residual: l2_sq + dissipation_integral - l2_0,
                }
            })
            .collect()
    }

    /// Writes `manifest.json` and one field CSV per snapshot into `dir`.
    pub fn export(&self, dir: &Path) -> Result<TrajectoryManifest> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::with_capacity(self.snapshots.len());
        for (i, s) in self.snapshots.iter().enumerate() {
            let name = format!("snapshot_{i:05}.csv");
            write_atomic(&dir.join(&name), s.field.to_csv().as_bytes())?;
            files.push(name);
        }
        let manifest = TrajectoryManifest {
            ic_id: self.ic_id.clone(),
            kappa: self.config.kappa,
            t_final: self.config.t_final,
            dt_max: self.config.dt_max,
            dt: self.dt_used,
            steps: self.steps,
            grid_n: self.config.grid_n,
            k_max: self.config.k_max,
            times: self.times(),
            files,
        };
        write_atomic(
            &dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)?.as_bytes(),
        )?;
        Ok(manifest)
    }
}

/// Integral of the quadratic through `(t0,f0), (t1,f1), (t2,f2)` over `[a, b]`.
fn quadratic_integral(t: [f64; 3], f: [f64; 3], a: f64, b: f64) -> f64 {
    // Newton form around t0: f0 + d1 (s - t0) + d2 (s - t0)(s - t1)
    let d1 = (f[1] - f[0]) / (t[1] - t[0]);
    let d2 = ((f[2] - f[1]) / (t[2] - t[1]) - d1) / (t[2] - t[0]);
    let anti = |s: f64| {
        let x = s - t[0];
        f[0] * x + 0.5 * d1 * x * x + d2 * (x * x * x / 3.0 - 0.5 * (t[1] - t[0]) * x * x)
    };
    anti(b) - anti(a)
}

/// Running integral `∫_{t_0}^{t_i} f` at every node.
fn cumulative_integral(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * (times[1] - times[0]) * (values[0] + values[1]);
        return out;
    }
    let mut i = 0;
    while i + 2 < n {
        let t = [times[i], times[i + 1], times[i + 2]];
        let f = [values[i], values[i + 1], values[i + 2]];
        out[i + 1] = out[i] + quadratic_integral(t, f, t[0], t[1]);
        out[i + 2] = out[i] + quadratic_integral(t, f, t[0], t[2]);
        i += 2;
    }
    if i + 1 < n {
        let t = [times[i - 1], times[i], times[i + 1]];
        let f = [values[i - 1], values[i], values[i + 1]];
        out[i + 1] = out[i] + quadratic_integral(t, f, t[1], t[2]);
    }
    out
}

fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// `∫₀ᵀ ∫ (θ_a − θ_b)² dx dt` for one component: Parseval in space,
/// trapezoid in time.
pub fn space_time_distance_sq(a: &ScalarTrajectory, b: &ScalarTrajectory) -> Result<f64> {
    if a.snapshots.len() != b.snapshots.len()
        || a.snapshots.iter().zip(&b.snapshots).any(|(x, y)| x.t != y.t)
    {
        return Err(Error::Mismatch("trajectories have different time grids".into()));
    }
    if a.config.k_max != b.config.k_max || a.config.t_final != b.config.t_final {
        return Err(Error::Mismatch("trajectories have different solver settings".into()));
    }
    let times = a.times();
    let values = a
        .snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(x, y)| {
            x.field
                .coeffs()
                .iter()
                .zip(y.field.coeffs())
                .map(|(p, q)| (p - q).norm_sqr())
                .sum()
        })
        .collect::<Vec<f64>>();
    Ok(trapezoid(&times, &values))
}

/// `‖S̃_a − S̃_b‖` in `L²([0,T] × T²)²`.
pub fn paired_distance_l2(a: &PairedTrajectory, b: &PairedTrajectory) -> Result<f64> {
    let first = space_time_distance_sq(&a.first, &b.first)?;
    let second = space_time_distance_sq(&a.second, &b.second)?;
    Ok((first + second).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_simpson_is_exact_for_quadratics() {
        let times = [0.0, 0.1, 0.35, 0.4, 0.9, 1.0];
        let f = |t: f64| 3.0 * t * t - t + 2.0;
        let anti = |t: f64| t * t * t - 0.5 * t * t + 2.0 * t;
        let values: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        let out = cumulative_integral(&times, &values);
        for (t, v) in times.iter().zip(out) {
            assert!((v - anti(*t)).abs() < 1e-14, "{t}: {v}");
        }
    }

    #[test]
    fn trapezoid_is_exact_for_linear_data() {
        let t = [0.0, 0.5, 2.0];
        let v = [1.0, 2.0, 5.0];
        assert!((trapezoid(&t, &v) - 6.0).abs() < 1e-15);
    }
}
