use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::SeedSet;
use super::setup::{median, LabConfig};
use super::sweep::check_schedule;
use crate::advect::{paired_distance_l2, paired_solve};
use crate::error::{Error, Result};
use crate::observe::{sample_design, synthesize_data};

/// `sup_v |Φ_N(v)·2σ²/N − (σ² + D(v)²/(2T))|` over a finite net, where
/// `D(v) = ‖S̃(v) − S̃(v⋆)‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTable {
    pub schedule: Vec<usize>,
    pub net: Vec<Vec<f64>>,
    /// `D(v)²` for each net member.
    pub d_sq: Vec<f64>,
    /// `[replicate][schedule index]`.
    pub sup_residual: Vec<Vec<f64>>,
    pub median_sup: Vec<f64>,
    pub decay_exponent: f64,
}

/// `sup_v |(1/N) Σ η_j f_j(v)|` with `f_j(v) = scale · (G_j(v⋆) − G_j(v))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UllnTable {
    pub schedule: Vec<usize>,
    pub scale: f64,
    pub sup: Vec<Vec<f64>>,
    pub median_sup: Vec<f64>,
    pub decay_exponent: f64,
}

/// `−slope` of the least-squares line through `(ln N, ln value)`; entries
/// with non-positive values are skipped.
pub fn fit_decay_exponent(schedule: &[usize], values: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = schedule
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > 0.0 && v.is_finite())
        .map(|(&n, &v)| ((n as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -sxy / sxx
}

struct NetData {
    /// Per replicate: data values, forward values at the truth, and forward
    /// values for each net member.
    replicates: Vec<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)>,
}

fn net_forward(lab: &LabConfig, net: &[Vec<f64>], schedule: &[usize], seeds: &SeedSet) -> Result<NetData> {
    lab.validate()?;
    check_schedule(schedule)?;
    seeds.validate()?;
    if net.is_empty() {
        return Err(Error::config("net", "must contain at least one velocity"));
    }
    let space = lab.space()?;
    if let Some(bad) = net.iter().find(|v| v.len() != space.dim()) {
        return Err(Error::Mismatch(format!("net member has {} entries, space has {}", bad.len(), space.dim())));
    }
    let model = lab.forward_model()?;
    let n_ics = model.ics().len();
    let estimated = (seeds.replicates() + 1) * (net.len() + 1) * n_ics;
    if estimated > lab.budget {
        return Err(Error::Budget { estimated, budget: lab.budget });
    }
    let v_star = space.to_field(&lab.v_star);
    let n_max = *schedule.last().expect("checked non-empty");
    let mut replicates = Vec::with_capacity(seeds.replicates());
    for r in 0..seeds.replicates() {
        let design = sample_design(model.points_for_data(n_max), lab.t_final, seeds.design[r])?;
        let obs = synthesize_data(&v_star, &design, &model, lab.sigma_eta, seeds.noise[r])?;
        let g_star: Vec<f64> = obs.data().iter().map(|o| o.g_true).collect();
        let g_net = net
            .par_iter()
            .map(|v| model.forward_map(&space.to_field(v), &design))
            .collect::<Result<Vec<_>>>()?;
        replicates.push((obs.values(), g_star, g_net));
    }
    Ok(NetData { replicates })
}

pub fn decomposition_residual(
    lab: &LabConfig,
    net: &[Vec<f64>],
    schedule: &[usize],
    seeds: &SeedSet,
) -> Result<DecompositionTable> {
    let data = net_forward(lab, net, schedule, seeds)?;
    let space = lab.space()?;
    let pair = lab.ic_pair()?;
    let config = lab.solver_config()?;
    let reference = paired_solve(&space.to_field(&lab.v_star), &pair, &config, &[])?;
    let d_sq = net
        .par_iter()
        .map(|v| {
            let traj = paired_solve(&space.to_field(v), &pair, &config, &[])?;
            Ok(paired_distance_l2(&traj, &reference)?.powi(2))
        })
        .collect::<Result<Vec<f64>>>()?;
    let sigma_sq = lab.sigma_eta * lab.sigma_eta;
    let limits: Vec<f64> = d_sq.iter().map(|d| sigma_sq + d / (2.0 * lab.t_final)).collect();

    let sup_residual: Vec<Vec<f64>> = data
        .replicates
        .iter()
        .map(|(y, _, g_net)| {
            let mut sups = vec![0.0f64; schedule.len()];
            for (g, limit) in g_net.iter().zip(&limits) {
                let mut sse = 0.0;
                let mut j = 0;
                for (i, &n) in schedule.iter().enumerate() {
                    while j < n {
                        sse += (y[j] - g[j]).powi(2);
                        j += 1;
                    }
                    sups[i] = sups[i].max((sse / n as f64 - limit).abs());
                }
            }
            sups
        })
        .collect();
    let median_sup = column_medians(&sup_residual, schedule.len());
    Ok(DecompositionTable {
        schedule: schedule.to_vec(),
        net: net.to_vec(),
        d_sq,
        decay_exponent: fit_decay_exponent(schedule, &median_sup),
        sup_residual,
        median_sup,
    })
}

pub fn ulln_check(
    lab: &LabConfig,
    net: &[Vec<f64>],
    schedule: &[usize],
    seeds: &SeedSet,
    scale: f64,
) -> Result<UllnTable> {
    let data = net_forward(lab, net, schedule, seeds)?;
    let sup: Vec<Vec<f64>> = data
        .replicates
        .iter()
        .map(|(y, g_star, g_net)| {
            let mut sups = vec![0.0f64; schedule.len()];
            for g in g_net {
                let mut acc = 0.0;
                let mut j = 0;
                for (i, &n) in schedule.iter().enumerate() {
                    while j < n {
                        let eta = y[j] - g_star[j];
                        acc += eta * scale * (g_star[j] - g[j]);
                        j += 1;
                    }
                    sups[i] = sups[i].max((acc / n as f64).abs());
                }
            }
            sups
        })
        .collect();
    let median_sup = column_medians(&sup, schedule.len());
    Ok(UllnTable {
        schedule: schedule.to_vec(),
        scale,
        decay_exponent: fit_decay_exponent(schedule, &median_sup),
        sup,
        median_sup,
    })
}

fn column_medians(rows: &[Vec<f64>], cols: usize) -> Vec<f64> {
    (0..cols)
        .map(|i| median(&rows.iter().map(|r| r[i]).collect::<Vec<_>>()))
        .collect()
}
