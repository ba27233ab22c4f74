use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::SeedSet;
use super::setup::{median, LabConfig};
use crate::advect::{paired_distance_l2, paired_solve, IcPair, PairedTrajectory, SolverConfig};
use crate::error::{Error, Result};
use crate::inference::{ParameterSpace, QuadratureGrid, QuadraturePosterior};
use crate::observe::{sample_design, synthesize_data};

/// Quadrature posteriors for every replicate and every data size, sharing
/// one grid and one forward solve per node and replicate.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub grid: QuadratureGrid,
    /// The truth actually used: snapped to the nearest node when it lies in
    /// the prior support.
    pub v_star: Vec<f64>,
    pub in_support: bool,
    pub schedule: Vec<usize>,
    /// `[replicate][schedule index]`.
    pub posteriors: Vec<Vec<QuadraturePosterior>>,
    pub prior: QuadraturePosterior,
}

/// `Φ_N` at every `N` of `schedule` from one residual pass.
pub(crate) fn prefix_potentials(y: &[f64], g: &[f64], schedule: &[usize], sigma: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(schedule.len());
    let mut sse = 0.0;
    let mut j = 0;
    for &n in schedule {
        while j < n {
            sse += (y[j] - g[j]).powi(2);
            j += 1;
        }
        out.push(if sigma == 0.0 {
            if sse == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            sse / (2.0 * sigma * sigma)
        });
    }
    out
}

pub(crate) fn check_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("n_schedule", "must be non-empty, positive and strictly increasing"));
    }
    Ok(())
}

pub fn posterior_sweep(lab: &LabConfig, schedule: &[usize], seeds: &SeedSet) -> Result<Sweep> {
    lab.validate()?;
    check_schedule(schedule)?;
    seeds.validate()?;
    let spec = lab.prior_spec()?;
    let grid = QuadratureGrid::new(&spec, lab.grid_per_dim)?;
    let model = lab.forward_model()?;
    let n_ics = model.ics().len();
    let estimated = seeds.replicates() * (grid.len() + 1) * n_ics;
    if estimated > lab.budget {
        return Err(Error::Budget { estimated, budget: lab.budget });
    }

    let in_support = spec.contains(&lab.v_star);
    let v_star = if in_support {
        grid.nearest_node(&lab.v_star, lab.m_star).to_vec()
    } else {
        log::warn!(
            "v_star lies outside the prior support (H^{} distance {:.4} > radius {}); \
             the posterior cannot contract to it",
            lab.m_star,
            spec.v_distance(&lab.v_star),
            spec.radius
        );
        lab.v_star.clone()
    };
    let v_star_field = spec.space.to_field(&v_star);
    let n_max = *schedule.last().expect("checked non-empty");

    let mut posteriors = Vec::with_capacity(seeds.replicates());
    for r in 0..seeds.replicates() {
        let design = sample_design(model.points_for_data(n_max), lab.t_final, seeds.design[r])?;
        let obs = synthesize_data(&v_star_field, &design, &model, lab.sigma_eta, seeds.noise[r])?;
        let y = obs.values();
        let phis = grid
            .nodes()
            .par_iter()
            .map(|node| {
                let g = model.forward_map(&spec.space.to_field(node), &design)?;
                Ok(prefix_potentials(&y, &g, schedule, lab.sigma_eta))
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let per_n = (0..schedule.len())
            .map(|i| QuadraturePosterior::from_potentials(&grid, phis.iter().map(|p| p[i]).collect()))
            .collect::<Result<Vec<_>>>()?;
        log::info!("replicate {r}: {} nodes, N up to {n_max}", grid.len());
        posteriors.push(per_n);
    }
    let prior = QuadraturePosterior::from_potentials(&grid, vec![0.0; grid.len()])?;
    Ok(Sweep {
        grid,
        v_star,
        in_support,
        schedule: schedule.to_vec(),
        posteriors,
        prior,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionSummary {
    pub epsilon: f64,
    /// `0` marks the prior.
    pub n: usize,
    pub masses: Vec<f64>,
    pub median_mass: f64,
    /// `H^m` distance from the posterior mean to the truth.
    pub mean_distances: Vec<f64>,
    pub median_mean_distance: f64,
}

/// Posterior mass of `{‖v − v⋆‖_{H^m} < ε}` per replicate and data size.
pub fn contraction_from_sweep(sweep: &Sweep, m: f64, epsilons: &[f64]) -> Vec<ContractionSummary> {
    let space = &sweep.grid.spec().space;
    let mut rows = Vec::new();
    for &eps in epsilons {
        let prior_mass = sweep.prior.ball_mass(&sweep.v_star, eps, m);
        let prior_dist = space.distance(&sweep.prior.mean(), &sweep.v_star, m);
        rows.push(ContractionSummary {
            epsilon: eps,
            n: 0,
            masses: vec![prior_mass],
            median_mass: prior_mass,
            mean_distances: vec![prior_dist],
            median_mean_distance: prior_dist,
        });
        for (i, &n) in sweep.schedule.iter().enumerate() {
            let masses: Vec<f64> = sweep
                .posteriors
                .iter()
                .map(|p| p[i].ball_mass(&sweep.v_star, eps, m))
                .collect();
            let dists: Vec<f64> = sweep
                .posteriors
                .iter()
                .map(|p| space.distance(&p[i].mean(), &sweep.v_star, m))
                .collect();
            rows.push(ContractionSummary {
                epsilon: eps,
                n,
                median_mass: median(&masses),
                masses,
                median_mean_distance: median(&dists),
                mean_distances: dists,
            });
        }
    }
    rows
}

pub fn contraction_experiment(
    lab: &LabConfig,
    schedule: &[usize],
    seeds: &SeedSet,
    epsilons: &[f64],
) -> Result<(Sweep, Vec<ContractionSummary>)> {
    let sweep = posterior_sweep(lab, schedule, seeds)?;
    let rows = contraction_from_sweep(&sweep, lab.m, epsilons);
    Ok((sweep, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationSummary {
    pub delta: f64,
    pub n: usize,
    pub masses: Vec<f64>,
    pub median_mass: f64,
}

/// Membership in `X_δ = {v : ‖S̃(v) − S̃(v⋆)‖_{L²} < δ}`.
pub struct XDeltaProbe {
    space: ParameterSpace,
    pair: IcPair,
    config: SolverConfig,
    reference: PairedTrajectory,
    pub delta: f64,
}

impl XDeltaProbe {
    pub fn new(lab: &LabConfig, v_star: &[f64], delta: f64) -> Result<Self> {
        let space = lab.space()?;
        let pair = lab.ic_pair()?;
        let config = lab.solver_config()?;
        let reference = paired_solve(&space.to_field(v_star), &pair, &config, &[])?;
        Ok(Self {
            space,
            pair,
            config,
            reference,
            delta,
        })
    }

    pub fn distance(&self, theta: &[f64]) -> Result<f64> {
        let traj = paired_solve(&self.space.to_field(theta), &self.pair, &self.config, &[])?;
        paired_distance_l2(&traj, &self.reference)
    }

    pub fn contains(&self, theta: &[f64]) -> Result<bool> {
        Ok(self.distance(theta)? < self.delta)
    }

    /// Paired distances of many parameters, in parallel.
    pub fn distances(&self, thetas: &[Vec<f64>]) -> Result<Vec<f64>> {
        thetas.par_iter().map(|t| self.distance(t)).collect()
    }
}

/// Posterior mass of `X_δ` for each `δ`, using the paired distance of every
/// grid node to the truth.
pub fn identification_from_sweep(
    sweep: &Sweep,
    distances: &[f64],
    deltas: &[f64],
) -> Vec<IdentificationSummary> {
    let mut rows = Vec::new();
    for &delta in deltas {
        let inside = |p: &QuadraturePosterior| -> f64 {
            p.weights()
                .iter()
                .zip(distances)
                .filter(|(_, &d)| d < delta)
                .map(|(w, _)| w)
                .sum()
        };
        let prior_mass = inside(&sweep.prior);
        rows.push(IdentificationSummary {
            delta,
            n: 0,
            masses: vec![prior_mass],
            median_mass: prior_mass,
        });
        for i in 0..sweep.schedule.len() {
            let masses: Vec<f64> = sweep.posteriors.iter().map(|p| inside(&p[i])).collect();
            rows.push(IdentificationSummary {
                delta,
                n: sweep.schedule[i],
                median_mass: median(&masses),
                masses,
            });
        }
    }
    rows
}

pub fn identification_experiment(
    lab: &LabConfig,
    schedule: &[usize],
    seeds: &SeedSet,
    deltas: &[f64],
) -> Result<(Sweep, Vec<f64>, Vec<IdentificationSummary>)> {
    let sweep = posterior_sweep(lab, schedule, seeds)?;
    let probe = XDeltaProbe::new(lab, &sweep.v_star, 0.0)?;
    let distances = probe.distances(sweep.grid.nodes())?;
    let rows = identification_from_sweep(&sweep, &distances, deltas);
    Ok((sweep, distances, rows))
}

/// Largest `δ` with `X_δ ⊆ {‖v − v⋆‖_{H^m} < ε}` over the grid nodes: the
/// smallest paired distance among nodes at least `ε` away. Infinite when no
/// node is that far.
pub fn largest_inclusion_delta(
    space: &ParameterSpace,
    nodes: &[Vec<f64>],
    distances: &[f64],
    v_star: &[f64],
    epsilon: f64,
    m: f64,
) -> f64 {
    nodes
        .iter()
        .zip(distances)
        .filter(|(n, _)| space.distance(n, v_star, m) >= epsilon)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min)
}
