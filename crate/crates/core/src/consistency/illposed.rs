use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::SeedSet;
use super::setup::LabConfig;
use crate::advect::{solve, IcPair};
use crate::error::{Error, Result};
use crate::field::{FourierScalarField, ModeLattice, Wavevector};
use crate::inference::{ParameterSpace, PriorSpec, QuadratureGrid, QuadraturePosterior};
use crate::observe::{sample_design, synthesize_data, ForwardModel};

/// A one-parameter velocity family together with an initial condition it
/// leaves invisible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IllposedCase {
    /// Cellular flows `c (cos 2πx2, −cos 2πx1)` with `θ0 = sin 2πx1 + sin 2πx2`.
    Radial,
    /// Shears `(0, c cos 2πx1)` with `θ0 = sin 2πx1`.
    Laminar,
}

impl IllposedCase {
    fn family(self) -> ParameterSpace {
        match self {
            Self::Radial => ParameterSpace::cellular(),
            Self::Laminar => ParameterSpace::laminar(),
        }
    }

    fn invisible_ic(self, lattice: ModeLattice) -> Result<FourierScalarField> {
        let s1 = FourierScalarField::sine(lattice, Wavevector::new(1, 0), 1.0)?;
        match self {
            Self::Radial => s1.add(&FourierScalarField::sine(lattice, Wavevector::new(0, 1), 1.0)?),
            Self::Laminar => Ok(s1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IllposednessReport {
    pub case: IllposedCase,
    pub c_values: Vec<f64>,
    /// Largest sup-norm gap between the trajectories for different `c`,
    /// over all snapshots.
    pub trajectory_gap: f64,
    pub truth: f64,
    pub n_data: usize,
    /// Total variation between posterior and prior with the invisible IC only.
    pub single_ic_tv: f64,
    /// Same with the canonical pair.
    pub paired_tv: f64,
    /// Paired-posterior mass within `0.1 R` of the truth.
    pub paired_mass_near_truth: f64,
    pub prior_mass_near_truth: f64,
}

/// Shows that one initial condition cannot separate a velocity family while
/// the canonical pair can.
pub fn illposedness_demo(
    lab: &LabConfig,
    case: IllposedCase,
    c_values: &[f64],
    truth: f64,
    n_data: usize,
    seeds: &SeedSet,
) -> Result<IllposednessReport> {
    seeds.validate()?;
    if n_data == 0 {
        return Err(Error::config("n_data", "must be positive"));
    }
    let config = lab.solver_config()?;
    let lattice = ModeLattice::new(lab.k_max);
    let family = case.family();
    let spec = PriorSpec::uniform(family.clone(), lab.prior_radius, lab.m_star)?;
    if !spec.contains(&[truth]) {
        return Err(Error::config("truth", "lies outside the prior support"));
    }
    let grid = QuadratureGrid::new(&spec, lab.grid_per_dim)?;
    let estimated = c_values.len() + 3 * (grid.len() + 1);
    if estimated > lab.budget {
        return Err(Error::Budget { estimated, budget: lab.budget });
    }
    let theta0 = case.invisible_ic(lattice)?;

    let trajectories = c_values
        .par_iter()
        .map(|&c| solve(&family.to_field(&[c]), &theta0, "invisible", &config, &[]))
        .collect::<Result<Vec<_>>>()?;
    let mut gap = 0.0f64;
    for a in &trajectories {
        for b in &trajectories {
            for (x, y) in a.snapshots().iter().zip(b.snapshots()) {
                gap = gap.max(x.field.sub(&y.field)?.sup_norm());
            }
        }
    }

    let single = ForwardModel::single(theta0, "invisible", config.clone())?;
    let paired = ForwardModel::new(&IcPair::canonical(lattice)?, config)?;
    let posterior = |model: &ForwardModel| -> Result<QuadraturePosterior> {
        let design = sample_design(model.points_for_data(n_data), lab.t_final, seeds.design[0])?;
        let obs = synthesize_data(&family.to_field(&[truth]), &design, model, lab.sigma_eta, seeds.noise[0])?
            .prefix(n_data);
        let y = obs.values();
        let sigma_sq = lab.sigma_eta * lab.sigma_eta;
        let phi = grid
            .nodes()
            .par_iter()
            .map(|node| {
                let g = model.forward_map(&family.to_field(node), &design)?;
                let sse: f64 = y.iter().zip(&g).map(|(y, g)| (y - g).powi(2)).sum();
                Ok(if sigma_sq == 0.0 {
                    if sse == 0.0 { 0.0 } else { f64::INFINITY }
                } else {
                    sse / (2.0 * sigma_sq)
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        QuadraturePosterior::from_potentials(&grid, phi)
    };
    let single_post = posterior(&single)?;
    let paired_post = posterior(&paired)?;
    let near = 0.1 * lab.prior_radius;
    Ok(IllposednessReport {
        case,
        c_values: c_values.to_vec(),
        trajectory_gap: gap,
        truth,
        n_data,
        single_ic_tv: single_post.tv_to_prior(),
        paired_tv: paired_post.tv_to_prior(),
        paired_mass_near_truth: paired_post.ball_mass(&[truth], near, lab.m),
        prior_mass_near_truth: paired_post.prior_mass_where(|n| family.distance(n, &[truth], lab.m) < near),
    })
}
