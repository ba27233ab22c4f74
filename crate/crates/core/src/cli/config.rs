use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::advect::ProductEvaluation;
use crate::consistency::{Experiment, IllposedCase, LabConfig, RecordConfig, SeedSet};
use crate::error::{Error, Result};
use crate::inference::{ChainConfig, PriorKind};
use crate::observe::Pairing;

/// Every knob of a run, as one flat TOML table. Unknown keys are rejected;
/// `kappa` and `t_final` have no default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub kappa: Option<f64>,
    pub t_final: Option<f64>,
    pub k_max: usize,
    pub dt_max: Option<f64>,
    pub grid_n: Option<usize>,
    pub checkpoint_spacing: Option<f64>,
    pub product: ProductEvaluation,

    /// Velocity for `solve`: `heat`, `radial-symmetry`, `laminar`,
    /// `cellular`, `v-star` or `file`.
    pub velocity: String,
    pub velocity_strength: f64,
    pub velocity_file: Option<PathBuf>,

    pub parameter_space: String,
    pub k_param: usize,
    /// `uniform` or `truncated-gaussian`.
    pub prior_kind: String,
    pub prior_tau0: f64,
    pub prior_alpha: f64,
    pub prior_radius: f64,
    pub prior_center: Option<Vec<f64>>,
    pub m: f64,
    pub m_star: f64,
    pub s_ic: f64,
    pub v_star: Vec<f64>,

    /// `canonical`, `diagonal`, `repeated` or `custom`.
    pub ic_pair: String,
    /// `[k1, k2, re, im]` rows for `ic_pair = "custom"`.
    pub ic_first: Option<Vec<[f64; 4]>>,
    pub ic_second: Option<Vec<[f64; 4]>>,

    pub sigma_eta: f64,
    pub n_points: usize,
    pub pairing: Pairing,
    pub design_seed: u64,
    pub noise_seed: u64,

    pub beta: f64,
    pub n_steps: usize,
    pub burn_in: usize,
    pub adapt: bool,
    pub chain_seeds: Vec<u64>,
    pub quadrature: bool,
    pub grid_per_dim: usize,
    pub epsilons: Vec<f64>,

    /// `contraction`, `identification`, `decomposition`, `ulln`,
    /// `illposedness`, `injectivity` or `posterior`.
    pub experiment: String,
    pub n_schedule: Vec<usize>,
    /// Replicate `r` uses seeds `design_seed + r` and `noise_seed + r`.
    pub replicates: usize,
    pub deltas: Vec<f64>,
    /// Velocity net for `decomposition` and `ulln`; defaults to a 3×3 net
    /// of spacing 0.1 about `v_star`.
    pub net: Option<Vec<Vec<f64>>>,
    pub ulln_scale: f64,
    pub illposed_case: IllposedCase,
    pub c_values: Vec<f64>,
    pub illposed_truth: f64,
    /// Data count for `illposedness` and `posterior` experiments.
    pub n_data: usize,
    /// Velocities for `injectivity`; defaults to a 5×5 grid on `[-0.4, 0.4]²`.
    pub injectivity_grid: Option<Vec<Vec<f64>>>,
    pub injectivity_tol: f64,
    pub budget: usize,

    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let lab = LabConfig::default();
        Self {
            kappa: None,
            t_final: None,
            k_max: lab.k_max,
            dt_max: None,
            grid_n: None,
            checkpoint_spacing: None,
            product: ProductEvaluation::Auto,
            velocity: "v-star".into(),
            velocity_strength: 1.0,
            velocity_file: None,
            parameter_space: lab.parameter_space,
            k_param: lab.k_param,
            prior_kind: "uniform".into(),
            prior_tau0: 0.5,
            prior_alpha: 4.5,
            prior_radius: lab.prior_radius,
            prior_center: None,
            m: lab.m,
            m_star: lab.m_star,
            s_ic: lab.s_ic,
            v_star: lab.v_star,
            ic_pair: lab.ic_pair,
            ic_first: None,
            ic_second: None,
            sigma_eta: lab.sigma_eta,
            n_points: 100,
            pairing: Pairing::SamePoint,
            design_seed: 1,
            noise_seed: 1001,
            beta: 0.2,
            n_steps: 10_000,
            burn_in: 1_000,
            adapt: true,
            chain_seeds: vec![2001],
            quadrature: true,
            grid_per_dim: lab.grid_per_dim,
            epsilons: vec![0.1],
            experiment: "contraction".into(),
            n_schedule: vec![100, 1_000, 10_000],
            replicates: 5,
            deltas: vec![0.05],
            net: None,
            ulln_scale: 1.0,
            illposed_case: IllposedCase::Radial,
            c_values: vec![0.0, 1.0, 5.0],
            illposed_truth: 0.5,
            n_data: 10_000,
            injectivity_grid: None,
            injectivity_tol: 1e-9,
            budget: lab.budget,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::parse("config", e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes to TOML")
    }

    pub fn kappa(&self) -> Result<f64> {
        self.kappa.ok_or_else(|| Error::config("kappa", "is required"))
    }

    pub fn t_final(&self) -> Result<f64> {
        self.t_final.ok_or_else(|| Error::config("t_final", "is required"))
    }

    pub fn validate(&self) -> Result<()> {
        let lab = self.lab_config()?;
        lab.solver_config()?.validate()?;
        lab.validate()?;
        self.chain_config(0, 0).validate()?;
        if self.chain_seeds.is_empty() {
            return Err(Error::config("chain_seeds", "needs at least one seed"));
        }
        if self.n_points == 0 {
            return Err(Error::config("n_points", "must be positive"));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be positive"));
        }
        if self.epsilons.iter().chain(&self.deltas).any(|x| !(*x > 0.0)) {
            return Err(Error::config("epsilons", "radii must be positive"));
        }
        if !matches!(
            self.velocity.as_str(),
            "heat" | "radial-symmetry" | "laminar" | "cellular" | "v-star" | "file"
        ) {
            return Err(Error::config(
                "velocity",
                "must be heat | radial-symmetry | laminar | cellular | v-star | file",
            ));
        }
        if self.velocity == "file" && self.velocity_file.is_none() {
            return Err(Error::config("velocity_file", "required when velocity = \"file\""));
        }
        self.experiment()?;
        Ok(())
    }

    pub fn prior(&self) -> Result<PriorKind> {
        match self.prior_kind.as_str() {
            "uniform" => Ok(PriorKind::Uniform),
            "truncated-gaussian" => Ok(PriorKind::TruncatedGaussian {
                tau0: self.prior_tau0,
                alpha: self.prior_alpha,
            }),
            other => Err(Error::config(
                "prior_kind",
                format!("unknown kind `{other}` (uniform | truncated-gaussian)"),
            )),
        }
    }

    pub fn lab_config(&self) -> Result<LabConfig> {
        let ic_modes = match (&self.ic_first, &self.ic_second) {
            (Some(a), Some(b)) => Some([a.clone(), b.clone()]),
            (None, None) => None,
            _ => return Err(Error::config("ic_second", "ic_first and ic_second go together")),
        };
        Ok(LabConfig {
            kappa: self.kappa()?,
            t_final: self.t_final()?,
            k_max: self.k_max,
            dt_max: self.dt_max,
            grid_n: self.grid_n,
            checkpoint_spacing: self.checkpoint_spacing,
            parameter_space: self.parameter_space.clone(),
            k_param: self.k_param,
            prior: self.prior()?,
            prior_radius: self.prior_radius,
            prior_center: self.prior_center.clone(),
            m: self.m,
            m_star: self.m_star,
            s_ic: self.s_ic,
            sigma_eta: self.sigma_eta,
            v_star: self.v_star.clone(),
            grid_per_dim: self.grid_per_dim,
            ic_pair: self.ic_pair.clone(),
            ic_modes,
            pairing: self.pairing,
            budget: self.budget,
        })
    }

    pub fn chain_config(&self, index: usize, seed: u64) -> ChainConfig {
        ChainConfig::new(self.beta, self.n_steps, seed)
            .with_burn_in(self.burn_in, self.adapt)
            .with_chain_index(index as u64)
    }

    pub fn seeds(&self) -> SeedSet {
        SeedSet {
            design: (0..self.replicates as u64).map(|r| self.design_seed + r).collect(),
            noise: (0..self.replicates as u64).map(|r| self.noise_seed + r).collect(),
            chain: self.chain_seeds.clone(),
        }
    }

    fn default_net(&self) -> Vec<Vec<f64>> {
        let mut net = Vec::new();
        for i in -1..=1 {
            for j in -1..=1 {
                let mut v = self.v_star.clone();
                v[0] += 0.1 * i as f64;
                if v.len() > 1 {
                    v[1] += 0.1 * j as f64;
                } else if j != 0 {
                    continue;
                }
                net.push(v);
            }
        }
        net
    }

    fn default_injectivity_grid(&self) -> Vec<Vec<f64>> {
        let axis: Vec<f64> = (0..5).map(|i| -0.4 + 0.2 * i as f64).collect();
        match self.v_star.len() {
            1 => axis.iter().map(|&a| vec![a]).collect(),
            _ => axis
                .iter()
                .flat_map(|&a| {
                    axis.iter().map(move |&b| {
                        let mut v = vec![0.0; self.v_star.len()];
                        v[0] = a;
                        v[1] = b;
                        v
                    })
                })
                .collect(),
        }
    }

    pub fn experiment(&self) -> Result<Experiment> {
        Ok(match self.experiment.as_str() {
            "contraction" => Experiment::Contraction {
                epsilons: self.epsilons.clone(),
            },
            "identification" => Experiment::Identification {
                deltas: self.deltas.clone(),
                epsilons: self.epsilons.clone(),
            },
            "decomposition" => Experiment::Decomposition {
                net: self.net.clone().unwrap_or_else(|| self.default_net()),
            },
            "ulln" => Experiment::Ulln {
                net: self.net.clone().unwrap_or_else(|| self.default_net()),
                scale: self.ulln_scale,
            },
            "illposedness" => Experiment::Illposedness {
                case: self.illposed_case,
                c_values: self.c_values.clone(),
                truth: self.illposed_truth,
                n_data: self.n_data,
            },
            "injectivity" => Experiment::Injectivity {
                grid: self
                    .injectivity_grid
                    .clone()
                    .unwrap_or_else(|| self.default_injectivity_grid()),
                tol: self.injectivity_tol,
            },
            "posterior" => Experiment::Posterior {
                n_data: self.n_data,
                beta: self.beta,
                n_steps: self.n_steps,
                burn_in: self.burn_in,
                adapt: self.adapt,
            },
            other => {
                return Err(Error::config(
                    "experiment",
                    format!(
                        "unknown experiment `{other}` (contraction | identification | decomposition | \
                         ulln | illposedness | injectivity | posterior)"
                    ),
                ))
            }
        })
    }

    pub fn record_config(&self) -> Result<RecordConfig> {
        Ok(RecordConfig {
            lab: self.lab_config()?,
            experiment: self.experiment()?,
        })
    }
}
