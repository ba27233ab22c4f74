use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::advect::{IcPair, SolverConfig};
use crate::error::{Error, Result};
use crate::field::{FourierScalarField, ModeLattice, SobolevIndices, Wavevector};
use crate::inference::{ParameterSpace, PriorKind, PriorSpec};
use crate::observe::{ForwardModel, Pairing};

/// Everything an experiment needs besides seeds and its own parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    pub kappa: f64,
    pub t_final: f64,
    /// Solver truncation.
    pub k_max: usize,
    pub dt_max: Option<f64>,
    pub grid_n: Option<usize>,
    pub checkpoint_spacing: Option<f64>,
    /// `shear`, `cellular`, `laminar` or `full`.
    pub parameter_space: String,
    pub k_param: usize,
    pub prior: PriorKind,
    pub prior_radius: f64,
    pub prior_center: Option<Vec<f64>>,
    pub m: f64,
    pub m_star: f64,
    pub s_ic: f64,
    pub sigma_eta: f64,
    pub v_star: Vec<f64>,
    pub grid_per_dim: usize,
    /// `canonical`, `diagonal`, `repeated`, or `custom` to use `ic_modes`.
    pub ic_pair: String,
    /// Two lists of `[k1, k2, re, im]` coefficients for a custom pair.
    pub ic_modes: Option<[Vec<[f64; 4]>; 2]>,
    pub pairing: Pairing,
    /// Largest number of PDE solves an experiment may request.
    pub budget: usize,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            kappa: 0.05,
            t_final: 0.03,
            k_max: 4,
            dt_max: None,
            grid_n: None,
            checkpoint_spacing: None,
            parameter_space: "shear".into(),
            k_param: 1,
            prior: PriorKind::Uniform,
            prior_radius: 1.0,
            prior_center: None,
            m: 2.0,
            m_star: 3.0,
            s_ic: 2.0,
            sigma_eta: 0.05,
            v_star: vec![0.2, -0.15],
            grid_per_dim: 21,
            ic_pair: "canonical".into(),
            ic_modes: None,
            pairing: Pairing::SamePoint,
            budget: 100_000,
        }
    }
}

/// Named initial-condition pairs.
pub fn ic_pair_preset(name: &str, lattice: ModeLattice) -> Result<IcPair> {
    let sine = |k1, k2| FourierScalarField::sine(lattice, Wavevector::new(k1, k2), 1.0);
    match name {
        "canonical" => IcPair::canonical(lattice),
        "diagonal" => Ok(IcPair::new(sine(1, 0)?, "sin-x1", sine(1, 1)?, "sin-x1+x2")),
        "repeated" => Ok(IcPair::new(sine(1, 0)?, "sin-x1", sine(1, 0)?, "sin-x1")),
        other => Err(Error::config("ic_pair", format!("unknown preset `{other}` (canonical | diagonal | repeated)"))),
    }
}

impl LabConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver_config()?.validate()?;
        SobolevIndices::new(self.m, self.m_star, self.s_ic)?;
        let prior = self.prior_spec()?;
        if self.v_star.len() != prior.dim() {
            return Err(Error::config("v_star", format!("needs {} entries", prior.dim())));
        }
        if !(self.sigma_eta >= 0.0 && self.sigma_eta.is_finite()) {
            return Err(Error::config("sigma_eta", "must be non-negative and finite"));
        }
        self.ic_pair()?;
        Ok(())
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut c = SolverConfig::new(self.kappa, self.t_final, self.k_max);
        if let Some(dt) = self.dt_max {
            c = c.with_dt_max(dt);
        }
        if let Some(n) = self.grid_n {
            c = c.with_grid_n(n);
        }
        if let Some(h) = self.checkpoint_spacing {
            c = c.with_checkpoint_spacing(h);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn space(&self) -> Result<ParameterSpace> {
        ParameterSpace::from_name(&self.parameter_space, self.k_param)
    }

    pub fn prior_spec(&self) -> Result<PriorSpec> {
        let space = self.space()?;
        let center = self.prior_center.clone().unwrap_or_else(|| vec![0.0; space.dim()]);
        let spec = PriorSpec {
            space,
            center,
            radius: self.prior_radius,
            m_star: self.m_star,
            kind: self.prior,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ic_pair(&self) -> Result<IcPair> {
        let lattice = ModeLattice::new(self.k_max);
        match (self.ic_pair.as_str(), &self.ic_modes) {
            ("custom", Some([a, b])) => Ok(IcPair::new(
                custom_field(lattice, a)?,
                "custom-1",
                custom_field(lattice, b)?,
                "custom-2",
            )),
            ("custom", None) => Err(Error::config("ic_modes", "required when ic_pair = \"custom\"")),
            (name, _) => ic_pair_preset(name, lattice),
        }
    }

    /// Forward model with the spanning check enforced.
    pub fn forward_model(&self) -> Result<ForwardModel> {
        Ok(ForwardModel::new(&self.ic_pair()?, self.solver_config()?)?.with_pairing(self.pairing))
    }
}

/// Scalar field from `[k1, k2, re, im]` entries; conjugates are implied.
pub fn custom_field(lattice: ModeLattice, modes: &[[f64; 4]]) -> Result<FourierScalarField> {
    let mut field = FourierScalarField::zeros(lattice);
    for &[k1, k2, re, im] in modes {
        if k1.fract() != 0.0 || k2.fract() != 0.0 {
            return Err(Error::config("ic_modes", "wavevector entries must be integers"));
        }
        field
            .set_pair(Wavevector::new(k1 as i32, k2 as i32), Complex64::new(re, im))
            .map_err(|e| Error::config("ic_modes", e.to_string()))?;
    }
    Ok(field)
}

/// Median; the mean of the middle pair for even counts. NaN for no data.
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
