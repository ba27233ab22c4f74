use serde::{Deserialize, Serialize};

use super::design::{DesignPoint, ObservationDesign};
use super::spanning::{check_spanning, SpanningCheck, SpanningReport};
use crate::advect::{AdvectionSolver, IcPair, SolverConfig};
use crate::error::{Error, Result};
use crate::field::{FourierScalarField, FourierVelocityField};

/// How data values map onto design points when two initial conditions are
/// observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Both initial conditions at every point: data `2j, 2j+1` share point `j`.
    #[default]
    SamePoint,
    /// Data `j` uses point `j` and initial condition `j mod 2`.
    Alternating,
}

/// The interleaved parameter-to-observable map for a fixed set of initial
/// conditions and solver settings.
#[derive(Debug, Clone)]
pub struct ForwardModel {
    ics: Vec<FourierScalarField>,
    ic_ids: Vec<String>,
    config: SolverConfig,
    pairing: Pairing,
    spanning: Option<SpanningReport>,
}

impl ForwardModel {
    /// Two initial conditions; refuses a pair that fails the spanning check.
    pub fn new(pair: &IcPair, config: SolverConfig) -> Result<Self> {
        let report = check_spanning(pair, SpanningCheck::default());
        if !report.pass {
            return Err(Error::Spanning {
                fraction: report.fraction_below,
                threshold: report.threshold,
            });
        }
        let mut model = Self::with_spanning_override(pair, config)?;
        model.spanning = Some(report);
        Ok(model)
    }

    /// Two initial conditions without the spanning check, for demonstrations
    /// of what goes wrong without it.
    pub fn with_spanning_override(pair: &IcPair, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            ics: vec![pair.first.clone(), pair.second.clone()],
            ic_ids: vec![pair.first_id.clone(), pair.second_id.clone()],
            config,
            pairing: Pairing::SamePoint,
            spanning: None,
        })
    }

    /// A single observed initial condition.
    pub fn single(theta0: FourierScalarField, id: impl Into<String>, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            ics: vec![theta0],
            ic_ids: vec![id.into()],
            config,
            pairing: Pairing::SamePoint,
            spanning: None,
        })
    }

    pub fn with_pairing(mut self, pairing: Pairing) -> Self {
        self.pairing = pairing;
        self
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn ics(&self) -> &[FourierScalarField] {
        &self.ics
    }

    pub fn ic_ids(&self) -> &[String] {
        &self.ic_ids
    }

    pub fn spanning(&self) -> Option<&SpanningReport> {
        self.spanning.as_ref()
    }

    fn data_per_point(&self) -> usize {
        match self.pairing {
            Pairing::SamePoint => self.ics.len(),
            Pairing::Alternating => 1,
        }
    }

    /// `(point, ic)` for every data index of a design with `n_points` points.
    pub fn layout(&self, n_points: usize) -> Vec<(usize, usize)> {
        let per = self.data_per_point();
        let n_ics = self.ics.len();
        (0..n_points * per)
            .map(|j| match self.pairing {
                Pairing::SamePoint => (j / per, j % per),
                Pairing::Alternating => (j, j % n_ics),
            })
            .collect()
    }

    /// Design points needed to produce `n_data` values.
    pub fn points_for_data(&self, n_data: usize) -> usize {
        n_data.div_ceil(self.data_per_point())
    }

    /// `G(v)` for every data index of `design`, in interleaved order.
    pub fn forward_map(&self, v: &FourierVelocityField, design: &ObservationDesign) -> Result<Vec<f64>> {
        self.forward_map_points(v, design.points())
    }

    pub fn forward_map_points(&self, v: &FourierVelocityField, points: &[DesignPoint]) -> Result<Vec<f64>> {
        let layout = self.layout(points.len());
        let mut wanted: Vec<Vec<usize>> = vec![Vec::new(); self.ics.len()];
        for &(p, ic) in &layout {
            wanted[ic].push(p);
        }
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(self.ics.len());
        for (ic, pts) in wanted.iter().enumerate() {
            values.push(self.point_values(v, &self.ics[ic], points, pts)?);
        }
        let mut cursor = vec![0usize; self.ics.len()];
        Ok(layout
            .iter()
            .map(|&(_, ic)| {
                let value = values[ic][cursor[ic]];
                cursor[ic] += 1;
                value
            })
            .collect())
    }

    /// `θ(t_p, x_p)` for each listed point, from one solve.
    fn point_values(
        &self,
        v: &FourierVelocityField,
        theta0: &FourierScalarField,
        points: &[DesignPoint],
        which: &[usize],
    ) -> Result<Vec<f64>> {
        let mut order: Vec<usize> = (0..which.len()).collect();
        order.sort_by(|&a, &b| points[which[a]].t.total_cmp(&points[which[b]].t));
        let mut times: Vec<f64> = order.iter().map(|&i| points[which[i]].t).collect();
        times.dedup();
        let mut out = vec![0.0; which.len()];
        let mut next = 0;
        let mut solver = AdvectionSolver::new(v, &self.config)?;
        solver.integrate(theta0, &times, |_, t, field| {
            while next < order.len() && points[which[order[next]]].t == t {
                out[order[next]] = field.evaluate_at(points[which[order[next]]].x);
                next += 1;
            }
            Ok(())
        })?;
        Ok(out)
    }
}
