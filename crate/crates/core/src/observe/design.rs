use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, DESIGN_STREAM};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub t: f64,
    pub x: [f64; 2],
}

/// I.i.d. uniform points on `[0,T] × [0,1]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationDesign {
    points: Vec<DesignPoint>,
    seed: u64,
    t_final: f64,
}

pub fn sample_design(n: usize, t_final: f64, seed: u64) -> Result<ObservationDesign> {
    if n == 0 {
        return Err(Error::config("n_points", "a design needs at least one point"));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::config("t_final", "must be positive and finite"));
    }
    let mut rng = stream(seed, DESIGN_STREAM);
    let points = (0..n)
        .map(|_| {
            let t = rng.gen::<f64>() * t_final;
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            DesignPoint { t, x }
        })
        .collect();
    Ok(ObservationDesign {
        points,
        seed,
        t_final,
    })
}

impl ObservationDesign {
    /// A design from explicit points, e.g. read back from disk.
    pub fn from_points(points: Vec<DesignPoint>, seed: u64, t_final: f64) -> Result<Self> {
        if let Some(p) = points
            .iter()
            .find(|p| !(0.0..=t_final).contains(&p.t) || p.x.iter().any(|c| !c.is_finite()))
        {
            return Err(Error::config("design", format!("point {p:?} lies outside [0, {t_final}]")));
        }
        Ok(Self {
            points,
            seed,
            t_final,
        })
    }

    pub fn points(&self) -> &[DesignPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// The first `n` points; designs drawn with the same seed are nested.
    pub fn prefix(&self, n: usize) -> Self {
        Self {
            points: self.points[..n.min(self.points.len())].to_vec(),
            seed: self.seed,
            t_final: self.t_final,
        }
    }
}
