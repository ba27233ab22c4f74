use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use super::design::{DesignPoint, ObservationDesign};
use super::forward::{ForwardModel, Pairing};
use crate::error::{Error, Result};
use crate::field::FourierVelocityField;
use crate::io::write_atomic;
use crate::rng::{stream, NOISE_STREAM};

/// One data value: where and when, which initial condition, and the
/// noise-free and noisy values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub t: f64,
    pub x: [f64; 2],
    /// 0 for the first initial condition, 1 for the second.
    pub ic: usize,
    pub g_true: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    design: ObservationDesign,
    pairing: Pairing,
    sigma_eta: f64,
    noise_seed: u64,
    data: Vec<Observation>,
}

/// `Y_j = G_j(v⋆) + η_j` with `η_j ~ N(0, σ²)` drawn from the noise stream.
pub fn synthesize_data(
    v_star: &FourierVelocityField,
    design: &ObservationDesign,
    model: &ForwardModel,
    sigma_eta: f64,
    noise_seed: u64,
) -> Result<ObservationSet> {
    if !(sigma_eta >= 0.0 && sigma_eta.is_finite()) {
        return Err(Error::config("sigma_eta", "must be non-negative and finite"));
    }
    let g = model.forward_map(v_star, design)?;
    let layout = model.layout(design.len());
    let mut rng = stream(noise_seed, NOISE_STREAM);
    let data = layout
        .iter()
        .zip(g)
        .map(|(&(p, ic), g_true)| {
            let eta: f64 = rng.sample(StandardNormal);
            let point = design.points()[p];
            Observation {
                t: point.t,
                x: point.x,
                ic,
                g_true,
                y: g_true + sigma_eta * eta,
            }
        })
        .collect();
    Ok(ObservationSet {
        design: design.clone(),
        pairing: model.pairing(),
        sigma_eta,
        noise_seed,
        data,
    })
}

impl ObservationSet {
    /// A set with no data, e.g. for sampling the prior through the posterior
    /// machinery.
    pub fn empty(sigma_eta: f64, t_final: f64) -> Self {
        Self {
            design: ObservationDesign::from_points(Vec::new(), 0, t_final).expect("empty design"),
            pairing: Pairing::SamePoint,
            sigma_eta,
            noise_seed: 0,
            data: Vec::new(),
        }
    }

    pub fn design(&self) -> &ObservationDesign {
        &self.design
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn sigma_eta(&self) -> f64 {
        self.sigma_eta
    }

    pub fn noise_seed(&self) -> u64 {
        self.noise_seed
    }

    pub fn data(&self) -> &[Observation] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.data.iter().map(|o| o.y).collect()
    }

    /// The first `n` data values together with the points they use.
    pub fn prefix(&self, n: usize) -> Self {
        let n = n.min(self.data.len());
        let points = match self.pairing {
            Pairing::SamePoint => self.data[..n]
                .iter()
                .filter(|o| o.ic == 0)
                .count()
                .max(self.data[..n].iter().filter(|o| o.ic == 1).count()),
            Pairing::Alternating => n,
        };
        Self {
            design: self.design.prefix(points),
            pairing: self.pairing,
            sigma_eta: self.sigma_eta,
            noise_seed: self.noise_seed,
            data: self.data[..n].to_vec(),
        }
    }

    /// Same data with every `Y_j` replaced; used for likelihood-shift and
    /// scaling checks.
    pub fn with_values(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.data.len() {
            return Err(Error::Mismatch(format!("{} values for {} data", values.len(), self.data.len())));
        }
        let mut out = self.clone();
        for (o, &y) in out.data.iter_mut().zip(values) {
            o.y = y;
        }
        Ok(out)
    }

    pub fn with_sigma(&self, sigma_eta: f64) -> Self {
        Self {
            sigma_eta,
            ..self.clone()
        }
    }

    /// CSV: a `#` header with σ and seeds, then `j,t,x1,x2,ic,G_true,Y` with
    /// 1-based `j` and `ic`. Floats use the shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# sigma_eta={},design_seed={},noise_seed={},t_final={},n_points={},pairing={}\n",
            self.sigma_eta,
            self.design.seed(),
            self.noise_seed,
            self.design.t_final(),
            self.design.len(),
            match self.pairing {
                Pairing::SamePoint => "same-point",
                Pairing::Alternating => "alternating",
            }
        );
        s.push_str("j,t,x1,x2,ic,G_true,Y\n");
        for (j, o) in self.data.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{},{},{},{}", j + 1, o.t, o.x[0], o.x[1], o.ic + 1, o.g_true, o.y);
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |reason: String| Error::parse("observation file", reason);
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| bad("missing `#` header".into()))?;
        let mut fields = std::collections::HashMap::new();
        for item in header.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("header item `{item}`")))?;
            fields.insert(k.trim(), v.trim());
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(format!("header lacks `{k}`")));
        let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(format!("`{k}` is not a number"))) };
        let int = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| bad(format!("`{k}` is not an integer"))) };
        let sigma_eta = num("sigma_eta")?;
        let design_seed = int("design_seed")?;
        let noise_seed = int("noise_seed")?;
        let t_final = num("t_final")?;
        let n_points = int("n_points")? as usize;
        let pairing = match get("pairing")? {
            "same-point" => Pairing::SamePoint,
            "alternating" => Pairing::Alternating,
            other => return Err(bad(format!("unknown pairing `{other}`"))),
        };
        if lines.next().map(str::trim) != Some("j,t,x1,x2,ic,G_true,Y") {
            return Err(bad("missing column header".into()));
        }
        let mut data = Vec::new();
        for (row, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(bad(format!("row {} has {} columns", row + 1, cols.len())));
            }
            let f = |i: usize| -> Result<f64> { cols[i].trim().parse().map_err(|_| bad(format!("row {}: `{}`", row + 1, cols[i]))) };
            let ic: usize = cols[4].trim().parse().map_err(|_| bad(format!("row {}: ic", row + 1)))?;
            if !(1..=2).contains(&ic) {
                return Err(bad(format!("row {}: ic must be 1 or 2", row + 1)));
            }
            data.push(Observation {
                t: f(1)?,
                x: [f(2)?, f(3)?],
                ic: ic - 1,
                g_true: f(5)?,
                y: f(6)?,
            });
        }
        let mut points: Vec<DesignPoint> = Vec::with_capacity(n_points);
        for o in &data {
            let fresh = match pairing {
                Pairing::SamePoint => o.ic == 0 || points.is_empty(),
                Pairing::Alternating => true,
            };
            if fresh && points.len() < n_points {
                points.push(DesignPoint { t: o.t, x: o.x });
            }
        }
        if points.len() != n_points {
            return Err(bad(format!("header says {n_points} points, rows give {}", points.len())));
        }
        Ok(Self {
            design: ObservationDesign::from_points(points, design_seed, t_final)?,
            pairing,
            sigma_eta,
            noise_seed,
            data,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}
