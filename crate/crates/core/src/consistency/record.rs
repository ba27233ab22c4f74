use std::fmt::Write as _;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::decomposition::{decomposition_residual, ulln_check};
use super::illposed::{illposedness_demo, IllposedCase};
use super::injectivity::injectivity_probe;
use super::setup::LabConfig;
use super::sweep::{contraction_from_sweep, identification_from_sweep, largest_inclusion_delta, posterior_sweep, XDeltaProbe};
use crate::error::{Error, Result};
use crate::inference::{pcn_chain, quadrature_posterior, sample_prior, ChainConfig, Potential};
use crate::observe::{sample_design, synthesize_data};
use crate::rng::{stream, PRIOR_STREAM};

/// Replicate `r` uses `design[r]` and `noise[r]`; chains use `chain`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSet {
    pub design: Vec<u64>,
    pub noise: Vec<u64>,
    #[serde(default)]
    pub chain: Vec<u64>,
}

impl SeedSet {
    /// `count` replicates with design seeds `base, base+1, …` and noise seeds
    /// offset by 1000.
    pub fn consecutive(base: u64, count: usize) -> Self {
        Self {
            design: (0..count as u64).map(|i| base + i).collect(),
            noise: (0..count as u64).map(|i| base + 1000 + i).collect(),
            chain: vec![base + 2000],
        }
    }

    pub fn replicates(&self) -> usize {
        self.design.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.design.is_empty() || self.design.len() != self.noise.len() {
            return Err(Error::config("seeds", "need equally many (at least one) design and noise seeds"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Posterior mass of `H^m` balls about the truth.
    Contraction { epsilons: Vec<f64> },
    /// Posterior mass of `X_δ`, and the largest inclusion `δ` per `ε`.
    Identification { deltas: Vec<f64>, epsilons: Vec<f64> },
    Decomposition { net: Vec<Vec<f64>> },
    Ulln { net: Vec<Vec<f64>>, scale: f64 },
    Illposedness { case: IllposedCase, c_values: Vec<f64>, truth: f64, n_data: usize },
    Injectivity { grid: Vec<Vec<f64>>, tol: f64 },
    /// pCN chains (one per chain seed) against the quadrature posterior.
    Posterior { n_data: usize, beta: f64, n_steps: usize, burn_in: usize, adapt: bool },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Contraction { .. } => "contraction",
            Self::Identification { .. } => "identification",
            Self::Decomposition { .. } => "decomposition",
            Self::Ulln { .. } => "ulln",
            Self::Illposedness { .. } => "illposedness",
            Self::Injectivity { .. } => "injectivity",
            Self::Posterior { .. } => "posterior",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordConfig {
    pub lab: LabConfig,
    pub experiment: Experiment,
}

/// The only fields that differ between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub created_unix_s: f64,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    /// Kind plus a digest of config, seeds and schedule.
    pub id: String,
    pub seeds: SeedSet,
    pub config: RecordConfig,
    pub schedule: Vec<usize>,
    pub summaries: Vec<Value>,
    pub timestamp: Timestamp,
}

/// Plot-ready CSV tables produced alongside a record, as `(file name, contents)`.
pub type Artifacts = Vec<(String, String)>;

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn to_values<T: Serialize>(rows: &[T]) -> Result<Vec<Value>> {
    rows.iter().map(|r| Ok(serde_json::to_value(r)?)).collect()
}

pub fn run_experiment(
    config: &RecordConfig,
    schedule: &[usize],
    seeds: &SeedSet,
) -> Result<(ExperimentRecord, Artifacts)> {
    let start = Instant::now();
    let lab = &config.lab;
    lab.validate()?;
    let mut artifacts = Artifacts::new();
    let summaries = match &config.experiment {
        Experiment::Contraction { epsilons } => {
            let sweep = posterior_sweep(lab, schedule, seeds)?;
            let rows = contraction_from_sweep(&sweep, lab.m, epsilons);
            let mut csv = String::from("epsilon,n,median_mass,median_mean_distance\n");
            for r in rows.iter().filter(|r| r.n > 0) {
                writeln!(csv, "{},{},{:e},{:e}", r.epsilon, r.n, r.median_mass, r.median_mean_distance).unwrap();
            }
            artifacts.push(("contraction.csv".into(), csv));
            let mut out = vec![serde_json::json!({
                "v_star_used": sweep.v_star,
                "in_support": sweep.in_support,
                "nodes": sweep.grid.len(),
            })];
            out.extend(to_values(&rows)?);
            out
        }
        Experiment::Identification { deltas, epsilons } => {
            let sweep = posterior_sweep(lab, schedule, seeds)?;
            let probe = XDeltaProbe::new(lab, &sweep.v_star, 0.0)?;
            let distances = probe.distances(sweep.grid.nodes())?;
            let rows = identification_from_sweep(&sweep, &distances, deltas);
            let space = lab.space()?;
            let inclusion: Vec<Value> = epsilons
                .iter()
                .map(|&eps| {
                    let d = largest_inclusion_delta(&space, sweep.grid.nodes(), &distances, &sweep.v_star, eps, lab.m);
                    serde_json::json!({ "epsilon": eps, "largest_delta": d })
                })
                .collect();
            let mut csv = String::from("delta,n,median_mass\n");
            for r in rows.iter().filter(|r| r.n > 0) {
                writeln!(csv, "{},{},{:e}", r.delta, r.n, r.median_mass).unwrap();
            }
            artifacts.push(("identification.csv".into(), csv));
            let mut out = vec![serde_json::json!({ "v_star_used": sweep.v_star, "inclusion": inclusion })];
            out.extend(to_values(&rows)?);
            out
        }
        Experiment::Decomposition { net } => {
            let table = decomposition_residual(lab, net, schedule, seeds)?;
            let mut csv = String::from("n,median_sup_residual\n");
            for (n, v) in table.schedule.iter().zip(&table.median_sup) {
                writeln!(csv, "{n},{v:e}").unwrap();
            }
            artifacts.push(("decomposition.csv".into(), csv));
            vec![serde_json::to_value(&table)?]
        }
        Experiment::Ulln { net, scale } => {
            let table = ulln_check(lab, net, schedule, seeds, *scale)?;
            let mut csv = String::from("n,median_sup\n");
            for (n, v) in table.schedule.iter().zip(&table.median_sup) {
                writeln!(csv, "{n},{v:e}").unwrap();
            }
            artifacts.push(("ulln.csv".into(), csv));
            vec![serde_json::to_value(&table)?]
        }
        Experiment::Illposedness { case, c_values, truth, n_data } => {
            vec![serde_json::to_value(illposedness_demo(lab, *case, c_values, *truth, *n_data, seeds)?)?]
        }
        Experiment::Injectivity { grid, tol } => vec![serde_json::to_value(injectivity_probe(lab, grid, *tol)?)?],
        Experiment::Posterior { n_data, beta, n_steps, burn_in, adapt } => {
            let (summary, traces) = posterior_comparison(lab, seeds, *n_data, *beta, *n_steps, *burn_in, *adapt)?;
            artifacts.extend(traces);
            vec![summary]
        }
    };
    let canonical = serde_json::to_vec(&(config, seeds, schedule))?;
    let record = ExperimentRecord {
        id: format!("{}-{}", config.experiment.kind(), &digest(&canonical)[..12]),
        seeds: seeds.clone(),
        config: config.clone(),
        schedule: schedule.to_vec(),
        summaries,
        timestamp: Timestamp {
            created_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64()),
            wall_clock_s: start.elapsed().as_secs_f64(),
        },
    };
    Ok((record, artifacts))
}

fn posterior_comparison(
    lab: &LabConfig,
    seeds: &SeedSet,
    n_data: usize,
    beta: f64,
    n_steps: usize,
    burn_in: usize,
    adapt: bool,
) -> Result<(Value, Artifacts)> {
    seeds.validate()?;
    if seeds.chain.is_empty() {
        return Err(Error::config("seeds.chain", "needs at least one chain seed"));
    }
    let spec = lab.prior_spec()?;
    let model = lab.forward_model()?;
    let n_ics = model.ics().len();
    let nodes_estimate = lab.grid_per_dim.pow(spec.dim() as u32);
    let estimated = n_ics * (nodes_estimate + seeds.chain.len() * n_steps + 1);
    if estimated > lab.budget {
        return Err(Error::Budget { estimated, budget: lab.budget });
    }
    let design = sample_design(model.points_for_data(n_data), lab.t_final, seeds.design[0])?;
    let obs = synthesize_data(&spec.space.to_field(&lab.v_star), &design, &model, lab.sigma_eta, seeds.noise[0])?
        .prefix(n_data);
    let pot = Potential::new(obs, model, spec.space.clone())?;
    let quad = quadrature_posterior(&spec, &pot, lab.grid_per_dim)?;
    let quad_mean = quad.mean();
    let quad_sd: Vec<f64> = (0..spec.dim())
        .map(|i| {
            let second: f64 = quad.nodes().iter().zip(quad.weights()).map(|(n, w)| w * n[i] * n[i]).sum();
            (second - quad_mean[i] * quad_mean[i]).max(0.0).sqrt()
        })
        .collect();

    let mut artifacts = Artifacts::new();
    let mut chains = Vec::new();
    for (c, &seed) in seeds.chain.iter().enumerate() {
        let config = ChainConfig::new(beta, n_steps, seed)
            .with_burn_in(burn_in, adapt)
            .with_chain_index(c as u64);
        let init = sample_prior(&spec, &mut stream(seed, PRIOR_STREAM))?;
        let result = pcn_chain(&spec, &pot, &config, &mut config.rng(), init)?;
        let csv = result.to_csv();
        let mean = result.mean();
        let se = result.standard_errors();
        let z: Vec<f64> = mean.iter().zip(&quad_mean).zip(&se).map(|((m, q), s)| (m - q).abs() / s).collect();
        chains.push(serde_json::json!({
            "seed": seed,
            "mean": mean,
            "standard_errors": se,
            "z_scores": z,
            "acceptance_rate": result.acceptance_rate(),
            "final_beta": result.final_beta,
            "trace_sha256": digest(csv.as_bytes()),
        }));
        artifacts.push((format!("chain_{c}.csv"), csv));
    }
    let summary = serde_json::json!({
        "n_data": n_data,
        "quadrature": {
            "nodes": quad.nodes().len(),
            "mean": quad_mean,
            "sd": quad_sd,
            "log_normalizer": quad.log_normalizer(),
        },
        "chains": chains,
    });
    Ok((summary, artifacts))
}

/// Re-executes a record from its stored config and seeds.
pub fn rerun(record: &ExperimentRecord) -> Result<(ExperimentRecord, Artifacts)> {
    run_experiment(&record.config, &record.schedule, &record.seeds)
}

/// Compares two summary lists: numbers within `tol` (absolute, or relative
/// to the larger magnitude), everything else exactly. Returns the path of
/// the first difference.
pub fn compare_summaries(a: &[Value], b: &[Value], tol: f64) -> std::result::Result<(), String> {
    fn walk(a: &Value, b: &Value, tol: f64, path: &str) -> std::result::Result<(), String> {
        match (a, b) {
            (Value::Number(x), Value::Number(y)) => {
                let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
                let scale = x.abs().max(y.abs()).max(1.0);
                if (x - y).abs() <= tol * scale {
                    Ok(())
                } else {
                    Err(format!("{path}: {x} vs {y}"))
                }
            }
            (Value::Array(x), Value::Array(y)) => {
                if x.len() != y.len() {
                    return Err(format!("{path}: lengths {} vs {}", x.len(), y.len()));
                }
                x.iter()
                    .zip(y)
                    .enumerate()
                    .try_for_each(|(i, (p, q))| walk(p, q, tol, &format!("{path}[{i}]")))
            }
            (Value::Object(x), Value::Object(y)) => {
                if x.len() != y.len() || x.keys().any(|k| !y.contains_key(k)) {
                    return Err(format!("{path}: different keys"));
                }
                x.iter().try_for_each(|(k, v)| walk(v, &y[k], tol, &format!("{path}.{k}")))
            }
            _ if a == b => Ok(()),
            _ => Err(format!("{path}: {a} vs {b}")),
        }
    }
    walk(&Value::Array(a.to_vec()), &Value::Array(b.to_vec()), tol, "summaries")
}
