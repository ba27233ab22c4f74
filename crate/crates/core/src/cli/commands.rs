use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use crate::advect::{solve, IcPair};
use crate::consistency::{compare_summaries, rerun, run_experiment, ExperimentRecord};
use crate::error::{Error, Result};
use crate::field::{FourierScalarField, FourierVelocityField, ModeLattice, Wavevector};
use crate::inference::{
    pcn_chain, quadrature_posterior, sample_prior, Potential, MAX_QUADRATURE_DIM,
};
use crate::io::write_atomic;
use crate::observe::{sample_design, synthesize_data, ObservationSet};
use crate::rng::{stream, PRIOR_STREAM};

/// Files written by a command, in order.
pub type Written = Vec<PathBuf>;

fn write(out: &Path, name: &str, contents: &[u8], written: &mut Written) -> Result<()> {
    let path = out.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    write_atomic(&path, contents)?;
    written.push(path);
    Ok(())
}

/// Documented defaults, parseable as a config once `kappa` and `t_final`
/// are set (they are filled with example values here).
pub fn cmd_defaults() -> String {
    let example = RunConfig {
        kappa: Some(0.05),
        t_final: Some(0.03),
        ..RunConfig::default()
    };
    format!(
        "# flowinfer run configuration. `kappa` and `t_final` are required;\n\
         # every other key shows its default. Unknown keys are rejected.\n\
         #\n\
         # Optional keys without a default:\n\
         #   dt_max = 0.01              # min(0.01, t_final) when unset\n\
         #   grid_n = 13                # 3 k_max + 1 when unset\n\
         #   checkpoint_spacing = 0.001 # t_final / 64 when unset\n\
         #   velocity_file = \"v.csv\"   # with velocity = \"file\"\n\
         #   prior_center = [0.0, 0.0]  # origin when unset\n\
         #   ic_first = [[1, 0, 0.0, -0.5]]   # [k1, k2, re, im] rows, with ic_pair = \"custom\"\n\
         #   ic_second = [[0, 1, 0.0, -0.5]]\n\
         #   net = [[0.2, -0.15]]       # decomposition / ulln velocity net\n\
         #   injectivity_grid = [[0.0, 0.0], [0.2, 0.0]]\n{}",
        example.to_toml()
    )
}

type Ics = Vec<(FourierScalarField, String)>;

fn pair_ics(pair: IcPair) -> Ics {
    vec![(pair.first, pair.first_id), (pair.second, pair.second_id)]
}

/// Velocity and initial conditions for `solve`. The `heat` and
/// `radial-symmetry` presets carry their own single initial condition.
fn solve_inputs(config: &RunConfig) -> Result<(FourierVelocityField, Ics)> {
    let lab = config.lab_config()?;
    let lattice = ModeLattice::new(config.k_max);
    let sine = |k1, k2| FourierScalarField::sine(lattice, Wavevector::new(k1, k2), 1.0);
    let c = config.velocity_strength;
    let small = ModeLattice::new(1);
    Ok(match config.velocity.as_str() {
        "heat" => (FourierVelocityField::zeros(small), vec![(sine(1, 0)?, "sin-x1".into())]),
        "radial-symmetry" => (
            FourierVelocityField::cellular(small, c)?,
            vec![(sine(1, 0)?.add(&sine(0, 1)?)?, "sin-x1+sin-x2".into())],
        ),
        "laminar" => (FourierVelocityField::laminar(small, c)?, pair_ics(lab.ic_pair()?)),
        "cellular" => (FourierVelocityField::cellular(small, c)?, pair_ics(lab.ic_pair()?)),
        "v-star" => (lab.space()?.to_field(&lab.v_star), pair_ics(lab.ic_pair()?)),
        "file" => {
            let path = config.velocity_file.as_ref().expect("validated");
            (FourierVelocityField::from_csv(&fs::read_to_string(path)?)?, pair_ics(lab.ic_pair()?))
        }
        other => return Err(Error::config("velocity", format!("unknown source `{other}`"))),
    })
}

/// Trajectory export plus energy report for each initial condition.
pub fn cmd_solve(config: &RunConfig, out: &Path) -> Result<Written> {
    let solver = config.lab_config()?.solver_config()?.with_product(config.product);
    let (velocity, ics) = solve_inputs(config)?;
    let mut written = Written::new();
    write(out, "velocity.csv", velocity.to_csv().as_bytes(), &mut written)?;
    let mut summary = Vec::new();
    for (i, (theta0, id)) in ics.iter().enumerate() {
        let traj = solve(&velocity, theta0, id, &solver, &[])?;
        let dir = out.join(format!("ic{}", i + 1));
        let manifest = traj.export(&dir)?;
        written.push(dir.join("manifest.json"));
        let mut csv = String::from("t,l2_sq,dissipation_integral,residual\n");
        let report = traj.energy_report();
        for r in &report {
            writeln!(csv, "{},{},{},{}", r.t, r.l2_sq, r.dissipation_integral, r.residual).unwrap();
        }
        write(&dir, "energy.csv", csv.as_bytes(), &mut written)?;
        summary.push(serde_json::json!({
            "ic": id,
            "dir": format!("ic{}", i + 1),
            "dt": manifest.dt,
            "steps": manifest.steps,
            "max_abs_energy_residual": report.iter().map(|r| r.residual.abs()).fold(0.0, f64::max),
            "max_sup_norm": traj.max_sup_norm(),
        }));
    }
    write(out, "solve.json", serde_json::to_string_pretty(&summary)?.as_bytes(), &mut written)?;
    Ok(written)
}

/// Samples a design and synthesizes data at `v_star`.
pub fn cmd_observe(config: &RunConfig, out: &Path) -> Result<Written> {
    let lab = config.lab_config()?;
    let model = lab.forward_model()?;
    let design = sample_design(config.n_points, lab.t_final, config.design_seed)?;
    let v_star = lab.space()?.to_field(&lab.v_star);
    let obs = synthesize_data(&v_star, &design, &model, lab.sigma_eta, config.noise_seed)?;
    let mut written = Written::new();
    write(out, "observations.csv", obs.to_csv().as_bytes(), &mut written)?;
    Ok(written)
}

/// pCN chains (one per chain seed) and, for dimension at most
/// [`MAX_QUADRATURE_DIM`], the quadrature posterior.
pub fn cmd_posterior(config: &RunConfig, observations: &Path, out: &Path) -> Result<Written> {
    let lab = config.lab_config()?;
    let spec = lab.prior_spec()?;
    if config.quadrature && spec.dim() > MAX_QUADRATURE_DIM {
        return Err(Error::DimensionTooLarge {
            dim: spec.dim(),
            limit: MAX_QUADRATURE_DIM,
        });
    }
    let obs = ObservationSet::read(observations)?;
    let model = lab.forward_model()?.with_pairing(obs.pairing());
    let pot = Potential::new(obs, model, spec.space.clone())?;
    let mut written = Written::new();
    let mut chains = Vec::new();
    for (i, &seed) in config.chain_seeds.iter().enumerate() {
        let chain = config.chain_config(i, seed);
        let init = sample_prior(&spec, &mut stream(seed, PRIOR_STREAM))?;
        let result = pcn_chain(&spec, &pot, &chain, &mut chain.rng(), init)?;
        write(out, &format!("chain_{i}.csv"), result.to_csv().as_bytes(), &mut written)?;
        chains.push(serde_json::json!({
            "seed": seed,
            "mean": result.mean(),
            "standard_errors": result.standard_errors(),
            "acceptance_rate": result.acceptance_rate(),
            "final_beta": result.final_beta,
        }));
    }
    let mut summary = serde_json::json!({ "n_data": pot.observations().len(), "chains": chains });
    if config.quadrature {
        let quad = quadrature_posterior(&spec, &pot, lab.grid_per_dim)?;
        let balls: Vec<_> = config
            .epsilons
            .iter()
            .map(|&e| (format!("v_star@{e}"), lab.v_star.clone(), e, lab.m))
            .collect();
        let report = quad.report(&balls);
        write(out, "quadrature.json", serde_json::to_string_pretty(&report)?.as_bytes(), &mut written)?;
        summary["quadrature_mean"] = serde_json::json!(report.mean);
    }
    write(out, "posterior.json", serde_json::to_string_pretty(&summary)?.as_bytes(), &mut written)?;
    Ok(written)
}

/// Runs the configured experiment, or re-runs a stored record and checks
/// that its summaries are reproduced to `1e-12`.
pub fn cmd_consistency(config: Option<&RunConfig>, rerun_from: Option<&Path>, out: &Path) -> Result<Written> {
    let (record, artifacts) = match rerun_from {
        Some(path) => {
            let stored: ExperimentRecord = serde_json::from_str(&fs::read_to_string(path)?)?;
            let (fresh, artifacts) = rerun(&stored)?;
            compare_summaries(&stored.summaries, &fresh.summaries, 1e-12)
                .map_err(|diff| Error::Mismatch(format!("rerun differs from {}: {diff}", path.display())))?;
            (fresh, artifacts)
        }
        None => {
            let config = config.ok_or_else(|| Error::config("config", "required unless --rerun is given"))?;
            run_experiment(&config.record_config()?, &config.n_schedule, &config.seeds())?
        }
    };
    let mut written = Written::new();
    write(out, "record.json", serde_json::to_string_pretty(&record)?.as_bytes(), &mut written)?;
    for (name, contents) in artifacts {
        write(out, &name, contents.as_bytes(), &mut written)?;
    }
    Ok(written)
}
