//! Acceptance criteria 1–9 at desk scale. Prints one line per criterion and
//! exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use flowinfer::advect::{solve, SolverConfig};
use flowinfer::consistency::*;
use flowinfer::field::{FourierScalarField, FourierVelocityField, ModeLattice, SobolevNorm, Wavevector};
use flowinfer::inference::{pcn_chain, ChainConfig, FlatPotential, ParameterSpace, PriorSpec};
use serde_json::Value;

/// Regression fixtures from the first full contraction run
/// (ε = 0.1, N ∈ {10², 10³, 10⁴}, seeds 1..=5).
const CONTRACTION_MEDIAN_MASS: [f64; 3] = [0.42323441289740676, 0.8956674994463593, 1.0];
const CONTRACTION_MEDIAN_DISTANCE: [f64; 3] = [0.052180840348433795, 0.04354041435733586, 0.0];
const FIXTURE_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().map(|a| a.iter().map(f).collect()).unwrap_or_default()
}

fn net_around(center: &[f64], h: f64) -> Vec<Vec<f64>> {
    let mut net = Vec::new();
    for i in -1..=1 {
        for j in -1..=1 {
            net.push(vec![center[0] + h * f64::from(i), center[1] + h * f64::from(j)]);
        }
    }
    net
}

fn c1_heat() -> Outcome {
    let k = Wavevector::new(1, 0);
    let lattice = ModeLattice::new(8);
    let theta0 = FourierScalarField::sine(lattice, k, 1.0).unwrap();
    let v = FourierVelocityField::zeros(ModeLattice::new(1));
    let start = Instant::now();
    let traj = solve(&v, &theta0, "sin-x1", &SolverConfig::new(0.05, 1.0, 8), &[]).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let n = 64;
    let got = fft_synthesize(lattice, traj.final_state().coeffs(), n);
    let decay = heat_factor(k, 0.05, 1.0);
    let want: Vec<f64> = (0..n * n).map(|p| decay * (TAU * (p / n) as f64 / n as f64).sin()).collect();
    let err = max_abs_diff(&got, &want);
    check(
        err <= 1e-8 && elapsed < Duration::from_secs(1),
        format!("sup error {err:.2e} (≤ 1e-8), solve {:.3} s (< 1 s)", elapsed.as_secs_f64()),
    )
}

fn energy_residual(v: &FourierVelocityField, h: f64) -> (f64, f64) {
    let theta0 = FourierScalarField::sine(ModeLattice::new(16), Wavevector::new(1, 0), 1.0).unwrap();
    let config = SolverConfig::new(0.05, 1.0, 16).with_dt_max(h).with_checkpoint_spacing(h);
    let traj = solve(v, &theta0, "sin-x1", &config, &[]).unwrap();
    (traj.energy_report().last().unwrap().residual.abs(), theta0.l2_norm_sq())
}

fn c2_energy() -> Outcome {
    let v = random_velocity(ModeLattice::new(2), &mut rng(11));
    let v = v.scaled(1.0 / v.sobolev_norm(3.0));
    let (coarse, e0) = energy_residual(&v, 0.04);
    let (fine, _) = energy_residual(&v, 0.02);
    let ratio = coarse / fine;
    check(
        fine <= 1e-5 * e0 && ratio >= 4.0,
        format!("residual {:.2e}·‖θ0‖² (≤ 1e-5), step-halving ratio {ratio:.1} (≥ 4)", fine / e0),
    )
}

fn c3_max_principle() -> Outcome {
    let mut r = rng(17);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let v = random_velocity(ModeLattice::new(2), &mut r).scaled(0.5);
        let theta0 = random_scalar(ModeLattice::new(3), 2.0, &mut r);
        let config = SolverConfig::new(0.02, 0.5, 16).with_checkpoint_spacing(0.5 / 16.0);
        let traj = solve(&v, &theta0, "ic", &config, &[]).map_err(|e| e.to_string())?;
        worst = worst.max(traj.max_sup_norm() / theta0.sup_norm() - 1.0);
    }
    check(worst <= 1e-6, format!("20 fixtures, worst max_t ‖θ‖∞/‖θ0‖∞ − 1 = {worst:.2e} (≤ 1e-6)"))
}

fn c4_illposed(records: &mut Vec<(ExperimentRecord, Artifacts)>) -> Outcome {
    let config = RecordConfig {
        lab: LabConfig::default(),
        experiment: Experiment::Illposedness {
            case: IllposedCase::Radial,
            c_values: vec![0.0, 1.0, 5.0],
            truth: 0.5,
            n_data: 10_000,
        },
    };
    let (record, artifacts) = run_experiment(&config, &[10_000], &SeedSet::consecutive(1, 1)).map_err(|e| e.to_string())?;
    let s = &record.summaries[0];
    let (gap, tv, paired_tv, near) = (
        f(&s["trajectory_gap"]),
        f(&s["single_ic_tv"]),
        f(&s["paired_tv"]),
        f(&s["paired_mass_near_truth"]),
    );
    records.push((record, artifacts));
    check(
        gap <= 1e-8 && tv <= 0.02 && near >= 0.9,
        format!(
            "trajectory gap {gap:.1e} (≤ 1e-8), single-IC TV {tv:.1e} (≤ 0.02), paired TV {paired_tv:.3}, paired mass near truth {near:.3} (≥ 0.9)"
        ),
    )
}

fn c5_injectivity(records: &mut Vec<(ExperimentRecord, Artifacts)>) -> Outcome {
    let grid: Vec<Vec<f64>> =
        (0..25).map(|p| vec![-0.4 + 0.2 * (p / 5) as f64, -0.4 + 0.2 * (p % 5) as f64]).collect();
    let config = RecordConfig {
        lab: LabConfig::default(),
        experiment: Experiment::Injectivity { grid, tol: 1e-9 },
    };
    let (record, artifacts) = run_experiment(&config, &[], &SeedSet::consecutive(1, 1)).map_err(|e| e.to_string())?;
    let s = &record.summaries[0];
    let (min, est, margin) = (f(&s["min_distance"]), f(&s["error_estimate"]), f(&s["margin"]));
    records.push((record, artifacts));

    let control = RecordConfig {
        lab: LabConfig {
            ic_pair: "repeated".into(),
            parameter_space: "laminar".into(),
            v_star: vec![0.0],
            ..LabConfig::default()
        },
        experiment: Experiment::Injectivity {
            grid: (0..5).map(|i| vec![-0.4 + 0.2 * f64::from(i)]).collect(),
            tol: 1e-9,
        },
    };
    let (record, artifacts) = run_experiment(&control, &[], &SeedSet::consecutive(1, 1)).map_err(|e| e.to_string())?;
    let control_min = f(&record.summaries[0]["min_distance"]);
    records.push((record, artifacts));
    check(
        min > 0.0 && margin >= 10.0 && control_min <= 1e-12,
        format!(
            "min paired distance {min:.3e}, error estimate {est:.1e}, margin {margin:.0} (≥ 10); failing-IC control min {control_min:.1e}"
        ),
    )
}

fn c6_decomposition(records: &mut Vec<(ExperimentRecord, Artifacts)>) -> Outcome {
    let mut lab = LabConfig::default();
    lab.checkpoint_spacing = Some(lab.t_final / 256.0);
    let config = RecordConfig {
        experiment: Experiment::Decomposition { net: net_around(&lab.v_star, 0.1) },
        lab,
    };
    let schedule = [100, 1_000, 10_000, 40_000];
    let (record, artifacts) = run_experiment(&config, &schedule, &SeedSet::consecutive(1, 10)).map_err(|e| e.to_string())?;
    let s = &record.summaries[0];
    let sup = floats(&s["median_sup"]);
    let exponent = f(&s["decay_exponent"]);
    records.push((record, artifacts));
    let decreasing = sup.windows(2).all(|w| w[1] < w[0]);
    check(
        decreasing && (0.3..=0.7).contains(&exponent),
        format!(
            "median sup residual {} over N = 1e2..4e4, decreasing {decreasing}, exponent {exponent:.3} (in [0.3, 0.7])",
            sup.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" → ")
        ),
    )
}

fn c7_contraction(records: &mut Vec<(ExperimentRecord, Artifacts)>) -> Outcome {
    let config = RecordConfig {
        lab: LabConfig::default(),
        experiment: Experiment::Contraction { epsilons: vec![0.1] },
    };
    let (record, artifacts) =
        run_experiment(&config, &[100, 1_000, 10_000], &SeedSet::consecutive(1, 5)).map_err(|e| e.to_string())?;
    let rows: Vec<&Value> = record.summaries[1..].iter().filter(|r| r["n"].as_u64() != Some(0)).collect();
    let mass: Vec<f64> = rows.iter().map(|r| f(&r["median_mass"])).collect();
    let dist: Vec<f64> = rows.iter().map(|r| f(&r["median_mean_distance"])).collect();
    records.push((record, artifacts));
    let monotone = mass.windows(2).all(|w| w[1] >= w[0]) && dist.windows(2).all(|w| w[1] < w[0]);
    let pinned = mass.len() == 3
        && mass.iter().zip(CONTRACTION_MEDIAN_MASS).all(|(a, b)| (a - b).abs() <= FIXTURE_TOL)
        && dist.iter().zip(CONTRACTION_MEDIAN_DISTANCE).all(|(a, b)| (a - b).abs() <= FIXTURE_TOL);
    check(
        monotone && mass.last().is_some_and(|&m| m >= 0.9) && pinned,
        format!("median ball mass {mass:?}, median mean distance {dist:?}; monotone {monotone}, fixtures match {pinned}"),
    )
}

fn c8_sampler(records: &mut Vec<(ExperimentRecord, Artifacts)>) -> Outcome {
    let spec = PriorSpec::uniform(ParameterSpace::shear(), 1.0, 3.0).map_err(|e| e.to_string())?;
    let config = ChainConfig::new(0.5, 100_000, 11).with_burn_in(2_000, true);
    let out = pcn_chain(&spec, &FlatPotential, &config, &mut config.rng(), vec![0.0, 0.0]).map_err(|e| e.to_string())?;
    let sd = spec.reference_std();
    let mut worst: f64 = 0.0;
    for (i, sd) in sd.iter().enumerate() {
        let xs = out.coordinate(i);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let second = xs.iter().map(|x| x * x).sum::<f64>() / n;
        worst = worst.max((mean / sd).abs()).max((second / (sd * sd) - 1.0).abs());
    }

    let posterior = RecordConfig {
        lab: LabConfig { grid_per_dim: 41, ..LabConfig::default() },
        experiment: Experiment::Posterior { n_data: 100, beta: 0.3, n_steps: 20_000, burn_in: 2_000, adapt: true },
    };
    let seeds = SeedSet { design: vec![1], noise: vec![1001], chain: vec![2001, 2002] };
    let (record, artifacts) = run_experiment(&posterior, &[100], &seeds).map_err(|e| e.to_string())?;
    let z: Vec<f64> = record.summaries[0]["chains"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| floats(&c["z_scores"]))
        .collect();
    records.push((record, artifacts));
    let max_z = z.iter().copied().fold(0.0, f64::max);
    check(
        worst <= 0.05 && z.len() == 4 && max_z <= 3.0,
        format!("empty data: worst relative moment error {worst:.3} (≤ 0.05) over 1e5 steps; with data: max |chain − quadrature|/SE {max_z:.2} (≤ 3)"),
    )
}

fn c9_reproducibility(records: &[(ExperimentRecord, Artifacts)]) -> Outcome {
    let mut kinds = Vec::new();
    let mut traces = 0;
    for (record, artifacts) in records {
        let (again, again_artifacts) = rerun(record).map_err(|e| e.to_string())?;
        compare_summaries(&record.summaries, &again.summaries, 1e-12).map_err(|e| format!("{}: {e}", record.id))?;
        if again.id != record.id {
            return Err(format!("{} reran as {}", record.id, again.id));
        }
        for ((name, a), (_, b)) in artifacts.iter().zip(&again_artifacts).filter(|((n, _), _)| n.starts_with("chain_")) {
            if a != b {
                return Err(format!("{}: {name} differs on rerun", record.id));
            }
            traces += 1;
        }
        kinds.push(record.id.split('-').next().unwrap_or("").to_string());
    }
    check(
        traces > 0,
        format!("{} records rerun to 1e-12 ({}); {traces} chain traces byte-identical", records.len(), kinds.join(", ")),
    )
}

fn main() -> ExitCode {
    let mut records = Vec::new();
    let criteria: Vec<(u32, Duration, Box<dyn FnOnce(&mut Vec<(ExperimentRecord, Artifacts)>) -> Outcome>)> = vec![
        (1, Duration::from_secs(60), Box::new(|_| c1_heat())),
        (2, Duration::from_secs(60), Box::new(|_| c2_energy())),
        (3, Duration::from_secs(60), Box::new(|_| c3_max_principle())),
        (4, Duration::from_secs(5 * 60), Box::new(c4_illposed)),
        (5, Duration::from_secs(10 * 60), Box::new(c5_injectivity)),
        (6, Duration::from_secs(20 * 60), Box::new(c6_decomposition)),
        (7, Duration::from_secs(30 * 60), Box::new(c7_contraction)),
        (8, Duration::from_secs(10 * 60), Box::new(c8_sampler)),
        (9, Duration::from_secs(30 * 60), Box::new(|r| c9_reproducibility(r))),
    ];
    let mut failed = 0;
    for (n, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run(&mut records);
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {} s limit", limit.as_secs())),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {n}: {} — {detail} ({:.1} s)",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
