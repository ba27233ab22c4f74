use flowinfer::consistency::*;
use flowinfer::Error;
use proptest::prelude::*;

fn small_lab() -> LabConfig {
    LabConfig {
        grid_per_dim: 17,
        ..LabConfig::default()
    }
}

fn net_around(center: [f64; 2], h: f64) -> Vec<Vec<f64>> {
    let mut net = Vec::new();
    for i in -1..=1 {
        for j in -1..=1 {
            net.push(vec![center[0] + h * i as f64, center[1] + h * j as f64]);
        }
    }
    net
}

#[test]
fn decomposition_vanishes_without_noise_at_the_truth() {
    let lab = LabConfig {
        sigma_eta: 0.0,
        ..LabConfig::default()
    };
    let table =
        decomposition_residual(&lab, &[lab.v_star.clone()], &[10, 100, 1000], &SeedSet::consecutive(3, 2)).unwrap();
    assert_eq!(table.d_sq, vec![0.0]);
    for row in &table.sup_residual {
        assert!(row.iter().all(|&r| r == 0.0), "{row:?}");
    }
}

#[test]
fn decomposition_at_the_truth_is_chi_square_concentration() {
    let lab = LabConfig::default();
    let n = 10_000;
    let table = decomposition_residual(&lab, &[lab.v_star.clone()], &[n], &SeedSet::consecutive(5, 3)).unwrap();
    let bound = 3.0 * lab.sigma_eta.powi(2) * (2.0 / n as f64).sqrt();
    for row in &table.sup_residual {
        assert!(row[0] <= bound, "{} > {bound}", row[0]);
    }
}

#[test]
fn ulln_trivial_net_and_linearity() {
    let lab = LabConfig::default();
    let seeds = SeedSet::consecutive(1, 2);
    let schedule = [100, 1000];
    let single = ulln_check(&lab, &[lab.v_star.clone()], &schedule, &seeds, 1.0).unwrap();
    assert!(single.sup.iter().flatten().all(|&s| s == 0.0));

    let net = net_around([0.2, -0.15], 0.1);
    let once = ulln_check(&lab, &net, &schedule, &seeds, 1.0).unwrap();
    let twice = ulln_check(&lab, &net, &schedule, &seeds, 2.0).unwrap();
    for (a, b) in once.sup.iter().flatten().zip(twice.sup.iter().flatten()) {
        assert_eq!(2.0 * a, *b);
    }
}

#[test]
fn ulln_sup_decreases_over_the_schedule() {
    let lab = LabConfig::default();
    let mut net = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            net.push(vec![-0.15 + 0.1 * i as f64, -0.3 + 0.1 * j as f64]);
        }
    }
    let table = ulln_check(&lab, &net, &[100, 1000, 10_000], &SeedSet::consecutive(11, 5), 1.0).unwrap();
    assert!(
        table.median_sup.windows(2).all(|w| w[1] < w[0]),
        "{:?}",
        table.median_sup
    );
}

#[test]
fn contraction_trivial_cases_and_negative_control() {
    let lab = small_lab();
    let seeds = SeedSet::consecutive(1, 1);
    let (sweep, rows) = contraction_experiment(&lab, &[50, 200], &seeds, &[3.0]).unwrap();
    assert!(sweep.in_support);
    assert!(rows.iter().all(|r| (r.median_mass - 1.0).abs() < 1e-12));

    let outside = LabConfig {
        v_star: vec![1.5, 0.0],
        ..small_lab()
    };
    let (sweep, rows) = contraction_experiment(&outside, &[50, 200], &seeds, &[0.1]).unwrap();
    assert!(!sweep.in_support);
    assert_eq!(sweep.v_star, vec![1.5, 0.0]);
    assert!(rows.iter().all(|r| r.masses.iter().all(|&m| m == 0.0)));
}

#[test]
fn identification_trivial_cases_and_nesting() {
    let lab = small_lab();
    let deltas = [0.001, 0.005, 0.01, 0.02, 10.0];
    let (sweep, distances, rows) =
        identification_experiment(&lab, &[50, 500], &SeedSet::consecutive(2, 2), &deltas).unwrap();
    let prior_mass: f64 = sweep
        .prior
        .weights()
        .iter()
        .zip(&distances)
        .filter(|(_, &d)| d < 0.01)
        .map(|(w, _)| w)
        .sum();
    let at = |delta: f64, n: usize| rows.iter().find(|r| r.delta == delta && r.n == n).unwrap();
    assert_eq!(at(0.01, 0).median_mass, prior_mass);
    for n in [0, 50, 500] {
        assert!((at(10.0, n).median_mass - 1.0).abs() < 1e-12);
        for pair in deltas.windows(2) {
            let (lo, hi) = (at(pair[0], n), at(pair[1], n));
            for (a, b) in lo.masses.iter().zip(&hi.masses) {
                assert!(a <= b);
            }
        }
    }
}

/// The paired distances only become comparable to δ = 0.05 over a longer
/// horizon, so this run uses `T = 0.2` with `σ = 1`.
#[test]
fn identification_mass_grows_to_one() {
    let lab = LabConfig {
        t_final: 0.2,
        sigma_eta: 1.0,
        k_max: 6,
        ..LabConfig::default()
    };
    let (_, _, rows) =
        identification_experiment(&lab, &[100, 1000, 10_000], &SeedSet::consecutive(1, 3), &[0.05]).unwrap();
    let medians: Vec<f64> = rows.iter().map(|r| r.median_mass).collect();
    assert!(medians.windows(2).all(|w| w[1] > w[0]), "{medians:?}");
    assert!(medians[3] >= 0.9);
    // Regression values from the first run.
    let pinned = [0.10601719197707762, 0.18225010606548545, 0.7659247947237499, 0.9999999999997751];
    for (m, p) in medians.iter().zip(pinned) {
        assert!((m - p).abs() < 1e-9, "{m} vs {p}");
    }
}

#[test]
fn x_delta_inclusion_exists_on_the_grid() {
    let lab = small_lab();
    let spec = lab.prior_spec().unwrap();
    let grid = flowinfer::inference::QuadratureGrid::new(&spec, 17).unwrap();
    let probe = XDeltaProbe::new(&lab, &lab.v_star, 0.0).unwrap();
    let distances = probe.distances(grid.nodes()).unwrap();
    let delta = largest_inclusion_delta(&spec.space, grid.nodes(), &distances, &lab.v_star, 0.1, lab.m);
    assert!(delta > 0.0 && delta.is_finite());
    for (node, d) in grid.nodes().iter().zip(&distances) {
        if *d < delta {
            assert!(spec.space.distance(node, &lab.v_star, lab.m) < 0.1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn truth_is_always_in_x_delta(delta in 1e-12f64..10.0, a in -0.5f64..0.5, b in -0.5f64..0.5) {
        let lab = LabConfig::default();
        let probe = XDeltaProbe::new(&lab, &[a, b], delta).unwrap();
        prop_assert!(probe.contains(&[a, b]).unwrap());
    }
}

#[test]
fn illposedness_radial_and_laminar() {
    let lab = LabConfig::default();
    let seeds = SeedSet::consecutive(1, 1);
    let radial = illposedness_demo(&lab, IllposedCase::Radial, &[0.0, 1.0, 5.0], 0.5, 2000, &seeds).unwrap();
    assert!(radial.trajectory_gap <= 1e-8);
    assert!(radial.single_ic_tv <= 0.02);
    assert!(radial.paired_tv > 0.5);
    assert!(radial.paired_mass_near_truth > 0.9);

    let g = 0.7;
    let laminar = illposedness_demo(&lab, IllposedCase::Laminar, &[g, 2.0 * g], 0.5, 2000, &seeds).unwrap();
    assert!(laminar.trajectory_gap <= 1e-8);
    assert!(laminar.single_ic_tv <= 0.02);
}

fn shear_grid() -> Vec<Vec<f64>> {
    let mut grid = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            grid.push(vec![-0.4 + 0.2 * i as f64, -0.4 + 0.2 * j as f64]);
        }
    }
    grid
}

#[test]
fn injectivity_with_spanning_pair_and_failing_control() {
    let lab = LabConfig::default();
    let report = injectivity_probe(&lab, &shear_grid(), 1e-9).unwrap();
    assert_eq!(report.pairs, 300);
    assert!(report.min_distance > 0.0);
    assert!(report.passes(10.0), "{report:?}");
    assert!(report.violations.is_empty());

    let control = LabConfig {
        ic_pair: "repeated".into(),
        parameter_space: "laminar".into(),
        v_star: vec![0.0],
        ..LabConfig::default()
    };
    let family: Vec<Vec<f64>> = (0..5).map(|i| vec![-0.4 + 0.2 * i as f64]).collect();
    let report = injectivity_probe(&control, &family, 1e-9).unwrap();
    assert!(report.min_distance <= 1e-12);
    assert!(!report.passes(10.0));
    assert!(!report.violations.is_empty());
}

#[test]
fn records_round_trip_and_rerun_exactly() {
    let config = RecordConfig {
        lab: small_lab(),
        experiment: Experiment::Contraction { epsilons: vec![0.1, 0.3] },
    };
    let seeds = SeedSet::consecutive(4, 2);
    let (record, artifacts) = run_experiment(&config, &[50, 200], &seeds).unwrap();
    assert!(record.id.starts_with("contraction-"));
    let csv = &artifacts[0].1;
    assert_eq!(csv.lines().count(), 1 + 2 * 2);

    let json = serde_json::to_string_pretty(&record).unwrap();
    let back: ExperimentRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(back, record);
    let (again, _) = rerun(&back).unwrap();
    assert_eq!(again.id, record.id);
    compare_summaries(&record.summaries, &again.summaries, 1e-12).unwrap();
    assert_eq!(again.summaries, record.summaries);

    let mut changed = record.summaries.clone();
    changed[1]["median_mass"] = serde_json::json!(0.123);
    assert!(compare_summaries(&record.summaries, &changed, 1e-12).is_err());
}

#[test]
fn chain_records_reproduce_traces() {
    let config = RecordConfig {
        lab: small_lab(),
        experiment: Experiment::Posterior {
            n_data: 40,
            beta: 0.3,
            n_steps: 300,
            burn_in: 100,
            adapt: true,
        },
    };
    let seeds = SeedSet {
        design: vec![1],
        noise: vec![2],
        chain: vec![3, 4],
    };
    let (a, traces_a) = run_experiment(&config, &[40], &seeds).unwrap();
    let (b, traces_b) = rerun(&a).unwrap();
    assert_eq!(traces_a, traces_b);
    assert_eq!(a.summaries, b.summaries);
    assert_ne!(traces_a[0].1, traces_a[1].1);
}

#[test]
fn budget_guard_refuses_with_estimate() {
    let lab = LabConfig {
        budget: 100,
        ..LabConfig::default()
    };
    match posterior_sweep(&lab, &[100], &SeedSet::consecutive(1, 5)) {
        Err(Error::Budget { estimated, budget }) => {
            assert_eq!(budget, 100);
            assert!(estimated > 100);
        }
        other => panic!("expected budget error, got {other:?}"),
    }
}

#[test]
fn lab_config_validation_and_custom_pair() {
    let bad = LabConfig {
        v_star: vec![0.1],
        ..LabConfig::default()
    };
    assert!(matches!(bad.validate(), Err(Error::InvalidConfig { field, .. }) if field == "v_star"));
    let custom = LabConfig {
        ic_pair: "custom".into(),
        ic_modes: Some([vec![[1.0, 0.0, 0.0, -0.5]], vec![[0.0, 1.0, 0.0, -0.5]]]),
        ..LabConfig::default()
    };
    let pair = custom.ic_pair().unwrap();
    let canonical = LabConfig::default().ic_pair().unwrap();
    assert_eq!(pair.first.coeffs(), canonical.first.coeffs());
    assert_eq!(pair.second.coeffs(), canonical.second.coeffs());
    let missing = LabConfig {
        ic_pair: "custom".into(),
        ..LabConfig::default()
    };
    assert!(missing.validate().is_err());
    assert_eq!(median(&[3.0, 1.0, 2.0, 10.0]), 2.5);
}
