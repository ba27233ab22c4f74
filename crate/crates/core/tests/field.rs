mod common;

use common::*;
use flowinfer::field::{
    distance_h, FourierScalarField, FourierVelocityField, ModeLattice, SobolevIndices, SobolevNorm,
    Wavevector,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn scalar_strategy() -> impl Strategy<Value = FourierScalarField> {
    (1usize..5).prop_flat_map(|k| {
        let lattice = ModeLattice::new(k);
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), lattice.len()).prop_map(move |c| {
            let coeffs = c.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            FourierScalarField::from_coeffs(lattice, coeffs).unwrap()
        })
    })
}

fn velocity_strategy(k: usize) -> impl Strategy<Value = FourierVelocityField> {
    let lattice = ModeLattice::new(k);
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), lattice.len()).prop_map(move |a| {
        let amps = a.into_iter().map(|(x, y)| Complex64::new(x, y)).collect();
        FourierVelocityField::from_amplitudes(lattice, amps).unwrap()
    })
}

#[test]
fn sobolev_norm_examples() {
    let lattice = ModeLattice::new(1);
    let v = FourierVelocityField::from_modes(lattice, [(Wavevector::new(1, 0), Complex64::new(1.0, 0.0))]).unwrap();
    assert_eq!(v.amplitude(Wavevector::new(-1, 0)), Complex64::new(-1.0, 0.0));
    assert!((v.sobolev_norm(2.0) - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(FourierVelocityField::zeros(ModeLattice::new(3)).sobolev_norm(2.0), 0.0);
    assert_eq!(FourierScalarField::zeros(ModeLattice::new(0)).sobolev_norm(2.0), 0.0);

    // five random conjugate pairs
    let lattice = ModeLattice::new(2);
    let mut r = rng(1);
    let picks = [(1, 0), (0, 1), (1, 1), (2, -1), (-1, 2)];
    let modes: Vec<_> = picks
        .iter()
        .map(|&(a, b)| {
            use rand::Rng;
            (Wavevector::new(a, b), Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        })
        .collect();
    let f = FourierScalarField::from_modes(lattice, modes).unwrap();
    let want = brute_sobolev(lattice, f.coeffs(), 2.0);
    assert!((f.sobolev_norm(2.0) - want).abs() <= 1e-14 * want);
}

#[test]
fn evaluation_examples() {
    let lattice = ModeLattice::new(2);
    assert_eq!(FourierScalarField::zeros(lattice).evaluate_at([0.3, 0.9]), 0.0);
    let cos = FourierScalarField::cosine(lattice, Wavevector::new(1, 0), 1.0).unwrap();
    assert_eq!(cos.coeff(Wavevector::new(1, 0)), Complex64::new(0.5, 0.0));
    assert!((cos.evaluate_at([0.0, 0.3]) - 1.0).abs() < 1e-15);
    assert_eq!(
        FourierVelocityField::zeros(lattice).velocity_at_point([0.2, 0.4]),
        [0.0, 0.0]
    );
}

#[test]
fn evaluate_matches_fft_synthesis_at_grid_points() {
    let mut r = rng(2);
    let lattice = ModeLattice::new(5);
    let f = random_scalar(lattice, 1.0, &mut r);
    let n = 32;
    let grid = fft_synthesize(lattice, f.coeffs(), n);
    use rand::Rng;
    for _ in 0..16 {
        let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
        let x = [i as f64 / n as f64, j as f64 / n as f64];
        assert!((f.evaluate_at(x) - grid[i * n + j]).abs() <= 1e-12);
        assert!(f.imaginary_residue_at(x) <= 1e-12);
    }
    assert!(max_abs_diff(&f.synthesize(n), &grid) <= 1e-12);
}

#[test]
fn velocity_matches_direct_sum() {
    let mut r = rng(4);
    let v = random_velocity(ModeLattice::new(3), &mut r);
    for x in [[0.1, 0.7], [0.93, 0.02], [0.5, 0.5]] {
        let a = v.velocity_at_point(x);
        let b = velocity_direct(&v, x);
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    }
}

#[test]
fn distance_examples() {
    let mut r = rng(5);
    let a = random_velocity(ModeLattice::new(2), &mut r);
    let zero = FourierVelocityField::zeros(ModeLattice::new(1));
    assert_eq!(distance_h(&a, &a, 2.0).unwrap(), 0.0);
    assert!((distance_h(&a, &zero, 2.0).unwrap() - a.sobolev_norm(2.0)).abs() < 1e-14);
}

#[test]
fn sobolev_indices_are_validated() {
    assert!(SobolevIndices::default().validate().is_ok());
    assert!(SobolevIndices::new(1.0, 3.0, 1.0).is_err());
    assert!(SobolevIndices::new(2.0, 2.0, 2.0).is_err());
    assert!(SobolevIndices::new(2.0, 3.0, 2.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_linear(f in scalar_strategy(), seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0,
                            x in (0.0f64..1.0, 0.0f64..1.0)) {
        let g = random_scalar(f.lattice(), 1.0, &mut rng(seed));
        let combo = f.linear_combination(a, &g, b).unwrap();
        let x = [x.0, x.1];
        let lhs = combo.evaluate_at(x);
        let rhs = a * f.evaluate_at(x) + b * g.evaluate_at(x);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
        prop_assert!(combo.is_conjugate_symmetric());
    }

    #[test]
    fn h_m_distance_is_dominated_by_v_distance(a in velocity_strategy(2), b in velocity_strategy(1)) {
        let s = SobolevIndices::default();
        prop_assert!(distance_h(&a, &b, s.m).unwrap() <= distance_h(&a, &b, s.m_star).unwrap());
    }

    #[test]
    fn velocity_arithmetic_is_reality_exact(a in velocity_strategy(2), b in velocity_strategy(2), c in -5.0f64..5.0) {
        prop_assert!(a.is_reality_consistent());
        prop_assert!(a.linear_combination(c, &b, 1.0 / 3.0).unwrap().is_reality_consistent());
        prop_assert!(a.sub(&b).unwrap().is_reality_consistent());
        prop_assert!(a.scaled(c).is_reality_consistent());
        prop_assert!(a.embed(ModeLattice::new(4)).unwrap().is_reality_consistent());
    }

    #[test]
    fn l2_norm_agrees_with_grid_parseval(f in scalar_strategy()) {
        let n = 4 * f.lattice().k_max() + 4;
        let grid = fft_synthesize(f.lattice(), f.coeffs(), n);
        let mean_sq = grid.iter().map(|x| x * x).sum::<f64>() / (n * n) as f64;
        let norm_sq = f.sobolev_norm(0.0).powi(2);
        prop_assert!((norm_sq - mean_sq).abs() <= 1e-10 * mean_sq.max(1e-300));
    }

    #[test]
    fn sobolev_norm_matches_brute_force(f in scalar_strategy(), s in 0.0f64..4.0) {
        let want = brute_sobolev(f.lattice(), f.coeffs(), s);
        prop_assert!((f.sobolev_norm(s) - want).abs() <= 1e-12 * want.max(1.0));
    }
}
