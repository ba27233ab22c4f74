//! Independent oracles shared by the integration tests. Nothing here calls
//! into the solver; field values enter only through their raw coefficients.
#![allow(dead_code)]

use std::f64::consts::PI;

use flowinfer::field::{FourierScalarField, FourierVelocityField, ModeLattice, Wavevector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

pub const TAU: f64 = 2.0 * PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random scalar field with coefficients decaying like `‖k‖^{-decay}`.
pub fn random_scalar(lattice: ModeLattice, decay: f64, rng: &mut impl Rng) -> FourierScalarField {
    let coeffs = lattice
        .modes()
        .map(|k| {
            let s = k.norm().powf(-decay);
            Complex64::new(rng.gen_range(-1.0..1.0) * s, rng.gen_range(-1.0..1.0) * s)
        })
        .collect();
    FourierScalarField::from_coeffs(lattice, coeffs).unwrap()
}

pub fn random_velocity(lattice: ModeLattice, rng: &mut impl Rng) -> FourierVelocityField {
    let amps = lattice
        .modes()
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    FourierVelocityField::from_amplitudes(lattice, amps).unwrap()
}

/// Straight loop over the stored modes: `sqrt(Σ ‖k‖^{2s} |c_k|²)`.
pub fn brute_sobolev(lattice: ModeLattice, coeffs: &[Complex64], s: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..lattice.len() {
        let k = lattice.mode(i);
        let n2 = f64::from(k.k1 * k.k1 + k.k2 * k.k2);
        total += n2.powf(s) * coeffs[i].norm_sqr();
    }
    total.sqrt()
}

/// Real-space samples on `x = (i/n, j/n)` (layout `[i*n + j]`) by an inverse
/// 2-D FFT of the embedded coefficient array.
pub fn fft_synthesize(lattice: ModeLattice, coeffs: &[Complex64], n: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
    let wrap = |k: i32| k.rem_euclid(n as i32) as usize;
    for (i, k) in lattice.modes().enumerate() {
        buf[wrap(k.k1) * n + wrap(k.k2)] += coeffs[i];
    }
    fft2(&mut buf, n, true);
    buf.iter().map(|z| z.re).collect()
}

/// In-place unnormalized 2-D FFT of a row-major `n × n` buffer.
pub fn fft2(buf: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in buf.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = buf[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            buf[i * n + j] = col[i];
        }
    }
}

/// Velocity at `x` summed directly from the amplitudes.
pub fn velocity_direct(v: &FourierVelocityField, x: [f64; 2]) -> [f64; 2] {
    let mut u = [0.0; 2];
    for (i, &a) in v.amplitudes().iter().enumerate() {
        let k = v.lattice().mode(i);
        let phase = TAU * (f64::from(k.k1) * x[0] + f64::from(k.k2) * x[1]);
        let e = a * Complex64::from_polar(1.0, phase);
        let norm = k.norm();
        u[0] += e.re * f64::from(-k.k2) / norm;
        u[1] += e.re * f64::from(k.k1) / norm;
    }
    u
}

/// Second-order finite-difference solver for `θ_t + u·∇θ = κΔθ` on an
/// `n × n` periodic grid, central differences in space and classical RK4 in
/// time.
pub struct FdOracle {
    n: usize,
    kappa: f64,
    u: [Vec<f64>; 2],
    dt: f64,
}

impl FdOracle {
    pub fn new(v: &FourierVelocityField, kappa: f64, n: usize) -> Self {
        let mut u = [vec![0.0; n * n], vec![0.0; n * n]];
        let mut umax: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let w = velocity_direct(v, [i as f64 / n as f64, j as f64 / n as f64]);
                u[0][i * n + j] = w[0];
                u[1][i * n + j] = w[1];
                umax = umax.max(w[0].abs() + w[1].abs());
            }
        }
        let dx = 1.0 / n as f64;
        let dt = 1.2 / (8.0 * kappa / (dx * dx) + 2.0 * umax / dx);
        Self { n, kappa, u, dt }
    }

    fn rhs(&self, th: &[f64], out: &mut [f64]) {
        let n = self.n;
        let inv2dx = n as f64 / 2.0;
        let lap = self.kappa * (n * n) as f64;
        for i in 0..n {
            let ip = (i + 1) % n * n;
            let im = (i + n - 1) % n * n;
            let row = i * n;
            for j in 0..n {
                let jp = (j + 1) % n;
                let jm = (j + n - 1) % n;
                let c = th[row + j];
                let dx1 = (th[ip + j] - th[im + j]) * inv2dx;
                let dx2 = (th[row + jp] - th[row + jm]) * inv2dx;
                let l = th[ip + j] + th[im + j] + th[row + jp] + th[row + jm] - 4.0 * c;
                out[row + j] = -(self.u[0][row + j] * dx1 + self.u[1][row + j] * dx2) + lap * l;
            }
        }
    }

    fn step(&self, th: &mut [f64], h: f64, scratch: &mut [Vec<f64>; 5]) {
        let [k1, k2, k3, k4, tmp] = scratch;
        self.rhs(th, k1);
        for i in 0..th.len() {
            tmp[i] = th[i] + 0.5 * h * k1[i];
        }
        self.rhs(tmp, k2);
        for i in 0..th.len() {
            tmp[i] = th[i] + 0.5 * h * k2[i];
        }
        self.rhs(tmp, k3);
        for i in 0..th.len() {
            tmp[i] = th[i] + h * k3[i];
        }
        self.rhs(tmp, k4);
        for i in 0..th.len() {
            th[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    /// `θ(t_j, x_j)` for each query, starting from the grid samples of
    /// `theta0`. Queries may come in any order.
    pub fn point_values(&self, theta0: &FourierScalarField, queries: &[(f64, [f64; 2])]) -> Vec<f64> {
        let n = self.n;
        let mut th = fft_synthesize(theta0.lattice(), theta0.coeffs(), n);
        let mut order: Vec<usize> = (0..queries.len()).collect();
        order.sort_by(|&a, &b| queries[a].0.total_cmp(&queries[b].0));
        let mut scratch: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n * n]);
        let mut out = vec![0.0; queries.len()];
        let mut t = 0.0;
        for q in order {
            let (target, x) = queries[q];
            let gap = target - t;
            if gap > 0.0 {
                let steps = (gap / self.dt).ceil() as usize;
                let h = gap / steps as f64;
                for _ in 0..steps {
                    self.step(&mut th, h, &mut scratch);
                }
                t = target;
            }
            out[q] = trig_interpolate(&th, n, x);
        }
        out
    }
}

/// Richardson extrapolation `(4 G_n - G_{n/2}) / 3` of the second-order
/// oracle, cancelling the leading `dx²` error.
pub fn fd_richardson(
    v: &FourierVelocityField,
    kappa: f64,
    n: usize,
    theta0: &FourierScalarField,
    queries: &[(f64, [f64; 2])],
) -> Vec<f64> {
    let fine = FdOracle::new(v, kappa, n).point_values(theta0, queries);
    let coarse = FdOracle::new(v, kappa, n / 2).point_values(theta0, queries);
    fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect()
}

/// Value at `x` of the trigonometric interpolant of grid samples (Nyquist
/// row and column dropped).
pub fn trig_interpolate(samples: &[f64], n: usize, x: [f64; 2]) -> f64 {
    let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    fft2(&mut buf, n, false);
    let half = (n / 2) as i32;
    let freq = |i: usize| {
        let k = i as i32;
        if k >= half {
            k - n as i32
        } else {
            k
        }
    };
    let e1: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(1.0, TAU * f64::from(freq(i)) * x[0])).collect();
    let e2: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, TAU * f64::from(freq(j)) * x[1])).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        if freq(i) == -half {
            continue;
        }
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            if freq(j) == -half {
                continue;
            }
            row += buf[i * n + j] * e2[j];
        }
        total += row * e1[i];
    }
    total.re / (n * n) as f64
}

/// `e^{-4π²κ‖k‖²t}`.
pub fn heat_factor(k: Wavevector, kappa: f64, t: f64) -> f64 {
    (-4.0 * PI * PI * kappa * k.norm_sq() * t).exp()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
