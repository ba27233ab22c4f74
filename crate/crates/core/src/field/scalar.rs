use std::f64::consts::PI;

use num_complex::Complex64;

use super::lattice::{ModeLattice, Wavevector};
use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Real, mean-free periodic scalar field `θ(x) = Σ c_k e^{2πi k·x}` on the
/// unit torus, truncated to a [`ModeLattice`].
///
/// Both members of every conjugate pair are stored and kept exactly
/// conjugate: `c_{-k} == conj(c_k)` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierScalarField {
    lattice: ModeLattice,
    coeffs: Vec<Complex64>,
}

impl FourierScalarField {
    pub fn zeros(lattice: ModeLattice) -> Self {
        Self {
            lattice,
            coeffs: vec![Complex64::new(0.0, 0.0); lattice.len()],
        }
    }

    /// Builds a field from raw coefficients in lattice order, symmetrizing
    /// conjugate pairs.
    pub fn from_coeffs(lattice: ModeLattice, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::Mismatch(format!(
                "{} coefficients for a lattice with {} modes",
                coeffs.len(),
                lattice.len()
            )));
        }
        let mut field = Self { lattice, coeffs };
        field.symmetrize();
        Ok(field)
    }

    /// Sets `c_k = value` and `c_{-k} = conj(value)` for each entry.
    pub fn from_modes(
        lattice: ModeLattice,
        modes: impl IntoIterator<Item = (Wavevector, Complex64)>,
    ) -> Result<Self> {
        let mut field = Self::zeros(lattice);
        for (k, value) in modes {
            field.set_pair(k, value)?;
        }
        Ok(field)
    }

    /// `amplitude · sin(2π k·x)`.
    pub fn sine(lattice: ModeLattice, k: Wavevector, amplitude: f64) -> Result<Self> {
        Self::from_modes(lattice, [(k, Complex64::new(0.0, -0.5 * amplitude))])
    }

    /// `amplitude · cos(2π k·x)`.
    pub fn cosine(lattice: ModeLattice, k: Wavevector, amplitude: f64) -> Result<Self> {
        Self::from_modes(lattice, [(k, Complex64::new(0.5 * amplitude, 0.0))])
    }

    pub fn set_pair(&mut self, k: Wavevector, value: Complex64) -> Result<()> {
        let i = self.lattice.index_of(k).ok_or_else(|| {
            Error::Mismatch(format!(
                "mode ({}, {}) outside lattice K={}",
                k.k1,
                k.k2,
                self.lattice.k_max()
            ))
        })?;
        let j = self.lattice.conjugate_index(i);
        self.coeffs[i] = value;
        self.coeffs[j] = value.conj();
        Ok(())
    }

    pub fn lattice(&self) -> ModeLattice {
        self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: Wavevector) -> Complex64 {
        self.lattice
            .index_of(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Replaces each pair by the average of `c_k` and `conj(c_{-k})`.
    pub(crate) fn symmetrize(&mut self) {
        let n = self.coeffs.len();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let a = self.coeffs[i];
            let b = self.coeffs[j];
            self.coeffs[i] = (a + b.conj()) * 0.5;
            self.coeffs[j] = (b + a.conj()) * 0.5;
        }
    }

    pub fn is_conjugate_symmetric(&self) -> bool {
        let n = self.coeffs.len();
        (0..n).all(|i| self.coeffs[n - 1 - i] == self.coeffs[i].conj())
    }

    /// Zero-pads into a lattice at least as large as this one.
    pub fn embed(&self, target: ModeLattice) -> Result<Self> {
        if target.k_max() < self.lattice.k_max() {
            return Err(Error::IncompatibleLattice {
                left: self.lattice.k_max(),
                right: target.k_max(),
            });
        }
        let mut out = Self::zeros(target);
        for (i, k) in self.lattice.modes().enumerate() {
            let j = target.index_of(k).expect("embedding preserves modes");
            out.coeffs[j] = self.coeffs[i];
        }
        Ok(out)
    }

    fn check_same_lattice(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::IncompatibleLattice {
                left: self.lattice.k_max(),
                right: other.lattice.k_max(),
            });
        }
        Ok(())
    }

    /// `a·self + b·other` on a shared lattice.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_lattice(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x * a + y * b)
            .collect();
        Ok(Self {
            lattice: self.lattice,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            lattice: self.lattice,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `∂θ/∂x_axis` (axis 0 or 1), including the 2π factor.
    pub fn derivative(&self, axis: usize) -> Self {
        assert!(axis < 2, "axis must be 0 or 1");
        let coeffs = self
            .lattice
            .modes()
            .zip(&self.coeffs)
            .map(|(k, c)| {
                let kj = if axis == 0 { k.k1 } else { k.k2 };
                c * Complex64::new(0.0, TWO_PI * f64::from(kj))
            })
            .collect();
        Self {
            lattice: self.lattice,
            coeffs,
        }
    }

    /// `∫ θ² dx` by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `∫ |∇θ|² dx` by Parseval.
    pub fn grad_norm_sq(&self) -> f64 {
        self.lattice
            .modes()
            .zip(&self.coeffs)
            .map(|(k, c)| TWO_PI * TWO_PI * k.norm_sq() * c.norm_sqr())
            .sum()
    }

    fn complex_sum_at(&self, x: [f64; 2]) -> Complex64 {
        let kk = self.lattice.k_max() as i32;
        let e1 = phases(x[0], kk);
        let e2 = phases(x[1], kk);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.lattice.modes().zip(&self.coeffs) {
            acc += c * e1[(k.k1 + kk) as usize] * e2[(k.k2 + kk) as usize];
        }
        acc
    }

    /// Exact truncated Fourier sum at a single point.
    pub fn evaluate_at(&self, x: [f64; 2]) -> f64 {
        let z = self.complex_sum_at(x);
        debug_assert!(
            z.im.abs() <= 1e-12 * (1.0 + self.coeffs.iter().map(|c| c.norm()).sum::<f64>()),
            "imaginary residue {} exceeds tolerance",
            z.im
        );
        z.re
    }

    pub fn evaluate(&self, points: &[[f64; 2]]) -> Vec<f64> {
        points.iter().map(|&x| self.evaluate_at(x)).collect()
    }

    /// Imaginary part of the raw Fourier sum; zero up to rounding for a
    /// conjugate-symmetric field.
    pub fn imaginary_residue_at(&self, x: [f64; 2]) -> f64 {
        self.complex_sum_at(x).im
    }

    /// Value, gradient and Hessian entries `(f, fx, fy, fxx, fxy, fyy)`.
    pub(crate) fn jet_at(&self, x: [f64; 2]) -> [f64; 6] {
        let kk = self.lattice.k_max() as i32;
        let e1 = phases(x[0], kk);
        let e2 = phases(x[1], kk);
        let mut out = [0.0; 6];
        for (k, c) in self.lattice.modes().zip(&self.coeffs) {
            let z = c * e1[(k.k1 + kk) as usize] * e2[(k.k2 + kk) as usize];
            let a = TWO_PI * f64::from(k.k1);
            let b = TWO_PI * f64::from(k.k2);
            // d/dx of Re(z) is Re(i a z) = -a Im(z)
            out[0] += z.re;
            out[1] -= a * z.im;
            out[2] -= b * z.im;
            out[3] -= a * a * z.re;
            out[4] -= a * b * z.re;
            out[5] -= b * b * z.re;
        }
        out
    }

    pub fn gradient_at(&self, x: [f64; 2]) -> [f64; 2] {
        let jet = self.jet_at(x);
        [jet[1], jet[2]]
    }

    /// Values on the `n × n` grid `x = (i/n, j/n)`, row-major in `i`.
    pub fn synthesize(&self, n: usize) -> Vec<f64> {
        synthesize_grid(self.lattice, &self.coeffs, n)
    }

    /// Sup norm: dense-grid search followed by Newton refinement of the
    /// leading candidates.
    pub fn sup_norm(&self) -> f64 {
        if self.lattice.is_empty() {
            return 0.0;
        }
        let n = (8 * self.lattice.k_max() + 8).max(64);
        let grid = self.synthesize(n);
        let mut order: Vec<usize> = (0..grid.len()).collect();
        order.sort_by(|&a, &b| grid[b].abs().total_cmp(&grid[a].abs()));
        let mut best = grid[order[0]].abs();
        let h = 1.0 / n as f64;
        for &idx in order.iter().take(8) {
            let mut x = [(idx / n) as f64 * h, (idx % n) as f64 * h];
            for _ in 0..20 {
                let [f, fx, fy, fxx, fxy, fyy] = self.jet_at(x);
                best = best.max(f.abs());
                let Some([dx, dy]) = newton_step([fx, fy], [fxx, fxy, fyy]) else {
                    break;
                };
                if dx.abs() > 2.0 * h || dy.abs() > 2.0 * h {
                    break;
                }
                x = [x[0] + dx, x[1] + dy];
                if dx.abs() < 1e-15 && dy.abs() < 1e-15 {
                    break;
                }
            }
            best = best.max(self.evaluate_at(x).abs());
        }
        best
    }
}

/// Pseudo-inverse Newton step `-H⁺g` for a symmetric 2×2 Hessian, ignoring
/// directions of negligible curvature.
fn newton_step(g: [f64; 2], h: [f64; 3]) -> Option<[f64; 2]> {
    let [a, b, c] = h;
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return None;
    }
    let mean = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let mut step = [0.0; 2];
    for lambda in [mean + radius, mean - radius] {
        if lambda.abs() <= 1e-10 * scale {
            continue;
        }
        // eigenvector of [[a, b], [b, c]] for lambda
        let (ex, ey) = if (a - lambda).abs() >= (c - lambda).abs() {
            (-b, a - lambda)
        } else {
            (c - lambda, -b)
        };
        let (ex, ey) = if ex == 0.0 && ey == 0.0 {
            if (a - lambda).abs() <= (c - lambda).abs() { (1.0, 0.0) } else { (0.0, 1.0) }
        } else {
            (ex, ey)
        };
        let norm = (ex * ex + ey * ey).sqrt();
        let (qx, qy) = (ex / norm, ey / norm);
        let coef = (qx * g[0] + qy * g[1]) / lambda;
        step[0] -= coef * qx;
        step[1] -= coef * qy;
    }
    Some(step)
}

/// `e^{2πi k x}` for `k = -K..=K`.
pub(crate) fn phases(x: f64, k_max: i32) -> Vec<Complex64> {
    (-k_max..=k_max)
        .map(|k| {
            let (s, c) = (TWO_PI * f64::from(k) * x).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

/// Real part of `Σ c_k e^{2πi k·x}` on an `n × n` grid via separable sums.
pub(crate) fn synthesize_grid(lattice: ModeLattice, coeffs: &[Complex64], n: usize) -> Vec<f64> {
    let kk = lattice.k_max() as i32;
    let side = (2 * kk + 1) as usize;
    let mut dense = vec![Complex64::new(0.0, 0.0); side * side];
    for (k, c) in lattice.modes().zip(coeffs) {
        dense[(k.k1 + kk) as usize * side + (k.k2 + kk) as usize] = *c;
    }
    let grid_phases: Vec<Vec<Complex64>> = (0..n).map(|i| phases(i as f64 / n as f64, kk)).collect();
    // partial[k1][j] = Σ_{k2} c(k1,k2) e^{2πi k2 j/n}
    let mut partial = vec![Complex64::new(0.0, 0.0); side * n];
    for a in 0..side {
        for (j, ph) in grid_phases.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..side {
                acc += dense[a * side + b] * ph[b];
            }
            partial[a * n + j] = acc;
        }
    }
    let mut out = vec![0.0; n * n];
    for (i, ph) in grid_phases.iter().enumerate() {
        for j in 0..n {
            let mut acc = 0.0;
            for a in 0..side {
                let z = ph[a] * partial[a * n + j];
                acc += z.re;
            }
            out[i * n + j] = acc;
        }
    }
    out
}
