use num_complex::Complex64;

use super::lattice::{ModeLattice, Wavevector};
use super::scalar::{phases, synthesize_grid};
use crate::error::{Error, Result};

/// Divergence-free, mean-free periodic velocity field
/// `u(x) = Σ v_k (k⊥/‖k‖) e^{2πi k·x}`.
///
/// The scalar amplitudes obey `conj(v_k) = -v_{-k}`, which makes `u` real.
/// Every constructor and arithmetic operation restores that relation
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierVelocityField {
    lattice: ModeLattice,
    amps: Vec<Complex64>,
}

impl FourierVelocityField {
    pub fn zeros(lattice: ModeLattice) -> Self {
        Self {
            lattice,
            amps: vec![Complex64::new(0.0, 0.0); lattice.len()],
        }
    }

    pub fn from_amplitudes(lattice: ModeLattice, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != lattice.len() {
            return Err(Error::Mismatch(format!(
                "{} amplitudes for a lattice with {} modes",
                amps.len(),
                lattice.len()
            )));
        }
        let mut v = Self { lattice, amps };
        v.symmetrize();
        Ok(v)
    }

    /// Sets `v_k = value` and `v_{-k} = -conj(value)` for each entry.
    pub fn from_modes(
        lattice: ModeLattice,
        modes: impl IntoIterator<Item = (Wavevector, Complex64)>,
    ) -> Result<Self> {
        let mut v = Self::zeros(lattice);
        for (k, value) in modes {
            v.set_pair(k, value)?;
        }
        Ok(v)
    }

    /// `c · (cos 2πx2, -cos 2πx1)`: the cellular flow whose advection term
    /// vanishes against `sin 2πx1 + sin 2πx2`.
    pub fn cellular(lattice: ModeLattice, c: f64) -> Result<Self> {
        Self::from_modes(
            lattice,
            [
                (Wavevector::new(0, 1), Complex64::new(-0.5 * c, 0.0)),
                (Wavevector::new(1, 0), Complex64::new(-0.5 * c, 0.0)),
            ],
        )
    }

    /// `(0, c · cos 2πx1)`: a laminar shear depending only on `x1`.
    pub fn laminar(lattice: ModeLattice, c: f64) -> Result<Self> {
        Self::from_modes(lattice, [(Wavevector::new(1, 0), Complex64::new(0.5 * c, 0.0))])
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
        self.amps[i] = value;
        self.amps[j] = -value.conj();
        Ok(())
    }

    pub fn lattice(&self) -> ModeLattice {
        self.lattice
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, k: Wavevector) -> Complex64 {
        self.lattice
            .index_of(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    fn symmetrize(&mut self) {
        let n = self.amps.len();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let a = self.amps[i];
            let b = self.amps[j];
            self.amps[i] = (a - b.conj()) * 0.5;
            self.amps[j] = (b - a.conj()) * 0.5;
        }
    }

    pub fn is_reality_consistent(&self) -> bool {
        let n = self.amps.len();
        (0..n).all(|i| self.amps[i].conj() + self.amps[n - 1 - i] == Complex64::new(0.0, 0.0))
    }

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
            out.amps[j] = self.amps[i];
        }
        Ok(out)
    }

    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::IncompatibleLattice {
                left: self.lattice.k_max(),
                right: other.lattice.k_max(),
            });
        }
        let amps = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x * a + y * b)
            .collect();
        let mut out = Self {
            lattice: self.lattice,
            amps,
        };
        out.symmetrize();
        Ok(out)
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
            amps: self.amps.iter().map(|c| c * a).collect(),
        }
    }

    /// Fourier coefficients of one Cartesian component, `v_k k⊥_axis/‖k‖`.
    pub fn component_coeffs(&self, axis: usize) -> Vec<Complex64> {
        assert!(axis < 2, "axis must be 0 or 1");
        self.lattice
            .modes()
            .zip(&self.amps)
            .map(|(k, v)| v * (k.perp()[axis] / k.norm()))
            .collect()
    }

    pub fn velocity_at_point(&self, x: [f64; 2]) -> [f64; 2] {
        let kk = self.lattice.k_max() as i32;
        let e1 = phases(x[0], kk);
        let e2 = phases(x[1], kk);
        let mut u = [Complex64::new(0.0, 0.0); 2];
        for (k, v) in self.lattice.modes().zip(&self.amps) {
            let e = v * e1[(k.k1 + kk) as usize] * e2[(k.k2 + kk) as usize] / k.norm();
            let p = k.perp();
            u[0] += e * p[0];
            u[1] += e * p[1];
        }
        [u[0].re, u[1].re]
    }

    pub fn velocity_at(&self, points: &[[f64; 2]]) -> Vec<[f64; 2]> {
        points.iter().map(|&x| self.velocity_at_point(x)).collect()
    }

    /// Both velocity components on the `n × n` grid `x = (i/n, j/n)`.
    pub fn synthesize(&self, n: usize) -> [Vec<f64>; 2] {
        [
            synthesize_grid(self.lattice, &self.component_coeffs(0), n),
            synthesize_grid(self.lattice, &self.component_coeffs(1), n),
        ]
    }
}
