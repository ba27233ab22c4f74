use std::f64::consts::PI;

use num_complex::Complex64;

use super::config::{ProductEvaluation, SolverConfig};
use super::fft::Fft2;
use super::trajectory::{ScalarTrajectory, Snapshot};
use crate::error::{Error, Result};
use crate::field::{FourierScalarField, FourierVelocityField, ModeLattice, Wavevector};

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// Above this many nonzero velocity amplitudes the grid product is cheaper.
const CONVOLUTION_MODE_LIMIT: usize = 24;

/// How the truncated advection product `P_K[u·∇θ]` is formed.
enum AdvectionProduct {
    /// Alias-free physical grid with two FFTs per evaluation.
    Grid {
        fft: Fft2,
        /// Velocity components in the transposed physical layout.
        u_grid: [Vec<f64>; 2],
        /// Flat grid position of each lattice mode.
        grid_index: Vec<usize>,
        /// `2πi (k1 + i k2)`: packs both gradient components into one transform.
        gradient_symbol: Vec<Complex64>,
        buf: Vec<Complex64>,
    },
    /// Direct spectral convolution over the nonzero velocity modes; entries
    /// are `(output, source, weight)`.
    Convolution { entries: Vec<(u32, u32, Complex64)> },
}

/// Pseudo-spectral integrator for `∂θ/∂t + u·∇θ = κΔθ` with a fixed
/// velocity field.
///
/// Diffusion is integrated exactly through the factor `e^{-4π²κ‖k‖²h}`; the
/// advection term is the Galerkin projection of `u·∇θ` onto the retained
/// modes, advanced with the classical fourth-order integrating-factor
/// Runge–Kutta scheme.
pub struct AdvectionSolver {
    config: SolverConfig,
    lattice: ModeLattice,
    product: AdvectionProduct,
    /// Index into `class_rates` for each mode; modes sharing `‖k‖²` share
    /// their integrating factor.
    decay_class: Vec<usize>,
    class_rates: Vec<f64>,
    dt: f64,
    stages: [Vec<Complex64>; 5],
    /// Bit pattern of the step the cached factors belong to.
    factor_step: Option<u64>,
    class_half: Vec<f64>,
    half: Vec<f64>,
    full: Vec<f64>,
    steps_taken: usize,
}

impl AdvectionSolver {
    pub fn new(velocity: &FourierVelocityField, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        let k = config.k_max;
        let kv = velocity.lattice().k_max();
        let n = config.grid_n;
        if kv > 0 && n < 2 * k + kv + 1 {
            return Err(Error::config(
                "grid_n",
                format!("{n} aliases the advection product; need at least 2K + K_v + 1 = {}", 2 * k + kv + 1),
            ));
        }
        let lattice = ModeLattice::new(k);
        let [u1, u2] = velocity.synthesize(n);
        let max_speed = u1
            .iter()
            .zip(&u2)
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max);

        let active_modes = velocity
            .amplitudes()
            .iter()
            .filter(|a| a.norm_sqr() > 0.0)
            .count();
        let use_grid = match config.product {
            ProductEvaluation::Grid => true,
            ProductEvaluation::Convolution => false,
            ProductEvaluation::Auto => active_modes > CONVOLUTION_MODE_LIMIT,
        };
        let product = if use_grid {
            Self::grid_product(lattice, n, &u1, &u2)
        } else {
            Self::convolution_product(lattice, velocity)
        };

        let mut norms: Vec<i32> = lattice.modes().map(|q| q.k1 * q.k1 + q.k2 * q.k2).collect();
        let per_mode = norms.clone();
        norms.sort_unstable();
        norms.dedup();
        let decay_class = per_mode
            .iter()
            .map(|q| norms.binary_search(q).expect("norm listed"))
            .collect();
        let class_rates: Vec<f64> = norms
            .iter()
            .map(|&q| FOUR_PI_SQ * config.kappa * f64::from(q))
            .collect();

        // advective Courant number u·dt/dx must not exceed one
        let dx = 1.0 / n as f64;
        let dt = if max_speed * config.dt_max > dx {
            dx / max_speed
        } else {
            config.dt_max
        };

        let m = lattice.len();
        let zeros = || vec![Complex64::new(0.0, 0.0); m];
        Ok(Self {
            config: config.clone(),
            lattice,
            product,
            decay_class,
            class_rates,
            dt,
            stages: [zeros(), zeros(), zeros(), zeros(), zeros()],
            factor_step: None,
            class_half: vec![0.0; norms.len()],
            half: vec![0.0; m],
            full: vec![0.0; m],
            steps_taken: 0,
        })
    }

    fn grid_product(lattice: ModeLattice, n: usize, u1: &[f64], u2: &[f64]) -> AdvectionProduct {
        let transpose = |u: &[f64]| {
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    out[j * n + i] = u[i * n + j];
                }
            }
            out
        };
        let wrap = |k: i32| k.rem_euclid(n as i32) as usize;
        AdvectionProduct::Grid {
            fft: Fft2::new(n),
            u_grid: [transpose(u1), transpose(u2)],
            grid_index: lattice.modes().map(|q| wrap(q.k1) * n + wrap(q.k2)).collect(),
            gradient_symbol: lattice
                .modes()
                .map(|q| Complex64::new(0.0, 2.0 * PI) * Complex64::new(f64::from(q.k1), f64::from(q.k2)))
                .collect(),
            buf: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    fn convolution_product(lattice: ModeLattice, velocity: &FourierVelocityField) -> AdvectionProduct {
        let vl = velocity.lattice();
        let active: Vec<(Wavevector, [Complex64; 2])> = vl
            .modes()
            .zip(velocity.amplitudes())
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(q, a)| {
                let p = q.perp();
                let s = 1.0 / q.norm();
                (q, [a * (p[0] * s), a * (p[1] * s)])
            })
            .collect();
        // only the first half of the outputs; the rest are their conjugates
        let mut entries = Vec::new();
        for (out, k) in lattice.modes().enumerate().take(lattice.len() / 2) {
            for (q, uq) in &active {
                let src = Wavevector::new(k.k1 - q.k1, k.k2 - q.k2);
                if let Some(si) = lattice.index_of(src) {
                    // -(û_q · 2πi (k - q)) c_{k-q}
                    let dot = uq[0] * f64::from(src.k1) + uq[1] * f64::from(src.k2);
                    let w = -dot * Complex64::new(0.0, 2.0 * PI);
                    entries.push((out as u32, si as u32, w));
                }
            }
        }
        AdvectionProduct::Convolution { entries }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Step size actually used after the Courant check.
    pub fn step_size(&self) -> f64 {
        self.dt
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Writes `-P_K[u·∇θ]` for the state `c` into `out`.
    fn advection(&mut self, c: &[Complex64], out: &mut [Complex64]) {
        match &mut self.product {
            AdvectionProduct::Grid {
                fft,
                u_grid,
                grid_index,
                gradient_symbol,
                buf,
            } => {
                let n2 = buf.len();
                buf.fill(Complex64::new(0.0, 0.0));
                for ((&g, s), c) in grid_index.iter().zip(gradient_symbol.iter()).zip(c) {
                    buf[g] = s * c;
                }
                fft.inverse_transposed(buf);
                for ((z, u1), u2) in buf.iter_mut().zip(&u_grid[0]).zip(&u_grid[1]) {
                    *z = Complex64::new(u1 * z.re + u2 * z.im, 0.0);
                }
                fft.forward_from_transposed(buf);
                let scale = -1.0 / n2 as f64;
                for (o, &g) in out.iter_mut().zip(grid_index.iter()) {
                    *o = buf[g] * scale;
                }
            }
            AdvectionProduct::Convolution { entries } => {
                out.fill(Complex64::new(0.0, 0.0));
                for &(o, s, w) in entries.iter() {
                    out[o as usize] += w * c[s as usize];
                }
                let m = out.len();
                for i in 0..m / 2 {
                    out[m - 1 - i] = out[i].conj();
                }
                return;
            }
        }
        let m = out.len();
        for i in 0..m / 2 {
            let j = m - 1 - i;
            let (a, b) = (out[i], out[j]);
            out[i] = (a + b.conj()) * 0.5;
            out[j] = (b + a.conj()) * 0.5;
        }
    }

    fn ensure_factors(&mut self, h: f64) {
        if self.factor_step == Some(h.to_bits()) {
            return;
        }
        for (e, d) in self.class_half.iter_mut().zip(&self.class_rates) {
            *e = (-d * 0.5 * h).exp();
        }
        for ((half, full), &c) in self.half.iter_mut().zip(self.full.iter_mut()).zip(&self.decay_class) {
            *half = self.class_half[c];
            *full = *half * *half;
        }
        self.factor_step = Some(h.to_bits());
    }

    fn step(&mut self, c: &mut [Complex64], h: f64) {
        self.ensure_factors(h);
        let [mut k1, mut k2, mut k3, mut k4, mut tmp] = std::mem::take(&mut self.stages);
        let half = std::mem::take(&mut self.half);
        let full = std::mem::take(&mut self.full);
        let h2 = 0.5 * h;

        self.advection(c, &mut k1);
        for i in 0..c.len() {
            tmp[i] = (c[i] + k1[i] * h2) * half[i];
        }
        self.advection(&tmp, &mut k2);
        for i in 0..c.len() {
            tmp[i] = c[i] * half[i] + k2[i] * h2;
        }
        self.advection(&tmp, &mut k3);
        for i in 0..c.len() {
            tmp[i] = c[i] * full[i] + k3[i] * (h * half[i]);
        }
        self.advection(&tmp, &mut k4);
        let h6 = h / 6.0;
        for i in 0..c.len() {
            c[i] = c[i] * full[i]
                + (k1[i] * full[i] + (k2[i] + k3[i]) * (2.0 * half[i]) + k4[i]) * h6;
        }

        self.stages = [k1, k2, k3, k4, tmp];
        self.half = half;
        self.full = full;
        self.steps_taken += 1;
    }

    /// Integrates from `theta0` and calls `visit(i, t_i, θ(t_i))` for every
    /// entry of the sorted `times`. Each visited time is reached exactly by
    /// shortening the last step before it.
    pub fn integrate<F>(&mut self, theta0: &FourierScalarField, times: &[f64], mut visit: F) -> Result<()>
    where
        F: FnMut(usize, f64, &FourierScalarField) -> Result<()>,
    {
        let t_final = self.config.t_final;
        if let Some(bad) = times.iter().find(|&&t| !(0.0..=t_final).contains(&t)) {
            return Err(Error::config("required_times", format!("{bad} lies outside [0, {t_final}]")));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::config("required_times", "must be sorted"));
        }
        let mut state = theta0.embed(self.lattice)?;
        let mut t = 0.0;
        for (i, &target) in times.iter().enumerate() {
            let gap = target - t;
            if gap > 0.0 {
                // tolerate round-off in gap/dt so exact multiples do not gain a step
                let substeps = (gap / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
                let h = gap / substeps as f64;
                for _ in 0..substeps {
                    self.step(state.coeffs_mut(), h);
                    if state.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                        return Err(Error::NonFinite {
                            step: self.steps_taken,
                            time: t + h,
                        });
                    }
                    t += h;
                }
                t = target;
            }
            visit(i, t, &state)?;
        }
        Ok(())
    }
}

/// Snapshot times: `0`, every checkpoint, every required time and `T`.
fn snapshot_times(config: &SolverConfig, required: &[f64]) -> Vec<f64> {
    let t_final = config.t_final;
    let mut times = vec![0.0];
    if t_final > 0.0 {
        let h = config.checkpoint_spacing();
        let count = (t_final / h).round() as usize;
        times.extend((1..count).map(|i| i as f64 * h).filter(|&t| t < t_final));
        times.push(t_final);
    }
    times.extend_from_slice(required);
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

/// Solves from `theta0` and retains snapshots at the checkpoints and at every
/// required time.
pub fn solve(
    velocity: &FourierVelocityField,
    theta0: &FourierScalarField,
    ic_id: &str,
    config: &SolverConfig,
    required_times: &[f64],
) -> Result<ScalarTrajectory> {
    config.validate()?;
    if let Some(bad) = required_times
        .iter()
        .find(|&&t| !(0.0..=config.t_final).contains(&t))
    {
        return Err(Error::config(
            "required_times",
            format!("{bad} lies outside [0, {}]", config.t_final),
        ));
    }
    let times = snapshot_times(config, required_times);
    let mut solver = AdvectionSolver::new(velocity, config)?;
    let mut snapshots = Vec::with_capacity(times.len());
    solver.integrate(theta0, &times, |_, t, field| {
        snapshots.push(Snapshot {
            t,
            field: field.clone(),
        });
        Ok(())
    })?;
    Ok(ScalarTrajectory::new(
        config.clone(),
        ic_id.to_string(),
        solver.step_size(),
        solver.steps_taken(),
        snapshots,
    ))
}

/// Two initial conditions observed jointly.
#[derive(Debug, Clone, PartialEq)]
pub struct IcPair {
    pub first: FourierScalarField,
    pub second: FourierScalarField,
    pub first_id: String,
    pub second_id: String,
}

impl IcPair {
    pub fn new(
        first: FourierScalarField,
        first_id: impl Into<String>,
        second: FourierScalarField,
        second_id: impl Into<String>,
    ) -> Self {
        Self {
            first,
            second,
            first_id: first_id.into(),
            second_id: second_id.into(),
        }
    }

    /// `(sin 2πx1, sin 2πx2)`, whose gradients span the plane away from a
    /// finite union of lines.
    pub fn canonical(lattice: ModeLattice) -> Result<Self> {
        Ok(Self::new(
            FourierScalarField::sine(lattice, Wavevector::new(1, 0), 1.0)?,
            "sin-x1",
            FourierScalarField::sine(lattice, Wavevector::new(0, 1), 1.0)?,
            "sin-x2",
        ))
    }

    pub fn swapped(&self) -> Self {
        Self::new(
            self.second.clone(),
            self.second_id.clone(),
            self.first.clone(),
            self.first_id.clone(),
        )
    }

    pub fn as_slice(&self) -> [&FourierScalarField; 2] {
        [&self.first, &self.second]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedTrajectory {
    pub first: ScalarTrajectory,
    pub second: ScalarTrajectory,
}

/// The paired solution map: two independent solves sharing `velocity` and
/// `config`.
pub fn paired_solve(
    velocity: &FourierVelocityField,
    pair: &IcPair,
    config: &SolverConfig,
    required_times: &[f64],
) -> Result<PairedTrajectory> {
    Ok(PairedTrajectory {
        first: solve(velocity, &pair.first, &pair.first_id, config, required_times)?,
        second: solve(velocity, &pair.second, &pair.second_id, config, required_times)?,
    })
}
