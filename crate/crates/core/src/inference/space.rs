use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FourierVelocityField, ModeLattice, Wavevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

/// One `(mode, part)` slot of a coordinate, scaled by `coeff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub k: Wavevector,
    pub part: Part,
    pub coeff: f64,
}

/// One real coordinate: a fixed combination of real or imaginary parts of
/// `v_k` over upper-half-plane modes `k` (conjugate partners follow from
/// reality). Distinct coordinates use disjoint slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub terms: Vec<Term>,
}

impl Coordinate {
    pub fn single(k: Wavevector, part: Part) -> Self {
        Self {
            terms: vec![Term { k, part, coeff: 1.0 }],
        }
    }
}

/// Finite-dimensional coordinates for velocity fields on a parameter
/// lattice. Sobolev norms are diagonal in these coordinates:
/// `‖v‖²_s = Σ_i w_i(s) θ_i²` with `w_i(s) = Σ_terms 2‖k‖^{2s} coeff²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpace {
    k_max: usize,
    coords: Vec<Coordinate>,
}

impl ParameterSpace {
    pub fn new(k_max: usize, coords: Vec<Coordinate>) -> Result<Self> {
        let lattice = ModeLattice::new(k_max);
        let mut used: Vec<(Wavevector, Part)> = Vec::new();
        for c in &coords {
            if c.terms.is_empty() || c.terms.iter().all(|t| t.coeff == 0.0) {
                return Err(Error::config("parameter_space", "empty coordinate"));
            }
            for t in &c.terms {
                if !lattice.contains(t.k) || !t.k.is_upper_half() {
                    return Err(Error::config(
                        "parameter_space",
                        format!("mode ({}, {}) is not an upper-half mode of K={k_max}", t.k.k1, t.k.k2),
                    ));
                }
                if used.contains(&(t.k, t.part)) {
                    return Err(Error::config("parameter_space", "coordinates must use disjoint mode slots"));
                }
                used.push((t.k, t.part));
            }
        }
        Ok(Self { k_max, coords })
    }

    /// Two real coordinates on `K = 1`: `a = Re v_(1,0)` and `b = Re v_(0,1)`,
    /// i.e. `u = (-2b cos 2πx2, 2a cos 2πx1)`. The cellular family is `a = b`,
    /// the laminar family `b = 0`.
    pub fn shear() -> Self {
        Self::new(
            1,
            vec![
                Coordinate::single(Wavevector::new(1, 0), Part::Re),
                Coordinate::single(Wavevector::new(0, 1), Part::Re),
            ],
        )
        .expect("valid preset")
    }

    /// One coordinate `c` with `u = c (cos 2πx2, -cos 2πx1)`.
    pub fn cellular() -> Self {
        let term = |k| Term { k, part: Part::Re, coeff: -0.5 };
        Self::new(
            1,
            vec![Coordinate {
                terms: vec![term(Wavevector::new(1, 0)), term(Wavevector::new(0, 1))],
            }],
        )
        .expect("valid preset")
    }

    /// One coordinate `c` with `u = (0, c cos 2πx1)`.
    pub fn laminar() -> Self {
        Self::new(
            1,
            vec![Coordinate {
                terms: vec![Term { k: Wavevector::new(1, 0), part: Part::Re, coeff: 0.5 }],
            }],
        )
        .expect("valid preset")
    }

    /// Every real degree of freedom on the lattice of radius `k_max`.
    pub fn full(k_max: usize) -> Self {
        let coords = ModeLattice::new(k_max)
            .modes()
            .filter(|k| k.is_upper_half())
            .flat_map(|k| [Coordinate::single(k, Part::Re), Coordinate::single(k, Part::Im)])
            .collect();
        Self::new(k_max, coords).expect("valid preset")
    }

    pub fn from_name(name: &str, k_param: usize) -> Result<Self> {
        match name {
            "shear" => Ok(Self::shear()),
            "cellular" => Ok(Self::cellular()),
            "laminar" => Ok(Self::laminar()),
            "full" => Ok(Self::full(k_param)),
            other => Err(Error::config(
                "parameter_space",
                format!("unknown preset `{other}` (shear | cellular | laminar | full)"),
            )),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn lattice(&self) -> ModeLattice {
        ModeLattice::new(self.k_max)
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    /// Diagonal Gram weights `2‖k_i‖^{2s}`.
    pub fn weights(&self, s: f64) -> Vec<f64> {
        self.coords
            .iter()
            .map(|c| c.terms.iter().map(|t| 2.0 * t.k.norm_sq().powf(s) * t.coeff * t.coeff).sum())
            .collect()
    }

    pub fn norm(&self, theta: &[f64], s: f64) -> f64 {
        self.weights(s)
            .iter()
            .zip(theta)
            .map(|(w, t)| w * t * t)
            .sum::<f64>()
            .sqrt()
    }

    pub fn distance(&self, a: &[f64], b: &[f64], s: f64) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.norm(&diff, s)
    }

    pub fn to_field(&self, theta: &[f64]) -> FourierVelocityField {
        assert_eq!(theta.len(), self.dim(), "parameter vector has the wrong length");
        let mut v = FourierVelocityField::zeros(self.lattice());
        for (c, &x) in self.coords.iter().zip(theta) {
            for t in &c.terms {
                let old = v.amplitude(t.k);
                let new = match t.part {
                    Part::Re => Complex64::new(old.re + t.coeff * x, old.im),
                    Part::Im => Complex64::new(old.re, old.im + t.coeff * x),
                };
                v.set_pair(t.k, new).expect("coordinate lies in the lattice");
            }
        }
        v
    }

    /// Coordinates of the orthogonal projection of `v` onto this space.
    pub fn from_field(&self, v: &FourierVelocityField) -> Vec<f64> {
        self.coords
            .iter()
            .map(|c| {
                let (num, den) = c.terms.iter().fold((0.0, 0.0), |(n, d), t| {
                    let a = v.amplitude(t.k);
                    let x = match t.part {
                        Part::Re => a.re,
                        Part::Im => a.im,
                    };
                    (n + t.coeff * x, d + t.coeff * t.coeff)
                });
                num / den
            })
            .collect()
    }
}
