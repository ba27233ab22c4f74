//! Per-mode CSV serialization.
//!
//! ```text
//! lattice_K=2,kind=velocity
//! k1,k2,re,im
//! -2,-2,0,0
//! ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! a written file reproduces every stored bit.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::lattice::{ModeLattice, Wavevector};
use super::scalar::FourierScalarField;
use super::velocity::FourierVelocityField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Velocity,
}

impl FieldKind {
    fn as_str(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Velocity => "velocity",
        }
    }
}

fn write_modes(lattice: ModeLattice, kind: FieldKind, coeffs: &[Complex64]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lattice_K={},kind={}", lattice.k_max(), kind.as_str());
    out.push_str("k1,k2,re,im\n");
    for (k, c) in lattice.modes().zip(coeffs) {
        let _ = writeln!(out, "{},{},{},{}", k.k1, k.k2, c.re, c.im);
    }
    out
}

fn parse_header(line: &str) -> Result<(ModeLattice, FieldKind)> {
    let mut k_max = None;
    let mut kind = None;
    for part in line.trim().split(',') {
        match part.split_once('=') {
            Some(("lattice_K", v)) => {
                k_max = Some(
                    v.parse::<usize>()
                        .map_err(|e| Error::parse("field header", e.to_string()))?,
                )
            }
            Some(("kind", "scalar")) => kind = Some(FieldKind::Scalar),
            Some(("kind", "velocity")) => kind = Some(FieldKind::Velocity),
            _ => return Err(Error::parse("field header", format!("unexpected entry `{part}`"))),
        }
    }
    match (k_max, kind) {
        (Some(k), Some(kind)) => Ok((ModeLattice::new(k), kind)),
        _ => Err(Error::parse("field header", "expected lattice_K and kind")),
    }
}

fn read_modes(text: &str) -> Result<(ModeLattice, FieldKind, Vec<Complex64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("field file", "empty input"))?;
    let (lattice, kind) = parse_header(header)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); lattice.len()];
    let mut seen = vec![false; lattice.len()];
    for line in lines {
        if line.starts_with("k1,") {
            continue;
        }
        let cols: Vec<&str> = line.trim().split(',').collect();
        if cols.len() != 4 {
            return Err(Error::parse("field record", format!("expected 4 columns in `{line}`")));
        }
        let bad = |e: &dyn std::fmt::Display| Error::parse("field record", format!("`{line}`: {e}"));
        let k1: i32 = cols[0].parse().map_err(|e| bad(&e))?;
        let k2: i32 = cols[1].parse().map_err(|e| bad(&e))?;
        let re: f64 = cols[2].parse().map_err(|e| bad(&e))?;
        let im: f64 = cols[3].parse().map_err(|e| bad(&e))?;
        let idx = lattice
            .index_of(Wavevector::new(k1, k2))
            .ok_or_else(|| bad(&"mode outside lattice"))?;
        coeffs[idx] = Complex64::new(re, im);
        seen[idx] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::parse("field file", "missing mode records"));
    }
    Ok((lattice, kind, coeffs))
}

impl FourierScalarField {
    pub fn to_csv(&self) -> String {
        write_modes(self.lattice(), FieldKind::Scalar, self.coeffs())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (lattice, kind, coeffs) = read_modes(text)?;
        if kind != FieldKind::Scalar {
            return Err(Error::parse("field file", "expected kind=scalar"));
        }
        Self::from_coeffs(lattice, coeffs)
    }
}

impl FourierVelocityField {
    pub fn to_csv(&self) -> String {
        write_modes(self.lattice(), FieldKind::Velocity, self.amplitudes())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (lattice, kind, amps) = read_modes(text)?;
        if kind != FieldKind::Velocity {
            return Err(Error::parse("field file", "expected kind=velocity"));
        }
        Self::from_amplitudes(lattice, amps)
    }
}
