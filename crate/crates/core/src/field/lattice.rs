use serde::{Deserialize, Serialize};

/// Integer wavevector `k = (k1, k2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Wavevector {
    pub k1: i32,
    pub k2: i32,
}

impl Wavevector {
    pub const fn new(k1: i32, k2: i32) -> Self {
        Self { k1, k2 }
    }

    pub fn norm_sq(self) -> f64 {
        f64::from(self.k1 * self.k1 + self.k2 * self.k2)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `k⊥ = (-k2, k1)`.
    pub fn perp(self) -> [f64; 2] {
        [-f64::from(self.k2), f64::from(self.k1)]
    }

    pub fn neg(self) -> Self {
        Self::new(-self.k1, -self.k2)
    }

    pub fn max_abs(self) -> i32 {
        self.k1.abs().max(self.k2.abs())
    }

    /// True for the representative of each conjugate pair `{k, -k}`.
    pub fn is_upper_half(self) -> bool {
        self.k1 > 0 || (self.k1 == 0 && self.k2 > 0)
    }
}

/// Square truncation `0 < max(|k1|, |k2|) <= K` of `Z² \ {0}`.
///
/// Modes are enumerated with `k1` as the outer index and `k2` as the inner
/// index, both ascending from `-K`, skipping the origin. With this ordering
/// the conjugate of mode `i` sits at `len - 1 - i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeLattice {
    k_max: usize,
}

impl ModeLattice {
    pub const fn new(k_max: usize) -> Self {
        Self { k_max }
    }

    pub const fn k_max(&self) -> usize {
        self.k_max
    }

    fn side(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn len(&self) -> usize {
        let side = self.side();
        side * side - 1
    }

    pub fn is_empty(&self) -> bool {
        self.k_max == 0
    }

    pub fn contains(&self, k: Wavevector) -> bool {
        let kk = self.k_max as i32;
        (k.k1 != 0 || k.k2 != 0) && k.max_abs() <= kk
    }

    pub fn index_of(&self, k: Wavevector) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let kk = self.k_max as i32;
        let side = self.side() as i32;
        let raw = ((k.k1 + kk) * side + (k.k2 + kk)) as usize;
        let center = self.k_max * self.side() + self.k_max;
        Some(if raw < center { raw } else { raw - 1 })
    }

    pub fn mode(&self, index: usize) -> Wavevector {
        assert!(index < self.len(), "mode index {index} out of range");
        let center = self.k_max * self.side() + self.k_max;
        let raw = if index < center { index } else { index + 1 };
        let side = self.side();
        let kk = self.k_max as i32;
        Wavevector::new((raw / side) as i32 - kk, (raw % side) as i32 - kk)
    }

    pub fn conjugate_index(&self, index: usize) -> usize {
        self.len() - 1 - index
    }

    pub fn modes(&self) -> impl Iterator<Item = Wavevector> + '_ {
        (0..self.len()).map(move |i| self.mode(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_skips_origin_and_pairs_conjugates() {
        for k_max in 0..5 {
            let lattice = ModeLattice::new(k_max);
            assert_eq!(lattice.len(), (2 * k_max + 1).pow(2) - 1);
            for (i, k) in lattice.modes().enumerate() {
                assert!(k != Wavevector::new(0, 0));
                assert_eq!(lattice.index_of(k), Some(i));
                assert_eq!(lattice.mode(lattice.conjugate_index(i)), k.neg());
            }
        }
    }

    #[test]
    fn out_of_range_modes_have_no_index() {
        let lattice = ModeLattice::new(2);
        assert_eq!(lattice.index_of(Wavevector::new(0, 0)), None);
        assert_eq!(lattice.index_of(Wavevector::new(3, 0)), None);
        assert_eq!(lattice.index_of(Wavevector::new(-2, 2)), Some(0 * 5 + 4));
    }

    #[test]
    fn upper_half_selects_one_of_each_pair() {
        let lattice = ModeLattice::new(3);
        let upper = lattice.modes().filter(|k| k.is_upper_half()).count();
        assert_eq!(upper * 2, lattice.len());
    }
}
