//! Ground-set primitives: parameter bundles and bitmask-encoded subsets.
//!
//! Elements of the ground set `[n] = {1, .., n}` are 1-indexed; element `e`
//! occupies bit `e - 1`. Formula evaluation accepts unbounded `n`, but sets
//! themselves are capped at 64 positions.

use crate::error::{Error, Result};
use std::fmt;

/// Largest ground set representable as a `u64` bitmask.
pub const MAX_GROUND: u64 = 64;

/// The triple `(n, k, t)`: ground-set size, member size, intersection threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    pub n: u64,
    pub k: u32,
    pub t: u32,
}

impl Params {
    pub fn new(n: u64, k: u32, t: u32) -> Result<Self> {
        if t < 1 || (t as u64) > k as u64 || (k as u64) > n {
            return Err(Error::InvalidParams(format!(
                "need 1 <= t <= k <= n, got n={n}, k={k}, t={t}"
            )));
        }
        Ok(Params { n, k, t })
    }

    /// Same parameters with the ground set checked against the bitmask cap.
    pub fn require_bitmask(&self) -> Result<()> {
        if self.n > MAX_GROUND {
            return Err(Error::GroundSetTooLarge(self.n));
        }
        Ok(())
    }

    /// `n` as a small integer, for bitmask work. Call after `require_bitmask`.
    pub fn n_small(&self) -> u32 {
        debug_assert!(self.n <= MAX_GROUND);
        self.n as u32
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} k={} t={}", self.n, self.k, self.t)
    }
}

/// A subset of `[n]` stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSet {
    mask: u64,
    n: u32,
}

impl KSet {
    /// Wrap a raw mask, checking that only bits `0..n` are used.
    pub fn from_mask(n: u32, mask: u64) -> Result<Self> {
        if n as u64 > MAX_GROUND {
            return Err(Error::GroundSetTooLarge(n as u64));
        }
        if n < 64 && mask >> n != 0 {
            return Err(Error::InvalidSet(format!(
                "mask {mask:#x} has bits outside [{n}]"
            )));
        }
        Ok(KSet { mask, n })
    }

    /// Build from 1-indexed elements. Duplicates are rejected.
    pub fn from_elements(n: u32, elements: &[u32]) -> Result<Self> {
        let mut mask = 0u64;
        for &e in elements {
            if e < 1 || e > n {
                return Err(Error::InvalidSet(format!("element {e} outside [{n}]")));
            }
            let bit = 1u64 << (e - 1);
            if mask & bit != 0 {
                return Err(Error::InvalidSet(format!("duplicate element {e}")));
            }
            mask |= bit;
        }
        KSet::from_mask(n, mask)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn ground(&self) -> u32 {
        self.n
    }

    pub fn card(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn contains(&self, element: u32) -> bool {
        element >= 1 && element <= self.n && self.mask & (1u64 << (element - 1)) != 0
    }

    pub fn elements(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.card() as usize);
        let mut m = self.mask;
        while m != 0 {
            out.push(m.trailing_zeros() + 1);
            m &= m - 1;
        }
        out
    }

    pub fn intersection_size(&self, other: &KSet) -> u32 {
        (self.mask & other.mask).count_ones()
    }

    pub fn is_subset_of(&self, other: &KSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn union(&self, other: &KSet) -> KSet {
        KSet { mask: self.mask | other.mask, n: self.n }
    }

    pub fn intersection(&self, other: &KSet) -> KSet {
        KSet { mask: self.mask & other.mask, n: self.n }
    }

    /// Image under a permutation of `[n]`; `perm[i]` is where element `i + 1` goes.
    pub fn relabel(&self, perm: &[u32]) -> Result<KSet> {
        if perm.len() != self.n as usize {
            return Err(Error::InvalidSet(format!(
                "permutation length {} does not match n = {}",
                perm.len(),
                self.n
            )));
        }
        let mut mask = 0u64;
        for e in self.elements() {
            let img = perm[(e - 1) as usize];
            if img < 1 || img > self.n {
                return Err(Error::InvalidSet(format!("permutation image {img} outside [n]")));
            }
            mask |= 1u64 << (img - 1);
        }
        if mask.count_ones() != self.card() {
            return Err(Error::InvalidSet("not a permutation".into()));
        }
        KSet::from_mask(self.n, mask)
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_bounds() {
        assert!(Params::new(5, 2, 1).is_ok());
        assert!(Params::new(5, 2, 0).is_err());
        assert!(Params::new(5, 6, 1).is_err());
        assert!(Params::new(5, 2, 3).is_err());
        // formulas accept huge n, bitmask ops do not
        let big = Params::new(1_000_000_007, 4, 1).unwrap();
        assert!(big.require_bitmask().is_err());
    }

    #[test]
    fn kset_roundtrip() {
        let s = KSet::from_elements(9, &[2, 5, 9]).unwrap();
        assert_eq!(s.elements(), vec![2, 5, 9]);
        assert_eq!(s.card(), 3);
        assert!(s.contains(5));
        assert!(!s.contains(1));
        assert_eq!(s.to_string(), "{2,5,9}");
        assert!(KSet::from_elements(9, &[2, 2]).is_err());
        assert!(KSet::from_elements(9, &[10]).is_err());
    }

    #[test]
    fn kset_relabel() {
        let s = KSet::from_elements(4, &[1, 2]).unwrap();
        // swap 1 <-> 4
        let img = s.relabel(&[4, 2, 3, 1]).unwrap();
        assert_eq!(img.elements(), vec![2, 4]);
        assert!(s.relabel(&[1, 1, 3, 4]).is_err());
    }
}
