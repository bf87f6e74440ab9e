//! Blockade-constrained configuration spaces.
//!
//! A configuration is a bitmask over `L` sites: bit `i` set means site `i`
//! holds a Rydberg excitation. Bit 0 is the leftmost site, and the
//! staggered sign `(-1)^j` used by observables refers to this bit index.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest chain length the enumerator accepts.
pub const MAX_SITES: usize = 28;

/// Largest chain length for the unconstrained space.
pub const MAX_FULL_SITES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Identifies the space an operator or state lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisTag {
    pub sites: usize,
    pub boundary: Boundary,
    /// Fixed excitation number when the basis is a number sector.
    pub filling: Option<usize>,
    /// False for the unconstrained `2^L` space.
    pub constrained: bool,
}

/// True iff no two neighbouring sites are both excited.
pub fn is_legal(bits: u64, sites: usize, bc: Boundary) -> Result<bool> {
    if sites < 2 {
        return invalid(format!("chain needs at least 2 sites, got {sites}"));
    }
    if sites < 64 && bits >> sites != 0 {
        return invalid(format!("bitmask {bits:#b} exceeds {sites} sites"));
    }
    Ok(legal_unchecked(bits, sites, bc))
}

#[inline]
pub(crate) fn legal_unchecked(bits: u64, sites: usize, bc: Boundary) -> bool {
    if bits & (bits >> 1) != 0 {
        return false;
    }
    match bc {
        Boundary::Open => true,
        Boundary::Periodic => !(bits & 1 == 1 && (bits >> (sites - 1)) & 1 == 1),
    }
}

/// Neel configuration with excitations on the even sites 0, 2, 4, ...
pub fn z2_bits(sites: usize) -> u64 {
    (0..sites).step_by(2).fold(0, |acc, j| acc | 1 << j)
}

/// Neel configuration with excitations on the odd sites.
pub fn z2_prime_bits(sites: usize) -> u64 {
    (1..sites).step_by(2).fold(0, |acc, j| acc | 1 << j)
}

/// All blockade-legal configurations of a chain, sorted by bitmask value.
#[derive(Debug, Clone)]
pub struct ConstrainedBasis {
    sites: usize,
    bc: Boundary,
    filling: Option<usize>,
    constrained: bool,
    states: Vec<u64>,
}

impl ConstrainedBasis {
    /// Enumerates the full constrained space.
    pub fn new(sites: usize, bc: Boundary) -> Result<Self> {
        Self::build(sites, bc, None)
    }

    /// Enumerates only configurations with exactly `filling` excitations.
    pub fn sector(sites: usize, bc: Boundary, filling: usize) -> Result<Self> {
        Self::build(sites, bc, Some(filling))
    }

    /// Every one of the `2^L` configurations, blockade ignored.
    pub fn unconstrained(sites: usize, bc: Boundary) -> Result<Self> {
        if !(2..=MAX_FULL_SITES).contains(&sites) {
            return invalid(format!("full space limited to 2..={MAX_FULL_SITES} sites, got {sites}"));
        }
        let states = (0..1u64 << sites).collect();
        Ok(Self { sites, bc, filling: None, constrained: false, states })
    }

    fn build(sites: usize, bc: Boundary, filling: Option<usize>) -> Result<Self> {
        if !(2..=MAX_SITES).contains(&sites) {
            return invalid(format!("chain length {sites} outside 2..={MAX_SITES}"));
        }
        let mut states = Vec::new();
        // Deciding the highest site first yields ascending bitmask order.
        fn descend(
            site: usize,
            prefix: u64,
            prev_set: bool,
            sites: usize,
            bc: Boundary,
            filling: Option<usize>,
            out: &mut Vec<u64>,
        ) {
            if let Some(n) = filling {
                let have = prefix.count_ones() as usize;
                if have > n || have + site.div_ceil(2) < n {
                    return;
                }
            }
            if site == 0 {
                if legal_unchecked(prefix, sites, bc) {
                    out.push(prefix);
                }
                return;
            }
            let s = site - 1;
            descend(s, prefix, false, sites, bc, filling, out);
            if !prev_set {
                descend(s, prefix | 1 << s, true, sites, bc, filling, out);
            }
        }
        descend(sites, 0, false, sites, bc, filling, &mut states);
        debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
        Ok(Self { sites, bc, filling, constrained: true, states })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn boundary(&self) -> Boundary {
        self.bc
    }

    pub fn is_constrained(&self) -> bool {
        self.constrained
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, ordinal: usize) -> u64 {
        self.states[ordinal]
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag {
            sites: self.sites,
            boundary: self.bc,
            filling: self.filling,
            constrained: self.constrained,
        }
    }

    pub fn index_of(&self, bits: u64) -> Result<usize> {
        self.states.binary_search(&bits).map_err(|_| Error::NotFound(bits))
    }

    pub(crate) fn find(&self, bits: u64) -> Option<usize> {
        self.states.binary_search(&bits).ok()
    }

    /// Neighbour of `site` at offset `delta`, or `None` past an open edge.
    #[inline]
    pub(crate) fn neighbor(&self, site: usize, delta: isize) -> Option<usize> {
        let l = self.sites as isize;
        let j = site as isize + delta;
        match self.bc {
            Boundary::Periodic => Some(j.rem_euclid(l) as usize),
            Boundary::Open => (0..l).contains(&j).then_some(j as usize),
        }
    }

    /// True when the neighbour at `delta` is empty or absent.
    #[inline]
    pub(crate) fn vacant(&self, bits: u64, site: usize, delta: isize) -> bool {
        self.neighbor(site, delta).is_none_or(|j| bits >> j & 1 == 0)
    }
}
