use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Largest lattice the exact oracle accepts.
pub const MAX_SITES: usize = 20;

/// Computational basis split by the number of up spins `k` (`J^z = k - N/2`).
/// Bit `i` set means site `i` is up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorBasis {
    sites: usize,
    sectors: Vec<Vec<u32>>,
    /// Position of every basis state inside its own sector.
    index: Vec<u32>,
}

impl SectorBasis {
    pub fn new(sites: usize) -> Result<Self> {
        if sites > MAX_SITES {
            return Err(Error::SizeCapExceeded { sites, cap: MAX_SITES });
        }
        if sites < 2 {
            return Err(Error::TooFewSites(sites));
        }
        let full = 1usize << sites;
        let mut sectors = vec![Vec::new(); sites + 1];
        let mut index = vec![0u32; full];
        for s in 0..full as u32 {
            let k = s.count_ones() as usize;
            index[s as usize] = sectors[k].len() as u32;
            sectors[k].push(s);
        }
        Ok(Self { sites, sectors, index })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn num_sectors(&self) -> usize {
        self.sites + 1
    }

    pub fn full_dimension(&self) -> usize {
        1 << self.sites
    }

    pub fn sector(&self, k: usize) -> &[u32] {
        &self.sectors[k]
    }

    pub fn dimension(&self, k: usize) -> usize {
        self.sectors[k].len()
    }

    pub fn max_dimension(&self) -> usize {
        self.sectors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn index_of(&self, state: u32) -> usize {
        self.index[state as usize] as usize
    }

    /// `J^z` of sector `k`.
    pub fn magnetization(&self, k: usize) -> f64 {
        k as f64 - 0.5 * self.sites as f64
    }
}
