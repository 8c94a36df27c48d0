//! Tensor-product register of per-site level schemes.

use serde::{Deserialize, Serialize};

use crate::atom::{interaction_strength, Category, Geometry, InteractionSpec, LevelScheme};
use crate::error::{Error, Result};

/// ħV(R_ij)|r_i r_j⟩⟨r_i r_j| between two sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub strength: f64,
}

/// Product basis is site-major: site 0 is the most significant digit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeSystem {
    pub sites: Vec<LevelScheme>,
    pub geometry: Geometry,
    pub interaction: InteractionSpec,
    pub pairs: Vec<PairTerm>,
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl CompositeSystem {
    /// Register with an interaction term for every pair of sites.
    pub fn new(sites: Vec<LevelScheme>, geometry: Geometry, interaction: InteractionSpec) -> Result<Self> {
        Self::with_pairs(sites, geometry, interaction, |_, _| true)
    }

    /// Register keeping only the pairs accepted by `keep(i, j)` (i < j).
    pub fn with_pairs(
        sites: Vec<LevelScheme>,
        geometry: Geometry,
        interaction: InteractionSpec,
        keep: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::param("sites", "register needs at least one site"));
        }
        if geometry.len() != sites.len() {
            return Err(Error::DimensionMismatch { expected: sites.len(), got: geometry.len() });
        }
        geometry.validate()?;
        for s in &sites {
            s.validate()?;
        }
        let dims: Vec<usize> = sites.iter().map(|s| s.dim()).collect();
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let mut pairs = Vec::new();
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                if keep(i, j) {
                    let strength = interaction_strength(&interaction, geometry.distance(i, j))?;
                    pairs.push(PairTerm { i, j, strength });
                }
            }
        }
        Ok(CompositeSystem { sites, geometry, interaction, pairs, dims, strides })
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn stride(&self, site: usize) -> usize {
        self.strides[site]
    }

    /// Level index of `site` within composite basis state `idx`.
    #[inline]
    pub fn site_level(&self, idx: usize, site: usize) -> usize {
        (idx / self.strides[site]) % self.dims[site]
    }

    /// Composite index of a product of per-site level indices.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), got: levels.len() });
        }
        let mut idx = 0;
        for (k, &l) in levels.iter().enumerate() {
            if l >= self.dims[k] {
                return Err(Error::param("levels", format!("level {l} out of range on site {k}")));
            }
            idx += l * self.strides[k];
        }
        Ok(idx)
    }

    /// Composite index from per-site labels.
    pub fn index_of_labels(&self, labels: &[&str]) -> Result<usize> {
        if labels.len() != self.n_sites() {
            return Err(Error::DimensionMismatch { expected: self.n_sites(), got: labels.len() });
        }
        let levels: Vec<usize> =
            labels.iter().zip(&self.sites).map(|(l, s)| s.index(l)).collect::<Result<_>>()?;
        self.index_of(&levels)
    }

    pub fn basis_label(&self, idx: usize) -> String {
        (0..self.n_sites())
            .map(|s| self.sites[s].levels[self.site_level(idx, s)].label.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Rydberg level index of a site, if it has one.
    pub fn rydberg_index(&self, site: usize) -> Option<usize> {
        self.sites[site].levels.iter().position(|l| l.category == Category::Rydberg)
    }

    /// Interaction energy of basis state `idx`.
    pub fn interaction_energy(&self, idx: usize) -> f64 {
        let mut e = 0.0;
        for p in &self.pairs {
            if let (Some(ri), Some(rj)) = (self.rydberg_index(p.i), self.rydberg_index(p.j)) {
                if self.site_level(idx, p.i) == ri && self.site_level(idx, p.j) == rj {
                    e += p.strength;
                }
            }
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::presets::{interaction_81d, preset_6p32};

    #[test]
    fn indexing_round_trip() {
        let s = preset_6p32(1.0, 1.0);
        let c = s.restrict(&["q0", "q1", "r", "d"]).unwrap();
        let sys = CompositeSystem::new(vec![c, s], Geometry::pair(6.0), interaction_81d()).unwrap();
        assert_eq!(sys.dim(), 32);
        let idx = sys.index_of_labels(&["r", "fe3"]).unwrap();
        assert_eq!(sys.basis_label(idx), "r,fe3");
        let rr = sys.index_of_labels(&["r", "r"]).unwrap();
        assert!((crate::units::to_mhz(sys.interaction_energy(rr)) - 34.9).abs() < 1e-9);
        assert_eq!(sys.interaction_energy(idx), 0.0);
    }
}
