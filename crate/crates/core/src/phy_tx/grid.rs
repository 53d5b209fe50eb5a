use num_complex::Complex;

use super::dmrs::Dmrs;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Where data and DM-RS live inside a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLayout {
    pub num_prb: usize,
    pub symbols_per_slot: usize,
    /// Front-loaded DM-RS symbol (mapping type A, position 2).
    pub dmrs_symbol: usize,
}

impl Default for GridLayout {
    fn default() -> Self {
        GridLayout {
            num_prb: 52,
            symbols_per_slot: 14,
            dmrs_symbol: 2,
        }
    }
}

impl GridLayout {
    pub fn num_subcarriers(&self) -> usize {
        12 * self.num_prb
    }

    pub fn num_res(&self) -> usize {
        self.num_subcarriers() * self.symbols_per_slot
    }

    /// Data REs: every RE outside the DM-RS symbol; the unused comb stays empty.
    pub fn data_capacity(&self) -> usize {
        self.num_subcarriers() * (self.symbols_per_slot - 1)
    }

    pub fn dmrs_count(&self) -> usize {
        self.num_subcarriers() / 2
    }

    /// Data RE indices (`symbol * num_subcarriers + subcarrier`) in mapping
    /// order: frequency first, then time.
    pub fn data_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let n_sc = self.num_subcarriers();
        (0..self.symbols_per_slot)
            .filter(move |&l| l != self.dmrs_symbol)
            .flat_map(move |l| (0..n_sc).map(move |k| l * n_sc + k))
    }
}

/// Frequency-domain slot: `entries[symbol * num_subcarriers + subcarrier]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid<T> {
    pub num_subcarriers: usize,
    pub num_symbols: usize,
    pub entries: Vec<Complex<T>>,
    pub dmrs_mask: Vec<bool>,
}

impl<T: Real> ResourceGrid<T> {
    pub fn zeros(num_subcarriers: usize, num_symbols: usize) -> Self {
        ResourceGrid {
            num_subcarriers,
            num_symbols,
            entries: vec![Complex::new(T::zero(), T::zero()); num_subcarriers * num_symbols],
            dmrs_mask: vec![false; num_subcarriers * num_symbols],
        }
    }

    #[inline]
    pub fn at(&self, symbol: usize, subcarrier: usize) -> Complex<T> {
        self.entries[symbol * self.num_subcarriers + subcarrier]
    }

    pub fn symbol(&self, l: usize) -> &[Complex<T>] {
        &self.entries[l * self.num_subcarriers..(l + 1) * self.num_subcarriers]
    }

    pub fn symbol_mut(&mut self, l: usize) -> &mut [Complex<T>] {
        &mut self.entries[l * self.num_subcarriers..(l + 1) * self.num_subcarriers]
    }

    pub fn energy(&self) -> T {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }
}

/// Places data symbols (frequency first) and DM-RS onto a fresh grid.
pub fn map_to_grid<T: Real>(
    layout: &GridLayout,
    data: &[Complex<T>],
    dmrs: &Dmrs<T>,
) -> Result<ResourceGrid<T>> {
    let capacity = layout.data_capacity();
    if data.len() != capacity {
        return Err(Error::size("data symbols for the grid", capacity, data.len()));
    }
    let n_sc = layout.num_subcarriers();
    let mut grid = ResourceGrid::zeros(n_sc, layout.symbols_per_slot);
    for (idx, &s) in layout.data_indices().zip(data) {
        grid.entries[idx] = s;
    }
    for (&(l, k), &s) in dmrs.positions.iter().zip(&dmrs.symbols) {
        let idx = l * n_sc + k;
        grid.entries[idx] = s;
        grid.dmrs_mask[idx] = true;
    }
    Ok(grid)
}

/// Reads data REs back out in mapping order.
pub fn demap_from_grid<T: Real>(layout: &GridLayout, grid: &ResourceGrid<T>) -> Vec<Complex<T>> {
    layout.data_indices().map(|i| grid.entries[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy_tx::dmrs::generate_dmrs;

    fn ramp(n: usize) -> Vec<Complex<f64>> {
        (0..n).map(|i| Complex::new(i as f64 + 1.0, -(i as f64))).collect()
    }

    #[test]
    fn default_capacity() {
        let layout = GridLayout::default();
        assert_eq!(layout.num_subcarriers(), 624);
        assert_eq!(layout.data_capacity(), 8112);
        assert_eq!(layout.data_capacity() * 6, 48672);
    }

    #[test]
    fn occupied_res_and_disjointness() {
        let layout = GridLayout::default();
        let dmrs = generate_dmrs::<f64>(0, 1, 2, 624);
        let grid = map_to_grid(&layout, &ramp(8112), &dmrs).unwrap();
        let occupied = grid.entries.iter().filter(|e| e.norm_sqr() > 0.0).count();
        // 624 * 13 data REs plus 312 pilots.
        assert_eq!(occupied, 8424);
        for (idx, &m) in grid.dmrs_mask.iter().enumerate() {
            let (l, k) = (idx / 624, idx % 624);
            if m {
                assert_eq!((l, k % 2), (2, 0));
            }
            if l == 2 && k % 2 == 1 {
                assert_eq!(grid.entries[idx], Complex::new(0.0, 0.0));
            }
        }
        let data_pos: Vec<usize> = layout.data_indices().collect();
        assert!(data_pos.iter().all(|&i| !grid.dmrs_mask[i]));
    }

    #[test]
    fn frequency_first_order_and_round_trip() {
        let layout = GridLayout::default();
        let dmrs = generate_dmrs::<f64>(0, 1, 2, 624);
        let data = ramp(8112);
        let grid = map_to_grid(&layout, &data, &dmrs).unwrap();
        assert_eq!(grid.at(0, 1), data[1]);
        assert_eq!(grid.at(1, 0), data[624]);
        assert_eq!(grid.at(3, 0), data[2 * 624]);
        assert_eq!(demap_from_grid(&layout, &grid), data);
    }

    #[test]
    fn capacity_mismatch_rejected() {
        let layout = GridLayout::default();
        let dmrs = generate_dmrs::<f64>(0, 1, 2, 624);
        assert!(map_to_grid(&layout, &ramp(8111), &dmrs).is_err());
    }
}
