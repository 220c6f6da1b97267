//! Sampled fields on the 4-torus and on space-time slabs, plus their
//! spectral representations.
//!
//! Physical values and DFT coefficients are kept in distinct types so
//! multiplier chains can stay on the spectral side without bookkeeping bugs.

use crate::error::{MkgError, Result};
use crate::fft;
use crate::grid::{GridSpec, Taper, DIM};
use num_complex::Complex64;

/// Whether a field is physically real-valued (conjugate-symmetric spectrum).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Real,
    Complex,
}

/// Complex samples on the `N⁴` spatial lattice.
#[derive(Debug, Clone)]
pub struct SpatialField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
    pub parity: Parity,
}

/// Unnormalized DFT coefficients of a spatial field.
#[derive(Debug, Clone)]
pub struct SpatialSpectrum {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

/// Complex samples on the `Nt × N⁴` space-time lattice, time slowest.
#[derive(Debug, Clone)]
pub struct SpacetimeField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

/// Unnormalized DFT coefficients of a space-time field.
#[derive(Debug, Clone)]
pub struct SpacetimeSpectrum {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl SpatialField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpatialField {
            grid,
            values: vec![Complex64::default(); grid.spatial_len()],
            parity: Parity::Real,
        }
    }

    /// Single plane wave `amp·e^{iξ·x}` with `ξ = (2π/L)·mode`.
    pub fn from_mode(grid: GridSpec, mode: [i64; DIM], amp: Complex64) -> Self {
        let mut spec = SpatialSpectrum::zeros(grid);
        spec.set_mode(mode, amp * grid.spatial_len() as f64);
        let mut f = spec.into_field();
        f.parity = Parity::Complex;
        f
    }

    /// Evaluate `f` at every lattice point.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; DIM]) -> Complex64) -> Self {
        let dx = grid.dx();
        let mut values = Vec::with_capacity(grid.spatial_len());
        for ix in grid.spatial_indices() {
            let x = [
                ix[0] as f64 * dx,
                ix[1] as f64 * dx,
                ix[2] as f64 * dx,
                ix[3] as f64 * dx,
            ];
            values.push(f(x));
        }
        SpatialField {
            grid,
            values,
            parity: Parity::Complex,
        }
    }

    pub fn to_spectrum(&self) -> SpatialSpectrum {
        let mut coeffs = self.values.clone();
        fft::forward(&mut coeffs, &[self.grid.n; DIM]);
        SpatialSpectrum {
            grid: self.grid,
            coeffs,
        }
    }

    /// `L²` norm with the physical quadrature weight `(L/N)⁴`.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.dx().powi(DIM as i32);
        (w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// Subtract the mean; returns the removed value.
    pub fn remove_mean(&mut self) -> Complex64 {
        let m = self.mean();
        self.values.iter_mut().for_each(|v| *v -= m);
        m
    }

    /// Max deviation from conjugate symmetry, i.e. from being real-valued.
    pub fn realness_defect(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Drop imaginary parts (valid after real-symbol multiplier chains).
    pub fn take_real(&mut self) {
        self.values.iter_mut().for_each(|v| v.im = 0.0);
        self.parity = Parity::Real;
    }

    pub fn scale(&mut self, c: Complex64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    pub fn conj(&self) -> SpatialField {
        SpatialField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
            parity: self.parity,
        }
    }

    pub fn add_assign(&mut self, other: &SpatialField) {
        debug_assert!(self.grid.same_spatial(&other.grid));
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        if other.parity == Parity::Complex {
            self.parity = Parity::Complex;
        }
    }

    pub fn sub_assign(&mut self, other: &SpatialField) {
        debug_assert!(self.grid.same_spatial(&other.grid));
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a -= b;
        }
        if other.parity == Parity::Complex {
            self.parity = Parity::Complex;
        }
    }

    pub fn axpy(&mut self, c: Complex64, other: &SpatialField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SpatialField) -> SpatialField {
        debug_assert!(self.grid.same_spatial(&other.grid));
        SpatialField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
            parity: if self.parity == Parity::Real && other.parity == Parity::Real {
                Parity::Real
            } else {
                Parity::Complex
            },
        }
    }

    pub fn sub(&self, other: &SpatialField) -> SpatialField {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    /// Relative `L²` distance, scaled by the larger of the two norms.
    pub fn rel_err(&self, other: &SpatialField) -> f64 {
        let denom = self.l2_norm().max(other.l2_norm());
        if denom == 0.0 {
            return 0.0;
        }
        self.sub(other).l2_norm() / denom
    }
}

impl SpatialSpectrum {
    pub fn zeros(grid: GridSpec) -> Self {
        SpatialSpectrum {
            grid,
            coeffs: vec![Complex64::default(); grid.spatial_len()],
        }
    }

    #[inline]
    pub fn set_mode(&mut self, mode: [i64; DIM], coeff: Complex64) {
        let g = &self.grid;
        let ix = [
            g.bin_of_mode(mode[0]),
            g.bin_of_mode(mode[1]),
            g.bin_of_mode(mode[2]),
            g.bin_of_mode(mode[3]),
        ];
        let idx = g.spatial_index(ix);
        self.coeffs[idx] = coeff;
    }

    #[inline]
    pub fn mode(&self, mode: [i64; DIM]) -> Complex64 {
        let g = &self.grid;
        let ix = [
            g.bin_of_mode(mode[0]),
            g.bin_of_mode(mode[1]),
            g.bin_of_mode(mode[2]),
            g.bin_of_mode(mode[3]),
        ];
        self.coeffs[g.spatial_index(ix)]
    }

    pub fn into_field(self) -> SpatialField {
        let mut values = self.coeffs;
        fft::inverse(&mut values, &[self.grid.n; DIM]);
        SpatialField {
            grid: self.grid,
            values,
            parity: Parity::Complex,
        }
    }

    pub fn to_field(&self) -> SpatialField {
        self.clone().into_field()
    }

    /// `L²` norm via Parseval: `‖f‖² = (L/N)⁴ · (1/N⁴) Σ|f̂|²`.
    pub fn l2_norm(&self) -> f64 {
        let g = &self.grid;
        let w = g.dx().powi(DIM as i32) / g.spatial_len() as f64;
        (w * self.coeffs.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }
}

impl SpacetimeField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpacetimeField {
            grid,
            values: vec![Complex64::default(); grid.spacetime_len()],
        }
    }

    /// Single space-time plane wave `amp·e^{i(τt + ξ·x)}`.
    pub fn from_mode(grid: GridSpec, mode_t: i64, mode_x: [i64; DIM], amp: Complex64) -> Self {
        let mut spec = SpacetimeSpectrum::zeros(grid);
        spec.set_mode(mode_t, mode_x, amp * grid.spacetime_len() as f64);
        spec.into_field()
    }

    /// Forward transform; applies the grid's taper on the time axis first.
    pub fn to_spectrum(&self) -> SpacetimeSpectrum {
        let mut coeffs = self.values.clone();
        if self.grid.taper == Taper::Hann {
            apply_hann(&self.grid, &mut coeffs);
        }
        fft::forward(&mut coeffs, &dims(&self.grid));
        SpacetimeSpectrum {
            grid: self.grid,
            coeffs,
        }
    }

    /// Forward transform without tapering regardless of the grid setting.
    pub fn to_spectrum_raw(&self) -> SpacetimeSpectrum {
        let mut coeffs = self.values.clone();
        fft::forward(&mut coeffs, &dims(&self.grid));
        SpacetimeSpectrum {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn slice(&self, t_index: usize) -> SpatialField {
        let len = self.grid.spatial_len();
        SpatialField {
            grid: self.grid,
            values: self.values[t_index * len..(t_index + 1) * len].to_vec(),
            parity: Parity::Complex,
        }
    }

    pub fn set_slice(&mut self, t_index: usize, f: &SpatialField) {
        let len = self.grid.spatial_len();
        self.values[t_index * len..(t_index + 1) * len].copy_from_slice(&f.values);
    }

    /// `L²` norm over space-time with quadrature weight `(T/Nt)·(L/N)⁴`.
    pub fn l2_norm(&self) -> f64 {
        let g = &self.grid;
        let w = g.dt() * g.dx().powi(DIM as i32);
        (w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, c: Complex64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    pub fn add_assign(&mut self, other: &SpacetimeField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &SpacetimeField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a -= b;
        }
    }

    pub fn mul(&self, other: &SpacetimeField) -> SpacetimeField {
        SpacetimeField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn conj(&self) -> SpacetimeField {
        SpacetimeField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn sub(&self, other: &SpacetimeField) -> SpacetimeField {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn rel_err(&self, other: &SpacetimeField) -> f64 {
        let denom = self.l2_norm().max(other.l2_norm());
        if denom == 0.0 {
            return 0.0;
        }
        self.sub(other).l2_norm() / denom
    }

    /// Mean over space of each time slice must vanish for elliptic solves.
    pub fn max_slice_mean(&self) -> f64 {
        let len = self.grid.spatial_len();
        (0..self.grid.nt)
            .map(|t| {
                self.values[t * len..(t + 1) * len]
                    .iter()
                    .sum::<Complex64>()
                    .norm()
                    / len as f64
            })
            .fold(0.0, f64::max)
    }
}

impl SpacetimeSpectrum {
    pub fn zeros(grid: GridSpec) -> Self {
        SpacetimeSpectrum {
            grid,
            coeffs: vec![Complex64::default(); grid.spacetime_len()],
        }
    }

    #[inline]
    pub fn set_mode(&mut self, mode_t: i64, mode_x: [i64; DIM], coeff: Complex64) {
        let g = &self.grid;
        let it = g.bin_of_mode_t(mode_t);
        let ix = [
            g.bin_of_mode(mode_x[0]),
            g.bin_of_mode(mode_x[1]),
            g.bin_of_mode(mode_x[2]),
            g.bin_of_mode(mode_x[3]),
        ];
        let idx = it * g.spatial_len() + g.spatial_index(ix);
        self.coeffs[idx] = coeff;
    }

    pub fn into_field(self) -> SpacetimeField {
        let mut values = self.coeffs;
        fft::inverse(&mut values, &dims(&self.grid));
        SpacetimeField {
            grid: self.grid,
            values,
        }
    }

    pub fn to_field(&self) -> SpacetimeField {
        self.clone().into_field()
    }

    pub fn l2_norm(&self) -> f64 {
        let g = &self.grid;
        let w = g.dt() * g.dx().powi(DIM as i32) / g.spacetime_len() as f64;
        (w * self.coeffs.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }
}

pub(crate) fn dims(grid: &GridSpec) -> [usize; DIM + 1] {
    [grid.nt, grid.n, grid.n, grid.n, grid.n]
}

/// Periodic Hann window on the time axis.
pub(crate) fn apply_hann(grid: &GridSpec, values: &mut [Complex64]) {
    let nt = grid.nt;
    let len = grid.spatial_len();
    for t in 0..nt {
        let w = 0.5 * (1.0 - (std::f64::consts::TAU * t as f64 / nt as f64).cos());
        for v in &mut values[t * len..(t + 1) * len] {
            *v *= w;
        }
    }
}

/// Check that two fields live on the same spatial grid.
pub fn require_same_spatial(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a.same_spatial(b) {
        Ok(())
    } else {
        Err(MkgError::GridMismatch(format!(
            "N = {} (L = {}) vs N = {} (L = {})",
            a.n, a.period, b.n, b.period
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plancherel_spatial() {
        let grid = GridSpec::spatial(8, std::f64::consts::TAU);
        let f = SpatialField::from_fn(grid, |x| {
            Complex64::new((x[0] + 2.0 * x[2]).sin(), (x[1] - x[3]).cos())
        });
        let phys = f.l2_norm();
        let spec = f.to_spectrum().l2_norm();
        assert!((phys - spec).abs() <= 1e-12 * phys);
    }

    #[test]
    fn single_mode_spectrum() {
        let grid = GridSpec::spatial(8, std::f64::consts::TAU);
        let amp = Complex64::new(0.7, -0.2);
        let f = SpatialField::from_mode(grid, [1, 0, -2, 0], amp);
        let spec = f.to_spectrum();
        let got = spec.mode([1, 0, -2, 0]) / grid.spatial_len() as f64;
        assert!((got - amp).norm() < 1e-12);
        // Physical sample at x = 0 equals the amplitude.
        assert!((f.values[0] - amp).norm() < 1e-12);
    }

    #[test]
    fn spacetime_mode_roundtrip() {
        let grid = GridSpec::default_analysis(4, 8);
        let f = SpacetimeField::from_mode(grid, 3, [1, -1, 0, 2], Complex64::new(1.0, 0.5));
        let spec = f.to_spectrum();
        let back = spec.into_field();
        assert!(f.rel_err(&back) < 1e-12);
    }
}
