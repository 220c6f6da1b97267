//! Periodic sampling grids for the 4-torus and for space-time slabs.
//!
//! The spatial domain is `[0, L)⁴` sampled on `N⁴` points, the time window
//! `[0, T)` on `Nt` points. Spatial frequencies are integer multiples of
//! `2π/L`, temporal frequencies integer multiples of `2π/T`. The spatial
//! dimension is fixed at 4.

use crate::error::{MkgError, Result};

/// Number of spatial dimensions. Fixed; nothing in the crate generalizes it.
pub const DIM: usize = 4;

/// Time-window treatment before the time FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Taper {
    /// Raw samples; correct for inputs that are exactly `T`-periodic.
    None,
    /// Hann window, suppressing leakage from non-periodic time traces.
    Hann,
}

/// Sampling of `[0,T) × [0,L)⁴`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    /// Spatial points per axis (power of two).
    pub n: usize,
    /// Spatial period `L > 0`.
    pub period: f64,
    /// Time points (power of two).
    pub nt: usize,
    /// Time window `T > 0`.
    pub time_window: f64,
    /// Windowing for time-FFT analysis.
    pub taper: Taper,
}

impl GridSpec {
    /// New grid; panics if `n` or `nt` is not a power of two or an extent is
    /// not positive. These are programmer errors, not runtime conditions.
    pub fn new(n: usize, period: f64, nt: usize, time_window: f64, taper: Taper) -> Self {
        assert!(n.is_power_of_two(), "spatial size must be a power of two");
        assert!(nt.is_power_of_two(), "time size must be a power of two");
        assert!(period > 0.0 && time_window > 0.0);
        GridSpec {
            n,
            period,
            nt,
            time_window,
            taper,
        }
    }

    /// Spatial-only grid (time axis degenerate, `nt = 1`).
    pub fn spatial(n: usize, period: f64) -> Self {
        assert!(n.is_power_of_two());
        assert!(period > 0.0);
        GridSpec {
            n,
            period,
            nt: 1,
            time_window: 1.0,
            taper: Taper::None,
        }
    }

    /// Default analysis grid: `L = T = 2π` so both frequency lattices are the
    /// integers and on-grid plane waves with integer `|ξ|` are `T`-periodic.
    pub fn default_analysis(n: usize, nt: usize) -> Self {
        Self::new(n, std::f64::consts::TAU, nt, std::f64::consts::TAU, Taper::None)
    }

    /// Number of spatial samples `N⁴`.
    pub fn spatial_len(&self) -> usize {
        self.n.pow(DIM as u32)
    }

    /// Number of space-time samples `Nt · N⁴`.
    pub fn spacetime_len(&self) -> usize {
        self.nt * self.spatial_len()
    }

    /// Spatial frequency unit `2π/L`.
    pub fn dxi(&self) -> f64 {
        std::f64::consts::TAU / self.period
    }

    /// Temporal frequency unit `2π/T`.
    pub fn dtau(&self) -> f64 {
        std::f64::consts::TAU / self.time_window
    }

    /// Spatial lattice spacing `L/N`.
    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Time-sample spacing `T/Nt`.
    pub fn dt(&self) -> f64 {
        self.time_window / self.nt as f64
    }

    /// Signed integer frequency for FFT bin `i` along a spatial axis.
    #[inline]
    pub fn signed_mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Signed integer frequency for FFT bin `i` along the time axis.
    #[inline]
    pub fn signed_mode_t(&self, i: usize) -> i64 {
        let nt = self.nt as i64;
        let i = i as i64;
        if i < nt / 2 {
            i
        } else {
            i - nt
        }
    }

    /// FFT bin for a signed integer spatial frequency.
    #[inline]
    pub fn bin_of_mode(&self, m: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(m >= -n / 2 && m < n / 2);
        (m.rem_euclid(n)) as usize
    }

    /// FFT bin for a signed integer temporal frequency.
    #[inline]
    pub fn bin_of_mode_t(&self, m: i64) -> usize {
        let nt = self.nt as i64;
        debug_assert!(m >= -nt / 2 && m < nt / 2);
        (m.rem_euclid(nt)) as usize
    }

    /// Largest |ξ| on the lattice (4-space corner mode).
    pub fn xi_max(&self) -> f64 {
        self.dxi() * (self.n as f64 / 2.0) * (DIM as f64).sqrt()
    }

    /// Smallest nonzero |ξ|.
    pub fn xi_min(&self) -> f64 {
        self.dxi()
    }

    /// Largest |τ| on the time lattice.
    pub fn tau_max(&self) -> f64 {
        self.dtau() * (self.nt as f64 / 2.0)
    }

    /// Resolvable dyadic range `[k_min, k_max]` for spatial shells: every
    /// occupied nonzero |ξ| has its full partition-of-unity weight inside.
    pub fn dyadic_range(&self) -> (i32, i32) {
        let k_min = self.xi_min().log2().floor() as i32 - 1;
        let k_max = self.xi_max().log2().ceil() as i32 + 1;
        (k_min, k_max)
    }

    /// Resolvable dyadic range for modulation `||τ|-|ξ||` bins.
    pub fn modulation_range(&self) -> (i32, i32) {
        let sigma_min = self.dtau().min(self.dxi());
        let sigma_max = self.tau_max() + self.xi_max();
        let j_min = sigma_min.log2().floor() as i32 - 1;
        let j_max = sigma_max.log2().ceil() as i32 + 1;
        (j_min, j_max)
    }

    /// Default cone guard `η = 4·(2π/T)` for the discrete `□⁻¹`.
    pub fn default_cone_guard(&self) -> f64 {
        4.0 * self.dtau()
    }

    /// CFL bound `0.5·(L/N)/√4` for finite-difference stepping.
    pub fn cfl_bound(&self) -> f64 {
        0.5 * self.dx() / (DIM as f64).sqrt()
    }

    /// Companion grid under the scaling `x → λx`: same sample count, period
    /// `L/λ`, so rescaled fields reuse the original samples exactly.
    pub fn companion(&self, lambda: f64) -> Result<GridSpec> {
        if lambda != 2.0 && lambda != 0.5 {
            return Err(MkgError::CompanionGridUnavailable { lambda });
        }
        Ok(GridSpec {
            n: self.n,
            period: self.period / lambda,
            nt: self.nt,
            time_window: self.time_window / lambda,
            taper: self.taper,
        })
    }

    /// Spatial grid equality (ignores the time axis).
    pub fn same_spatial(&self, other: &GridSpec) -> bool {
        self.n == other.n && (self.period - other.period).abs() < 1e-12 * self.period
    }

    /// Row-major spatial index with the last axis fastest.
    #[inline]
    pub fn spatial_index(&self, ix: [usize; DIM]) -> usize {
        ((ix[0] * self.n + ix[1]) * self.n + ix[2]) * self.n + ix[3]
    }

    /// Iterate spatial multi-indices in storage order.
    pub fn spatial_indices(&self) -> impl Iterator<Item = [usize; DIM]> + '_ {
        let n = self.n;
        (0..n).flat_map(move |a| {
            (0..n).flat_map(move |b| (0..n).flat_map(move |c| (0..n).map(move |d| [a, b, c, d])))
        })
    }
}
