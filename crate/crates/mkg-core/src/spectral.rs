//! Fourier-multiplier calculus: dyadic frequency shells `P_k`, modulation
//! localizers `Q_j`, space-time frequency cutoffs `S_l`, the Leray
//! projection, and the inverses `Δ⁻¹` and `□⁻¹`.
//!
//! Conventions (see `docs/conventions.md` at the repo root):
//! - spectra are indexed by `(τ, ξ)` with `∂_t ↔ iτ`, `∂_j ↔ iξ_j`;
//! - `□ := ∂_t² − Δ` has symbol `|ξ|² − τ²`, and `inv_box` divides by it on
//!   the cone-guarded spectrum, so `□ ∘ inv_box = id` there;
//! - `Δ⁻¹` divides by `−|ξ|²` and leaves the mean untouched (flagged).

use crate::error::{MkgError, Result};
use crate::field::{SpacetimeField, SpacetimeSpectrum, SpatialField, SpatialSpectrum};
use crate::grid::{GridSpec, DIM};
use num_complex::Complex64;

/// Relative amplitude below which a spectral coefficient counts as empty
/// when testing occupancy against singular symbols.
pub const OCCUPANCY_TOL: f64 = 1e-13;

/// Quintic smoothstep `s(v) = v³(10 − 15v + 6v²)`, `s(v) + s(1−v) = 1`.
#[inline]
pub fn smoothstep(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else if v >= 1.0 {
        1.0
    } else {
        v * v * v * (10.0 - 15.0 * v + 6.0 * v * v)
    }
}

/// Dyadic bump in `u = log₂(ratio)`: 1 on `|u| ≤ 1/4`, smoothstep transition
/// on `1/4 ≤ |u| ≤ 3/4`, 0 beyond. The transitions of neighboring shells are
/// complementary, so `Σ_k bump(u − k) = 1` exactly for every finite `u`.
#[inline]
pub fn lp_bump(u: f64) -> f64 {
    let a = u.abs();
    if a >= 0.75 {
        0.0
    } else if a <= 0.25 {
        1.0
    } else {
        smoothstep(2.0 * (0.75 - a))
    }
}

/// The bump evaluated on a ratio `ρ = value / 2^k`; zero for `ρ ≤ 0`.
#[inline]
pub fn chi(ratio: f64) -> f64 {
    if ratio <= 0.0 {
        0.0
    } else {
        lp_bump(ratio.log2())
    }
}

/// Widened shell profile: 1 on the support of `lp_bump`, supported in
/// `|u| ≤ 2` (ratio in `[1/4, 4]`).
#[inline]
pub fn lp_bump_wide(u: f64) -> f64 {
    let a = u.abs();
    if a >= 1.9 {
        0.0
    } else if a <= 0.8 {
        1.0
    } else {
        smoothstep((1.9 - a) / 1.1)
    }
}

/// Smooth low-pass `Σ_{k' < k} bump(u + (k − k'))` evaluated at
/// `u = log₂(value) − k`; equals 1 for `value = 0`.
#[inline]
pub fn lp_lowpass(value: f64, cutoff_exponent: f64) -> f64 {
    if value <= 0.0 {
        return 1.0;
    }
    let v = value.log2() - cutoff_exponent;
    // Subtract the shells at and above the cutoff; at most two overlap.
    let lo = (v - 0.75).ceil().max(0.0) as i64;
    let hi = (v + 0.75).floor() as i64;
    let mut high = 0.0;
    let mut m = lo;
    while m <= hi {
        high += lp_bump(v - m as f64);
        m += 1;
    }
    (1.0 - high).clamp(0.0, 1.0)
}

#[inline]
pub(crate) fn unpack4(idx: usize, n: usize) -> [usize; DIM] {
    let mask = n - 1;
    let bits = n.trailing_zeros() as usize;
    [
        (idx >> (3 * bits)) & mask,
        (idx >> (2 * bits)) & mask,
        (idx >> bits) & mask,
        idx & mask,
    ]
}

/// Cached symbol tables for one spatial grid, plus the cutoff constants.
#[derive(Debug, Clone)]
pub struct MultiplierBank {
    pub grid: GridSpec,
    /// Excluded band around `|τ| = |ξ|` for `□⁻¹`.
    pub cone_guard: f64,
    /// The constant `C` in `P_{<k−C}`, `Q_{<j−C}`.
    pub cutoff_c: i32,
    /// ξ components per spatial index.
    xi: Vec<[f64; DIM]>,
    /// |ξ| per spatial index.
    xi_norm: Vec<f64>,
}

impl MultiplierBank {
    pub fn new(grid: GridSpec) -> Self {
        Self::with_options(grid, grid.default_cone_guard(), 5)
    }

    pub fn with_options(grid: GridSpec, cone_guard: f64, cutoff_c: i32) -> Self {
        let dxi = grid.dxi();
        let len = grid.spatial_len();
        let mut xi = Vec::with_capacity(len);
        let mut xi_norm = Vec::with_capacity(len);
        for idx in 0..len {
            let ix = unpack4(idx, grid.n);
            let v = [
                grid.signed_mode(ix[0]) as f64 * dxi,
                grid.signed_mode(ix[1]) as f64 * dxi,
                grid.signed_mode(ix[2]) as f64 * dxi,
                grid.signed_mode(ix[3]) as f64 * dxi,
            ];
            xi.push(v);
            xi_norm.push((v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt());
        }
        MultiplierBank {
            grid,
            cone_guard,
            cutoff_c,
            xi,
            xi_norm,
        }
    }

    #[inline]
    pub fn xi(&self, spatial_idx: usize) -> &[f64; DIM] {
        &self.xi[spatial_idx]
    }

    #[inline]
    pub fn xi_norm(&self, spatial_idx: usize) -> f64 {
        self.xi_norm[spatial_idx]
    }

    /// Is the shell `k` inside the grid's resolvable dyadic range?
    pub fn k_in_range(&self, k: i32) -> bool {
        let (lo, hi) = self.grid.dyadic_range();
        (lo..=hi).contains(&k)
    }

    /// Apply a scalar symbol `ξ ↦ m(ξ, |ξ|)` on the spectral side, in place.
    pub fn apply_spatial_sym(
        &self,
        spec: &mut SpatialSpectrum,
        sym: impl Fn(&[f64; DIM], f64) -> Complex64 + Sync,
    ) {
        for (idx, c) in spec.coeffs.iter_mut().enumerate() {
            *c *= sym(&self.xi[idx], self.xi_norm[idx]);
        }
    }

    /// Apply a scalar space-time symbol `(τ, ξ) ↦ m` in place.
    pub fn apply_spacetime_sym(
        &self,
        spec: &mut SpacetimeSpectrum,
        sym: impl Fn(f64, &[f64; DIM], f64) -> Complex64 + Sync,
    ) {
        let slab = self.grid.spatial_len();
        let dtau = self.grid.dtau();
        for (t, chunk) in spec.coeffs.chunks_exact_mut(slab).enumerate() {
            let tau = self.grid.signed_mode_t(t) as f64 * dtau;
            for (idx, c) in chunk.iter_mut().enumerate() {
                *c *= sym(tau, &self.xi[idx], self.xi_norm[idx]);
            }
        }
    }

    /// Generic multiplier application with singular-mode detection.
    ///
    /// The symbol returns `None` where it is singular with no convention;
    /// if such a mode carries relative amplitude above `OCCUPANCY_TOL`, this
    /// is an error naming the mode.
    pub fn apply_spatial_multiplier(
        &self,
        f: &SpatialField,
        sym: impl Fn(&[f64; DIM], f64) -> Option<Complex64>,
    ) -> Result<SpatialField> {
        let mut spec = f.to_spectrum();
        let max_amp = spec.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = OCCUPANCY_TOL * max_amp;
        for (idx, c) in spec.coeffs.iter_mut().enumerate() {
            match sym(&self.xi[idx], self.xi_norm[idx]) {
                Some(m) => *c *= m,
                None => {
                    if c.norm() > tol {
                        let ix = unpack4(idx, self.grid.n);
                        let mode: Vec<i64> =
                            ix.iter().map(|&i| self.grid.signed_mode(i)).collect();
                        return Err(MkgError::SingularSymbol {
                            mode,
                            amplitude: c.norm(),
                        });
                    }
                    *c = Complex64::default();
                }
            }
        }
        Ok(spec.into_field())
    }

    /// Littlewood-Paley shell `P_k` (smooth restriction to `|ξ| ≈ 2^k`).
    pub fn pk(&self, f: &SpatialField, k: i32) -> SpatialField {
        let mut spec = f.to_spectrum();
        self.pk_spec(&mut spec, k);
        let mut out = spec.into_field();
        if f.parity == crate::field::Parity::Real {
            out.take_real();
        }
        out
    }

    pub fn pk_spec(&self, spec: &mut SpatialSpectrum, k: i32) {
        let scale = (2f64).powi(k);
        self.apply_spatial_sym(spec, |_, r| Complex64::new(chi(r / scale), 0.0));
    }

    /// Widened shell `p̃_k`, identically 1 on the support of `P_k`.
    pub fn pk_widened(&self, f: &SpatialField, k: i32) -> SpatialField {
        let mut spec = f.to_spectrum();
        let scale = (2f64).powi(k);
        self.apply_spatial_sym(&mut spec, |_, r| {
            if r <= 0.0 {
                Complex64::default()
            } else {
                Complex64::new(lp_bump_wide((r / scale).log2()), 0.0)
            }
        });
        spec.into_field()
    }

    /// Spatial low-pass `P_{<k}` (includes the mean).
    pub fn p_lowpass_spec(&self, spec: &mut SpatialSpectrum, k: i32) {
        self.apply_spatial_sym(spec, |_, r| Complex64::new(lp_lowpass(r, k as f64), 0.0));
    }

    /// Modulation shell `Q_j`: restriction to `||τ| − |ξ|| ≈ 2^j`. Respects
    /// the grid's taper setting on analysis.
    pub fn qj(&self, f: &SpacetimeField, j: i32) -> SpacetimeField {
        let mut spec = f.to_spectrum();
        self.qj_spec(&mut spec, j);
        spec.into_field()
    }

    pub fn qj_spec(&self, spec: &mut SpacetimeSpectrum, j: i32) {
        let scale = (2f64).powi(j);
        self.apply_spacetime_sym(spec, |tau, _, r| {
            Complex64::new(chi((tau.abs() - r).abs() / scale), 0.0)
        });
    }

    /// Modulation low-pass `Q_{<j}`; passes exactly on-cone modes.
    pub fn q_lowpass_spec(&self, spec: &mut SpacetimeSpectrum, j: i32) {
        self.apply_spacetime_sym(spec, |tau, _, r| {
            Complex64::new(lp_lowpass((tau.abs() - r).abs(), j as f64), 0.0)
        });
    }

    /// Space-time frequency shell `S_l`: `|(τ,ξ)| ≈ 2^l`.
    pub fn sl_spec(&self, spec: &mut SpacetimeSpectrum, l: i32) {
        let scale = (2f64).powi(l);
        self.apply_spacetime_sym(spec, |tau, _, r| {
            Complex64::new(chi((tau * tau + r * r).sqrt() / scale), 0.0)
        });
    }

    /// Space-time frequency low-pass `S_{<l}`.
    pub fn s_lowpass_spec(&self, spec: &mut SpacetimeSpectrum, l: i32) {
        self.apply_spacetime_sym(spec, |tau, _, r| {
            Complex64::new(lp_lowpass((tau * tau + r * r).sqrt(), l as f64), 0.0)
        });
    }

    /// Spectral partial derivative `∂_axis` of a spatial field.
    ///
    /// Output parity is `Complex`: the signed-Nyquist convention makes the
    /// derivative exact mode-wise algebra, but a real field with Nyquist
    /// content picks up an imaginary part there. Band-limited callers that
    /// need realness call `take_real` themselves.
    pub fn derivative(&self, f: &SpatialField, axis: usize) -> SpatialField {
        let mut spec = f.to_spectrum();
        self.derivative_spec(&mut spec, axis);
        spec.into_field()
    }

    pub fn derivative_spec(&self, spec: &mut SpatialSpectrum, axis: usize) {
        // Plain iξ, with the Nyquist bin carrying its signed value -N/2;
        // this keeps ∇, div, Leray exact mode-wise algebra on any input.
        // Physical inputs are band-limited below Nyquist by construction.
        self.apply_spatial_sym(spec, |xi, _| Complex64::new(0.0, xi[axis]));
    }

    /// Spectral gradient of a spatial field.
    pub fn gradient(&self, f: &SpatialField) -> [SpatialField; 4] {
        let spec = f.to_spectrum();
        std::array::from_fn(|axis| {
            let mut s = spec.clone();
            self.derivative_spec(&mut s, axis);
            s.into_field()
        })
    }

    /// Spectral divergence of a spatial vector field.
    pub fn divergence(&self, a: &[SpatialField; 4]) -> SpatialField {
        let mut acc = SpatialSpectrum::zeros(a[0].grid);
        for (axis, comp) in a.iter().enumerate() {
            let mut s = comp.to_spectrum();
            self.derivative_spec(&mut s, axis);
            for (out, v) in acc.coeffs.iter_mut().zip(&s.coeffs) {
                *out += v;
            }
        }
        acc.into_field()
    }

    /// Leray projection `(Pv)_ξ = v − ξ(ξ·v)/|ξ|²` mode-wise; the ξ = 0 mode
    /// is passed through unchanged. The returned flag is true when any
    /// component carried a nonzero mean.
    pub fn leray(&self, a: &[SpatialField; 4]) -> ([SpatialField; 4], bool) {
        let specs: Vec<SpatialSpectrum> = a.iter().map(|f| f.to_spectrum()).collect();
        let len = self.grid.spatial_len();
        let max_amp = specs
            .iter()
            .flat_map(|s| s.coeffs.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let mean_flag = specs
            .iter()
            .any(|s| s.coeffs[0].norm() > OCCUPANCY_TOL * max_amp.max(1e-300));
        let mut out: Vec<SpatialSpectrum> = specs.clone();
        for idx in 1..len {
            let xi = &self.xi[idx];
            let r2 = self.xi_norm[idx] * self.xi_norm[idx];
            if r2 == 0.0 {
                continue;
            }
            let dot: Complex64 = (0..DIM).map(|a| specs[a].coeffs[idx] * xi[a]).sum();
            for axis in 0..DIM {
                out[axis].coeffs[idx] = specs[axis].coeffs[idx] - dot * (xi[axis] / r2);
            }
        }
        let real_in = a.iter().all(|c| c.parity == crate::field::Parity::Real);
        let fields: [SpatialField; 4] = std::array::from_fn(|axis| {
            let mut f = out[axis].clone().into_field();
            if real_in {
                f.take_real();
            }
            f
        });
        (fields, mean_flag)
    }

    /// `Δ⁻¹`: division by `−|ξ|²`; the mean is left untouched and flagged.
    pub fn inv_lap(&self, f: &SpatialField) -> (SpatialField, bool) {
        let mut spec = f.to_spectrum();
        let max_amp = spec.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mean_flag = spec.coeffs[0].norm() > OCCUPANCY_TOL * max_amp.max(1e-300);
        for idx in 1..spec.coeffs.len() {
            let r2 = self.xi_norm[idx] * self.xi_norm[idx];
            spec.coeffs[idx] /= -r2;
        }
        let mut out = spec.into_field();
        if f.parity == crate::field::Parity::Real {
            out.take_real();
        }
        (out, mean_flag)
    }

    /// `Δ⁻¹` on a space-time field, slice-wise in time (raw transform).
    pub fn inv_lap_spacetime(&self, f: &SpacetimeField) -> (SpacetimeField, bool) {
        let mut spec = f.to_spectrum_raw();
        let max_amp = spec.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let slab = self.grid.spatial_len();
        let mut mean_flag = false;
        for (_, chunk) in spec.coeffs.chunks_exact_mut(slab).enumerate() {
            if chunk[0].norm() > OCCUPANCY_TOL * max_amp.max(1e-300) {
                mean_flag = true;
            }
            for (idx, c) in chunk.iter_mut().enumerate().skip(1) {
                let r2 = self.xi_norm[idx] * self.xi_norm[idx];
                *c /= -r2;
            }
        }
        (spec.into_field(), mean_flag)
    }

    /// Forward `□ = ∂_t² − Δ` (raw transform; symbol `|ξ|² − τ²`).
    pub fn box_apply(&self, f: &SpacetimeField) -> SpacetimeField {
        let mut spec = f.to_spectrum_raw();
        self.apply_spacetime_sym(&mut spec, |tau, _, r| Complex64::new(r * r - tau * tau, 0.0));
        spec.into_field()
    }

    /// `□⁻¹`: division by `|ξ|² − τ²` away from the cone guard band.
    ///
    /// Every occupied mode must satisfy `||τ| − |ξ|| ≥ η`; otherwise the
    /// offending `(τ, ξ)` is reported as a `ConeResonance`.
    pub fn inv_box(&self, f: &SpacetimeField) -> Result<SpacetimeField> {
        let mut spec = f.to_spectrum_raw();
        self.inv_box_spec(&mut spec)?;
        Ok(spec.into_field())
    }

    /// Spectral-side `□⁻¹` (used inside multiplier chains).
    pub fn inv_box_spec(&self, spec: &mut SpacetimeSpectrum) -> Result<()> {
        let slab = self.grid.spatial_len();
        let dtau = self.grid.dtau();
        let max_amp = spec.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = OCCUPANCY_TOL * max_amp.max(1e-300);
        for (t, chunk) in spec.coeffs.chunks_exact_mut(slab).enumerate() {
            let tau = self.grid.signed_mode_t(t) as f64 * dtau;
            for (idx, c) in chunk.iter_mut().enumerate() {
                let r = self.xi_norm[idx];
                let gap = (tau.abs() - r).abs();
                if gap < self.cone_guard {
                    if c.norm() > tol {
                        let ix = unpack4(idx, self.grid.n);
                        return Err(MkgError::ConeResonance {
                            tau,
                            xi: ix.iter().map(|&i| self.grid.signed_mode(i)).collect(),
                            gap,
                            guard: self.cone_guard,
                        });
                    }
                    *c = Complex64::default();
                } else {
                    *c /= r * r - tau * tau;
                }
            }
        }
        Ok(())
    }

    /// Space-time spectral derivative: axis 0 is `∂_t`, axes 1..=4 spatial.
    pub fn st_derivative_spec(&self, spec: &mut SpacetimeSpectrum, axis: usize) {
        if axis == 0 {
            let slab = self.grid.spatial_len();
            let dtau = self.grid.dtau();
            for (t, chunk) in spec.coeffs.chunks_exact_mut(slab).enumerate() {
                let tau = self.grid.signed_mode_t(t) as f64 * dtau;
                let m = Complex64::new(0.0, tau);
                for c in chunk.iter_mut() {
                    *c *= m;
                }
            }
        } else {
            let sp = axis - 1;
            self.apply_spacetime_sym(spec, |_, xi, _| Complex64::new(0.0, xi[sp]));
        }
    }
}

/// Sum of all shells `Σ_k P_k f` over the grid's dyadic range.
pub fn lp_resum(bank: &MultiplierBank, f: &SpatialField) -> SpatialField {
    let (k_min, k_max) = bank.grid.dyadic_range();
    let mut spec = f.to_spectrum();
    bank.apply_spatial_sym(&mut spec, |_, r| {
        let mut s = 0.0;
        for k in k_min..=k_max {
            s += chi(r / (2f64).powi(k));
        }
        Complex64::new(s, 0.0)
    });
    spec.into_field()
}
