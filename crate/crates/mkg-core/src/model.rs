//! MKG-CG state geometry: covariant derivative, curvature, currents,
//! energy, gauge transformations, scaling, and admissible-data preparation.
//!
//! Component conventions (signature `diag(1,-1,-1,-1,-1)`, see
//! `docs/conventions.md`):
//!
//! - `D_αφ = ∂_αφ + iA_αφ`,
//! - `F_{αβ} = ∂_αA_β − ∂_βA_α`,
//! - `J_α = −Im(φ·conj(D_αφ))`,
//! - `E = ∫ ¼ Σ_{αβ} F_{αβ}² + ½ Σ_α |D_αφ|²`.
//!
//! On the torus the `A_0` equation closes as
//! `(Δ − |φ|²)A_0 = −Im(φ·conj(∂_tφ))`, which is invertible without a
//! compatibility condition; the data must be charge-neutral
//! (`∫ Im(φ·conj(∂_tφ)) ≈ 0`) to stay in the small-data regime.

use crate::error::{MkgError, Result};
use crate::field::{Parity, SpatialField};
use crate::grid::{GridSpec, DIM};
use crate::spectral::MultiplierBank;
use num_complex::Complex64;

/// Full MKG Cauchy state at one time in Coulomb gauge.
///
/// The Coulomb constraint `div A_x = div ∂_tA_x = 0` and the elliptic
/// consistency of `(A_0, ∂_tA_0)` hold for states built by `prepare_data`;
/// `gauge_transform` deliberately leaves the gauge slice, so the invariants
/// are checked by [`GaugeState::coulomb_residual`] where needed rather than
/// enforced on construction.
#[derive(Debug, Clone)]
pub struct GaugeState {
    pub a_x: [SpatialField; DIM],
    pub dt_a_x: [SpatialField; DIM],
    pub a_0: SpatialField,
    pub dt_a_0: SpatialField,
    pub phi: SpatialField,
    pub dt_phi: SpatialField,
    pub time: f64,
}

/// Charge and current densities `J_0`, `J_x`.
#[derive(Debug, Clone)]
pub struct CurrentDensity {
    pub j_0: SpatialField,
    pub j_x: [SpatialField; DIM],
}

/// Field/matter split of the conserved energy.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EnergyReport {
    pub field_energy: f64,
    pub matter_energy: f64,
    pub total: f64,
}

/// Gauge function data `(χ, ∂_tχ, ∂_t²χ)` for one time slice.
#[derive(Debug, Clone)]
pub struct GaugeFunction {
    pub chi: SpatialField,
    pub chi_t: SpatialField,
    pub chi_tt: SpatialField,
}

impl GaugeFunction {
    /// Static gauge function (`∂_tχ = ∂_t²χ = 0`).
    pub fn static_chi(chi: SpatialField) -> Self {
        let grid = chi.grid;
        GaugeFunction {
            chi,
            chi_t: SpatialField::zeros(grid),
            chi_tt: SpatialField::zeros(grid),
        }
    }
}

impl GaugeState {
    pub fn zeros(grid: GridSpec) -> Self {
        GaugeState {
            a_x: std::array::from_fn(|_| SpatialField::zeros(grid)),
            dt_a_x: std::array::from_fn(|_| SpatialField::zeros(grid)),
            a_0: SpatialField::zeros(grid),
            dt_a_0: SpatialField::zeros(grid),
            phi: SpatialField::zeros(grid),
            dt_phi: SpatialField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.phi.grid
    }

    /// Max of `‖div A_x‖`, `‖div ∂_tA_x‖` relative to the field sizes.
    pub fn coulomb_residual(&self, bank: &MultiplierBank) -> f64 {
        let scale = self
            .a_x
            .iter()
            .chain(self.dt_a_x.iter())
            .map(|f| f.l2_norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let d1 = bank.divergence(&self.a_x).l2_norm();
        let d2 = bank.divergence(&self.dt_a_x).l2_norm();
        d1.max(d2) / scale
    }

    /// Residuals of the two elliptic `A_0` equations against this state's
    /// own currents, relative to `‖φ‖²`.
    pub fn elliptic_residual(&self, bank: &MultiplierBank) -> f64 {
        let j = current(bank, self);
        let scale = self.phi.l2_norm().powi(2).max(1e-300);
        let r1 = lap_spatial(bank, &self.a_0).sub(&j.j_0).l2_norm();
        let div_j = bank.divergence(&j.j_x);
        let r2 = lap_spatial(bank, &self.dt_a_0).sub(&div_j).l2_norm();
        r1.max(r2) / scale
    }
}

fn lap_spatial(bank: &MultiplierBank, f: &SpatialField) -> SpatialField {
    let mut spec = f.to_spectrum();
    bank.apply_spatial_sym(&mut spec, |_, r| Complex64::new(-(r * r), 0.0));
    spec.into_field()
}

/// Covariant derivative `D_αφ = ∂_αφ + iA_αφ`; `α = 0` is time.
pub fn covariant_derivative(
    bank: &MultiplierBank,
    state: &GaugeState,
    alpha: usize,
) -> SpatialField {
    assert!(alpha <= DIM);
    let mut out = if alpha == 0 {
        state.dt_phi.clone()
    } else {
        bank.derivative(&state.phi, alpha - 1)
    };
    let potential = if alpha == 0 {
        &state.a_0
    } else {
        &state.a_x[alpha - 1]
    };
    for (o, (a, p)) in out
        .values
        .iter_mut()
        .zip(potential.values.iter().zip(&state.phi.values))
    {
        *o += Complex64::i() * a * p;
    }
    out.parity = Parity::Complex;
    out
}

/// Antisymmetric curvature family `F_{αβ}`; stores the 10 components with
/// `α < β` and returns `±` on access.
#[derive(Debug, Clone)]
pub struct Curvature {
    grid: GridSpec,
    /// Order: (0,1),(0,2),(0,3),(0,4),(1,2),(1,3),(1,4),(2,3),(2,4),(3,4).
    upper: Vec<SpatialField>,
}

impl Curvature {
    fn slot(alpha: usize, beta: usize) -> usize {
        debug_assert!(alpha < beta && beta <= DIM);
        const OFFSET: [usize; 4] = [0, 4, 7, 9];
        OFFSET[alpha] + (beta - alpha - 1)
    }

    /// `F_{αβ}` with either index order (antisymmetric by construction).
    pub fn get(&self, alpha: usize, beta: usize) -> SpatialField {
        if alpha == beta {
            return SpatialField::zeros(self.grid);
        }
        if alpha < beta {
            self.upper[Self::slot(alpha, beta)].clone()
        } else {
            let mut f = self.upper[Self::slot(beta, alpha)].clone();
            f.scale(Complex64::new(-1.0, 0.0));
            f
        }
    }

    pub fn components(&self) -> &[SpatialField] {
        &self.upper
    }
}

/// Curvature tensor of a state, with `∂_0 A_x` taken from the stored
/// `dt_a_x` and spatial derivatives spectral.
pub fn curvature(bank: &MultiplierBank, state: &GaugeState) -> Curvature {
    let grid = state.grid();
    let mut upper = Vec::with_capacity(10);
    // F_{0i} = ∂_t A_i − ∂_i A_0.
    for i in 0..DIM {
        let mut f = state.dt_a_x[i].clone();
        f.sub_assign(&bank.derivative(&state.a_0, i));
        f.take_real();
        upper.push(f);
    }
    // F_{ij} = ∂_i A_j − ∂_j A_i.
    for i in 0..DIM {
        for j in i + 1..DIM {
            let mut f = bank.derivative(&state.a_x[j], i);
            f.sub_assign(&bank.derivative(&state.a_x[i], j));
            f.take_real();
            upper.push(f);
        }
    }
    Curvature { grid, upper }
}

/// `−Im(φ·conj(ψ))` pointwise, returned as a real field.
pub fn minus_im_pair(phi: &SpatialField, psi: &SpatialField) -> SpatialField {
    let values = phi
        .values
        .iter()
        .zip(&psi.values)
        .map(|(p, d)| Complex64::new(-(p * d.conj()).im, 0.0))
        .collect();
    SpatialField {
        grid: phi.grid,
        values,
        parity: Parity::Real,
    }
}

/// Currents `J_α = −Im(φ·conj(D_αφ))`; pointwise real by construction.
pub fn current(bank: &MultiplierBank, state: &GaugeState) -> CurrentDensity {
    let d0 = covariant_derivative(bank, state, 0);
    let j_0 = minus_im_pair(&state.phi, &d0);
    let j_x = std::array::from_fn(|i| {
        let di = covariant_derivative(bank, state, i + 1);
        minus_im_pair(&state.phi, &di)
    });
    CurrentDensity { j_0, j_x }
}

/// Grid quadrature of the conserved energy.
pub fn energy(bank: &MultiplierBank, state: &GaugeState) -> EnergyReport {
    let grid = state.grid();
    let w = grid.dx().powi(DIM as i32);
    let f = curvature(bank, state);
    // ¼ Σ_{α,β} F² = ½ Σ_{α<β} F².
    let field_energy: f64 = 0.5
        * w
        * f.upper
            .iter()
            .map(|c| c.values.iter().map(|v| v.re * v.re).sum::<f64>())
            .sum::<f64>();
    let mut matter = 0.0;
    for alpha in 0..=DIM {
        let d = covariant_derivative(bank, state, alpha);
        matter += d.values.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    let matter_energy = 0.5 * w * matter;
    EnergyReport {
        field_energy,
        matter_energy,
        total: field_energy + matter_energy,
    }
}

/// Gauge transformation `A_α ↦ A_α − ∂_αχ`, `φ ↦ e^{iχ}φ`, with time
/// derivatives transformed consistently.
pub fn gauge_transform(bank: &MultiplierBank, state: &GaugeState, g: &GaugeFunction) -> GaugeState {
    let grid = state.grid();
    let grad_chi = bank.gradient(&g.chi);
    let grad_chi_t = bank.gradient(&g.chi_t);

    let a_x = std::array::from_fn(|i| {
        let mut a = state.a_x[i].clone();
        a.sub_assign(&grad_chi[i]);
        a.take_real();
        a
    });
    let dt_a_x = std::array::from_fn(|i| {
        let mut a = state.dt_a_x[i].clone();
        a.sub_assign(&grad_chi_t[i]);
        a.take_real();
        a
    });
    let mut a_0 = state.a_0.clone();
    a_0.sub_assign(&g.chi_t);
    a_0.take_real();
    let mut dt_a_0 = state.dt_a_0.clone();
    dt_a_0.sub_assign(&g.chi_tt);
    dt_a_0.take_real();

    let mut phi = SpatialField::zeros(grid);
    let mut dt_phi = SpatialField::zeros(grid);
    phi.parity = Parity::Complex;
    dt_phi.parity = Parity::Complex;
    for idx in 0..grid.spatial_len() {
        let rot = (Complex64::i() * g.chi.values[idx].re).exp();
        phi.values[idx] = rot * state.phi.values[idx];
        // ∂_t(e^{iχ}φ) = e^{iχ}(∂_tφ + i∂_tχ·φ).
        dt_phi.values[idx] = rot
            * (state.dt_phi.values[idx]
                + Complex64::i() * g.chi_t.values[idx].re * state.phi.values[idx]);
    }

    GaugeState {
        a_x,
        dt_a_x,
        a_0,
        dt_a_0,
        phi,
        dt_phi,
        time: state.time,
    }
}

/// Rescale `φ → λφ(λt, λx)`, `A → λA(λt, λx)` onto the companion grid
/// (same sample count, period `L/λ`), reusing the samples exactly.
pub fn rescale(state: &GaugeState, lambda: f64) -> Result<GaugeState> {
    let grid = state.grid().companion(lambda)?;
    let s1 = Complex64::new(lambda, 0.0);
    let s2 = Complex64::new(lambda * lambda, 0.0);
    let map = |f: &SpatialField, s: Complex64| {
        let mut g = f.clone();
        g.grid = grid;
        g.scale(s);
        g
    };
    Ok(GaugeState {
        a_x: std::array::from_fn(|i| map(&state.a_x[i], s1)),
        dt_a_x: std::array::from_fn(|i| map(&state.dt_a_x[i], s2)),
        a_0: map(&state.a_0, s1),
        dt_a_0: map(&state.dt_a_0, s2),
        phi: map(&state.phi, s1),
        dt_phi: map(&state.dt_phi, s2),
        time: state.time / lambda,
    })
}

/// Tolerance deciding whether residual charge is an error, not roundoff.
const MEAN_TOL: f64 = 1e-10;

/// Self-consistent solve of `(Δ − |φ|²)A_0 = −Im(φ·conj(∂_tφ))` and
/// `Δ ∂_tA_0 = div J_x`.
pub fn solve_a0(
    bank: &MultiplierBank,
    phi: &SpatialField,
    dt_phi: &SpatialField,
    a_x: &[SpatialField; DIM],
) -> Result<(SpatialField, SpatialField)> {
    let grid = phi.grid;
    let s = minus_im_pair(phi, dt_phi);
    let phi2: Vec<f64> = phi.values.iter().map(|v| v.norm_sqr()).collect();
    let mean_phi2 = phi2.iter().sum::<f64>() / phi2.len() as f64;
    let scale = s.l2_norm().max(1e-300);

    let mut a0 = SpatialField::zeros(grid);
    if mean_phi2 < 1e-300 {
        // φ ≡ 0 degenerates to a plain Poisson problem.
        let mean_s = s.mean().norm();
        if mean_s > MEAN_TOL * (scale + 1.0) {
            return Err(MkgError::NonzeroMeanSource { amplitude: mean_s });
        }
        let (mut sol, _) = bank.inv_lap(&s);
        sol.take_real();
        a0 = sol;
    } else {
        // Fixed point for Δa0 = S + |φ|²a0, with the mean of a0 chosen so
        // the right-hand side stays mean-zero; contraction rate ~ ‖φ‖²/λ₁.
        for _ in 0..80 {
            let mut rhs = s.clone();
            for (r, (p2, a)) in rhs.values.iter_mut().zip(phi2.iter().zip(&a0.values)) {
                *r += p2 * a.re;
            }
            let mean_rhs = rhs.mean().re;
            let correction = -mean_rhs / mean_phi2;
            for (r, p2) in rhs.values.iter_mut().zip(&phi2) {
                *r += p2 * correction;
            }
            rhs.take_real();
            let (mut sol, _) = bank.inv_lap(&rhs);
            let shift = a0.mean().re + correction;
            for v in sol.values.iter_mut() {
                v.re += shift;
            }
            sol.take_real();
            let delta = sol.rel_err(&a0);
            a0 = sol;
            if delta < 1e-15 {
                break;
            }
        }
        // (Δ − |φ|²)a0 − S must vanish; failure means non-neutral data.
        let mut res = lap_spatial(bank, &a0);
        for (r, (p2, a)) in res.values.iter_mut().zip(phi2.iter().zip(&a0.values)) {
            *r -= p2 * a;
        }
        res.sub_assign(&s);
        if res.l2_norm() > 1e-8 * (scale + a0.l2_norm()) {
            return Err(MkgError::NonzeroMeanSource {
                amplitude: res.l2_norm(),
            });
        }
    }

    // J_x = −Im(φ·conj(D_xφ)); its divergence is mean-zero exactly.
    let j_x: [SpatialField; DIM] = std::array::from_fn(|i| {
        let mut di = bank.derivative(phi, i);
        for (d, (a, p)) in di
            .values
            .iter_mut()
            .zip(a_x[i].values.iter().zip(&phi.values))
        {
            *d += Complex64::i() * a * p;
        }
        minus_im_pair(phi, &di)
    });
    let div_j = bank.divergence(&j_x);
    let (mut dt_a0, _) = bank.inv_lap(&div_j);
    dt_a0.take_real();
    Ok((a0, dt_a0))
}

/// Coulomb gauge fixing of raw data.
///
/// Solves `Δλ = div A_raw` and applies the full gauge transform
/// `(A − ∇λ, e^{iλ}φ)` including the `∂_tλ` part on time derivatives, then
/// solves the elliptic `A_0` equations. Gauge-equivalent raw data map to
/// the same Coulomb state up to a constant phase, and the map is a
/// projection.
pub fn prepare_data(
    bank: &MultiplierBank,
    raw_a_x: &[SpatialField; DIM],
    raw_dt_a_x: &[SpatialField; DIM],
    phi: &SpatialField,
    dt_phi: &SpatialField,
) -> Result<GaugeState> {
    let grid = phi.grid;

    // Connection means are pure gauge on the torus; removed here.
    let mut a_raw: [SpatialField; DIM] = raw_a_x.clone();
    let mut dta_raw: [SpatialField; DIM] = raw_dt_a_x.clone();
    for f in a_raw.iter_mut().chain(dta_raw.iter_mut()) {
        f.remove_mean();
        f.take_real();
    }

    // Gauge function onto the Coulomb slice.
    let div_a = bank.divergence(&a_raw);
    let div_dta = bank.divergence(&dta_raw);
    let (mut lambda, _) = bank.inv_lap(&div_a);
    let (mut lambda_t, _) = bank.inv_lap(&div_dta);
    lambda.take_real();
    lambda_t.take_real();

    let grad_l = bank.gradient(&lambda);
    let grad_lt = bank.gradient(&lambda_t);
    let a_x: [SpatialField; DIM] = std::array::from_fn(|i| {
        let mut a = a_raw[i].clone();
        a.sub_assign(&grad_l[i]);
        a.take_real();
        a
    });
    let dt_a_x: [SpatialField; DIM] = std::array::from_fn(|i| {
        let mut a = dta_raw[i].clone();
        a.sub_assign(&grad_lt[i]);
        a.take_real();
        a
    });

    let mut new_phi = SpatialField::zeros(grid);
    let mut new_dt_phi = SpatialField::zeros(grid);
    new_phi.parity = Parity::Complex;
    new_dt_phi.parity = Parity::Complex;
    for idx in 0..grid.spatial_len() {
        let rot = (Complex64::i() * lambda.values[idx].re).exp();
        new_phi.values[idx] = rot * phi.values[idx];
        new_dt_phi.values[idx] = rot
            * (dt_phi.values[idx] + Complex64::i() * lambda_t.values[idx].re * phi.values[idx]);
    }

    let (a_0, dt_a_0) = solve_a0(bank, &new_phi, &new_dt_phi, &a_x)?;

    Ok(GaugeState {
        a_x,
        dt_a_x,
        a_0,
        dt_a_0,
        phi: new_phi,
        dt_phi: new_dt_phi,
        time: 0.0,
    })
}

/// `sup_t ‖∂_tJ_0 − div J_x‖_{L²}` over a uniformly sampled trace, with
/// `∂_t` by centered differences.
pub fn current_divergence_residual(
    bank: &MultiplierBank,
    states: &[GaugeState],
    dt: f64,
) -> Result<f64> {
    if states.len() < 3 {
        return Err(MkgError::TooFewSamples {
            needed: 3,
            got: states.len(),
        });
    }
    let currents: Vec<CurrentDensity> = states.iter().map(|s| current(bank, s)).collect();
    let mut worst: f64 = 0.0;
    for m in 1..states.len() - 1 {
        let mut r = currents[m + 1].j_0.clone();
        r.sub_assign(&currents[m - 1].j_0);
        r.scale(Complex64::new(1.0 / (2.0 * dt), 0.0));
        r.sub_assign(&bank.divergence(&currents[m].j_x));
        worst = worst.max(r.l2_norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn bank8() -> MultiplierBank {
        MultiplierBank::new(GridSpec::spatial(8, std::f64::consts::TAU))
    }

    #[test]
    fn covariant_derivative_flat_and_shifted() {
        let bank = bank8();
        let grid = bank.grid;
        let mut st = GaugeState::zeros(grid);
        st.phi = SpatialField::from_mode(grid, [2, 0, 0, 0], Complex64::new(1.0, 0.0));
        // A = 0: D_1φ = ∂_1φ = iξ_1 φ.
        let d1 = covariant_derivative(&bank, &st, 1);
        for (d, p) in d1.values.iter().zip(&st.phi.values) {
            assert!((d - Complex64::i() * 2.0 * p).norm() < 1e-12);
        }
        // Constant A_1 = c: D_1φ = i(ξ_1 + c)φ.
        let c = 0.37;
        st.a_x[0]
            .values
            .iter_mut()
            .for_each(|v| *v = Complex64::new(c, 0.0));
        let d1 = covariant_derivative(&bank, &st, 1);
        for (d, p) in d1.values.iter().zip(&st.phi.values) {
            assert!((d - Complex64::i() * (2.0 + c) * p).norm() < 1e-12);
        }
        // φ = 0 → 0.
        st.phi = SpatialField::zeros(grid);
        st.dt_phi = SpatialField::zeros(grid);
        assert!(covariant_derivative(&bank, &st, 0).l2_norm() == 0.0);
    }

    #[test]
    fn curvature_of_pure_gradient_vanishes() {
        let bank = bank8();
        let grid = bank.grid;
        let chi = data::random_real_band_limited(&bank, 42, 0, 2);
        let chi_t = data::random_real_band_limited(&bank, 43, 0, 2);
        let mut st = GaugeState::zeros(grid);
        let grad = bank.gradient(&chi);
        let grad_t = bank.gradient(&chi_t);
        for i in 0..DIM {
            st.a_x[i] = grad[i].clone();
            st.dt_a_x[i] = grad_t[i].clone();
        }
        st.a_0 = chi_t; // A_0 = ∂_tχ closes the flat connection in time.
        let f = curvature(&bank, &st);
        for c in f.components() {
            assert!(c.l2_norm() < 1e-11);
        }
    }

    #[test]
    fn curvature_single_mode_oracle() {
        let bank = bank8();
        let grid = bank.grid;
        let mut st = GaugeState::zeros(grid);
        // A_1 = sin(2 x_2).
        st.a_x[0] = SpatialField::from_fn(grid, |x| Complex64::new((2.0 * x[1]).sin(), 0.0));
        st.a_x[0].parity = Parity::Real;
        let f = curvature(&bank, &st);
        // F_{21} = ∂_2 A_1 = 2cos(2 x_2) (spectral-derivative oracle).
        let f12 = f.get(1, 2);
        let f21 = f.get(2, 1);
        let oracle = SpatialField::from_fn(grid, |x| Complex64::new(2.0 * (2.0 * x[1]).cos(), 0.0));
        assert!(f21.rel_err(&oracle) < 1e-12);
        let mut sum = f12.clone();
        sum.add_assign(&f21);
        assert!(sum.sup_norm() < 1e-13);
    }

    #[test]
    fn current_sign_and_gauge_invariance() {
        let bank = bank8();
        let grid = bank.grid;
        let mut st = GaugeState::zeros(grid);

        // Real φ, A = 0 → J ≡ 0.
        st.phi = data::random_real_band_limited(&bank, 7, 0, 2);
        st.dt_phi = data::random_real_band_limited(&bank, 8, 0, 2);
        let j = current(&bank, &st);
        assert!(j.j_x[2].sup_norm() < 1e-11);

        // φ = e^{iξ·x}: J_j = +ξ_j.
        st.phi = SpatialField::from_mode(grid, [1, 3, 0, -2], Complex64::new(1.0, 0.0));
        st.dt_phi = SpatialField::zeros(grid);
        let j = current(&bank, &st);
        let xi = [1.0, 3.0, 0.0, -2.0];
        for i in 0..DIM {
            for v in &j.j_x[i].values {
                assert!((v.re - xi[i]).abs() < 1e-11, "axis {i}");
            }
        }

        // Gauge transform leaves J pointwise invariant.
        let st2 = data::random_state(&bank, 100, 0.1, 2).unwrap();
        let g = GaugeFunction {
            chi: data::random_real_band_limited(&bank, 101, 0, 1),
            chi_t: data::random_real_band_limited(&bank, 102, 0, 1),
            chi_tt: SpatialField::zeros(grid),
        };
        let transformed = gauge_transform(&bank, &st2, &g);
        let j1 = current(&bank, &st2);
        let j2 = current(&bank, &transformed);
        assert!(j1.j_0.rel_err(&j2.j_0) < 1e-12);
        for i in 0..DIM {
            assert!(j1.j_x[i].rel_err(&j2.j_x[i]) < 1e-12);
        }
    }

    #[test]
    fn energy_single_mode_quadrature() {
        let bank = bank8();
        let grid = bank.grid;
        let mut st = GaugeState::zeros(grid);
        let eps = 0.01;
        // φ = ε e^{iξ·x}, |ξ|² = 4, L⁴ = (2π)⁴.
        st.phi = SpatialField::from_mode(grid, [0, 2, 0, 0], Complex64::new(eps, 0.0));
        let e = energy(&bank, &st);
        let expect = 0.5 * eps * eps * 4.0 * grid.period.powi(4);
        assert!((e.matter_energy - expect).abs() < 1e-12 * expect);
        assert!(e.field_energy.abs() < 1e-20);

        let zero = GaugeState::zeros(grid);
        assert_eq!(energy(&bank, &zero).total, 0.0);
    }

    #[test]
    fn gauge_transform_invariants() {
        let bank = bank8();
        let grid = bank.grid;
        let st = data::random_state(&bank, 55, 0.2, 2).unwrap();
        let g = GaugeFunction {
            chi: data::random_real_band_limited(&bank, 56, 0, 1),
            chi_t: data::random_real_band_limited(&bank, 57, 0, 1),
            chi_tt: data::random_real_band_limited(&bank, 58, 0, 1),
        };
        let tr = gauge_transform(&bank, &st, &g);

        // χ = 0 is the identity; constant χ rotates φ by a unit phase.
        let id = gauge_transform(
            &bank,
            &st,
            &GaugeFunction::static_chi(SpatialField::zeros(grid)),
        );
        assert!(id.phi.rel_err(&st.phi) < 1e-14);

        // F, |φ|, energy all invariant.
        let f1 = curvature(&bank, &st);
        let f2 = curvature(&bank, &tr);
        for (a, b) in f1.components().iter().zip(f2.components()) {
            if a.l2_norm() > 1e-14 {
                assert!(a.rel_err(b) < 1e-10);
            }
        }
        for (a, b) in st.phi.values.iter().zip(&tr.phi.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
        let e1 = energy(&bank, &st);
        let e2 = energy(&bank, &tr);
        assert!((e1.total - e2.total).abs() < 1e-10 * e1.total);
    }

    #[test]
    fn rescale_energy_invariant_and_involutive() {
        let bank = bank8();
        let st = data::random_state(&bank, 77, 0.3, 2).unwrap();
        let up = rescale(&st, 2.0).unwrap();
        let bank_up = MultiplierBank::new(up.grid());
        let e0 = energy(&bank, &st).total;
        let e1 = energy(&bank_up, &up).total;
        assert!((e0 - e1).abs() < 1e-10 * e0, "E {e0} vs rescaled {e1}");

        let back = rescale(&up, 0.5).unwrap();
        assert!(back.phi.rel_err(&st.phi) < 1e-14);
        assert!(back.a_x[1].rel_err(&st.a_x[1]) < 1e-14);
        assert!((back.grid().period - st.grid().period).abs() < 1e-12);

        let zero = GaugeState::zeros(bank.grid);
        let z2 = rescale(&zero, 2.0).unwrap();
        assert_eq!(energy(&MultiplierBank::new(z2.grid()), &z2).total, 0.0);

        assert!(rescale(&st, 3.0).is_err());
    }

    #[test]
    fn prepare_data_is_projection_and_satisfies_constraints() {
        let bank = bank8();
        let (a_raw, dta_raw, phi, dtphi) = data::random_raw_data(&bank, 300, 0.2, 2);
        let st = prepare_data(&bank, &a_raw, &dta_raw, &phi, &dtphi).unwrap();
        assert!(st.coulomb_residual(&bank) < 1e-12);
        assert!(st.elliptic_residual(&bank) < 1e-9);

        // Idempotence.
        let st2 = prepare_data(&bank, &st.a_x, &st.dt_a_x, &st.phi, &st.dt_phi).unwrap();
        assert!(st2.phi.rel_err(&st.phi) < 1e-12);
        assert!(st2.a_x[0].rel_err(&st.a_x[0]) < 1e-12);
        assert!(st2.a_0.rel_err(&st.a_0) < 1e-9);

        // Already-Coulomb input passes through.
        let (proj, _) = bank.leray(&a_raw);
        let mut proj_real = proj;
        for f in proj_real.iter_mut() {
            f.remove_mean();
            f.take_real();
        }
        let st3 = prepare_data(&bank, &proj_real, &st.dt_a_x, &phi, &dtphi).unwrap();
        for i in 0..DIM {
            assert!(st3.a_x[i].rel_err(&proj_real[i]) < 1e-11);
        }

        // Zero input gives the zero state.
        let zero = SpatialField::zeros(bank.grid);
        let zs = prepare_data(
            &bank,
            &std::array::from_fn(|_| zero.clone()),
            &std::array::from_fn(|_| zero.clone()),
            &zero,
            &zero,
        )
        .unwrap();
        assert_eq!(energy(&bank, &zs).total, 0.0);
    }

    #[test]
    fn gauge_equivalent_raws_prepare_to_same_state() {
        let bank = bank8();
        let grid = bank.grid;
        let (a_raw, dta_raw, phi, dtphi) = data::random_raw_data(&bank, 420, 0.2, 2);
        let st1 = prepare_data(&bank, &a_raw, &dta_raw, &phi, &dtphi).unwrap();

        // Dress the raw data with a gauge transform, then re-fix the gauge.
        let chi = data::random_real_band_limited(&bank, 421, 0, 1);
        let chi_t = data::random_real_band_limited(&bank, 422, 0, 1);
        let gchi = bank.gradient(&chi);
        let gchi_t = bank.gradient(&chi_t);
        let a2: [SpatialField; DIM] = std::array::from_fn(|i| {
            let mut a = a_raw[i].clone();
            a.sub_assign(&gchi[i]);
            a.take_real();
            a
        });
        let dta2: [SpatialField; DIM] = std::array::from_fn(|i| {
            let mut a = dta_raw[i].clone();
            a.sub_assign(&gchi_t[i]);
            a.take_real();
            a
        });
        let mut phi2 = SpatialField::zeros(grid);
        let mut dtphi2 = SpatialField::zeros(grid);
        phi2.parity = Parity::Complex;
        dtphi2.parity = Parity::Complex;
        for idx in 0..grid.spatial_len() {
            let rot = (Complex64::i() * chi.values[idx].re).exp();
            phi2.values[idx] = rot * phi.values[idx];
            dtphi2.values[idx] =
                rot * (dtphi.values[idx] + Complex64::i() * chi_t.values[idx].re * phi.values[idx]);
        }
        let st2 = prepare_data(&bank, &a2, &dta2, &phi2, &dtphi2).unwrap();

        // Same connection; φ equal up to one constant phase.
        for i in 0..DIM {
            assert!(st1.a_x[i].rel_err(&st2.a_x[i]) < 1e-11);
        }
        let ratio = st2.phi.values[3] / st1.phi.values[3];
        assert!((ratio.norm() - 1.0).abs() < 1e-9);
        let mut rotated = st1.phi.clone();
        rotated.scale(ratio);
        assert!(rotated.rel_err(&st2.phi) < 1e-8);
    }

    #[test]
    fn divergence_residual_needs_samples() {
        let bank = bank8();
        let st = GaugeState::zeros(bank.grid);
        let res = current_divergence_residual(&bank, &[st.clone(), st.clone()], 0.1);
        assert!(matches!(res, Err(MkgError::TooFewSamples { .. })));
    }
}
