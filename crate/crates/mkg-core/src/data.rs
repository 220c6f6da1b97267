//! Seeded random field and data generators.
//!
//! All generators produce band-limited Gaussian fields with a `2^{-2k}`
//! dyadic spectral envelope over a configured shell range, then (for MKG
//! data) neutralize the total charge and pass through the Coulomb gauge
//! fixing. Identical seeds give identical fields.

use crate::field::{Parity, SpacetimeField, SpacetimeSpectrum, SpatialField, SpatialSpectrum};
use crate::grid::DIM;
use crate::model::{energy, prepare_data, solve_a0, GaugeState};
use crate::spectral::{unpack4, MultiplierBank};
use crate::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn envelope(xi_norm: f64) -> f64 {
    // 2^{-2k} at |ξ| ≈ 2^k.
    if xi_norm <= 0.0 {
        0.0
    } else {
        xi_norm.powi(-2)
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller.
    let u1: f64 = rng.gen::<f64>().max(1e-12);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    Complex64::new(
        r * (std::f64::consts::TAU * u2).cos(),
        r * (std::f64::consts::TAU * u2).sin(),
    )
}

fn in_band(bank: &MultiplierBank, idx: usize, k_lo: i32, k_hi: i32) -> bool {
    let r = bank.xi_norm(idx);
    r > 0.0 && r >= (2f64).powi(k_lo) * 0.999 && r <= (2f64).powi(k_hi) * 1.001
}

/// Complex mean-zero Gaussian field with spectrum in shells `[k_lo, k_hi]`.
pub fn random_complex_band_limited(
    bank: &MultiplierBank,
    seed: u64,
    k_lo: i32,
    k_hi: i32,
) -> SpatialField {
    let grid = bank.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = SpatialSpectrum::zeros(grid);
    let scale = grid.spatial_len() as f64;
    for idx in 0..grid.spatial_len() {
        if in_band(bank, idx, k_lo, k_hi) {
            spec.coeffs[idx] = gaussian(&mut rng) * envelope(bank.xi_norm(idx)) * scale;
        }
    }
    let mut f = spec.into_field();
    f.parity = Parity::Complex;
    f
}

/// Real mean-zero Gaussian field (conjugate-symmetric spectrum) in shells
/// `[k_lo, k_hi]`.
pub fn random_real_band_limited(
    bank: &MultiplierBank,
    seed: u64,
    k_lo: i32,
    k_hi: i32,
) -> SpatialField {
    let grid = bank.grid;
    let n = grid.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = SpatialSpectrum::zeros(grid);
    let scale = grid.spatial_len() as f64;
    for idx in 0..grid.spatial_len() {
        if !in_band(bank, idx, k_lo, k_hi) {
            continue;
        }
        let ix = unpack4(idx, n);
        let neg = [
            (n - ix[0]) % n,
            (n - ix[1]) % n,
            (n - ix[2]) % n,
            (n - ix[3]) % n,
        ];
        let neg_idx = grid.spatial_index(neg);
        if neg_idx < idx {
            continue; // partner already set
        }
        let g = gaussian(&mut rng) * envelope(bank.xi_norm(idx)) * scale;
        if neg_idx == idx {
            spec.coeffs[idx] = Complex64::new(g.re, 0.0);
        } else {
            spec.coeffs[idx] = g;
            spec.coeffs[neg_idx] = g.conj();
        }
    }
    let mut f = spec.into_field();
    f.take_real();
    f
}

/// Dense complex space-time Gaussian field with spatial shells in
/// `[k_lo, k_hi]` and all temporal frequencies.
pub fn random_spacetime_band_limited(
    bank: &MultiplierBank,
    seed: u64,
    k_lo: i32,
    k_hi: i32,
) -> SpacetimeField {
    let grid = bank.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = SpacetimeSpectrum::zeros(grid);
    let slab = grid.spatial_len();
    let scale = grid.spacetime_len() as f64;
    for t in 0..grid.nt {
        for idx in 0..slab {
            if in_band(bank, idx, k_lo, k_hi) {
                spec.coeffs[t * slab + idx] =
                    gaussian(&mut rng) * envelope(bank.xi_norm(idx)) * scale;
            }
        }
    }
    spec.into_field()
}

/// Raw (non-Coulomb) Gaussian MKG data of amplitude `eps`, charge
/// neutralized so the torus `A_0` solve stays in the small-data regime.
pub fn random_raw_data(
    bank: &MultiplierBank,
    seed: u64,
    eps: f64,
    k_hi: i32,
) -> (
    [SpatialField; DIM],
    [SpatialField; DIM],
    SpatialField,
    SpatialField,
) {
    let a_raw: [SpatialField; DIM] = std::array::from_fn(|i| {
        let mut f = random_real_band_limited(bank, seed.wrapping_add(i as u64), 0, k_hi);
        f.scale(Complex64::new(eps, 0.0));
        f
    });
    let dta_raw: [SpatialField; DIM] = std::array::from_fn(|i| {
        let mut f = random_real_band_limited(bank, seed.wrapping_add(10 + i as u64), 0, k_hi);
        f.scale(Complex64::new(eps, 0.0));
        f
    });
    let mut phi = random_complex_band_limited(bank, seed.wrapping_add(20), 0, k_hi);
    phi.scale(Complex64::new(eps, 0.0));
    let mut dt_phi = random_complex_band_limited(bank, seed.wrapping_add(21), 0, k_hi);
    dt_phi.scale(Complex64::new(eps, 0.0));

    // Neutralize the total charge: dtφ ← dtφ − iμφ with μ chosen so
    // ∫ Im(φ·conj(∂_tφ)) = 0.
    let q: f64 = phi
        .values
        .iter()
        .zip(&dt_phi.values)
        .map(|(p, d)| (p * d.conj()).im)
        .sum();
    let m2: f64 = phi.values.iter().map(|p| p.norm_sqr()).sum();
    if m2 > 1e-300 {
        let mu = q / m2;
        for (d, p) in dt_phi.values.iter_mut().zip(&phi.values) {
            *d -= Complex64::i() * mu * p;
        }
    }
    (a_raw, dta_raw, phi, dt_phi)
}

/// Admissible Coulomb state with energy ≈ `eps²` (so `eps` is the
/// energy-norm amplitude of the data).
pub fn random_state(bank: &MultiplierBank, seed: u64, eps: f64, k_hi: i32) -> Result<GaugeState> {
    let (a_raw, dta_raw, phi, dtphi) = random_raw_data(bank, seed, eps, k_hi);
    let mut st = prepare_data(bank, &a_raw, &dta_raw, &phi, &dtphi)?;
    // Rescale to the target energy; the A_0 re-solve makes this a short
    // fixed point since its feedback is higher order.
    for _ in 0..3 {
        let e = energy(bank, &st).total;
        if e <= 0.0 {
            break;
        }
        let c = Complex64::new(eps / e.sqrt(), 0.0);
        for f in st.a_x.iter_mut().chain(st.dt_a_x.iter_mut()) {
            f.scale(c);
        }
        st.phi.scale(c);
        st.dt_phi.scale(c);
        let (a0, dta0) = solve_a0(bank, &st.phi, &st.dt_phi, &st.a_x)?;
        st.a_0 = a0;
        st.dt_a_0 = dta0;
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn real_generator_is_real_and_band_limited() {
        let bank = MultiplierBank::new(GridSpec::spatial(8, std::f64::consts::TAU));
        let f = random_real_band_limited(&bank, 9, 0, 2);
        assert!(f.realness_defect() < 1e-12 * f.sup_norm());
        assert!(f.mean().norm() < 1e-13 * f.sup_norm());
        // No content above the band.
        let spec = f.to_spectrum();
        for idx in 0..bank.grid.spatial_len() {
            if bank.xi_norm(idx) > 4.001 {
                assert!(spec.coeffs[idx].norm() < 1e-10);
            }
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let bank = MultiplierBank::new(GridSpec::spatial(8, std::f64::consts::TAU));
        let a = random_complex_band_limited(&bank, 123, 0, 2);
        let b = random_complex_band_limited(&bank, 123, 0, 2);
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn random_state_hits_target_energy() {
        let bank = MultiplierBank::new(GridSpec::spatial(8, std::f64::consts::TAU));
        let eps = 0.05;
        let st = random_state(&bank, 31, eps, 2).unwrap();
        let e = energy(&bank, &st).total;
        assert!((e.sqrt() - eps).abs() < 0.02 * eps, "sqrt(E) = {}", e.sqrt());
        assert!(st.coulomb_residual(&bank) < 1e-12);
    }
}
