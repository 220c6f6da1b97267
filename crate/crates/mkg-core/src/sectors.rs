//! Angular sector covers of S³ for the cap localizers `P^ω_l`.
//!
//! Directions come from the 120 vertices of the 600-cell, refined by
//! recursive edge bisection until the cover is fine enough for the requested
//! aperture `2^l`. Per-direction cutoffs are smooth radial bumps in the
//! angle, normalized pointwise so that `Σ_ω cutoff_ω² = 1` exactly on every
//! direction the cover reaches (a square partition: sector energies sum to
//! the total energy).

use crate::field::{SpatialField, SpatialSpectrum};
use crate::grid::DIM;
use crate::spectral::{smoothstep, MultiplierBank};
use num_complex::Complex64;
use std::collections::HashSet;

/// Fraction of the aperture at which the raw bump plateau ends.
const PLATEAU_FRACTION: f64 = 0.35;

/// A finitely overlapping cover of S³ by caps of radius `2^l`.
#[derive(Debug, Clone)]
pub struct SectorSet {
    /// Cap aperture exponent `l ≤ 0`; cap radius is `2^l` radians.
    pub aperture_exponent: i32,
    /// Cap centers, unit vectors in R⁴.
    pub directions: Vec<[f64; DIM]>,
}

fn normalize(v: [f64; DIM]) -> [f64; DIM] {
    let n = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
    [v[0] / n, v[1] / n, v[2] / n, v[3] / n]
}

fn dot(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Angle between unit vectors.
fn angle(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

/// The 120 vertices of the 600-cell (unit quaternions).
fn hexacosichoron_vertices() -> Vec<[f64; DIM]> {
    let mut v = Vec::with_capacity(120);
    // 8 axis vertices.
    for axis in 0..DIM {
        for sign in [1.0, -1.0] {
            let mut p = [0.0; DIM];
            p[axis] = sign;
            v.push(p);
        }
    }
    // 16 half-integer vertices.
    for s in 0..16u32 {
        let p = std::array::from_fn(|i| if s >> i & 1 == 1 { -0.5 } else { 0.5 });
        v.push(p);
    }
    // 96 vertices: even permutations of ½(±φ, ±1, ±1/φ, 0).
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let base = [phi / 2.0, 0.5, 1.0 / (2.0 * phi), 0.0];
    let perms: Vec<[usize; 4]> = all_even_permutations();
    for perm in &perms {
        for s in 0..8u32 {
            let mut p = [0.0; DIM];
            let signs = [
                if s & 1 == 1 { -1.0 } else { 1.0 },
                if s >> 1 & 1 == 1 { -1.0 } else { 1.0 },
                if s >> 2 & 1 == 1 { -1.0 } else { 1.0 },
                1.0,
            ];
            for (slot, &src) in perm.iter().enumerate() {
                p[slot] = base[src] * signs[src.min(3)];
            }
            v.push(normalize(p));
        }
    }
    v
}

fn all_even_permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    let mut items = [0usize, 1, 2, 3];
    permute(&mut items, 0, 0, &mut out);
    out
}

fn permute(items: &mut [usize; 4], start: usize, swaps: usize, out: &mut Vec<[usize; 4]>) {
    if start == 3 {
        if swaps % 2 == 0 {
            out.push(*items);
        }
        return;
    }
    for i in start..4 {
        items.swap(start, i);
        permute(items, start + 1, swaps + usize::from(i != start), out);
        items.swap(start, i);
    }
}

fn quantize_key(v: &[f64; DIM]) -> [i64; DIM] {
    std::array::from_fn(|i| (v[i] * 1e6).round() as i64)
}

/// One round of refinement: add normalized midpoints of all nearest-neighbor
/// pairs (identifying antipodal duplicates is not needed; caps are directed).
fn bisect(dirs: &[[f64; DIM]]) -> Vec<[f64; DIM]> {
    let mut min_angle = f64::MAX;
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            let a = angle(&dirs[i], &dirs[j]);
            if a > 1e-9 {
                min_angle = min_angle.min(a);
            }
        }
    }
    let cutoff = 1.3 * min_angle;
    let mut seen: HashSet<[i64; DIM]> = dirs.iter().map(quantize_key).collect();
    let mut out = dirs.to_vec();
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            let a = angle(&dirs[i], &dirs[j]);
            if a > 1e-9 && a < cutoff {
                let mid = normalize(std::array::from_fn(|k| dirs[i][k] + dirs[j][k]));
                if seen.insert(quantize_key(&mid)) {
                    out.push(mid);
                }
            }
        }
    }
    out
}

impl SectorSet {
    /// Cover for aperture `2^l`, refined until the cap plateau structure
    /// reaches every direction.
    pub fn build(aperture_exponent: i32) -> Self {
        assert!(aperture_exponent <= 0, "aperture exponent must be ≤ 0");
        let aperture = (2f64).powi(aperture_exponent);
        // Empirical covering radii: 120 vertices cover within ~0.31 rad and
        // each bisection roughly halves that.
        let mut dirs = hexacosichoron_vertices();
        let mut covering = 0.32;
        while covering > 0.6 * aperture && dirs.len() < 20_000 {
            dirs = bisect(&dirs);
            covering *= 0.55;
        }
        SectorSet {
            aperture_exponent,
            directions: dirs,
        }
    }

    pub fn aperture(&self) -> f64 {
        (2f64).powi(self.aperture_exponent)
    }

    /// Raw (unnormalized) angular bump of sector `w` at a unit direction.
    #[inline]
    pub fn raw_bump(&self, w: usize, xhat: &[f64; DIM]) -> f64 {
        let theta = angle(&self.directions[w], xhat);
        let r = self.aperture();
        if theta >= r {
            0.0
        } else if theta <= PLATEAU_FRACTION * r {
            1.0
        } else {
            smoothstep((r - theta) / (r * (1.0 - PLATEAU_FRACTION)))
        }
    }

    /// Pointwise normalizer `Σ_ω b_ω²` and square-partition weights per
    /// spatial lattice mode. Weight tables are per-grid.
    pub fn weights(&self, bank: &MultiplierBank) -> SectorWeights {
        let len = bank.grid.spatial_len();
        let mut norm = vec![0.0f64; len];
        for idx in 1..len {
            let r = bank.xi_norm(idx);
            if r == 0.0 {
                continue;
            }
            let xi = bank.xi(idx);
            let xhat = [xi[0] / r, xi[1] / r, xi[2] / r, xi[3] / r];
            let mut s = 0.0;
            for w in 0..self.directions.len() {
                let b = self.raw_bump(w, &xhat);
                s += b * b;
            }
            norm[idx] = s;
        }
        SectorWeights { norm }
    }

    /// Normalized cutoff `c_ω(ξ̂) = b_ω / √(Σ b²)`; `Σ_ω c_ω² = 1` wherever
    /// the cover reaches.
    #[inline]
    pub fn cutoff(
        &self,
        weights: &SectorWeights,
        bank: &MultiplierBank,
        w: usize,
        idx: usize,
    ) -> f64 {
        let r = bank.xi_norm(idx);
        if r == 0.0 || weights.norm[idx] <= 0.0 {
            return 0.0;
        }
        let xi = bank.xi(idx);
        let xhat = [xi[0] / r, xi[1] / r, xi[2] / r, xi[3] / r];
        self.raw_bump(w, &xhat) / weights.norm[idx].sqrt()
    }
}

/// Per-grid normalization table for a sector set.
#[derive(Debug, Clone)]
pub struct SectorWeights {
    /// `Σ_ω b_ω(ξ̂)²` per spatial index (0 at the mean mode).
    pub norm: Vec<f64>,
}

/// Cap localizer `P^ω f`: spectral mask with the normalized cutoff of one
/// sector. The mean mode is annihilated.
pub fn sector_project(
    bank: &MultiplierBank,
    sectors: &SectorSet,
    weights: &SectorWeights,
    f: &SpatialField,
    w: usize,
) -> SpatialField {
    let mut spec = f.to_spectrum();
    sector_project_spec(bank, sectors, weights, &mut spec, w);
    spec.into_field()
}

pub fn sector_project_spec(
    bank: &MultiplierBank,
    sectors: &SectorSet,
    weights: &SectorWeights,
    spec: &mut SpatialSpectrum,
    w: usize,
) {
    for (idx, c) in spec.coeffs.iter_mut().enumerate() {
        let cw = sectors.cutoff(weights, bank, w, idx);
        *c *= Complex64::new(cw, 0.0);
    }
}
