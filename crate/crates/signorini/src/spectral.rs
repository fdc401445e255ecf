//! Discrete Fourier calculus on the periodic tangential grid: the
//! transform contract, the frequency lattice, and fractional powers of
//! the Laplacian as multipliers.
//!
//! Convention: the forward transform carries `1/N^d`, and coefficients
//! are taken with respect to the actual (centered) node coordinates, so
//! `f(x_j) = Σ_k coef(k)·e^{i k·x_j}`. The zero mode sits at flat
//! index 0. Frequencies per axis are `2πm/L` for `m ∈ [−N/2, N/2)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField, SpectralField};

/// How operators with a kernel at the zero frequency treat the mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroModePolicy {
    /// Error out unless the zero mode is negligible.
    RequireZeroMean,
    /// Silently project the mean away (the collar-pinned formulation
    /// determines means through the constraints).
    ProjectOutMean,
}

/// Signed frequency index for a raw per-axis index: `m ∈ [0,N) ↦ [−N/2, N/2)`.
fn signed_index(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Frequency lattice of a grid: per-site magnitudes `|ξ'|` and per-axis
/// components `ξ_j`.
#[derive(Debug, Clone)]
pub struct FrequencyLattice {
    grid: GridSpec,
    magnitudes: Vec<f64>,
    components: Vec<Vec<f64>>,
}

impl FrequencyLattice {
    pub fn new(grid: &GridSpec) -> Self {
        let d = grid.dim();
        let n = grid.points_per_dim();
        let base = 2.0 * std::f64::consts::PI / grid.period();
        let count = grid.node_count();
        let mut magnitudes = vec![0.0; count];
        let mut components = vec![vec![0.0; count]; d];
        for node in 0..count {
            let ix = grid.unravel(node);
            let mut sq = 0.0;
            for (axis, comp) in components.iter_mut().enumerate() {
                let xi = base * signed_index(ix[axis], n) as f64;
                comp[node] = xi;
                sq += xi * xi;
            }
            magnitudes[node] = sq.sqrt();
        }
        Self {
            grid: grid.clone(),
            magnitudes,
            components,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn magnitude(&self, node: usize) -> f64 {
        self.magnitudes[node]
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// Frequency vector at a lattice site; entries beyond `dim()` are 0.
    pub fn xi(&self, node: usize) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (axis, comp) in self.components.iter().enumerate() {
            out[axis] = comp[node];
        }
        out
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.components[axis]
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitudes.iter().cloned().fold(0.0, f64::max)
    }

    /// True when any axis index equals the unpaired Nyquist index `N/2`.
    pub fn is_nyquist(&self, node: usize) -> bool {
        let ix = self.grid.unravel(node);
        let half = self.grid.points_per_dim() / 2;
        (0..self.grid.dim()).any(|axis| ix[axis] == half)
    }
}

/// Cached FFT plans for one grid shape. Construction is cheap; all
/// operations are pure with respect to their inputs.
pub struct SpectralTransform {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralTransform {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.points_per_dim();
        Self {
            grid: grid.clone(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn run_axes(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.grid.points_per_dim();
        let plan = if inverse { &self.inverse } else { &self.forward };
        // Axis `d-1` is contiguous; process() handles the whole batch.
        plan.process(buf);
        if self.grid.dim() == 2 {
            // Axis 0 via transpose, batch FFT, transpose back.
            let mut scratch = vec![Complex64::new(0.0, 0.0); buf.len()];
            for i in 0..n {
                for j in 0..n {
                    scratch[j * n + i] = buf[i * n + j];
                }
            }
            plan.process(&mut scratch);
            for i in 0..n {
                for j in 0..n {
                    buf[i * n + j] = scratch[j * n + i];
                }
            }
        }
    }

    /// Parity factor `(−1)^{Σ m_axis}` converting between FFT-order
    /// coefficients and the centered-coordinate convention. Exact ±1.
    fn phase(&self, node: usize) -> f64 {
        let ix = self.grid.unravel(node);
        let sum: usize = ix.iter().take(self.grid.dim()).sum();
        if sum % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn to_spectral(&self, f: &RealField) -> SpectralField {
        assert_eq!(
            f.grid(),
            &self.grid,
            "field grid does not match the transform grid"
        );
        let nodes = self.grid.node_count();
        let scale = 1.0 / nodes as f64;
        let mut out = SpectralField::zeros(&self.grid, f.components());
        let mut buf = vec![Complex64::new(0.0, 0.0); nodes];
        for c in 0..f.components() {
            for (b, v) in buf.iter_mut().zip(f.component(c)) {
                *b = Complex64::new(*v, 0.0);
            }
            self.run_axes(&mut buf, false);
            let comp = out.component_mut(c);
            for node in 0..nodes {
                comp[node] = buf[node] * (scale * self.phase(node));
            }
        }
        out
    }

    pub fn to_real(&self, f: &SpectralField) -> RealField {
        self.to_real_checked(f).0
    }

    /// Inverse transform; also reports the largest leftover imaginary
    /// part, which measures how far the coefficients are from Hermitian.
    pub fn to_real_checked(&self, f: &SpectralField) -> (RealField, f64) {
        assert_eq!(
            f.grid(),
            &self.grid,
            "field grid does not match the transform grid"
        );
        let nodes = self.grid.node_count();
        let mut out = RealField::zeros(&self.grid, f.components());
        let mut buf = vec![Complex64::new(0.0, 0.0); nodes];
        let mut max_imag = 0.0f64;
        for c in 0..f.components() {
            let comp = f.component(c);
            for node in 0..nodes {
                buf[node] = comp[node] * self.phase(node);
            }
            self.run_axes(&mut buf, true);
            let dst = out.component_mut(c);
            for node in 0..nodes {
                dst[node] = buf[node].re;
                max_imag = max_imag.max(buf[node].im.abs());
            }
        }
        (out, max_imag)
    }
}

/// Multiplies the coefficients by `|ξ'|^{2s}`; the zero mode is
/// annihilated. Requires `s ∈ (0, 1]`.
pub fn frac_laplacian_apply(
    lattice: &FrequencyLattice,
    f: &SpectralField,
    s: f64,
) -> SpectralField {
    assert!(s > 0.0 && s <= 1.0, "s must lie in (0, 1], got {s}");
    let mut out = f.clone();
    let power = 2.0 * s;
    for c in 0..f.components() {
        let comp = out.component_mut(c);
        for (node, value) in comp.iter_mut().enumerate() {
            let m = lattice.magnitude(node);
            *value *= if m == 0.0 { 0.0 } else { m.powf(power) };
        }
    }
    out
}

/// Divides the coefficients by `|ξ'|^{2s}` off the zero mode; the zero
/// mode is set to 0. Under [`ZeroModePolicy::RequireZeroMean`] the zero
/// mode must not exceed `1e−10` times the field RMS.
pub fn frac_laplacian_inverse(
    lattice: &FrequencyLattice,
    f: &SpectralField,
    s: f64,
    policy: ZeroModePolicy,
) -> Result<SpectralField> {
    assert!(s > 0.0 && s <= 1.0, "s must lie in (0, 1], got {s}");
    let mut out = f.clone();
    let power = 2.0 * s;
    for c in 0..f.components() {
        if policy == ZeroModePolicy::RequireZeroMean {
            let zero = f.component(c)[0].norm();
            let limit = 1e-10 * f.rms(c);
            if zero > limit {
                return Err(Error::ZeroModeViolation {
                    magnitude: zero,
                    limit,
                });
            }
        }
        let comp = out.component_mut(c);
        comp[0] = Complex64::new(0.0, 0.0);
        for (node, value) in comp.iter_mut().enumerate().skip(1) {
            let m = lattice.magnitude(node);
            if m == 0.0 {
                *value = Complex64::new(0.0, 0.0);
            } else {
                *value /= m.powf(power);
            }
        }
    }
    Ok(out)
}

/// Spectral partial derivative along one tangential axis (`iξ_j`
/// multiplier). The unpaired Nyquist plane is zeroed, as usual for odd
/// multipliers on even grids.
pub fn derivative(lattice: &FrequencyLattice, f: &SpectralField, axis: usize) -> SpectralField {
    let mut out = f.clone();
    for c in 0..f.components() {
        let comp = out.component_mut(c);
        for (node, value) in comp.iter_mut().enumerate() {
            if lattice.is_nyquist(node) {
                *value = Complex64::new(0.0, 0.0);
            } else {
                *value *= Complex64::new(0.0, lattice.component(axis)[node]);
            }
        }
    }
    out
}
