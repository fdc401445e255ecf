//! The mixed linear problem: bulk force `f`, tangential Neumann data
//! `g^j` on the boundary, zero normal trace `w^n = 0`.
//!
//! Split per the analysis: the `g`-driven part has the explicit
//! coefficients `C_j = −(μ/π)ĝ^j`, `C_n = 0` in the fundamental matrix
//! `W`; the `f`-driven part is solved on a doubled periodic box in the
//! vertical direction by reflecting `w^n` oddly and `w^j` evenly and
//! inverting the whole-space symbol. Boundary traces of the `g`-part
//! come from closed-form `W`-derivatives; traces of the `f`-part are
//! vertical spectral sums. Decay at infinity is replaced by the box
//! height, a documented truncation-error source.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{DisplacementSlab, GridSpec, RealField, SpectralField};
use crate::params::LameParams;
use crate::spectral::{FrequencyLattice, SpectralTransform};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Inverse of the whole-space Lamé symbol `a(ξ) = μ|ξ|²I + (μ+λ)ξ⊗ξ`:
/// `M_{jl} = δ_{jl}/(μ|ξ|²) − (λ+μ)ξ_jξ_l/((2μ+λ)μ|ξ|⁴)`.
pub fn bulk_inverse_symbol(params: &LameParams, xi_full: &[f64]) -> Result<[[f64; 3]; 3]> {
    let n = xi_full.len();
    let norm_sq: f64 = xi_full.iter().map(|x| x * x).sum();
    if norm_sq == 0.0 {
        return Err(Error::SingularFrequency);
    }
    let mut m = [[0.0; 3]; 3];
    let lead = 1.0 / (params.mu * norm_sq);
    let second = (params.lambda + params.mu) / ((2.0 * params.mu + params.lambda) * params.mu)
        / (norm_sq * norm_sq);
    for j in 0..n {
        for l in 0..n {
            let delta = if j == l { lead } else { 0.0 };
            m[j][l] = delta - second * xi_full[j] * xi_full[l];
        }
    }
    Ok(m)
}

/// Bulk force samples on a uniform vertical grid `t_m = m·T/M`,
/// `m = 0..=M` (`levels = M + 1` rows including both `t = 0` and
/// `t = T`). Components follow the displacement convention: the last
/// one is the normal component.
#[derive(Debug, Clone)]
pub struct ForceSlab {
    grid: GridSpec,
    box_height: f64,
    levels: usize,
    components: usize,
    data: Vec<f64>,
}

impl ForceSlab {
    pub fn from_fn(
        grid: &GridSpec,
        box_height: f64,
        levels: usize,
        f: impl Fn(usize, [f64; 2], f64) -> f64,
    ) -> Result<Self> {
        if !(box_height > 0.0) {
            return Err(Error::InvalidParameter {
                name: "box_height",
                requirement: "box_height > 0",
                value: box_height,
            });
        }
        if levels < 3 {
            return Err(Error::InvalidGrid(format!(
                "force slab needs at least 3 vertical levels, got {levels}"
            )));
        }
        let components = grid.ambient_dim();
        let nodes = grid.node_count();
        let dt = box_height / (levels - 1) as f64;
        let mut data = vec![0.0; components * levels * nodes];
        for c in 0..components {
            for m in 0..levels {
                let t = m as f64 * dt;
                for node in 0..nodes {
                    data[(c * levels + m) * nodes + node] = f(c, grid.coord(node), t);
                }
            }
        }
        Ok(Self {
            grid: grid.clone(),
            box_height,
            levels,
            components,
            data,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn box_height(&self) -> f64 {
        self.box_height
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn level_slice(&self, comp: usize, level: usize) -> &[f64] {
        let nodes = self.grid.node_count();
        let start = (comp * self.levels + level) * nodes;
        &self.data[start..start + nodes]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Solution of the mixed problem together with its analytic boundary
/// traces and the combination `2μ∂_n w^n + λ div w` at t = 0 that feeds
/// the reduced obstacle. `log` records projections and support
/// warnings.
#[derive(Debug, Clone)]
pub struct AuxiliarySolution {
    pub slab: DisplacementSlab,
    /// `∂_t w^j(·,0)` for the tangential components (d entries).
    pub trace_tangential_dt: RealField,
    /// `∂_n w^n(·,0)`.
    pub trace_normal_derivative: RealField,
    /// `(div w)(·,0)`.
    pub trace_divergence: RealField,
    /// `2μ ∂_n w^n + λ div w` at `t = 0`.
    pub htilde_contribution: RealField,
    pub log: Vec<String>,
}

impl AuxiliarySolution {
    pub fn zeros(grid: &GridSpec) -> Self {
        let d = grid.dim();
        Self {
            slab: DisplacementSlab::zeros(grid, d + 1),
            trace_tangential_dt: RealField::zeros(grid, d),
            trace_normal_derivative: RealField::zeros(grid, 1),
            trace_divergence: RealField::zeros(grid, 1),
            htilde_contribution: RealField::zeros(grid, 1),
            log: Vec::new(),
        }
    }

    fn add(mut self, other: &AuxiliarySolution) -> Result<Self> {
        self.slab = self.slab.add(&other.slab)?;
        for (dst, src) in [
            (&mut self.trace_tangential_dt, &other.trace_tangential_dt),
            (
                &mut self.trace_normal_derivative,
                &other.trace_normal_derivative,
            ),
            (&mut self.trace_divergence, &other.trace_divergence),
            (&mut self.htilde_contribution, &other.htilde_contribution),
        ] {
            dst.check_same_shape(src)?;
            for (a, b) in dst.data_mut().iter_mut().zip(src.data()) {
                *a += b;
            }
        }
        self.log.extend(other.log.iter().cloned());
        Ok(self)
    }
}

/// Solves the `g`-driven part (`f = 0`). The zero mode and the
/// unpaired Nyquist modes of `ĝ` are projected out and logged.
pub fn solve_boundary_part(params: &LameParams, g: &RealField) -> Result<AuxiliarySolution> {
    let grid = g.grid().clone();
    let d = grid.dim();
    let n = d + 1;
    if g.components() != d {
        return Err(Error::ShapeMismatch(format!(
            "boundary data must have d = {d} components, got {}",
            g.components()
        )));
    }
    let transform = SpectralTransform::new(&grid);
    let lattice = FrequencyLattice::new(&grid);
    let mut ghat = transform.to_spectral(g);
    let mut log = Vec::new();
    for c in 0..d {
        let zero = ghat.component(c)[0].norm();
        if zero > 1e-14 * (1.0 + ghat.rms(c)) {
            log.push(format!(
                "boundary data component {c}: projected zero mode of magnitude {zero:.3e}"
            ));
        }
        ghat.component_mut(c)[0] = Complex64::new(0.0, 0.0);
        for node in 0..grid.node_count() {
            if lattice.is_nyquist(node) {
                ghat.component_mut(c)[node] = Complex64::new(0.0, 0.0);
            }
        }
    }

    let nodes = grid.node_count();
    let two_pi = 2.0 * std::f64::consts::PI;

    // Per-mode coefficients C_j = −(μ/π)ĝ^j, C_n = 0.
    let coeff = |node: usize, j: usize| -> Complex64 {
        -(params.mu / std::f64::consts::PI) * ghat.component(j)[node]
    };

    let mut solution = AuxiliarySolution::zeros(&grid);
    solution.log = log;

    // Slab via W(ξ,t)·C per height level.
    for (level, &t) in grid.heights().iter().enumerate() {
        let mut spec = SpectralField::zeros(&grid, n);
        for node in 0..nodes {
            let q = lattice.magnitude(node);
            if q == 0.0 {
                continue;
            }
            let xi = lattice.xi(node);
            let decay = (-q * t).exp();
            let mut xi_dot_c = Complex64::new(0.0, 0.0);
            for j in 0..d {
                xi_dot_c += xi[j] * coeff(node, j);
            }
            for j in 0..d {
                // Row j of W: δ/(2μq) − κξ_jξ_l(1/q³ + t/q²) on C', plus 0·C_n.
                let own = coeff(node, j) / (2.0 * params.mu * q);
                let mixed = -params.kappa * xi[j] * (1.0 / (q * q * q) + t / (q * q)) * xi_dot_c;
                spec.component_mut(j)[node] = two_pi * decay * (own + mixed);
            }
            // Row n: −iκξ_l t/q on C'.
            spec.component_mut(d)[node] = two_pi * decay * (-I * (params.kappa * t / q) * xi_dot_c);
        }
        let real = transform.to_real(&spec);
        for comp in 0..n {
            solution
                .slab
                .level_slice_mut(comp, level)
                .copy_from_slice(real.component(comp));
        }
    }

    // Analytic traces at t = 0.
    let mut dt_tang = SpectralField::zeros(&grid, d);
    let mut dn_normal = SpectralField::zeros(&grid, 1);
    let mut div0 = SpectralField::zeros(&grid, 1);
    for node in 0..nodes {
        let q = lattice.magnitude(node);
        if q == 0.0 {
            continue;
        }
        let xi = lattice.xi(node);
        let mut xi_dot_c = Complex64::new(0.0, 0.0);
        for j in 0..d {
            xi_dot_c += xi[j] * coeff(node, j);
        }
        // ∂_t ŵ^j(0) = −2π C_j/(2μ)  (C_n = 0).
        for j in 0..d {
            dt_tang.component_mut(j)[node] = -two_pi * coeff(node, j) / (2.0 * params.mu);
        }
        // ∂_t ŵ^n(0) = −2π iκ (ξ·C')/q.
        let dwn = -two_pi * I * (params.kappa / q) * xi_dot_c;
        dn_normal.component_mut(0)[node] = dwn;
        // ŵ^j(0) = (2π/q)[C_j/(2μ) − κ ξ_j (ξ·C')/q²]; div = Σ iξ_j ŵ^j(0) + ∂_tŵ^n(0).
        let mut div = dwn;
        for j in 0..d {
            let wj0 = (two_pi / q)
                * (coeff(node, j) / (2.0 * params.mu)
                    - params.kappa * xi[j] / (q * q) * xi_dot_c);
            div += I * xi[j] * wj0;
        }
        div0.component_mut(0)[node] = div;
    }
    solution.trace_tangential_dt = transform.to_real(&dt_tang);
    solution.trace_normal_derivative = transform.to_real(&dn_normal);
    solution.trace_divergence = transform.to_real(&div0);
    assemble_htilde(params, &mut solution);
    Ok(solution)
}

fn assemble_htilde(params: &LameParams, solution: &mut AuxiliarySolution) {
    let dn = solution.trace_normal_derivative.component(0).to_vec();
    let dv = solution.trace_divergence.component(0).to_vec();
    let h = solution.htilde_contribution.component_mut(0);
    for (idx, hv) in h.iter_mut().enumerate() {
        *hv = 2.0 * params.mu * dn[idx] + params.lambda * dv[idx];
    }
}

/// Solves the `f`-driven part (`g = 0`) on the doubled reflected box.
/// `f^n` is reflected oddly (its rows at `t = 0` and `t = T` must
/// vanish; nonzero values are zeroed with a warning), `f^j` evenly.
pub fn solve_bulk_part(params: &LameParams, f: &ForceSlab) -> Result<AuxiliarySolution> {
    let grid = f.grid().clone();
    let d = grid.dim();
    let n = d + 1;
    if f.components != n {
        return Err(Error::ShapeMismatch(format!(
            "bulk force must have n = {n} components, got {}",
            f.components
        )));
    }
    let transform = SpectralTransform::new(&grid);
    let lattice = FrequencyLattice::new(&grid);
    let nodes = grid.node_count();
    let m_levels = f.levels - 1; // M intervals on [0, T]
    let vert = 2 * m_levels; // doubled box size
    let height = f.box_height;
    let dt = height / m_levels as f64;

    let mut solution = AuxiliarySolution::zeros(&grid);

    // Support check for the odd reflection.
    let normal_at_ends = f
        .level_slice(d, 0)
        .iter()
        .chain(f.level_slice(d, m_levels))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if normal_at_ends > 1e-12 * (1.0 + f.max_abs()) {
        solution.log.push(format!(
            "bulk force touches the reflection boundary with nonzero normal component \
             (max {normal_at_ends:.3e}); rows at t = 0, T zeroed"
        ));
    }

    // fhat[comp][node*vert + v]: tangential transform per extended level,
    // then a vertical FFT along the contiguous v index.
    let mut planner = FftPlanner::new();
    let vert_fwd = planner.plan_fft_forward(vert);
    let mut fhat: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for c in 0..n {
        let odd = c == d;
        let mut buf = vec![Complex64::new(0.0, 0.0); nodes * vert];
        for v in 0..vert {
            // Extended level index -> source level and parity.
            let (src, sign) = if v <= m_levels {
                (v, 1.0)
            } else {
                (vert - v, if odd { -1.0 } else { 1.0 })
            };
            let zero_row = odd && (src == 0 || src == m_levels);
            let mut row = RealField::zeros(&grid, 1);
            if !zero_row {
                let src_slice = f.level_slice(c, src);
                for (dst, s) in row.component_mut(0).iter_mut().zip(src_slice) {
                    *dst = sign * s;
                }
            }
            let spec_row = transform.to_spectral(&row);
            for node in 0..nodes {
                buf[node * vert + v] = spec_row.component(0)[node];
            }
        }
        vert_fwd.process(&mut buf);
        let scale = 1.0 / vert as f64;
        for z in buf.iter_mut() {
            *z *= scale;
        }
        fhat.push(buf);
    }

    // Project the total zero mode; log if a component mean survives.
    for (c, buf) in fhat.iter_mut().enumerate() {
        let zero = buf[0].norm();
        if zero > 1e-13 * (1.0 + f.max_abs()) {
            solution.log.push(format!(
                "bulk force component {c}: projected reflected mean {zero:.3e}"
            ));
        }
        buf[0] = Complex64::new(0.0, 0.0);
    }

    // Invert the symbol per site.
    let vertical_freq = |v: usize| -> f64 {
        let signed = if v < vert / 2 {
            v as i64
        } else {
            v as i64 - vert as i64
        };
        std::f64::consts::PI * signed as f64 / height
    };
    let mut what: Vec<Vec<Complex64>> = (0..n)
        .map(|_| vec![Complex64::new(0.0, 0.0); nodes * vert])
        .collect();
    let mut xi_full = [0.0f64; 3];
    for node in 0..nodes {
        let xi = lattice.xi(node);
        xi_full[..d].copy_from_slice(&xi[..d]);
        for v in 0..vert {
            xi_full[d] = vertical_freq(v);
            if node == 0 && v == 0 {
                continue;
            }
            let m = bulk_inverse_symbol(params, &xi_full[..n])?;
            let idx = node * vert + v;
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, fh) in fhat.iter().enumerate() {
                    acc += m[j][l] * fh[idx];
                }
                what[j][idx] = acc;
            }
        }
    }

    // Slab values at the requested heights via the vertical Fourier sum.
    for (level, &t) in grid.heights().iter().enumerate() {
        let mut spec = SpectralField::zeros(&grid, n);
        for (c, wh) in what.iter().enumerate() {
            let comp = spec.component_mut(c);
            for node in 0..nodes {
                let mut acc = Complex64::new(0.0, 0.0);
                for v in 0..vert {
                    let phase = Complex64::from_polar(1.0, vertical_freq(v) * t);
                    acc += wh[node * vert + v] * phase;
                }
                comp[node] = acc;
            }
        }
        let real = transform.to_real(&spec);
        for comp in 0..n {
            solution
                .slab
                .level_slice_mut(comp, level)
                .copy_from_slice(real.component(comp));
        }
    }

    // Traces at t = 0: plain vertical sums; t-derivatives via iξ_t with
    // the vertical Nyquist mode dropped.
    let mut dt_tang = SpectralField::zeros(&grid, d);
    let mut dn_normal = SpectralField::zeros(&grid, 1);
    let mut div0 = SpectralField::zeros(&grid, 1);
    for node in 0..nodes {
        let xi = lattice.xi(node);
        let x_nyquist = lattice.is_nyquist(node);
        for j in 0..d {
            let mut ddt = Complex64::new(0.0, 0.0);
            let mut w0 = Complex64::new(0.0, 0.0);
            for v in 0..vert {
                let idx = node * vert + v;
                w0 += what[j][idx];
                if v != vert / 2 {
                    ddt += I * vertical_freq(v) * what[j][idx];
                }
            }
            dt_tang.component_mut(j)[node] = ddt;
            if !x_nyquist {
                div0.component_mut(0)[node] += I * xi[j] * w0;
            }
        }
        let mut dwn = Complex64::new(0.0, 0.0);
        for v in 0..vert {
            if v != vert / 2 {
                dwn += I * vertical_freq(v) * what[d][node * vert + v];
            }
        }
        dn_normal.component_mut(0)[node] = dwn;
        div0.component_mut(0)[node] += dwn;
    }
    solution.trace_tangential_dt = transform.to_real(&dt_tang);
    solution.trace_normal_derivative = transform.to_real(&dn_normal);
    solution.trace_divergence = transform.to_real(&div0);
    assemble_htilde(params, &mut solution);
    Ok(solution)
}

/// Solves the full mixed problem as the sum of the two parts.
pub fn solve_auxiliary(
    params: &LameParams,
    f: Option<&ForceSlab>,
    g: Option<&RealField>,
    grid: &GridSpec,
) -> Result<AuxiliarySolution> {
    let mut out = AuxiliarySolution::zeros(grid);
    if let Some(force) = f {
        if force.grid() != grid {
            return Err(Error::ShapeMismatch(
                "bulk force grid differs from the target grid".into(),
            ));
        }
        out = out.add(&solve_bulk_part(params, force)?)?;
    }
    if let Some(data) = g {
        if data.grid() != grid {
            return Err(Error::ShapeMismatch(
                "boundary data grid differs from the target grid".into(),
            ));
        }
        out = out.add(&solve_boundary_part(params, data)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_constants;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn unit_params() -> LameParams {
        derive_constants(1.0, 1.0).unwrap()
    }

    #[test]
    fn inverse_symbol_unit_case() {
        let p = unit_params();
        let m = bulk_inverse_symbol(&p, &[1.0, 0.0]).unwrap();
        assert!((m[0][0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((m[1][1] - 1.0).abs() < 1e-15);
        assert!(m[0][1].abs() < 1e-15);
        assert!(matches!(
            bulk_inverse_symbol(&p, &[0.0, 0.0]),
            Err(Error::SingularFrequency)
        ));
    }

    #[test]
    fn inverse_symbol_inverts_the_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let p = derive_constants(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)).unwrap();
            let n = if rng.gen_bool(0.5) { 2 } else { 3 };
            let mut xi = vec![0.0; n];
            loop {
                for x in xi.iter_mut() {
                    *x = rng.gen_range(-4.0..4.0);
                }
                if xi.iter().map(|x| x * x).sum::<f64>() > 0.01 {
                    break;
                }
            }
            let m = bulk_inverse_symbol(&p, &xi).unwrap();
            let norm_sq: f64 = xi.iter().map(|x| x * x).sum();
            // a(ξ)·M must be the identity.
            for j in 0..n {
                for l in 0..n {
                    let mut acc = 0.0;
                    for k in 0..n {
                        let a_jk = p.mu * norm_sq * if j == k { 1.0 } else { 0.0 }
                            + (p.mu + p.lambda) * xi[j] * xi[k];
                        acc += a_jk * m[k][l];
                    }
                    let expect = if j == l { 1.0 } else { 0.0 };
                    assert!((acc - expect).abs() <= 1e-12, "a·M != I at ({j},{l})");
                }
            }
            // Symmetry and homogeneity of degree −2.
            for j in 0..n {
                for l in 0..n {
                    assert!((m[j][l] - m[l][j]).abs() < 1e-15);
                }
            }
            let doubled: Vec<f64> = xi.iter().map(|x| 2.0 * x).collect();
            let m2 = bulk_inverse_symbol(&p, &doubled).unwrap();
            for j in 0..n {
                for l in 0..n {
                    assert!((m2[j][l] - m[j][l] / 4.0).abs() <= 1e-12 * m[j][l].abs().max(1e-6));
                }
            }
        }
    }

    #[test]
    fn boundary_part_single_mode() {
        let p = unit_params();
        let grid = GridSpec::new(1, TAU, 64, vec![0.0, 1.0]).unwrap();
        let g = RealField::from_scalar_fn(&grid, |x| x[0].sin());
        let sol = solve_boundary_part(&p, &g).unwrap();

        // w^n vanishes on the boundary and is nonzero at t = 1:
        // w^n(x,t) = 2μκ t e^{−t} cos x.
        let trace = sol.slab.trace(1).unwrap();
        assert!(trace.max_abs() < 1e-10);
        let e = (-1.0f64).exp();
        for node in 0..grid.node_count() {
            let x = grid.coord(node)[0];
            let expect = 2.0 * p.mu * p.kappa * e * x.cos();
            assert!(
                (sol.slab.value(1, 1, node) - expect).abs() < 1e-12,
                "w^n at t=1 off"
            );
        }

        // Mixed boundary condition, spectrally: ∂_t w^1(·,0) = g.
        for node in 0..grid.node_count() {
            let got = sol.trace_tangential_dt.component(0)[node];
            let want = g.component(0)[node];
            assert!((got - want).abs() < 1e-10, "BC residual {}", got - want);
        }

        // Zero data gives the zero solution.
        let zero = RealField::zeros(&grid, 1);
        let z = solve_boundary_part(&p, &zero).unwrap();
        assert!(z.slab.max_abs() == 0.0);
    }

    #[test]
    fn bulk_part_odd_profile() {
        let p = unit_params();
        let height = TAU;
        let heights: Vec<f64> = (0..9).map(|m| m as f64 * height / 8.0).collect();
        let grid = GridSpec::new(1, TAU, 32, heights).unwrap();
        let f = ForceSlab::from_fn(&grid, height, 33, |c, x, t| {
            if c == 1 {
                x[0].sin() * (std::f64::consts::PI * t / height).sin()
            } else {
                0.0
            }
        })
        .unwrap();
        let sol = solve_bulk_part(&p, &f).unwrap();
        // Odd reflection forces w^n(·,0) = 0.
        assert!(sol.slab.trace(1).unwrap().max_abs() < 1e-10);
        // The solution is not identically zero.
        assert!(sol.slab.max_abs() > 1e-4);
        // The even component has zero t-derivative at the boundary.
        assert!(sol.trace_tangential_dt.max_abs() < 1e-10);
        // No support warning for this profile.
        assert!(sol.log.is_empty(), "unexpected log: {:?}", sol.log);
    }

    #[test]
    fn bulk_part_flags_incompatible_support() {
        let p = unit_params();
        let grid = GridSpec::new(1, TAU, 16, vec![0.0]).unwrap();
        let f = ForceSlab::from_fn(&grid, TAU, 9, |c, x, _| if c == 1 { x[0].cos() } else { 0.0 })
            .unwrap();
        let sol = solve_bulk_part(&p, &f).unwrap();
        assert!(
            sol.log.iter().any(|l| l.contains("reflection boundary")),
            "missing support warning"
        );
    }

    #[test]
    fn auxiliary_is_linear_in_its_parts() {
        let p = derive_constants(1.3, 0.8).unwrap();
        let height = TAU;
        let grid = GridSpec::new(1, TAU, 32, vec![0.0, 0.5, 1.0]).unwrap();
        let f = ForceSlab::from_fn(&grid, height, 17, |c, x, t| {
            let vertical = (std::f64::consts::PI * t / height).sin();
            match c {
                0 => 0.3 * (2.0 * x[0]).cos() * vertical * vertical,
                _ => x[0].sin() * vertical,
            }
        })
        .unwrap();
        let g = RealField::from_scalar_fn(&grid, |x| 0.7 * (3.0 * x[0]).sin());

        let both = solve_auxiliary(&p, Some(&f), Some(&g), &grid).unwrap();
        let f_only = solve_auxiliary(&p, Some(&f), None, &grid).unwrap();
        let g_only = solve_auxiliary(&p, None, Some(&g), &grid).unwrap();
        let summed = f_only.add(&g_only).unwrap();

        let diff = both
            .slab
            .add(&scale_slab(&summed.slab, -1.0))
            .unwrap()
            .max_abs();
        assert!(diff < 1e-12, "linearity violated by {diff}");

        // g-only equals the boundary part by definition of the split.
        let bp = solve_boundary_part(&p, &g).unwrap();
        let diff2 = g_only.slab.add(&scale_slab(&bp.slab, -1.0)).unwrap().max_abs();
        assert!(diff2 == 0.0);

        // Zero data in, zero solution out.
        let zero = solve_auxiliary(&p, None, None, &grid).unwrap();
        assert!(zero.slab.max_abs() == 0.0);
    }

    fn scale_slab(slab: &DisplacementSlab, factor: f64) -> DisplacementSlab {
        let mut out = slab.clone();
        for comp in 0..slab.components() {
            for level in 0..slab.levels() {
                for v in out.level_slice_mut(comp, level) {
                    *v *= factor;
                }
            }
        }
        out
    }

    #[test]
    fn repeated_solves_are_bitwise_stable() {
        let p = unit_params();
        let grid = GridSpec::new(1, TAU, 32, vec![0.0, 1.0]).unwrap();
        let g = RealField::from_scalar_fn(&grid, |x| x[0].sin() + 0.2 * (4.0 * x[0]).cos());
        let a = solve_boundary_part(&p, &g).unwrap();
        let b = solve_boundary_part(&p, &g).unwrap();
        for level in 0..2 {
            for comp in 0..2 {
                assert_eq!(a.slab.level_slice(comp, level), b.slab.level_slice(comp, level));
            }
        }
    }
}
