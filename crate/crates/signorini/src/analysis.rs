//! Free-boundary diagnostics: the explicit 3/2-homogeneous reference
//! solution, vanishing-order fits of boundary traces, contact-set
//! density estimation, and the regular/singular classification.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField};
use crate::obstacle::FreeBoundaryPoint;
use crate::params::LameParams;

/// The 3/2-homogeneous solution of the contact problem in the plane
/// spanned by a tangential unit vector ê and the normal. In polar
/// coordinates `x·ê = r cos θ`, `x_n = r sin θ`:
///
/// ```text
/// p·ê  = sign · r^{3/2} ( a·cos(3θ/2) − b·cos(θ/2) )
/// p·e_n = sign · r^{3/2} ( c3·sin(3θ/2) − b·sin(θ/2) )
/// ```
///
/// with `a = (3μ+λ+(μ+λ)/2)/(6μ)`, `c3 = (3μ+λ−(μ+λ)/2)/(6μ)`,
/// `b = (μ+λ)/(4μ)`. The printed formulas have a negative normal trace
/// on the θ = π ray; `sign = −1` (the default) flips them so the gap is
/// nonnegative there, matching the constraint `u^n ≥ 0`. The contact
/// ray is then θ = 0: zero gap and normal traction `−(μ+λ)r^{1/2} ≤ 0`.
#[derive(Debug, Clone, Copy)]
pub struct P32Profile {
    pub params: LameParams,
    pub direction: [f64; 2],
    pub sign: f64,
    pub a: f64,
    pub c3: f64,
    pub b: f64,
}

impl P32Profile {
    pub fn new(params: LameParams, direction: [f64; 2], sign: f64) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidParameter {
                name: "sign",
                requirement: "sign in {−1, +1}",
                value: sign,
            });
        }
        let norm = direction[0].hypot(direction[1]);
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter {
                name: "direction",
                requirement: "nonzero tangential direction",
                value: norm,
            });
        }
        let (mu, lambda) = (params.mu, params.lambda);
        let a = (3.0 * mu + lambda + 0.5 * (mu + lambda)) / (6.0 * mu);
        let c3 = (3.0 * mu + lambda - 0.5 * (mu + lambda)) / (6.0 * mu);
        let b = (mu + lambda) / (4.0 * mu);
        Ok(Self {
            params,
            direction: [direction[0] / norm, direction[1] / norm],
            sign,
            a,
            c3,
            b,
        })
    }

    /// Default normalization: `sign = −1`, nonnegative gap on θ = π.
    pub fn normalized(params: LameParams, direction: [f64; 2]) -> Result<Self> {
        Self::new(params, direction, -1.0)
    }

    /// `(p·ê, p·e_n)` at one polar point; panics never, θ unchecked.
    fn eval_unchecked(&self, r: f64, theta: f64) -> (f64, f64) {
        let amp = self.sign * r.powf(1.5);
        let pe = amp * (self.a * (1.5 * theta).cos() - self.b * (0.5 * theta).cos());
        let pn = amp * (self.c3 * (1.5 * theta).sin() - self.b * (0.5 * theta).sin());
        (pe, pn)
    }

    /// Evaluates the profile at `(r, θ)` pairs; `θ` must lie in `[0, π]`
    /// and `r ≥ 0`.
    pub fn eval(&self, points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(points.len());
        for &(r, theta) in points {
            if !(0.0..=std::f64::consts::PI + 1e-14).contains(&theta) {
                return Err(Error::ThetaOutOfRange { theta });
            }
            if r < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "r",
                    requirement: "r >= 0",
                    value: r,
                });
            }
            out.push(self.eval_unchecked(r, theta));
        }
        Ok(out)
    }

    /// Cartesian evaluation in the (ê, e_n) plane, upper half `t ≥ 0`.
    pub fn eval_cartesian(&self, zeta: f64, t: f64) -> (f64, f64) {
        let r = zeta.hypot(t);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let theta = t.atan2(zeta).max(0.0);
        self.eval_unchecked(r, theta)
    }

    /// Boundary gap on the detached ray: `|p·e_n(θ=π)| = (c3+b)r^{3/2}`.
    pub fn detached_gap_coefficient(&self) -> f64 {
        self.c3 + self.b
    }
}

/// Finite-difference validation of the profile at one spacing `h`.
#[derive(Debug, Clone, Copy)]
pub struct P32ValidationReport {
    /// Max FD Lamé residual over the annulus 0.5 ≤ r ≤ 1 (interior).
    pub pde_residual: f64,
    /// Max |∂_n(p·ê) + ∂_ê(p·e_n)| on the contact ray (θ = 0).
    pub traction_residual_contact_ray: f64,
    /// Same on the detached ray (θ = π).
    pub traction_residual_detached_ray: f64,
    /// Max |σ_n − sign·(μ+λ)√ζ| on the contact ray.
    pub sigma_contact_deviation: f64,
    /// Max |σ_n| on the detached ray (should vanish).
    pub sigma_detached_max: f64,
    /// Min of the normal gap on the detached ray (≥ 0 for sign = −1).
    pub gap_detached_min: f64,
    /// Max |normal gap| on the contact ray (0 exactly).
    pub gap_contact_max: f64,
}

/// Validates the profile by finite differences at spacing `h`: the
/// interior Lamé residual is `O(h²)`, the ray tractions converge to
/// their closed-form values at `O(h²)`, and the complementarity signs
/// hold: zero traction on the detached ray, single-signed traction and
/// zero gap on the contact ray.
pub fn p32_validate(profile: &P32Profile, h: f64) -> Result<P32ValidationReport> {
    if !(h > 0.0 && 4.0 * h < 1.0) {
        return Err(Error::InvalidParameter {
            name: "h",
            requirement: "0 < h < 1/4",
            value: h,
        });
    }
    let p = &profile.params;
    let pe = |z: f64, t: f64| profile.eval_cartesian(z, t).0;
    let pn = |z: f64, t: f64| profile.eval_cartesian(z, t).1;

    // Interior Lamé residual on the annulus, points with t ≥ 2h.
    let mut pde_residual = 0.0f64;
    let steps = (2.2 / h).ceil() as i64;
    for it in 2..steps {
        let t = it as f64 * h;
        if t > 1.0 {
            break;
        }
        for iz in -steps..=steps {
            let z = iz as f64 * h;
            let r = z.hypot(t);
            if !(0.5..=1.0).contains(&r) {
                continue;
            }
            let lap = |f: &dyn Fn(f64, f64) -> f64| {
                (f(z + h, t) + f(z - h, t) + f(z, t + h) + f(z, t - h) - 4.0 * f(z, t)) / (h * h)
            };
            let dzz = |f: &dyn Fn(f64, f64) -> f64| {
                (f(z + h, t) - 2.0 * f(z, t) + f(z - h, t)) / (h * h)
            };
            let dtt = |f: &dyn Fn(f64, f64) -> f64| {
                (f(z, t + h) - 2.0 * f(z, t) + f(z, t - h)) / (h * h)
            };
            let dzt = |f: &dyn Fn(f64, f64) -> f64| {
                (f(z + h, t + h) - f(z + h, t - h) - f(z - h, t + h) + f(z - h, t - h))
                    / (4.0 * h * h)
            };
            // μΔp_e + (μ+λ)∂_ζ(div p) and μΔp_n + (μ+λ)∂_t(div p).
            let res_e = p.mu * lap(&pe) + (p.mu + p.lambda) * (dzz(&pe) + dzt(&pn));
            let res_n = p.mu * lap(&pn) + (p.mu + p.lambda) * (dzt(&pe) + dtt(&pn));
            pde_residual = pde_residual.max(res_e.abs().max(res_n.abs()));
        }
    }

    // Ray quantities via one-sided second-order ∂_t and centered ∂_ζ.
    let dt_onesided = |f: &dyn Fn(f64, f64) -> f64, z: f64| {
        (-3.0 * f(z, 0.0) + 4.0 * f(z, h) - f(z, 2.0 * h)) / (2.0 * h)
    };
    let dz_centered = |f: &dyn Fn(f64, f64) -> f64, z: f64| (f(z + h, 0.0) - f(z - h, 0.0)) / (2.0 * h);

    let mut traction_contact = 0.0f64;
    let mut traction_detached = 0.0f64;
    let mut sigma_contact_dev = 0.0f64;
    let mut sigma_detached = 0.0f64;
    let mut gap_detached_min = f64::INFINITY;
    let mut gap_contact_max = 0.0f64;
    let samples = 32;
    for k in 0..=samples {
        let zeta = 0.5 + 0.5 * k as f64 / samples as f64;
        // Contact ray θ = 0 (positive ê axis).
        let tau = dt_onesided(&pe, zeta) + dz_centered(&pn, zeta);
        traction_contact = traction_contact.max(tau.abs());
        let sigma = 2.0 * p.mu * dt_onesided(&pn, zeta)
            + p.lambda * (dz_centered(&pe, zeta) + dt_onesided(&pn, zeta));
        let closed_form = profile.sign * (p.mu + p.lambda) * zeta.sqrt();
        sigma_contact_dev = sigma_contact_dev.max((sigma - closed_form).abs());
        gap_contact_max = gap_contact_max.max(pn(zeta, 0.0).abs());
        // Detached ray θ = π (negative ê axis).
        let z = -zeta;
        let tau_pi = dt_onesided(&pe, z) + dz_centered(&pn, z);
        traction_detached = traction_detached.max(tau_pi.abs());
        let sigma_pi = 2.0 * p.mu * dt_onesided(&pn, z)
            + p.lambda * (dz_centered(&pe, z) + dt_onesided(&pn, z));
        sigma_detached = sigma_detached.max(sigma_pi.abs());
        gap_detached_min = gap_detached_min.min(profile.eval_cartesian(z, 0.0).1);
    }

    Ok(P32ValidationReport {
        pde_residual,
        traction_residual_contact_ray: traction_contact,
        traction_residual_detached_ray: traction_detached,
        sigma_contact_deviation: sigma_contact_dev,
        sigma_detached_max: sigma_detached,
        gap_detached_min,
        gap_contact_max,
    })
}

/// Local L² growth fit around a boundary point.
#[derive(Debug, Clone)]
pub struct VanishingOrderFit {
    pub point: [f64; 2],
    pub radii: Vec<f64>,
    /// `r^{−d/2}·‖u − p₁‖_{L²(B'_r)}` per radius.
    pub averages: Vec<f64>,
    pub slope: f64,
    /// RMS residual of the log–log least-squares line.
    pub confidence: f64,
}

fn wrapped_offset(grid: &GridSpec, x: [f64; 2], x0: [f64; 2]) -> [f64; 2] {
    let period = grid.period();
    let mut y = [0.0; 2];
    for axis in 0..grid.dim() {
        let mut dxc = x[axis] - x0[axis];
        while dxc > 0.5 * period {
            dxc -= period;
        }
        while dxc < -0.5 * period {
            dxc += period;
        }
        y[axis] = dxc;
    }
    y
}

/// Removes a fitted affine part (least squares over the smallest ball)
/// when requested, then fits the slope of
/// `ln( r^{−d/2} ‖u − p₁‖_{L²(B'_r(x0))} )` against `ln r`.
pub fn vanishing_order(
    trace: &RealField,
    x0: [f64; 2],
    radii: &[f64],
    affine_removal: bool,
) -> Result<VanishingOrderFit> {
    let grid = trace.grid();
    let d = grid.dim();
    let h = grid.spacing();
    if radii.len() < 4 {
        return Err(Error::InvalidFitRequest(format!(
            "at least 4 radii required, got {}",
            radii.len()
        )));
    }
    let r_min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    if r_max / r_min < 8.0 - 1e-12 {
        return Err(Error::InvalidFitRequest(format!(
            "radii must span a factor >= 8, got {:.3}",
            r_max / r_min
        )));
    }
    for &r in radii {
        if r < 2.0 * h {
            return Err(Error::UnresolvableRadius {
                radius: r,
                spacing: h,
            });
        }
    }

    let values = trace.component(0);
    // Optional affine removal, fitted on the smallest ball.
    let mut affine = [0.0f64; 3]; // α, β₁, β₂
    if affine_removal {
        // Normal equations for u ≈ α + β·y on the smallest ball.
        let mut ata = [[0.0f64; 3]; 3];
        let mut atb = [0.0f64; 3];
        for node in 0..grid.node_count() {
            let y = wrapped_offset(grid, grid.coord(node), x0);
            if y[0].hypot(y[1]) > r_min {
                continue;
            }
            let row = [1.0, y[0], y[1]];
            for a in 0..=d {
                for b in 0..=d {
                    ata[a][b] += row[a] * row[b];
                }
                atb[a] += row[a] * values[node];
            }
        }
        affine = solve_small(&mut ata, &mut atb, d + 1)?;
    }

    let mut averages = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut sum = 0.0;
        for node in 0..grid.node_count() {
            let y = wrapped_offset(grid, grid.coord(node), x0);
            if y[0].hypot(y[1]) > r {
                continue;
            }
            let u = values[node] - affine[0] - affine[1] * y[0] - affine[2] * y[1];
            sum += u * u;
        }
        let norm = (sum * h.powi(d as i32)).sqrt();
        let avg = norm / r.powf(d as f64 / 2.0);
        if !(avg > 1e-300) {
            return Err(Error::InvalidFitRequest(format!(
                "vanishing L2 average at radius {r}; slope undefined"
            )));
        }
        averages.push(avg);
    }

    // Least-squares line in log-log.
    let logs: Vec<(f64, f64)> = radii
        .iter()
        .zip(&averages)
        .map(|(r, a)| (r.ln(), a.ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let confidence = (logs
        .iter()
        .map(|p| {
            let fit = my + slope * (p.0 - mx);
            (p.1 - fit) * (p.1 - fit)
        })
        .sum::<f64>()
        / n)
        .sqrt();

    Ok(VanishingOrderFit {
        point: x0,
        radii: radii.to_vec(),
        averages,
        slope,
        confidence,
    })
}

/// Gaussian elimination for the tiny affine systems.
fn solve_small(a: &mut [[f64; 3]; 3], b: &mut [f64; 3], n: usize) -> Result<[f64; 3]> {
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::InvalidFitRequest(
                "degenerate affine fit (empty smallest ball?)".into(),
            ));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Regular,
    SingularCandidate,
    Undetermined,
}

impl std::fmt::Display for PointClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PointClass::Regular => "regular",
            PointClass::SingularCandidate => "singular_candidate",
            PointClass::Undetermined => "undetermined",
        };
        write!(f, "{s}")
    }
}

/// Finite-resolution gates for the order-3/2 vs order-≥2 dichotomy.
#[derive(Debug, Clone, Copy)]
pub struct ClassifierThresholds {
    pub margin: f64,
    pub density_threshold: f64,
}

impl Default for ClassifierThresholds {
    fn default() -> Self {
        Self {
            margin: 0.15,
            density_threshold: 0.1,
        }
    }
}

/// Regular if the fitted order stays below `2 − margin`; otherwise a
/// singular candidate when the contact density at the smallest resolved
/// radius has already dropped below the threshold; otherwise
/// undetermined.
pub fn classify_point(
    fit: &VanishingOrderFit,
    density: f64,
    thresholds: &ClassifierThresholds,
) -> PointClass {
    if fit.slope < 2.0 - thresholds.margin {
        PointClass::Regular
    } else if density < thresholds.density_threshold {
        PointClass::SingularCandidate
    } else {
        PointClass::Undetermined
    }
}

#[derive(Debug, Clone)]
pub struct DensityReport {
    /// `(radius, fraction of masked cells in the discrete ball)`.
    pub samples: Vec<(f64, f64)>,
    /// Radii below `2h`, dropped with a warning.
    pub dropped: Vec<f64>,
}

/// Fraction of contact-masked cells in discrete balls around `x0`.
pub fn contact_density(
    grid: &GridSpec,
    mask: &[bool],
    x0: [f64; 2],
    radii: &[f64],
) -> DensityReport {
    let mut samples = Vec::new();
    let mut dropped = Vec::new();
    for &r in radii {
        if r < 2.0 * grid.spacing() {
            dropped.push(r);
            continue;
        }
        let mut total = 0usize;
        let mut masked = 0usize;
        for node in 0..grid.node_count() {
            if grid.torus_distance(grid.coord(node), x0) <= r {
                total += 1;
                if mask[node] {
                    masked += 1;
                }
            }
        }
        if total > 0 {
            samples.push((r, masked as f64 / total as f64));
        }
    }
    DensityReport { samples, dropped }
}

/// Normalized inner product between the (affine-removed) trace and the
/// sign-normalized profile gap on an annulus around a free-boundary
/// point. `contact_direction` points along the boundary axis into the
/// contact side; the model is `(c3+b)·r^{3/2}` on the detached side and
/// zero on the contact side.
pub fn p32_trace_correlation(
    trace: &RealField,
    x0: [f64; 2],
    contact_direction: [f64; 2],
    r_in: f64,
    r_out: f64,
    profile: &P32Profile,
) -> Result<f64> {
    let grid = trace.grid();
    if r_in < 2.0 * grid.spacing() {
        return Err(Error::UnresolvableRadius {
            radius: r_in,
            spacing: grid.spacing(),
        });
    }
    let values = trace.component(0);
    // Affine removal on the inner ball, as in the vanishing-order fit.
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    let d = grid.dim();
    for node in 0..grid.node_count() {
        let y = wrapped_offset(grid, grid.coord(node), x0);
        if y[0].hypot(y[1]) > r_in {
            continue;
        }
        let row = [1.0, y[0], y[1]];
        for a in 0..=d {
            for b in 0..=d {
                ata[a][b] += row[a] * row[b];
            }
            atb[a] += row[a] * values[node];
        }
    }
    let affine = solve_small(&mut ata, &mut atb, d + 1)?;

    let gap = profile.detached_gap_coefficient();
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nm = 0.0;
    for node in 0..grid.node_count() {
        let y = wrapped_offset(grid, grid.coord(node), x0);
        let r = y[0].hypot(y[1]);
        if !(r_in..=r_out).contains(&r) {
            continue;
        }
        let u = values[node] - affine[0] - affine[1] * y[0] - affine[2] * y[1];
        let toward_contact = y[0] * contact_direction[0] + y[1] * contact_direction[1];
        let model = if toward_contact > 0.0 {
            0.0
        } else {
            gap * r.powf(1.5)
        };
        dot += u * model;
        nu += u * u;
        nm += model * model;
    }
    if nu <= 0.0 || nm <= 0.0 {
        return Err(Error::InvalidFitRequest(
            "empty annulus in the correlation window".into(),
        ));
    }
    Ok(dot / (nu.sqrt() * nm.sqrt()))
}

/// One row of the free-boundary report.
#[derive(Debug, Clone)]
pub struct FreeBoundaryEntry {
    pub point: [f64; 2],
    pub slope: f64,
    pub confidence: f64,
    /// Contact density at the smallest resolved radius.
    pub density: f64,
    pub correlation: f64,
    pub label: PointClass,
}

#[derive(Debug, Clone)]
pub struct FreeBoundaryReport {
    pub entries: Vec<FreeBoundaryEntry>,
}

/// Runs the vanishing-order fit, density estimate, profile correlation,
/// and classification at every free-boundary point of a converged run.
pub fn analyze_free_boundary(
    trace: &RealField,
    mask: &[bool],
    points: &[FreeBoundaryPoint],
    radii: &[f64],
    thresholds: &ClassifierThresholds,
    profile_params: &LameParams,
) -> Result<FreeBoundaryReport> {
    let grid = trace.grid();
    let mut entries = Vec::new();
    for p in points {
        let fit = vanishing_order(trace, p.position, radii, true)?;
        let densities = contact_density(grid, mask, p.position, radii);
        let density = densities
            .samples
            .first()
            .map(|(_, v)| *v)
            .unwrap_or(f64::NAN);
        // Contact side along the crossing axis from the mask next to the
        // point.
        let mut direction = [0.0f64; 2];
        let h = grid.spacing();
        let probe = |offset: f64| -> bool {
            let mut q = p.position;
            q[p.axis] += offset;
            let node = nearest_node(grid, q);
            mask[node]
        };
        direction[p.axis] = if probe(-1.5 * h) {
            -1.0
        } else if probe(1.5 * h) {
            1.0
        } else {
            1.0
        };
        let profile = P32Profile::normalized(*profile_params, [1.0, 0.0])?;
        let r_in = radii.iter().cloned().fold(f64::INFINITY, f64::min);
        let r_out = radii.iter().cloned().fold(0.0, f64::max);
        let correlation =
            p32_trace_correlation(trace, p.position, direction, r_in, r_out, &profile)?;
        let label = classify_point(&fit, density, thresholds);
        entries.push(FreeBoundaryEntry {
            point: p.position,
            slope: fit.slope,
            confidence: fit.confidence,
            density,
            correlation,
            label,
        });
    }
    Ok(FreeBoundaryReport { entries })
}

fn nearest_node(grid: &GridSpec, x: [f64; 2]) -> usize {
    let h = grid.spacing();
    let n = grid.points_per_dim();
    let mut ix = [0usize; 2];
    for axis in 0..grid.dim() {
        let rel = (x[axis] + 0.5 * grid.period()) / h;
        let wrapped = rel.rem_euclid(n as f64);
        ix[axis] = (wrapped.round() as usize) % n;
    }
    grid.ravel(ix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_constants;

    const TAU: f64 = 2.0 * std::f64::consts::PI;
    const PI: f64 = std::f64::consts::PI;

    fn unit_params() -> LameParams {
        derive_constants(1.0, 1.0).unwrap()
    }

    #[test]
    fn profile_coefficients_and_values() {
        let p = P32Profile::new(unit_params(), [1.0, 0.0], 1.0).unwrap();
        assert!((p.a - 5.0 / 6.0).abs() < 1e-15);
        assert!((p.c3 - 0.5).abs() < 1e-15);
        assert!((p.b - 0.5).abs() < 1e-15);
        let vals = p
            .eval(&[(1.0, 0.0), (1.0, PI), (1.0, PI / 2.0)])
            .unwrap();
        assert!((vals[0].0 - 1.0 / 3.0).abs() < 1e-14);
        assert!(vals[0].1.abs() < 1e-14);
        assert!(vals[1].0.abs() < 1e-14);
        assert!((vals[1].1 + 1.0).abs() < 1e-14);
        assert!((vals[2].0 + 2.0 * 2.0f64.sqrt() / 3.0).abs() < 1e-14);
        assert!(vals[2].1.abs() < 1e-14);
        assert!(matches!(
            p.eval(&[(1.0, -0.5)]),
            Err(Error::ThetaOutOfRange { .. })
        ));
    }

    #[test]
    fn profile_homogeneity() {
        let p = P32Profile::normalized(derive_constants(2.0, 0.5).unwrap(), [1.0, 0.0]).unwrap();
        for &theta in &[0.0, 0.3, 1.2, PI] {
            let small = p.eval(&[(0.7, theta)]).unwrap()[0];
            let big = p.eval(&[(1.4, theta)]).unwrap()[0];
            let factor = 2.0f64.powf(1.5);
            assert!((big.0 - factor * small.0).abs() < 1e-13);
            assert!((big.1 - factor * small.1).abs() < 1e-13);
        }
    }

    #[test]
    fn profile_signs_with_default_normalization() {
        // sign = −1: gap ≥ 0 on θ = π, zero on θ = 0; traction ≤ 0 on θ = 0.
        let p = P32Profile::normalized(unit_params(), [1.0, 0.0]).unwrap();
        let report = p32_validate(&p, 0.002).unwrap();
        assert!(report.gap_detached_min >= 0.0);
        assert!(report.gap_contact_max == 0.0);
        // σ_n(θ=0) = −(μ+λ)√ζ for sign = −1 (magnitude 2√ζ at μ=λ=1).
        assert!(report.sigma_contact_deviation < 2e-2);
        assert!(report.sigma_detached_max < 2e-2);
        assert!(report.traction_residual_contact_ray < 2e-2);
        assert!(report.traction_residual_detached_ray < 2e-2);
    }

    #[test]
    fn validation_rates_are_second_order() {
        let p = P32Profile::normalized(derive_constants(1.7, 0.4).unwrap(), [1.0, 0.0]).unwrap();
        let coarse = p32_validate(&p, 0.02).unwrap();
        let fine = p32_validate(&p, 0.01).unwrap();
        assert!(
            coarse.pde_residual / fine.pde_residual > 2.5,
            "PDE residual rate: {} -> {}",
            coarse.pde_residual,
            fine.pde_residual
        );
        assert!(coarse.sigma_detached_max / fine.sigma_detached_max > 2.5);
    }

    #[test]
    fn vanishing_order_on_homogeneous_profiles() {
        // Radii well above the spacing so the ball-staircase error does
        // not bias the slope.
        let grid = GridSpec::new(1, TAU, 1024, vec![]).unwrap();
        let radii = [0.1, 0.2, 0.4, 0.8];

        let three_half =
            RealField::from_scalar_fn(&grid, |x| x[0].max(0.0).powf(1.5));
        let fit = vanishing_order(&three_half, [0.0, 0.0], &radii, false).unwrap();
        assert!(
            (fit.slope - 1.5).abs() <= 0.05,
            "3/2-homogeneous slope {}",
            fit.slope
        );

        let quadratic = RealField::from_scalar_fn(&grid, |x| x[0] * x[0]);
        let fit = vanishing_order(&quadratic, [0.0, 0.0], &radii, false).unwrap();
        assert!((fit.slope - 2.0).abs() <= 0.05, "quadratic slope {}", fit.slope);

        // Boundary trace of the normalized profile.
        let params = unit_params();
        let profile = P32Profile::normalized(params, [1.0, 0.0]).unwrap();
        let gap = profile.detached_gap_coefficient();
        let trace = RealField::from_scalar_fn(&grid, |x| {
            if x[0] < 0.0 {
                gap * (-x[0]).powf(1.5)
            } else {
                0.0
            }
        });
        let fit = vanishing_order(&trace, [0.0, 0.0], &radii, false).unwrap();
        assert!((fit.slope - 1.5).abs() <= 0.05, "profile slope {}", fit.slope);
    }

    #[test]
    fn vanishing_order_preconditions() {
        let grid = GridSpec::new(1, TAU, 64, vec![]).unwrap();
        let f = RealField::from_scalar_fn(&grid, |x| x[0] * x[0]);
        // Too few radii.
        assert!(vanishing_order(&f, [0.0, 0.0], &[0.1, 0.2, 0.4], false).is_err());
        // Span below 8.
        assert!(vanishing_order(&f, [0.0, 0.0], &[0.2, 0.3, 0.4, 0.8], false).is_err());
        // Radius below 2h.
        assert!(matches!(
            vanishing_order(&f, [0.0, 0.0], &[0.05, 0.2, 0.3, 0.4], false),
            Err(Error::UnresolvableRadius { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let thresholds = ClassifierThresholds::default();
        let fit = |slope: f64| VanishingOrderFit {
            point: [0.0, 0.0],
            radii: vec![],
            averages: vec![],
            slope,
            confidence: 0.01,
        };
        assert_eq!(
            classify_point(&fit(1.5), 0.5, &thresholds),
            PointClass::Regular
        );
        assert_eq!(
            classify_point(&fit(2.0), 0.05, &thresholds),
            PointClass::SingularCandidate
        );
        assert_eq!(
            classify_point(&fit(1.95), 0.4, &thresholds),
            PointClass::Undetermined
        );
    }

    #[test]
    fn density_on_synthetic_masks() {
        for n in [64usize, 128, 256] {
            let grid = GridSpec::new(1, TAU, n, vec![]).unwrap();
            let radii = [TAU / 8.0, TAU / 4.0];
            // Half line {x <= 0}.
            let half: Vec<bool> = (0..n).map(|i| grid.coord(i)[0] <= 0.0).collect();
            let report = contact_density(&grid, &half, [0.0, 0.0], &radii);
            for &(_, density) in &report.samples {
                assert!(
                    (density - 0.5).abs() <= 2.0 / n as f64,
                    "half-line density {density} at n = {n}"
                );
            }
            // Single point {0}.
            let single: Vec<bool> = (0..n).map(|i| grid.coord(i)[0] == 0.0).collect();
            let report = contact_density(&grid, &single, [0.0, 0.0], &[TAU / 4.0, 3.0 * TAU / 8.0]);
            for &(_, density) in &report.samples {
                assert!(
                    density <= 2.0 / n as f64,
                    "single-point density {density} at n = {n}"
                );
            }
        }
        // 2D half-plane through the origin.
        let grid = GridSpec::new(2, TAU, 64, vec![]).unwrap();
        let mask: Vec<bool> = (0..grid.node_count())
            .map(|node| grid.coord(node)[0] <= 0.0)
            .collect();
        let report = contact_density(&grid, &mask, [0.0, 0.0], &[1.0]);
        let (_, density) = report.samples[0];
        assert!((density - 0.5).abs() <= 2.0 * grid.spacing());
        // Sub-resolution radii are dropped.
        let dropped = contact_density(&grid, &mask, [0.0, 0.0], &[0.05]);
        assert!(dropped.samples.is_empty());
        assert_eq!(dropped.dropped, vec![0.05]);
    }

    #[test]
    fn correlation_against_exact_profile_trace() {
        let grid = GridSpec::new(1, TAU, 1024, vec![]).unwrap();
        let params = unit_params();
        let profile = P32Profile::normalized(params, [1.0, 0.0]).unwrap();
        let gap = profile.detached_gap_coefficient();
        // Contact on the right of x0 = 0.3, detached gap on the left.
        let x0 = [0.3, 0.0];
        let trace = RealField::from_scalar_fn(&grid, |x| {
            let y = x[0] - 0.3;
            if y < 0.0 {
                gap * (-y).powf(1.5)
            } else {
                0.0
            }
        });
        let corr = p32_trace_correlation(&trace, x0, [1.0, 0.0], 0.1, 0.8, &profile).unwrap();
        assert!(corr > 0.97, "correlation {corr}");
    }
}
