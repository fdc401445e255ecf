//! Scalar obstacle problem for the half-Laplacian on the windowed
//! torus: minimize `E(v) = (c/2)⟨(−Δ)^{1/4}v, (−Δ)^{1/4}v⟩ − ⟨rhs, v⟩`
//! over `{v ≥ ψ on the window, v = 0 on the collar}`.
//!
//! On a plain torus adding constants is energy-free and the variational
//! inequality degenerates; the pinned collar anchors the problem and
//! emulates decay at infinity. The default solver is an accelerated
//! projected gradient with restart on energy increase; a dense
//! projected SOR solver on the explicitly assembled operator matrix is
//! kept as the small-scale oracle.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField, SpectralField};
use crate::spectral::{FrequencyLattice, SpectralTransform};

/// Obstacle problem data. `window` and `collar` are disjoint node
/// masks; nodes in neither are unconstrained. `rhs` is the
/// inhomogeneity on the operator side and may be zero.
#[derive(Debug, Clone)]
pub struct ObstacleProblem {
    pub psi: RealField,
    pub rhs: RealField,
    pub window: Vec<bool>,
    pub collar: Vec<bool>,
    pub operator_constant: f64,
}

impl ObstacleProblem {
    pub fn new(
        psi: RealField,
        rhs: RealField,
        window: Vec<bool>,
        collar: Vec<bool>,
        operator_constant: f64,
    ) -> Result<Self> {
        psi.check_same_shape(&rhs)?;
        if psi.components() != 1 {
            return Err(Error::InvalidObstacleProblem(
                "obstacle and rhs must be scalar fields".into(),
            ));
        }
        let nodes = psi.grid().node_count();
        if window.len() != nodes || collar.len() != nodes {
            return Err(Error::InvalidObstacleProblem(
                "mask length differs from the node count".into(),
            ));
        }
        if window.iter().zip(&collar).any(|(w, c)| *w && *c) {
            return Err(Error::InvalidObstacleProblem(
                "window and collar overlap".into(),
            ));
        }
        if !collar.iter().any(|c| *c) {
            return Err(Error::InvalidObstacleProblem(
                "collar is empty; the problem is not anchored".into(),
            ));
        }
        if !(operator_constant >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "operator_constant",
                requirement: "c >= 0",
                value: operator_constant,
            });
        }
        let problem = Self {
            psi,
            rhs,
            window,
            collar,
            operator_constant,
        };
        // The obstacle must stay below zero where the window touches the
        // pinned collar, otherwise the pinning contradicts the constraint.
        for node in 0..nodes {
            if problem.window[node]
                && problem.touches_collar(node)
                && problem.psi.component(0)[node] >= 0.0
            {
                return Err(Error::InvalidObstacleProblem(format!(
                    "psi = {} >= 0 on the window boundary adjacent to the collar (node {node})",
                    problem.psi.component(0)[node]
                )));
            }
        }
        Ok(problem)
    }

    /// Window/collar split from a radius around a center: window inside,
    /// collar outside.
    pub fn masks_from_radius(
        grid: &GridSpec,
        center: [f64; 2],
        window_radius: f64,
    ) -> (Vec<bool>, Vec<bool>) {
        let nodes = grid.node_count();
        let mut window = vec![false; nodes];
        let mut collar = vec![false; nodes];
        for node in 0..nodes {
            if grid.torus_distance(grid.coord(node), center) <= window_radius {
                window[node] = true;
            } else {
                collar[node] = true;
            }
        }
        (window, collar)
    }

    fn touches_collar(&self, node: usize) -> bool {
        let grid = self.psi.grid();
        let n = grid.points_per_dim();
        let ix = grid.unravel(node);
        for axis in 0..grid.dim() {
            for step in [n - 1, 1] {
                let mut jx = ix;
                jx[axis] = (jx[axis] + step) % n;
                if self.collar[grid.ravel(jx)] {
                    return true;
                }
            }
        }
        false
    }

    fn check_feasible(&self) -> Result<()> {
        for (node, &c) in self.collar.iter().enumerate() {
            if c && self.psi.component(0)[node] > 0.0 {
                return Err(Error::InfeasibleObstacle {
                    max_psi: self.psi.component(0)[node],
                    node,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ProjectedGradient,
    AcceleratedProjectedGradient,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub method: Method,
    /// Residual/energy bookkeeping happens every `check_every` iterations.
    pub check_every: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 200_000,
            tol: 1e-9,
            method: Method::AcceleratedProjectedGradient,
            check_every: 8,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub iter: usize,
    pub energy: f64,
    pub residual: f64,
}

/// A free-boundary point: an interpolated position on a window cell
/// edge where the active mask flips, together with the crossing axis.
#[derive(Debug, Clone, Copy)]
pub struct FreeBoundaryPoint {
    pub position: [f64; 2],
    pub axis: usize,
}

#[derive(Debug, Clone)]
pub struct ObstacleSolution {
    pub v: RealField,
    pub active_set: Vec<bool>,
    pub free_boundary: Vec<FreeBoundaryPoint>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub energy: f64,
    pub log: Vec<IterationRecord>,
    /// Contact threshold used for the mask: `v − ψ ≤ active_tol`.
    pub active_tol: f64,
}

struct Workspace {
    transform: SpectralTransform,
    lattice: FrequencyLattice,
    grid_weight: f64,
}

impl Workspace {
    fn new(grid: &GridSpec) -> Self {
        Self {
            transform: SpectralTransform::new(grid),
            lattice: FrequencyLattice::new(grid),
            grid_weight: grid.spacing().powi(grid.dim() as i32),
        }
    }

    /// `c·(−Δ)^{1/2} v` in nodal space, plus the spectral copy of `v`.
    fn operator(&self, v: &RealField, c: f64) -> (RealField, SpectralField) {
        let spec = self.transform.to_spectral(v);
        let mut mult = spec.clone();
        for (node, value) in mult.component_mut(0).iter_mut().enumerate() {
            *value *= c * self.lattice.magnitude(node);
        }
        (self.transform.to_real(&mult), spec)
    }

    fn energy(&self, problem: &ObstacleProblem, v: &RealField, spec: &SpectralField) -> f64 {
        let c = problem.operator_constant;
        let volume = problem.psi.grid().period().powi(problem.psi.grid().dim() as i32);
        let quad: f64 = spec
            .component(0)
            .iter()
            .enumerate()
            .map(|(node, z)| self.lattice.magnitude(node) * z.norm_sqr())
            .sum();
        let linear: f64 = problem
            .rhs
            .component(0)
            .iter()
            .zip(v.component(0))
            .map(|(r, x)| r * x)
            .sum();
        0.5 * c * volume * quad - self.grid_weight * linear
    }
}

/// `max` over the window of `|min(c(−Δ)^{1/2}v − rhs, v − ψ)|`.
pub fn complementarity_residual(problem: &ObstacleProblem, v: &RealField) -> f64 {
    let ws = Workspace::new(v.grid());
    let (op, _) = ws.operator(v, problem.operator_constant);
    complementarity_residual_with(problem, v, &op)
}

fn complementarity_residual_with(problem: &ObstacleProblem, v: &RealField, op: &RealField) -> f64 {
    let mut worst = 0.0f64;
    for node in 0..v.grid().node_count() {
        let eq = op.component(0)[node] - problem.rhs.component(0)[node];
        if problem.window[node] {
            let slack = v.component(0)[node] - problem.psi.component(0)[node];
            worst = worst.max(eq.min(slack).abs());
        } else if !problem.collar[node] {
            // Unconstrained nodes carry the plain equation residual.
            worst = worst.max(eq.abs());
        }
    }
    worst
}

fn project(problem: &ObstacleProblem, v: &mut RealField) {
    let psi = problem.psi.component(0).to_vec();
    let comp = v.component_mut(0);
    for node in 0..comp.len() {
        if problem.collar[node] {
            comp[node] = 0.0;
        } else if problem.window[node] && comp[node] < psi[node] {
            comp[node] = psi[node];
        }
    }
}

/// Energy-projection solver. Step size is `1/(c·ξ'_max)`; every iterate
/// is feasible (projection is exact clamping); energy is non-increasing
/// (the accelerated variant restarts and falls back to a plain descent
/// step whenever an iterate would raise it).
pub fn obstacle_solve(problem: &ObstacleProblem, opts: &SolveOptions) -> Result<ObstacleSolution> {
    problem.check_feasible()?;
    let grid = problem.psi.grid().clone();
    let ws = Workspace::new(&grid);
    let c = problem.operator_constant;
    if c <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "operator_constant",
            requirement: "c > 0 for the solve",
            value: c,
        });
    }
    let step = 1.0 / (c * ws.lattice.max_magnitude());

    let mut v = RealField::zeros(&grid, 1);
    project(problem, &mut v);
    let mut v_prev = v.clone();
    let mut theta: f64 = 1.0;
    let (mut op_v, mut spec_v) = ws.operator(&v, c);
    let mut energy = ws.energy(problem, &v, &spec_v);
    let mut residual = complementarity_residual_with(problem, &v, &op_v);
    let mut log = vec![IterationRecord {
        iter: 0,
        energy,
        residual,
    }];
    let mut converged = residual <= opts.tol;
    let mut iterations = 0;

    let accelerated = opts.method == Method::AcceleratedProjectedGradient;

    while !converged && iterations < opts.max_iter {
        iterations += 1;

        let candidate = if accelerated {
            // Extrapolated point y = v + w·(v − v_prev).
            let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
            let weight = (theta - 1.0) / theta_next;
            theta = theta_next;
            let mut y = v.clone();
            for (node, value) in y.component_mut(0).iter_mut().enumerate() {
                *value += weight * (v.component(0)[node] - v_prev.component(0)[node]);
            }
            let (op_y, _) = ws.operator(&y, c);
            let mut next = y;
            for (node, value) in next.component_mut(0).iter_mut().enumerate() {
                value_step(value, op_y.component(0)[node], problem.rhs.component(0)[node], step);
            }
            project(problem, &mut next);
            next
        } else {
            let mut next = v.clone();
            for (node, value) in next.component_mut(0).iter_mut().enumerate() {
                value_step(value, op_v.component(0)[node], problem.rhs.component(0)[node], step);
            }
            project(problem, &mut next);
            next
        };

        let (op_c, spec_c) = ws.operator(&candidate, c);
        let energy_c = ws.energy(problem, &candidate, &spec_c);

        let (next, op_next, spec_next, energy_next) =
            if accelerated && energy_c > energy + 1e-12 * energy.abs().max(1.0) {
                // Momentum overshoot: restart and take a plain descent step
                // from the current iterate.
                theta = 1.0;
                let mut fallback = v.clone();
                for (node, value) in fallback.component_mut(0).iter_mut().enumerate() {
                    value_step(
                        value,
                        op_v.component(0)[node],
                        problem.rhs.component(0)[node],
                        step,
                    );
                }
                project(problem, &mut fallback);
                let (op_f, spec_f) = ws.operator(&fallback, c);
                let energy_f = ws.energy(problem, &fallback, &spec_f);
                (fallback, op_f, spec_f, energy_f)
            } else {
                (candidate, op_c, spec_c, energy_c)
            };

        v_prev = std::mem::replace(&mut v, next);
        op_v = op_next;
        spec_v = spec_next;
        energy = energy_next;

        if iterations % opts.check_every == 0 || iterations == opts.max_iter {
            residual = complementarity_residual_with(problem, &v, &op_v);
            log.push(IterationRecord {
                iter: iterations,
                energy,
                residual,
            });
            converged = residual <= opts.tol;
        }
    }
    let _ = spec_v;
    residual = complementarity_residual_with(problem, &v, &op_v);
    converged = residual <= opts.tol;

    let active_tol = 10.0 * opts.tol;
    let active_set = active_mask(problem, &v, active_tol);
    let free_boundary = extract_free_boundary(problem, &v, &active_set, active_tol);
    Ok(ObstacleSolution {
        v,
        active_set,
        free_boundary,
        residual,
        iterations,
        converged,
        energy,
        log,
        active_tol,
    })
}

#[inline]
fn value_step(value: &mut f64, op: f64, rhs: f64, step: f64) {
    *value -= step * (op - rhs);
}

/// Contact mask: `v − ψ ≤ active_tol` within the window.
pub fn active_mask(problem: &ObstacleProblem, v: &RealField, active_tol: f64) -> Vec<bool> {
    (0..v.grid().node_count())
        .map(|node| {
            problem.window[node]
                && v.component(0)[node] - problem.psi.component(0)[node] <= active_tol
        })
        .collect()
}

/// Cells of the window where the active mask changes, refined by linear
/// interpolation of `v − ψ` along the crossing axis. An empty active
/// set yields an empty list.
pub fn extract_free_boundary(
    problem: &ObstacleProblem,
    v: &RealField,
    active: &[bool],
    active_tol: f64,
) -> Vec<FreeBoundaryPoint> {
    let grid = v.grid();
    let n = grid.points_per_dim();
    let mut points = Vec::new();
    for node in 0..grid.node_count() {
        if !problem.window[node] {
            continue;
        }
        let ix = grid.unravel(node);
        for axis in 0..grid.dim() {
            let mut jx = ix;
            jx[axis] = (jx[axis] + 1) % n;
            let neighbor = grid.ravel(jx);
            if !problem.window[neighbor] || active[node] == active[neighbor] {
                continue;
            }
            // Interpolate where v − ψ crosses the activation threshold.
            let s0 = v.component(0)[node] - problem.psi.component(0)[node];
            let s1 = v.component(0)[neighbor] - problem.psi.component(0)[neighbor];
            let frac = if (s1 - s0).abs() > 1e-300 {
                ((active_tol - s0) / (s1 - s0)).clamp(0.0, 1.0)
            } else {
                0.5
            };
            let mut position = grid.coord(node);
            position[axis] += frac * grid.spacing();
            points.push(FreeBoundaryPoint { position, axis });
        }
    }
    points
}

/// Options for the dense projected-SOR oracle.
#[derive(Debug, Clone)]
pub struct PsorOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub omega: f64,
}

impl Default for PsorOptions {
    fn default() -> Self {
        Self {
            max_iter: 500_000,
            tol: 1e-10,
            omega: 1.5,
        }
    }
}

/// Dense projected SOR on the explicitly assembled operator matrix
/// `K_{ij} = (c/N^d)·Σ_k |ξ_k| cos(k·(x_i − x_j))`, assembled by direct
/// trigonometric sums so the path shares nothing with the FFT solver.
/// Intended for small 1D problems only.
pub fn dense_psor_solve(problem: &ObstacleProblem, opts: &PsorOptions) -> Result<ObstacleSolution> {
    problem.check_feasible()?;
    let grid = problem.psi.grid().clone();
    if grid.dim() != 1 {
        return Err(Error::InvalidObstacleProblem(
            "the dense PSOR oracle is 1D only".into(),
        ));
    }
    let n = grid.points_per_dim();
    let c = problem.operator_constant;
    let base = 2.0 * std::f64::consts::PI / grid.period();

    // Circulant first row by direct summation over signed modes.
    let mut row0 = vec![0.0f64; n];
    for (offset, r) in row0.iter_mut().enumerate() {
        let mut acc = 0.0;
        for m in 0..n {
            let signed = if m < n / 2 {
                m as f64
            } else {
                m as f64 - n as f64
            };
            let k = base * signed;
            acc += k.abs() * (k * offset as f64 * grid.spacing()).cos();
        }
        *r = c * acc / n as f64;
    }
    let matrix = |i: usize, j: usize| -> f64 { row0[(n + i - j) % n] };

    let psi = problem.psi.component(0);
    let rhs = problem.rhs.component(0);
    let mut v = vec![0.0f64; n];
    for i in 0..n {
        if problem.window[i] && v[i] < psi[i] {
            v[i] = psi[i];
        }
        if problem.collar[i] {
            v[i] = 0.0;
        }
    }

    let diag = row0[0];
    let mut iterations = 0;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    while iterations < opts.max_iter {
        iterations += 1;
        for i in 0..n {
            if problem.collar[i] {
                continue;
            }
            let mut acc = 0.0;
            for (j, vj) in v.iter().enumerate() {
                acc += matrix(i, j) * vj;
            }
            let update = v[i] + opts.omega * (rhs[i] - acc) / diag;
            v[i] = if problem.window[i] {
                update.max(psi[i])
            } else {
                update
            };
        }
        if iterations % 16 == 0 {
            residual = dense_residual(problem, &v, &matrix);
            if residual <= opts.tol {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        residual = dense_residual(problem, &v, &matrix);
        converged = residual <= opts.tol;
    }

    let mut field = RealField::zeros(&grid, 1);
    field.component_mut(0).copy_from_slice(&v);
    let active_tol = 10.0 * opts.tol;
    let active_set = active_mask(problem, &field, active_tol);
    let free_boundary = extract_free_boundary(problem, &field, &active_set, active_tol);
    // Energy via the dense quadratic form.
    let mut quad = 0.0;
    for i in 0..n {
        for (j, vj) in v.iter().enumerate() {
            quad += v[i] * matrix(i, j) * vj;
        }
    }
    let weight = grid.spacing();
    let energy =
        0.5 * weight * quad - weight * rhs.iter().zip(&v).map(|(r, x)| r * x).sum::<f64>();
    Ok(ObstacleSolution {
        v: field,
        active_set,
        free_boundary,
        residual,
        iterations,
        converged,
        energy,
        log: Vec::new(),
        active_tol,
    })
}

fn dense_residual(
    problem: &ObstacleProblem,
    v: &[f64],
    matrix: &impl Fn(usize, usize) -> f64,
) -> f64 {
    let psi = problem.psi.component(0);
    let rhs = problem.rhs.component(0);
    let mut worst = 0.0f64;
    for i in 0..v.len() {
        if problem.collar[i] {
            continue;
        }
        let mut acc = 0.0;
        for (j, vj) in v.iter().enumerate() {
            acc += matrix(i, j) * vj;
        }
        let eq = acc - rhs[i];
        if problem.window[i] {
            worst = worst.max(eq.min(v[i] - psi[i]).abs());
        } else {
            worst = worst.max(eq.abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(1, TAU, n, vec![]).unwrap()
    }

    fn default_masks(grid: &GridSpec) -> (Vec<bool>, Vec<bool>) {
        ObstacleProblem::masks_from_radius(grid, [0.0, 0.0], 0.8 * std::f64::consts::PI)
    }

    fn bump_problem(grid: &GridSpec, height: f64) -> ObstacleProblem {
        let (window, collar) = default_masks(grid);
        let psi = RealField::from_scalar_fn(grid, |x| (height - x[0] * x[0]).max(-0.5));
        let rhs = RealField::zeros(grid, 1);
        ObstacleProblem::new(psi, rhs, window, collar, 1.0).unwrap()
    }

    #[test]
    fn problem_validation() {
        let g = grid(32);
        let (window, collar) = default_masks(&g);
        let psi = RealField::from_scalar_fn(&g, |_| -1.0);
        let rhs = RealField::zeros(&g, 1);
        assert!(ObstacleProblem::new(psi.clone(), rhs.clone(), window.clone(), collar.clone(), 1.0)
            .is_ok());

        // Overlapping masks rejected.
        let all = vec![true; g.node_count()];
        assert!(ObstacleProblem::new(psi.clone(), rhs.clone(), all.clone(), all.clone(), 1.0)
            .is_err());

        // Empty collar rejected.
        let none = vec![false; g.node_count()];
        assert!(
            ObstacleProblem::new(psi.clone(), rhs.clone(), all, none.clone(), 1.0).is_err()
        );

        // Positive obstacle at the window rim rejected.
        let bad_psi = RealField::from_scalar_fn(&g, |_| 0.5);
        let (window, collar) = default_masks(&g);
        assert!(ObstacleProblem::new(bad_psi, rhs, window, collar, 1.0).is_err());
    }

    #[test]
    fn infeasible_on_collar_is_detected() {
        let g = grid(32);
        let (window, collar) = default_masks(&g);
        // Negative near the rim but positive deep inside the collar.
        let psi = RealField::from_scalar_fn(&g, |x| {
            if x[0].abs() > 3.0 {
                0.25
            } else {
                -1.0
            }
        });
        let rhs = RealField::zeros(&g, 1);
        let problem = ObstacleProblem::new(psi, rhs, window, collar, 1.0).unwrap();
        let err = obstacle_solve(&problem, &SolveOptions::default());
        assert!(matches!(err, Err(Error::InfeasibleObstacle { .. })));
    }

    #[test]
    fn negative_obstacle_gives_zero_solution() {
        let g = grid(64);
        let (window, collar) = default_masks(&g);
        let psi = RealField::from_scalar_fn(&g, |_| -1.0);
        let rhs = RealField::zeros(&g, 1);
        let problem = ObstacleProblem::new(psi, rhs, window, collar, 1.0).unwrap();
        let sol = obstacle_solve(&problem, &SolveOptions::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.v.max_abs() == 0.0);
        assert!(sol.active_set.iter().all(|a| !a));
        assert!(sol.free_boundary.is_empty());
        assert!(sol.residual == 0.0);
    }

    #[test]
    fn bump_obstacle_agrees_with_psor_oracle() {
        let g = grid(64); // 1D window, N <= 64
        let problem = bump_problem(&g, 0.5);
        let opts = SolveOptions {
            tol: 1e-10,
            ..Default::default()
        };
        let fast = obstacle_solve(&problem, &opts).unwrap();
        assert!(fast.converged, "APG residual {}", fast.residual);
        assert!(fast.residual <= 1e-8);
        let slow = dense_psor_solve(&problem, &PsorOptions::default()).unwrap();
        assert!(slow.converged, "PSOR residual {}", slow.residual);
        let diff = fast
            .v
            .component(0)
            .iter()
            .zip(slow.v.component(0))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff <= 1e-6, "solver discrepancy {diff}");
        // Contact near the bump center is nonempty.
        assert!(fast.active_set.iter().any(|a| *a));
    }

    #[test]
    fn feasibility_and_energy_monotonicity() {
        let g = grid(128);
        let problem = bump_problem(&g, 0.4);
        let opts = SolveOptions {
            method: Method::ProjectedGradient,
            max_iter: 4000,
            tol: 1e-12,
            check_every: 1,
            ..Default::default()
        };
        let sol = obstacle_solve(&problem, &opts).unwrap();
        // Feasibility is exact clamping.
        for node in 0..g.node_count() {
            if problem.window[node] {
                assert!(
                    sol.v.component(0)[node] >= problem.psi.component(0)[node] - 1e-9,
                    "constraint violated"
                );
            }
            if problem.collar[node] {
                assert!(sol.v.component(0)[node] == 0.0);
            }
        }
        // Energy non-increasing along the recorded trajectory.
        for w in sol.log.windows(2) {
            assert!(
                w[1].energy <= w[0].energy + 1e-12 * w[0].energy.abs().max(1.0),
                "energy rose from {} to {}",
                w[0].energy,
                w[1].energy
            );
        }
    }

    #[test]
    fn accelerated_energy_is_monotone_under_restart() {
        let g = grid(128);
        let problem = bump_problem(&g, 0.4);
        let opts = SolveOptions {
            method: Method::AcceleratedProjectedGradient,
            max_iter: 4000,
            tol: 1e-12,
            check_every: 1,
            ..Default::default()
        };
        let sol = obstacle_solve(&problem, &opts).unwrap();
        for w in sol.log.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-12 * w[0].energy.abs().max(1.0));
        }
    }

    #[test]
    fn positive_homogeneity() {
        let g = grid(64);
        let (window, collar) = default_masks(&g);
        let psi = RealField::from_scalar_fn(&g, |x| (0.5 - x[0] * x[0]).max(-0.5));
        let mut rhs = RealField::zeros(&g, 1);
        for (node, r) in rhs.component_mut(0).iter_mut().enumerate() {
            let x = g.coord(node)[0];
            *r = 0.1 * (-x * x).exp();
        }
        let p1 = ObstacleProblem::new(psi.clone(), rhs.clone(), window.clone(), collar.clone(), 1.0)
            .unwrap();
        let mut psi2 = psi.clone();
        for v in psi2.component_mut(0) {
            *v *= 2.0;
        }
        let mut rhs2 = rhs.clone();
        for v in rhs2.component_mut(0) {
            *v *= 2.0;
        }
        let p2 = ObstacleProblem::new(psi2, rhs2, window, collar, 1.0).unwrap();
        let opts = SolveOptions {
            tol: 1e-11,
            ..Default::default()
        };
        let s1 = obstacle_solve(&p1, &opts).unwrap();
        let s2 = obstacle_solve(&p2, &opts).unwrap();
        for (a, b) in s1.v.component(0).iter().zip(s2.v.component(0)) {
            assert!((2.0 * a - b).abs() <= 1e-8, "homogeneity off: {a} vs {b}");
        }
    }

    #[test]
    fn symmetric_obstacle_gives_symmetric_solution() {
        let g = grid(64);
        let problem = bump_problem(&g, 0.5);
        let sol = obstacle_solve(&problem, &SolveOptions::default()).unwrap();
        let n = g.points_per_dim();
        for i in 0..n {
            let mirrored = (n - i) % n;
            assert!(
                (sol.v.component(0)[i] - sol.v.component(0)[mirrored]).abs() <= 1e-10,
                "symmetry broken at node {i}"
            );
        }
    }

    #[test]
    fn residual_detects_constraint_violation() {
        let g = grid(32);
        let problem = bump_problem(&g, 0.5);
        // v = 0: at the bump top psi = 0.5 > 0 so v − ψ = −0.5 there and
        // the residual is at least 0.5.
        let v = RealField::zeros(&g, 1);
        let res = complementarity_residual(&problem, &v);
        assert!(res >= 0.5 - 1e-12);
    }

    #[test]
    fn free_boundary_interpolates_mask_edges() {
        let g = grid(64);
        let problem = bump_problem(&g, 0.5);
        let sol = obstacle_solve(&problem, &SolveOptions::default()).unwrap();
        // A symmetric bump yields an even number of crossings, at least 2.
        assert!(sol.free_boundary.len() >= 2);
        for p in &sol.free_boundary {
            assert!(p.axis == 0);
            // Crossings sit near the contact zone |x| <~ sqrt(0.5).
            assert!(p.position[0].abs() < 1.5);
        }
    }
}
