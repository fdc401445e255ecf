//! Temporary diagnostics (removed before shipping).

use signorini::analysis::{p32_trace_correlation, vanishing_order, P32Profile};
use signorini::grid::{GridSpec, RealField};
use signorini::obstacle::SolveOptions;
use signorini::oracle::{direct_signorini_solve_pinned, DirectOptions, StripMesh};
use signorini::params::derive_constants;
use signorini::pipeline::{signorini_solve, CutoffSpec, SignoriniProblem};

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn bump(x: f64) -> f64 {
    (0.3 - x * x).max(-0.5)
}

#[test]
fn debug_oracle_compare_pinned() {
    let p = derive_constants(1.0, 1.0).unwrap();
    let mut prev = f64::NAN;
    for n in [64usize, 128] {
        let grid = GridSpec::new(1, TAU, n, vec![0.0]).unwrap();
        let phi = RealField::from_scalar_fn(&grid, |x| bump(x[0]));
        let problem = SignoriniProblem {
            params: p,
            grid: grid.clone(),
            force: None,
            phi,
            cutoff: CutoffSpec {
                center: [0.0, 0.0],
                inner: 1.0,
                outer: 0.8 * std::f64::consts::PI,
            },
        };
        let opts = SolveOptions {
            tol: 1e-10,
            ..Default::default()
        };
        let sol = signorini_solve(&problem, &opts).unwrap();
        assert!(sol.scalar_solution.converged);

        let mesh = StripMesh::new(n, n, TAU, TAU).unwrap();
        let phi_o: Vec<f64> = (0..n).map(|i| bump(mesh.x(i))).collect();
        let oracle = direct_signorini_solve_pinned(
            &p,
            &mesh,
            None,
            &phi_o,
            Some(&sol.collar),
            &DirectOptions {
                tol: 1e-11,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(oracle.converged, "oracle residual {}", oracle.residual);

        let sup = oracle
            .boundary_trace()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let mut max_diff = 0.0f64;
        for i in 0..n {
            max_diff = max_diff.max((sol.trace_un.component(0)[i] - oracle.boundary_trace()[i]).abs());
        }
        let ends = |mask: &[bool]| -> (f64, f64) {
            let mut lo = f64::INFINITY;
            let mut hi = -f64::INFINITY;
            for (i, c) in mask.iter().enumerate() {
                if *c {
                    let x = grid.coord(i)[0];
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
            }
            (lo, hi)
        };
        let (plo, phi_c) = ends(&sol.contact_set);
        let (olo, ohi) = ends(&oracle.contact);
        println!(
            "N={n}: rel_diff={:.4} ratio_prev={:.2} pipeline_contact=[{plo:.3},{phi_c:.3}] oracle_contact=[{olo:.3},{ohi:.3}] h={:.4} oracle_iters={}",
            max_diff / sup,
            prev / (max_diff / sup),
            grid.spacing(),
            oracle.iterations,
        );
        prev = max_diff / sup;
    }
}

#[test]
fn debug_regularity_slack() {
    let p = derive_constants(1.0, 1.0).unwrap();
    for (n, tolr) in [(512usize, 1e-11), (1024, 1e-11)] {
        let grid = GridSpec::new(1, TAU, n, vec![0.0]).unwrap();
        let phi = RealField::from_scalar_fn(&grid, |x| bump(x[0]));
        let problem = SignoriniProblem {
            params: p,
            grid: grid.clone(),
            force: None,
            phi: phi.clone(),
            cutoff: CutoffSpec {
                center: [0.0, 0.0],
                inner: 1.0,
                outer: 0.8 * std::f64::consts::PI,
            },
        };
        let opts = SolveOptions {
            tol: tolr,
            max_iter: 600_000,
            ..Default::default()
        };
        let sol = signorini_solve(&problem, &opts).unwrap();
        assert!(sol.scalar_solution.converged, "res {}", sol.scalar_solution.residual);
        // Slack field trace − φ.
        let mut slack = sol.trace_un.clone();
        for (node, v) in slack.component_mut(0).iter_mut().enumerate() {
            *v -= phi.component(0)[node];
        }
        let h = grid.spacing();
        println!(
            "N={n}: fb: {:?}",
            sol.free_boundary.iter().map(|f| f.position[0]).collect::<Vec<_>>()
        );
        let fb = sol.free_boundary.last().unwrap();
        let profile = P32Profile::normalized(p, [1.0, 0.0]).unwrap();
        let dir = if fb.position[0] > 0.0 { -1.0 } else { 1.0 };
        for rmin_h in [4.0, 6.0, 8.0, 12.0] {
            let r0: f64 = rmin_h * h;
            let radii = [r0, 2.0 * r0, 4.0 * r0, 8.0 * r0];
            if let Ok(fit) = vanishing_order(&slack, fb.position, &radii, true) {
                let corr = p32_trace_correlation(
                    &slack,
                    fb.position,
                    [dir, 0.0],
                    radii[0],
                    radii[3],
                    &profile,
                )
                .unwrap();
                println!(
                    "  rmin={rmin_h}h ({:.3}->{:.3}): slope={:.4} conf={:.4} corr={:.4}",
                    radii[0], radii[3], fit.slope, fit.confidence, corr
                );
            }
            // Also without affine removal.
            if let Ok(fit) = vanishing_order(&slack, fb.position, &radii, false) {
                let corr = p32_trace_correlation(
                    &slack,
                    fb.position,
                    [dir, 0.0],
                    radii[0],
                    radii[3],
                    &profile,
                )
                .unwrap();
                println!(
                    "    (no affine) slope={:.4} conf={:.4} corr={:.4}",
                    fit.slope, fit.confidence, corr
                );
            }
        }
    }
}

#[test]
fn debug_strip_height() {
    let p = derive_constants(1.0, 1.0).unwrap();
    let n = 64usize;
    let grid = GridSpec::new(1, TAU, n, vec![0.0]).unwrap();
    let phi = RealField::from_scalar_fn(&grid, |x| bump(x[0]));
    let problem = SignoriniProblem {
        params: p,
        grid: grid.clone(),
        force: None,
        phi,
        cutoff: CutoffSpec {
            center: [0.0, 0.0],
            inner: 1.0,
            outer: 0.8 * std::f64::consts::PI,
        },
    };
    let opts = SolveOptions { tol: 1e-10, ..Default::default() };
    let sol = signorini_solve(&problem, &opts).unwrap();
    for mult in [1usize, 2, 4, 8] {
        let mesh = StripMesh::new(n, n * mult, TAU, TAU * mult as f64).unwrap();
        let phi_o: Vec<f64> = (0..n).map(|i| bump(mesh.x(i))).collect();
        let oracle = direct_signorini_solve_pinned(
            &p, &mesh, None, &phi_o, Some(&sol.collar),
            &DirectOptions { tol: 1e-11, max_iter: 2_000_000, ..Default::default() },
        ).unwrap();
        let sup = oracle.boundary_trace().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut max_diff = 0.0f64;
        for i in 0..n {
            max_diff = max_diff.max((sol.trace_un.component(0)[i] - oracle.boundary_trace()[i]).abs());
        }
        println!(
            "T={}pi: rel_diff={:.4} sup={:.4} iters={} converged={}",
            2 * mult, max_diff / sup, sup, oracle.iterations, oracle.converged
        );
    }
}

#[test]
fn debug_free_lid() {
    use signorini::oracle::LidCondition;
    let p = derive_constants(1.0, 1.0).unwrap();
    let mut prev = f64::NAN;
    for n in [64usize, 128] {
        let grid = GridSpec::new(1, TAU, n, vec![0.0]).unwrap();
        let phi = RealField::from_scalar_fn(&grid, |x| bump(x[0]));
        let problem = SignoriniProblem {
            params: p,
            grid: grid.clone(),
            force: None,
            phi,
            cutoff: CutoffSpec {
                center: [0.0, 0.0],
                inner: 1.0,
                outer: 0.8 * std::f64::consts::PI,
            },
        };
        let opts = SolveOptions { tol: 1e-10, ..Default::default() };
        let sol = signorini_solve(&problem, &opts).unwrap();
        let mesh = StripMesh::new(n, n, TAU, TAU).unwrap();
        let phi_o: Vec<f64> = (0..n).map(|i| bump(mesh.x(i))).collect();
        let oracle = direct_signorini_solve_pinned(
            &p, &mesh, None, &phi_o, Some(&sol.collar),
            &DirectOptions { tol: 1e-11, lid: LidCondition::TractionFree, max_iter: 1_000_000, ..Default::default() },
        ).unwrap();
        assert!(oracle.converged);
        let sup = oracle.boundary_trace().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut max_diff = 0.0f64;
        for i in 0..n {
            max_diff = max_diff.max((sol.trace_un.component(0)[i] - oracle.boundary_trace()[i]).abs());
        }
        let ends = |mask: &[bool]| -> (f64, f64) {
            let mut lo = f64::INFINITY;
            let mut hi = -f64::INFINITY;
            for (i, c) in mask.iter().enumerate() {
                if *c {
                    let x = grid.coord(i)[0];
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
            }
            (lo, hi)
        };
        let (plo, pc) = ends(&sol.contact_set);
        let (olo, oc) = ends(&oracle.contact);
        println!(
            "freelid N={n}: rel={:.4} ratio={:.2} p_contact=[{plo:.3},{pc:.3}] o_contact=[{olo:.3},{oc:.3}] iters={}",
            max_diff / sup, prev / (max_diff / sup), oracle.iterations
        );
        prev = max_diff / sup;
    }
}

#[test]
fn debug_localization() {
    use signorini::obstacle::{obstacle_solve, ObstacleProblem};
    use signorini::pipeline::localization_check;
    let p = derive_constants(1.0, 1.0).unwrap();
    for n in [128usize, 256] {
        let grid = GridSpec::new(1, TAU, n, vec![0.0]).unwrap();
        let (window, collar) = ObstacleProblem::masks_from_radius(&grid, [0.0, 0.0], 0.8 * std::f64::consts::PI);
        let psi = RealField::from_scalar_fn(&grid, |x| (0.3 - x[0] * x[0]).max(-0.5));
        let problem = ObstacleProblem::new(psi, RealField::zeros(&grid, 1), window, collar, p.dtn_constant).unwrap();
        let scalar = obstacle_solve(&problem, &SolveOptions { tol: 1e-10, ..Default::default() }).unwrap();
        assert!(scalar.converged);
        for levels in [n / 2 + 1, n + 1, 2 * n + 1] {
            let cutoff = CutoffSpec { center: [0.0, 0.0], inner: 1.2, outer: 2.2 };
            let report = localization_check(&p, &problem, &scalar, &cutoff, TAU, levels).unwrap();
            println!(
                "N={n} levels={levels}: residual={:.3e} scale={:.3e} rel={:.3e} mismatches={}/{} htilde_max={:.3e}",
                report.residual, report.scale, report.residual / report.scale,
                report.contact_mismatches, report.core_nodes, report.htilde_max
            );
        }
    }
}
