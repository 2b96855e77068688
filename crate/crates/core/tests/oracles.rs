//! Independent oracles: a Blasius RK4 integrator written only for these tests,
//! closed-form quadratures and observed convergence orders.

use strato_shear::crocco::{
    graded_grid, reconstruct_f, solve_fd_newton, solve_shooting, solve_shooting_on, CroccoProblem,
};
use strato_shear::transform::{ell_coordinate, momentum_identity_check, s_coordinate, ScalarField};

/// `f''' + ½ f f'' = 0` by classical RK4 with a fixed step.
fn blasius(fpp0: f64, eta_max: f64, steps: usize) -> Vec<(f64, [f64; 3])> {
    let rhs = |y: [f64; 3]| [y[1], y[2], -0.5 * y[0] * y[2]];
    let h = eta_max / steps as f64;
    let mut y = [0.0, 0.0, fpp0];
    let mut out = vec![(0.0, y)];
    for k in 0..steps {
        let add = |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
        let k1 = rhs(y);
        let k2 = rhs(add(y, k1, 0.5 * h));
        let k3 = rhs(add(y, k2, 0.5 * h));
        let k4 = rhs(add(y, k3, h));
        for i in 0..3 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(((k + 1) as f64 * h, y));
    }
    out
}

fn blasius_wall_value() -> f64 {
    let (mut lo, mut hi) = (0.2, 0.5);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let end = blasius(mid, 12.0, 6000).last().unwrap().1;
        if end[1] < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn blasius_oracle_matches_both_solvers() {
    let fpp0 = blasius_wall_value();
    assert!((fpp0 - 0.332_057).abs() < 1e-6, "oracle {fpp0}");

    // K = 1/2 is exactly the Blasius problem; K = 1 picks up the factor √2
    let half = solve_shooting(&CroccoProblem::incompressible(0.5, 1.0).unwrap(), 1e-11).unwrap();
    assert!(rel(half.tau_wall, fpp0) < 1e-8, "{} vs {fpp0}", half.tau_wall);
    let unit = CroccoProblem::incompressible(1.0, 1.0).unwrap();
    let shoot = solve_shooting(&unit, 1e-11).unwrap();
    assert!(rel(shoot.tau_wall, 2f64.sqrt() * fpp0) < 1e-8);
    assert!((shoot.tau_wall - 0.469_60).abs() < 1e-4);
    let fd = solve_fd_newton(&unit, 4001, 1e-8).unwrap();
    assert!((fd.tau_wall - 0.469_60).abs() < 1e-4);
}

#[test]
fn reconstructed_profile_matches_blasius() {
    let fpp0 = blasius_wall_value();
    let traj = blasius(fpp0, 10.0, 20_000);
    let prob = CroccoProblem::incompressible(0.5, 1.0).unwrap();
    let sol = solve_shooting_on(&prob, 1e-11, &graded_grid(1.0, 4001)).unwrap();
    let prof = reconstruct_f(&sol, &prob).unwrap();
    for &target in &[0.2, 0.5, 0.8, 0.95] {
        let k = prof.u.partition_point(|&u| u < target);
        let (u, z, f) = (prof.u[k], prof.z[k], prof.f[k]);
        // Blasius state at the same speed
        let m = traj.partition_point(|(_, y)| y[1] < u);
        let ((e0, y0), (e1, y1)) = (traj[m - 1], traj[m]);
        let t = (u - y0[1]) / (y1[1] - y0[1]);
        let eta = e0 + t * (e1 - e0);
        let f_b = y0[0] + t * (y1[0] - y0[0]);
        assert!((z - eta).abs() < 1e-4, "z at u = {u}: {z} vs {eta}");
        assert!((f - f_b).abs() < 1e-4, "f at u = {u}: {f} vs {f_b}");
    }
}

#[test]
fn reconstructed_curvature_is_second_order() {
    let prob = CroccoProblem::new(1.0, 1.5, 1.0).unwrap();
    let mut errs = Vec::new();
    for n in [401, 801, 1601] {
        let sol = solve_shooting_on(&prob, 1e-11, &graded_grid(1.0, n)).unwrap();
        let p = reconstruct_f(&sol, &prob).unwrap();
        // f'' from three-point differences of f on the nonuniform z nodes, away from the edge
        let mut worst: f64 = 0.0;
        for i in 1..p.z.len() - 1 {
            if p.u[i] > 0.9 {
                break;
            }
            let (hm, hp) = (p.z[i] - p.z[i - 1], p.z[i + 1] - p.z[i]);
            let d2 = 2.0 * ((p.f[i + 1] - p.f[i]) / hp - (p.f[i] - p.f[i - 1]) / hm) / (hm + hp);
            worst = worst.max((d2 - p.f_zz[i]).abs());
        }
        errs.push(worst);
    }
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    assert!(ratios.iter().all(|r| (3.6..=4.4).contains(r)), "{errs:?} {ratios:?}");
}

#[test]
fn difference_method_converges_at_second_order() {
    for prob in [
        CroccoProblem::incompressible(1.0, 1.0).unwrap(),
        CroccoProblem::new(2.0, 1.0, 1.0).unwrap(),
    ] {
        let w: Vec<f64> = [501, 1001, 2001]
            .iter()
            .map(|&n| solve_fd_newton(&prob, n, 1e-9).unwrap().tau_wall)
            .collect();
        let ratio = (w[0] - w[1]) / (w[1] - w[2]);
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn solvers_agree_on_profile_and_residual() {
    for (k, i0, u) in [(1.0, f64::INFINITY, 1.0), (2.0, 1.0, 1.0), (0.5, 1.0, 0.5)] {
        let prob = CroccoProblem::new(k, i0, u).unwrap();
        let tol = 1e-8;
        let fd = solve_fd_newton(&prob, 4001, tol).unwrap();
        let rhs_max = prob.k() * u * (1.0 - u * u / (2.0 * i0)).powf(-6.0 / 25.0);
        assert!(fd.discrete_residual(&prob) <= 10.0 * tol * rhs_max);
        let shoot = solve_shooting_on(&prob, 1e-11, &fd.u_grid).unwrap();
        assert!(rel(fd.tau_wall, shoot.tau_wall) < 1e-6);
        let interior = fd
            .tau
            .iter()
            .zip(&shoot.tau)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / shoot.tau_wall;
        assert!(interior < 1e-5, "interior gap {interior}");
    }
}

#[test]
fn compressible_wall_shear_approaches_incompressible() {
    let inc = solve_shooting(&CroccoProblem::incompressible(1.0, 1.0).unwrap(), 1e-11)
        .unwrap()
        .tau_wall;
    let gaps: Vec<f64> = [0.75, 1.0, 2.0, 4.0, 16.0, 64.0, 1024.0]
        .iter()
        .map(|&i0| {
            let t = solve_shooting(&CroccoProblem::new(1.0, i0, 1.0).unwrap(), 1e-11)
                .unwrap()
                .tau_wall;
            (t - inc).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps.last().unwrap() / inc < 1e-3);
}

#[test]
fn trapezoid_quadrature_is_second_order() {
    let (length, height) = (2.0, 1.0);
    let exact_ell = length * (1f64.exp() - 1.0);
    let exact_s = 2.0 * ((0.5f64).exp() - 1.0);
    let mut e_ell = Vec::new();
    let mut e_s = Vec::new();
    for n in [17, 33, 65, 129] {
        let p = ScalarField::from_fn(n, n, length, height, |x, _| (x / length).exp()).unwrap();
        let rho = ScalarField::from_fn(n, n, length, height, |_, y| (0.5 * y).exp()).unwrap();
        e_ell.push((ell_coordinate(&p, length, 0.5).unwrap() - exact_ell).abs());
        e_s.push((s_coordinate(&rho, 1.0, height).unwrap() - exact_s).abs());
    }
    for e in [&e_ell, &e_s] {
        for w in e.windows(2) {
            let r = w[0] / w[1];
            assert!((3.6..=4.4).contains(&r), "ratios {e:?}");
        }
    }
}

#[test]
fn momentum_identity_is_second_order() {
    // a cubic would make the s-differences exact, leaving only rounding error
    let f = |z: f64| {
        [
            0.3 * z + 0.2 * z.sin(),
            0.3 + 0.2 * z.cos(),
            -0.2 * z.sin(),
            -0.2 * z.cos(),
        ]
    };
    let z: Vec<f64> = (1..12).map(|k| 0.15 * k as f64).collect();
    for i0 in [f64::INFINITY, 2.0] {
        let r: Vec<_> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&h| momentum_identity_check(&f, 1.7, i0, &z, h).unwrap())
            .collect();
        for w in r.windows(2) {
            let conv = w[0].convective / w[1].convective;
            let visc = w[0].viscous / w[1].viscous;
            assert!((3.6..=4.4).contains(&conv), "convective {conv}");
            assert!((3.6..=4.4).contains(&visc), "viscous {visc}");
        }
    }
}
