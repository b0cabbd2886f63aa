mod common;

use std::f64::consts::PI;

use common::{angular_velocity, blob, blob_layer, vortex, CENTER};
use transport_core::analysis::{lp_norm, lp_norm_over};
use transport_core::characteristics::solve_classical;
use transport_core::fields::{
    beta_truncation, make_test_function, Beta, BumpProfile, Density, Gaussian, Kernel, Layer, ScalarField, SpatialBump,
    TestFunction, TimeProfile, UniformFlow, VelocityField,
};
use transport_core::geometry::{Domain, Grid, Point, TimePartition, Vec2};
use transport_core::weakform::{
    commutator_identity, commutator_over, commutator_remainder, mollify_density, mollify_layer_over,
    remainder_decay_study, renormalized_residual, weak_residual,
};
use transport_core::Error;

fn unit() -> Domain {
    Domain::unit_square()
}

fn quadratic(c: Point, r: f64) -> TestFunction {
    make_test_function(&unit(), c, r, TimeProfile::Quadratic { t_final: 1.0 }, 1.0).unwrap()
}

fn classical(n: usize, nt: usize) -> (ScalarField, Layer) {
    let grid = Grid::unit_square(n).unwrap();
    let times = TimePartition::new(1.0, nt).unwrap();
    let rho0 = blob_layer(n);
    (solve_classical(&rho0, &vortex(), &grid, &times).unwrap(), rho0)
}

#[test]
fn resting_density_has_no_residual() {
    let rho0 = blob_layer(32);
    let rho = ScalarField::frozen(TimePartition::new(1.0, 10).unwrap(), rho0.clone());
    let u = VelocityField::zero(unit());
    let r = weak_residual(&rho, &rho0, &u, &quadratic(Point::new(0.55, 0.5), 0.25)).unwrap();
    assert!(r.residual < 1e-15, "{r:?}");
    assert_eq!(r.advective_term, 0.0);
    assert!((r.time_term + r.initial_term).abs() < 1e-15);
}

#[test]
fn classical_solution_satisfies_the_weak_form() {
    let (rho, rho0) = classical(64, 100);
    for phi in [quadratic(Point::new(0.6, 0.62), 0.2), quadratic(Point::new(0.45, 0.6), 0.2)] {
        let r = weak_residual(&rho, &rho0, &vortex(), &phi).unwrap();
        assert!(r.residual < 1e-3, "{r:?}");
        assert!((r.signed().abs() - r.residual).abs() == 0.0);
    }
}

#[test]
fn inflated_density_is_rejected() {
    // wide blob so the initial-term mismatch is visible; pilot value 1.6e-2
    let grid = Grid::unit_square(64).unwrap();
    let times = TimePartition::new(1.0, 100).unwrap();
    let rho0 = Layer::sample(grid, &Gaussian::new(Point::new(0.6, 0.5), 0.15, 1.0).unwrap());
    let rho = solve_classical(&rho0, &vortex(), &grid, &times).unwrap();
    let phi = quadratic(CENTER, 0.4);
    let ok = weak_residual(&rho, &rho0, &vortex(), &phi).unwrap();
    let bad = weak_residual(&rho.map(|v| 1.5 * v), &rho0, &vortex(), &phi).unwrap();
    assert!(ok.residual < 1e-4);
    assert!(bad.residual > 1e-2, "{}", bad.residual);
}

#[test]
fn residual_is_termwise_linear() {
    let (rho, rho0) = classical(32, 20);
    let other = rho.map(|v| (3.0 * v).sin());
    let other0 = other.initial().clone();
    let sum_layers: Vec<Layer> = rho
        .layers()
        .iter()
        .zip(other.layers())
        .map(|(a, b)| Layer::new(*a.grid(), a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect()).unwrap())
        .collect();
    let sum = ScalarField::new(*rho.times(), sum_layers).unwrap();
    let sum0 = sum.initial().clone();
    let phi = quadratic(Point::new(0.5, 0.55), 0.3);
    let a = weak_residual(&rho, &rho0, &vortex(), &phi).unwrap().terms();
    let b = weak_residual(&other, &other0, &vortex(), &phi).unwrap().terms();
    let c = weak_residual(&sum, &sum0, &vortex(), &phi).unwrap().terms();
    for k in 0..3 {
        assert!((c[k] - a[k] - b[k]).abs() <= 1e-14 * (a[k].abs() + b[k].abs() + 1e-300));
    }
}

#[test]
fn wide_clip_renormalisation_is_the_identity() {
    let (rho, rho0) = classical(32, 20);
    let phi = quadratic(Point::new(0.6, 0.5), 0.2);
    let w = weak_residual(&rho, &rho0, &vortex(), &phi).unwrap();
    let r = renormalized_residual(&rho, &rho0, &vortex(), &beta_truncation(1e6).unwrap(), &phi).unwrap();
    assert_eq!(w, r);
}

#[test]
fn constant_renormalisation_has_no_residual() {
    // the time trapezoid of a smoothstep derivative is off by O(dt²)
    let (rho, rho0) = classical(32, 400);
    for prof in [TimeProfile::Quadratic { t_final: 1.0 }, TimeProfile::Smoothstep { t_final: 1.0 }] {
        let phi = make_test_function(&unit(), Point::new(0.45, 0.55), 0.3, prof, 1.0).unwrap();
        let r = renormalized_residual(&rho, &rho0, &vortex(), &Beta::Constant(-2.0), &phi).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
    }
}

#[test]
fn test_function_support_is_checked() {
    let (rho, rho0) = classical(16, 4);
    let touching = TestFunction {
        spatial: SpatialBump { center: Point::new(0.1, 0.5), radius: 0.1, amplitude: 1.0 },
        temporal: TimeProfile::Quadratic { t_final: 1.0 },
    };
    assert!(matches!(
        weak_residual(&rho, &rho0, &vortex(), &touching),
        Err(Error::SupportViolation { .. })
    ));
    let late = TestFunction {
        spatial: SpatialBump { center: CENTER, radius: 0.1, amplitude: 1.0 },
        temporal: TimeProfile::Quadratic { t_final: 2.0 },
    };
    assert!(matches!(weak_residual(&rho, &rho0, &vortex(), &late), Err(Error::SupportViolation { .. })));
}

/// Independent mollifier: normalising constant by a polar midpoint rule.
struct Bump {
    z: f64,
}

impl Bump {
    fn new() -> Self {
        let n = 200_000;
        let h = 1.0 / n as f64;
        let mass: f64 = (0..n)
            .map(|k| {
                let r = (k as f64 + 0.5) * h;
                2.0 * PI * r * (-1.0 / (1.0 - r * r)).exp() * h
            })
            .sum();
        Bump { z: 1.0 / mass }
    }

    fn eta(&self, z: Vec2, eps: f64) -> f64 {
        let s = z.norm_squared() / (eps * eps);
        if s >= 1.0 {
            0.0
        } else {
            self.z * (-1.0 / (1.0 - s)).exp() / (eps * eps)
        }
    }

    fn grad_eta(&self, z: Vec2, eps: f64) -> Vec2 {
        let s = z.norm_squared() / (eps * eps);
        if s >= 1.0 {
            return Vec2::ZERO;
        }
        let q = 1.0 - s;
        z * (self.z * (-1.0 / q).exp() * (-2.0 / (q * q)) / eps.powi(4))
    }
}

/// Midpoint rule over the square `x ± eps` with `m` cells per side.
fn ball_quadrature(x: Point, eps: f64, m: usize, f: impl Fn(Point) -> f64) -> f64 {
    let h = 2.0 * eps / m as f64;
    let mut acc = 0.0;
    for j in 0..m {
        for i in 0..m {
            let y = Point::new(x.x - eps + (i as f64 + 0.5) * h, x.y - eps + (j as f64 + 0.5) * h);
            acc += f(y);
        }
    }
    acc * h * h
}

fn vortex_velocity(y: Point) -> Vec2 {
    let d = y - CENTER;
    let w = angular_velocity(d.norm());
    Vec2::new(-w * d.y, w * d.x)
}

fn probes(grid: &Grid, count: usize) -> Vec<(usize, usize)> {
    // deterministic spread over nodes of [0.3, 0.8]²
    let mut out = Vec::new();
    let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
    while out.len() < count {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let i = (0.3 * grid.nx() as f64) as usize + (s % (grid.nx() as u64 / 2)) as usize;
        let j = (0.3 * grid.ny() as f64) as usize + ((s >> 20) % (grid.ny() as u64 / 2)) as usize;
        out.push((i, j));
    }
    out
}

#[test]
fn mollified_gaussian_matches_brute_force_convolution() {
    // ε/h ≈ 25: the grid sum of a C∞ bump converges super-algebraically,
    // at ε/h ≈ 6 it is still off by a few percent
    let n = 256;
    let grid = Grid::unit_square(n).unwrap();
    let g = blob();
    let layer = Layer::sample(grid, &g);
    let eps = 0.1;
    let kernel = Kernel::new(BumpProfile::standard(), eps).unwrap();
    let region = unit().shrink(eps).unwrap();
    let m = mollify_layer_over(&layer, &kernel, &region).unwrap();
    let oracle = Bump::new();
    let cells = (4.0 * 2.0 * eps * n as f64).ceil() as usize;
    let pts = probes(&grid, 20);
    let want: Vec<f64> = pts
        .iter()
        .map(|&(i, j)| {
            let x = grid.node(i, j);
            ball_quadrature(x, eps, cells, |y| g.value(y) * oracle.eta(x - y, eps))
        })
        .collect();
    let scale = want.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for (&(i, j), w) in pts.iter().zip(&want) {
        let got = m.at(i, j).unwrap();
        assert!((got - w).abs() <= 1e-4 * scale, "({i},{j}): {got} vs {w}");
    }
}

#[test]
fn commutator_matches_brute_force_double_quadrature() {
    let n = 256;
    let grid = Grid::unit_square(n).unwrap();
    let g = blob();
    let layer = Layer::sample(grid, &g);
    let eps = 0.1;
    let kernel = Kernel::new(BumpProfile::standard(), eps).unwrap();
    let region = unit().shrink(eps).unwrap();
    let r = commutator_over(&layer, &vortex(), 0.0, &kernel, &region).unwrap();
    let oracle = Bump::new();
    let cells = (4.0 * 2.0 * eps * n as f64).ceil() as usize;
    let pts = probes(&grid, 20);
    let want: Vec<f64> = pts
        .iter()
        .map(|&(i, j)| {
            let x = grid.node(i, j);
            let ux = vortex_velocity(x);
            ball_quadrature(x, eps, cells, |y| {
                g.value(y) * (vortex_velocity(y) - ux).dot(oracle.grad_eta(x - y, eps))
            })
        })
        .collect();
    let scale = want.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    assert!(scale > 0.0);
    for (&(i, j), w) in pts.iter().zip(&want) {
        let got = r.at(i, j).unwrap();
        assert!((got - w).abs() <= 1e-4 * scale, "({i},{j}): {got} vs {w}");
    }
}

#[test]
fn constants_and_linear_functions_survive_mollification() {
    let grid = Grid::unit_square(64).unwrap();
    let times = TimePartition::new(1.0, 2).unwrap();
    let kernel = Kernel::new(BumpProfile::standard(), 0.1).unwrap();
    let c = ScalarField::frozen(times, Layer::constant(grid, 3.0));
    let m = mollify_density(&c, &kernel, 1).unwrap();
    let lin = ScalarField::frozen(times, Layer::sample(grid, &|p: Point| p.x));
    let ml = mollify_density(&lin, &kernel, 0).unwrap();
    let win = *m.window();
    let region = *m.region();
    for (i, j) in grid.node_window(&region).unwrap().iter() {
        assert!(win.i0 <= i && i <= win.i1);
        assert!((m.at(i, j).unwrap() - 3.0).abs() < 1e-6);
        assert!((ml.at(i, j).unwrap() - grid.x(i)).abs() < 1e-6);
    }
}

#[test]
fn oversized_scale_is_rejected() {
    let grid = Grid::unit_square(16).unwrap();
    let f = ScalarField::frozen(TimePartition::new(1.0, 1).unwrap(), Layer::constant(grid, 1.0));
    let k = Kernel::new(BumpProfile::standard(), 0.6).unwrap();
    assert!(mollify_density(&f, &k, 0).is_err());
    assert!(commutator_remainder(&f, &vortex(), &k, 0).is_err());
}

#[test]
fn commutator_vanishes_for_trivial_inputs() {
    let grid = Grid::unit_square(48).unwrap();
    let times = TimePartition::new(1.0, 1).unwrap();
    let k = Kernel::new(BumpProfile::standard(), 0.08).unwrap();
    let zero = ScalarField::frozen(times, Layer::constant(grid, 0.0));
    let r = commutator_remainder(&zero, &vortex(), &k, 0).unwrap();
    assert!(r.layer().values().iter().all(|&v| v == 0.0));
    let blobby = ScalarField::frozen(times, blob_layer(48));
    let region = unit().shrink(0.08).unwrap();
    let still = commutator_over(blobby.layer(0), &VelocityField::zero(unit()), 0.0, &k, &region).unwrap();
    assert!(still.layer().values().iter().all(|&v| v == 0.0));
    let drift = commutator_over(blobby.layer(0), &UniformFlow(Vec2::new(0.3, -1.0)), 0.0, &k, &region).unwrap();
    assert!(drift.layer().values().iter().all(|&v| v == 0.0));
}

#[test]
fn mollification_contracts_and_converges() {
    let n = 128;
    let grid = Grid::unit_square(n).unwrap();
    let layer = Layer::sample(grid, &Gaussian::new(CENTER, 0.15, 1.0).unwrap());
    let inner = unit().shrink(0.2).unwrap();
    let mut last = f64::INFINITY;
    for eps in [0.1, 0.05, 0.025] {
        let k = Kernel::new(BumpProfile::standard(), eps).unwrap();
        let region = unit().shrink(eps).unwrap();
        let m = mollify_layer_over(&layer, &k, &region).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let inside = m.lp_norm_over(&region, p).unwrap();
            assert!(inside <= lp_norm(&layer, p).unwrap() + 1e-9, "p = {p}, eps = {eps}");
        }
        let diff = Layer::new(grid, m.layer().values().iter().zip(layer.values()).map(|(a, b)| a - b).collect()).unwrap();
        let err = lp_norm_over(&diff, &inner, 2.0).unwrap();
        assert!(err < last);
        last = err;
    }
    assert!(last < 1e-3, "{last}");
}

#[test]
fn commutator_identity_holds() {
    let (rho, _) = classical(96, 60);
    let k = Kernel::new(BumpProfile::standard(), 0.06).unwrap();
    let phi = quadratic(Point::new(0.6, 0.62), 0.2);
    let id = commutator_identity(&rho, &vortex(), &k, &phi).unwrap();
    assert!(id.discrepancy < 1e-4, "{id:?}");
    // with the field frozen the pairing side is unchanged in form and the
    // identity must still balance against the mollified residual
    let frozen = ScalarField::frozen(*rho.times(), rho.initial().clone());
    let id = commutator_identity(&frozen, &vortex(), &k, &phi).unwrap();
    assert!(id.mollified_residual.residual > 1e-4);
    assert!((id.mollified_residual.signed() - id.remainder_pairing).abs() > 1e-4);
}

#[test]
fn remainder_study_without_flow_is_zero() {
    let grid = Grid::unit_square(48).unwrap();
    let times = TimePartition::new(1.0, 4).unwrap();
    let u = VelocityField::zero(unit());
    let rho = solve_classical(&blob(), &u, &grid, &times).unwrap();
    let inner = unit().shrink(0.15).unwrap();
    let c = remainder_decay_study(&rho, &u, &[0.1, 0.05], 2.0, 2.0, &inner, 1).unwrap();
    assert!(c.points.iter().all(|p| p.1 == 0.0));
    assert_eq!(c.ratio(), None);
    assert_eq!(c.gamma, 1.0);
    assert!(c.hypothesis_satisfied);
    assert_eq!(c.velocity_w1alpha, 0.0);
}

#[test]
fn remainder_study_validates_its_inputs() {
    let (rho, _) = classical(16, 4);
    let u = vortex();
    let inner = unit().shrink(0.15).unwrap();
    assert!(remainder_decay_study(&rho, &u, &[0.05, 0.1], 2.0, 2.0, &inner, 1).is_err());
    assert!(remainder_decay_study(&rho, &u, &[], 2.0, 2.0, &inner, 1).is_err());
    assert!(matches!(
        remainder_decay_study(&rho, &u, &[0.2, 0.1], 2.0, 2.0, &inner, 1),
        Err(Error::SupportViolation { .. })
    ));
    // α below the conjugate exponent still runs, flagged
    let c = remainder_decay_study(&rho, &u, &[0.1], 1.5, 2.0, &inner, 1).unwrap();
    assert!(!c.hypothesis_satisfied);
    assert!((c.gamma - 1.0 / (1.0 / 1.5 + 0.5)).abs() < 1e-15);
}

#[test]
fn remainder_decays_at_least_linearly_on_smooth_data() {
    let (rho, _) = classical(128, 40);
    let inner = unit().shrink(0.15).unwrap();
    let c = remainder_decay_study(&rho, &vortex(), &[0.1, 0.05, 0.025], 2.0, 2.0, &inner, 4).unwrap();
    assert!(c.is_strictly_decreasing(), "{:?}", c.points);
    assert!(c.slope() >= 1.0, "slope {}", c.slope());
    assert!(c.ratio().unwrap() < 0.5);
}
