mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use romilqr::burgers::{assemble_burgers, BurgersConfig};
use romilqr::dynamics::*;
use romilqr::linalg::kron;

fn burgers(n: usize) -> QuadraticSystem<f64> {
    assemble_burgers(&BurgersConfig { n, ..Default::default() }).unwrap()
}

fn random_state(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> DVector<f64> {
    normal_vec(rng, n) * 0.3
}

#[test]
fn implicit_jacobians_match_finite_differences() {
    let sys = DiscretizedSystem::new(burgers(21), 0.01).unwrap().with_tolerance(1e-14, 100);
    let fd = FiniteDifference::new(sys.clone());
    let mut rng = rng(21);
    for _ in 0..20 {
        let x = random_state(&mut rng, 21);
        let u = normal_vec(&mut rng, 5) * 0.1;
        let (a, b) = sys.linearize(&x, &u).unwrap();
        let (a_fd, b_fd) = fd.linearize(&x, &u).unwrap();
        assert!(rel_err(&a, &a_fd) < 1e-5, "A: {}", rel_err(&a, &a_fd));
        assert!(rel_err(&b, &b_fd) < 1e-5, "B: {}", rel_err(&b, &b_fd));
    }
}

#[test]
fn continuous_jacobian_matches_finite_differences() {
    let sys = burgers(15);
    let mut rng = rng(22);
    let x = random_state(&mut rng, 15);
    let u = DVector::zeros(5);
    let j = sys.state_jacobian(&x).unwrap();
    let h = 1e-6 * (1.0 + x.norm());
    let mut fd = DMatrix::zeros(15, 15);
    for i in 0..15 {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        fd.set_column(i, &((sys.rhs(&xp, &u).unwrap() - sys.rhs(&xm, &u).unwrap()) / (2.0 * h)));
    }
    assert!(rel_err(&j, &fd) < 1e-8);
}

#[test]
fn step_jacobian_is_first_order_in_dt() {
    let base = burgers(21);
    let mut rng = rng(23);
    let x = random_state(&mut rng, 21);
    let u = DVector::zeros(5);
    let defect = |dt: f64| {
        let sys = DiscretizedSystem::new(base.clone(), dt).unwrap().with_tolerance(1e-14, 100);
        let next = sys.step(&x, &u).unwrap();
        let (a, _) = sys.jacobians_at_next(&next).unwrap();
        let lin = base.state_jacobian(&next).unwrap();
        (a - DMatrix::identity(21, 21) - lin * dt).norm()
    };
    let (d1, d2) = (defect(1e-3), defect(5e-4));
    let ratio = d1 / d2;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn linear_part_only_gives_resolvent() {
    let mut rng = rng(24);
    let a = stable(&mut rng, 4, 0.5);
    let sys = QuadraticSystem::new(
        a.clone(),
        QuadTensor::zeros(4, 4),
        normal(&mut rng, 4, 2),
        DMatrix::identity(4, 4),
        DVector::zeros(4),
    )
    .unwrap();
    let disc = DiscretizedSystem::new(sys, 0.1).unwrap();
    let (ak, _) = disc.linearize(&normal_vec(&mut rng, 4), &normal_vec(&mut rng, 2)).unwrap();
    let expected = (DMatrix::identity(4, 4) - a * 0.1).try_inverse().unwrap();
    assert!(rel_err(&ak, &expected) < 1e-13);
}

#[test]
fn quad_apply_matches_dense_kronecker() {
    let mut rng = rng(25);
    let n = 6;
    let dense = DMatrix::from_fn(n, n * n, |_, _| {
        use rand::Rng;
        if rng.random::<f64>() < 0.3 { rng.random::<f64>() - 0.5 } else { 0.0 }
    });
    let g = QuadTensor::from_dense(&dense, n).unwrap();
    for _ in 0..10 {
        let x = normal_vec(&mut rng, n);
        let xm = DMatrix::from_column_slice(n, 1, x.as_slice());
        let expected = &dense * kron(&xm, &xm);
        let got = quad_apply(&g, &x).unwrap();
        assert!((got - expected.column(0)).amax() < 1e-13);
        let jac = quad_jacobian(&g, &x).unwrap();
        let eye = DMatrix::identity(n, n);
        let expected_jac = &dense * (kron(&xm, &eye) + kron(&eye, &xm));
        assert!((jac - expected_jac).amax() < 1e-13);
    }
}

#[test]
fn quadratic_homogeneity_and_symmetrization() {
    let sys = burgers(17);
    let g_sym = sys.g.symmetrized();
    let mut rng = rng(26);
    for _ in 0..10 {
        let x = random_state(&mut rng, 17);
        let alpha = 1.7;
        let gx = quad_apply(&sys.g, &x).unwrap();
        let scaled = quad_apply(&sys.g, &(&x * alpha)).unwrap();
        assert!((scaled - &gx * (alpha * alpha)).amax() < 1e-12 * (1.0 + gx.amax()));
        assert!((quad_apply(&g_sym, &x).unwrap() - &gx).amax() < 1e-12 * (1.0 + gx.amax()));
    }
}

#[test]
fn simulate_small_examples() {
    let id = LinearMap::new(DMatrix::identity(1, 1), DMatrix::zeros(1, 1)).unwrap();
    let x0 = DVector::from_element(1, 3.0);
    let traj = simulate(&id, &x0, &[DVector::zeros(1)]).unwrap();
    assert_eq!(traj, vec![x0.clone(), x0]);

    let doubling = LinearMap::new(DMatrix::from_element(1, 1, 2.0), DMatrix::identity(1, 1)).unwrap();
    let traj = simulate(&doubling, &DVector::from_element(1, 1.0), &[DVector::zeros(1), DVector::zeros(1)]).unwrap();
    let values: Vec<f64> = traj.iter().map(|x| x[0]).collect();
    assert_eq!(values, vec![1.0, 2.0, 4.0]);
}

#[test]
fn simulate_reports_failing_step() {
    let sys = DiscretizedSystem::new(burgers(11), 0.01).unwrap().with_tolerance(1e-30, 0);
    let x0 = sys.base.x0.clone();
    let r = simulate(&sys, &x0, &vec![DVector::zeros(5); 3]);
    assert!(matches!(r, Err(romilqr::Error::StepFailed { k: 0, .. })));
}

#[test]
fn burgers_open_loop_decays() {
    let sys = DiscretizedSystem::new(burgers(101), 0.01).unwrap();
    let x0 = sys.base.x0.clone();
    let traj = simulate(&sys, &x0, &vec![DVector::zeros(5); 500]).unwrap();
    let peak = traj.iter().map(|x| x.amax()).fold(0.0, f64::max);
    assert!(peak <= x0.amax() + 1e-12);
    assert!(traj[500].norm() < x0.norm());
}

#[test]
fn backward_euler_is_first_order() {
    let base = burgers(101);
    let x0 = base.x0.clone();
    let horizon = 1.0;
    let end = |dt: f64| {
        let steps = (horizon / dt).round() as usize;
        let sys = DiscretizedSystem::new(base.clone(), dt).unwrap().with_tolerance(1e-13, 100);
        simulate(&sys, &x0, &vec![DVector::zeros(5); steps]).unwrap().pop().unwrap()
    };
    let (x1, x2, x3) = (end(0.02), end(0.01), end(0.005));
    // successive differences shrink like the error itself
    let ratio = (&x1 - &x2).norm() / (&x2 - &x3).norm();
    assert!((1.7..=2.3).contains(&ratio), "ratio {ratio}");
}
