use nhsoc_core::dynamics::sample;
use nhsoc_core::model::rayleigh_quotient;
use nhsoc_core::{
    band_observables, evolve, project, ControlPoint, Direction, InitialState, Model64, Path64, Protocol, StepControl,
    TwoState64,
};

fn loop_path(direction: Direction, speed: f64) -> Path64 {
    Path64::standard(&Protocol::Loop { h: 1.2, extent: 1.0 }, direction, speed).unwrap()
}

fn hermitian(direction: Direction, speed: f64) -> Path64 {
    Path64::standard(&Protocol::Hermitian { extent: 1.0 }, direction, speed).unwrap()
}

fn final_index(path: &Path64, step: &StepControl<f64>) -> f64 {
    let m = Model64::default();
    evolve(&m, path, &InitialState::Lower, step).unwrap().final_band_index().unwrap()
}

#[test]
fn slow_hermitian_sweep_is_adiabatic() {
    for dir in [Direction::Ccw, Direction::Cw] {
        let b = final_index(&hermitian(dir, (-4f64).exp()), &StepControl::endpoints_only(1e-3));
        assert!((-1.0..=-0.98).contains(&b), "{dir:?}: {b}");
    }
}

#[test]
fn frozen_state_overlap_is_one_half() {
    // Infinitely fast sweep: the state at q = 1 is carried unchanged to q = -1.
    let m = Model64::default();
    let start = m.eigensystem(ControlPoint::new(1.0, 0.0)).unwrap();
    let end = m.eigensystem(ControlPoint::new(-1.0, 0.0)).unwrap();
    let overlap = end.psi_minus.inner(&start.psi_minus).norm_sqr();
    assert!((overlap - 0.5).abs() < 1e-15);
    let coeffs = project(&start.psi_minus, &end);
    let (_, b) = band_observables(&coeffs, &end).unwrap();
    assert!(b.abs() < 1e-14);
}

#[test]
fn fast_hermitian_sweep_approaches_mixture() {
    let b = final_index(&hermitian(Direction::Ccw, 2f64.exp()), &StepControl::endpoints_only(1e-3));
    assert!(b.abs() <= 0.2, "{b}");
    let faster = final_index(&hermitian(Direction::Ccw, 6f64.exp()), &StepControl::endpoints_only(1e-4));
    assert!(faster.abs() < b.abs());
    assert!(faster.abs() <= 0.01, "{faster}");
}

#[test]
fn loop_transfer_is_chiral() {
    let v = (-2f64).exp();
    let ccw = final_index(&loop_path(Direction::Ccw, v), &StepControl::endpoints_only(1e-3));
    let cw = final_index(&loop_path(Direction::Cw, v), &StepControl::endpoints_only(1e-3));
    assert!(ccw > 0.95, "ccw {ccw}");
    assert!(cw < 0.0, "cw {cw}");
}

#[test]
fn ccw_loop_flips_once_at_the_branch_cut() {
    let m = Model64::default();
    let traj = evolve(&m, &loop_path(Direction::Ccw, (-2f64).exp()), &InitialState::Lower, &StepControl::default())
        .unwrap();
    let series: Vec<_> = traj.samples.iter().map(|s| (s.point, s.band_index().unwrap())).collect();
    let flips: Vec<_> = series.windows(2).filter(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0)).collect();
    assert_eq!(flips.len(), 1, "sign changes: {}", flips.len());
    let (p, _) = flips[0][1];
    assert!((p.g - 1.2).abs() < 1e-12);
    assert!(p.q.abs() < 0.01, "flip at q = {}", p.q);
}

#[test]
fn hermitian_norm_conserved() {
    let m = Model64::default();
    for dir in [Direction::Ccw, Direction::Cw] {
        let traj = evolve(&m, &hermitian(dir, 0.05), &InitialState::Lower, &StepControl::default()).unwrap();
        assert!(traj.last().state.log_norm.abs() <= 1e-6, "{}", traj.last().state.log_norm);
    }
}

#[test]
fn diagnostics_independent_of_renormalization() {
    let m = Model64::default();
    let path = loop_path(Direction::Ccw, (-2f64).exp());
    let on = StepControl { dt: 1e-3, stride: 50, renormalize: true };
    let off = StepControl { renormalize: false, ..on };
    let a = evolve(&m, &path, &InitialState::Lower, &on).unwrap();
    let b = evolve(&m, &path, &InitialState::Lower, &off).unwrap();
    assert_eq!(a.samples.len(), b.samples.len());
    // raw norm grows by many orders of magnitude but stays finite
    assert!(b.last().state.norm() > 1e3 && b.last().state.norm().is_finite());
    for (x, y) in a.samples.iter().zip(&b.samples) {
        let (bx, by) = (x.bands.unwrap(), y.bands.unwrap());
        assert!((bx.band_index - by.band_index).abs() <= 1e-10);
        assert!((bx.exp_e - by.exp_e).norm() <= 1e-10);
        assert!((x.spin - y.spin).abs() <= 1e-10);
    }
    let growth = b.last().state.norm().ln();
    assert!((a.last().state.log_norm - growth).abs() <= 1e-8 * growth.abs().max(1.0));
}

#[test]
fn rayleigh_quotient_agrees_with_band_weights_when_hermitian() {
    let m = Model64::default();
    for dir in [Direction::Ccw, Direction::Cw] {
        let traj = evolve(&m, &hermitian(dir, 0.8), &InitialState::Lower, &StepControl::default()).unwrap();
        for s in &traj.samples {
            let rq = rayleigh_quotient(&m.build_hamiltonian(s.point).unwrap(), &s.state);
            assert!((rq - s.bands.unwrap().exp_e).norm() <= 1e-9);
        }
    }
}

fn final_state(dt: f64) -> TwoState64 {
    let m = Model64::default();
    let path = loop_path(Direction::Ccw, (-2f64).exp());
    evolve(&m, &path, &InitialState::Lower, &StepControl::endpoints_only(dt)).unwrap().last().state
}

fn distance(a: &TwoState64, b: &TwoState64) -> f64 {
    ((a.up - b.up).norm_sqr() + (a.down - b.down).norm_sqr()).sqrt()
}

#[test]
fn integrator_is_fourth_order() {
    let h = 0.08;
    let s1 = final_state(h);
    let s2 = final_state(h / 2.0);
    let s4 = final_state(h / 4.0);
    let richardson = (distance(&s1, &s2) / distance(&s2, &s4)).log2();
    assert!(richardson >= 3.8, "Richardson order {richardson}");

    // error against a quarter-step reference drops ~16x per halving
    let reference = final_state(h / 16.0);
    let e1 = distance(&final_state(h / 4.0), &reference);
    let e2 = distance(&final_state(h / 8.0), &reference);
    let ratio = e1 / e2;
    assert!((12.0..=20.0).contains(&ratio), "error ratio {ratio}");
}

#[test]
fn sample_at_ep_has_no_band_data() {
    let m = Model64::default();
    let s = TwoState64::new(nhsoc_core::C64::new(1.0, 0.0), nhsoc_core::C64::new(0.0, 0.0));
    let rec = sample(&m, 0.0, ControlPoint::new(0.0, 1.0), &s).unwrap();
    assert!(rec.bands.is_none());
    assert_eq!(rec.spin, 1.0);
}

#[test]
fn single_precision_reproduces_chirality() {
    use nhsoc_core::{Model, Path};
    let m: Model<f32> = Model::default();
    let v = (-2f32).exp();
    let run = |dir| {
        let path = Path::standard(&Protocol::Loop { h: 1.2f32, extent: 1.0 }, dir, v).unwrap();
        evolve(&m, &path, &InitialState::Lower, &StepControl::endpoints_only(1e-2)).unwrap().final_band_index().unwrap()
    };
    let (ccw, cw) = (run(Direction::Ccw), run(Direction::Cw));
    let ccw64 = final_index(&loop_path(Direction::Ccw, (-2f64).exp()), &StepControl::endpoints_only(1e-2));
    assert!(ccw > 0.95 && cw < 0.0, "ccw {ccw} cw {cw}");
    assert!((ccw as f64 - ccw64).abs() < 1e-3);
}
