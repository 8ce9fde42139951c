use nhsoc_core::{ControlPoint, Path64};
use proptest::collection::vec;
use proptest::prelude::*;

fn arb_path() -> impl Strategy<Value = Path64> {
    (vec((-3.0f64..3.0, -3.0f64..3.0), 2..6), 0.01f64..5.0).prop_filter_map("degenerate segment", |(w, v)| {
        let pts: Vec<_> = w.into_iter().map(|(q, g)| ControlPoint::new(q, g)).collect();
        if pts.windows(2).any(|p| p[0].distance(&p[1]) < 1e-3) {
            return None;
        }
        Path64::new(pts, v).ok()
    })
}

/// Position reached by accumulating each segment's constant velocity over
/// the part of `[0, t]` it covers.
fn integrate_velocity(path: &Path64, t: f64) -> ControlPoint<f64> {
    let start = path.start();
    let (mut q, mut g) = (start.q, start.g);
    for seg in path.segments() {
        let covered = (t - seg.start_time).clamp(0.0, seg.duration);
        q += seg.velocity.v_q * covered;
        g += seg.velocity.v_g * covered;
    }
    ControlPoint::new(q, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn position_matches_integrated_velocity(path in arb_path(), fracs in vec(0.0f64..=1.0, 1000)) {
        let total = path.total_time();
        for f in fracs {
            let t = f * total;
            let (p, _) = path.position_at(t).unwrap();
            let r = integrate_velocity(&path, t);
            prop_assert!(p.distance(&r) <= 1e-10, "t={} p={:?} r={:?}", t, p, r);
        }
    }

    #[test]
    fn reversal_runs_backwards(path in arb_path(), fracs in vec(0.0f64..=1.0, 50)) {
        let rev = path.reversed();
        let total = path.total_time();
        prop_assert!((rev.total_time() - total).abs() <= 1e-12 * total.max(1.0));
        for f in fracs {
            let t = f * total;
            let (a, _) = rev.position_at(t).unwrap();
            let (b, _) = path.position_at((total - t).max(0.0)).unwrap();
            prop_assert!(a.distance(&b) <= 1e-9);
        }
    }

    #[test]
    fn velocity_has_constant_speed(path in arb_path()) {
        for seg in path.segments() {
            prop_assert!((seg.velocity.speed() - path.speed()).abs() <= 1e-12 * path.speed().max(1.0));
        }
    }
}

#[test]
fn finite_difference_speed_away_from_corners() {
    let path = Path64::new(
        vec![ControlPoint::new(1.0, 0.0), ControlPoint::new(0.3, 0.9), ControlPoint::new(-1.0, 0.2)],
        0.7,
    )
    .unwrap();
    for &eps in &[1e-3, 1e-5] {
        for seg in path.segments() {
            let t = seg.start_time + 0.5 * seg.duration;
            let (a, _) = path.position_at(t).unwrap();
            let (b, _) = path.position_at(t + eps).unwrap();
            assert!((a.distance(&b) / eps - 0.7).abs() <= 1e-6);
        }
    }
}
