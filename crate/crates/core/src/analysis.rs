//! Nonadiabatic-transition analysis: the adiabatic-frame solution for the
//! band ratio `b(t)`, the closed-form transition radius, point-source
//! diagrams, speed sweeps and protocol phase diagrams.
//!
//! The closed forms assume `kappa = 1`. For other couplings the origin is
//! already scaled by the model and the speed is multiplied by `kappa` before
//! use; the radius is mapped back to unscaled control units.

use num_complex::Complex;
use rayon::prelude::*;

use crate::dynamics::{evolve, InitialState, StepControl};
use crate::error::{Error, Result};
use crate::model::{ControlPoint, Model};
use crate::path::{Direction, Path, Protocol, Velocity};
use crate::scalar::{imag_unit, is_finite_c, Cplx, Real};

/// Frozen-coefficient data for the adiabatic-frame evolution of
/// `b = (c_plus - c_minus) / (c_plus + c_minus)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticFrameInput<T> {
    pub b0: Cplx<T>,
    pub delta_e0: Cplx<T>,
    /// `-v_q + i v_g`
    pub vartheta: Cplx<T>,
    pub speed: T,
}

impl<T: Real> AdiabaticFrameInput<T> {
    pub fn new(b0: Cplx<T>, delta_e0: Cplx<T>, vartheta: Cplx<T>, speed: T) -> Result<Self> {
        if !(is_finite_c(b0) && is_finite_c(delta_e0) && is_finite_c(vartheta) && speed.is_finite()) {
            return Err(Error::InvalidInput("non-finite adiabatic-frame input".into()));
        }
        if delta_e0.norm_sqr() == T::zero() {
            return Err(Error::InvalidInput("dE(0) must be nonzero".into()));
        }
        if speed < T::zero() {
            return Err(Error::InvalidInput("speed must be non-negative".into()));
        }
        Ok(Self { b0, delta_e0, vartheta, speed })
    }

    pub fn from_velocity(b0: Cplx<T>, delta_e0: Cplx<T>, velocity: Velocity<T>) -> Result<Self> {
        Self::new(b0, delta_e0, velocity.vartheta(), velocity.speed())
    }

    /// Adiabatic-frame Hamiltonian in the basis `(c_minus, c_plus)`:
    /// `[[-dE, i w], [-i w, dE]]` with `w = vartheta / (2 dE^2)`.
    pub fn hamiltonian(&self) -> [[Cplx<T>; 2]; 2] {
        let i = imag_unit::<T>();
        let de = self.delta_e0;
        let w = self.vartheta / (de * de * T::lit(2.0));
        [[-de, i * w], [-i * w, de]]
    }
}

/// `tan(z)` that saturates to `+-i` instead of overflowing for large `|Im z|`.
fn tan_c<T: Real>(z: Cplx<T>) -> Cplx<T> {
    if z.im.abs() > T::lit(20.0) {
        Complex::new(T::zero(), z.im.signum())
    } else {
        z.tan()
    }
}

fn pole_guard<T: Real>(den: Cplx<T>, t: T) -> Result<()> {
    if den.norm() < T::lit(1e-12) || !is_finite_c(den) {
        Err(Error::PoleEncountered { t: t.as_f64() })
    } else {
        Ok(())
    }
}

/// Exact solution of the frozen-coefficient adiabatic-frame equation for
/// `b(t)`.
pub fn adiabatic_b_exact<T: Real>(input: &AdiabaticFrameInput<T>, t: T) -> Result<Cplx<T>> {
    let i = imag_unit::<T>();
    let one = Complex::new(T::one(), T::zero());
    let two = T::lit(2.0);
    let de = input.delta_e0;
    let de3 = de * de * de;
    let theta = input.vartheta;
    let a = theta / (de3 * two);
    let de_prime = de * i * (-(theta * theta) - de3 * de3 * T::lit(4.0)).sqrt() / (de3 * two);
    let ratio = de_prime / de;
    let tn = tan_c(de_prime * t);
    let num = input.b0 * ratio - i * (one - i * a) * tn;
    let den = ratio - i * input.b0 * (one + i * a) * tn;
    pole_guard(den, t)?;
    Ok(num / den)
}

/// Phase factor `n(0) = exp(i atan(|v| / (2 |dE(0)|^3)))`.
pub fn nat_phase<T: Real>(speed: T, delta_e0: Cplx<T>) -> Cplx<T> {
    let m = delta_e0.norm();
    let phase = (speed / (T::lit(2.0) * m * m * m)).atan();
    Complex::from_polar(T::one(), phase)
}

/// Slow-driving, `Re(dE(0)) -> 0` approximation of `b(t)`:
/// `b = (b0 + tanh(y t) / n0) / (1 + b0 tanh(y t) n0)` with `y = Im(dE(0))`.
pub fn adiabatic_b_approx<T: Real>(input: &AdiabaticFrameInput<T>, t: T) -> Result<Cplx<T>> {
    let y = input.delta_e0.im;
    if y == T::zero() {
        return Err(Error::NoDamping);
    }
    let n0 = nat_phase(input.speed, input.delta_e0);
    let x = (y * t).tanh();
    let one = Complex::new(T::one(), T::zero());
    let num = input.b0 + n0.conj() * x;
    let den = one + input.b0 * n0 * x;
    pole_guard(den, t)?;
    Ok(num / den)
}

/// Closed-form transition radius and its intermediate quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NatPrediction<T> {
    pub radius: T,
    pub xi: T,
    pub n0: Cplx<T>,
    pub tau_root: T,
    pub t_occur: T,
}

/// Transition radius for a state with band ratio `b0` leaving `origin` along
/// any straight line at `speed`.
pub fn predict_nat_radius<T: Real>(
    model: &Model<T>,
    origin: ControlPoint<T>,
    b0: Cplx<T>,
    speed: T,
) -> Result<NatPrediction<T>> {
    if !origin.is_finite() || !is_finite_c(b0) {
        return Err(Error::InvalidInput("non-finite origin or b0".into()));
    }
    if !(speed.is_finite() && speed > T::zero()) {
        return Err(Error::InvalidInput(format!("speed must be positive, got {speed}")));
    }
    let delta_e0 = model.delta_e(origin);
    let speed_scaled = speed * model.kappa;
    let y = delta_e0.im;
    if !(y > T::zero()) {
        return Err(Error::NoTransition(format!("Im(dE(0)) = {y} is not positive")));
    }
    let n0 = nat_phase(speed_scaled, delta_e0);
    let xi = T::one() + b0.norm_sqr();
    let quad = (b0 * n0 * n0).re;
    let lin = b0.re;
    let zero = T::zero();
    let one = T::one();
    let in_window = |tau: T| tau > zero && tau < one;

    // quad * tau^2 + xi * tau + Re(b0) = 0
    let tau_root = if quad == zero {
        let tau = -lin / xi;
        in_window(tau).then_some(tau)
    } else {
        let disc = xi * xi - T::lit(4.0) * lin * quad;
        if disc < zero {
            None
        } else {
            let s = disc.sqrt();
            let two_a = T::lit(2.0) * quad;
            [(-xi + s) / two_a, (-xi - s) / two_a]
                .into_iter()
                .filter(|&t| in_window(t))
                .fold(None, |best: Option<T>, t| Some(best.map_or(t, |b| b.min(t))))
        }
    };
    let tau_root = tau_root.ok_or_else(|| {
        Error::NoTransition("no root of Re(b) = 0 with tanh argument in (0, 1)".into())
    })?;

    let t_occur = tau_root.atanh() / y;
    let radius = speed_scaled * t_occur / model.kappa;
    Ok(NatPrediction { radius, xi, n0, tau_root, t_occur })
}

/// Arc length at which the band index first changes sign.
///
/// The reference sign is taken from the first sample at least `hysteresis`
/// away from zero; a flip is registered once a sample reaches `hysteresis` on
/// the other side, and the crossing is placed by linear interpolation on the
/// last bracketing pair. Samples without a band index are skipped.
pub fn first_sign_flip<T: Real>(samples: &[(T, Option<T>)], hysteresis: T) -> Option<T> {
    let valid: Vec<(T, T)> = samples.iter().filter_map(|&(s, b)| b.map(|b| (s, b))).collect();
    let sign = valid.iter().find(|(_, b)| b.abs() >= hysteresis).map(|(_, b)| b.signum())?;
    let mut anchor = None;
    for (i, &(_, b)) in valid.iter().enumerate() {
        let signed = b * sign;
        if signed >= hysteresis {
            anchor = Some(i);
        } else if signed <= -hysteresis {
            let from = anchor?;
            for k in (from..i).rev() {
                let (s0, b0) = valid[k];
                let (s1, b1) = valid[k + 1];
                if b0 * sign > T::zero() && b1 * sign <= T::zero() {
                    return Some(s0 + (s1 - s0) * b0 / (b0 - b1));
                }
            }
            return None;
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSourceSettings<T> {
    pub n_rays: usize,
    pub max_arc: T,
    /// Lower bound on the number of recorded samples per ray.
    pub min_samples_per_ray: usize,
    pub dt: T,
    pub hysteresis: T,
}

impl<T: Real> Default for PointSourceSettings<T> {
    fn default() -> Self {
        Self { n_rays: 360, max_arc: T::lit(2.0), min_samples_per_ray: 400, dt: T::lit(1e-3), hysteresis: T::lit(0.02) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySample<T> {
    pub arc: T,
    pub point: ControlPoint<T>,
    pub band_index: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayRecord<T> {
    pub angle: T,
    pub samples: Vec<RaySample<T>>,
    /// First sign flip of the band index, if any.
    pub front: Option<T>,
}

/// Band index along straight rays leaving one control point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSourceField<T> {
    pub origin: ControlPoint<T>,
    pub speed: T,
    pub rays: Vec<RayRecord<T>>,
}

impl<T: Real> PointSourceField<T> {
    pub fn front(&self) -> Vec<(T, Option<T>)> {
        self.rays.iter().map(|r| (r.angle, r.front)).collect()
    }

    /// Median of the measured fronts over rays that flip.
    pub fn median_front(&self) -> Option<T> {
        let mut v: Vec<T> = self.rays.iter().filter_map(|r| r.front).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(|a, b| a.partial_cmp(b).expect("fronts are finite"));
        let n = v.len();
        Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0) })
    }
}

pub fn point_source_diagram<T: Real>(
    model: &Model<T>,
    origin: ControlPoint<T>,
    initial: &InitialState<T>,
    speed: T,
    settings: &PointSourceSettings<T>,
) -> Result<PointSourceField<T>> {
    if settings.n_rays < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 rays, got {}", settings.n_rays)));
    }
    if !(settings.max_arc.is_finite() && settings.max_arc > T::zero()) {
        return Err(Error::InvalidInput("max_arc must be positive".into()));
    }
    if !(speed.is_finite() && speed > T::zero()) {
        return Err(Error::InvalidInput(format!("speed must be positive, got {speed}")));
    }
    // surfaces EpDegenerate before any ray is launched
    model.eigensystem(origin)?;

    let duration = settings.max_arc / speed;
    let steps = (duration / settings.dt).ceil().to_usize().unwrap_or(1).max(1);
    let stride = (steps / settings.min_samples_per_ray.max(1)).max(1);
    let step = StepControl { dt: settings.dt, stride, renormalize: true };
    let n = settings.n_rays;

    let rays = (0..n)
        .into_par_iter()
        .map(|k| {
            let angle = T::TAU() * T::from_usize(k).expect("ray index") / T::from_usize(n).expect("ray count");
            let protocol = Protocol::Ray { origin, angle, max_len: settings.max_arc };
            let path = Path::standard(&protocol, Direction::Ccw, speed)?;
            let traj = evolve(model, &path, initial, &step)?;
            let samples: Vec<RaySample<T>> = traj
                .samples
                .iter()
                .map(|s| RaySample { arc: s.t * speed, point: s.point, band_index: s.band_index() })
                .collect();
            let series: Vec<(T, Option<T>)> = samples.iter().map(|s| (s.arc, s.band_index)).collect();
            let front = first_sign_flip(&series, settings.hysteresis);
            Ok(RayRecord { angle, samples, front })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PointSourceField { origin, speed, rays })
}

/// Final band index of one full evolution (NaN if it ends on the
/// exceptional point).
pub fn final_band_index<T: Real>(
    model: &Model<T>,
    protocol: &Protocol<T>,
    direction: Direction,
    speed: T,
    initial: &InitialState<T>,
    dt: T,
) -> Result<T> {
    let path = Path::standard(protocol, direction, speed)?;
    let traj = evolve(model, &path, initial, &StepControl::endpoints_only(dt))?;
    Ok(traj.final_band_index().unwrap_or_else(T::nan))
}

/// Final band index for each speed, in input order.
pub fn speed_sweep<T: Real>(
    model: &Model<T>,
    protocol: &Protocol<T>,
    direction: Direction,
    speeds: &[T],
    initial: &InitialState<T>,
    dt: T,
) -> Result<Vec<(T, T)>> {
    if let Some(v) = speeds.iter().find(|v| !(v.is_finite() && **v > T::zero())) {
        return Err(Error::InvalidInput(format!("sweep speeds must be positive, got {v}")));
    }
    speeds
        .par_iter()
        .map(|&v| Ok((v, final_band_index(model, protocol, direction, v, initial, dt)?)))
        .collect()
}

/// `h` at which the predicted transition radius from `(x_m, h)` equals `h`,
/// found by bisection on `[lo, hi]`. `None` if the bracket does not straddle
/// a root.
pub fn predicted_min_height<T: Real>(model: &Model<T>, x_m: T, speed: T, lo: T, hi: T, tol: T) -> Result<Option<T>> {
    let b0 = Complex::new(-T::one(), T::zero());
    let excess = |h: T| -> Result<T> {
        match predict_nat_radius(model, ControlPoint::new(x_m, h), b0, speed) {
            Ok(p) => Ok(p.radius - h),
            Err(Error::NoTransition(_)) => Ok(T::infinity()),
            Err(e) => Err(e),
        }
    };
    let (mut lo, mut hi) = (lo, hi);
    if !(excess(lo)? > T::zero() && excess(hi)? < T::zero()) {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if excess(mid)? > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some((lo + hi) / T::lit(2.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint<T> {
    pub x_m: T,
    /// `None` when the bisection bracket did not contain a root.
    pub h_star: Option<T>,
}

/// Final band index of the spike protocol over an `(x_m, h)` grid, with the
/// predicted minimum height per column.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram<T> {
    pub xm_grid: Vec<T>,
    pub h_grid: Vec<T>,
    /// `band_index_final[i][j]` at `(xm_grid[i], h_grid[j])`.
    pub band_index_final: Vec<Vec<T>>,
    pub boundary: Vec<BoundaryPoint<T>>,
    pub speed: T,
    pub direction: Direction,
}

impl<T: Real> PhaseDiagram<T> {
    /// Per column, the height where the band index last changes from negative
    /// to non-negative going up in `h`, by linear interpolation. `None` when
    /// the top of the column is not positive or the whole column is.
    pub fn measured_boundary(&self) -> Vec<Option<T>> {
        self.band_index_final
            .iter()
            .map(|col| {
                let top = *col.last()?;
                if !(top >= T::zero()) {
                    return None;
                }
                let k = col.iter().rposition(|&b| b < T::zero())?;
                let (h0, h1) = (self.h_grid[k], self.h_grid[k + 1]);
                let (b0, b1) = (col[k], col[k + 1]);
                Some(h0 + (h1 - h0) * (-b0) / (b1 - b0))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDiagramSettings<T> {
    pub dt: T,
    pub bisection_tol: T,
    pub extent: T,
}

impl<T: Real> Default for PhaseDiagramSettings<T> {
    fn default() -> Self {
        Self { dt: T::lit(1e-3), bisection_tol: T::lit(1e-3), extent: T::one() }
    }
}

pub fn protocol_phase_diagram<T: Real>(
    model: &Model<T>,
    xm_grid: &[T],
    h_grid: &[T],
    speed: T,
    direction: Direction,
    settings: &PhaseDiagramSettings<T>,
) -> Result<PhaseDiagram<T>> {
    if xm_grid.is_empty() || h_grid.is_empty() {
        return Err(Error::InvalidInput("phase diagram grids must be non-empty".into()));
    }
    if let Some(x) = xm_grid.iter().find(|x| !(x.is_finite() && **x < T::zero())) {
        return Err(Error::InvalidInput(format!("x_m values must be negative, got {x}")));
    }
    if let Some(h) = h_grid.iter().find(|h| !(h.is_finite() && **h > T::zero())) {
        return Err(Error::InvalidInput(format!("h values must be positive, got {h}")));
    }
    let nh = h_grid.len();
    let cells: Vec<T> = (0..xm_grid.len() * nh)
        .into_par_iter()
        .map(|idx| {
            let protocol = Protocol::Spike { x_m: xm_grid[idx / nh], h: h_grid[idx % nh], extent: settings.extent };
            final_band_index(model, &protocol, direction, speed, &InitialState::Lower, settings.dt)
        })
        .collect::<Result<_>>()?;
    let band_index_final = cells.chunks(nh).map(|c| c.to_vec()).collect();

    let h_lo = h_grid.iter().copied().fold(T::infinity(), T::min);
    let h_hi = h_grid.iter().copied().fold(T::neg_infinity(), T::max);
    let boundary = xm_grid
        .par_iter()
        .map(|&x_m| {
            let h_star = predicted_min_height(model, x_m, speed, h_lo, h_hi, settings.bisection_tol)?;
            Ok(BoundaryPoint { x_m, h_star })
        })
        .collect::<Result<_>>()?;

    Ok(PhaseDiagram {
        xm_grid: xm_grid.to_vec(),
        h_grid: h_grid.to_vec(),
        band_index_final,
        boundary,
        speed,
        direction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type C = Complex<f64>;

    fn m() -> Model<f64> {
        Model::default()
    }

    #[test]
    fn exact_b_at_time_zero() {
        let input = AdiabaticFrameInput::new(C::new(0.3, -0.2), C::new(1.1, 0.6), C::new(-0.05, 0.02), 0.0539).unwrap();
        let b = adiabatic_b_exact(&input, 0.0).unwrap();
        assert!((b - input.b0).norm() < 1e-14);
    }

    #[test]
    fn exact_b_decoupled_bands() {
        let input = AdiabaticFrameInput::new(C::new(-1.0, 0.0), C::new(1.27, 0.78), C::new(0.0, 0.0), 0.0).unwrap();
        for &t in &[0.5, 1.0, 3.0, 7.0] {
            let b = adiabatic_b_exact(&input, t).unwrap();
            assert!((b - C::new(-1.0, 0.0)).norm() < 1e-12, "t={t} b={b}");
        }
    }

    #[test]
    fn approx_b_limits() {
        let input = AdiabaticFrameInput::new(C::new(-1.0, 0.0), C::new(0.0, 0.8), C::new(0.0, -0.1), 0.1).unwrap();
        assert!((adiabatic_b_approx(&input, 0.0).unwrap() - input.b0).norm() < 1e-15);
        let n0 = nat_phase(0.1, input.delta_e0);
        let b = adiabatic_b_approx(&input, 40.0).unwrap();
        assert!((b - n0.conj()).norm() < 1e-9);

        let still = AdiabaticFrameInput::new(C::new(-1.0, 0.0), C::new(0.0, 0.8), C::new(0.0, 0.0), 0.0).unwrap();
        for &t in &[0.1, 1.0, 2.0] {
            assert!((adiabatic_b_approx(&still, t).unwrap() - still.b0).norm() < 1e-12);
        }

        let hermitian = AdiabaticFrameInput::new(C::new(-1.0, 0.0), C::new(1.0, 0.0), C::new(0.1, 0.0), 0.1).unwrap();
        assert_eq!(adiabatic_b_approx(&hermitian, 1.0), Err(Error::NoDamping));
    }

    #[test]
    fn radius_at_reference_point() {
        let v = (-2f64).exp();
        let p = predict_nat_radius(&m(), ControlPoint::new(-1.0, 1.0), C::new(-1.0, 0.0), v).unwrap();
        assert_abs_diff_eq!(p.radius, 0.367, epsilon = 5e-4);
        assert_eq!(p.xi, 2.0);
        assert!(p.tau_root > 0.0 && p.tau_root < 1.0);
        assert_abs_diff_eq!(p.radius, v * p.t_occur, epsilon = 1e-14);

        let slow = predict_nat_radius(&m(), ControlPoint::new(-1.0, 1.0), C::new(-1.0, 0.0), 0.5 * v).unwrap();
        assert_abs_diff_eq!(slow.radius, 0.212, epsilon = 1e-3);
        assert!(slow.radius < p.radius);
    }

    #[test]
    fn radius_requires_loss() {
        let err = predict_nat_radius(&m(), ControlPoint::new(-1.0, 0.0), C::new(-1.0, 0.0), 0.1).unwrap_err();
        assert_eq!(err.name(), "NoTransition");
        let err = predict_nat_radius(&m(), ControlPoint::new(-1.0, 1.0), C::new(-1.0, 0.0), 1e-300).unwrap_err();
        assert_eq!(err.name(), "NoTransition");
        assert!(predict_nat_radius(&m(), ControlPoint::new(-1.0, 1.0), C::new(-1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn radius_scales_with_kappa() {
        // kappa = 2 at (x/2, y/2) is the kappa = 1 problem at (x, y) with
        // control distances halved
        let k2 = Model::new(2.0, 1e-9).unwrap();
        let v = 0.1;
        let a = predict_nat_radius(&m(), ControlPoint::new(-1.0, 1.0), C::new(-1.0, 0.0), v).unwrap();
        let b = predict_nat_radius(&k2, ControlPoint::new(-0.5, 0.5), C::new(-1.0, 0.0), v / 2.0).unwrap();
        assert_abs_diff_eq!(b.radius, a.radius / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn sign_flip_detection() {
        let series: Vec<(f64, Option<f64>)> =
            vec![(0.0, Some(-1.0)), (1.0, Some(-0.5)), (2.0, None), (3.0, Some(0.5)), (4.0, Some(1.0))];
        assert_abs_diff_eq!(first_sign_flip(&series, 0.02).unwrap(), 2.0, epsilon = 1e-15);

        // jitter inside the band does not count
        let jitter = vec![(0.0, Some(-1.0)), (1.0, Some(0.01)), (2.0, Some(-0.01)), (3.0, Some(-0.9))];
        assert_eq!(first_sign_flip(&jitter, 0.02), None);

        let down = vec![(0.0, Some(1.0)), (1.0, Some(0.5)), (2.0, Some(-0.5))];
        assert_abs_diff_eq!(first_sign_flip(&down, 0.02).unwrap(), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn min_height_bracket() {
        let v = (-3f64).exp();
        let h = predicted_min_height(&m(), -1.0, v, 0.048, 1.2, 1e-3).unwrap().unwrap();
        let r = predict_nat_radius(&m(), ControlPoint::new(-1.0, h), C::new(-1.0, 0.0), v).unwrap().radius;
        assert!((r - h).abs() < 5e-3);
        assert_eq!(predicted_min_height(&m(), -1.0, v, 0.9, 1.2, 1e-3).unwrap(), None);
    }

    #[test]
    fn phase_diagram_rejects_bad_grids() {
        let s = PhaseDiagramSettings::default();
        assert!(protocol_phase_diagram(&m(), &[], &[0.5], 0.1, Direction::Ccw, &s).is_err());
        assert!(protocol_phase_diagram(&m(), &[0.1], &[0.5], 0.1, Direction::Ccw, &s).is_err());
        assert!(protocol_phase_diagram(&m(), &[-0.5], &[0.0], 0.1, Direction::Ccw, &s).is_err());
    }

    #[test]
    fn point_source_rejects_ep_origin() {
        let err = point_source_diagram(
            &m(),
            ControlPoint::new(0.0, 1.0),
            &InitialState::Lower,
            0.1,
            &PointSourceSettings::default(),
        )
        .unwrap_err();
        assert_eq!(err.name(), "EpDegenerate");
    }
}
