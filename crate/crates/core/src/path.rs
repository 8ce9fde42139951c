//! Piecewise-linear routes through the control plane, traversed at constant
//! parameter speed, and the standard protocol shapes built from them.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ControlPoint;
use crate::scalar::{Cplx, Real};

/// Rate of change of the control point, `(dq/dt, dg/dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Velocity<T> {
    pub v_q: T,
    pub v_g: T,
}

impl<T: Real> Velocity<T> {
    pub fn speed(&self) -> T {
        self.v_q.hypot(self.v_g)
    }

    /// `-v_q + i v_g`, the velocity as it enters the adiabatic-frame coupling.
    pub fn vartheta(&self) -> Cplx<T> {
        Complex::new(-self.v_q, self.v_g)
    }
}

/// Traversal direction. `Ccw` sweeps `q` from positive to negative (the
/// "negative" direction of the Hermitian sweep); `Cw` is the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[serde(alias = "negative")]
    Ccw,
    #[serde(alias = "positive")]
    Cw,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Ccw => "ccw",
            Direction::Cw => "cw",
        }
    }
}

fn unit<T: Real>() -> T {
    T::one()
}

/// Standard protocol shapes. `extent` is the sweep endpoint magnitude; the
/// `q` sweep runs between `+extent` and `-extent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Protocol<T: Real> {
    /// Sweep along the Hermitian line `g = 0`.
    Hermitian {
        #[serde(default = "unit")]
        extent: T,
    },
    /// Raise `g` to `h`, sweep `q`, lower `g` back to zero.
    Loop {
        h: T,
        #[serde(default = "unit")]
        extent: T,
    },
    /// Sweep `q` to `x_m`, raise `g` to `h` and back down, finish the sweep.
    Spike {
        x_m: T,
        h: T,
        #[serde(default = "unit")]
        extent: T,
    },
    /// Straight ray from `origin` at `angle` (radians from the `+q` axis).
    Ray { origin: ControlPoint<T>, angle: T, max_len: T },
}

impl<T: Real> Protocol<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Hermitian { .. } => "hermitian",
            Protocol::Loop { .. } => "loop",
            Protocol::Spike { .. } => "spike",
            Protocol::Ray { .. } => "ray",
        }
    }

    /// Waypoints traversed in `direction`; rays ignore the direction.
    pub fn waypoints(&self, direction: Direction) -> Result<Vec<ControlPoint<T>>> {
        let z = T::zero();
        let p = ControlPoint::new;
        let check_extent = |e: T| {
            if e.is_finite() && e > z {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("sweep extent must be positive, got {e}")))
            }
        };
        let check_height = |h: T| {
            if h.is_finite() && h > z {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("height h must be positive, got {h}")))
            }
        };
        let mut w = match *self {
            Protocol::Hermitian { extent } => {
                check_extent(extent)?;
                vec![p(extent, z), p(-extent, z)]
            }
            Protocol::Loop { h, extent } => {
                check_extent(extent)?;
                check_height(h)?;
                vec![p(extent, z), p(extent, h), p(-extent, h), p(-extent, z)]
            }
            Protocol::Spike { x_m, h, extent } => {
                check_extent(extent)?;
                check_height(h)?;
                if !(x_m.is_finite() && x_m >= -extent && x_m < extent) {
                    return Err(Error::InvalidInput(format!(
                        "spike position x_m = {x_m} must lie in [-{extent}, {extent})"
                    )));
                }
                let mut w = vec![p(extent, z), p(x_m, z), p(x_m, h), p(x_m, z), p(-extent, z)];
                // x_m at the sweep end leaves nothing to sweep after the spike
                if x_m == -extent {
                    w.pop();
                }
                w
            }
            Protocol::Ray { origin, angle, max_len } => {
                if !(origin.is_finite() && angle.is_finite()) {
                    return Err(Error::InvalidInput("non-finite ray origin or angle".into()));
                }
                if !(max_len.is_finite() && max_len > z) {
                    return Err(Error::InvalidInput(format!("ray length must be positive, got {max_len}")));
                }
                let end = p(origin.q + max_len * angle.cos(), origin.g + max_len * angle.sin());
                return Ok(vec![origin, end]);
            }
        };
        if direction == Direction::Cw {
            w.reverse();
        }
        Ok(w)
    }
}

/// One straight piece of a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub start: ControlPoint<T>,
    pub end: ControlPoint<T>,
    pub length: T,
    pub start_time: T,
    pub duration: T,
    pub velocity: Velocity<T>,
}

impl<T: Real> Segment<T> {
    /// Position a local time `tau` after the segment start.
    #[inline]
    pub fn point_at(&self, tau: T) -> ControlPoint<T> {
        ControlPoint::new(self.start.q + self.velocity.v_q * tau, self.start.g + self.velocity.v_g * tau)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathSpec<T> {
    waypoints: Vec<ControlPoint<T>>,
    speed: T,
}

/// Ordered waypoints joined by straight segments, traversed at `speed`
/// parameter units per unit normalized time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathSpec<T>", into = "PathSpec<T>", bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct Path<T: Real> {
    waypoints: Vec<ControlPoint<T>>,
    speed: T,
    segments: Vec<Segment<T>>,
}

impl<T: Real> TryFrom<PathSpec<T>> for Path<T> {
    type Error = Error;

    fn try_from(spec: PathSpec<T>) -> Result<Self> {
        Path::new(spec.waypoints, spec.speed)
    }
}

impl<T: Real> From<Path<T>> for PathSpec<T> {
    fn from(p: Path<T>) -> Self {
        PathSpec { waypoints: p.waypoints, speed: p.speed }
    }
}

impl<T: Real> Path<T> {
    /// Builds a path. Consecutive waypoints must differ; revisiting an
    /// earlier waypoint (a retraced spike) is allowed.
    pub fn new(waypoints: Vec<ControlPoint<T>>, speed: T) -> Result<Self> {
        if !(speed.is_finite() && speed > T::zero()) {
            return Err(Error::InvalidInput(format!("speed must be positive and finite, got {speed}")));
        }
        if waypoints.len() < 2 {
            return Err(Error::InvalidInput("a path needs at least two waypoints".into()));
        }
        if let Some(p) = waypoints.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite waypoint ({}, {})", p.q, p.g)));
        }
        let mut segments = Vec::with_capacity(waypoints.len() - 1);
        let mut t0 = T::zero();
        for (i, pair) in waypoints.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let length = a.distance(&b);
            if !(length > T::zero()) {
                return Err(Error::InvalidInput(format!("zero-length segment between waypoints {i} and {}", i + 1)));
            }
            let duration = length / speed;
            let velocity = Velocity { v_q: (b.q - a.q) / length * speed, v_g: (b.g - a.g) / length * speed };
            segments.push(Segment { start: a, end: b, length, start_time: t0, duration, velocity });
            t0 = t0 + duration;
        }
        Ok(Self { waypoints, speed, segments })
    }

    pub fn standard(protocol: &Protocol<T>, direction: Direction, speed: T) -> Result<Self> {
        Self::new(protocol.waypoints(direction)?, speed)
    }

    pub fn waypoints(&self) -> &[ControlPoint<T>] {
        &self.waypoints
    }

    pub fn speed(&self) -> T {
        self.speed
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn start(&self) -> ControlPoint<T> {
        self.waypoints[0]
    }

    pub fn end(&self) -> ControlPoint<T> {
        *self.waypoints.last().expect("path has waypoints")
    }

    pub fn total_length(&self) -> T {
        self.segments.iter().fold(T::zero(), |acc, s| acc + s.length)
    }

    pub fn total_time(&self) -> T {
        let last = self.segments.last().expect("path has segments");
        last.start_time + last.duration
    }

    /// Position and velocity at time `t`. At an interior waypoint the
    /// velocity of the incoming segment is reported.
    pub fn position_at(&self, t: T) -> Result<(ControlPoint<T>, Velocity<T>)> {
        let total = self.total_time();
        if !(t >= T::zero() && t <= total) {
            return Err(Error::OutOfRange { t: t.as_f64(), total: total.as_f64() });
        }
        let idx = self
            .segments
            .iter()
            .position(|s| t <= s.start_time + s.duration)
            .unwrap_or(self.segments.len() - 1);
        let seg = &self.segments[idx];
        let tau = t - seg.start_time;
        let point = if tau >= seg.duration {
            seg.end
        } else if tau <= T::zero() {
            seg.start
        } else {
            let frac = tau / seg.duration;
            ControlPoint::new(
                seg.start.q + (seg.end.q - seg.start.q) * frac,
                seg.start.g + (seg.end.g - seg.start.g) * frac,
            )
        };
        Ok((point, seg.velocity))
    }

    pub fn reversed(&self) -> Self {
        let mut w = self.waypoints.clone();
        w.reverse();
        Self::new(w, self.speed).expect("reversal of a valid path is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pts(v: &[(f64, f64)]) -> Vec<ControlPoint<f64>> {
        v.iter().map(|&(q, g)| ControlPoint::new(q, g)).collect()
    }

    #[test]
    fn loop_waypoints_and_duration() {
        let v = (-2f64).exp();
        let path = Path::standard(&Protocol::Loop { h: 1.2, extent: 1.0 }, Direction::Ccw, v).unwrap();
        assert_eq!(path.waypoints(), pts(&[(1.0, 0.0), (1.0, 1.2), (-1.0, 1.2), (-1.0, 0.0)]).as_slice());
        assert_abs_diff_eq!(path.total_length(), 4.4, epsilon = 1e-12);
        assert_abs_diff_eq!(path.total_time(), 4.4 / v, epsilon = 1e-9);
        assert_abs_diff_eq!(path.total_time(), 32.51, epsilon = 5e-3);

        let cw = Path::standard(&Protocol::Loop { h: 1.2, extent: 1.0 }, Direction::Cw, v).unwrap();
        assert_eq!(cw.waypoints(), pts(&[(-1.0, 0.0), (-1.0, 1.2), (1.0, 1.2), (1.0, 0.0)]).as_slice());
    }

    #[test]
    fn hermitian_waypoints() {
        let path = Path::standard(&Protocol::Hermitian { extent: 1.0 }, Direction::Ccw, 0.5).unwrap();
        assert_eq!(path.waypoints(), pts(&[(1.0, 0.0), (-1.0, 0.0)]).as_slice());
        assert_abs_diff_eq!(path.total_time(), 4.0, epsilon = 1e-15);
        let rev = Path::standard(&Protocol::Hermitian { extent: 1.0 }, Direction::Cw, 0.5).unwrap();
        assert_eq!(rev.waypoints(), pts(&[(-1.0, 0.0), (1.0, 0.0)]).as_slice());
    }

    #[test]
    fn spike_waypoints() {
        let spike = Protocol::Spike { x_m: -0.5, h: 1.0, extent: 1.0 };
        let path = Path::standard(&spike, Direction::Ccw, 1.0).unwrap();
        assert_eq!(
            path.waypoints(),
            pts(&[(1.0, 0.0), (-0.5, 0.0), (-0.5, 1.0), (-0.5, 0.0), (-1.0, 0.0)]).as_slice()
        );
        assert_abs_diff_eq!(path.total_length(), 4.0, epsilon = 1e-15);
        let cw = Path::standard(&spike, Direction::Cw, 1.0).unwrap();
        let mut expect = path.waypoints().to_vec();
        expect.reverse();
        assert_eq!(cw.waypoints(), expect.as_slice());
    }

    #[test]
    fn spike_at_sweep_end_drops_empty_segment() {
        let spike = Protocol::Spike { x_m: -1.0, h: 1.2, extent: 1.0 };
        let path = Path::standard(&spike, Direction::Ccw, 1.0).unwrap();
        assert_eq!(path.waypoints(), pts(&[(1.0, 0.0), (-1.0, 0.0), (-1.0, 1.2), (-1.0, 0.0)]).as_slice());
    }

    #[test]
    fn invalid_protocols() {
        assert!(Path::standard(&Protocol::Loop { h: 0.0, extent: 1.0 }, Direction::Ccw, 1.0).is_err());
        assert!(Path::standard(&Protocol::Spike { x_m: 1.0, h: 1.0, extent: 1.0 }, Direction::Ccw, 1.0).is_err());
        assert!(Path::standard(&Protocol::Spike { x_m: -0.5, h: -1.0, extent: 1.0 }, Direction::Ccw, 1.0).is_err());
        assert!(Path::standard(&Protocol::Hermitian { extent: 1.0 }, Direction::Ccw, 0.0).is_err());
        assert!(Path::new(pts(&[(0.0, 0.0), (0.0, 0.0)]), 1.0).is_err());
        assert!(Path::new(pts(&[(0.0, 0.0)]), 1.0).is_err());
    }

    #[test]
    fn ray_endpoint() {
        let ray = Protocol::Ray { origin: ControlPoint::new(-1.0, 1.0), angle: std::f64::consts::FRAC_PI_2, max_len: 2.0 };
        let path = Path::standard(&ray, Direction::Cw, 0.1).unwrap();
        assert_abs_diff_eq!(path.end().q, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(path.end().g, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn position_lookup() {
        let path = Path::standard(&Protocol::Loop { h: 1.2, extent: 1.0 }, Direction::Ccw, 0.1).unwrap();
        let (p0, _) = path.position_at(0.0).unwrap();
        assert_eq!(p0, ControlPoint::new(1.0, 0.0));
        let (pe, _) = path.position_at(path.total_time()).unwrap();
        assert_eq!(pe, ControlPoint::new(-1.0, 0.0));
        // corner after the first 1.2 of arc length
        let (pc, _) = path.position_at(12.0).unwrap();
        assert_abs_diff_eq!(pc.q, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pc.g, 1.2, epsilon = 1e-12);
        let corner = path.segments()[0].duration;
        let (pc, vc) = path.position_at(corner).unwrap();
        assert_abs_diff_eq!(pc.q, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pc.g, 1.2, epsilon = 1e-12);
        // incoming velocity at the corner, outgoing right after
        assert_abs_diff_eq!(vc.v_g, 0.1, epsilon = 1e-15);
        let (_, va) = path.position_at(corner + 1e-9).unwrap();
        assert_abs_diff_eq!(va.v_q, -0.1, epsilon = 1e-15);

        assert!(matches!(path.position_at(-1e-9), Err(Error::OutOfRange { .. })));
        assert!(matches!(path.position_at(path.total_time() + 1e-6), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn path_serde_validates() {
        let json = r#"{"waypoints":[{"q":1.0,"g":0.0},{"q":-1.0,"g":0.0}],"speed":0.5}"#;
        let p: Path<f64> = serde_json::from_str(json).unwrap();
        assert_abs_diff_eq!(p.total_time(), 4.0, epsilon = 1e-15);
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Path<f64>>(&back).unwrap(), p);

        let bad = r#"{"waypoints":[{"q":1.0,"g":0.0},{"q":1.0,"g":0.0}],"speed":0.5}"#;
        assert!(serde_json::from_str::<Path<f64>>(bad).is_err());
        let proto: Protocol<f64> = serde_json::from_str(r#"{"kind":"spike","x_m":-0.5,"h":1.0}"#).unwrap();
        assert_eq!(proto, Protocol::Spike { x_m: -0.5, h: 1.0, extent: 1.0 });
        let dir: Direction = serde_json::from_str(r#""negative""#).unwrap();
        assert_eq!(dir, Direction::Ccw);
    }
}
