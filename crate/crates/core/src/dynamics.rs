//! Time evolution along a path and projection onto the instantaneous
//! biorthogonal eigenbasis.
//!
//! The state obeys `i d|psi>/dt = H(q(t), g(t)) |psi>` and is advanced with
//! the classical fourth-order Runge-Kutta scheme. Each path segment is split
//! into an integer number of equal steps no longer than the requested step,
//! so no step straddles a corner of the path.
//!
//! Because `H` is traceless but not Hermitian, one band grows like
//! `exp(Im(dE) t)` relative to the other. The state is rescaled to unit norm
//! after every step and the discarded factor is kept in `log_norm`; every
//! diagnostic recorded here is invariant under that rescaling.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{spin_polarization, ControlPoint, Eigensystem, Model, TwoState};
use crate::path::Path;
use crate::scalar::{Cplx, Real};

/// Coefficients of a state in the right eigenbasis:
/// `|psi> = c_plus |psi_plus> + c_minus |psi_minus>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandCoefficients<T> {
    pub c_plus: Cplx<T>,
    pub c_minus: Cplx<T>,
}

impl<T: Real> BandCoefficients<T> {
    pub fn new(c_plus: Cplx<T>, c_minus: Cplx<T>) -> Self {
        Self { c_plus, c_minus }
    }

    pub fn is_zero(&self) -> bool {
        self.c_plus.norm_sqr() == T::zero() && self.c_minus.norm_sqr() == T::zero()
    }

    /// `c_plus |psi_plus> + c_minus |psi_minus>`.
    pub fn reconstruct(&self, eig: &Eigensystem<T>) -> TwoState<T> {
        TwoState::new(
            self.c_plus * eig.psi_plus.up + self.c_minus * eig.psi_minus.up,
            self.c_plus * eig.psi_plus.down + self.c_minus * eig.psi_minus.down,
        )
    }

    /// `b = (c_plus - c_minus) / (c_plus + c_minus)`; `-1` on the lower band,
    /// `+1` on the upper band.
    pub fn b_ratio(&self) -> Result<Cplx<T>> {
        let den = self.c_plus + self.c_minus;
        if den.norm_sqr() == T::zero() {
            return Err(Error::InvalidInput("c_plus + c_minus = 0: b ratio is unbounded".into()));
        }
        Ok((self.c_plus - self.c_minus) / den)
    }
}

/// `c_i = <phi_i|psi>`.
pub fn project<T: Real>(state: &TwoState<T>, eig: &Eigensystem<T>) -> BandCoefficients<T> {
    BandCoefficients { c_plus: eig.phi_plus.inner(state), c_minus: eig.phi_minus.inner(state) }
}

/// Complex energy expectation and band index of a state given by its band
/// coefficients.
///
/// `<E> = sum |c_i|^2 E_i / sum |c_i|^2` and the band index is the real part
/// of `2 <E> / (E_plus - E_minus)`, which lies in `[-1, 1]`.
pub fn band_observables<T: Real>(coeffs: &BandCoefficients<T>, eig: &Eigensystem<T>) -> Result<(Cplx<T>, T)> {
    let wp = coeffs.c_plus.norm_sqr();
    let wm = coeffs.c_minus.norm_sqr();
    let total = wp + wm;
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::InvalidInput("band observables of zero or non-finite coefficients".into()));
    }
    let exp_e = (eig.e_plus * wp + eig.e_minus * wm) / total;
    let gap = eig.e_plus - eig.e_minus;
    let index = exp_e * T::lit(2.0) / gap;
    debug_assert!(index.im.abs() <= T::lit(1e-6), "band index not real: {index}");
    let band_index = index.re.max(-T::one()).min(T::one());
    Ok((exp_e, band_index))
}

/// Band-resolved diagnostics at one instant. Absent when the instant is
/// within tolerance of the exceptional point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandDiagnostics<T> {
    pub coeffs: BandCoefficients<T>,
    pub exp_e: Cplx<T>,
    pub band_index: T,
    pub e_plus: Cplx<T>,
    pub e_minus: Cplx<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample<T> {
    pub t: T,
    pub point: ControlPoint<T>,
    pub state: TwoState<T>,
    pub spin: T,
    pub bands: Option<BandDiagnostics<T>>,
}

impl<T: Real> TrajectorySample<T> {
    pub fn band_index(&self) -> Option<T> {
        self.bands.map(|b| b.band_index)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub samples: Vec<TrajectorySample<T>>,
    pub path: Path<T>,
    pub step_size: T,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &TrajectorySample<T> {
        self.samples.last().expect("trajectory has samples")
    }

    pub fn final_band_index(&self) -> Option<T> {
        self.last().band_index()
    }
}

/// Starting state of an evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState<T> {
    Lower,
    Upper,
    Coefficients(BandCoefficients<T>),
}

impl<T: Real> InitialState<T> {
    pub fn resolve(&self, eig: &Eigensystem<T>) -> Result<TwoState<T>> {
        match self {
            InitialState::Lower => Ok(eig.psi_minus),
            InitialState::Upper => Ok(eig.psi_plus),
            InitialState::Coefficients(c) => {
                if c.is_zero() {
                    return Err(Error::InvalidInput("initial coefficients are both zero".into()));
                }
                Ok(c.reconstruct(eig))
            }
        }
    }

    /// `b(0)` of this initial state.
    pub fn b_ratio(&self) -> Result<Cplx<T>> {
        match self {
            InitialState::Lower => Ok(Complex::new(-T::one(), T::zero())),
            InitialState::Upper => Ok(Complex::new(T::one(), T::zero())),
            InitialState::Coefficients(c) => c.b_ratio(),
        }
    }
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<T> {
    /// Largest allowed step in normalized time.
    pub dt: T,
    /// Record every `stride`-th step; the first and last instants are always
    /// recorded.
    pub stride: usize,
    /// Rescale the state to unit norm after every step.
    pub renormalize: bool,
}

impl<T: Real> Default for StepControl<T> {
    fn default() -> Self {
        Self { dt: T::lit(1e-3), stride: 10, renormalize: true }
    }
}

impl<T: Real> StepControl<T> {
    pub fn with_dt(dt: T) -> Self {
        Self { dt, ..Self::default() }
    }

    /// Records only the first and last instants.
    pub fn endpoints_only(dt: T) -> Self {
        Self { dt, stride: usize::MAX, renormalize: true }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(Error::InvalidInput(format!("step size must be positive, got {}", self.dt)));
        }
        if self.stride == 0 {
            return Err(Error::InvalidInput("sample stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Records the state at one instant with all diagnostics.
pub fn sample<T: Real>(model: &Model<T>, t: T, point: ControlPoint<T>, state: &TwoState<T>) -> Result<TrajectorySample<T>> {
    let spin = spin_polarization(state)?;
    let bands = match model.eigensystem(point) {
        Ok(eig) => {
            let coeffs = project(state, &eig);
            let (exp_e, band_index) = band_observables(&coeffs, &eig)?;
            Some(BandDiagnostics { coeffs, exp_e, band_index, e_plus: eig.e_plus, e_minus: eig.e_minus })
        }
        Err(Error::EpDegenerate { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TrajectorySample { t, point, state: *state, spin, bands })
}

#[inline]
fn derivative<T: Real>(model: &Model<T>, p: ControlPoint<T>, up: Cplx<T>, down: Cplx<T>) -> (Cplx<T>, Cplx<T>) {
    // d/dt psi = -i H psi
    let h = model.hamiltonian_unchecked(p);
    let (a, b) = h.apply(up, down);
    (Complex::new(a.im, -a.re), Complex::new(b.im, -b.re))
}

/// Advances `state` by one classical Runge-Kutta step of length `h` while the
/// control point moves as `point(tau)`.
#[inline]
pub fn rk4_step<T: Real>(
    model: &Model<T>,
    state: &mut TwoState<T>,
    tau: T,
    h: T,
    point: impl Fn(T) -> ControlPoint<T>,
) {
    let two = T::lit(2.0);
    let half = h / two;
    let (u, d) = (state.up, state.down);
    let p0 = point(tau);
    let pm = point(tau + half);
    let p1 = point(tau + h);
    let k1 = derivative(model, p0, u, d);
    let k2 = derivative(model, pm, u + k1.0 * half, d + k1.1 * half);
    let k3 = derivative(model, pm, u + k2.0 * half, d + k2.1 * half);
    let k4 = derivative(model, p1, u + k3.0 * h, d + k3.1 * h);
    let sixth = h / T::lit(6.0);
    state.up = u + (k1.0 + k2.0 * two + k3.0 * two + k4.0) * sixth;
    state.down = d + (k1.1 + k2.1 * two + k3.1 * two + k4.1) * sixth;
}

/// Integrates the Schrodinger equation along `path` from `initial`.
pub fn evolve<T: Real>(
    model: &Model<T>,
    path: &Path<T>,
    initial: &InitialState<T>,
    step: &StepControl<T>,
) -> Result<Trajectory<T>> {
    step.validate()?;
    let start = path.start();
    let eig0 = model.eigensystem(start)?;
    let mut state = initial.resolve(&eig0)?;
    if step.renormalize {
        state.renormalize();
    }

    let mut samples = vec![sample(model, T::zero(), start, &state)?];
    let total_time = path.total_time();
    let n_segments = path.segments().len();
    let mut k: usize = 0;
    for (si, seg) in path.segments().iter().enumerate() {
        let n = (seg.duration / step.dt).ceil().to_usize().unwrap_or(1).max(1);
        let h = seg.duration / T::from_usize(n).expect("step count fits scalar");
        for j in 0..n {
            let tau = T::from_usize(j).expect("step index fits scalar") * h;
            rk4_step(model, &mut state, tau, h, |s| seg.point_at(s));
            if step.renormalize {
                state.renormalize();
            }
            k += 1;
            let last_step = j + 1 == n;
            let path_end = last_step && si + 1 == n_segments;
            if k.is_multiple_of(step.stride) || path_end {
                let (t, point) = if path_end {
                    (total_time, seg.end)
                } else if last_step {
                    (seg.start_time + seg.duration, seg.end)
                } else {
                    let local = T::from_usize(j + 1).expect("step index fits scalar") * h;
                    (seg.start_time + local, seg.point_at(local))
                };
                samples.push(sample(model, t, point, &state)?);
            }
        }
    }

    Ok(Trajectory { samples, path: path.clone(), step_size: step.dt })
}
