//! The normalized two-band Hamiltonian, its biorthogonal eigensystem, and the
//! conversion from laboratory parameters to normalized control coordinates.
//!
//! Everything here is stated for the traceless matrix
//!
//! ```text
//! H = [[ k(-q + i g),  1          ],
//!      [ 1,            k(q - i g) ]]
//! ```
//!
//! with `k = 2 E_r / Omega_R`. Closed forms are written for `k = 1`; other
//! values are handled by scaling `(q, g)` by `k` first.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, Cplx, Real};

/// A point `(q, g)` of the control plane: normalized quasimomentum and
/// normalized loss contrast.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlPoint<T> {
    pub q: T,
    pub g: T,
}

impl<T: Real> ControlPoint<T> {
    pub fn new(q: T, g: T) -> Self {
        Self { q, g }
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.g.is_finite()
    }

    pub fn distance(&self, other: &Self) -> T {
        (other.q - self.q).hypot(other.g - self.g)
    }

    /// The complex diagonal entry `-q + i g` at unit `kappa`.
    pub(crate) fn detuning(&self, kappa: T) -> Cplx<T> {
        Complex::new(-self.q * kappa, self.g * kappa)
    }
}

/// Dense 2x2 complex matrix in the spin basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian2<T> {
    pub h11: Cplx<T>,
    pub h12: Cplx<T>,
    pub h21: Cplx<T>,
    pub h22: Cplx<T>,
}

impl<T: Real> Hamiltonian2<T> {
    pub fn apply(&self, up: Cplx<T>, down: Cplx<T>) -> (Cplx<T>, Cplx<T>) {
        (self.h11 * up + self.h12 * down, self.h21 * up + self.h22 * down)
    }

    pub fn det(&self) -> Cplx<T> {
        self.h11 * self.h22 - self.h12 * self.h21
    }

    pub fn trace(&self) -> Cplx<T> {
        self.h11 + self.h22
    }
}

/// Two-component state `(psi_up, psi_down)` together with the running log of
/// norm factors that were divided out during evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoState<T> {
    pub up: Cplx<T>,
    pub down: Cplx<T>,
    pub log_norm: T,
}

impl<T: Real> TwoState<T> {
    pub fn new(up: Cplx<T>, down: Cplx<T>) -> Self {
        Self { up, down, log_norm: T::zero() }
    }

    pub fn norm_sqr(&self) -> T {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.up.norm_sqr() == T::zero() && self.down.norm_sqr() == T::zero()
    }

    /// Scales the amplitudes to unit Euclidean norm, accumulating `ln(norm)`.
    pub fn renormalize(&mut self) {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            self.up = self.up / n;
            self.down = self.down / n;
            self.log_norm = self.log_norm + n.ln();
        }
    }

    /// Plain inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &TwoState<T>) -> Cplx<T> {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    pub fn scaled(&self, factor: Cplx<T>) -> Self {
        Self { up: self.up * factor, down: self.down * factor, log_norm: self.log_norm }
    }
}

/// Eigenvalues, right and left eigenvectors at one control point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem<T> {
    pub delta_e: Cplx<T>,
    pub e_plus: Cplx<T>,
    pub e_minus: Cplx<T>,
    pub theta: Cplx<T>,
    pub psi_plus: TwoState<T>,
    pub psi_minus: TwoState<T>,
    pub phi_plus: TwoState<T>,
    pub phi_minus: TwoState<T>,
}

impl<T: Real> Eigensystem<T> {
    /// Right eigenvector of the upper (`true`) or lower band.
    pub fn right(&self, upper: bool) -> &TwoState<T> {
        if upper {
            &self.psi_plus
        } else {
            &self.psi_minus
        }
    }
}

/// Model-wide constants: the coupling ratio `kappa = 2 E_r / Omega_R` and the
/// radius around the exceptional point inside which eigenvectors are refused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model<T> {
    pub kappa: T,
    pub ep_tolerance: T,
}

impl<T: Real> Default for Model<T> {
    fn default() -> Self {
        Self { kappa: T::one(), ep_tolerance: T::lit(1e-9) }
    }
}

impl<T: Real> Model<T> {
    pub fn new(kappa: T, ep_tolerance: T) -> Result<Self> {
        if !(kappa.is_finite() && kappa > T::zero()) {
            return Err(Error::InvalidInput(format!("kappa must be positive and finite, got {kappa}")));
        }
        if !(ep_tolerance.is_finite() && ep_tolerance >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "ep_tolerance must be non-negative and finite, got {ep_tolerance}"
            )));
        }
        Ok(Self { kappa, ep_tolerance })
    }

    pub fn build_hamiltonian(&self, p: ControlPoint<T>) -> Result<Hamiltonian2<T>> {
        if !p.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite control point ({}, {})", p.q, p.g)));
        }
        Ok(self.hamiltonian_unchecked(p))
    }

    #[inline]
    pub(crate) fn hamiltonian_unchecked(&self, p: ControlPoint<T>) -> Hamiltonian2<T> {
        let d = p.detuning(self.kappa);
        let one = Complex::new(T::one(), T::zero());
        Hamiltonian2 { h11: d, h12: one, h21: one, h22: -d }
    }

    /// Half the band splitting, `dE = sqrt(1 + d^2)` with `d = k(-q + i g)`,
    /// on the sheet `Re >= 0` (and `Im >= 0` when `Re = 0`).
    pub fn delta_e(&self, p: ControlPoint<T>) -> Cplx<T> {
        let d = p.detuning(self.kappa);
        branch_sqrt(Complex::new(T::one(), T::zero()) + d * d)
    }

    pub fn eigensystem(&self, p: ControlPoint<T>) -> Result<Eigensystem<T>> {
        if !p.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite control point ({}, {})", p.q, p.g)));
        }
        let d = p.detuning(self.kappa);
        let delta_e = self.delta_e(p);
        let magnitude = delta_e.norm();
        if magnitude <= self.ep_tolerance {
            return Err(Error::EpDegenerate {
                magnitude: magnitude.as_f64(),
                tolerance: self.ep_tolerance.as_f64(),
            });
        }

        // tan(theta) = dE + d = 1 / (dE - d); use the better-conditioned form.
        let sum = delta_e + d;
        let diff = delta_e - d;
        let tan_theta = if sum.norm_sqr() >= diff.norm_sqr() { sum } else { diff.inv() };
        let theta = tan_theta.atan();
        let (s, c) = (theta.sin(), theta.cos());
        let norm = (s.norm_sqr() + c.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > T::zero() && is_finite_c(theta)) {
            return Err(Error::EpDegenerate {
                magnitude: magnitude.as_f64(),
                tolerance: self.ep_tolerance.as_f64(),
            });
        }

        let psi_plus = TwoState::new(s / norm, c / norm);
        let psi_minus = TwoState::new(-c / norm, s / norm);
        // <phi_i|psi_j> = delta_ij with <a|b> = sum conj(a_k) b_k.
        let phi_plus = TwoState::new(s.conj() * norm, c.conj() * norm);
        let phi_minus = TwoState::new(-c.conj() * norm, s.conj() * norm);

        Ok(Eigensystem {
            delta_e,
            e_plus: delta_e,
            e_minus: -delta_e,
            theta,
            psi_plus,
            psi_minus,
            phi_plus,
            phi_minus,
        })
    }
}

/// Principal square root with the tie-break `Im >= 0` on the imaginary axis.
pub fn branch_sqrt<T: Real>(z: Cplx<T>) -> Cplx<T> {
    let r = z.sqrt();
    if r.re < T::zero() || (r.re == T::zero() && r.im < T::zero()) {
        -r
    } else {
        r
    }
}

/// `<S> = (|up|^2 - |down|^2) / (|up|^2 + |down|^2)`.
pub fn spin_polarization<T: Real>(s: &TwoState<T>) -> Result<T> {
    let up = s.up.norm_sqr();
    let down = s.down.norm_sqr();
    let total = up + down;
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::InvalidInput("spin polarization of a zero or non-finite state".into()));
    }
    Ok((up - down) / total)
}

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Laboratory parameters. Energies and loss rates are given as angular
/// frequencies (energy / hbar, in rad/s); lengths in metres; mass in kg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams<T> {
    /// Raman wavelength.
    pub lambda_raman: T,
    /// Intersection angle of the Raman beams, radians.
    pub alpha: T,
    pub omega_r: T,
    /// Two-photon detuning.
    pub delta_detune: T,
    pub gamma_up: T,
    pub gamma_down: T,
    /// Quasimomentum along x, 1/m.
    pub qx_phys: T,
    pub mass: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedParams<T> {
    pub q: T,
    pub g: T,
    pub kappa: T,
    /// Seconds per unit of normalized time, `2 / Omega_R`. The normalized time
    /// is `t_norm = t * Omega_R / 2`.
    pub time_scale: T,
}

impl<T: Real> NormalizedParams<T> {
    pub fn to_normalized_time(&self, seconds: T) -> T {
        seconds / self.time_scale
    }

    pub fn to_physical_time(&self, t_norm: T) -> T {
        t_norm * self.time_scale
    }

    pub fn control_point(&self) -> ControlPoint<T> {
        ControlPoint::new(self.q, self.g)
    }
}

impl<T: Real> PhysicalParams<T> {
    /// Raman recoil momentum `k_r = (2 pi / lambda) sin(alpha / 2)`.
    pub fn recoil_momentum(&self) -> T {
        T::TAU() / self.lambda_raman * (self.alpha / T::lit(2.0)).sin()
    }

    /// Recoil energy over hbar, `hbar k_r^2 / (2 m)` in rad/s.
    pub fn recoil_frequency(&self) -> T {
        let k = self.recoil_momentum();
        T::lit(HBAR) / self.mass * k * k / T::lit(2.0)
    }
}

/// Maps laboratory parameters onto `(q, g, kappa)`. The constant energy shift
/// `E_0` that makes the Hamiltonian traceless only contributes a global phase
/// and a global decay factor to the state and is not tracked.
pub fn physical_to_normalized<T: Real>(p: &PhysicalParams<T>) -> Result<NormalizedParams<T>> {
    let fields = [
        p.lambda_raman,
        p.alpha,
        p.omega_r,
        p.delta_detune,
        p.gamma_up,
        p.gamma_down,
        p.qx_phys,
        p.mass,
    ];
    if fields.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite physical parameter".into()));
    }
    if p.lambda_raman <= T::zero() {
        return Err(Error::InvalidInput("lambda_raman must be positive".into()));
    }
    if p.omega_r <= T::zero() {
        return Err(Error::InvalidInput("omega_r must be positive".into()));
    }
    if p.mass <= T::zero() {
        return Err(Error::InvalidInput("mass must be positive".into()));
    }
    let k_r = p.recoil_momentum();
    let e_r = p.recoil_frequency();
    if !(k_r > T::zero()) || !(e_r > T::zero()) {
        return Err(Error::InvalidInput("beam angle gives a non-positive recoil momentum".into()));
    }
    let two = T::lit(2.0);
    Ok(NormalizedParams {
        q: two * p.qx_phys / k_r - p.delta_detune / (two * e_r),
        g: (p.gamma_down - p.gamma_up) / (T::lit(4.0) * e_r),
        kappa: two * e_r / p.omega_r,
        time_scale: two / p.omega_r,
    })
}

/// `<psi|H|psi> / <psi|psi>`.
pub fn rayleigh_quotient<T: Real>(h: &Hamiltonian2<T>, s: &TwoState<T>) -> Cplx<T> {
    let (a, b) = h.apply(s.up, s.down);
    (s.up.conj() * a + s.down.conj() * b) / s.norm_sqr()
}
