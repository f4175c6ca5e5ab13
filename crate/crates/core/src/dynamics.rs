//! Closed-form evolution of the atomic probability amplitudes.
//!
//! With a Lorentzian reservoir the memory kernel is a single damped
//! exponential, and the two excited-state amplitudes decouple into the
//! symmetric and antisymmetric combinations `D± = D_A ± D_B`. Each combination
//! is multiplied by its own propagator `G±(t)`; the ground-state amplitude
//! `D_C` is untouched by the dynamics.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Below this value of `|R t / 2|` the propagator is evaluated from its
/// Taylor expansion instead of `sinh(x) / R`.
const SERIES_THRESHOLD: f64 = 1e-6;

/// Above this value of `|Re(R t / 2)|` the propagator is evaluated in its
/// two-exponential form so that `cosh`/`sinh` never overflow.
const EXPONENTIAL_FORM_THRESHOLD: f64 = 20.0;

/// Physical rates and couplings of the atom–cavity–reservoir system.
///
/// All rates are absolute values in a common (arbitrary) inverse-time unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Decay rate of the two degenerate excited states.
    pub gamma0: f64,
    /// Spectral width of the cavity–environment coupling.
    pub kappa: f64,
    /// Atom–cavity detuning.
    pub delta: f64,
    /// Interference parameter between the two decay channels, `|theta| <= 1`.
    pub theta: f64,
}

impl SystemParams {
    pub fn new(gamma0: f64, kappa: f64, delta: f64, theta: f64) -> Result<Self> {
        let params = Self {
            gamma0,
            kappa,
            delta,
            theta,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0.is_finite() && self.gamma0 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "gamma0 must be finite and positive, got {}",
                self.gamma0
            )));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::InvalidParams(format!(
                "kappa must be finite and positive, got {}",
                self.kappa
            )));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "delta must be finite, got {}",
                self.delta
            )));
        }
        if !(self.theta.is_finite() && self.theta.abs() <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "theta must lie in [-1, 1], got {}",
                self.theta
            )));
        }
        Ok(())
    }

    /// `κ + iΔ`, the complex decay constant of the cavity field.
    pub fn cavity_rate(&self) -> C64 {
        C64::new(self.kappa, self.delta)
    }

    /// Largest rate in the problem, used to scale integration steps.
    pub fn fastest_rate(&self) -> f64 {
        self.gamma0.max(self.kappa).max(self.delta.abs()).max(1.0)
    }
}

/// Selects the symmetric (`Plus`, `D_A + D_B`) or antisymmetric (`Minus`,
/// `D_A - D_B`) decay channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Complex probability amplitudes of the excited states `|A⟩`, `|B⟩` and the
/// ground state `|C⟩` with the reservoir in its vacuum.
///
/// The weight carried by single-excitation reservoir states is not resolved
/// per mode; it is recovered as `1 - |d_a|² - |d_b|² - |d_c|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeVector {
    pub d_a: C64,
    pub d_b: C64,
    pub d_c: C64,
}

impl AmplitudeVector {
    pub fn new(d_a: C64, d_b: C64, d_c: C64) -> Self {
        Self { d_a, d_b, d_c }
    }

    pub fn real(d_a: f64, d_b: f64, d_c: f64) -> Self {
        Self::new(d_a.into(), d_b.into(), d_c.into())
    }

    /// `cos α |A⟩ + e^{iβ} sin α |B⟩`.
    pub fn from_angles(alpha: f64, beta: f64) -> Self {
        Self::new(
            C64::new(alpha.cos(), 0.0),
            C64::from_polar(alpha.sin(), beta),
            C64::new(0.0, 0.0),
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.d_a.norm_sqr() + self.d_b.norm_sqr() + self.d_c.norm_sqr()
    }

    /// Aggregate population of the single-excitation reservoir states.
    pub fn reservoir_weight(&self) -> f64 {
        1.0 - self.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        [self.d_a, self.d_b, self.d_c]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest modulus of the componentwise difference over `d_a`, `d_b`, `d_c`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.d_a - other.d_a)
            .norm()
            .max((self.d_b - other.d_b).norm())
            .max((self.d_c - other.d_c).norm())
    }
}

impl fmt::Display for AmplitudeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(D_A = {}, D_B = {}, D_C = {})",
            self.d_a, self.d_b, self.d_c
        )
    }
}

/// Propagators of the two decay channels and the mixing factors derived
/// from them: `q1 = (G⁺ + G⁻)/2`, `q2 = (G⁺ - G⁻)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorPair {
    pub g_plus: C64,
    pub g_minus: C64,
    pub q1: C64,
    pub q2: C64,
}

impl PropagatorPair {
    pub fn from_channels(g_plus: C64, g_minus: C64) -> Self {
        Self {
            g_plus,
            g_minus,
            q1: (g_plus + g_minus) * 0.5,
            q2: (g_plus - g_minus) * 0.5,
        }
    }

    /// Applies the mixing matrix `[[q1, q2], [q2, q1]]` to the excited-state
    /// amplitudes; `d_c` passes through.
    pub fn apply(&self, amp: &AmplitudeVector) -> AmplitudeVector {
        AmplitudeVector {
            d_a: self.q1 * amp.d_a + self.q2 * amp.d_b,
            d_b: self.q2 * amp.d_a + self.q1 * amp.d_b,
            d_c: amp.d_c,
        }
    }
}

/// Memory kernel of the integro-differential amplitude equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    /// Same-channel kernel `f_AA = f_BB`.
    pub direct: C64,
    /// Cross-channel kernel `f_AB = f_BA = θ f`.
    pub cross: C64,
}

/// `R± = sqrt((κ + iΔ)² - 2γ0(1 ± θ)κ)` on the principal branch.
///
/// Nothing downstream depends on which root is returned.
pub fn complex_rate(params: &SystemParams, branch: Branch) -> C64 {
    let a = params.cavity_rate();
    let coupling = 1.0 + branch.sign() * params.theta;
    if coupling == 0.0 {
        // decoupled channel: R = a exactly
        return a;
    }
    (a * a - 2.0 * params.gamma0 * coupling * params.kappa).sqrt()
}

/// Kernel at time lag `tau`: `f(τ) = (γ0 κ / 2) exp(-(κ + iΔ) τ)`.
///
/// The phase follows from integrating the Lorentzian spectral density
/// against `exp(-iΔτ) exp(i(ω0 - ω)τ)`.
pub fn memory_kernel(params: &SystemParams, tau: f64) -> KernelValue {
    let direct = 0.5 * params.gamma0 * params.kappa * (-params.cavity_rate() * tau).exp();
    KernelValue {
        direct,
        cross: params.theta * direct,
    }
}

/// `G(t)` for cavity rate `a = κ + iΔ` and channel rate `rate = R`.
///
/// Even in `rate`, so either square root gives the same value.
pub fn channel_propagator(a: C64, rate: C64, t: f64) -> C64 {
    let half_t = 0.5 * t;
    let x = rate * half_t;
    let at = a * half_t;
    if rate == a {
        return C64::new(1.0, 0.0);
    }
    if x.norm() < SERIES_THRESHOLD {
        // cosh x ≈ 1 + x²/2, sinh(x)/x ≈ 1 + x²/6
        let x2 = x * x;
        (-at).exp() * (1.0 + 0.5 * x2 + at * (1.0 + x2 / 6.0))
    } else if x.re.abs() > EXPONENTIAL_FORM_THRESHOLD {
        let ratio = a / rate;
        0.5 * (1.0 + ratio) * (x - at).exp() + 0.5 * (1.0 - ratio) * (-x - at).exp()
    } else {
        (-at).exp() * (x.cosh() + a / rate * x.sinh())
    }
}

/// Both channel propagators and the mixing factors at time `t >= 0`.
pub fn propagator(params: &SystemParams, t: f64) -> PropagatorPair {
    let a = params.cavity_rate();
    PropagatorPair::from_channels(
        channel_propagator(a, complex_rate(params, Branch::Plus), t),
        channel_propagator(a, complex_rate(params, Branch::Minus), t),
    )
}

/// Large-time limit of the propagators.
///
/// A channel survives (`G → 1`) only when its coupling `1 ± θ` vanishes;
/// otherwise `Re(R) < κ` and the channel decays to zero.
pub fn asymptotic_propagator(params: &SystemParams) -> PropagatorPair {
    let limit = |coupling: f64| {
        if coupling == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    };
    PropagatorPair::from_channels(limit(1.0 + params.theta), limit(1.0 - params.theta))
}

/// Amplitudes at time `t` from amplitudes at time zero.
///
/// Linear, so sub-normalized inputs (after a weak measurement) evolve the
/// same way as normalized ones.
pub fn evolve_amplitudes(
    initial: &AmplitudeVector,
    params: &SystemParams,
    t: f64,
) -> AmplitudeVector {
    propagator(params, t).apply(initial)
}

/// Large-time limit of [`evolve_amplitudes`].
pub fn asymptotic_amplitudes(initial: &AmplitudeVector, params: &SystemParams) -> AmplitudeVector {
    asymptotic_propagator(params).apply(initial)
}
