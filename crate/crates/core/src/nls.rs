//! Power-law ground states `φ_xx + f(φ²)φ + ωφ = 0`, `f(s) = (p+1)sᵖ`, the
//! conjugate-point function `c(t)` and the slope verdict.
//!
//! Everything is closed form except the tail integral `∫_{−∞}^t 2φφ_ω`,
//! which is done by Simpson's rule on a truncated line.

use crate::error::{Error, Result};
use crate::oracle::quadrature;
use crate::scalar::Real;

/// Default exclusion radius around `t = 0`, where `φ_x` vanishes.
pub const DEFAULT_WINDOW: f64 = 1e-3;
/// Radius at which the divergence properties are probed.
pub const PROBE_WINDOW: f64 = 1e-6;
/// Threshold for the one-sided divergence checks.
pub const DIVERGENCE_THRESHOLD: f64 = 1e3;
/// Slopes at most this large in magnitude count as critical.
pub const SLOPE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawNonlinearity<T> {
    p: T,
}

impl<T: Real> PowerLawNonlinearity<T> {
    pub fn new(p: T) -> Result<Self> {
        if !(p > T::zero() && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("exponent p = {p} must be positive")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// `f(s) = (p+1)·sᵖ`.
    pub fn f(&self, s: T) -> T {
        (self.p + T::one()) * s.powf(self.p)
    }

    pub fn f_prime(&self, s: T) -> T {
        self.p * (self.p + T::one()) * s.powf(self.p - T::one())
    }

    /// `g(u) = u⁻¹∫₀ᵘ f = uᵖ`.
    pub fn g(&self, u: T) -> Result<T> {
        if !(u > T::zero()) {
            return Err(Error::InvalidArgument(format!("g needs u > 0, got {u}")));
        }
        Ok(u.powf(self.p))
    }

    pub fn g_prime(&self, u: T) -> Result<T> {
        Ok(self.p * self.g(u)? / u)
    }
}

/// `g(u)` for the power law with exponent `p`.
pub fn g_of<T: Real>(nonlinearity: &PowerLawNonlinearity<T>, u: T) -> Result<T> {
    nonlinearity.g(u)
}

/// `φ(x) = |ω|^{1/(2p)}·sech^{1/p}(pκx)`, `κ = √|ω|`, with analytic
/// derivatives in x and ω.
#[derive(Debug, Clone, Copy)]
pub struct SolitonProfile<T> {
    pub nonlinearity: PowerLawNonlinearity<T>,
    pub omega: T,
    kappa: T,
    amplitude: T,
}

impl<T: Real> SolitonProfile<T> {
    pub fn p(&self) -> T {
        self.nonlinearity.p
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    fn tanh_arg(&self, x: T) -> T {
        (self.p() * self.kappa * x).tanh()
    }

    pub fn phi(&self, x: T) -> T {
        let sech = T::one() / (self.p() * self.kappa * x).cosh();
        self.amplitude * sech.powf(T::one() / self.p())
    }

    pub fn phi_x(&self, x: T) -> T {
        -self.kappa * self.phi(x) * self.tanh_arg(x)
    }

    pub fn phi_xx(&self, x: T) -> T {
        let t = self.tanh_arg(x);
        let pk = self.p() * self.kappa;
        -self.kappa * (self.phi_x(x) * t + self.phi(x) * pk * (T::one() - t * t))
    }

    fn h(&self, x: T) -> T {
        T::one() / (self.p() * self.kappa) - x * self.tanh_arg(x)
    }

    fn h_x(&self, x: T) -> T {
        let t = self.tanh_arg(x);
        -t - x * self.p() * self.kappa * (T::one() - t * t)
    }

    pub fn phi_omega(&self, x: T) -> T {
        -self.phi(x) * self.h(x) / (T::lit(2.0) * self.kappa)
    }

    pub fn phi_omega_x(&self, x: T) -> T {
        -(self.phi_x(x) * self.h(x) + self.phi(x) * self.h_x(x)) / (T::lit(2.0) * self.kappa)
    }

    /// `L₊u = −u″ − f(φ²)u − 2f′(φ²)φ²u − ωu`, given `u` and `u″` at `x`.
    pub fn l_plus(&self, x: T, u: T, u_xx: T) -> T {
        let s = self.phi(x).powi(2);
        let nl = &self.nonlinearity;
        -u_xx - nl.f(s) * u - T::lit(2.0) * nl.f_prime(s) * s * u - self.omega * u
    }

    /// Half-width beyond which `φ² < 1e-14·φ(0)²`, at least `20/κ`.
    pub fn truncation(&self) -> T {
        let mut x = T::lit(20.0) / self.kappa;
        let floor = T::lit(1e-14) * self.amplitude.powi(2);
        while self.phi(x).powi(2) >= floor {
            x = x * T::lit(1.5);
        }
        x
    }

    /// `∫_{−X}^t 2φφ_ω`.
    pub fn tail_derivative(&self, t: T) -> Result<T> {
        let x0 = -self.truncation();
        if t <= x0 {
            return Ok(T::zero());
        }
        let target = T::lit(2e-3) / self.kappa;
        let mut n = ((t - x0) / target).ceil().to_usize().unwrap_or(2).max(2);
        n += n % 2;
        let h = (t - x0) / T::from_usize_lossy(n);
        let samples: Vec<T> = (0..=n)
            .map(|k| {
                let x = if k == n { t } else { x0 + h * T::from_usize_lossy(k) };
                T::lit(2.0) * self.phi(x) * self.phi_omega(x)
            })
            .collect();
        quadrature(&samples, h)
    }
}

/// The profile for exponent `p` and frequency `omega < 0`.
pub fn soliton<T: Real>(p: T, omega: T) -> Result<SolitonProfile<T>> {
    let nonlinearity = PowerLawNonlinearity::new(p)?;
    if !(omega < T::zero()) {
        return Err(Error::NoDecayingState { omega: omega.to_f64_lossy() });
    }
    let w = omega.abs();
    Ok(SolitonProfile { nonlinearity, omega, kappa: w.sqrt(), amplitude: w.powf(T::one() / (T::lit(2.0) * p)) })
}

/// `c(t) = −φ²φ_ω/φ_x + ∂_ω∫_{−∞}^t φ²` outside the default window.
pub fn c_function<T: Real>(profile: &SolitonProfile<T>, t: T) -> Result<T> {
    c_function_with_window(profile, t, T::lit(DEFAULT_WINDOW))
}

pub fn c_function_with_window<T: Real>(profile: &SolitonProfile<T>, t: T, window: T) -> Result<T> {
    if t.abs() <= window {
        return Err(Error::SingularityWindow { t: t.abs().to_f64_lossy(), delta: window.to_f64_lossy() });
    }
    let phi = profile.phi(t);
    Ok(-phi * phi * profile.phi_omega(t) / profile.phi_x(t) + profile.tail_derivative(t)?)
}

/// `c′(t) = φ⁴/(2φ_x²)`.
pub fn c_prime<T: Real>(profile: &SolitonProfile<T>, t: T) -> T {
    profile.phi(t).powi(4) / (T::lit(2.0) * profile.phi_x(t).powi(2))
}

/// `∂_ω ∫ φ²` by quadrature over the truncated line.
pub fn vk_slope<T: Real>(p: T, omega: T) -> Result<T> {
    let s = soliton(p, omega)?;
    s.tail_derivative(s.truncation())
}

/// Residuals of the closed form on a grid over the truncated line.
#[derive(Debug, Clone, Copy)]
pub struct ProfileCheck<T> {
    /// `max |φ_xx + f(φ²)φ + ωφ|`.
    pub ode_residual: T,
    /// `max |φ_x² + (ω + g(φ²))φ²|`.
    pub conservation: T,
    /// `max |φ(−x) − φ(x)|`.
    pub asymmetry: T,
    pub positive: bool,
    /// `max |L₊φ_x|`.
    pub kernel_phi_x: T,
    /// `max |L₊φ_ω − φ|`.
    pub kernel_phi_omega: T,
}

impl<T: Real> ProfileCheck<T> {
    pub fn passes(&self) -> bool {
        self.ode_residual <= T::lit(1e-9)
            && self.conservation <= T::lit(1e-9)
            && self.asymmetry <= T::lit(1e-12)
            && self.positive
            && self.kernel_phi_x <= T::lit(1e-7)
            && self.kernel_phi_omega <= T::lit(1e-6)
    }
}

/// Five-point second difference.
fn second_difference<T: Real>(f: impl Fn(T) -> T, x: T, h: T) -> T {
    let (a, b) = (f(x + h) + f(x - h), f(x + T::lit(2.0) * h) + f(x - T::lit(2.0) * h));
    (T::lit(16.0) * a - b - T::lit(30.0) * f(x)) / (T::lit(12.0) * h * h)
}

pub fn check_profile<T: Real>(s: &SolitonProfile<T>, points: usize) -> Result<ProfileCheck<T>> {
    let x_max = s.truncation();
    let xs = crate::model::Interval::new(-x_max, x_max)?.grid(points);
    let nl = &s.nonlinearity;
    let h = T::lit(1e-3);
    let mut c = ProfileCheck {
        ode_residual: T::zero(),
        conservation: T::zero(),
        asymmetry: T::zero(),
        positive: true,
        kernel_phi_x: T::zero(),
        kernel_phi_omega: T::zero(),
    };
    for &x in &xs {
        let phi = s.phi(x);
        let sq = phi * phi;
        c.positive &= phi > T::zero();
        if !(phi > T::zero()) {
            continue;
        }
        c.ode_residual = c.ode_residual.max((s.phi_xx(x) + nl.f(sq) * phi + s.omega * phi).abs());
        c.conservation = c.conservation.max((s.phi_x(x).powi(2) + (s.omega + nl.g(sq)?) * sq).abs());
        c.asymmetry = c.asymmetry.max((s.phi(-x) - phi).abs());
        let dxx = second_difference(|y| s.phi_x(y), x, h);
        c.kernel_phi_x = c.kernel_phi_x.max(s.l_plus(x, s.phi_x(x), dxx).abs());
        let dww = second_difference(|y| s.phi_omega(y), x, h);
        c.kernel_phi_omega = c.kernel_phi_omega.max((s.l_plus(x, s.phi_omega(x), dww) - phi).abs());
    }
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct PropertyReport<T> {
    /// `|c(−T)|`.
    pub far_left: T,
    /// `c(−δ)` and `c(+δ)` at the probe radius.
    pub left_of_zero: T,
    pub right_of_zero: T,
    /// `|c(T) − vk_slope|`.
    pub far_right_gap: T,
    /// Largest relative gap between the `c′` identity and central
    /// differences of `c`.
    pub derivative_gap: T,
    /// Smallest sampled `c′`.
    pub min_derivative: T,
    /// `max |φ_ωφ_xx − φ_ωxφ_x − ½φ²|`.
    pub wronskian_gap: T,
    pub probe_window: T,
    pub far: T,
    pub vk_slope: T,
}

impl<T: Real> PropertyReport<T> {
    pub fn tail_vanishes(&self) -> bool {
        self.far_left < T::lit(1e-6)
    }

    pub fn diverges_up_left(&self) -> bool {
        self.left_of_zero > T::lit(DIVERGENCE_THRESHOLD)
    }

    pub fn diverges_down_right(&self) -> bool {
        self.right_of_zero < -T::lit(DIVERGENCE_THRESHOLD)
    }

    pub fn limit_is_slope(&self) -> bool {
        self.far_right_gap < T::lit(1e-6)
    }

    pub fn increasing(&self) -> bool {
        self.min_derivative > T::zero() && self.derivative_gap < T::lit(1e-4)
    }

    pub fn wronskian_holds(&self) -> bool {
        self.wronskian_gap < T::lit(1e-8)
    }

    pub fn all_pass(&self) -> bool {
        self.tail_vanishes()
            && self.diverges_up_left()
            && self.diverges_down_right()
            && self.limit_is_slope()
            && self.increasing()
            && self.wronskian_holds()
    }
}

/// Checks the five limiting and monotonicity properties of `c` and the
/// Wronskian identity `φ_ωφ_xx − φ_ωxφ_x = ½φ²`.
pub fn property_suite<T: Real>(s: &SolitonProfile<T>) -> Result<PropertyReport<T>> {
    let far = s.truncation();
    let probe = T::lit(PROBE_WINDOW);
    let c = |t: T| c_function_with_window(s, t, probe * T::lit(0.5));
    let slope = s.tail_derivative(far)?;
    let mut derivative_gap = T::zero();
    let mut min_derivative = T::infinity();
    for k in 0..10 {
        let mag = (T::lit(0.05) + (T::lit(4.0) - T::lit(0.05)) * T::from_usize_lossy(k) / T::lit(9.0)) / s.kappa;
        for t in [-mag, mag] {
            let h = T::lit(1e-3) * t.abs().min(T::one());
            let fd = (c(t + h)? - c(t - h)?) / (T::lit(2.0) * h);
            let exact = c_prime(s, t);
            derivative_gap = derivative_gap.max(((fd - exact) / exact).abs());
            min_derivative = min_derivative.min(exact);
        }
    }
    let scale = s.phi(T::zero()).powi(2).max(T::one());
    let wronskian_gap = crate::model::Interval::new(-far, far)?
        .grid(2001)
        .into_iter()
        .map(|x| {
            let w = s.phi_omega(x) * s.phi_xx(x) - s.phi_omega_x(x) * s.phi_x(x);
            (w - T::lit(0.5) * s.phi(x).powi(2)).abs() / scale
        })
        .fold(T::zero(), T::max);
    Ok(PropertyReport {
        far_left: c(-far)?.abs(),
        left_of_zero: c(-probe)?,
        right_of_zero: c(probe)?,
        far_right_gap: (c(far)? - slope).abs(),
        derivative_gap,
        min_derivative,
        wronskian_gap,
        probe_window: probe,
        far,
        vk_slope: slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConjugatePointExists,
    NoConjugatePoint,
    Critical,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ConjugatePointExists => "ConjugatePointExists",
            Verdict::NoConjugatePoint => "NoConjugatePoint",
            Verdict::Critical => "Critical",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct VerdictReport<T> {
    pub verdict: Verdict,
    pub vk_slope: T,
    /// Sign changes of `c` on `(δ, T]`.
    pub root_count: usize,
    pub root: Option<T>,
}

/// Number of samples of `c` on `(δ, T]` used to count roots.
pub const ROOT_SAMPLES: usize = 2000;

/// Slope sign and conjugate-point count, which must agree.
pub fn verdict<T: Real>(p: T, omega: T) -> Result<VerdictReport<T>> {
    let s = soliton(p, omega)?;
    let slope = vk_slope(p, omega)?;
    let tol = T::lit(SLOPE_TOL);
    let delta = T::lit(DEFAULT_WINDOW);
    let far = s.truncation();
    let c = |t: T| c_function_with_window(&s, t, delta * T::lit(0.5));
    let ts: Vec<T> = (0..=ROOT_SAMPLES)
        .map(|k| delta + (far - delta) * T::from_usize_lossy(k) / T::from_usize_lossy(ROOT_SAMPLES))
        .collect();
    let values: Vec<T> = ts.iter().map(|&t| c(t)).collect::<Result<_>>()?;
    let mut root_count = 0;
    let mut root = None;
    let mut last: Option<(T, T)> = None;
    for (&t, &v) in ts.iter().zip(&values) {
        if v.abs() < tol {
            continue;
        }
        if let Some((t0, v0)) = last {
            if v0 * v < T::zero() {
                root_count += 1;
                root = Some(crate::scan::bisect(c, t0, v0, t, T::lit(1e-12))?);
            }
        }
        last = Some((t, v));
    }
    let verdict = if slope > tol {
        Verdict::ConjugatePointExists
    } else if slope < -tol {
        Verdict::NoConjugatePoint
    } else {
        Verdict::Critical
    };
    let expected = usize::from(verdict == Verdict::ConjugatePointExists);
    if root_count != expected {
        return Err(Error::InternalInconsistency(format!(
            "slope {slope} but {root_count} sign changes of c on ({delta}, {far}]"
        )));
    }
    Ok(VerdictReport { verdict, vk_slope: slope, root_count, root })
}
