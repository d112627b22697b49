//! Mode propagators for u'' + lambda^theta u' + lambda^sigma u = 0.
//!
//! Each eigenvalue lambda contributes a scalar ODE whose solution is
//! u(t) = E0(t) u(0) + E1(t) u'(0). E0 and E1 are determined by the roots
//! tau of the characteristic polynomial tau^2 + lambda^theta tau +
//! lambda^sigma = 0.
//!
//! The textbook two-exponential formulas (e^{tau_+ t} - e^{tau_- t}) /
//! (tau_+ - tau_-) lose all precision near the double-root boundary and
//! overflow for stiff real roots. Instead, with a = -lambda^theta / 2 and
//! discriminant d = a^2 - lambda^sigma, every quantity here is evaluated as
//!
//!   d^k/dt^k E1 = e^{a t} [ P_k(d) * gs(d, t) + Q_k(d) * gc(d, t) ]
//!
//! where gc(d, t) = cosh(sqrt(d) t) resp. cos(sqrt(-d) t) and gs(d, t) =
//! sinh(sqrt(d) t)/sqrt(d) resp. sin(sqrt(-d) t)/sqrt(-d) share one even
//! power series near d t^2 = 0, and P_k, Q_k are real polynomials in d
//! (binomial sums). This form is exact at d = 0, continuous across branch
//! changes by construction, and never touches complex arithmetic. For
//! well-separated real roots (sqrt(d) t > 20) it switches to the explicit
//! two-exponential form, which is overflow-safe and cancellation-free there.

use crate::error::{Error, Result};
use crate::spectrum::DampingParams;
use serde::Serialize;
use std::fmt;

/// Default relative tolerance for tagging a discriminant as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

/// Where the P/Q kernel form hands over to the two-exponential form on the
/// real-distinct branch: beyond this value of sqrt(d)*t the exponentials are
/// separated enough that the direct difference is safe, while cosh would be
/// large enough to cost accuracy against e^{a t}.
const REAL_SPLIT_THRESHOLD: f64 = 20.0;

/// lambda^e with the convention 0^0 = 1 (the theta = 0 damping coefficient
/// at lambda = 0 is 1, matching L^0 = I).
#[inline]
pub fn lam_pow(lambda: f64, e: f64) -> f64 {
    if lambda == 0.0 && e == 0.0 {
        1.0
    } else {
        lambda.powf(e)
    }
}

// ---------------------------------------------------------------------------
// Characteristic roots
// ---------------------------------------------------------------------------

/// Sign class of the characteristic discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootBranch {
    /// Two real roots, tau_- < tau_+ <= 0.
    RealDistinct,
    /// Double real root (within tolerance of the boundary).
    Double,
    /// Complex conjugate pair with negative real part (zero only at lambda=0).
    ComplexPair,
}

impl fmt::Display for RootBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootBranch::RealDistinct => "RealDistinct",
            RootBranch::Double => "Double",
            RootBranch::ComplexPair => "ComplexPair",
        };
        f.write_str(s)
    }
}

/// Characteristic roots of tau^2 + lambda^theta tau + lambda^sigma = 0.
///
/// Invariants: re_minus <= re_plus <= 0 always; im >= 0, nonzero only on the
/// ComplexPair branch (where re_plus == re_minus).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharRoots {
    pub branch: RootBranch,
    pub re_plus: f64,
    pub re_minus: f64,
    /// Imaginary part magnitude of the pair (0 on real branches).
    pub im: f64,
    /// Half the damping coefficient: lambda^theta / 2.
    pub half_damping: f64,
    /// Raw discriminant lambda^{2 theta}/4 - lambda^sigma (not clamped on
    /// the Double branch; callers needing the exact value read it here).
    pub discriminant: f64,
}

/// Solve the characteristic polynomial, classifying the discriminant sign at
/// relative scale max(lambda^{2 theta}/4, lambda^sigma).
///
/// On the real-distinct branch, tau_- = -h - sqrt(d) is computed directly and
/// tau_+ = -lambda^sigma / (h + sqrt(d)) comes from the root product (Vieta),
/// which avoids the h - sqrt(d) cancellation when lambda^sigma << h^2.
pub fn char_roots(lambda: f64, params: &DampingParams, degeneracy_tol: f64) -> CharRoots {
    assert!(
        lambda.is_finite() && lambda >= 0.0,
        "eigenvalue must be finite and >= 0, got {lambda}"
    );
    assert!(
        degeneracy_tol >= 0.0,
        "degeneracy tolerance must be >= 0, got {degeneracy_tol}"
    );
    let h = 0.5 * lam_pow(lambda, params.theta());
    let stiff = lam_pow(lambda, params.sigma());
    let disc = h * h - stiff;
    let scale = (h * h).max(stiff);

    if scale == 0.0 {
        // lambda = 0 with theta > 0: tau^2 = 0.
        return CharRoots {
            branch: RootBranch::Double,
            re_plus: 0.0,
            re_minus: 0.0,
            im: 0.0,
            half_damping: h,
            discriminant: disc,
        };
    }
    if disc.abs() <= degeneracy_tol * scale {
        CharRoots {
            branch: RootBranch::Double,
            re_plus: -h,
            re_minus: -h,
            im: 0.0,
            half_damping: h,
            discriminant: disc,
        }
    } else if disc > 0.0 {
        let s = disc.sqrt();
        let re_minus = -h - s;
        // 0.0 + avoids -0.0 when stiff = 0 (undamped zero mode).
        let re_plus = 0.0 + -stiff / (h + s);
        CharRoots {
            branch: RootBranch::RealDistinct,
            re_plus,
            re_minus,
            im: 0.0,
            half_damping: h,
            discriminant: disc,
        }
    } else {
        CharRoots {
            branch: RootBranch::ComplexPair,
            re_plus: -h,
            re_minus: -h,
            im: (-disc).sqrt(),
            half_damping: h,
            discriminant: disc,
        }
    }
}

// ---------------------------------------------------------------------------
// Generalized trig kernels
// ---------------------------------------------------------------------------

/// cosh(sqrt(d) t) for d >= 0, cos(sqrt(-d) t) for d < 0. Even entire
/// function of sqrt(d); the shared series keeps the two sides consistent
/// through d = 0.
fn gc(d: f64, t: f64) -> f64 {
    let w = d * t * t;
    if w.abs() < 1e-8 {
        // cosh(z) = 1 + z^2/2 + z^4/24 + z^6/720, z^2 = w; truncation error
        // below 1e-34 at |w| = 1e-8.
        1.0 + w * (0.5 + w * (1.0 / 24.0 + w / 720.0))
    } else if d > 0.0 {
        (d.sqrt() * t).cosh()
    } else {
        ((-d).sqrt() * t).cos()
    }
}

/// sinh(sqrt(d) t)/sqrt(d) for d > 0, t for d = 0, sin(sqrt(-d) t)/sqrt(-d)
/// for d < 0. Odd in t, entire in d.
fn gs(d: f64, t: f64) -> f64 {
    let w = d * t * t;
    if w.abs() < 1e-8 {
        t * (1.0 + w * (1.0 / 6.0 + w * (1.0 / 120.0 + w / 5040.0)))
    } else if d > 0.0 {
        let s = d.sqrt();
        (s * t).sinh() / s
    } else {
        let s = (-d).sqrt();
        (s * t).sin() / s
    }
}

/// Binomial coefficient in f64; exact for the derivative orders used here.
fn binom(k: u32, j: u32) -> f64 {
    let mut c = 1.0f64;
    for i in 0..j {
        c = c * (k - i) as f64 / (i + 1) as f64;
    }
    c
}

// ---------------------------------------------------------------------------
// Propagator evaluation
// ---------------------------------------------------------------------------

/// d^k/dt^k E1 for any k >= 0 (k = 0 is E1 itself). Internal single code
/// path backing all public evaluation functions.
fn dtk_e1_any(lambda: f64, params: &DampingParams, t: f64, k: u32) -> f64 {
    assert!(t >= 0.0, "time must be >= 0, got {t}");
    let roots = char_roots(lambda, params, DEFAULT_DEGENERACY_TOL);
    let a = -roots.half_damping;
    let d = roots.discriminant;

    if roots.branch == RootBranch::RealDistinct && d.sqrt() * t > REAL_SPLIT_THRESHOLD {
        // Well-separated real roots: direct form, exponentials cannot clash.
        let (tp, tm) = (roots.re_plus, roots.re_minus);
        let span = 2.0 * d.sqrt();
        return (tp.powi(k as i32) * (tp * t).exp() - tm.powi(k as i32) * (tm * t).exp()) / span;
    }

    // P_k = sum over even j of C(k,j) a^{k-j} d^{j/2},
    // Q_k = sum over odd j of C(k,j) a^{k-j} d^{(j-1)/2}; from
    // d^k/dt^k [e^{at} g(t)] with g'' = d g, g(0) = 0, g'(0) = 1.
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    for j in 0..=k {
        let term = binom(k, j) * a.powi((k - j) as i32);
        if j % 2 == 0 {
            p += term * d.powi((j / 2) as i32);
        } else {
            q += term * d.powi(((j - 1) / 2) as i32);
        }
    }
    (a * t).exp() * (p * gs(d, t) + q * gc(d, t))
}

/// E0(t): propagator carrying the initial displacement. E0(0) = 1,
/// E0'(0) = 0, and E0'' + lambda^theta E0' + lambda^sigma E0 = 0.
pub fn eval_e0(lambda: f64, params: &DampingParams, t: f64) -> f64 {
    assert!(t >= 0.0, "time must be >= 0, got {t}");
    if lambda == 0.0 {
        // No stiffness: the initial displacement is an equilibrium, E0 = 1
        // for every theta (tau_+ = 0 annihilates the other exponential).
        return 1.0;
    }
    let roots = char_roots(lambda, params, DEFAULT_DEGENERACY_TOL);
    let h = roots.half_damping;
    let d = roots.discriminant;
    if roots.branch == RootBranch::RealDistinct && d.sqrt() * t > REAL_SPLIT_THRESHOLD {
        let (tp, tm) = (roots.re_plus, roots.re_minus);
        return (tp * (tm * t).exp() - tm * (tp * t).exp()) / (tp - tm);
    }
    (-h * t).exp() * (gc(d, t) + h * gs(d, t))
}

/// E1(t): propagator carrying the initial velocity. E1(0) = 0, E1'(0) = 1.
pub fn eval_e1(lambda: f64, params: &DampingParams, t: f64) -> f64 {
    dtk_e1_any(lambda, params, t, 0)
}

/// k-th time derivative of E1, k >= 1 (use `eval_e1` for k = 0).
pub fn eval_dtk_e1(lambda: f64, params: &DampingParams, t: f64, k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("derivative order k must be >= 1"));
    }
    Ok(dtk_e1_any(lambda, params, t, k))
}

/// k-th time derivative of E0, k >= 1: the ODE gives
/// d^k/dt^k E0 = -lambda^sigma * d^{k-1}/dt^{k-1} E1 for every k >= 1.
pub fn eval_dtk_e0(lambda: f64, params: &DampingParams, t: f64, k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("derivative order k must be >= 1"));
    }
    Ok(-lam_pow(lambda, params.sigma()) * dtk_e1_any(lambda, params, t, k - 1))
}

/// Asymptotic exponential decay rate of the mode: -max(Re tau+, Re tau-).
///
/// Zero exactly when a characteristic root touches the imaginary axis, which
/// happens only at lambda = 0 (for every admissible theta: with theta > 0
/// the double root is 0, with theta = 0 the roots are {0, -1}).
pub fn mode_decay_rate(lambda: f64, params: &DampingParams) -> f64 {
    let roots = char_roots(lambda, params, DEFAULT_DEGENERACY_TOL);
    // re_plus >= re_minus on every branch.
    0.0 + -roots.re_plus
}

/// Exact supremum constant of the scalar smoothing envelope: for all
/// lambda > 0, t > 0,
///
///   lambda^beta e^{-lambda^theta t / 2} <= C(beta, theta) * t^{-beta/theta}
///
/// with C = (2 beta / (e theta))^{beta/theta}, attained at
/// lambda^theta t = 2 beta / theta (maximize x^{beta/theta} e^{-x/2}).
pub fn smoothing_envelope_constant(beta: f64, theta: f64) -> Result<f64> {
    if !(beta > 0.0 && theta > 0.0) {
        return Err(Error::domain(format!(
            "envelope constant requires beta > 0 and theta > 0, got beta={beta}, theta={theta}"
        )));
    }
    Ok((2.0 * beta / (std::f64::consts::E * theta)).powf(beta / theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::DampingParams;

    fn params(theta: f64, sigma: f64) -> DampingParams {
        DampingParams::new(theta, sigma).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        let scale = a.abs().max(b.abs()).max(1e-300);
        (a - b).abs() <= tol * scale
    }

    #[test]
    fn roots_lambda_one_any_params() {
        // tau^2 + tau + 1 = 0 regardless of exponents when lambda = 1.
        for (th, si) in [(0.0, 2.0), (1.0, 2.0), (1.0, 4.0), (2.0, 3.0)] {
            let r = char_roots(1.0, &params(th, si), DEFAULT_DEGENERACY_TOL);
            assert_eq!(r.branch, RootBranch::ComplexPair);
            assert!(rel_close(r.re_plus, -0.5, 1e-15));
            assert!(rel_close(r.im, 3f64.sqrt() / 2.0, 1e-15));
        }
    }

    #[test]
    fn roots_zero_mode_damped() {
        let r = char_roots(0.0, &params(1.5, 2.0), DEFAULT_DEGENERACY_TOL);
        assert_eq!(r.branch, RootBranch::Double);
        assert_eq!(r.re_plus, 0.0);
        assert_eq!(r.re_minus, 0.0);
    }

    #[test]
    fn roots_zero_mode_undamped() {
        // theta = 0: tau^2 + tau = 0, roots {0, -1}.
        let r = char_roots(0.0, &params(0.0, 2.0), DEFAULT_DEGENERACY_TOL);
        assert_eq!(r.branch, RootBranch::RealDistinct);
        assert_eq!(r.re_plus, 0.0);
        assert_eq!(r.re_minus, -1.0);
        assert!(r.re_plus.is_sign_positive(), "no -0.0 leak");
    }

    #[test]
    fn roots_double_boundary() {
        // theta=1, sigma=4: disc = lambda^2/4 - lambda^4 = 0 at lambda = 1/2.
        let r = char_roots(0.5, &params(1.0, 4.0), DEFAULT_DEGENERACY_TOL);
        assert_eq!(r.branch, RootBranch::Double);
        assert!(rel_close(r.re_plus, -0.25, 1e-15));
    }

    #[test]
    fn roots_critical_regime() {
        // Critical: tau = -lambda^theta/2 (1 -+ i sqrt(3)).. lambda=3, theta=1:
        // re = -3/2, im = 3 sqrt(3) / 2.
        let r = char_roots(3.0, &params(1.0, 2.0), DEFAULT_DEGENERACY_TOL);
        assert_eq!(r.branch, RootBranch::ComplexPair);
        assert!(rel_close(r.re_plus, -1.5, 1e-15));
        assert!(rel_close(r.im, 3.0 * 3f64.sqrt() / 2.0, 1e-15));
    }

    #[test]
    fn roots_vieta_consistency() {
        // Product and sum of roots recover the polynomial coefficients on the
        // stiff real-distinct branch where naive evaluation would cancel.
        let pr = params(2.0, 3.0);
        let r = char_roots(100.0, &pr, DEFAULT_DEGENERACY_TOL);
        assert_eq!(r.branch, RootBranch::RealDistinct);
        let product = r.re_plus * r.re_minus;
        let sum = r.re_plus + r.re_minus;
        assert!(rel_close(product, 100f64.powi(3), 1e-12));
        assert!(rel_close(sum, -(100f64.powi(2)), 1e-12));
    }

    #[test]
    fn e0_worked_example() {
        // lambda=2, theta=1, sigma=3: roots -1 +- i sqrt(7); E0(1) =
        // e^{-1}(cos sqrt7 + sin sqrt7 / sqrt7).
        let v = eval_e0(2.0, &params(1.0, 3.0), 1.0);
        let s7 = 7f64.sqrt();
        let expected = (-1.0f64).exp() * (s7.cos() + s7.sin() / s7);
        assert!(rel_close(v, expected, 1e-14), "{v} vs {expected}");
    }

    #[test]
    fn zero_mode_propagators() {
        let p = params(1.0, 2.0);
        for t in [0.0, 0.3, 2.0, 50.0] {
            assert_eq!(eval_e0(0.0, &p, t), 1.0);
            assert!(rel_close(eval_e1(0.0, &p, t), t, 1e-15));
        }
        assert_eq!(eval_dtk_e1(0.0, &p, 3.0, 1).unwrap(), 1.0);
        assert_eq!(eval_dtk_e1(0.0, &p, 3.0, 2).unwrap(), 0.0);
        assert_eq!(eval_dtk_e0(0.0, &p, 3.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn undamped_zero_mode_propagators() {
        let p = params(0.0, 2.0);
        for t in [0.0, 0.5, 3.0, 80.0] {
            assert_eq!(eval_e0(0.0, &p, t), 1.0);
            assert!(rel_close(eval_e1(0.0, &p, t), 1.0 - (-t).exp(), 1e-14));
        }
        // d^k/dt^k E1 = (-1)^{k-1} e^{-t}
        for k in 1..=4u32 {
            let v = eval_dtk_e1(0.0, &p, 0.7, k).unwrap();
            let expected = (-1.0f64).powi(k as i32 - 1) * (-0.7f64).exp();
            assert!(rel_close(v, expected, 1e-13), "k={k}: {v} vs {expected}");
        }
    }

    #[test]
    fn initial_conditions_exact() {
        for (lam, th, si) in [
            (0.0, 1.0, 2.0),
            (0.0, 0.0, 2.0),
            (0.5, 1.0, 4.0),
            (1.0, 1.0, 2.0),
            (7.3, 0.5, 1.0),
            (144.0, 2.0, 3.0),
        ] {
            let p = params(th, si);
            assert_eq!(eval_e0(lam, &p, 0.0), 1.0, "E0(0) lam={lam}");
            assert_eq!(eval_e1(lam, &p, 0.0), 0.0, "E1(0) lam={lam}");
            assert_eq!(eval_dtk_e0(lam, &p, 0.0, 1).unwrap(), 0.0, "E0'(0)");
            assert_eq!(eval_dtk_e1(lam, &p, 0.0, 1).unwrap(), 1.0, "E1'(0)");
        }
    }

    #[test]
    fn double_branch_formulas() {
        // At the exact double root (lambda=1/2, theta=1, sigma=4, tau=-1/4):
        // E1 = t e^{tau t}, E0 = (1 - tau t) e^{tau t}.
        let p = params(1.0, 4.0);
        let tau = -0.25f64;
        for t in [0.1, 1.0, 6.0] {
            assert!(rel_close(eval_e1(0.5, &p, t), t * (tau * t).exp(), 1e-12));
            assert!(rel_close(
                eval_e0(0.5, &p, t),
                (1.0 - tau * t) * (tau * t).exp(),
                1e-12
            ));
        }
        // d^k/dt^k E1 = tau^{k-1} (k + t tau) e^{tau t}
        for k in 1..=4u32 {
            let t = 0.8;
            let expected = tau.powi(k as i32 - 1) * (k as f64 + t * tau) * (tau * t).exp();
            let v = eval_dtk_e1(0.5, &p, t, k).unwrap();
            assert!(rel_close(v, expected, 1e-12), "k={k}: {v} vs {expected}");
        }
    }

    #[test]
    fn stiff_real_branch_no_overflow() {
        // NonEffective theta=2, sigma=3, lambda=1e3: tau_- near -1e6, tau_+
        // near -1e3; naive cosh(sqrt(d) t) overflows at t = 0.5.
        let p = params(2.0, 3.0);
        let t = 0.5;
        let v0 = eval_e0(1e3, &p, t);
        let v1 = eval_e1(1e3, &p, t);
        assert!(v0.is_finite() && v1.is_finite());
        // Fast root has fully decayed: E0 -> -tau_- e^{tau_+ t}/(tau_+ - tau_-).
        let r = char_roots(1e3, &p, DEFAULT_DEGENERACY_TOL);
        let expected = -r.re_minus * (r.re_plus * t).exp() / (r.re_plus - r.re_minus);
        assert!(v0 > 0.0);
        assert!(rel_close(v0, expected, 1e-9), "{v0} vs {expected}");
    }

    #[test]
    fn decay_rate_examples() {
        assert_eq!(mode_decay_rate(0.0, &params(1.0, 2.0)), 0.0);
        assert_eq!(mode_decay_rate(0.0, &params(0.0, 2.0)), 0.0);
        assert!(rel_close(mode_decay_rate(1.0, &params(1.0, 2.0)), 0.5, 1e-15));
        // Effective theta=1 sigma=4, lambda=0.1: rate = (0.1 - sqrt(0.01 - 4e-4... ))/2
        let lam: f64 = 0.1;
        let h = lam / 2.0;
        let disc = h * h - lam.powi(4);
        let expected = lam.powi(4) / (h + disc.sqrt());
        let got = mode_decay_rate(lam, &params(1.0, 4.0));
        assert!(rel_close(got, expected, 1e-13), "{got} vs {expected}");
        assert!(got > 0.0);
    }

    #[test]
    fn envelope_constant_examples() {
        // beta = theta = 1: C = 2/e.
        let c = smoothing_envelope_constant(1.0, 1.0).unwrap();
        assert!(rel_close(c, 2.0 / std::f64::consts::E, 1e-15));
        assert!(smoothing_envelope_constant(0.0, 1.0).is_err());
        assert!(smoothing_envelope_constant(1.0, 0.0).is_err());
    }

    #[test]
    fn kernel_series_matches_closed_form_at_crossover() {
        // gc/gs must be continuous where the series hands over to the
        // closed forms (|d t^2| near 1e-8).
        for d in [9.9e-9, 1.01e-8, -9.9e-9, -1.01e-8] {
            let t = 1.0;
            let c = gc(d, t);
            let s = gs(d, t);
            let exact_c = if d > 0.0 {
                (d.sqrt() * t).cosh()
            } else {
                ((-d).sqrt() * t).cos()
            };
            let exact_s = if d > 0.0 {
                (d.sqrt() * t).sinh() / d.sqrt()
            } else {
                ((-d).sqrt() * t).sin() / (-d).sqrt()
            };
            assert!(rel_close(c, exact_c, 1e-14));
            assert!(rel_close(s, exact_s, 1e-14));
        }
    }
}
