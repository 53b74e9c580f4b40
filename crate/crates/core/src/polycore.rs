//! One-dimensional Jacobi polynomials `P_k^{(α,β)}` and the scalar data attached to
//! them: eigenvalues of the Jacobi operator, squared `L^2(dμ)` norms, and the
//! derivative relation `d/dx P_k^{(α,β)} = (k+α+β+1)/2 · P_{k-1}^{(α+1,β+1)}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Type parameters `(α, β)` of one coordinate. Both are strictly greater than `-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamPair {
    alpha: f64,
    beta: f64,
}

impl ParamPair {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha > -1.0 && beta > -1.0) {
            return Err(Error::InvalidParameter { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// Legendre parameters `α = β = 0`.
    pub const fn legendre() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }

    #[inline]
    pub const fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub const fn beta(&self) -> f64 {
        self.beta
    }

    /// `α ≥ -1/2` and `β ≥ -1/2`, the regime where the modified kernels are
    /// dominated by the Jacobi heat kernel.
    #[inline]
    pub fn in_half_range(&self) -> bool {
        self.alpha >= -0.5 && self.beta >= -0.5
    }

    /// `(α + 1, β + 1)`, the parameters of the derivative family.
    #[inline]
    pub fn raised(&self) -> Self {
        Self {
            alpha: self.alpha + 1.0,
            beta: self.beta + 1.0,
        }
    }

    /// Total mass `∫ dμ = 2^{α+β+1} B(α+1, β+1)`.
    pub fn total_mass(&self) -> f64 {
        squared_norm(*self, 0)
    }
}

/// Degree `k` together with its eigenvalue `λ_k = k(k+α+β+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralMode1D {
    pub k: u32,
    pub lambda: f64,
    pub sqrt_lambda: f64,
}

pub fn eigenvalue(p: ParamPair, k: u32) -> SpectralMode1D {
    let lambda = eigenvalue_value(p, k);
    SpectralMode1D {
        k,
        lambda,
        sqrt_lambda: math::sqrt(lambda),
    }
}

#[inline]
pub(crate) fn eigenvalue_value(p: ParamPair, k: u32) -> f64 {
    let k = k as f64;
    k * (k + p.alpha + p.beta + 1.0)
}

/// `Φ(x) = √(1 - x²)` on `[-1, 1]`.
pub fn phi(x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "phi",
            value: x,
        });
    }
    Ok(phi_unchecked(x))
}

#[inline]
pub(crate) fn phi_unchecked(x: f64) -> f64 {
    math::sqrt((1.0 - x) * (1.0 + x))
}

fn check_open(x: f64) -> Result<()> {
    if x.is_finite() && x > -1.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "jacobi polynomial argument",
            value: x,
        })
    }
}

/// `P_k^{(α,β)}(x)` for `x ∈ (-1, 1)`.
pub fn eval_jacobi(p: ParamPair, k: u32, x: f64) -> Result<f64> {
    check_open(x)?;
    let mut values = vec![0.0; k as usize + 1];
    jacobi_values_into(p, x, &mut values);
    Ok(values[k as usize])
}

/// `d/dx P_k^{(α,β)}(x)`, zero for `k = 0`.
pub fn eval_jacobi_derivative(p: ParamPair, k: u32, x: f64) -> Result<f64> {
    check_open(x)?;
    Ok(jacobi_derivative_unchecked(p, k, x))
}

pub(crate) fn jacobi_derivative_unchecked(p: ParamPair, k: u32, x: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let mut values = vec![0.0; k as usize];
    jacobi_values_into(p.raised(), x, &mut values);
    0.5 * (k as f64 + p.alpha + p.beta + 1.0) * values[k as usize - 1]
}

/// Values `P_0(x), ..., P_{n-1}(x)` for `n = out.len()`, valid on the closed interval.
///
/// Degrees up to two use closed forms; the three-term recurrence takes over from
/// degree three, where none of its denominators can vanish for `α, β > -1`.
pub fn jacobi_values_into(p: ParamPair, x: f64, out: &mut [f64]) {
    let (a, b) = (p.alpha, p.beta);
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n == 1 {
        return;
    }
    out[1] = 0.5 * ((a + b + 2.0) * x + (a - b));
    if n == 2 {
        return;
    }
    // Explicit sum at degree two. The general recurrence is only used from k = 3;
    // written at k = 1 it divides by (α+β)(α+β+1), which vanishes e.g. at α=β=-1/2.
    let xp = 0.5 * (x + 1.0);
    let xm = 0.5 * (x - 1.0);
    out[2] = 0.5 * (a + 2.0) * (a + 1.0) * xp * xp
        + (a + 2.0) * (b + 2.0) * xm * xp
        + 0.5 * (b + 2.0) * (b + 1.0) * xm * xm;
    for k in 3..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c0 = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        out[k] = (c1 * out[k - 1] - c2 * out[k - 2]) / c0;
    }
}

pub(crate) fn jacobi_values(p: ParamPair, x: f64, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    jacobi_values_into(p, x, &mut v);
    v
}

/// `‖P_k^{(α,β)}‖²` in `L²(dμ_{(α,β)})`, computed through log-Gamma.
pub fn squared_norm(p: ParamPair, k: u32) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    let kf = k as f64;
    let log_two = core::f64::consts::LN_2;
    let ln = if k == 0 {
        (a + b + 1.0) * log_two + math::ln_gamma(a + 1.0) + math::ln_gamma(b + 1.0)
            - math::ln_gamma(a + b + 2.0)
    } else {
        (a + b + 1.0) * log_two + math::ln_gamma(kf + a + 1.0) + math::ln_gamma(kf + b + 1.0)
            - math::ln(2.0 * kf + a + b + 1.0)
            - math::ln_gamma(kf + a + b + 1.0)
            - math::ln_gamma(kf + 1.0)
    };
    math::exp(ln)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::*;

    mod approx_eq {
        pub fn rel(a: f64, b: f64) -> f64 {
            (a - b).abs() / b.abs().max(1e-300)
        }
    }

    const PARAMS: [f64; 5] = [-0.5, 0.0, 0.5, 1.0, 1.5];

    #[test]
    fn rejects_bad_parameters() {
        assert!(ParamPair::new(-1.0, 0.0).is_err());
        assert!(ParamPair::new(0.0, f64::NAN).is_err());
        assert!(ParamPair::new(-0.99, 3.0).is_ok());
    }

    #[test]
    fn half_range_flag() {
        assert!(ParamPair::new(-0.5, -0.5).unwrap().in_half_range());
        assert!(!ParamPair::new(-0.6, 2.0).unwrap().in_half_range());
    }

    #[test]
    fn low_degree_values() {
        let p = ParamPair::legendre();
        assert_eq!(eval_jacobi(p, 0, 0.3).unwrap(), 1.0);
        assert_eq!(eval_jacobi(p, 1, 0.5).unwrap(), 0.5);
        // P_2 = (3x² - 1)/2 for Legendre.
        let x: f64 = 0.37;
        assert!((eval_jacobi(p, 2, x).unwrap() - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let p = ParamPair::legendre();
        assert!(eval_jacobi(p, 2, 1.0).is_err());
        assert!(eval_jacobi(p, 2, -1.5).is_err());
        assert!(eval_jacobi_derivative(p, 2, 1.0).is_err());
        assert!(phi(1.0001).is_err());
    }

    #[test]
    fn chebyshev_case_is_cosine() {
        // P_3^{(-1/2,-1/2)}(cos θ) = c cos 3θ: the ratio to cos 3θ is independent of θ.
        let p = ParamPair::new(-0.5, -0.5).unwrap();
        let ratio = |theta: f64| eval_jacobi(p, 3, theta.cos()).unwrap() / (3.0 * theta).cos();
        let r1 = ratio(core::f64::consts::FRAC_PI_4);
        let r2 = ratio(0.3);
        assert!(rel(r1, r2) < 1e-13, "{r1} vs {r2}");
        // c_k = (1/2)_k / k! = 5/16 at k = 3.
        assert!(rel(r1, 5.0 / 16.0) < 1e-13);
    }

    #[test]
    fn ultraspherical_half_is_sine_ratio() {
        let p = ParamPair::new(0.5, 0.5).unwrap();
        let ratio = |theta: f64| {
            eval_jacobi(p, 4, theta.cos()).unwrap() * theta.sin() / (5.0 * theta).sin()
        };
        assert!(rel(ratio(0.4), ratio(1.1)) < 1e-12);
    }

    #[test]
    fn derivative_closed_forms() {
        let p = ParamPair::legendre();
        assert_eq!(eval_jacobi_derivative(p, 0, 0.4).unwrap(), 0.0);
        assert!((eval_jacobi_derivative(p, 1, 0.2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-5;
        for &a in &PARAMS {
            for &b in &PARAMS {
                let p = ParamPair::new(a, b).unwrap();
                let central = |k: u32, x: f64, h: f64| {
                    (eval_jacobi(p, k, x + h).unwrap() - eval_jacobi(p, k, x - h).unwrap())
                        / (2.0 * h)
                };
                for k in 0..=12u32 {
                    for i in 0..=18 {
                        let x = -0.9 + 0.1 * i as f64;
                        // Plain differences carry an h² f'''/6 error above the
                        // tolerance at higher degree; Richardson removes it.
                        let fd = if k <= 6 {
                            central(k, x, h)
                        } else {
                            (4.0 * central(k, x, h) - central(k, x, 2.0 * h)) / 3.0
                        };
                        let d = eval_jacobi_derivative(p, k, x).unwrap();
                        let scale = d.abs().max(1.0);
                        assert!((fd - d).abs() / scale < 1e-7, "a={a} b={b} k={k} x={x}");
                    }
                }
            }
        }
        // (1,1), k = 2, x = 0 with the spec'd tolerance.
        let p = ParamPair::new(1.0, 1.0).unwrap();
        let fd = (eval_jacobi(p, 2, h).unwrap() - eval_jacobi(p, 2, -h).unwrap()) / (2.0 * h);
        assert!((fd - eval_jacobi_derivative(p, 2, 0.0).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(eigenvalue(ParamPair::legendre(), 2).lambda, 6.0);
        let p = ParamPair::new(0.3, 1.7).unwrap();
        assert_eq!(eigenvalue(p, 0).lambda, 0.0);
        let cheb = ParamPair::new(-0.5, -0.5).unwrap();
        assert_eq!(eigenvalue(cheb, 5).lambda, 25.0);
        for k in 0..40 {
            let m = eigenvalue(p, k);
            assert_eq!(m.lambda == 0.0, k == 0);
            if k > 0 {
                assert!(rel(m.sqrt_lambda * m.sqrt_lambda, m.lambda) <= 1e-14);
            }
        }
    }

    #[test]
    fn squared_norm_closed_values() {
        assert!(rel(squared_norm(ParamPair::legendre(), 0), 2.0) < 1e-14);
        assert!(rel(squared_norm(ParamPair::legendre(), 1), 2.0 / 3.0) < 1e-14);
        assert!(rel(squared_norm(ParamPair::new(1.0, 0.0).unwrap(), 0), 2.0) < 1e-14);
        // Legendre: 2 / (2k + 1).
        for k in 0..200u32 {
            let h = squared_norm(ParamPair::legendre(), k);
            assert!(rel(h, 2.0 / (2.0 * k as f64 + 1.0)) < 1e-12, "k={k}");
        }
        // Chebyshev of the first kind: π for k = 0 and c_k² π/2 otherwise.
        let cheb = ParamPair::new(-0.5, -0.5).unwrap();
        assert!(rel(squared_norm(cheb, 0), core::f64::consts::PI) < 1e-14);
        // Large degrees stay finite.
        assert!(squared_norm(ParamPair::new(1.5, 0.5).unwrap(), 600).is_finite());
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0).unwrap(), 1.0);
        assert_eq!(phi(1.0).unwrap(), 0.0);
        assert_eq!(phi(-1.0).unwrap(), 0.0);
        assert!((phi(0.6).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn recurrence_is_stable_at_high_degree() {
        // |P_k^{(0,0)}| ≤ 1 on [-1, 1].
        let v = jacobi_values(ParamPair::legendre(), 0.999, 1001);
        assert!(v.iter().all(|y| y.abs() <= 1.0 + 1e-12));
        let v = jacobi_values(ParamPair::legendre(), 1.0, 301);
        assert!(v.iter().all(|y| (y - 1.0).abs() < 1e-12));
    }
}
