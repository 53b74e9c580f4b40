//! The quadratic extension `Q(s)`, `s² = λ`, used to carry `λ^{±1/2}` exactly.

use core::fmt;

use num_traits::{One, Zero};

use super::poly::{rat, PhiPoly};
use super::Rational;

/// Rational square root of `λ`, if it has one.
pub(crate) fn rational_sqrt(lambda: &Rational) -> Option<Rational> {
    if lambda.is_negative() {
        return None;
    }
    let n = lambda.numer();
    let d = lambda.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &rn * &rn == n && &rd * &rd == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

/// `a + b·s` with `s² = λ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadExtScalar {
    pub a: Rational,
    pub b: Rational,
    pub lambda: Rational,
}

impl QuadExtScalar {
    pub fn new(a: Rational, b: Rational, lambda: Rational) -> Self {
        assert!(!lambda.is_negative(), "λ must be nonnegative");
        Self { a, b, lambda }.normalized()
    }

    pub fn rational(a: Rational, lambda: Rational) -> Self {
        Self::new(a, Rational::zero(), lambda)
    }

    /// The generator `s = √λ`.
    pub fn sqrt_lambda(lambda: Rational) -> Self {
        Self::new(Rational::zero(), Rational::one(), lambda)
    }

    /// `1/s = s/λ`; `None` when `λ = 0`.
    pub fn inv_sqrt_lambda(lambda: Rational) -> Option<Self> {
        if lambda.is_zero() {
            return None;
        }
        let b = Rational::one() / &lambda;
        Some(Self::new(Rational::zero(), b, lambda))
    }

    /// When `λ` is a rational square, `s` is folded into the rational part so
    /// equality is structural.
    fn normalized(mut self) -> Self {
        if !self.b.is_zero() {
            if let Some(r) = rational_sqrt(&self.lambda) {
                self.a += &self.b * r;
                self.b = Rational::zero();
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.lambda, o.lambda);
        Self::new(&self.a + &o.a, &self.b + &o.b, self.lambda.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.lambda, o.lambda);
        let a = &self.a * &o.a + &self.b * &o.b * &self.lambda;
        let b = &self.a * &o.b + &self.b * &o.a;
        Self::new(a, b, self.lambda.clone())
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let s = crate::math::sqrt(self.lambda.to_f64().unwrap_or(f64::NAN));
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * s
    }
}

impl fmt::Display for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.lambda)
        }
    }
}

/// `r + s·u` with `r, u` in the Φ-algebra and `s² = λ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadPoly {
    pub lambda: Rational,
    pub rational: PhiPoly,
    pub surd: PhiPoly,
}

impl QuadPoly {
    pub fn new(lambda: Rational, rational: PhiPoly, surd: PhiPoly) -> Self {
        Self {
            lambda,
            rational,
            surd,
        }
        .normalized()
    }

    pub fn from_poly(lambda: Rational, p: PhiPoly) -> Self {
        let d = p.dim();
        Self::new(lambda, p, PhiPoly::zero(d))
    }

    pub fn zero(lambda: Rational, d: usize) -> Self {
        Self::new(lambda, PhiPoly::zero(d), PhiPoly::zero(d))
    }

    fn normalized(mut self) -> Self {
        if !self.surd.is_zero() {
            if let Some(r) = rational_sqrt(&self.lambda) {
                self.rational += &self.surd.scale(&r);
                self.surd = PhiPoly::zero(self.rational.dim());
            }
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.rational.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.lambda, o.lambda);
        Self::new(
            self.lambda.clone(),
            &self.rational + &o.rational,
            &self.surd + &o.surd,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.lambda, o.lambda);
        Self::new(
            self.lambda.clone(),
            &self.rational - &o.rational,
            &self.surd - &o.surd,
        )
    }

    pub fn scale(&self, c: &QuadExtScalar) -> Self {
        assert_eq!(self.lambda, c.lambda);
        // (a + b s)(r + s u) = (a r + b λ u) + s (a u + b r)
        let mut r = self.rational.scale(&c.a);
        r += &self.surd.scale(&(&c.b * &self.lambda));
        let mut u = self.surd.scale(&c.a);
        u += &self.rational.scale(&c.b);
        Self::new(self.lambda.clone(), r, u)
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        Self::new(
            self.lambda.clone(),
            self.rational.scale(c),
            self.surd.scale(c),
        )
    }

    /// Apply a rational-linear map to both parts.
    pub fn map<E>(&self, mut f: impl FnMut(&PhiPoly) -> Result<PhiPoly, E>) -> Result<Self, E> {
        Ok(Self::new(
            self.lambda.clone(),
            f(&self.rational)?,
            f(&self.surd)?,
        ))
    }

    /// Residual terms as strings: rational part first, then the `s`-part.
    pub fn term_strings(&self) -> alloc::vec::Vec<alloc::string::String> {
        let mut v = self.rational.term_strings();
        for t in self.surd.term_strings() {
            v.push(alloc::format!("sqrt({})*{}", self.lambda, t));
        }
        v
    }
}

/// `e^{-decay·t·s} · value`, the shape every semigroup image of a single mode has.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModeFunction {
    pub decay: u32,
    pub value: QuadPoly,
}

impl ModeFunction {
    pub fn new(decay: u32, value: QuadPoly) -> Self {
        Self { decay, value }
    }

    pub fn lambda(&self) -> &Rational {
        &self.value.lambda
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// `∂_t` multiplies by `-decay·s`.
    pub fn dt(&self) -> Self {
        let c = QuadExtScalar::new(
            Rational::zero(),
            -rat(self.decay as i64),
            self.value.lambda.clone(),
        );
        Self {
            decay: self.decay,
            value: self.value.scale(&c),
        }
    }

    /// Sum of two mode functions; `None` if both are nonzero with different decay.
    pub fn add(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(o.clone());
        }
        (self.decay == o.decay).then(|| Self {
            decay: self.decay,
            value: self.value.add(&o.value),
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            decay: self.decay,
            value: self.value.scale_rational(&-Rational::one()),
        }
    }

    /// `self - o` as a plain `QuadPoly` residual, or `None` on a decay mismatch.
    pub fn residual(&self, o: &Self) -> Option<QuadPoly> {
        self.add(&o.neg()).map(|m| m.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn square_roots() {
        assert_eq!(
            rational_sqrt(&Rational::new(BigInt::from(9), BigInt::from(4))),
            Some(Rational::new(BigInt::from(3), BigInt::from(2)))
        );
        assert_eq!(rational_sqrt(&rat(2)), None);
        assert_eq!(rational_sqrt(&rat(0)), Some(rat(0)));
    }

    #[test]
    fn surd_arithmetic() {
        let s = QuadExtScalar::sqrt_lambda(rat(2));
        let s2 = s.mul(&s);
        assert_eq!(s2, QuadExtScalar::rational(rat(2), rat(2)));
        let inv = QuadExtScalar::inv_sqrt_lambda(rat(2)).unwrap();
        assert_eq!(s.mul(&inv), QuadExtScalar::rational(rat(1), rat(2)));
        // Perfect square λ folds s into the rational part.
        let s4 = QuadExtScalar::sqrt_lambda(rat(4));
        assert_eq!(s4, QuadExtScalar::rational(rat(2), rat(4)));
        assert!(QuadExtScalar::inv_sqrt_lambda(rat(0)).is_none());
    }

    #[test]
    fn time_derivative() {
        let f = ModeFunction::new(2, QuadPoly::from_poly(rat(3), PhiPoly::one(1)));
        let g = f.dt().dt();
        // (∂_t)² e^{-2ts} = 4λ e^{-2ts}
        assert_eq!(
            g.value,
            QuadPoly::from_poly(rat(3), PhiPoly::constant(1, rat(12)))
        );
    }
}
