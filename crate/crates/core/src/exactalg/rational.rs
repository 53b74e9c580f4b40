//! Arbitrary-precision rationals that stay in machine words while they fit.
//!
//! Almost every coefficient the identity checks produce has a small numerator and
//! denominator, and `BigRational` pays for a heap allocation and a bignum gcd on
//! each operation. Values are kept as `Ratio<i64>` until an operation overflows,
//! at which point they move to `BigRational`; results that fit again are demoted,
//! so each value has exactly one representation.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(Ratio<i64>),
    Big(BigRational),
}

/// Exact rational number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

impl Rational {
    /// `numer / denom`; panics when `denom` is zero.
    pub fn new(numer: BigInt, denom: BigInt) -> Self {
        Self::from_big(BigRational::new(numer, denom))
    }

    pub fn from_integer(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    pub fn from_i64(n: i64) -> Self {
        Self(Repr::Small(Ratio::from_integer(n)))
    }

    /// Exact value of a finite float.
    pub fn from_float(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::from_big)
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Self(Repr::Small(Ratio::new_raw(n, d))),
            _ => Self(Repr::Big(r)),
        }
    }

    fn from_small(r: Ratio<i64>) -> Self {
        if *r.numer() == i64::MIN {
            Self(Repr::Big(BigRational::new_raw(
                (*r.numer()).into(),
                (*r.denom()).into(),
            )))
        } else {
            Self(Repr::Small(r))
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => BigRational::new_raw((*r.numer()).into(), (*r.denom()).into()),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.numer()),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    /// Positive denominator.
    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.denom()),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() < 0,
            Repr::Big(r) => r.numer() < &BigInt::zero(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_integer(),
            Repr::Big(r) => r.is_integer(),
        }
    }

    /// Is the value held in machine words.
    pub fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small(_))
    }

    fn binary(
        &self,
        rhs: &Self,
        small: impl FnOnce(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl FnOnce(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(r) = small(a, b) {
                return Self::from_small(r);
            }
        }
        Self::from_big(big(self.to_big(), rhs.to_big()))
    }
}

impl ToPrimitive for Rational {
    fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(r) if r.is_integer() => Some(*r.numer()),
            Repr::Small(_) => None,
            Repr::Big(r) => r.to_i64(),
        }
    }

    fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|n| u64::try_from(n).ok())
    }

    fn to_f64(&self) -> Option<f64> {
        match &self.0 {
            Repr::Small(r) => r.to_f64(),
            Repr::Big(r) => r.to_f64(),
        }
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Small(r) if r.is_zero())
    }
}

impl One for Rational {
    fn one() -> Self {
        Self::from_i64(1)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) => fmt::Display::fmt(r, f),
            Repr::Big(r) => fmt::Display::fmt(r, f),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(r) => Rational::from_small(-r),
            Repr::Big(r) => Rational::from_big(-r),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident, $atr:ident, $amethod:ident, $op:tt) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                self.binary(rhs, |a, b| a.$checked(b), |a, b| a $op b)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self $op &rhs
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                &self $op rhs
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                &self $op &rhs
            }
        }
        impl $atr<&Rational> for Rational {
            fn $amethod(&mut self, rhs: &Rational) {
                *self = &*self $op rhs;
            }
        }
        impl $atr<Rational> for Rational {
            fn $amethod(&mut self, rhs: Rational) {
                *self = &*self $op &rhs;
            }
        }
    };
}

binop!(Add, add, checked_add, AddAssign, add_assign, +);
binop!(Sub, sub, checked_sub, SubAssign, sub_assign, -);
binop!(Mul, mul, checked_mul, MulAssign, mul_assign, *);
binop!(Div, div, checked_div, DivAssign, div_assign, /);

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn promotes_on_overflow_and_demotes_back() {
        let m = Rational::from_i64(i64::MAX);
        let sq = &m * &m;
        assert!(!sq.is_small());
        assert_eq!(sq.numer(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
        let back = &sq / &m;
        assert!(back.is_small());
        assert_eq!(back, m);
        let min = &Rational::from_i64(-i64::MAX) - &Rational::one();
        assert!(!min.is_small());
        assert_eq!(-&min, &m + &Rational::one());
    }

    #[test]
    fn agrees_with_bigrational() {
        let vals = [
            (1, 2),
            (-3, 4),
            (7, 1),
            (0, 1),
            (i64::MAX, 3),
            (-5, i64::MAX),
            (1 << 40, 3),
        ];
        for &(an, ad) in &vals {
            for &(bn, bd) in &vals {
                let (a, b) = (
                    Rational::new(an.into(), ad.into()),
                    Rational::new(bn.into(), bd.into()),
                );
                let (x, y) = (big(an, ad), big(bn, bd));
                assert_eq!((&a + &b).to_big(), &x + &y);
                assert_eq!((&a - &b).to_big(), &x - &y);
                assert_eq!((&a * &b).to_big(), &x * &y);
                if !y.is_zero() {
                    assert_eq!((&a / &b).to_big(), &x / &y);
                }
                assert_eq!(a.cmp(&b), x.cmp(&y));
            }
        }
    }

    #[test]
    fn formatting_matches_bigrational() {
        assert_eq!(format!("{}", Rational::new(6.into(), (-4).into())), "-3/2");
        assert_eq!(format!("{}", Rational::from_i64(5)), "5");
    }
}
