//! Quotients `N / ∏ (1 - x_i²)^{n_i}` with `N` in the Φ-algebra. Intermediate
//! results of `δ*_i`, `J` and `M_i` live here until the denominator cancels.

use alloc::vec;
use alloc::vec::Vec;

use super::poly::{rat, PhiPoly};
use super::Rational;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct Frac {
    pub num: PhiPoly,
    pub den: Vec<u32>,
}

impl Frac {
    pub fn from_poly(p: PhiPoly) -> Self {
        let d = p.dim();
        Self {
            num: p,
            den: vec![0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    fn raise_to(&self, den: &[u32]) -> PhiPoly {
        let mut n = self.num.clone();
        for (i, (&have, &want)) in self.den.iter().zip(den).enumerate() {
            for _ in have..want {
                n = n.mul_d(i);
            }
        }
        n
    }

    pub fn add(&self, other: &Frac) -> Frac {
        let den: Vec<u32> = self
            .den
            .iter()
            .zip(&other.den)
            .map(|(a, b)| *a.max(b))
            .collect();
        let mut num = self.raise_to(&den);
        num += &other.raise_to(&den);
        Frac { num, den }
    }

    pub fn scale(&self, c: &Rational) -> Frac {
        Frac {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &PhiPoly) -> Frac {
        Frac {
            num: &self.num * p,
            den: self.den.clone(),
        }
    }

    pub fn mul_phi(&self, i: usize) -> Frac {
        Frac {
            num: self.num.mul_phi(i),
            den: self.den.clone(),
        }
    }

    /// Divide by `1 - x_i²`.
    pub fn div_d(&self, i: usize) -> Frac {
        let mut den = self.den.clone();
        den[i] += 1;
        Frac {
            num: self.num.clone(),
            den,
        }
    }

    /// `∂_i (N / D_i^n) = (A·D_i + B + 2n x_i N) / D_i^{n+1}` where `∂_i N = A + B / D_i`.
    pub fn partial(&self, i: usize) -> Frac {
        let (a, b) = self.num.partial_split(i);
        let n = self.den[i];
        let mut num = a.mul_d(i);
        num += &b;
        if n > 0 {
            num += &self.num.shift_x(i, 1).scale(&rat(2 * n as i64));
        }
        let mut den = self.den.clone();
        den[i] += 1;
        Frac { num, den }.reduced()
    }

    /// Cancel common factors of `1 - x_i²`.
    pub fn reduced(mut self) -> Frac {
        for i in 0..self.dim() {
            while self.den[i] > 0 {
                if self.num.is_zero() {
                    self.den[i] = 0;
                    break;
                }
                match self.num.div_d(i) {
                    Some(q) => {
                        self.num = q;
                        self.den[i] -= 1;
                    }
                    None => break,
                }
            }
        }
        self
    }

    pub fn into_poly(self, operation: &'static str) -> Result<PhiPoly> {
        let r = self.reduced();
        if r.den.iter().all(|&n| n == 0) {
            Ok(r.num)
        } else {
            Err(Error::NotRepresentable { operation })
        }
    }
}
