use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};
use smallvec::{smallvec, SmallVec};

use super::Rational;

/// Exponent vector, inline up to four dimensions.
pub type Exponents = SmallVec<[u32; 4]>;

/// `x^e · ∏_{i ∈ mask} Φ_i`. Each `Φ_i` appears at most once; squares are folded
/// into `1 - x_i²` when monomials are multiplied.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub exps: Exponents,
    pub mask: u32,
}

impl Monomial {
    pub fn one(d: usize) -> Self {
        Self {
            exps: smallvec![0; d],
            mask: 0,
        }
    }

    #[inline]
    pub fn has_phi(&self, i: usize) -> bool {
        self.mask & (1 << i) != 0
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// Exact element of the algebra generated by `x_1, ..., x_d` and `Φ_1, ..., Φ_d`
/// with rational coefficients, kept in canonical form (no zero coefficients, no
/// `Φ_i²`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhiPoly {
    d: usize,
    /// Sorted by monomial, no duplicates.
    terms: Vec<(Monomial, Rational)>,
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_i64(n)
}

impl PhiPoly {
    pub fn zero(d: usize) -> Self {
        assert!(d >= 1 && d <= 32, "dimension must be in 1..=32");
        Self {
            d,
            terms: Vec::new(),
        }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Rational::one())
    }

    pub fn constant(d: usize, c: Rational) -> Self {
        let mut p = Self::zero(d);
        p.add_term(Monomial::one(d), c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn x(d: usize, i: usize) -> Self {
        let mut m = Monomial::one(d);
        m.exps[i] = 1;
        Self::monomial(d, m, Rational::one())
    }

    /// `Φ_i = √(1 - x_i²)`.
    pub fn phi(d: usize, i: usize) -> Self {
        let mut m = Monomial::one(d);
        m.mask = 1 << i;
        Self::monomial(d, m, Rational::one())
    }

    pub fn monomial(d: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.exps.len(), d);
        let mut p = Self::zero(d);
        p.add_term(m, c);
        p
    }

    /// `Σ_e c_e x_i^e`.
    pub fn univariate(d: usize, i: usize, coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(d);
        for (e, c) in coeffs.iter().enumerate() {
            let mut m = Monomial::one(d);
            m.exps[i] = e as u32;
            p.add_term(m, c.clone());
        }
        p
    }

    /// Build from raw terms `(x exponents, Φ exponents, coefficient)`, where Φ
    /// exponents may be arbitrary; the result is canonical.
    pub fn from_raw(d: usize, raw: &[(Vec<u32>, Vec<u32>, Rational)]) -> Self {
        let mut out = Self::zero(d);
        for (xe, pe, c) in raw {
            assert!(xe.len() == d && pe.len() == d);
            let mut term = Self::monomial(
                d,
                Monomial {
                    exps: Exponents::from_slice(xe),
                    mask: 0,
                },
                c.clone(),
            );
            for (i, &pow) in pe.iter().enumerate() {
                let reduced = Self::one_minus_x2(d, i).pow(pow / 2);
                term = &term * &reduced;
                if pow % 2 == 1 {
                    term = &term * &Self::phi(d, i);
                }
            }
            out += &term;
        }
        out
    }

    /// `1 - x_i²`.
    pub fn one_minus_x2(d: usize, i: usize) -> Self {
        let mut m = Monomial::one(d);
        m.exps[i] = 2;
        let mut p = Self::one(d);
        p.add_term(m, -Rational::one());
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.d);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().map(|(m, c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        match self.terms.binary_search_by(|(k, _)| k.cmp(m)) {
            Ok(n) => self.terms[n].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Whether every term carries `Φ_i`.
    pub fn all_carry_phi(&self, i: usize) -> bool {
        self.terms.iter().all(|(m, _)| m.has_phi(i))
    }

    /// Whether no term carries any `Φ`.
    pub fn is_plain_polynomial(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.mask == 0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|(k, _)| k.cmp(&m)) {
            Err(n) => self.terms.insert(n, (m, c)),
            Ok(n) => {
                self.terms[n].1 += c;
                if self.terms[n].1.is_zero() {
                    self.terms.remove(n);
                }
            }
        }
    }

    /// Sum of arbitrary terms, in any order and with repeats.
    fn from_terms(d: usize, mut raw: Vec<(Monomial, Rational)>) -> Self {
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        let mut terms: Vec<(Monomial, Rational)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match terms.last_mut() {
                Some((last, acc)) if *last == m => *acc += c,
                _ => {
                    if terms.last().is_some_and(|(_, acc)| acc.is_zero()) {
                        terms.pop();
                    }
                    terms.push((m, c));
                }
            }
        }
        if terms.last().is_some_and(|(_, acc)| acc.is_zero()) {
            terms.pop();
        }
        Self { d, terms }
    }

    /// `self + sign·rhs` by merging the sorted term lists.
    fn merged(&self, rhs: &Self, negate: bool) -> Self {
        assert_eq!(self.d, rhs.d);
        let mut terms = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut a, mut b) = (self.terms.iter().peekable(), rhs.terms.iter().peekable());
        let signed = |c: &Rational| if negate { -c } else { c.clone() };
        loop {
            match (a.peek(), b.peek()) {
                (Some((ma, ca)), Some((mb, cb))) => match ma.cmp(mb) {
                    core::cmp::Ordering::Less => {
                        terms.push((ma.clone(), ca.clone()));
                        a.next();
                    }
                    core::cmp::Ordering::Greater => {
                        terms.push((mb.clone(), signed(cb)));
                        b.next();
                    }
                    core::cmp::Ordering::Equal => {
                        let c = if negate { ca - cb } else { ca + cb };
                        if !c.is_zero() {
                            terms.push((ma.clone(), c));
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some((m, c)), None) => {
                    terms.push((m.clone(), c.clone()));
                    a.next();
                }
                (None, Some((m, c))) => {
                    terms.push((m.clone(), signed(c)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Self { d: self.d, terms }
    }

    /// Drops zero coefficients. Terms are canonical by construction, so this is the
    /// only normalisation needed after raw edits.
    pub fn canonicalize(&self) -> Self {
        Self::from_terms(self.d, self.terms.clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.d);
        }
        Self {
            d: self.d,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiply by `x_i^n`.
    pub fn shift_x(&self, i: usize, n: u32) -> Self {
        Self {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| {
                    let mut m = m.clone();
                    m.exps[i] += n;
                    (m, v.clone())
                })
                .collect(),
        }
    }

    /// Multiply by `Φ_i`, folding `Φ_i²` into `1 - x_i²`.
    pub fn mul_phi(&self, i: usize) -> Self {
        let bit = 1u32 << i;
        let mut raw = Vec::with_capacity(self.terms.len() * 2);
        for (m, c) in &self.terms {
            if m.mask & bit == 0 {
                let mut m = m.clone();
                m.mask |= bit;
                raw.push((m, c.clone()));
            } else {
                let mut m = m.clone();
                m.mask &= !bit;
                raw.push((m.clone(), c.clone()));
                m.exps[i] += 2;
                raw.push((m, -c));
            }
        }
        Self::from_terms(self.d, raw)
    }

    /// Multiply by `1 - x_i²`.
    pub fn mul_d(&self, i: usize) -> Self {
        self - &self.shift_x(i, 2)
    }

    /// Exact quotient by `1 - x_i²`, if there is one.
    pub fn div_d(&self, i: usize) -> Option<Self> {
        // Group by everything except the exponent of x_i, then divide each group's
        // univariate polynomial from the top: p_e = q_e - q_{e-2}.
        let mut groups: BTreeMap<Monomial, BTreeMap<u32, Rational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut key = m.clone();
            let e = key.exps[i];
            key.exps[i] = 0;
            groups.entry(key).or_default().insert(e, c.clone());
        }
        let mut raw = Vec::new();
        for (key, p) in groups {
            let top = *p.keys().next_back().unwrap();
            if top < 2 {
                return None;
            }
            // q has degree top - 2; q_{e-2} = q_e - p_e, walking e downward.
            let mut q: Vec<Rational> = vec![Rational::zero(); top as usize + 1];
            let get = |e: u32| p.get(&e).cloned().unwrap_or_else(Rational::zero);
            let mut e = top;
            while e >= 2 {
                let qe = if (e as usize) < q.len() - 1 && e <= top - 2 {
                    q[e as usize].clone()
                } else {
                    Rational::zero()
                };
                q[e as usize - 2] = qe - get(e);
                e -= 1;
            }
            // Remainder: coefficients of x^1 and x^0 must match.
            if get(1) != q[1] || get(0) != q[0] {
                return None;
            }
            for (e, c) in q.into_iter().enumerate().take(top as usize - 1) {
                let mut m = key.clone();
                m.exps[i] = e as u32;
                if !c.is_zero() {
                    raw.push((m, c));
                }
            }
        }
        Some(Self::from_terms(self.d, raw))
    }

    /// Formal partial derivative in `x_i` split as `A + B / (1 - x_i²)`, both in the
    /// algebra. Terms without `Φ_i` only feed `A`.
    pub(crate) fn partial_split(&self, i: usize) -> (Self, Self) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exps[i];
            if e > 0 {
                let mut m1 = m.clone();
                m1.exps[i] -= 1;
                a.push((m1, c * rat(e as i64)));
            }
            if m.has_phi(i) {
                // ∂Φ_i = -x_i Φ_i / (1 - x_i²)
                let mut m2 = m.clone();
                m2.exps[i] += 1;
                b.push((m2, -c));
            }
        }
        (Self::from_terms(self.d, a), Self::from_terms(self.d, b))
    }

    /// Evaluate at a point with floats; used by the cross-checks against the
    /// numerical modules.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        let mut s = 0.0;
        for (m, c) in &self.terms {
            let mut v = c.to_f64().unwrap_or(f64::NAN);
            for (i, &e) in m.exps.iter().enumerate() {
                v *= crate::math::powi(x[i], e as i32);
                if m.has_phi(i) {
                    v *= crate::polycore::phi_unchecked(x[i]);
                }
            }
            s += v;
        }
        s
    }

    /// Human-readable term list, one string per term.
    pub fn term_strings(&self) -> Vec<String> {
        self.terms.iter().map(|(m, c)| format_term(m, c)).collect()
    }
}

fn format_term(m: &Monomial, c: &Rational) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    let _ = write!(s, "{c}");
    for (i, &e) in m.exps.iter().enumerate() {
        match e {
            0 => {}
            1 => {
                let _ = write!(s, "*x{}", i + 1);
            }
            _ => {
                let _ = write!(s, "*x{}^{e}", i + 1);
            }
        }
        if m.has_phi(i) {
            let _ = write!(s, "*Phi{}", i + 1);
        }
    }
    s
}

impl fmt::Debug for PhiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PhiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(if c.is_negative() { " " } else { " + " })?;
            }
            f.write_str(&format_term(m, c))?;
        }
        Ok(())
    }
}

impl core::ops::AddAssign<&PhiPoly> for PhiPoly {
    fn add_assign(&mut self, rhs: &PhiPoly) {
        *self = self.merged(rhs, false);
    }
}

impl core::ops::SubAssign<&PhiPoly> for PhiPoly {
    fn sub_assign(&mut self, rhs: &PhiPoly) {
        *self = self.merged(rhs, true);
    }
}

impl core::ops::Add for &PhiPoly {
    type Output = PhiPoly;
    fn add(self, rhs: &PhiPoly) -> PhiPoly {
        self.merged(rhs, false)
    }
}

impl core::ops::Sub for &PhiPoly {
    type Output = PhiPoly;
    fn sub(self, rhs: &PhiPoly) -> PhiPoly {
        self.merged(rhs, true)
    }
}

impl core::ops::Neg for &PhiPoly {
    type Output = PhiPoly;
    fn neg(self) -> PhiPoly {
        self.scale(&-Rational::one())
    }
}

impl core::ops::Mul for &PhiPoly {
    type Output = PhiPoly;
    fn mul(self, rhs: &PhiPoly) -> PhiPoly {
        assert_eq!(self.d, rhs.d);
        let d = self.d;
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let c = ca * cb;
                let exps: Exponents = ma.exps.iter().zip(&mb.exps).map(|(a, b)| a + b).collect();
                let overlap = ma.mask & mb.mask;
                let mask = ma.mask ^ mb.mask;
                if overlap == 0 {
                    raw.push((Monomial { exps, mask }, c));
                    continue;
                }
                // Expand ∏_{i ∈ overlap} (1 - x_i²).
                let bits: Vec<usize> = (0..d).filter(|i| overlap & (1 << i) != 0).collect();
                for choice in 0u32..(1 << bits.len()) {
                    let mut e = exps.clone();
                    let mut sign_negative = false;
                    for (n, &i) in bits.iter().enumerate() {
                        if choice & (1 << n) != 0 {
                            e[i] += 2;
                            sign_negative = !sign_negative;
                        }
                    }
                    let term = if sign_negative { -c.clone() } else { c.clone() };
                    raw.push((Monomial { exps: e, mask }, term));
                }
            }
        }
        PhiPoly::from_terms(d, raw)
    }
}
