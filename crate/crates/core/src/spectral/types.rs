use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::polycore::{eigenvalue_value, squared_norm, ParamPair};
use crate::{math, Error, Result};

/// Per-coordinate type parameters `(α_i, β_i)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamVector {
    pairs: Vec<ParamPair>,
}

impl ParamVector {
    pub fn new(alpha: &[f64], beta: &[f64]) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::DimensionMismatch {
                expected: alpha.len(),
                found: beta.len(),
            });
        }
        let pairs = alpha
            .iter()
            .zip(beta)
            .map(|(&a, &b)| ParamPair::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(pairs)
    }

    pub fn from_pairs(pairs: Vec<ParamPair>) -> Result<Self> {
        if pairs.is_empty() || pairs.len() > 32 {
            return Err(Error::InvalidArgument("dimension must be in 1..=32".into()));
        }
        Ok(Self { pairs })
    }

    /// The same `(α, β)` in every coordinate.
    pub fn uniform(d: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::from_pairs(alloc::vec![ParamPair::new(alpha, beta)?; d])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[ParamPair] {
        &self.pairs
    }

    #[inline]
    pub fn pair(&self, i: usize) -> ParamPair {
        self.pairs[i]
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.alpha()).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.beta()).collect()
    }

    /// `(α + e_i, β + e_i)`.
    pub fn shifted(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.pairs[i] = s.pairs[i].raised();
        s
    }

    pub fn in_half_range(&self) -> bool {
        self.pairs.iter().all(ParamPair::in_half_range)
    }

    /// `λ_k = Σ_i k_i (k_i + α_i + β_i + 1)`.
    pub fn eigenvalue(&self, k: &[u32]) -> f64 {
        k.iter()
            .zip(&self.pairs)
            .map(|(&ki, &p)| eigenvalue_value(p, ki))
            .sum()
    }

    /// `‖P_k‖²` in `L²(dμ)`.
    pub fn squared_norm(&self, k: &[u32]) -> f64 {
        k.iter()
            .zip(&self.pairs)
            .map(|(&ki, &p)| squared_norm(p, ki))
            .product()
    }

    /// `∫ dμ`.
    pub fn total_mass(&self) -> f64 {
        self.pairs.iter().map(ParamPair::total_mass).product()
    }
}

/// Which orthogonal system the coefficients of an [`Expansion`] refer to.
///
/// `Shifted(i)` is zero-based: it denotes `Φ_{i+1} P_k^{(α+e_{i+1},β+e_{i+1})}` in
/// one-based coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Basis {
    Standard,
    Shifted(usize),
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Standard => f.write_str("standard"),
            Basis::Shifted(i) => write!(f, "shifted-{}", i + 1),
        }
    }
}

/// Degree vector `k ∈ ℕ^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(k: Vec<u32>) -> Self {
        Self(k)
    }

    pub fn zero(d: usize) -> Self {
        Self(alloc::vec![0; d])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// `k + e_i`.
    pub fn raised(&self, i: usize) -> Self {
        let mut k = self.0.clone();
        k[i] += 1;
        Self(k)
    }

    /// `k - e_i`, or `None` when `k_i = 0`.
    pub fn lowered(&self, i: usize) -> Option<Self> {
        let mut k = self.0.clone();
        k[i] = k[i].checked_sub(1)?;
        Some(Self(k))
    }

    /// All `k` with `0 ≤ k_j ≤ cap`, lexicographic.
    pub fn box_modes(d: usize, cap: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = alloc::vec![0u32; d];
        loop {
            out.push(Self(cur.clone()));
            let mut j = d;
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if cur[j] < cap {
                    cur[j] += 1;
                    break;
                }
                cur[j] = 0;
            }
        }
    }

    /// All `k` with `|k| = s`.
    pub fn shell(d: usize, s: u32) -> Vec<MultiIndex> {
        fn rec(d: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if cur.len() + 1 == d {
                cur.push(left);
                out.push(MultiIndex(cur.clone()));
                cur.pop();
                return;
            }
            for k in 0..=left {
                cur.push(k);
                rec(d, left - k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(d, s, &mut Vec::with_capacity(d), &mut out);
        out
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (n, k) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str(")")
    }
}

/// Truncated Fourier–Jacobi expansion `Σ_k c_k B_k` in a given basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    params: ParamVector,
    basis: Basis,
    coeffs: BTreeMap<MultiIndex, f64>,
    degree_cap: u32,
}

impl Expansion {
    pub fn new(params: ParamVector, basis: Basis, degree_cap: u32) -> Result<Self> {
        if let Basis::Shifted(i) = basis {
            if i >= params.dim() {
                return Err(Error::InvalidArgument(alloc::format!(
                    "shifted coordinate {} out of range for d = {}",
                    i + 1,
                    params.dim()
                )));
            }
        }
        Ok(Self {
            params,
            basis,
            coeffs: BTreeMap::new(),
            degree_cap,
        })
    }

    /// A single basis function.
    pub fn single_mode(params: ParamVector, basis: Basis, k: MultiIndex) -> Result<Self> {
        let cap = k.as_slice().iter().copied().max().unwrap_or(0);
        let mut e = Self::new(params, basis, cap)?;
        e.set(k, 1.0)?;
        Ok(e)
    }

    /// The constant function `1` in the standard basis.
    pub fn constant(params: ParamVector, value: f64) -> Self {
        let d = params.dim();
        let mut e = Self {
            params,
            basis: Basis::Standard,
            coeffs: BTreeMap::new(),
            degree_cap: 0,
        };
        e.coeffs.insert(MultiIndex::zero(d), value);
        e
    }

    /// i.i.d. standard-normal coefficients on every mode `k ≤ cap` componentwise.
    pub fn random<R: Rng + ?Sized>(
        params: ParamVector,
        basis: Basis,
        cap: u32,
        rng: &mut R,
    ) -> Result<Self> {
        let mut e = Self::new(params, basis, cap)?;
        for k in MultiIndex::box_modes(e.dim(), cap) {
            let v: f64 = rng.sample(StandardNormal);
            e.coeffs.insert(k, v);
        }
        Ok(e)
    }

    pub fn params(&self) -> &ParamVector {
        &self.params
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn coefficients(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.coeffs
    }

    pub fn get(&self, k: &MultiIndex) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, k: MultiIndex, v: f64) -> Result<()> {
        if k.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: k.dim(),
            });
        }
        if let Some(&m) = k.as_slice().iter().find(|&&m| m > self.degree_cap) {
            return Err(Error::DegreeCap {
                degree: m,
                cap: self.degree_cap,
            });
        }
        if v == 0.0 {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, v);
        }
        Ok(())
    }

    pub(crate) fn with_coefficients(
        &self,
        basis: Basis,
        degree_cap: u32,
        coeffs: BTreeMap<MultiIndex, f64>,
    ) -> Self {
        Self {
            params: self.params.clone(),
            basis,
            coeffs,
            degree_cap,
        }
    }

    /// Same basis, coefficients transformed mode by mode.
    pub(crate) fn map_coefficients(&self, mut f: impl FnMut(&MultiIndex, f64) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, &v)| (k.clone(), f(k, v)))
            .collect();
        self.with_coefficients(self.basis, self.degree_cap, coeffs)
    }

    pub fn require_basis(&self, expected: Basis) -> Result<()> {
        if self.basis == expected {
            Ok(())
        } else {
            Err(Error::BasisMismatch {
                expected,
                found: self.basis,
            })
        }
    }

    /// Eigenvalue attached to mode `k` of this basis: `λ_k` for the standard basis and
    /// `λ_{k+e_i}` (original parameters) for the `i`-shifted one.
    pub fn mode_eigenvalue(&self, k: &MultiIndex) -> f64 {
        match self.basis {
            Basis::Standard => self.params.eigenvalue(k.as_slice()),
            Basis::Shifted(i) => self.params.eigenvalue(k.raised(i).as_slice()),
        }
    }

    /// Squared `L²(dμ)` norm of basis function `k`.
    pub fn mode_norm_squared(&self, k: &MultiIndex) -> f64 {
        match self.basis {
            Basis::Standard => self.params.squared_norm(k.as_slice()),
            Basis::Shifted(i) => self.params.shifted(i).squared_norm(k.as_slice()),
        }
    }

    /// `‖f‖²₂` by Parseval.
    pub fn l2_norm_squared(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, v)| v * v * self.mode_norm_squared(k))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        math::sqrt(self.l2_norm_squared())
    }

    /// Largest coefficient difference against `other` (same basis and parameters).
    pub fn max_coefficient_difference(&self, other: &Expansion) -> Result<f64> {
        other.require_basis(self.basis)?;
        let mut m: f64 = 0.0;
        for k in self.coeffs.keys().chain(other.coeffs.keys()) {
            m = m.max(math::abs(self.get(k) - other.get(k)));
        }
        Ok(m)
    }

    /// Coefficient-wise sum; both operands must share basis and parameters.
    pub fn add(&self, other: &Expansion) -> Result<Expansion> {
        other.require_basis(self.basis)?;
        if self.params != other.params {
            return Err(Error::InvalidArgument(
                "expansions have different parameters".into(),
            ));
        }
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            *coeffs.entry(k.clone()).or_insert(0.0) += v;
        }
        Ok(self.with_coefficients(self.basis, self.degree_cap.max(other.degree_cap), coeffs))
    }

    pub fn scaled(&self, c: f64) -> Expansion {
        self.map_coefficients(|_, v| c * v)
    }
}
