//! Conjugacy for multi-dimensional Jacobi polynomial expansions.
//!
//! The crate covers the whole chain from one-dimensional Jacobi polynomials up to
//! Riesz transforms, conjugate Poisson integrals and Littlewood–Paley square
//! functions on `(-1, 1)^d` with the product beta measure
//! `dμ(x) = ∏ (1 - x_i)^{α_i} (1 + x_i)^{β_i} dx`.
//!
//! * [`polycore`]: scalar Jacobi polynomials, eigenvalues, norms.
//! * [`exactalg`]: an exact-rational algebra of `Φ`-weighted polynomials used as an
//!   oracle for the differential and spectral identities.
//! * [`quadrature`]: Gauss–Jacobi rules, tensor grids, Fourier–Jacobi coefficients.
//! * [`spectral`]: expansions, the heat/Poisson semigroups and their modified
//!   versions, kernels, subordination.
//! * [`conjugacy`]: Riesz transforms, their adjoints, conjugate Poisson integrals and
//!   Cauchy–Riemann residual checks.
//! * [`squarefn`]: g-functions, domination and energy checks, operator-norm probes.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod conjugacy;
mod error;
pub mod exactalg;
pub(crate) mod math;
pub mod polycore;
pub mod quadrature;
pub mod spectral;
pub mod squarefn;

pub use error::{Error, Result};
pub use polycore::{ParamPair, SpectralMode1D};
pub use spectral::{Basis, Expansion, MultiIndex, ParamVector};
