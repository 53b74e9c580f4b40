//! Exact-rational algebra of `Φ`-weighted polynomials.
//!
//! Elements are finite sums `c · x^e · ∏_{i∈S} Φ_i` with rational `c` and
//! `Φ_i = √(1 - x_i²)`. The algebra is closed under `δ_i`, and `δ*_i`, `J`, `M_i`
//! land in it whenever their singular coefficients cancel; when they do not, the
//! operation reports [`Error::NotRepresentable`](crate::Error::NotRepresentable).
//! Everything here is arbitrary precision and is used as the oracle for the
//! floating-point modules.

mod frac;
mod identities;
mod ops;
mod poly;
mod quad;
mod rational;

pub use rational::Rational;

pub use identities::{
    modes_up_to, verify_identities, verify_identity, verify_identity_at, IdentityId,
    IdentityParams, IdentityReport, Status,
};
pub use ops::{
    apply_delta, apply_delta_star, apply_jacobi_operator, apply_modified_operator,
    apply_modified_operator_commutator, factorized_jacobi_operator, jacobi_coefficients,
    jacobi_exact, jacobi_exact_multi, shifted_basis_exact, RationalParamVector, DEFAULT_DEGREE_CAP,
};
pub use poly::{Monomial, PhiPoly};
pub use quad::{ModeFunction, QuadExtScalar, QuadPoly};
