//! Exact arithmetic for definite rational quaternion algebras: orders with
//! prescribed local structure, right ideal class sets, Brandt matrices, theta
//! series, and comparison of the resulting Hecke data against classical
//! newform tables.
//!
//! Everything is computed over `BigInt`/`BigRational`; there is no floating
//! point and no randomness anywhere, so every entry point is reproducible
//! byte for byte.

pub mod arith;
pub mod brandt;
pub mod error;
pub mod ideal;
pub mod lattice;
pub mod mat;
pub mod oracle;
pub mod order;
pub mod poly;
pub mod quat;
pub mod theta;

pub use arith::{divisor_sum_constrained, factor, hilbert_symbol, kronecker, Place};
pub use brandt::{hecke_module, BrandtFamily, HeckeModule, HeckeModuleReport, Tower};
pub use error::Error;
pub use ideal::{class_set, mass_eichler, ClassSet, ClassSetOptions, RightIdeal};
pub use lattice::{GramForm, ShortVectors};
pub use mat::IntMat;
pub use oracle::{
    congruence_check, dim_new_cusp, genus_x0, load_fixtures, local_multiplicity,
    predict_decomposition, predicted_theta_kernel, verify_decomposition, Confidence,
    DecompositionPrediction, FixtureDb, LocalKind, LocalMultiplicity, LocalRepDescriptor,
    NewformRecord, PredictedTerm, VerificationReport,
};
pub use order::{Order, OrderLocalType};
pub use poly::CharPoly;
pub use quat::{QuatAlgebra, QuatElement};
pub use theta::{eisenstein_q_expansion, eta_product, theta_entry, theta_new_span, QExpansion};

/// Arbitrary-precision integer used throughout.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rat = num_rational::BigRational;

/// Convenience constructor for small integers.
pub fn int(n: i64) -> Int {
    Int::from(n)
}

/// Convenience constructor for small rationals.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}
