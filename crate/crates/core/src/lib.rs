//! Certificates for the balanced-function / small-spectral-support
//! dichotomy on `Z_p`.
//!
//! Given `g : Z_p -> [0, 1]`, nonzero places `a_1..a_k` and a budget `E`, the
//! solver returns one of:
//!
//! * a function `h` in `[-1, 1]` that is `>= 0` on `support(g)`, `<= 0` off it,
//!   sums to zero, has `|h|_1 >= E`, and whose Fourier transform vanishes at
//!   every `a_i`; or
//! * a real trigonometric polynomial with spectrum in `{0, ±a_i}` that is
//!   strictly positive on `support(g)` and strictly negative off it, except
//!   on a bounded set of indices.
//!
//! Both outcomes can be re-checked with [`verify::verify_certificate`].
//!
//! Numeric code is generic: the simplex and hull layers run over any
//! [`Scalar`] (including exact [`num_rational::BigRational`]), the Fourier
//! layer over any [`Real`]. The aliases below fix the common `f64` choice.

pub mod cli;
pub mod dichotomy;
pub mod error;
pub mod format;
pub mod hull;
pub mod scalar;
pub mod simplex;
pub mod verify;
pub mod zp;

pub use dichotomy::{
    assemble_spectral, assemble_vanishing, build_sign_matrix, run_dichotomy, run_dichotomy_for_g,
    Certificate, SmallSpectralSupport, SolveConfig, VanishingBalanced,
};
pub use error::{Error, Result};
pub use hull::{
    caratheodory_reduce, origin_in_hull, separating_normal, GeometryConfig, HullOutcome,
    PointMatrix, SeparatingNormal, SparseCoefficients,
};
pub use scalar::{Real, Scalar};
pub use verify::{
    brute_force_sumset, demo_minorant, oracle_branch1, verify_certificate, VerificationReport,
    VerifyTolerances,
};
pub use zp::{
    convolve, dft, idft, reduce_places, support_of, PlaceSet, PrimeModulus, Spectrum, SupportSet,
    ZpFunction,
};

/// Exact rationals for small-instance cross-checks.
pub type Rational = num_rational::BigRational;

pub type ZpFunction64 = ZpFunction<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type Certificate64 = Certificate<f64>;
pub type SolveConfig64 = SolveConfig<f64>;
pub type PointMatrix64 = PointMatrix<f64>;
pub type HullOutcome64 = HullOutcome<f64>;
pub type GeometryConfig64 = GeometryConfig<f64>;

pub type ZpFunction32 = ZpFunction<f32>;
pub type Certificate32 = Certificate<f32>;

pub type ExactPointMatrix = PointMatrix<Rational>;
pub type ExactHullOutcome = HullOutcome<Rational>;
pub type ExactGeometryConfig = GeometryConfig<Rational>;
