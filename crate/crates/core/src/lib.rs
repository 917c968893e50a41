//! Twisted Milnor signatures, signature jumps and Levine-Tristram invariants
//! computed from matrix data.
//!
//! The layers build on each other:
//!
//! * [`cyclofield`]: exact cyclotomic scalars (and a float backend),
//! * [`matrix`] and [`laurent`]: dense matrices, Laurent polynomials over the
//!   scalars, Smith normal form over `F[t, t⁻¹]`,
//! * [`trace`]: the trace map `F(t)/Λ -> F`,
//! * [`hermforms`] and [`isostruct`]: Hermitian signatures, skew-isometric
//!   structures and Milnor signatures,
//! * [`linkforms`]: linking forms, dévissage and signature jumps,
//! * [`fibered`]: the fibered pipeline from intersection form and monodromy,
//!   Seifert matrices and Levine-Tristram signatures.

pub mod cyclofield;
pub mod error;
pub mod field;
pub mod fibered;
pub mod hermforms;
pub mod isostruct;
pub mod laurent;
pub mod linkforms;
pub mod matrix;
mod modp;
pub mod trace;

pub use cyclofield::{CycloNumber, FloatComplex};
pub use error::{Error, Result};
pub use field::{Backend, FieldFlavor, FlavorKind, Involution, Ring, Scalar, Sign};
