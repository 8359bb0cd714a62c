//! Exact computation with p-adic Hardy operators on radial step functions.
//!
//! The crate computes over `Q_p^n` (fixed prime `p`, dimension `n >= 1`)
//! with the ultrametric norm `|x|_p` and the Haar measure normalized by
//! `|B_0| = 1`. Every quantity lives on the sphere grid `|x|_p = p^k`, so
//! valuations, measures, operator images, and norm functionals admit exact
//! rational (or `p`-power monomial) representations. Arbitrary-precision
//! decimal approximation enters only where a genuinely irrational root is
//! required, at a configurable number of significant digits.
//!
//! Modules, bottom to top:
//!
//! * [`scalar`] — exact rationals with a demotable high-precision mode, plus
//!   `p`-power monomials with exact multiplication and ordering.
//! * [`padic`] — valuations, ultrametric norms, ball and sphere measures
//!   (plain and power-weighted).
//! * [`radial`] — radial step functions (constant inner ball, finitely many
//!   spheres) and their cumulative-mass profiles.
//! * [`hardy`] — the fractional Hardy operator in closed form: windowed
//!   values plus two analytic power-law tails.
//! * [`norm`] — the four norm functionals (`L^q`, weak `L^q`, central
//!   Morrey, weak central Morrey) with exact superlevel-set geometry.
//! * [`verify`] — sharp-constant checks: extremizer equality, randomized
//!   non-exceedance sweeps, and hill-climbing sharpness searches.

pub mod error;
pub mod hardy;
pub mod norm;
pub mod padic;
pub mod radial;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result, Tail};
pub use hardy::{HardyParams, RadialHardyImage};
pub use norm::{NormKind, NormOutcome, NormSpec, NormValue, RadialProfile, SuperlevelGeometry};
pub use padic::{PAdicParams, RadiusExp, Valuation, WeightSpec};
pub use radial::{MassProfile, RadialStepFunction, RandomFnConfig, SignMode};
pub use scalar::{PowExpr, Precision, Scalar};
pub use verify::{EndpointConfig, MorreyConfig, VerificationReport};
