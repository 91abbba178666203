//! Exact construction of numbers in missing-digit Cantor sets whose
//! continued-fraction convergents lie in the set, with machine-checkable
//! certificates.
//!
//! The pipeline is [`build::run`] → [`certificate::Certificate`] →
//! [`verify::verify_all`]. Arithmetic is exact throughout: big integers,
//! rationals, and the symbolic [`psi::ExpForm`] for quantities too large to
//! write down.

pub mod build;
pub mod certificate;
pub mod cli;
pub mod numth;
pub mod psi;
pub mod verify;
pub mod words;

pub use build::{run, ConstructionParams, ConstructionStep, Mode};
pub use certificate::{Certificate, Status};
pub use psi::Psi;
pub use verify::{verify_all, CheckKind, CheckReport, Verdict, VerificationReport, VerifyOptions};
pub use words::{DigitPair, DigitWord};
