//! AspectKBL: a tuple-space coordination language with Belnap-logic access
//! control aspects, its reaction semantics, and two checkers for global
//! `AG` obligations.

pub mod belnap;
pub mod diag;
pub mod model;
pub mod parser;
pub mod report;
pub mod mc_exhaustive;
pub mod mc_static;
pub mod semantics;

pub use belnap::{Connective, Four};
pub use diag::{Diagnostic, Severity, Span};
pub use parser::{parse_net, parse_obligation, parse_policy, SourceFile};
