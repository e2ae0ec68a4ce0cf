//! Concrete syntax: `.akbl` networks and `.obl` obligations.
//!
//! The grammar is documented in `docs/grammar.md`. Every `Display` impl of
//! the syntax tree prints text that parses back to the same tree.

mod grammar;
mod lexer;
mod render;

use std::path::Path;

pub use grammar::{is_valid_name, parse_net, parse_obligation, parse_policy};

use crate::diag::Diagnostic;
use crate::model::{Net, Obligation};

/// Source text together with the path used in diagnostics.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceFile { path: path.into(), text: text.into() }
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        Ok(SourceFile { path: path.display().to_string(), text: std::fs::read_to_string(path)? })
    }

    pub fn parse_net(&self) -> Result<Net, Vec<Diagnostic>> {
        parse_net(&self.text)
    }

    pub fn parse_obligation(&self) -> Result<Obligation, Vec<Diagnostic>> {
        parse_obligation(&self.text)
    }

    pub fn render(&self, diags: &[Diagnostic]) -> String {
        diags.iter().map(|d| d.render(&self.path)).collect::<Vec<_>>().join("\n")
    }
}
