//! Whole-corpus verification: every explicit matrix, cover identity,
//! search and quiver law exposed as a named check with a structured
//! report. The CLI and the acceptance suite both run these.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::field::FieldCtx;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub details: Vec<String>,
    pub millis: u128,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({} ms)",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.millis
        )?;
        if !self.pass {
            for d in &self.details {
                write!(f, "\n    {d}")?;
            }
        }
        Ok(())
    }
}

pub struct Check {
    name: String,
    pass: bool,
    details: Vec<String>,
    start: Instant,
}

impl Check {
    pub fn new(name: &str) -> Check {
        Check {
            name: name.to_string(),
            pass: true,
            details: Vec::new(),
            start: Instant::now(),
        }
    }

    pub fn require(&mut self, cond: bool, detail: impl FnOnce() -> String) {
        if !cond {
            self.pass = false;
            self.details.push(detail());
        }
    }

    pub fn note(&mut self, detail: String) {
        self.details.push(detail);
    }

    pub fn fail(&mut self, detail: String) {
        self.pass = false;
        self.details.push(detail);
    }

    pub fn finish(self) -> CheckReport {
        CheckReport {
            name: self.name,
            pass: self.pass,
            details: self.details,
            millis: self.start.elapsed().as_millis(),
        }
    }
}

/// Default field list for the explicit-matrix suite.
pub fn default_fields() -> Vec<FieldCtx> {
    vec![
        FieldCtx::Q,
        FieldCtx::Fp(2),
        FieldCtx::Fp(3),
        FieldCtx::Fp(5),
        FieldCtx::Fp(7),
    ]
}

mod checks;
pub use checks::{check_names, data_hashes, run_all, run_check};
