//! Structured outcome of an identity check.

use serde::Serialize;

use crate::error::Error;
use crate::scalar::{Backend, Residual, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One sub-identity of a check with its max-norm residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Part {
    pub name: String,
    pub residual: Residual,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub config: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Part>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Check-specific payload, e.g. the coefficients of a built covector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// Correspondence checks report through the same record.
pub type CorrespondenceResult = CheckReport;

impl CheckReport {
    pub fn new(name: impl Into<String>, config: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            config: config.into(),
            status: Status::Pass,
            residual: None,
            eigenvalue: None,
            parts: Vec::new(),
            notes: Vec::new(),
            data: None,
            elapsed_ms: None,
        }
    }

    /// A failed report carrying the error message.
    pub fn from_error(name: impl Into<String>, config: impl Into<String>, err: &Error) -> Self {
        let mut r = Self::new(name, config);
        r.status = Status::Fail;
        r.notes.push(format!("error: {err}"));
        r
    }

    pub fn skipped(name: impl Into<String>, config: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut r = Self::new(name, config);
        r.status = Status::Skipped;
        r.notes.push(format!("skipped: {}", reason.into()));
        r
    }

    /// Records a sub-identity; the overall residual is the max over parts.
    pub fn part(&mut self, name: impl Into<String>, residual: Residual) {
        let pass = residual.passes();
        if !pass && self.status != Status::Skipped {
            self.status = Status::Fail;
        }
        self.residual = Some(match self.residual.take() {
            Some(r) => r.max(residual.clone()),
            None => residual.clone(),
        });
        self.parts.push(Part { name: name.into(), residual, pass });
    }

    /// Records a requirement that has no numeric residual.
    pub fn require(&mut self, name: impl Into<String>, ok: bool) {
        let name = name.into();
        if !ok {
            self.status = Status::Fail;
            self.notes.push(format!("failed: {name}"));
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn with_eigenvalue(mut self, e: Value) -> Self {
        self.eigenvalue = Some(e);
        self
    }

    /// Folds another report's parts into this one, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for p in other.parts {
            self.part(format!("{prefix}{}", p.name), p.residual);
        }
        for n in other.notes {
            self.notes.push(format!("{prefix}{n}"));
        }
        if other.status == Status::Fail {
            self.status = Status::Fail;
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn is_skipped(&self) -> bool {
        self.status == Status::Skipped
    }

    /// Residual for display; a report without parts counts as zero.
    pub fn residual_or_zero(&self, backend: Backend) -> Residual {
        self.residual.clone().unwrap_or_else(|| Residual::zero(backend))
    }
}
