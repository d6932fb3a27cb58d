//! Bookkeeping for the acceptance suite: each criterion collects named
//! sub-checks and renders as one PASS/FAIL line.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
        }
    }

    /// Records a sub-check; `detail` should carry the observed numbers.
    pub fn check(&mut self, label: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "[{status}] criterion {:>2}: {}", self.id, self.title)?;
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            write!(f, "\n         {mark} {}: {}", c.label, c.detail)?;
        }
        Ok(())
    }
}

/// Relative difference, absolute when `want` is zero.
pub fn rel_diff(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// Largest value in `xs`, 0 for an empty slice.
pub fn worst(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}
