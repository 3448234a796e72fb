//! Outcome bookkeeping for the acceptance report: each criterion is a set of
//! checks plus a runtime budget, and its status is the worst of them.

use std::fmt;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        })
    }
}

impl From<bool> for Status {
    fn from(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub detail: String,
    /// `None` marks a reported quantity that does not count toward the status.
    pub status: Option<Status>,
}

impl Check {
    pub fn new(label: impl Into<String>, status: impl Into<Status>, detail: impl Into<String>) -> Self {
        Check { label: label.into(), detail: detail.into(), status: Some(status.into()) }
    }

    pub fn info(label: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { label: label.into(), detail: detail.into(), status: None }
    }

    /// |value − target| ≤ tol.
    pub fn near(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        let gap = (value - target).abs();
        Check::new(label, gap <= tol, format!("{value:.6e} vs {target:.6e}, |Δ| = {gap:.2e} (tol {tol:.0e})"))
    }

    /// value ≤ bound.
    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(label, value <= bound, format!("{value:.3e} ≤ {bound:.0e}"))
    }
}

#[derive(Debug, Clone)]
pub struct Criterion {
    pub number: usize,
    pub title: String,
    pub budget: Duration,
    pub elapsed: Duration,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }

    pub fn status(&self) -> Status {
        let worst = self.checks.iter().filter_map(|c| c.status).max().unwrap_or(Status::Inconclusive);
        worst.max(Status::from(self.within_budget()))
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "criterion {:>2}: {} {}", self.number, self.status(), self.title)?;
        for c in &self.checks {
            let tag = c.status.map_or_else(|| "info".to_string(), |s| s.to_string());
            writeln!(f, "    [{tag}] {}: {}", c.label, c.detail)?;
        }
        let runtime = if self.within_budget() { "within" } else { "over" };
        write!(f, "    runtime {:.2} s, {runtime} budget {} s", self.elapsed.as_secs_f64(), self.budget.as_secs())
    }
}
