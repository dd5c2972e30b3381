//! Check results shared by all verification routines.

use crate::scalars::{ParamPoint, Rat};
use serde::Serialize;

/// Outcome of one exact check. `residual` is the exact deviation when the
/// check is an identity (zero iff it holds); boolean checks carry none.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Rat>,
    /// Evaluation point, attached to failures so they can be replayed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<ParamPoint>,
}

impl Check {
    /// An identity check: passes iff the residual is exactly zero.
    pub fn exact(name: impl Into<String>, residual: Rat) -> Check {
        Check { name: name.into(), pass: residual.is_zero(), residual: Some(residual), point: None }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Check {
        Check { name: name.into(), pass, residual: None, point: None }
    }

    /// A recorded quantity that is not asserted: always passes, but keeps the
    /// value visible in reports. Used for residuals that are expected to be
    /// nonzero outside a verified subspace.
    pub fn info(name: impl Into<String>, residual: Rat) -> Check {
        Check { name: name.into(), pass: true, residual: Some(residual), point: None }
    }

    pub fn with_point(mut self, point: &ParamPoint) -> Check {
        if !self.pass {
            self.point = Some(point.clone());
        }
        self
    }
}

/// True iff every check passed.
pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// First failing check, for error messages.
pub fn first_failure(checks: &[Check]) -> Option<&Check> {
    checks.iter().find(|c| !c.pass)
}

/// Aggregated result of one verification suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub n: usize,
    pub l: usize,
    pub trials: usize,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(
        suite: impl Into<String>,
        n: usize,
        l: usize,
        trials: usize,
        seed: u64,
        checks: Vec<Check>,
    ) -> SuiteReport {
        let pass = all_pass(&checks);
        SuiteReport { suite: suite.into(), n, l, trials, seed, pass, checks }
    }
}
