use serde::{Deserialize, Serialize};

/// One named check with its worst observed violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub residual: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(check: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            check: check.into(),
            residual,
            pass: residual.is_finite() && residual <= tol,
        }
    }

    pub fn flag(check: impl Into<String>, pass: bool) -> Self {
        Self {
            check: check.into(),
            residual: if pass { 0.0 } else { 1.0 },
            pass,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn record(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        self.push(Check::new(name, residual, tol));
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.check == name)
    }

    /// Merges checks sharing a name, keeping the worst residual.
    pub fn condensed(&self) -> Report {
        let mut out: Vec<Check> = Vec::new();
        for c in &self.checks {
            match out.iter_mut().find(|o| o.check == c.check) {
                Some(o) => {
                    o.residual = o.residual.max(c.residual);
                    o.pass &= c.pass;
                }
                None => out.push(c.clone()),
            }
        }
        out.sort_by(|a, b| a.check.cmp(&b.check));
        Report { checks: out }
    }
}
