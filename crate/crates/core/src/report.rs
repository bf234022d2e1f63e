//! Check records shared by the verification suite, the CLI and the FFI.

use std::fmt::Write as _;

use serde::Serialize;

use crate::qkernel::DeformationParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamsRecord {
    pub q: f64,
    pub lsq: f64,
    pub lambda: f64,
    pub dim: usize,
}

impl ParamsRecord {
    pub fn new(p: &DeformationParams, dim: usize) -> Self {
        Self { q: p.q(), lsq: p.lsq(), lambda: p.lambda(), dim }
    }
}

/// One identity checked numerically. `asserted` is false for displays that are
/// recorded for comparison only; those never fail a run.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub reference: String,
    pub params: ParamsRecord,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub asserted: bool,
}

impl CheckReport {
    pub fn asserted(check: impl Into<String>, reference: impl Into<String>, params: ParamsRecord, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            reference: reference.into(),
            params,
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            asserted: true,
        }
    }

    pub fn reported(check: impl Into<String>, reference: impl Into<String>, params: ParamsRecord, residual: f64, tolerance: f64) -> Self {
        Self { asserted: false, ..Self::asserted(check, reference, params, residual, tolerance) }
    }

    /// A check that could not be evaluated; asserted checks fail with it.
    pub fn errored(check: impl Into<String>, reference: impl Into<String>, params: ParamsRecord, err: &crate::Error, asserted: bool) -> Self {
        Self {
            check: check.into(),
            reference: format!("{} (error: {err})", reference.into()),
            params,
            residual: f64::NAN,
            tolerance: 0.0,
            pass: false,
            asserted,
        }
    }

    pub fn fails_run(&self) -> bool {
        self.asserted && !self.pass
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Suite {
    pub checks: Vec<CheckReport>,
}

impl Suite {
    pub fn push(&mut self, c: CheckReport) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Suite) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        !self.checks.iter().any(CheckReport::fails_run)
    }

    pub fn to_json(&self) -> String {
        // NaN residuals of errored checks become null
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,q,lsq,lambda,dim,residual,tolerance,pass,asserted\n");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                csv_field(&c.check),
                fmt_f64(c.params.q),
                fmt_f64(c.params.lsq),
                fmt_f64(c.params.lambda),
                c.params.dim,
                fmt_f64(c.residual),
                fmt_f64(c.tolerance),
                c.pass,
                c.asserted
            );
        }
        s
    }
}

/// 17 significant digits, the round-trip width for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec() -> ParamsRecord {
        ParamsRecord::new(&DeformationParams::new(0.5, 1.0, 0.0).unwrap(), 8)
    }

    #[test]
    fn reported_checks_never_fail_the_suite() {
        let mut s = Suite::default();
        s.push(CheckReport::asserted("a", "x", rec(), 1e-12, 1e-10));
        s.push(CheckReport::reported("b", "y", rec(), 3.0, 1e-10));
        assert!(s.all_pass());
        assert!(!s.checks[1].pass);
        s.push(CheckReport::asserted("c", "z", rec(), f64::NAN, 1e-10));
        assert!(!s.all_pass());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_has_expected_fields() {
        let mut s = Suite::default();
        s.push(CheckReport::asserted("a", "x", rec(), 0.0, 1.0));
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        let c = &v["checks"][0];
        for k in ["check", "reference", "params", "residual", "tolerance", "pass", "asserted"] {
            assert!(c.get(k).is_some(), "{k}");
        }
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }
}
