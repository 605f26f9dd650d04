//! Verification reports: one record per named identity, JSON and markdown output.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::AqgError;
use crate::hopf::{Element, TensorElement};
use crate::scalar::Scalar;

pub const SCHEMA: &str = "aqg-report v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub tier: Tier,
    pub status: Status,
    /// `"0"` for an exact pass; otherwise the largest residual, scaled for the checks that set `absolute_residual`.
    pub residual: String,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Largest unscaled residual, present when `residual` is relative to the operand scale.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absolute_residual: Option<String>,
}

impl CheckRecord {
    pub fn info(id: &str, anchor: &str, note: impl Into<String>) -> Self {
        Self {
            id: id.to_string(),
            anchor: anchor.to_string(),
            tier: Tier::Exact,
            status: Status::Info,
            residual: "0".into(),
            cases: 0,
            witness: None,
            note: Some(note.into()),
            absolute_residual: None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Environment {
    pub example: String,
    pub q: Option<String>,
    pub degree: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub t_samples: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: String,
    pub suite: String,
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(suite: &str, environment: Environment) -> Self {
        Self { schema: SCHEMA.to_string(), suite: suite.to_string(), environment, checks: Vec::new() }
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    /// Sorts by check id so output does not depend on evaluation order.
    pub fn normalize(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| c.status == Status::Fail).collect()
    }

    pub fn get(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut r = self.clone();
        r.normalize();
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut r = self.clone();
        r.normalize();
        let mut groups: BTreeMap<String, Vec<&CheckRecord>> = BTreeMap::new();
        for c in &r.checks {
            groups.entry(section_of(&c.anchor)).or_default().push(c);
        }
        let env = &r.environment;
        let mut out = format!("# {} report: `{}`\n\n", r.suite, env.example);
        out += &format!(
            "- q: {}\n- degree: {}\n- tolerance: {:e}\n- seed: {}\n- result: {}\n\n",
            env.q.as_deref().unwrap_or("-"),
            env.degree,
            env.tolerance,
            env.seed,
            if r.passed() { "PASS" } else { "FAIL" }
        );
        for (section, checks) in groups {
            out += &format!("## {section}\n\n| id | anchor | tier | status | residual | cases |\n|---|---|---|---|---|---|\n");
            for c in checks {
                out += &format!(
                    "| {} | {} | {:?} | {:?} | {} | {} |\n",
                    c.id, c.anchor, c.tier, c.status, c.residual, c.cases
                );
                if let Some(w) = &c.witness {
                    out += &format!("|  | witness: {} |  |  |  |  |\n", w.replace('|', "/"));
                }
                if let Some(a) = &c.absolute_residual {
                    out += &format!("|  | absolute residual: {a} |  |  |  |  |\n");
                }
                if let Some(n) = &c.note {
                    out += &format!("|  | note: {} |  |  |  |  |\n", n.replace('|', "/"));
                }
            }
            out += "\n";
        }
        out
    }
}

fn section_of(anchor: &str) -> String {
    let num = anchor.split_whitespace().nth(1).unwrap_or("");
    match num.split('.').next() {
        Some(s) if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric()) && anchor.starts_with(['P', 'D', 'R']) => {
            format!("Section {s}")
        }
        _ => "Structure".to_string(),
    }
}

/// Accumulates the outcome of one identity over many test cases.
pub struct Check {
    id: String,
    anchor: String,
    tier: Tier,
    tol: f64,
    max_residual: f64,
    max_absolute: Option<f64>,
    failed: bool,
    cases: usize,
    witness: Option<String>,
    note: Option<String>,
}

impl Check {
    /// Exact comparison; a float value anywhere downgrades the record to tolerance mode.
    pub fn exact(id: &str, anchor: &str, tol: f64) -> Self {
        Self { id: id.into(), anchor: anchor.into(), tier: Tier::Exact, tol, max_residual: 0.0, max_absolute: None, failed: false, cases: 0, witness: None, note: None }
    }

    pub fn float(id: &str, anchor: &str, tol: f64) -> Self {
        Self { tier: Tier::Float, ..Self::exact(id, anchor, tol) }
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.note = Some(n.into());
    }

    fn fail_with(&mut self, w: String) {
        self.failed = true;
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }

    fn outcome(&mut self, exact_zero: bool, is_exact: bool, residual: f64, w: impl FnOnce() -> String) -> bool {
        self.cases += 1;
        if !is_exact {
            self.tier = Tier::Float;
        }
        self.max_residual = self.max_residual.max(residual);
        let ok = if is_exact && self.tier == Tier::Exact { exact_zero } else { residual <= self.tol };
        if !ok {
            self.fail_with(w());
        }
        ok
    }

    pub fn elements(&mut self, lhs: &Element, rhs: &Element, w: impl FnOnce() -> String) -> bool {
        match lhs.checked_sub(rhs) {
            Ok(d) => {
                let r = d.max_abs();
                let zero = d.is_zero();
                self.outcome(zero, d.is_exact(), r, || format!("{}; residual {d}", w()))
            }
            Err(e) => {
                self.error(&e);
                false
            }
        }
    }

    fn scaled(&mut self, d_abs: f64, scale: f64, exact: bool) -> f64 {
        if exact {
            return d_abs;
        }
        self.max_absolute = Some(self.max_absolute.unwrap_or(0.0).max(d_abs));
        d_abs / scale.max(1.0)
    }

    /// Like [`Check::elements`], but a float residual is divided by the largest
    /// coefficient of the two sides when that exceeds 1.
    pub fn elements_scaled(&mut self, lhs: &Element, rhs: &Element, w: impl FnOnce() -> String) -> bool {
        match lhs.checked_sub(rhs) {
            Ok(d) => {
                let r = self.scaled(d.max_abs(), lhs.max_abs().max(rhs.max_abs()), d.is_exact());
                self.outcome(d.is_zero(), d.is_exact(), r, || format!("{}; residual {d}", w()))
            }
            Err(e) => {
                self.error(&e);
                false
            }
        }
    }

    /// Tensor version of [`Check::elements_scaled`].
    pub fn tensors_scaled(&mut self, lhs: &TensorElement, rhs: &TensorElement, w: impl FnOnce() -> String) -> bool {
        let d = lhs.sub(rhs);
        let r = self.scaled(d.max_abs(), lhs.max_abs().max(rhs.max_abs()), d.is_exact());
        self.outcome(d.is_zero(), d.is_exact(), r, || format!("{}; residual {d}", w()))
    }

    pub fn tensors(&mut self, lhs: &TensorElement, rhs: &TensorElement, w: impl FnOnce() -> String) -> bool {
        let d = lhs.sub(rhs);
        let r = d.max_abs();
        self.outcome(d.is_zero(), d.is_exact(), r, || format!("{}; residual {d}", w()))
    }

    pub fn scalars(&mut self, lhs: &Scalar, rhs: &Scalar, w: impl FnOnce() -> String) -> bool {
        let d = lhs - rhs;
        let exact = d.is_exact();
        self.outcome(d.is_zero(), exact, d.abs(), || format!("{}; {lhs} vs {rhs}", w()))
    }

    /// A float residual computed by the caller.
    pub fn residual(&mut self, r: f64, w: impl FnOnce() -> String) -> bool {
        self.outcome(r == 0.0, false, r, w)
    }

    /// A boolean condition (exact by nature).
    pub fn holds(&mut self, ok: bool, w: impl FnOnce() -> String) -> bool {
        self.cases += 1;
        if !ok {
            self.fail_with(w());
        }
        ok
    }

    pub fn error(&mut self, e: &AqgError) {
        self.cases += 1;
        self.fail_with(format!("error: {e}"));
    }

    /// Folds a fallible computation into the check.
    pub fn attempt<T>(&mut self, r: crate::error::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(&e);
                None
            }
        }
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    /// A check with no evaluated cases fails rather than passing vacuously.
    pub fn finish(mut self) -> CheckRecord {
        if self.cases == 0 {
            self.fail_with("no cases evaluated".into());
        }
        let residual = if self.tier == Tier::Exact && !self.failed {
            "0".to_string()
        } else if self.max_residual == 0.0 && !self.failed {
            "0".to_string()
        } else {
            format!("{:.3e}", self.max_residual)
        };
        CheckRecord {
            id: self.id,
            anchor: self.anchor,
            tier: self.tier,
            status: if self.failed { Status::Fail } else { Status::Pass },
            residual,
            cases: self.cases,
            witness: self.witness,
            note: self.note,
            absolute_residual: self.max_absolute.map(|a| format!("{a:.3e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{make_group_algebra, FiniteGroup};

    #[test]
    fn exact_pass_reports_literal_zero() {
        let p = make_group_algebra(&FiniteGroup::cyclic(2));
        let mut c = Check::exact("x", "Prop 1.2", 1e-9);
        let u = p.basis(1);
        c.elements(&(&u * &u), &p.unit(), || "u*u".into());
        let r = c.finish();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.residual, "0");
        assert_eq!(r.cases, 1);
    }

    #[test]
    fn failure_keeps_first_witness() {
        let p = make_group_algebra(&FiniteGroup::cyclic(2));
        let mut c = Check::exact("x", "Prop 1.2", 1e-9);
        c.elements(&p.basis(1), &p.unit(), || "first".into());
        c.elements(&p.basis(0), &p.basis(1), || "second".into());
        let r = c.finish();
        assert_eq!(r.status, Status::Fail);
        assert!(r.witness.unwrap().starts_with("first"));
    }

    #[test]
    fn float_values_use_tolerance() {
        let mut c = Check::exact("x", "Prop 2.8", 1e-9);
        c.scalars(&Scalar::float(1.0, 0.0), &Scalar::float(1.0 + 1e-12, 0.0), || "w".into());
        let r = c.finish();
        assert_eq!(r.tier, Tier::Float);
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn json_is_sorted_and_versioned() {
        let mut rep = VerificationReport::new("t", Environment::default());
        rep.push(CheckRecord::info("b", "Prop A.8", "n"));
        rep.push(CheckRecord::info("a", "Prop 1.6", "n"));
        let js = rep.to_json();
        assert!(js.contains("aqg-report v1"));
        assert!(js.find("\"a\"").unwrap() < js.find("\"b\"").unwrap());
        assert!(rep.to_markdown().contains("## Section A"));
    }
}
