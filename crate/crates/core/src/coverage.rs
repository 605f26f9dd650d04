//! Which in-scope propositions have at least one check id in a report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::report::VerificationReport;

/// In-scope anchors, in reading order.
pub const IN_SCOPE: &[&str] = &[
    "Def 1.1",
    "Prop 1.2",
    "Prop 1.3",
    "Prop 1.4",
    "Prop 1.5",
    "Def 1.polar",
    "Prop 1.6",
    "Prop 1.7",
    "Prop 1.8",
    "Remark 1.9",
    "Prop 2.1",
    "Prop 2.2",
    "Prop 2.3",
    "Prop 2.4",
    "Prop 2.5",
    "Prop 2.6",
    "Prop 2.7",
    "Prop 2.8",
    "Prop 2.9",
    "Prop 2.10",
    "Def 2.11",
    "Prop 2.12",
    "Prop 2.13",
    "Def 2.14",
    "Prop 2.15",
    "Prop A.1",
    "Prop A.2",
    "Prop A.3",
    "Prop A.4",
    "Prop A.6",
    "Prop A.7",
    "Prop A.8",
    "Prop A.9",
    "Prop A.10",
    "Prop A.11",
];

/// Anchors used for checks that are not propositions.
pub const STRUCTURAL: &[&str] = &["Hopf *-algebra axioms", "positive right integral", "modular consistency", "Fourier DFT"];

#[derive(Clone, Debug, Serialize)]
pub struct CoverageAudit {
    pub mapped: BTreeMap<String, Vec<String>>,
    pub unmapped: Vec<String>,
    /// Anchors found in the report but absent from the catalogue.
    pub unknown: Vec<String>,
}

impl CoverageAudit {
    pub fn is_complete(&self) -> bool {
        self.unmapped.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in IN_SCOPE {
            match self.mapped.get(*a) {
                Some(ids) => out += &format!("{a:<12} {}\n", ids.join(", ")),
                None => out += &format!("{a:<12} UNMAPPED\n"),
            }
        }
        for a in &self.unknown {
            out += &format!("{a:<12} not in catalogue\n");
        }
        out += &format!("unmapped: {}\n", self.unmapped.len());
        out
    }
}

pub fn audit(rep: &VerificationReport) -> CoverageAudit {
    let mut mapped: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut unknown = Vec::new();
    for c in &rep.checks {
        if IN_SCOPE.contains(&c.anchor.as_str()) {
            mapped.entry(c.anchor.clone()).or_default().push(c.id.clone());
        } else if !STRUCTURAL.contains(&c.anchor.as_str()) && !unknown.contains(&c.anchor) {
            unknown.push(c.anchor.clone());
        }
    }
    let unmapped = IN_SCOPE.iter().filter(|a| !mapped.contains_key(**a)).map(|a| a.to_string()).collect();
    CoverageAudit { mapped, unmapped, unknown }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{CheckRecord, Environment};

    #[test]
    fn missing_anchors_are_listed() {
        let mut rep = VerificationReport::new("t", Environment::default());
        rep.push(CheckRecord::info("x", "Prop 1.2", ""));
        rep.push(CheckRecord::info("y", "Prop 9.9", ""));
        let a = audit(&rep);
        assert!(!a.is_complete());
        assert!(!a.unmapped.contains(&"Prop 1.2".to_string()));
        assert!(a.unmapped.contains(&"Prop A.11".to_string()));
        assert_eq!(a.unknown, vec!["Prop 9.9".to_string()]);
    }
}
