//! Machine-readable outcomes of named checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::QfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    BudgetExceeded,
}

impl Status {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::BudgetExceeded => 3,
        }
    }

    /// Pass only if both pass; budget exhaustion dominates failure.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::BudgetExceeded, _) | (_, Status::BudgetExceeded) => Status::BudgetExceeded,
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            _ => Status::Pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub status: Status,
    pub bound: Option<i64>,
    pub budget: Option<u64>,
    pub witnesses: Vec<Value>,
    pub counterexamples: Vec<Value>,
    pub data: BTreeMap<String, Value>,
}

impl VerificationReport {
    pub fn new(claim: &str) -> Self {
        Self {
            claim: claim.to_string(),
            status: Status::Pass,
            bound: None,
            budget: None,
            witnesses: Vec::new(),
            counterexamples: Vec::new(),
            data: BTreeMap::new(),
        }
    }

    /// Report for a check that ran out of search budget.
    pub fn budget_exceeded(claim: &str, budget: u64) -> Self {
        let mut r = Self::new(claim);
        r.status = Status::BudgetExceeded;
        r.budget = Some(budget);
        r
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.data.insert(key.to_string(), v.into());
    }

    /// Marks the report failed with a counterexample.
    pub fn fail(&mut self, counterexample: Value) {
        self.status = self.status.and(Status::Fail);
        self.counterexamples.push(counterexample);
    }

    /// Key-sorted JSON value.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("report serializes")
    }

    /// Runs a check, turning budget exhaustion into a report.
    pub fn guard(claim: &str, f: impl FnOnce() -> crate::error::Result<Self>) -> crate::error::Result<Self> {
        match f() {
            Err(QfError::BudgetExceeded { budget }) => Ok(Self::budget_exceeded(claim, budget)),
            other => other,
        }
    }
}

/// Several reports under one claim; passes only if every part passes.
pub fn aggregate(claim: &str, parts: Vec<VerificationReport>) -> VerificationReport {
    let mut r = VerificationReport::new(claim);
    for p in &parts {
        r.status = r.status.and(p.status);
    }
    r.set("checks", Value::Array(parts.iter().map(|p| p.to_value()).collect()));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_stable() {
        let mut r = VerificationReport::new("x");
        r.set("zeta", 1);
        r.set("alpha", 2);
        let s = r.to_json_string();
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.find("\"bound\"").unwrap() < s.find("\"claim\"").unwrap());
        assert_eq!(s, r.clone().to_json_string());
    }

    #[test]
    fn status_combination() {
        assert_eq!(Status::Pass.and(Status::Fail), Status::Fail);
        assert_eq!(Status::Fail.and(Status::BudgetExceeded), Status::BudgetExceeded);
        let agg = aggregate("all", vec![VerificationReport::new("a"), VerificationReport::budget_exceeded("b", 5)]);
        assert_eq!(agg.status.exit_code(), 3);
    }
}
