//! Named checks runnable by id, and the full suite.

use serde_json::json;

use crate::criterion::{build_excluder, truant_prefix, verify_gadgets, IntegerSet, TruantOutcome};
use crate::enumeration::Budget;
use crate::error::{QfError, Result};
use crate::gram::Lattice;
use crate::recover::{
    check_qvalue, corollary_family, d5_even_failures, nine_plus_genera_condition, twelve_lattice_condition,
    verify_15_exceptions, verify_corollary_prime, verify_genus_data, verify_phi9_preimages, verify_prop44,
    verify_recovery_corpus, verify_remark_counterexample, RecoverabilityReport,
};
use crate::report::{aggregate, VerificationReport};

/// Every claim id accepted by [`run_claim`].
pub const CLAIM_IDS: [&str; 19] = [
    "15-exceptions",
    "phi9-preimages",
    "genus-23",
    "prop44",
    "qvalue",
    "twelve",
    "nine-genera",
    "corollary-prime",
    "corollary-family",
    "condition-equivalence",
    "nonsquare-remark",
    "truants",
    "excluder",
    "gadgets",
    "recovery-1-4",
    "recovery-1-1-2",
    "recovery-squares",
    "remark-2-8",
    "d5-even",
];

/// Optional parameters; each claim reads the ones it needs.
#[derive(Debug, Clone, Default)]
pub struct ClaimParams {
    pub m: Option<i64>,
    pub p: Option<i64>,
    pub a: Option<i64>,
    pub b: Option<i64>,
    pub h: Option<i64>,
    pub bound: Option<i64>,
}

/// Seed of the recovery corpora.
pub const CORPUS_SEED: u64 = 0x5157_4c41_5454;
pub const CORPUS_SIZE: usize = 500;

/// The truants of ℕ among its first fifteen elements.
pub const NATURAL_TRUANTS: [i64; 9] = [1, 2, 3, 5, 6, 7, 10, 14, 15];

fn need(v: Option<i64>, name: &str) -> Result<i64> {
    v.ok_or_else(|| QfError::PreconditionFailed(format!("this claim needs --{name}")))
}

fn condition_report(claim: &str, r: &RecoverabilityReport) -> VerificationReport {
    let mut rep = VerificationReport::new(claim);
    rep.set("m", r.m);
    rep.set("verdict", serde_json::to_value(r.verdict).expect("serializes"));
    rep.set("detail", serde_json::to_value(r).expect("serializes"));
    if let Some(f) = r.first_failure() {
        rep.fail(json!({ "m": r.m, "first_failure": f }));
    }
    rep
}

fn condition_equivalence(bound: i64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("condition-equivalence");
    rep.bound = Some(bound);
    let mut passing = Vec::new();
    for m in 1..=bound {
        let a = twelve_lattice_condition(m)?.passes();
        let b = nine_plus_genera_condition(m)?.passes();
        if a != b {
            rep.fail(json!({ "m": m, "twelve": a, "nine_genera": b }));
        }
        if a {
            passing.push(m);
        }
    }
    rep.set("passing", passing);
    Ok(rep)
}

fn nonsquare_remark(bound: i64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("nonsquare-remark");
    rep.bound = Some(bound);
    let mut squares = Vec::new();
    for m in 1..=bound {
        if crate::arith::is_square(m) {
            squares.push(m);
        } else if twelve_lattice_condition(m)?.passes() {
            rep.fail(json!({ "m": m, "twelve_lattice": true }));
        }
    }
    rep.set("squares_skipped", squares);
    Ok(rep)
}

fn corollary_family_report(count: usize) -> Result<VerificationReport> {
    let mut parts = vec![verify_corollary_prime(5569)?];
    for p in corollary_family(count) {
        parts.push(verify_corollary_prime(p)?);
    }
    let mut rep = aggregate("corollary-family", parts);
    rep.set("modulus", 8 * crate::recover::FAMILY_MODULUS);
    rep.set("count", count);
    let step = crate::recover::FAMILY_MODULUS;
    if let Some(p) = (1..).map(|k| 5569 + k * step).find(|&p| p % 8 != 1 && crate::arith::is_prime(p as u64)) {
        let r = twelve_lattice_condition(p)?;
        rep.set("off_class_prime", json!({ "p": p, "mod_8": p % 8, "twelve_lattice": r.passes(), "first_failure": r.first_failure() }));
    }
    Ok(rep)
}

fn truants_report(upto: i64) -> Result<VerificationReport> {
    let set = IntegerSet::naturals(upto);
    let limit = Budget::default_limit();
    let entries = truant_prefix(&set, set.len().saturating_sub(1), limit)?;
    let mut rep = VerificationReport::new("truants");
    rep.bound = Some(upto);
    rep.budget = Some(limit);
    let mut truants = Vec::new();
    let mut exhausted = Vec::new();
    for e in &entries {
        match &e.outcome {
            TruantOutcome::Truant(c) => {
                if !c.verify(&Budget::default())? {
                    rep.fail(json!({ "unverified_certificate": c.to_json() }));
                }
                truants.push(e.value);
                rep.witnesses.push(c.to_json());
            }
            TruantOutcome::NotTruant => exhausted.push(e.value),
            TruantOutcome::BudgetExceeded { budget } => {
                rep.status = rep.status.and(crate::report::Status::BudgetExceeded);
                rep.counterexamples.push(json!({ "value": e.value, "budget_exceeded": budget }));
            }
        }
    }
    let expected: Vec<i64> = NATURAL_TRUANTS.iter().copied().filter(|&t| t <= upto).collect();
    if truants != expected {
        rep.fail(json!({ "truants": truants, "expected": expected }));
    }
    rep.set("truants", truants);
    rep.set("exhausted_without_witness", exhausted);
    Ok(rep)
}

fn excluder_report(bound: i64) -> Result<VerificationReport> {
    let cases: [(&str, Vec<Vec<i64>>, usize); 3] = [
        ("naturals", vec![vec![1, 0], vec![0, 1]], 2),
        ("odd", vec![vec![1]], 1),
        ("primes", vec![vec![2, 1], vec![1, 3]], 2),
    ];
    let mut parts = Vec::new();
    for (name, rows, k) in cases {
        let set = IntegerSet::generated(name, bound)?;
        let base = Lattice::new(&rows)?;
        let (_, mut rep) = build_excluder(&base, &set, k, bound, &Budget::default())?;
        rep.set("set", name);
        rep.set("base", json!(rows));
        parts.push(rep);
    }
    Ok(aggregate("excluder", parts))
}

fn recovery(claim: &str, l: &[i64], s0: &[&[i64]]) -> Result<VerificationReport> {
    let l = Lattice::diagonal(l)?;
    let s0 = s0.iter().map(|d| Lattice::diagonal(d)).collect::<Result<Vec<_>>>()?;
    verify_recovery_corpus(claim, &l, &s0, CORPUS_SIZE, CORPUS_SEED)
}

fn recovery_squares() -> Result<VerificationReport> {
    let mut parts = Vec::new();
    for m in 1..=3i64 {
        let q = m * m;
        parts.push(recovery(&format!("recovery-1-4m2-{m}"), &[1, 4 * q], &[&[1, 16 * q], &[4, 4 * q]])?);
    }
    Ok(aggregate("recovery-squares", parts))
}

fn d5_even(bound: i64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("d5-even");
    rep.bound = Some(bound);
    for f in d5_even_failures(bound, Budget::default_limit())? {
        rep.fail(json!({ "missed": f.rows() }));
    }
    Ok(rep)
}

/// Runs one claim; budget exhaustion becomes a `budget-exceeded` report.
pub fn run_claim(id: &str, params: &ClaimParams) -> Result<VerificationReport> {
    VerificationReport::guard(id, || match id {
        "15-exceptions" => verify_15_exceptions(),
        "phi9-preimages" => verify_phi9_preimages(),
        "genus-23" => verify_genus_data(),
        "prop44" => verify_prop44(params.m.unwrap_or(10), params.bound.unwrap_or(60)),
        "qvalue" => check_qvalue(need(params.a, "a")?, need(params.b, "b")?, need(params.h, "h")?, params.bound.unwrap_or(200)),
        "twelve" => Ok(condition_report("twelve", &twelve_lattice_condition(need(params.m, "m")?)?)),
        "nine-genera" => Ok(condition_report("nine-genera", &nine_plus_genera_condition(need(params.m, "m")?)?)),
        "corollary-prime" => verify_corollary_prime(need(params.p, "p")?),
        "corollary-family" => corollary_family_report(params.bound.unwrap_or(10) as usize),
        "condition-equivalence" => condition_equivalence(params.bound.unwrap_or(200)),
        "nonsquare-remark" => nonsquare_remark(params.bound.unwrap_or(36)),
        "truants" => truants_report(params.bound.unwrap_or(15)),
        "excluder" => excluder_report(params.bound.unwrap_or(200)),
        "gadgets" => {
            let parts = (2..=params.bound.unwrap_or(4)).map(verify_gadgets).collect::<Result<Vec<_>>>()?;
            Ok(aggregate("gadgets", parts))
        }
        "recovery-1-4" => recovery("recovery-1-4", &[1, 4], &[&[1, 16], &[4, 4]]),
        "recovery-1-1-2" => recovery("recovery-1-1-2", &[1, 1, 2], &[&[1, 1, 8], &[2, 2, 2]]),
        "recovery-squares" => recovery_squares(),
        "remark-2-8" => verify_remark_counterexample(params.bound.unwrap_or(20)),
        "d5-even" => d5_even(params.bound.unwrap_or(10)),
        _ => Err(QfError::Parse(format!("unknown claim {id:?}; known: {}", CLAIM_IDS.join(", ")))),
    })
}

/// Every claim with its default parameters; `prop44_bound` is the μ₂
/// bound of the sublattice scans for `m = 6` and `m = 10`.
pub fn verify_all(prop44_bound: i64) -> Result<VerificationReport> {
    let mut parts = Vec::new();
    for id in CLAIM_IDS {
        match id {
            "prop44" => {
                for m in [6, 10] {
                    let p = ClaimParams { m: Some(m), bound: Some(prop44_bound), ..Default::default() };
                    parts.push(run_claim(id, &p)?);
                }
            }
            "qvalue" => {
                for (a, b, h) in [(2, 9, 2), (3, 13, 2), (2, 19, 3)] {
                    let p = ClaimParams { a: Some(a), b: Some(b), h: Some(h), ..Default::default() };
                    parts.push(run_claim(id, &p)?);
                }
            }
            "twelve" | "nine-genera" => {
                parts.push(run_claim(id, &ClaimParams { m: Some(5569), ..Default::default() })?);
            }
            "corollary-prime" => {
                parts.push(run_claim(id, &ClaimParams { p: Some(5569), ..Default::default() })?);
            }
            _ => parts.push(run_claim(id, &ClaimParams::default())?),
        }
    }
    let mut rep = aggregate("verify-all", parts);
    rep.bound = Some(prop44_bound);
    rep.budget = Some(Budget::default_limit());
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn unknown_and_missing_parameters() {
        assert!(matches!(run_claim("nope", &ClaimParams::default()), Err(QfError::Parse(_))));
        assert!(matches!(run_claim("twelve", &ClaimParams::default()), Err(QfError::PreconditionFailed(_))));
    }

    #[test]
    fn quick_claims() {
        let p = ClaimParams { m: Some(2), ..Default::default() };
        assert_eq!(run_claim("twelve", &p).unwrap().status, Status::Fail);
        assert_eq!(run_claim("phi9-preimages", &ClaimParams::default()).unwrap().status, Status::Pass);
        assert_eq!(run_claim("excluder", &ClaimParams::default()).unwrap().status, Status::Pass);
    }
}
