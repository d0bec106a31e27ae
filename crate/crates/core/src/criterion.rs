//! Truants of integer sets, the excluder construction and the
//! cardinality gadgets.
//!
//! A truant witness for `s_i` is found by escalation: starting from the
//! zero lattice, repeatedly adjoin a vector whose norm is the smallest
//! element of the set the current lattice misses, over every Gram extension
//! allowed by Cauchy–Schwarz. Any lattice representing `s_0, …, s_{i-1}` but
//! not `s_i` contains one of the lattices reached this way, so the tree is
//! complete, and it is finite because each step raises the first missed
//! element.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arith;
use crate::enumeration::Budget;
use crate::error::{QfError, Result};
use crate::gram::{GramMatrix, Lattice, Vector};
use crate::reduction;
use crate::report::VerificationReport;
use crate::represent::represents_integer_with_budget;

/// Strictly increasing positive integers, possibly the prefix of an
/// infinite set produced by a named generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerSet {
    elements: Vec<i64>,
    generator: Option<String>,
}

impl IntegerSet {
    pub fn new(elements: Vec<i64>) -> Result<Self> {
        if elements.first().is_some_and(|&e| e < 1) {
            return Err(QfError::PreconditionFailed("set elements must be positive".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QfError::PreconditionFailed("set elements must be strictly increasing".into()));
        }
        Ok(Self { elements, generator: None })
    }

    /// Members of a named infinite set up to `bound`.
    pub fn generated(name: &str, bound: i64) -> Result<Self> {
        let keep: fn(i64) -> bool = match name {
            "naturals" => |_| true,
            "odd" => |n| n % 2 == 1,
            "primes" => |n| arith::is_prime(n as u64),
            "squares" => arith::is_square,
            _ => return Err(QfError::Parse(format!("unknown generator {name:?}"))),
        };
        Ok(Self { elements: (1..=bound).filter(|&n| keep(n)).collect(), generator: Some(name.to_string()) })
    }

    pub fn naturals(bound: i64) -> Self {
        Self::generated("naturals", bound).expect("known generator")
    }

    /// `[1, 2, 5]` or `{"generator": "naturals"}` (expanded up to `bound`).
    pub fn parse_json(s: &str, bound: i64) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| QfError::Parse(e.to_string()))?;
        if let Some(name) = v.get("generator").and_then(|g| g.as_str()) {
            return Self::generated(name, bound);
        }
        let elements: Vec<i64> = serde_json::from_value(v).map_err(|e| QfError::Parse(e.to_string()))?;
        Self::new(elements)
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn generator(&self) -> Option<&str> {
        self.generator.as_deref()
    }

    pub fn get(&self, i: usize) -> Option<i64> {
        self.elements.get(i).copied()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: i64) -> bool {
        self.elements.binary_search(&n).is_ok()
    }
}

/// A lattice representing `s_0, …, s_{i-1}` but not `s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruantCertificate {
    pub index: usize,
    pub value: i64,
    pub witness: Lattice,
    /// One vector of the witness for each earlier element.
    pub representations: Vec<(i64, Vector)>,
}

impl TruantCertificate {
    /// Rechecks every representation vector and the exhaustive miss.
    pub fn verify(&self, budget: &Budget) -> Result<bool> {
        let vectors_ok = self
            .representations
            .iter()
            .all(|(n, v)| v.coords.len() == self.witness.rank() && self.witness.norm(&v.coords) == *n as i128);
        Ok(vectors_ok && represents_integer_with_budget(&self.witness, self.value, budget)?.is_none())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "index": self.index,
            "value": self.value,
            "witness": self.witness.gram(),
            "representations": self.representations.iter().map(|(n, v)| json!({"norm": n, "vector": v.coords})).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TruantOutcome {
    Truant(TruantCertificate),
    /// The escalation tree was exhausted without a witness.
    NotTruant,
    BudgetExceeded { budget: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruantEntry {
    pub index: usize,
    pub value: i64,
    pub outcome: TruantOutcome,
}

/// Index of the first of `values` that `l` misses.
fn first_missed(l: &Lattice, values: &[i64], budget: &Budget) -> Result<Option<usize>> {
    for (j, &v) in values.iter().enumerate() {
        if represents_integer_with_budget(l, v, budget)?.is_none() {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// 0, 1, −1, 2, −2, … up to ±bound.
fn by_magnitude(bound: i64) -> Vec<i64> {
    let mut out = vec![0];
    for k in 1..=bound {
        out.push(k);
        out.push(-k);
    }
    out
}

/// Positive-definite lattice generated by a semidefinite Gram matrix.
fn quotient(entries: &[i64], n: usize) -> Result<Lattice> {
    if arith::leading_minors(entries, n).is_ok() {
        return Lattice::from_gram(GramMatrix::from_flat(n, entries.to_vec())?);
    }
    let (rho, u) = arith::radical_split(entries, n)?;
    let full = arith::congruence(entries, n, &u, n)?;
    let block: Vec<i64> = (0..rho * rho).map(|i| full[(i / rho) * n + i % rho]).collect();
    Lattice::from_gram(GramMatrix::from_flat(rho, block)?)
}

/// Every lattice obtained by adjoining a vector of norm `t`, in canonical order.
fn escalations(l: &Lattice, t: i64) -> Result<Vec<Lattice>> {
    let g = l.gram();
    let r = g.dim();
    let ranges: Vec<Vec<i64>> = (0..r).map(|j| by_magnitude(arith::isqrt_u64((t * g.get(j, j)) as u64) as i64)).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; r];
    loop {
        let c: Vec<i64> = (0..r).map(|j| ranges[j][pick[j]]).collect();
        // v and −v generate the same lattice.
        if c.iter().find(|&&x| x != 0).is_none_or(|&x| x > 0) {
            let n = r + 1;
            let mut e = vec![0i64; n * n];
            for i in 0..r {
                for j in 0..r {
                    e[i * n + j] = g.get(i, j);
                }
                e[i * n + r] = c[i];
                e[r * n + i] = c[i];
            }
            e[r * n + r] = t;
            if arith::is_psd(&e, n) {
                out.push(quotient(&e, n)?);
            }
        }
        let mut j = r;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            pick[j] += 1;
            if pick[j] < ranges[j].len() {
                break;
            }
            pick[j] = 0;
        }
    }
}

fn escalate(l: &Lattice, values: &[i64], budget: &Budget) -> Result<Option<Lattice>> {
    budget.tick()?;
    let last = values.len() - 1;
    match first_missed(l, values, budget)? {
        None => Ok(None),
        Some(j) if j == last => Ok(Some(l.clone())),
        Some(j) => {
            for next in escalations(l, values[j])? {
                let (reduced, _) = reduction::lll_reduce(&next)?;
                if let Some(w) = escalate(&reduced, values, budget)? {
                    return Ok(Some(w));
                }
            }
            Ok(None)
        }
    }
}

/// A witness that `s_i` is a truant, or `None` when the escalation tree
/// holds none (so `s_i` is not a truant).
pub fn find_truant_witness(set: &IntegerSet, i: usize, budget: &Budget) -> Result<Option<TruantCertificate>> {
    let Some(value) = set.get(i) else {
        return Err(QfError::PreconditionFailed(format!("the set has no element with index {i}")));
    };
    let values = &set.elements()[..=i];
    let Some(witness) = escalate(&Lattice::zero(), values, budget)? else {
        return Ok(None);
    };
    let mut representations = Vec::with_capacity(i);
    for &s in &values[..i] {
        let v = represents_integer_with_budget(&witness, s, budget)?.expect("witness represents earlier elements");
        representations.push((s, v));
    }
    Ok(Some(TruantCertificate { index: i, value, witness, representations }))
}

/// Truant search for every index ≤ `upto`, each with a fresh budget.
pub fn truant_prefix(set: &IntegerSet, upto: usize, budget_per_index: u64) -> Result<Vec<TruantEntry>> {
    let mut out = Vec::new();
    for i in 0..=upto.min(set.len().saturating_sub(1)) {
        let budget = Budget::new(budget_per_index);
        let outcome = match find_truant_witness(set, i, &budget) {
            Ok(Some(c)) => TruantOutcome::Truant(c),
            Ok(None) => TruantOutcome::NotTruant,
            Err(QfError::BudgetExceeded { budget }) => TruantOutcome::BudgetExceeded { budget },
            Err(e) => return Err(e),
        };
        out.push(TruantEntry { index: i, value: set.elements()[i], outcome });
    }
    Ok(out)
}

/// Pieces of `ℓ ⊥ m·I₄ ⊥ ⟨s(c₁), …, s(c_v)⟩` with `m = s_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcluderRecipe {
    pub base: Lattice,
    pub k: usize,
    pub modulus: i64,
    /// Residues mod `modulus` met by elements ≥ `modulus`, ascending.
    pub classes: Vec<i64>,
    /// Least such element in each class.
    pub class_mins: Vec<i64>,
    pub result: Lattice,
}

/// Four-square decompositions of 0..=n.
fn four_squares_table(n: i64) -> Vec<[i64; 4]> {
    let mut table = Vec::with_capacity(n as usize + 1);
    for m in 0..=n {
        let mut found = None;
        let mut a = arith::isqrt_u64(m as u64) as i64;
        'outer: while a >= 0 {
            let ra = m - a * a;
            let mut b = arith::isqrt_u64(ra as u64) as i64;
            while b >= 0 {
                let rb = ra - b * b;
                let mut c = arith::isqrt_u64(rb as u64) as i64;
                while c >= 0 {
                    let rc = rb - c * c;
                    if arith::is_square(rc) {
                        found = Some([a, b, c, arith::isqrt_u64(rc as u64) as i64]);
                        break 'outer;
                    }
                    c -= 1;
                }
                b -= 1;
            }
            a -= 1;
        }
        table.push(found.expect("Lagrange's four-square theorem"));
    }
    table
}

/// A lattice whose values in `S` are exactly `S ∖ {s_k}`, checked up to
/// `verify_bound`.
pub fn build_excluder(
    base: &Lattice,
    set: &IntegerSet,
    k: usize,
    verify_bound: i64,
    budget: &Budget,
) -> Result<(ExcluderRecipe, VerificationReport)> {
    let s = set.elements();
    let Some(&excluded) = s.get(k) else {
        return Err(QfError::PreconditionFailed(format!("the set has no element with index {k}")));
    };
    let Some(&modulus) = s.get(k + 1) else {
        return Err(QfError::PreconditionFailed(format!("the set has no element after index {k}")));
    };
    let mut base_vectors = Vec::with_capacity(k);
    for &e in &s[..k] {
        match represents_integer_with_budget(base, e, budget)? {
            Some(v) => base_vectors.push((e, v)),
            None => return Err(QfError::PreconditionFailed(format!("the base lattice misses {e}"))),
        }
    }
    if represents_integer_with_budget(base, excluded, budget)?.is_some() {
        return Err(QfError::PreconditionFailed(format!("the base lattice represents {excluded}")));
    }
    let mut least = vec![None; modulus as usize];
    for &e in &s[k + 1..] {
        let u = (e % modulus) as usize;
        least[u].get_or_insert(e);
    }
    let (classes, class_mins): (Vec<i64>, Vec<i64>) =
        least.iter().enumerate().filter_map(|(u, m)| m.map(|m| (u as i64, m))).unzip();
    let result = base
        .direct_sum(&Lattice::diagonal(&[modulus; 4])?)
        .direct_sum(&Lattice::diagonal(&class_mins)?);
    let recipe = ExcluderRecipe { base: base.clone(), k, modulus, classes, class_mins, result };

    let mut rep = VerificationReport::new("excluder");
    rep.bound = Some(verify_bound);
    rep.budget = Some(budget.limit());
    rep.set("excluded", excluded);
    rep.set("modulus", modulus);
    rep.set("classes", recipe.classes.clone());
    rep.set("class_mins", recipe.class_mins.clone());
    rep.set("lattice", serde_json::to_value(recipe.result.gram()).expect("gram serializes"));
    let n = recipe.result.rank();
    let r0 = base.rank();
    let squares = four_squares_table(verify_bound / modulus + 1);
    let mut checked = 0;
    for &e in s.iter().take_while(|&&e| e <= verify_bound) {
        checked += 1;
        if e == excluded {
            if let Some(v) = represents_integer_with_budget(&recipe.result, e, budget)? {
                rep.fail(json!({ "value": e, "vector": v.coords }));
            }
            continue;
        }
        let mut v = vec![0i64; n];
        if e < modulus {
            let (_, w) = base_vectors.iter().find(|(x, _)| *x == e).expect("earlier element");
            v[..r0].copy_from_slice(&w.coords);
        } else {
            let ci = recipe.classes.binary_search(&(e % modulus)).expect("class of a set element");
            let q = (e - recipe.class_mins[ci]) / modulus;
            let sq = squares[q as usize];
            v[r0..r0 + 4].copy_from_slice(&sq);
            v[r0 + 4 + ci] = 1;
        }
        if recipe.result.norm(&v) != e as i128 {
            rep.fail(json!({ "value": e, "vector": v }));
        }
    }
    rep.set("checked", checked);
    Ok((recipe, rep))
}

/// Checks `M_i = ⟨k+1, …, k+i−1⟩` represents `k+1, …, k+i−1` and misses
/// `k+i` for `2 ≤ i ≤ k`, and `⟨k+2⟩` misses `k+1`.
pub fn verify_gadgets(k: i64) -> Result<VerificationReport> {
    if k < 2 {
        return Err(QfError::PreconditionFailed(format!("k = {k} must be at least 2")));
    }
    let budget = Budget::default();
    let mut rep = VerificationReport::new("gadgets");
    rep.bound = Some(2 * k);
    let first = Lattice::diagonal(&[k + 2])?;
    if represents_integer_with_budget(&first, k + 1, &budget)?.is_some() {
        rep.fail(json!({ "gadget": [k + 2], "value": k + 1 }));
    }
    for i in 2..=k {
        let diag: Vec<i64> = (k + 1..k + i).collect();
        let m = Lattice::diagonal(&diag)?;
        for t in k + 1..k + i {
            if represents_integer_with_budget(&m, t, &budget)?.is_none() {
                rep.fail(json!({ "gadget": diag, "value": t, "expected": true }));
            }
        }
        match represents_integer_with_budget(&m, k + i, &budget)? {
            Some(v) => rep.fail(json!({ "gadget": diag, "value": k + i, "vector": v.coords })),
            None => rep.witnesses.push(json!({ "gadget": diag, "misses": k + i })),
        }
    }
    Ok(rep)
}
