//! Recoverability of binary lattices: sublattices, the shift map φ₉ and
//! lifting embeddings back through it, non-recoverability constructions,
//! and the conditions for recoverable numbers.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arith;
use crate::enumeration::{short_vectors_with_budget, Budget};
use crate::error::{QfError, Result};
use crate::gram::{BinaryFormTriple, GramMatrix, Lattice, RootFamily};
use crate::reduction::{enumerate_reduced_binaries, lll_reduce, reduce_binary, ReducedBinary};
use crate::report::VerificationReport;
use crate::represent::{
    form_represents, genus_represents_with_budget, reduced_forms_of_disc, represents_integer_with_budget,
    represents_lattice_with_budget, represents_psd_with_budget, Embedding, GenusClassList,
};

const fn rb(a: i64, b: i64, c: i64) -> ReducedBinary {
    ReducedBinary { a, b, c }
}

const fn tri(a: i64, b: i64, c: i64) -> BinaryFormTriple {
    BinaryFormTriple { a, b, c }
}

/// Binaries with μ₂ ≤ 12 (plus one with μ₂ = 13) listed as missed by
/// `⟨1,2,3⟩ ⊥ [[2,1],[1,5]]`.
pub const LISTED_EXCEPTIONS: [ReducedBinary; 15] = [
    rb(1, 0, 1),
    rb(1, 0, 6),
    rb(2, 1, 2),
    rb(2, 1, 3),
    rb(2, 1, 4),
    rb(4, 0, 6),
    rb(4, 1, 4),
    rb(4, 1, 13),
    rb(4, 2, 7),
    rb(6, 0, 7),
    rb(6, 0, 10),
    rb(6, 3, 7),
    rb(6, 3, 10),
    rb(7, 1, 10),
    rb(10, 2, 10),
];

/// Listed φ₉ preimages of `[[1,0],[0,1]]`, `[[2,1],[1,3]]` and `[[2,1],[1,4]]`.
pub const LISTED_PREIMAGES: [(ReducedBinary, &[ReducedBinary]); 3] = [
    (rb(1, 0, 1), &[rb(1, 0, 10), rb(2, 1, 10), rb(5, 2, 10), rb(10, 3, 10)]),
    (rb(2, 1, 3), &[rb(2, 1, 12), rb(3, 1, 11), rb(7, 3, 11), rb(10, 5, 12)]),
    (rb(2, 1, 4), &[rb(2, 1, 13), rb(4, 1, 11), rb(8, 3, 11)]),
];

/// The twelve binaries that must all represent `4m`.
pub const TWELVE: [ReducedBinary; 12] = [
    rb(2, 1, 4),
    rb(3, 1, 4),
    rb(4, 0, 4),
    rb(4, 0, 5),
    rb(4, 1, 6),
    rb(4, 1, 7),
    rb(4, 0, 8),
    rb(4, 1, 8),
    rb(4, 2, 8),
    rb(4, 0, 9),
    rb(4, 1, 9),
    rb(4, 2, 9),
];

/// Forms that must represent `m` outright.
pub const NINE: [BinaryFormTriple; 9] = [
    tri(1, 0, 1),
    tri(1, 0, 2),
    tri(1, 1, 2),
    tri(1, 1, 3),
    tri(1, 0, 5),
    tri(1, 1, 7),
    tri(1, 0, 8),
    tri(1, 1, 9),
    tri(1, 0, 9),
];

/// Forms whose genus must represent `m`.
pub const TWO_GENERA: [BinaryFormTriple; 2] = [tri(1, 1, 6), tri(1, 1, 8)];

/// Primes modulo which a family member must be a square.
pub const RESIDUE_PRIMES: [i64; 6] = [3, 5, 7, 11, 23, 31];

/// 3·5·7·11·23·31.
pub const FAMILY_MODULUS: i64 = 823_515;

/// `⟨1,2,3⟩ ⊥ [[2,1],[1,5]]` (`first`) or `⟨1,2,6⟩ ⊥ [[2,1],[1,5]]`.
pub fn quinary(first: bool) -> Lattice {
    let d = if first { [1, 2, 3] } else { [1, 2, 6] };
    Lattice::diagonal(&d).expect("positive").direct_sum(&rb(2, 1, 5).lattice())
}

// ---------------------------------------------------------------------------
// Sublattices.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublatticeItem {
    pub form: ReducedBinary,
    pub index: i64,
    /// Row-major 2×2; columns are the sublattice basis in parent coordinates.
    pub basis: [i64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SublatticeList {
    pub parent: ReducedBinary,
    pub max_index: i64,
    pub items: Vec<SublatticeItem>,
}

impl SublatticeList {
    pub fn lattices(&self) -> Vec<Lattice> {
        self.items.iter().map(|i| i.form.lattice()).collect()
    }

    /// Items with μ₂ ≤ `max_mu2`.
    pub fn with_mu2_at_most(&self, max_mu2: i64) -> Vec<&SublatticeItem> {
        self.items.iter().filter(|i| i.form.c <= max_mu2).collect()
    }
}

/// Proper sublattices of index `2..=max_index`, one per isometry class,
/// sorted by (index, form).
pub fn proper_sublattices(l: &Lattice, max_index: i64) -> Result<SublatticeList> {
    if l.rank() != 2 {
        return Err(QfError::DimensionMismatch(format!("expected rank 2, got {}", l.rank())));
    }
    if max_index < 2 {
        return Err(QfError::PreconditionFailed(format!("max_index {max_index} is below 2")));
    }
    let g = l.gram();
    let (parent, _) = reduce_binary(&g)?;
    let mut seen = BTreeSet::new();
    let mut items = Vec::new();
    for index in 2..=max_index {
        for a in 1..=index {
            if index % a != 0 {
                continue;
            }
            let c = index / a;
            for b in 0..a {
                let h = [a, b, 0, c];
                let (form, u) = reduce_binary(&g.transform(&h, 2)?)?;
                if seen.insert(form) {
                    let uf = [u[0][0], u[0][1], u[1][0], u[1][1]];
                    let basis: [i64; 4] = arith::mat_mul(&h, &uf, 2, 2, 2)?.try_into().expect("2x2");
                    items.push(SublatticeItem { form, index, basis });
                }
            }
        }
    }
    Ok(SublatticeList { parent, max_index, items })
}

/// Proper sublattices with μ₂ ≤ `max_mu2`; indices above
/// `max_mu2 / √d` cannot occur since `index²·d ≤ μ₁μ₂ ≤ μ₂²`.
pub fn proper_sublattices_by_mu2(l: &Lattice, max_mu2: i64) -> Result<Vec<SublatticeItem>> {
    let d = arith::signed(l.disc());
    let mut max_index = 2;
    while (max_index + 1) * (max_index + 1) * d <= max_mu2 * max_mu2 {
        max_index += 1;
    }
    let list = proper_sublattices(l, max_index)?;
    Ok(list.items.into_iter().filter(|i| i.form.c <= max_mu2).collect())
}

// ---------------------------------------------------------------------------
// φ₉.

/// Reduced form of `[[a,b],[b,c−9]]` for reduced `K` with `c ≥ 13`.
pub fn phi9(k: ReducedBinary) -> Result<ReducedBinary> {
    let (k, _) = reduce_binary(&k.gram())?;
    if k.c < 13 {
        return Err(QfError::NotInL13 { c: k.c });
    }
    Ok(shift9(k)?.0)
}

fn shift9(k: ReducedBinary) -> Result<(ReducedBinary, [[i64; 2]; 2])> {
    let g = GramMatrix::from_rows(&[vec![k.a, k.b], vec![k.b, k.c - 9]])?;
    reduce_binary(&g)
}

/// Iterates φ₉ until the second minimum drops to 12 or below.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phi9Chain {
    pub start: ReducedBinary,
    pub steps: Vec<ReducedBinary>,
}

pub fn phi9_chain(k: ReducedBinary) -> Result<Phi9Chain> {
    let mut steps = Vec::new();
    let mut cur = k;
    while cur.c >= 13 {
        cur = phi9(cur)?;
        steps.push(cur);
    }
    Ok(Phi9Chain { start: k, steps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Phi9Preimage {
    pub form: ReducedBinary,
    /// Whether the form has μ₂ ≥ 13, i.e. lies in the domain of φ₉ proper.
    pub in_l13: bool,
}

/// Reduced `K` whose shift `[[a,b],[b,c−9]]` is positive definite and
/// reduces to `t`. Since `Q(x,y) ≥ (3c/4)·y²` on reduced forms, every such
/// `K` has `c ≤ max(μ₂(t) + 9, 13)`.
pub fn phi9_preimages(t: ReducedBinary) -> Result<Vec<Phi9Preimage>> {
    let (t, _) = reduce_binary(&t.gram())?;
    let bound = (t.c + 9).max(13);
    let mut out = Vec::new();
    for k in enumerate_reduced_binaries(bound, 1)? {
        if k.c <= 9 || k.a * (k.c - 9) - k.b * k.b <= 0 {
            continue;
        }
        if shift9(k)?.0 == t {
            out.push(Phi9Preimage { form: k, in_l13: k.c >= 13 });
        }
    }
    out.sort_by_key(|p| (p.form.a, p.form.c, p.form.b));
    Ok(out)
}

/// Turns an embedding of `φ₉ᵏ(K)` into `L` into one of `K` into
/// `L ⊥ 9·I₅`, one shift at a time.
pub fn lift_phi9(k: ReducedBinary, l: &Lattice, steps: usize, emb: &Embedding) -> Result<Embedding> {
    let (k, _) = reduce_binary(&k.gram())?;
    let mut chain = vec![k];
    for j in 0..steps {
        let cur = chain[j];
        if cur.c < 13 {
            return Err(QfError::ChainBroken(format!("step {j}: {cur} has second minimum below 13")));
        }
        chain.push(shift9(cur)?.0);
    }
    let last = chain[steps];
    if !emb.verify(l, &last.lattice()) {
        return Err(QfError::ChainBroken(format!("the embedding does not realize {last}")));
    }
    let n0 = l.rank();
    let n = n0 + 5;
    let i5 = Lattice::identity(5);
    let target = l.direct_sum(&i5.scale(9)?);
    let mut cur = vec![0i64; n * 2];
    cur[..n0 * 2].copy_from_slice(&emb.matrix);
        for j in (0..steps).rev() {
        let (_, u) = shift9(chain[j])?;
        let uinv = arith::unimodular_inverse(&[u[0][0], u[0][1], u[1][0], u[1][1]], 2)?;
        let e = arith::mat_mul(&cur, &uinv, n, 2, 2)?;
        let p = &e[n0 * 2..];
        let mut g = vec![0i64; 4];
        for a in 0..2 {
            for b in 0..2 {
                g[a * 2 + b] = (0..5).map(|r| p[r * 2 + a] * p[r * 2 + b]).sum();
            }
        }
        g[3] += 1;
        let Some(q) = represents_psd_with_budget(&i5, &GramMatrix::from_flat(2, g)?, &Budget::default())? else {
            return Err(QfError::ChainBroken(format!("step {j}: no correction inside 9·I5")));
        };
        cur = e;
        cur[n0 * 2..].copy_from_slice(&q.matrix);
    }
    let out = Embedding::new(n, 2, cur);
    if !out.verify(&target, &k.lattice()) {
        return Err(QfError::ChainBroken("lifted embedding failed verification".into()));
    }
    Ok(out)
}

/// Nonzero rows of an embedding, keyed by target coordinate.
fn embedding_json(e: &Embedding) -> serde_json::Value {
    let rows: Vec<_> = e.rows().into_iter().enumerate().filter(|(_, r)| r.iter().any(|&x| x != 0)).collect();
    json!({ "target_rank": e.target_rank, "nonzero_rows": rows })
}

fn forms_json(v: &[ReducedBinary]) -> serde_json::Value {
    json!(v.iter().map(|f| f.rows()).collect::<Vec<_>>())
}

/// Reduced binaries with μ₂ ≤ `max_mu2` missed by `target`.
pub fn unrepresented_binaries(target: &Lattice, max_mu2: i64, limit: u64) -> Result<Vec<ReducedBinary>> {
    let mut out = Vec::new();
    for f in enumerate_reduced_binaries(max_mu2, 1)? {
        if represents_lattice_with_budget(target, &f.lattice(), &Budget::new(limit))?.is_none() {
            out.push(f);
        }
    }
    Ok(out)
}

/// Compares the binaries with μ₂ ≤ 12 missed by `⟨1,2,3⟩ ⊥ [[2,1],[1,5]]`
/// with the listed fifteen.
pub fn verify_15_exceptions() -> Result<VerificationReport> {
        let mut rep = VerificationReport::new("15-exceptions");
    rep.bound = Some(12);
    rep.budget = Some(Budget::default_limit());
    let target = quinary(true);
    let found = unrepresented_binaries(&target, 12, Budget::default_limit())?;
    let listed: Vec<ReducedBinary> = LISTED_EXCEPTIONS.to_vec();
    rep.set("failing", forms_json(&found));
    rep.set("failing_count", found.len());
    rep.set("listed", forms_json(&listed));
    for f in &listed {
        if !found.contains(f) {
            let represented = represents_lattice_with_budget(&target, &f.lattice(), &Budget::default())?.is_some();
            rep.fail(json!({ "listed_not_found": f.rows(), "mu2": f.c, "inside_scan": f.c <= 12, "represented": represented }));
        }
    }
    for f in &found {
        if !listed.contains(f) {
            rep.fail(json!({ "found_not_listed": f.rows() }));
        }
    }
    let i2 = Lattice::identity(2);
    let mut sublattices = Vec::new();
    for f in found.iter().chain(listed.iter()) {
        if f.disc() > 1 && represents_lattice_with_budget(&i2, &f.lattice(), &Budget::default())?.is_some() {
            sublattices.push(f.rows());
        }
    }
    rep.set("proper_sublattices_of_i2", json!(sublattices));
    let k = rb(2, 1, 13).lattice();
    match represents_lattice_with_budget(&target, &k, &Budget::default())? {
        Some(e) => rep.witnesses.push(json!({ "source": [[2, 1], [1, 13]], "embedding": embedding_json(&e) })),
        None => rep.fail(json!({ "not_represented": [[2, 1], [1, 13]] })),
    }
    let companion = unrepresented_binaries(&quinary(false), 12, Budget::default_limit())?;
    rep.set("companion_failing", forms_json(&companion));
    Ok(rep)
}

/// Checks the three listed preimage sets.
pub fn verify_phi9_preimages() -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("phi9-preimages");
    let mut computed = Vec::new();
    for (t, listed) in LISTED_PREIMAGES {
        let pre = phi9_preimages(t)?;
        let forms: Vec<ReducedBinary> = pre.iter().map(|p| p.form).collect();
        let mut want = listed.to_vec();
        want.sort_by_key(|f| (f.a, f.c, f.b));
        if forms != want {
            rep.fail(json!({ "target": t.rows(), "computed": forms_json(&forms), "listed": forms_json(&want) }));
        }
        computed.push(json!({
            "target": t.rows(),
            "preimages": pre.iter().map(|p| json!({ "form": p.form.rows(), "in_l13": p.in_l13 })).collect::<Vec<_>>(),
        }));
    }
    rep.set("lists", json!(computed));
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Recoverable numbers.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    RecoverableSufficient,
    ConditionFails,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoverabilityReport {
    pub m: i64,
    pub twelve_lattice: Vec<(ReducedBinary, bool)>,
    pub nine_forms: Vec<(BinaryFormTriple, bool)>,
    pub two_genera: Vec<(BinaryFormTriple, bool)>,
    pub verdict: Verdict,
}

impl RecoverabilityReport {
    fn new(m: i64) -> Self {
        Self { m, twelve_lattice: Vec::new(), nine_forms: Vec::new(), two_genera: Vec::new(), verdict: Verdict::ConditionFails }
    }

    fn settle(mut self) -> Self {
        let all = self.twelve_lattice.iter().all(|c| c.1)
            && self.nine_forms.iter().all(|c| c.1)
            && self.two_genera.iter().all(|c| c.1);
        self.verdict = if all { Verdict::RecoverableSufficient } else { Verdict::ConditionFails };
        self
    }

    pub fn passes(&self) -> bool {
        self.verdict == Verdict::RecoverableSufficient
    }

    /// First binary or form that fails.
    pub fn first_failure(&self) -> Option<String> {
        self.twelve_lattice
            .iter()
            .find(|c| !c.1)
            .map(|c| c.0.to_string())
            .or_else(|| self.nine_forms.iter().find(|c| !c.1).map(|c| c.0.to_string()))
            .or_else(|| self.two_genera.iter().find(|c| !c.1).map(|c| format!("gen{}", c.0)))
    }
}

fn check_positive(m: i64) -> Result<()> {
    if m < 1 {
        return Err(QfError::PreconditionFailed(format!("m = {m} must be positive")));
    }
    Ok(())
}

/// Whether `4m` is represented by each of the twelve binaries.
pub fn twelve_lattice_condition(m: i64) -> Result<RecoverabilityReport> {
    check_positive(m)?;
        let mut r = RecoverabilityReport::new(m);
    for f in TWELVE {
        let ok = represents_integer_with_budget(&f.lattice(), 4 * m, &Budget::default())?.is_some();
        r.twelve_lattice.push((f, ok));
    }
    Ok(r.settle())
}

/// Whether `m` is represented by the nine forms and by both genera.
pub fn nine_plus_genera_condition(m: i64) -> Result<RecoverabilityReport> {
    check_positive(m)?;
        let mut r = RecoverabilityReport::new(m);
    for f in NINE {
        r.nine_forms.push((f, form_represents(f, m, &Budget::default())?));
    }
    for f in TWO_GENERA {
        r.two_genera.push((f, genus_represents_with_budget(f, m, &Budget::default())?));
    }
    Ok(r.settle())
}

/// `p ≡ 1 (mod 8)` and `p` is a square mod 3, 5, 7, 11, 23 and 31.
pub fn corollary_prime_check(p: i64) -> Result<bool> {
    if p < 2 || !arith::is_prime(p as u64) {
        return Err(QfError::NotPrime(p.max(0) as u64));
    }
    Ok(p % 8 == 1 && RESIDUE_PRIMES.iter().all(|&q| arith::legendre(p, q) == 1))
}

/// The first `count` primes after 5569 that are ≡ 5569 mod 823,515 and
/// ≡ 1 mod 8.
pub fn corollary_family(count: usize) -> Vec<i64> {
    let step = 8 * FAMILY_MODULUS;
    (1..).map(|k| 5569 + k * step).filter(|&p| arith::is_prime(p as u64)).take(count).collect()
}

/// Prime check plus the twelve-lattice cross-check.
pub fn verify_corollary_prime(p: i64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("corollary-prime");
    rep.set("p", p);
    let passes = corollary_prime_check(p)?;
    rep.set("prime_condition", passes);
    let twelve = twelve_lattice_condition(p)?;
    rep.set("twelve_lattice", twelve.passes());
    if !passes {
        rep.fail(json!({ "p": p, "prime_condition": false }));
    } else if !twelve.passes() {
        rep.fail(json!({ "p": p, "twelve_lattice_failure": twelve.first_failure() }));
    }
    Ok(rep)
}

/// Class lists behind the nine forms and the two genera.
pub fn verify_genus_data() -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("genus-23");
    let l23 = reduced_forms_of_disc(-23)?;
    let proper = vec![tri(1, 1, 6), tri(2, 1, 3), tri(2, -1, 3)];
    if l23.classes != proper || l23.genus_partition.len() != 1 {
        rep.fail(json!({ "disc": -23, "classes": l23.classes, "genera": l23.genus_partition }));
    }
    let improper = GenusClassList::improper_classes(&l23.genus_classes(tri(1, 1, 6)));
    if improper != vec![tri(1, 1, 6), tri(2, 1, 3)] {
        rep.fail(json!({ "genus_mod_improper": improper }));
    }
    rep.set("disc_23_classes", serde_json::to_value(&l23.classes).expect("serializes"));
    rep.set("disc_23_mod_improper", serde_json::to_value(&improper).expect("serializes"));
    let mut numbers = Vec::new();
    for f in NINE {
        let list = reduced_forms_of_disc(f.discriminant())?;
        let h = list.class_number(f);
        if h != 1 {
            rep.fail(json!({ "form": f.to_string(), "class_number": h }));
        }
        numbers.push(json!({ "form": f.to_string(), "disc": f.discriminant(), "class_number": h }));
    }
    rep.set("nine_class_numbers", json!(numbers));
    for f in TWO_GENERA {
        let list = reduced_forms_of_disc(f.discriminant())?;
        rep.set(&format!("genus_{}", f.c), json!({
            "disc": f.discriminant(),
            "genera": list.genus_partition.len(),
            "classes": list.genus_classes(f).iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        }));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Non-recoverability constructions.

/// `⊥_{2≤i≤h, 1≤j≤⌊i/2⌋} [[i²a, ija],[ija, j²a+b]]`.
#[allow(non_snake_case)]
pub fn build_K_h(a: i64, b: i64, h: i64) -> Result<Lattice> {
    if !(2 <= a && a < b && b % a != 0 && h >= 2 && h * h * a < b && b < (h + 1) * (h + 1) * a) {
        return Err(QfError::PreconditionFailed(format!("(a, b, h) = ({a}, {b}, {h}) is out of range")));
    }
    let mut blocks = Vec::new();
    for i in 2..=h {
        for j in 1..=i / 2 {
            blocks.push(GramMatrix::from_rows(&[vec![i * i * a, i * j * a], vec![i * j * a, j * j * a + b]])?);
        }
    }
    Ok(Lattice::from_blocks(blocks))
}

/// Every value of `K(h)` up to `bound` is `ma + nb` with m, n ≥ 0 and is
/// neither `a` nor `b`.
pub fn check_qvalue(a: i64, b: i64, h: i64, bound: i64) -> Result<VerificationReport> {
    let k = build_K_h(a, b, h)?;
    let mut rep = VerificationReport::new("qvalue");
    rep.bound = Some(bound);
    rep.set("lattice", serde_json::to_value(k.gram()).expect("serializes"));
    let norms = short_vectors_with_budget(&k, bound, &Budget::default())?.norms();
    let combination = |n: i64| (0..=n / b).any(|q| (n - q * b) % a == 0);
    for &n in &norms {
        if n == a || n == b || !combination(n) {
            rep.fail(json!({ "value": n }));
        }
    }
    rep.set("values", norms);
    Ok(rep)
}

/// Orthogonal sum of all reduced binaries with `n ≤ a ≤ c ≤ bound`.
pub fn surrogate_tail(n: i64, bound: i64) -> Result<Lattice> {
    if n < 1 || n > bound {
        return Err(QfError::PreconditionFailed(format!("need 1 ≤ n ≤ bound, got n = {n}, bound = {bound}")));
    }
    let blocks = enumerate_reduced_binaries(bound, n)?.iter().map(|f| f.gram()).collect();
    Ok(Lattice::from_blocks(blocks))
}

/// Whether `s` is a proper sublattice of `l` up to isometry.
pub fn is_proper_sublattice(l: &Lattice, s: &Lattice, limit: u64) -> Result<bool> {
    if s.rank() != l.rank() {
        return Ok(false);
    }
    let (q, r) = num_integer::Integer::div_rem(s.disc(), l.disc());
    if !num_traits::Zero::is_zero(&r) {
        return Ok(false);
    }
    let root = q.sqrt();
    if &root * &root != q || root < num_bigint::BigInt::from(2) {
        return Ok(false);
    }
    Ok(represents_lattice_with_budget(l, s, &Budget::new(limit))?.is_some())
}

/// First candidate representing every member of `s0` but not `l`.
pub fn recovery_counterexample_search(
    l: &Lattice,
    s0: &[Lattice],
    candidates: &[Lattice],
    limit: u64,
) -> Result<Option<Lattice>> {
    for s in s0 {
        if !is_proper_sublattice(l, s, limit)? {
            return Err(QfError::PreconditionFailed(format!("{} is not a proper sublattice", s.to_text())));
        }
    }
    for c in candidates {
        let mut all = true;
        for s in s0 {
            if represents_lattice_with_budget(c, s, &Budget::new(limit))?.is_none() {
                all = false;
                break;
            }
        }
        if all && represents_lattice_with_budget(c, l, &Budget::new(limit))?.is_none() {
            return Ok(Some(c.clone()));
        }
    }
    Ok(None)
}

/// Deterministic lattices that represent every member of `s0`: the span of
/// copies of the members' bases with random cross inner products, plus a
/// small random orthogonal summand.
pub fn gluing_corpus(s0: &[Lattice], count: usize, seed: u64) -> Result<Vec<Lattice>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grams: Vec<GramMatrix> = s0.iter().map(|s| s.gram()).collect();
    let n: usize = grams.iter().map(|g| g.dim()).sum();
    let mut owner = Vec::with_capacity(n);
    for (i, g) in grams.iter().enumerate() {
        owner.extend((0..g.dim()).map(|j| (i, j)));
    }
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count {
            return Err(QfError::PreconditionFailed("corpus generation stalled".into()));
        }
        let spread = rng.gen_range(0..=3i64);
        let mut e = vec![0i64; n * n];
        for x in 0..n {
            for y in x..n {
                let (bx, ix) = owner[x];
                let (by, iy) = owner[y];
                let v = if bx == by {
                    grams[bx].get(ix, iy)
                } else {
                    let cs = arith::isqrt_u64((grams[bx].get(ix, ix) * grams[by].get(iy, iy)) as u64) as i64;
                    let lim = spread.min(cs);
                    rng.gen_range(-lim..=lim)
                };
                e[x * n + y] = v;
                e[y * n + x] = v;
            }
        }
        if !arith::is_psd(&e, n) {
            continue;
        }
        let (rho, u) = arith::radical_split(&e, n)?;
        let full = arith::congruence(&e, n, &u, n)?;
        let block: Vec<i64> = (0..rho * rho).map(|i| full[(i / rho) * n + i % rho]).collect();
        let glued = lll_reduce(&Lattice::from_gram(GramMatrix::from_flat(rho, block)?)?)?.0;
        let extra_rank = rng.gen_range(0..=2usize);
        let diag: Vec<i64> = (0..extra_rank).map(|_| rng.gen_range(1..=9)).collect();
        out.push(glued.direct_sum(&Lattice::diagonal(&diag)?));
    }
    Ok(out)
}

/// Runs the counterexample search over a gluing corpus.
pub fn verify_recovery_corpus(claim: &str, l: &Lattice, s0: &[Lattice], count: usize, seed: u64) -> Result<VerificationReport> {
        let corpus = gluing_corpus(s0, count, seed)?;
    let mut rep = VerificationReport::new(claim);
    rep.budget = Some(Budget::default_limit());
    rep.set("corpus_size", corpus.len());
    rep.set("seed", seed);
    if let Some(c) = recovery_counterexample_search(l, s0, &corpus, Budget::default_limit())? {
        rep.fail(json!({ "lattice": c.gram() }));
    }
    Ok(rep)
}

/// Quaternary lattice that misses `⟨2,8⟩` but represents many of its
/// sublattices.
pub fn remark_k() -> Lattice {
    Lattice::new(&[vec![2, 1, 1, 0], vec![1, 8, 0, 0], vec![1, 0, 8, 4], vec![0, 0, 4, 10]]).expect("positive definite")
}

/// `K ⊥ tail(9, bound)` represents every proper sublattice of `⟨2,8⟩` with
/// μ₂ ≤ `bound` and misses `⟨2,8⟩`.
pub fn verify_remark_counterexample(bound: i64) -> Result<VerificationReport> {
        let ell = Lattice::diagonal(&[2, 8])?;
    let candidate = remark_k().direct_sum(&surrogate_tail(9, bound)?);
    let subs = proper_sublattices_by_mu2(&ell, bound)?;
    let mut rep = VerificationReport::new("remark-2-8");
    rep.bound = Some(bound);
    rep.set("sublattices", subs.len());
    let s0: Vec<Lattice> = subs.iter().map(|s| s.form.lattice()).collect();
    match recovery_counterexample_search(&ell, &s0, std::slice::from_ref(&candidate), Budget::default_limit())? {
        Some(_) => rep.witnesses.push(json!({ "candidate": "K + tail(9)", "blocks": candidate.components().len() })),
        None => {
            let missed: Vec<_> = subs
                .iter()
                .filter(|s| represents_lattice_with_budget(&candidate, &s.form.lattice(), &Budget::default()).ok().flatten().is_none())
                .map(|s| s.form.rows())
                .collect();
            rep.fail(json!({ "missed_sublattices": missed }));
        }
    }
    Ok(rep)
}

/// Lattice for `⟨1,m⟩`, `m ≡ 2 (mod 4)`: `⟨1,3,5,m−1⟩ ⊥ 2·D₅ ⊥ tail(m+1)`
/// for `m ≥ 10`, and `⟨1⟩ ⊥ [[4,0,2],[0,5,1],[2,1,7]] ⊥ tail(7)` for `m = 6`.
pub fn build_prop44_lm(m: i64, bound: i64) -> Result<Lattice> {
    if m == 6 {
        let t = Lattice::new(&[vec![4, 0, 2], vec![0, 5, 1], vec![2, 1, 7]])?;
        return Ok(Lattice::identity(1).direct_sum(&t).direct_sum(&surrogate_tail(7, bound)?));
    }
    if m < 10 || m % 4 != 2 {
        return Err(QfError::PreconditionFailed(format!("m = {m} must be 6, or ≡ 2 (mod 4) and at least 10")));
    }
    let head = Lattice::diagonal(&[1, 3, 5, m - 1])?;
    let n = Lattice::root_lattice(RootFamily::D, 5)?.scale(2)?;
    Ok(head.direct_sum(&n).direct_sum(&surrogate_tail(m + 1, bound)?))
}

/// Even reduced binaries with `c ≤ bound` missed by D₅.
pub fn d5_even_failures(bound: i64, limit: u64) -> Result<Vec<ReducedBinary>> {
    let d5 = Lattice::root_lattice(RootFamily::D, 5)?;
    let mut out = Vec::new();
    for f in enumerate_reduced_binaries(bound, 1)? {
        if f.a % 2 == 0 && f.c % 2 == 0 && represents_lattice_with_budget(&d5, &f.lattice(), &Budget::new(limit))?.is_none() {
            out.push(f);
        }
    }
    Ok(out)
}

/// `L_m` misses `⟨1,m⟩` and represents every proper sublattice of it with
/// μ₂ ≤ `bound`.
pub fn verify_prop44(m: i64, bound: i64) -> Result<VerificationReport> {
        let lm = build_prop44_lm(m, bound)?;
    let ell = Lattice::diagonal(&[1, m])?;
    let mut rep = VerificationReport::new("prop44");
    rep.bound = Some(bound);
    rep.budget = Some(Budget::default_limit());
    rep.set("m", m);
    if let Some(e) = represents_lattice_with_budget(&lm, &ell, &Budget::default())? {
        rep.fail(json!({ "represents": [[1, 0], [0, m]], "embedding": embedding_json(&e) }));
    }
    let subs = proper_sublattices_by_mu2(&ell, bound)?;
    rep.set("sublattices", subs.len());
    for s in &subs {
        if represents_lattice_with_budget(&lm, &s.form.lattice(), &Budget::default())?.is_none() {
            rep.fail(json!({ "missed_sublattice": s.form.rows(), "index": s.index }));
        }
    }
    if m >= 10 {
        let w = Lattice::binary(9, 3, 1 + m)?;
        match represents_lattice_with_budget(&lm, &w, &Budget::default())? {
            Some(e) => rep.witnesses.push(json!({ "source": [[9, 3], [3, 1 + m]], "embedding": embedding_json(&e) })),
            None => rep.fail(json!({ "missed": [[9, 3], [3, 1 + m]] })),
        }
        let even = d5_even_failures(bound / 2, Budget::default_limit())?;
        rep.set("d5_even_bound", bound / 2);
        if !even.is_empty() {
            rep.fail(json!({ "d5_misses": forms_json(&even) }));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sublattices_of_small_binaries() {
        let l = Lattice::identity(2);
        let s = proper_sublattices(&l, 2).unwrap();
        let forms: Vec<_> = s.items.iter().map(|i| i.form).collect();
        assert_eq!(forms, vec![rb(1, 0, 4), rb(2, 0, 2)]);
        let l14 = Lattice::diagonal(&[1, 4]).unwrap();
        for item in proper_sublattices(&l14, 6).unwrap().items {
            assert_eq!(item.form.disc(), item.index * item.index * 4);
            let e = Embedding::new(2, 2, item.basis.to_vec());
            assert!(e.verify(&l14, &item.form.lattice()));
        }
    }

    #[test]
    fn phi9_examples() {
        assert_eq!(phi9(rb(2, 1, 13)).unwrap(), rb(2, 1, 4));
        assert_eq!(phi9(rb(1, 0, 13)).unwrap(), rb(1, 0, 4));
        assert!(matches!(phi9(rb(2, 1, 12)), Err(QfError::NotInL13 { c: 12 })));
        for k in enumerate_reduced_binaries(30, 1).unwrap().into_iter().filter(|k| k.c >= 13) {
            let p = phi9(k).unwrap();
            assert_eq!(p.disc(), k.disc() - 9 * k.a);
            assert!(phi9_preimages(p).unwrap().iter().any(|q| q.form == k));
        }
    }

    #[test]
    fn lift_examples() {
        let l = quinary(true);
        let k = rb(1, 0, 13);
        let e = represents_lattice_with_budget(&l, &rb(1, 0, 4).lattice(), &Budget::default()).unwrap().unwrap();
        let lifted = lift_phi9(k, &l, 1, &e).unwrap();
        assert_eq!(lifted.target_rank, 10);
        let zero = lift_phi9(rb(1, 0, 4), &l, 0, &e).unwrap();
        assert!(zero.matrix[10..].iter().all(|&x| x == 0));
        assert!(matches!(lift_phi9(rb(1, 0, 4), &l, 1, &e), Err(QfError::ChainBroken(_))));
        let two = lift_phi9(rb(1, 0, 22), &l, 2, &e).unwrap();
        assert!(two.verify(&l.direct_sum(&Lattice::identity(5).scale(9).unwrap()), &rb(1, 0, 22).lattice()));
    }

    #[test]
    fn small_conditions() {
        let r = twelve_lattice_condition(2).unwrap();
        assert!(!r.passes());
        assert!(!r.twelve_lattice.iter().find(|c| c.0 == rb(4, 0, 9)).unwrap().1);
        assert!(nine_plus_genera_condition(1).unwrap().nine_forms.iter().all(|c| c.1));
        assert!(corollary_prime_check(5569).unwrap());
        assert!(!corollary_prime_check(2).unwrap());
        assert!(matches!(corollary_prime_check(15), Err(QfError::NotPrime(15))));
    }

    #[test]
    fn k_h_and_tail() {
        let k = build_K_h(2, 9, 2).unwrap();
        assert_eq!(k.gram().rows(), vec![vec![8, 4], vec![4, 11]]);
        assert!(build_K_h(2, 8, 2).is_err());
        let t = surrogate_tail(5, 5).unwrap();
        assert_eq!(t.rank(), 6);
        assert_eq!(crate::enumeration::successive_minima(&t).unwrap().minima[0], 5);
    }
}
