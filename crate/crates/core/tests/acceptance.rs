//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use qflat::claims::{run_claim, ClaimParams, CORPUS_SIZE, NATURAL_TRUANTS};
use qflat::criterion::{build_excluder, IntegerSet};
use qflat::recover::{
    corollary_family, corollary_prime_check, phi9_preimages, quinary, twelve_lattice_condition, unrepresented_binaries,
    NINE,
};
use qflat::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn rb(a: i64, b: i64, c: i64) -> ReducedBinary {
    ReducedBinary { a, b, c }
}

fn check(cond: bool, what: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn claim(id: &str, params: ClaimParams) -> std::result::Result<VerificationReport, String> {
    let rep = run_claim(id, &params).map_err(|e| format!("{id}: {e}"))?;
    if rep.passed() {
        Ok(rep)
    } else {
        Err(format!("{id}: {:?}, counterexamples {}", rep.status, serde_json::to_string(&rep.counterexamples).unwrap()))
    }
}

fn exceptions() -> Outcome {
    let expected: BTreeSet<ReducedBinary> = [
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
    ]
    .into_iter()
    .collect();
    let got: BTreeSet<ReducedBinary> =
        unrepresented_binaries(&quinary(true), 12, DEFAULT_BUDGET).map_err(|e| e.to_string())?.into_iter().collect();
    let missing: Vec<_> = expected.difference(&got).map(|f| f.to_string()).collect();
    let extra: Vec<_> = got.difference(&expected).map(|f| f.to_string()).collect();
    check(got == expected, format!("found {} of 15; listed but represented or out of range: {missing:?}; extra: {extra:?}", got.len()))?;
    Ok("15 unrepresented binaries, exact".into())
}

fn preimages() -> Outcome {
    let lists = [
        (rb(1, 0, 1), vec![rb(1, 0, 10), rb(2, 1, 10), rb(5, 2, 10), rb(10, 3, 10)]),
        (rb(2, 1, 3), vec![rb(2, 1, 12), rb(3, 1, 11), rb(7, 3, 11), rb(10, 5, 12)]),
        (rb(2, 1, 4), vec![rb(2, 1, 13), rb(4, 1, 11), rb(8, 3, 11)]),
    ];
    for (t, want) in lists {
        let got: BTreeSet<ReducedBinary> = phi9_preimages(t).map_err(|e| e.to_string())?.into_iter().map(|p| p.form).collect();
        check(got == want.iter().copied().collect(), format!("preimages of {t}: {got:?}"))?;
    }
    Ok("lists of 4, 4 and 3 preimages, exact".into())
}

fn genus_data() -> Outcome {
    claim("genus-23", ClaimParams::default())?;
    let l = reduced_forms_of_disc(-23).map_err(|e| e.to_string())?;
    let want = [BinaryFormTriple { a: 1, b: 1, c: 6 }, BinaryFormTriple { a: 2, b: -1, c: 3 }, BinaryFormTriple { a: 2, b: 1, c: 3 }];
    check(l.classes.iter().copied().collect::<BTreeSet<_>>() == want.into_iter().collect(), format!("{:?}", l.classes))?;
    check(l.genus_partition.len() == 1, "disc -23 has more than one genus")?;
    check(GenusClassList::improper_classes(&l.classes).len() == 2, "improper classes")?;
    for f in NINE {
        let d = f.b * f.b - 4 * f.a * f.c;
        let h = reduced_forms_of_disc(d).map_err(|e| e.to_string())?.class_number(f);
        check(h == 1, format!("{f:?} has class number {h}"))?;
    }
    Ok("disc -23: 3 classes, 1 genus; nine forms of class number 1".into())
}

fn equivalence() -> Outcome {
    claim("condition-equivalence", ClaimParams { bound: Some(200), ..Default::default() })?;
    Ok("agreement for m <= 200".into())
}

fn family() -> Outcome {
    check(corollary_prime_check(5569).map_err(|e| e.to_string())?, "5569 fails the prime check")?;
    check(twelve_lattice_condition(5569).map_err(|e| e.to_string())?.passes(), "5569 fails the twelve-lattice condition")?;
    let primes = corollary_family(10);
    check(primes.len() >= 10, "fewer than 10 primes")?;
    for &p in &primes {
        check(p % 823_515 == 5569 && is_prime(p as u64) && p != 5569, format!("{p} is not a further prime of the class"))?;
        check(corollary_prime_check(p).map_err(|e| e.to_string())?, format!("{p} fails the prime check"))?;
        check(twelve_lattice_condition(p).map_err(|e| e.to_string())?.passes(), format!("{p} fails the twelve-lattice condition"))?;
    }
    claim("corollary-family", ClaimParams::default())?;
    Ok(format!("5569 and {} further primes, {}..{}", primes.len(), primes[0], primes[primes.len() - 1]))
}

fn remark() -> Outcome {
    claim("nonsquare-remark", ClaimParams { bound: Some(36), ..Default::default() })?;
    for m in (1..=35).filter(|&m| !is_square(m)) {
        check(!twelve_lattice_condition(m).map_err(|e| e.to_string())?.passes(), format!("m = {m} passes"))?;
    }
    Ok("every non-square m <= 35 fails; squares need no condition".into())
}

fn truants() -> Outcome {
    let rep = claim("truants", ClaimParams { bound: Some(15), ..Default::default() })?;
    let got: Vec<i64> = serde_json::from_value(rep.data["truants"].clone()).map_err(|e| e.to_string())?;
    check(got == NATURAL_TRUANTS, format!("truants {got:?}"))?;
    check(rep.witnesses.len() == NATURAL_TRUANTS.len(), "missing certificates")?;
    Ok(format!("truants {got:?}, certificates verified"))
}

fn excluders() -> Outcome {
    let naturals = IntegerSet::naturals(200);
    let base = Lattice::new(&[vec![1, 0], vec![0, 1]]).map_err(|e| e.to_string())?;
    let (recipe, rep) = build_excluder(&base, &naturals, 2, 200, &Budget::default()).map_err(|e| e.to_string())?;
    check(rep.passed(), "excluder report fails")?;
    for n in 1..=200 {
        let hit = represents_integer(&recipe.result, n).map_err(|e| e.to_string())?.is_some();
        check(hit == (n != 3), format!("value {n}: represented = {hit}"))?;
    }
    let rep = claim("excluder", ClaimParams { bound: Some(200), ..Default::default() })?;
    let n = rep.data["checks"].as_array().map_or(0, |c| c.len());
    check(n == 3, format!("{n} instances"))?;
    Ok("N with <1,1>, k = 2 misses only 3; 3 instances verified to 200".into())
}

fn recovery() -> Outcome {
    for id in ["recovery-1-4", "recovery-1-1-2"] {
        let rep = claim(id, ClaimParams::default())?;
        let checked = rep.data.get("corpus_size").or_else(|| rep.data.get("checked")).and_then(|v| v.as_u64());
        check(checked == Some(CORPUS_SIZE as u64), format!("{id}: corpus size {checked:?}"))?;
    }
    claim("remark-2-8", ClaimParams { bound: Some(20), ..Default::default() })?;
    Ok(format!("no counterexample in two corpora of {CORPUS_SIZE}; <2,8> counterexample verified to 20"))
}

fn engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for t in 0..200 {
        let g = random_pd(&mut rng, 1 + t % 4, 20);
        let bound = 1 + (t as i64 * 7) % 40;
        let l = Lattice::new(&g).map_err(|e| e.to_string())?;
        let got: Vec<(Vec<i64>, i64)> =
            short_vectors(&l, bound).map_err(|e| e.to_string())?.entries.into_iter().map(|(v, q)| (v.coords, q)).collect();
        check(got == box_vectors(&g, bound), format!("short vectors of {g:?} to {bound}"))?;
        let m = successive_minima(&l).map_err(|e| e.to_string())?;
        check(m.hermite_lower_holds(l.disc()), format!("Hermite bound for {g:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let c = random_pd(&mut rng, 4, 6);
        let u = random_unimodular(&mut rng, 4, 6);
        let b = congruent(&c, &u.iter().map(|r| r[..3].to_vec()).collect());
        let a = congruent(&b, &vec![vec![1, 0], vec![1, 1], vec![0, 2]]);
        let [la, lb, lc] = [&a, &b, &c].map(|g| Lattice::new(g).unwrap());
        let ab = represents_lattice(&lb, &la).map_err(|e| e.to_string())?.ok_or("A not in B")?;
        let bc = represents_lattice(&lc, &lb).map_err(|e| e.to_string())?.ok_or("B not in C")?;
        check(bc.compose(&ab).map_err(|e| e.to_string())?.verify(&lc, &la), "composite embedding")?;
        check(represents_lattice(&lc, &la).map_err(|e| e.to_string())?.is_some(), "A not in C")?;
        let (sa, sc) = (la.scale(3).unwrap(), lc.scale(3).unwrap());
        check(represents_lattice(&sc, &sa).map_err(|e| e.to_string())?.is_some(), "scaled A not in scaled C")?;
    }
    for _ in 0..300 {
        let g = random_pd(&mut rng, 2, 40);
        let (r, _) = reduce_binary(&GramMatrix::from_rows(&g).unwrap()).map_err(|e| e.to_string())?;
        check(reduce_binary(&r.gram()).map_err(|e| e.to_string())?.0 == r, "reduction is not idempotent")?;
        let h = congruent(&g, &random_unimodular(&mut rng, 2, 4));
        check(reduce_binary(&GramMatrix::from_rows(&h).unwrap()).map_err(|e| e.to_string())?.0 == r, "reduction is not invariant")?;
        check((r.a, r.b, r.c) == reduced_by_scan(g[0][0], g[0][1], g[1][1]), "reduction differs from minima scan")?;
    }
    Ok("200 short-vector lists, 40 transitivity cases, 300 reductions".into())
}

fn gadgets() -> Outcome {
    for (a, b, h) in [(2, 9, 2), (3, 13, 2), (2, 19, 3)] {
        claim("qvalue", ClaimParams { a: Some(a), b: Some(b), h: Some(h), bound: Some(200), ..Default::default() })?;
    }
    for m in [6, 10] {
        claim("prop44", ClaimParams { m: Some(m), bound: Some(60), ..Default::default() })?;
    }
    claim("d5-even", ClaimParams { bound: Some(10), ..Default::default() })?;
    Ok("3 value checks to 200; m = 6, 10 at bound 60; D5 even binaries to 10".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("15 exceptions", 60, exceptions),
        ("shift preimage lists", 10, preimages),
        ("genus and class data", 10, genus_data),
        ("condition equivalence", 300, equivalence),
        ("corollary family", 300, family),
        ("non-square remark", 120, remark),
        ("truant witnesses", 1800, truants),
        ("excluder construction", 120, excluders),
        ("recoverability suites", 1800, recovery),
        ("engine invariants", 600, engine),
        ("section 4 gadgets", 600, gadgets),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > Duration::from_secs(limit) => Err(format!("{d}; over the {limit} s limit")),
            o => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name} ({:.2} s): {detail}", i + 1, took.as_secs_f64());
    }
    println!("{} of 11 criteria pass", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
