mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use qflat::recover::*;
use qflat::represent::represents_lattice_with_budget;
use qflat::*;

fn reduced_upto(max_c: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for c in 1..=max_c {
        for a in 1..=c {
            for b in 0..=a / 2 {
                if a * c - b * b > 0 {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

fn quinary_rows() -> Rows {
    vec![
        vec![1, 0, 0, 0, 0],
        vec![0, 2, 0, 0, 0],
        vec![0, 0, 3, 0, 0],
        vec![0, 0, 0, 2, 1],
        vec![0, 0, 0, 1, 5],
    ]
}

#[test]
fn quinary_exceptions_match_brute_force() {
    let target = quinary_rows();
    let oracle: BTreeSet<(i64, i64, i64)> =
        reduced_upto(12).into_iter().filter(|&(a, b, c)| !represents_binary(&target, a, b, c)).collect();
    let l = quinary(true);
    let lib: BTreeSet<(i64, i64, i64)> =
        unrepresented_binaries(&l, 12, DEFAULT_BUDGET).unwrap().into_iter().map(|f| (f.a, f.b, f.c)).collect();
    assert_eq!(lib, oracle);
    assert_eq!(oracle.len(), 14);
    let listed: BTreeSet<(i64, i64, i64)> = LISTED_EXCEPTIONS.iter().map(|f| (f.a, f.b, f.c)).collect();
    let extra: Vec<_> = listed.difference(&oracle).collect();
    assert_eq!(extra, vec![&(4, 1, 13)]);
    assert!(!represents_binary(&target, 4, 1, 13));
    assert!(represents_binary(&target, 2, 1, 13));
}

#[test]
fn preimages_match_brute_force() {
    for (t, listed) in LISTED_PREIMAGES {
        let mut oracle = Vec::new();
        for (a, b, c) in reduced_upto(t.c + 9 + t.a) {
            if c > 9 && a * (c - 9) - b * b > 0 && reduced_by_scan(a, b, c - 9) == (t.a, t.b, t.c) {
                oracle.push((a, b, c));
            }
        }
        let got: BTreeSet<_> = phi9_preimages(t).unwrap().iter().map(|p| (p.form.a, p.form.b, p.form.c)).collect();
        let want: BTreeSet<_> = listed.iter().map(|f| (f.a, f.b, f.c)).collect();
        assert_eq!(got, oracle.into_iter().collect::<BTreeSet<_>>());
        assert_eq!(got, want);
    }
}

#[test]
fn class_lists_match_brute_force() {
    for d in [-3i64, -4, -7, -8, -11, -15, -20, -23, -24, -27, -32, -35, -36, -47, -71, -84] {
        let mut oracle = Vec::new();
        let amax = ((-d) as f64 / 3.0).sqrt() as i64;
        for a in 1..=amax {
            for b in -a + 1..=a {
                if (b * b - d) % (4 * a) != 0 {
                    continue;
                }
                let c = (b * b - d) / (4 * a);
                if c < a || (a == c && b < 0) {
                    continue;
                }
                oracle.push(BinaryFormTriple { a, b, c });
            }
        }
        let list = reduced_forms_of_disc(d).unwrap();
        let got: BTreeSet<_> = list.classes.iter().copied().collect();
        assert_eq!(got, oracle.into_iter().collect::<BTreeSet<_>>(), "disc {d}");
        let members: usize = list.genus_partition.iter().map(|g| g.len()).sum();
        assert_eq!(members, list.classes.len());
    }
    let l23 = reduced_forms_of_disc(-23).unwrap();
    assert_eq!(l23.classes.len(), 3);
    assert_eq!(l23.genus_partition.len(), 1);
}

#[test]
fn conditions_match_brute_force() {
    for m in 1..=120 {
        let twelve = TWELVE.iter().all(|f| form_takes(f.a, 2 * f.b, f.c, 4 * m));
        assert_eq!(twelve_lattice_condition(m).unwrap().passes(), twelve, "m = {m}");
        let nine = NINE.iter().all(|f| form_takes(f.a, f.b, f.c, m));
        let r = nine_plus_genera_condition(m).unwrap();
        assert_eq!(r.nine_forms.iter().all(|c| c.1), nine, "m = {m}");
    }
    // Discriminants -23 and -31 have one genus each: (1,1,6), (2,±1,3) and (1,1,8), (2,±1,4).
    for m in 1..=120 {
        let g6 = form_takes(1, 1, 6, m) || form_takes(2, 1, 3, m);
        let g8 = form_takes(1, 1, 8, m) || form_takes(2, 1, 4, m);
        let r = nine_plus_genera_condition(m).unwrap();
        assert_eq!(r.two_genera[0].1, g6, "gen(1,1,6) at {m}");
        assert_eq!(r.two_genera[1].1, g8, "gen(1,1,8) at {m}");
    }
}

#[test]
fn corollary_primes() {
    assert!(corollary_prime_check(5569).unwrap());
    assert!(twelve_lattice_condition(5569).unwrap().passes());
    let fam = corollary_family(10);
    assert_eq!(fam.len(), 10);
    for p in fam {
        assert_eq!(p % (8 * FAMILY_MODULUS), 5569);
        assert!(corollary_prime_check(p).unwrap());
        assert!(twelve_lattice_condition(p).unwrap().passes(), "{p}");
    }
    assert!(!corollary_prime_check(8_240_719).unwrap());
    assert!(!twelve_lattice_condition(8_240_719).unwrap().passes());
}

#[test]
fn sublattices_match_hnf_scan() {
    for (p, q, r) in [(1, 0, 1), (1, 0, 4), (2, 1, 3), (2, 0, 8), (3, 1, 5)] {
        let g = vec![vec![p, q], vec![q, r]];
        let max_index = 6;
        let mut oracle = BTreeSet::new();
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for c in -6i64..=6 {
                    for d in -6i64..=6 {
                        let det = (a * d - b * c).abs();
                        if (2..=max_index).contains(&det) {
                            let s = congruent(&g, &vec![vec![a, b], vec![c, d]]);
                            oracle.insert((det, reduced_by_scan(s[0][0], s[0][1], s[1][1])));
                        }
                    }
                }
            }
        }
        let list = proper_sublattices(&Lattice::new(&g).unwrap(), max_index).unwrap();
        let forms: BTreeSet<_> = list.items.iter().map(|i| (i.form.a, i.form.b, i.form.c)).collect();
        assert_eq!(forms.len(), list.items.len(), "duplicates for {g:?}");
        let oracle_forms: BTreeSet<_> = oracle.iter().map(|x| x.1).collect();
        assert_eq!(forms, oracle_forms, "{g:?}");
        for item in &list.items {
            assert_eq!(item.form.disc(), item.index * item.index * (p * r - q * q));
            let e = Embedding::new(2, 2, item.basis.to_vec());
            assert!(e.verify(&Lattice::new(&g).unwrap(), &item.form.lattice()));
        }
    }
    let i2 = proper_sublattices(&Lattice::identity(2), 2).unwrap();
    assert_eq!(i2.items.iter().map(|i| (i.form.a, i.form.c)).collect::<Vec<_>>(), vec![(1, 4), (2, 2)]);
}

#[test]
fn qvalue_instances() {
    for (a, b, h) in [(2, 9, 2), (3, 13, 2), (2, 19, 3)] {
        assert!(check_qvalue(a, b, h, 200).unwrap().passed());
        let k = build_K_h(a, b, h).unwrap();
        let g = k.gram().rows();
        let values: BTreeSet<i64> = box_vectors(&g, 200).into_iter().map(|(_, q)| q).collect();
        assert!(!values.contains(&a) && !values.contains(&b));
    }
    assert!(matches!(build_K_h(2, 10, 2), Err(QfError::PreconditionFailed(_))));
}

#[test]
fn surrogate_tail_shape() {
    let t = surrogate_tail(5, 5).unwrap();
    // (5,0,5), (5,1,5), (5,2,5)
    assert_eq!(t.rank(), 6);
    assert_eq!(t.disc(), &num_bigint::BigInt::from(25 * 24 * 21));
    assert_eq!(successive_minima(&t).unwrap().minima[0], 5);
    let t = surrogate_tail(6, 14).unwrap();
    for f in enumerate_reduced_binaries(14, 6).unwrap().into_iter().take(50) {
        assert!(represents_lattice_with_budget(&t, &f.lattice(), &Budget::default()).unwrap().is_some());
    }
}

#[test]
fn counterexample_search_checks_its_input() {
    let l = Lattice::diagonal(&[1, 4]).unwrap();
    let not_sub = Lattice::diagonal(&[1, 5]).unwrap();
    let r = recovery_counterexample_search(&l, &[not_sub], &[], DEFAULT_BUDGET);
    assert!(matches!(r, Err(QfError::PreconditionFailed(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi9_laws(a in 1i64..15, b in 0i64..8, c in 13i64..41) {
        prop_assume!(2 * b <= a && a <= c);
        let k = ReducedBinary { a, b, c };
        let p = phi9(k).unwrap();
        prop_assert_eq!(p.disc(), k.disc() - 9 * a);
        prop_assert!(phi9_preimages(p).unwrap().iter().any(|q| q.form == k));
        let chain = phi9_chain(k).unwrap();
        prop_assert!(chain.steps.last().unwrap().c <= 12);
        prop_assert!(chain.steps.iter().all(|s| s.disc() > 0));
    }

    #[test]
    fn lifted_embeddings_verify(a in 1i64..9, b in 0i64..5, c in 13i64..41) {
        prop_assume!(2 * b <= a && a <= c);
        let k = ReducedBinary { a, b, c };
        let chain = phi9_chain(k).unwrap();
        let last = *chain.steps.last().unwrap();
        let l = quinary(true);
        if let Some(e) = represents_lattice(&l, &last.lattice()).unwrap() {
            let lifted = lift_phi9(k, &l, chain.steps.len(), &e).unwrap();
            let big = l.direct_sum(&Lattice::identity(5).scale(9).unwrap());
            prop_assert!(lifted.verify(&big, &k.lattice()));
        }
    }
}
