mod common;

use common::*;
use proptest::prelude::*;
use qflat::represent::represents_lattice_with_budget;
use qflat::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lat(g: &Rows) -> Lattice {
    Lattice::new(g).unwrap()
}

#[test]
fn short_vectors_match_box_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for t in 0..200 {
        let n = 1 + t % 4;
        let g = random_pd(&mut rng, n, 20);
        let bound = 1 + (t as i64 * 7) % 40;
        let got: Vec<(Vec<i64>, i64)> =
            short_vectors(&lat(&g), bound).unwrap().entries.into_iter().map(|(v, q)| (v.coords, q)).collect();
        assert_eq!(got, box_vectors(&g, bound), "{g:?} bound {bound}");
    }
}

#[test]
fn exact_norm_shells_match_box_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let g = random_pd(&mut rng, 3, 9);
        let all = box_vectors(&g, 30);
        for m in [1, 7, 12, 30] {
            let got: Vec<Vec<i64>> = vectors_of_norm(&lat(&g), m).unwrap().into_iter().map(|v| v.coords).collect();
            let want: Vec<Vec<i64>> = all.iter().filter(|(_, q)| *q == m).map(|(v, _)| v.clone()).collect();
            assert_eq!(got, want);
            assert_eq!(represents_integer(&lat(&g), m).unwrap().is_some(), !want.is_empty());
        }
    }
}

#[test]
fn hermite_lower_bound_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for t in 0..100 {
        let g = random_pd(&mut rng, 1 + t % 4, 15);
        let l = lat(&g);
        let m = successive_minima(&l).unwrap();
        assert!(m.hermite_lower_holds(l.disc()), "{g:?} {:?}", m.minima);
        assert_eq!(m.minima[0], box_vectors(&g, g.iter().enumerate().map(|(i, r)| r[i]).min().unwrap())[0].1);
    }
}

#[test]
fn representation_is_transitive_and_scales() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let c = random_pd(&mut rng, 4, 6);
        let u = random_unimodular(&mut rng, 4, 6);
        let sub: Rows = u.iter().map(|r| r[..3].to_vec()).collect();
        let b = congruent(&c, &sub);
        let a = congruent(&b, &vec![vec![1, 0], vec![1, 1], vec![0, 2]]);
        let (la, lb, lc) = (lat(&a), lat(&b), lat(&c));
        let ab = represents_lattice(&lb, &la).unwrap().expect("A → B");
        let bc = represents_lattice(&lc, &lb).unwrap().expect("B → C");
        let ac = bc.compose(&ab).unwrap();
        assert!(ac.verify(&lc, &la));
        assert!(represents_lattice(&lc, &la).unwrap().unwrap().verify(&lc, &la));
        let budget = Budget::default();
        let scaled = represents_lattice_with_budget(&lc.scale(3).unwrap(), &la.scale(3).unwrap(), &budget).unwrap();
        assert!(scaled.unwrap().verify(&lc.scale(3).unwrap(), &la.scale(3).unwrap()));
    }
}

#[test]
fn isometry_of_random_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for t in 0..60 {
        let n = 1 + t % 4;
        let g = random_pd(&mut rng, n, 8);
        let h = congruent(&g, &random_unimodular(&mut rng, n, 5));
        let e = is_isometric(&lat(&g), &lat(&h)).unwrap().expect("isometric");
        assert!(e.is_unimodular());
        assert!(e.verify(&lat(&h), &lat(&g)));
    }
}

#[test]
fn reduce_binary_matches_minima_scan() {
    for a in 1..=12 {
        for c in a..=12 {
            for b in -a..=a {
                if a * c - b * b <= 0 {
                    continue;
                }
                let g = GramMatrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap();
                let (r, u) = reduce_binary(&g).unwrap();
                assert_eq!((r.a, r.b, r.c), reduced_by_scan(a, b, c), "[[{a},{b}],[{b},{c}]]");
                let uf = vec![vec![u[0][0], u[0][1]], vec![u[1][0], u[1][1]]];
                assert_eq!(congruent(&vec![vec![a, b], vec![b, c]], &uf), vec![vec![r.a, r.b], vec![r.b, r.c]]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reduce_binary_is_idempotent_and_invariant(a in 1i64..40, b in -40i64..40, c in 1i64..40, seed in any::<u64>()) {
        prop_assume!(a * c - b * b > 0);
        let g = GramMatrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap();
        let (r, _) = reduce_binary(&g).unwrap();
        prop_assert!(0 <= 2 * r.b && 2 * r.b <= r.a && r.a <= r.c);
        prop_assert_eq!(reduce_binary(&r.gram()).unwrap().0, r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unimodular(&mut rng, 2, 4);
        let h = congruent(&vec![vec![a, b], vec![b, c]], &u);
        prop_assert_eq!(reduce_binary(&GramMatrix::from_rows(&h).unwrap()).unwrap().0, r);
    }

    #[test]
    fn disc_is_invariant_and_lll_preserves_lattice(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_pd(&mut rng, n, 12);
        let l = lat(&g);
        prop_assert_eq!(l.disc().clone(), num_bigint::BigInt::from(det(&g)));
        let (r, u) = lll_reduce(&l).unwrap();
        let ur: Rows = u.chunks(n).map(|c| c.to_vec()).collect();
        prop_assert_eq!(congruent(&g, &ur), r.gram().rows());
        prop_assert_eq!(r.disc(), l.disc());
    }

    #[test]
    fn direct_sums_represent_their_summands(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_pd(&mut rng, 2, 8);
        let b = random_pd(&mut rng, 2, 8);
        let s = lat(&a).direct_sum(&lat(&b));
        prop_assert!(represents_lattice(&s, &lat(&a)).unwrap().is_some());
        prop_assert!(represents_lattice(&s, &lat(&b)).unwrap().is_some());
        prop_assert_eq!(s.disc().clone(), lat(&a).disc() * lat(&b).disc());
    }
}
