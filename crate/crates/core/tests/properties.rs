use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use relforge::descartes;
use relforge::graph::{edge_substitute, enumerate_connected_simple, Gadget, Multigraph};
use relforge::poly::clear_compose;
use relforge::rational::{int, rat};
use relforge::rel::{rel_bruteforce, rel_delcon, rel_substitution};
use relforge::rootiso::{count_roots, isolate_roots, refine, IsolatingInterval};
use relforge::{Polynomial, Rational, Sign};

fn poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-20i64..=20, 0..=max_deg + 1).prop_map(|c| Polynomial::from_i64s(&c))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

/// A connected multigraph on 2..=max_n vertices: a random spanning tree plus extra edges.
fn connected_multigraph(max_n: usize, max_extra: usize) -> impl Strategy<Value = Multigraph> {
    (2..=max_n)
        .prop_flat_map(move |n| {
            let parents = prop::collection::vec(any::<prop::sample::Index>(), n - 1);
            let extra = prop::collection::vec((0..n, 0..n), 0..=max_extra);
            (Just(n), parents, extra)
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, p)| (p.index(i + 1), i + 1)).collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            Multigraph::new(n, edges).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn ring_axioms(a in poly(6), b in poly(6), c in poly(6)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Polynomial::zero());
        prop_assert_eq!(&a * &Polynomial::one(), a.clone());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(6), b in poly(6), x in small_rational()) {
        prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
        prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        prop_assert_eq!(a.sign_at(&x), Sign::of_rational(&a.eval(&x)));
    }

    #[test]
    fn clear_compose_matches_rational_evaluation(
        f in poly(4), s in poly(3), r in poly(3), extra in 0usize..3, x in small_rational()
    ) {
        let m = f.degree().unwrap_or(0) + extra;
        let lhs = clear_compose(&f, &s, &r, m).unwrap();
        let rx = r.eval(&x);
        prop_assume!(!rx.is_zero());
        let ratio = s.eval(&x) / &rx;
        let rhs = num_traits::pow(rx, m) * f.eval(&ratio);
        prop_assert_eq!(lhs.eval(&x), rhs);
    }

    #[test]
    fn polynomial_json_round_trip(a in poly(10)) {
        let s = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Polynomial>(&s).unwrap(), a);
    }

    #[test]
    fn interval_json_round_trip(lo in small_rational(), w in 1i64..50, s in -1i8..=1, t in -1i8..=1) {
        let iv = IsolatingInterval {
            hi: &lo + rat(w, 7),
            lo,
            sign_lo: Sign::from_i8(s).unwrap(),
            sign_hi: Sign::from_i8(t).unwrap(),
        };
        let text = serde_json::to_string(&iv).unwrap();
        prop_assert_eq!(serde_json::from_str::<IsolatingInterval>(&text).unwrap(), iv);
    }

    #[test]
    fn count_is_additive(a in poly(8), lo in -30i64..0, mid in 1i64..30, hi in 1i64..30) {
        prop_assume!(!a.is_zero());
        let (lo, mid, hi) = (rat(lo, 10), rat(lo, 10) + rat(mid, 10), rat(lo, 10) + rat(mid + hi, 10));
        prop_assume!([&lo, &mid, &hi].iter().all(|x| !a.sign_at(x).is_zero()));
        let whole = count_roots(&a, &lo, &hi).unwrap();
        prop_assert_eq!(whole, count_roots(&a, &lo, &mid).unwrap() + count_roots(&a, &mid, &hi).unwrap());
    }

    #[test]
    fn descartes_agrees_with_sturm_on_squarefree(roots in prop::collection::btree_set(-90i64..90, 1..7), scale in 1i64..4) {
        let mut p = Polynomial::one();
        for r in &roots {
            p = &p * &Polynomial::from_i64s(&[-r, 100 * scale]);
        }
        p = &p * &Polynomial::from_i64s(&[1, 0, 1]);
        let (lo, hi) = (rat(-9, 10) + rat(1, 1000), rat(9, 10) + rat(1, 1000));
        let sturm = count_roots(&p, &lo, &hi).unwrap();
        prop_assert_eq!(sturm, descartes::count_roots(&p, &lo, &hi, descartes::DEFAULT_NODE_BUDGET).unwrap());
    }

    #[test]
    fn refine_nests_and_keeps_sign_change(num in -99i64..0, den in 100i64..300, eps_den in 2i64..100_000) {
        let root = rat(num, den);
        let p = &Polynomial::from_i64s(&[-num, den]) * &Polynomial::from_i64s(&[3, 0, 1]);
        let iv = isolate_roots(&p, &int(-1), &int(0)).unwrap().remove(0);
        let eps = rat(1, eps_den);
        let r = refine(&p, &iv, &eps);
        prop_assert!(r.width() <= eps);
        prop_assert!(iv.lo <= r.lo && r.hi <= iv.hi);
        prop_assert!(r.contains(&root));
        prop_assert!(r.has_sign_change());
        prop_assert_eq!(r.sign_lo, p.sign_at(&r.lo));
    }

    #[test]
    fn substitution_counts_and_simplicity(g in connected_multigraph(5, 5), k in 3usize..=5) {
        let h = Gadget::hn(k).unwrap();
        let s = edge_substitute(&g, &h).unwrap();
        let (gv, ge) = (g.n_vertices(), g.edge_count());
        prop_assert_eq!(s.n_vertices(), gv + ge * (k - 2));
        prop_assert_eq!(s.edge_count(), ge * (k * (k - 1) / 2 - 1));
        prop_assert!(s.is_simple());
        prop_assert!(s.is_connected());
    }

    #[test]
    fn connectivity_views_agree(n in 1usize..7, edges in prop::collection::vec((0usize..7, 0usize..7), 0..10)) {
        let edges: Vec<_> = edges.into_iter().filter(|&(a, b)| a < n && b < n && a != b).collect();
        let g = Multigraph::new(n, edges).unwrap();
        prop_assert_eq!(g.is_connected(), g.component_count() == 1);
    }

    #[test]
    fn bundle_cycles_are_connected(n in 2usize..9, b in 1usize..5) {
        let g = Multigraph::bundle_cycle(n, b).unwrap();
        prop_assert_eq!(g.edge_count(), n * b);
        prop_assert!(g.is_connected());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 60, ..ProptestConfig::default() })]

    #[test]
    fn brute_force_matches_deletion_contraction(g in connected_multigraph(6, 7)) {
        prop_assert_eq!(rel_bruteforce(&g).unwrap(), rel_delcon(&g).unwrap());
    }

    #[test]
    fn substitution_identity(g in connected_multigraph(4, 2), k in 3usize..=4) {
        let h = Gadget::hn(k).unwrap();
        prop_assume!(g.edge_count() * h.graph().edge_count() <= 20);
        let direct = rel_bruteforce(&edge_substitute(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(rel_substitution(&g, &h).unwrap(), direct);
    }
}

/// 500 random polynomials of degree at most 12 with planted rational roots,
/// some repeated, plus an irreducible quadratic.
#[test]
fn planted_roots_are_isolated() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0001);
    // denominators below 40 never hit these endpoints
    let (lo, hi) = (rat(-998, 997), rat(998, 997));
    for _ in 0..500 {
        let mut p = Polynomial::from_i64s(&[rng.gen_range(1..5), 0, rng.gen_range(1..5)]);
        let mut planted: Vec<Rational> = Vec::new();
        let mut deg = 2;
        while deg < 12 && (planted.is_empty() || rng.gen_bool(0.7)) {
            let den = rng.gen_range(1i64..40);
            let num = rng.gen_range(-2 * den..=2 * den);
            let mult = if rng.gen_bool(0.2) { 2 } else { 1 };
            if deg + mult > 12 {
                break;
            }
            let x = rat(num, den);
            let lin = Polynomial::from_coeffs(vec![-x.numer().clone(), x.denom().clone()]);
            p = &p * &lin.pow(mult as u32);
            deg += mult;
            planted.push(x);
        }
        let mut inside: Vec<Rational> = planted.into_iter().filter(|x| &lo < x && x < &hi).collect();
        inside.sort();
        inside.dedup();
        let ivs = isolate_roots(&p, &lo, &hi).unwrap();
        assert_eq!(ivs.len(), inside.len(), "{p}");
        for (iv, x) in ivs.iter().zip(&inside) {
            assert!(iv.contains(x), "{p}: {x} not in [{}, {}]", iv.lo, iv.hi);
            assert_eq!(count_roots(&p, &iv.lo, &iv.hi).unwrap(), 1);
        }
    }
}

/// Sturm counts of Rel(G) on (-1, 0) never undercount the sign changes of a
/// fine exact scan, for every connected simple graph on at most 5 vertices.
#[test]
fn sturm_counts_cover_sign_scan() {
    let scan: Vec<Rational> = (1..10_000).map(|i| rat(-i, 10_000)).collect();
    for g in enumerate_connected_simple(5).unwrap() {
        let p = rel_delcon(&g).unwrap();
        let count = count_roots(&p, &int(-1), &int(0)).unwrap();
        let mut changes = 0;
        let mut prev = p.sign_at(&scan[0]);
        for x in &scan[1..] {
            let s = p.sign_at(x);
            if s.is_zero() {
                continue;
            }
            if prev.opposes(s) {
                changes += 1;
            }
            prev = s;
        }
        assert!(changes <= count, "{g:?}: {changes} sign changes but {count} roots");
    }
}

#[test]
fn big_integer_coefficients_survive_json() {
    let big = num_traits::pow(BigInt::from(3), 200);
    let p = Polynomial::from_coeffs(vec![big.clone(), BigInt::zero(), -big]);
    let s = serde_json::to_string(&p).unwrap();
    assert_eq!(serde_json::from_str::<Polynomial>(&s).unwrap(), p);
}
