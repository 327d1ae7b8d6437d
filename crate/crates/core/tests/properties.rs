use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::binomial;
use proptest::prelude::*;

use liftcheck::coefring::{binomial_valuation, padic_valuation_big};
use liftcheck::groupalg::GroupAlgebra;
use liftcheck::parse::{parse_presentation, parse_ring_spec, PresentationText};
use liftcheck::pcgroup::{builtin, cyclic2, family_g, family_h, Elem, PcGroup};
use liftcheck::{CoefRing, HowellModule, RingElem};

fn rings() -> Vec<CoefRing> {
    vec![
        CoefRing::zmod(4, 2).unwrap(),
        CoefRing::zmod(8, 2).unwrap(),
        CoefRing::new(4, &[0, 0, 1], &[vec![2], vec![0, 1]]).unwrap(),
        CoefRing::new(2, &[0, 0, 0, 1], &[vec![0, 1]]).unwrap(),
        CoefRing::new(4, &[1, 1, 1], &[vec![2]]).unwrap(),
    ]
}

fn ring_elem(ring: &CoefRing, seed: &[u32]) -> RingElem {
    ring.elem(seed.iter().take(ring.degree()).map(|c| c % ring.modulus()).collect()).unwrap()
}

/// Every `Z/m`-combination of `rows`, by closure under addition of multiples.
fn span_by_enumeration(m: u32, dim: usize, rows: &[Vec<u32>]) -> BTreeSet<Vec<u32>> {
    let mut set: BTreeSet<Vec<u32>> = [vec![0; dim]].into();
    for r in rows {
        let mut next = BTreeSet::new();
        for v in &set {
            for c in 0..m {
                next.insert(v.iter().zip(r).map(|(a, b)| (a + c * b) % m).collect());
            }
        }
        set = next;
    }
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn howell_form_spans_exactly(
        m in prop::sample::select(vec![2u32, 4, 6, 8, 9, 12]),
        rows in prop::collection::vec(prop::collection::vec(0u32..12, 3), 0..5),
    ) {
        let rows: Vec<Vec<u32>> = rows.into_iter().map(|r| r.into_iter().map(|c| c % m).collect()).collect();
        let module = HowellModule::from_rows(m, 3, rows.clone()).unwrap();
        let span = span_by_enumeration(m, 3, &rows);
        let listed: BTreeSet<Vec<u32>> = module.elements().into_iter().collect();
        prop_assert_eq!(&listed, &span);
        prop_assert_eq!(module.size(), BigUint::from(span.len()));
        for v in span_by_enumeration(m, 3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]) {
            prop_assert_eq!(module.contains(&v).unwrap(), span.contains(&v));
        }
    }

    #[test]
    fn howell_form_is_canonical(
        rows in prop::collection::vec(prop::collection::vec(0u32..8, 4), 1..5),
        mults in prop::collection::vec(0u32..8, 5),
    ) {
        let a = HowellModule::from_rows(8, 4, rows.clone()).unwrap();
        let mut shuffled = rows.clone();
        shuffled.reverse();
        let combo: Vec<u32> = (0..4).map(|j| rows.iter().zip(&mults).map(|(r, c)| r[j] * c).sum::<u32>() % 8).collect();
        shuffled.push(combo);
        let b = HowellModule::from_rows(8, 4, shuffled).unwrap();
        prop_assert!(a == b);
        prop_assert_eq!(a.rows(), b.rows());
    }

    #[test]
    fn sum_and_intersection_match_sets(
        r1 in prop::collection::vec(prop::collection::vec(0u32..4, 3), 0..3),
        r2 in prop::collection::vec(prop::collection::vec(0u32..4, 3), 0..3),
    ) {
        let a = HowellModule::from_rows(4, 3, r1.clone()).unwrap();
        let b = HowellModule::from_rows(4, 3, r2.clone()).unwrap();
        let sa = span_by_enumeration(4, 3, &r1);
        let sb = span_by_enumeration(4, 3, &r2);
        let both: Vec<Vec<u32>> = r1.iter().chain(&r2).cloned().collect();
        let sum: BTreeSet<_> = a.sum(&b).unwrap().elements().into_iter().collect();
        prop_assert_eq!(sum, span_by_enumeration(4, 3, &both));
        let meet: BTreeSet<_> = a.intersect(&b).unwrap().elements().into_iter().collect();
        prop_assert_eq!(meet, sa.intersection(&sb).cloned().collect::<BTreeSet<_>>());
    }

    #[test]
    fn ring_axioms(idx in 0usize..5, a in prop::collection::vec(0u32..8, 3), b in prop::collection::vec(0u32..8, 3), c in prop::collection::vec(0u32..8, 3)) {
        let ring = &rings()[idx];
        let (a, b, c) = (ring_elem(ring, &a), ring_elem(ring, &b), ring_elem(ring, &c));
        prop_assert_eq!(ring.mul(&ring.mul(&a, &b), &c), ring.mul(&a, &ring.mul(&b, &c)));
        prop_assert_eq!(ring.mul(&a, &b), ring.mul(&b, &a));
        prop_assert_eq!(ring.mul(&a, &ring.add(&b, &c)), ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c)));
        prop_assert_eq!(ring.add(&a, &ring.neg(&a)), ring.zero());
        prop_assert_eq!(ring.mul(&a, &ring.one()), a.clone());
        if let Some(inv) = ring.inverse(&a) {
            prop_assert_eq!(ring.mul(&a, &inv), ring.one());
        }
        // in a local ring the non-units are exactly the maximal ideal
        if ring.flags().is_maximal && ring.flags().is_local {
            prop_assert_eq!(ring.is_unit(&a), !ring.in_ideal(&a));
        }
    }

    #[test]
    fn kummer_matches_exact_binomials(p in prop::sample::select(vec![2u64, 3, 5, 7]), n in 1u32..4, i in 1u64..343) {
        let top = p.pow(n);
        prop_assume!(i < top);
        let exact = padic_valuation_big(p, &binomial(BigUint::from(top), BigUint::from(i))).unwrap();
        prop_assert_eq!(binomial_valuation(p, n, i).unwrap(), exact);
    }

    #[test]
    fn group_algebra_laws(
        name in prop::sample::select(vec!["D16", "C2^3", "C2^4", "G(4,3,2)"]),
        seed in prop::collection::vec(0u32..4, 3 * 64),
    ) {
        let g = Arc::new(builtin(name).unwrap().unwrap());
        let alg = GroupAlgebra::new(CoefRing::zmod(4, 2).unwrap(), g.clone());
        let d = alg.flat_dim();
        let pick = |k: usize| alg.from_flat((0..d).map(|j| seed[(k * d + j) % seed.len()]).collect()).unwrap();
        let (x, y, z) = (pick(0), pick(1), pick(2));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&x * &alg.one(), x.clone());
    }

    #[test]
    fn group_laws(name in prop::sample::select(vec!["D16", "C2^5", "G(4,3,2)", "H(4,3,2)"]), a in 0u32..512, b in 0u32..512, c in 0u32..512) {
        let g = builtin(name).unwrap().unwrap();
        let o = g.order() as u32;
        let (a, b, c) = (Elem(a % o), Elem(b % o), Elem(c % o));
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.inv(a)), g.one());
        prop_assert_eq!(g.mul(g.one(), a), a);
        prop_assert_eq!(g.pow(a, g.elem_order(a) as i64), g.one());
    }

    #[test]
    fn family_presentations_round_trip(n in 4u32..8, m in 3u32..7, l in 2u32..6) {
        prop_assume!(n > m && m > l);
        for pres in [family_g(n, m, l), family_h(n, m, l)].into_iter().flatten() {
            let text = PresentationText(&pres).to_string();
            prop_assert_eq!(parse_presentation(&text).unwrap(), pres);
        }
    }
}

#[test]
fn builtin_presentations_round_trip() {
    for name in ["C2^1", "C2^2", "C2^6", "D16", "G(5,3,2)", "G(4,3,2)", "H(4,3,2)", "H(5,4,2)"] {
        let g = builtin(name).unwrap().unwrap();
        let text = PresentationText(g.presentation()).to_string();
        assert_eq!(&parse_presentation(&text).unwrap(), g.presentation(), "{name}");
    }
}

#[test]
fn ring_specs_round_trip() {
    for ring in rings() {
        let again = parse_ring_spec(&ring.spec_string()).unwrap();
        assert!(again == ring, "{}", ring.spec_string());
    }
}

/// `Θ^k` as a set: additive closure of products of `Θ^{k−1}` and `Θ`.
fn theta_sets(g: &Arc<PcGroup>, depth: usize) -> Vec<BTreeSet<Vec<u32>>> {
    let alg = GroupAlgebra::new(CoefRing::zmod(4, 2).unwrap(), g.clone());
    let d = alg.flat_dim();
    let all = span_by_enumeration(4, d, &(0..d).map(|i| (0..d).map(|j| (i == j) as u32).collect()).collect::<Vec<_>>());
    // Θ = 2·SG + Δ: elements whose augmentation is even
    let theta: BTreeSet<Vec<u32>> = all.iter().filter(|v| v.iter().sum::<u32>() % 2 == 0).cloned().collect();
    let mut out = vec![all, theta.clone()];
    for _ in 2..=depth {
        let prev = out.last().unwrap();
        let mut gens = Vec::new();
        for a in prev {
            for b in &theta {
                let x = alg.from_flat(a.clone()).unwrap();
                let y = alg.from_flat(b.clone()).unwrap();
                gens.push((&x * &y).flat().to_vec());
            }
        }
        let basis = HowellModule::from_rows(4, d, gens.clone()).unwrap();
        let closed: BTreeSet<Vec<u32>> = basis.elements().into_iter().collect();
        assert!(gens.iter().all(|v| closed.contains(v)));
        out.push(span_by_enumeration(4, d, basis.rows()));
    }
    out
}

#[test]
fn theta_powers_match_brute_force_sets() {
    for n in 1..=2 {
        let g = Arc::new(PcGroup::new(format!("C{}", 1 << n), cyclic2(n).unwrap()).unwrap());
        let depth = 2 * (1 << n) + 1;
        let sets = theta_sets(&g, depth);
        let theta = GroupAlgebra::new(CoefRing::zmod(4, 2).unwrap(), g).theta_powers(depth).unwrap();
        for (k, set) in sets.iter().enumerate() {
            let got: BTreeSet<Vec<u32>> = theta.level(k).unwrap().elements().into_iter().collect();
            assert_eq!(&got, set, "C_2^{n} k={k}");
        }
    }
}
