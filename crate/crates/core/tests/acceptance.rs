//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::binomial;

use liftcheck::census::{self, AbelianGroup, FiniteGroup};
use liftcheck::coefring::{binomial_valuation, padic_valuation, padic_valuation_big};
use liftcheck::filtration::{cyclic_closed_form, dihedral_closed_form, dimension_subgroup, jennings_product, jennings_series};
use liftcheck::groupalg::GroupAlgebra;
use liftcheck::modlinalg::HowellBuilder;
use liftcheck::obstruction::{verify_counterexample, HypothesisInstance};
use liftcheck::pcgroup::{builtin, Elem, PcGroup};
use liftcheck::{CoefRing, HowellModule};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn z4() -> CoefRing {
    CoefRing::zmod(4, 2).unwrap()
}

fn z4_dual() -> CoefRing {
    CoefRing::new(4, &[0, 0, 1], &[vec![2], vec![0, 1]]).unwrap()
}

fn f2() -> CoefRing {
    CoefRing::zmod(2, 0).unwrap()
}

fn group(name: &str) -> Arc<PcGroup> {
    Arc::new(builtin(name).unwrap().unwrap())
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

// A group-ring element over Z/4 as a sparse map, multiplied term by term.
type Naive = HashMap<Elem, u32>;

fn naive_mul(g: &PcGroup, a: &Naive, b: &Naive) -> Naive {
    let mut out = Naive::new();
    for (&x, &c) in a {
        for (&y, &d) in b {
            let e = out.entry(g.mul(x, y)).or_insert(0);
            *e = (*e + c * d) % 4;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn naive_minus_one(g: &PcGroup, x: Elem, scale: u32) -> Naive {
    let mut out = Naive::new();
    if x != g.one() {
        out.insert(x, scale % 4);
        out.insert(g.one(), (4 - scale % 4) % 4);
    }
    out.retain(|_, c| *c != 0);
    out
}

fn naive_add(a: &Naive, b: &Naive) -> Naive {
    let mut out = a.clone();
    for (&x, &c) in b {
        let e = out.entry(x).or_insert(0);
        *e = (*e + c) % 4;
    }
    out.retain(|_, c| *c != 0);
    out
}

// ---- 1 --------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut lib = Vec::new();
    for n in 1..=10u32 {
        for i in 1..1u64 << n {
            lib.push((n, i, binomial_valuation(2, n, i).map_err(|e| e.to_string())?));
        }
    }
    within(start, Duration::from_secs(1))?;
    for (n, i, carries) in lib {
        let closed = n - padic_valuation(2, i).unwrap();
        let exact = padic_valuation_big(2, &binomial(BigUint::from(1u64 << n), BigUint::from(i))).unwrap();
        ensure(carries == closed && carries == exact, || format!("n={n} i={i}: {carries} {closed} {exact}"))?;
    }
    Ok(())
}

// ---- 2 --------------------------------------------------------------------

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for name in ["C2^4", "D16", "G(4,3,2)", "H(4,3,2)"] {
        let g = group(name);
        let alg = GroupAlgebra::new(z4(), g.clone());
        for x in g.elements() {
            let mut naive = naive_minus_one(&g, x, 1);
            let mut lib = alg.minus_one(x);
            for n in 1..=4u32 {
                naive = naive_mul(&g, &naive, &naive);
                lib = &lib * &lib;
                let rhs = naive_add(&naive_minus_one(&g, g.pow(x, 1 << n), 1), &naive_minus_one(&g, g.pow(x, 1 << (n - 1)), 2));
                ensure(naive == rhs, || format!("{name}: identity fails at {} n={n}", g.format_elem(x)))?;
                let lib_map: Naive = lib.support().into_iter().map(|e| (e, lib.coefficient(e).coeffs()[0])).collect();
                ensure(lib_map == naive, || format!("{name}: library product differs at {} n={n}", g.format_elem(x)))?;
            }
        }
    }
    within(start, Duration::from_secs(10))
}

// ---- 3 --------------------------------------------------------------------

const C4_ROWS: [&str; 6] = [
    "S ⊕ SU ⊕ SU^2 ⊕ SU^3",
    "n ⊕ SU ⊕ SU^2 ⊕ SU^3",
    "n^2 ⊕ nU ⊕ SU^2 ⊕ SU^3",
    "n^3 ⊕ n^2U ⊕ nU^2 ⊕ SU^3",
    "n^4 ⊕ n^3U ⊕ (n^2 + 2S)U^2 ⊕ nU^3",
    "n^5 ⊕ n^4U ⊕ (n^3 + 2n)U^2 ⊕ (n^2 + 2S)U^3",
];

/// `Θ^k = Σ_{a+b=k} n^a U^b SG` for a cyclic group, spanned directly.
fn cyclic_theta_by_products(alg: &Arc<GroupAlgebra>, k: usize) -> HowellModule {
    let ring = alg.ring();
    let g = alg.group();
    let u = alg.minus_one(g.gen(0));
    let mut b = HowellBuilder::new(alg.modulus(), alg.flat_dim()).unwrap();
    for a in 0..=k {
        let ub = u.pow((k - a) as u64);
        for row in ring.ideal_power_module(a as i64).rows() {
            let s = liftcheck::RingElem(row.clone());
            for x in g.elements() {
                b.insert(ub.scale(&s).mul_group(x).flat().to_vec()).unwrap();
            }
        }
    }
    b.finish()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let rows: Vec<String> = (0..6).map(|k| cyclic_closed_form(2, k).simplified().to_string()).collect();
    for (k, (got, want)) in rows.iter().zip(C4_ROWS).enumerate() {
        ensure(got == want, || format!("C4 row Θ^{k}: {got} vs {want}"))?;
    }
    for ring in [z4(), z4_dual()] {
        for n in 1..=4u32 {
            let depth = (1usize << n) + 4;
            let alg = cyclic_closed_form(n, 0).algebra(&ring).unwrap();
            let theta = alg.theta_powers(depth).unwrap();
            for k in 0..=depth {
                let closed = cyclic_closed_form(n, k).materialize(&alg).unwrap();
                let level = theta.level(k).unwrap();
                ensure(&closed == level, || format!("{}: C_2^{n} k={k} closed form differs", ring.spec_string()))?;
                if n <= 3 {
                    let direct = cyclic_theta_by_products(&alg, k);
                    ensure(&direct == level, || format!("{}: C_2^{n} k={k} direct span differs", ring.spec_string()))?;
                }
            }
        }
    }
    within(start, Duration::from_secs(30))
}

// ---- 4 --------------------------------------------------------------------

fn criterion_4() -> Outcome {
    let start = Instant::now();
    for ring in [z4(), z4_dual()] {
        let alg = dihedral_closed_form(0).algebra(&ring).unwrap();
        let theta = alg.theta_powers(20).unwrap();
        for k in 0..=20 {
            let closed = dihedral_closed_form(k).materialize(&alg).unwrap();
            ensure(&closed == theta.level(k).unwrap(), || format!("{}: D16 k={k} differs", ring.spec_string()))?;
        }
        // multiplying by every basis element on both sides gives the same chain
        let mut m = HowellModule::full(alg.modulus(), alg.flat_dim()).unwrap();
        for k in 1..=10 {
            m = alg.filtration_step_all_elements(&m, true).unwrap();
            ensure(&m == theta.level(k).unwrap(), || format!("{}: D16 k={k} two-sided step differs", ring.spec_string()))?;
        }
        let w = alg.minus_one(alg.group().gen(2));
        let two_w2 = (&w * &w).scale_int(2);
        ensure(theta.contains(&two_w2, 8).unwrap(), || "2W² ∉ Θ^8".into())?;
        ensure(!theta.contains(&w.scale_int(2), 4).unwrap(), || "2W ∈ Θ^4".into())?;
    }
    within(start, Duration::from_secs(60))
}

// ---- 5 --------------------------------------------------------------------

fn criterion_5() -> Outcome {
    let start = Instant::now();
    for name in ["C2^2", "C2^3", "D16", "G(4,3,2)", "H(4,3,2)"] {
        let g = group(name);
        let delta = GroupAlgebra::new(f2(), g.clone()).delta_powers_to_zero(4096).unwrap();
        let top = delta.nilpotency().ok_or_else(|| format!("{name}: Δ did not vanish"))?;
        let mut graded = Vec::new();
        let mut prev = g.order();
        for n in 1..=top + 1 {
            let by_membership = dimension_subgroup(&delta, n).unwrap();
            let by_product = jennings_product(&g, n).unwrap();
            ensure(by_membership == by_product, || format!("{name}: D_{n} differs"))?;
            if n > 1 {
                graded.push((prev / by_product.order()).trailing_zeros());
            }
            prev = by_product.order();
        }
        ensure(prev == 1, || format!("{name}: series does not reach 1"))?;
        let sum: u32 = graded.iter().sum();
        ensure(sum == g.order().trailing_zeros(), || format!("{name}: graded dims sum to {sum}"))?;
        let lib = jennings_series(&g).unwrap();
        let lib_sum: u32 = lib.graded_log_dims.iter().sum();
        ensure(lib_sum == sum, || format!("{name}: library graded dims sum to {lib_sum}"))?;
    }
    within(start, Duration::from_secs(120))
}

// ---- 6 --------------------------------------------------------------------

/// `log_2 |G : G²G′|`, with `G²G′` generated by squares and commutators.
fn generator_rank(g: &PcGroup) -> u32 {
    let mut gens: Vec<Elem> = g.elements().map(|x| g.mul(x, x)).collect();
    for x in g.gens() {
        for y in g.gens() {
            gens.push(g.commutator(x, y));
        }
    }
    let phi = g.normal_closure(&gens);
    (g.order() / phi.order()).trailing_zeros()
}

fn criterion_6() -> Outcome {
    for ring in [z4(), z4_dual()] {
        let nq = ring.ideal_power_module(1).quotient_size(&ring.ideal_power_module(2)).unwrap();
        for name in ["C2^2", "C2^3", "D16", "G(4,3,2)", "H(4,3,2)"] {
            let g = group(name);
            let d = generator_rank(&g);
            let theta = GroupAlgebra::new(ring.clone(), g).theta_powers(2).unwrap();
            let q = theta.quotient_size(1).unwrap();
            let want = &nq * (BigUint::from(1u32) << d);
            ensure(q == want, || format!("{} {name}: |Θ/Θ²| = {q}, want {want}", ring.spec_string()))?;
        }
    }
    let inst = HypothesisInstance::build(4, 3, 2, z4()).unwrap();
    let q = inst.theta.quotient_size(1).unwrap();
    ensure(q == BigUint::from(8u32), || format!("SH(4,3,2): |Θ/Θ²| = {q}, F-dimension is not 3"))
}

// ---- 7 --------------------------------------------------------------------

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let report = verify_counterexample(4, 3, 2, z4()).map_err(|e| e.to_string())?;
    for id in [
        "lemma:x2y2",
        "lemma:ThetaModTheta2",
        "lemma:commBA",
        "lemma:square",
        "lemma:commCACB",
        "lemma:modZSH",
        "lemma:fourth",
        "lemma:power",
        "lemma:A2m+1",
        "lemma:2C",
        "reduction:cyclic",
        "reduction:dihedral",
        "finalSystem",
        "crossCheck",
    ] {
        let item = report.item(id).ok_or_else(|| format!("missing {id}"))?;
        ensure(item.passed(), || format!("{id} failed: {}", item.witnesses))?;
    }
    for id in ["lemma:square", "lemma:fourth", "lemma:power"] {
        let n = report.item(id).unwrap().witnesses["liftPairsChecked"].as_u64();
        // 4 pairs over F2, each with 2 × 2 lifts
        ensure(n == Some(16), || format!("{id} checked {n:?} lift pairs"))?;
    }
    let sols = &report.item("finalSystem").unwrap().witnesses["solutions"];
    ensure(sols == &serde_json::json!([["0", "0"]]), || format!("final system solutions {sols}"))?;
    ensure(report.verdict == "CERTIFIED", || report.verdict.clone())?;
    within(start, Duration::from_secs(600))
}

// ---- 8 --------------------------------------------------------------------

fn elem_order<G: FiniteGroup>(g: &G, x: usize) -> u64 {
    let mut y = x;
    let mut k = 1;
    while y != 0 {
        y = g.mul(y, x);
        k += 1;
    }
    k
}

/// In an abelian group each cyclic subgroup of order `d` has `φ(d)` generators.
fn abelian_cyclic_count<G: FiniteGroup>(g: &G) -> u64 {
    let mut by_order: HashMap<u64, u64> = HashMap::new();
    for x in 0..g.order() {
        *by_order.entry(elem_order(g, x)).or_insert(0) += 1;
    }
    by_order.into_iter().map(|(d, c)| c / census::euler_phi(d)).sum()
}

fn toth_oracle(p: u128, n: u32, m: u32, l: u32) -> u128 {
    (n - m) as u128 * p.pow(m + l)
        + (p.pow(2 * l + 1) + p.pow(2 * l)) * (p.pow(m - l) - 1) / (p - 1)
        + (p * p + p + 1) * (p.pow(2 * l) - 1) / (p * p - 1)
        + 1
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    for p in [2u64, 3] {
        let mut e = 0;
        while p.pow(e + 1) <= 1 << 12 {
            e += 1;
        }
        for n in 0..=e {
            for m in 0..=n {
                for l in 0..=m {
                    if n + m + l > e {
                        continue;
                    }
                    let grp = AbelianGroup::p_group(p, &[n, m, l]).unwrap();
                    let brute = abelian_cyclic_count(&grp) as u128;
                    let lib = census::toth_closed_form(p, n, m, l).unwrap();
                    let oracle = toth_oracle(p as u128, n, m, l);
                    ensure(brute == lib && lib == oracle, || format!("p={p} ({n},{m},{l}): {brute} {lib} {oracle}"))?;
                }
            }
        }
    }
    for ((n, m, l), want) in [((4, 3, 2), 4), ((5, 3, 2), 8)] {
        let d = census::cs_difference(n, m, l).map_err(|e| e.to_string())?;
        ensure(d.brute_force == want && d.formula == want, || format!("({n},{m},{l}): {} vs {want}", d.brute_force))?;
    }
    within(start, Duration::from_secs(300))
}

// ---- 9 --------------------------------------------------------------------

/// Class number by counting commuting pairs.
fn class_number(g: &PcGroup) -> usize {
    let els: Vec<Elem> = g.elements().collect();
    let commuting: usize = els.iter().map(|&x| els.iter().filter(|&&y| g.mul(x, y) == g.mul(y, x)).count()).sum();
    commuting / g.order()
}

fn criterion_9() -> Outcome {
    let c = census::compare(4, 3, 2).map_err(|e| e.to_string())?;
    let (g, h) = census::family_pair(4, 3, 2).unwrap();
    for (res, grp) in [(&c.g, &g), (&h_result(&c), &h)] {
        let k = class_number(grp);
        ensure(res.complex_components == 224 && k == 224, || format!("{}: {} / {k} classes", res.group, res.complex_components))?;
        let d = res.degree_profile.as_ref().ok_or("no degree profile")?;
        ensure(d.degree_one == 128 && d.degree_two == 96, || format!("{}: profile {} + {}", res.group, d.degree_one, d.degree_two))?;
        ensure(d.degree_one + d.degree_two == k && d.degree_one + 4 * d.degree_two == grp.order(), || "profile inconsistent".into())?;
    }
    ensure(c.complex_iso, || "complex counts differ".into())?;
    ensure(!c.rational_iso && c.rational_difference == 4, || format!("rational difference {}", c.rational_difference))
}

fn h_result(c: &census::Comparison) -> census::CensusResult {
    c.h.clone()
}

// ---- 10 -------------------------------------------------------------------

fn closure(g: &PcGroup, gens: &[Elem]) -> BTreeSet<Elem> {
    let mut set: BTreeSet<Elem> = [g.one()].into();
    let mut frontier = vec![g.one()];
    while let Some(x) = frontier.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set
}

fn criterion_10() -> Outcome {
    let (g, h) = census::family_pair(4, 3, 2).unwrap();
    for grp in [&g, &h] {
        let els: Vec<Elem> = grp.elements().collect();
        let comms: Vec<Elem> = els.iter().flat_map(|&x| els.iter().map(move |&y| (x, y))).map(|(x, y)| grp.commutator(x, y)).collect();
        let derived = closure(grp, &comms);
        let commutes = |x: Elem, y: Elem| grp.mul(x, y) == grp.mul(y, x);
        let center: BTreeSet<Elem> = els.iter().copied().filter(|&x| els.iter().all(|&y| commutes(x, y))).collect();
        let cent: Vec<Elem> = els.iter().copied().filter(|&x| derived.iter().all(|&d| commutes(x, d))).collect();
        let omega_gens: Vec<Elem> = els.iter().copied().filter(|&x| derived.contains(&grp.mul(x, x))).collect();
        let omega = closure(grp, &omega_gens);
        let mut seen = BTreeSet::new();
        let mut checked = 0;
        for &x in &cent {
            let k = closure(grp, &[x]);
            if !seen.insert(k.clone()) {
                continue;
            }
            checked += 1;
            let normal = els.iter().all(|&y| k.contains(&grp.conjugate(x, y)));
            let rhs = k.is_subset(&center) || k.is_subset(&omega);
            ensure(normal == rhs, || format!("{}: K = <{}>", grp.name(), grp.format_elem(x)))?;
        }
        let lib = census::normality_characterization(grp).map_err(|e| e.to_string())?;
        ensure(lib.holds() && lib.checked == checked, || format!("{}: library checked {} of {checked}", grp.name(), lib.checked))?;
    }
    Ok(())
}

// ---- 11 -------------------------------------------------------------------

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let profile = |name: &str| {
        let g = group(name);
        let jd = jennings_series(&g).unwrap().graded_log_dims;
        let delta = GroupAlgebra::new(f2(), g).delta_powers_to_zero(4096).unwrap();
        let top = delta.nilpotency().unwrap();
        let dims: Vec<u32> = (0..top).map(|k| delta.quotient_log(k, 2).unwrap()).collect();
        (jd, dims)
    };
    let (jg, dg) = profile("G(4,3,2)");
    let (jh, dh) = profile("H(4,3,2)");
    ensure(jg == jh, || format!("Jennings {jg:?} vs {jh:?}"))?;
    ensure(dg == dh, || format!("Δ dims {dg:?} vs {dh:?}"))?;
    // the associated graded algebra has Poincaré polynomial Π (1 + t^i)^{d_i} over F2
    let mut poincare = vec![1u32];
    for (i, &d) in jg.iter().enumerate() {
        for _ in 0..d {
            let mut next = vec![0; poincare.len() + i + 1];
            for (j, &c) in poincare.iter().enumerate() {
                next[j] += c;
                next[j + i + 1] += c;
            }
            poincare = next;
        }
    }
    ensure(dg == poincare, || format!("Δ dims {dg:?} vs Poincaré polynomial {poincare:?}"))?;
    within(start, Duration::from_secs(120))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Kummer valuation for p = 2", criterion_1),
        ("characteristic-4 power identity", criterion_2),
        ("cyclic filtration closed form", criterion_3),
        ("dihedral filtration closed form", criterion_4),
        ("Jennings series", criterion_5),
        ("relative augmentation quotient", criterion_6),
        ("obstruction certificate", criterion_7),
        ("cyclic subgroup census", criterion_8),
        ("Wedderburn comparison", criterion_9),
        ("normality characterization", criterion_10),
        ("characteristic-2 consistency", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({t:.2} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({t:.2} s): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
