//! The full battery of checks, grouped into suites and tiers.

use std::sync::Arc;

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::census;
use crate::coefring::{binomial_valuation, binomial_valuation_closed_form, padic_valuation, padic_valuation_big, CoefRing};
use crate::filtration::{
    cyclic_closed_form, dihedral_closed_form, dimension_subgroup, jennings_series, rel_aug_quotient,
};
use crate::groupalg::GroupAlgebra;
use crate::obstruction::HypothesisInstance;
use crate::pcgroup::{builtin, PcGroup};
use crate::report::{ReportItem, VerificationReport};

pub type SuiteError = Box<dyn std::error::Error + Send + Sync>;
type Res<T> = Result<T, SuiteError>;
type Check = Res<(bool, Value)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    Default,
    Deep,
}

/// Selects items by exact id, by the part after the last `/`, or by prefix
/// when the pattern ends in `*`.
#[derive(Clone, Debug, Default)]
pub struct Filter(Option<String>);

impl Filter {
    pub fn all() -> Self {
        Filter(None)
    }

    pub fn only(pattern: impl Into<String>) -> Self {
        Filter(Some(pattern.into()))
    }

    pub fn matches(&self, id: &str) -> bool {
        let Some(p) = &self.0 else { return true };
        if let Some(prefix) = p.strip_suffix('*') {
            return id.starts_with(prefix);
        }
        id == p || id.rsplit('/').next() == Some(p.as_str())
    }
}

struct Runner<'a> {
    filter: &'a Filter,
    items: Vec<ReportItem>,
}

impl Runner<'_> {
    fn run(&mut self, id: &str, statement: &str, f: impl FnOnce() -> Check) -> Res<()> {
        if self.filter.matches(id) {
            self.items.push(ReportItem::timed(id, statement, f)?);
        }
        Ok(())
    }
}

pub fn z4() -> CoefRing {
    CoefRing::zmod(4, 2).expect("Z/4")
}

/// `Z/4[t]/(t²)` with `n = (2, t)`.
pub fn z4_dual() -> CoefRing {
    CoefRing::new(4, &[0, 0, 1], &[vec![2], vec![0, 1]]).expect("Z/4[t]/(t^2)")
}

pub fn f2() -> CoefRing {
    CoefRing::zmod(2, 0).expect("F2")
}

fn group(name: &str) -> Res<Arc<PcGroup>> {
    Ok(Arc::new(builtin(name).ok_or_else(|| format!("unknown group {name}"))??))
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

// ---- coefficient rings ----------------------------------------------------

pub fn kummer_p2(max_n: u32) -> Check {
    let mut bad = Vec::new();
    let mut checked = 0u64;
    for n in 1..=max_n {
        let top = 1u64 << n;
        for i in 1..top {
            let carries = binomial_valuation(2, n, i)?;
            let closed = n - padic_valuation(2, i)?;
            let exact = padic_valuation_big(2, &binomial(top, i))?;
            checked += 1;
            if carries != closed || carries != exact {
                bad.push(json!([n, i, carries, closed, exact]));
            }
        }
    }
    Ok((bad.is_empty(), json!({"checked": checked, "failures": bad})))
}

/// Carry counts against exact valuations for odd `p`, recording where the
/// `(p − 1)(n − ν(i))` form disagrees.
pub fn kummer_odd() -> Check {
    let mut carry_ok = true;
    let mut mismatches = Vec::new();
    for (p, max_n) in [(3u64, 4u32), (5, 3)] {
        for n in 1..=max_n {
            let top = p.pow(n);
            for i in 1..top {
                let carries = binomial_valuation(p, n, i)?;
                let exact = padic_valuation_big(p, &binomial(top, i))?;
                carry_ok &= carries == exact;
                let closed = binomial_valuation_closed_form(p, n, i)?;
                if closed != exact && mismatches.len() < 12 {
                    mismatches.push(json!({"p": p, "n": n, "i": i, "exact": exact, "closedForm": closed}));
                }
            }
        }
    }
    let witness = json!({
        "p": 3, "n": 2, "i": 1,
        "exact": padic_valuation_big(3, &binomial(9, 1))?,
        "closedForm": binomial_valuation_closed_form(3, 2, 1)?,
    });
    Ok((carry_ok, json!({"carryCountExact": carry_ok, "closedFormDiscrepancy": witness, "mismatches": mismatches})))
}

/// `(g−1)^{2^n} = (g^{2^n}−1) + 2(g^{2^{n−1}}−1)` for every element over `Z/4`.
pub fn power_identity(names: &[&str], max_n: u32) -> Check {
    let mut rows = Vec::new();
    let mut ok = true;
    for &name in names {
        let g = group(name)?;
        let alg = GroupAlgebra::new(z4(), g.clone());
        let mut fails = 0;
        for x in g.elements() {
            let base = alg.minus_one(x);
            let mut p = base.clone();
            for n in 1..=max_n {
                p = &p * &p;
                let rhs = &alg.minus_one(g.pow(x, 1 << n)) + &alg.minus_one(g.pow(x, 1 << (n - 1))).scale_int(2);
                if p != rhs {
                    fails += 1;
                }
            }
        }
        ok &= fails == 0;
        rows.push(json!({"group": name, "elements": g.order(), "failures": fails}));
    }
    Ok((ok, json!({"groups": rows, "maxN": max_n})))
}

// ---- filtrations ----------------------------------------------------------

pub const C4_TABLE: [&str; 6] = [
    "S ⊕ SU ⊕ SU^2 ⊕ SU^3",
    "n ⊕ SU ⊕ SU^2 ⊕ SU^3",
    "n^2 ⊕ nU ⊕ SU^2 ⊕ SU^3",
    "n^3 ⊕ n^2U ⊕ nU^2 ⊕ SU^3",
    "n^4 ⊕ n^3U ⊕ (n^2 + 2S)U^2 ⊕ nU^3",
    "n^5 ⊕ n^4U ⊕ (n^3 + 2n)U^2 ⊕ (n^2 + 2S)U^3",
];

pub fn c4_table() -> Check {
    let rows: Vec<String> = (0..6).map(|k| cyclic_closed_form(2, k).simplified().to_string()).collect();
    let ok = rows.iter().zip(C4_TABLE).all(|(a, b)| a == b);
    Ok((ok, json!({"rows": rows})))
}

pub fn cyclic_filtrations(max_n: u32, rings: &[CoefRing]) -> Check {
    let mut rows = Vec::new();
    let mut ok = true;
    for ring in rings {
        for n in 1..=max_n {
            let depth = (1usize << n) + 4;
            let alg = cyclic_closed_form(n, 0).algebra(ring)?;
            let f = alg.theta_powers(depth)?;
            let mut bad = Vec::new();
            for k in 0..=depth {
                if &cyclic_closed_form(n, k).materialize(&alg)? != f.level(k)? {
                    bad.push(k);
                }
            }
            ok &= bad.is_empty();
            rows.push(json!({"ring": ring.spec_string(), "n": n, "depth": depth, "mismatchedK": bad}));
        }
    }
    Ok((ok, json!({"cases": rows})))
}

pub fn dihedral_filtrations(depth: usize, rings: &[CoefRing]) -> Check {
    let mut rows = Vec::new();
    let mut ok = true;
    for ring in rings {
        let alg = dihedral_closed_form(0).algebra(ring)?;
        let f = alg.theta_powers(depth)?;
        let mut bad = Vec::new();
        for k in 0..=depth {
            if &dihedral_closed_form(k).materialize(&alg)? != f.level(k)? {
                bad.push(k);
            }
        }
        let w = alg.minus_one(alg.group().gen(2));
        let two_w2_in_8 = f.contains(&(&w * &w).scale_int(2), 8)?;
        let two_w_in_4 = f.contains(&w.scale_int(2), 4)?;
        ok &= bad.is_empty() && two_w2_in_8 && !two_w_in_4;
        rows.push(json!({
            "ring": ring.spec_string(),
            "mismatchedK": bad,
            "twoW2InTheta8": two_w2_in_8,
            "twoWInTheta4": two_w_in_4,
        }));
    }
    Ok((ok, json!({"depth": depth, "cases": rows})))
}

/// Jennings terms by the product formula against `{g | g−1 ∈ Δ^n}` over `F₂`.
pub fn jennings(names: &[&str]) -> Check {
    let mut rows = Vec::new();
    let mut ok = true;
    for &name in names {
        let g = group(name)?;
        let j = jennings_series(&g)?;
        let alg = GroupAlgebra::new(f2(), g.clone());
        let delta = alg.delta_powers_to_zero(1 << 12)?;
        let mut agree = true;
        for (i, d) in j.terms.iter().enumerate() {
            agree &= &dimension_subgroup(&delta, i + 1)? == d;
        }
        let log_order = g.order().trailing_zeros();
        let sum: u32 = j.graded_log_dims.iter().sum();
        ok &= agree && sum == log_order;
        rows.push(json!({
            "group": name,
            "termOrders": j.terms.iter().map(|d| d.order()).collect::<Vec<_>>(),
            "gradedLogDims": j.graded_log_dims,
            "membershipAgrees": agree,
        }));
    }
    Ok((ok, json!({"groups": rows})))
}

pub fn rel_aug(names: &[&str], rings: &[CoefRing]) -> Check {
    let mut rows = Vec::new();
    let mut ok = true;
    for ring in rings {
        for &name in names {
            let g = group(name)?;
            let r = rel_aug_quotient(&GroupAlgebra::new(ring.clone(), g))?;
            // |Δ(FG)/Δ(FG)²| = |F|^{d(G)}
            let fsize = BigUint::from(ring.residue_field()?.order());
            let expect_delta = fsize.pow(r.generator_rank);
            ok &= r.holds && r.delta_quotient_size == expect_delta.to_string();
            rows.push(json!({"ring": ring.spec_string(), "group": name, "result": r}));
        }
    }
    let h = group("H(4,3,2)")?;
    let rh = rel_aug_quotient(&GroupAlgebra::new(z4(), h))?;
    ok &= rh.f_dimension == Some(3);
    Ok((ok, json!({"cases": rows, "fDimensionSH432": rh.f_dimension})))
}

/// Jennings graded dimensions and `dim Δ^k/Δ^{k+1}` over `F₂` for two groups.
pub fn char2_consistency(a: &str, b: &str) -> Check {
    let profile = |name: &str| -> Res<(Vec<u32>, Vec<u32>)> {
        let g = group(name)?;
        let j = jennings_series(&g)?.graded_log_dims;
        let delta = GroupAlgebra::new(f2(), g).delta_powers_to_zero(1 << 12)?;
        let top = delta.nilpotency().ok_or("Δ did not vanish")?;
        let dims = (0..top).map(|k| delta.quotient_log(k, 2)).collect::<Result<Vec<_>, _>>()?;
        Ok((j, dims))
    };
    let (ja, da) = profile(a)?;
    let (jb, db) = profile(b)?;
    let ok = ja == jb && da == db;
    Ok((ok, json!({a: {"jennings": ja, "deltaDims": da}, b: {"jennings": jb, "deltaDims": db}})))
}

// ---- census ---------------------------------------------------------------

pub fn toth(p: u64, bound: u64) -> Check {
    let counts = census::abelian_counts(p, bound)?;
    let sweep = census::toth_sweep(p, &counts)?;
    let steps = census::toth_steps(p, &counts)?;
    let ok = sweep["holds"] == json!(true) && steps["holds"] == json!(true);
    Ok((ok, json!({"sweep": sweep, "steps": steps})))
}

pub fn cs_difference(n: u32, m: u32, l: u32) -> Check {
    let d = census::cs_difference(n, m, l)?;
    Ok((d.holds, serde_json::to_value(&d)?))
}

pub fn wedderburn(n: u32, m: u32, l: u32) -> Check {
    let c = census::compare(n, m, l)?;
    let ok = c.complex_iso
        && !c.rational_iso
        && c.rational_difference == c.formula_difference
        && c.g.consistent()
        && c.h.consistent();
    Ok((ok, c.to_json()))
}

pub fn normality(n: u32, m: u32, l: u32) -> Check {
    let (g, h) = census::family_pair(n, m, l)?;
    let rg = census::normality_characterization(&g)?;
    let rh = census::normality_characterization(&h)?;
    Ok((rg.holds() && rh.holds(), json!({"G": rg, "H": rh})))
}

// ---- assembly -------------------------------------------------------------

fn obstruction_items(
    items: &mut Vec<ReportItem>,
    filter: &Filter,
    (n, m, l): (u32, u32, u32),
    ring: CoefRing,
    prefix: Option<String>,
) -> Res<()> {
    let full = |id: &str| match &prefix {
        Some(p) => format!("{p}/{id}"),
        None => id.to_string(),
    };
    if !HypothesisInstance::ITEM_IDS.iter().any(|id| filter.matches(&full(id))) {
        return Ok(());
    }
    let inst = HypothesisInstance::build(n, m, l, ring)?;
    for mut item in inst.items(&|id| filter.matches(&full(id)))? {
        item.id = full(&item.id);
        items.push(item);
    }
    Ok(())
}

pub fn run(tier: Tier, filter: &Filter) -> Res<VerificationReport> {
    let mut r = Runner { filter, items: Vec::new() };
    let both = [z4(), z4_dual()];
    r.run("coefring:kummer2", "ν₂ C(2^n, i) = n − ν₂(i) by carries and exactly, n ≤ 10", || kummer_p2(10))?;
    r.run("coefring:kummerOdd", "carry counts equal exact ν_p for p = 3, 5; the (p−1)(n−ν(i)) form is recorded where it differs", kummer_odd)?;
    r.run("coefring:powerIdentity", "(g−1)^{2^n} = (g^{2^n}−1) + 2(g^{2^{n−1}}−1) over Z/4 for n ≤ 4", || {
        power_identity(&["C2^4", "D16", "G(4,3,2)", "H(4,3,2)"], 4)
    })?;
    r.run("filtration:c4Table", "closed-form Θ^k for C4, k ≤ 5", c4_table)?;
    r.run("filtration:cyclic", "closed form equals computed Θ^k for C_{2^n}, n ≤ 4, k ≤ 2^n + 4", || {
        cyclic_filtrations(4, &both)
    })?;
    r.run("filtration:dihedral", "closed form equals computed Θ^k for D16, k ≤ 20; 2W² ∈ Θ^8, 2W ∉ Θ^4", || {
        dihedral_filtrations(20, &both)
    })?;
    r.run("filtration:jennings", "product-formula dimension subgroups equal membership ones over F2", || {
        jennings(&["C2^2", "C2^3", "D16", "G(4,3,2)", "H(4,3,2)"])
    })?;
    r.run("filtration:relAug", "|Θ/Θ²| = |n/n²| · |F|^{d(G)}", || rel_aug(&["C2^2", "D16", "G(4,3,2)", "H(4,3,2)"], &both))?;
    r.run("filtration:char2", "Jennings and Δ-power dimensions over F2 agree for G(4,3,2) and H(4,3,2)", || {
        char2_consistency("G(4,3,2)", "H(4,3,2)")
    })?;
    r.run("census:toth2", "Tóth's formula and its recursion steps for p = 2, p^{n+m+l} ≤ 2^12", || toth(2, 1 << 12))?;
    r.run("census:toth3", "Tóth's formula and its recursion steps for p = 3, p^{n+m+l} ≤ 2^12", || toth(3, 1 << 12))?;
    r.run("census:diff(4,3,2)", "|CS(H)| − |CS(G)| = (n−m)2^{m−1}(2^{l−1}−1) at (4,3,2)", || cs_difference(4, 3, 2))?;
    r.run("census:diff(5,3,2)", "|CS(H)| − |CS(G)| = (n−m)2^{m−1}(2^{l−1}−1) at (5,3,2)", || cs_difference(5, 3, 2))?;
    r.run("census:wedderburn(4,3,2)", "complex component counts agree and rational ones differ at (4,3,2)", || wedderburn(4, 3, 2))?;
    r.run("census:normality(4,3,2)", "cyclic K ≤ C(Γ′) is normal iff K ≤ Z(Γ) or K ≤ Ω(Γ:Γ′)", || normality(4, 3, 2))?;
    if tier == Tier::Deep {
        r.run("census:diff(5,4,2)", "|CS(H)| − |CS(G)| = (n−m)2^{m−1}(2^{l−1}−1) at (5,4,2)", || cs_difference(5, 4, 2))?;
        r.run("census:wedderburn(5,3,2)", "complex component counts agree and rational ones differ at (5,3,2)", || wedderburn(5, 3, 2))?;
        r.run("census:normality(5,3,2)", "cyclic K ≤ C(Γ′) is normal iff K ≤ Z(Γ) or K ≤ Ω(Γ:Γ′)", || normality(5, 3, 2))?;
    }
    let mut items = r.items;
    obstruction_items(&mut items, filter, (4, 3, 2), z4(), None)?;
    if tier == Tier::Deep {
        obstruction_items(&mut items, filter, (4, 3, 2), z4_dual(), Some("(4,3,2;t^2)".into()))?;
        obstruction_items(&mut items, filter, (5, 3, 2), z4(), Some("(5,3,2;2)".into()))?;
        obstruction_items(&mut items, filter, (5, 4, 2), z4(), Some("(5,4,2;2)".into()))?;
    }
    let config = json!({"tier": format!("{tier:?}").to_lowercase()});
    Ok(VerificationReport::new(config, items, "PASS", "FAIL"))
}
