//! Conjugacy classes of cyclic subgroups and the Wedderburn component counts
//! they control.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::pcgroup::{family_g, family_h, Elem, GroupError, PcGroup, Subgroup, MAX_ENUMERATION_ORDER};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("group of order {0} is too large for enumeration")]
    TooLarge(usize),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("counting formula is not integral: {0}")]
    NotIntegral(String),
    #[error("methods disagree: {0}")]
    Disagreement(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

type Res<T> = Result<T, CensusError>;

/// What the census needs from a finite group: elements are `0..order` with
/// `0` the identity.
pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
    fn inv(&self, a: usize) -> usize;
    fn generators(&self) -> Vec<usize>;
}

impl FiniteGroup for PcGroup {
    fn order(&self) -> usize {
        PcGroup::order(self)
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        PcGroup::mul(self, Elem(a as u32), Elem(b as u32)).index()
    }
    fn inv(&self, a: usize) -> usize {
        PcGroup::inv(self, Elem(a as u32)).index()
    }
    fn generators(&self) -> Vec<usize> {
        self.gens().into_iter().map(Elem::index).collect()
    }
}

/// A direct product of cyclic groups, elements in mixed radix.
#[derive(Clone, Debug)]
pub struct AbelianGroup {
    orders: Vec<u64>,
    size: usize,
}

impl AbelianGroup {
    pub fn new(orders: &[u64]) -> Res<Self> {
        let mut size = 1usize;
        for &o in orders {
            if o == 0 {
                return Err(CensusError::BadParameters("cyclic factor of order 0".into()));
            }
            size = size.checked_mul(o as usize).ok_or(CensusError::TooLarge(usize::MAX))?;
        }
        if size > MAX_ENUMERATION_ORDER {
            return Err(CensusError::TooLarge(size));
        }
        Ok(AbelianGroup { orders: orders.to_vec(), size })
    }

    /// `C_{p^a} × C_{p^b} × …`
    pub fn p_group(p: u64, exps: &[u32]) -> Res<Self> {
        let orders: Vec<u64> = exps.iter().map(|&e| p.pow(e)).collect();
        AbelianGroup::new(&orders)
    }
}

impl FiniteGroup for AbelianGroup {
    fn order(&self) -> usize {
        self.size
    }
    fn mul(&self, mut a: usize, mut b: usize) -> usize {
        let (mut r, mut place) = (0, 1);
        for &o in &self.orders {
            let o = o as usize;
            r += ((a % o + b % o) % o) * place;
            a /= o;
            b /= o;
            place *= o;
        }
        r
    }
    fn inv(&self, mut a: usize) -> usize {
        let (mut r, mut place) = (0, 1);
        for &o in &self.orders {
            let o = o as usize;
            r += ((o - a % o) % o) * place;
            a /= o;
            place *= o;
        }
        r
    }
    fn generators(&self) -> Vec<usize> {
        let mut place = 1;
        let mut out = Vec::new();
        for &o in &self.orders {
            out.push(if o > 1 { place } else { 0 });
            place *= o as usize;
        }
        out
    }
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut r = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if n > 1 {
        r -= r / n;
    }
    r
}

fn cyclic_set<G: FiniteGroup + ?Sized>(g: &G, x: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut y = x;
    while y != 0 {
        out.push(y);
        y = g.mul(y, x);
    }
    out.sort_unstable();
    out
}

fn check_size<G: FiniteGroup + ?Sized>(g: &G) -> Res<()> {
    if g.order() > MAX_ENUMERATION_ORDER {
        return Err(CensusError::TooLarge(g.order()));
    }
    Ok(())
}

/// Distinct cyclic subgroups as sorted element sets, in order of first
/// appearance, each with one generator.
pub fn cyclic_subgroups<G: FiniteGroup + ?Sized>(g: &G) -> Res<Vec<(usize, Vec<usize>)>> {
    check_size(g)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for x in 0..g.order() {
        let s = cyclic_set(g, x);
        if seen.insert(s.clone()) {
            out.push((x, s));
        }
    }
    Ok(out)
}

/// Orbits of cyclic subgroups under conjugation by generators.
pub fn count_cyclic_subgroup_classes_brute<G: FiniteGroup + ?Sized>(g: &G) -> Res<usize> {
    let subs = cyclic_subgroups(g)?;
    let index: HashMap<&Vec<usize>, usize> = subs.iter().enumerate().map(|(i, (_, s))| (s, i)).collect();
    let gens = g.generators();
    let invs: Vec<usize> = gens.iter().map(|&h| g.inv(h)).collect();
    let mut visited = vec![false; subs.len()];
    let mut orbits = 0;
    for start in 0..subs.len() {
        if visited[start] {
            continue;
        }
        orbits += 1;
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for (&h, &hi) in gens.iter().zip(&invs) {
                let mut conj: Vec<usize> = subs[i].1.iter().map(|&e| g.mul(g.mul(hi, e), h)).collect();
                conj.sort_unstable();
                let j = index[&conj];
                if !visited[j] {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(orbits)
}

/// `Σ_g 1 / (|Γ : N_Γ(⟨g⟩)| · φ(|g|))`, normalizers computed by membership.
pub fn count_cyclic_subgroup_classes_weighted<G: FiniteGroup + ?Sized>(g: &G) -> Res<BigRational> {
    check_size(g)?;
    let order = g.order();
    let mut norm_cache: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut total = BigRational::zero();
    for x in 0..order {
        let s = cyclic_set(g, x);
        let phi = euler_phi(s.len() as u64);
        let n = *norm_cache.entry(s.clone()).or_insert_with(|| {
            (0..order)
                .filter(|&h| {
                    let c = g.mul(g.mul(g.inv(h), x), h);
                    s.binary_search(&c).is_ok()
                })
                .count()
        });
        let index = order / n;
        total += BigRational::new(BigInt::one(), BigInt::from(index as u64 * phi));
    }
    Ok(total)
}

/// `|CS(Γ)|` by both methods, which must agree.
pub fn count_cyclic_subgroup_classes<G: FiniteGroup + ?Sized>(g: &G) -> Res<usize> {
    let brute = count_cyclic_subgroup_classes_brute(g)?;
    let w = count_cyclic_subgroup_classes_weighted(g)?;
    if !w.is_integer() {
        return Err(CensusError::NotIntegral(w.to_string()));
    }
    let w = w.to_integer().to_usize().expect("small count");
    if w != brute {
        return Err(CensusError::Disagreement(format!("orbit count {brute}, weighted sum {w}")));
    }
    Ok(brute)
}

fn checked_pow(p: u128, e: u32) -> Res<u128> {
    p.checked_pow(e).ok_or_else(|| CensusError::BadParameters("closed form overflows".into()))
}

/// `|CS(C_{p^n} × C_{p^m} × C_{p^l})|` by Tóth's formula, for `n ≥ m ≥ l ≥ 0`.
pub fn toth_closed_form(p: u64, n: u32, m: u32, l: u32) -> Res<u128> {
    if !crate::coefring::is_prime(p) {
        return Err(CensusError::BadParameters(format!("{p} is not prime")));
    }
    if !(n >= m && m >= l) {
        return Err(CensusError::BadParameters(format!("need n ≥ m ≥ l, got ({n},{m},{l})")));
    }
    let p = p as u128;
    let t1 = (n - m) as u128 * checked_pow(p, m + l)?;
    let t2 = (checked_pow(p, 2 * l + 1)? + checked_pow(p, 2 * l)?) * (checked_pow(p, m - l)? - 1) / (p - 1);
    let t3 = (p * p + p + 1) * (checked_pow(p, 2 * l)? - 1) / (p * p - 1);
    Ok(t1 + t2 + t3 + 1)
}

/// The closed form for `|CS(H)| − |CS(G)|`.
pub fn cs_difference_formula(n: u32, m: u32, l: u32) -> i64 {
    (n - m) as i64 * (1i64 << (m - 1)) * ((1i64 << (l - 1)) - 1)
}

fn validate_params(n: u32, m: u32, l: u32) -> Res<()> {
    if n > m && m > l && l >= 2 {
        Ok(())
    } else {
        Err(CensusError::BadParameters(format!("need n > m > l >= 2, got ({n},{m},{l})")))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CsDifference {
    pub params: (u32, u32, u32),
    pub cs_g: usize,
    pub cs_h: usize,
    pub brute_force: i64,
    pub formula: i64,
    pub centralizer_invariants_g: Vec<u64>,
    pub centralizer_invariants_h: Vec<u64>,
    pub holds: bool,
}

pub fn family_pair(n: u32, m: u32, l: u32) -> Res<(PcGroup, PcGroup)> {
    validate_params(n, m, l)?;
    let g = PcGroup::new(format!("G({n},{m},{l})"), family_g(n, m, l)?)?;
    let h = PcGroup::new(format!("H({n},{m},{l})"), family_h(n, m, l)?)?;
    Ok((g, h))
}

/// The centralizer of the derived subgroup.
pub fn derived_centralizer(g: &PcGroup) -> Res<Subgroup> {
    Ok(g.centralizer(&g.derived()?)?)
}

pub fn cs_difference(n: u32, m: u32, l: u32) -> Res<CsDifference> {
    let (g, h) = family_pair(n, m, l)?;
    let cs_g = count_cyclic_subgroup_classes(&g)?;
    let cs_h = count_cyclic_subgroup_classes(&h)?;
    let inv_g = g.abelian_invariants(&derived_centralizer(&g)?)?;
    let inv_h = h.abelian_invariants(&derived_centralizer(&h)?)?;
    let brute = cs_h as i64 - cs_g as i64;
    let formula = cs_difference_formula(n, m, l);
    let mut expect_g = vec![1u64 << n, 1u64 << (m - 1), 1u64 << l];
    let mut expect_h = vec![1u64 << (n - 1), 1u64 << m, 1u64 << l];
    expect_g.sort_unstable_by(|a, b| b.cmp(a));
    expect_h.sort_unstable_by(|a, b| b.cmp(a));
    let holds = brute == formula && inv_g == expect_g && inv_h == expect_h;
    Ok(CsDifference {
        params: (n, m, l),
        cs_g,
        cs_h,
        brute_force: brute,
        formula,
        centralizer_invariants_g: inv_g,
        centralizer_invariants_h: inv_h,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NormalityReport {
    pub group: String,
    pub checked: usize,
    pub normal: usize,
    pub central: usize,
    pub in_omega: usize,
    pub violations: Vec<String>,
}

impl NormalityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every cyclic `K ≤ C_Γ(Γ′)`: `K ⊴ Γ` iff `K ≤ Z(Γ)` or `K ≤ Ω(Γ : Γ′)`.
pub fn normality_characterization(g: &PcGroup) -> Res<NormalityReport> {
    check_size(g)?;
    let derived = g.derived()?;
    let cent = g.centralizer(&derived)?;
    let z = g.center()?;
    let omega = g.omega_rel(&derived)?;
    let mut seen = HashSet::new();
    let mut rep = NormalityReport {
        group: g.name().to_string(),
        checked: 0,
        normal: 0,
        central: 0,
        in_omega: 0,
        violations: Vec::new(),
    };
    for x in g.elements().filter(|&x| cent.contains(x)) {
        let k = g.subgroup(&[x]);
        if !seen.insert(k.elements.clone()) {
            continue;
        }
        rep.checked += 1;
        let normal = g.is_normal(&k);
        let central = k.is_subgroup_of(&z);
        let in_omega = k.is_subgroup_of(&omega);
        rep.normal += normal as usize;
        rep.central += central as usize;
        rep.in_omega += in_omega as usize;
        if normal != (central || in_omega) {
            rep.violations.push(g.format_elem(x));
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeProfile {
    pub degree_one: usize,
    pub degree_two: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CensusResult {
    pub group: String,
    pub order: usize,
    pub cyclic_subgroup_classes: usize,
    pub conjugacy_classes: usize,
    pub rational_components: usize,
    pub complex_components: usize,
    pub degree_profile: Option<DegreeProfile>,
    pub notes: Vec<String>,
}

impl CensusResult {
    /// Rational count is `|CS|`, complex count is the class number, and the
    /// degree profile accounts for both `|Γ|` and the class number.
    pub fn consistent(&self) -> bool {
        let counts = self.rational_components == self.cyclic_subgroup_classes
            && self.complex_components == self.conjugacy_classes;
        let profile = self.degree_profile.as_ref().is_none_or(|d| {
            d.degree_one + d.degree_two == self.conjugacy_classes && d.degree_one + 4 * d.degree_two == self.order
        });
        counts && profile
    }
}

pub fn wedderburn_counts(g: &PcGroup) -> Res<CensusResult> {
    check_size(g)?;
    let cs = count_cyclic_subgroup_classes(g)?;
    let classes = g.conjugacy_classes()?.len();
    let derived = g.derived()?;
    let cent = g.centralizer(&derived)?;
    let cent_abelian = cent.elements.iter().all(|&a| cent.elements.iter().all(|&b| g.mul(a, b) == g.mul(b, a)));
    let mut notes = Vec::new();
    let profile = if cent_abelian && 2 * cent.order() == g.order() {
        let abelianization = g.order() / derived.order();
        Some(DegreeProfile { degree_one: abelianization, degree_two: (g.order() - abelianization) / 4 })
    } else if g.is_abelian() {
        Some(DegreeProfile { degree_one: g.order(), degree_two: 0 })
    } else {
        notes.push("no abelian maximal subgroup; degree profile omitted".into());
        None
    };
    Ok(CensusResult {
        group: g.name().to_string(),
        order: g.order(),
        cyclic_subgroup_classes: cs,
        conjugacy_classes: classes,
        rational_components: cs,
        complex_components: classes,
        degree_profile: profile,
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Comparison {
    pub g: CensusResult,
    pub h: CensusResult,
    pub complex_iso: bool,
    pub rational_iso: bool,
    pub rational_difference: i64,
    pub formula_difference: i64,
}

impl Comparison {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializes")
    }
}

/// Wedderburn counts for `G(n,m,l)` and `H(n,m,l)` side by side.
pub fn compare(n: u32, m: u32, l: u32) -> Res<Comparison> {
    let (g, h) = family_pair(n, m, l)?;
    let wg = wedderburn_counts(&g)?;
    let wh = wedderburn_counts(&h)?;
    let complex_iso = wg.complex_components == wh.complex_components
        && wg.degree_profile.as_ref().map(|d| (d.degree_one, d.degree_two))
            == wh.degree_profile.as_ref().map(|d| (d.degree_one, d.degree_two));
    let diff = wh.rational_components as i64 - wg.rational_components as i64;
    Ok(Comparison {
        rational_iso: diff == 0,
        complex_iso,
        rational_difference: diff,
        formula_difference: cs_difference_formula(n, m, l),
        g: wg,
        h: wh,
    })
}

fn max_exponent(p: u64, bound: u64) -> u32 {
    let mut e = 0;
    while p.pow(e + 1) <= bound {
        e += 1;
    }
    e
}

/// `|CS(C_{p^n} × C_{p^m} × C_{p^l})|` by enumeration for every `n ≥ m ≥ l`
/// with `p^{n+m+l} ≤ bound`.
pub fn abelian_counts(p: u64, bound: u64) -> Res<BTreeMap<[u32; 3], usize>> {
    let max_e = max_exponent(p, bound);
    let mut out = BTreeMap::new();
    for n in 0..=max_e {
        for m in 0..=n.min(max_e - n) {
            for l in 0..=m.min(max_e - n - m) {
                out.insert([n, m, l], count_cyclic_subgroup_classes(&AbelianGroup::p_group(p, &[n, m, l])?)?);
            }
        }
    }
    Ok(out)
}

/// Tóth's formula against enumerated counts.
pub fn toth_sweep(p: u64, counts: &BTreeMap<[u32; 3], usize>) -> Res<Value> {
    let mut rows = Vec::new();
    let mut ok = true;
    for (&[n, m, l], &brute) in counts {
        let closed = toth_closed_form(p, n, m, l)?;
        ok &= brute as u128 == closed;
        rows.push(json!([n, m, l, brute, closed as u64]));
    }
    Ok(json!({"p": p, "holds": ok, "rows": rows}))
}

/// The three recursion steps behind Tóth's formula, on every parameter step
/// where both groups were enumerated.
pub fn toth_steps(p: u64, counts: &BTreeMap<[u32; 3], usize>) -> Res<Value> {
    let pw = |e: u32| (p as i128).pow(e);
    let cs = |e: [u32; 3]| counts.get(&e).map(|&c| c as i128);
    let mut ok = true;
    let mut checked = 0;
    for &[n, m, l] in counts.keys() {
        let mut step = |big: [u32; 3], small: [u32; 3], expect: i128| {
            if let (Some(a), Some(b)) = (cs(big), cs(small)) {
                ok &= a - b == expect;
                checked += 1;
            }
        };
        step([n + 1, m, l], [n, m, l], pw(m + l));
        if n == m {
            step([m + 1, m + 1, l], [m, m, l], pw(m + l + 1) + pw(m + l));
        }
        if n == m && m == l {
            step([l + 1, l + 1, l + 1], [l, l, l], pw(2 * l + 2) + pw(2 * l + 1) + pw(2 * l));
        }
    }
    Ok(json!({"p": p, "holds": ok, "checked": checked}))
}
