//! Closed-form descriptions of `Δ(SG : n)^k` for cyclic 2-groups and the
//! dihedral group of order 16, dimension subgroups, and the Jennings series.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::coefring::CoefRing;
use crate::groupalg::{AlgError, AlgebraElement, GroupAlgebra, IdealFiltration};
use crate::modlinalg::{HowellBuilder, HowellModule};
use crate::pcgroup::{cyclic2, dihedral16, Elem, GroupError, PcGroup, Subgroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiltrationError {
    #[error("closed form describes {expected}, algebra is over {got}")]
    GroupMismatch { expected: String, got: String },
    #[error("ring characteristic does not match the group prime")]
    CharMismatch,
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A sum `Σ c·n^a` with `c ∈ {1, 2}`, reading `n^a = S` for `a ≤ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealExpr {
    pub terms: Vec<(u32, i64)>,
}

impl IdealExpr {
    pub fn power(a: i64) -> Self {
        IdealExpr { terms: vec![(1, a)] }
    }

    /// `n^a + 2n^b`.
    pub fn power_plus_twice(a: i64, b: i64) -> Self {
        IdealExpr { terms: vec![(1, a), (2, b)] }
    }

    /// Drops summands `2n^b` swallowed by `n^a`, valid when `2 ∈ n`
    /// (then `2n^b ⊆ n^{max(b,0)+1}`).
    pub fn simplified(&self) -> Self {
        let base = self.terms.iter().filter(|(c, _)| *c == 1).map(|&(_, a)| a.max(0)).min();
        let mut terms: Vec<(u32, i64)> = Vec::new();
        for &(c, a) in &self.terms {
            let a = a.max(0);
            let absorbed = match (c, base) {
                (2, Some(b)) => b <= a + 1,
                _ => false,
            };
            if !absorbed && !terms.contains(&(c, a)) {
                terms.push((c, a));
            }
        }
        IdealExpr { terms }
    }

    pub fn materialize(&self, ring: &CoefRing) -> HowellModule {
        let e = ring.degree();
        let mut b = HowellBuilder::new(ring.modulus(), e).expect("ring modulus");
        for &(c, a) in &self.terms {
            let m = ring.ideal_power_module(a);
            let two = ring.from_int(c as i64);
            for row in m.rows() {
                let prod = ring.mul(&crate::coefring::RingElem(row.clone()), &two);
                b.insert(prod.0).expect("dimension e");
            }
        }
        b.finish()
    }
}

impl fmt::Display for IdealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(c, a)| {
                let base = match a {
                    a if a <= 0 => "S".to_string(),
                    1 => "n".to_string(),
                    a => format!("n^{a}"),
                };
                if c == 1 {
                    base
                } else if base == "S" {
                    format!("{c}S")
                } else {
                    format!("{c}{base}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Basis monomials of the two closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Monomial {
    /// `U^i`.
    Cyclic(u32),
    /// `U^s V^t W^i`, times `W^2` when `w2` is set.
    Dihedral { s: u8, t: u8, i: u8, w2: bool },
}

impl Monomial {
    /// Weighted degree `ω(U^s V^t W^i) = s + t + 2i`.
    pub fn omega(&self) -> i64 {
        match *self {
            Monomial::Cyclic(i) => i as i64,
            Monomial::Dihedral { s, t, i, .. } => (s + t + 2 * i) as i64,
        }
    }

    fn element(&self, alg: &Arc<GroupAlgebra>) -> AlgebraElement {
        let g = alg.group();
        match *self {
            Monomial::Cyclic(i) => alg.minus_one(g.gen(0)).pow(i as u64),
            Monomial::Dihedral { s, t, i, w2 } => {
                let u = alg.minus_one(g.gen(0));
                let v = alg.minus_one(g.gen(1));
                let w = alg.minus_one(g.gen(2));
                let mut x = &(&u.pow(s as u64) * &v.pow(t as u64)) * &w.pow(i as u64);
                if w2 {
                    x = &x * &w.pow(2);
                }
                x
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pw = |name: &str, e: u32| match e {
            0 => String::new(),
            1 => name.to_string(),
            e => format!("{name}^{e}"),
        };
        let s = match *self {
            Monomial::Cyclic(i) => pw("U", i),
            Monomial::Dihedral { s, t, i, w2 } => {
                let wexp = i as u32 + if w2 { 2 } else { 0 };
                format!("{}{}{}", pw("U", s as u32), pw("V", t as u32), pw("W", wexp))
            }
        };
        if s.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{s}")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub monomial: Monomial,
    pub ideal: IdealExpr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `C_{2^n}`.
    Cyclic(u32),
    Dihedral16,
}

/// `Θ^k` as a direct sum of ideal multiples of basis monomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormFiltration {
    pub family: Family,
    pub k: usize,
    pub components: Vec<Component>,
}

/// `Θ^k` for `C_{2^n}`: `n^{k-i} U^i` below `2^{n-1}`, and
/// `(n^{k-i} + 2n^{k-i-2^{n-1}}) U^i` from there on.
pub fn cyclic_closed_form(n: u32, k: usize) -> ClosedFormFiltration {
    let half = 1i64 << n.saturating_sub(1);
    let k = k as i64;
    let components = (0..1u32 << n)
        .map(|i| {
            let ii = i as i64;
            let ideal = if n == 0 || ii < half {
                IdealExpr::power(k - ii)
            } else {
                IdealExpr::power_plus_twice(k - ii, k - ii - half)
            };
            Component { monomial: Monomial::Cyclic(i), ideal }
        })
        .collect();
    ClosedFormFiltration { family: Family::Cyclic(n), k: k as usize, components }
}

/// `Θ^k` for `D16`: `n^{k-ω(Q)} Q` and `(n^{k-4-ω(Q)} + 2n^{k-8-ω(Q)}) QW^2`.
pub fn dihedral_closed_form(k: usize) -> ClosedFormFiltration {
    let k = k as i64;
    let mut components = Vec::with_capacity(16);
    for w2 in [false, true] {
        for s in 0..2u8 {
            for t in 0..2u8 {
                for i in 0..2u8 {
                    let monomial = Monomial::Dihedral { s, t, i, w2 };
                    let om = monomial.omega();
                    let ideal = if w2 {
                        IdealExpr::power_plus_twice(k - 4 - om, k - 8 - om)
                    } else {
                        IdealExpr::power(k - om)
                    };
                    components.push(Component { monomial, ideal });
                }
            }
        }
    }
    ClosedFormFiltration { family: Family::Dihedral16, k: k as usize, components }
}

impl ClosedFormFiltration {
    /// The group algebra this closed form lives in, over `ring`.
    pub fn algebra(&self, ring: &CoefRing) -> Result<Arc<GroupAlgebra>, FiltrationError> {
        let (name, pres) = match self.family {
            Family::Cyclic(n) => (format!("C2^{n}"), cyclic2(n)?),
            Family::Dihedral16 => ("D16".to_string(), dihedral16()),
        };
        Ok(GroupAlgebra::new(ring.clone(), Arc::new(PcGroup::new(name, pres)?)))
    }

    fn check_group(&self, alg: &GroupAlgebra) -> Result<(), FiltrationError> {
        let expected = match self.family {
            Family::Cyclic(n) => cyclic2(n)?,
            Family::Dihedral16 => dihedral16(),
        };
        if alg.group().presentation() != &expected {
            return Err(FiltrationError::GroupMismatch {
                expected: format!("{:?}", self.family),
                got: alg.group().name().to_string(),
            });
        }
        Ok(())
    }

    /// The submodule `⊕ I_Q · Q` of `SG`.
    pub fn materialize(&self, alg: &Arc<GroupAlgebra>) -> Result<HowellModule, FiltrationError> {
        self.check_group(alg)?;
        let ring = alg.ring();
        let mut b = HowellBuilder::new(alg.modulus(), alg.flat_dim()).map_err(AlgError::from)?;
        for c in &self.components {
            let q = c.monomial.element(alg);
            for row in c.ideal.materialize(ring).rows() {
                let x = q.scale(&crate::coefring::RingElem(row.clone()));
                b.insert(x.flat().to_vec()).map_err(AlgError::from)?;
            }
        }
        Ok(b.finish())
    }

    /// Form with absorbed summands removed (assumes `2 ∈ n`).
    pub fn simplified(&self) -> Self {
        ClosedFormFiltration {
            components: self
                .components
                .iter()
                .map(|c| Component { monomial: c.monomial, ideal: c.ideal.simplified() })
                .collect(),
            ..self.clone()
        }
    }

    /// Sizes of each component ideal in `ring`.
    pub fn component_sizes(&self, ring: &CoefRing) -> Vec<BigUint> {
        self.components.iter().map(|c| c.ideal.materialize(ring).size()).collect()
    }
}

impl fmt::Display for ClosedFormFiltration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                let ideal = c.ideal.to_string();
                let ideal = if c.ideal.terms.len() > 1 { format!("({ideal})") } else { ideal };
                match c.monomial.to_string().as_str() {
                    "1" => ideal,
                    m => format!("{ideal}{m}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// `D_{n,S}(G) = { g | g - 1 ∈ Δ(SG)^n }` read off a computed `Δ` filtration.
pub fn dimension_subgroup(delta: &IdealFiltration, n: usize) -> Result<Subgroup, FiltrationError> {
    let alg = delta.algebra();
    let g = alg.group();
    let level = delta.level(n)?;
    let els: Vec<Elem> = g
        .elements()
        .filter(|&x| level.contains(alg.minus_one(x).flat()).expect("algebra dimension"))
        .collect();
    Ok(g.subgroup(&els))
}

/// `∏_{i p^j ≥ n} γ_i(G)^{p^j}`.
pub fn jennings_product(g: &PcGroup, n: usize) -> Result<Subgroup, FiltrationError> {
    let p = g.prime().ok_or(GroupError::NotPGroup)? as usize;
    let mut acc = g.trivial();
    let mut i = 1;
    loop {
        let gamma = g.lower_central(i)?;
        if gamma.order() == 1 {
            break;
        }
        // smallest p^j with i p^j >= n
        let mut q = 1;
        while i * q < n {
            q *= p;
        }
        let part = g.power_subgroup(&gamma, q as i64);
        acc = g.product(&acc, &part);
        i += 1;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct JenningsData {
    /// `D_1, D_2, …` down to and including the first trivial term.
    pub terms: Vec<Subgroup>,
    /// `log_p |D_n : D_{n+1}|` for `n ≥ 1`.
    pub graded_log_dims: Vec<u32>,
}

/// The Jennings series by the product formula.
pub fn jennings_series(g: &PcGroup) -> Result<JenningsData, FiltrationError> {
    let p = g.prime().ok_or(GroupError::NotPGroup)?;
    let mut terms = Vec::new();
    let mut n = 1;
    loop {
        let d = jennings_product(g, n)?;
        let done = d.order() == 1;
        terms.push(d);
        if done {
            break;
        }
        n += 1;
    }
    let graded_log_dims = terms
        .windows(2)
        .map(|w| ilog(w[0].order() / w[1].order(), p as usize))
        .collect();
    Ok(JenningsData { terms, graded_log_dims })
}

fn ilog(mut x: usize, p: usize) -> u32 {
    let mut k = 0;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RelAugQuotient {
    /// `|Θ/Θ²|`.
    pub theta_quotient_size: String,
    /// `|n/n²|`.
    pub ideal_quotient_size: String,
    /// `|Δ(FG)/Δ(FG)²|`.
    pub delta_quotient_size: String,
    /// `log_{|F|} |Θ/Θ²|` when integral.
    pub f_dimension: Option<u32>,
    /// `d(G) = log_p |G : Φ(G)|`.
    pub generator_rank: u32,
    pub holds: bool,
}

/// Compares `|Θ/Θ²|` with `|n/n²| · |Δ(FG)/Δ(FG)²|`.
pub fn rel_aug_quotient(alg: &Arc<GroupAlgebra>) -> Result<RelAugQuotient, FiltrationError> {
    let ring = alg.ring();
    let field = ring.residue_field().map_err(AlgError::from)?;
    let p = field.characteristic();
    if alg.group().prime() != Some(p as u64) {
        return Err(FiltrationError::CharMismatch);
    }
    let theta = alg.theta_powers(2)?;
    let tq = theta.quotient_size(1)?;
    let n1 = ring.ideal_power_module(1);
    let n2 = ring.ideal_power_module(2);
    let nq = n1.quotient_size(&n2).map_err(AlgError::from)?;
    let falg = alg.residue_algebra(&field)?;
    let delta = falg.delta_powers(2)?;
    let dq = delta.quotient_size(1)?;
    let q = BigUint::from(field.order());
    let mut dim = 0;
    let mut x = BigUint::from(1u32);
    while x < tq {
        x *= &q;
        dim += 1;
    }
    let phi = alg.group().frattini()?;
    let generator_rank = ilog(alg.group().order() / phi.order(), p as usize);
    Ok(RelAugQuotient {
        holds: tq == &nq * &dq,
        theta_quotient_size: tq.to_string(),
        ideal_quotient_size: nq.to_string(),
        delta_quotient_size: dq.to_string(),
        f_dimension: (x == tq).then_some(dim),
        generator_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcgroup::family_g;

    fn z4() -> CoefRing {
        CoefRing::zmod(4, 2).unwrap()
    }

    #[test]
    fn c4_table_text() {
        let rows: Vec<String> = (0..6).map(|k| cyclic_closed_form(2, k).simplified().to_string()).collect();
        assert_eq!(
            rows,
            vec![
                "S ⊕ SU ⊕ SU^2 ⊕ SU^3",
                "n ⊕ SU ⊕ SU^2 ⊕ SU^3",
                "n^2 ⊕ nU ⊕ SU^2 ⊕ SU^3",
                "n^3 ⊕ n^2U ⊕ nU^2 ⊕ SU^3",
                "n^4 ⊕ n^3U ⊕ (n^2 + 2S)U^2 ⊕ nU^3",
                "n^5 ⊕ n^4U ⊕ (n^3 + 2n)U^2 ⊕ (n^2 + 2S)U^3",
            ]
        );
    }

    #[test]
    fn c4_sizes() {
        let s = z4();
        let cf = cyclic_closed_form(2, 3);
        let alg = cf.algebra(&s).unwrap();
        assert_eq!(cf.materialize(&alg).unwrap().size(), BigUint::from(8u32));
        assert_eq!(cyclic_closed_form(2, 2).materialize(&alg).unwrap().size(), BigUint::from(32u32));
        assert_eq!(cyclic_closed_form(2, 0).materialize(&alg).unwrap(), HowellModule::full(4, 4).unwrap());
    }

    #[test]
    fn cyclic_matches_brute_force_small() {
        let s = z4();
        for n in 1..=3 {
            let alg = cyclic_closed_form(n, 0).algebra(&s).unwrap();
            let f = alg.theta_powers((1 << n) + 4).unwrap();
            for k in 0..=(1usize << n) + 4 {
                assert_eq!(&cyclic_closed_form(n, k).materialize(&alg).unwrap(), f.level(k).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn dihedral_examples() {
        let cf = dihedral_closed_form(4);
        let w2 = cf.components.iter().find(|c| c.monomial == Monomial::Dihedral { s: 0, t: 0, i: 0, w2: true }).unwrap();
        assert_eq!(w2.ideal.simplified().to_string(), "S");
        let uvw = cf.components.iter().find(|c| c.monomial == Monomial::Dihedral { s: 1, t: 1, i: 1, w2: false }).unwrap();
        assert_eq!(uvw.ideal.to_string(), "S");
        let s = z4();
        let alg = cf.algebra(&s).unwrap();
        let f = alg.theta_powers(9).unwrap();
        assert_eq!(&dihedral_closed_form(9).materialize(&alg).unwrap(), f.level(9).unwrap());
    }

    #[test]
    fn mismatched_group_is_rejected() {
        let s = z4();
        let alg = dihedral_closed_form(0).algebra(&s).unwrap();
        assert!(matches!(cyclic_closed_form(2, 1).materialize(&alg), Err(FiltrationError::GroupMismatch { .. })));
    }

    #[test]
    fn jennings_small() {
        let f2 = CoefRing::zmod(2, 0).unwrap();
        let c4 = Arc::new(PcGroup::new("C4", cyclic2(2).unwrap()).unwrap());
        let j = jennings_series(&c4).unwrap();
        let orders: Vec<usize> = j.terms.iter().map(|d| d.order()).collect();
        assert_eq!(orders, vec![4, 2, 1]);
        let alg = GroupAlgebra::new(f2.clone(), c4.clone());
        let delta = alg.delta_powers_to_zero(64).unwrap();
        for (n, d) in j.terms.iter().enumerate() {
            assert_eq!(&dimension_subgroup(&delta, n + 1).unwrap(), d);
        }
        let d16 = Arc::new(PcGroup::new("D16", dihedral16()).unwrap());
        let w = d16.gen(2);
        assert_eq!(jennings_product(&d16, 2).unwrap(), d16.subgroup(&[w]));
        assert_eq!(jennings_product(&d16, 4).unwrap(), d16.subgroup(&[d16.pow(w, 2)]));
        assert_eq!(jennings_product(&d16, 1).unwrap(), d16.whole());
    }

    #[test]
    fn rel_aug_for_g() {
        let g = Arc::new(PcGroup::new("G", family_g(4, 3, 2).unwrap()).unwrap());
        let f2 = CoefRing::zmod(2, 0).unwrap();
        let dq = GroupAlgebra::new(f2, g.clone()).delta_powers(2).unwrap().quotient_size(1).unwrap();
        assert_eq!(dq, BigUint::from(4u32));
        let r = rel_aug_quotient(&GroupAlgebra::new(z4(), g)).unwrap();
        assert!(r.holds);
        assert_eq!(r.f_dimension, Some(3));
        assert_eq!(r.generator_rank, 2);
    }
}
