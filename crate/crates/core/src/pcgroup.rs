//! Finite polycyclic groups.
//!
//! A presentation on pc generators `g_0, ..., g_{r-1}` with relative orders
//! `o_i` is turned into right-multiplication tables `w ↦ w·g_i^e` by
//! collection. Elements are indices into the set of normal words
//! `g_0^{e_0} ⋯ g_{r-1}^{e_{r-1}}`, numbered in mixed radix so that index order
//! is lexicographic order on exponent vectors.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Groups larger than this are not constructed at all.
pub const MAX_GROUP_ORDER: usize = 1 << 16;
/// Subgroup computations by enumeration refuse groups above this order.
pub const MAX_ENUMERATION_ORDER: usize = 1 << 13;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("exponent vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("group of order {0} exceeds the enumeration bound")]
    TooLarge(usize),
    #[error("subgroup is not abelian")]
    NotAbelian,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("presentation is inconsistent: {0}")]
    Inconsistent(String),
    #[error("generator images do not satisfy relation {0}")]
    NotAHomomorphism(String),
    #[error("group is not a p-group")]
    NotPGroup,
}

/// A pc presentation. Words are exponent vectors of length `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcPresentation {
    pub names: Vec<String>,
    pub orders: Vec<u32>,
    /// `pow[i] = g_i^{o_i}`; supported on generators `> i`.
    pub pow: Vec<Vec<u32>>,
    /// `conj[j][i] = g_j^{g_i}` for `i < j`; supported on generators `> i`.
    pub conj: Vec<Vec<Vec<u32>>>,
}

impl PcPresentation {
    /// Presentation with all power and conjugate relations trivial.
    pub fn free_abelian_like(names: Vec<String>, orders: Vec<u32>) -> Self {
        let r = orders.len();
        let pow = vec![vec![0; r]; r];
        let conj = (0..r)
            .map(|j| {
                (0..r)
                    .map(|i| {
                        let mut w = vec![0; r];
                        if i < j {
                            w[j] = 1;
                        }
                        w
                    })
                    .collect()
            })
            .collect();
        PcPresentation { names, orders, pow, conj }
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn set_pow(&mut self, i: usize, word: Vec<u32>) {
        self.pow[i] = word;
    }

    pub fn set_conj(&mut self, j: usize, i: usize, word: Vec<u32>) {
        self.conj[j][i] = word;
    }

    /// Whether `conj[j][i]` is the trivial relation `g_j^{g_i} = g_j`.
    pub fn conj_is_trivial(&self, j: usize, i: usize) -> bool {
        self.conj[j][i].iter().enumerate().all(|(k, &e)| e == u32::from(k == j))
    }

    fn validate(&self) -> Result<(), GroupError> {
        let r = self.rank();
        if self.names.len() != r || self.pow.len() != r || self.conj.len() != r {
            return Err(GroupError::BadParameters("presentation arrays disagree in length".into()));
        }
        for (i, &o) in self.orders.iter().enumerate() {
            if o < 2 || prime_of(o as u64).is_none() {
                return Err(GroupError::BadParameters(format!(
                    "relative order {o} of {} is not a prime power",
                    self.names[i]
                )));
            }
        }
        let check = |w: &Vec<u32>, after: usize, what: String| -> Result<(), GroupError> {
            if w.len() != r {
                return Err(GroupError::DimensionMismatch { expected: r, got: w.len() });
            }
            for (k, &e) in w.iter().enumerate() {
                if e >= self.orders[k] {
                    return Err(GroupError::BadParameters(format!("{what}: exponent {e} out of range")));
                }
                if k <= after && e != 0 {
                    return Err(GroupError::BadParameters(format!(
                        "{what} involves {} which is not a later generator",
                        self.names[k]
                    )));
                }
            }
            Ok(())
        };
        for i in 0..r {
            check(&self.pow[i], i, format!("power relation of {}", self.names[i]))?;
            for j in i + 1..r {
                check(&self.conj[j][i], i, format!("conjugate {}^{}", self.names[j], self.names[i]))?;
            }
        }
        Ok(())
    }
}

/// The unique prime dividing `n`, if `n` is a prime power.
pub fn prime_of(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut k = n;
    while k.is_multiple_of(p) {
        k /= p;
    }
    (k == 1).then_some(p)
}

/// A group element: index of its normal word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u32);

impl Elem {
    pub const ONE: Elem = Elem(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite group given by a consistent pc presentation, with collection
/// tables.
pub struct PcGroup {
    name: String,
    pres: PcPresentation,
    order: usize,
    strides: Vec<u32>,
    /// `right_pow[i][e * order + w] = w · g_i^e`.
    right_pow: Vec<Vec<u32>>,
    inv: Vec<u32>,
}

impl PartialEq for PcGroup {
    fn eq(&self, other: &Self) -> bool {
        self.pres == other.pres
    }
}

impl Eq for PcGroup {}

impl fmt::Debug for PcGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PcGroup({}, order {})", self.name, self.order)
    }
}

impl PcGroup {
    pub fn new(name: impl Into<String>, pres: PcPresentation) -> Result<Self, GroupError> {
        pres.validate()?;
        let r = pres.rank();
        let order = pres.orders.iter().try_fold(1usize, |acc, &o| acc.checked_mul(o as usize));
        let order = match order {
            Some(n) if n <= MAX_GROUP_ORDER => n,
            Some(n) => return Err(GroupError::TooLarge(n)),
            None => return Err(GroupError::TooLarge(usize::MAX)),
        };
        let table_size: usize = pres.orders.iter().map(|&o| o as usize * order).sum();
        if table_size > 1 << 25 {
            return Err(GroupError::TooLarge(order));
        }
        let mut strides = vec![1u32; r];
        for i in (0..r.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * pres.orders[i + 1];
        }
        let mut g = PcGroup {
            name: name.into(),
            pres,
            order,
            strides,
            right_pow: vec![Vec::new(); r],
            inv: Vec::new(),
        };
        for i in (0..r).rev() {
            g.build_tables(i);
        }
        g.check_consistency()?;
        g.inv = (0..order as u32).map(|w| g.compute_inverse(Elem(w)).0).collect();
        Ok(g)
    }

    fn build_tables(&mut self, i: usize) {
        let r = self.pres.rank();
        let n = self.order;
        let oi = self.pres.orders[i];
        // (g_j^{g_i})^e for j > i
        let conjpow: Vec<Vec<Elem>> = (0..r)
            .map(|j| {
                if j <= i {
                    return Vec::new();
                }
                let c = self.elem_unchecked(&self.pres.conj[j][i]);
                let mut acc = Elem::ONE;
                let mut v = Vec::with_capacity(self.pres.orders[j] as usize);
                for _ in 0..self.pres.orders[j] {
                    v.push(acc);
                    acc = self.mul(acc, c);
                }
                v
            })
            .collect();
        let pow_i = self.elem_unchecked(&self.pres.pow[i]);
        let stride_i = self.strides[i];
        let tail_mod = stride_i;
        let mut right = vec![0u32; n];
        for (w, slot) in right.iter_mut().enumerate() {
            let w = w as u32;
            let head = w - w % (stride_i * oi);
            let ei = (w / stride_i) % oi;
            let tail = w % tail_mod;
            let mut x = Elem::ONE;
            let mut t = tail;
            for j in i + 1..r {
                let ej = t / self.strides[j];
                t %= self.strides[j];
                if ej != 0 {
                    x = self.mul(x, conjpow[j][ej as usize]);
                }
            }
            *slot = if ei + 1 < oi {
                head + (ei + 1) * stride_i + x.0
            } else {
                head + self.mul(pow_i, x).0
            };
        }
        let mut table = Vec::with_capacity(oi as usize * n);
        table.extend(0..n as u32);
        for e in 1..oi as usize {
            let start = (e - 1) * n;
            for w in 0..n {
                let prev = table[start + w];
                table.push(right[prev as usize]);
            }
        }
        self.right_pow[i] = table;
    }

    fn check_consistency(&self) -> Result<(), GroupError> {
        let r = self.rank();
        let n = self.order;
        for i in 0..r {
            let oi = self.pres.orders[i] as usize;
            let pow_i = self.elem_unchecked(&self.pres.pow[i]);
            for w in 0..n as u32 {
                let last = self.right_pow[i][(oi - 1) * n + w as usize];
                let lhs = self.right_pow[i][n + last as usize];
                if lhs != self.mul(Elem(w), pow_i).0 {
                    return Err(GroupError::Inconsistent(format!(
                        "power relation of {} fails",
                        self.pres.names[i]
                    )));
                }
            }
            for j in i + 1..r {
                let c = self.elem_unchecked(&self.pres.conj[j][i]);
                for w in 0..n as u32 {
                    let wj = self.right_pow[j][n + w as usize];
                    let lhs = self.right_pow[i][n + wj as usize];
                    let wi = self.right_pow[i][n + w as usize];
                    if lhs != self.mul(Elem(wi), c).0 {
                        return Err(GroupError::Inconsistent(format!(
                            "conjugate relation {}^{} fails",
                            self.pres.names[j], self.pres.names[i]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn compute_inverse(&self, u: Elem) -> Elem {
        let mut cur = u;
        let mut v = Elem::ONE;
        for j in 0..self.rank() {
            let e = self.exponent(cur, j);
            if e != 0 {
                let f = self.pres.orders[j] - e;
                cur = self.mul_gen_pow(cur, j, f);
                v = self.mul_gen_pow(v, j, f);
            }
        }
        debug_assert_eq!(cur, Elem::ONE);
        v
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn presentation(&self) -> &PcPresentation {
        &self.pres
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.pres.rank()
    }

    pub fn gen_names(&self) -> &[String] {
        &self.pres.names
    }

    pub fn relative_orders(&self) -> &[u32] {
        &self.pres.orders
    }

    /// The prime `p` if this is a `p`-group.
    pub fn prime(&self) -> Option<u64> {
        if self.order == 1 {
            return None;
        }
        prime_of(self.order as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order as u32).map(Elem)
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    pub fn gen(&self, i: usize) -> Elem {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        self.elem_unchecked(&v)
    }

    pub fn gens(&self) -> Vec<Elem> {
        (0..self.rank()).map(|i| self.gen(i)).collect()
    }

    pub fn gen_by_name(&self, name: &str) -> Option<Elem> {
        self.pres.names.iter().position(|n| n == name).map(|i| self.gen(i))
    }

    fn elem_unchecked(&self, exps: &[u32]) -> Elem {
        Elem(exps.iter().zip(&self.strides).map(|(&e, &s)| e * s).sum())
    }

    /// Element with the given exponent vector.
    pub fn elem(&self, exps: &[u32]) -> Result<Elem, GroupError> {
        if exps.len() != self.rank() {
            return Err(GroupError::DimensionMismatch { expected: self.rank(), got: exps.len() });
        }
        if let Some((i, &e)) = exps.iter().enumerate().find(|(i, &e)| e >= self.pres.orders[*i]) {
            return Err(GroupError::BadParameters(format!(
                "exponent {e} of {} is not below its relative order",
                self.pres.names[i]
            )));
        }
        Ok(self.elem_unchecked(exps))
    }

    pub fn exponent(&self, g: Elem, i: usize) -> u32 {
        (g.0 / self.strides[i]) % self.pres.orders[i]
    }

    pub fn exponents(&self, g: Elem) -> Vec<u32> {
        (0..self.rank()).map(|i| self.exponent(g, i)).collect()
    }

    /// Product of pc generator powers in any order, e.g. `[(1, 1), (0, 1)]`
    /// for `g_1 g_0`.
    pub fn word(&self, syllables: &[(usize, i64)]) -> Elem {
        syllables.iter().fold(Elem::ONE, |acc, &(i, e)| self.mul(acc, self.pow(self.gen(i), e)))
    }

    #[inline]
    fn mul_gen_pow(&self, u: Elem, j: usize, e: u32) -> Elem {
        Elem(self.right_pow[j][e as usize * self.order + u.index()])
    }

    /// Normal form of `g·h` by collection.
    #[inline]
    pub fn mul(&self, g: Elem, h: Elem) -> Elem {
        let mut u = g.0;
        let mut t = h.0;
        for j in 0..self.rank() {
            let s = self.strides[j];
            let e = t / s;
            t %= s;
            if e != 0 {
                u = self.right_pow[j][e as usize * self.order + u as usize];
            }
        }
        Elem(u)
    }

    /// Multiplication on exponent vectors.
    pub fn multiply(&self, g: &[u32], h: &[u32]) -> Result<Vec<u32>, GroupError> {
        let g = self.elem(g)?;
        let h = self.elem(h)?;
        Ok(self.exponents(self.mul(g, h)))
    }

    pub fn inv(&self, g: Elem) -> Elem {
        Elem(self.inv[g.index()])
    }

    pub fn pow(&self, g: Elem, k: i64) -> Elem {
        let base = if k < 0 { self.inv(g) } else { g };
        let mut e = k.unsigned_abs();
        let mut acc = Elem::ONE;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    /// `[g, h] = g⁻¹h⁻¹gh`.
    pub fn commutator(&self, g: Elem, h: Elem) -> Elem {
        let gh = self.mul(g, h);
        let hg = self.mul(h, g);
        self.mul(self.inv(hg), gh)
    }

    /// `g^h = h⁻¹gh`.
    pub fn conjugate(&self, g: Elem, h: Elem) -> Elem {
        self.mul(self.inv(h), self.mul(g, h))
    }

    pub fn elem_order(&self, g: Elem) -> u64 {
        let mut k = 1;
        let mut x = g;
        while x != Elem::ONE {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.gens();
        gens.iter().all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Human-readable normal word, e.g. `x^2*y*z^3`.
    pub fn format_elem(&self, g: Elem) -> String {
        let parts: Vec<String> = self
            .exponents(g)
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| {
                if e == 1 {
                    self.pres.names[i].clone()
                } else {
                    format!("{}^{}", self.pres.names[i], e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    fn require_small(&self) -> Result<(), GroupError> {
        if self.order > MAX_ENUMERATION_ORDER {
            return Err(GroupError::TooLarge(self.order));
        }
        Ok(())
    }

    // ---- subgroups -------------------------------------------------------

    pub fn whole(&self) -> Subgroup {
        Subgroup { elements: self.elements().collect(), gens: self.gens() }
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup { elements: vec![Elem::ONE], gens: Vec::new() }
    }

    /// `⟨gens⟩`, by closing under right multiplication.
    pub fn subgroup(&self, gens: &[Elem]) -> Subgroup {
        let gens: Vec<Elem> = gens.iter().copied().filter(|&g| g != Elem::ONE).collect();
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut elements = vec![Elem::ONE];
        let mut queue = VecDeque::from([Elem::ONE]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.mul(x, g);
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    elements.push(y);
                    queue.push_back(y);
                }
            }
        }
        elements.sort_unstable();
        Subgroup { elements, gens }
    }

    /// Subgroup consisting of an explicit set closed under multiplication.
    fn subgroup_from_set(&self, elements: Vec<Elem>) -> Subgroup {
        let mut elements = elements;
        elements.sort_unstable();
        elements.dedup();
        let gens = self.minimal_gens_of(&elements);
        Subgroup { elements, gens }
    }

    /// A generating list picked greedily from a closed element set.
    fn minimal_gens_of(&self, elements: &[Elem]) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut span = self.subgroup(&[]);
        for &g in elements.iter().rev() {
            if !span.contains(g) {
                gens.push(g);
                span = self.subgroup(&gens);
                if span.order() == elements.len() {
                    break;
                }
            }
        }
        gens
    }

    pub fn normal_closure(&self, gens: &[Elem]) -> Subgroup {
        let mut conjugates: Vec<Elem> = Vec::new();
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<Elem> = gens.iter().copied().collect();
        let group_gens = self.gens();
        while let Some(x) = queue.pop_front() {
            if !seen.insert(x) {
                continue;
            }
            conjugates.push(x);
            for &h in &group_gens {
                let y = self.conjugate(x, h);
                if !seen.contains(&y) {
                    queue.push_back(y);
                }
            }
        }
        let closure = self.subgroup(&conjugates);
        Subgroup { gens: gens.iter().copied().filter(|&g| g != Elem::ONE).collect(), ..closure }
    }

    pub fn is_normal(&self, k: &Subgroup) -> bool {
        let gens = self.gens();
        k.gens.iter().all(|&x| gens.iter().all(|&h| k.contains(self.conjugate(x, h))))
    }

    pub fn centralizer(&self, k: &Subgroup) -> Result<Subgroup, GroupError> {
        self.require_small()?;
        let els = self
            .elements()
            .filter(|&g| k.gens.iter().all(|&x| self.mul(g, x) == self.mul(x, g)))
            .collect();
        Ok(self.subgroup_from_set(els))
    }

    pub fn normalizer(&self, k: &Subgroup) -> Result<Subgroup, GroupError> {
        self.require_small()?;
        let els = self
            .elements()
            .filter(|&g| k.gens.iter().all(|&x| k.contains(self.conjugate(x, g))))
            .collect();
        Ok(self.subgroup_from_set(els))
    }

    pub fn center(&self) -> Result<Subgroup, GroupError> {
        self.centralizer(&self.whole())
    }

    /// `[K, L]` for normal subgroups, from generators.
    pub fn commutator_subgroup(&self, k: &Subgroup, l: &Subgroup) -> Subgroup {
        let comms: Vec<Elem> = k
            .gens
            .iter()
            .flat_map(|&a| l.gens.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.commutator(a, b))
            .collect();
        self.normal_closure(&comms)
    }

    pub fn derived(&self) -> Result<Subgroup, GroupError> {
        self.require_small()?;
        Ok(self.commutator_subgroup(&self.whole(), &self.whole()))
    }

    /// `γ_n(G)`, with `γ_1 = G`.
    pub fn lower_central(&self, n: usize) -> Result<Subgroup, GroupError> {
        self.require_small()?;
        let whole = self.whole();
        let mut cur = whole.clone();
        for _ in 1..n.max(1) {
            cur = self.commutator_subgroup(&cur, &whole);
        }
        Ok(cur)
    }

    /// `⟨g ∈ G | g^p ∈ N⟩`.
    pub fn omega_rel(&self, n: &Subgroup) -> Result<Subgroup, GroupError> {
        self.require_small()?;
        let p = self.prime().ok_or(GroupError::NotPGroup)? as i64;
        let gens: Vec<Elem> = self.elements().filter(|&g| n.contains(self.pow(g, p))).collect();
        Ok(self.compact(self.subgroup(&gens)))
    }

    /// `Ω_k(G) = ⟨g | g^{p^k} = 1⟩`.
    pub fn omega_k(&self, k: u32) -> Result<Subgroup, GroupError> {
        self.require_small()?;
        let p = self.prime().ok_or(GroupError::NotPGroup)? as i64;
        let q = p.pow(k);
        let gens: Vec<Elem> = self.elements().filter(|&g| self.pow(g, q) == Elem::ONE).collect();
        Ok(self.compact(self.subgroup(&gens)))
    }

    /// `℧_k(G) = G^{p^k} = ⟨g^{p^k}⟩`.
    pub fn agemo(&self, k: u32) -> Result<Subgroup, GroupError> {
        self.require_small()?;
        let p = self.prime().ok_or(GroupError::NotPGroup)? as i64;
        let q = p.pow(k);
        let powers: BTreeSet<Elem> = self.elements().map(|g| self.pow(g, q)).collect();
        let gens: Vec<Elem> = powers.into_iter().collect();
        Ok(self.compact(self.subgroup(&gens)))
    }

    /// `⟨g^k | g ∈ K⟩`.
    pub fn power_subgroup(&self, k_sub: &Subgroup, k: i64) -> Subgroup {
        let powers: BTreeSet<Elem> = k_sub.elements.iter().map(|&g| self.pow(g, k)).collect();
        let gens: Vec<Elem> = powers.into_iter().collect();
        self.compact(self.subgroup(&gens))
    }

    /// Product `KL` of subgroups with `K` or `L` normal.
    pub fn product(&self, k: &Subgroup, l: &Subgroup) -> Subgroup {
        let gens: Vec<Elem> = k.gens.iter().chain(&l.gens).copied().collect();
        self.compact(self.subgroup(&gens))
    }

    pub fn intersection(&self, k: &Subgroup, l: &Subgroup) -> Subgroup {
        let els: Vec<Elem> = k.elements.iter().copied().filter(|&g| l.contains(g)).collect();
        self.subgroup_from_set(els)
    }

    /// Replaces a long generator list with a short one.
    fn compact(&self, s: Subgroup) -> Subgroup {
        if s.gens.len() <= 2 * self.rank() {
            return s;
        }
        let gens = self.minimal_gens_of(&s.elements);
        Subgroup { gens, ..s }
    }

    /// Frattini subgroup: the common kernel of all homomorphisms `G → C_p`.
    pub fn frattini(&self) -> Result<Subgroup, GroupError> {
        self.require_small()?;
        let p = self.prime().ok_or(GroupError::NotPGroup)? as u32;
        let r = self.rank();
        let mut keep = vec![true; self.order];
        let mut choice = vec![0u32; r];
        loop {
            // advance to the next image vector in (Z/p)^r
            let mut k = 0;
            while k < r {
                choice[k] += 1;
                if choice[k] < p {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == r {
                break;
            }
            if !self.is_hom_to_cp(&choice, p) {
                continue;
            }
            for g in self.elements() {
                let img: u64 = self
                    .exponents(g)
                    .iter()
                    .zip(&choice)
                    .map(|(&e, &c)| e as u64 * c as u64)
                    .sum::<u64>()
                    % p as u64;
                if img != 0 {
                    keep[g.index()] = false;
                }
            }
        }
        let els = self.elements().filter(|g| keep[g.index()]).collect();
        Ok(self.subgroup_from_set(els))
    }

    fn is_hom_to_cp(&self, images: &[u32], p: u32) -> bool {
        let eval = |w: &[u32]| -> u64 {
            w.iter().zip(images).map(|(&e, &c)| e as u64 * c as u64).sum::<u64>() % p as u64
        };
        let r = self.rank();
        for i in 0..r {
            if (self.pres.orders[i] as u64 * images[i] as u64) % p as u64 != eval(&self.pres.pow[i]) {
                return false;
            }
            for j in i + 1..r {
                if images[j] as u64 % p as u64 != eval(&self.pres.conj[j][i]) {
                    return false;
                }
            }
        }
        true
    }

    /// Elementary divisors of an abelian subgroup, largest first.
    pub fn abelian_invariants(&self, k: &Subgroup) -> Result<Vec<u64>, GroupError> {
        if !k.gens.iter().all(|&a| k.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a))) {
            return Err(GroupError::NotAbelian);
        }
        if k.order() == 1 {
            return Ok(Vec::new());
        }
        let orders: Vec<u64> = k.elements.iter().map(|&g| self.elem_order(g)).collect();
        let mut primes: Vec<u64> = Vec::new();
        let mut n = k.order() as u64;
        let mut d = 2;
        while n > 1 {
            if n.is_multiple_of(d) {
                primes.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        let mut out = Vec::new();
        for p in primes {
            // log_p |{g : g^{p^j} = 1}| = Σ_i min(j, a_i)
            let mut logs = vec![0u32];
            let mut j = 1;
            loop {
                let q = p.pow(j);
                let cnt = orders.iter().filter(|&&o| q % o == 0).count() as u64;
                let l = ilog(cnt, p);
                logs.push(l);
                if l == logs[logs.len() - 2] {
                    break;
                }
                j += 1;
            }
            // number of invariants with exponent >= j is logs[j] - logs[j-1]
            let at_least: Vec<u32> = (1..logs.len()).map(|j| logs[j] - logs[j - 1]).collect();
            for (j, &cnt) in at_least.iter().enumerate() {
                let next = at_least.get(j + 1).copied().unwrap_or(0);
                for _ in 0..cnt - next {
                    out.push(p.pow(j as u32 + 1));
                }
            }
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        Ok(out)
    }

    /// Conjugacy class of `g` as a sorted list.
    pub fn conjugacy_class(&self, g: Elem) -> Vec<Elem> {
        let gens = self.gens();
        let mut seen = BTreeSet::from([g]);
        let mut queue = VecDeque::from([g]);
        while let Some(x) = queue.pop_front() {
            for &h in &gens {
                let y = self.conjugate(x, h);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// All conjugacy classes, ordered by smallest element.
    pub fn conjugacy_classes(&self) -> Result<Vec<Vec<Elem>>, GroupError> {
        self.require_small()?;
        let mut done = vec![false; self.order];
        let mut classes = Vec::new();
        for g in self.elements() {
            if done[g.index()] {
                continue;
            }
            let class = self.conjugacy_class(g);
            for x in &class {
                done[x.index()] = true;
            }
            classes.push(class);
        }
        Ok(classes)
    }

    // ---- quotients -------------------------------------------------------

    /// A pc presentation of `G/N` together with the projection.
    pub fn quotient(self: &Arc<Self>, n: &Subgroup) -> Result<(Arc<PcGroup>, GroupHom), GroupError> {
        if !self.is_normal(n) {
            return Err(GroupError::NotNormal);
        }
        let r = self.rank();
        // coset labels: smallest element of gN
        let mut label = vec![u32::MAX; self.order];
        for g in self.elements() {
            if label[g.index()] != u32::MAX {
                continue;
            }
            for &x in &n.elements {
                label[self.mul(g, x).index()] = g.0;
            }
        }
        // relative orders along the induced series G_i N / N
        let mut new_orders = Vec::new();
        let mut kept = Vec::new();
        for i in 0..r {
            let in_gi = |g: &Elem, i: usize| (0..i).all(|k| self.exponent(*g, k) == 0);
            let ni = n.elements.iter().filter(|g| in_gi(g, i)).count();
            let ni1 = n.elements.iter().filter(|g| in_gi(g, i + 1)).count();
            // |G_i N : G_{i+1} N| = o_i · |G_{i+1} ∩ N| / |G_i ∩ N|
            let o = self.pres.orders[i] as usize * ni1 / ni;
            if o > 1 {
                kept.push(i);
                new_orders.push(o as u32);
            }
        }
        let rq = kept.len();
        let qstrides: Vec<usize> = {
            let mut s = vec![1usize; rq];
            for k in (0..rq.saturating_sub(1)).rev() {
                s[k] = s[k + 1] * new_orders[k + 1] as usize;
            }
            s
        };
        let qorder: usize = new_orders.iter().map(|&o| o as usize).product();
        // coset label -> quotient exponent vector
        let mut word_of: HashMap<u32, Vec<u32>> = HashMap::with_capacity(qorder);
        for idx in 0..qorder {
            let mut exps = vec![0u32; rq];
            let mut g = Elem::ONE;
            for k in 0..rq {
                exps[k] = ((idx / qstrides[k]) % new_orders[k] as usize) as u32;
                g = self.mul(g, self.pow(self.gen(kept[k]), exps[k] as i64));
            }
            let prev = word_of.insert(label[g.index()], exps);
            debug_assert!(prev.is_none());
        }
        let names: Vec<String> = kept.iter().map(|&i| self.pres.names[i].clone()).collect();
        let mut pres = PcPresentation::free_abelian_like(names, new_orders.clone());
        for (k, &i) in kept.iter().enumerate() {
            let p = self.pow(self.gen(i), new_orders[k] as i64);
            pres.set_pow(k, word_of[&label[p.index()]].clone());
            for (kj, &j) in kept.iter().enumerate().skip(k + 1) {
                let c = self.conjugate(self.gen(j), self.gen(i));
                pres.set_conj(kj, k, word_of[&label[c.index()]].clone());
            }
        }
        let q = Arc::new(PcGroup::new(format!("{}/N", self.name), pres)?);
        let map: Vec<u32> = self
            .elements()
            .map(|g| q.elem_unchecked(&word_of[&label[g.index()]]).0)
            .collect();
        let images = self.gens().iter().map(|g| Elem(map[g.index()])).collect();
        Ok((q.clone(), GroupHom { src: self.clone(), dst: q, images, map }))
    }
}

fn ilog(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n > 1 {
        n /= p;
        k += 1;
    }
    k
}

/// A subgroup: sorted element list and a generating list.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub elements: Vec<Elem>,
    pub gens: Vec<Elem>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: Elem) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }
}

/// A homomorphism between pc groups, tabulated on all elements.
#[derive(Clone)]
pub struct GroupHom {
    src: Arc<PcGroup>,
    dst: Arc<PcGroup>,
    images: Vec<Elem>,
    map: Vec<u32>,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHom({} -> {})", self.src.name(), self.dst.name())
    }
}

impl GroupHom {
    /// The homomorphism sending pc generator `i` of `src` to `images[i]`,
    /// after checking every defining relation.
    pub fn from_images(src: Arc<PcGroup>, dst: Arc<PcGroup>, images: Vec<Elem>) -> Result<Self, GroupError> {
        let r = src.rank();
        if images.len() != r {
            return Err(GroupError::DimensionMismatch { expected: r, got: images.len() });
        }
        let eval = |w: &[u32]| -> Elem {
            w.iter().enumerate().fold(Elem::ONE, |acc, (k, &e)| dst.mul(acc, dst.pow(images[k], e as i64)))
        };
        let pres = src.presentation();
        for i in 0..r {
            if dst.pow(images[i], pres.orders[i] as i64) != eval(&pres.pow[i]) {
                return Err(GroupError::NotAHomomorphism(format!("power of {}", pres.names[i])));
            }
            for j in i + 1..r {
                if dst.conjugate(images[j], images[i]) != eval(&pres.conj[j][i]) {
                    return Err(GroupError::NotAHomomorphism(format!(
                        "{}^{}",
                        pres.names[j], pres.names[i]
                    )));
                }
            }
        }
        let map = src.elements().map(|g| eval(&src.exponents(g)).0).collect();
        Ok(GroupHom { src, dst, images, map })
    }

    pub fn src(&self) -> &Arc<PcGroup> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<PcGroup> {
        &self.dst
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    pub fn apply(&self, g: Elem) -> Elem {
        Elem(self.map[g.index()])
    }

    pub fn kernel(&self) -> Subgroup {
        let els: Vec<Elem> = self.src.elements().filter(|&g| self.map[g.index()] == 0).collect();
        self.src.subgroup_from_set(els)
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.dst.order()];
        for &x in &self.map {
            hit[x as usize] = true;
        }
        hit.into_iter().all(|b| b)
    }

    pub fn is_isomorphism(&self) -> bool {
        self.src.order() == self.dst.order() && self.is_surjective()
    }
}

/// Searches for an isomorphism by trying generator images (small groups).
pub fn find_isomorphism(a: &Arc<PcGroup>, b: &Arc<PcGroup>) -> Option<GroupHom> {
    if a.order() != b.order() || a.order() > 256 {
        return None;
    }
    let r = a.rank();
    let mut choice = vec![0usize; r];
    // candidate images must have matching element order
    let cands: Vec<Vec<Elem>> = a
        .gens()
        .iter()
        .map(|&g| {
            let o = a.elem_order(g);
            b.elements().filter(|&h| b.elem_order(h) == o).collect()
        })
        .collect();
    if cands.iter().any(|c| c.is_empty()) {
        return None;
    }
    loop {
        let images: Vec<Elem> = (0..r).map(|k| cands[k][choice[k]]).collect();
        if let Ok(h) = GroupHom::from_images(a.clone(), b.clone(), images) {
            if h.is_isomorphism() {
                return Some(h);
            }
        }
        let mut k = 0;
        while k < r {
            choice[k] += 1;
            if choice[k] < cands[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == r {
            return None;
        }
    }
}

// ---- families ---------------------------------------------------------------

fn pow2(k: u32) -> u32 {
    1u32 << k
}

fn check_nml(n: u32, m: u32, l: u32) -> Result<(), GroupError> {
    if !(n > m && m > l && l >= 2) {
        return Err(GroupError::BadParameters(format!("need n > m > l >= 2, got ({n},{m},{l})")));
    }
    if n + m + l > 16 {
        return Err(GroupError::TooLarge(1usize << (n + m + l).min(63)));
    }
    Ok(())
}

/// `⟨x,y,z | x^{2^n}, y^{2^m}, z^{2^l}, [y,x]=z, [z,x]=z^{-2}, [z,y]=z^{-2}⟩`.
pub fn family_g(n: u32, m: u32, l: u32) -> Result<PcPresentation, GroupError> {
    check_nml(n, m, l)?;
    let zinv = pow2(l) - 1;
    let mut p = PcPresentation::free_abelian_like(
        vec!["x".into(), "y".into(), "z".into()],
        vec![pow2(n), pow2(m), pow2(l)],
    );
    p.set_conj(1, 0, vec![0, 1, 1]);
    p.set_conj(2, 0, vec![0, 0, zinv]);
    p.set_conj(2, 1, vec![0, 0, zinv]);
    Ok(p)
}

/// `⟨a,b,c | a^{2^n}, b^{2^m}=a^{2^m}, c^{2^l}, [b,a]=c, [c,a]=c^{-2}, [c,b]=c^{-2}⟩`
/// on the pc sequence `(b, a, c)`.
pub fn family_h(n: u32, m: u32, l: u32) -> Result<PcPresentation, GroupError> {
    check_nml(n, m, l)?;
    let cinv = pow2(l) - 1;
    let mut p = PcPresentation::free_abelian_like(
        vec!["b".into(), "a".into(), "c".into()],
        vec![pow2(m), pow2(n), pow2(l)],
    );
    p.set_pow(0, vec![0, pow2(m), 0]);
    p.set_conj(1, 0, vec![0, 1, cinv]);
    p.set_conj(2, 0, vec![0, 0, cinv]);
    p.set_conj(2, 1, vec![0, 0, cinv]);
    Ok(p)
}

/// The cyclic group of order `2^n` on generator `u`.
pub fn cyclic2(n: u32) -> Result<PcPresentation, GroupError> {
    if n == 0 || n > 15 {
        return Err(GroupError::BadParameters(format!("need 1 <= n <= 15, got {n}")));
    }
    Ok(PcPresentation::free_abelian_like(vec!["u".into()], vec![pow2(n)]))
}

/// A cyclic group of prime-power order.
pub fn cyclic(order: u32) -> Result<PcPresentation, GroupError> {
    if prime_of(order as u64).is_none() {
        return Err(GroupError::BadParameters(format!("{order} is not a prime power")));
    }
    Ok(PcPresentation::free_abelian_like(vec!["u".into()], vec![order]))
}

/// `⟨u,v,w | u², v², w⁴, [v,u]=w, [w,u]=w², [w,v]=w²⟩`.
pub fn dihedral16() -> PcPresentation {
    let mut p = PcPresentation::free_abelian_like(
        vec!["u".into(), "v".into(), "w".into()],
        vec![2, 2, 4],
    );
    p.set_conj(1, 0, vec![0, 1, 1]);
    p.set_conj(2, 0, vec![0, 0, 3]);
    p.set_conj(2, 1, vec![0, 0, 3]);
    p
}

/// Builds one of the named families: `G(n,m,l)`, `H(n,m,l)`, `C2^n`, `D16`.
pub fn builtin(name: &str) -> Option<Result<PcGroup, GroupError>> {
    let name = name.trim();
    let triple = |s: &str| -> Option<(u32, u32, u32)> {
        let inner = s.strip_prefix('(')?.strip_suffix(')')?;
        let v: Vec<u32> = inner.split(',').map(|t| t.trim().parse().ok()).collect::<Option<_>>()?;
        (v.len() == 3).then(|| (v[0], v[1], v[2]))
    };
    let pres = if let Some(rest) = name.strip_prefix('G') {
        let (n, m, l) = triple(rest)?;
        family_g(n, m, l)
    } else if let Some(rest) = name.strip_prefix('H') {
        let (n, m, l) = triple(rest)?;
        family_h(n, m, l)
    } else if let Some(rest) = name.strip_prefix("C2^") {
        cyclic2(rest.trim().parse().ok()?)
    } else if name == "D16" {
        Ok(dihedral16())
    } else {
        return None;
    };
    Some(pres.and_then(|p| PcGroup::new(name.replace(' ', ""), p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g432() -> PcGroup {
        PcGroup::new("G", family_g(4, 3, 2).unwrap()).unwrap()
    }

    fn h432() -> Arc<PcGroup> {
        Arc::new(PcGroup::new("H", family_h(4, 3, 2).unwrap()).unwrap())
    }

    /// Naive collector on words: repeatedly rewrite the leftmost
    /// out-of-order or overflowing syllable.
    fn naive_mul(p: &PcPresentation, g: &[u32], h: &[u32]) -> Vec<u32> {
        let r = p.rank();
        let mut stack: Vec<usize> = Vec::new();
        for (i, &e) in h.iter().enumerate().rev() {
            for _ in 0..e {
                stack.push(i);
            }
        }
        let mut cur = g.to_vec();
        while let Some(i) = stack.pop() {
            // cur · g_i where cur is a normal word
            let tail: Vec<u32> = (0..r).map(|k| if k > i { cur[k] } else { 0 }).collect();
            for k in i + 1..r {
                cur[k] = 0;
            }
            cur[i] += 1;
            let mut pending: Vec<usize> = Vec::new();
            if cur[i] == p.orders[i] {
                cur[i] = 0;
                for (k, &e) in p.pow[i].iter().enumerate() {
                    for _ in 0..e {
                        pending.push(k);
                    }
                }
            }
            // then multiply by tail^{g_i} = Π (g_k^{g_i})^{e_k}
            for (k, &e) in tail.iter().enumerate() {
                for _ in 0..e {
                    for (kk, &ee) in p.conj[k][i].iter().enumerate() {
                        for _ in 0..ee {
                            pending.push(kk);
                        }
                    }
                }
            }
            for &k in pending.iter().rev() {
                stack.push(k);
            }
        }
        cur
    }

    #[test]
    fn orders_of_families() {
        assert_eq!(g432().order(), 512);
        let h = h432();
        assert_eq!(h.order(), 512);
        assert_eq!(h.elem_order(h.gen_by_name("b").unwrap()), 16);
        let d = PcGroup::new("D16", dihedral16()).unwrap();
        let uv = d.mul(d.gen(0), d.gen(1));
        assert_eq!(d.elem_order(uv), 8);
        assert_eq!(d.mul(uv, uv), d.pow(d.gen(2), 3));
    }

    #[test]
    fn table_collection_matches_naive_collector() {
        for pres in [family_g(4, 3, 2).unwrap(), family_h(4, 3, 2).unwrap(), dihedral16()] {
            let g = PcGroup::new("t", pres.clone()).unwrap();
            let step = (g.order() / 37).max(1);
            for a in g.elements().step_by(step) {
                for b in g.elements().step_by(step / 2 + 1) {
                    let ea = g.exponents(a);
                    let eb = g.exponents(b);
                    assert_eq!(g.exponents(g.mul(a, b)), naive_mul(&pres, &ea, &eb));
                }
            }
        }
    }

    #[test]
    fn basic_relations_in_g() {
        let g = g432();
        let (x, y, z) = (g.gen(0), g.gen(1), g.gen(2));
        assert_eq!(g.exponents(g.mul(y, x)), vec![1, 1, 1]);
        assert_eq!(g.exponents(g.mul(z, x)), vec![1, 0, 3]);
        let xy = g.mul(x, y);
        assert_eq!(g.exponents(g.mul(xy, xy)), vec![2, 2, 3]);
        assert_eq!(g.commutator(y, x), z);
        assert_eq!(g.elem_order(x), 16);
        assert_eq!(g.conjugate(y, x), g.mul(y, z));
        assert_eq!(g.commutator(z, x), g.pow(z, -2));
        assert_eq!(g.commutator(z, y), g.pow(z, -2));
    }

    #[test]
    fn basic_relations_in_h() {
        let h = h432();
        let a = h.gen_by_name("a").unwrap();
        let b = h.gen_by_name("b").unwrap();
        let c = h.gen_by_name("c").unwrap();
        assert_eq!(h.commutator(b, a), c);
        assert_eq!(h.commutator(c, a), h.pow(c, -2));
        assert_eq!(h.commutator(c, b), h.pow(c, -2));
        assert_eq!(h.pow(b, 8), h.pow(a, 8));
        assert_eq!(h.elem_order(a), 16);
        assert_eq!(h.conjugate(b, a), h.mul(b, c));
        assert_eq!(h.conjugate(a, b), h.mul(a, h.inv(c)));
    }

    #[test]
    fn inconsistent_presentation_is_rejected() {
        // y ↦ y^2 has order 6 on C9, so it cannot be conjugation by an involution
        let mut p = PcPresentation::free_abelian_like(vec!["x".into(), "y".into()], vec![2, 9]);
        p.set_conj(1, 0, vec![0, 2]);
        assert!(matches!(PcGroup::new("bad", p), Err(GroupError::Inconsistent(_))));
        let mut q = PcPresentation::free_abelian_like(vec!["x".into(), "y".into()], vec![2, 4]);
        q.set_conj(1, 0, vec![0, 3]);
        assert!(PcGroup::new("q8ish", q).is_ok());
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(family_g(3, 3, 2), Err(GroupError::BadParameters(_))));
        assert!(matches!(family_h(4, 3, 1), Err(GroupError::BadParameters(_))));
        let mut p = PcPresentation::free_abelian_like(vec!["x".into(), "y".into()], vec![2, 2]);
        p.set_pow(1, vec![1, 0]);
        assert!(matches!(PcGroup::new("b", p), Err(GroupError::BadParameters(_))));
    }

    #[test]
    fn subgroups_of_g() {
        let g = g432();
        let z = g.center().unwrap();
        assert_eq!(g.abelian_invariants(&z).unwrap(), vec![8, 4, 2]);
        let d = g.derived().unwrap();
        assert_eq!(d.order(), 4);
        let om = g.omega_rel(&d).unwrap();
        assert_eq!(g.abelian_invariants(&om).unwrap(), vec![4, 2, 2]);
        let c = g.centralizer(&d).unwrap();
        assert_eq!(g.abelian_invariants(&c).unwrap(), vec![16, 4, 4]);
        assert_eq!(g.abelian_invariants(&g.trivial()).unwrap(), Vec::<u64>::new());
        assert_eq!(g.abelian_invariants(&g.whole()), Err(GroupError::NotAbelian));
    }

    #[test]
    fn frattini_is_squares_times_derived() {
        for pres in [family_g(4, 3, 2).unwrap(), family_h(4, 3, 2).unwrap(), dihedral16()] {
            let g = PcGroup::new("t", pres).unwrap();
            let phi = g.frattini().unwrap();
            let sq = g.agemo(1).unwrap();
            let d = g.derived().unwrap();
            assert_eq!(phi, g.product(&sq, &d));
            assert_eq!(g.lower_central(2).unwrap(), d);
        }
    }

    #[test]
    fn quotients_of_h() {
        let h = h432();
        let a = h.gen_by_name("a").unwrap();
        let b = h.gen_by_name("b").unwrap();
        let c = h.gen_by_name("c").unwrap();
        let n1 = h.normal_closure(&[h.pow(a, 16), h.mul(h.inv(a), b), c]);
        let (q, pi) = h.quotient(&n1).unwrap();
        assert_eq!(q.order(), 16);
        assert!(q.is_abelian());
        assert_eq!(q.elem_order(pi.apply(a)), 16);
        assert_eq!(pi.kernel(), n1);

        let n2 = h.normal_closure(&[h.pow(a, 2), h.pow(b, 2), h.pow(c, 4)]);
        let (q2, _) = h.quotient(&n2).unwrap();
        let d16 = Arc::new(PcGroup::new("D16", dihedral16()).unwrap());
        assert!(find_isomorphism(&q2, &d16).is_some());

        let (triv, _) = h.quotient(&h.whole()).unwrap();
        assert_eq!(triv.order(), 1);
    }

    #[test]
    fn hom_h_to_d16() {
        let h = h432();
        let d = Arc::new(PcGroup::new("D16", dihedral16()).unwrap());
        // pc order of H is (b, a, c)
        let f = GroupHom::from_images(h.clone(), d.clone(), vec![d.gen(1), d.gen(0), d.gen(2)]).unwrap();
        assert!(f.is_surjective());
        let a = h.gen_by_name("a").unwrap();
        let b = h.gen_by_name("b").unwrap();
        let c = h.gen_by_name("c").unwrap();
        let n2 = h.normal_closure(&[h.pow(a, 2), h.pow(b, 2), h.pow(c, 4)]);
        assert_eq!(f.kernel(), n2);
        assert!(GroupHom::from_images(h.clone(), d.clone(), vec![d.gen(2), d.gen(0), d.gen(2)]).is_err());
    }

    #[test]
    fn not_normal_is_rejected() {
        let g = Arc::new(g432());
        let k = g.subgroup(&[g.gen(1)]);
        assert!(matches!(g.quotient(&k), Err(GroupError::NotNormal)));
    }

    #[test]
    fn builtins_parse() {
        assert_eq!(builtin("G(4,3,2)").unwrap().unwrap().order(), 512);
        assert_eq!(builtin("C2^3").unwrap().unwrap().order(), 8);
        assert_eq!(builtin("D16").unwrap().unwrap().order(), 16);
        assert!(builtin("Q8").is_none());
        assert!(builtin("G(2,3,4)").unwrap().is_err());
    }
}
