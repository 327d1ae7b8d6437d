//! Group algebras `SG` and their augmentation filtrations.
//!
//! An element of `SG` is stored flat: the coefficient of group element `g`
//! occupies positions `g*e .. g*e + e` where `e` is the ring degree. Ideals of
//! `SG` are therefore [`HowellModule`]s of dimension `|G|·e` over `Z/mZ`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigUint;
use serde_json::{json, Value};
use thiserror::Error;

use crate::coefring::{CoefRing, ResidueField, RingElem, RingError};
use crate::modlinalg::{HowellBuilder, HowellModule, LinalgError};
use crate::pcgroup::{Elem, GroupError, GroupHom, PcGroup};

/// Largest flattened dimension `|G|·e` accepted for ideal computations.
pub const MAX_FLAT_DIM: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("elements belong to different group algebras")]
    AlgebraMismatch,
    #[error("filtration computed to depth {max}, asked for {k}")]
    RangeExceeded { k: usize, max: usize },
    #[error("flattened dimension {0} exceeds the bound")]
    TooLarge(usize),
    #[error("target field is not the residue field of this ring")]
    RingMismatch,
    #[error("element is not invertible")]
    NotInvertible,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `SG` for a coefficient ring `S` and a pc group `G`.
pub struct GroupAlgebra {
    ring: CoefRing,
    group: Arc<PcGroup>,
}

impl fmt::Debug for GroupAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.ring.spec_string(), self.group.name())
    }
}

impl PartialEq for GroupAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && *self.group == *other.group
    }
}

impl GroupAlgebra {
    pub fn new(ring: CoefRing, group: Arc<PcGroup>) -> Arc<Self> {
        Arc::new(GroupAlgebra { ring, group })
    }

    pub fn ring(&self) -> &CoefRing {
        &self.ring
    }

    pub fn group(&self) -> &Arc<PcGroup> {
        &self.group
    }

    /// `|G|·e`.
    pub fn flat_dim(&self) -> usize {
        self.group.order() * self.ring.degree()
    }

    pub fn modulus(&self) -> u32 {
        self.ring.modulus()
    }

    fn check_dim(&self) -> Result<(), AlgError> {
        if self.flat_dim() > MAX_FLAT_DIM {
            return Err(AlgError::TooLarge(self.flat_dim()));
        }
        Ok(())
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement { alg: self.clone(), coeffs: vec![0; self.flat_dim()] }
    }

    pub fn one(self: &Arc<Self>) -> AlgebraElement {
        self.basis(Elem::ONE)
    }

    /// The group element `g` as an element of `SG`.
    pub fn basis(self: &Arc<Self>, g: Elem) -> AlgebraElement {
        self.term(g, &self.ring.one())
    }

    /// `s·g`.
    pub fn term(self: &Arc<Self>, g: Elem, s: &RingElem) -> AlgebraElement {
        let mut x = self.zero();
        let e = self.ring.degree();
        x.coeffs[g.index() * e..(g.index() + 1) * e].copy_from_slice(s.coeffs());
        x
    }

    pub fn scalar(self: &Arc<Self>, s: &RingElem) -> AlgebraElement {
        self.term(Elem::ONE, s)
    }

    pub fn from_int(self: &Arc<Self>, c: i64) -> AlgebraElement {
        self.scalar(&self.ring.from_int(c))
    }

    /// `g - 1`.
    pub fn minus_one(self: &Arc<Self>, g: Elem) -> AlgebraElement {
        &self.basis(g) - &self.one()
    }

    /// `g - 1` for a named pc generator.
    pub fn gen_minus_one(self: &Arc<Self>, name: &str) -> Option<AlgebraElement> {
        self.group.gen_by_name(name).map(|g| self.minus_one(g))
    }

    pub fn from_flat(self: &Arc<Self>, coeffs: Vec<u32>) -> Result<AlgebraElement, AlgError> {
        if coeffs.len() != self.flat_dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.flat_dim(), got: coeffs.len() }.into());
        }
        let zm = self.ring.zm();
        Ok(AlgebraElement { alg: self.clone(), coeffs: coeffs.into_iter().map(|c| zm.reduce(c)).collect() })
    }

    /// Right multiplication of a flat vector by a group element.
    pub fn flat_mul_group(&self, v: &[u32], g: Elem) -> Vec<u32> {
        let e = self.ring.degree();
        let mut out = vec![0u32; v.len()];
        for h in self.group.elements() {
            let src = &v[h.index() * e..(h.index() + 1) * e];
            if src.iter().all(|&c| c == 0) {
                continue;
            }
            let hg = self.group.mul(h, g).index();
            out[hg * e..(hg + 1) * e].copy_from_slice(src);
        }
        out
    }

    /// Left multiplication of a flat vector by a group element.
    pub fn flat_group_mul(&self, g: Elem, v: &[u32]) -> Vec<u32> {
        let e = self.ring.degree();
        let mut out = vec![0u32; v.len()];
        for h in self.group.elements() {
            let src = &v[h.index() * e..(h.index() + 1) * e];
            if src.iter().all(|&c| c == 0) {
                continue;
            }
            let gh = self.group.mul(g, h).index();
            out[gh * e..(gh + 1) * e].copy_from_slice(src);
        }
        out
    }

    /// Multiplication of a flat vector by a scalar of `S`.
    pub fn flat_scale(&self, v: &[u32], s: &RingElem) -> Vec<u32> {
        let e = self.ring.degree();
        let zm = self.ring.zm();
        if e == 1 {
            let c = s.coeffs()[0];
            return v.iter().map(|&x| zm.mul(x, c)).collect();
        }
        let mut out = vec![0u32; v.len()];
        for (o, x) in out.chunks_mut(e).zip(v.chunks(e)) {
            self.ring.mul_acc(o, 1, x, s.coeffs());
        }
        out
    }

    /// `Δ(SG)`: the span of `t^j(g - 1)`.
    pub fn augmentation_ideal(self: &Arc<Self>) -> Result<HowellModule, AlgError> {
        self.check_dim()?;
        let e = self.ring.degree();
        let mut b = HowellBuilder::new(self.modulus(), self.flat_dim())?;
        for g in self.group.elements().skip(1) {
            for j in 0..e {
                let mut v = vec![0u32; self.flat_dim()];
                v[g.index() * e + j] = 1;
                v[j] = self.ring.zm().neg(1);
                b.insert(v)?;
            }
        }
        Ok(b.finish())
    }

    /// `n·SG`, the kernel of the projection to `FG`.
    pub fn ideal_times_algebra(self: &Arc<Self>) -> Result<HowellModule, AlgError> {
        self.check_dim()?;
        let e = self.ring.degree();
        let mut b = HowellBuilder::new(self.modulus(), self.flat_dim())?;
        for g in self.group.elements() {
            for row in self.ring.ideal().rows() {
                let mut v = vec![0u32; self.flat_dim()];
                v[g.index() * e..(g.index() + 1) * e].copy_from_slice(row);
                b.insert(v)?;
            }
        }
        Ok(b.finish())
    }

    /// The Z/mZ-span of `t^j · K` over conjugacy class sums `K`; equals
    /// the center `Z(SG)`.
    pub fn central_submodule(self: &Arc<Self>) -> Result<HowellModule, AlgError> {
        self.check_dim()?;
        let e = self.ring.degree();
        let classes = self.group.conjugacy_classes()?;
        let mut rows = Vec::new();
        for class in classes {
            for j in 0..e {
                let mut v = vec![0u32; self.flat_dim()];
                for g in &class {
                    v[g.index() * e + j] = 1;
                }
                rows.push(v);
            }
        }
        Ok(HowellModule::from_rows(self.modulus(), self.flat_dim(), rows)?)
    }

    /// One step `M ↦ M·Θ` (or `M·Δ` when `with_ideal` is false) for a right
    /// ideal `M`, via the generators `g_i - 1` of `Δ` as a left ideal.
    pub fn filtration_step(&self, m: &HowellModule, with_ideal: bool) -> Result<HowellModule, AlgError> {
        let mut b = HowellBuilder::new(self.modulus(), self.flat_dim())?;
        let zm = self.ring.zm();
        let gens = self.group.gens();
        for u in m.rows() {
            if with_ideal {
                for nu in self.ring.ideal_gens() {
                    b.insert(self.flat_scale(u, nu))?;
                }
            }
            for &g in &gens {
                let mut v = self.flat_mul_group(u, g);
                for (x, &y) in v.iter_mut().zip(u) {
                    *x = zm.sub(*x, y);
                }
                b.insert(v)?;
            }
        }
        Ok(b.finish())
    }

    /// Same as [`filtration_step`](Self::filtration_step) but multiplying by
    /// `h - 1` for every `h ∈ G`; used to cross-check the generator shortcut.
    pub fn filtration_step_all_elements(&self, m: &HowellModule, with_ideal: bool) -> Result<HowellModule, AlgError> {
        let mut b = HowellBuilder::new(self.modulus(), self.flat_dim())?;
        let zm = self.ring.zm();
        for u in m.rows() {
            if with_ideal {
                for nu in self.ring.ideal_gens() {
                    b.insert(self.flat_scale(u, nu))?;
                }
            }
            for g in self.group.elements().skip(1) {
                let mut v = self.flat_mul_group(u, g);
                for (x, &y) in v.iter_mut().zip(u) {
                    *x = zm.sub(*x, y);
                }
                b.insert(v)?;
            }
        }
        Ok(b.finish())
    }

    /// `Θ^0 ⊇ Θ^1 ⊇ … ⊇ Θ^depth` for `Θ = Δ(SG : n) = n ⊕ Δ(SG)`.
    pub fn theta_powers(self: &Arc<Self>, depth: usize) -> Result<IdealFiltration, AlgError> {
        self.powers(depth, true)
    }

    /// `Δ(SG)^k` for `k ≤ depth`.
    pub fn delta_powers(self: &Arc<Self>, depth: usize) -> Result<IdealFiltration, AlgError> {
        self.powers(depth, false)
    }

    fn powers(self: &Arc<Self>, depth: usize, with_ideal: bool) -> Result<IdealFiltration, AlgError> {
        self.check_dim()?;
        let mut levels = vec![HowellModule::full(self.modulus(), self.flat_dim())?];
        for k in 1..=depth {
            let prev = &levels[k - 1];
            let next = if prev.is_zero() {
                prev.clone()
            } else if k == 1 && !with_ideal {
                self.augmentation_ideal()?
            } else {
                self.filtration_step(prev, with_ideal)?
            };
            levels.push(next);
        }
        Ok(IdealFiltration { alg: self.clone(), levels, with_ideal })
    }

    /// `Δ(SG)^k` until it vanishes (at most `cap` steps).
    pub fn delta_powers_to_zero(self: &Arc<Self>, cap: usize) -> Result<IdealFiltration, AlgError> {
        self.powers_to_zero(cap, false)
    }

    /// `Θ^k` until it vanishes (at most `cap` steps).
    pub fn theta_powers_to_zero(self: &Arc<Self>, cap: usize) -> Result<IdealFiltration, AlgError> {
        self.powers_to_zero(cap, true)
    }

    fn powers_to_zero(self: &Arc<Self>, cap: usize, with_ideal: bool) -> Result<IdealFiltration, AlgError> {
        let mut f = self.powers(1, with_ideal)?;
        while !f.levels.last().unwrap().is_zero() && f.depth() < cap {
            let next = self.filtration_step(f.levels.last().unwrap(), with_ideal)?;
            f.levels.push(next);
        }
        Ok(f)
    }

    /// The algebra map `SG → SK` induced by a group homomorphism.
    pub fn pushforward(self: &Arc<Self>, hom: &GroupHom, target: &Arc<GroupAlgebra>, x: &AlgebraElement) -> Result<AlgebraElement, AlgError> {
        if x.alg.as_ref() != self.as_ref() || target.ring != self.ring || **hom.src() != *self.group || **hom.dst() != *target.group {
            return Err(AlgError::AlgebraMismatch);
        }
        let e = self.ring.degree();
        let zm = self.ring.zm();
        let mut out = target.zero();
        for g in self.group.elements() {
            let k = hom.apply(g).index();
            for j in 0..e {
                let c = x.coeffs[g.index() * e + j];
                if c != 0 {
                    out.coeffs[k * e + j] = zm.add(out.coeffs[k * e + j], c);
                }
            }
        }
        Ok(out)
    }

    /// `F G` for the residue field `F = S/n`.
    pub fn residue_algebra(self: &Arc<Self>, f: &ResidueField) -> Result<Arc<GroupAlgebra>, AlgError> {
        if f.source() != &self.ring {
            return Err(AlgError::RingMismatch);
        }
        Ok(GroupAlgebra::new(f.as_ring().clone(), self.group.clone()))
    }

    /// Coefficient-wise projection `π̂ : SG → FG`.
    pub fn base_change(self: &Arc<Self>, x: &AlgebraElement, f: &ResidueField, target: &Arc<GroupAlgebra>) -> Result<AlgebraElement, AlgError> {
        if f.source() != &self.ring || target.ring != *f.as_ring() || x.alg.as_ref() != self.as_ref() {
            return Err(AlgError::RingMismatch);
        }
        let e = self.ring.degree();
        let mut coeffs = Vec::with_capacity(target.flat_dim());
        for block in x.coeffs.chunks(e) {
            coeffs.extend(f.project_coeffs(block));
        }
        target.from_flat(coeffs)
    }

    /// `π̂⁻¹(M)` for a module `M ⊆ FG`.
    pub fn base_change_preimage(self: &Arc<Self>, m: &HowellModule, f: &ResidueField) -> Result<HowellModule, AlgError> {
        let e = self.ring.degree();
        let ef = f.as_ring().degree();
        let mut b = HowellBuilder::from_module(&self.ideal_times_algebra()?);
        for row in m.rows() {
            let mut v = vec![0u32; self.flat_dim()];
            for (g, block) in row.chunks(ef).enumerate() {
                v[g * e..g * e + ef].copy_from_slice(block);
            }
            b.insert(v)?;
        }
        Ok(b.finish())
    }

    /// Products `u·ν` of module rows with the ideal generators.
    pub fn module_times_ideal(&self, m: &HowellModule) -> Result<HowellModule, AlgError> {
        let mut b = HowellBuilder::new(self.modulus(), self.flat_dim())?;
        for u in m.rows() {
            for nu in self.ring.ideal_gens() {
                b.insert(self.flat_scale(u, nu))?;
            }
        }
        Ok(b.finish())
    }
}

/// An element of a group algebra.
#[derive(Clone)]
pub struct AlgebraElement {
    alg: Arc<GroupAlgebra>,
    coeffs: Vec<u32>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && (Arc::ptr_eq(&self.alg, &other.alg) || *self.alg == *other.alg)
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl AlgebraElement {
    pub fn algebra(&self) -> &Arc<GroupAlgebra> {
        &self.alg
    }

    pub fn flat(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coefficient(&self, g: Elem) -> RingElem {
        let e = self.alg.ring.degree();
        RingElem(self.coeffs[g.index() * e..(g.index() + 1) * e].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn support(&self) -> Vec<Elem> {
        let e = self.alg.ring.degree();
        self.coeffs
            .chunks(e)
            .enumerate()
            .filter(|(_, c)| c.iter().any(|&x| x != 0))
            .map(|(g, _)| Elem(g as u32))
            .collect()
    }

    fn same(&self, other: &Self) -> Result<(), AlgError> {
        if Arc::ptr_eq(&self.alg, &other.alg) || *self.alg == *other.alg {
            Ok(())
        } else {
            Err(AlgError::AlgebraMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgError> {
        self.same(other)?;
        let zm = self.alg.ring.zm();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| zm.add(a, b)).collect();
        Ok(AlgebraElement { alg: self.alg.clone(), coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgError> {
        self.same(other)?;
        let zm = self.alg.ring.zm();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| zm.sub(a, b)).collect();
        Ok(AlgebraElement { alg: self.alg.clone(), coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgError> {
        self.same(other)?;
        let ring = &self.alg.ring;
        let group = &self.alg.group;
        let e = ring.degree();
        let zm = ring.zm();
        let mut out = vec![0u32; self.coeffs.len()];
        let lhs: Vec<(usize, &[u32])> =
            self.coeffs.chunks(e).enumerate().filter(|(_, c)| c.iter().any(|&x| x != 0)).collect();
        let rhs: Vec<(usize, &[u32])> =
            other.coeffs.chunks(e).enumerate().filter(|(_, c)| c.iter().any(|&x| x != 0)).collect();
        for &(g, a) in &lhs {
            for &(h, b) in &rhs {
                let gh = group.mul(Elem(g as u32), Elem(h as u32)).index();
                if e == 1 {
                    out[gh] = zm.add(out[gh], zm.mul(a[0], b[0]));
                } else {
                    ring.mul_acc(&mut out[gh * e..(gh + 1) * e], 1, a, b);
                }
            }
        }
        Ok(AlgebraElement { alg: self.alg.clone(), coeffs: out })
    }

    pub fn scale(&self, s: &RingElem) -> Self {
        AlgebraElement { alg: self.alg.clone(), coeffs: self.alg.flat_scale(&self.coeffs, s) }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&self.alg.ring.from_int(c))
    }

    pub fn mul_group(&self, g: Elem) -> Self {
        AlgebraElement { alg: self.alg.clone(), coeffs: self.alg.flat_mul_group(&self.coeffs, g) }
    }

    pub fn group_mul(&self, g: Elem) -> Self {
        AlgebraElement { alg: self.alg.clone(), coeffs: self.alg.flat_group_mul(g, &self.coeffs) }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = self.alg.one();
        let mut sq = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// Lie commutator `xy - yx`.
    pub fn lie(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn checked_lie(&self, other: &Self) -> Result<Self, AlgError> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    /// `ε(x) = Σ α_g`.
    pub fn augmentation(&self) -> RingElem {
        let ring = &self.alg.ring;
        let e = ring.degree();
        let mut acc = ring.zero();
        for c in self.coeffs.chunks(e) {
            acc = ring.add(&acc, &RingElem(c.to_vec()));
        }
        acc
    }

    /// Whether `x` commutes with every group element.
    pub fn is_central(&self) -> bool {
        self.alg.group.gens().into_iter().all(|g| self.mul_group(g).coeffs == self.group_mul(g).coeffs)
    }

    /// Exact inverse when `ε(x)` is a unit and `x/ε(x) - 1` is nilpotent.
    pub fn inverse(&self) -> Result<Self, AlgError> {
        let ring = &self.alg.ring;
        let u = ring.inverse(&self.augmentation()).ok_or(AlgError::NotInvertible)?;
        let y = &self.scale(&u) - &self.alg.one();
        // (1 + y)^{-1} = Σ (-y)^k, which terminates because y is nilpotent
        let neg_y = -&y;
        let mut term = self.alg.one();
        let mut acc = self.alg.one();
        for _ in 0..4 * self.coeffs.len() + 8 {
            term = &term * &neg_y;
            if term.is_zero() {
                return Ok(acc.scale(&u));
            }
            acc = &acc + &term;
        }
        Err(AlgError::NotInvertible)
    }

    /// Terms as text, e.g. `1*1 + 3*x*y`.
    pub fn to_text(&self) -> String {
        let ring = &self.alg.ring;
        let group = &self.alg.group;
        let terms: Vec<String> = self
            .support()
            .into_iter()
            .map(|g| format!("{}*{}", wrap(&ring.format_elem(&self.coefficient(g))), group.format_elem(g)))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// `{ring, group, terms: [[exponents, coefficient], ...]}`.
    pub fn to_json(&self) -> Value {
        let ring = &self.alg.ring;
        let group = &self.alg.group;
        let terms: Vec<Value> = self
            .support()
            .into_iter()
            .map(|g| json!([group.exponents(g), ring.format_elem(&self.coefficient(g))]))
            .collect();
        json!({ "ring": ring.spec_string(), "group": group.name(), "terms": terms })
    }
}

fn wrap(s: &str) -> String {
    if s.contains('+') || s.contains('-') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        self.checked_add(rhs).expect("algebra mismatch")
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        self.checked_sub(rhs).expect("algebra mismatch")
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Self) -> AlgebraElement {
        self.checked_mul(rhs).expect("algebra mismatch")
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        let zm = self.alg.ring.zm();
        AlgebraElement { alg: self.alg.clone(), coeffs: self.coeffs.iter().map(|&c| zm.neg(c)).collect() }
    }
}

/// A computed chain `Θ^0 ⊇ Θ^1 ⊇ …` (or `Δ^k`).
#[derive(Clone)]
pub struct IdealFiltration {
    alg: Arc<GroupAlgebra>,
    levels: Vec<HowellModule>,
    with_ideal: bool,
}

impl fmt::Debug for IdealFiltration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IdealFiltration({:?}, depth {})", self.alg, self.depth())
    }
}

impl IdealFiltration {
    pub fn algebra(&self) -> &Arc<GroupAlgebra> {
        &self.alg
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Whether this is the `Θ` filtration rather than the `Δ` one.
    pub fn is_relative(&self) -> bool {
        self.with_ideal
    }

    /// The `k`-th power; the chain is constant zero once it vanishes.
    pub fn level(&self, k: usize) -> Result<&HowellModule, AlgError> {
        match self.levels.get(k) {
            Some(m) => Ok(m),
            None if self.levels.last().is_some_and(|m| m.is_zero()) => Ok(self.levels.last().unwrap()),
            None => Err(AlgError::RangeExceeded { k, max: self.depth() }),
        }
    }

    pub fn levels(&self) -> &[HowellModule] {
        &self.levels
    }

    pub fn contains(&self, x: &AlgebraElement, k: usize) -> Result<bool, AlgError> {
        if x.alg.as_ref() != self.alg.as_ref() {
            return Err(AlgError::AlgebraMismatch);
        }
        Ok(self.level(k)?.contains(&x.coeffs)?)
    }

    /// Whether `x ≡ y mod Θ^k`.
    pub fn congruent(&self, x: &AlgebraElement, y: &AlgebraElement, k: usize) -> Result<bool, AlgError> {
        self.contains(&x.checked_sub(y)?, k)
    }

    /// `|Θ^k / Θ^{k+1}|`.
    pub fn quotient_size(&self, k: usize) -> Result<BigUint, AlgError> {
        Ok(self.level(k)?.quotient_size(self.level(k + 1)?)?)
    }

    /// `log_p |Θ^k / Θ^{k+1}|`.
    pub fn quotient_log(&self, k: usize, p: u32) -> Result<u32, AlgError> {
        let a = self.level(k)?.log_size(p).ok_or(AlgError::RingMismatch)?;
        let b = self.level(k + 1)?.log_size(p).ok_or(AlgError::RingMismatch)?;
        Ok(a - b)
    }

    /// Index of the first zero level, if reached.
    pub fn nilpotency(&self) -> Option<usize> {
        self.levels.iter().position(|m| m.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcgroup::{cyclic2, dihedral16, family_h};

    fn z4() -> CoefRing {
        CoefRing::zmod(4, 2).unwrap()
    }

    fn c4_alg() -> Arc<GroupAlgebra> {
        GroupAlgebra::new(z4(), Arc::new(PcGroup::new("C4", cyclic2(2).unwrap()).unwrap()))
    }

    #[test]
    fn char4_power_identity_in_c4() {
        let a = c4_alg();
        let u = a.group().gen(0);
        let uu = a.minus_one(u);
        let lhs = uu.pow(4);
        let u2 = a.group().pow(u, 2);
        let rhs = a.minus_one(u2).scale_int(2);
        assert_eq!(lhs.flat(), rhs.flat());
        let expected = &a.basis(u2).scale_int(2) + &a.from_int(2);
        assert_eq!(lhs.flat(), expected.flat());
    }

    #[test]
    fn lie_self_is_zero_and_augmentation_is_multiplicative() {
        let a = c4_alg();
        let x = &a.basis(a.group().gen(0)).scale_int(3) + &a.from_int(1);
        assert!(x.lie(&x).is_zero());
        let y = a.minus_one(a.group().gen(0));
        let ring = a.ring();
        assert_eq!((&x * &y).augmentation(), ring.mul(&x.augmentation(), &y.augmentation()));
    }

    #[test]
    fn theta_powers_of_c4() {
        let a = c4_alg();
        let f = a.theta_powers(6).unwrap();
        assert_eq!(f.level(0).unwrap().size(), BigUint::from(256u32));
        assert_eq!(f.level(2).unwrap().size(), BigUint::from(32u32));
        assert_eq!(f.level(3).unwrap().size(), BigUint::from(8u32));
        let two_u = a.minus_one(a.group().gen(0)).scale_int(2);
        assert!(f.contains(&two_u, 2).unwrap());
        assert!(!f.contains(&two_u, 3).unwrap());
        assert!(f.contains(&a.zero(), 6).unwrap());
    }

    #[test]
    fn generator_shortcut_matches_all_elements() {
        let d = GroupAlgebra::new(z4(), Arc::new(PcGroup::new("D16", dihedral16()).unwrap()));
        let f = d.theta_powers(6).unwrap();
        for k in 0..6 {
            let slow = d.filtration_step_all_elements(f.level(k).unwrap(), true).unwrap();
            assert_eq!(&slow, f.level(k + 1).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn theta_levels_are_two_sided() {
        let d = GroupAlgebra::new(z4(), Arc::new(PcGroup::new("D16", dihedral16()).unwrap()));
        let f = d.theta_powers(5).unwrap();
        for k in 0..=5 {
            let m = f.level(k).unwrap();
            for row in m.rows() {
                for g in d.group().gens() {
                    assert!(m.contains(&d.flat_group_mul(g, row)).unwrap());
                    assert!(m.contains(&d.flat_mul_group(row, g)).unwrap());
                }
            }
        }
    }

    #[test]
    fn theta_is_ideal_plus_augmentation() {
        let a = c4_alg();
        let f = a.theta_powers(1).unwrap();
        let delta = a.augmentation_ideal().unwrap();
        let n = a.module_times_ideal(&HowellModule::from_rows(4, 4, vec![vec![1, 0, 0, 0]]).unwrap()).unwrap();
        assert_eq!(f.level(1).unwrap(), &delta.sum(&n).unwrap());
        assert_eq!(delta.size(), BigUint::from(64u32));
    }

    #[test]
    fn inverse_of_one_plus_c() {
        let h = Arc::new(PcGroup::new("H", family_h(4, 3, 2).unwrap()).unwrap());
        let a = GroupAlgebra::new(z4(), h.clone());
        let c = h.gen_by_name("c").unwrap();
        let x = a.basis(c);
        let inv = x.inverse().unwrap();
        assert_eq!(inv.flat(), a.basis(h.inv(c)).flat());
        let y = &a.one() + &a.minus_one(c).scale_int(2);
        assert_eq!((&y * &y.inverse().unwrap()).flat(), a.one().flat());
        assert!(matches!(a.minus_one(c).inverse(), Err(AlgError::NotInvertible)));
    }

    #[test]
    fn centrality() {
        let h = Arc::new(PcGroup::new("H", family_h(4, 3, 2).unwrap()).unwrap());
        let s = GroupAlgebra::new(z4(), h.clone());
        let a = s.gen_minus_one("a").unwrap();
        assert!(!a.is_central());
        assert!(s.one().is_central());
        let x = &(&a * &a) + &a.scale_int(2);
        assert!(x.is_central());
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = c4_alg();
        let b = GroupAlgebra::new(z4(), Arc::new(PcGroup::new("C8", cyclic2(3).unwrap()).unwrap()));
        assert_eq!(a.one().checked_mul(&b.one()).unwrap_err(), AlgError::AlgebraMismatch);
    }
}
