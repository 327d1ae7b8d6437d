//! Finite coefficient rings `S = Z/mZ[t]/(g(t))` with a designated ideal `n`.
//!
//! Elements are coefficient vectors in the basis `1, t, ..., t^(e-1)` where
//! `e = deg g`. Everything downstream treats `S` as the free `Z/mZ`-module of
//! rank `e`, so ideals are [`HowellModule`]s of dimension `e`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::modlinalg::{HowellModule, LinalgError, Zmod};

/// Enumeration-based checks refuse rings larger than this.
pub const MAX_ENUMERATED_RING: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("reducer polynomial is not monic of degree >= 1")]
    NonMonicReducer,
    #[error("modulus must be at least 2 (got {0})")]
    BadModulus(u32),
    #[error("ring has {0} elements, too many to enumerate")]
    TooLarge(usize),
    #[error("element has {got} coefficients, ring degree is {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("valuation of zero is infinite")]
    ZeroInput,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("ideal n is not maximal, residue ring is not a field")]
    NotAField,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An element of `S`, as coefficients of `1, t, ..., t^(e-1)` in `[0, m)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct RingElem(pub Vec<u32>);

impl RingElem {
    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// Validation flags, all decided by enumerating `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RingFlags {
    pub order: usize,
    pub characteristic: u32,
    pub ideal_order: usize,
    pub is_maximal: bool,
    pub is_local: bool,
    pub char_of_quotient: u32,
    pub two_in_n: bool,
    pub two_in_n_squared: bool,
}

impl RingFlags {
    /// The conditions the counterexample check needs: characteristic 4,
    /// `n` maximal, `2 ∈ n`, `2 ∉ n²`.
    pub fn suitable_for_obstruction(&self) -> bool {
        self.characteristic == 4 && self.is_maximal && self.two_in_n && !self.two_in_n_squared
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct CoefRing {
    zm: Zmod,
    /// Monic reducer, coefficients low to high, length `e + 1`.
    reducer: Vec<u32>,
    ideal_gens: Vec<RingElem>,
    /// `t^k mod g` for `k < 2e - 1`.
    tpow: Vec<Vec<u32>>,
    ideal: HowellModule,
    flags: RingFlags,
}

impl fmt::Debug for CoefRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoefRing({})", self.spec_string())
    }
}

impl CoefRing {
    /// `Z/mZ[t]/(reducer)` with ideal generated by `ideal_gens`.
    /// Reducer coefficients are integers, low degree first.
    pub fn new(m: u32, reducer: &[i64], ideal_gens: &[Vec<i64>]) -> Result<Self, RingError> {
        if m < 2 {
            return Err(RingError::BadModulus(m));
        }
        let zm = Zmod::new(m)?;
        let mut red: Vec<u32> = reducer.iter().map(|&c| zm.from_i64(c)).collect();
        while red.len() > 1 && *red.last().unwrap() == 0 {
            red.pop();
        }
        if red.len() < 2 || *red.last().unwrap() != 1 {
            return Err(RingError::NonMonicReducer);
        }
        let e = red.len() - 1;
        let order = (m as usize).checked_pow(e as u32).unwrap_or(usize::MAX);
        if order > MAX_ENUMERATED_RING {
            return Err(RingError::TooLarge(order));
        }
        let mut tpow: Vec<Vec<u32>> = Vec::with_capacity(2 * e);
        let mut cur = vec![0u32; e];
        cur[0] = 1;
        for _ in 0..(2 * e).max(2) {
            tpow.push(cur.clone());
            // multiply by t
            let top = cur[e - 1];
            let mut next = vec![0u32; e];
            for i in (1..e).rev() {
                next[i] = cur[i - 1];
            }
            for (i, x) in next.iter_mut().enumerate() {
                *x = zm.sub(*x, zm.mul(top, red[i]));
            }
            cur = next;
        }
        let mut ring = CoefRing {
            zm,
            reducer: red,
            ideal_gens: Vec::new(),
            tpow,
            ideal: HowellModule::zero(m, e)?,
            flags: RingFlags {
                order,
                characteristic: m,
                ideal_order: 1,
                is_maximal: false,
                is_local: false,
                char_of_quotient: 0,
                two_in_n: false,
                two_in_n_squared: false,
            },
        };
        let gens: Vec<RingElem> = ideal_gens.iter().map(|g| ring.from_poly(g)).collect();
        ring.ideal = ring.ideal_from_gens(&gens)?;
        ring.ideal_gens = gens;
        ring.flags = ring.compute_flags()?;
        Ok(ring)
    }

    /// `Z/mZ` with ideal `(gen)`.
    pub fn zmod(m: u32, gen: i64) -> Result<Self, RingError> {
        CoefRing::new(m, &[0, 1], &[vec![gen]])
    }

    pub fn modulus(&self) -> u32 {
        self.zm.modulus()
    }

    pub fn zm(&self) -> Zmod {
        self.zm
    }

    pub fn degree(&self) -> usize {
        self.reducer.len() - 1
    }

    pub fn reducer(&self) -> &[u32] {
        &self.reducer
    }

    pub fn ideal_gens(&self) -> &[RingElem] {
        &self.ideal_gens
    }

    pub fn flags(&self) -> &RingFlags {
        &self.flags
    }

    pub fn order(&self) -> usize {
        self.flags.order
    }

    /// The ideal `n` as a `Z/mZ`-module of rank `e`.
    pub fn ideal(&self) -> &HowellModule {
        &self.ideal
    }

    /// Whether the reducer is just `t`, i.e. `S = Z/mZ`.
    pub fn is_plain(&self) -> bool {
        self.degree() == 1 && self.reducer[0] == 0
    }

    pub fn zero(&self) -> RingElem {
        RingElem(vec![0; self.degree()])
    }

    pub fn one(&self) -> RingElem {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> RingElem {
        let mut v = vec![0; self.degree()];
        v[0] = self.zm.from_i64(c);
        RingElem(v)
    }

    /// `t` reduced modulo the reducer.
    pub fn t(&self) -> RingElem {
        RingElem(self.tpow[1].clone())
    }

    /// A polynomial in `t` with integer coefficients (low degree first).
    pub fn from_poly(&self, coeffs: &[i64]) -> RingElem {
        let e = self.degree();
        let mut acc = vec![0u32; e];
        let mut tk = self.one();
        let t = self.t();
        for &c in coeffs {
            let c = self.zm.from_i64(c);
            for (a, &b) in acc.iter_mut().zip(&tk.0) {
                *a = self.zm.add(*a, self.zm.mul(c, b));
            }
            tk = self.mul(&tk, &t);
        }
        RingElem(acc)
    }

    pub fn elem(&self, coeffs: Vec<u32>) -> Result<RingElem, RingError> {
        if coeffs.len() != self.degree() {
            return Err(RingError::DegreeMismatch { expected: self.degree(), got: coeffs.len() });
        }
        Ok(RingElem(coeffs.into_iter().map(|c| self.zm.reduce(c)).collect()))
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.zm.add(x, y)).collect())
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.zm.sub(x, y)).collect())
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        RingElem(a.0.iter().map(|&x| self.zm.neg(x)).collect())
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let mut out = vec![0u32; self.degree()];
        self.mul_acc(&mut out, 1, &a.0, &b.0);
        RingElem(out)
    }

    pub fn pow(&self, a: &RingElem, k: u64) -> RingElem {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn is_unit(&self, a: &RingElem) -> bool {
        self.inverse(a).is_some()
    }

    /// Multiplicative inverse, by enumeration.
    pub fn inverse(&self, a: &RingElem) -> Option<RingElem> {
        if self.is_plain() {
            return self.zm.inverse(a.0[0]).map(|x| RingElem(vec![x]));
        }
        let one = self.one();
        self.elements().find(|b| self.mul(a, b) == one)
    }

    /// `out += c * a * b` on raw coefficient slices.
    #[inline]
    pub fn mul_acc(&self, out: &mut [u32], c: u32, a: &[u32], b: &[u32]) {
        let zm = self.zm;
        if a.len() == 1 {
            out[0] = zm.add(out[0], zm.mul(c, zm.mul(a[0], b[0])));
            return;
        }
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let cx = zm.mul(c, x);
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let k = zm.mul(cx, y);
                zm.axpy(out, k, &self.tpow[i + j], 0);
            }
        }
    }

    /// Matrix (row-major, `e x e`) of `x ↦ x * a` on the `Z/mZ`-basis.
    pub fn mul_matrix(&self, a: &RingElem) -> Vec<Vec<u32>> {
        (0..self.degree()).map(|i| self.mul(&RingElem(self.tpow[i].clone()), a).0).collect()
    }

    /// Mixed-radix index of an element in `0..|S|`.
    pub fn index_of(&self, a: &RingElem) -> usize {
        let m = self.modulus() as usize;
        a.0.iter().rev().fold(0, |acc, &c| acc * m + c as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> RingElem {
        let m = self.modulus() as usize;
        let mut v = Vec::with_capacity(self.degree());
        for _ in 0..self.degree() {
            v.push((idx % m) as u32);
            idx /= m;
        }
        RingElem(v)
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElem> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    /// The `Z/mZ`-span of `{t^j * g}`: the ideal generated by `gens`.
    pub fn ideal_from_gens(&self, gens: &[RingElem]) -> Result<HowellModule, RingError> {
        let e = self.degree();
        let rows = gens.iter().flat_map(|g| {
            (0..e).map(move |j| self.mul(g, &RingElem(self.tpow[j].clone())).0)
        });
        Ok(HowellModule::from_rows(self.modulus(), e, rows.collect::<Vec<_>>())?)
    }

    /// `n^k` as a module, with `n^k = S` for `k <= 0`.
    pub fn ideal_power_module(&self, k: i64) -> HowellModule {
        let e = self.degree();
        let mut cur = HowellModule::full(self.modulus(), e).expect("valid modulus");
        for _ in 0..k.max(0) {
            let rows: Vec<Vec<u32>> = cur
                .rows()
                .iter()
                .flat_map(|r| self.ideal_gens.iter().map(move |g| (r, g)))
                .map(|(r, g)| self.mul(&RingElem(r.clone()), g).0)
                .collect();
            cur = HowellModule::from_rows(self.modulus(), e, rows).expect("dimension e");
            if cur.is_zero() {
                break;
            }
        }
        cur
    }

    pub fn in_ideal(&self, a: &RingElem) -> bool {
        self.ideal.contains(&a.0).expect("ring degree")
    }

    /// Element set of `n^k` by closing pairwise products under addition.
    pub fn ideal_power(&self, k: u32) -> BTreeSet<RingElem> {
        let base: BTreeSet<RingElem> =
            self.ideal.elements().into_iter().map(RingElem).collect();
        let mut cur: BTreeSet<RingElem> = self.elements().collect();
        for _ in 0..k {
            let products: BTreeSet<RingElem> =
                cur.iter().flat_map(|a| base.iter().map(move |b| (a, b))).map(|(a, b)| self.mul(a, b)).collect();
            cur = self.additive_closure(products);
        }
        cur
    }

    fn additive_closure(&self, seed: BTreeSet<RingElem>) -> BTreeSet<RingElem> {
        let mut set = seed.clone();
        set.insert(self.zero());
        let gens: Vec<RingElem> = seed.into_iter().collect();
        let mut frontier: Vec<RingElem> = set.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = self.add(&x, g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    fn compute_flags(&self) -> Result<RingFlags, RingError> {
        let order = self.order();
        let ideal_set: Vec<bool> = self.elements().map(|a| self.in_ideal(&a)).collect();
        let ideal_order = ideal_set.iter().filter(|&&b| b).count();
        let proper = !self.in_ideal(&self.one());
        let mut is_maximal = proper;
        let mut is_local = proper;
        if proper {
            let one = self.one();
            for a in self.elements() {
                if ideal_set[self.index_of(&a)] {
                    continue;
                }
                let mut inv_mod_n = false;
                let mut unit = false;
                for b in self.elements() {
                    let ab = self.mul(&a, &b);
                    if ab == one {
                        unit = true;
                    }
                    if ideal_set[self.index_of(&self.sub(&ab, &one))] {
                        inv_mod_n = true;
                    }
                    if unit && inv_mod_n {
                        break;
                    }
                }
                is_maximal &= inv_mod_n;
                is_local &= unit;
            }
        }
        is_local &= is_maximal;
        let m = self.modulus();
        let char_of_quotient = (1..=m).find(|&c| self.in_ideal(&self.from_int(c as i64))).unwrap_or(m);
        let two = self.from_int(2);
        let n2 = self.ideal_power_module(2);
        Ok(RingFlags {
            order,
            characteristic: m,
            ideal_order,
            is_maximal,
            is_local,
            char_of_quotient,
            two_in_n: self.in_ideal(&two),
            two_in_n_squared: n2.contains(&two.0)?,
        })
    }

    /// Compact printable polynomial in `t` for an element.
    pub fn format_elem(&self, a: &RingElem) -> String {
        format_poly(&a.0.iter().map(|&c| c as i64).collect::<Vec<_>>())
    }

    /// Canonical ring specification string (`Zmod:4[t]/(t^2);n=2,t`).
    pub fn spec_string(&self) -> String {
        let mut s = format!("Zmod:{}", self.modulus());
        if !self.is_plain() {
            let red: Vec<i64> = self.reducer.iter().map(|&c| c as i64).collect();
            s.push_str(&format!("[t]/({})", format_poly(&red)));
        }
        s.push_str(";n=");
        let gens: Vec<String> = self.ideal_gens.iter().map(|g| self.format_elem(g)).collect();
        if gens.is_empty() {
            s.push('0');
        } else {
            s.push_str(&gens.join(","));
        }
        s
    }

    /// The residue field `S/n`.
    pub fn residue_field(&self) -> Result<ResidueField, RingError> {
        ResidueField::new(self)
    }
}

/// Formats integer coefficients (low degree first) as a polynomial in `t`.
pub fn format_poly(coeffs: &[i64]) -> String {
    let mut terms = Vec::new();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{k}"),
        };
        let body = if k == 0 {
            c.abs().to_string()
        } else if c.abs() == 1 {
            mono
        } else {
            format!("{}{}", c.abs(), mono)
        };
        terms.push((c < 0, body));
    }
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (neg, body)) in terms.into_iter().enumerate() {
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push('-'),
            (_, false) => s.push('+'),
        }
        s.push_str(&body);
    }
    s
}

/// Element of a residue field, indexed into [`ResidueField::elements`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FieldElem(pub usize);

/// `F = S/n`, realised concretely as `Z/pZ[t]/(h)` where `h` generates the
/// image of `n` in `(Z/pZ)[t]/(ḡ)`.
#[derive(Clone, Debug)]
pub struct ResidueField {
    source: CoefRing,
    field: CoefRing,
    p: u32,
}

impl ResidueField {
    fn new(s: &CoefRing) -> Result<Self, RingError> {
        let flags = s.flags();
        if !flags.is_maximal {
            return Err(RingError::NotAField);
        }
        let p = flags.char_of_quotient;
        if p < 2 || !is_prime(p as u64) {
            return Err(RingError::NotAField);
        }
        // Work in F_p[t]: h = gcd(ḡ, images of the generators of n).
        let red: Vec<u32> = s.reducer().iter().map(|&c| c % p).collect();
        let mut h = red;
        for g in s.ideal_gens() {
            let gp: Vec<u32> = g.coeffs().iter().map(|&c| c % p).collect();
            h = poly_gcd_fp(&h, &gp, p);
        }
        let h: Vec<i64> = h.iter().map(|&c| c as i64).collect();
        let field = if h.len() <= 1 {
            return Err(RingError::NotAField);
        } else {
            CoefRing::new(p, &h, &[])?
        };
        let rf = ResidueField { source: s.clone(), field, p };
        if rf.order() * flags.ideal_order != flags.order {
            return Err(RingError::NotAField);
        }
        Ok(rf)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.field.order()
    }

    pub fn source(&self) -> &CoefRing {
        &self.source
    }

    /// `F` as a coefficient ring with zero ideal.
    pub fn as_ring(&self) -> &CoefRing {
        &self.field
    }

    pub fn is_prime_field(&self) -> bool {
        self.field.degree() == 1
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order()).map(FieldElem)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(self.field.index_of(&self.field.one()))
    }

    fn value(&self, a: FieldElem) -> RingElem {
        self.field.element_at(a.0)
    }

    /// `π(s)` as a coefficient vector of `F`.
    pub fn project_coeffs(&self, s: &[u32]) -> Vec<u32> {
        // reduce coefficients mod p, then modulo h
        let f = &self.field;
        let mut acc = vec![0u32; f.degree()];
        for (k, &c) in s.iter().enumerate() {
            let c = c % self.p;
            if c == 0 {
                continue;
            }
            let tk = f.pow(&f.t(), k as u64);
            f.zm().axpy(&mut acc, c, &tk.0, 0);
        }
        acc
    }

    pub fn project(&self, s: &RingElem) -> FieldElem {
        FieldElem(self.field.index_of(&RingElem(self.project_coeffs(&s.0))))
    }

    /// Canonical lift of `a` into `S` (same coefficients, degree `< deg h`).
    pub fn lift(&self, a: FieldElem) -> RingElem {
        let v = self.value(a);
        let mut c = vec![0u32; self.source.degree()];
        c[..v.0.len()].copy_from_slice(&v.0);
        RingElem(c)
    }

    /// Every `s ∈ S` with `π(s) = a`.
    pub fn all_lifts(&self, a: FieldElem) -> Vec<RingElem> {
        let base = self.lift(a);
        self.source
            .ideal()
            .elements()
            .into_iter()
            .map(|nu| self.source.add(&base, &RingElem(nu)))
            .collect()
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.field.index_of(&self.field.add(&self.value(a), &self.value(b))))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.field.index_of(&self.field.mul(&self.value(a), &self.value(b))))
    }

    pub fn pow(&self, a: FieldElem, k: u64) -> FieldElem {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn inverse(&self, a: FieldElem) -> Option<FieldElem> {
        self.elements().find(|&b| self.mul(a, b) == self.one())
    }

    pub fn format(&self, a: FieldElem) -> String {
        self.field.format_elem(&self.value(a))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem_fp(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = poly_trim(b.to_vec());
    let mut r = poly_trim(a.to_vec());
    let lead_inv = Zmod::new(p).unwrap().inverse(*b.last().unwrap()).unwrap();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let q = (r.last().unwrap() * lead_inv) % p;
        for (i, &c) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - q * c % p) % p;
        }
        r = poly_trim(r);
    }
    r
}

/// Monic gcd over `F_p`.
fn poly_gcd_fp(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = poly_trim(a.to_vec());
    let mut b = poly_trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem_fp(&a, &b, p);
        a = b;
        b = r;
    }
    if a.is_empty() {
        return a;
    }
    let inv = Zmod::new(p).unwrap().inverse(*a.last().unwrap()).unwrap();
    a.iter().map(|&c| (c * inv) % p).collect()
}

/// `ν_p(x)`.
pub fn padic_valuation(p: u64, x: u64) -> Result<u32, RingError> {
    if x == 0 {
        return Err(RingError::ZeroInput);
    }
    if p < 2 {
        return Err(RingError::OutOfRange(format!("p = {p} is not prime")));
    }
    let mut x = x;
    let mut k = 0;
    while x.is_multiple_of(p) {
        x /= p;
        k += 1;
    }
    Ok(k)
}

/// `ν_p` of a big integer.
pub fn padic_valuation_big(p: u64, x: &BigUint) -> Result<u32, RingError> {
    if x == &BigUint::from(0u32) {
        return Err(RingError::ZeroInput);
    }
    let p = BigUint::from(p);
    let mut x = x.clone();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if r != BigUint::from(0u32) {
            return Ok(k);
        }
        x = q;
        k += 1;
    }
}

/// `ν_p(C(p^n, i))` by Kummer's theorem: the number of carries when adding
/// `i` and `p^n - i` in base `p`.
pub fn binomial_valuation(p: u64, n: u32, i: u64) -> Result<u32, RingError> {
    if !is_prime(p) {
        return Err(RingError::OutOfRange(format!("p = {p} is not prime")));
    }
    let top = p.checked_pow(n).ok_or_else(|| RingError::OutOfRange("p^n overflows".into()))?;
    if i == 0 || i >= top {
        return Err(RingError::OutOfRange(format!("need 0 < i < {top}, got {i}")));
    }
    let (mut a, mut b) = (i, top - i);
    let mut carry = 0;
    let mut carries = 0;
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        carry = u64::from(s >= p);
        carries += carry as u32;
        a /= p;
        b /= p;
    }
    Ok(carries)
}

/// The closed form `(p - 1)(n - ν_p(i))`; agrees with
/// [`binomial_valuation`] only for `p = 2`.
pub fn binomial_valuation_closed_form(p: u64, n: u32, i: u64) -> Result<u32, RingError> {
    let v = padic_valuation(p, i)?;
    Ok((p as u32 - 1) * (n - v))
}
