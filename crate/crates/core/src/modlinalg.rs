//! Canonical linear algebra over `Z/mZ`.
//!
//! Submodules of `(Z/mZ)^d` are stored in Howell normal form: an echelon
//! basis whose pivots are the canonical divisors of `m`, whose entries above
//! each pivot are reduced modulo that pivot, and which has the Howell
//! property (every vector of the span whose first `k` entries vanish is a
//! combination of the rows with pivot column `>= k`). Two modules are equal
//! exactly when their Howell matrices are identical.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

/// Largest modulus accepted by the engine. Keeps `a + b * c` inside `u32`.
pub const MAX_MODULUS: u32 = 1 << 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("modulus {0} outside the supported range 2..={MAX_MODULUS}")]
    BadModulus(u32),
    #[error("second module is not contained in the first")]
    NotASubmodule,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid on non-negative integers: returns `(g, s, t)` with
/// `s*a + t*b = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// Arithmetic in `Z/mZ` with a mask fast path for powers of two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zmod {
    m: u32,
    mask: Option<u32>,
}

impl Zmod {
    pub fn new(m: u32) -> Result<Self, LinalgError> {
        if !(2..=MAX_MODULUS).contains(&m) {
            return Err(LinalgError::BadModulus(m));
        }
        let mask = m.is_power_of_two().then(|| m - 1);
        Ok(Zmod { m, mask })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.m
    }

    #[inline]
    pub fn reduce(self, x: u32) -> u32 {
        match self.mask {
            Some(mask) => x & mask,
            None => x % self.m,
        }
    }

    pub fn from_i64(self, x: i64) -> u32 {
        x.rem_euclid(self.m as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        self.reduce(a + b)
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.reduce(a + self.m - b)
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.reduce(self.m - a)
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        self.reduce(a * b)
    }

    /// Canonical associate of `a`: `gcd(a, m)` (with `0` for `a = 0`).
    pub fn canonical(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            gcd(a as u64, self.m as u64) as u32
        }
    }

    /// A unit `u` with `u * a == gcd(a, m)`.
    pub fn normalizing_unit(self, a: u32) -> u32 {
        debug_assert!(a != 0);
        let g = gcd(a as u64, self.m as u64);
        let m = self.m as u64;
        let mm = m / g;
        if mm == 1 {
            return 1;
        }
        let aa = (a as u64 / g) % mm;
        let (_, s, _) = ext_gcd(aa as i64, mm as i64);
        let u0 = s.rem_euclid(mm as i64) as u64;
        let mut u = u0;
        while gcd(u, m) != 1 {
            u += mm;
        }
        (u % m) as u32
    }

    pub fn is_unit(self, a: u32) -> bool {
        gcd(a as u64, self.m as u64) == 1
    }

    pub fn inverse(self, a: u32) -> Option<u32> {
        if !self.is_unit(a) {
            return None;
        }
        let (_, s, _) = ext_gcd(a as i64, self.m as i64);
        Some(self.from_i64(s))
    }

    /// `v[j] += c * r[j]` for `j >= start`.
    #[inline]
    pub fn axpy(self, v: &mut [u32], c: u32, r: &[u32], start: usize) {
        let (v, r) = (&mut v[start..], &r[start..]);
        match self.mask {
            Some(mask) => {
                for (x, &y) in v.iter_mut().zip(r) {
                    *x = (*x + c * y) & mask;
                }
            }
            None => {
                let m = self.m;
                for (x, &y) in v.iter_mut().zip(r) {
                    *x = (*x + c * y) % m;
                }
            }
        }
    }

    #[inline]
    pub fn scale(self, v: &mut [u32], c: u32, start: usize) {
        for x in &mut v[start..] {
            *x = self.mul(*x, c);
        }
    }
}

/// A finitely generated submodule of `(Z/mZ)^d` in Howell normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HowellModule {
    zm: Zmod,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for HowellModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HowellModule mod {} dim {} ({} rows)", self.zm.m, self.dim, self.rows.len())?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}", line.join(" "))?;
        }
        Ok(())
    }
}

impl HowellModule {
    /// Howell form of the span of `rows`.
    pub fn from_rows<I>(modulus: u32, dim: usize, rows: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        let mut b = HowellBuilder::new(modulus, dim)?;
        for r in rows {
            b.insert(r)?;
        }
        Ok(b.finish())
    }

    pub fn zero(modulus: u32, dim: usize) -> Result<Self, LinalgError> {
        Ok(HowellBuilder::new(modulus, dim)?.finish())
    }

    pub fn full(modulus: u32, dim: usize) -> Result<Self, LinalgError> {
        let zm = Zmod::new(modulus)?;
        let rows = (0..dim)
            .map(|i| {
                let mut v = vec![0; dim];
                v[i] = 1;
                v
            })
            .collect();
        Ok(HowellModule { zm, dim, rows, pivots: (0..dim).collect() })
    }

    pub fn modulus(&self) -> u32 {
        self.zm.m
    }

    pub fn zmod(&self) -> Zmod {
        self.zm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    fn check_dim(&self, v: &[u32]) -> Result<(), LinalgError> {
        if v.len() != self.dim {
            return Err(LinalgError::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &HowellModule) -> Result<(), LinalgError> {
        if self.zm.m != other.zm.m {
            return Err(LinalgError::ModulusMismatch(self.zm.m, other.zm.m));
        }
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    /// Reduces `v` by the basis; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &mut [u32]) {
        let zm = self.zm;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let a = v[c];
            if a == 0 {
                continue;
            }
            let p = row[c];
            let q = a / p;
            if q != 0 {
                zm.axpy(v, zm.neg(zm.reduce(q)), row, c);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> Result<bool, LinalgError> {
        self.check_dim(v)?;
        let mut w: Vec<u32> = v.iter().map(|&x| self.zm.reduce(x)).collect();
        self.reduce(&mut w);
        Ok(w.iter().all(|&x| x == 0))
    }

    pub fn contains_module(&self, other: &HowellModule) -> Result<bool, LinalgError> {
        self.check_compatible(other)?;
        for r in &other.rows {
            if !self.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &HowellModule) -> Result<HowellModule, LinalgError> {
        self.check_compatible(other)?;
        let mut b = HowellBuilder::from_module(self);
        for r in &other.rows {
            b.insert(r.clone())?;
        }
        Ok(b.finish())
    }

    /// `self ∩ other`, via the Howell form of `[[A, A], [B, 0]]`.
    pub fn intersect(&self, other: &HowellModule) -> Result<HowellModule, LinalgError> {
        self.check_compatible(other)?;
        let d = self.dim;
        let mut b = HowellBuilder::new(self.zm.m, 2 * d)?;
        for r in &self.rows {
            let mut v = r.clone();
            v.extend_from_slice(r);
            b.insert(v)?;
        }
        for r in &other.rows {
            let mut v = r.clone();
            v.resize(2 * d, 0);
            b.insert(v)?;
        }
        let joint = b.finish();
        let rows = joint
            .rows
            .iter()
            .zip(&joint.pivots)
            .filter(|(_, &c)| c >= d)
            .map(|(r, _)| r[d..].to_vec());
        HowellModule::from_rows(self.zm.m, d, rows)
    }

    /// Number of elements of the span.
    pub fn size(&self) -> BigUint {
        let mut s = BigUint::from(1u32);
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            s *= self.zm.m / row[c];
        }
        s
    }

    /// `log_p |M|` when `m` is a power of the prime `p`.
    pub fn log_size(&self, p: u32) -> Option<u32> {
        let mut total = 0;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            total += exact_log(self.zm.m / row[c], p)?;
        }
        Some(total)
    }

    /// `|self / sub|`, failing unless `sub ⊆ self`.
    pub fn quotient_size(&self, sub: &HowellModule) -> Result<BigUint, LinalgError> {
        if !self.contains_module(sub)? {
            return Err(LinalgError::NotASubmodule);
        }
        Ok(self.size() / sub.size())
    }

    /// All elements of the span; only sensible for small modules.
    pub fn elements(&self) -> Vec<Vec<u32>> {
        let zm = self.zm;
        let mut out = vec![vec![0u32; self.dim]];
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let steps = zm.m / row[c];
            let mut next = Vec::with_capacity(out.len() * steps as usize);
            for v in &out {
                let mut w = v.clone();
                for _ in 0..steps {
                    next.push(w.clone());
                    zm.axpy(&mut w, 1, row, 0);
                }
            }
            out = next;
        }
        out
    }

    /// Rows as a row-major integer text block.
    pub fn to_text(&self) -> String {
        let mut s = format!("mod {} dim {}\n", self.zm.m, self.dim);
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

fn exact_log(mut x: u32, p: u32) -> Option<u32> {
    let mut k = 0;
    while x > 1 {
        if !x.is_multiple_of(p) {
            return None;
        }
        x /= p;
        k += 1;
    }
    Some(k)
}

/// Incremental Howell reduction. Rows are kept in slots indexed by their
/// pivot column; `finish` back-reduces and emits the canonical matrix.
#[derive(Clone, Debug)]
pub struct HowellBuilder {
    zm: Zmod,
    dim: usize,
    slots: Vec<Option<Vec<u32>>>,
    stack: Vec<Vec<u32>>,
}

impl HowellBuilder {
    pub fn new(modulus: u32, dim: usize) -> Result<Self, LinalgError> {
        Ok(HowellBuilder {
            zm: Zmod::new(modulus)?,
            dim,
            slots: vec![None; dim],
            stack: Vec::new(),
        })
    }

    pub fn from_module(m: &HowellModule) -> Self {
        let mut slots = vec![None; m.dim];
        for (r, &c) in m.rows.iter().zip(&m.pivots) {
            slots[c] = Some(r.clone());
        }
        HowellBuilder { zm: m.zm, dim: m.dim, slots, stack: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank_rows(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    /// Adds `v` to the span. Returns whether the span grew.
    pub fn insert(&mut self, v: Vec<u32>) -> Result<bool, LinalgError> {
        if v.len() != self.dim {
            return Err(LinalgError::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        let zm = self.zm;
        let mut v = v;
        for x in v.iter_mut() {
            *x = zm.reduce(*x);
        }
        self.stack.push(v);
        let mut changed = false;
        while let Some(v) = self.stack.pop() {
            changed |= self.absorb(v);
        }
        Ok(changed)
    }

    fn absorb(&mut self, mut v: Vec<u32>) -> bool {
        let zm = self.zm;
        let m = zm.m;
        let mut c = 0;
        loop {
            while c < self.dim && v[c] == 0 {
                c += 1;
            }
            if c == self.dim {
                return false;
            }
            let a = v[c];
            match &mut self.slots[c] {
                None => {
                    let u = zm.normalizing_unit(a);
                    if u != 1 {
                        zm.scale(&mut v, u, c);
                    }
                    let p = v[c];
                    if p != 1 {
                        let mut ann = v.clone();
                        zm.scale(&mut ann, m / p, c);
                        self.stack.push(ann);
                    }
                    self.slots[c] = Some(v);
                    return true;
                }
                Some(row) => {
                    let p = row[c];
                    if a.is_multiple_of(p) {
                        zm.axpy(&mut v, zm.neg(a / p), row, c);
                        c += 1;
                    } else {
                        // Replace the pivot row by a gcd combination and
                        // re-insert both originals.
                        let (g, s, t) = ext_gcd(a as i64, p as i64);
                        let s = zm.from_i64(s);
                        let t = zm.from_i64(t);
                        let mut new = vec![0u32; self.dim];
                        zm.axpy(&mut new, s, &v, c);
                        zm.axpy(&mut new, t, row, c);
                        debug_assert_eq!(new[c], g as u32);
                        let old = std::mem::replace(row, new.clone());
                        let g = g as u32;
                        if g != 1 {
                            let mut ann = new;
                            zm.scale(&mut ann, m / g, c);
                            self.stack.push(ann);
                        }
                        self.stack.push(old);
                        self.stack.push(v);
                        return true;
                    }
                }
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let zm = self.zm;
        let mut v: Vec<u32> = v.iter().map(|&x| zm.reduce(x)).collect();
        for c in 0..self.dim {
            if v[c] == 0 {
                continue;
            }
            match &self.slots[c] {
                None => return false,
                Some(row) => {
                    let p = row[c];
                    if !v[c].is_multiple_of(p) {
                        return false;
                    }
                    let q = zm.neg(v[c] / p);
                    zm.axpy(&mut v, q, row, c);
                }
            }
        }
        true
    }

    pub fn finish(self) -> HowellModule {
        let zm = self.zm;
        let dim = self.dim;
        let mut pivots = Vec::new();
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for (c, s) in self.slots.into_iter().enumerate() {
            if let Some(r) = s {
                pivots.push(c);
                rows.push(r);
            }
        }
        // Back-reduce from the bottom so each row subtracted is already final.
        for i in (0..rows.len()).rev() {
            let (head, tail) = rows.split_at_mut(i + 1);
            let row = &mut head[i];
            for (k, lower) in tail.iter().enumerate() {
                let c = pivots[i + 1 + k];
                let p = lower[c];
                let q = row[c] / p;
                if q != 0 {
                    zm.axpy(row, zm.neg(zm.reduce(q)), lower, c);
                }
            }
        }
        HowellModule { zm, dim, rows, pivots }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn span_set(m: u32, rows: &[Vec<u32>], d: usize) -> BTreeSet<Vec<u32>> {
        let zm = Zmod::new(m).unwrap();
        let mut set = BTreeSet::new();
        set.insert(vec![0; d]);
        loop {
            let mut added = Vec::new();
            for v in &set {
                for r in rows {
                    let mut w = v.clone();
                    zm.axpy(&mut w, 1, r, 0);
                    if !set.contains(&w) {
                        added.push(w);
                    }
                }
            }
            if added.is_empty() {
                return set;
            }
            set.extend(added);
        }
    }

    #[test]
    fn two_generators_over_z4() {
        let h = HowellModule::from_rows(4, 2, vec![vec![2, 2], vec![0, 2]]).unwrap();
        assert_eq!(h.rows(), &[vec![2, 0], vec![0, 2]]);
        assert_eq!(h.size(), BigUint::from(4u32));
        let brute = span_set(4, &[vec![2, 2], vec![0, 2]], 2);
        let ours: BTreeSet<_> = h.elements().into_iter().collect();
        assert_eq!(brute, ours);
        assert!(h.contains(&[2, 2]).unwrap());
        assert!(!h.contains(&[1, 0]).unwrap());
    }

    #[test]
    fn identity_and_empty() {
        let rows = (0..3).map(|i| {
            let mut v = vec![0; 3];
            v[i] = 1;
            v
        });
        let h = HowellModule::from_rows(4, 3, rows).unwrap();
        assert_eq!(h, HowellModule::full(4, 3).unwrap());
        let z = HowellModule::from_rows(4, 3, Vec::<Vec<u32>>::new()).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.size(), BigUint::from(1u32));
    }

    #[test]
    fn howell_property_needs_annihilator_rows() {
        // Over Z/4 the single row (2, 1) spans {0, (2,1), (0,2), (2,3)}.
        let h = HowellModule::from_rows(4, 2, vec![vec![2, 1]]).unwrap();
        assert_eq!(h.rows(), &[vec![2, 1], vec![0, 2]]);
        assert!(h.contains(&[0, 2]).unwrap());
        assert_eq!(h.size(), BigUint::from(4u32));
    }

    #[test]
    fn quotient_size_and_errors() {
        let full = HowellModule::full(4, 2).unwrap();
        let sub = HowellModule::from_rows(4, 2, vec![vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(full.quotient_size(&sub).unwrap(), BigUint::from(4u32));
        assert_eq!(sub.quotient_size(&full), Err(LinalgError::NotASubmodule));
        assert!(matches!(
            HowellModule::from_rows(4, 2, vec![vec![1, 2, 3]]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_prime_power_modulus() {
        let h = HowellModule::from_rows(6, 2, vec![vec![4, 3]]).unwrap();
        let brute = span_set(6, &[vec![4, 3]], 2);
        let ours: BTreeSet<_> = h.elements().into_iter().collect();
        assert_eq!(brute, ours);
        assert_eq!(h.size(), BigUint::from(brute.len()));
    }

    #[test]
    fn intersection_matches_sets() {
        let a = HowellModule::from_rows(4, 3, vec![vec![1, 1, 0], vec![0, 2, 1]]).unwrap();
        let b = HowellModule::from_rows(4, 3, vec![vec![1, 3, 0], vec![0, 0, 2]]).unwrap();
        let i = a.intersect(&b).unwrap();
        let sa: BTreeSet<_> = a.elements().into_iter().collect();
        let sb: BTreeSet<_> = b.elements().into_iter().collect();
        let expect: BTreeSet<_> = sa.intersection(&sb).cloned().collect();
        let got: BTreeSet<_> = i.elements().into_iter().collect();
        assert_eq!(expect, got);
    }

    #[test]
    fn normalizing_unit_hits_gcd() {
        for m in [4u32, 6, 8, 9, 12] {
            let zm = Zmod::new(m).unwrap();
            for a in 1..m {
                let u = zm.normalizing_unit(a);
                assert!(zm.is_unit(u));
                assert_eq!(zm.mul(u, a), zm.canonical(a), "m={m} a={a}");
            }
        }
    }
}
