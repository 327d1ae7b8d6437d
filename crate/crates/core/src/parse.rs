//! Text formats: ring specifications and pc presentations.
//!
//! Ring: `Zmod:4`, `Zmod:4[t]/(t^2);n=2,t`, `Zmod:4[t]/(t^2-2);n=t`. Without
//! `n=` the ideal is the nilradical.
//!
//! Presentation:
//! ```text
//! gens 3
//! names x y z
//! orders 16 8 4
//! conj 2 1 = x2 x3
//! conj 3 1 = x3^3
//! ```
//! Indices are 1-based, `pow i = w` sets `g_i^{o_i}` and `conj j i = w` sets
//! `g_j^{g_i}`. Words are normal words in later generators, or `1`.

use std::fmt;

use thiserror::Error;

use crate::coefring::{CoefRing, RingError};
use crate::pcgroup::{builtin, GroupError, PcGroup, PcPresentation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("invalid ring: {0}")]
    Ring(#[from] RingError),
    #[error("invalid presentation: {0}")]
    Validation(#[from] GroupError),
}

fn syntax<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax { line, col, msg: msg.into() })
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str, line: usize, col0: usize) -> Self {
        Cursor { s: s.as_bytes(), pos: 0, line, col0 }
    }

    fn col(&self) -> usize {
        self.col0 + self.pos + 1
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        syntax(self.line, self.col(), msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            Ok(())
        } else {
            self.err(format!("expected `{lit}`"))
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        text.parse().or_else(|_| syntax(self.line, self.col0 + start + 1, "number too large"))
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

/// A polynomial in `t` with integer coefficients, low degree first.
fn poly(cur: &mut Cursor) -> Result<Vec<i64>, ParseError> {
    let mut coeffs: Vec<i64> = Vec::new();
    let mut first = true;
    loop {
        let sign = if cur.eat(b'-') {
            -1
        } else if cur.eat(b'+') || first {
            1
        } else {
            break;
        };
        let mut c: i64 = 1;
        let mut have_coeff = false;
        if matches!(cur.peek(), Some(b'0'..=b'9')) {
            c = cur.number()? as i64;
            have_coeff = true;
            cur.eat(b'*');
        }
        let mut k = 0usize;
        if cur.eat(b't') {
            k = 1;
            if cur.eat(b'^') {
                k = cur.number()? as usize;
            }
        } else if !have_coeff {
            return cur.err("expected a term");
        }
        if coeffs.len() <= k {
            coeffs.resize(k + 1, 0);
        }
        coeffs[k] += sign * c;
        first = false;
    }
    Ok(coeffs)
}

pub fn parse_poly(s: &str) -> Result<Vec<i64>, ParseError> {
    let mut cur = Cursor::new(s, 1, 0);
    let p = poly(&mut cur)?;
    if !cur.at_end() {
        return cur.err("unexpected input");
    }
    Ok(p)
}

pub fn parse_ring_spec(s: &str) -> Result<CoefRing, ParseError> {
    let mut cur = Cursor::new(s, 1, 0);
    cur.expect("Zmod:")?;
    let m64 = cur.number()?;
    let m = u32::try_from(m64).or_else(|_| cur.err("modulus too large"))?;
    let mut reducer = vec![0, 1];
    if cur.eat(b'[') {
        cur.expect("t]/(")?;
        reducer = poly(&mut cur)?;
        cur.expect(")")?;
    }
    let gens = if cur.eat(b';') {
        cur.expect("n=")?;
        let mut gens = Vec::new();
        loop {
            gens.push(poly(&mut cur)?);
            if !cur.eat(b',') {
                break;
            }
        }
        Some(gens)
    } else {
        None
    };
    if !cur.at_end() {
        return cur.err("unexpected input after ring specification");
    }
    match gens {
        Some(g) => {
            let g: Vec<Vec<i64>> = g.into_iter().filter(|p| p.iter().any(|&c| c != 0)).collect();
            Ok(CoefRing::new(m, &reducer, &g)?)
        }
        None => nilradical_ring(m, &reducer),
    }
}

/// The ring with its ideal set to the nilpotent elements.
fn nilradical_ring(m: u32, reducer: &[i64]) -> Result<CoefRing, ParseError> {
    let base = CoefRing::new(m, reducer, &[])?;
    let mut gens: Vec<Vec<i64>> = Vec::new();
    let mut ring = base.clone();
    let k = 64 - (base.order() as u64).leading_zeros() as u64;
    for a in base.elements() {
        if a.is_zero() || !base.pow(&a, k).is_zero() || ring.in_ideal(&a) {
            continue;
        }
        gens.push(a.0.iter().map(|&c| c as i64).collect());
        ring = CoefRing::new(m, reducer, &gens)?;
    }
    Ok(ring)
}

/// Builtin name or presentation text.
pub fn parse_group_spec(s: &str) -> Result<PcGroup, ParseError> {
    if let Some(g) = builtin(s) {
        return Ok(g?);
    }
    let trimmed = s.trim_start();
    if trimmed.starts_with("gens") || trimmed.starts_with('#') {
        let pres = parse_presentation(s)?;
        return Ok(PcGroup::new("custom", pres)?);
    }
    syntax(1, 1, format!("unknown group `{}`", s.trim()))
}

pub fn parse_presentation(text: &str) -> Result<PcPresentation, ParseError> {
    let mut rank: Option<usize> = None;
    let mut names: Option<Vec<String>> = None;
    let mut orders: Option<Vec<u32>> = None;
    let mut pres: Option<PcPresentation> = None;
    let mut end = (1, 1);
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let body = raw.split('#').next().unwrap();
        if body.trim().is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        let body = body.trim_start();
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest_col = indent + kw.len() + 1;
        let mut cur = Cursor::new(rest, line_no, rest_col);
        end = (line_no, raw.len() + 1);
        let need_rank = |cur: &Cursor| rank.ok_or(()).or_else(|_| syntax(cur.line, indent + 1, "`gens` must come first"));
        match kw {
            "gens" => {
                if rank.is_some() {
                    return syntax(line_no, indent + 1, "duplicate `gens`");
                }
                let r = cur.number()? as usize;
                if r == 0 || r > 16 {
                    return cur.err("rank must be between 1 and 16");
                }
                rank = Some(r);
            }
            "names" => {
                let r = need_rank(&cur)?;
                let v: Vec<String> = rest.split_whitespace().map(String::from).collect();
                if v.len() != r {
                    return cur.err(format!("expected {r} names"));
                }
                if pres.is_some() {
                    return syntax(line_no, indent + 1, "`names` must precede `orders`");
                }
                names = Some(v);
            }
            "orders" => {
                let r = need_rank(&cur)?;
                let mut v = Vec::new();
                for _ in 0..r {
                    let o = cur.number()?;
                    v.push(u32::try_from(o).or_else(|_| cur.err("order too large"))?);
                }
                if !cur.at_end() {
                    return cur.err(format!("expected {r} orders"));
                }
                let nm = names.clone().unwrap_or_else(|| (1..=r).map(|i| format!("x{i}")).collect());
                pres = Some(PcPresentation::free_abelian_like(nm, v.clone()));
                orders = Some(v);
            }
            "pow" | "conj" => {
                let r = need_rank(&cur)?;
                let Some(p) = pres.as_mut() else {
                    return syntax(line_no, indent + 1, "`orders` must precede relations");
                };
                let ords = orders.as_ref().unwrap();
                let idx = |cur: &mut Cursor| -> Result<usize, ParseError> {
                    let col = { cur.skip_ws(); cur.col() };
                    let i = cur.number()? as usize;
                    if i == 0 || i > r {
                        return syntax(cur.line, col, format!("generator index {i} out of range 1..{r}"));
                    }
                    Ok(i - 1)
                };
                let (target, after) = if kw == "pow" {
                    let i = idx(&mut cur)?;
                    (None, i)
                } else {
                    let j = idx(&mut cur)?;
                    let i = idx(&mut cur)?;
                    if i >= j {
                        return cur.err("conj j i needs i < j");
                    }
                    (Some(j), i)
                };
                cur.expect("=")?;
                let w = word(&mut cur, r, ords, after)?;
                match target {
                    None => p.set_pow(after, w),
                    Some(j) => p.set_conj(j, after, w),
                }
            }
            _ => return syntax(line_no, indent + 1, format!("unknown directive `{kw}`")),
        }
    }
    pres.ok_or(()).or_else(|_| syntax(end.0, end.1, "missing `orders`"))
}

/// A normal word `x_k^e …` in generators after `after`, or `1`.
fn word(cur: &mut Cursor, r: usize, orders: &[u32], after: usize) -> Result<Vec<u32>, ParseError> {
    let mut w = vec![0u32; r];
    if cur.peek() == Some(b'1') {
        cur.pos += 1;
        if !cur.at_end() {
            return cur.err("unexpected input after `1`");
        }
        return Ok(w);
    }
    let mut last: Option<usize> = None;
    while !cur.at_end() {
        let col = cur.col();
        if !cur.eat(b'x') {
            return cur.err("expected a generator `x<k>`");
        }
        let k = cur.number()? as usize;
        if k == 0 || k > r {
            return syntax(cur.line, col, format!("generator x{k} out of range"));
        }
        let k = k - 1;
        if k <= after {
            return syntax(cur.line, col, format!("x{} may not occur here: only generators after x{} are allowed", k + 1, after + 1));
        }
        if last.is_some_and(|l| k <= l) {
            return syntax(cur.line, col, "generators must appear in increasing order");
        }
        let e = if cur.eat(b'^') { cur.number()? } else { 1 };
        if e == 0 || e >= orders[k] as u64 {
            return syntax(cur.line, col, format!("exponent {e} of x{} outside 1..{}", k + 1, orders[k] - 1));
        }
        w[k] = e as u32;
        last = Some(k);
    }
    if last.is_none() {
        return cur.err("empty word");
    }
    Ok(w)
}

/// Presentation text that [`parse_presentation`] reads back identically.
pub struct PresentationText<'a>(pub &'a PcPresentation);

impl fmt::Display for PresentationText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.0;
        let r = p.rank();
        let fmt_word = |w: &[u32]| -> String {
            let parts: Vec<String> = w
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(k, &e)| if e == 1 { format!("x{}", k + 1) } else { format!("x{}^{}", k + 1, e) })
                .collect();
            if parts.is_empty() {
                "1".into()
            } else {
                parts.join(" ")
            }
        };
        writeln!(f, "gens {r}")?;
        writeln!(f, "names {}", p.names.join(" "))?;
        let ords: Vec<String> = p.orders.iter().map(u32::to_string).collect();
        writeln!(f, "orders {}", ords.join(" "))?;
        for i in 0..r {
            if p.pow[i].iter().any(|&e| e != 0) {
                writeln!(f, "pow {} = {}", i + 1, fmt_word(&p.pow[i]))?;
            }
        }
        for j in 0..r {
            for i in 0..j {
                if !p.conj_is_trivial(j, i) {
                    writeln!(f, "conj {} {} = {}", j + 1, i + 1, fmt_word(&p.conj[j][i]))?;
                }
            }
        }
        Ok(())
    }
}
