//! The characteristic-4 obstruction: every congruence needed to rule out an
//! isomorphism `SG ≅ SH` is checked by membership in computed powers of
//! `Θ = Δ(SH : n)`.

use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::coefring::{CoefRing, FieldElem, ResidueField, RingElem, RingError};
use crate::filtration::{cyclic_closed_form, dihedral_closed_form, FiltrationError, Monomial};
use crate::groupalg::{AlgError, AlgebraElement, GroupAlgebra, IdealFiltration};
use crate::modlinalg::HowellBuilder;
use crate::pcgroup::{cyclic2, dihedral16, family_g, family_h, GroupError, GroupHom, PcGroup};
use crate::report::{ReportItem, VerificationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("ring unsuitable: {0}")]
    RingUnsuitable(String),
    #[error("filtration depth {have} is below the required {need}")]
    DepthExceeded { have: usize, need: usize },
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

type Res<T> = Result<T, ObstructionError>;

/// Parameters, groups, the algebra `SH` and its `Θ`-filtration.
pub struct HypothesisInstance {
    pub n: u32,
    pub m: u32,
    pub l: u32,
    pub ring: CoefRing,
    pub field: ResidueField,
    pub g: Arc<PcGroup>,
    pub h: Arc<PcGroup>,
    pub sg: Arc<GroupAlgebra>,
    pub sh: Arc<GroupAlgebra>,
    pub theta: IdealFiltration,
    pub a: AlgebraElement,
    pub b: AlgebraElement,
    pub c: AlgebraElement,
}

impl HypothesisInstance {
    pub fn build(n: u32, m: u32, l: u32, ring: CoefRing) -> Res<Self> {
        if !(n > m && m > l && l >= 2) {
            return Err(ObstructionError::BadParameters(format!("need n > m > l >= 2, got ({n},{m},{l})")));
        }
        let f = ring.flags();
        if f.characteristic != 4 {
            return Err(ObstructionError::RingUnsuitable(format!("characteristic is {}, not 4", f.characteristic)));
        }
        if !f.is_maximal {
            return Err(ObstructionError::RingUnsuitable("n is not maximal".into()));
        }
        if !f.two_in_n {
            return Err(ObstructionError::RingUnsuitable("2 is not in n".into()));
        }
        if f.two_in_n_squared {
            return Err(ObstructionError::RingUnsuitable("2 lies in n^2".into()));
        }
        let field = ring.residue_field()?;
        let g = Arc::new(PcGroup::new(format!("G({n},{m},{l})"), family_g(n, m, l)?)?);
        let h = Arc::new(PcGroup::new(format!("H({n},{m},{l})"), family_h(n, m, l)?)?);
        let sg = GroupAlgebra::new(ring.clone(), g.clone());
        let sh = GroupAlgebra::new(ring.clone(), h.clone());
        let theta = sh.theta_powers(Self::required_depth(m))?;
        let a = sh.gen_minus_one("a").expect("generator a");
        let b = sh.gen_minus_one("b").expect("generator b");
        let c = sh.gen_minus_one("c").expect("generator c");
        Ok(HypothesisInstance { n, m, l, ring, field, g, h, sg, sh, theta, a, b, c })
    }

    /// `1 + 2^{m+1}`, the deepest power the argument uses.
    pub fn required_depth(m: u32) -> usize {
        1 + (1usize << (m + 1))
    }

    fn depth(&self) -> usize {
        Self::required_depth(self.m)
    }

    fn member(&self, x: &AlgebraElement, k: usize) -> Res<bool> {
        if k > self.theta.depth() && !self.theta.level(k).is_ok() {
            return Err(ObstructionError::DepthExceeded { have: self.theta.depth(), need: k });
        }
        Ok(self.theta.contains(x, k)?)
    }

    fn congruent(&self, x: &AlgebraElement, y: &AlgebraElement, k: usize) -> Res<bool> {
        self.member(&(x - y), k)
    }

    fn lift_pairs(&self) -> Vec<(FieldElem, FieldElem, RingElem, RingElem)> {
        let mut out = Vec::new();
        for al in self.field.elements() {
            for be in self.field.elements() {
                for la in self.field.all_lifts(al) {
                    for lb in self.field.all_lifts(be) {
                        out.push((al, be, la.clone(), lb));
                    }
                }
            }
        }
        out
    }

    fn lin(&self, al: &RingElem, be: &RingElem) -> AlgebraElement {
        &self.a.scale(al) + &self.b.scale(be)
    }

    fn pair_json(&self, al: FieldElem, be: FieldElem, la: &RingElem, lb: &RingElem) -> Value {
        json!({
            "alpha": self.field.format(al),
            "beta": self.field.format(be),
            "alphaLift": self.ring.format_elem(la),
            "betaLift": self.ring.format_elem(lb),
        })
    }

    fn r(&self) -> &CoefRing {
        &self.ring
    }

    // ---- lemmas -----------------------------------------------------------

    fn lemma_x2y2(&self) -> Res<(bool, Value)> {
        let central = |grp: &PcGroup, x| grp.gens().iter().all(|&g| grp.mul(g, x) == grp.mul(x, g));
        let g = &self.g;
        let h = &self.h;
        let x2 = g.pow(g.gen_by_name("x").unwrap(), 2);
        let y2 = g.pow(g.gen_by_name("y").unwrap(), 2);
        let a2 = h.pow(h.gen_by_name("a").unwrap(), 2);
        let b2 = h.pow(h.gen_by_name("b").unwrap(), 2);
        let r = [central(g, x2), central(g, y2), central(h, a2), central(h, b2)];
        Ok((r.iter().all(|&b| b), json!({"x2": r[0], "y2": r[1], "a2": r[2], "b2": r[3]})))
    }

    fn lemma_theta_mod_theta2(&self) -> Res<(bool, Value)> {
        let th1 = self.theta.level(1)?;
        let th2 = self.theta.level(2)?;
        let q = th1.quotient_size(th2).map_err(AlgError::from)?;
        let n1 = self.ring.ideal_power_module(1);
        let n2 = self.ring.ideal_power_module(2);
        let nq = n1.quotient_size(&n2).map_err(AlgError::from)?;
        let fsize = num_bigint::BigUint::from(self.field.order());
        let expected = &nq * &fsize * &fsize;
        // Θ = Θ² + n·1 + S·A + S·B
        let mut bld = HowellBuilder::from_module(th2);
        for row in n1.rows() {
            bld.insert(self.sh.scalar(&RingElem(row.clone())).flat().to_vec()).map_err(AlgError::from)?;
        }
        for j in 0..self.ring.degree() {
            let mut tj = vec![0u32; self.ring.degree()];
            tj[j] = 1;
            let tj = RingElem(tj);
            bld.insert(self.a.scale(&tj).flat().to_vec()).map_err(AlgError::from)?;
            bld.insert(self.b.scale(&tj).flat().to_vec()).map_err(AlgError::from)?;
        }
        let spanned = &bld.finish() == th1;
        let mut dim = 0u32;
        let mut x = num_bigint::BigUint::from(1u32);
        while x < q {
            x *= &fsize;
            dim += 1;
        }
        // the same quotient for SG, and Y = y - 1 ∉ Θ_G²
        let theta_g = self.sg.theta_powers(2)?;
        let qg = theta_g.quotient_size(1)?;
        let y = self.sg.gen_minus_one("y").unwrap();
        let y_deep = theta_g.contains(&y, 2)?;
        let ok = q == expected && spanned && qg == q && !y_deep && x == q;
        Ok((
            ok,
            json!({
                "quotientSize": q.to_string(),
                "idealQuotientSize": nq.to_string(),
                "fieldOrder": self.field.order(),
                "fDimension": dim,
                "spannedByIdealAB": spanned,
                "quotientSizeInSG": qg.to_string(),
                "yInThetaSquared": y_deep,
            }),
        ))
    }

    fn lemma_comm_ba(&self) -> Res<(bool, Value)> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let lie = b.lie(a);
        let one = self.sh.one();
        let factor = &(&(&one + a) + b) + &(a * b);
        let exact = lie == &factor * c;
        let c_in_2 = self.member(c, 2)?;
        let cong = self.congruent(&lie, c, 3)?;
        Ok((exact && c_in_2 && cong, json!({"exactIdentity": exact, "cInTheta2": c_in_2, "congruentMod3": cong})))
    }

    fn lemma_square(&self) -> Res<(bool, Value)> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let a2 = a * a;
        let b2 = b * b;
        let mut bad = Vec::new();
        let mut checked = 0;
        for (al, be, la, lb) in self.lift_pairs() {
            let x = self.lin(&la, &lb);
            let r = self.r();
            let rhs = &(&a2.scale(&r.mul(&la, &la)) + &b2.scale(&r.mul(&lb, &lb))) + &c.scale(&r.mul(&la, &lb));
            checked += 1;
            if !self.congruent(&(&x * &x), &rhs, 3)? {
                bad.push(self.pair_json(al, be, &la, &lb));
            }
        }
        Ok((bad.is_empty(), json!({"liftPairsChecked": checked, "failures": bad})))
    }

    fn lemma_comm_ca_cb(&self) -> Res<(bool, Value)> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let two_c = c.scale_int(2);
        let ca = c.lie(a);
        let cb = c.lie(b);
        let ok_a = self.congruent(&ca, &two_c, 4)?;
        let ok_b = self.congruent(&cb, &two_c, 4)?;
        // D = [c,a] - 1 = (1 + C)^{-2} - 1, by exact inversion
        let h = &self.h;
        let cg = h.gen_by_name("c").unwrap();
        let ag = h.gen_by_name("a").unwrap();
        let d = self.sh.minus_one(h.commutator(cg, ag));
        let one = self.sh.one();
        let inv = (&one + c).inverse()?;
        let d_series = &inv.pow(2) - &one;
        let d_exact = d == d_series;
        let factor = &(&(&one + a) + c) + &(a * c);
        let ca_exact = ca == &factor * &d;
        let d_in_3 = self.member(&d, 3)?;
        Ok((
            ok_a && ok_b && d_exact && ca_exact && d_in_3,
            json!({"CA": ok_a, "CB": ok_b, "inverseSeries": d_exact, "factorIdentity": ca_exact, "dInTheta3": d_in_3}),
        ))
    }

    fn lemma_mod_zsh(&self) -> Res<(bool, Value)> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let z = self.sh.central_submodule()?;
        let h = &self.h;
        let a2m1 = self.sh.minus_one(h.pow(h.gen_by_name("a").unwrap(), 2));
        let b2m1 = self.sh.minus_one(h.pow(h.gen_by_name("b").unwrap(), 2));
        let xa = &(a * a) + &a.scale_int(2);
        let xb = &(b * b) + &b.scale_int(2);
        let ident = xa == a2m1 && xb == b2m1;
        let ca = xa.is_central() && xb.is_central();
        let diff_a = &(a * a) - &a.scale_int(2);
        let diff_b = &(b * b) - &b.scale_int(2);
        let in_z = z.contains(diff_a.flat()).map_err(AlgError::from)? && z.contains(diff_b.flat()).map_err(AlgError::from)?;
        // X = (αA+βB)² + 2(αA+βB) ≡ 2(α+α²)A + 2(β+β²)B + αβC mod Z(SH) + Θ³
        let zt3 = z.sum(self.theta.level(3)?).map_err(AlgError::from)?;
        let r = self.r();
        let mut bad = Vec::new();
        for (al, be, la, lb) in self.lift_pairs() {
            let y = self.lin(&la, &lb);
            let x = &(&y * &y) + &y.scale_int(2);
            let ca_ = r.mul(&r.from_int(2), &r.add(&la, &r.mul(&la, &la)));
            let cb_ = r.mul(&r.from_int(2), &r.add(&lb, &r.mul(&lb, &lb)));
            let rhs = &(&a.scale(&ca_) + &b.scale(&cb_)) + &c.scale(&r.mul(&la, &lb));
            if !zt3.contains((&x - &rhs).flat()).map_err(AlgError::from)? {
                bad.push(self.pair_json(al, be, &la, &lb));
            }
        }
        Ok((
            ident && ca && in_z && bad.is_empty(),
            json!({"groupSquareIdentity": ident, "central": ca, "inCentralSubmodule": in_z, "chainFailures": bad}),
        ))
    }

    fn lemma_fourth(&self) -> Res<(bool, Value)> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let a4 = a.pow(4);
        let b4 = b.pow(4);
        let c2 = c * c;
        let r = self.r();
        let mut bad = Vec::new();
        let mut checked = 0;
        for (al, be, la, lb) in self.lift_pairs() {
            let x = self.lin(&la, &lb);
            let x2 = &x * &x;
            let lhs = &x2 * &x2;
            let al2 = r.mul(&la, &la);
            let be2 = r.mul(&lb, &lb);
            let rhs = &(&a4.scale(&r.mul(&al2, &al2)) + &b4.scale(&r.mul(&be2, &be2))) + &c2.scale(&r.mul(&al2, &be2));
            checked += 1;
            if !self.congruent(&lhs, &rhs, 5)? {
                bad.push(self.pair_json(al, be, &la, &lb));
            }
        }
        Ok((bad.is_empty(), json!({"liftPairsChecked": checked, "failures": bad})))
    }

    fn big_power(&self, x: &AlgebraElement) -> AlgebraElement {
        let mut y = x.clone();
        for _ in 0..self.m + 1 {
            y = &y * &y;
        }
        y
    }

    fn lemma_power(&self) -> Res<(bool, Value)> {
        let a_big = self.big_power(&self.a);
        let r = self.r();
        let e = 1u64 << (self.m + 1);
        let mut bad = Vec::new();
        let mut checked = 0;
        for (al, be, la, lb) in self.lift_pairs() {
            let x = self.lin(&la, &lb);
            let lhs = self.big_power(&x);
            let rhs = a_big.scale(&r.pow(&r.add(&la, &lb), e));
            checked += 1;
            if !self.congruent(&lhs, &rhs, self.depth())? {
                bad.push(self.pair_json(al, be, &la, &lb));
            }
        }
        // the two identities feeding the lemma
        let b_big = self.big_power(&self.b);
        let a_eq_b = a_big == b_big;
        let c_vanish = {
            let mut y = self.c.clone();
            for _ in 0..self.m {
                y = &y * &y;
            }
            y.is_zero()
        };
        Ok((
            bad.is_empty() && a_eq_b && c_vanish,
            json!({"liftPairsChecked": checked, "failures": bad, "aPowerEqualsBPower": a_eq_b, "cPowerVanishes": c_vanish}),
        ))
    }

    fn lemma_a2m1(&self) -> Res<(bool, Value)> {
        let a_big = self.big_power(&self.a);
        let inside = self.member(&a_big, self.depth())?;
        Ok((!inside, json!({"exponent": 1u64 << (self.m + 1), "depth": self.depth(), "member": inside})))
    }

    fn lemma_2c(&self) -> Res<(bool, Value)> {
        let inside = self.member(&self.c.scale_int(2), 4)?;
        Ok((!inside, json!({"member": inside})))
    }

    // ---- reductions -------------------------------------------------------

    fn reduction_cyclic(&self) -> Res<(bool, Value)> {
        let h = &self.h;
        let m = self.m;
        let ag = h.gen_by_name("a").unwrap();
        let bg = h.gen_by_name("b").unwrap();
        let cg = h.gen_by_name("c").unwrap();
        let k = Arc::new(PcGroup::new(format!("C2^{}", m + 1), cyclic2(m + 1)?)?);
        let u = k.gen(0);
        // pc order of H is (b, a, c)
        let pi = GroupHom::from_images(h.clone(), k.clone(), vec![u, u, k.one()])?;
        let n = h.normal_closure(&[h.pow(ag, 1 << (m + 1)), h.mul(h.inv(ag), bg), cg]);
        let kernel_ok = pi.kernel() == n;
        let sk = GroupAlgebra::new(self.ring.clone(), k.clone());
        let img_a = self.sh.pushforward(&pi, &sk, &self.a)?;
        let uu = sk.minus_one(u);
        let a_to_u = img_a == uu;
        let onto = self.image_equals(&pi, &sk, &cyclic_closed_form(m + 1, 1).materialize(&sk)?)?;
        let big = 1u64 << (m + 1);
        let u_big = uu.pow(big);
        let kummer = u_big == uu.pow(big / 2).scale_int(2);
        let cf = cyclic_closed_form(m + 1, self.depth());
        let target = cf.materialize(&sk)?;
        let reduced_member = target.contains(u_big.flat()).map_err(AlgError::from)?;
        let comp = cf
            .components
            .iter()
            .find(|c| c.monomial == Monomial::Cyclic(1 << m))
            .expect("component U^{2^m}");
        let comp_module = comp.ideal.materialize(&self.ring);
        let two_in_comp = comp_module.contains(self.ring.from_int(2).coeffs()).map_err(AlgError::from)?;
        let direct = self.member(&self.big_power(&self.a), self.depth())?;
        let ok = kernel_ok && a_to_u && onto && kummer && !reduced_member && !two_in_comp && direct == reduced_member;
        Ok((
            ok,
            json!({
                "kernelMatches": kernel_ok,
                "aMapsToU": a_to_u,
                "thetaMapsOnto": onto,
                "powerIsTwiceHalfPower": kummer,
                "componentIdeal": comp.ideal.simplified().to_string(),
                "twoInComponent": two_in_comp,
                "memberInQuotient": reduced_member,
                "memberInSH": direct,
            }),
        ))
    }

    fn reduction_dihedral(&self) -> Res<(bool, Value)> {
        let h = &self.h;
        let ag = h.gen_by_name("a").unwrap();
        let bg = h.gen_by_name("b").unwrap();
        let cg = h.gen_by_name("c").unwrap();
        let k = Arc::new(PcGroup::new("D16", dihedral16())?);
        let pi = GroupHom::from_images(h.clone(), k.clone(), vec![k.gen(1), k.gen(0), k.gen(2)])?;
        let n = h.normal_closure(&[h.pow(ag, 2), h.pow(bg, 2), h.pow(cg, 4)]);
        let kernel_ok = pi.kernel() == n;
        let sk = GroupAlgebra::new(self.ring.clone(), k.clone());
        let (u, v, w) = (sk.minus_one(k.gen(0)), sk.minus_one(k.gen(1)), sk.minus_one(k.gen(2)));
        let maps = self.sh.pushforward(&pi, &sk, &self.a)? == u
            && self.sh.pushforward(&pi, &sk, &self.b)? == v
            && self.sh.pushforward(&pi, &sk, &self.c)? == w;
        let onto = self.image_equals(&pi, &sk, &dihedral_closed_form(1).materialize(&sk)?)?;
        let cf = dihedral_closed_form(4);
        let target = cf.materialize(&sk)?;
        let reduced_member = target.contains(w.scale_int(2).flat()).map_err(AlgError::from)?;
        let comp = cf
            .components
            .iter()
            .find(|c| c.monomial == Monomial::Dihedral { s: 0, t: 0, i: 1, w2: false })
            .expect("component W");
        let two_in_comp =
            comp.ideal.materialize(&self.ring).contains(self.ring.from_int(2).coeffs()).map_err(AlgError::from)?;
        let direct = self.member(&self.c.scale_int(2), 4)?;
        let ok = kernel_ok && maps && onto && !reduced_member && !two_in_comp && direct == reduced_member;
        Ok((
            ok,
            json!({
                "kernelMatches": kernel_ok,
                "abcMapToUVW": maps,
                "thetaMapsOnto": onto,
                "componentIdeal": comp.ideal.simplified().to_string(),
                "twoInComponent": two_in_comp,
                "memberInQuotient": reduced_member,
                "memberInSH": direct,
            }),
        ))
    }

    /// Whether the image of `Θ` under `π` spans `target`.
    fn image_equals(&self, pi: &GroupHom, sk: &Arc<GroupAlgebra>, target: &crate::modlinalg::HowellModule) -> Res<bool> {
        let mut bld = HowellBuilder::new(sk.modulus(), sk.flat_dim()).map_err(AlgError::from)?;
        for row in self.theta.level(1)?.rows() {
            let x = self.sh.from_flat(row.clone())?;
            bld.insert(self.sh.pushforward(pi, sk, &x)?.flat().to_vec()).map_err(AlgError::from)?;
        }
        Ok(&bld.finish() == target)
    }

    // ---- conclusion -------------------------------------------------------

    /// For every normalized candidate `ψ(Y) = αA + βB` with `(α, β) ≠ 0`,
    /// at least one consequence of `Y^{2^{m+1}} = 0` or of the centrality of
    /// `Y² + 2Y` fails; for `(0, 0)` all hold.
    fn cross_check(&self) -> Res<(bool, Value)> {
        let r = self.r();
        let fld = &self.field;
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let a_big = self.big_power(a);
        let e = 1u64 << (self.m + 1);
        let y = self.sg.gen_minus_one("y").unwrap();
        let y_pow_zero = self.big_power(&y).is_zero();
        let y_central = (&(&y * &y) + &y.scale_int(2)).is_central();
        let mut ok = y_pow_zero && y_central;
        let mut rows = Vec::new();
        for al in fld.elements() {
            for be in fld.elements() {
                let g_coef = fld.add(fld.add(be, fld.mul(be, be)), fld.mul(al, be));
                let h_coef = fld.add(fld.add(al, fld.mul(al, al)), fld.mul(al, be));
                let mut verdicts = Vec::new();
                for la in fld.all_lifts(al) {
                    for lb in fld.all_lifts(be) {
                        let f_ok = self.member(&a_big.scale(&r.pow(&r.add(&la, &lb), e)), self.depth())?;
                        let g_ok = self.member(&c.scale(&r.mul(&r.from_int(2), &fld.lift(g_coef))), 4)?;
                        let h_ok = self.member(&c.scale(&r.mul(&r.from_int(2), &fld.lift(h_coef))), 4)?;
                        let x = self.lin(&la, &lb);
                        let direct_f = self.member(&self.big_power(&x), self.depth())?;
                        let z = &(&x * &x) + &x.scale_int(2);
                        let direct_g = self.member(&z.lie(a), 4)?;
                        let direct_h = self.member(&z.lie(b), 4)?;
                        verdicts.push([f_ok, g_ok, h_ok, direct_f, direct_g, direct_h]);
                    }
                }
                let first = verdicts[0];
                let lift_independent = verdicts.iter().all(|v| *v == first);
                let zero = al == fld.zero() && be == fld.zero();
                let all_hold = first[..3].iter().all(|&x| x);
                let direct_hold = first[3..].iter().all(|&x| x);
                let consistent = first[0] == first[3] && first[1] == first[4] && first[2] == first[5];
                let pair_ok = lift_independent && consistent && (all_hold == zero) && (direct_hold == zero);
                ok &= pair_ok;
                rows.push(json!({
                    "alpha": fld.format(al),
                    "beta": fld.format(be),
                    "f": first[0], "g": first[1], "h": first[2],
                    "liftIndependent": lift_independent,
                    "directMatches": consistent,
                }));
            }
        }
        Ok((ok, json!({"yPowerVanishes": y_pow_zero, "ySquarePlusTwoYCentral": y_central, "pairs": rows})))
    }

    pub const ITEM_IDS: [&'static str; 14] = [
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
    ];

    /// Runs the checks whose ids satisfy `select`.
    pub fn items(&self, select: &dyn Fn(&str) -> bool) -> Res<Vec<ReportItem>> {
        type Check<'a> = (&'static str, String, Box<dyn Fn() -> Res<(bool, Value)> + 'a>);
        let k = self.depth();
        let e = 1u64 << (self.m + 1);
        let checks: Vec<Check> = vec![
            ("lemma:x2y2", "x^2, y^2 are central in G and a^2, b^2 are central in H".into(), Box::new(|| self.lemma_x2y2())),
            ("lemma:ThetaModTheta2", "Θ/Θ^2 is spanned by n, A, B with |Θ/Θ^2| = |n/n^2|·|F|^2".into(), Box::new(|| self.lemma_theta_mod_theta2())),
            ("lemma:commBA", "[B,A] = (1+A+B+AB)C ≡ C mod Θ^3".into(), Box::new(|| self.lemma_comm_ba())),
            ("lemma:square", "(αA+βB)^2 ≡ α^2A^2 + β^2B^2 + αβC mod Θ^3 for all lifts of α, β".into(), Box::new(|| self.lemma_square())),
            ("lemma:commCACB", "[C,A] ≡ [C,B] ≡ 2C mod Θ^4".into(), Box::new(|| self.lemma_comm_ca_cb())),
            ("lemma:modZSH", "A^2 ≡ 2A and B^2 ≡ 2B mod Z(SH)".into(), Box::new(|| self.lemma_mod_zsh())),
            ("lemma:fourth", "(αA+βB)^4 ≡ α^4A^4 + β^4B^4 + α^2β^2C^2 mod Θ^5 for all lifts".into(), Box::new(|| self.lemma_fourth())),
            ("lemma:power", format!("(αA+βB)^{e} ≡ (α+β)^{e} A^{e} mod Θ^{k} for all lifts"), Box::new(|| self.lemma_power())),
            ("lemma:A2m+1", format!("A^{e} ∉ Θ^{k}"), Box::new(|| self.lemma_a2m1())),
            ("lemma:2C", "2C ∉ Θ^4".into(), Box::new(|| self.lemma_2c())),
            ("reduction:cyclic", format!("SH → S·C{e} sends A to U and U^{e} = 2U^{} ∉ Θ_K^{k}", e / 2), Box::new(|| self.reduction_cyclic())),
            ("reduction:dihedral", "SH → S·D16 sends A, B, C to U, V, W and 2W ∉ Θ_K^4".into(), Box::new(|| self.reduction_dihedral())),
            ("finalSystem", "α+β = β+β^2+αβ = α+α^2+αβ = 0 has only the solution (0,0) over F".into(), Box::new(|| {
                let sols = solve_final_system(&self.field);
                let only_zero = sols == vec![(self.field.zero(), self.field.zero())];
                let shown: Vec<Value> = sols.iter().map(|&(a, b)| json!([self.field.format(a), self.field.format(b)])).collect();
                Ok((only_zero, json!({"fieldOrder": self.field.order(), "solutions": shown})))
            })),
            ("crossCheck", "every normalized candidate with (α,β) ≠ (0,0) violates a necessary congruence".into(), Box::new(|| self.cross_check())),
        ];
        let mut items = Vec::new();
        for (id, statement, f) in checks {
            if !select(id) {
                continue;
            }
            items.push(ReportItem::timed(id, statement, f)?);
        }
        Ok(items)
    }

    pub fn config_json(&self) -> Value {
        json!({
            "n": self.n, "m": self.m, "l": self.l,
            "ring": self.ring.spec_string(),
            "thetaDepth": self.theta.depth(),
            "order": self.h.order(),
        })
    }
}

/// All `(α, β) ∈ F²` with `α+β = β+β²+αβ = α+α²+αβ = 0`.
pub fn solve_final_system(f: &ResidueField) -> Vec<(FieldElem, FieldElem)> {
    let mut out = Vec::new();
    for a in f.elements() {
        for b in f.elements() {
            let e1 = f.add(a, b);
            let e2 = f.add(f.add(b, f.mul(b, b)), f.mul(a, b));
            let e3 = f.add(f.add(a, f.mul(a, a)), f.mul(a, b));
            if e1 == f.zero() && e2 == f.zero() && e3 == f.zero() {
                out.push((a, b));
            }
        }
    }
    out
}

/// The full certificate; verdict `CERTIFIED` when every item passes.
pub fn verify_counterexample(n: u32, m: u32, l: u32, ring: CoefRing) -> Res<VerificationReport> {
    let inst = HypothesisInstance::build(n, m, l, ring)?;
    let items = inst.items(&|_| true)?;
    Ok(VerificationReport::new(inst.config_json(), items, "CERTIFIED", "NOT_CERTIFIED"))
}
