//! Normal-form arithmetic in the cyclotomic Hecke algebras of type
//! `G(ℓ,1,n)`, both non-degenerate and degenerate.
//!
//! Elements are combinations of `L^c T_w = L_1^{c_1}⋯L_n^{c_n} T_w` with
//! `0 ≤ c_i < ℓ`. In the degenerate algebra `T_w` is the group element `w`
//! and `T_i` is `s_i`. One kernel serves both algebras: writing `g_i` for the
//! generator and `s_i` for the swap of `L_i, L_{i+1}`,
//!
//! ```text
//! g_i f = (s_i f) g_i + D_i(f),    f g_i = g_i (s_i f) + D_i(f),
//! D_i(f) = κ' L_{i+1} ∂_i(f)  (non-degenerate, κ' = q - 1),   D_i(f) = ∂_i(f)  (degenerate),
//! ∂_i(f) = (f - s_i f) / (L_{i+1} - L_i)
//! ```
//!
//! for every polynomial `f` in the `L`s, and `L_{m} = κ g_{m-1} L_{m-1} g_{m-1} + β g_{m-1}`
//! with `(κ, β) = (q^{-1}, 0)` or `(1, 1)`.

mod json;
mod mackey;
mod random;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use num_rational::BigRational;
use smallvec::SmallVec;
use thiserror::Error;

use crate::scalars::{Coeff, ParamSet, Poly, Specialization, Variant};
use crate::symgrp::Perm;

pub use mackey::{CosetChoice, MackeyDecomposition};
pub use random::{random_element, random_key};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("elements live in algebras of different rank ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("index {index} out of range for n = {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("exponent {0} is not below ell")]
    ExponentTooLarge(u8),
    #[error("cannot decompose an element of the rank-0 algebra")]
    EmptyRank,
    #[error("invalid element JSON: {0}")]
    Json(String),
}

pub type Exps = SmallVec<[u8; 8]>;

/// Basis key `L^c T_w`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Key {
    pub c: Exps,
    pub w: Perm,
}

impl Key {
    pub fn identity(n: usize) -> Self {
        Key { c: SmallVec::from_elem(0, n), w: Perm::identity(n) }
    }

    pub fn new(c: &[u8], w: Perm, ell: usize) -> Result<Self, EngineError> {
        if c.len() != w.n() {
            return Err(EngineError::SizeMismatch(c.len(), w.n()));
        }
        if let Some(&e) = c.iter().find(|&&e| e as usize >= ell) {
            return Err(EngineError::ExponentTooLarge(e));
        }
        Ok(Key { c: SmallVec::from_slice(c), w })
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    fn embed(&self, n: usize) -> Key {
        let mut c = self.c.clone();
        c.resize(n, 0);
        Key { c, w: self.w.extend(n) }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &e) in self.c.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("L{}", i + 1)),
                _ => parts.push(format!("L{}^{}", i + 1, e)),
            }
        }
        if !self.w.is_identity() {
            parts.push(format!("T{}", self.w));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// Sparse combination of basis keys of rank `n`, with no zero coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct Element<C> {
    n: usize,
    terms: BTreeMap<Key, C>,
}

impl<C: Coeff> Element<C> {
    pub fn zero(n: usize) -> Self {
        Element { n, terms: BTreeMap::new() }
    }

    pub fn from_key(key: Key, coeff: C) -> Self {
        let mut e = Element::zero(key.n());
        e.add_term(key, coeff);
        e
    }

    pub fn scalar(n: usize, coeff: C) -> Self {
        Self::from_key(Key::identity(n), coeff)
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, C::one())
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Key, C)>) -> Self {
        let mut e = Element::zero(n);
        for (k, c) in terms {
            debug_assert_eq!(k.n(), n);
            e.add_term(k, c);
        }
        e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &Key) -> C {
        self.terms.get(key).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, key: Key, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, EngineError> {
        if self.n != other.n {
            return Err(EngineError::SizeMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, EngineError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Element { n: self.n, terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, s: &C) -> Self {
        Element::from_terms(self.n, self.terms.iter().map(|(k, c)| (k.clone(), c.mul_ref(s))))
    }

    /// Image under `H_n ⊂ H_m`.
    pub fn embed(&self, m: usize) -> Self {
        assert!(m >= self.n);
        Element { n: m, terms: self.terms.iter().map(|(k, c)| (k.embed(m), c.clone())).collect() }
    }

    pub fn map_coeffs<D: Coeff, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<Element<D>, E> {
        let mut out = Element::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn specialize(&self, sp: &Specialization) -> Result<Element<BigRational>, crate::scalars::ScalarError> {
        self.map_coeffs(|c| c.eval(sp))
    }
}

impl<C: Coeff> std::ops::Add for &Element<C> {
    type Output = Element<C>;
    fn add(self, rhs: &Element<C>) -> Element<C> {
        self.checked_add(rhs).expect("rank mismatch")
    }
}

impl<C: Coeff> std::ops::Sub for &Element<C> {
    type Output = Element<C>;
    fn sub(self, rhs: &Element<C>) -> Element<C> {
        self.checked_sub(rhs).expect("rank mismatch")
    }
}

impl<C: Coeff> fmt::Display for Element<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("({c})*{k}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

type Lin<C> = Vec<(Key, C)>;

fn accumulate<C: Coeff>(acc: &mut BTreeMap<Key, C>, key: Key, c: C) {
    if c.is_zero() {
        return;
    }
    match acc.entry(key) {
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
            if o.get().is_zero() {
                o.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

type HeckeProduct<C> = Arc<Vec<(Perm, C)>>;

/// Multiplication tables for one algebra, independent of the rank `n`.
pub struct Algebra<C: Coeff> {
    variant: Variant,
    ell: usize,
    q: C,
    q_minus_one: C,
    kappa: C,
    cyclo: Vec<C>,
    /// `x^ℓ = Σ_k red[k] x^k` in `R[L_1]`.
    red: Vec<C>,
    hecke_cache: DashMap<(Perm, Perm), HeckeProduct<C>>,
    push_cache: DashMap<(Perm, Exps), Arc<Lin<C>>>,
    mono_cache: DashMap<Exps, Arc<Lin<C>>>,
    key_cache: DashMap<(Key, Key), Arc<Lin<C>>>,
}

impl<C: Coeff> fmt::Debug for Algebra<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra({}, ell={})", self.variant, self.ell)
    }
}

impl Algebra<Poly> {
    /// Generic parameters `q, Q_1..Q_ℓ` (or `u_1..u_ℓ`).
    pub fn symbolic(params: &ParamSet) -> Self {
        let cyclo = (1..=params.ell()).map(Poly::var).collect();
        Self::with_parameters(params.variant(), Poly::var(0), Poly::q_pow(-1), cyclo)
    }
}

impl Algebra<BigRational> {
    pub fn specialized(sp: &Specialization) -> Self {
        let q = sp.q().clone();
        let q_inv = if sp.variant() == Variant::NonDegenerate { q.recip() } else { q.clone() };
        Self::with_parameters(sp.variant(), q, q_inv, sp.params().to_vec())
    }
}

impl<C: Coeff> Algebra<C> {
    /// `q_inv` must be the inverse of `q`; both are ignored in the
    /// degenerate case.
    pub fn with_parameters(variant: Variant, q: C, q_inv: C, cyclo: Vec<C>) -> Self {
        let ell = cyclo.len();
        assert!(ell >= 1, "need at least one cyclotomic parameter");
        // ∏(x - Q_i) = Σ e_k x^k
        let mut e = vec![C::one()];
        for p in &cyclo {
            let mut next = vec![C::zero(); e.len() + 1];
            for (k, ek) in e.iter().enumerate() {
                next[k + 1] += ek;
                next[k] -= &ek.mul_ref(p);
            }
            e = next;
        }
        let red = e[..ell].iter().map(|x| -x.clone()).collect();
        let q = if variant == Variant::Degenerate { C::one() } else { q };
        let (q_minus_one, kappa) = match variant {
            Variant::NonDegenerate => {
                let mut qm = q.clone();
                qm -= &C::one();
                (qm, q_inv)
            }
            Variant::Degenerate => (C::one(), C::one()),
        };
        Algebra {
            variant,
            ell,
            q,
            q_minus_one,
            kappa,
            cyclo,
            red,
            hecke_cache: DashMap::new(),
            push_cache: DashMap::new(),
            mono_cache: DashMap::new(),
            key_cache: DashMap::new(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// The Hecke parameter (`1` in the degenerate algebra).
    pub fn q(&self) -> &C {
        &self.q
    }

    pub fn cyclo(&self) -> &[C] {
        &self.cyclo
    }

    fn check_index(i: usize, lo: usize, n: usize) -> Result<(), EngineError> {
        if i < lo || i > n {
            Err(EngineError::OutOfRange { index: i, n })
        } else {
            Ok(())
        }
    }

    /// `T_i` (or `s_i`), `1 ≤ i < n`.
    pub fn t(&self, i: usize, n: usize) -> Result<Element<C>, EngineError> {
        Self::check_index(i, 1, n.saturating_sub(1))?;
        let w = Perm::simple(i, n).expect("index checked");
        Ok(Element::from_key(Key { c: SmallVec::from_elem(0, n), w }, C::one()))
    }

    /// `T_0 = L_1`.
    pub fn t0(&self, n: usize) -> Result<Element<C>, EngineError> {
        self.l(1, n)
    }

    /// Jucys–Murphy element `L_k`.
    pub fn l(&self, k: usize, n: usize) -> Result<Element<C>, EngineError> {
        Self::check_index(k, 1, n)?;
        let mut g: Exps = SmallVec::from_elem(0, n);
        g[k - 1] = 1;
        Ok(self.monomial(&g, n))
    }

    /// `T_w`.
    pub fn t_w(&self, w: &Perm) -> Element<C> {
        Element::from_key(Key { c: SmallVec::from_elem(0, w.n()), w: w.clone() }, C::one())
    }

    /// Normal form of `L^g` for arbitrary exponents.
    pub fn monomial(&self, g: &[u8], n: usize) -> Element<C> {
        assert_eq!(g.len(), n);
        Element::from_terms(n, self.nf_mono(g).iter().cloned())
    }

    /// Normal form of the polynomial `Σ coeff·L^g` in the `L`s.
    pub fn l_polynomial(&self, terms: &[(Exps, C)], n: usize) -> Element<C> {
        let mut acc = BTreeMap::new();
        for (g, c) in terms {
            for (k, c2) in self.nf_mono(g).iter() {
                accumulate(&mut acc, k.clone(), c.mul_ref(c2));
            }
        }
        Element { n, terms: acc }
    }

    pub fn mul(&self, a: &Element<C>, b: &Element<C>) -> Result<Element<C>, EngineError> {
        if a.n != b.n {
            return Err(EngineError::SizeMismatch(a.n, b.n));
        }
        let mut acc = BTreeMap::new();
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let coef = ca.mul_ref(cb);
                for (k, c) in self.mul_keys(ka, kb).iter() {
                    accumulate(&mut acc, k.clone(), c.mul_ref(&coef));
                }
            }
        }
        Ok(Element { n: a.n, terms: acc })
    }

    /// `(L^{c_a} T_{w_a})(L^{c_b} T_{w_b})` in normal form.
    fn mul_keys(&self, ka: &Key, kb: &Key) -> Arc<Lin<C>> {
        let key = (ka.clone(), kb.clone());
        if let Some(v) = self.key_cache.get(&key) {
            return v.clone();
        }
        let mut acc = BTreeMap::new();
        for (ky, cy) in self.push(&ka.w, &kb.c).iter() {
            let tail = self.hecke(&ky.w, &kb.w);
            let sum: Exps = ka.c.iter().zip(&ky.c).map(|(x, y)| x + y).collect();
            for (kf, cf) in self.nf_mono(&sum).iter() {
                self.mul_tail(&mut acc, &kf.c, &kf.w, &tail, &cf.mul_ref(cy));
            }
        }
        let out: Arc<Lin<C>> = Arc::new(acc.into_iter().collect());
        self.key_cache.insert(key, out.clone());
        out
    }

    /// Adds `coef · L^c T_z · (Σ tail)` to `acc`.
    fn mul_tail(&self, acc: &mut BTreeMap<Key, C>, c: &Exps, z: &Perm, tail: &[(Perm, C)], coef: &C) {
        for (x, cx) in tail {
            let cxc = cx.mul_ref(coef);
            for (y, cy) in self.hecke(z, x).iter() {
                accumulate(acc, Key { c: c.clone(), w: y.clone() }, cy.mul_ref(&cxc));
            }
        }
    }

    /// The anti-involution fixing every generator.
    pub fn star(&self, h: &Element<C>) -> Element<C> {
        let mut acc = BTreeMap::new();
        for (k, c) in &h.terms {
            for (k2, c2) in self.push(&k.w.inverse(), &k.c).iter() {
                accumulate(&mut acc, k2.clone(), c2.mul_ref(c));
            }
        }
        Element { n: h.n, terms: acc }
    }

    /// `T_z T_y`.
    pub fn hecke(&self, z: &Perm, y: &Perm) -> Arc<Vec<(Perm, C)>> {
        if y.is_identity() {
            return Arc::new(vec![(z.clone(), C::one())]);
        }
        if z.is_identity() {
            return Arc::new(vec![(y.clone(), C::one())]);
        }
        let key = (z.clone(), y.clone());
        if let Some(v) = self.hecke_cache.get(&key) {
            return v.clone();
        }
        let mut cur: BTreeMap<Perm, C> = BTreeMap::new();
        cur.insert(z.clone(), C::one());
        for i in y.reduced_word() {
            let mut next: BTreeMap<Perm, C> = BTreeMap::new();
            for (w, c) in cur {
                let ws = w.mul_simple_right(i);
                match self.variant {
                    Variant::Degenerate => add_perm(&mut next, ws, c),
                    Variant::NonDegenerate => {
                        if w.has_right_descent(i) {
                            add_perm(&mut next, w, c.mul_ref(&self.q_minus_one));
                            add_perm(&mut next, ws, c.mul_ref(&self.q));
                        } else {
                            add_perm(&mut next, ws, c);
                        }
                    }
                }
            }
            cur = next;
        }
        let out = Arc::new(cur.into_iter().collect::<Vec<_>>());
        self.hecke_cache.insert(key, out.clone());
        out
    }

    /// `D_i(L^d)` as a list of monomials; `i` is 1-based.
    fn d_op(&self, i: usize, d: &[u8]) -> Vec<(Exps, C)> {
        let (a, b) = (d[i - 1], d[i]);
        if a == b {
            return Vec::new();
        }
        let (lo, hi, sign) = if a > b { (b, a, -C::one()) } else { (a, b, C::one()) };
        let coef = match self.variant {
            Variant::NonDegenerate => sign.mul_ref(&self.q_minus_one),
            Variant::Degenerate => sign,
        };
        let shift = (self.variant == Variant::NonDegenerate) as u8;
        (0..hi - lo)
            .map(|j| {
                let mut e: Exps = SmallVec::from_slice(d);
                e[i - 1] = lo + j;
                e[i] = lo + (hi - lo - 1 - j) + shift;
                (e, coef.clone())
            })
            .collect()
    }

    /// `T_w · L^d` for `d` with entries below `ℓ`.
    fn push(&self, w: &Perm, d: &Exps) -> Arc<Lin<C>> {
        if w.is_identity() {
            return Arc::new(vec![(Key { c: d.clone(), w: w.clone() }, C::one())]);
        }
        let key = (w.clone(), d.clone());
        if let Some(v) = self.push_cache.get(&key) {
            return v.clone();
        }
        let i = (1..w.n()).find(|&i| w.has_right_descent(i)).expect("non-identity has a descent");
        let w1 = w.mul_simple_right(i);
        let mut sd = d.clone();
        sd.swap(i - 1, i);
        let simple = Perm::simple(i, w.n()).unwrap();
        let mut acc = BTreeMap::new();
        for (k, c) in self.push(&w1, &sd).iter() {
            for (y, cy) in self.hecke(&k.w, &simple).iter() {
                accumulate(&mut acc, Key { c: k.c.clone(), w: y.clone() }, cy.mul_ref(c));
            }
        }
        for (e, ce) in self.d_op(i, d) {
            for (k, c) in self.push(&w1, &e).iter() {
                accumulate(&mut acc, k.clone(), c.mul_ref(&ce));
            }
        }
        let out: Arc<Lin<C>> = Arc::new(acc.into_iter().collect());
        self.push_cache.insert(key, out.clone());
        out
    }

    /// Normal form of `L^g`, exponents unrestricted.
    fn nf_mono(&self, g: &[u8]) -> Arc<Lin<C>> {
        let n = g.len();
        let Some(m) = (0..n).rev().find(|&j| g[j] as usize >= self.ell) else {
            return Arc::new(vec![(Key { c: SmallVec::from_slice(g), w: Perm::identity(n) }, C::one())]);
        };
        let key: Exps = SmallVec::from_slice(g);
        if let Some(v) = self.mono_cache.get(&key) {
            return v.clone();
        }
        let mut acc = BTreeMap::new();
        if g.iter().enumerate().all(|(j, &e)| j == m || e == 0) {
            self.power(m, g[m], n, &mut acc);
        } else {
            let mut single: Exps = SmallVec::from_elem(0, n);
            single[m] = g[m];
            let mut rest: Exps = SmallVec::from_slice(g);
            rest[m] = 0;
            for (kd, cd) in self.nf_mono(&single).iter() {
                let sum: Exps = rest.iter().zip(&kd.c).map(|(x, y)| x + y).collect();
                for (kf, cf) in self.nf_mono(&sum).iter() {
                    let coef = cf.mul_ref(cd);
                    for (y, cy) in self.hecke(&kf.w, &kd.w).iter() {
                        accumulate(&mut acc, Key { c: kf.c.clone(), w: y.clone() }, cy.mul_ref(&coef));
                    }
                }
            }
        }
        let out: Arc<Lin<C>> = Arc::new(acc.into_iter().collect());
        self.mono_cache.insert(key, out.clone());
        out
    }

    /// Normal form of `L_{m+1}^a` (0-based `m`), `a ≥ ℓ`, added into `acc`.
    fn power(&self, m: usize, a: u8, n: usize, acc: &mut BTreeMap<Key, C>) {
        let unit = |e: Exps| Key { c: e, w: Perm::identity(n) };
        if m == 0 {
            let ell = self.ell;
            let mut v = self.red.clone();
            for _ in ell..a as usize {
                let top = v[ell - 1].clone();
                let mut next = vec![C::zero(); ell];
                for k in 0..ell {
                    if k > 0 {
                        next[k] += &v[k - 1];
                    }
                    next[k] += &top.mul_ref(&self.red[k]);
                }
                v = next;
            }
            for (k, c) in v.into_iter().enumerate() {
                let mut e: Exps = SmallVec::from_elem(0, n);
                e[0] = k as u8;
                accumulate(acc, unit(e), c);
            }
            return;
        }
        // L_M^a = κ g L_{M-1}^a g + κ L_{M-1} D(L_M^{a-1}) g + β g L_{M-1}^{a-1} + β D(L_M^{a-1}),
        // with g = g_{M-1}; here M = m + 1 and i = m is the 1-based index of g.
        let i = m;
        let simple = Perm::simple(i, n).unwrap();
        let mut prev: Exps = SmallVec::from_elem(0, n);
        prev[m] = a - 1;
        let d_terms = self.d_op(i, &prev);

        let mut lower: Exps = SmallVec::from_elem(0, n);
        lower[m - 1] = a;
        let inner = self.left_g(i, &self.nf_mono(&lower));
        for (k, c) in inner {
            let coef = c.mul_ref(&self.kappa);
            for (y, cy) in self.hecke(&k.w, &simple).iter() {
                accumulate(acc, Key { c: k.c.clone(), w: y.clone() }, cy.mul_ref(&coef));
            }
        }
        for (e, ce) in &d_terms {
            let mut e2 = e.clone();
            e2[m - 1] += 1;
            let coef = ce.mul_ref(&self.kappa);
            for (k, c) in self.nf_mono(&e2).iter() {
                let c2 = c.mul_ref(&coef);
                for (y, cy) in self.hecke(&k.w, &simple).iter() {
                    accumulate(acc, Key { c: k.c.clone(), w: y.clone() }, cy.mul_ref(&c2));
                }
            }
        }
        if self.variant == Variant::Degenerate {
            let mut lower: Exps = SmallVec::from_elem(0, n);
            lower[m - 1] = a - 1;
            for (k, c) in self.left_g(i, &self.nf_mono(&lower)) {
                accumulate(acc, k, c);
            }
            for (e, ce) in &d_terms {
                for (k, c) in self.nf_mono(e).iter() {
                    accumulate(acc, k.clone(), c.mul_ref(ce));
                }
            }
        }
    }

    /// `g_i · x` for `x` in normal form.
    fn left_g(&self, i: usize, x: &[(Key, C)]) -> Vec<(Key, C)> {
        let mut acc = BTreeMap::new();
        for (k, c) in x {
            let n = k.n();
            let simple = Perm::simple(i, n).unwrap();
            let mut sd = k.c.clone();
            sd.swap(i - 1, i);
            for (y, cy) in self.hecke(&simple, &k.w).iter() {
                accumulate(&mut acc, Key { c: sd.clone(), w: y.clone() }, cy.mul_ref(c));
            }
            for (e, ce) in self.d_op(i, &k.c) {
                let coef = ce.mul_ref(c);
                for (kf, cf) in self.nf_mono(&e).iter() {
                    let c2 = cf.mul_ref(&coef);
                    for (y, cy) in self.hecke(&kf.w, &k.w).iter() {
                        accumulate(&mut acc, Key { c: kf.c.clone(), w: y.clone() }, cy.mul_ref(&c2));
                    }
                }
            }
        }
        acc.into_iter().collect()
    }

    /// Identity key for the direct trace: `L^0 T_1` or `L^{ℓ-1,…,ℓ-1} T_1`.
    pub fn trace_key(&self, n: usize) -> Key {
        let e = match self.variant {
            Variant::NonDegenerate => 0,
            Variant::Degenerate => (self.ell - 1) as u8,
        };
        Key { c: SmallVec::from_elem(e, n), w: Perm::identity(n) }
    }

    /// `τ` read off as a single coefficient.
    pub fn tau_direct(&self, h: &Element<C>) -> C {
        h.coeff(&self.trace_key(h.n))
    }

    /// Every cached key product, sorted.
    #[allow(clippy::type_complexity)]
    pub fn key_table(&self) -> Vec<(Key, Key, Vec<(Key, C)>)> {
        let mut out: Vec<_> =
            self.key_cache.iter().map(|e| (e.key().0.clone(), e.key().1.clone(), e.value().to_vec())).collect();
        out.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
        out
    }

    /// Seeds the key-product cache. Entries must come from an algebra with
    /// the same parameters.
    pub fn preload_key_table(&self, entries: impl IntoIterator<Item = (Key, Key, Vec<(Key, C)>)>) {
        for (a, b, v) in entries {
            self.key_cache.insert((a, b), Arc::new(v));
        }
    }

    /// Number of cached products, for diagnostics.
    pub fn cache_sizes(&self) -> (usize, usize, usize, usize) {
        (self.hecke_cache.len(), self.push_cache.len(), self.mono_cache.len(), self.key_cache.len())
    }

    /// Every basis key of rank `n`.
    pub fn basis(&self, n: usize) -> Vec<Key> {
        let mut exps: Vec<Exps> = vec![SmallVec::new()];
        for _ in 0..n {
            exps = exps
                .into_iter()
                .flat_map(|e| {
                    (0..self.ell as u8).map(move |x| {
                        let mut e2 = e.clone();
                        e2.push(x);
                        e2
                    })
                })
                .collect();
        }
        let perms = Perm::all(n);
        let mut out = Vec::with_capacity(exps.len() * perms.len());
        for c in &exps {
            for w in &perms {
                out.push(Key { c: c.clone(), w: w.clone() });
            }
        }
        out
    }
}

fn add_perm<C: Coeff>(acc: &mut BTreeMap<Perm, C>, w: Perm, c: C) {
    if c.is_zero() {
        return;
    }
    match acc.entry(w) {
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
            if o.get().is_zero() {
                o.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}
