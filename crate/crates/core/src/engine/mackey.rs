//! The splitting `H_n = H_{n-1} g_{n-1} H_{n-1} ⊕ ⨁_k H_{n-1} L_n^k`, the
//! descending maps `ε_n` and the symmetrizing forms.

use std::collections::BTreeMap;

use smallvec::SmallVec;

use super::{accumulate, Algebra, Element, EngineError, Exps, Key};
use crate::scalars::{Coeff, Variant};
use crate::symgrp::{beta, gamma, Perm};

/// How a permutation outside `S_{n-1}` is split as `w = y·σ_{n-1}·v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CosetChoice {
    /// `σ_{n-1} v` is the distinguished right coset representative.
    #[default]
    RightMinimal,
    /// `y σ_{n-1}` is the distinguished left coset representative.
    LeftMinimal,
}

/// `h = Σ left·g_{n-1}·right + Σ_k lower[k]·L_n^k` with every part in `H_{n-1}`.
/// Only the image of the middle part is canonical; the buckets are unique.
#[derive(Clone, Debug)]
pub struct MackeyDecomposition<C> {
    pub middle: Vec<(Element<C>, Element<C>)>,
    pub lower: Vec<Element<C>>,
}

fn truncate_key(k: &Key, m: usize) -> Key {
    Key { c: SmallVec::from_slice(&k.c[..m]), w: k.w.truncate(m) }
}

impl<C: Coeff> Algebra<C> {
    fn split(&self, w: &Perm, choice: CosetChoice) -> (Perm, Perm) {
        let n = w.n();
        match choice {
            CosetChoice::RightMinimal => {
                let d = w.image(n);
                let g = gamma(n - 1, d, n).expect("in range");
                let y = w * &g.inverse();
                let v = gamma(n - 2, d, n).expect("in range");
                (y.truncate(n - 1), v.truncate(n - 1))
            }
            CosetChoice::LeftMinimal => {
                let c0 = w.inverse().image(n);
                let b = beta(c0, n - 1, n).expect("in range");
                let u = beta(c0, n - 2, n).expect("in range");
                let v = &b.inverse() * w;
                (u.truncate(n - 1), v.truncate(n - 1))
            }
        }
    }

    /// Contribution of one key: optional middle pair, and bucketed lower terms.
    #[allow(clippy::type_complexity)]
    fn split_key(
        &self,
        key: &Key,
        coeff: &C,
        choice: CosetChoice,
        want_middle: bool,
        only_bucket: Option<usize>,
    ) -> (Option<(Key, Key)>, Vec<(usize, Vec<(Key, C)>)>) {
        let n = key.n();
        let m = n - 1;
        let cn = key.c[m];
        if key.w.in_parabolic(m) {
            if only_bucket.is_some_and(|b| b != cn as usize) {
                return (None, Vec::new());
            }
            return (None, vec![(cn as usize, vec![(truncate_key(key, m), coeff.clone())])]);
        }
        let (y, v) = self.split(&key.w, choice);
        let left = Key { c: SmallVec::from_slice(&key.c[..m]), w: y };
        let middle = want_middle.then(|| {
            let mut rc: Exps = SmallVec::from_elem(0, m);
            if m > 0 {
                rc[m - 1] = cn;
            }
            (left.clone(), Key { c: rc, w: v.clone() })
        });
        let mut single: Exps = SmallVec::from_elem(0, n);
        single[m] = cn;
        let mut out = Vec::new();
        for (e, ce) in self.d_op(m, &single) {
            let bucket = e[m] as usize;
            if only_bucket.is_some_and(|b| b != bucket) {
                continue;
            }
            let mut rc: Exps = SmallVec::from_elem(0, m);
            rc[m - 1] = e[m - 1];
            let a = Element::from_key(left.clone(), coeff.mul_ref(&ce));
            let b = Element::from_key(Key { c: rc, w: v.clone() }, C::one());
            let prod = self.mul(&a, &b).expect("same rank");
            out.push((bucket, prod.terms.into_iter().collect()));
        }
        (middle, out)
    }

    pub fn mackey_decompose(&self, h: &Element<C>, choice: CosetChoice) -> Result<MackeyDecomposition<C>, EngineError> {
        let n = h.n();
        if n == 0 {
            return Err(EngineError::EmptyRank);
        }
        let mut lower: Vec<BTreeMap<Key, C>> = vec![BTreeMap::new(); self.ell];
        let mut middle: BTreeMap<Key, BTreeMap<Key, C>> = BTreeMap::new();
        for (key, coeff) in h.terms() {
            let (mid, buckets) = self.split_key(key, coeff, choice, true, None);
            if let Some((l, r)) = mid {
                accumulate(middle.entry(r).or_default(), l, coeff.clone());
            }
            for (b, terms) in buckets {
                for (k, c) in terms {
                    accumulate(&mut lower[b], k, c);
                }
            }
        }
        let m = n - 1;
        Ok(MackeyDecomposition {
            middle: middle
                .into_iter()
                .filter(|(_, l)| !l.is_empty())
                .map(|(r, l)| (Element::from_terms(m, l), Element::from_key(r, C::one())))
                .collect(),
            lower: lower.into_iter().map(|b| Element::from_terms(m, b)).collect(),
        })
    }

    /// Bucket `p_k(h)` alone.
    pub fn bucket(&self, h: &Element<C>, k: usize) -> Result<Element<C>, EngineError> {
        let n = h.n();
        if n == 0 {
            return Err(EngineError::EmptyRank);
        }
        let mut acc = BTreeMap::new();
        for (key, coeff) in h.terms() {
            let (_, buckets) = self.split_key(key, coeff, CosetChoice::RightMinimal, false, Some(k));
            for (_, terms) in buckets {
                for (kk, c) in terms {
                    accumulate(&mut acc, kk, c);
                }
            }
        }
        Ok(Element::from_terms(n - 1, acc))
    }

    /// Index of the bucket that `ε` keeps.
    pub fn epsilon_bucket(&self) -> usize {
        match self.variant {
            Variant::NonDegenerate => 0,
            Variant::Degenerate => self.ell - 1,
        }
    }

    /// `ε_n : H_n → H_{n-1}`.
    pub fn epsilon(&self, h: &Element<C>) -> Result<Element<C>, EngineError> {
        self.bucket(h, self.epsilon_bucket())
    }

    /// `ε_1 ∘ ⋯ ∘ ε_n`.
    pub fn tau_iterated(&self, h: &Element<C>) -> C {
        let mut cur = h.clone();
        while cur.n() > 0 {
            cur = self.epsilon(&cur).expect("positive rank");
        }
        cur.coeff(&Key::identity(0))
    }

    /// `Σ left·g_{n-1}·right`, in `H_n`.
    pub fn middle_image(&self, d: &MackeyDecomposition<C>, n: usize) -> Element<C> {
        let g = self.t(n - 1, n).expect("n ≥ 2 when the middle is nonempty");
        let mut out = Element::zero(n);
        for (l, r) in &d.middle {
            let lg = self.mul(&l.embed(n), &g).expect("same rank");
            out = &out + &self.mul(&lg, &r.embed(n)).expect("same rank");
        }
        out
    }

    /// Reassembles the decomposed element of `H_n`.
    pub fn reconstruct(&self, d: &MackeyDecomposition<C>, n: usize) -> Element<C> {
        let mut out = if d.middle.is_empty() { Element::zero(n) } else { self.middle_image(d, n) };
        for (k, p) in d.lower.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mut e: Exps = SmallVec::from_elem(0, n);
            e[n - 1] = k as u8;
            let lk = self.monomial(&e, n);
            out = &out + &self.mul(&p.embed(n), &lk).expect("same rank");
        }
        out
    }
}
