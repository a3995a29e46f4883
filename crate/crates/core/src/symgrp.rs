//! Permutations of `{1..n}`.
//!
//! Permutations act on the right: `(i)(uv) = ((i)u)v`. A [`Perm`] stores the
//! one-line array `w[i] = (i)w` with 0-based entries. Multiplying on the
//! right by `σ_i` swaps the values `i` and `i+1`; multiplying on the left
//! swaps the positions.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("permutation sizes differ ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("index {index} out of range for n = {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("not a permutation: {0:?}")]
    NotBijective(Vec<usize>),
    #[error("composition sums to {got}, expected {expected}")]
    SumMismatch { got: usize, expected: usize },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(SmallVec<[u8; 8]>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        assert!(n < 256, "permutation too large");
        Perm((0..n as u8).collect())
    }

    /// `σ_i`, swapping `i` and `i+1` (1-based).
    pub fn simple(i: usize, n: usize) -> Result<Self, PermError> {
        if i == 0 || i >= n {
            return Err(PermError::OutOfRange { index: i, n });
        }
        let mut p = Self::identity(n);
        p.0.swap(i - 1, i);
        Ok(p)
    }

    /// From 1-based one-line notation.
    pub fn from_one_line(images: &[usize]) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(PermError::NotBijective(images.to_vec()));
            }
            seen[v - 1] = true;
        }
        Ok(Perm(images.iter().map(|&v| (v - 1) as u8).collect()))
    }

    pub(crate) fn from_zero_based(images: &[u8]) -> Self {
        Perm(SmallVec::from_slice(images))
    }

    /// 1-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.0.iter().map(|&v| v as usize + 1).collect()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `(i)w` for 1-based `i`.
    pub fn image(&self, i: usize) -> usize {
        self.0[i - 1] as usize + 1
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn compose(&self, other: &Perm) -> Result<Perm, PermError> {
        if self.n() != other.n() {
            return Err(PermError::SizeMismatch(self.n(), other.n()));
        }
        Ok(Perm(self.0.iter().map(|&v| other.0[v as usize]).collect()))
    }

    pub fn inverse(&self) -> Perm {
        let mut inv: SmallVec<[u8; 8]> = SmallVec::from_elem(0, self.n());
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Perm(inv)
    }

    /// `w σ_i` (1-based `i`).
    pub fn mul_simple_right(&self, i: usize) -> Perm {
        let mut p = self.clone();
        let (a, b) = ((i - 1) as u8, i as u8);
        for v in p.0.iter_mut() {
            if *v == a {
                *v = b;
            } else if *v == b {
                *v = a;
            }
        }
        p
    }

    /// `σ_i w` (1-based `i`).
    pub fn mul_simple_left(&self, i: usize) -> Perm {
        let mut p = self.clone();
        p.0.swap(i - 1, i);
        p
    }

    pub fn length(&self) -> usize {
        let w = &self.0;
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Is `ℓ(σ_i w) < ℓ(w)`?
    pub fn has_left_descent(&self, i: usize) -> bool {
        self.0[i - 1] > self.0[i]
    }

    /// Is `ℓ(w σ_i) < ℓ(w)`?
    pub fn has_right_descent(&self, i: usize) -> bool {
        let inv = self.inverse();
        inv.0[i - 1] > inv.0[i]
    }

    pub fn left_descents(&self) -> Vec<usize> {
        (1..self.n()).filter(|&i| self.has_left_descent(i)).collect()
    }

    pub fn right_descents(&self) -> Vec<usize> {
        let inv = self.inverse();
        (1..self.n()).filter(|&i| inv.0[i - 1] > inv.0[i]).collect()
    }

    /// Reduced word `[i_1, .., i_k]` with `w = σ_{i_1}⋯σ_{i_k}`, peeling the
    /// smallest left descent first.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut word = Vec::with_capacity(self.length());
        let mut w = self.clone();
        while let Some(i) = (1..w.n()).find(|&i| w.has_left_descent(i)) {
            word.push(i);
            w = w.mul_simple_left(i);
        }
        word
    }

    pub fn from_word(word: &[usize], n: usize) -> Result<Perm, PermError> {
        let mut w = Perm::identity(n);
        for &i in word {
            if i == 0 || i >= n {
                return Err(PermError::OutOfRange { index: i, n });
            }
            w = w.mul_simple_right(i);
        }
        Ok(w)
    }

    /// Bruhat order via the tableau criterion: sorted prefixes of the
    /// one-line arrays compare entrywise.
    pub fn bruhat_leq(&self, w: &Perm) -> Result<bool, PermError> {
        if self.n() != w.n() {
            return Err(PermError::SizeMismatch(self.n(), w.n()));
        }
        let n = self.n();
        let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            a.push(self.0[i]);
            b.push(w.0[i]);
            a.sort_unstable();
            b.sort_unstable();
            if a.iter().zip(&b).any(|(x, y)| x > y) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Does `w` fix every point above `m`, i.e. lie in `S_m`?
    pub fn in_parabolic(&self, m: usize) -> bool {
        self.0[m..].iter().enumerate().all(|(i, &v)| v as usize == m + i)
    }

    /// Every permutation of `{1..n}` in lexicographic one-line order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..n as u8).collect();
        loop {
            out.push(Perm(SmallVec::from_slice(&cur)));
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    /// Restriction of `w ∈ S_m ⊂ S_n` to `S_m`.
    pub fn truncate(&self, m: usize) -> Perm {
        debug_assert!(self.in_parabolic(m));
        Perm(SmallVec::from_slice(&self.0[..m]))
    }

    /// Image of `w` under `S_m ⊂ S_n`.
    pub fn extend(&self, n: usize) -> Perm {
        let mut v = self.0.clone();
        v.extend(self.n() as u8..n as u8);
        Perm(v)
    }
}

impl Mul for &Perm {
    type Output = Perm;
    fn mul(self, rhs: &Perm) -> Perm {
        self.compose(rhs).expect("permutation sizes differ")
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.one_line())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_line().iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.one_line().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Perm::from_one_line(&v).map_err(serde::de::Error::custom)
    }
}

/// Elements of the Young subgroup `S_{a_1} × S_{a_2} × ⋯` of `S_n`.
pub fn young_subgroup(composition: &[usize], n: usize) -> Result<Vec<Perm>, PermError> {
    let got: usize = composition.iter().sum();
    if got != n {
        return Err(PermError::SumMismatch { got, expected: n });
    }
    let mut out = vec![Perm::identity(n)];
    let mut offset = 0;
    for &part in composition {
        let block = Perm::all(part);
        let mut next = Vec::with_capacity(out.len() * block.len());
        for w in &out {
            for b in &block {
                let mut v = w.0.clone();
                for (i, &x) in b.0.iter().enumerate() {
                    v[offset + i] = offset as u8 + x;
                }
                next.push(Perm(v));
            }
        }
        out = next;
        offset += part;
    }
    out.sort();
    Ok(out)
}

fn check_word_range(lo: usize, hi: usize, n: usize) -> Result<(), PermError> {
    for idx in [lo, hi] {
        if idx > n {
            return Err(PermError::OutOfRange { index: idx, n });
        }
    }
    if lo <= hi && (lo == 0 || hi >= n) {
        return Err(PermError::OutOfRange { index: if lo == 0 { lo } else { hi }, n });
    }
    Ok(())
}

/// `β_{c,k} = σ_c σ_{c+1} ⋯ σ_k`, the identity when `c > k`.
pub fn beta(c: usize, k: usize, n: usize) -> Result<Perm, PermError> {
    check_word_range(c, k, n)?;
    let word: Vec<usize> = (c..=k).collect();
    Perm::from_word(&word, n)
}

/// `γ_{k,d} = σ_k σ_{k-1} ⋯ σ_d`, the identity when `d > k`.
pub fn gamma(k: usize, d: usize, n: usize) -> Result<Perm, PermError> {
    check_word_range(d, k, n)?;
    let word: Vec<usize> = (d..=k).rev().collect();
    Perm::from_word(&word, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn s(i: usize, n: usize) -> Perm {
        Perm::simple(i, n).unwrap()
    }

    #[test]
    fn involution() {
        assert!((&s(1, 3) * &s(1, 3)).is_identity());
    }

    #[test]
    fn longest_in_s3() {
        let w = &(&s(1, 3) * &s(2, 3)) * &s(1, 3);
        assert_eq!(w.length(), 3);
        assert_eq!(Perm::identity(4).reduced_word(), Vec::<usize>::new());
    }

    #[test]
    fn size_mismatch() {
        assert_eq!(Perm::identity(2).compose(&Perm::identity(3)), Err(PermError::SizeMismatch(2, 3)));
        assert!(Perm::identity(2).bruhat_leq(&Perm::identity(3)).is_err());
    }

    #[test]
    fn right_action_convention() {
        // (1)σ1σ2 = (2)σ2 = 3
        let w = &s(1, 3) * &s(2, 3);
        assert_eq!(w.image(1), 3);
        assert_eq!(s(1, 3).mul_simple_right(2), w);
        assert_eq!(s(2, 3).mul_simple_left(1), w);
    }

    #[test]
    fn reduced_words_multiply_back() {
        for n in 0..=5 {
            for w in Perm::all(n) {
                let word = w.reduced_word();
                assert_eq!(word.len(), w.length());
                assert_eq!(Perm::from_word(&word, n).unwrap(), w);
            }
        }
    }

    #[test]
    fn length_subadditive_and_compose_associative() {
        let all = Perm::all(4);
        for u in all.iter().step_by(3) {
            for v in all.iter().step_by(2) {
                let uv = u * v;
                assert!(uv.length() <= u.length() + v.length());
                for x in all.iter().step_by(5) {
                    assert_eq!(&uv * x, u * &(v * x));
                }
            }
        }
    }

    #[test]
    fn descents_match_length_drop() {
        for w in Perm::all(4) {
            for i in 1..4 {
                assert_eq!(w.has_left_descent(i), w.mul_simple_left(i).length() < w.length());
                assert_eq!(w.has_right_descent(i), w.mul_simple_right(i).length() < w.length());
            }
        }
    }

    #[test]
    fn bruhat_examples() {
        for w in Perm::all(3) {
            assert!(Perm::identity(3).bruhat_leq(&w).unwrap());
        }
        assert!(!s(1, 3).bruhat_leq(&s(2, 3)).unwrap());
        let w0 = &(&s(1, 3) * &s(2, 3)) * &s(1, 3);
        assert!(s(1, 3).bruhat_leq(&w0).unwrap());
    }

    fn subwords(word: &[usize], n: usize) -> HashSet<Perm> {
        let mut out = HashSet::new();
        for mask in 0u32..(1 << word.len()) {
            let sub: Vec<usize> =
                word.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &x)| x).collect();
            out.insert(Perm::from_word(&sub, n).unwrap());
        }
        out
    }

    #[test]
    fn bruhat_matches_subword_search() {
        for n in 1..=4 {
            let all = Perm::all(n);
            for w in &all {
                let below = subwords(&w.reduced_word(), n);
                for u in &all {
                    assert_eq!(u.bruhat_leq(w).unwrap(), below.contains(u), "{u:?} <= {w:?}");
                }
            }
        }
    }

    #[test]
    fn bruhat_is_partial_order() {
        let all = Perm::all(4);
        for u in &all {
            assert!(u.bruhat_leq(u).unwrap());
            for v in &all {
                if u != v && u.bruhat_leq(v).unwrap() {
                    assert!(!v.bruhat_leq(u).unwrap());
                    for w in &all {
                        if v.bruhat_leq(w).unwrap() {
                            assert!(u.bruhat_leq(w).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn young_subgroups() {
        assert_eq!(young_subgroup(&[3], 3).unwrap().len(), 6);
        assert_eq!(young_subgroup(&[1, 1, 1], 3).unwrap(), vec![Perm::identity(3)]);
        let mut want = vec![Perm::identity(3), s(1, 3)];
        want.sort();
        assert_eq!(young_subgroup(&[2, 1], 3).unwrap(), want);
        assert_eq!(young_subgroup(&[2, 0, 2], 4).unwrap().len(), 4);
        assert!(young_subgroup(&[2, 2], 3).is_err());
    }

    #[test]
    fn coset_words() {
        assert!(beta(3, 2, 4).unwrap().is_identity());
        assert!(beta(4, 3, 4).unwrap().is_identity());
        assert_eq!(gamma(2, 1, 3).unwrap(), &s(2, 3) * &s(1, 3));
        assert_eq!(beta(1, 4, 5).unwrap().length(), 4);
        assert!(beta(1, 4, 4).is_err());
        assert!(gamma(3, 0, 4).is_err());
        assert!(beta(6, 2, 4).is_err());
    }

    #[test]
    fn unique_coset_factorization() {
        for n in 1..=5 {
            for w in Perm::all(n) {
                let mut hits = 0;
                for c in 1..=n {
                    let b = beta(c, n - 1, n).unwrap();
                    let y = &b.inverse() * &w;
                    if y.in_parabolic(n - 1) {
                        hits += 1;
                        assert_eq!(&b * &y, w);
                        assert_eq!(b.length() + y.length(), w.length());
                    }
                }
                assert_eq!(hits, 1);
            }
        }
    }

    #[test]
    fn json_is_one_based() {
        let w = &s(1, 3) * &s(2, 3);
        let j = serde_json::to_string(&w).unwrap();
        assert_eq!(j, "[3,1,2]");
        assert_eq!(serde_json::from_str::<Perm>(&j).unwrap(), w);
        assert!(serde_json::from_str::<Perm>("[1,1]").is_err());
    }
}
