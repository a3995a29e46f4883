use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::ScalarError;

/// Exponent vector `(q, Q1, .., Ql)`, stored with trailing zeros trimmed so
/// that equal monomials are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[i32; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn from_exponents(exps: &[i32]) -> Self {
        let mut v: SmallVec<[i32; 4]> = exps.iter().copied().collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    /// Exponent of variable `i` (0 is the Hecke parameter).
    pub fn exponent(&self, i: usize) -> i32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self, nvars: usize) -> Vec<i32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    fn len(&self) -> usize {
        self.0.len()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.len() >= other.len() { (&self.0, &other.0) } else { (&other.0, &self.0) };
        let mut v = long.clone();
        for (x, y) in v.iter_mut().zip(short.iter()) {
            *x += y;
        }
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.len().min(other.len());
        match self.0[..k].cmp(&other.0[..k]) {
            Ordering::Equal => {}
            o => return o,
        }
        let tail_sign = |t: &[i32]| t.iter().find(|&&x| x != 0).map_or(Ordering::Equal, |x| x.cmp(&0));
        if self.len() > k {
            tail_sign(&self.0[k..])
        } else {
            tail_sign(&other.0[k..]).reverse()
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Sparse Laurent polynomial over the integers in the Hecke parameter and
/// the cyclotomic parameters. Variable 0 is `q`; variables `1..=l` are the
/// cyclotomic parameters. Only `q` may carry a negative exponent.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::term(Monomial::one(), c.into())
    }

    pub fn term(m: Monomial, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// The variable with index `i` (0 = q, i >= 1 = i-th cyclotomic parameter).
    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        Self::term(Monomial::from_exponents(&e), BigInt::one())
    }

    pub fn q_pow(e: i32) -> Self {
        Self::term(Monomial::from_exponents(&[e]), BigInt::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Largest variable index with a nonzero exponent, plus one.
    pub fn num_vars_used(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Evaluate at rational values: `q_value` for variable 0 and
    /// `values[i-1]` for variable `i`.
    pub fn evaluate(&self, q_value: &BigRational, values: &[BigRational]) -> Result<BigRational, ScalarError> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for i in 0..m.len() {
                let e = m.exponent(i);
                if e == 0 {
                    continue;
                }
                let base = if i == 0 { q_value } else { values.get(i - 1).ok_or(ScalarError::MissingParameter(i))? };
                t *= rational_pow(base, e)?;
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Render using the given symbol names: `names[0]` for `q`, `names[i]`
    /// for cyclotomic parameter `i`.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for i in 0..m.len() {
                let e = m.exponent(i);
                if e == 0 {
                    continue;
                }
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            if factors.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }

    /// Parse the format produced by [`Poly::to_string_with`].
    pub fn parse_with(s: &str, names: &[String]) -> Result<Poly, ScalarError> {
        let err = || ScalarError::Parse(s.to_string());
        let s = s.trim();
        if s.is_empty() {
            return Err(err());
        }
        let mut result = Poly::zero();
        // split into signed terms on top-level '+' / '-' that follow a space
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut rest = s;
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        }
        loop {
            let plus = rest.find(" + ");
            let minus = rest.find(" - ");
            let next = match (plus, minus) {
                (Some(p), Some(m)) => Some(p.min(m)),
                (a, b) => a.or(b),
            };
            match next {
                Some(pos) => {
                    terms.push((negative, rest[..pos].to_string()));
                    negative = &rest[pos..pos + 3] == " - ";
                    rest = &rest[pos + 3..];
                }
                None => {
                    terms.push((negative, rest.to_string()));
                    break;
                }
            }
        }
        for (neg, body) in terms {
            let mut coeff = BigInt::one();
            let mut exps: Vec<i32> = vec![0; names.len()];
            for factor in body.split('*') {
                let factor = factor.trim();
                if factor.is_empty() {
                    return Err(err());
                }
                if factor.chars().all(|ch| ch.is_ascii_digit()) {
                    coeff *= factor.parse::<BigInt>().map_err(|_| err())?;
                    continue;
                }
                let (name, e) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<i32>().map_err(|_| err())?),
                    None => (factor, 1),
                };
                let idx = names.iter().position(|x| x == name).ok_or_else(err)?;
                if idx > 0 && e < 0 {
                    return Err(err());
                }
                exps[idx] += e;
            }
            if neg {
                coeff = -coeff;
            }
            result.add_term(Monomial::from_exponents(&exps), coeff);
        }
        Ok(result)
    }

    /// JSON monomial list: `[{"exponents": [..], "coeff": ".."}]`, exponent
    /// vectors padded to `nvars`.
    pub fn to_json(&self, nvars: usize) -> serde_json::Value {
        let list: Vec<MonomialRecord> = self
            .terms
            .iter()
            .map(|(m, c)| MonomialRecord { exponents: m.exponents(nvars), coeff: c.to_string() })
            .collect();
        serde_json::to_value(list).expect("monomial list serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Poly, ScalarError> {
        let list: Vec<MonomialRecord> =
            serde_json::from_value(v.clone()).map_err(|e| ScalarError::Parse(e.to_string()))?;
        let mut p = Poly::zero();
        for rec in list {
            if rec.exponents.iter().skip(1).any(|&e| e < 0) {
                return Err(ScalarError::Parse(format!("negative cyclotomic exponent in {:?}", rec.exponents)));
            }
            let c: BigInt = rec.coeff.parse().map_err(|_| ScalarError::Parse(rec.coeff.clone()))?;
            p.add_term(Monomial::from_exponents(&rec.exponents), c);
        }
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialRecord {
    exponents: Vec<i32>,
    coeff: String,
}

pub(crate) fn rational_pow(base: &BigRational, e: i32) -> Result<BigRational, ScalarError> {
    if e >= 0 {
        Ok(num_traits::pow(base.clone(), e as usize))
    } else if base.is_zero() {
        Err(ScalarError::DivisionByZero)
    } else {
        Ok(num_traits::pow(base.recip(), (-e) as usize))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nv = self.num_vars_used().max(1);
        let mut names = vec!["q".to_string()];
        names.extend((1..nv).map(|i| format!("Q{i}")));
        f.write_str(&self.to_string_with(&names))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::constant(1)
    }
}

impl<'a> AddAssign<&'a Poly> for Poly {
    fn add_assign(&mut self, rhs: &'a Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> SubAssign<&'a Poly> for Poly {
    fn sub_assign(&mut self, rhs: &'a Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl<'b> Add<&'b Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &'b Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'b> Sub<&'b Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &'b Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'b> Mul<&'b Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &'b Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly { (&self).$f(&rhs) }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &'a Poly) -> Poly { (&self).$f(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl From<i64> for Poly {
    fn from(v: i64) -> Self {
        Poly::constant(v)
    }
}
