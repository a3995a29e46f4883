//! Exact coefficient arithmetic.
//!
//! Symbolic coefficients live in [`Poly`], an integer Laurent polynomial in
//! `q` and the cyclotomic parameters. Computations that need division (the
//! seminormal theory) run over [`BigRational`] after a [`Specialization`].
//! The engine is generic over the [`Coeff`] trait, which both implement.

mod poly;

use std::fmt;
use std::ops::{AddAssign, Neg, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use poly::{Monomial, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("operands come from different parameter sets or modes")]
    DomainMismatch,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no value for parameter {0}")]
    MissingParameter(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[serde(rename = "nondegenerate")]
    NonDegenerate,
    Degenerate,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::NonDegenerate => "nondegenerate",
            Variant::Degenerate => "degenerate",
        })
    }
}

/// Which algebra and which symbols name its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamSet {
    variant: Variant,
    ell: usize,
    hecke_symbol: String,
    cyclo_symbols: Vec<String>,
}

impl ParamSet {
    pub fn new(
        variant: Variant,
        ell: usize,
        hecke_symbol: impl Into<String>,
        cyclo_symbols: Vec<String>,
    ) -> Result<Self, ScalarError> {
        let hecke_symbol = hecke_symbol.into();
        if ell == 0 {
            return Err(ScalarError::InvalidParams("ell must be at least 1".into()));
        }
        if cyclo_symbols.len() != ell {
            return Err(ScalarError::InvalidParams(format!(
                "expected {ell} cyclotomic symbols, got {}",
                cyclo_symbols.len()
            )));
        }
        let mut all: Vec<&String> = cyclo_symbols.iter().collect();
        if variant == Variant::NonDegenerate {
            all.push(&hecke_symbol);
        }
        for (i, a) in all.iter().enumerate() {
            if a.is_empty() || all[..i].contains(a) {
                return Err(ScalarError::InvalidParams(format!("symbol `{a}` is empty or repeated")));
            }
        }
        Ok(ParamSet { variant, ell, hecke_symbol, cyclo_symbols })
    }

    /// `q` and `Q1..Ql`.
    pub fn nondegenerate(ell: usize) -> Self {
        Self::new(Variant::NonDegenerate, ell, "q", (1..=ell).map(|i| format!("Q{i}")).collect())
            .expect("default symbols are valid")
    }

    /// `u1..ul`.
    pub fn degenerate(ell: usize) -> Self {
        Self::new(Variant::Degenerate, ell, "q", (1..=ell).map(|i| format!("u{i}")).collect())
            .expect("default symbols are valid")
    }

    pub fn standard(variant: Variant, ell: usize) -> Self {
        match variant {
            Variant::NonDegenerate => Self::nondegenerate(ell),
            Variant::Degenerate => Self::degenerate(ell),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Symbol names indexed like [`Poly`] variables.
    pub fn symbol_names(&self) -> Vec<String> {
        let mut v = vec![self.hecke_symbol.clone()];
        v.extend(self.cyclo_symbols.iter().cloned());
        v
    }

    pub fn nvars(&self) -> usize {
        self.ell + 1
    }

    pub fn format(&self, p: &Poly) -> String {
        p.to_string_with(&self.symbol_names())
    }

    pub fn parse(&self, s: &str) -> Result<Poly, ScalarError> {
        let p = Poly::parse_with(s, &self.symbol_names())?;
        if self.variant == Variant::Degenerate && p.terms().any(|(m, _)| m.exponent(0) != 0) {
            return Err(ScalarError::Parse(s.to_string()));
        }
        Ok(p)
    }
}

/// Rational values for the parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Specialization {
    variant: Variant,
    q: BigRational,
    params: Vec<BigRational>,
}

impl Specialization {
    pub fn nondegenerate(q: BigRational, params: Vec<BigRational>) -> Result<Self, ScalarError> {
        if q.is_zero() || q.is_one() {
            return Err(ScalarError::InvalidParams(format!("q must not be 0 or 1 (got {q})")));
        }
        if params.is_empty() {
            return Err(ScalarError::InvalidParams("need at least one cyclotomic value".into()));
        }
        Ok(Specialization { variant: Variant::NonDegenerate, q, params })
    }

    pub fn degenerate(params: Vec<BigRational>) -> Result<Self, ScalarError> {
        if params.is_empty() {
            return Err(ScalarError::InvalidParams("need at least one cyclotomic value".into()));
        }
        Ok(Specialization { variant: Variant::Degenerate, q: BigRational::one(), params })
    }

    /// Convenience constructor from integers.
    pub fn from_ints(variant: Variant, q: i64, params: &[i64]) -> Result<Self, ScalarError> {
        let params = params.iter().map(|&v| BigRational::from_integer(v.into())).collect();
        match variant {
            Variant::NonDegenerate => Self::nondegenerate(BigRational::from_integer(q.into()), params),
            Variant::Degenerate => Self::degenerate(params),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn ell(&self) -> usize {
        self.params.len()
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn params(&self) -> &[BigRational] {
        &self.params
    }

    pub fn eval(&self, p: &Poly) -> Result<BigRational, ScalarError> {
        p.evaluate(&self.q, &self.params)
    }
}

impl fmt::Display for Specialization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.params.iter().map(|v| v.to_string()).collect();
        match self.variant {
            Variant::NonDegenerate => write!(f, "q={} Q=({})", self.q, vals.join(",")),
            Variant::Degenerate => write!(f, "u=({})", vals.join(",")),
        }
    }
}

/// Sufficient genericity test at size `n`: every residue (or content)
/// attached to distinct positions of tableaux of size at most `n` differs,
/// and the quantum integers up to `n` are invertible.
pub fn is_separated(sp: &Specialization, n: usize) -> bool {
    let vals = sp.params();
    match sp.variant() {
        Variant::NonDegenerate => {
            let q = sp.q();
            if vals.iter().any(|v| v.is_zero()) {
                return false;
            }
            let n = n as i32;
            for i in 0..vals.len() {
                for j in 0..vals.len() {
                    if i == j {
                        continue;
                    }
                    for d in -(n - 1)..n {
                        let qd = poly::rational_pow(q, d).expect("q is nonzero");
                        if qd * &vals[i] == vals[j] {
                            return false;
                        }
                    }
                }
            }
            let mut partial = BigRational::zero();
            let mut qk = BigRational::one();
            for _ in 0..n {
                partial += &qk;
                if partial.is_zero() {
                    return false;
                }
                qk *= q;
            }
            true
        }
        Variant::Degenerate => {
            let bound = BigRational::from_integer(BigInt::from(n as i64));
            for i in 0..vals.len() {
                for j in 0..vals.len() {
                    if i == j {
                        continue;
                    }
                    let diff = &vals[i] - &vals[j];
                    if diff.is_integer() && num_traits::Signed::abs(&diff) < bound {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// Coefficient ring of the algebra engines.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + 'static
{
    fn from_int(v: i64) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    /// Value under a specialization (rationals are returned unchanged).
    fn eval(&self, sp: &Specialization) -> Result<BigRational, ScalarError>;
    fn format_with(&self, names: &[String]) -> String;
    fn parse_with(s: &str, names: &[String]) -> Result<Self, ScalarError>;
    /// A symbolic value in this domain; rationals need the specialization.
    fn from_poly(p: &Poly, sp: Option<&Specialization>) -> Result<Self, ScalarError>;
}

impl Coeff for Poly {
    fn from_int(v: i64) -> Self {
        Poly::constant(v)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn eval(&self, sp: &Specialization) -> Result<BigRational, ScalarError> {
        sp.eval(self)
    }

    fn format_with(&self, names: &[String]) -> String {
        self.to_string_with(names)
    }

    fn parse_with(s: &str, names: &[String]) -> Result<Self, ScalarError> {
        Poly::parse_with(s, names)
    }

    fn from_poly(p: &Poly, _sp: Option<&Specialization>) -> Result<Self, ScalarError> {
        Ok(p.clone())
    }
}

impl Coeff for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn eval(&self, _sp: &Specialization) -> Result<BigRational, ScalarError> {
        Ok(self.clone())
    }

    fn format_with(&self, _names: &[String]) -> String {
        self.to_string()
    }

    fn parse_with(s: &str, _names: &[String]) -> Result<Self, ScalarError> {
        s.trim().parse().map_err(|_| ScalarError::Parse(s.to_string()))
    }

    fn from_poly(p: &Poly, sp: Option<&Specialization>) -> Result<Self, ScalarError> {
        sp.ok_or(ScalarError::MissingParameter(0))?.eval(p)
    }
}

/// Scalar tagged with its domain, for checked mixed-mode arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Symbolic { params: Arc<ParamSet>, value: Poly },
    Rational(BigRational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
}

impl Scalar {
    pub fn symbolic(params: &Arc<ParamSet>, value: Poly) -> Self {
        Scalar::Symbolic { params: params.clone(), value }
    }

    pub fn apply(&self, op: ScalarOp, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, rhs) {
            (Scalar::Symbolic { params: pa, value: a }, Scalar::Symbolic { params: pb, value: b }) => {
                if pa != pb {
                    return Err(ScalarError::DomainMismatch);
                }
                let value = match op {
                    ScalarOp::Add => a + b,
                    ScalarOp::Sub => a - b,
                    ScalarOp::Mul => a * b,
                };
                Ok(Scalar::Symbolic { params: pa.clone(), value })
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(match op {
                ScalarOp::Add => a + b,
                ScalarOp::Sub => a - b,
                ScalarOp::Mul => a * b,
            })),
            _ => Err(ScalarError::DomainMismatch),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Symbolic { params, value } => Scalar::Symbolic { params: params.clone(), value: -value },
            Scalar::Rational(r) => Scalar::Rational(-r),
        }
    }

    pub fn specialize(&self, sp: &Specialization) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Symbolic { params, value } => {
                if params.variant() != sp.variant() || params.ell() != sp.ell() {
                    return Err(ScalarError::DomainMismatch);
                }
                Ok(Scalar::Rational(sp.eval(value)?))
            }
            Scalar::Rational(_) => Err(ScalarError::DomainMismatch),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Symbolic { params, value } => f.write_str(&params.format(value)),
            Scalar::Rational(r) => write!(f, "{r}"),
        }
    }
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_modes_are_rejected() {
        let ps = Arc::new(ParamSet::nondegenerate(2));
        let a = Scalar::symbolic(&ps, Poly::var(0));
        let b = Scalar::Rational(rational(3));
        assert_eq!(a.apply(ScalarOp::Add, &b), Err(ScalarError::DomainMismatch));
        let other = Arc::new(ParamSet::degenerate(2));
        let c = Scalar::symbolic(&other, Poly::var(1));
        assert_eq!(a.apply(ScalarOp::Mul, &c), Err(ScalarError::DomainMismatch));
        assert!(a.apply(ScalarOp::Sub, &a).is_ok());
    }

    #[test]
    fn specialize_examples() {
        let sp = Specialization::from_ints(Variant::NonDegenerate, 2, &[1, 64]).unwrap();
        assert_eq!(sp.eval(&(&Poly::q_pow(2) - &Poly::one())).unwrap(), rational(3));
        assert_eq!(sp.eval(&(-Poly::var(2))).unwrap(), rational(-64));
        let sp6 = Specialization::from_ints(Variant::NonDegenerate, 2, &[6]).unwrap();
        assert_eq!(sp6.eval(&(&Poly::q_pow(-1) * &Poly::var(1))).unwrap(), rational(3));
    }

    #[test]
    fn q_one_rejected() {
        assert!(Specialization::from_ints(Variant::NonDegenerate, 1, &[1, 2]).is_err());
        assert!(Specialization::from_ints(Variant::NonDegenerate, 0, &[1, 2]).is_err());
    }

    #[test]
    fn separation_examples() {
        let good = Specialization::from_ints(Variant::NonDegenerate, 2, &[1, 64]).unwrap();
        assert!(is_separated(&good, 3));
        let bad = Specialization::from_ints(Variant::NonDegenerate, 2, &[1, 2]).unwrap();
        assert!(!is_separated(&bad, 3));
        // q = -1 kills 1 + q
        let root = Specialization::from_ints(Variant::NonDegenerate, -1, &[1]).unwrap();
        assert!(!is_separated(&root, 2));
        assert!(is_separated(&root, 1));
        let zero = Specialization::from_ints(Variant::NonDegenerate, 2, &[0]).unwrap();
        assert!(!is_separated(&zero, 2));
        let deg = Specialization::from_ints(Variant::Degenerate, 0, &[0, 100]).unwrap();
        assert!(is_separated(&deg, 4));
        let deg_bad = Specialization::from_ints(Variant::Degenerate, 0, &[0, 2]).unwrap();
        assert!(!is_separated(&deg_bad, 3));
        assert!(is_separated(&deg_bad, 2));
    }

    #[test]
    fn param_set_rejects_duplicates() {
        assert!(ParamSet::new(Variant::NonDegenerate, 2, "q", vec!["Q".into(), "Q".into()]).is_err());
        assert!(ParamSet::new(Variant::NonDegenerate, 1, "q", vec!["q".into()]).is_err());
        assert!(ParamSet::new(Variant::NonDegenerate, 0, "q", vec![]).is_err());
    }

    #[test]
    fn degenerate_format_uses_u() {
        let ps = ParamSet::degenerate(2);
        let p = &Poly::var(1) - &Poly::var(2);
        assert_eq!(ps.format(&p), "-u2 + u1");
        assert_eq!(ps.parse("-u2 + u1").unwrap(), p);
        assert!(ps.parse("q").is_err());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((-3i32..4, 0i32..3, 0i32..3, -5i64..6), 0..5).prop_map(|ts| {
            let mut p = Poly::zero();
            for (a, b, c, k) in ts {
                p += &Poly::term(Monomial::from_exponents(&[a, b, c]), BigInt::from(k));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn specialize_is_homomorphism(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            let sp = Specialization::from_ints(Variant::NonDegenerate, 3, &[2, -5]).unwrap();
            let lhs = sp.eval(&(&(&a * &b) + &c)).unwrap();
            let rhs = sp.eval(&a).unwrap() * sp.eval(&b).unwrap() + sp.eval(&c).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn string_round_trip(a in arb_poly()) {
            let ps = ParamSet::nondegenerate(2);
            let s = ps.format(&a);
            prop_assert_eq!(ps.parse(&s).unwrap(), a.clone());
            prop_assert_eq!(ps.format(&ps.parse(&s).unwrap()), s);
        }
    }
}
