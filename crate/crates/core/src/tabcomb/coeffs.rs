//! Closed-form tableau coefficients.
//!
//! Everything with a non-monomial denominator is evaluated under a
//! [`Specialization`]; the trace values `d_t` stay symbolic.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{MultiPartition, Node, StdTableau, TabError};
use crate::scalars::{Poly, Specialization, Variant};

fn res_value(x: &Node, sp: &Specialization) -> BigRational {
    let param = &sp.params()[x.comp - 1];
    match sp.variant() {
        Variant::NonDegenerate => q_pow(sp, x.diagonal()) * param,
        Variant::Degenerate => BigRational::from_integer(x.diagonal().into()) + param,
    }
}

fn q_pow(sp: &Specialization, e: i64) -> BigRational {
    let q = sp.q();
    let base = if e < 0 { q.recip() } else { q.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

fn checked_div(a: BigRational, b: &BigRational) -> Result<BigRational, TabError> {
    if b.is_zero() {
        Err(TabError::NotSeparated)
    } else {
        Ok(a / b)
    }
}

fn require(sp: &Specialization, variant: Variant, t: &StdTableau) -> Result<(), TabError> {
    if sp.variant() != variant || sp.ell() != t.shape().ell() {
        Err(TabError::VariantMismatch)
    } else {
        Ok(())
    }
}

/// `∏_i ∏_{𝒜_t(i)}(res_t(i) - res) / ∏_{ℛ_t(i)}(res_t(i) - res)`.
fn addable_removable_product(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    let mut num = BigRational::one();
    let mut den = BigRational::one();
    for i in 1..=t.size() {
        let r = res_value(&t.entries()[i - 1], sp);
        for y in t.a_set(i) {
            num *= &r - res_value(&y, sp);
        }
        for y in t.r_set(i) {
            den *= &r - res_value(&y, sp);
        }
    }
    checked_div(num, &den)
}

/// `α(λ)`.
pub fn coeff_alpha(shape: &MultiPartition) -> usize {
    shape.alpha()
}

/// `γ_t = q^{ℓ(d(t)) + α(λ)} ∏ …`.
pub fn coeff_gamma_t(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    require(sp, Variant::NonDegenerate, t)?;
    let e = (t.d_of().length() + t.shape().alpha()) as i64;
    Ok(q_pow(sp, e) * addable_removable_product(t, sp)?)
}

/// `r_t`, the content analogue of `γ_t`.
pub fn coeff_r_t(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    require(sp, Variant::Degenerate, t)?;
    addable_removable_product(t, sp)
}

fn sign(ell: usize) -> BigRational {
    if ell % 2 == 1 {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// `Add(t_{↓≤n-1}) \ {t^{-1}(n)}` and `Rem(t_{↓≤n-1})`.
fn last_box_neighbours(t: &StdTableau) -> (Node, Vec<Node>, Vec<Node>) {
    let n = t.size();
    let x = t.entries()[n - 1];
    let prev = t.restrict(n - 1);
    let add = prev.shape().addable().into_iter().filter(|y| *y != x).collect();
    (x, add, prev.shape().removable())
}

/// `c_{t,n}` through the ratio `γ_t / γ_{t↓}`.
pub fn coeff_c_tn(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    require(sp, Variant::NonDegenerate, t)?;
    let (x, add, rem) = last_box_neighbours(t);
    let r = res_value(&x, sp);
    let mut val = sign(sp.ell()) * checked_div(coeff_gamma_t(t, sp)?, &coeff_gamma_t(&t.restrict(t.size() - 1), sp)?)?;
    for a in rem {
        val *= checked_div(r.clone(), &res_value(&a, sp))? - BigRational::one();
    }
    for g in add {
        val = checked_div(val, &(checked_div(r.clone(), &res_value(&g, sp))? - BigRational::one()))?;
    }
    Ok(val)
}

/// `c_{t,n}` through the `q^{n-n(t)+c(t,n)-1}` prefactor and the products
/// over nodes not below `t^{-1}(n)`.
pub fn coeff_c_tn_prefactor(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    require(sp, Variant::NonDegenerate, t)?;
    let n = t.size();
    let (x, add, rem) = last_box_neighbours(t);
    let r = res_value(&x, sp);
    let e = n as i64 - t.k_of() as i64 + x.col as i64 - 1;
    let mut num = sign(sp.ell()) * q_pow(sp, e);
    let mut den = BigRational::one();
    for g in &add {
        num *= res_value(g, sp);
        if !g.precedes(&x) {
            den *= &r - res_value(g, sp);
        }
    }
    for a in &rem {
        den *= res_value(a, sp);
        if !a.precedes(&x) {
            num *= &r - res_value(a, sp);
        }
    }
    checked_div(num, &den)
}

/// `c_t = ∏_k c_{t↓≤k, k}`.
pub fn coeff_c_t(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    let mut out = BigRational::one();
    for k in 1..=t.size() {
        out *= coeff_c_tn(&t.restrict(k), sp)?;
    }
    Ok(out)
}

/// `𝚌_{t,n}` through the ratio `r_t / r_{t↓}`.
pub fn coeff_rc_tn(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    require(sp, Variant::Degenerate, t)?;
    let (x, add, rem) = last_box_neighbours(t);
    let r = res_value(&x, sp);
    let mut num = coeff_r_t(t, sp)?;
    let mut den = coeff_r_t(&t.restrict(t.size() - 1), sp)?;
    for a in rem {
        num *= &r - res_value(&a, sp);
    }
    for g in add {
        den *= &r - res_value(&g, sp);
    }
    checked_div(num, &den)
}

/// `𝚌_{t,n}` as the product over nodes not below `t^{-1}(n)`.
pub fn coeff_rc_tn_restricted(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    require(sp, Variant::Degenerate, t)?;
    let (x, add, rem) = last_box_neighbours(t);
    let r = res_value(&x, sp);
    let mut num = BigRational::one();
    let mut den = BigRational::one();
    for a in rem.iter().filter(|a| !a.precedes(&x)) {
        num *= &r - res_value(a, sp);
    }
    for g in add.iter().filter(|g| !g.precedes(&x)) {
        den *= &r - res_value(g, sp);
    }
    checked_div(num, &den)
}

/// `𝚌_t = ∏_k 𝚌_{t↓≤k, k}`.
pub fn coeff_rc_t(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    let mut out = BigRational::one();
    for k in 1..=t.size() {
        out *= coeff_rc_tn(&t.restrict(k), sp)?;
    }
    Ok(out)
}

/// `∏_{i=from}^{ℓ} (-Q_i)`.
fn minus_q_product(from: usize, ell: usize) -> Poly {
    let mut p = Poly::one();
    for i in from..=ell {
        p = &p * &(-Poly::var(i));
    }
    p
}

/// `d_t = q^{Σ_k (k - k(t↓≤k))} ∏_j ∏_{i>l(t,j)} (-Q_i)`.
pub fn coeff_d_t(t: &StdTableau) -> Poly {
    let ell = t.shape().ell();
    let e: usize = (1..=t.size()).map(|k| k - t.restrict(k).k_of()).sum();
    let mut p = Poly::q_pow(e as i32);
    for x in t.entries() {
        p = &p * &minus_q_product(x.comp + 1, ell);
    }
    p
}

/// Degenerate trace of `m_tt`: 1 when every entry lies in the first component.
pub fn coeff_deg_trace(t: &StdTableau) -> Poly {
    Poly::constant(t.entries().iter().all(|x| x.comp == 1) as i64)
}

/// Scalar `E` with `ε_n(m_st) = E·m_{s↓t↓}` when `n(s) = n(t)`:
/// `q^{n-n(t)} ∏_{i>l(t,n)}(-Q_i)`, or `δ_{l(t,n),1}` in the degenerate case.
pub fn eps_murphy_coeff(t: &StdTableau, variant: Variant) -> Poly {
    let n = t.size();
    let l = t.comp_of(n);
    match variant {
        Variant::NonDegenerate => &Poly::q_pow((n - t.k_of()) as i32) * &minus_q_product(l + 1, t.shape().ell()),
        Variant::Degenerate => Poly::constant((l == 1) as i64),
    }
}

/// Both forms of the last-box coefficient, for agreement checks.
pub fn last_box_coeff_forms(t: &StdTableau, sp: &Specialization) -> Result<(BigRational, BigRational), TabError> {
    match sp.variant() {
        Variant::NonDegenerate => Ok((coeff_c_tn(t, sp)?, coeff_c_tn_prefactor(t, sp)?)),
        Variant::Degenerate => Ok((coeff_rc_tn(t, sp)?, coeff_rc_tn_restricted(t, sp)?)),
    }
}

/// Seminormal trace coefficient (`c_t` or `𝚌_t`).
pub fn seminormal_trace_coeff(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    match sp.variant() {
        Variant::NonDegenerate => coeff_c_t(t, sp),
        Variant::Degenerate => coeff_rc_t(t, sp),
    }
}

/// Last-box seminormal coefficient (`c_{t,n}` or `𝚌_{t,n}`).
pub fn seminormal_last_coeff(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    match sp.variant() {
        Variant::NonDegenerate => coeff_c_tn(t, sp),
        Variant::Degenerate => coeff_rc_tn(t, sp),
    }
}

/// Structure constant of `f_tt f_tt` (`γ_t` or `r_t`).
pub fn seminormal_norm(t: &StdTableau, sp: &Specialization) -> Result<BigRational, TabError> {
    match sp.variant() {
        Variant::NonDegenerate => coeff_gamma_t(t, sp),
        Variant::Degenerate => coeff_r_t(t, sp),
    }
}

/// One CSV row `lambda,tableau-id,coefficient`.
pub fn coefficient_csv_row(shape: &MultiPartition, tableau_id: usize, coeff: &str) -> String {
    format!("\"{shape}\",{tableau_id},\"{coeff}\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rational, ParamSet};
    use crate::tabcomb::{enum_multipartitions, enum_std_tableaux, superstandard};

    fn mp(s: &str) -> MultiPartition {
        s.parse().unwrap()
    }

    fn nd(q: i64, params: &[i64]) -> Specialization {
        Specialization::from_ints(Variant::NonDegenerate, q, params).unwrap()
    }

    fn dg(params: &[i64]) -> Specialization {
        Specialization::from_ints(Variant::Degenerate, 0, params).unwrap()
    }

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn gamma_level_one() {
        let t = superstandard(&mp("((2))"));
        for q in [2, 3, 5, -7] {
            assert_eq!(coeff_gamma_t(&t, &nd(q, &[4])).unwrap(), rational(1 + q));
        }
        assert_eq!(coeff_gamma_t(&superstandard(&mp("((1))")), &nd(2, &[3])).unwrap(), rational(1));
        assert_eq!(coeff_alpha(&mp("((2,2))")), 2);
    }

    #[test]
    fn c_tn_level_one() {
        let t = superstandard(&mp("((2))"));
        for q in [2, 3, 5] {
            let sp = nd(q, &[1]);
            assert_eq!(coeff_c_tn(&t, &sp).unwrap(), rational(1));
            assert_eq!(coeff_c_tn_prefactor(&t, &sp).unwrap(), rational(1));
            assert_eq!(coeff_c_t(&t, &sp).unwrap(), rational(1));
        }
    }

    #[test]
    fn level_two_single_box() {
        let sp = nd(2, &[3, 5]);
        let t1 = superstandard(&mp("((1),∅)"));
        assert_eq!(coeff_gamma_t(&t1, &sp).unwrap(), rational(3 - 5));
        assert_eq!(coeff_c_t(&t1, &sp).unwrap(), rational(-5));
        let t2 = superstandard(&mp("(∅,(1))"));
        assert_eq!(coeff_gamma_t(&t2, &sp).unwrap(), rational(1));
        assert_eq!(coeff_c_t(&t2, &sp).unwrap(), frac(-3, 5 - 3));
        let dsp = dg(&[0, 7]);
        assert_eq!(coeff_r_t(&t1.clone(), &dsp).unwrap(), rational(-7));
        assert_eq!(coeff_rc_t(&t1, &dsp).unwrap(), rational(1));
        assert_eq!(coeff_rc_t(&t2, &dsp).unwrap(), frac(1, 7));
    }

    #[test]
    fn degenerate_level_one() {
        assert_eq!(coeff_r_t(&superstandard(&mp("((1))")), &dg(&[4])).unwrap(), rational(1));
        let t = superstandard(&mp("((2))"));
        assert_eq!(coeff_rc_tn(&t, &dg(&[4])).unwrap(), rational(1));
        assert_eq!(coeff_rc_tn_restricted(&t, &dg(&[4])).unwrap(), rational(1));
    }

    #[test]
    fn d_t_examples() {
        let ps = ParamSet::nondegenerate(2);
        assert_eq!(ps.format(&coeff_d_t(&superstandard(&mp("((1),(1))")))), "-Q2");
        let t = StdTableau::from_rows(&[vec![vec![1, 3], vec![2]]]).unwrap();
        assert_eq!(coeff_d_t(&t), Poly::var(0));
        let t = StdTableau::from_rows(&[vec![vec![2]], vec![vec![1]]]).unwrap();
        assert_eq!(ps.format(&coeff_d_t(&t)), "-q*Q2");
    }

    #[test]
    fn wrong_variant_is_rejected() {
        let t = superstandard(&mp("((2))"));
        assert_eq!(coeff_gamma_t(&t, &dg(&[0])), Err(TabError::VariantMismatch));
        assert_eq!(coeff_r_t(&t, &nd(2, &[1])), Err(TabError::VariantMismatch));
    }

    #[test]
    fn zero_denominator_is_reported() {
        let t = superstandard(&mp("((1),(1))"));
        assert_eq!(coeff_c_tn(&t, &nd(2, &[3, 3])), Err(TabError::NotSeparated));
    }

    #[test]
    fn both_forms_agree() {
        let nds = [nd(2, &[1, 64, 4099]), nd(3, &[1, 7, 1000]), nd(5, &[2, 3, 11])];
        let dgs = [dg(&[0, 100, 250]), dg(&[1, 50, -90]), dg(&[-3, 7, 31])];
        for ell in 1..=3 {
            for n in 1..=4 {
                for shape in enum_multipartitions(n, ell) {
                    for t in enum_std_tableaux(&shape) {
                        for sp in &nds {
                            let sp = nd(sp.q().to_integer().try_into().unwrap(), &ints(&sp.params()[..ell]));
                            let (a, b) = last_box_coeff_forms(&t, &sp).unwrap();
                            assert_eq!(a, b, "{t} at {sp}");
                        }
                        for sp in &dgs {
                            let sp = dg(&ints(&sp.params()[..ell]));
                            let (a, b) = last_box_coeff_forms(&t, &sp).unwrap();
                            assert_eq!(a, b, "{t} at {sp}");
                        }
                    }
                }
            }
        }
    }

    fn ints(v: &[BigRational]) -> Vec<i64> {
        v.iter().map(|x| x.to_integer().try_into().unwrap()).collect()
    }

    #[test]
    fn eps_coeff_examples() {
        let t = StdTableau::from_rows(&[vec![vec![1, 3], vec![2]]]).unwrap();
        assert_eq!(eps_murphy_coeff(&t, Variant::NonDegenerate), Poly::var(0));
        let t = superstandard(&mp("((1),(1))"));
        assert_eq!(eps_murphy_coeff(&t, Variant::Degenerate), Poly::zero());
        assert_eq!(eps_murphy_coeff(&t, Variant::NonDegenerate), Poly::one());
    }

    #[test]
    fn csv_row() {
        assert_eq!(coefficient_csv_row(&mp("((2),∅)"), 0, "-Q2"), "\"((2),∅)\",0,\"-Q2\"");
    }
}
