use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use smallvec::SmallVec;

use super::{murphy_basis_matrix, CellError, MurphyBasis, Setting};
use crate::engine::{Element, Exps};
use crate::linalg::RatMatrix;
use crate::scalars::{is_separated, Specialization};
use crate::tabcomb::{residue_classes, StdTableau};

/// `C(k)` for `k = 1..n`, evaluated and deduplicated.
fn class_values(sp: &Specialization, n: usize) -> Result<Vec<Vec<BigRational>>, CellError> {
    let mut out = Vec::with_capacity(n);
    for class in residue_classes(n, sp.ell(), sp.variant()) {
        let mut vals: Vec<BigRational> = Vec::new();
        for p in class {
            let v = sp.eval(&p)?;
            if !vals.contains(&v) {
                vals.push(v);
            }
        }
        out.push(vals);
    }
    Ok(out)
}

fn require_separated(sp: &Specialization, n: usize) -> Result<(), CellError> {
    if is_separated(sp, n) {
        Ok(())
    } else {
        Err(CellError::NotSeparated)
    }
}

fn idempotent_with(
    setting: &Setting<BigRational>,
    t: &StdTableau,
    classes: &[Vec<BigRational>],
) -> Result<Element<BigRational>, CellError> {
    let sp = setting.specialization().ok_or(CellError::NeedsSpecialization)?;
    let n = t.size();
    let mut poly: HashMap<Exps, BigRational> = HashMap::new();
    poly.insert(SmallVec::from_elem(0, n), BigRational::one());
    for k in 1..=n {
        let r = sp.eval(&t.residue(k, sp.variant())?)?;
        for c in classes[k - 1].iter().filter(|&c| *c != r) {
            let den = (&r - c).recip();
            let shift = -(c * &den);
            let mut next: HashMap<Exps, BigRational> = HashMap::new();
            for (e, x) in &poly {
                let mut up = e.clone();
                up[k - 1] += 1;
                *next.entry(up).or_insert_with(BigRational::zero) += x * &den;
                *next.entry(e.clone()).or_insert_with(BigRational::zero) += x * &shift;
            }
            poly = next;
        }
    }
    let mut terms: Vec<(Exps, BigRational)> = poly.into_iter().filter(|(_, x)| !x.is_zero()).collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(setting.alg().l_polynomial(&terms, n))
}

/// `F_t = ∏_k ∏_{c ∈ C(k), c ≠ res_t(k)} (L_k - c)/(res_t(k) - c)`.
pub fn seminormal_idempotent(
    setting: &Setting<BigRational>,
    t: &StdTableau,
) -> Result<Element<BigRational>, CellError> {
    let sp = setting.specialization().ok_or(CellError::NeedsSpecialization)?;
    require_separated(sp, t.size())?;
    idempotent_with(setting, t, &class_values(sp, t.size())?)
}

/// `f_st = F_s m_st F_t`.
pub fn seminormal_f(
    setting: &Setting<BigRational>,
    f_s: &Element<BigRational>,
    m_st: &Element<BigRational>,
    f_t: &Element<BigRational>,
) -> Element<BigRational> {
    let alg = setting.alg();
    alg.mul(&alg.mul(f_s, m_st).expect("same rank"), f_t).expect("same rank")
}

/// Murphy basis, idempotents `F_t` and seminormal basis `f_st` of one rank.
pub struct Seminormal {
    pub n: usize,
    pub murphy: MurphyBasis<BigRational>,
    /// `idempotents[shape][tableau]`.
    pub idempotents: Vec<Vec<Element<BigRational>>>,
    /// Aligned with `murphy.pairs`.
    pub f: Vec<Element<BigRational>>,
}

impl Seminormal {
    pub fn build(setting: &Setting<BigRational>, n: usize, cap: usize) -> Result<Self, CellError> {
        let sp = setting.specialization().ok_or(CellError::NeedsSpecialization)?;
        require_separated(sp, n)?;
        let murphy = MurphyBasis::build(setting.alg(), n, cap)?;
        let classes = class_values(sp, n)?;
        let idempotents = murphy
            .pairs
            .tableaux
            .par_iter()
            .map(|ts| ts.iter().map(|t| idempotent_with(setting, t, &classes)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let f = murphy
            .pairs
            .pairs
            .par_iter()
            .zip(murphy.elements.par_iter())
            .map(|(&(li, si, ti), m)| seminormal_f(setting, &idempotents[li][si], m, &idempotents[li][ti]))
            .collect();
        Ok(Seminormal { n, murphy, idempotents, f })
    }

    pub fn idempotent(&self, t: &StdTableau) -> Option<&Element<BigRational>> {
        let li = self.murphy.pairs.shapes.iter().position(|x| x == t.shape())?;
        let ti = self.murphy.pairs.tableaux[li].iter().position(|x| x == t)?;
        Some(&self.idempotents[li][ti])
    }

    pub fn get(&self, s: &StdTableau, t: &StdTableau) -> Option<&Element<BigRational>> {
        self.murphy.pairs.index_of(s, t).map(|i| &self.f[i])
    }
}

/// `f_st = Σ a[(u,v),(s,t)] m_uv` and `m_st = Σ b[(u,v),(s,t)] f_uv`, rows
/// and columns in pair order.
#[derive(Clone, Debug)]
pub struct TransitionMatrices {
    pub a: RatMatrix,
    pub b: RatMatrix,
}

pub fn transition_matrices(setting: &Setting<BigRational>, sn: &Seminormal) -> Result<TransitionMatrices, CellError> {
    let alg = setting.alg();
    let m = murphy_basis_matrix(alg, &sn.murphy);
    let index = super::basis_index(alg, sn.n);
    let cols: Vec<Vec<BigRational>> = sn.f.iter().map(|e| super::coordinates(e, &index)).collect();
    let fm = RatMatrix::from_columns(index.len(), &cols);
    let a = m.solve(&fm).ok_or(CellError::Singular)?;
    let b = a.inverse().ok_or(CellError::Singular)?;
    Ok(TransitionMatrices { a, b })
}
