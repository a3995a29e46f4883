//! Murphy and seminormal bases, transition matrices, and verifiers for the
//! trace and restriction formulas they satisfy.

mod seminormal;
mod verify;


use std::collections::HashMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use rayon::prelude::*;
use smallvec::SmallVec;
use thiserror::Error;

use crate::engine::{Algebra, Element, EngineError, Exps, Key};
use crate::linalg::{rank_mod_p, rational_mod_p, RatMatrix};
use crate::scalars::{Coeff, ParamSet, Poly, ScalarError, Specialization, Variant};
use crate::symgrp::young_subgroup;
use crate::tabcomb::{MultiPartition, StdTableau, TabError, TableauPairs};

pub use seminormal::{seminormal_f, seminormal_idempotent, transition_matrices, Seminormal, TransitionMatrices};
pub use verify::*;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CellError {
    #[error("basis of dimension {dim} exceeds the size cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error("parameters are not separated at this size")]
    NotSeparated,
    #[error("Murphy basis matrix is singular")]
    Singular,
    #[error("this check needs specialized parameters")]
    NeedsSpecialization,
    #[error("check `{check}` does not apply to the {variant} algebra")]
    WrongVariant { check: String, variant: Variant },
    #[error(transparent)]
    Tab(#[from] TabError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// An algebra together with the names and values of its parameters.
pub struct Setting<C: Coeff> {
    alg: Algebra<C>,
    names: Vec<String>,
    sp: Option<Specialization>,
}

impl Setting<Poly> {
    pub fn symbolic(variant: Variant, ell: usize) -> Self {
        let params = ParamSet::standard(variant, ell);
        Setting { alg: Algebra::symbolic(&params), names: params.symbol_names(), sp: None }
    }
}

impl Setting<BigRational> {
    pub fn specialized(sp: Specialization) -> Self {
        let params = ParamSet::standard(sp.variant(), sp.ell());
        Setting { alg: Algebra::specialized(&sp), names: params.symbol_names(), sp: Some(sp) }
    }
}

impl<C: Coeff> Setting<C> {
    pub fn alg(&self) -> &Algebra<C> {
        &self.alg
    }

    pub fn variant(&self) -> Variant {
        self.alg.variant()
    }

    pub fn ell(&self) -> usize {
        self.alg.ell()
    }

    /// Symbol names used to print and parse coefficients.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn specialization(&self) -> Option<&Specialization> {
        self.sp.as_ref()
    }

    /// `"symbolic"` or the specialization in display form.
    pub fn describe(&self) -> String {
        self.sp.as_ref().map_or_else(|| "symbolic".to_string(), |sp| sp.to_string())
    }

    pub fn lift(&self, p: &Poly) -> Result<C, CellError> {
        Ok(C::from_poly(p, self.sp.as_ref())?)
    }

    pub fn show(&self, c: &C) -> String {
        c.format_with(&self.names)
    }

    pub fn show_element(&self, e: &Element<C>) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (k, c)) in e.terms().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let _ = write!(out, "({})*{}", self.show(c), k);
        }
        out
    }
}

/// `x_λ = Σ_{w ∈ S_λ} T_w`.
pub fn x_lambda<C: Coeff>(shape: &MultiPartition) -> Element<C> {
    let n = shape.size();
    let group = young_subgroup(&shape.composition(), n).expect("composition of n");
    Element::from_terms(n, group.into_iter().map(|w| (Key { c: SmallVec::from_elem(0, n), w }, C::one())))
}

/// `u_λ^+ = ∏_{s=2}^{ℓ} ∏_{k=1}^{𝔞_s} (L_k - Q_s)`, with `u_s` in place of
/// `Q_s` in the degenerate algebra.
pub fn u_plus<C: Coeff>(alg: &Algebra<C>, shape: &MultiPartition) -> Element<C> {
    let n = shape.size();
    let mut poly: HashMap<Exps, C> = HashMap::new();
    poly.insert(SmallVec::from_elem(0, n), C::one());
    for (s, &a) in shape.offsets().iter().enumerate().skip(1) {
        let param = &alg.cyclo()[s];
        for k in 0..a {
            let mut next: HashMap<Exps, C> = HashMap::new();
            for (e, c) in &poly {
                let mut up = e.clone();
                up[k] += 1;
                *next.entry(up).or_insert_with(C::zero) += c;
                *next.entry(e.clone()).or_insert_with(C::zero) -= &c.mul_ref(param);
            }
            poly = next;
        }
    }
    let mut terms: Vec<(Exps, C)> = poly.into_iter().collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    alg.l_polynomial(&terms, n)
}

/// `m_λ = x_λ u_λ^+`.
pub fn m_lambda<C: Coeff>(alg: &Algebra<C>, shape: &MultiPartition) -> Element<C> {
    alg.mul(&x_lambda(shape), &u_plus(alg, shape)).expect("same rank")
}

/// `T_{d(s)}^* m_λ T_{d(t)}` given `m_λ`.
fn twist<C: Coeff>(alg: &Algebra<C>, m: &Element<C>, s: &StdTableau, t: &StdTableau) -> Element<C> {
    let left = alg.mul(&alg.t_w(&s.d_of().inverse()), m).expect("same rank");
    alg.mul(&left, &alg.t_w(&t.d_of())).expect("same rank")
}

/// The Murphy basis element `m_st`.
pub fn murphy_element<C: Coeff>(alg: &Algebra<C>, s: &StdTableau, t: &StdTableau) -> Result<Element<C>, CellError> {
    if s.shape() != t.shape() {
        return Err(TabError::InvalidShape(format!("{} vs {}", s.shape(), t.shape())).into());
    }
    Ok(twist(alg, &m_lambda(alg, s.shape()), s, t))
}

/// `ℓ^n n!`.
pub fn algebra_dimension(n: usize, ell: usize) -> usize {
    ell.pow(n as u32) * (1..=n).product::<usize>()
}

/// Every `m_st` of rank `n`, indexed like [`TableauPairs`].
pub struct MurphyBasis<C> {
    pub n: usize,
    pub pairs: TableauPairs,
    pub elements: Vec<Element<C>>,
}

impl<C: Coeff> MurphyBasis<C> {
    pub fn build(alg: &Algebra<C>, n: usize, cap: usize) -> Result<Self, CellError> {
        let dim = algebra_dimension(n, alg.ell());
        if dim > cap {
            return Err(CellError::CapExceeded { dim, cap });
        }
        let pairs = TableauPairs::new(n, alg.ell());
        let ms: Vec<Element<C>> = pairs.shapes.par_iter().map(|shape| m_lambda(alg, shape)).collect();
        let elements = pairs
            .pairs
            .par_iter()
            .map(|&(li, si, ti)| twist(alg, &ms[li], &pairs.tableaux[li][si], &pairs.tableaux[li][ti]))
            .collect();
        Ok(MurphyBasis { n, pairs, elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, s: &StdTableau, t: &StdTableau) -> Option<&Element<C>> {
        self.pairs.index_of(s, t).map(|i| &self.elements[i])
    }

    /// Rank over `𝔽_p` of the basis specialized at `sp`. Full rank at one
    /// point forces full rank over the fraction field.
    pub fn rank_mod_p(&self, alg: &Algebra<C>, sp: &Specialization, p: u64) -> Result<usize, CellError> {
        let index = basis_index(alg, self.n);
        let mut rows = Vec::with_capacity(self.len());
        for e in &self.elements {
            let mut row = vec![0u64; index.len()];
            for (k, c) in e.terms() {
                let v = c.eval(sp)?;
                row[index[k]] = rational_mod_p(&v, p).ok_or(ScalarError::DivisionByZero)?;
            }
            rows.push(row);
        }
        Ok(rank_mod_p(rows, p))
    }
}

/// Position of each basis key in [`Algebra::basis`] order.
pub fn basis_index<C: Coeff>(alg: &Algebra<C>, n: usize) -> HashMap<Key, usize> {
    alg.basis(n).into_iter().enumerate().map(|(i, k)| (k, i)).collect()
}

/// Coordinates of `e` in [`Algebra::basis`] order.
pub fn coordinates<C: Coeff>(e: &Element<C>, index: &HashMap<Key, usize>) -> Vec<C> {
    let mut out = vec![C::zero(); index.len()];
    for (k, c) in e.terms() {
        out[index[k]] = c.clone();
    }
    out
}

/// Columns are the Murphy basis elements in normal-form coordinates.
pub fn murphy_basis_matrix(alg: &Algebra<BigRational>, basis: &MurphyBasis<BigRational>) -> RatMatrix {
    let index = basis_index(alg, basis.n);
    let cols: Vec<Vec<BigRational>> = basis.elements.iter().map(|e| coordinates(e, &index)).collect();
    RatMatrix::from_columns(index.len(), &cols)
}

/// Expansion of `e` in the Murphy basis, given the inverse basis matrix.
pub fn murphy_coordinates(
    alg: &Algebra<BigRational>,
    inverse: &RatMatrix,
    e: &Element<BigRational>,
) -> Vec<BigRational> {
    let index = basis_index(alg, e.n());
    let v = coordinates(e, &index);
    let col = RatMatrix::from_columns(v.len(), &[v]);
    inverse.mul(&col).column(0)
}
