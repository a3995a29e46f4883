use serde::{Deserialize, Serialize};

use super::{Element, EngineError, Key};
use crate::scalars::{Coeff, Variant};
use crate::symgrp::Perm;

#[derive(Serialize, Deserialize)]
struct TermJson {
    c: Vec<u8>,
    w: Perm,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    variant: Variant,
    n: usize,
    ell: usize,
    terms: Vec<TermJson>,
}

impl<C: Coeff> Element<C> {
    /// `{variant, n, ell, terms: [{c, w, coeff}]}` with `w` in 1-based
    /// one-line notation and `coeff` in the scalar string syntax.
    pub fn to_json(&self, variant: Variant, ell: usize, names: &[String]) -> serde_json::Value {
        let terms = self
            .terms()
            .map(|(k, c)| TermJson { c: k.c.to_vec(), w: k.w.clone(), coeff: c.format_with(names) })
            .collect();
        serde_json::to_value(ElementJson { variant, n: self.n(), ell, terms }).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value, names: &[String]) -> Result<(Variant, Self), EngineError> {
        let parsed: ElementJson = serde_json::from_value(v.clone()).map_err(|e| EngineError::Json(e.to_string()))?;
        let mut out = Element::zero(parsed.n);
        for t in parsed.terms {
            if t.w.n() != parsed.n {
                return Err(EngineError::Json(format!("term of rank {} in element of rank {}", t.w.n(), parsed.n)));
            }
            let key = Key::new(&t.c, t.w, parsed.ell)?;
            let coeff = C::parse_with(&t.coeff, names).map_err(|e| EngineError::Json(e.to_string()))?;
            out.add_term(key, coeff);
        }
        Ok((parsed.variant, out))
    }
}
