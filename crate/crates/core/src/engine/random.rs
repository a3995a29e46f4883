use rand::Rng;

use super::{Algebra, Element, Key};
use crate::scalars::{Coeff, Variant};
use crate::symgrp::Perm;

/// Sparse random element: at most five basis keys with coefficients drawn
/// from `±1, ±q, ±Q_1` (`±1, ±u_1` in the degenerate algebra).
pub fn random_element<C: Coeff, R: Rng>(alg: &Algebra<C>, n: usize, rng: &mut R) -> Element<C> {
    let mut pool = vec![C::one(), alg.cyclo()[0].clone()];
    if alg.variant() == Variant::NonDegenerate {
        pool.push(alg.q().clone());
    }
    let perms = Perm::all(n);
    let count = rng.gen_range(1..=5);
    let mut out = Element::zero(n);
    for _ in 0..count {
        let c: Vec<u8> = (0..n).map(|_| rng.gen_range(0..alg.ell()) as u8).collect();
        let w = perms[rng.gen_range(0..perms.len())].clone();
        let mut coeff = pool[rng.gen_range(0..pool.len())].clone();
        if rng.gen_bool(0.5) {
            coeff = -coeff;
        }
        out.add_term(Key::new(&c, w, alg.ell()).expect("valid key"), coeff);
    }
    out
}

/// Uniformly random basis key.
pub fn random_key<C: Coeff, R: Rng>(alg: &Algebra<C>, n: usize, rng: &mut R) -> Key {
    let c: Vec<u8> = (0..n).map(|_| rng.gen_range(0..alg.ell()) as u8).collect();
    let perms = Perm::all(n);
    Key::new(&c, perms[rng.gen_range(0..perms.len())].clone(), alg.ell()).expect("valid key")
}
