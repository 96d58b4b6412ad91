#![allow(dead_code)]

use ccr::opalg::{Coeff, ComplexRational, Gen, Monomial, OpExpr, Polynomial, Word};
use proptest::prelude::*;

pub fn rational() -> impl Strategy<Value = ComplexRational> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d)| {
        &ComplexRational::from_ratio(a, b) + &(&ComplexRational::from_ratio(c, d) * &ComplexRational::i())
    })
}

pub fn coeff() -> impl Strategy<Value = Coeff> {
    (rational(), prop::option::of((prop::sample::select(vec!["m", "w", "F0"]), -2i32..=2)))
        .prop_map(|(v, p)| match p {
            Some((name, k)) => Coeff::term(v, Monomial::param(name, k)),
            None => Coeff::constant(v),
        })
}

pub fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { Gen::X } else { Gen::P }), 0..=max_len).prop_map(Word::new)
}

pub fn expr(max_len: usize, max_terms: usize) -> impl Strategy<Value = OpExpr> {
    prop::collection::vec((word(max_len), coeff()), 0..=max_terms).prop_map(|ts| {
        let mut e = OpExpr::zero();
        for (w, c) in ts {
            e.add_word(&w, &c);
        }
        e
    })
}

pub fn polynomial(max_degree: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((0..=max_degree, coeff()), 0..=5).prop_map(Polynomial::from_coeffs)
}
