use ccr::opalg::{Coeff, ComplexRational, Gen, Monomial, OpExpr, Word};
use ccr_cli::parse::parse_expression;
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Coeff> {
    (
        -40i64..=40,
        1i64..=9,
        -40i64..=40,
        1i64..=9,
        prop::option::of((prop::sample::select(vec!["m", "w", "F0", "k_2"]), -3i32..=3)),
    )
        .prop_map(|(a, b, c, d, p)| {
            let v = &ComplexRational::from_ratio(a, b) + &(&ComplexRational::from_ratio(c, d) * &ComplexRational::i());
            match p {
                Some((name, k)) => Coeff::term(v, Monomial::param(name, k)),
                None => Coeff::constant(v),
            }
        })
}

fn expr() -> impl Strategy<Value = OpExpr> {
    let word = prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { Gen::X } else { Gen::P }), 0..=6).prop_map(Word::new);
    prop::collection::vec((word, coeff()), 0..=6).prop_map(|ts| {
        let mut e = OpExpr::zero();
        for (w, c) in ts {
            e.add_word(&w, &c);
        }
        e
    })
}

proptest! {
    #[test]
    fn serialized_text_parses_back(e in expr()) {
        let text = e.to_string();
        let back = parse_expression(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e);
    }

    #[test]
    fn normal_form_text_parses_back(e in expr()) {
        let n = e.normal_order();
        prop_assert_eq!(parse_expression(&n.to_string()).unwrap(), n);
    }

    #[test]
    fn parser_never_panics(s in "[XPmw0-9+*/^(), -]{0,24}") {
        let _ = parse_expression(&s);
    }
}
