//! Recursive-descent parser for operator expressions.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := primary ('^' uint)*
//! primary:= rational | '(' rational ',' rational ')' | name | 'X' | 'P' | '(' expr ')'
//! ```
//!
//! Products keep their written order. A parameter name may carry a negative
//! exponent (`m^-1`); `X` and `P` may not.

use std::str::FromStr;

use ccr::opalg::{Coeff, ComplexRational, Gen, OpExpr, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Name(String),
    Sym(u8),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
        } else if b.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(text[start..i].to_string()), start));
        } else if b.is_ascii_alphabetic() || b == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Name(text[start..i].to_string()), start));
        } else if b"+-*/^(),".contains(&b) {
            out.push((Tok::Sym(b), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: i,
                message: format!("unexpected character '{ch}'"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, sym: u8) -> bool {
        if *self.peek() == Tok::Sym(sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, sym: u8) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.error(format!("expected '{}', found {}", sym as char, self.describe()))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Int(s) | Tok::Name(s) => format!("'{s}'"),
            Tok::Sym(b) => format!("'{}'", *b as char),
            Tok::End => "end of input".to_string(),
        }
    }

    fn expr(&mut self) -> Result<OpExpr, ParseError> {
        let negate = self.eat(b'-');
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<OpExpr, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc.multiply(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<OpExpr, ParseError> {
        let (mut value, mut param) = self.primary()?;
        while self.eat(b'^') {
            let at = self.offset();
            let negative = self.eat(b'-');
            let k = self.uint()?;
            match param.take() {
                Some(name) => {
                    let k = i32::try_from(k).map_err(|_| ParseError {
                        offset: at,
                        message: "exponent too large".into(),
                    })?;
                    value = OpExpr::scalar(Coeff::param(&name, if negative { -k } else { k }));
                }
                None if negative => {
                    return Err(ParseError {
                        offset: at,
                        message: "negative exponents are only allowed on parameters".into(),
                    })
                }
                None => value = value.pow(k),
            }
        }
        Ok(value)
    }

    /// The value, plus the parameter name if the primary is a bare name.
    fn primary(&mut self) -> Result<(OpExpr, Option<String>), ParseError> {
        match self.peek().clone() {
            Tok::Int(_) => Ok((OpExpr::scalar(Coeff::constant(self.rational()?)), None)),
            Tok::Name(name) => {
                self.bump();
                Ok(match name.as_str() {
                    "X" => (OpExpr::generator(Gen::X), None),
                    "P" => (OpExpr::generator(Gen::P), None),
                    _ => (OpExpr::scalar(Coeff::param(&name, 1)), Some(name)),
                })
            }
            Tok::Sym(b'(') => {
                let start = self.pos;
                self.bump();
                if let Some(pair) = self.try_pair()? {
                    return Ok((OpExpr::scalar(Coeff::constant(pair)), None));
                }
                self.pos = start + 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok((inner, None))
            }
            _ => self.error(format!("expected a number, name, X, P or '(', found {}", self.describe())),
        }
    }

    /// `re ',' im ')'` after an opening parenthesis, or `None` if the input
    /// does not have that shape.
    fn try_pair(&mut self) -> Result<Option<ComplexRational>, ParseError> {
        let Some(re) = self.signed_rational()? else {
            return Ok(None);
        };
        if !self.eat(b',') {
            return Ok(None);
        }
        let Some(im) = self.signed_rational()? else {
            return self.error("expected the imaginary part");
        };
        self.expect(b')')?;
        Ok(Some(&re + &(&im * &ComplexRational::i())))
    }

    fn signed_rational(&mut self) -> Result<Option<ComplexRational>, ParseError> {
        let start = self.pos;
        let negative = self.eat(b'-');
        if !matches!(self.peek(), Tok::Int(_)) {
            self.pos = start;
            return Ok(None);
        }
        let q = self.rational()?;
        Ok(Some(if negative { -&q } else { q }))
    }

    fn rational(&mut self) -> Result<ComplexRational, ParseError> {
        let num = self.bigint()?;
        if !self.eat(b'/') {
            return Ok(ComplexRational::real(BigRational::from_integer(num)));
        }
        let at = self.offset();
        let den = self.bigint()?;
        if den.is_zero() {
            return Err(ParseError {
                offset: at,
                message: "zero denominator".into(),
            });
        }
        Ok(ComplexRational::real(BigRational::new(num, den)))
    }

    fn bigint(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                Ok(BigInt::from_str(&s).expect("lexer yields digits only"))
            }
            _ => self.error(format!("expected an integer, found {}", self.describe())),
        }
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                s.parse().map_err(|_| ParseError {
                    offset: at,
                    message: format!("exponent {s} too large"),
                })
            }
            _ => self.error("expected a non-negative integer exponent"),
        }
    }
}

pub fn parse_expression(text: &str) -> Result<OpExpr, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {}", p.describe()));
    }
    Ok(e)
}

/// A polynomial in `X`, e.g. a force law `-m*w^2*X`.
pub fn parse_polynomial(text: &str) -> Result<Polynomial, ParseError> {
    let e = parse_expression(text)?;
    Polynomial::from_operator(&e, Gen::X).map_err(|_| ParseError {
        offset: 0,
        message: "expected a polynomial in X alone".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccr::opalg::Word;

    fn word(s: &str) -> Word {
        Word::new(s.chars().map(|c| if c == 'X' { Gen::X } else { Gen::P }).collect())
    }

    #[test]
    fn keeps_written_order() {
        let e = parse_expression("P*X").unwrap();
        assert_eq!(e, OpExpr::from_word(word("PX"), Coeff::one()));
    }

    #[test]
    fn canonical_text_example() {
        let e = parse_expression("X^2*P - (0,1)*1").unwrap();
        let mut expected = OpExpr::from_word(word("XXP"), Coeff::one());
        expected.add_word(&Word::identity(), &Coeff::constant(-&ComplexRational::i()));
        assert_eq!(e, expected);
    }

    #[test]
    fn negative_power_rejected() {
        let err = parse_expression("X^-1").unwrap_err();
        assert_eq!(err.offset, 2);
        assert!(parse_expression("(X+P)^-2").is_err());
    }

    #[test]
    fn parameter_powers() {
        let e = parse_expression("m^-1*P").unwrap();
        assert_eq!(e, OpExpr::from_word(word("P"), Coeff::param("m", -1)));
        let e = parse_expression("-(3/2)*w^2*X").unwrap();
        let c = &Coeff::param("w", 2) * &Coeff::ratio(-3, 2);
        assert_eq!(e, OpExpr::from_word(word("X"), c));
    }

    #[test]
    fn grouping_and_powers() {
        let e = parse_expression("(X + P)^2").unwrap();
        let mut expected = OpExpr::zero();
        for w in ["XX", "XP", "PX", "PP"] {
            expected.add_word(&word(w), &Coeff::one());
        }
        assert_eq!(e, expected);
        assert_eq!(parse_expression("X^0").unwrap(), OpExpr::one());
    }

    #[test]
    fn error_offsets() {
        assert_eq!(parse_expression("X + ").unwrap_err().offset, 4);
        assert_eq!(parse_expression("X $ P").unwrap_err().offset, 2);
        assert_eq!(parse_expression("(X").unwrap_err().offset, 2);
        assert_eq!(parse_expression("1/0").unwrap_err().offset, 2);
        assert_eq!(parse_expression("X P").unwrap_err().offset, 2);
        assert_eq!(parse_expression("(1,)").unwrap_err().offset, 3);
    }

    #[test]
    fn polynomial_in_x_only() {
        let f = parse_polynomial("-X - (1/10)*X^3").unwrap();
        assert_eq!(f.degree(), Some(3));
        assert!(parse_polynomial("X*P").is_err());
    }
}
