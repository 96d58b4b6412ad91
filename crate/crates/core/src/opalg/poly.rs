use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::expr::OpExpr;
use super::scalar::{Coeff, ComplexRational, ParamValues};
use super::word::{Gen, Word};
use super::AlgebraError;

/// Polynomial in one commuting variable with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: BTreeMap<u32, Coeff>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Coeff) -> Self {
        Self::monomial(0, c)
    }

    /// `c · x^degree`.
    pub fn monomial(degree: u32, c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_term(degree, &c);
        p
    }

    pub fn from_coeffs<I: IntoIterator<Item = (u32, Coeff)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (d, c) in iter {
            p.add_term(d, &c);
        }
        p
    }

    pub fn add_term(&mut self, degree: u32, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(degree).or_default();
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, degree: u32) -> Coeff {
        self.coeffs.get(&degree).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Coeff)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    pub fn scale(&self, k: &Coeff) -> Polynomial {
        Self::from_coeffs(self.coeffs.iter().map(|(d, c)| (*d, c * k)))
    }

    pub fn derivative(&self) -> Polynomial {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .filter(|(d, _)| **d > 0)
                .map(|(d, c)| (d - 1, c.scale(&ComplexRational::from_integer(i64::from(*d))))),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Polynomial {
        Self::from_coeffs(self.coeffs.iter().map(|(d, c)| {
            let k = i64::from(*d) + 1;
            (d + 1, c.scale(&ComplexRational::from_ratio(1, k)))
        }))
    }

    /// `x · self`.
    pub fn shift_up(&self) -> Polynomial {
        Self::from_coeffs(self.coeffs.iter().map(|(d, c)| (d + 1, c.clone())))
    }

    /// Numerical value at `x` (Horner, highest degree first).
    pub fn eval(&self, x: f64, params: &ParamValues) -> Result<Complex64, AlgebraError> {
        let Some(top) = self.degree() else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for d in (0..=top).rev() {
            acc *= x;
            if let Some(c) = self.coeffs.get(&d) {
                acc += c.eval(params)?;
            }
        }
        Ok(acc)
    }

    /// Real numerical coefficients, lowest degree first.
    pub fn real_coeffs(&self, params: &ParamValues) -> Result<Vec<f64>, AlgebraError> {
        let n = self.degree().map_or(0, |d| d as usize + 1);
        let mut out = vec![0.0; n];
        for (d, c) in &self.coeffs {
            let v = c.eval(params)?;
            if v.im != 0.0 {
                return Err(AlgebraError::NotReal(self.to_string()));
            }
            out[*d as usize] = v.re;
        }
        Ok(out)
    }

    /// The same polynomial with the variable replaced by generator `g`.
    pub fn to_operator(&self, g: Gen) -> OpExpr {
        let mut e = OpExpr::zero();
        for (d, c) in &self.coeffs {
            e.add_word(&Word::new(vec![g; *d as usize]), c);
        }
        e
    }

    /// Inverse of [`Polynomial::to_operator`]; fails if `e` contains a word
    /// with any generator other than `g`.
    pub fn from_operator(e: &OpExpr, g: Gen) -> Result<Polynomial, AlgebraError> {
        let mut p = Polynomial::zero();
        for (w, c) in e.terms() {
            if w.gens().iter().any(|&h| h != g) {
                return Err(AlgebraError::NotSingleVariable {
                    expr: e.to_string(),
                    var: g.symbol(),
                });
            }
            p.add_term(w.len() as u32, c);
        }
        Ok(p)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (d, c) in &rhs.coeffs {
            out.add_term(*d, c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&Coeff::integer(-1))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &rhs.coeffs {
                out.add_term(da + db, &(ca * cb));
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    /// Uses the operator text form with `X` as the variable, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_operator(Gen::X))
    }
}

/// Realizes `X` as multiplication by `x` and `P` as `-i d/dx`, acting on `q`.
///
/// Exact on polynomials, and an algebra homomorphism, so it serves as an
/// independent check of normal ordering.
pub fn apply_to_polynomial(e: &OpExpr, q: &Polynomial) -> Polynomial {
    let minus_i = Coeff::constant(-&ComplexRational::i());
    let mut out = Polynomial::zero();
    for (w, c) in e.terms() {
        let mut v = q.clone();
        for g in w.gens().iter().rev() {
            v = match g {
                Gen::X => v.shift_up(),
                Gen::P => v.derivative().scale(&minus_i),
            };
        }
        out = &out + &v.scale(c);
    }
    out
}
