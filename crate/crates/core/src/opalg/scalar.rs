//! Exact coefficients: complex rationals times monomials in named real parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// Exact complex rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComplexRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// `re + i·im` from integers.
    pub fn gaussian(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Self::new(&self.re / &norm, -&self.im / &norm))
    }

    /// True when the canonical text form would start with a minus sign.
    pub fn is_negative_leading(&self) -> bool {
        if self.re.is_zero() {
            self.im.is_negative()
        } else {
            self.re.is_negative()
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Canonical text of a rational: `3`, `-3`, `3/2`.
pub(crate) fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ComplexRational {
    /// Real values print as rationals (fractions parenthesized), everything
    /// else as the pair `(re,im)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            if self.re.is_integer() {
                write!(f, "{}", fmt_rational(&self.re))
            } else {
                write!(f, "({})", fmt_rational(&self.re))
            }
        } else {
            write!(f, "({},{})", fmt_rational(&self.re), fmt_rational(&self.im))
        }
    }
}

impl Add for &ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational::new(-&self.re, -&self.im)
    }
}

/// Product of named parameters raised to nonzero integer powers, e.g. `m^-1*w^2`.
///
/// Zero exponents are never stored, so the empty monomial is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<String, i32>);

impl Monomial {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn param(name: &str, power: i32) -> Self {
        let mut m = Self::default();
        if power != 0 {
            m.0.insert(name.to_string(), power);
        }
        m
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> impl Iterator<Item = (&str, i32)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn power_of(&self, name: &str) -> i32 {
        self.0.get(name).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (name, p) in &other.0 {
            let e = out.entry(name.clone()).or_insert(0);
            *e += p;
            if *e == 0 {
                out.remove(name);
            }
        }
        Monomial(out)
    }

    pub fn eval(&self, params: &ParamValues) -> Result<f64, AlgebraError> {
        let mut v = 1.0;
        for (name, p) in &self.0 {
            v *= params.get(name)?.powi(*p);
        }
        Ok(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, p) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *p == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{p}")?;
            }
        }
        Ok(())
    }
}

/// Numerical values for named parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamValues(BTreeMap<String, f64>);

impl ParamValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Result<f64, AlgebraError> {
        self.0
            .get(name)
            .copied()
            .ok_or_else(|| AlgebraError::MissingParameter(name.to_string()))
    }
}

/// One exact coefficient term: a complex rational times a parameter monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarCoeff {
    pub value: ComplexRational,
    pub params: Monomial,
}

impl ScalarCoeff {
    pub fn new(value: ComplexRational, params: Monomial) -> Self {
        Self { value, params }
    }
}

/// A finite sum of [`ScalarCoeff`] terms, i.e. a Laurent polynomial in the
/// parameters with complex-rational coefficients.
///
/// A single word in an operator expression can collect contributions with
/// different parameter monomials (for instance `F0/m` and `w^2` on the same
/// word), so the algebra's coefficient ring is this sum rather than a single
/// term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coeff(BTreeMap<Monomial, ComplexRational>);

impl Coeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(ComplexRational::one())
    }

    pub fn i() -> Self {
        Self::constant(ComplexRational::i())
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(ComplexRational::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::constant(ComplexRational::from_ratio(num, den))
    }

    pub fn constant(value: ComplexRational) -> Self {
        Self::term(value, Monomial::unit())
    }

    pub fn param(name: &str, power: i32) -> Self {
        Self::term(ComplexRational::one(), Monomial::param(name, power))
    }

    pub fn term(value: ComplexRational, params: Monomial) -> Self {
        let mut c = Self::default();
        if !value.is_zero() {
            c.0.insert(params, value);
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0.get(&Monomial::unit()).is_some_and(|v| v.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = ScalarCoeff> + '_ {
        self.0
            .iter()
            .map(|(m, v)| ScalarCoeff::new(v.clone(), m.clone()))
    }

    pub fn num_terms(&self) -> usize {
        self.0.len()
    }

    /// The parameter-free part, if this coefficient has no parameter dependence.
    pub fn as_constant(&self) -> Option<ComplexRational> {
        match self.0.len() {
            0 => Some(ComplexRational::zero()),
            1 => self.0.get(&Monomial::unit()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, value: &ComplexRational, params: &Monomial) {
        if value.is_zero() {
            return;
        }
        match self.0.get_mut(params) {
            Some(v) => {
                *v = &*v + value;
                if v.is_zero() {
                    self.0.remove(params);
                }
            }
            None => {
                self.0.insert(params.clone(), value.clone());
            }
        }
    }

    pub fn scale(&self, k: &ComplexRational) -> Coeff {
        let mut out = Coeff::zero();
        for (m, v) in &self.0 {
            out.add_term(&(v * k), m);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Coeff {
        let mut out = Coeff::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, params: &ParamValues) -> Result<Complex64, AlgebraError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, v) in &self.0 {
            acc += v.to_complex64() * m.eval(params)?;
        }
        Ok(acc)
    }
}

impl From<ComplexRational> for Coeff {
    fn from(value: ComplexRational) -> Self {
        Coeff::constant(value)
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, rhs: &Coeff) {
        for (m, v) in &rhs.0 {
            self.add_term(v, m);
        }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        self + &(-rhs)
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff(self.0.iter().map(|(m, v)| (m.clone(), -v)).collect())
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        let mut out = Coeff::zero();
        for (ma, va) in &self.0 {
            for (mb, vb) in &rhs.0 {
                out.add_term(&(va * vb), &ma.mul(mb));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_canonical() {
        let a = Coeff::param("m", -1);
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z, Coeff::zero());
        assert_eq!(Coeff::term(ComplexRational::zero(), Monomial::param("w", 2)), Coeff::zero());
    }

    #[test]
    fn monomial_powers_cancel() {
        let m = Monomial::param("m", 2).mul(&Monomial::param("m", -2));
        assert!(m.is_unit());
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&Coeff::i() * &Coeff::i(), Coeff::integer(-1));
    }

    #[test]
    fn recip_of_complex() {
        let z = ComplexRational::gaussian(3, 4);
        assert!((&z * &z.recip().unwrap()).is_one());
        assert!(ComplexRational::zero().recip().is_none());
    }

    #[test]
    fn eval_needs_every_parameter() {
        let c = &Coeff::param("m", -1) + &Coeff::param("w", 2);
        let p = ParamValues::new().with("m", 2.0);
        assert!(matches!(c.eval(&p), Err(AlgebraError::MissingParameter(n)) if n == "w"));
        let v = c.eval(&p.with("w", 3.0)).unwrap();
        assert_eq!(v, Complex64::new(9.5, 0.0));
    }

    #[test]
    fn display_forms() {
        assert_eq!(ComplexRational::from_ratio(3, 2).to_string(), "(3/2)");
        assert_eq!(ComplexRational::i().to_string(), "(0,1)");
        assert_eq!(ComplexRational::from_integer(-4).to_string(), "-4");
        assert_eq!(Monomial::param("m", -1).mul(&Monomial::param("w", 2)).to_string(), "m^-1*w^2");
    }
}
