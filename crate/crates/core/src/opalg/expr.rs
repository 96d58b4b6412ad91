use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::scalar::{Coeff, ComplexRational};
use super::word::{Gen, Word};

/// A formal sum of coefficient-weighted words in the noncommuting
/// generators `X` and `P`.
///
/// Construction and [`OpExpr::multiply`] work in the free algebra; the
/// relation `[X,P] = i` is applied only by [`OpExpr::normal_order`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpExpr {
    terms: BTreeMap<Word, Coeff>,
}

impl OpExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity(), Coeff::one())
    }

    pub fn x() -> Self {
        Self::from_word(Word::single(Gen::X), Coeff::one())
    }

    pub fn p() -> Self {
        Self::from_word(Word::single(Gen::P), Coeff::one())
    }

    pub fn generator(g: Gen) -> Self {
        Self::from_word(Word::single(g), Coeff::one())
    }

    pub fn scalar(c: Coeff) -> Self {
        Self::from_word(Word::identity(), c)
    }

    pub fn from_word(w: Word, c: Coeff) -> Self {
        let mut e = Self::zero();
        e.add_word(&w, &c);
        e
    }

    /// `X^a P^b` with unit coefficient.
    pub fn normal_word(x_pow: usize, p_pow: usize) -> Self {
        Self::from_word(Word::normal(x_pow, p_pow), Coeff::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Coeff {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Length of the longest word, 0 for scalars and zero.
    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn add_word(&mut self, w: &Word, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(w) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(w);
                }
            }
            None => {
                self.terms.insert(w.clone(), c.clone());
            }
        }
    }

    pub fn scale(&self, k: &Coeff) -> OpExpr {
        let mut out = OpExpr::zero();
        for (w, c) in &self.terms {
            out.add_word(w, &(c * k));
        }
        out
    }

    /// Free-algebra product: words are concatenated, nothing is reordered.
    pub fn multiply(&self, other: &OpExpr) -> OpExpr {
        let mut out = OpExpr::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                out.add_word(&wa.concat(wb), &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> OpExpr {
        let mut out = OpExpr::one();
        for _ in 0..n {
            out = out.multiply(self);
        }
        out
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.terms.keys().all(Word::is_normal_ordered)
    }

    /// Rewrites every word into `X^a P^b` form using `PX = XP - i`.
    ///
    /// The result is the unique canonical representative of the same Weyl
    /// algebra element, so this is idempotent.
    pub fn normal_order(&self) -> OpExpr {
        let mut acc: BTreeMap<(usize, usize), Coeff> = BTreeMap::new();
        for (w, c) in &self.terms {
            for ((a, b), k) in normal_order_word(w) {
                let entry = acc.entry((a, b)).or_default();
                *entry += &c.scale(&k);
            }
        }
        let mut out = OpExpr::zero();
        for ((a, b), c) in acc {
            out.add_word(&Word::normal(a, b), &c);
        }
        out
    }

    /// `[a, b] = ab - ba`, normal-ordered.
    pub fn commutator(&self, other: &OpExpr) -> OpExpr {
        (&self.multiply(other) - &other.multiply(self)).normal_order()
    }

    /// Equality as elements of the Weyl algebra.
    pub fn equals(&self, other: &OpExpr) -> bool {
        self.normal_order() == other.normal_order()
    }
}

/// Normal form of a single word as a map `(a, b) -> coefficient of X^a P^b`.
fn normal_order_word(w: &Word) -> BTreeMap<(usize, usize), ComplexRational> {
    let mut acc: BTreeMap<(usize, usize), ComplexRational> = BTreeMap::new();
    acc.insert((0, 0), ComplexRational::one());
    for (g, n) in w.runs() {
        let mut next = BTreeMap::new();
        for ((a, b), c) in acc {
            match g {
                Gen::P => add_to(&mut next, (a, b + n), &c),
                Gen::X => {
                    // P^b X^n = sum_k C(b,k) n!/(n-k)! (-i)^k X^(n-k) P^(b-k)
                    for k in 0..=b.min(n) {
                        let weight = &reorder_weight(b, n, k) * &c;
                        add_to(&mut next, (a + n - k, b - k), &weight);
                    }
                }
            }
        }
        acc = next;
    }
    acc
}

fn add_to(
    map: &mut BTreeMap<(usize, usize), ComplexRational>,
    key: (usize, usize),
    v: &ComplexRational,
) {
    let e = map.entry(key).or_insert_with(ComplexRational::zero);
    *e = &*e + v;
    if e.is_zero() {
        map.remove(&key);
    }
}

/// `C(b,k) · n!/(n-k)! · (-i)^k`.
fn reorder_weight(b: usize, n: usize, k: usize) -> ComplexRational {
    let mut mag = BigInt::one();
    for j in 0..k {
        mag = mag * BigInt::from(b - j) * BigInt::from(n - j);
    }
    let mut fact = BigInt::one();
    for j in 2..=k {
        fact *= BigInt::from(j);
    }
    let mag = BigRational::new(mag, fact);
    let zero = BigRational::from_integer(0.into());
    match k % 4 {
        0 => ComplexRational::new(mag, zero),
        1 => ComplexRational::new(zero, -mag),
        2 => ComplexRational::new(-mag, zero),
        _ => ComplexRational::new(zero, mag),
    }
}

impl Add for &OpExpr {
    type Output = OpExpr;
    fn add(self, rhs: &OpExpr) -> OpExpr {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_word(w, c);
        }
        out
    }
}

impl Sub for &OpExpr {
    type Output = OpExpr;
    fn sub(self, rhs: &OpExpr) -> OpExpr {
        self + &(-rhs)
    }
}

impl Neg for &OpExpr {
    type Output = OpExpr;
    fn neg(self) -> OpExpr {
        OpExpr {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Mul for &OpExpr {
    type Output = OpExpr;
    fn mul(self, rhs: &OpExpr) -> OpExpr {
        self.multiply(rhs)
    }
}

impl fmt::Display for OpExpr {
    /// Canonical text, e.g. `(3/2)*X^2*P - (0,1)*1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            for term in c.terms() {
                let negative = term.value.is_negative_leading();
                let value = if negative { -&term.value } else { term.value };
                match (first, negative) {
                    (true, true) => write!(f, "-")?,
                    (true, false) => {}
                    (false, true) => write!(f, " - ")?,
                    (false, false) => write!(f, " + ")?,
                }
                first = false;
                if !value.is_one() {
                    write!(f, "{value}*")?;
                }
                if !term.params.is_unit() {
                    write!(f, "{}*", term.params)?;
                }
                write!(f, "{w}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> OpExpr {
        let gens = s
            .chars()
            .map(|ch| if ch == 'X' { Gen::X } else { Gen::P })
            .collect();
        OpExpr::from_word(Word::new(gens), Coeff::one())
    }

    fn i_times(e: &OpExpr) -> OpExpr {
        e.scale(&Coeff::i())
    }

    #[test]
    fn multiply_concatenates() {
        let xp = OpExpr::x().multiply(&OpExpr::p());
        assert_eq!(xp, word("XP"));
        assert_eq!(xp.to_string(), "X*P");

        let sum = &OpExpr::x() + &OpExpr::p();
        let prod = sum.multiply(&OpExpr::x());
        assert_eq!(prod, &word("XX") + &word("PX"));

        let two_x = OpExpr::x().scale(&Coeff::integer(2));
        let three_p = OpExpr::p().scale(&Coeff::integer(3));
        assert_eq!(two_x.multiply(&three_p), word("XP").scale(&Coeff::integer(6)));
    }

    #[test]
    fn normal_order_examples() {
        assert_eq!(word("PX").normal_order(), &word("XP") - &i_times(&OpExpr::one()));
        assert_eq!(word("XP").normal_order(), word("XP"));
        let expected = &word("XPP") - &i_times(&word("P")).scale(&Coeff::integer(2));
        assert_eq!(word("PPX").normal_order(), expected);
        assert_eq!(word("PPX").normal_order().to_string(), "X*P^2 - (0,2)*P");
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(OpExpr::x().commutator(&OpExpr::p()), OpExpr::scalar(Coeff::i()));
        let x3 = OpExpr::x().pow(3);
        assert_eq!(x3.commutator(&OpExpr::p()), word("XX").scale(&Coeff::constant(ComplexRational::gaussian(0, 3))));
        let p2 = OpExpr::p().pow(2);
        assert_eq!(p2.commutator(&OpExpr::x()), word("P").scale(&Coeff::constant(ComplexRational::gaussian(0, -2))));
    }

    #[test]
    fn equals_examples() {
        assert!(word("PX").equals(&(&word("XP") - &i_times(&OpExpr::one()))));
        assert!(!OpExpr::x().equals(&OpExpr::p()));
        let rhs = &word("XPP") - &i_times(&word("P")).scale(&Coeff::integer(2));
        assert!(word("PPX").equals(&rhs));
    }

    #[test]
    fn no_zero_terms_stored() {
        let e = &OpExpr::x() - &OpExpr::x();
        assert!(e.is_zero());
        assert_eq!(e.to_string(), "0");
    }

    #[test]
    fn canonical_text() {
        let e = &word("XXP").scale(&Coeff::ratio(3, 2)) - &OpExpr::scalar(Coeff::i());
        assert_eq!(e.to_string(), "(3/2)*X^2*P - (0,1)*1");
        let g = word("PP").scale(&(&Coeff::ratio(1, 2) * &Coeff::param("m", -1)));
        assert_eq!(g.to_string(), "(1/2)*m^-1*P^2");
        assert_eq!((-&OpExpr::x()).to_string(), "-X");
        assert_eq!(OpExpr::one().to_string(), "1");
    }
}
