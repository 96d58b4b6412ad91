use std::cmp::Ordering;
use std::fmt;

/// A generator of the Weyl algebra. `X < P` in the canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    X,
    P,
}

impl Gen {
    pub fn symbol(self) -> char {
        match self {
            Gen::X => 'X',
            Gen::P => 'P',
        }
    }
}

/// A finite product of generators; the empty word is the identity.
///
/// Words are ordered by length (longest first), then lexicographically with
/// `X < P`. Expression term maps iterate in this order, which fixes the
/// canonical text form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Gen>);

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(gens: Vec<Gen>) -> Self {
        Self(gens)
    }

    pub fn single(g: Gen) -> Self {
        Self(vec![g])
    }

    /// `X^a P^b`.
    pub fn normal(x_pow: usize, p_pow: usize) -> Self {
        let mut v = vec![Gen::X; x_pow];
        v.extend(std::iter::repeat_n(Gen::P, p_pow));
        Self(v)
    }

    pub fn gens(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// No `P` precedes an `X`.
    pub fn is_normal_ordered(&self) -> bool {
        !self.0.windows(2).any(|w| w[0] == Gen::P && w[1] == Gen::X)
    }

    pub fn count(&self, g: Gen) -> usize {
        self.0.iter().filter(|&&h| h == g).count()
    }

    /// Maximal runs of equal generators, left to right.
    pub fn runs(&self) -> Vec<(Gen, usize)> {
        let mut out: Vec<(Gen, usize)> = Vec::new();
        for &g in &self.0 {
            match out.last_mut() {
                Some((h, n)) if *h == g => *n += 1,
                _ => out.push((g, 1)),
            }
        }
        out
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.len().cmp(&self.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (g, n)) in self.runs().into_iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if n == 1 {
                write!(f, "{}", g.symbol())?;
            } else {
                write!(f, "{}^{}", g.symbol(), n)?;
            }
        }
        Ok(())
    }
}
