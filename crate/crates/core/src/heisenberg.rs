//! Operator dynamics from a force law `F(X)` and a velocity law `V(P)`.
//!
//! The generator `G = ∫V dP − ∫F dX` (zero integration constants) drives
//! every operator through `dO/dt = i[G, O]`. For `V = P/m` this is the
//! Heisenberg equation with `G` the Hamiltonian. Iterating the derivative
//! gives the Taylor coefficients of `O(t)` around `t = 0`.

use std::fmt;

use thiserror::Error;

use crate::opalg::{AlgebraError, Coeff, ComplexRational, Gen, OpExpr, ParamValues, Polynomial, Word};

/// Truncation order used when the caller does not pick one.
pub const DEFAULT_ORDER: usize = 16;

/// Parameter names used by the built-in laws.
pub const MASS: &str = "m";
pub const OMEGA: &str = "w";
pub const FORCE: &str = "F0";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("coefficient of t^{order} is not affine in X0, P0: contains `{term}`")]
    NonAffineFlow { order: usize, term: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `F(X)` as a polynomial in `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct ForceLaw {
    pub force: Polynomial,
    pub label: String,
}

impl ForceLaw {
    pub fn new(force: Polynomial, label: impl Into<String>) -> Self {
        Self {
            force,
            label: label.into(),
        }
    }

    pub fn free() -> Self {
        Self::new(Polynomial::zero(), "free")
    }

    /// `F = -m w^2 X`.
    pub fn harmonic() -> Self {
        let k = &(&Coeff::param(MASS, 1) * &Coeff::param(OMEGA, 2)) * &Coeff::integer(-1);
        Self::new(Polynomial::monomial(1, k), "harmonic")
    }

    /// Constant force `F = F0`.
    pub fn linear() -> Self {
        Self::new(Polynomial::constant(Coeff::param(FORCE, 1)), "linear")
    }
}

/// `V(P) = dX/dt` as a polynomial in `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityLaw {
    pub velocity: Polynomial,
}

impl VelocityLaw {
    pub fn new(velocity: Polynomial) -> Self {
        Self { velocity }
    }

    /// `V = P/m`.
    pub fn newtonian() -> Self {
        Self::new(Polynomial::monomial(1, Coeff::param(MASS, -1)))
    }
}

/// The evolution generator `∫V dP − ∫F dX`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator(OpExpr);

impl Generator {
    pub fn expr(&self) -> &OpExpr {
        &self.0
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn generator(force: &ForceLaw, velocity: &VelocityLaw) -> Generator {
    let kinetic = velocity.velocity.antiderivative().to_operator(Gen::P);
    let work = force.force.antiderivative().to_operator(Gen::X);
    Generator((&kinetic - &work).normal_order())
}

/// `dO/dt = i[G, O]`, normal-ordered.
pub fn time_derivative(o: &OpExpr, g: &Generator) -> OpExpr {
    g.0.commutator(o).scale(&Coeff::i())
}

/// Truncated series `Σ_k c_k t^k / k!` with operator coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTimeSeries {
    coeffs: Vec<OpExpr>,
}

impl OperatorTimeSeries {
    /// `coeffs` must be non-empty; they are normal-ordered on the way in.
    pub fn new(coeffs: Vec<OpExpr>) -> Self {
        assert!(!coeffs.is_empty(), "a time series needs at least c_0");
        Self {
            coeffs: coeffs.iter().map(OpExpr::normal_order).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[OpExpr] {
        &self.coeffs
    }

    /// `c_k`, the k-th time derivative at `t = 0`.
    pub fn coeff(&self, k: usize) -> &OpExpr {
        &self.coeffs[k]
    }

    /// Coefficients (in `t^k/k!`) of `[A(t), B(t)]` up to the lower of the
    /// two orders: `Σ_j C(k,j) [a_j, b_(k-j)]`.
    pub fn commutator_series(&self, other: &OperatorTimeSeries) -> Vec<OpExpr> {
        let order = self.order().min(other.order());
        (0..=order)
            .map(|k| {
                let mut acc = OpExpr::zero();
                for j in 0..=k {
                    let c = self.coeffs[j].commutator(&other.coeffs[k - j]);
                    acc = &acc + &c.scale(&Coeff::integer(binomial(k, j)));
                }
                acc
            })
            .collect()
    }

    /// Term-by-term `d/dt` (drops the last coefficient).
    pub fn derivative(&self) -> OperatorTimeSeries {
        if self.coeffs.len() == 1 {
            return Self::new(vec![OpExpr::zero()]);
        }
        Self::new(self.coeffs[1..].to_vec())
    }

    pub fn scale(&self, k: &Coeff) -> OperatorTimeSeries {
        Self::new(self.coeffs.iter().map(|c| c.scale(k)).collect())
    }
}

impl fmt::Display for OperatorTimeSeries {
    /// One `k: <expr>` line per coefficient.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            writeln!(f, "{k}: {c}")?;
        }
        Ok(())
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    let mut r: i64 = 1;
    for j in 0..k {
        r = r * (n - j) as i64 / (j as i64 + 1);
    }
    r
}

/// Taylor flow of `o0` under `g`: `c_0 = o0`, `c_(k+1) = i[G, c_k]`.
pub fn taylor_flow(o0: &OpExpr, g: &Generator, order: usize) -> OperatorTimeSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(o0.normal_order());
    for k in 0..order {
        let next = time_derivative(&coeffs[k], g);
        coeffs.push(next);
    }
    OperatorTimeSeries { coeffs }
}

/// `X(t) = α(t) X0 + β(t) P0 + γ(t)`, each a truncated series in `t^k/k!`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFlow {
    pub alpha: Vec<Coeff>,
    pub beta: Vec<Coeff>,
    pub gamma: Vec<Coeff>,
}

/// Numerical values of an affine flow at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineValues {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AffineFlow {
    pub fn order(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn eval(&self, t: f64, params: &ParamValues) -> Result<AffineValues, AlgebraError> {
        Ok(AffineValues {
            alpha: sum_series(&self.alpha, t, params)?,
            beta: sum_series(&self.beta, t, params)?,
            gamma: sum_series(&self.gamma, t, params)?,
        })
    }

    pub fn to_series(&self) -> OperatorTimeSeries {
        let coeffs = (0..self.alpha.len())
            .map(|k| {
                let mut e = OpExpr::zero();
                e.add_word(&Word::single(Gen::X), &self.alpha[k]);
                e.add_word(&Word::single(Gen::P), &self.beta[k]);
                e.add_word(&Word::identity(), &self.gamma[k]);
                e
            })
            .collect();
        OperatorTimeSeries { coeffs }
    }
}

fn sum_series(cs: &[Coeff], t: f64, params: &ParamValues) -> Result<f64, AlgebraError> {
    let mut acc = 0.0;
    let mut tk = 1.0;
    for (k, c) in cs.iter().enumerate() {
        if k > 0 {
            tk *= t / k as f64;
        }
        let v = c.eval(params)?;
        if v.im != 0.0 {
            return Err(AlgebraError::NotReal(format!("t^{k} coefficient {v}")));
        }
        acc += v.re * tk;
    }
    Ok(acc)
}

/// Splits each coefficient into its `X`, `P` and identity parts.
pub fn extract_affine(series: &OperatorTimeSeries) -> Result<AffineFlow, FlowError> {
    let x = Word::single(Gen::X);
    let p = Word::single(Gen::P);
    let mut flow = AffineFlow {
        alpha: Vec::new(),
        beta: Vec::new(),
        gamma: Vec::new(),
    };
    for (k, c) in series.coeffs.iter().enumerate() {
        if let Some((w, _)) = c.terms().find(|(w, _)| w.len() >= 2) {
            return Err(FlowError::NonAffineFlow {
                order: k,
                term: w.to_string(),
            });
        }
        flow.alpha.push(c.coeff(&x));
        flow.beta.push(c.coeff(&p));
        flow.gamma.push(c.coeff(&Word::identity()));
    }
    Ok(flow)
}

/// `d/dt X^n` with the velocity `P/m` inserted at each position:
/// `(1/m) Σ_j X^j P X^(n-1-j)`.
pub fn power_rate_direct(n: u32) -> OpExpr {
    let mut acc = OpExpr::zero();
    for j in 0..n {
        let term = OpExpr::x()
            .pow(j)
            .multiply(&OpExpr::p())
            .multiply(&OpExpr::x().pow(n - 1 - j));
        acc = &acc + &term;
    }
    acc.scale(&inv_mass())
}

/// `d/dt X^n` with every `P` commuted to the left:
/// `(1/m)(-i P [X^n, P] + Σ_(j=1)^(n-1) [X^j, P X^(n-1-j)])`.
pub fn power_rate_left(n: u32) -> OpExpr {
    let lead = OpExpr::p().multiply(&power_bracket(n)).scale(&minus_i());
    (&lead + &reorder_sum(n)).scale(&inv_mass())
}

/// `d/dt X^n` with every `P` commuted to the right:
/// `(1/m)(-i [X^n, P] P − Σ_(j=1)^(n-1) [X^j, P X^(n-1-j)])`.
pub fn power_rate_right(n: u32) -> OpExpr {
    let lead = power_bracket(n).multiply(&OpExpr::p()).scale(&minus_i());
    (&lead - &reorder_sum(n)).scale(&inv_mass())
}

/// Average of the left and right forms: `(-i/2m)(P [X^n,P] + [X^n,P] P)`.
pub fn power_rate_symmetrized(n: u32) -> OpExpr {
    let b = power_bracket(n);
    let sum = &OpExpr::p().multiply(&b) + &b.multiply(&OpExpr::p());
    let k = &minus_i() * &(&inv_mass() * &Coeff::ratio(1, 2));
    sum.scale(&k)
}

fn power_bracket(n: u32) -> OpExpr {
    OpExpr::x().pow(n).commutator(&OpExpr::p())
}

fn reorder_sum(n: u32) -> OpExpr {
    let mut acc = OpExpr::zero();
    for j in 1..n {
        let inner = OpExpr::p().multiply(&OpExpr::x().pow(n - 1 - j));
        acc = &acc + &OpExpr::x().pow(j).commutator(&inner);
    }
    acc
}

fn inv_mass() -> Coeff {
    Coeff::param(MASS, -1)
}

fn minus_i() -> Coeff {
    Coeff::constant(-&ComplexRational::i())
}
