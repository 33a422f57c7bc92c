use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{fmt_rational, Polynomial};
use super::ratfun::{ExpRational, RationalFunction};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero at x = {0}")]
    DivisionByZero(f64),
    #[error("non-finite value at x = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Exact constant with a cached double.
    Rational(BigRational, f64),
    Float(f64),
    X,
    Add(Expression, Expression),
    Sub(Expression, Expression),
    Mul(Expression, Expression),
    Div(Expression, Expression),
    Neg(Expression),
    Pow(Expression, i32),
    Exp(Expression),
}

/// Immutable, cheaply clonable expression in one variable `x`.
#[derive(Clone, PartialEq)]
pub struct Expression(Arc<Node>);

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expression({self})")
    }
}

impl Expression {
    fn wrap(n: Node) -> Self {
        Self(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn x() -> Self {
        Self::wrap(Node::X)
    }

    pub fn rational(r: BigRational) -> Self {
        let f = r.to_f64().unwrap_or(f64::NAN);
        Self::wrap(Node::Rational(r, f))
    }

    pub fn int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn float(v: f64) -> Self {
        Self::wrap(Node::Float(v))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        let mut acc = Self::zero();
        for (k, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = Self::rational(c.clone()).mul(&Self::x().powi(k as i32));
            acc = acc.add(&term);
        }
        acc
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Rational(r, _) => Some(r),
            _ => None,
        }
    }

    fn is_rational(&self, v: i64) -> bool {
        self.as_rational()
            .is_some_and(|r| *r == BigRational::from_integer(v.into()))
    }

    pub fn is_zero_literal(&self) -> bool {
        self.is_rational(0)
    }

    // Smart constructors: fold rational constants and drop neutral elements.

    pub fn add(&self, o: &Self) -> Self {
        if let (Some(a), Some(b)) = (self.as_rational(), o.as_rational()) {
            return Self::rational(a + b);
        }
        if self.is_zero_literal() {
            return o.clone();
        }
        if o.is_zero_literal() {
            return self.clone();
        }
        if let Node::Neg(b) = o.node() {
            return self.sub(b);
        }
        Self::wrap(Node::Add(self.clone(), o.clone()))
    }

    pub fn sub(&self, o: &Self) -> Self {
        if let (Some(a), Some(b)) = (self.as_rational(), o.as_rational()) {
            return Self::rational(a - b);
        }
        if o.is_zero_literal() {
            return self.clone();
        }
        if self.is_zero_literal() {
            return o.neg();
        }
        if let Node::Neg(b) = o.node() {
            return self.add(b);
        }
        Self::wrap(Node::Sub(self.clone(), o.clone()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if let (Some(a), Some(b)) = (self.as_rational(), o.as_rational()) {
            return Self::rational(a * b);
        }
        if self.is_zero_literal() || o.is_zero_literal() {
            return Self::zero();
        }
        if self.is_rational(1) {
            return o.clone();
        }
        if o.is_rational(1) {
            return self.clone();
        }
        if self.is_rational(-1) {
            return o.neg();
        }
        if o.is_rational(-1) {
            return self.neg();
        }
        Self::wrap(Node::Mul(self.clone(), o.clone()))
    }

    pub fn div(&self, o: &Self) -> Self {
        if let (Some(a), Some(b)) = (self.as_rational(), o.as_rational()) {
            if !b.is_zero() {
                return Self::rational(a / b);
            }
        }
        if self.is_zero_literal() && !o.is_zero_literal() {
            return Self::zero();
        }
        if o.is_rational(1) {
            return self.clone();
        }
        Self::wrap(Node::Div(self.clone(), o.clone()))
    }

    pub fn neg(&self) -> Self {
        match self.node() {
            Node::Rational(r, _) => Self::rational(-r),
            Node::Neg(e) => e.clone(),
            _ => Self::wrap(Node::Neg(self.clone())),
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => return Self::one(),
            1 => return self.clone(),
            _ => {}
        }
        if let Some(r) = self.as_rational() {
            if !(r.is_zero() && n < 0) {
                return Self::rational(pow_rational(r, n));
            }
        }
        Self::wrap(Node::Pow(self.clone(), n))
    }

    pub fn exp(&self) -> Self {
        if self.is_zero_literal() {
            return Self::one();
        }
        Self::wrap(Node::Exp(self.clone()))
    }

    /// Checked evaluation.
    pub fn try_eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self.node() {
            Node::Rational(_, f) => *f,
            Node::Float(f) => *f,
            Node::X => x,
            Node::Add(a, b) => a.try_eval(x)? + b.try_eval(x)?,
            Node::Sub(a, b) => a.try_eval(x)? - b.try_eval(x)?,
            Node::Mul(a, b) => a.try_eval(x)? * b.try_eval(x)?,
            Node::Div(a, b) => {
                let d = b.try_eval(x)?;
                if d == 0.0 {
                    return Err(EvalError::DivisionByZero(x));
                }
                a.try_eval(x)? / d
            }
            Node::Neg(a) => -a.try_eval(x)?,
            Node::Pow(a, n) => {
                let b = a.try_eval(x)?;
                if b == 0.0 && *n < 0 {
                    return Err(EvalError::DivisionByZero(x));
                }
                b.powi(*n)
            }
            Node::Exp(a) => a.try_eval(x)?.exp(),
        };
        Ok(v)
    }

    /// Unchecked evaluation; division by zero yields IEEE infinities or NaN.
    pub fn eval(&self, x: f64) -> f64 {
        match self.node() {
            Node::Rational(_, f) => *f,
            Node::Float(f) => *f,
            Node::X => x,
            Node::Add(a, b) => a.eval(x) + b.eval(x),
            Node::Sub(a, b) => a.eval(x) - b.eval(x),
            Node::Mul(a, b) => a.eval(x) * b.eval(x),
            Node::Div(a, b) => a.eval(x) / b.eval(x),
            Node::Neg(a) => -a.eval(x),
            Node::Pow(a, n) => a.eval(x).powi(*n),
            Node::Exp(a) => a.eval(x).exp(),
        }
    }

    pub fn differentiate(&self) -> Self {
        match self.node() {
            Node::Rational(..) | Node::Float(_) => Self::zero(),
            Node::X => Self::one(),
            Node::Add(a, b) => a.differentiate().add(&b.differentiate()),
            Node::Sub(a, b) => a.differentiate().sub(&b.differentiate()),
            Node::Mul(a, b) => a.differentiate().mul(b).add(&a.mul(&b.differentiate())),
            Node::Div(a, b) => {
                let num = a.differentiate().mul(b).sub(&a.mul(&b.differentiate()));
                num.div(&b.powi(2))
            }
            Node::Neg(a) => a.differentiate().neg(),
            Node::Pow(a, n) => Self::int(*n as i64)
                .mul(&a.powi(n - 1))
                .mul(&a.differentiate()),
            Node::Exp(a) => a.differentiate().mul(self),
        }
    }

    /// Exact normal form when every constant is rational and every `exp`
    /// argument is a polynomial.
    pub fn to_exp_rational(&self) -> Option<ExpRational> {
        Some(match self.node() {
            Node::Rational(r, _) => ExpRational::polynomial(Polynomial::constant(r.clone())),
            Node::Float(_) => return None,
            Node::X => ExpRational::polynomial(Polynomial::x()),
            Node::Add(a, b) => a.to_exp_rational()?.add(&b.to_exp_rational()?)?,
            Node::Sub(a, b) => a.to_exp_rational()?.add(&b.to_exp_rational()?.neg())?,
            Node::Mul(a, b) => a.to_exp_rational()?.mul(&b.to_exp_rational()?),
            Node::Div(a, b) => a.to_exp_rational()?.div(&b.to_exp_rational()?)?,
            Node::Neg(a) => a.to_exp_rational()?.neg(),
            Node::Pow(a, n) => a.to_exp_rational()?.powi(*n)?,
            Node::Exp(a) => a.to_exp_rational()?.exp()?,
        })
    }

    pub fn to_rational_function(&self) -> Option<RationalFunction> {
        self.to_exp_rational()?.as_rational().cloned()
    }

    /// Lossless conversion for expressions that normalise to a polynomial.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        self.to_exp_rational()?.as_polynomial().cloned()
    }

    /// True only when identically zero is proven exactly.
    pub fn is_identically_zero(&self) -> bool {
        self.is_zero_literal() || self.to_exp_rational().is_some_and(|e| e.is_zero())
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            Node::Rational(r, _) if r.is_negative() => 1,
            Node::Rational(r, _) if !r.is_integer() => 2,
            Node::Float(v) if *v < 0.0 => 1,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn pow_rational(r: &BigRational, n: i32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n.unsigned_abs() {
        acc *= r;
    }
    if n < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Prints in the input grammar; `parse(e.to_string())` evaluates like `e`.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Rational(r, _) => {
                if r.is_negative() && !r.is_integer() {
                    write!(f, "-{}", fmt_rational(&-r))
                } else {
                    write!(f, "{}", fmt_rational(r))
                }
            }
            // `{:?}` is the shortest representation that reads back to `v`.
            Node::Float(v) => write!(f, "{v:?}"),
            Node::X => write!(f, "x"),
            Node::Add(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " + ")?;
                b.fmt_child(f, 2)
            }
            Node::Sub(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " - ")?;
                b.fmt_child(f, 2)
            }
            Node::Mul(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "*")?;
                b.fmt_child(f, 3)
            }
            Node::Div(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "/")?;
                b.fmt_child(f, 4)
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                a.fmt_child(f, 4)
            }
            Node::Pow(a, n) => {
                a.fmt_child(f, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Node::Exp(a) => write!(f, "exp({a})"),
        }
    }
}
