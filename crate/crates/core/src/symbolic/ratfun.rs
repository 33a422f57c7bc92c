//! Rational functions and the `R(x) * exp(P(x))` normal form.
//!
//! Every coefficient of interest (polynomials, rational functions, Gaussian
//! envelopes and their derivatives) normalises into this class, where sign
//! questions reduce to Sturm computations on `num * den` because the
//! exponential factor is positive.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Polynomial;
use super::sturm::{sign_on_interval, Bound, SignSummary, SturmSequence};

/// `num / den` in lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = Polynomial::gcd(&num, &den);
        let num = num.exact_div(&g);
        let den = den.exact_div(&g);
        let l = den.leading();
        let inv = BigRational::one() / l;
        Self {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn zero() -> Self {
        Self::polynomial(Polynomial::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.den.is_constant().then_some(&self.num)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        Some(Self::new(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn powi(&self, n: i32) -> Option<Self> {
        if n >= 0 {
            Some(Self::new(self.num.pow(n as u32), self.den.pow(n as u32)))
        } else {
            Self::polynomial(Polynomial::one()).div(&Self::new(
                self.num.pow(n.unsigned_abs()),
                self.den.pow(n.unsigned_abs()),
            ))
        }
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(n, &self.den * &self.den)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.num.eval(x) / self.den.eval(x)
    }

    /// Whether the (reduced) denominator vanishes somewhere on the real line.
    pub fn has_real_poles(&self) -> bool {
        SturmSequence::new(&self.den).count_real() > 0
    }

    /// `deg num - deg den`; `None` for the zero function.
    pub fn degree_excess(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap_or(0) as i64)
    }

    /// Ratio of leading coefficients.
    pub fn leading_ratio(&self) -> BigRational {
        self.num.leading() / self.den.leading()
    }

    /// Sign of the function (off its poles) on `(lo, hi)`.
    pub fn sign_on(&self, lo: &Bound, hi: &Bound) -> SignSummary {
        sign_on_interval(&(&self.num * &self.den), lo, hi)
    }
}

/// `rational(x) * exp(exponent(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpRational {
    pub rational: RationalFunction,
    pub exponent: Polynomial,
}

impl ExpRational {
    pub fn new(rational: RationalFunction, exponent: Polynomial) -> Self {
        if rational.is_zero() {
            return Self::zero();
        }
        Self { rational, exponent }
    }

    pub fn rational(r: RationalFunction) -> Self {
        Self::new(r, Polynomial::zero())
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::rational(RationalFunction::polynomial(p))
    }

    pub fn zero() -> Self {
        Self {
            rational: RationalFunction::zero(),
            exponent: Polynomial::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn has_exponential(&self) -> bool {
        !self.exponent.is_zero()
    }

    pub fn as_rational(&self) -> Option<&RationalFunction> {
        (!self.has_exponential()).then_some(&self.rational)
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.as_rational()?.as_polynomial()
    }

    /// Sum; only representable when both exponents agree (or a term is zero).
    pub fn add(&self, o: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(o.clone());
        }
        if o.is_zero() {
            return Some(self.clone());
        }
        (self.exponent == o.exponent)
            .then(|| Self::new(self.rational.add(&o.rational), self.exponent.clone()))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.rational.neg(), self.exponent.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.rational.mul(&o.rational), &self.exponent + &o.exponent)
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(Self::new(
            self.rational.div(&o.rational)?,
            &self.exponent - &o.exponent,
        ))
    }

    pub fn powi(&self, n: i32) -> Option<Self> {
        let e = self.exponent.scale(&BigRational::from_integer(n.into()));
        Some(Self::new(self.rational.powi(n)?, e))
    }

    /// `exp(self)`, defined when `self` is a polynomial.
    pub fn exp(&self) -> Option<Self> {
        let p = self.as_polynomial()?;
        Some(Self::new(
            RationalFunction::polynomial(Polynomial::one()),
            p.clone(),
        ))
    }

    /// `(R' + R P') exp(P)`.
    pub fn derivative(&self) -> Self {
        let dp = RationalFunction::polynomial(self.exponent.derivative());
        Self::new(
            self.rational.derivative().add(&self.rational.mul(&dp)),
            self.exponent.clone(),
        )
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.rational.eval(x) * self.exponent.eval(x).exp()
    }

    pub fn has_real_poles(&self) -> bool {
        self.rational.has_real_poles()
    }

    pub fn sign_on(&self, lo: &Bound, hi: &Bound) -> SignSummary {
        self.rational.sign_on(lo, hi)
    }

    /// Polynomial whose real roots are exactly the real zeros of the function.
    pub fn zero_polynomial(&self) -> &Polynomial {
        &self.rational.num
    }

    /// Value at 0 as an exact sign; `None` if 0 is a pole.
    pub fn sign_at_zero(&self) -> Option<i32> {
        let z = BigRational::zero();
        if self.rational.den.sign_at(&z) == 0 {
            return None;
        }
        Some(self.rational.num.sign_at(&z) * self.rational.den.sign_at(&z))
    }
}
