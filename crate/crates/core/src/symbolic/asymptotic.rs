//! Leading-order behaviour at `±∞` for the `R(x) exp(P(x))` class, its
//! primitives, square roots and sums.
//!
//! A [`Tail`] is a finite list of terms `c |x|^α (ln|x|)^β exp(P(x))` in
//! decreasing order, optionally followed by an unknown remainder that is
//! `o()` of a stated order. Exact cancellation of known terms is detected;
//! anything that cannot be decided surfaces as [`Limit::Unknown`].

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{sign_of, Polynomial};
use super::ratfun::{ExpRational, RationalFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    NegInf,
    PosInf,
}

impl End {
    pub fn sign(self) -> i32 {
        match self {
            End::NegInf => -1,
            End::PosInf => 1,
        }
    }
}

/// The scale `|x|^alpha (ln|x|)^beta exp(exponent(x))`; `exponent` has no
/// constant term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Order {
    pub exponent: Polynomial,
    pub alpha: BigRational,
    pub beta: i32,
}

impl Order {
    pub fn unit() -> Self {
        Self::power(BigRational::zero())
    }

    pub fn power(alpha: BigRational) -> Self {
        Self {
            exponent: Polynomial::zero(),
            alpha,
            beta: 0,
        }
    }

    pub fn compare(&self, o: &Self, end: End) -> Ordering {
        let d = &self.exponent - &o.exponent;
        if !d.is_zero() {
            return d.sign_at_infinity(end.sign()).cmp(&0);
        }
        self.alpha
            .cmp(&o.alpha)
            .then_with(|| self.beta.cmp(&o.beta))
    }

    pub fn grows(&self, end: End) -> bool {
        self.compare(&Self::unit(), end) == Ordering::Greater
    }
}

/// Coefficient, exact when rational and known.
#[derive(Debug, Clone, PartialEq)]
pub struct Coef {
    pub approx: f64,
    pub exact: Option<BigRational>,
}

impl Coef {
    pub fn exact(r: BigRational) -> Self {
        Self {
            approx: r.to_f64().unwrap_or(f64::NAN),
            exact: Some(r),
        }
    }

    pub fn approx(v: f64) -> Self {
        Self {
            approx: v,
            exact: None,
        }
    }

    pub fn unknown() -> Self {
        Self::approx(f64::NAN)
    }

    pub fn is_known(&self) -> bool {
        self.exact.is_some() || self.approx.is_finite()
    }

    pub fn sign(&self) -> Option<i32> {
        match &self.exact {
            Some(r) => Some(sign_of(r)),
            None if self.approx.is_finite() && self.approx != 0.0 => {
                Some(if self.approx > 0.0 { 1 } else { -1 })
            }
            None => None,
        }
    }

    fn neg(&self) -> Self {
        Self {
            approx: -self.approx,
            exact: self.exact.as_ref().map(|r| -r),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Self::exact(a * b),
            _ => Self::approx(self.approx * o.approx),
        }
    }

    fn div(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) if !b.is_zero() => Self::exact(a / b),
            _ => Self::approx(self.approx / o.approx),
        }
    }

    /// Sum; `None` when the result is exactly zero, unknown when an inexact
    /// sum is too close to zero to trust its sign.
    fn add(&self, o: &Self) -> Option<Self> {
        if let (Some(a), Some(b)) = (&self.exact, &o.exact) {
            let s = a + b;
            return (!s.is_zero()).then(|| Self::exact(s));
        }
        let s = self.approx + o.approx;
        let scale = self.approx.abs().max(o.approx.abs());
        if !s.is_finite() || s.abs() <= 1e-9 * scale {
            Some(Self::unknown())
        } else {
            Some(Self::approx(s))
        }
    }

    fn sqrt(&self) -> Option<Self> {
        if self.sign()? <= 0 {
            return None;
        }
        if let Some(r) = &self.exact {
            let n = r.numer().sqrt();
            let d = r.denom().sqrt();
            if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
                return Some(Self::exact(BigRational::new(n, d)));
            }
        }
        Some(Self::approx(self.approx.sqrt()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub order: Order,
    pub coef: Coef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    PlusInfinity,
    MinusInfinity,
    Finite,
    Unknown,
}

impl Limit {
    pub fn describe(self) -> &'static str {
        match self {
            Limit::PlusInfinity => "+inf",
            Limit::MinusInfinity => "-inf",
            Limit::Finite => "finite",
            Limit::Unknown => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tail {
    pub end: End,
    /// Known terms, strictly decreasing in order.
    pub terms: Vec<Term>,
    /// Unknown remainder is `o(rem)`; `None` means the expansion is exact.
    pub rem: Option<Order>,
}

impl Tail {
    pub fn zero(end: End) -> Self {
        Self {
            end,
            terms: Vec::new(),
            rem: None,
        }
    }

    fn power_term(c: BigRational, k: usize, end: End) -> Term {
        // c x^k = c (±1)^k |x|^k
        let c = if end == End::NegInf && k % 2 == 1 {
            -c
        } else {
            c
        };
        Term {
            order: Order::power(BigRational::from_integer(k.into())),
            coef: Coef::exact(c),
        }
    }

    pub fn of_polynomial(p: &Polynomial, end: End) -> Self {
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| Self::power_term(c.clone(), k, end))
            .collect();
        Self {
            end,
            terms,
            rem: None,
        }
    }

    pub fn of_rational(r: &RationalFunction, end: End) -> Self {
        let (q, s) = r.num.div_rem(&r.den);
        let mut t = Self::of_polynomial(&q, end);
        if s.is_zero() {
            return t;
        }
        let excess = s.degree().unwrap() as i64 - r.den.degree().unwrap() as i64;
        let mut c = s.leading() / r.den.leading();
        if end == End::NegInf && excess.rem_euclid(2) == 1 {
            c = -c;
        }
        let order = Order::power(BigRational::from_integer(excess.into()));
        t.terms.push(Term {
            order: order.clone(),
            coef: Coef::exact(c),
        });
        t.rem = Some(order);
        t
    }

    pub fn of_exp_rational(e: &ExpRational, end: End) -> Self {
        if !e.has_exponential() {
            return Self::of_rational(&e.rational, end);
        }
        let c0 = e.exponent.coeff(0);
        let p1 = &e.exponent - &Polynomial::constant(c0.clone());
        let lead = Self::of_rational(&e.rational, end);
        let first = lead.terms.into_iter().next().expect("nonzero function");
        let coef = if c0.is_zero() {
            first.coef
        } else {
            Coef::approx(first.coef.approx * c0.to_f64().unwrap_or(f64::NAN).exp())
        };
        let order = Order {
            exponent: p1,
            ..first.order
        };
        Self {
            end,
            terms: vec![Term {
                order: order.clone(),
                coef,
            }],
            rem: Some(order),
        }
    }

    pub fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn neg(&self) -> Self {
        Self {
            end: self.end,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    order: t.order.clone(),
                    coef: t.coef.neg(),
                })
                .collect(),
            rem: self.rem.clone(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.end, o.end);
        let end = self.end;
        let mut terms: Vec<Term> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            let ord = match (self.terms.get(i), o.terms.get(j)) {
                (Some(a), Some(b)) => a.order.compare(&b.order, end),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    terms.push(o.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    if let Some(c) = self.terms[i].coef.add(&o.terms[j].coef) {
                        terms.push(Term {
                            order: self.terms[i].order.clone(),
                            coef: c,
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        let rem = match (&self.rem, &o.rem) {
            (Some(a), Some(b)) => Some(if a.compare(b, end) == Ordering::Less {
                b.clone()
            } else {
                a.clone()
            }),
            (a, b) => a.clone().or(b.clone()),
        };
        if let Some(r) = &rem {
            terms.retain(|t| t.order.compare(r, end) != Ordering::Less);
        }
        Self { end, terms, rem }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Leading-order square root of an eventually positive tail.
    pub fn sqrt(&self) -> Option<Self> {
        let t = self.leading()?;
        if t.order.beta % 2 != 0 {
            return None;
        }
        let half = BigRational::new(1.into(), 2.into());
        let order = Order {
            exponent: t.order.exponent.scale(&half),
            alpha: &t.order.alpha * &half,
            beta: t.order.beta / 2,
        };
        Some(Self {
            end: self.end,
            terms: vec![Term {
                order: order.clone(),
                coef: t.coef.sqrt()?,
            }],
            rem: Some(order),
        })
    }

    /// Tail of `∫_0^x` of the function described by `self`.
    pub fn integral(&self) -> Self {
        let end = self.end;
        let s = BigRational::from_integer(end.sign().into());
        let mut out = Self::zero(end);
        for t in &self.terms {
            let o = &t.order;
            let polynomial_term = o.exponent.is_zero()
                && o.beta == 0
                && o.alpha.is_integer()
                && !o.alpha.is_negative()
                && t.coef.exact.is_some();
            if polynomial_term {
                // c |x|^k integrates exactly to sgn * c |x|^(k+1) / (k+1).
                let k1 = &o.alpha + BigRational::one();
                out.terms.push(Term {
                    order: Order::power(k1.clone()),
                    coef: t.coef.mul(&Coef::exact(&s / &k1)),
                });
                continue;
            }
            let lead = Self::integrate_leading(t, end);
            match lead {
                Some(term) if term.order.grows(end) => {
                    out.rem = Some(term.order.clone());
                    out.terms.push(term);
                }
                _ => {
                    // Convergent: an unknown constant plus a vanishing part.
                    out.terms.push(Term {
                        order: Order::unit(),
                        coef: Coef::unknown(),
                    });
                    out.rem = Some(Order::unit());
                }
            }
            return out;
        }
        if let Some(r) = &self.rem {
            // The unknown remainder integrates to something o(x^(alpha+1)).
            let mut grown = r.clone();
            grown.alpha += BigRational::one();
            if grown.grows(end) {
                out.rem = Some(grown);
            } else {
                out.terms.push(Term {
                    order: Order::unit(),
                    coef: Coef::unknown(),
                });
                out.rem = Some(Order::unit());
            }
        }
        out
    }

    /// Leading term of a primitive of a single term, when it grows.
    fn integrate_leading(t: &Term, end: End) -> Option<Term> {
        let o = &t.order;
        let s = Coef::exact(BigRational::from_integer(end.sign().into()));
        if !o.exponent.is_zero() {
            if o.exponent.sign_at_infinity(end.sign()) < 0 {
                return None;
            }
            // ∫ R e^P ~ R e^P / P'
            let d = o.exponent.degree().unwrap();
            let dp = Polynomial::monomial(
                o.exponent.leading() * BigRational::from_integer(d.into()),
                d - 1,
            );
            let dlead = Self::power_term(dp.leading(), d - 1, end).coef;
            return Some(Term {
                order: Order {
                    exponent: o.exponent.clone(),
                    alpha: &o.alpha - BigRational::from_integer((d - 1).into()),
                    beta: o.beta,
                },
                coef: t.coef.div(&dlead),
            });
        }
        let minus_one = -BigRational::one();
        match o.alpha.cmp(&minus_one) {
            Ordering::Greater => {
                let k1 = &o.alpha + BigRational::one();
                Some(Term {
                    order: Order {
                        exponent: Polynomial::zero(),
                        alpha: k1.clone(),
                        beta: o.beta,
                    },
                    coef: t.coef.mul(&s).div(&Coef::exact(k1)),
                })
            }
            Ordering::Equal if o.beta >= 0 => {
                let b1 = o.beta + 1;
                Some(Term {
                    order: Order {
                        exponent: Polynomial::zero(),
                        alpha: BigRational::zero(),
                        beta: b1,
                    },
                    coef: t
                        .coef
                        .mul(&s)
                        .div(&Coef::exact(BigRational::from_integer(b1.into()))),
                })
            }
            _ => None,
        }
    }

    pub fn limit(&self) -> Limit {
        match self.leading() {
            Some(t) if t.order.grows(self.end) => match t.coef.sign() {
                Some(1) => Limit::PlusInfinity,
                Some(_) => Limit::MinusInfinity,
                None => Limit::Unknown,
            },
            Some(_) => Limit::Finite,
            None => match &self.rem {
                Some(r) if r.grows(self.end) => Limit::Unknown,
                _ => Limit::Finite,
            },
        }
    }
}
