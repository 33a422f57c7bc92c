//! Exact univariate polynomials over the rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial with exact rational coefficients, stored lowest degree first.
///
/// The coefficient vector is always trimmed, so the last stored coefficient
/// is nonzero unless the polynomial is identically zero (empty vector).
#[derive(Clone)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
    approx: Vec<f64>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from an integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational `n/d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let approx = coeffs.iter().map(rat_to_f64).collect();
        Self { coeffs, approx }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.approx.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Sign of the exact value at `x`: -1, 0 or 1.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        sign_of(&self.eval_exact(x))
    }

    /// Sign of `p(x)` as `x -> +inf` (`end = 1`) or `x -> -inf` (`end = -1`).
    pub fn sign_at_infinity(&self, end: i32) -> i32 {
        match self.degree() {
            None => 0,
            Some(d) => {
                let s = sign_of(&self.leading());
                if end < 0 && d % 2 == 1 {
                    -s
                } else {
                    s
                }
            }
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    /// Primitive vanishing at 0.
    pub fn integral(&self) -> Self {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(BigRational::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            v.push(c / rat(k as i64 + 1));
        }
        Self::new(v)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Euclidean division: `self = q * d + r`, `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic scaling (leading coefficient 1); zero stays zero.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        self.scale(&(BigRational::one() / l))
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.monic()
    }

    pub fn lcm(a: &Self, b: &Self) -> Self {
        if a.is_zero() || b.is_zero() {
            return Self::zero();
        }
        let g = Self::gcd(a, b);
        (&a.exact_div(&g) * b).monic()
    }

    /// Positive rational multiple with coprime integer coefficients. Keeps
    /// intermediate sizes small in remainder sequences; the sign of the
    /// leading coefficient is preserved.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        use num_integer::Integer;
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den_lcm.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if g.is_zero() {
            return Self::zero();
        }
        let g = g.abs();
        Self::new(
            ints.into_iter()
                .map(|c| BigRational::from_integer(c / &g))
                .collect(),
        )
    }

    /// Squarefree part `p / gcd(p, p')`, monic.
    pub fn squarefree(&self) -> Self {
        if self.is_constant() {
            return self.monic();
        }
        let g = Self::gcd(self, &self.derivative());
        self.exact_div(&g).monic()
    }

    /// Yun's squarefree decomposition: `p = c * prod_i q_i^i` with the
    /// returned `(c, [q_1, q_2, ...])`, every `q_i` monic and squarefree.
    pub fn squarefree_decomposition(&self) -> (BigRational, Vec<Self>) {
        assert!(!self.is_zero());
        let c = self.leading();
        let p = self.monic();
        if p.is_constant() {
            return (c, Vec::new());
        }
        let mut factors = Vec::new();
        let dp = p.derivative();
        let a = Self::gcd(&p, &dp);
        let mut b = p.exact_div(&a);
        let mut cc = dp.exact_div(&a);
        let mut d = &cc - &b.derivative();
        loop {
            let g = Self::gcd(&b, &d);
            factors.push(g.clone());
            b = b.exact_div(&g);
            if b.is_constant() {
                break;
            }
            cc = d.exact_div(&g);
            d = &cc - &b.derivative();
        }
        // Trailing units carry no roots.
        while factors.last().is_some_and(|f| f.is_constant()) {
            factors.pop();
        }
        (c, factors)
    }

    /// Cauchy bound: every real root satisfies `|r| < bound`.
    pub fn root_bound(&self) -> BigRational {
        let l = self.leading().abs();
        let mut m = BigRational::zero();
        if let Some(d) = self.degree() {
            for c in &self.coeffs[..d] {
                let v = c.abs() / &l;
                if v > m {
                    m = v;
                }
            }
        }
        m + BigRational::one()
    }

    /// `p(c x)` for a rational `c`.
    pub fn compose_scale(&self, c: &BigRational) -> Self {
        let mut f = BigRational::one();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            v.push(a * &f);
            f *= c;
        }
        Self::new(v)
    }
}

pub(crate) fn sign_of(r: &BigRational) -> i32 {
    match r.cmp(&BigRational::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Polynomial::new(v)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Prints in the expression grammar, e.g. `3*x^2 - 1/2*x + 1`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coef = fmt_rational(&a);
            match (k, a.is_one()) {
                (0, _) => write!(f, "{coef}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{coef}*x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{coef}*x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_reports_degree() {
        let p = Polynomial::from_ints(&[1, 0, 3, 0, 0]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.leading(), rat(3));
        assert_eq!(Polynomial::from_ints(&[0, 0]).degree(), None);
    }

    #[test]
    fn division_identity() {
        let a = Polynomial::from_ints(&[1, -4, 0, 2, 7]);
        let b = Polynomial::from_ints(&[3, 0, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = Polynomial::from_ints(&[-1, 1]); // x - 1
        let a = &f * &Polynomial::from_ints(&[2, 1]);
        let b = &f * &Polynomial::from_ints(&[5, 0, 1]);
        assert_eq!(Polynomial::gcd(&a, &b), f);
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)^3 (x+2)
        let p = &Polynomial::from_ints(&[-1, 1]).pow(3) * &Polynomial::from_ints(&[2, 1]);
        let (c, fs) = p.squarefree_decomposition();
        assert_eq!(c, rat(1));
        assert_eq!(fs.len(), 3);
        assert_eq!(fs[0], Polynomial::from_ints(&[2, 1]));
        assert!(fs[1].is_constant());
        assert_eq!(fs[2], Polynomial::from_ints(&[-1, 1]));
    }

    #[test]
    fn display_is_grammar_text() {
        let p = Polynomial::new(vec![rat(1), ratio(-1, 2), rat(3)]);
        assert_eq!(p.to_string(), "3*x^2 - 1/2*x + 1");
        assert_eq!(Polynomial::from_ints(&[0, -1]).to_string(), "-x");
    }

    #[test]
    fn integral_vanishes_at_zero() {
        let p = Polynomial::from_ints(&[-1, 0, 1]);
        assert_eq!(
            p.integral(),
            Polynomial::new(vec![rat(0), rat(-1), rat(0), ratio(1, 3)])
        );
    }

    #[test]
    fn sign_at_infinity_follows_parity() {
        let p = Polynomial::from_ints(&[0, 0, 0, -2]);
        assert_eq!(p.sign_at_infinity(1), -1);
        assert_eq!(p.sign_at_infinity(-1), 1);
    }
}
