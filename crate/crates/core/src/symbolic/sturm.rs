//! Sturm sequences, real-root isolation and exact sign classification.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::{rat, rat_to_f64, ratio, Polynomial};

/// Interval endpoint; finite endpoints are exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    NegInf,
    PosInf,
    At(BigRational),
}

impl Bound {
    pub fn at(x: i64) -> Self {
        Bound::At(rat(x))
    }
}

/// Global sign behaviour of a polynomial over a (possibly unbounded) open interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignSummary {
    EverywherePositive,
    EverywhereNegative,
    NonnegWithZeros,
    NonposWithZeros,
    ChangesSign,
    IdenticallyZero,
}

impl SignSummary {
    /// `f >= 0` everywhere on the domain.
    pub fn is_nonnegative(self) -> bool {
        matches!(
            self,
            Self::EverywherePositive | Self::NonnegWithZeros | Self::IdenticallyZero
        )
    }

    pub fn is_nonpositive(self) -> bool {
        matches!(
            self,
            Self::EverywhereNegative | Self::NonposWithZeros | Self::IdenticallyZero
        )
    }

    /// Never changes sign (zeros allowed).
    pub fn is_one_signed(self) -> bool {
        self.is_nonnegative() || self.is_nonpositive()
    }

    pub fn negate(self) -> Self {
        match self {
            Self::EverywherePositive => Self::EverywhereNegative,
            Self::EverywhereNegative => Self::EverywherePositive,
            Self::NonnegWithZeros => Self::NonposWithZeros,
            Self::NonposWithZeros => Self::NonnegWithZeros,
            s => s,
        }
    }
}

impl fmt::Display for SignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::EverywherePositive => "everywhere-positive",
            Self::EverywhereNegative => "everywhere-negative",
            Self::NonnegWithZeros => "nonneg-with-zeros",
            Self::NonposWithZeros => "nonpos-with-zeros",
            Self::ChangesSign => "changes-sign",
            Self::IdenticallyZero => "identically-zero",
        };
        f.write_str(s)
    }
}

/// An isolated real root: `lo <= root <= hi`, exact when `lo == hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rat(2)
    }

    pub fn approx(&self) -> f64 {
        rat_to_f64(&self.midpoint())
    }

    pub fn width(&self) -> f64 {
        rat_to_f64(&(&self.hi - &self.lo))
    }
}

#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<Polynomial>,
}

impl SturmSequence {
    /// Sequence for the squarefree part of `p`, so counts are of distinct roots.
    pub fn new(p: &Polynomial) -> Self {
        let p0 = p.squarefree();
        let mut seq = vec![p0.clone()];
        if p0.is_constant() {
            return Self { seq };
        }
        let mut a = p0;
        let mut b = a.derivative();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            seq.push(b.clone());
            a = b;
            // -rem, scaled by a positive factor
            b = (-&r).primitive_part();
        }
        Self { seq }
    }

    pub fn base(&self) -> &Polynomial {
        &self.seq[0]
    }

    fn variations(signs: impl Iterator<Item = i32>) -> usize {
        let mut last = 0;
        let mut count = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn variations_at(&self, b: &Bound) -> usize {
        match b {
            Bound::NegInf => Self::variations(self.seq.iter().map(|p| p.sign_at_infinity(-1))),
            Bound::PosInf => Self::variations(self.seq.iter().map(|p| p.sign_at_infinity(1))),
            Bound::At(x) => Self::variations(self.seq.iter().map(|p| p.sign_at(x))),
        }
    }

    /// Distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_half_open(&self, lo: &Bound, hi: &Bound) -> usize {
        if self.seq[0].is_constant() {
            return 0;
        }
        let a = self.variations_at(lo);
        let b = self.variations_at(hi);
        a.saturating_sub(b)
    }

    /// Distinct real roots in the open interval `(lo, hi)`.
    pub fn count_open(&self, lo: &Bound, hi: &Bound) -> usize {
        let n = self.count_half_open(lo, hi);
        match hi {
            Bound::At(x) if self.seq[0].sign_at(x) == 0 => n - 1,
            _ => n,
        }
    }

    pub fn count_real(&self) -> usize {
        self.count_half_open(&Bound::NegInf, &Bound::PosInf)
    }
}

/// Isolates every distinct real root of `p` into an interval of width at
/// most `width` (exact roots hit during bisection are returned as points).
pub fn isolate_roots(p: &Polynomial, width: &BigRational) -> Vec<RealRoot> {
    if p.is_zero() {
        return Vec::new();
    }
    let sturm = SturmSequence::new(p);
    let sqf = sturm.base().clone();
    if sqf.is_constant() {
        return Vec::new();
    }
    let bound = sqf.root_bound();
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        let n = sturm.count_half_open(&Bound::At(a.clone()), &Bound::At(b.clone()));
        if n == 0 {
            continue;
        }
        if n == 1 {
            if sqf.sign_at(&b) == 0 {
                out.push(RealRoot {
                    lo: b.clone(),
                    hi: b,
                });
            } else {
                out.push(refine(&sturm, a, b, width));
            }
            continue;
        }
        let m = (&a + &b) / rat(2);
        stack.push((a, m.clone()));
        stack.push((m, b));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

fn refine(
    sturm: &SturmSequence,
    mut a: BigRational,
    mut b: BigRational,
    width: &BigRational,
) -> RealRoot {
    let sqf = sturm.base();
    while &(&b - &a) > width {
        let m = (&a + &b) / rat(2);
        if sqf.sign_at(&m) == 0 {
            return RealRoot {
                lo: m.clone(),
                hi: m,
            };
        }
        if sturm.count_half_open(&Bound::At(a.clone()), &Bound::At(m.clone())) == 1 {
            b = m;
        } else {
            a = m;
        }
    }
    RealRoot { lo: a, hi: b }
}

fn interior_point(lo: &Bound, hi: &Bound) -> BigRational {
    match (lo, hi) {
        (Bound::At(a), Bound::At(b)) => (a + b) / rat(2),
        (Bound::At(a), _) => a + BigRational::one(),
        (_, Bound::At(b)) => b - BigRational::one(),
        _ => BigRational::zero(),
    }
}

/// Exact sign classification of `p` on the open interval `(lo, hi)`.
pub fn sign_on_interval(p: &Polynomial, lo: &Bound, hi: &Bound) -> SignSummary {
    if p.is_zero() {
        return SignSummary::IdenticallyZero;
    }
    let (c, factors) = p.squarefree_decomposition();
    if factors.is_empty() {
        return if c.is_positive() {
            SignSummary::EverywherePositive
        } else {
            SignSummary::EverywhereNegative
        };
    }
    let mut odd = Polynomial::constant(c);
    let mut all = Polynomial::one();
    for (i, f) in factors.iter().enumerate() {
        if (i + 1) % 2 == 1 {
            odd = &odd * f;
        }
        all = &all * f;
    }
    if SturmSequence::new(&odd).count_open(lo, hi) > 0 {
        return SignSummary::ChangesSign;
    }
    let has_zeros = SturmSequence::new(&all).count_open(lo, hi) > 0;
    // `odd` has no root inside, so its sign at any interior point is the sign of p off its zeros.
    let s = odd.sign_at(&interior_point(lo, hi));
    match (s > 0, has_zeros) {
        (true, false) => SignSummary::EverywherePositive,
        (true, true) => SignSummary::NonnegWithZeros,
        (false, false) => SignSummary::EverywhereNegative,
        (false, true) => SignSummary::NonposWithZeros,
    }
}

/// Sign classification over the whole real line plus the isolated roots.
#[derive(Clone, Debug)]
pub struct SignAnalysis {
    pub summary: SignSummary,
    pub roots: Vec<RealRoot>,
}

/// Default isolation width for reported roots.
pub fn default_root_width() -> BigRational {
    ratio(1, 1 << 40)
}

pub fn sturm_sign_analysis(p: &Polynomial, width: &BigRational) -> SignAnalysis {
    let summary = sign_on_interval(p, &Bound::NegInf, &Bound::PosInf);
    let roots = if p.is_zero() {
        Vec::new()
    } else {
        isolate_roots(p, width)
    };
    SignAnalysis { summary, roots }
}

/// `p(x) > 0` for every `x != 0`, as in hypotheses of the form `x g(x) > 0`.
pub fn positive_off_origin(p: &Polynomial) -> bool {
    let zero = Bound::At(BigRational::zero());
    sign_on_interval(p, &Bound::NegInf, &zero) == SignSummary::EverywherePositive
        && sign_on_interval(p, &zero, &Bound::PosInf) == SignSummary::EverywherePositive
}
