//! The equation `x'' + Σ_l f_l(x) x'^l = 0` and its phase-plane field
//! `x' = y`, `y' = -Σ_l f_l(x) y^l`.

mod isocline;
mod validate;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::symbolic::parse::{parse_rational, parse_with, ParseError};
use crate::symbolic::{Antiderivative, Expression, Polynomial};

pub use isocline::{isoclines, BranchSign, IsoclineBranch, IsoclineError, Isoclines};
pub use validate::{validate, ValidationReport, DEFAULT_LIPSCHITZ_WINDOW};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("coefficient list is empty")]
    Empty,
    #[error("n = {n} requires {} coefficients, got {got}", n + 1)]
    Length { n: usize, got: usize },
    #[error("leading coefficient f_{0} is identically zero")]
    VanishingLeading(usize),
    #[error("coefficient f_{index}: {source}")]
    Expression { index: usize, source: ParseError },
    #[error("{field}: {source}")]
    Polynomial { field: String, source: ParseError },
    #[error("{0} is not a polynomial")]
    NotPolynomial(String),
    #[error("parameter {0}: not a number")]
    Parameter(String),
    #[error("TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// A number written either as a TOML/JSON number or as a string such as "1/3".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Int(i) => Some(BigRational::from_integer((*i).into())),
            // Shortest round-trip decimal, so 0.1 reads as 1/10.
            Scalar::Float(f) => parse_rational(&format!("{f:?}")),
            Scalar::Text(s) => parse_rational(s),
        }
    }
}

/// Polynomials `p, q1, q2, r` of `p x'' + p q1 x' + q2 x'^2 + r = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleDocument {
    pub p: String,
    pub q1: String,
    pub q2: String,
    pub r: String,
}

/// On-disk form of an equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub coefficients: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem3: Option<QuadrupleDocument>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quadruple {
    pub p: Polynomial,
    pub q1: Polynomial,
    pub q2: Polynomial,
    pub r: Polynomial,
}

impl Quadruple {
    /// `f_0 = r/p`, `f_1 = q1`, `f_2 = q2/p`.
    pub fn to_spec(&self) -> EquationSpec {
        let p = Expression::from_polynomial(&self.p);
        let coeffs = vec![
            Expression::from_polynomial(&self.r).div(&p),
            Expression::from_polynomial(&self.q1),
            Expression::from_polynomial(&self.q2).div(&p),
        ];
        EquationSpec::from_expressions(coeffs).expect("nonzero quadruple")
    }
}

/// `(n, f_0, ..., f_n)`, with `f_0 = g`.
#[derive(Clone)]
pub struct EquationSpec {
    pub name: Option<String>,
    coefficients: Vec<Expression>,
    sources: Vec<String>,
    parameters: BTreeMap<String, Scalar>,
    quadruple: Option<Quadruple>,
    quadruple_doc: Option<QuadrupleDocument>,
    f1_primitive: Arc<OnceLock<Antiderivative>>,
    g_primitive: Arc<OnceLock<Antiderivative>>,
    f2_primitive: Arc<OnceLock<Antiderivative>>,
}

impl std::fmt::Debug for EquationSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EquationSpec")
            .field("n", &self.n())
            .field("coefficients", &self.sources)
            .finish()
    }
}

fn parse_poly(
    field: &str,
    text: &str,
    params: &BTreeMap<String, BigRational>,
) -> Result<Polynomial, SpecError> {
    let e = parse_with(text, params).map_err(|source| SpecError::Polynomial {
        field: field.to_string(),
        source,
    })?;
    e.to_polynomial()
        .ok_or_else(|| SpecError::NotPolynomial(field.to_string()))
}

impl EquationSpec {
    pub fn from_document(doc: &SpecDocument) -> Result<Self, SpecError> {
        let mut params = BTreeMap::new();
        for (k, v) in &doc.parameters {
            let r = v
                .to_rational()
                .ok_or_else(|| SpecError::Parameter(k.clone()))?;
            params.insert(k.clone(), r);
        }
        if doc.coefficients.is_empty() {
            return Err(SpecError::Empty);
        }
        if doc.coefficients.len() != doc.n + 1 {
            return Err(SpecError::Length {
                n: doc.n,
                got: doc.coefficients.len(),
            });
        }
        let coefficients = doc
            .coefficients
            .iter()
            .enumerate()
            .map(|(index, s)| {
                parse_with(s, &params).map_err(|source| SpecError::Expression { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let quadruple = match &doc.theorem3 {
            Some(q) => Some(Quadruple {
                p: parse_poly("theorem3.p", &q.p, &params)?,
                q1: parse_poly("theorem3.q1", &q.q1, &params)?,
                q2: parse_poly("theorem3.q2", &q.q2, &params)?,
                r: parse_poly("theorem3.r", &q.r, &params)?,
            }),
            None => None,
        };
        let mut spec = Self::build(coefficients, doc.coefficients.clone())?;
        spec.name = doc.name.clone();
        spec.parameters = doc.parameters.clone();
        spec.quadruple = quadruple;
        spec.quadruple_doc = doc.theorem3.clone();
        Ok(spec)
    }

    pub fn from_expressions(coefficients: Vec<Expression>) -> Result<Self, SpecError> {
        let sources = coefficients.iter().map(|e| e.to_string()).collect();
        Self::build(coefficients, sources)
    }

    /// Parse coefficient strings `f_0, ..., f_n`.
    pub fn from_strs(coefficients: &[&str]) -> Result<Self, SpecError> {
        Self::from_document(&SpecDocument {
            name: None,
            n: coefficients.len().saturating_sub(1),
            coefficients: coefficients.iter().map(|s| s.to_string()).collect(),
            parameters: BTreeMap::new(),
            theorem3: None,
        })
    }

    fn build(coefficients: Vec<Expression>, sources: Vec<String>) -> Result<Self, SpecError> {
        let n = coefficients.len().checked_sub(1).ok_or(SpecError::Empty)?;
        if n > 0 && coefficients[n].is_identically_zero() {
            return Err(SpecError::VanishingLeading(n));
        }
        Ok(Self {
            name: None,
            coefficients,
            sources,
            parameters: BTreeMap::new(),
            quadruple: None,
            quadruple_doc: None,
            f1_primitive: Arc::default(),
            g_primitive: Arc::default(),
            f2_primitive: Arc::default(),
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, SpecError> {
        Self::from_document(&toml::from_str(text)?)
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        Self::from_document(&serde_json::from_str(text)?)
    }

    /// JSON when the path ends in `.json` or the text opens with `{`, else TOML.
    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)?;
        let json =
            path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    /// Document with the original coefficient strings, byte for byte.
    pub fn to_document(&self) -> SpecDocument {
        SpecDocument {
            name: self.name.clone(),
            n: self.n(),
            coefficients: self.sources.clone(),
            parameters: self.parameters.clone(),
            theorem3: self.quadruple_doc.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Expression] {
        &self.coefficients
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    /// `f_l`, or zero beyond `n`.
    pub fn coefficient(&self, l: usize) -> Expression {
        self.coefficients
            .get(l)
            .cloned()
            .unwrap_or_else(Expression::zero)
    }

    pub fn g(&self) -> &Expression {
        &self.coefficients[0]
    }

    pub fn quadruple(&self) -> Option<&Quadruple> {
        self.quadruple.as_ref()
    }

    /// Which `f_l` (`l ≥ 1`) are not identically zero.
    pub fn active_powers(&self) -> Vec<usize> {
        (1..=self.n())
            .filter(|&l| !self.coefficients[l].is_identically_zero())
            .collect()
    }

    /// Same equation with the given coefficient replaced.
    pub fn with_coefficient(&self, l: usize, e: Expression) -> Result<Self, SpecError> {
        let mut cs = self.coefficients.clone();
        while cs.len() <= l {
            cs.push(Expression::zero());
        }
        cs[l] = e;
        while cs.len() > 1 && cs.last().unwrap().is_identically_zero() {
            cs.pop();
        }
        Self::from_expressions(cs)
    }

    /// `F_1(x) = ∫_0^x f_1`.
    pub fn f1_primitive(&self) -> &Antiderivative {
        self.f1_primitive
            .get_or_init(|| Antiderivative::of(&self.coefficient(1)))
    }

    /// `∫_0^x f_2`.
    pub fn f2_primitive(&self) -> &Antiderivative {
        self.f2_primitive
            .get_or_init(|| Antiderivative::of(&self.coefficient(2)))
    }

    /// `G(x) = ∫_0^x g`.
    pub fn g_primitive(&self) -> &Antiderivative {
        self.g_primitive
            .get_or_init(|| Antiderivative::of(self.g()))
    }

    /// `Σ_{l≥1} f_l(x) y^l`.
    fn damping(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coefficients[1..].iter().rev() {
            acc = (acc + c.eval(x)) * y;
        }
        acc
    }

    pub fn field(&self, x: f64, y: f64) -> (f64, f64) {
        (y, -(self.g().eval(x) + self.damping(x, y)))
    }

    /// Trace of the Jacobian, `-Σ_{l≥1} l f_l(x) y^(l-1)`.
    pub fn divergence(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for (l, c) in self.coefficients.iter().enumerate().skip(1).rev() {
            acc = acc * y + l as f64 * c.eval(x);
        }
        -acc
    }
}
