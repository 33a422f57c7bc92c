use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

impl Verdict {
    pub fn from_option(b: Option<bool>) -> Self {
        match b {
            Some(true) => Verdict::Holds,
            Some(false) => Verdict::Fails,
            None => Verdict::Indeterminate,
        }
    }

    /// Conjunction: any failure fails, otherwise any doubt is doubt.
    pub fn and(self, o: Self) -> Self {
        match (self, o) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
            _ => Verdict::Indeterminate,
        }
    }

    /// Disjunction: any success holds, otherwise any doubt is doubt.
    pub fn or(self, o: Self) -> Self {
        match (self, o) {
            (Verdict::Holds, _) | (_, Verdict::Holds) => Verdict::Holds,
            (Verdict::Fails, Verdict::Fails) => Verdict::Fails,
            _ => Verdict::Indeterminate,
        }
    }
}

/// One labelled hypothesis with its verdict and the evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub label: String,
    pub verdict: Verdict,
    pub evidence: String,
}

impl Condition {
    pub fn new(label: impl Into<String>, verdict: Verdict, evidence: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            verdict,
            evidence: evidence.into(),
        }
    }
}
