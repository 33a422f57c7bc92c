//! Decision procedures for the four theorems, one labelled condition per
//! hypothesis.

mod existence;
mod massera;
mod nonexistence;
mod poly;

use serde::Serialize;

use crate::verdict::{Condition, Verdict};

pub use existence::check_existence_general;
pub use massera::check_massera;
pub use nonexistence::check_nonexistence;
pub use poly::check_existence_poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremId {
    T1,
    T2,
    T3,
    T4,
}

impl TheoremId {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t1" => Some(Self::T1),
            "t2" => Some(Self::T2),
            "t3" => Some(Self::T3),
            "t4" => Some(Self::T4),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Overall {
    Applies,
    DoesNotApply,
    Indeterminate,
}

impl Overall {
    pub fn exit_code(self) -> i32 {
        match self {
            Overall::Applies => 0,
            Overall::DoesNotApply => 1,
            Overall::Indeterminate => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub conditions: Vec<Condition>,
    pub overall: Overall,
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn new(theorem: TheoremId, conditions: Vec<Condition>, notes: Vec<String>) -> Self {
        let v = conditions
            .iter()
            .fold(Verdict::Holds, |acc, c| acc.and(c.verdict));
        let overall = match v {
            Verdict::Holds => Overall::Applies,
            Verdict::Fails => Overall::DoesNotApply,
            Verdict::Indeterminate => Overall::Indeterminate,
        };
        Self {
            theorem,
            conditions,
            overall,
            notes,
        }
    }

    pub fn condition(&self, label: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoremError {
    #[error("this theorem needs n = 2, got n = {0}")]
    Order(usize),
}

/// Exit code for several reports: 0 if all apply, 1 if any does not, else 2.
pub fn combined_exit_code(reports: &[TheoremReport]) -> i32 {
    if reports.iter().all(|r| r.overall == Overall::Applies) {
        0
    } else if reports.iter().any(|r| r.overall == Overall::DoesNotApply) {
        1
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_follows_conditions() {
        let h = Condition::new("a", Verdict::Holds, "");
        let i = Condition::new("b", Verdict::Indeterminate, "");
        let f = Condition::new("c", Verdict::Fails, "");
        let r = TheoremReport::new(TheoremId::T1, vec![h.clone()], vec![]);
        assert_eq!(r.overall, Overall::Applies);
        let r = TheoremReport::new(TheoremId::T1, vec![h.clone(), i.clone()], vec![]);
        assert_eq!(r.overall, Overall::Indeterminate);
        let r = TheoremReport::new(TheoremId::T1, vec![i, f, h], vec![]);
        assert_eq!(r.overall, Overall::DoesNotApply);
        assert_eq!(r.overall.exit_code(), 1);
    }

    #[test]
    fn json_field_order() {
        let r = TheoremReport::new(TheoremId::T3, vec![], vec!["n".into()]);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"theorem":"T3","conditions":[],"overall":"Applies","notes":["n"]}"#
        );
    }
}
