//! Verification records and their JSON form.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::Dyadic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// Exact value reported without a pass/fail assertion.
    Info,
    /// Not evaluated (budget or guard), coverage incomplete.
    Skip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        })
    }
}

pub type Params = BTreeMap<String, String>;

/// Builds a [`Params`] map from `key => value` pairs.
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = $crate::report::Params::new();
        $( m.insert($k.to_string(), $v.to_string()); )*
        m
    }};
}

/// One verified (or reported) claim: exact values on both sides of a relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub claim: String,
    pub params: Params,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    /// `null` for informational and skipped rows.
    pub pass: Option<bool>,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl WitnessReport {
    /// Compares two exact values.
    pub fn compare(
        claim: impl Into<String>,
        params: Params,
        lhs: &Dyadic,
        relation: Relation,
        rhs: &Dyadic,
    ) -> Self {
        let ok = relation.holds(lhs, rhs);
        Self::with_values(claim, params, lhs.to_string(), relation, rhs.to_string(), ok)
    }

    /// Compares two values of any ordered type, rendering them with `Display`.
    pub fn compare_display<T: Ord + fmt::Display>(
        claim: impl Into<String>,
        params: Params,
        lhs: &T,
        relation: Relation,
        rhs: &T,
    ) -> Self {
        let ok = relation.holds(lhs, rhs);
        Self::with_values(claim, params, lhs.to_string(), relation, rhs.to_string(), ok)
    }

    pub fn with_values(
        claim: impl Into<String>,
        params: Params,
        lhs: String,
        relation: Relation,
        rhs: String,
        pass: bool,
    ) -> Self {
        WitnessReport {
            claim: claim.into(),
            params,
            lhs,
            relation,
            rhs,
            pass: Some(pass),
            outcome: if pass { Outcome::Pass } else { Outcome::Fail },
            note: None,
        }
    }

    /// Turn an asserted row into a reported-only row.
    pub fn informational(mut self) -> Self {
        self.pass = None;
        self.outcome = Outcome::Info;
        self
    }

    pub fn skipped(claim: impl Into<String>, params: Params, reason: impl Into<String>) -> Self {
        WitnessReport {
            claim: claim.into(),
            params,
            lhs: String::new(),
            relation: Relation::Eq,
            rhs: String::new(),
            pass: None,
            outcome: Outcome::Skip,
            note: Some(reason.into()),
        }
    }

    pub fn failed(claim: impl Into<String>, params: Params, reason: impl Into<String>) -> Self {
        WitnessReport {
            claim: claim.into(),
            params,
            lhs: String::new(),
            relation: Relation::Eq,
            rhs: String::new(),
            pass: Some(false),
            outcome: Outcome::Fail,
            note: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failed_claim(&self) -> bool {
        self.outcome == Outcome::Fail
    }

    fn sort_key(&self) -> (String, String) {
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        (self.claim.clone(), params)
    }
}

/// Sorts by claim, then parameters, making report files independent of
/// evaluation order.
pub fn sort_reports(reports: &mut [WitnessReport]) {
    reports.sort_by_cached_key(|r| r.sort_key());
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub info: usize,
    pub skip: usize,
}

impl Tally {
    pub fn of(reports: &[WitnessReport]) -> Self {
        let mut t = Tally::default();
        for r in reports {
            match r.outcome {
                Outcome::Pass => t.pass += 1,
                Outcome::Fail => t.fail += 1,
                Outcome::Info => t.info += 1,
                Outcome::Skip => t.skip += 1,
            }
        }
        t
    }

    /// 0 all asserted claims pass, 1 some claim failed, 3 coverage incomplete.
    pub fn exit_code(&self) -> i32 {
        if self.fail > 0 {
            1
        } else if self.skip > 0 {
            3
        } else {
            0
        }
    }
}
