//! Checked relations with both sides recorded, shared by certificates and
//! verification reports.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// One side of a checked relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Bool(bool),
    Int(i64),
    /// Exact rational, both parts as decimal strings.
    Rational { num: String, den: String },
    Float(f64),
}

impl Quantity {
    pub fn rational(r: &BigRational) -> Self {
        if r.is_integer() {
            if let Ok(v) = i64::try_from(r.to_integer()) {
                return Quantity::Int(v);
            }
        }
        Quantity::Rational { num: r.numer().to_string(), den: r.denom().to_string() }
    }

    fn as_rational(&self) -> Option<BigRational> {
        match self {
            Quantity::Int(v) => Some(BigRational::from_integer(BigInt::from(*v))),
            Quantity::Rational { num, den } => {
                let n: BigInt = num.parse().ok()?;
                let d: BigInt = den.parse().ok()?;
                (d != BigInt::from(0)).then(|| BigRational::new(n, d))
            }
            _ => None,
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match self {
            Quantity::Int(v) => Some(*v as f64),
            Quantity::Float(v) => Some(*v),
            Quantity::Rational { .. } => {
                use num_traits::ToPrimitive;
                self.as_rational()?.to_f64()
            }
            Quantity::Bool(_) => None,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Bool(b) => write!(f, "{b}"),
            Quantity::Int(v) => write!(f, "{v}"),
            Quantity::Rational { num, den } => write!(f, "{num}/{den}"),
            Quantity::Float(v) => write!(f, "{v:.6}"),
        }
    }
}

impl From<i64> for Quantity {
    fn from(v: i64) -> Self {
        Quantity::Int(v)
    }
}

impl From<usize> for Quantity {
    fn from(v: usize) -> Self {
        Quantity::Int(v as i64)
    }
}

impl From<u64> for Quantity {
    fn from(v: u64) -> Self {
        Quantity::Int(v as i64)
    }
}

impl From<u32> for Quantity {
    fn from(v: u32) -> Self {
        Quantity::Int(v as i64)
    }
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Quantity::Float(v)
    }
}

impl From<bool> for Quantity {
    fn from(v: bool) -> Self {
        Quantity::Bool(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    fn accepts(self, ord: Ordering) -> bool {
        match self {
            Relation::Lt => ord == Ordering::Less,
            Relation::Le => ord != Ordering::Greater,
            Relation::Eq => ord == Ordering::Equal,
            Relation::Ge => ord != Ordering::Less,
            Relation::Gt => ord == Ordering::Greater,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "==",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// `lhs relation rhs`, evaluated.
///
/// Floating comparisons allow `slack` in the direction of the relation.
/// `exact` is false when a side is only a bound obtained by sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: Quantity,
    pub relation: Relation,
    pub rhs: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    pub exact: bool,
    pub holds: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: impl Into<Quantity>, relation: Relation, rhs: impl Into<Quantity>) -> Self {
        Self::build(name.into(), lhs.into(), relation, rhs.into(), None)
    }

    pub fn with_slack(
        name: impl Into<String>,
        lhs: impl Into<Quantity>,
        relation: Relation,
        rhs: impl Into<Quantity>,
        slack: f64,
    ) -> Self {
        Self::build(name.into(), lhs.into(), relation, rhs.into(), Some(slack))
    }

    /// A property that either holds or not.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self::new(name, holds, Relation::Eq, true)
    }

    /// Marks a side as a sampled bound rather than an exact value.
    pub fn inexact(mut self) -> Self {
        self.exact = false;
        self
    }

    fn build(name: String, lhs: Quantity, relation: Relation, rhs: Quantity, slack: Option<f64>) -> Self {
        let mut c = Check { name, lhs, relation, rhs, slack, exact: true, holds: false };
        c.holds = c.evaluate().unwrap_or(false);
        c
    }

    /// Recomputes the relation from the recorded sides.
    pub fn evaluate(&self) -> Option<bool> {
        if let (Quantity::Bool(a), Quantity::Bool(b)) = (&self.lhs, &self.rhs) {
            return Some(self.relation.accepts(a.cmp(b)));
        }
        if let (Some(a), Some(b)) = (self.lhs.as_rational(), self.rhs.as_rational()) {
            return Some(self.relation.accepts(a.cmp(&b)));
        }
        let (a, b) = (self.lhs.as_f64()?, self.rhs.as_f64()?);
        let slack = self.slack.unwrap_or(0.0);
        let ord = if (a - b).abs() <= slack {
            Ordering::Equal
        } else {
            a.partial_cmp(&b)?
        };
        // Within slack counts as equal, which satisfies <=, >= and == only.
        Some(self.relation.accepts(ord))
    }

    /// Whether the recorded verdict agrees with re-evaluation.
    pub fn is_consistent(&self) -> bool {
        self.evaluate() == Some(self.holds)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} {} {}{}",
            if self.holds { "PASS" } else { "FAIL" },
            self.name,
            self.lhs,
            self.relation.symbol(),
            self.rhs,
            if self.exact { "" } else { " (sampled)" }
        )
    }
}

/// A named list of checks; it holds iff every check holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.name, if self.holds() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_rational_sides() {
        let nine_eighths = BigRational::new(9.into(), 8.into());
        assert!(Check::new("x", 1i64, Relation::Le, Quantity::rational(&nine_eighths)).holds);
        assert!(!Check::new("x", 2i64, Relation::Le, Quantity::rational(&nine_eighths)).holds);
        assert_eq!(Quantity::rational(&BigRational::from_integer(2.into())), Quantity::Int(2));
    }

    #[test]
    fn float_slack() {
        assert!(Check::with_slack("x", 1.0, Relation::Ge, 1.0 + 1e-13, 1e-12).holds);
        assert!(!Check::new("x", 1.0, Relation::Ge, 1.0 + 1e-13).holds);
        assert!(!Check::with_slack("x", 1.0, Relation::Gt, 1.0 + 1e-13, 1e-12).holds);
    }

    #[test]
    fn serde_round_trip_keeps_verdict() {
        let c = Check::new("d <= bound", 6usize, Relation::Le, 6usize);
        let back: Check = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(back.is_consistent());
        assert_eq!(c.to_string(), "[PASS] d <= bound: 6 <= 6");
    }
}
