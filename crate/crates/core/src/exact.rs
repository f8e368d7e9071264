//! Exact rational numbers for inequality verdicts.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::ser::{Serialize, SerializeStruct, Serializer};

pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

pub fn int(n: i64) -> Q {
    Ratio::from_integer(n)
}

/// Serializes as `{"num": n, "den": d, "decimal": x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub Q);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Rational", 3)?;
        s.serialize_field("num", self.0.numer())?;
        s.serialize_field("den", self.0.denom())?;
        s.serialize_field("decimal", &self.0.to_f64().unwrap_or(f64::NAN))?;
        s.end()
    }
}

impl From<Q> for Exact {
    fn from(v: Q) -> Self {
        Exact(v)
    }
}

impl std::fmt::Display for Exact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
}

/// `lhs relation rhs`, evaluated exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct InequalityCheck {
    pub lhs: Exact,
    pub relation: Relation,
    pub rhs: Exact,
    pub holds: bool,
    /// Holds with equality.
    pub sharp: bool,
}

impl InequalityCheck {
    pub fn new(lhs: Q, relation: Relation, rhs: Q) -> Self {
        let holds = match relation {
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Eq => lhs == rhs,
        };
        Self {
            lhs: Exact(lhs),
            relation,
            rhs: Exact(rhs),
            holds,
            sharp: lhs == rhs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_with_decimal() {
        let v = serde_json::to_value(Exact(q(3, 2))).unwrap();
        assert_eq!(v, serde_json::json!({"num": 3, "den": 2, "decimal": 1.5}));
    }

    #[test]
    fn inequality_equality_is_sharp() {
        let c = InequalityCheck::new(int(1), Relation::Ge, q(2, 2));
        assert!(c.holds && c.sharp);
        let c = InequalityCheck::new(int(1), Relation::Gt, int(1));
        assert!(!c.holds && c.sharp);
    }
}
