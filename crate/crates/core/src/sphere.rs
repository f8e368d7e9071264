//! Points of the Riemann sphere.

use std::fmt;

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeMap, Serializer};

/// A finite complex number or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    /// Identity under the point tolerance: finite points agree when
    /// `|a - b| <= eps * max(1, |a|, |b|)`; infinity equals only infinity.
    pub fn approx_eq(&self, other: &SpherePoint, eps: f64) -> bool {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => true,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                let scale = 1.0f64.max(a.norm()).max(b.norm());
                (a - b).norm() <= eps * scale
            }
            _ => false,
        }
    }

    /// Total order used to make reports deterministic: finite points by
    /// real part then imaginary part, infinity last.
    pub fn sort_key_cmp(&self, other: &SpherePoint) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => Ordering::Equal,
            (SpherePoint::Infinity, _) => Ordering::Greater,
            (_, SpherePoint::Infinity) => Ordering::Less,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im))
            }
        }
    }

    /// Snap components that are within `eps` of an integer or of zero.
    /// Only used for presentation.
    pub fn tidy(&self, eps: f64) -> SpherePoint {
        match self {
            SpherePoint::Infinity => SpherePoint::Infinity,
            SpherePoint::Finite(z) => {
                SpherePoint::Finite(Complex64::new(tidy(z.re, eps), tidy(z.im, eps)))
            }
        }
    }
}

fn tidy(x: f64, eps: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= eps * 1.0f64.max(x.abs()) {
        if r == 0.0 {
            0.0
        } else {
            r
        }
    } else {
        x
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            SpherePoint::Infinity => serializer.serialize_str("inf"),
            SpherePoint::Finite(z) => {
                let mut m = serializer.serialize_map(Some(2))?;
                m.serialize_entry("re", &z.re)?;
                m.serialize_entry("im", &z.im)?;
                m.end()
            }
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "inf"),
            SpherePoint::Finite(z) => f.write_str(&crate::expr::format_complex(*z)),
        }
    }
}

/// Remove duplicates under the point tolerance, keeping first occurrences.
pub fn dedup_points(points: &[SpherePoint], eps: f64) -> Vec<SpherePoint> {
    let mut out: Vec<SpherePoint> = Vec::new();
    for p in points {
        if !out.iter().any(|q| q.approx_eq(p, eps)) {
            out.push(*p);
        }
    }
    out
}

/// Whether `p` is (within tolerance) one of `set`.
pub fn contains_point(set: &[SpherePoint], p: &SpherePoint, eps: f64) -> bool {
    set.iter().any(|q| q.approx_eq(p, eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_only_equals_infinity() {
        let inf = SpherePoint::Infinity;
        assert!(inf.approx_eq(&SpherePoint::Infinity, 1e-8));
        assert!(!inf.approx_eq(&SpherePoint::finite(1e300, 0.0), 1e-8));
    }

    #[test]
    fn finite_tolerance_is_relative_above_one() {
        let a = SpherePoint::finite(1e6, 0.0);
        let b = SpherePoint::finite(1e6 + 1e-3, 0.0);
        assert!(a.approx_eq(&b, 1e-8));
        let c = SpherePoint::finite(1e-9, 0.0);
        assert!(c.approx_eq(&SpherePoint::finite(0.0, 0.0), 1e-8));
        assert!(!SpherePoint::finite(1e-7, 0.0).approx_eq(&SpherePoint::finite(0.0, 0.0), 1e-8));
    }
}
