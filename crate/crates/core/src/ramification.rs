//! Exceptional and totally ramified values of a rational map on a
//! punctured sphere.

use serde::ser::{Serialize, Serializer};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::exact::{int, q, Exact, InequalityCheck, Relation, Q};
use crate::poly::Polynomial;
use crate::rational::RationalFunction;
use crate::roots::roots_with_multiplicity;
use crate::sphere::{contains_point, dedup_points, SpherePoint};

/// Minimum multiplicity over the preimages in `M`; infinite when there are none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nu {
    Finite(u32),
    Infinite,
}

impl Serialize for Nu {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Nu::Finite(n) => serializer.serialize_u32(*n),
            Nu::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RamificationKind {
    Exceptional,
    TotallyRamified,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Preimage {
    pub point: SpherePoint,
    pub multiplicity: u32,
    pub is_puncture: bool,
    /// Identified with a puncture under the point tolerance but not equal to it.
    pub snapped: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RamifiedValue {
    pub value: SpherePoint,
    pub kind: RamificationKind,
    pub nu: Nu,
    pub preimages: Vec<Preimage>,
}

/// All preimages of `a` on the sphere with multiplicities summing to `deg f`.
pub fn preimages(
    f: &RationalFunction,
    a: SpherePoint,
    tol: &Tolerances,
) -> Result<Vec<(SpherePoint, u32)>> {
    if f.is_constant() {
        return Err(Error::InvalidData("preimages of a constant map".into()));
    }
    let d = f.degree();
    let target = match a {
        SpherePoint::Infinity => f.den().clone(),
        SpherePoint::Finite(c) => {
            let eps = tol.eps_coeff;
            f.num().sub_clean(&f.den().scale(c), eps)
        }
    };
    let mut out: Vec<(SpherePoint, u32)> = if target.is_constant() {
        Vec::new()
    } else {
        roots_with_multiplicity(&target, tol)?
            .into_iter()
            .map(|r| (SpherePoint::Finite(r.value), r.multiplicity as u32))
            .collect()
    };
    let finite: usize = out.iter().map(|p| p.1 as usize).sum();
    if finite < d {
        out.push((SpherePoint::Infinity, (d - finite) as u32));
    }
    out.sort_by(|a, b| a.0.sort_key_cmp(&b.0));
    Ok(out)
}

fn classify(
    f: &RationalFunction,
    value: SpherePoint,
    punctures: &[SpherePoint],
    tol: &Tolerances,
) -> Result<Option<RamifiedValue>> {
    let pre: Vec<Preimage> = preimages(f, value, tol)?
        .into_iter()
        .map(|(point, multiplicity)| {
            let is_puncture = contains_point(punctures, &point, tol.eps_pt);
            let snapped = is_puncture && !punctures.contains(&point);
            Preimage {
                point,
                multiplicity,
                is_puncture,
                snapped,
            }
        })
        .collect();
    let inside: Vec<u32> = pre
        .iter()
        .filter(|p| !p.is_puncture)
        .map(|p| p.multiplicity)
        .collect();
    let (kind, nu) = match inside.iter().min() {
        None => (RamificationKind::Exceptional, Nu::Infinite),
        Some(&m) if m >= 2 => (RamificationKind::TotallyRamified, Nu::Finite(m)),
        Some(_) => return Ok(None),
    };
    Ok(Some(RamifiedValue {
        value,
        kind,
        nu,
        preimages: pre,
    }))
}

/// Critical points on the sphere: finite zeros of `num' den - num den'`
/// together with infinity, which is always kept as a candidate.
pub fn critical_points(f: &RationalFunction, tol: &Tolerances) -> Result<Vec<SpherePoint>> {
    let w = f
        .num()
        .derivative()
        .mul_clean(f.den(), tol.eps_coeff)
        .sub_clean(
            &f.num().mul_clean(&f.den().derivative(), tol.eps_coeff),
            tol.eps_coeff,
        );
    let mut out: Vec<SpherePoint> = if w.is_constant() {
        Vec::new()
    } else {
        roots_with_multiplicity(&w, tol)?
            .into_iter()
            .map(|r| SpherePoint::Finite(r.value))
            .collect()
    };
    out.push(SpherePoint::Infinity);
    Ok(out)
}

/// Distinct images of the critical points.
pub fn critical_values(f: &RationalFunction, tol: &Tolerances) -> Result<Vec<SpherePoint>> {
    let mut vals = Vec::new();
    for p in critical_points(f, tol)? {
        vals.push(f.value_at(p, tol)?);
    }
    Ok(dedup_points(&vals, tol.eps_pt))
}

fn sorted_values(mut v: Vec<RamifiedValue>) -> Vec<RamifiedValue> {
    v.sort_by(|a, b| a.value.sort_key_cmp(&b.value));
    v
}

/// Values all of whose preimages are punctures.
pub fn exceptional_values(
    f: &RationalFunction,
    punctures: &[SpherePoint],
    tol: &Tolerances,
) -> Result<Vec<RamifiedValue>> {
    let mut candidates = Vec::new();
    for &p in punctures {
        candidates.push(f.value_at(p, tol)?);
    }
    let mut out = Vec::new();
    for v in dedup_points(&candidates, tol.eps_pt) {
        if let Some(r) = classify(f, v, punctures, tol)? {
            if r.kind == RamificationKind::Exceptional {
                out.push(r);
            }
        }
    }
    Ok(sorted_values(out))
}

/// Exceptional values and values at all of whose preimages in `M` the map
/// branches.
///
/// Only critical values and images of punctures can qualify: any other value
/// has `deg f` simple preimages, none of them a puncture.
pub fn totally_ramified_values(
    f: &RationalFunction,
    punctures: &[SpherePoint],
    tol: &Tolerances,
) -> Result<Vec<RamifiedValue>> {
    let mut candidates = critical_values(f, tol)?;
    for &p in punctures {
        candidates.push(f.value_at(p, tol)?);
    }
    let mut out = Vec::new();
    for v in dedup_points(&candidates, tol.eps_pt) {
        if let Some(r) = classify(f, v, punctures, tol)? {
            out.push(r);
        }
    }
    Ok(sorted_values(out))
}

/// Critical values closer than this are taken to be one fiber.
const CRITICAL_VALUE_MERGE: f64 = 1e-6;
/// Ramification points of one merged fiber closer than this are one point.
const RAMIFICATION_POINT_MERGE: f64 = 1e-2;

/// `sum (mult - 1)` over every point of the sphere, found through the
/// preimages of the critical values.
pub fn total_branching(f: &RationalFunction, tol: &Tolerances) -> Result<u32> {
    // Images of nearby approximations of one ramification point can differ by
    // more than the point tolerance. Such values describe one fiber, and each
    // may resolve only part of its ramification points.
    let mut groups: Vec<Vec<SpherePoint>> = Vec::new();
    for v in critical_values(f, tol)? {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|w| w.approx_eq(&v, CRITICAL_VALUE_MERGE)))
        {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    let mut total = 0;
    for g in groups {
        let mut points: Vec<(SpherePoint, u32)> = Vec::new();
        for v in g {
            for (p, m) in preimages(f, v, tol)? {
                if m < 2 {
                    continue;
                }
                match points
                    .iter_mut()
                    .find(|q| q.0.approx_eq(&p, RAMIFICATION_POINT_MERGE))
                {
                    Some(q) => q.1 = q.1.max(m),
                    None => points.push((p, m)),
                }
            }
        }
        total += points.iter().map(|p| p.1 - 1).sum::<u32>();
    }
    Ok(total)
}

pub fn nu_number(values: &[RamifiedValue]) -> Q {
    values.iter().fold(int(0), |acc, v| match v.nu {
        Nu::Infinite => acc + int(1),
        Nu::Finite(n) => acc + int(1) - q(1, n as i64),
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RamificationReport {
    pub degree: usize,
    pub genus: u32,
    pub punctures: usize,
    pub exceptional_count: usize,
    pub ramified_count: usize,
    pub ramified: Vec<RamifiedValue>,
    pub nu_f: Exact,
    /// Branching over the exceptional values.
    pub n0: u32,
    /// Branching over the other totally ramified values.
    pub nr: u32,
    /// Total branching order, summed point by point.
    pub n1: u32,
    /// `n1 = 2d - 2`.
    pub riemann_hurwitz: bool,
    /// `k >= d r0 - n0`.
    pub exceptional_preimage_bound: InequalityCheck,
    /// `l0 - sum 1/nu_j <= nr / d`. Preimages at punctures may have lower
    /// multiplicity than `nu_j`, so this can fail on a concrete instance.
    pub ramified_preimage_bound: InequalityCheck,
    /// `nu_f <= 2 + (2G - 2 + k) / d`, evaluated when `2G - 2 + k >= 0`.
    pub fundamental_bound: Option<InequalityCheck>,
}

pub fn ramification_report(
    f: &RationalFunction,
    punctures: &[SpherePoint],
    genus: u32,
    tol: &Tolerances,
) -> Result<RamificationReport> {
    if genus != 0 {
        return Err(Error::InvalidData(
            "computed ramification requires genus 0".into(),
        ));
    }
    let d = f.degree();
    if f.is_constant() {
        return Err(Error::InvalidData("ramification of a constant map".into()));
    }
    let ramified = totally_ramified_values(f, punctures, tol)?;
    let branching = |v: &RamifiedValue| v.preimages.iter().map(|p| p.multiplicity - 1).sum::<u32>();
    let (exc, rest): (Vec<&RamifiedValue>, Vec<&RamifiedValue>) = ramified
        .iter()
        .partition(|v| v.kind == RamificationKind::Exceptional);
    let r0 = exc.len();
    let l0 = rest.len();
    let n0: u32 = exc.iter().map(|v| branching(v)).sum();
    let nr: u32 = rest.iter().map(|v| branching(v)).sum();
    let n1 = total_branching(f, tol)?;
    let k = punctures.len() as i64;
    let di = d as i64;

    let inv_sum = rest.iter().fold(int(0), |acc, v| match v.nu {
        Nu::Finite(n) => acc + q(1, n as i64),
        Nu::Infinite => acc,
    });
    let chi = 2 * genus as i64 - 2 + k;
    let nu_f = nu_number(&ramified);
    Ok(RamificationReport {
        degree: d,
        genus,
        punctures: punctures.len(),
        exceptional_count: r0,
        ramified_count: l0,
        nu_f: Exact(nu_f),
        n0,
        nr,
        n1,
        riemann_hurwitz: n1 as i64 == 2 * di - 2,
        exceptional_preimage_bound: InequalityCheck::new(
            int(k),
            Relation::Ge,
            int(di * r0 as i64 - n0 as i64),
        ),
        ramified_preimage_bound: InequalityCheck::new(
            int(l0 as i64) - inv_sum,
            Relation::Le,
            q(nr as i64, di),
        ),
        fundamental_bound: (chi >= 0)
            .then(|| InequalityCheck::new(nu_f, Relation::Le, int(2) + q(chi, di))),
        ramified,
    })
}

/// Number of distinct roots of `num - a den` with `a` chosen generic; used by
/// tests as an independent degree count.
pub fn generic_fiber_size(
    f: &RationalFunction,
    a: num_complex::Complex64,
    tol: &Tolerances,
) -> Result<usize> {
    let p: Polynomial = f.num().sub_clean(&f.den().scale(a), tol.eps_coeff);
    let finite = roots_with_multiplicity(&p, tol)?.len();
    Ok(finite + usize::from(p.degree_or_zero() < f.degree()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use num_complex::Complex64;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn f(s: &str) -> RationalFunction {
        parse_expression(s).unwrap()
    }

    fn fin(re: f64) -> SpherePoint {
        SpherePoint::finite(re, 0.0)
    }

    const INF: SpherePoint = SpherePoint::Infinity;

    #[test]
    fn preimage_examples() {
        assert_eq!(
            preimages(&f("z^2"), fin(0.0), &t()).unwrap(),
            vec![(fin(0.0), 2)]
        );
        let p = preimages(&f("z^2"), fin(4.0), &t()).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p[0].0.approx_eq(&fin(-2.0), 1e-12) && p[1].0.approx_eq(&fin(2.0), 1e-12));
        let p = preimages(&f("(z-1)^2/(z+2)"), INF, &t()).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p[0].0.approx_eq(&fin(-2.0), 1e-12));
        assert_eq!(p[1], (INF, 1));
        assert!(preimages(&f("3"), fin(3.0), &t()).is_err());
    }

    #[test]
    fn exceptional_examples() {
        let punct = [fin(1.0), fin(2.0), fin(3.0), INF];
        let e = exceptional_values(&f("z"), &punct, &t()).unwrap();
        let vals: Vec<SpherePoint> = e.iter().map(|v| v.value).collect();
        assert_eq!(vals, punct.to_vec());
        let e = exceptional_values(&f("z"), &[fin(0.0), fin(2.0)], &t()).unwrap();
        assert_eq!(
            e.iter().map(|v| v.value).collect::<Vec<_>>(),
            vec![fin(0.0), fin(2.0)]
        );
        assert!(exceptional_values(&f("z^2"), &[], &t()).unwrap().is_empty());
    }

    #[test]
    fn totally_ramified_examples() {
        let r = totally_ramified_values(&f("z^2"), &[], &t()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r
            .iter()
            .all(|v| v.nu == Nu::Finite(2) && v.kind == RamificationKind::TotallyRamified));
        assert_eq!(nu_number(&r), int(1));

        let r = totally_ramified_values(&f("z^2"), &[fin(0.0), INF], &t()).unwrap();
        assert!(r.iter().all(|v| v.kind == RamificationKind::Exceptional));
        assert_eq!(nu_number(&r), int(2));

        assert!(totally_ramified_values(&f("z"), &[], &t())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn report_examples() {
        let rep =
            ramification_report(&f("z"), &[fin(1.0), fin(2.0), fin(3.0), INF], 0, &t()).unwrap();
        assert_eq!((rep.degree, rep.exceptional_count, rep.n1), (1, 4, 0));
        assert_eq!(rep.nu_f.0, int(4));
        assert!(rep.exceptional_preimage_bound.holds);
        assert!(rep.exceptional_preimage_bound.sharp);

        let rep = ramification_report(&f("z"), &[fin(0.0), fin(1.0), INF], 0, &t()).unwrap();
        assert_eq!(rep.nu_f.0, int(3));

        let g = f("(z^5 + 0.3*z^2 - 2)/(z^4 - 1.7i*z + 0.4)");
        let rep = ramification_report(&g, &[], 0, &t()).unwrap();
        assert_eq!(rep.degree, 5);
        assert_eq!(rep.n1, 8);
        assert!(rep.riemann_hurwitz);

        assert!(ramification_report(&f("z"), &[], 1, &t()).is_err());
    }

    #[test]
    fn branching_with_poles_and_infinity() {
        // double pole at 0, critical point at infinity of order 2
        let g = f("(z^3+1)/z^2");
        assert_eq!(total_branching(&g, &t()).unwrap(), 4);
        assert_eq!(
            generic_fiber_size(&g, Complex64::new(0.37, 1.1), &t()).unwrap(),
            3
        );
    }
}
