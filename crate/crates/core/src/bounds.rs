//! Sharp bounds on the totally ramified value numbers of the two Gauss map
//! components, and the unicity bounds for pairs of Gauss maps sharing values.
//!
//! Every inequality is evaluated in exact rational arithmetic. A verdict of
//! `contradiction` means the hypotheses hold and a proved inequality failed,
//! which can only be an implementation bug or bad input.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::exact::{int, q, Exact, InequalityCheck, Relation, Q};
use crate::ramification::{exceptional_values, preimages, ramification_report, total_branching};
use crate::rational::{Moebius, RationalFunction};
use crate::roots::roots_with_multiplicity;
use crate::sphere::{contains_point, dedup_points, SpherePoint};
use crate::weierstrass::{
    check_conformality, check_regularity, classify_ends, compute_periods, phi_from_data,
    Complex64Ser, EndVerdict, WeierstrassData,
};

/// Seed of the random rotation used when none is given.
pub const DEFAULT_ROTATION_SEED: u64 = 20_240_611;
const MAX_ROTATION_ATTEMPTS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsCase {
    BothNonconstant,
    OneConstant,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Consistency {
    Consistent,
    Contradiction,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub conformal: bool,
    pub regular: bool,
    pub complete: bool,
    /// Every puncture is a complete end or a removable point.
    pub ends_nondegenerate: bool,
    pub non_flat: bool,
    pub period_ok: bool,
}

impl Hypotheses {
    /// Complete, regular, conformal and non-flat: the standing assumptions.
    pub fn pseudo_algebraic(&self) -> bool {
        self.conformal && self.regular && self.complete && self.non_flat
    }

    fn assumed() -> Self {
        Self {
            conformal: true,
            regular: true,
            complete: true,
            ends_nondegenerate: true,
            non_flat: true,
            period_ok: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationInfo {
    pub seed: u64,
    pub attempts: u32,
    /// `(a, b, c, d)` of the rotation applied to `g1`.
    pub g1: [Complex64Ser; 4],
    pub g2: [Complex64Ser; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub genus: u32,
    pub k: usize,
    pub chi_term: i64,
    /// `chi_term <= 0`: `R_i` undefined, limiting forms used.
    pub chi_nonpositive: bool,
    pub d1: usize,
    pub d2: usize,
    pub case: BoundsCase,
    pub r1: Option<Exact>,
    pub r2: Option<Exact>,
    pub inv_r1: Option<Exact>,
    pub inv_r2: Option<Exact>,
    pub nu_g1: Option<Exact>,
    pub nu_g2: Option<Exact>,
    pub r0_g1: Option<usize>,
    pub r0_g2: Option<usize>,
    /// Pole orders of `h dz` at the punctures as given.
    pub mu_input: Option<Vec<i64>>,
    /// Pole orders of `h dz` after the normalizing rotation.
    pub mu: Option<Vec<i64>>,
    pub rotation: Option<RotationInfo>,
    /// Periods close on `M`, so the total curvature is finite. Completeness
    /// is reported separately in `hypotheses`.
    pub algebraic: bool,
    /// `d1 + d2 = 2G - 2 + sum mu`.
    pub degree_identity: Option<InequalityCheck>,
    /// `R1 + R2 >= 1`, or `1/R1 <= 1` when `g2` is constant.
    pub ratio_bound: Option<InequalityCheck>,
    /// The strict form of `ratio_bound`, checked when every `mu_j >= 2`.
    pub ratio_bound_strict: Option<InequalityCheck>,
    /// Both `nu > 2`, so the reciprocal-sum inequality is asserted.
    pub both_nu_exceed_two: Option<bool>,
    /// `1/(nu1 - 2) + 1/(nu2 - 2) >= R1 + R2`, or `nu1 <= 2 + 1/R1`.
    pub nu_bound: Option<InequalityCheck>,
    pub hypotheses: Hypotheses,
    pub consistency: Consistency,
    pub notes: Vec<String>,
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Moebius {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (0.1..=1.0).contains(&n) {
            return Moebius::rotation(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]));
        }
    }
}

/// The rotated map has no pole at a puncture and only simple poles.
fn rotation_fits(
    g: &RationalFunction,
    t: &Moebius,
    punctures: &[SpherePoint],
    tol: &Tolerances,
) -> Result<bool> {
    let to_infinity = t.inverse().apply(SpherePoint::Infinity);
    const MARGIN: f64 = 1e-6;
    if g.is_constant() {
        let v = g.value_at(SpherePoint::Infinity, tol)?;
        return Ok(!v.approx_eq(&to_infinity, MARGIN));
    }
    for (p, m) in preimages(g, to_infinity, tol)? {
        if m != 1 || contains_point(punctures, &p, MARGIN) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn moebius_coeffs(t: &Moebius) -> [Complex64Ser; 4] {
    [t.a.into(), t.b.into(), t.c.into(), t.d.into()]
}

/// Rotate the surface so that neither Gauss map component has a pole at a
/// puncture and all their poles are simple. `g_i -> T_i o g_i` with
/// `T_i` in SU(2), and `h -> h (c1 g1 + d1)(c2 g2 + d2)`.
pub fn normalize_rotation(
    d: &WeierstrassData,
    seed: u64,
    tol: &Tolerances,
) -> Result<(WeierstrassData, RotationInfo)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ROTATION_ATTEMPTS {
        let t1 = random_rotation(&mut rng);
        let t2 = random_rotation(&mut rng);
        if !rotation_fits(&d.g1, &t1, &d.punctures, tol)?
            || !rotation_fits(&d.g2, &t2, &d.punctures, tol)?
        {
            continue;
        }
        let factor =
            |g: &RationalFunction, t: &Moebius| g.scale(t.c).add(&RationalFunction::constant(t.d));
        let h = d.h.mul(&factor(&d.g1, &t1)).mul(&factor(&d.g2, &t2));
        let rotated = WeierstrassData {
            h,
            g1: d.g1.compose_moebius(&t1)?,
            g2: d.g2.compose_moebius(&t2)?,
            punctures: d.punctures.clone(),
            genus: d.genus,
        };
        let info = RotationInfo {
            seed,
            attempts: attempt,
            g1: moebius_coeffs(&t1),
            g2: moebius_coeffs(&t2),
        };
        return Ok((rotated, info));
    }
    Err(Error::NumericalInstability(format!(
        "no admissible rotation found in {MAX_ROTATION_ATTEMPTS} attempts"
    )))
}

/// Inputs of the bounds in integer form, shared by the computed and the
/// abstract pathway.
#[derive(Debug, Clone)]
pub struct BoundsInput {
    pub genus: u32,
    pub k: usize,
    /// Degree, 0 for a constant component.
    pub d1: usize,
    pub d2: usize,
    pub nu1: Option<Q>,
    pub nu2: Option<Q>,
    pub r0: Option<(usize, usize)>,
    pub mu: Option<Vec<i64>>,
    pub algebraic: bool,
}

fn evaluate(input: &BoundsInput, hypotheses: Hypotheses, mut notes: Vec<String>) -> BoundsReport {
    let chi = 2 * input.genus as i64 - 2 + input.k as i64;
    let (d1, d2) = (input.d1 as i64, input.d2 as i64);
    let case = match (d1 > 0, d2 > 0) {
        (true, true) => BoundsCase::BothNonconstant,
        (false, false) => BoundsCase::Flat,
        _ => BoundsCase::OneConstant,
    };
    // the bounds name the nonconstant component g1
    let (nu_a, da) = if d1 == 0 && d2 > 0 {
        (input.nu2, d2)
    } else {
        (input.nu1, d1)
    };
    if d1 == 0 && d2 > 0 {
        notes.push("g1 is constant: the one-constant bounds are applied to g2".into());
    }
    let chi_nonpositive = chi <= 0;
    let ratio = |d: i64| (chi > 0).then(|| q(d, chi));
    let inv_ratio = |d: i64| (d > 0).then(|| q(chi, d));

    let degree_identity = input.mu.as_ref().map(|mu| {
        let s: i64 = mu.iter().sum();
        InequalityCheck::new(
            int(d1 + d2),
            Relation::Eq,
            int(2 * input.genus as i64 - 2 + s),
        )
    });
    let all_mu_ge_two = input
        .mu
        .as_ref()
        .is_some_and(|mu| !mu.is_empty() && mu.iter().all(|&m| m >= 2));

    let mut ratio_bound = None;
    let mut ratio_bound_strict = None;
    let mut both_nu_exceed_two = None;
    let mut nu_bound = None;
    match case {
        BoundsCase::Flat => notes.push("flat data: both components constant, no bounds".into()),
        BoundsCase::BothNonconstant => {
            if chi > 0 {
                let rsum = q(d1 + d2, chi);
                ratio_bound = Some(InequalityCheck::new(rsum, Relation::Ge, int(1)));
                if input.algebraic && all_mu_ge_two {
                    ratio_bound_strict = Some(InequalityCheck::new(rsum, Relation::Gt, int(1)));
                }
                if let (Some(n1), Some(n2)) = (input.nu1, input.nu2) {
                    let both = n1 > int(2) && n2 > int(2);
                    both_nu_exceed_two = Some(both);
                    if both {
                        let lhs = (n1 - int(2)).recip() + (n2 - int(2)).recip();
                        nu_bound = Some(InequalityCheck::new(lhs, Relation::Ge, rsum));
                    }
                }
            } else {
                notes.push(format!(
                    "2G - 2 + k = {chi} <= 0: R_i undefined, reciprocal-sum inequality skipped"
                ));
            }
        }
        BoundsCase::OneConstant => {
            if chi > 0 {
                let inv = q(chi, da);
                ratio_bound = Some(InequalityCheck::new(inv, Relation::Le, int(1)));
                if input.algebraic && all_mu_ge_two {
                    ratio_bound_strict = Some(InequalityCheck::new(inv, Relation::Lt, int(1)));
                }
                if let Some(n) = nu_a {
                    nu_bound = Some(InequalityCheck::new(n, Relation::Le, int(2) + inv));
                }
            } else {
                notes.push(format!(
                    "2G - 2 + k = {chi} <= 0: R_1 undefined, bound evaluated in the limiting form nu <= 2"
                ));
                if let Some(n) = nu_a {
                    nu_bound = Some(InequalityCheck::new(n, Relation::Le, int(2)));
                }
            }
        }
    }

    let checks = [degree_identity, ratio_bound, ratio_bound_strict, nu_bound];
    let failed = checks.iter().flatten().any(|c| !c.holds);
    let consistency = if case == BoundsCase::Flat {
        Consistency::NotApplicable
    } else if !failed {
        Consistency::Consistent
    } else if hypotheses.pseudo_algebraic() {
        Consistency::Contradiction
    } else {
        Consistency::NotApplicable
    };
    if failed && !hypotheses.pseudo_algebraic() {
        notes.push("an inequality fails but the standing hypotheses do not hold".into());
    }

    BoundsReport {
        genus: input.genus,
        k: input.k,
        chi_term: chi,
        chi_nonpositive,
        d1: input.d1,
        d2: input.d2,
        case,
        r1: ratio(d1).map(Exact),
        r2: ratio(d2).map(Exact),
        inv_r1: inv_ratio(d1).map(Exact),
        inv_r2: inv_ratio(d2).map(Exact),
        nu_g1: input.nu1.map(Exact),
        nu_g2: input.nu2.map(Exact),
        r0_g1: input.r0.map(|r| r.0),
        r0_g2: input.r0.map(|r| r.1),
        mu_input: None,
        mu: input.mu.clone(),
        rotation: None,
        algebraic: input.algebraic,
        degree_identity,
        ratio_bound,
        ratio_bound_strict,
        both_nu_exceed_two,
        nu_bound,
        hypotheses,
        consistency,
        notes,
    }
}

/// Standing hypotheses of the bounds, evaluated on concrete data.
pub fn hypotheses(d: &WeierstrassData, tol: &Tolerances) -> Result<Hypotheses> {
    let ends = classify_ends(d, tol)?;
    Ok(Hypotheses {
        conformal: check_conformality(&phi_from_data(d), tol).passed,
        regular: check_regularity(d, tol)?.passed,
        complete: ends.complete,
        ends_nondegenerate: ends
            .ends
            .iter()
            .all(|e| e.verdict != EndVerdict::Degenerate),
        non_flat: !d.is_flat(),
        period_ok: compute_periods(d, tol)?.period_ok,
    })
}

pub fn compute_bounds(d: &WeierstrassData, seed: u64, tol: &Tolerances) -> Result<BoundsReport> {
    if d.genus != 0 {
        return Err(Error::InvalidData(
            "computed bounds require genus 0; use the abstract mode".into(),
        ));
    }
    let hyp = hypotheses(d, tol)?;
    let mut notes = Vec::new();
    if !hyp.complete {
        notes.push("not every end is complete".into());
    }
    if !hyp.regular {
        notes.push("regularity fails away from the punctures".into());
    }
    let component = |g: &RationalFunction| -> Result<(usize, Option<Q>, usize)> {
        if g.is_constant() {
            return Ok((0, None, 0));
        }
        let rep = ramification_report(g, &d.punctures, 0, tol)?;
        Ok((rep.degree, Some(rep.nu_f.0), rep.exceptional_count))
    };
    let (d1, nu1, r01) = component(&d.g1)?;
    let (d2, nu2, r02) = component(&d.g2)?;

    let ends = classify_ends(d, tol)?;
    let mu_input: Vec<i64> = ends.ends.iter().map(|e| e.mu).collect();
    let (mu, rotation) = if hyp.non_flat {
        let (rot, info) = normalize_rotation(d, seed, tol)?;
        let mut mu = Vec::with_capacity(d.k());
        for &p in &d.punctures {
            mu.push(-rot.h.form_order_at(p, tol)?);
        }
        (Some(mu), Some(info))
    } else {
        (None, None)
    };
    let input = BoundsInput {
        genus: 0,
        k: d.k(),
        d1,
        d2,
        nu1,
        nu2,
        r0: Some((r01, r02)),
        mu,
        algebraic: hyp.conformal && hyp.regular && hyp.non_flat && hyp.period_ok,
    };
    let mut report = evaluate(&input, hyp, notes);
    report.mu_input = Some(mu_input);
    report.rotation = rotation;
    Ok(report)
}

/// Abstract mode: integers supplied by the user, any genus. The standing
/// hypotheses are taken as given.
pub fn compute_bounds_abstract(input: &BoundsInput) -> BoundsReport {
    let mut input = input.clone();
    let supplied_algebraic = input.algebraic;
    if let Some(mu) = &input.mu {
        input.algebraic = supplied_algebraic || (!mu.is_empty() && mu.iter().all(|&m| m >= 2));
        if mu.len() != input.k {
            let mut r = evaluate(
                &input,
                Hypotheses::assumed(),
                vec![format!(
                    "{} pole orders given for {} punctures",
                    mu.len(),
                    input.k
                )],
            );
            r.consistency = Consistency::Contradiction;
            return r;
        }
    }
    let mut non_flat = Hypotheses::assumed();
    non_flat.period_ok = input.algebraic;
    evaluate(&input, non_flat, Vec::new())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorollaryVerdict {
    Consistent,
    ConsistentSharp,
    Contradiction,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    /// Exceptional value counts must not exceed this for a non-flat surface.
    pub threshold: Option<usize>,
    pub verdict: CorollaryVerdict,
}

/// Exceptional value counts against the plane criterion that follows from
/// the bounds: more than 4 (3 if algebraic) omitted values for both
/// components, or more than 3 (2 if algebraic) for the nonconstant one.
/// Not applicable to non-conformal, irregular or flat data, or when an end
/// degenerates; removable ends are admitted as points of the surface.
pub fn corollary_check(report: &BoundsReport) -> CorollaryReport {
    let na = CorollaryReport {
        threshold: None,
        verdict: CorollaryVerdict::NotApplicable,
    };
    let h = &report.hypotheses;
    if !(h.conformal && h.regular && h.non_flat && h.ends_nondegenerate) {
        return na;
    }
    let (Some(r1), Some(r2)) = (report.r0_g1, report.r0_g2) else {
        return na;
    };
    let alg = usize::from(report.algebraic);
    let (threshold, over, at) = match report.case {
        BoundsCase::Flat => return na,
        BoundsCase::BothNonconstant => {
            let t = 4 - alg;
            (t, r1 > t && r2 > t, r1 == t && r2 == t)
        }
        BoundsCase::OneConstant => {
            let t = 3 - alg;
            let r = if report.d1 > 0 { r1 } else { r2 };
            (t, r > t, r == t)
        }
    };
    let verdict = if over {
        CorollaryVerdict::Contradiction
    } else if at {
        CorollaryVerdict::ConsistentSharp
    } else {
        CorollaryVerdict::Consistent
    };
    CorollaryReport {
        threshold: Some(threshold),
        verdict,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SharedValue {
    pub value: SpherePoint,
    /// Number of common preimage points in `M`.
    pub delta: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharedValues {
    /// The two maps agree identically; every value is shared.
    pub identical: bool,
    pub values: Vec<SharedValue>,
}

impl SharedValues {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn delta_sum(&self) -> usize {
        self.values.iter().map(|v| v.delta).sum()
    }
}

fn preimages_in_m(
    g: &RationalFunction,
    a: SpherePoint,
    punctures: &[SpherePoint],
    tol: &Tolerances,
) -> Result<Vec<SpherePoint>> {
    Ok(preimages(g, a, tol)?
        .into_iter()
        .map(|p| p.0)
        .filter(|p| !contains_point(punctures, p, tol.eps_pt))
        .collect())
}

fn same_set(a: &[SpherePoint], b: &[SpherePoint], eps: f64) -> bool {
    a.len() == b.len() && a.iter().all(|p| contains_point(b, p, eps))
}

/// Points of the sphere where `ga = gb`, common poles included.
pub fn coincidence_points(
    ga: &RationalFunction,
    gb: &RationalFunction,
    tol: &Tolerances,
) -> Result<Vec<SpherePoint>> {
    let eps = tol.eps_coeff;
    let w = ga
        .num()
        .mul_clean(gb.den(), eps)
        .sub_clean(&gb.num().mul_clean(ga.den(), eps), eps);
    let mut out: Vec<SpherePoint> = if w.is_constant() {
        Vec::new()
    } else {
        roots_with_multiplicity(&w, tol)?
            .into_iter()
            .map(|r| SpherePoint::Finite(r.value))
            .collect()
    };
    if ga
        .value_at(SpherePoint::Infinity, tol)?
        .approx_eq(&gb.value_at(SpherePoint::Infinity, tol)?, tol.eps_pt)
    {
        out.push(SpherePoint::Infinity);
    }
    Ok(out)
}

/// Values whose preimage sets in `M` agree for the two maps, as point sets.
///
/// A shared value either has an empty preimage set for both maps (it is
/// exceptional for both) or has a common preimage point, where `ga = gb`.
pub fn shared_values(
    ga: &RationalFunction,
    gb: &RationalFunction,
    punctures: &[SpherePoint],
    tol: &Tolerances,
) -> Result<SharedValues> {
    if ga.approx_eq(gb, 1e-12) {
        return Ok(SharedValues {
            identical: true,
            values: Vec::new(),
        });
    }
    if ga.is_constant() || gb.is_constant() {
        return Err(Error::InvalidData("shared values of a constant map".into()));
    }
    let mut candidates = Vec::new();
    for s in coincidence_points(ga, gb, tol)? {
        if !contains_point(punctures, &s, tol.eps_pt) {
            candidates.push(ga.value_at(s, tol)?);
        }
    }
    let exc_b: Vec<SpherePoint> = exceptional_values(gb, punctures, tol)?
        .into_iter()
        .map(|v| v.value)
        .collect();
    for v in exceptional_values(ga, punctures, tol)? {
        if contains_point(&exc_b, &v.value, tol.eps_pt) {
            candidates.push(v.value);
        }
    }
    let mut values = Vec::new();
    for a in dedup_points(&candidates, tol.eps_pt) {
        let sa = preimages_in_m(ga, a, punctures, tol)?;
        let sb = preimages_in_m(gb, a, punctures, tol)?;
        if same_set(&sa, &sb, tol.eps_pt) {
            values.push(SharedValue {
                value: a,
                delta: sa.len(),
            });
        }
    }
    values.sort_by(|a, b| a.value.sort_key_cmp(&b.value));
    Ok(SharedValues {
        identical: false,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityVerdict {
    /// The shared value counts force the maps to agree.
    ForcedIdentical,
    NotForced,
    /// The maps already agree.
    IdenticalMaps,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentUnicity {
    pub degree: usize,
    pub shared: SharedValues,
    pub count: usize,
    /// `4 + 1/R_i`.
    pub bound: Option<Exact>,
    /// `count <= 4 + 1/R_i`.
    pub count_bound: Option<InequalityCheck>,
    /// `sum delta_j <= 2 d`.
    pub delta_bound: Option<InequalityCheck>,
    /// `count * d <= sum delta_j + n1 + k`.
    pub counting_bound: Option<InequalityCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnicityReport {
    pub k: usize,
    pub chi_term: i64,
    pub case: BoundsCase,
    pub r1: Option<Exact>,
    pub r2: Option<Exact>,
    pub component1: ComponentUnicity,
    pub component2: Option<ComponentUnicity>,
    pub p: usize,
    pub q: Option<usize>,
    /// `1/(p-4) + 1/(q-4) >= R1 + R2`, evaluated when `p > 4` and `q > 4`.
    pub pair_bound: Option<InequalityCheck>,
    pub identity: IdentityVerdict,
    pub hypotheses_a: Hypotheses,
    pub hypotheses_b: Hypotheses,
    pub consistency: Consistency,
    pub notes: Vec<String>,
}

fn component_unicity(
    ga: &RationalFunction,
    gb: &RationalFunction,
    punctures: &[SpherePoint],
    chi: i64,
    tol: &Tolerances,
) -> Result<ComponentUnicity> {
    let d = ga.degree() as i64;
    let shared = shared_values(ga, gb, punctures, tol)?;
    let count = shared.count() as i64;
    let bound = (chi > 0).then(|| int(4) + q(chi, d));
    if shared.identical {
        return Ok(ComponentUnicity {
            degree: d as usize,
            shared,
            count: 0,
            bound: bound.map(Exact),
            count_bound: None,
            delta_bound: None,
            counting_bound: None,
        });
    }
    let delta = shared.delta_sum() as i64;
    let n1 = total_branching(ga, tol)? as i64;
    let k = punctures.len() as i64;
    Ok(ComponentUnicity {
        degree: d as usize,
        count: count as usize,
        bound: bound.map(Exact),
        count_bound: bound.map(|b| InequalityCheck::new(int(count), Relation::Le, b)),
        delta_bound: Some(InequalityCheck::new(int(delta), Relation::Le, int(2 * d))),
        counting_bound: Some(InequalityCheck::new(
            int(count * d),
            Relation::Le,
            int(delta + n1 + k),
        )),
        shared,
    })
}

pub fn unicity_report(
    a: &WeierstrassData,
    b: &WeierstrassData,
    tol: &Tolerances,
) -> Result<UnicityReport> {
    if a.genus != 0 || b.genus != 0 {
        return Err(Error::InvalidData(
            "computed unicity requires genus 0".into(),
        ));
    }
    if !same_set(&a.punctures, &b.punctures, tol.eps_pt) {
        return Err(Error::Hypothesis(
            "the two data sets must share the same punctures".into(),
        ));
    }
    for (i, (ga, gb)) in [(&a.g1, &b.g1), (&a.g2, &b.g2)].into_iter().enumerate() {
        if ga.degree() != gb.degree() || ga.is_constant() != gb.is_constant() {
            return Err(Error::Hypothesis(format!(
                "component {} degrees differ: {} vs {}",
                i + 1,
                ga.degree(),
                gb.degree()
            )));
        }
    }
    let hypotheses_a = hypotheses(a, tol)?;
    let hypotheses_b = hypotheses(b, tol)?;
    let mut notes = Vec::new();
    for (name, h) in [("A", &hypotheses_a), ("B", &hypotheses_b)] {
        if !h.complete {
            notes.push(format!("data {name}: not every end is complete"));
        }
        if !h.regular {
            notes.push(format!(
                "data {name}: regularity fails away from the punctures"
            ));
        }
    }
    let k = a.k();
    let chi = 2 * a.genus as i64 - 2 + k as i64;
    let punctures = &a.punctures;

    let case = match (a.g1.is_constant(), a.g2.is_constant()) {
        (false, false) => BoundsCase::BothNonconstant,
        (true, true) => BoundsCase::Flat,
        _ => BoundsCase::OneConstant,
    };
    // the nonconstant component plays the role of g1
    let (ga1, gb1, ga2, gb2) = if a.g1.is_constant() && !a.g2.is_constant() {
        notes.push("g1 is constant: components swapped".into());
        (&a.g2, &b.g2, &a.g1, &b.g1)
    } else {
        (&a.g1, &b.g1, &a.g2, &b.g2)
    };
    if case == BoundsCase::Flat {
        return Err(Error::Hypothesis("both data sets must be non-flat".into()));
    }
    let d1 = ga1.degree() as i64;
    let d2 = ga2.degree() as i64;
    let ratio = |d: i64| (chi > 0 && d > 0).then(|| Exact(q(d, chi)));

    let component1 = component_unicity(ga1, gb1, punctures, chi, tol)?;
    let component2 = match case {
        BoundsCase::BothNonconstant => Some(component_unicity(ga2, gb2, punctures, chi, tol)?),
        _ => {
            if !ga2.approx_eq(gb2, 1e-12) {
                notes.push("the constant components differ".into());
            }
            None
        }
    };
    let p = component1.count;
    let q_count = component2.as_ref().map(|c| c.count);
    let pair_bound = match (q_count, chi > 0) {
        (Some(qc), true) if p > 4 && qc > 4 => Some(InequalityCheck::new(
            q(1, p as i64 - 4) + q(1, qc as i64 - 4),
            Relation::Ge,
            q(d1 + d2, chi),
        )),
        _ => None,
    };
    let identical =
        component1.shared.identical && component2.as_ref().is_none_or(|c| c.shared.identical);
    let forced = match q_count {
        Some(qc) => p >= 7 && qc >= 7,
        None => p >= 6,
    };
    let identity = if identical {
        IdentityVerdict::IdenticalMaps
    } else if forced {
        IdentityVerdict::ForcedIdentical
    } else {
        IdentityVerdict::NotForced
    };

    let mut checks = vec![pair_bound];
    for c in std::iter::once(&component1).chain(component2.as_ref()) {
        checks.extend([c.count_bound, c.delta_bound, c.counting_bound]);
    }
    let mut failed = checks.iter().flatten().any(|c| !c.holds);
    if identity == IdentityVerdict::ForcedIdentical {
        failed = true;
        notes.push("shared value counts force identical maps, but the maps differ".into());
    }
    let hyp = hypotheses_a.pseudo_algebraic() && hypotheses_b.pseudo_algebraic();
    let consistency = if identical {
        Consistency::NotApplicable
    } else if !failed {
        Consistency::Consistent
    } else if hyp {
        Consistency::Contradiction
    } else {
        notes.push("an inequality fails but the standing hypotheses do not hold".into());
        Consistency::NotApplicable
    };

    Ok(UnicityReport {
        k,
        chi_term: chi,
        case,
        r1: ratio(d1),
        r2: ratio(d2),
        component1,
        component2,
        p,
        q: q_count,
        pair_bound,
        identity,
        hypotheses_a,
        hypotheses_b,
        consistency,
        notes,
    })
}
