//! Weierstrass data `(h dz, g1, g2)` on a punctured sphere and the
//! conditions it has to satisfy to define a minimal surface in R^4.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{Moebius, RationalFunction};
use crate::sphere::{contains_point, dedup_points, SpherePoint};

const I: Complex64 = Complex64::new(0.0, 1.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);

/// Seed for the sample points of the numeric identity checks.
const SAMPLE_SEED: u64 = 0x5eed_0f5a_3b1e;

#[derive(Debug, Clone)]
pub struct WeierstrassData {
    /// Coefficient of `dz` in the holomorphic differential `h dz`.
    pub h: RationalFunction,
    pub g1: RationalFunction,
    pub g2: RationalFunction,
    pub punctures: Vec<SpherePoint>,
    pub genus: u32,
}

impl WeierstrassData {
    pub fn new(
        h: RationalFunction,
        g1: RationalFunction,
        g2: RationalFunction,
        punctures: Vec<SpherePoint>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if h.is_zero() {
            return Err(Error::InvalidData("h must not vanish identically".into()));
        }
        if dedup_points(&punctures, tol.eps_pt).len() != punctures.len() {
            return Err(Error::InvalidData(
                "punctures must be pairwise distinct".into(),
            ));
        }
        Ok(Self {
            h,
            g1,
            g2,
            punctures,
            genus: 0,
        })
    }

    /// Number of punctures `k`.
    pub fn k(&self) -> usize {
        self.punctures.len()
    }

    pub fn is_flat(&self) -> bool {
        self.g1.is_constant() && self.g2.is_constant()
    }

    pub fn is_puncture(&self, p: &SpherePoint, tol: &Tolerances) -> bool {
        contains_point(&self.punctures, p, tol.eps_pt)
    }

    /// Scale of the data coefficients, the reference for relative thresholds.
    pub fn coefficient_scale(&self) -> f64 {
        self.h
            .coefficient_scale()
            .max(self.g1.coefficient_scale())
            .max(self.g2.coefficient_scale())
            .max(1.0)
    }

    /// The same surface in the coordinate `w` with `z = T(w)`: `h dz` is
    /// pulled back as a differential, `g1`, `g2` as functions, and the
    /// punctures are mapped by `T^{-1}`.
    pub fn reparametrize(&self, t: &Moebius, tol: &Tolerances) -> Result<Self> {
        let h_t = self.h.substitute_moebius(t)?;
        // T'(w) = det / (c w + d)^2
        let jac = RationalFunction::new(
            Polynomial::constant(t.det()),
            Polynomial::new(vec![t.d, t.c]).pow(2),
        )?;
        let h = h_t.mul(&jac);
        let g1 = self.g1.substitute_moebius(t)?;
        let g2 = self.g2.substitute_moebius(t)?;
        let inv = t.inverse();
        let punctures = self.punctures.iter().map(|p| inv.apply(*p)).collect();
        Self::new(h, g1, g2, punctures, tol)
    }

    /// Finite poles of `g1` and `g2` and finite zeros/poles of `h`, plus the
    /// punctures and infinity: every point where an order can be nonzero.
    pub fn special_points(&self, tol: &Tolerances) -> Result<Vec<SpherePoint>> {
        let mut pts: Vec<SpherePoint> = self.punctures.clone();
        for r in self.h.zeros()?.iter().chain(self.h.poles()?) {
            pts.push(SpherePoint::Finite(r.value));
        }
        for g in [&self.g1, &self.g2] {
            for r in g.poles()? {
                pts.push(SpherePoint::Finite(r.value));
            }
        }
        pts.push(SpherePoint::Infinity);
        Ok(dedup_points(&pts, tol.eps_pt))
    }
}

/// `phi_1 .. phi_4`, each implicitly multiplied by `dz`.
#[derive(Debug, Clone)]
pub struct PhiForms {
    pub phi: [RationalFunction; 4],
}

impl PhiForms {
    /// Values at a finite point; `None` if some form has a pole there.
    pub fn eval(&self, z: Complex64) -> Option<[Complex64; 4]> {
        let mut out = [Complex64::zero(); 4];
        for (o, f) in out.iter_mut().zip(&self.phi) {
            *o = f.eval(z)?;
        }
        Some(out)
    }
}

pub fn phi_from_data(d: &WeierstrassData) -> PhiForms {
    let one = RationalFunction::constant(Complex64::new(1.0, 0.0));
    let g12 = d.g1.mul(&d.g2);
    let phi1 = one.add(&g12).mul(&d.h).scale(HALF);
    let phi2 = one.sub(&g12).mul(&d.h).scale(I * 0.5);
    let phi3 = d.g1.sub(&d.g2).mul(&d.h).scale(HALF);
    let phi4 = d.g1.add(&d.g2).mul(&d.h).scale(-I * 0.5);
    PhiForms {
        phi: [phi1, phi2, phi3, phi4],
    }
}

/// Inverse of [`phi_from_data`]: `h = phi1 - i phi2`,
/// `g1 = (phi3 + i phi4) / h`, `g2 = (-phi3 + i phi4) / h`.
pub fn data_from_phi(phi: &PhiForms) -> Result<WeierstrassData> {
    let [p1, p2, p3, p4] = &phi.phi;
    let h = p1.sub(&p2.scale(I));
    if h.is_zero() {
        return Err(Error::RequiresRotation);
    }
    let g1 = p3.add(&p4.scale(I)).div(&h)?;
    let g2 = p3.neg().add(&p4.scale(I)).div(&h)?;
    Ok(WeierstrassData {
        h,
        g1,
        g2,
        punctures: Vec::new(),
        genus: 0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformalityReport {
    /// Numerator of `sum phi_i^2` cancels to the zero polynomial.
    pub symbolic_zero: bool,
    /// Largest `|sum phi_i^2| / sum |phi_i|^2` over the sample points.
    pub max_residual: f64,
    pub passed: bool,
}

fn abs_poly(p: &Polynomial) -> Polynomial {
    Polynomial::new(
        p.coeffs()
            .iter()
            .map(|c| Complex64::new(c.norm(), 0.0))
            .collect(),
    )
}

/// Symbolic and numeric check of `sum phi_i^2 = 0`.
pub fn check_conformality(phi: &PhiForms, tol: &Tolerances) -> ConformalityReport {
    // N = sum_i num_i^2 prod_{j != i} den_j^2, compared coefficientwise
    // against the same expression built from absolute values.
    let mut total = Polynomial::zero();
    let mut bound = Polynomial::zero();
    for i in 0..4 {
        let mut term = phi.phi[i].num().mul_clean(phi.phi[i].num(), 0.0);
        let mut mag = abs_poly(phi.phi[i].num()).mul_clean(&abs_poly(phi.phi[i].num()), 0.0);
        for j in 0..4 {
            if j != i {
                term = term
                    .mul_clean(phi.phi[j].den(), 0.0)
                    .mul_clean(phi.phi[j].den(), 0.0);
                let ad = abs_poly(phi.phi[j].den());
                mag = mag.mul_clean(&ad, 0.0).mul_clean(&ad, 0.0);
            }
        }
        total = total.add_clean(&term, 0.0);
        bound = bound.add_clean(&mag, 0.0);
    }
    let symbolic_zero = total
        .coeffs()
        .iter()
        .enumerate()
        .all(|(k, c)| c.norm() <= tol.eps_coeff * bound.coeff(k).re);

    let poles: Vec<Complex64> = phi
        .phi
        .iter()
        .filter_map(|f| f.poles().ok())
        .flat_map(|r| r.iter().map(|x| x.value))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut max_residual = 0.0f64;
    let mut taken = 0;
    while taken < 100 {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if poles.iter().any(|p| (p - z).norm() < 1e-3) {
            continue;
        }
        let Some(v) = phi.eval(z) else { continue };
        taken += 1;
        let s: Complex64 = v.iter().map(|x| x * x).sum();
        let n: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if n > 0.0 {
            max_residual = max_residual.max(s.norm() / n);
        }
    }
    ConformalityReport {
        symbolic_zero,
        max_residual,
        passed: symbolic_zero && max_residual < 1e-12,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityViolation {
    pub point: SpherePoint,
    /// Order of `h dz` at the point.
    pub form_order: i64,
    pub pole_order_g1: u32,
    pub pole_order_g2: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub passed: bool,
    pub violations: Vec<RegularityViolation>,
}

/// Away from the punctures the zeros of `h dz` must coincide exactly, with
/// order, with the combined poles of `g1` and `g2`, and `h dz` has no poles.
pub fn check_regularity(d: &WeierstrassData, tol: &Tolerances) -> Result<RegularityReport> {
    let mut violations = Vec::new();
    for p in d.special_points(tol)? {
        if d.is_puncture(&p, tol) {
            continue;
        }
        let form_order = d.h.form_order_at(p, tol)?;
        let pole_order_g1 = d.g1.pole_order_at(p, tol)?;
        let pole_order_g2 = d.g2.pole_order_at(p, tol)?;
        if form_order != (pole_order_g1 + pole_order_g2) as i64 {
            violations.push(RegularityViolation {
                point: p,
                form_order,
                pole_order_g1,
                pole_order_g2,
            });
        }
    }
    Ok(RegularityReport {
        passed: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndVerdict {
    CompleteEnd,
    RemovablePoint,
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct EndInfo {
    pub point: SpherePoint,
    /// Pole order of `h dz` at the puncture (`-form_order`).
    pub mu: i64,
    pub form_order: i64,
    pub pole_order_g1: u32,
    pub pole_order_g2: u32,
    /// The metric behaves like `|w|^m |dw|` near the puncture.
    pub metric_exponent: i64,
    pub verdict: EndVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct EndClassification {
    pub ends: Vec<EndInfo>,
    pub complete: bool,
}

/// Local metric exponent at each puncture; an end is complete when
/// `m <= -1`, since then every path into the puncture has infinite length.
pub fn classify_ends(d: &WeierstrassData, tol: &Tolerances) -> Result<EndClassification> {
    let mut ends = Vec::with_capacity(d.k());
    for &p in &d.punctures {
        let form_order = d.h.form_order_at(p, tol)?;
        let pole_order_g1 = d.g1.pole_order_at(p, tol)?;
        let pole_order_g2 = d.g2.pole_order_at(p, tol)?;
        let m = form_order - pole_order_g1 as i64 - pole_order_g2 as i64;
        let verdict = if m <= -1 {
            EndVerdict::CompleteEnd
        } else if m == 0 {
            EndVerdict::RemovablePoint
        } else {
            EndVerdict::Degenerate
        };
        ends.push(EndInfo {
            point: p,
            mu: -form_order,
            form_order,
            pole_order_g1,
            pole_order_g2,
            metric_exponent: m,
            verdict,
        });
    }
    let complete = ends.iter().all(|e| e.verdict == EndVerdict::CompleteEnd);
    Ok(EndClassification { ends, complete })
}

#[derive(Debug, Clone, Serialize)]
pub struct PuncturePeriods {
    pub point: SpherePoint,
    /// Residues of `phi_1 .. phi_4` at the puncture.
    pub residues: [Complex64Ser; 4],
    /// `Re(2 pi i Res)` for each form: the real period over a small loop.
    pub real_periods: [f64; 4],
    /// Contour quadrature estimate of the residues (finite punctures only).
    pub quadrature_residues: Option<[Complex64Ser; 4]>,
    pub quadrature_radius: Option<f64>,
}

/// Serializable complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complex64Ser {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex64Ser {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Complex64Ser> for Complex64 {
    fn from(z: Complex64Ser) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodReport {
    pub punctures: Vec<PuncturePeriods>,
    /// `|sum of residues|` of each form over all its poles, infinity included.
    pub residue_sums: [f64; 4],
    pub threshold: f64,
    pub period_ok: bool,
}

const CONTOUR_NODES: usize = 256;

fn contour_residue(f: &RationalFunction, center: Complex64, r: f64) -> Complex64 {
    // (1 / 2 pi i) \oint f dz = mean of f(z_k) (z_k - center) on the circle
    let mut acc = Complex64::zero();
    for k in 0..CONTOUR_NODES {
        let w = Complex64::from_polar(r, TAU * k as f64 / CONTOUR_NODES as f64);
        acc += f.eval(center + w).unwrap_or_else(Complex64::zero) * w;
    }
    acc / CONTOUR_NODES as f64
}

/// Residues of the four forms at every puncture and the resulting real periods.
///
/// On a punctured sphere the loops around the punctures generate `H_1`, so the
/// period condition is exactly `Re(2 pi i Res) = 0` at every puncture. Finite
/// punctures are cross-checked by trapezoidal quadrature on a small circle;
/// the loop around infinity is fixed by the residue sum relation.
pub fn compute_periods(d: &WeierstrassData, tol: &Tolerances) -> Result<PeriodReport> {
    let phi = phi_from_data(d);
    let threshold = tol.eps_period * d.coefficient_scale();

    let mut finite_special: Vec<Complex64> =
        d.punctures.iter().filter_map(|p| p.as_finite()).collect();
    for f in &phi.phi {
        finite_special.extend(f.poles()?.iter().map(|r| r.value));
    }

    let mut punctures = Vec::with_capacity(d.k());
    let mut ok = true;
    for &p in &d.punctures {
        let mut residues = [Complex64::zero(); 4];
        for (r, f) in residues.iter_mut().zip(&phi.phi) {
            *r = f.residue_at(p, tol)?;
        }
        let real_periods = residues.map(|r| (Complex64::new(0.0, TAU) * r).re);
        if real_periods.iter().any(|x| x.abs() > threshold) {
            ok = false;
        }
        let (quadrature_residues, quadrature_radius) = match p {
            SpherePoint::Infinity => (None, None),
            SpherePoint::Finite(c) => {
                let nearest = finite_special
                    .iter()
                    .map(|s| (s - c).norm())
                    .filter(|&dist| dist > tol.eps_pt * 1.0f64.max(c.norm()))
                    .fold(f64::INFINITY, f64::min);
                let r = if nearest.is_finite() {
                    0.5 * nearest
                } else {
                    1.0
                };
                let mut q = [Complex64::zero(); 4];
                for (i, f) in phi.phi.iter().enumerate() {
                    q[i] = contour_residue(f, c, r);
                    let diff = (q[i] - residues[i]).norm();
                    if diff > 1e-6 * 1.0f64.max(residues[i].norm()) {
                        return Err(Error::NumericalInstability(format!(
                            "residue of phi{} at {p}: exact {} vs quadrature {}",
                            i + 1,
                            residues[i],
                            q[i]
                        )));
                    }
                }
                (Some(q.map(Into::into)), Some(r))
            }
        };
        punctures.push(PuncturePeriods {
            point: p,
            residues: residues.map(Into::into),
            real_periods,
            quadrature_residues,
            quadrature_radius,
        });
    }

    let mut residue_sums = [0.0; 4];
    for (s, f) in residue_sums.iter_mut().zip(&phi.phi) {
        let mut acc = f.residue_at(SpherePoint::Infinity, tol)?;
        for r in f.poles()? {
            acc += f.residue_at(SpherePoint::Finite(r.value), tol)?;
        }
        *s = acc.norm();
    }

    Ok(PeriodReport {
        punctures,
        residue_sums,
        threshold,
        period_ok: ok,
    })
}

fn check_regular_point(d: &WeierstrassData, z: Complex64, tol: &Tolerances) -> Result<()> {
    let p = SpherePoint::Finite(z);
    if d.is_puncture(&p, tol) {
        return Err(Error::SingularPoint(p));
    }
    for f in [&d.h, &d.g1, &d.g2] {
        if f.pole_order_at(p, tol)? > 0 {
            return Err(Error::SingularPoint(p));
        }
    }
    Ok(())
}

/// `lambda^2` with `ds^2 = lambda^2 |dz|^2 = 1/4 |h|^2 (1+|g1|^2)(1+|g2|^2) |dz|^2`.
pub fn metric_factor(d: &WeierstrassData, z: Complex64, tol: &Tolerances) -> Result<f64> {
    check_regular_point(d, z, tol)?;
    let singular = || Error::SingularPoint(SpherePoint::Finite(z));
    let h = d.h.eval(z).ok_or_else(singular)?;
    let g1 = d.g1.eval(z).ok_or_else(singular)?;
    let g2 = d.g2.eval(z).ok_or_else(singular)?;
    Ok(0.25 * h.norm_sqr() * (1.0 + g1.norm_sqr()) * (1.0 + g2.norm_sqr()))
}

/// `1/2 sum |phi_i|^2`, equal to the metric factor; finite at poles of the
/// `g_i` where the data is regular.
pub fn metric_factor_from_phi(phi: &PhiForms, z: Complex64) -> Result<f64> {
    let v = phi
        .eval(z)
        .ok_or(Error::SingularPoint(SpherePoint::Finite(z)))?;
    Ok(0.5 * v.iter().map(|x| x.norm_sqr()).sum::<f64>())
}

/// The Gauss map as a point of the quadric `sum w_i^2 = 0` in P^3, scaled so
/// the component of largest modulus equals one.
pub fn quadric_embedding(phi: &PhiForms, z: Complex64) -> Result<[Complex64; 4]> {
    let v = phi
        .eval(z)
        .ok_or(Error::SingularPoint(SpherePoint::Finite(z)))?;
    let (imax, vmax) = v.iter().enumerate().fold((0, 0.0f64), |acc, (i, x)| {
        if x.norm() > acc.1 {
            (i, x.norm())
        } else {
            acc
        }
    });
    if vmax == 0.0 {
        return Err(Error::BranchPoint(z));
    }
    let pivot = v[imax];
    Ok(v.map(|x| x / pivot))
}

/// Deterministic sample points avoiding the special points of `d`.
pub fn sample_regular_points(
    d: &WeierstrassData,
    n: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<Complex64>> {
    let special: Vec<Complex64> = d
        .special_points(tol)?
        .iter()
        .filter_map(|p| p.as_finite())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if special.iter().all(|s| (s - z).norm() > 1e-2) {
            out.push(z);
        }
    }
    Ok(out)
}
