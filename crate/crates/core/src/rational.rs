//! Rational functions on the Riemann sphere.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::AlgebraError;
use crate::poly::{default_eps_coeff, series_div, Polynomial};
use crate::roots::{polish_multiple_root, roots_with_multiplicity, Root};
use crate::sphere::SpherePoint;

/// A point of the sphere with a nonzero order (positive for zeros).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivisorEntry {
    pub point: SpherePoint,
    pub order: i64,
}

/// `w -> (a w + b) / (c w + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Moebius {
    pub fn new(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, AlgebraError> {
        let m = Self { a, b, c, d };
        let scale = (a.norm() * d.norm()).max(b.norm() * c.norm());
        if m.det().norm() <= 1e-14 * scale || m.det().is_zero() {
            return Err(AlgebraError::DegenerateMoebius);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            a: one,
            b: Complex64::zero(),
            c: Complex64::zero(),
            d: one,
        }
    }

    /// `w -> 1/w`
    pub fn inversion() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            a: Complex64::zero(),
            b: one,
            c: one,
            d: Complex64::zero(),
        }
    }

    /// Rotation of the sphere: `(a w + b) / (-conj(b) w + conj(a))` with `|a|^2 + |b|^2 = 1`.
    pub fn rotation(a: Complex64, b: Complex64) -> Self {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        Self {
            a,
            b,
            c: -b.conj(),
            d: a.conj(),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Infinity => {
                if self.c.is_zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(w) => {
                let den = self.c * w + self.d;
                if den.is_zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.a * w + self.b) / den)
                }
            }
        }
    }
}

/// `num / den` with `den` monic and `gcd(num, den) = 1` up to tolerance.
#[derive(Clone)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    zeros: OnceLock<Result<Vec<Root>, AlgebraError>>,
    poles: OnceLock<Result<Vec<Root>, AlgebraError>>,
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RationalFunction({})",
            crate::expr::format_expression(self)
        )
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::format_expression(self))
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::raw(p, Polynomial::one())
    }
}

impl RationalFunction {
    fn raw(num: Polynomial, den: Polynomial) -> Self {
        Self {
            num,
            den,
            zeros: OnceLock::new(),
            poles: OnceLock::new(),
        }
    }

    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        Self::new_with(num, den, &Tolerances::default())
    }

    /// Reduces to canonical form: common factors removed by approximate gcd,
    /// denominator made monic.
    pub fn new_with(
        num: Polynomial,
        den: Polynomial,
        tol: &Tolerances,
    ) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDivisor);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (mut num, mut den) = (num, den);
        if !den.is_constant() && !num.is_constant() {
            let g = crate::poly::approx_gcd(&num, &den, tol.eps_gcd);
            if g.degree().unwrap_or(0) > 0 {
                (num, den) = cancel_common_factor(num, den, &g, tol);
            }
        }
        let lead = den.leading();
        let num = num.scale(lead.inv());
        let den = den.monic();
        Ok(Self::raw(num, den))
    }

    pub fn zero() -> Self {
        Self::raw(Polynomial::zero(), Polynomial::one())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::raw(Polynomial::constant(c), Polynomial::one())
    }

    pub fn z() -> Self {
        Self::raw(Polynomial::z(), Polynomial::one())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Degree as a self-map of the sphere: `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        self.num.degree_or_zero().max(self.den.degree_or_zero())
    }

    /// Largest coefficient magnitude in numerator and denominator.
    pub fn coefficient_scale(&self) -> f64 {
        self.num.max_abs().max(self.den.max_abs())
    }

    /// Value at a finite point, `None` at a pole.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return None;
        }
        let v = self.num.eval(z) / d;
        v.is_finite().then_some(v)
    }

    pub fn zeros(&self) -> Result<&[Root], AlgebraError> {
        self.zeros
            .get_or_init(|| {
                if self.num.is_constant() {
                    Ok(Vec::new())
                } else {
                    roots_with_multiplicity(&self.num, &Tolerances::default())
                }
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    pub fn poles(&self) -> Result<&[Root], AlgebraError> {
        self.poles
            .get_or_init(|| {
                if self.den.is_constant() {
                    Ok(Vec::new())
                } else {
                    roots_with_multiplicity(&self.den, &Tolerances::default())
                }
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    /// Value on the sphere; points within the tolerance of a pole map to infinity
    /// and points within the tolerance of a zero map to exactly 0.
    pub fn value_at(&self, p: SpherePoint, tol: &Tolerances) -> Result<SpherePoint, AlgebraError> {
        match p {
            SpherePoint::Infinity => {
                let (n, d) = (self.num.degree_or_zero(), self.den.degree_or_zero());
                if self.num.is_zero() {
                    Ok(SpherePoint::Finite(Complex64::zero()))
                } else if n > d {
                    Ok(SpherePoint::Infinity)
                } else if n == d {
                    Ok(SpherePoint::Finite(self.num.leading() / self.den.leading()))
                } else {
                    Ok(SpherePoint::Finite(Complex64::zero()))
                }
            }
            SpherePoint::Finite(z) => {
                if self.is_constant() {
                    return Ok(SpherePoint::Finite(self.num.coeff(0) / self.den.coeff(0)));
                }
                if near_any(self.poles()?, z, tol.eps_pt) {
                    return Ok(SpherePoint::Infinity);
                }
                if near_any(self.zeros()?, z, tol.eps_pt) {
                    return Ok(SpherePoint::Finite(Complex64::zero()));
                }
                Ok(self
                    .eval(z)
                    .map_or(SpherePoint::Infinity, SpherePoint::Finite))
            }
        }
    }

    /// Order of vanishing at `p` (negative for poles).
    pub fn order_at(&self, p: SpherePoint, tol: &Tolerances) -> Result<i64, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroFunction);
        }
        match p {
            SpherePoint::Infinity => {
                Ok(self.den.degree_or_zero() as i64 - self.num.degree_or_zero() as i64)
            }
            SpherePoint::Finite(z) => {
                let zeros = mult_near(self.zeros()?, z, tol.eps_pt);
                let poles = mult_near(self.poles()?, z, tol.eps_pt);
                Ok(zeros as i64 - poles as i64)
            }
        }
    }

    /// Order of the differential `f dz`; differs from [`order_at`](Self::order_at)
    /// only at infinity, where `dz` has a double pole.
    pub fn form_order_at(&self, p: SpherePoint, tol: &Tolerances) -> Result<i64, AlgebraError> {
        let o = self.order_at(p, tol)?;
        Ok(if p.is_infinite() { o - 2 } else { o })
    }

    /// Pole order at `p` (0 when `f` is finite there).
    pub fn pole_order_at(&self, p: SpherePoint, tol: &Tolerances) -> Result<u32, AlgebraError> {
        if self.is_zero() {
            return Ok(0);
        }
        Ok((-self.order_at(p, tol)?).max(0) as u32)
    }

    /// Residue of the differential `f dz` at `p`. The residue at infinity is
    /// the one that makes the residues over the whole sphere sum to zero.
    pub fn residue_at(&self, p: SpherePoint, tol: &Tolerances) -> Result<Complex64, AlgebraError> {
        if self.is_zero() {
            return Ok(Complex64::zero());
        }
        match p {
            SpherePoint::Infinity => {
                let n = self.num.degree_or_zero() as i64;
                let d = self.den.degree_or_zero() as i64;
                let idx = n - d + 1;
                if idx < 0 {
                    return Ok(Complex64::zero());
                }
                let s = series_div(
                    self.num.reversed().coeffs(),
                    self.den.reversed().coeffs(),
                    idx as usize,
                );
                Ok(-s[idx as usize])
            }
            SpherePoint::Finite(z) => {
                let poles = self.poles()?;
                let Some(pole) = poles.iter().find(|r| near(r.value, z, tol.eps_pt)) else {
                    return Ok(Complex64::zero());
                };
                let m = pole.multiplicity;
                let center = pole.value;
                let mut q = self.den.clone();
                for _ in 0..m {
                    q = q.exact_div(&Polynomial::linear(center));
                }
                let num_t = self.num.taylor_at(center);
                let den_t = q.taylor_at(center);
                let s = series_div(&num_t, &den_t, m - 1);
                Ok(s[m - 1])
            }
        }
    }

    /// Zeros and poles on the whole sphere, sorted (finite points first, by
    /// real then imaginary part; infinity last). Empty for constants.
    pub fn zeros_and_poles(&self, tol: &Tolerances) -> Result<Vec<DivisorEntry>, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroFunction);
        }
        let _ = tol;
        let mut out = Vec::new();
        for r in self.zeros()? {
            out.push(DivisorEntry {
                point: SpherePoint::Finite(r.value),
                order: r.multiplicity as i64,
            });
        }
        for r in self.poles()? {
            out.push(DivisorEntry {
                point: SpherePoint::Finite(r.value),
                order: -(r.multiplicity as i64),
            });
        }
        let at_inf = self.den.degree_or_zero() as i64 - self.num.degree_or_zero() as i64;
        if at_inf != 0 {
            out.push(DivisorEntry {
                point: SpherePoint::Infinity,
                order: at_inf,
            });
        }
        out.sort_by(|a, b| a.point.sort_key_cmp(&b.point));
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let eps = default_eps_coeff();
        if self.den == other.den {
            let num = self.num.add_clean(&other.num, eps);
            return Self::new(num, self.den.clone()).expect("nonzero denominator");
        }
        let num = self
            .num
            .mul_clean(&other.den, eps)
            .add_clean(&other.num.mul_clean(&self.den, eps), eps);
        let den = self.den.mul_clean(&other.den, eps);
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn neg(&self) -> Self {
        Self::raw(-&self.num, self.den.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let eps = default_eps_coeff();
        let num = self.num.mul_clean(&other.num, eps);
        let den = self.den.mul_clean(&other.den, eps);
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::ZeroDivisor);
        }
        let eps = default_eps_coeff();
        Self::new(
            self.num.mul_clean(&other.den, eps),
            self.den.mul_clean(&other.num, eps),
        )
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroDivisor);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::raw(self.num.scale(c), self.den.clone())
    }

    pub fn powi(&self, k: i32) -> Result<Self, AlgebraError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(Self::raw(base.num.pow(e), base.den.pow(e)))
    }

    pub fn derivative(&self) -> Self {
        let eps = default_eps_coeff();
        let num = self
            .num
            .derivative()
            .mul_clean(&self.den, eps)
            .sub_clean(&self.num.mul_clean(&self.den.derivative(), eps), eps);
        let den = self.den.mul_clean(&self.den, eps);
        Self::new(num, den).expect("nonzero denominator")
    }

    /// Post-composition `T ∘ f`; the degree is preserved.
    pub fn compose_moebius(&self, t: &Moebius) -> Result<Self, AlgebraError> {
        Moebius::new(t.a, t.b, t.c, t.d)?;
        let eps = default_eps_coeff();
        let num = self.num.scale(t.a).add_clean(&self.den.scale(t.b), eps);
        let den = self.num.scale(t.c).add_clean(&self.den.scale(t.d), eps);
        Self::new(num, den)
    }

    /// Pre-composition `f ∘ T` (a change of the domain coordinate).
    pub fn substitute_moebius(&self, t: &Moebius) -> Result<Self, AlgebraError> {
        Moebius::new(t.a, t.b, t.c, t.d)?;
        let eps = default_eps_coeff();
        let top = Polynomial::new(vec![t.b, t.a]);
        let bottom = Polynomial::new(vec![t.d, t.c]);
        let n = self.num.degree_or_zero().max(self.den.degree_or_zero());
        let homogenize = |p: &Polynomial| {
            let mut acc = Polynomial::zero();
            for (k, &c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = top
                    .pow(k as u32)
                    .mul_clean(&bottom.pow((n - k) as u32), eps)
                    .scale(c);
                acc = acc.add_clean(&term, eps);
            }
            acc
        };
        Self::new(homogenize(&self.num), homogenize(&self.den))
    }

    /// Canonical forms agree coefficientwise within `rel` of the coefficient scale.
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        self.num.approx_eq(&other.num, rel) && self.den.approx_eq(&other.den, rel)
    }
}

/// Removes the common factor `g` root by root. Each root of `g` is polished
/// separately against `num` and `den` before deflating, so neither side
/// inherits the error of the approximate gcd.
/// Relative agreement required of the polished roots of a common factor.
const COMMON_ROOT_EPS: f64 = 1e-6;

fn cancel_common_factor(
    num: Polynomial,
    den: Polynomial,
    g: &Polynomial,
    tol: &Tolerances,
) -> (Polynomial, Polynomial) {
    let Ok(roots) = roots_with_multiplicity(g, tol) else {
        return (num.exact_div(g), den.exact_div(g));
    };
    let (mut n, mut d) = (num, den);
    for r in roots {
        let rn = polish_multiple_root(&n, r.value, r.multiplicity);
        let rd = polish_multiple_root(&d, r.value, r.multiplicity);
        // a small Euclidean remainder can be accidental: keep only factors
        // that both polynomials really share
        let residual = |p: &Polynomial, z: Complex64| {
            p.eval(z).norm() / p.eval_abs(z.norm()).max(f64::MIN_POSITIVE)
        };
        if !near(rn, rd, COMMON_ROOT_EPS)
            || residual(&n, rn) > tol.eps_gcd
            || residual(&d, rd) > tol.eps_gcd
        {
            continue;
        }
        for _ in 0..r.multiplicity {
            n = n.deflate(rn);
            d = d.deflate(rd);
        }
    }
    (n, d)
}

fn near(a: Complex64, b: Complex64, eps: f64) -> bool {
    let scale = 1.0f64.max(a.norm()).max(b.norm());
    (a - b).norm() <= eps * scale
}

fn near_any(roots: &[Root], z: Complex64, eps: f64) -> bool {
    roots.iter().any(|r| near(r.value, z, eps))
}

fn mult_near(roots: &[Root], z: Complex64, eps: f64) -> usize {
    roots
        .iter()
        .filter(|r| near(r.value, z, eps))
        .map(|r| r.multiplicity)
        .sum()
}
