//! Dense complex polynomials, lowest degree first.
//!
//! Arithmetic is cancellation aware: a result coefficient whose magnitude is
//! below `eps_coeff` times the magnitude of the terms that produced it is set
//! to exactly zero. With exactly representable input data this turns the
//! usual floating point residue of an exact cancellation into a true zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::config::Tolerances;

pub(crate) fn default_eps_coeff() -> f64 {
    Tolerances::default().eps_coeff
}

#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", crate::expr::format_polynomial(self))
    }
}

impl Polynomial {
    /// Builds a polynomial from coefficients `[a0, a1, ...]`, stripping trailing zeros.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), 1)
    }

    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut v = vec![Complex64::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `z - r`
    pub fn linear(r: Complex64) -> Self {
        Self::new(vec![-r, Complex64::new(1.0, 0.0)])
    }

    /// `prod (z - r_i)^{m_i}`
    pub fn from_roots(roots: &[(Complex64, usize)]) -> Self {
        let mut p = Self::one();
        for &(r, m) in roots {
            for _ in 0..m {
                p = p.mul_clean(&Self::linear(r), 0.0);
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; handy for degree bookkeeping.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_else(Complex64::zero)
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    /// Horner evaluation of the absolute-valued polynomial at `|z|`; a bound on
    /// the magnitude of the terms summed by [`Polynomial::eval`].
    pub fn eval_abs(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lead = self.leading();
        let mut p = self.scale(lead.inv());
        if let Some(last) = p.coeffs.last_mut() {
            *last = Complex64::new(1.0, 0.0);
        }
        p
    }

    /// Scale so that the largest coefficient has magnitude one.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            Self::zero()
        } else {
            self.scale(Complex64::new(1.0 / m, 0.0))
        }
    }

    pub fn add_clean(&self, other: &Self, eps: f64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeff(k);
            let b = other.coeff(k);
            let s = a + b;
            if s.norm() <= eps * (a.norm() + b.norm()) {
                out.push(Complex64::zero());
            } else {
                out.push(s);
            }
        }
        Self::new(out)
    }

    pub fn sub_clean(&self, other: &Self, eps: f64) -> Self {
        self.add_clean(&-other, eps)
    }

    pub fn mul_clean(&self, other: &Self, eps: f64) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![Complex64::zero(); n];
        let mut mag = vec![0.0f64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
                mag[i + j] += a.norm() * b.norm();
            }
        }
        for (c, m) in out.iter_mut().zip(&mag) {
            if c.norm() <= eps * m {
                *c = Complex64::zero();
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul_clean(self, default_eps_coeff());
        }
        acc
    }

    /// Long division `self = q * divisor + r` with `deg r < deg divisor`.
    ///
    /// Remainder coefficients that cancel to within `eps` of the magnitude
    /// of the subtracted terms are zeroed.
    pub fn div_rem_clean(&self, divisor: &Self, eps: f64) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let lead_inv = divisor.leading().inv();
        let mut rem = self.coeffs.clone();
        let mut mag: Vec<f64> = rem.iter().map(|c| c.norm()).collect();
        let mut q = vec![Complex64::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = rem[k + dd] * lead_inv;
            q[k] = c;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * b;
                mag[k + j] += c.norm() * b.norm();
            }
            rem[k + dd] = Complex64::zero();
        }
        rem.truncate(dd);
        for (c, m) in rem.iter_mut().zip(&mag) {
            if c.norm() <= eps * m {
                *c = Complex64::zero();
            }
        }
        (Self::new(q), Self::new(rem))
    }

    /// Quotient of an (approximately) exact division; the remainder is dropped.
    pub fn exact_div(&self, divisor: &Self) -> Self {
        self.div_rem_clean(divisor, default_eps_coeff()).0
    }

    /// Quotient by `z - r`, remainder dropped. Deflates from the low end
    /// when `|r| > 1`, which keeps the division stable for large roots.
    pub fn deflate(&self, r: Complex64) -> Self {
        let n = match self.degree() {
            None | Some(0) => return Self::zero(),
            Some(n) => n,
        };
        let a = &self.coeffs;
        let mut q = vec![Complex64::zero(); n];
        if r.norm() <= 1.0 {
            q[n - 1] = a[n];
            for k in (1..n).rev() {
                q[k - 1] = a[k] + r * q[k];
            }
        } else {
            let rinv = r.inv();
            q[0] = -a[0] * rinv;
            for k in 1..n {
                q[k] = (q[k - 1] - a[k]) * rinv;
            }
        }
        Self::new(q)
    }

    /// Coefficients of `self(z + a)`, i.e. the Taylor coefficients at `a`.
    pub fn taylor_at(&self, a: Complex64) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = c[j + 1] * a;
                c[j] += t;
            }
        }
        c
    }

    /// `z^n * self(1/z)` for `n = deg self`: coefficient reversal.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Number of exact zero coefficients at the low end (order of vanishing at 0).
    pub fn low_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divide by `z^k` (caller guarantees the low coefficients are zero).
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    /// Multiply by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Complex64::zero(); k];
        v.extend_from_slice(&self.coeffs);
        Self::new(v)
    }

    /// Coefficientwise magnitude comparison after normalizing both sides by
    /// their largest coefficient magnitude.
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            return true;
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|k| (self.coeff(k) - other.coeff(k)).norm() <= rel * scale)
    }
}

/// Power series coefficients of `num / den` around 0, up to and including
/// `z^order`. Requires `den(0) != 0`.
pub fn series_div(num: &[Complex64], den: &[Complex64], order: usize) -> Vec<Complex64> {
    let d0 = den[0];
    let d0_inv = d0.inv();
    let mut out = vec![Complex64::zero(); order + 1];
    for k in 0..=order {
        let mut s = num.get(k).copied().unwrap_or_else(Complex64::zero);
        for j in 1..=k {
            if let Some(&dj) = den.get(j) {
                s -= dj * out[k - j];
            }
        }
        out[k] = s * d0_inv;
    }
    out
}

/// Approximate greatest common divisor by the Euclidean algorithm on
/// normalized remainders. A remainder is declared zero once its magnitude
/// falls below `eps` relative to the terms of the division step. The result
/// is monic; coprime inputs give the constant 1.
pub fn approx_gcd(a: &Polynomial, b: &Polynomial, eps: f64) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let (mut r0, mut r1) = if a.degree() >= b.degree() {
        (a.normalized(), b.normalized())
    } else {
        (b.normalized(), a.normalized())
    };
    loop {
        if r1.degree() == Some(0) {
            return Polynomial::one();
        }
        let (q, r) = r0.div_rem_clean(&r1, 0.0);
        let scale = r0.max_abs().max(q.max_abs() * r1.max_abs());
        if r.is_zero() || r.max_abs() <= eps * scale {
            return r1.monic();
        }
        r0 = r1;
        r1 = r.normalized();
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.add_clean(rhs, default_eps_coeff())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.sub_clean(rhs, default_eps_coeff())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.mul_clean(rhs, default_eps_coeff())
    }
}
