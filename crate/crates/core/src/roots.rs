//! Polynomial roots with multiplicities.
//!
//! Distinct roots come from the square-free part `q / gcd(q, q')`, whose roots
//! are simple and therefore well conditioned. Multiplicities come from the
//! recursive square-free decomposition (the multiplicity of `r` in `q` is one
//! more than its multiplicity in `gcd(q, q')`) and are cross-checked against
//! a clustering of the simultaneous-iteration approximations of `q` itself.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use num_traits::Zero;

use crate::config::Tolerances;
use crate::error::AlgebraError;
use crate::poly::{approx_gcd, Polynomial};

/// A root and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

const ABERTH_MAX_ITER: usize = 600;

/// Simultaneous Aberth-Ehrlich iteration. Returns the approximations and
/// whether every correction fell below the stopping threshold.
pub fn aberth(p: &Polynomial, max_iter: usize) -> (Vec<Complex64>, bool) {
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return (Vec::new(), true);
    }
    let p = p.monic();
    let dp = p.derivative();
    let mut z = initial_guesses(&p);
    let mut converged = false;
    for _ in 0..max_iter {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let zk = z[k];
            let pv = p.eval(zk);
            if pv.is_zero() {
                continue;
            }
            let ratio = pv / dp.eval(zk);
            let mut s = Complex64::zero();
            for (j, &zj) in z.iter().enumerate() {
                if j != k {
                    s += (zk - zj).inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let w = if denom.is_zero() || !denom.is_finite() {
                ratio
            } else {
                ratio / denom
            };
            if !w.is_finite() {
                continue;
            }
            z[k] = zk - w;
            max_step = max_step.max(w.norm() / (1.0 + zk.norm()));
        }
        if max_step <= 1e-15 {
            converged = true;
            break;
        }
    }
    let finite = z.iter().all(|v| v.is_finite());
    (z, converged && finite)
}

fn initial_guesses(p: &Polynomial) -> Vec<Complex64> {
    let n = p.degree().unwrap_or(0);
    let a = p.coeffs();
    let center = -a[n - 1] / (a[n] * n as f64);
    // Fujiwara-style radius of the shifted polynomial.
    let shifted = Polynomial::new(p.taylor_at(center));
    let sa = shifted.coeffs();
    let mut radius = 0.0f64;
    for (k, c) in sa.iter().enumerate().take(n) {
        let r = (c.norm() / sa[n].norm()).powf(1.0 / (n - k) as f64);
        radius = radius.max(r);
    }
    if radius == 0.0 || !radius.is_finite() {
        radius = 1.0;
    }
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.7;
            center + Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Eigenvalues of the companion matrix, via a complex Schur decomposition.
pub fn companion_roots(p: &Polynomial) -> Vec<Complex64> {
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    let p = p.monic();
    let a = p.coeffs();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -a[i];
    }
    Schur::new(m)
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default()
}

fn newton_polish(p: &Polynomial, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    for _ in 0..4 {
        let pv = p.eval(z);
        let dv = dp.eval(z);
        if pv.is_zero() || dv.is_zero() {
            break;
        }
        let next = z - pv / dv;
        if !next.is_finite() || p.eval(next).norm() >= pv.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Refines an approximate root of multiplicity `m` of `p` by Newton's method
/// on the `(m-1)`-th derivative, where the root is simple. Steps that move
/// further than `1e-6` relative are rejected.
pub fn polish_multiple_root(p: &Polynomial, z: Complex64, m: usize) -> Complex64 {
    let mut q = p.clone();
    for _ in 1..m {
        q = q.derivative();
    }
    if q.degree().unwrap_or(0) == 0 {
        return z;
    }
    let r = newton_polish(&q, z);
    if (r - z).norm() <= 1e-6 * 1.0f64.max(z.norm()) {
        r
    } else {
        z
    }
}

/// Roots of a polynomial assumed to have only simple roots.
pub fn simple_roots(p: &Polynomial) -> Vec<Complex64> {
    match p.degree() {
        None | Some(0) => Vec::new(),
        Some(1) => vec![-p.coeff(0) / p.coeff(1)],
        Some(2) => {
            let (a, b, c) = (p.coeff(2), p.coeff(1), p.coeff(0));
            let disc = (b * b - a * c * 4.0).sqrt();
            // Pick the sign that avoids cancellation.
            let s = if (b.conj() * disc).re >= 0.0 {
                -(b + disc)
            } else {
                -(b - disc)
            };
            if s.is_zero() {
                vec![Complex64::zero(), Complex64::zero()]
            } else {
                let r1 = s / (a * 2.0);
                let r2 = (c * 2.0) / s;
                vec![newton_polish(p, r1), newton_polish(p, r2)]
            }
        }
        Some(_) => {
            let (z, ok) = aberth(p, ABERTH_MAX_ITER);
            let z = if ok { z } else { companion_roots(p) };
            z.into_iter().map(|r| newton_polish(p, r)).collect()
        }
    }
}

fn nearest(points: &[Complex64], z: Complex64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d = (p - z).norm();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Relative size below which a Taylor coefficient at a cluster center counts
/// as vanishing.
const CLUSTER_TAYLOR_EPS: f64 = 1e-10;
const CLUSTER_RADIUS_START: f64 = 1e-2;
const CLUSTER_RADIUS_MIN: f64 = 1e-12;

/// Multiplicity `m` of the root at `c`, accepted only when the first `m`
/// Taylor coefficients vanish relative to their absolute-value bounds and
/// the `m`-th does not.
fn taylor_multiplicity_ok(q: &Polynomial, c: Complex64, m: usize) -> bool {
    let t = q.taylor_at(c);
    let abs = Polynomial::new(
        q.coeffs()
            .iter()
            .map(|a| Complex64::new(a.norm(), 0.0))
            .collect(),
    );
    let bound = abs.taylor_at(Complex64::new(c.norm(), 0.0));
    let rel = |k: usize| t[k].norm() / bound[k].re.max(f64::MIN_POSITIVE);
    (0..m).all(|k| rel(k) <= CLUSTER_TAYLOR_EPS) && m < t.len() && rel(m) > CLUSTER_TAYLOR_EPS
}

fn split_clusters(q: &Polynomial, points: &[Complex64], radius: f64, out: &mut Vec<Root>) -> bool {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &z in points {
        let near: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| {
                g.iter()
                    .any(|w| (w - z).norm() <= radius * 1.0f64.max(z.norm()))
            })
            .map(|(i, _)| i)
            .collect();
        let mut merged = vec![z];
        for &i in near.iter().rev() {
            merged.extend(groups.swap_remove(i));
        }
        groups.push(merged);
    }
    for g in groups {
        let m = g.len();
        let c = g.iter().sum::<Complex64>() / m as f64;
        let c = if m == 1 {
            newton_polish(q, c)
        } else {
            polish_multiple_root(q, c, m)
        };
        if taylor_multiplicity_ok(q, c, m) {
            out.push(Root {
                value: c,
                multiplicity: m,
            });
        } else if m == 1
            || radius / 10.0 < CLUSTER_RADIUS_MIN
            || !split_clusters(q, &g, radius / 10.0, out)
        {
            return false;
        }
    }
    true
}

/// Multiplicities from clusters of the simultaneous-iteration approximations,
/// each confirmed by a Taylor test at the cluster center. `None` when some
/// cluster cannot be confirmed at any radius.
fn clustered_roots(q: &Polynomial) -> Option<Vec<Root>> {
    let (approx, _) = aberth(q, ABERTH_MAX_ITER);
    if approx.iter().any(|z| !z.is_finite()) {
        return None;
    }
    let mut out = Vec::new();
    split_clusters(q, &approx, CLUSTER_RADIUS_START, &mut out).then_some(out)
}

/// Recursive square-free decomposition: distinct roots with multiplicities.
fn squarefree_roots(q: &Polynomial, tol: &Tolerances) -> Result<Vec<Root>, AlgebraError> {
    let n = q.degree().unwrap_or(0);
    if n == 0 {
        return Ok(Vec::new());
    }
    let g = approx_gcd(q, &q.derivative(), tol.eps_gcd);
    if g.degree() == Some(0) {
        return Ok(simple_roots(q)
            .into_iter()
            .map(|value| Root {
                value,
                multiplicity: 1,
            })
            .collect());
    }
    let sf = q.exact_div(&g);
    let distinct = simple_roots(&sf);
    if distinct.is_empty() {
        return Err(AlgebraError::NoConvergence);
    }
    let mut mult = vec![1usize; distinct.len()];
    for r in squarefree_roots(&g, tol)? {
        let i = nearest(&distinct, r.value);
        mult[i] += r.multiplicity;
    }
    if mult.iter().sum::<usize>() != n {
        return Err(AlgebraError::NoConvergence);
    }
    Ok(distinct
        .into_iter()
        .zip(mult)
        .map(|(value, multiplicity)| Root {
            value,
            multiplicity,
        })
        .collect())
}

/// Square-free decomposition, cross-checked by clustering the approximations
/// of the full polynomial.
fn gcd_roots(q: &Polynomial, tol: &Tolerances) -> Result<Vec<Root>, AlgebraError> {
    let found = squarefree_roots(q, tol)?;
    if found.iter().any(|r| r.multiplicity > 1) {
        let values: Vec<Complex64> = found.iter().map(|r| r.value).collect();
        let (approx, _) = aberth(q, ABERTH_MAX_ITER);
        let mut counts = vec![0usize; values.len()];
        for z in approx {
            counts[nearest(&values, z)] += 1;
        }
        for (r, &c) in found.iter().zip(&counts) {
            if c != r.multiplicity {
                let other = values
                    .iter()
                    .copied()
                    .filter(|v| *v != r.value)
                    .min_by(|a, b| (a - r.value).norm().total_cmp(&(b - r.value).norm()))
                    .unwrap_or(r.value);
                return Err(AlgebraError::IllConditionedCluster {
                    first: r.value,
                    second: other,
                });
            }
        }
    }

    Ok(found)
}

/// All roots of `p` with multiplicities summing to `deg p`.
///
/// Roots at the origin are split off exactly from the low-order zero
/// coefficients. Fails when the two multiplicity routes disagree or two
/// distinct roots are closer than the point tolerance.
pub fn roots_with_multiplicity(
    p: &Polynomial,
    tol: &Tolerances,
) -> Result<Vec<Root>, AlgebraError> {
    match p.degree() {
        None => return Err(AlgebraError::ZeroPolynomial),
        Some(0) => return Err(AlgebraError::ConstantPolynomial),
        _ => {}
    }
    let k0 = p.low_order();
    let q = p.shift_down(k0);
    let mut roots = Vec::new();
    if k0 > 0 {
        roots.push(Root {
            value: Complex64::zero(),
            multiplicity: k0,
        });
    }
    if q.degree().unwrap_or(0) == 0 {
        return Ok(roots);
    }
    let found = match clustered_roots(&q) {
        Some(r) => r,
        None => gcd_roots(&q, tol)?,
    };

    // Distinct roots must be distinguishable under the point tolerance.
    for (i, a) in found.iter().enumerate() {
        for b in &found[i + 1..] {
            let scale = 1.0f64.max(a.value.norm()).max(b.value.norm());
            if (a.value - b.value).norm() <= tol.eps_pt * scale {
                return Err(AlgebraError::IllConditionedCluster {
                    first: a.value,
                    second: b.value,
                });
            }
        }
    }

    let scale = q.max_abs();
    for r in &found {
        let bound = tol.eps_res * scale * (1.0 + r.value.norm()).powi(q.degree_or_zero() as i32);
        if q.eval(r.value).norm() > bound {
            return Err(AlgebraError::ResidualTooLarge { root: r.value });
        }
    }

    roots.extend(found);
    Ok(roots)
}
