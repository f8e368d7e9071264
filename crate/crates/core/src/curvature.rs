//! Gauss curvature and total curvature of the surface.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::rational::{Moebius, RationalFunction};
use crate::sphere::SpherePoint;
use crate::weierstrass::{compute_periods, phi_from_data, WeierstrassData};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvatureSample {
    pub z: [f64; 2],
    #[serde(rename = "K")]
    pub k: f64,
    /// `lambda^2`: area element per `|dz|^2`.
    pub area_density: f64,
}

/// `|g'|^2 / (1 + |g|^2)^2`, the pullback of the spherical area density.
///
/// Where `|g| > 1` the same expression is evaluated through `1/g`, which
/// keeps it finite at and near the poles of `g`.
#[derive(Debug, Clone)]
pub struct SphericalDensity {
    g: RationalFunction,
    dg: RationalFunction,
    inv: Option<(RationalFunction, RationalFunction)>,
    constant: bool,
}

impl SphericalDensity {
    pub fn new(g: &RationalFunction) -> Self {
        let constant = g.is_constant();
        let inv = if g.is_zero() {
            None
        } else {
            g.recip().ok().map(|r| {
                let dr = r.derivative();
                (r, dr)
            })
        };
        Self {
            g: g.clone(),
            dg: g.derivative(),
            inv,
            constant,
        }
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        if self.constant {
            return 0.0;
        }
        let direct = self.g.eval(z).filter(|v| v.norm() <= 1.0);
        let (v, dv) = match (direct, &self.inv) {
            (Some(v), _) => (v, self.dg.eval(z)),
            (None, Some((r, dr))) => match r.eval(z) {
                Some(v) => (v, dr.eval(z)),
                None => (Complex64::new(0.0, 0.0), dr.eval(z)),
            },
            (None, None) => return 0.0,
        };
        match dv {
            Some(dv) => {
                let q = 1.0 + v.norm_sqr();
                dv.norm_sqr() / (q * q)
            }
            None => 0.0,
        }
    }
}

/// Gauss curvature `K(z) <= 0` at a regular point.
pub fn gauss_curvature(d: &WeierstrassData, z: Complex64, tol: &Tolerances) -> Result<f64> {
    Ok(curvature_sample(d, z, tol)?.k)
}

pub fn curvature_sample(
    d: &WeierstrassData,
    z: Complex64,
    tol: &Tolerances,
) -> Result<CurvatureSample> {
    let p = SpherePoint::Finite(z);
    if d.is_puncture(&p, tol) {
        return Err(Error::SingularPoint(p));
    }
    let phi = phi_from_data(d);
    let v = phi.eval(z).ok_or(Error::SingularPoint(p))?;
    // |h|^2 (1+|g1|^2)(1+|g2|^2) = 2 sum |phi_i|^2
    let full = 2.0 * v.iter().map(|x| x.norm_sqr()).sum::<f64>();
    if full == 0.0 {
        return Err(Error::BranchPoint(z));
    }
    let s = SphericalDensity::new(&d.g1).eval(z) + SphericalDensity::new(&d.g2).eval(z);
    let k = -2.0 * s / full;
    Ok(CurvatureSample {
        z: [z.re, z.im],
        k: if k == 0.0 { 0.0 } else { k },
        area_density: full / 8.0,
    })
}

/// Which coordinate a density is integrated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// The coordinate `z`.
    Z,
    /// The coordinate `w = 1/z`.
    W,
}

const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

const INITIAL_RADIAL: usize = 4;
const INITIAL_ANGULAR: usize = 16;
const MAX_CELLS: usize = 400_000;

#[derive(Debug, Clone, Copy)]
struct Cell {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
}

impl Cell {
    fn children(&self) -> [Cell; 4] {
        let rm = 0.5 * (self.r0 + self.r1);
        let tm = 0.5 * (self.t0 + self.t1);
        [
            Cell {
                r0: self.r0,
                r1: rm,
                t0: self.t0,
                t1: tm,
            },
            Cell {
                r0: rm,
                r1: self.r1,
                t0: self.t0,
                t1: tm,
            },
            Cell {
                r0: self.r0,
                r1: rm,
                t0: tm,
                t1: self.t1,
            },
            Cell {
                r0: rm,
                r1: self.r1,
                t0: tm,
                t1: self.t1,
            },
        ]
    }
}

fn gl_cell(f: &dyn Fn(Complex64) -> f64, c: &Cell) -> f64 {
    let hr = 0.5 * (c.r1 - c.r0);
    let ht = 0.5 * (c.t1 - c.t0);
    let mr = 0.5 * (c.r1 + c.r0);
    let mt = 0.5 * (c.t1 + c.t0);
    let mut acc = 0.0;
    for (xr, wr) in GL4_X.iter().zip(GL4_W) {
        let r = mr + hr * xr;
        for (xt, wt) in GL4_X.iter().zip(GL4_W) {
            let t = mt + ht * xt;
            acc += wr * wt * f(Complex64::from_polar(r, t)) * r;
        }
    }
    acc * hr * ht
}

struct Pending {
    err: f64,
    index: usize,
    cell: Cell,
    fine: f64,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.index.cmp(&self.index))
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Adaptive integral of `f` over the annulus `r_in <= |z| <= r_out` in polar
/// cells. Each cell compares a 4x4 Gauss rule against the same rule on its
/// four dyadic children; the cell with the largest discrepancy is split
/// until the summed discrepancy drops below `rel` of the total.
pub fn integrate_annulus(
    f: &dyn Fn(Complex64) -> f64,
    r_in: f64,
    r_out: f64,
    rel: f64,
) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let mut next_index = 0usize;
    // running sums of the pending estimates and discrepancies
    let mut total = 0.0f64;
    let mut err = 0.0f64;
    let mut push = |heap: &mut BinaryHeap<Pending>, total: &mut f64, err: &mut f64, cell: Cell| {
        let coarse = gl_cell(f, &cell);
        let fine: f64 = cell.children().iter().map(|c| gl_cell(f, c)).sum();
        let e = (fine - coarse).abs();
        *total += fine;
        *err += e;
        heap.push(Pending {
            err: e,
            index: next_index,
            cell,
            fine,
        });
        next_index += 1;
    };
    let dr = (r_out - r_in) / INITIAL_RADIAL as f64;
    let dt = TAU / INITIAL_ANGULAR as f64;
    for i in 0..INITIAL_RADIAL {
        for j in 0..INITIAL_ANGULAR {
            let cell = Cell {
                r0: r_in + dr * i as f64,
                r1: r_in + dr * (i + 1) as f64,
                t0: dt * j as f64,
                t1: dt * (j + 1) as f64,
            };
            push(&mut heap, &mut total, &mut err, cell);
        }
    }
    loop {
        if err <= rel * total.abs() || err <= f64::EPSILON * 16.0 {
            let mut parts: Vec<(usize, f64)> = heap.iter().map(|p| (p.index, p.fine)).collect();
            parts.sort_by_key(|p| p.0);
            let values: Vec<f64> = parts.into_iter().map(|p| p.1).collect();
            return Ok(pairwise_sum(&values));
        }
        if heap.len() >= MAX_CELLS {
            return Err(Error::QuadratureDiverged(format!(
                "{} cells, estimated error {err:.3e} against total {total:.3e}",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        total -= worst.fine;
        err -= worst.err;
        for child in worst.cell.children() {
            push(&mut heap, &mut total, &mut err, child);
        }
    }
}

/// `int 2 |g'|^2 / (1+|g|^2)^2 |dz|^2` over an annulus `r_in <= |z| <= r_out`
/// given in `z`, evaluated in the requested chart.
pub fn spherical_area_on_annulus(
    g: &RationalFunction,
    r_in: f64,
    r_out: f64,
    chart: Chart,
    rel: f64,
) -> Result<f64> {
    let (func, a, b) = match chart {
        Chart::Z => (g.clone(), r_in, r_out),
        Chart::W => {
            let gw = g.substitute_moebius(&Moebius::inversion())?;
            let a = if r_out.is_infinite() {
                0.0
            } else {
                1.0 / r_out
            };
            (gw, a, 1.0 / r_in)
        }
    };
    let density = SphericalDensity::new(&func);
    if density.constant {
        return Ok(0.0);
    }
    integrate_annulus(&|z| 2.0 * density.eval(z), a, b, rel)
}

/// `tau(M)` by two-chart adaptive quadrature: the unit disk in `z` and the
/// unit disk in `w = 1/z`.
pub fn total_curvature_quadrature(d: &WeierstrassData, tol: &Tolerances) -> Result<f64> {
    let mut total = 0.0;
    for g in [&d.g1, &d.g2] {
        if g.is_constant() {
            continue;
        }
        total += spherical_area_on_annulus(g, 0.0, 1.0, Chart::Z, tol.quad_rel)?;
        total += spherical_area_on_annulus(g, 1.0, f64::INFINITY, Chart::W, tol.quad_rel)?;
    }
    Ok(-total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceCurvature {
    /// The periods close and the surface lives on the punctured sphere.
    Finite,
    /// The periods do not close: the surface lives on the universal cover
    /// and its total curvature is infinite.
    InfiniteUniversalCover,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormCurvature {
    pub d1: usize,
    pub d2: usize,
    /// `-2 pi (d1 + d2)`: the integral over the basic domain.
    pub basic_domain: f64,
    pub surface_level: SurfaceCurvature,
    /// Equal to `basic_domain` when finite, `None` when infinite.
    pub surface_value: Option<f64>,
}

pub fn total_curvature_closed_form(
    d: &WeierstrassData,
    tol: &Tolerances,
) -> Result<ClosedFormCurvature> {
    let d1 = d.g1.degree();
    let d2 = d.g2.degree();
    let basic_domain = -2.0 * PI * (d1 + d2) as f64;
    let period_ok = compute_periods(d, tol)?.period_ok;
    let (surface_level, surface_value) = if period_ok {
        (SurfaceCurvature::Finite, Some(basic_domain))
    } else {
        (SurfaceCurvature::InfiniteUniversalCover, None)
    };
    Ok(ClosedFormCurvature {
        d1,
        d2,
        basic_domain,
        surface_level,
        surface_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn data(h: &str, g1: &str, g2: &str, punctures: Vec<SpherePoint>) -> WeierstrassData {
        WeierstrassData::new(
            parse_expression(h).unwrap(),
            parse_expression(g1).unwrap(),
            parse_expression(g2).unwrap(),
            punctures,
            &t(),
        )
        .unwrap()
    }

    #[test]
    fn pointwise_curvature() {
        let d = data("1", "z", "z", vec![SpherePoint::Infinity]);
        assert!((gauss_curvature(&d, Complex64::new(0.0, 0.0), &t()).unwrap() + 4.0).abs() < 1e-15);
        let d = data("1", "z", "0", vec![SpherePoint::Infinity]);
        assert!((gauss_curvature(&d, Complex64::new(0.0, 0.0), &t()).unwrap() + 2.0).abs() < 1e-15);
        let d = data(
            "1/z",
            "3",
            "0.5i",
            vec![SpherePoint::finite(0.0, 0.0), SpherePoint::Infinity],
        );
        assert_eq!(
            gauss_curvature(&d, Complex64::new(0.3, 0.1), &t()).unwrap(),
            0.0
        );
        assert!(gauss_curvature(&d, Complex64::new(0.0, 0.0), &t()).is_err());
    }

    #[test]
    fn density_is_smooth_across_poles() {
        let s = SphericalDensity::new(&parse_expression("1/z").unwrap());
        // 1/z and z have the same spherical density
        let s2 = SphericalDensity::new(&parse_expression("z").unwrap());
        for z in [
            Complex64::new(0.0, 0.0),
            Complex64::new(1e-9, 0.0),
            Complex64::new(2.0, 1.0),
        ] {
            assert!((s.eval(z) - s2.eval(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_matches_degree_count() {
        for (g1, g2, deg) in [("z", "0", 1), ("z", "z", 2), ("z^2", "(z^2+1)/(z-1)", 4)] {
            let d = data("1", g1, g2, vec![SpherePoint::Infinity]);
            let tau = total_curvature_quadrature(&d, &t()).unwrap();
            let oracle = -TAU * deg as f64;
            assert!(
                ((tau - oracle) / oracle).abs() < 0.01,
                "{g1},{g2}: {tau} vs {oracle}"
            );
        }
    }

    #[test]
    fn charts_agree_on_annulus() {
        let g = parse_expression("(z^2+1)/(z-1)").unwrap();
        let a = spherical_area_on_annulus(&g, 0.5, 2.0, Chart::Z, 1e-6).unwrap();
        let b = spherical_area_on_annulus(&g, 0.5, 2.0, Chart::W, 1e-6).unwrap();
        assert!((a - b).abs() < 1e-5 * a, "{a} vs {b}");
    }

    #[test]
    fn closed_form_flags() {
        let d = data(
            "1/((z-1)*(z-2)*(z-3))",
            "z",
            "z",
            vec![
                SpherePoint::finite(1.0, 0.0),
                SpherePoint::finite(2.0, 0.0),
                SpherePoint::finite(3.0, 0.0),
                SpherePoint::Infinity,
            ],
        );
        let c = total_curvature_closed_form(&d, &t()).unwrap();
        assert!((c.basic_domain + 4.0 * PI).abs() < 1e-12);
        assert_eq!(c.surface_level, SurfaceCurvature::InfiniteUniversalCover);
        let d = data(
            "1/z^3",
            "z",
            "2",
            vec![SpherePoint::finite(0.0, 0.0), SpherePoint::Infinity],
        );
        let c = total_curvature_closed_form(&d, &t()).unwrap();
        assert_eq!(c.surface_value, Some(-TAU));
        let d = data("1", "1", "0", vec![SpherePoint::Infinity]);
        assert_eq!(
            total_curvature_closed_form(&d, &t()).unwrap().basic_domain,
            0.0
        );
    }
}
