//! Numerical immersion `x(z) = Re \int_{z0}^{z} phi` on a grid, and export.

use std::collections::VecDeque;
use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::Tolerances;
use crate::curvature::gauss_curvature;
use crate::error::{Error, Result};
use crate::weierstrass::{compute_periods, phi_from_data, PhiForms, WeierstrassData};

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];
const GL4_X: [f64; 2] = [0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL4_W: [f64; 2] = [0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

const SEGMENT_REL_TOL: f64 = 1e-13;
const MAX_SEGMENT_DEPTH: u32 = 30;

/// Default exclusion radius as a fraction of the region diameter.
pub const DEFAULT_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// `re0 <= Re z <= re1`, `im0 <= Im z <= im1`.
    Rectangle {
        re0: f64,
        re1: f64,
        im0: f64,
        im1: f64,
    },
    /// `z = center + r e^{i theta}` with `r0 <= r <= r1`, `theta0 <= theta <= theta1`.
    Annulus {
        center: [f64; 2],
        r0: f64,
        r1: f64,
        theta0: f64,
        theta1: f64,
    },
}

impl Region {
    fn point(&self, s: f64, t: f64) -> Complex64 {
        match *self {
            Region::Rectangle { re0, re1, im0, im1 } => {
                Complex64::new(re0 + s * (re1 - re0), im0 + t * (im1 - im0))
            }
            Region::Annulus {
                center,
                r0,
                r1,
                theta0,
                theta1,
            } => {
                Complex64::new(center[0], center[1])
                    + Complex64::from_polar(r0 + s * (r1 - r0), theta0 + t * (theta1 - theta0))
            }
        }
    }

    fn diameter(&self) -> f64 {
        match *self {
            Region::Rectangle { re0, re1, im0, im1 } => (re1 - re0).hypot(im1 - im0),
            Region::Annulus { r1, .. } => 2.0 * r1,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Region::Rectangle { re0, re1, im0, im1 } => re1 > re0 && im1 > im0,
            Region::Annulus {
                r0,
                r1,
                theta0,
                theta1,
                ..
            } => r0 > 0.0 && r1 > r0 && theta1 > theta0 && theta1 - theta0 <= TAU + 1e-12,
        };
        if ok
            && [self.point(0.0, 0.0), self.point(1.0, 1.0)]
                .iter()
                .all(|z| z.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Mesh(format!("degenerate region {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Vertex {
    pub z: [f64; 2],
    pub x: [f64; 4],
    pub metric_factor: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// Accumulated quadrature error estimate along the integration path.
    pub error: f64,
    pub included: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceMesh {
    pub region: Region,
    /// Vertices per side along the two grid directions.
    pub resolution: [usize; 2],
    pub base_point: [f64; 2],
    pub exclusion_radius: f64,
    /// Row-major: vertex `(i, j)` is at index `j * resolution[0] + i`.
    pub vertices: Vec<Vertex>,
    /// Quads as vertex indices, counterclockwise in the parameter plane.
    pub faces: Vec<[usize; 4]>,
    pub excluded_cells: Vec<[usize; 2]>,
    pub period_ok: bool,
    /// Built although the periods do not close: the patch lives on the universal cover.
    pub universal_cover_patch: bool,
    /// Largest disagreement between the two integration orders.
    pub path_discrepancy: f64,
    /// Vertices where both orders were available and compared.
    pub path_checked: usize,
    pub path_independent: bool,
}

impl SurfaceMesh {
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.resolution[0] + i
    }

    pub fn included_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.included).count()
    }
}

fn gl_segment(
    phi: &PhiForms,
    a: Complex64,
    b: Complex64,
) -> Result<([Complex64; 4], [Complex64; 4], f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64| {
        phi.eval(mid + half * t)
            .ok_or(Error::Mesh(format!("pole on the segment {a} -> {b}")))
    };
    let mut hi = [Complex64::default(); 4];
    let mut lo = [Complex64::default(); 4];
    let mut mag = 0.0;
    for (x, w) in GL8_X.iter().zip(GL8_W) {
        for s in [-1.0, 1.0] {
            let v = eval(s * x)?;
            for i in 0..4 {
                hi[i] += v[i] * w;
                mag += v[i].norm() * w;
            }
        }
    }
    for (x, w) in GL4_X.iter().zip(GL4_W) {
        for s in [-1.0, 1.0] {
            let v = eval(s * x)?;
            for i in 0..4 {
                lo[i] += v[i] * w;
            }
        }
    }
    Ok((
        hi.map(|c| c * half),
        lo.map(|c| c * half),
        mag * half.norm(),
    ))
}

/// A vertex position with its accumulated error estimate.
type Placed = ([f64; 4], f64);

/// `Re \int_a^b phi_i dz` along the straight segment with an error estimate:
/// composite 8-point Gauss rule, bisected until the 4-point rule agrees.
pub fn integrate_segment(phi: &PhiForms, a: Complex64, b: Complex64) -> Result<([f64; 4], f64)> {
    let mut out = [0.0; 4];
    let mut err = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((s, e, depth)) = stack.pop() {
        let (hi, lo, mag) = gl_segment(phi, s, e)?;
        let diff: f64 = hi
            .iter()
            .zip(&lo)
            .map(|(h, l)| (h - l).norm())
            .fold(0.0, f64::max);
        if diff <= SEGMENT_REL_TOL * mag.max(f64::MIN_POSITIVE) || depth >= MAX_SEGMENT_DEPTH {
            if depth >= MAX_SEGMENT_DEPTH && diff > 1e-8 * mag {
                return Err(Error::QuadratureDiverged(format!("segment {a} -> {b}")));
            }
            for i in 0..4 {
                out[i] += hi[i].re;
            }
            err += diff + 4.0 * f64::EPSILON * mag;
        } else {
            let m = 0.5 * (s + e);
            // right half first so the left half is integrated first
            stack.push((m, e, depth + 1));
            stack.push((s, m, depth + 1));
        }
    }
    Ok((out, err))
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let t = if ab.norm_sqr() == 0.0 {
        0.0
    } else {
        ((p - a) * ab.conj()).re / ab.norm_sqr()
    };
    (a + ab * t.clamp(0.0, 1.0) - p).norm()
}

struct Grid {
    nu: usize,
    nv: usize,
    z: Vec<Complex64>,
}

impl Grid {
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    fn neighbors(&self, v: usize, column_first: bool) -> Vec<usize> {
        let (i, j) = (v % self.nu, v / self.nu);
        let mut along_v = Vec::new();
        let mut along_u = Vec::new();
        if j + 1 < self.nv {
            along_v.push(self.idx(i, j + 1));
        }
        if j > 0 {
            along_v.push(self.idx(i, j - 1));
        }
        if i + 1 < self.nu {
            along_u.push(self.idx(i + 1, j));
        }
        if i > 0 {
            along_u.push(self.idx(i - 1, j));
        }
        if column_first {
            along_v.extend(along_u);
            along_v
        } else {
            along_u.extend(along_v);
            along_u
        }
    }
}

/// Integration tree from `start`: first along the starting column (or row),
/// then outward along rows (or columns); unsafe edges fall back to a
/// breadth-first search over the safe ones.
fn integration_tree(
    grid: &Grid,
    start: usize,
    usable: &[bool],
    safe: &dyn Fn(usize, usize) -> bool,
    column_first: bool,
) -> Vec<Option<usize>> {
    let n = grid.z.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[start] = true;
    let (i0, j0) = (start % grid.nu, start / grid.nu);
    let mut order: Vec<(usize, usize)> = Vec::new();
    let line = |fixed_col: bool, k0: usize, len: usize, fixed: usize| -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        let at = |k: usize| {
            if fixed_col {
                grid.idx(fixed, k)
            } else {
                grid.idx(k, fixed)
            }
        };
        for k in k0 + 1..len {
            edges.push((at(k - 1), at(k)));
        }
        for k in (0..k0).rev() {
            edges.push((at(k + 1), at(k)));
        }
        edges
    };
    if column_first {
        order.extend(line(true, j0, grid.nv, i0));
        for j in 0..grid.nv {
            order.extend(line(false, i0, grid.nu, j));
        }
    } else {
        order.extend(line(false, i0, grid.nu, j0));
        for i in 0..grid.nu {
            order.extend(line(true, j0, grid.nv, i));
        }
    }
    for (a, b) in order {
        if seen[a] && !seen[b] && usable[b] && safe(a, b) {
            seen[b] = true;
            parent[b] = Some(a);
        }
    }
    // reach what the structured order missed
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| seen[v]).collect();
    while let Some(a) = queue.pop_front() {
        for b in grid.neighbors(a, column_first) {
            if !seen[b] && usable[b] && safe(a, b) {
                seen[b] = true;
                parent[b] = Some(a);
                queue.push_back(b);
            }
        }
    }
    parent
}

fn integrate_tree(
    grid: &Grid,
    phi: &PhiForms,
    start: usize,
    start_x: Placed,
    parent: &[Option<usize>],
) -> Result<Vec<Option<Placed>>> {
    let n = grid.z.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(v);
        }
    }
    let mut out: Vec<Option<Placed>> = vec![None; n];
    out[start] = Some(start_x);
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        let (xa, ea) = out[a].expect("parent integrated first");
        for &b in &children[a] {
            let (dx, e) = integrate_segment(phi, grid.z[a], grid.z[b])?;
            let mut xb = xa;
            for i in 0..4 {
                xb[i] += dx[i];
            }
            out[b] = Some((xb, ea + e));
            queue.push_back(b);
        }
    }
    Ok(out)
}

/// Builds the immersion on a `resolution[0] x resolution[1]` vertex grid.
///
/// Vertices within `exclusion_radius` of a puncture or a pole of a form are
/// excluded, as are grid edges passing that close. `x(z0) = 0`.
pub fn build_mesh(
    d: &WeierstrassData,
    region: Region,
    resolution: [usize; 2],
    z0: Complex64,
    exclusion: Option<f64>,
    tol: &Tolerances,
) -> Result<SurfaceMesh> {
    region.validate()?;
    let [nu, nv] = resolution;
    if nu < 2 || nv < 2 {
        return Err(Error::Mesh("resolution must be at least 2 x 2".into()));
    }
    let rho = exclusion.unwrap_or(DEFAULT_EXCLUSION * region.diameter());
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::Mesh("exclusion radius must be nonnegative".into()));
    }
    let phi = phi_from_data(d);
    let mut special: Vec<Complex64> = d.punctures.iter().filter_map(|p| p.as_finite()).collect();
    for f in &phi.phi {
        special.extend(f.poles()?.iter().map(|r| r.value));
    }

    let mut z = Vec::with_capacity(nu * nv);
    for j in 0..nv {
        for i in 0..nu {
            z.push(region.point(i as f64 / (nu - 1) as f64, j as f64 / (nv - 1) as f64));
        }
    }
    let grid = Grid { nu, nv, z };
    let clear = |p: Complex64| special.iter().all(|s| (s - p).norm() > rho);
    let usable: Vec<bool> = grid.z.iter().map(|&p| clear(p)).collect();
    let safe = |a: usize, b: usize| {
        special
            .iter()
            .all(|&s| segment_distance(s, grid.z[a], grid.z[b]) > rho)
    };

    if rho == 0.0 && usable.iter().any(|u| !u) {
        return Err(Error::Mesh(
            "a grid vertex is a singular point and the exclusion radius is zero".into(),
        ));
    }
    if !clear(z0) {
        return Err(Error::SingularPoint(z0.into()));
    }

    // start from the nearest vertex reachable by a safe straight segment
    let mut candidates: Vec<usize> = (0..grid.z.len()).filter(|&v| usable[v]).collect();
    candidates.sort_by(|&a, &b| {
        (grid.z[a] - z0)
            .norm()
            .total_cmp(&(grid.z[b] - z0).norm())
            .then(a.cmp(&b))
    });
    let start = candidates
        .into_iter()
        .find(|&v| {
            special
                .iter()
                .all(|&s| segment_distance(s, z0, grid.z[v]) > rho)
        })
        .ok_or_else(|| Error::Mesh("no grid vertex reachable from the base point".into()))?;
    let start_x = integrate_segment(&phi, z0, grid.z[start])?;

    let primary_tree = integration_tree(&grid, start, &usable, &safe, true);
    let primary = integrate_tree(&grid, &phi, start, start_x, &primary_tree)?;
    let alt_tree = integration_tree(&grid, start, &usable, &safe, false);
    let alternate = integrate_tree(&grid, &phi, start, start_x, &alt_tree)?;

    let mut path_discrepancy = 0.0f64;
    let mut path_checked = 0;
    let mut path_independent = true;
    for (a, b) in primary.iter().zip(&alternate) {
        if let (Some((xa, ea)), Some((xb, eb))) = (a, b) {
            let diff = xa
                .iter()
                .zip(xb)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max);
            path_discrepancy = path_discrepancy.max(diff);
            path_checked += 1;
            if diff
                > 10.0
                    * (ea + eb).max(1e-14 * (1.0 + xa.iter().map(|v| v.abs()).fold(0.0, f64::max)))
            {
                path_independent = false;
            }
        }
    }

    let mut vertices = Vec::with_capacity(grid.z.len());
    for (v, p) in grid.z.iter().enumerate() {
        let vertex = match primary[v] {
            Some((x, error)) => {
                let lambda2 = phi
                    .eval(*p)
                    .map(|w| 0.5 * w.iter().map(|c| c.norm_sqr()).sum::<f64>());
                match (lambda2, gauss_curvature(d, *p, tol)) {
                    (Some(m), Ok(k)) => Vertex {
                        z: [p.re, p.im],
                        x,
                        metric_factor: m,
                        k,
                        error,
                        included: true,
                    },
                    _ => Vertex {
                        z: [p.re, p.im],
                        x,
                        metric_factor: f64::NAN,
                        k: f64::NAN,
                        error,
                        included: false,
                    },
                }
            }
            None => Vertex {
                z: [p.re, p.im],
                x: [f64::NAN; 4],
                metric_factor: f64::NAN,
                k: f64::NAN,
                error: f64::NAN,
                included: false,
            },
        };
        vertices.push(vertex);
    }
    let mut faces = Vec::new();
    let mut excluded_cells = Vec::new();
    for j in 0..nv - 1 {
        for i in 0..nu - 1 {
            let q = [
                grid.idx(i, j),
                grid.idx(i + 1, j),
                grid.idx(i + 1, j + 1),
                grid.idx(i, j + 1),
            ];
            if q.iter().all(|&v| vertices[v].included) {
                faces.push(q);
            } else {
                excluded_cells.push([i, j]);
            }
        }
    }
    let period_ok = compute_periods(d, tol)?.period_ok;
    Ok(SurfaceMesh {
        region,
        resolution,
        base_point: [z0.re, z0.im],
        exclusion_radius: rho,
        vertices,
        faces,
        excluded_cells,
        period_ok,
        universal_cover_patch: !period_ok,
        path_discrepancy,
        path_checked,
        path_independent,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TangentReport {
    /// Largest `|<x_u, x_v>| / (|x_u| |x_v|)` at interior vertices.
    pub orthogonality: f64,
    /// Largest `| |x_u|^2 - |x_v|^2 | / (|x_u|^2 + |x_v|^2)`.
    pub equal_norm: f64,
    /// Largest relative gap between `|x_u|^2` and the metric factor.
    pub metric: f64,
    pub checked: usize,
}

/// Central-difference tangent vectors at interior vertices, scaled to unit
/// steps in `z`.
pub fn tangent_check(m: &SurfaceMesh) -> TangentReport {
    let [nu, nv] = m.resolution;
    let mut rep = TangentReport {
        orthogonality: 0.0,
        equal_norm: 0.0,
        metric: 0.0,
        checked: 0,
    };
    let z = |v: &Vertex| Complex64::new(v.z[0], v.z[1]);
    for j in 1..nv.saturating_sub(1) {
        for i in 1..nu.saturating_sub(1) {
            let c = &m.vertices[m.index(i, j)];
            let ids = [
                m.index(i + 1, j),
                m.index(i - 1, j),
                m.index(i, j + 1),
                m.index(i, j - 1),
            ];
            if !c.included || ids.iter().any(|&k| !m.vertices[k].included) {
                continue;
            }
            let [e, w, n, s] = ids.map(|k| &m.vertices[k]);
            // unit steps in z along the two grid directions
            let du = (z(e) - z(w)).norm();
            let dv = (z(n) - z(s)).norm();
            let xu: [f64; 4] = std::array::from_fn(|k| (e.x[k] - w.x[k]) / du);
            let xv: [f64; 4] = std::array::from_fn(|k| (n.x[k] - s.x[k]) / dv);
            let dot: f64 = xu.iter().zip(&xv).map(|(a, b)| a * b).sum();
            let nu2: f64 = xu.iter().map(|a| a * a).sum();
            let nv2: f64 = xv.iter().map(|a| a * a).sum();
            rep.orthogonality = rep.orthogonality.max(dot.abs() / (nu2 * nv2).sqrt());
            rep.equal_norm = rep.equal_norm.max((nu2 - nv2).abs() / (nu2 + nv2));
            rep.metric = rep
                .metric
                .max((nu2 - c.metric_factor).abs() / c.metric_factor);
            rep.checked += 1;
        }
    }
    rep
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    /// Keep three of the four coordinates (0-based).
    Coordinates([usize; 3]),
    /// Rows of an orthonormal 3x4 matrix.
    Matrix([[f64; 4]; 3]),
}

impl Projection {
    pub fn validate(&self) -> Result<()> {
        match self {
            Projection::Coordinates(c) => {
                if c.iter().any(|&k| k > 3) || c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
                    return Err(Error::Mesh(format!("invalid coordinate selection {c:?}")));
                }
            }
            Projection::Matrix(rows) => {
                for a in 0..3 {
                    for b in 0..3 {
                        let dot: f64 = rows[a].iter().zip(&rows[b]).map(|(x, y)| x * y).sum();
                        let want = if a == b { 1.0 } else { 0.0 };
                        if (dot - want).abs() > 1e-9 {
                            return Err(Error::Mesh(
                                "projection matrix rows are not orthonormal".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn apply(&self, x: &[f64; 4]) -> [f64; 3] {
        match self {
            Projection::Coordinates(c) => c.map(|k| x[k]),
            Projection::Matrix(rows) => rows.map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Csv,
    Obj,
}

pub fn export_mesh(
    m: &SurfaceMesh,
    format: MeshFormat,
    projection: &Projection,
    out: &mut dyn Write,
) -> Result<()> {
    match format {
        MeshFormat::Csv => {
            writeln!(out, "re_z,im_z,x1,x2,x3,x4,metric,K")?;
            for v in m.vertices.iter().filter(|v| v.included) {
                let cols = [
                    v.z[0],
                    v.z[1],
                    v.x[0],
                    v.x[1],
                    v.x[2],
                    v.x[3],
                    v.metric_factor,
                    v.k,
                ];
                let line: Vec<String> = cols.iter().map(|c| format!("{c:.16e}")).collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
        MeshFormat::Obj => {
            projection.validate()?;
            let mut obj_index = vec![0usize; m.vertices.len()];
            let mut next = 1;
            for (k, v) in m.vertices.iter().enumerate() {
                if v.included {
                    let p = projection.apply(&v.x);
                    writeln!(out, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
                    obj_index[k] = next;
                    next += 1;
                }
            }
            for q in &m.faces {
                let [a, b, c, d] = q.map(|k| obj_index[k]);
                writeln!(out, "f {a} {b} {c}")?;
                writeln!(out, "f {a} {c} {d}")?;
            }
        }
    }
    Ok(())
}
