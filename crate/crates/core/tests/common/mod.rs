#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wlab::config::Tolerances;
use wlab::poly::Polynomial;
use wlab::rational::{Moebius, RationalFunction};
use wlab::report::InputDocument;
use wlab::sphere::SpherePoint;
use wlab::weierstrass::WeierstrassData;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> InputDocument {
    InputDocument::load(&fixtures_dir().join(format!("{name}.json"))).unwrap()
}

pub fn fixture_data(name: &str) -> WeierstrassData {
    fixture(name).to_data(&tol()).unwrap()
}

/// Fixtures that parse into valid data.
pub const DATA_FIXTURES: [&str; 8] = [
    "example21",
    "example22",
    "example23",
    "unicity1a",
    "unicity1b",
    "unicity2a",
    "unicity2b",
    "irregular",
];

pub fn complex(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// Roots spread in the square of half-width 2, kept apart from each other
/// and from `avoid`.
pub fn spread_points(rng: &mut ChaCha8Rng, n: usize, avoid: &[Complex64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(n);
    while out.len() < n {
        let z = complex(rng, 2.0);
        if out.iter().chain(avoid).all(|w| (w - z).norm() > 0.2) {
            out.push(z);
        }
    }
    out
}

pub fn poly_from_roots(rng: &mut ChaCha8Rng, roots: &[Complex64]) -> Polynomial {
    let lead = loop {
        let c = complex(rng, 2.0);
        if c.norm() > 0.3 {
            break c;
        }
    };
    let pairs: Vec<(Complex64, usize)> = roots.iter().map(|&r| (r, 1)).collect();
    Polynomial::from_roots(&pairs).scale(lead)
}

/// A rational map of exact degree `d` with separated zeros and poles.
pub fn random_map(rng: &mut ChaCha8Rng, d: usize) -> RationalFunction {
    if d == 0 {
        return RationalFunction::constant(complex(rng, 2.0));
    }
    let nz = rng.gen_range(0..=d);
    let np = if nz == d { rng.gen_range(0..=d) } else { d };
    let zeros = spread_points(rng, nz, &[]);
    let poles = spread_points(rng, np, &zeros);
    let num = poly_from_roots(rng, &zeros);
    let den = poly_from_roots(rng, &poles);
    let f = RationalFunction::new(num, den).unwrap();
    assert_eq!(f.degree(), d);
    f
}

pub fn random_moebius(rng: &mut ChaCha8Rng) -> Moebius {
    loop {
        let [a, b, c, d] = std::array::from_fn(|_| complex(rng, 2.0));
        if (a * d - b * c).norm() > 0.5 {
            return Moebius::new(a, b, c, d).unwrap();
        }
    }
}

/// `h = den(g1) den(g2) / prod (z - p_j)^{mu_j}`: the zeros of `h dz`
/// cancel the poles of the Gauss map components exactly, so the data are
/// regular away from the punctures. Infinity is always a puncture.
pub fn regular_data(
    g1: RationalFunction,
    g2: RationalFunction,
    finite: &[(Complex64, usize)],
) -> WeierstrassData {
    let den = Polynomial::from_roots(finite);
    let num = g1.den().mul_clean(g2.den(), 0.0);
    let h = RationalFunction::new(num, den).unwrap();
    let mut punctures: Vec<SpherePoint> = finite
        .iter()
        .map(|&(p, _)| SpherePoint::Finite(p))
        .collect();
    punctures.push(SpherePoint::Infinity);
    WeierstrassData::new(h, g1, g2, punctures, &tol()).unwrap()
}

/// Random regular genus-0 data with degrees `d1 + d2` in `1..=max_total`.
pub fn random_regular_data(rng: &mut ChaCha8Rng, max_total: usize) -> WeierstrassData {
    let total = rng.gen_range(1..=max_total);
    let d1 = rng.gen_range(0..=total);
    let g1 = random_map(rng, d1);
    let g2 = random_map(rng, total - d1);
    let mut special: Vec<Complex64> = Vec::new();
    for g in [&g1, &g2] {
        special.extend(g.poles().unwrap().iter().map(|r| r.value));
        special.extend(g.zeros().unwrap().iter().map(|r| r.value));
    }
    let k = rng.gen_range(0..=3);
    let finite: Vec<(Complex64, usize)> = spread_points(rng, k, &special)
        .into_iter()
        .map(|p| (p, rng.gen_range(1..=3)))
        .collect();
    regular_data(g1, g2, &finite)
}

pub fn sample_points(rng: &mut ChaCha8Rng, n: usize, avoid: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = complex(rng, 3.0);
        if avoid.iter().all(|w| (w - z).norm() > 1e-2) {
            out.push(z);
        }
    }
    out
}
