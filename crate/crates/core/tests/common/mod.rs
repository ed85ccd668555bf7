#![allow(dead_code)]

//! Random generators and independent oracles shared by the integration tests.

use rand::Rng;
use wavedecay::measure::{Atom, DensityPiece};
use wavedecay::{HyperbolicSystem, LineMeasure, OddConcaveProfile};

/// Positive density on dyadic intervals with dyadic levels, so that lengths
/// and masses are exact in floating point. Adjacent pieces and repeated
/// levels occur on purpose.
pub fn dyadic_density(rng: &mut impl Rng, max_pieces: usize) -> LineMeasure {
    let n = rng.gen_range(0..=max_pieces);
    let mut x = rng.gen_range(-64..64) as f64 / 16.0;
    let mut pieces = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.gen_bool(0.6) {
            x += rng.gen_range(1..32) as f64 / 16.0;
        }
        let len = rng.gen_range(1..48) as f64 / 64.0;
        let value = rng.gen_range(1..24) as f64 / 8.0;
        pieces.push((x, x + len, value));
        x += len;
    }
    LineMeasure::from_density(pieces).unwrap()
}

/// Positive measure: dyadic density plus up to three atoms.
pub fn positive_measure(rng: &mut impl Rng, max_pieces: usize) -> LineMeasure {
    let d = dyadic_density(rng, max_pieces);
    let atoms: Vec<(f64, f64)> = (0..rng.gen_range(0..=3))
        .map(|_| (rng.gen_range(-4.0..4.0), rng.gen_range(0.05..1.5)))
        .collect();
    LineMeasure::from_atoms(atoms).unwrap().add(&d)
}

/// Class-F profile with up to `max_points` breakpoints.
pub fn class_f(rng: &mut impl Rng, max_points: usize) -> OddConcaveProfile {
    let origin = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) };
    let n = rng.gen_range(0..=max_points);
    let mut slopes: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..3.0)).collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    let (mut x, mut v) = (0.0, origin);
    let points = slopes
        .into_iter()
        .map(|s| {
            let dx = rng.gen_range(0.05..1.5);
            x += dx;
            v += s * dx;
            (x, v)
        })
        .collect();
    OddConcaveProfile::new(origin, points).unwrap()
}

/// Lebesgue measure of `{z > c}` for a density given by disjoint pieces.
pub fn level_set_measure(z: &LineMeasure, c: f64) -> f64 {
    z.density().iter().filter(|p| p.value > c).map(|p| p.b - p.a).sum()
}

/// `sup_{meas(A) ≤ s} m(A)` through its dual form
/// `atoms + min_{c ≥ 0} (∫ (z − c)₊ + c·s)`, minimized over the levels of `z`.
pub fn sup_mass_dual(m: &LineMeasure, s: f64) -> f64 {
    let atoms: f64 = m.atoms().iter().map(|a| a.mass).sum();
    let mut best = f64::INFINITY;
    let levels = m.density().iter().map(|p| p.value).chain(std::iter::once(0.0));
    for c in levels {
        let over: f64 = m.density().iter().map(|p| (p.value - c).max(0.0) * (p.b - p.a)).sum();
        best = best.min(over + c * s);
    }
    atoms + best
}

/// Burgers' solution at `(t, x)` from odd class-F data by the Lax–Oleinik
/// formula: `w = (x − y*)/t` with `y*` minimizing `U₀(y) + (x − y)²/(2t)`,
/// `U₀' = w₀`. The objective is strictly convex, so `y*` is the unique zero
/// of its subdifferential `w₀(y) + (y − x)/t`, located by bisection.
pub fn lax_oleinik(w0: &OddConcaveProfile, t: f64, x: f64) -> f64 {
    let reach = t * w0.plateau() + 1.0;
    let (mut lo, mut hi) = (x - reach, x + reach);
    let left = |y: f64| {
        // lower end of the subdifferential at y
        let w = if y == 0.0 { -w0.origin() } else { w0.value(y) };
        w + (y - x) / t
    };
    let right = |y: f64| {
        let w = if y == 0.0 { w0.origin() } else { w0.value(y) };
        w + (y - x) / t
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if left(mid) > 0.0 {
            hi = mid;
        } else if right(mid) < 0.0 {
            lo = mid;
        } else {
            lo = mid;
            hi = mid;
            break;
        }
        if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    // the minimizer sits at the origin whenever 0 lies in the subdifferential there
    let y = if left(0.0) <= 0.0 && right(0.0) >= 0.0 { 0.0 } else { 0.5 * (lo + hi) };
    (x - y) / t
}

/// Eigenvalues and right eigenvectors of a 2×2 Jacobian from central
/// differences of the flux, sorted by eigenvalue.
fn numerical_eigen(sys: &HyperbolicSystem, u: &[f64]) -> [(f64, [f64; 2]); 2] {
    let h = 1e-6;
    let mut a = [[0.0; 2]; 2];
    for j in 0..2 {
        let mut up = u.to_vec();
        let mut um = u.to_vec();
        up[j] += h;
        um[j] -= h;
        let (fp, fm) = (sys.flux(&up), sys.flux(&um));
        for i in 0..2 {
            a[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let mut out = [(0.0, [0.0; 2]); 2];
    for (k, lam) in [tr / 2.0 - disc, tr / 2.0 + disc].into_iter().enumerate() {
        let r = if a[0][1].abs() > 1e-14 { [a[0][1], lam - a[0][0]] } else { [lam - a[1][1], a[1][0]] };
        out[k] = (lam, r);
    }
    out
}

/// Right eigenvector of family `i` scaled so that `∇λ_i·r_i = 1`, from the
/// numerical Jacobian only.
pub fn numerical_r(sys: &HyperbolicSystem, i: usize, u: &[f64]) -> [f64; 2] {
    let (_, r) = numerical_eigen(sys, u)[i];
    let h = 1e-4;
    let up = [u[0] + h * r[0], u[1] + h * r[1]];
    let um = [u[0] - h * r[0], u[1] - h * r[1]];
    let g = (numerical_eigen(sys, &up)[i].0 - numerical_eigen(sys, &um)[i].0) / (2.0 * h);
    [r[0] / g, r[1] / g]
}

/// Integral curve of `r_i` from `u` over parameter length `sigma`, by RK4.
pub fn rarefaction_rk4(sys: &HyperbolicSystem, i: usize, u: &[f64], sigma: f64, steps: usize) -> [f64; 2] {
    let h = sigma / steps as f64;
    let mut y = [u[0], u[1]];
    for _ in 0..steps {
        let k1 = numerical_r(sys, i, &y);
        let k2 = numerical_r(sys, i, &[y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = numerical_r(sys, i, &[y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = numerical_r(sys, i, &[y[0] + h * k3[0], y[1] + h * k3[1]]);
        for c in 0..2 {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
    }
    y
}

/// `∫_{lo}^{hi} u_c dx` for a step function.
pub fn integral(u: &wavedecay::PiecewiseConstantFn, c: usize, lo: f64, hi: f64) -> f64 {
    let mut edges = vec![lo];
    edges.extend(u.breaks().iter().copied().filter(|&b| b > lo && b < hi));
    edges.push(hi);
    edges
        .windows(2)
        .map(|w| u.value_at(0.5 * (w[0] + w[1]))[c] * (w[1] - w[0]))
        .sum()
}

/// Squeezes `m` towards `anchor` by `lambda ∈ (0, 1]` and scales its mass by
/// `1 + extra`. The result dominates `m` in the rearrangement order.
pub fn squeeze(m: &LineMeasure, anchor: f64, lambda: f64, extra: f64) -> LineMeasure {
    let map = |x: f64| anchor + lambda * (x - anchor);
    let atoms = m.atoms().iter().map(|a| Atom { x: map(a.x), mass: a.mass * (1.0 + extra) }).collect();
    let density = m
        .density()
        .iter()
        .map(|p| DensityPiece { a: map(p.a), b: map(p.b), value: p.value * (1.0 + extra) / lambda })
        .collect();
    LineMeasure::new(atoms, density).unwrap()
}
