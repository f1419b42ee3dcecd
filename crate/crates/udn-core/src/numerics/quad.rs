//! One-dimensional quadrature: adaptive Gauss-Kronrod 7/15 with interval
//! bisection, and fixed Gauss-Legendre rules for smooth inner integrals.

use super::{NumericError, QuadSpec, TailPolicy};
use alloc::vec::Vec;

/// Result of an adaptive integration: value plus an error bound estimate.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

// 15-point Kronrod abscissae on [0,1] side (symmetric), with the embedded
// 7-point Gauss weights. Standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 7/15 panel on [a, b]; returns (kronrod, |k - g|).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    kron *= half;
    gauss *= half;
    (kron, (kron - gauss).abs())
}

/// Adaptively integrate `f` over `[lo, hi]`; `hi = f64::INFINITY` is mapped
/// per the spec's tail policy.
pub fn integrate_1d<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    spec: &QuadSpec,
) -> Result<Integral, NumericError> {
    spec.validate()?;
    if hi.is_infinite() {
        return match spec.tail_policy {
            TailPolicy::Transform => {
                // t = lo + u/(1-u), dt = du/(1-u)^2, u in (0,1)
                let g = move |u: f64| {
                    let om = 1.0 - u;
                    if om <= 0.0 {
                        return 0.0;
                    }
                    let t = lo + u / om;
                    let v = f(t) / (om * om);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                };
                integrate_finite(g, 0.0, 1.0, spec)
            }
            TailPolicy::TruncateAtNegligible => {
                let mut cut = if lo.abs() > 1.0 { lo.abs() * 4.0 } else { 4.0 };
                // extend until the integrand is negligible at the cut
                for _ in 0..60 {
                    let tail = f(cut).abs() * cut;
                    if tail < spec.abs_tol * 1e-3 {
                        break;
                    }
                    cut *= 2.0;
                }
                integrate_finite(f, lo, cut, spec)
            }
        };
    }
    integrate_finite(f, lo, hi, spec)
}

fn integrate_finite<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    spec: &QuadSpec,
) -> Result<Integral, NumericError> {
    if lo == hi {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    // worklist of (a, b, value, err), split worst interval first
    let (v0, e0) = gk15(&mut f, lo, hi);
    let mut intervals: Vec<(f64, f64, f64, f64)> = alloc::vec![(lo, hi, v0, e0)];
    let mut splits = 0usize;
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= tol {
            return Ok(Integral { value, error });
        }
        if splits >= spec.max_subdivisions {
            return Err(NumericError::QuadratureBudget { estimate: value, error });
        }
        // split the interval with the largest error estimate
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.partial_cmp(&b.1 .3).unwrap_or(core::cmp::Ordering::Equal))
            .expect("non-empty interval list");
        let (a, b, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // interval at floating-point resolution; keep as converged
            let (v, _) = gk15(&mut f, a, b);
            intervals.push((a, b, v, 0.0));
            continue;
        }
        let (v1, e1) = gk15(&mut f, a, mid);
        let (v2, e2) = gk15(&mut f, mid, b);
        intervals.push((a, mid, v1, e1));
        intervals.push((mid, b, v2, e2));
        splits += 1;
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P'_n(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed-rule integral of `f` over [a, b] with precomputed GL nodes.
pub fn fixed_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Map `(lo, inf)` to `(0, 1)` by `t = lo + u/(1-u)` and integrate with a
/// fixed GL rule. Suitable for smooth integrands with polynomial-or-faster
/// decay beyond `lo`.
pub fn fixed_gl_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    scale: f64,
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    // t = lo + scale * u/(1-u): `scale` sets the resolution scale of the map
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        let u = 0.5 * (x + 1.0);
        let om = 1.0 - u;
        if om <= 0.0 {
            continue;
        }
        let t = lo + scale * u / om;
        let v = f(t) * scale / (om * om);
        if v.is_finite() {
            acc += w * v;
        }
    }
    acc * 0.5
}

pub use fixed_gl as gl_panel;
