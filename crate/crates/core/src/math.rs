//! Shared numeric helpers.
//!
//! All transcendental functions route through [`libm`] so the crate stays
//! `no_std` and results are identical on every platform.

use alloc::vec::Vec;

pub use libm::{erf, erfc, exp, expm1, fabs, floor, log as ln, log1p as ln_1p, pow, sqrt};

pub const SQRT_2: f64 = core::f64::consts::SQRT_2;
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_2;

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    exp(-0.5 * x * x) / SQRT_2PI
}

/// Standard normal cdf via `erfc`, accurate deep into the lower/upper tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal survival function `1 - Phi(x)`.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Standard normal quantile: Acklam's rational approximation polished by one
/// Halley step against the `erfc`-based cdf (relative error ~1e-15 for
/// |x| <= 37; raw Acklam accuracy ~1e-9 beyond that).
pub fn norm_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "norm_quantile needs p in (0,1)");

    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = sqrt(-2.0 * ln(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = sqrt(-2.0 * ln_1p(-p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // Halley refinement; skip in the extreme tails where exp(x^2/2) overflows.
    if fabs(x) < 37.0 {
        let e = norm_cdf(x) - p;
        let u = e * SQRT_2PI * exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Percentile of pre-sorted data by linear interpolation at rank
/// `p * (n - 1)` (0-indexed), i.e. position `p (n - 1) + 1` in 1-indexed
/// order-statistic terms. `p` in [0, 1].
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty slice");
    assert!((0.0..=1.0).contains(&p), "percentile needs p in [0,1]");
    let pos = p * (sorted.len() as f64 - 1.0);
    let lo = floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Sort a copy ascending by total order.
pub fn sorted(data: &[f64]) -> Vec<f64> {
    let mut v = data.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Ordinary least-squares line `y = intercept + slope * x`.
/// Returns `(slope, intercept)`. Caller guarantees >= 2 distinct x.
pub fn ls_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Weighted least-squares line. Weights must be positive.
pub fn wls_line(xs: &[f64], ys: &[f64], ws: &[f64]) -> (f64, f64) {
    let w: f64 = ws.iter().sum();
    let mx = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / w;
    let my = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / w;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((&x, &y), &wi) in xs.iter().zip(ys).zip(ws) {
        sxx += wi * (x - mx) * (x - mx);
        sxy += wi * (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least-squares quadratic coefficient of `y = a + b x + c x^2`; returns `c`.
/// Used as the concavity summary of QQ plots.
pub fn ls_quadratic_coeff(xs: &[f64], ys: &[f64]) -> f64 {
    // Normal equations for the degree-2 Vandermonde system, solved by
    // Gaussian elimination on the 3x3 moment matrix.
    let n = xs.len() as f64;
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    let (mut t0, mut t1, mut t2) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        t0 += y;
        t1 += x * y;
        t2 += x2 * y;
    }
    let mut m = [[n, s1, s2, t0], [s1, s2, s3, t1], [s2, s3, s4, t2]];
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| fabs(m[a][col]).total_cmp(&fabs(m[b][col]))).unwrap();
        m.swap(col, pivot);
        let pivot_row = m[col];
        for (row, r) in m.iter_mut().enumerate() {
            if row != col {
                let f = r[col] / pivot_row[col];
                for (dst, src) in r.iter_mut().zip(pivot_row).skip(col) {
                    *dst -= f * src;
                }
            }
        }
    }
    m[2][3] / m[2][2]
}

/// Composite midpoint quadrature of `f` on `[a, b]`, refined by interval
/// tripling (each old midpoint stays a node) with Richardson extrapolation
/// on the O(h^2) error term. Converges to `rel_tol` relative or
/// `max_levels` tripplings.
pub fn quad_midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut n: usize = 1;
    let mut raw = f(0.5 * (a + b)) * (b - a);
    let mut raw_prev = raw;
    let mut extrap_prev = raw;
    for level in 0..13 {
        // Tripling keeps every old midpoint as a node; add two new per panel.
        let h = (b - a) / (3.0 * n as f64);
        let mut add = 0.0;
        for i in 0..n {
            let x0 = a + (b - a) * (i as f64) / (n as f64);
            add += f(x0 + 0.5 * h) + f(x0 + 2.5 * h);
        }
        raw = raw / 3.0 + add * h;
        n *= 3;
        let extrap = (9.0 * raw - raw_prev) / 8.0; // Richardson on the h^2 term
        if level > 0 && fabs(extrap - extrap_prev) <= rel_tol * fabs(extrap).max(1e-300) {
            return extrap;
        }
        raw_prev = raw;
        extrap_prev = extrap;
    }
    extrap_prev
}

/// Integral of `g(t)/t` over `[u, 1]` evaluated on the log scale, where the
/// substitution `t = e^w` removes the `1/t` weight. Used by the Karamata
/// representations whose perturbation integrals are near-singular at 0.
pub fn quad_log_scale<F: Fn(f64) -> f64>(g: F, u: f64, rel_tol: f64) -> f64 {
    quad_midpoint(move |w| g(exp(w)), ln(u), 0.0, rel_tol)
}

/// Integral of `f` over `[a, +inf)` by geometrically growing segments.
/// Returns `Err(segments_used)` when the segment contributions stop
/// shrinking (divergent or near-divergent tail).
pub fn quad_to_inf<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    rel_tol: f64,
) -> core::result::Result<f64, usize> {
    let mut total = 0.0;
    let mut lo = a;
    let mut width = fabs(a).max(1.0);
    let mut prev_seg = f64::INFINITY;
    let mut stalled = 0usize;
    for k in 0..120 {
        let hi = lo + width;
        let seg = quad_midpoint(&f, lo, hi, rel_tol * 0.1);
        total += seg;
        if fabs(seg) <= rel_tol * fabs(total).max(1e-300) {
            return Ok(total);
        }
        // A doubling segment of a convergent integrand must eventually
        // decay; contributions that hold steady signal divergence.
        if fabs(seg) > 0.75 * fabs(prev_seg) {
            stalled += 1;
            if stalled > 40 {
                return Err(k);
            }
        } else {
            stalled = 0;
        }
        prev_seg = seg;
        lo = hi;
        width *= 2.0;
    }
    Err(120)
}
