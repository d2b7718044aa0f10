//! Root finding and quadrature shared by every module.

/// Absolute tolerance for bisection.
pub const ROOT_TOL: f64 = 1e-10;
/// Iteration cap for bisection.
pub const ROOT_MAX_ITER: usize = 200;

/// Finds `x` in `[lo, hi]` with `f(x) = target` for nondecreasing `f`.
///
/// Returns `lo` when `f(lo) >= target` and `hi` when `f(hi) < target`. Stops
/// once the bracket is narrower than `tol` or after `max_iter` halvings.
pub fn bisect_increasing<F>(f: F, target: f64, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    if f(lo) >= target {
        return lo;
    }
    if f(hi) < target {
        return hi;
    }
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Composite Simpson rule with `panels` panels (rounded up to even).
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Adaptive Simpson quadrature.
///
/// The interval is first cut into `min_panels` equal pieces so narrow
/// features are not missed by the initial five-point sample; each piece then
/// refines until the Richardson error estimate is below its share of `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, min_panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let pieces = min_panels.max(1);
    let width = (b - a) / pieces as f64;
    let piece_tol = tol / pieces as f64;
    let mut total = 0.0;
    for k in 0..pieces {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == pieces { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_step(f, lo, hi, flo, fmid, fhi, whole, piece_tol, 50);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || !(m > a && m < b) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Trapezoid rule on sampled values at equally spaced nodes.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt_two() {
        let x = bisect_increasing(|x| x * x, 2.0, 0.0, 2.0, ROOT_TOL, ROOT_MAX_ITER);
        assert!((x - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn bisection_clamps_outside_range() {
        assert_eq!(bisect_increasing(|x| x, -1.0, 0.0, 1.0, 1e-12, 100), 0.0);
        assert_eq!(bisect_increasing(|x| x, 5.0, 0.0, 1.0, 1e-12, 100), 1.0);
    }

    #[test]
    fn simpson_rules_integrate_exp() {
        let exact = 1f64.exp() - 1.0;
        assert!((composite_simpson(f64::exp, 0.0, 1.0, 10_000) - exact).abs() < 1e-12);
        assert!((adaptive_simpson(&f64::exp, 0.0, 1.0, 1e-12, 4) - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_simpson_handles_a_narrow_bump() {
        let f = |x: f64| (-(x - 0.3).powi(2) / 1e-4).exp();
        let exact = (std::f64::consts::PI * 1e-4).sqrt();
        assert!((adaptive_simpson(&f, 0.0, 1.0, 1e-12, 16) - exact).abs() < 1e-9);
    }

    #[test]
    fn trapezoid_is_exact_for_lines() {
        let v: Vec<f64> = (0..=10).map(|k| 2.0 * k as f64 / 10.0 + 1.0).collect();
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-12);
    }
}
