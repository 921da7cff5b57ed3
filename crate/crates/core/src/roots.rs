//! Bracketing root finder for monotone scalar functions.

/// Iteration cap shared by every bisection in the crate.
pub const MAX_ITER: usize = 200;

/// Bisection on `[lo, hi]` for a function with a sign change (or a zero at
/// an endpoint).
///
/// Stops once the bracket is narrower than `tol` or cannot be split any
/// further in floating point. Returns `None` when the endpoints have the
/// same strict sign.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Some(lo);
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
