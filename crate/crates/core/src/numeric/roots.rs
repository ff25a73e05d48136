//! Bracketed root finding.

/// Absolute tolerance on the bracket width used throughout.
pub const ROOT_TOL: f64 = 1e-12;

/// Finds `x` in `[lo, hi]` with `g(x) = 0` for a nondecreasing `g`.
///
/// Returns the bracket endpoint when the root lies outside the bracket, so
/// callers must check the range themselves when that matters.
pub fn bisect_increasing<G: Fn(f64) -> f64 + ?Sized>(g: &G, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    if g(lo) >= 0.0 {
        return lo;
    }
    if g(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let r = bisect_increasing(&|x: f64| x * x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
        assert_eq!(bisect_increasing(&|x: f64| x + 5.0, 0.0, 1.0, 1e-12), 0.0);
        assert_eq!(bisect_increasing(&|x: f64| x - 5.0, 0.0, 1.0, 1e-12), 1.0);
    }
}
