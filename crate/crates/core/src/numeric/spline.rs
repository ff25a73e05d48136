//! Piecewise cubic Hermite interpolation.

/// Cubic Hermite interpolant through `(x_k, y_k)` with slopes `d_k`.
///
/// Outside the knot range the spline continues linearly with the end slope.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl HermiteSpline {
    /// Builds a spline from knots, values and slopes. Lengths must agree and
    /// knots must be strictly increasing; callers validate beforehand.
    pub fn new(x: Vec<f64>, y: Vec<f64>, d: Vec<f64>) -> Self {
        debug_assert!(x.len() >= 2 && x.len() == y.len() && y.len() == d.len());
        Self { x, y, d }
    }

    /// Monotone interpolant: three-point slopes passed through the
    /// Fritsch–Carlson limiter.
    pub fn monotone(x: Vec<f64>, y: Vec<f64>) -> Self {
        let d = monotone_slopes(&x, &y);
        Self::new(x, y, d)
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn slopes(&self) -> &[f64] {
        &self.d
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        let k = self.x.partition_point(|&v| v <= t);
        k.saturating_sub(1).min(n - 2)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0] + self.d[0] * (t - self.x[0]);
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1] + self.d[n - 1] * (t - self.x[n - 1]);
        }
        let k = self.segment(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = 3.0 * s2 - 2.0 * s3;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.d[0];
        }
        if t >= self.x[n - 1] {
            return self.d[n - 1];
        }
        let k = self.segment(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let dy = (self.y[k + 1] - self.y[k]) / h;
        (6.0 * s - 6.0 * s2) * dy + (3.0 * s2 - 4.0 * s + 1.0) * self.d[k] + (3.0 * s2 - 2.0 * s) * self.d[k + 1]
    }

    pub fn second_deriv(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t < self.x[0] || t > self.x[n - 1] {
            return 0.0;
        }
        let k = self.segment(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let dy = (self.y[k + 1] - self.y[k]) / h;
        ((6.0 - 12.0 * s) * dy + (6.0 * s - 4.0) * self.d[k] + (6.0 * s - 2.0) * self.d[k + 1]) / h
    }

    /// Inverse of a nondecreasing spline. Linear continuation outside the range.
    pub fn inverse(&self, v: f64) -> f64 {
        let n = self.y.len();
        if v <= self.y[0] {
            return if self.d[0] > 0.0 { self.x[0] + (v - self.y[0]) / self.d[0] } else { self.x[0] };
        }
        if v >= self.y[n - 1] {
            return if self.d[n - 1] > 0.0 {
                self.x[n - 1] + (v - self.y[n - 1]) / self.d[n - 1]
            } else {
                self.x[n - 1]
            };
        }
        let k = self.y.partition_point(|&w| w <= v).saturating_sub(1).min(n - 2);
        if self.y[k] == v {
            return self.x[k];
        }
        let (mut lo, mut hi) = (self.x[k], self.x[k + 1]);
        let mut t = lo + (hi - lo) * (v - self.y[k]) / (self.y[k + 1] - self.y[k]);
        for _ in 0..100 {
            let r = self.eval(t) - v;
            if r == 0.0 {
                return t;
            }
            if r < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let dr = self.deriv(t);
            let mut next = if dr > 0.0 { t - r / dr } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-15 * (1.0 + t.abs()) || hi - lo <= 1e-15 * (1.0 + t.abs()) {
                return next;
            }
            t = next;
        }
        t
    }
}

/// Three-point slopes (exact for quadratics), limited so that monotone
/// data gives a monotone interpolant.
pub fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let m: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![m[0], m[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if m[k - 1] * m[k] > 0.0 {
            d[k] = (h[k] * m[k - 1] + h[k - 1] * m[k]) / (h[k - 1] + h[k]);
        }
    }
    d[0] = ((2.0 * h[0] + h[1]) * m[0] - h[0] * m[1]) / (h[0] + h[1]);
    d[n - 1] = ((2.0 * h[n - 2] + h[n - 3]) * m[n - 2] - h[n - 2] * m[n - 3]) / (h[n - 2] + h[n - 3]);
    if m.iter().all(|&v| v >= 0.0) {
        limit_monotone(x, y, &mut d);
    }
    d
}

/// Fritsch–Carlson limiter: adjusts supplied slopes so that the Hermite
/// interpolant of nondecreasing data stays nondecreasing.
pub fn limit_monotone(x: &[f64], y: &[f64], d: &mut [f64]) {
    for v in d.iter_mut() {
        if *v < 0.0 || !v.is_finite() {
            *v = 0.0;
        }
    }
    for k in 0..x.len() - 1 {
        let m = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        if m <= 0.0 {
            d[k] = 0.0;
            d[k + 1] = 0.0;
            continue;
        }
        let a = d[k] / m;
        let b = d[k + 1] / m;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            d[k] = tau * a * m;
            d[k + 1] = tau * b * m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn reproduces_knot_values_exactly() {
        let x = grid(17);
        let y: Vec<f64> = x.iter().map(|v| v * v + 0.1 * v).collect();
        let s = HermiteSpline::monotone(x.clone(), y.clone());
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(s.eval(*a), *b);
        }
    }

    #[test]
    fn quadratics_are_reproduced() {
        let x = grid(33);
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let s = HermiteSpline::monotone(x, y);
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((s.deriv(t) - 2.0 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_slopes_give_high_order_accuracy() {
        let x = grid(201);
        let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let s = HermiteSpline::new(x.clone(), y.clone(), y.clone());
        for i in 0..1000 {
            let t = (i as f64 + 0.37) / 1000.0;
            assert!((s.eval(t) - t.exp()).abs() < 1e-10);
            assert!((s.deriv(t) - t.exp()).abs() < 1e-7);
            assert!((s.second_deriv(t) - t.exp()).abs() < 1e-2);
            assert!((s.inverse(s.eval(t)) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.0, 0.1, 5.0, 5.0];
        let s = HermiteSpline::monotone(x, y);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let v = s.eval(i as f64 / 100.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn limiter_prevents_overshoot() {
        let x = vec![0.0, 1.0, 2.0];
        let y = vec![0.0, 1.0, 1.1];
        let mut d = vec![10.0, 10.0, 10.0];
        limit_monotone(&x, &y, &mut d);
        let s = HermiteSpline::new(x, y, d);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=200 {
            let v = s.eval(i as f64 / 100.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }
}
