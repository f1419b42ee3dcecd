//! Monotone cubic (PCHIP, Fritsch-Carlson) interpolation on a strictly
//! increasing grid. Used for tabulating smooth positive transforms such as
//! the interference Laplace integrals over a log-spaced argument grid.

use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct PchipInterp {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl PchipInterp {
    /// Build from samples on a strictly increasing grid (len >= 2).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() == ys.len() && xs.len() >= 2);
        let n = xs.len();
        let mut d = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            d.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut m = alloc::vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        PchipInterp { xs, ys, slopes: m }
    }

    /// Interpolation domain.
    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Evaluate at `x`; arguments outside the grid are clamped to the ends.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        // binary search for the panel
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.xs[lo + 1] - self.xs[lo];
        let t = (x - self.xs[lo]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[lo] + h10 * h * self.slopes[lo] + h01 * self.ys[lo + 1] + h11 * h * self.slopes[lo + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn reproduces_smooth_monotone_function() {
        let xs: Vec<f64> = (0..48).map(|i| -4.0 + i as f64 * 0.2).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x / 1.7).tanh() + 2.0).collect();
        let p = PchipInterp::new(xs.clone(), ys);
        for i in 0..470 {
            let x = -4.0 + i as f64 * 0.02;
            let want = (x / 1.7).tanh() + 2.0;
            assert!((p.eval(x) - want).abs() < 2e-4, "x={x}");
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let xs = alloc::vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = alloc::vec![0.0, 0.1, 0.9, 0.95, 1.0];
        let p = PchipInterp::new(xs, ys);
        let mut prev = -1.0;
        for i in 0..=400 {
            let v = p.eval(i as f64 * 0.01);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }
}
