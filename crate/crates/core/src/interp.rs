//! Shape-preserving interpolation for tabulated inputs.
//!
//! Tables (custom φ, f, or weight components) are interpolated with the
//! Fritsch–Carlson monotone cubic: tangents are limited so the interpolant
//! never overshoots the data, which keeps positive tables positive and
//! monotone tables monotone.

use crate::error::{Error, Result};

/// Monotone cubic Hermite interpolant on strictly increasing abscissae.
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    tangents: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "table needs >= 2 rows with matching columns, got {} x, {} y",
                xs.len(),
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec(
                "table abscissae must be strictly increasing".to_string(),
            ));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("table entries must be finite".to_string()));
        }

        let n = xs.len();
        let mut secants = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            secants.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut tangents = vec![0.0; n];
        tangents[0] = secants[0];
        tangents[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            if secants[i - 1] * secants[i] <= 0.0 {
                tangents[i] = 0.0;
            } else {
                // Weighted harmonic mean keeps the interpolant monotone.
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                tangents[i] = (w1 + w2) / (w1 / secants[i - 1] + w2 / secants[i]);
            }
        }
        // Fritsch-Carlson limiter on flat segments.
        for i in 0..n - 1 {
            if secants[i] == 0.0 {
                tangents[i] = 0.0;
                tangents[i + 1] = 0.0;
            } else {
                let alpha = tangents[i] / secants[i];
                let beta = tangents[i + 1] / secants[i];
                let s = alpha.hypot(beta);
                if s > 3.0 {
                    tangents[i] = 3.0 * secants[i] * alpha / s;
                    tangents[i + 1] = 3.0 * secants[i] * beta / s;
                }
            }
        }
        Ok(MonotoneCubic { xs, ys, tangents })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Evaluates the interpolant; outside the table span the boundary tangent
    /// is extended linearly.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.tangents[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.tangents[n - 1] * (x - self.xs[n - 1]);
        }
        let j = match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).expect("finite"))
        {
            Ok(j) => return self.ys[j],
            Err(j) => j - 1,
        };
        let h = self.xs[j + 1] - self.xs[j];
        let t = (x - self.xs[j]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[j]
            + h10 * h * self.tangents[j]
            + h01 * self.ys[j + 1]
            + h11 * h * self.tangents[j + 1]
    }
}

/// Interpolant working in log-log coordinates, for strictly positive tables
/// such as φ samples. Out-of-range queries extend as power laws, matching the
/// boundary log-log slope.
#[derive(Clone, Debug)]
pub struct LogLogInterp {
    inner: MonotoneCubic,
}

impl LogLogInterp {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.iter().any(|&x| x <= 0.0) || ys.iter().any(|&y| y <= 0.0) {
            return Err(Error::InvalidSpec(
                "log-log table entries must be strictly positive".to_string(),
            ));
        }
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        Ok(LogLogInterp {
            inner: MonotoneCubic::new(lx, ly)?,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.inner.eval(x.ln()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes() {
        let c = MonotoneCubic::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        assert_eq!(c.eval(1.0), 1.0);
        assert_eq!(c.eval(2.0), 4.0);
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x * (1.0 + 0.1 * x)).collect();
        let c = MonotoneCubic::new(xs, ys).unwrap();
        let mut prev = c.eval(0.0);
        for i in 1..400 {
            let v = c.eval(i as f64 * 9.5 / 400.0);
            assert!(v >= prev - 1e-12, "not monotone at sample {i}");
            prev = v;
        }
    }

    #[test]
    fn rejects_unsorted_abscissae() {
        assert!(MonotoneCubic::new(vec![0.0, 2.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn loglog_power_law_extension() {
        // Table of x^2 on [1, 10]: extrapolation should continue the power law.
        let xs: Vec<f64> = (0..30).map(|i| 1.0 + i as f64 * 0.31).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let p = LogLogInterp::new(&xs, &ys).unwrap();
        let v = p.eval(100.0);
        assert!((v - 1e4).abs() / 1e4 < 0.05, "extension gave {v}");
    }
}
