//! Shape-preserving cubic interpolation.
//!
//! Fritsch-Butland node slopes guarantee the Hermite interpolant is
//! monotone wherever the data are, which the ladder table relies on: its
//! derivative is consumed as a density and must never go negative.

use crate::error::{Error, Result};

/// Monotone piecewise-cubic interpolant with first-derivative evaluation.
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ms: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Config(format!(
                "interpolant needs matching xs/ys with >= 2 nodes, got {}/{}",
                xs.len(),
                ys.len()
            )));
        }
        if xs.iter().any(|v| !v.is_finite()) || ys.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("interpolant nodes must be finite".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("interpolant abscissae must be strictly increasing".into()));
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ms = vec![0.0f64; n];
        for i in 1..n - 1 {
            // Fritsch-Butland weighted harmonic mean; zero across a local
            // extremum. Keeps every interval monotone without a limiter pass.
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ms[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        ms[0] = endpoint_slope(h[0], h.get(1).copied().unwrap_or(h[0]), delta[0], delta.get(1).copied().unwrap_or(delta[0]));
        ms[n - 1] = endpoint_slope(
            h[n - 2],
            if n >= 3 { h[n - 3] } else { h[n - 2] },
            delta[n - 2],
            if n >= 3 { delta[n - 3] } else { delta[n - 2] },
        );
        Ok(Self { xs, ys, ms })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn locate(&self, x: f64) -> Result<(usize, f64, f64)> {
        if !(x >= self.x_min() && x <= self.x_max()) {
            return Err(Error::Domain(format!(
                "x = {x} outside interpolation range [{}, {}]",
                self.x_min(),
                self.x_max()
            )));
        }
        // partition_point returns the first index with xs[i] > x.
        let i = self.xs.partition_point(|&v| v <= x).clamp(1, self.xs.len() - 1) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        Ok((i, (x - self.xs[i]) / h, h))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (i, s, h) = self.locate(x)?;
        let (y0, y1, m0, m1) = (self.ys[i], self.ys[i + 1], self.ms[i], self.ms[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Ok(h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1)
    }

    pub fn deriv(&self, x: f64) -> Result<f64> {
        let (i, s, h) = self.locate(x)?;
        let (y0, y1, m0, m1) = (self.ys[i], self.ys[i + 1], self.ms[i], self.ms[i + 1]);
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        Ok(d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1)
    }
}

/// Non-centered three-point slope for the first/last node, clamped to keep
/// the boundary interval monotone.
fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d1 * d0 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
