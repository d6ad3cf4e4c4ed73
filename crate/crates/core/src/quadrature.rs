//! Composite Gauss–Legendre quadrature on `[0,1]`.
//!
//! The covariance Fourier transforms integrated downstream are trigonometric
//! polynomials, so a single Gauss–Legendre panel is spectrally accurate once
//! the node count comfortably exceeds half the largest angular frequency;
//! panels are available for callers that prefer compositing.

/// Node layout for all `[0,1]` quadratures in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub points_per_panel: usize,
    pub panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { points_per_panel: 64, panels: 1 }
    }
}

impl QuadratureSpec {
    pub fn single(points: usize) -> Self {
        Self { points_per_panel: points, panels: 1 }
    }

    pub fn composite(points_per_panel: usize, panels: usize) -> Self {
        Self { points_per_panel, panels }
    }

    pub fn total_points(&self) -> usize {
        self.points_per_panel * self.panels
    }

    /// Nodes and weights on `[0,1]`, nodes ascending, weights summing to 1.
    pub fn build(&self) -> (Vec<f64>, Vec<f64>) {
        assert!(self.points_per_panel >= 1 && self.panels >= 1, "empty quadrature");
        let (xs, ws) = legendre_rule(self.points_per_panel);
        let mut nodes = Vec::with_capacity(self.total_points());
        let mut weights = Vec::with_capacity(self.total_points());
        let h = 1.0 / self.panels as f64;
        for p in 0..self.panels {
            let a = p as f64 * h;
            for (&x, &w) in xs.iter().zip(&ws) {
                // affine map of [-1,1] onto [a, a+h]
                nodes.push(a + 0.5 * h * (x + 1.0));
                weights.push(0.5 * h * w);
            }
        }
        (nodes, weights)
    }
}

/// Gauss–Legendre nodes/weights on `[-1,1]` by Newton iteration on the
/// Legendre recurrence.
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut xi = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, 0.0f64);
            for j in 0..n {
                let jf = j as f64;
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * jf + 1.0) * xi * p1 - jf * p2) / (jf + 1.0);
            }
            // p0 = P_n(xi), p1 = P_{n-1}(xi)
            dp = nf * (xi * p0 - p1) / (xi * xi - 1.0);
            let delta = p0 / dp;
            xi -= delta;
            if delta.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -xi;
        x[n - 1 - i] = xi;
        let wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}
