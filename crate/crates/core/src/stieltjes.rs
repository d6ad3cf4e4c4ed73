//! The Stieltjes transform of the limit law: the grid function `H(z,x)`
//! solving `z H(z,x) = 1 + H(z,x) ∫ f(x,y) H(z,y) dy`, its aggregate
//! `G(z) = ∫ H(z,x) dx`, and density/CDF recovery by inversion
//! `density(λ) = -Im G(λ+iε)/π`.
//!
//! The fixed point is damped: `H ← (1-ω)H + ω/(z - ∫ f H)`. Starting from
//! `H = 1/z` inherits the branch on which `zG → 1`; no square roots are ever
//! taken, so no branch cuts arise. The functional equation pins the solution
//! analytically only near infinity; solves at small `Im z` are globalized by
//! continuation in `Im z` and validated against the moment pipelines.

use num_complex::Complex64;
use thiserror::Error;

use crate::kernel::SpectralDensity2D;

#[derive(Debug, Error)]
pub enum StieltjesError {
    #[error("z must have a nonzero imaginary part")]
    RealShift,
    #[error("fixed point did not converge at z = {z} after {iterations} iterations (residual {residual:e})")]
    Convergence { z: Complex64, residual: f64, iterations: usize },
    #[error("continuation failed at path point {z} toward {target}: {source}")]
    Continuation { z: Complex64, target: Complex64, source: Box<StieltjesError> },
    #[error("solution violates the Herglotz property at z = {z}: Im G = {im_g:e}")]
    Herglotz { z: Complex64, im_g: f64 },
    #[error("density dipped to {min:e}, below the -1e-9 floor")]
    NegativeDensity { min: f64 },
    #[error("inversion failed at {} of {} grid points; first failures: {:?}", failed.len(), total, &failed[..failed.len().min(4)])]
    PartialInversion { failed: Vec<f64>, total: usize },
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Sup-norm bound on the fixed-point defect `|zH - 1 - H∫fH|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial damping; halved when the defect grows 10 iterations in a row.
    pub omega: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-11, max_iter: 50_000, omega: 0.5 }
    }
}

/// A converged solve at one complex point.
#[derive(Debug, Clone)]
pub struct StieltjesField {
    z: Complex64,
    h_values: Vec<Complex64>,
    g: Complex64,
    residual: f64,
    iterations: usize,
}

impl StieltjesField {
    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn h_values(&self) -> &[Complex64] {
        &self.h_values
    }

    /// `G(z) = ∫ H(z,x) dx`.
    pub fn g(&self) -> Complex64 {
        self.g
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Quadrature of the field against the grid weights.
pub fn g_transform(f: &SpectralDensity2D, h_values: &[Complex64]) -> Complex64 {
    f.weights()
        .iter()
        .zip(h_values)
        .map(|(&w, &h)| w * h)
        .sum()
}

fn apply_kernel(f: &SpectralDensity2D, h: &[Complex64], out: &mut [Complex64]) {
    let n = f.len();
    let w = f.weights();
    for (i, out_i) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += w[j] * f.value(i, j) * h[j];
        }
        *out_i = acc;
    }
}

/// Damped fixed-point solve started from `H = 1/z`.
pub fn solve_h(
    f: &SpectralDensity2D,
    z: Complex64,
    opts: &SolverOptions,
) -> Result<StieltjesField, StieltjesError> {
    let start = vec![z.inv(); f.len()];
    solve_h_from(f, z, &start, opts)
}

/// Damped fixed-point solve from a caller-supplied start (warm restarts).
pub fn solve_h_from(
    f: &SpectralDensity2D,
    z: Complex64,
    start: &[Complex64],
    opts: &SolverOptions,
) -> Result<StieltjesField, StieltjesError> {
    if z.im == 0.0 {
        return Err(StieltjesError::RealShift);
    }
    let n = f.len();
    assert_eq!(start.len(), n, "start vector must match the grid");
    let mut h = start.to_vec();
    let mut kh = vec![Complex64::new(0.0, 0.0); n];
    let mut omega = opts.omega;
    let mut last_defect = f64::INFINITY;
    let mut growth_streak = 0usize;

    for iter in 0..=opts.max_iter {
        apply_kernel(f, &h, &mut kh);
        let mut defect = 0.0f64;
        for i in 0..n {
            defect = defect.max((z * h[i] - 1.0 - h[i] * kh[i]).norm());
        }
        if defect <= opts.tol {
            let g = g_transform(f, &h);
            if z.im > 0.0 && g.im >= 0.0 || z.im < 0.0 && g.im <= 0.0 {
                return Err(StieltjesError::Herglotz { z, im_g: g.im });
            }
            return Ok(StieltjesField { z, h_values: h, g, residual: defect, iterations: iter });
        }
        if defect > last_defect {
            growth_streak += 1;
            if growth_streak >= 10 {
                omega = (omega * 0.5).max(1.0 / 64.0);
                growth_streak = 0;
            }
        } else {
            growth_streak = 0;
        }
        last_defect = defect;
        for i in 0..n {
            h[i] = (1.0 - omega) * h[i] + omega / (z - kh[i]);
        }
    }
    Err(StieltjesError::Convergence { z, residual: last_defect, iterations: opts.max_iter })
}

/// Continuation path toward a target in the upper half plane.
#[derive(Debug, Clone, Copy)]
pub enum PathSpec {
    /// Solve at the target directly from the cold start.
    Direct,
    /// Fixed number of linear steps from `i·4√rbar` down to the target;
    /// one step degenerates to `Direct`.
    Linear { steps: usize },
    /// Geometric descent of `Im z` by the given ratio per step.
    Geometric { ratio: f64 },
}

impl Default for PathSpec {
    fn default() -> Self {
        PathSpec::Geometric { ratio: 0.7 }
    }
}

impl PathSpec {
    fn points(&self, target: Complex64, rbar: f64) -> Vec<Complex64> {
        let im_start = 4.0 * rbar.sqrt().max(1.0);
        if target.im.abs() >= im_start {
            return vec![target];
        }
        let sign = target.im.signum();
        match *self {
            PathSpec::Direct | PathSpec::Linear { steps: 1 } => vec![target],
            PathSpec::Linear { steps } => {
                let steps = steps.max(1);
                let z0 = Complex64::new(0.0, sign * im_start);
                (1..=steps)
                    .map(|k| {
                        let s = k as f64 / steps as f64;
                        z0 + (target - z0) * s
                    })
                    .collect()
            }
            PathSpec::Geometric { ratio } => {
                let ratio = ratio.clamp(0.05, 0.95);
                let mut ims = Vec::new();
                let mut im = im_start;
                while im > target.im.abs() * (1.0 + 1e-12) {
                    ims.push(im);
                    im *= ratio;
                }
                let steps = ims.len() + 1;
                let mut out: Vec<Complex64> = ims
                    .into_iter()
                    .enumerate()
                    .map(|(k, im)| {
                        let s = (k + 1) as f64 / steps as f64;
                        Complex64::new(target.re * s, sign * im)
                    })
                    .collect();
                out.push(target);
                out
            }
        }
    }
}

/// Solves along a descending path in `Im z`, warm-starting each point from
/// the previous field, and returns the solve at the target.
pub fn continuation_solve(
    f: &SpectralDensity2D,
    z_target: Complex64,
    path: &PathSpec,
    opts: &SolverOptions,
) -> Result<StieltjesField, StieltjesError> {
    if z_target.im == 0.0 {
        return Err(StieltjesError::RealShift);
    }
    let points = path.points(z_target, f.rbar());
    let mut field: Option<StieltjesField> = None;
    for z in points {
        let next = match &field {
            None => solve_h(f, z, opts),
            Some(prev) => solve_h_from(f, z, prev.h_values(), opts),
        };
        field = Some(next.map_err(|e| StieltjesError::Continuation {
            z,
            target: z_target,
            source: Box::new(e),
        })?);
    }
    Ok(field.expect("path is never empty"))
}

/// Recovered density and CDF on a λ-grid.
///
/// Density is clipped at zero after a `-1e-9` floor check; the CDF is the
/// running trapezoid integral. `mass_deficit` records `|1 - cdf(end)|`:
/// near zero when the grid spans the support, larger on partial grids.
#[derive(Debug, Clone)]
pub struct DensityCurve {
    lambdas: Vec<f64>,
    density: Vec<f64>,
    epsilon: f64,
    cdf: Vec<f64>,
    mass_deficit: f64,
}

impl DensityCurve {
    pub fn from_samples(
        lambdas: Vec<f64>,
        density: Vec<f64>,
        epsilon: f64,
    ) -> Result<Self, StieltjesError> {
        assert_eq!(lambdas.len(), density.len());
        let min = density.iter().fold(f64::INFINITY, |a, &d| a.min(d));
        if min < -1e-9 {
            return Err(StieltjesError::NegativeDensity { min });
        }
        let density: Vec<f64> = density.into_iter().map(|d| d.max(0.0)).collect();
        let mut cdf = vec![0.0; lambdas.len()];
        for i in 1..lambdas.len() {
            cdf[i] = cdf[i - 1]
                + 0.5 * (lambdas[i] - lambdas[i - 1]) * (density[i] + density[i - 1]);
        }
        let mass_deficit = (1.0 - cdf.last().copied().unwrap_or(0.0)).abs();
        Ok(Self { lambdas, density, epsilon, cdf, mass_deficit })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mass_deficit(&self) -> f64 {
        self.mass_deficit
    }

    /// True when the grid captured the whole unit mass to 1e-3.
    pub fn complete(&self) -> bool {
        self.mass_deficit <= 1e-3
    }

    /// Piecewise-linear CDF evaluation, clamped to [0, cdf(end)].
    pub fn cdf_at(&self, x: f64) -> f64 {
        let n = self.lambdas.len();
        if n == 0 || x <= self.lambdas[0] {
            return 0.0;
        }
        if x >= self.lambdas[n - 1] {
            return self.cdf[n - 1];
        }
        let idx = self.lambdas.partition_point(|&l| l <= x);
        let (x0, x1) = (self.lambdas[idx - 1], self.lambdas[idx]);
        let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        self.cdf[idx - 1] + t * (self.cdf[idx] - self.cdf[idx - 1])
    }

    /// `∫ λ^p dCDF` by the trapezoid rule against the density.
    pub fn moment(&self, p: u32) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.lambdas.len() {
            let f0 = self.lambdas[i - 1].powi(p as i32) * self.density[i - 1];
            let f1 = self.lambdas[i].powi(p as i32) * self.density[i];
            acc += 0.5 * (self.lambdas[i] - self.lambdas[i - 1]) * (f0 + f1);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InversionOptions {
    pub epsilon: f64,
    /// Evaluate at ε and 2ε and extrapolate linearly to ε → 0.
    pub richardson: bool,
    pub solver: SolverOptions,
    pub path: PathSpec,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            richardson: true,
            solver: SolverOptions::default(),
            path: PathSpec::default(),
        }
    }
}

/// Default λ-grid: 601 uniform points on `[-2.5√rbar, 2.5√rbar]`, wide
/// enough for the compact support implied by the moment growth bound.
pub fn default_lambda_grid(rbar: f64) -> Vec<f64> {
    let limit = 2.5 * rbar.sqrt().max(1.0);
    let n = 601;
    (0..n)
        .map(|i| -limit + 2.0 * limit * i as f64 / (n - 1) as f64)
        .collect()
}

/// Stieltjes inversion along a λ-grid.
///
/// Walks the grid warm-starting each solve from its neighbor (falling back
/// to fresh continuation after a failure); any points that still fail are
/// reported together in a partial-result error.
pub fn invert_density(
    f: &SpectralDensity2D,
    lambda_grid: &[f64],
    opts: &InversionOptions,
) -> Result<DensityCurve, StieltjesError> {
    if opts.epsilon <= 0.0 {
        return Err(StieltjesError::BadEpsilon(opts.epsilon));
    }
    let eps = opts.epsilon;
    let mut density = Vec::with_capacity(lambda_grid.len());
    let mut failed = Vec::new();
    let mut warm: Vec<Option<Vec<Complex64>>> = vec![None, None];
    let levels: &[f64] = if opts.richardson { &[1.0, 2.0] } else { &[1.0] };

    for &lambda in lambda_grid {
        let mut g_parts = [Complex64::new(0.0, 0.0); 2];
        let mut ok = true;
        for (li, &scale) in levels.iter().enumerate() {
            let z = Complex64::new(lambda, scale * eps);
            let solved = match &warm[li] {
                Some(h0) => solve_h_from(f, z, h0, &opts.solver)
                    .or_else(|_| continuation_solve(f, z, &opts.path, &opts.solver)),
                None => continuation_solve(f, z, &opts.path, &opts.solver),
            };
            match solved {
                Ok(field) => {
                    g_parts[li] = field.g();
                    warm[li] = Some(field.h_values().to_vec());
                }
                Err(_) => {
                    warm[li] = None;
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            failed.push(lambda);
            density.push(0.0);
            continue;
        }
        let d_eps = -g_parts[0].im / std::f64::consts::PI;
        let d = if opts.richardson {
            let d_2eps = -g_parts[1].im / std::f64::consts::PI;
            2.0 * d_eps - d_2eps
        } else {
            d_eps
        };
        density.push(d);
    }
    if !failed.is_empty() {
        return Err(StieltjesError::PartialInversion { failed, total: lambda_grid.len() });
    }
    DensityCurve::from_samples(lambda_grid.to_vec(), density, eps)
}

/// Leading Laurent coefficients `(β_0, β_2, β_4)` of `G(z) = Σ β_{2m} z^{-(2m+1)}`.
///
/// `zG(z) = Σ β_{2m} w^{-m}` with `w = z²`, so sampling eight points on the
/// circle `|z| = radius` (angles chosen off the real axis) and taking the
/// discrete Fourier average `(1/8) Σ_j z_j G(z_j) w_j^m` isolates `β_{2m}`
/// up to an alias of order `radius^{-16}`. Solves this far from the spectrum
/// contract strongly, so the tolerance is pinned near machine precision.
pub fn laurent_betas(
    f: &SpectralDensity2D,
    radius: f64,
    opts: &SolverOptions,
) -> Result<[f64; 3], StieltjesError> {
    const J: usize = 8;
    let opts = SolverOptions { tol: opts.tol.min(1e-13), ..*opts };
    let mut sums = [Complex64::new(0.0, 0.0); 3];
    for j in 0..J {
        let theta = std::f64::consts::PI * (2 * j + 1) as f64 / (2 * J) as f64;
        let z = Complex64::from_polar(radius, theta);
        let field = solve_h(f, z, &opts)?;
        let zg = z * field.g();
        let w = z * z;
        let mut wm = Complex64::new(1.0, 0.0);
        for slot in sums.iter_mut() {
            *slot += zg * wm;
            wm *= w;
        }
    }
    Ok([sums[0].re / J as f64, sums[1].re / J as f64, sums[2].re / J as f64])
}
