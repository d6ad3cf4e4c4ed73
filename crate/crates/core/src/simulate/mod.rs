//! Matrix-ensemble simulation: stationary entry fields from 2-D linear
//! processes (Gaussian, Rademacher, or uniform inputs), spectra through the
//! self-contained symmetric eigensolver, and empirical-vs-theory agreement
//! in moments and in Lévy / Kolmogorov–Smirnov distance.
//!
//! Randomness comes from ChaCha8, a counter-based stream cipher generator:
//! one 64-bit seed, with replicate `r` drawing from stream `r`. Replicates
//! are therefore independent, reproducible, and insensitive to thread count;
//! reports aggregate in replicate order.

mod eigen;

pub use eigen::{
    symmetric_eigen_decomposition, symmetric_eigenvalues, EigenError, SymmetricMatrix,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::LinearCoeffs;
use crate::stieltjes::DensityCurve;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("field window of {bytes} bytes exceeds the {cap} byte cap")]
    AllocationCap { bytes: usize, cap: usize },
    #[error("configuration: {0}")]
    BadConfig(String),
}

/// Entry input distribution; all are mean zero, variance one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputDist {
    Gaussian,
    Rademacher,
    Uniform,
}

impl std::str::FromStr for InputDist {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "rademacher" => Ok(Self::Rademacher),
            "uniform" => Ok(Self::Uniform),
            other => Err(format!("unknown input distribution `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub n: usize,
    pub coeffs: LinearCoeffs,
    pub input_dist: InputDist,
    pub seed: u64,
    pub replicates: usize,
}

impl EnsembleConfig {
    fn check(&self) -> Result<(), SimulateError> {
        if self.n < 1 {
            return Err(SimulateError::BadConfig("matrix size n must be >= 1".into()));
        }
        if self.replicates < 1 {
            return Err(SimulateError::BadConfig("replicates must be >= 1".into()));
        }
        Ok(())
    }
}

const ALLOCATION_CAP_BYTES: usize = 2 << 30;

/// Mean-zero variance-one draws via the Marsaglia polar method (Gaussian),
/// a sign bit (Rademacher), or `U(-√3, √3)`.
struct InputSource {
    rng: ChaCha8Rng,
    dist: InputDist,
    spare: Option<f64>,
}

impl InputSource {
    fn new(seed: u64, stream: u64, dist: InputDist) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, dist, spare: None }
    }

    fn next(&mut self) -> f64 {
        match self.dist {
            InputDist::Gaussian => {
                if let Some(v) = self.spare.take() {
                    return v;
                }
                loop {
                    let u = 2.0 * self.rng.gen::<f64>() - 1.0;
                    let v = 2.0 * self.rng.gen::<f64>() - 1.0;
                    let s = u * u + v * v;
                    if s > 0.0 && s < 1.0 {
                        let f = (-2.0 * s.ln() / s).sqrt();
                        self.spare = Some(v * f);
                        return u * f;
                    }
                }
            }
            InputDist::Rademacher => {
                if self.rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            InputDist::Uniform => 3.0f64.sqrt() * (2.0 * self.rng.gen::<f64>() - 1.0),
        }
    }
}

/// Draws the input field on the enlarged window `[1-K, n+K]²`, convolves it
/// with the coefficients, and symmetrizes by `X_{i,j} = Z_{i∧j, i∨j}`.
/// Deterministic for a fixed `(seed, replicate)`.
pub fn generate_field(
    cfg: &EnsembleConfig,
    replicate: usize,
) -> Result<SymmetricMatrix, SimulateError> {
    cfg.check()?;
    let n = cfg.n;
    let k = cfg.coeffs.bound() as usize;
    let w = n + 2 * k;
    let bytes = w * w * std::mem::size_of::<f64>();
    if bytes > ALLOCATION_CAP_BYTES {
        return Err(SimulateError::AllocationCap { bytes, cap: ALLOCATION_CAP_BYTES });
    }
    let mut source = InputSource::new(cfg.seed, replicate as u64, cfg.input_dist);
    let mut eps = vec![0.0f64; w * w];
    for cell in eps.iter_mut() {
        *cell = source.next();
    }
    // ε index (a, b) for a, b in [1-K, n+K] lives at (a-1+K, b-1+K)
    let at = |a: i64, b: i64| -> f64 {
        let i = (a - 1 + k as i64) as usize;
        let j = (b - 1 + k as i64) as usize;
        eps[i * w + j]
    };

    let z: Vec<f64> = if let Some(factor) = cfg.coeffs.factor() {
        // separable pass: rows then columns
        let mut rows = vec![0.0f64; n * w];
        for i in 1..=n as i64 {
            for (bj, b) in (1 - k as i64..=(n + k) as i64).enumerate() {
                let mut acc = 0.0;
                for &(c, v) in factor {
                    acc += v * at(i - c as i64, b);
                }
                rows[(i as usize - 1) * w + bj] = acc;
            }
        }
        let mut z = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 1..=n as i64 {
                let mut acc = 0.0;
                for &(c, v) in factor {
                    let b = j - c as i64;
                    acc += v * rows[i * w + (b - 1 + k as i64) as usize];
                }
                z[i * n + (j as usize - 1)] = acc;
            }
        }
        z
    } else {
        let entries: Vec<((i32, i32), f64)> = cfg.coeffs.entries().collect();
        let mut z = vec![0.0f64; n * n];
        for i in 1..=n as i64 {
            for j in 1..=n as i64 {
                let mut acc = 0.0;
                for &((ck, cl), v) in &entries {
                    acc += v * at(i - ck as i64, j - cl as i64);
                }
                z[(i as usize - 1) * n + (j as usize - 1)] = acc;
            }
        }
        z
    };

    let mut x = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
            x.set(i, j, z[lo * n + hi]);
        }
    }
    Ok(x)
}

/// Sorted spectrum of `A/√n`.
#[derive(Debug, Clone)]
pub struct EmpiricalSpectrum {
    eigenvalues: Vec<f64>,
    n: usize,
}

impl EmpiricalSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(1/n) Σ λ_i^p`.
    pub fn moment(&self, p: u32) -> f64 {
        self.eigenvalues.iter().map(|l| l.powi(p as i32)).sum::<f64>() / self.n as f64
    }

    /// Empirical CDF (right-continuous step function).
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.eigenvalues.partition_point(|&l| l <= x) as f64 / self.n as f64
    }
}

/// Full spectrum of a symmetric matrix, scaled by `1/√n` and sorted.
pub fn eigenvalues(a: &SymmetricMatrix) -> Result<EmpiricalSpectrum, SimulateError> {
    let n = a.n();
    let raw = symmetric_eigenvalues(a)?;
    let scale = 1.0 / (n as f64).sqrt();
    let eigenvalues: Vec<f64> = raw.into_iter().map(|l| l * scale).collect();
    let sum: f64 = eigenvalues.iter().sum();
    let expect = a.trace() * scale;
    debug_assert!(
        (sum - expect).abs() <= 1e-8 * n as f64 * expect.abs().max(1.0),
        "trace identity violated: {sum} vs {expect}"
    );
    Ok(EmpiricalSpectrum { eigenvalues, n })
}

/// `(1/n) Σ λ_i^p` of a spectrum (free-function form of
/// [`EmpiricalSpectrum::moment`]).
pub fn empirical_moment(s: &EmpiricalSpectrum, p: u32) -> f64 {
    s.moment(p)
}

/// A theoretical CDF the empirical spectrum can be measured against.
pub trait TheoryCdf: Sync {
    fn cdf(&self, x: f64) -> f64;
    /// Points where the CDF bends or jumps; included among the candidate
    /// positions when distances are evaluated.
    fn critical_points(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl TheoryCdf for DensityCurve {
    fn cdf(&self, x: f64) -> f64 {
        self.cdf_at(x)
    }

    fn critical_points(&self) -> Vec<f64> {
        self.lambdas().to_vec()
    }
}

/// The standard semicircle CDF as a comparison target.
#[derive(Debug, Clone, Copy, Default)]
pub struct SemicircleCdf;

impl TheoryCdf for SemicircleCdf {
    fn cdf(&self, x: f64) -> f64 {
        crate::freeconv::semicircle_cdf(x)
    }

    fn critical_points(&self) -> Vec<f64> {
        vec![-2.0, 2.0]
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistancePair {
    pub levy: f64,
    pub ks: f64,
}

/// Lévy distance by bisection on the corridor width, with the constraint
/// checked at the empirical jumps and the theory's critical points, plus the
/// Kolmogorov–Smirnov sup-distance at the same candidates.
pub fn levy_distance(spectrum: &EmpiricalSpectrum, theory: &dyn TheoryCdf) -> DistancePair {
    levy_distance_samples(spectrum.eigenvalues(), &|x| theory.cdf(x), &theory.critical_points())
}

/// Sample-level variant: `sorted` is an ascending sample defining the
/// empirical CDF, `g` the theory CDF, `g_critical` its bend points.
pub fn levy_distance_samples(
    sorted: &[f64],
    g: &dyn Fn(f64) -> f64,
    g_critical: &[f64],
) -> DistancePair {
    assert!(!sorted.is_empty(), "empirical sample must be non-empty");
    let n = sorted.len() as f64;
    let f_at = |x: f64| -> f64 { sorted.partition_point(|&l| l <= x) as f64 / n };
    let f_before = |x: f64| -> f64 { sorted.partition_point(|&l| l < x) as f64 / n };

    let span = sorted[sorted.len() - 1] - sorted[0];
    let nudge = 1e-9 * (1.0 + span.abs());
    let ks = {
        // sup |F - G| is attained at a jump of either side: compare values
        // there and left limits just before (the nudge stands in for the
        // left limit; exact for continuous G)
        let mut worst = 0.0f64;
        for &l in sorted {
            worst = worst.max((g(l) - f_at(l)).abs());
            worst = worst.max((g(l - nudge) - f_before(l)).abs());
        }
        for &t in g_critical {
            worst = worst.max((g(t) - f_at(t)).abs());
            worst = worst.max((g(t - nudge) - f_at(t - nudge)).abs());
        }
        worst
    };

    let satisfies = |eps: f64| -> bool {
        let tol = 1e-12;
        // F(x-ε) - ε <= G(x), tightest just after F's shifted jumps
        for &l in sorted {
            if f_at(l) - g(l + eps) > eps + tol {
                return false;
            }
        }
        // G(x) <= F(x+ε) + ε, tightest just before F's shifted jumps
        for &l in sorted {
            if g(l - eps) - f_before(l) > eps + tol {
                return false;
            }
        }
        for &t in g_critical {
            if f_at(t - eps) - g(t) > eps + tol {
                return false;
            }
            if g(t) - f_at(t + eps) > eps + tol {
                return false;
            }
        }
        true
    };

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    debug_assert!(satisfies(1.0));
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if satisfies(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    DistancePair { levy: hi, ks }
}

/// What the experiment compares its replicates against.
pub enum Theory<'a> {
    Density(&'a DensityCurve),
    Cdf(&'a dyn TheoryCdf),
    /// Moments only: no distance column in the report.
    Moments(&'a [f64]),
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplicateStats {
    pub replicate: usize,
    pub moment_p2: f64,
    pub moment_p4: f64,
    pub moment_p6: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub coeff_entries: Vec<(i32, i32, f64)>,
    pub input_dist: InputDist,
    pub seed: u64,
    pub replicates: usize,
}

/// Aggregated experiment output; eigenvalues are kept per replicate so
/// callers can write spectrum artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ConfigEcho,
    pub replicates: Vec<ReplicateStats>,
    pub mean_moments: [f64; 3],
    pub std_moments: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_levy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_ks: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory_moments: Option<Vec<f64>>,
    #[serde(skip)]
    pub spectra: Vec<Vec<f64>>,
}

/// Runs all replicates (in parallel, reduction order fixed by replicate
/// index), aggregating moments `p ∈ {2,4,6}` and distances to the theory.
pub fn run_experiment(
    cfg: &EnsembleConfig,
    theory: &Theory<'_>,
) -> Result<ExperimentReport, SimulateError> {
    cfg.check()?;
    let results: Vec<Result<(ReplicateStats, Vec<f64>), SimulateError>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| {
            let field = generate_field(cfg, rep)?;
            let spectrum = eigenvalues(&field)?;
            let distances = match theory {
                Theory::Density(curve) => Some(levy_distance(&spectrum, *curve)),
                Theory::Cdf(cdf) => Some(levy_distance(&spectrum, *cdf)),
                _ => None,
            };
            let stats = ReplicateStats {
                replicate: rep,
                moment_p2: spectrum.moment(2),
                moment_p4: spectrum.moment(4),
                moment_p6: spectrum.moment(6),
                levy: distances.map(|d| d.levy),
                ks: distances.map(|d| d.ks),
            };
            Ok((stats, spectrum.eigenvalues().to_vec()))
        })
        .collect();

    let mut replicates = Vec::with_capacity(cfg.replicates);
    let mut spectra = Vec::with_capacity(cfg.replicates);
    for r in results {
        let (stats, eigs) = r?;
        replicates.push(stats);
        spectra.push(eigs);
    }

    let collect = |f: &dyn Fn(&ReplicateStats) -> f64| -> (f64, f64) {
        let vals: Vec<f64> = replicates.iter().map(|r| f(r)).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = if vals.len() > 1 {
            vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64
        } else {
            0.0
        };
        (mean, var.sqrt())
    };
    let (m2, s2) = collect(&|r| r.moment_p2);
    let (m4, s4) = collect(&|r| r.moment_p4);
    let (m6, s6) = collect(&|r| r.moment_p6);
    let mean_levy = replicates
        .iter()
        .map(|r| r.levy)
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.iter().sum::<f64>() / v.len() as f64);
    let mean_ks = replicates
        .iter()
        .map(|r| r.ks)
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.iter().sum::<f64>() / v.len() as f64);

    Ok(ExperimentReport {
        config: ConfigEcho {
            n: cfg.n,
            coeff_entries: cfg.coeffs.to_entry_list(),
            input_dist: cfg.input_dist,
            seed: cfg.seed,
            replicates: cfg.replicates,
        },
        replicates,
        mean_moments: [m2, m4, m6],
        std_moments: [s2, s4, s6],
        mean_levy,
        mean_ks,
        theory_moments: match theory {
            Theory::Moments(m) => Some(m.to_vec()),
            _ => None,
        },
        spectra,
    })
}
