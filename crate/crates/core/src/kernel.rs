//! Covariance kernels `R(u,v)` of stationary symmetric matrix ensembles:
//! construction from 2-D linear-process coefficients or separable 1-D
//! autocovariances, invariant validation, and the Fourier transform
//! `f(x,y) = Σ R(k,l) e^{2πi(kx+ly)}` sampled on a quadrature grid.
//!
//! Only finite-support kernels live here; non-summable spectral-density
//! cases are handled directly by [`crate::freeconv`].

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::quadrature::QuadratureSpec;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("coefficient symmetry violated: c({k},{l}) = {a} but c({l},{k}) = {b}")]
    AsymmetricCoeffs { k: i32, l: i32, a: f64, b: f64 },
    #[error("coefficients must have a positive absolute sum")]
    EmptyCoeffs,
    #[error("separable factor must be normalized with rho_0 = 1, got {0}")]
    Normalization(f64),
    #[error("separable factor must be even: rho({k}) = {a} but rho({mk}) = {b}")]
    AsymmetricRho { k: i32, mk: i32, a: f64, b: f64 },
    #[error("kernel invariant violated: {0}")]
    InvalidKernel(String),
    #[error("spectral density has residual imaginary part {residual:e} (tolerance {tol:e}); a kernel invariant is broken")]
    NumericalConsistency { residual: f64, tol: f64 },
    #[error("kernel file: {0}")]
    Parse(String),
    #[error("{0}")]
    InvalidInput(String),
}

/// Finitely supported linear-process coefficients `c_{k,l}`.
///
/// Required to be symmetric (`c_{k,l} = c_{l,k}`) with positive absolute sum.
/// `factor` is set when the coefficients were built as an outer product
/// `c_k c_l`, which unlocks a separable fast path in field generation.
#[derive(Debug, Clone)]
pub struct LinearCoeffs {
    values: BTreeMap<(i32, i32), f64>,
    bound: i32,
    factor: Option<Vec<(i32, f64)>>,
}

impl LinearCoeffs {
    pub fn new(entries: impl IntoIterator<Item = ((i32, i32), f64)>) -> Result<Self, KernelError> {
        let mut values = BTreeMap::new();
        for ((k, l), c) in entries {
            if c != 0.0 {
                values.insert((k, l), c);
            }
        }
        if values.is_empty() {
            return Err(KernelError::EmptyCoeffs);
        }
        for (&(k, l), &c) in &values {
            let mirror = values.get(&(l, k)).copied().unwrap_or(0.0);
            if mirror != c {
                return Err(KernelError::AsymmetricCoeffs { k, l, a: c, b: mirror });
            }
        }
        let bound = values.keys().map(|&(k, l)| k.abs().max(l.abs())).max().unwrap_or(0);
        Ok(Self { values, bound, factor: None })
    }

    /// The single coefficient `c_{0,0} = 1`: i.i.d. inputs pass straight through.
    pub fn delta() -> Self {
        Self {
            values: BTreeMap::from([((0, 0), 1.0)]),
            bound: 0,
            factor: Some(vec![(0, 1.0)]),
        }
    }

    /// Outer product `c_{k,l} = c_k c_l` of a 1-D coefficient sequence.
    pub fn separable(c: &[(i32, f64)]) -> Result<Self, KernelError> {
        let c: Vec<(i32, f64)> = c.iter().copied().filter(|&(_, v)| v != 0.0).collect();
        if c.is_empty() {
            return Err(KernelError::EmptyCoeffs);
        }
        let mut values = BTreeMap::new();
        for &(k, ck) in &c {
            for &(l, cl) in &c {
                values.insert((k, l), ck * cl);
            }
        }
        let bound = c.iter().map(|&(k, _)| k.abs()).max().unwrap_or(0);
        Ok(Self { values, bound, factor: Some(c) })
    }

    /// Largest `max(|k|,|l|)` with a nonzero coefficient.
    pub fn bound(&self) -> i32 {
        self.bound
    }

    pub fn entries(&self) -> impl Iterator<Item = ((i32, i32), f64)> + '_ {
        self.values.iter().map(|(&kl, &c)| (kl, c))
    }

    pub fn get(&self, k: i32, l: i32) -> f64 {
        self.values.get(&(k, l)).copied().unwrap_or(0.0)
    }

    pub fn abs_sum(&self) -> f64 {
        self.values.values().map(|c| c.abs()).sum()
    }

    pub fn squared_sum(&self) -> f64 {
        self.values.values().map(|c| c * c).sum()
    }

    /// The 1-D factor when the coefficients are a declared outer product.
    pub fn factor(&self) -> Option<&[(i32, f64)]> {
        self.factor.as_deref()
    }

    pub fn to_entry_list(&self) -> Vec<(i32, i32, f64)> {
        self.values.iter().map(|(&(k, l), &c)| (k, l, c)).collect()
    }
}

/// A finitely supported covariance kernel `R(u,v)`.
///
/// Invariants: `R(u,v) = R(v,u)`, `R(u,v) = R(-v,-u)`, `R(0,0) > 0`, and when
/// a separable factor `ρ` is present, `R(u,v) = ρ_u ρ_v` with `ρ_0 = 1`.
#[derive(Debug, Clone)]
pub struct CovKernel {
    values: BTreeMap<(i32, i32), f64>,
    support_radius: i32,
    variance: f64,
    separable_factor: Option<BTreeMap<i32, f64>>,
}

/// `R(u,v) = Σ_{k,l} c_{k,l} c_{k-u,l+v}`, exact over the finite support.
pub fn kernel_from_coeffs(c: &LinearCoeffs) -> CovKernel {
    let b = c.bound();
    let mut values = BTreeMap::new();
    for u in -2 * b..=2 * b {
        for v in -2 * b..=2 * b {
            let mut r = 0.0;
            for ((k, l), ckl) in c.entries() {
                r += ckl * c.get(k - u, l + v);
            }
            if r != 0.0 {
                values.insert((u, v), r);
            }
        }
    }
    let out = CovKernel::assemble(values, None);
    debug_assert!(out.validate().all_passed(), "constructed kernel violates invariants");
    out
}

/// Separable kernel `R(u,v) = ρ_u ρ_v` from a normalized even factor.
pub fn separable_kernel(rho: &[(i32, f64)]) -> Result<CovKernel, KernelError> {
    let mut factor = BTreeMap::new();
    for &(k, v) in rho {
        if v != 0.0 {
            factor.insert(k, v);
        }
    }
    let rho0 = factor.get(&0).copied().unwrap_or(0.0);
    if rho0 != 1.0 {
        return Err(KernelError::Normalization(rho0));
    }
    for (&k, &v) in &factor {
        let mirror = factor.get(&(-k)).copied().unwrap_or(0.0);
        if mirror != v {
            return Err(KernelError::AsymmetricRho { k, mk: -k, a: v, b: mirror });
        }
    }
    let mut values = BTreeMap::new();
    for (&u, &ru) in &factor {
        for (&v, &rv) in &factor {
            values.insert((u, v), ru * rv);
        }
    }
    Ok(CovKernel::assemble(values, Some(factor)))
}

impl CovKernel {
    fn assemble(
        values: BTreeMap<(i32, i32), f64>,
        separable_factor: Option<BTreeMap<i32, f64>>,
    ) -> Self {
        let support_radius =
            values.keys().map(|&(u, v)| u.abs().max(v.abs())).max().unwrap_or(0);
        let variance = values.get(&(0, 0)).copied().unwrap_or(0.0);
        Self { values, support_radius, variance, separable_factor }
    }

    /// Builds a kernel from explicit `R(u,v)` entries, rejecting any that
    /// violate the symmetry, reflection, or positive-variance invariants.
    /// Kernels are never silently symmetrized.
    pub fn from_entries(entries: &[(i32, i32, f64)]) -> Result<Self, KernelError> {
        let kernel = Self::from_entries_unchecked(entries);
        let report = kernel.validate();
        if let Some(check) = report.checks.iter().find(|c| !c.passed && c.hard) {
            return Err(KernelError::InvalidKernel(format!("{}: {}", check.name, check.detail)));
        }
        Ok(kernel)
    }

    /// Builds without invariant enforcement, for diagnostic tooling that
    /// wants to report on a broken kernel instead of refusing to hold it.
    pub fn from_entries_unchecked(entries: &[(i32, i32, f64)]) -> Self {
        let mut values = BTreeMap::new();
        for &(u, v, r) in entries {
            if r != 0.0 {
                values.insert((u, v), r);
            }
        }
        Self::assemble(values, None)
    }

    pub fn value(&self, u: i32, v: i32) -> f64 {
        self.values.get(&(u, v)).copied().unwrap_or(0.0)
    }

    pub fn support_radius(&self) -> i32 {
        self.support_radius
    }

    /// `R(0,0)`; kernels with variance other than 1 are carried as-is and
    /// produce dilated limit laws downstream.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn separable_factor(&self) -> Option<Vec<(i32, f64)>> {
        self.separable_factor
            .as_ref()
            .map(|f| f.iter().map(|(&k, &v)| (k, v)).collect())
    }

    pub fn entries(&self) -> impl Iterator<Item = ((i32, i32), f64)> + '_ {
        self.values.iter().map(|(&uv, &r)| (uv, r))
    }

    /// `R̄ = Σ |R(u,v)|`, an exact finite sum over the support.
    pub fn rbar(&self) -> f64 {
        self.values.values().map(|r| r.abs()).sum()
    }

    /// Dense lookup table for the hot moment loops.
    pub(crate) fn table(&self) -> KernelTable {
        let radius = self.support_radius;
        let dim = (2 * radius + 1) as usize;
        let mut values = vec![0.0; dim * dim];
        for (&(u, v), &r) in &self.values {
            let i = (u + radius) as usize;
            let j = (v + radius) as usize;
            values[i * dim + j] = r;
        }
        KernelTable { radius, dim, values }
    }

    /// Report-style diagnostics: symmetry, reflection, positive variance,
    /// the absolute sum, and (separable case) non-negativity of the 1-D
    /// spectral density sampled on 4096 points.
    pub fn validate(&self) -> Diagnostics {
        let mut checks = Vec::new();
        let scale = self.values.values().fold(0.0f64, |a, r| a.max(r.abs())).max(1.0);
        let tol = 1e-12 * scale;

        let mut worst_sym = 0.0f64;
        let mut worst_refl = 0.0f64;
        for (&(u, v), &r) in &self.values {
            worst_sym = worst_sym.max((r - self.value(v, u)).abs());
            worst_refl = worst_refl.max((r - self.value(-v, -u)).abs());
        }
        checks.push(DiagCheck {
            name: "symmetry R(u,v) = R(v,u)",
            passed: worst_sym <= tol,
            hard: true,
            detail: format!("max deviation {worst_sym:e}"),
        });
        checks.push(DiagCheck {
            name: "reflection R(u,v) = R(-v,-u)",
            passed: worst_refl <= tol,
            hard: true,
            detail: format!("max deviation {worst_refl:e}"),
        });
        checks.push(DiagCheck {
            name: "positive variance R(0,0) > 0",
            passed: self.variance > 0.0,
            hard: true,
            detail: format!("R(0,0) = {}", self.variance),
        });
        checks.push(DiagCheck {
            name: "absolute summability",
            passed: self.rbar().is_finite(),
            hard: true,
            detail: format!("rbar = {} over radius {}", self.rbar(), self.support_radius),
        });
        if let Some(factor) = &self.separable_factor {
            let mut min = f64::INFINITY;
            let samples = 4096;
            for i in 0..samples {
                let x = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
                let mut r = 0.0;
                for (&k, &rho) in factor.iter() {
                    r += rho * (k as f64 * x).cos();
                }
                min = min.min(r);
            }
            checks.push(DiagCheck {
                name: "separable spectral density r(x) >= 0",
                passed: min >= -1e-10,
                hard: true,
                detail: format!("sampled min {min:.6}"),
            });
        }
        Diagnostics { checks }
    }
}

/// Dense `R(u,v)` lookup with zero outside the support square.
pub(crate) struct KernelTable {
    radius: i32,
    dim: usize,
    values: Vec<f64>,
}

impl KernelTable {
    #[inline]
    pub fn get(&self, u: i32, v: i32) -> f64 {
        if u.abs() > self.radius || v.abs() > self.radius {
            return 0.0;
        }
        let i = (u + self.radius) as usize;
        let j = (v + self.radius) as usize;
        self.values[i * self.dim + j]
    }
}

#[derive(Debug, Clone)]
pub struct DiagCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Hard failures break downstream theory; soft ones are informational.
    pub hard: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub checks: Vec<DiagCheck>,
}

impl Diagnostics {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn any_hard_failure(&self) -> bool {
        self.checks.iter().any(|c| c.hard && !c.passed)
    }
}

impl std::fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {} ({})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

/// `f(x,y) = Σ_{k,l} R(k,l) e^{2πi(kx+ly)}` sampled on a quadrature grid.
///
/// Real and symmetric by the kernel invariants; values are checked to carry
/// no imaginary residue before the imaginary parts are discarded.
#[derive(Debug, Clone)]
pub struct SpectralDensity2D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
    rbar: f64,
}

pub fn spectral_density(
    kernel: &CovKernel,
    spec: &QuadratureSpec,
) -> Result<SpectralDensity2D, KernelError> {
    let (nodes, weights) = spec.build();
    let m = nodes.len();
    let rbar = kernel.rbar();
    let tol = 1e-12 * rbar.max(1.0);
    let tau = 2.0 * std::f64::consts::PI;

    // e^{2πi k x_i} tabulated per frequency
    let freqs: Vec<i32> = {
        let mut f: Vec<i32> = kernel
            .entries()
            .flat_map(|((k, l), _)| [k, l])
            .collect();
        f.sort_unstable();
        f.dedup();
        f
    };
    let mut phase_re = BTreeMap::new();
    let mut phase_im = BTreeMap::new();
    for &k in &freqs {
        let re: Vec<f64> = nodes.iter().map(|&x| (tau * k as f64 * x).cos()).collect();
        let im: Vec<f64> = nodes.iter().map(|&x| (tau * k as f64 * x).sin()).collect();
        phase_re.insert(k, re);
        phase_im.insert(k, im);
    }

    let mut values = vec![0.0; m * m];
    let mut worst_im = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let mut re = 0.0;
            let mut im = 0.0;
            for ((k, l), r) in kernel.entries() {
                let (ck, sk) = (phase_re[&k][i], phase_im[&k][i]);
                let (cl, sl) = (phase_re[&l][j], phase_im[&l][j]);
                // e^{2πi(k x_i + l x_j)} = (ck + i sk)(cl + i sl)
                re += r * (ck * cl - sk * sl);
                im += r * (ck * sl + sk * cl);
            }
            worst_im = worst_im.max(im.abs());
            values[i * m + j] = re;
        }
    }
    if worst_im > tol {
        return Err(KernelError::NumericalConsistency { residual: worst_im, tol });
    }
    Ok(SpectralDensity2D { nodes, weights, values, rbar })
}

impl SpectralDensity2D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nodes.len() + j]
    }

    pub fn rbar(&self) -> f64 {
        self.rbar
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }
}

/// On-disk kernel description.
///
/// ```json
/// {"type":"coeffs","entries":[[0,0,1.0],[0,1,0.5],[1,0,0.5],[1,1,0.25]]}
/// {"type":"separable","rho":[[0,1.0],[1,0.5],[-1,0.5]]}
/// {"type":"explicit","entries":[[0,0,1.0],[1,-1,0.5],[-1,1,0.5]]}
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelFile {
    Coeffs { entries: Vec<(i32, i32, f64)> },
    Separable { rho: Vec<(i32, f64)> },
    Explicit { entries: Vec<(i32, i32, f64)> },
}

/// A kernel plus, when the description carried them, the generating
/// linear-process coefficients usable for simulation.
#[derive(Debug, Clone)]
pub struct LoadedKernel {
    pub kernel: CovKernel,
    pub coeffs: Option<LinearCoeffs>,
}

pub fn parse_kernel_file(json: &str) -> Result<KernelFile, KernelError> {
    serde_json::from_str(json).map_err(|e| KernelError::Parse(e.to_string()))
}

impl KernelFile {
    /// Strict construction: every invariant enforced, broken input rejected.
    pub fn build(&self) -> Result<LoadedKernel, KernelError> {
        match self {
            KernelFile::Coeffs { entries } => {
                let coeffs =
                    LinearCoeffs::new(entries.iter().map(|&(k, l, c)| ((k, l), c)))?;
                let kernel = kernel_from_coeffs(&coeffs);
                Ok(LoadedKernel { kernel, coeffs: Some(coeffs) })
            }
            KernelFile::Separable { rho } => {
                let kernel = separable_kernel(rho)?;
                Ok(LoadedKernel { kernel, coeffs: None })
            }
            KernelFile::Explicit { entries } => {
                let kernel = CovKernel::from_entries(entries)?;
                Ok(LoadedKernel { kernel, coeffs: None })
            }
        }
    }

    /// Lenient construction for the validator: explicit kernels are built
    /// without enforcement so their diagnostics can be reported. Coefficient
    /// and factor descriptions still have their own input contracts.
    pub fn build_lenient(&self) -> Result<CovKernel, KernelError> {
        match self {
            KernelFile::Explicit { entries } => Ok(CovKernel::from_entries_unchecked(entries)),
            other => other.build().map(|l| l.kernel),
        }
    }
}

/// Truncated AR(1)-type autocovariance `ρ_k = rho^{|k|}`, `|k| <= radius`,
/// with the discarded tail `Σ_{|k|>radius} |ρ_k|` returned alongside.
pub fn ar1_rho(rho: f64, radius: i32) -> (Vec<(i32, f64)>, f64) {
    let out = (-radius..=radius).map(|k| (k, rho.powi(k.abs()))).collect();
    let tail = 2.0 * rho.abs().powi(radius + 1) / (1.0 - rho.abs());
    (out, tail)
}

/// Truncated sinc autocovariance `ρ_k = sin(k)/k`, `|k| <= radius`.
pub fn sinc_rho(radius: i32) -> Vec<(i32, f64)> {
    (-radius..=radius)
        .map(|k| {
            let v = if k == 0 { 1.0 } else { (k as f64).sin() / k as f64 };
            (k, v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn iid_kernel() -> CovKernel {
        kernel_from_coeffs(&LinearCoeffs::delta())
    }

    /// Box coefficients c_{k,l} = 1/(N+1) on {0..N}^2 with N = 1.
    fn box_coeffs_n1() -> LinearCoeffs {
        let mut e = Vec::new();
        for k in 0..=1 {
            for l in 0..=1 {
                e.push(((k, l), 0.5));
            }
        }
        LinearCoeffs::new(e).unwrap()
    }

    #[test]
    fn delta_coeffs_give_iid_kernel() {
        let k = iid_kernel();
        assert_eq!(k.support_radius(), 0);
        assert_eq!(k.value(0, 0), 1.0);
        assert_eq!(k.rbar(), 1.0);
        assert!(k.validate().all_passed());
    }

    #[test]
    fn box_kernel_values_match_direct_convolution() {
        let c = box_coeffs_n1();
        let k = kernel_from_coeffs(&c);
        // independent oracle: direct sum over the four coefficient terms
        let direct = |u: i32, v: i32| -> f64 {
            let mut s = 0.0;
            for kk in 0..=1 {
                for ll in 0..=1 {
                    s += c.get(kk, ll) * c.get(kk - u, ll + v);
                }
            }
            s
        };
        for (expect, got) in [
            (1.0, k.value(0, 0)),
            (0.5, k.value(1, 0)),
            (0.5, k.value(0, 1)),
            (0.5, k.value(-1, 0)),
            (0.5, k.value(0, -1)),
            (0.25, k.value(1, 1)),
            (0.25, k.value(-1, -1)),
            (0.25, k.value(1, -1)),
            (0.25, k.value(-1, 1)),
        ] {
            assert_abs_diff_eq!(expect, got, epsilon = 1e-15);
        }
        for u in -3..=3 {
            for v in -3..=3 {
                assert_abs_diff_eq!(k.value(u, v), direct(u, v), epsilon = 1e-15);
            }
        }
        // attained bound for nonnegative coefficients
        assert_abs_diff_eq!(k.rbar(), c.abs_sum() * c.abs_sum(), epsilon = 1e-12);
        assert_abs_diff_eq!(k.rbar(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn separable_trivial_and_ar1() {
        let iid = separable_kernel(&[(0, 1.0)]).unwrap();
        assert_eq!(iid.value(0, 0), 1.0);
        assert_eq!(iid.support_radius(), 0);

        let (rho, tail) = ar1_rho(0.5, 12);
        let k = separable_kernel(&rho).unwrap();
        assert_abs_diff_eq!(k.value(1, 1), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(k.value(2, 1), 0.125, epsilon = 1e-15);
        assert!(tail < 1e-3);
        let abs: f64 = rho.iter().map(|&(_, v)| v.abs()).sum();
        assert_abs_diff_eq!(k.rbar(), abs * abs, epsilon = 1e-10);
        assert!(k.validate().all_passed());
    }

    #[test]
    fn sinc_factor_constructs() {
        let k = separable_kernel(&sinc_rho(20)).unwrap();
        assert_abs_diff_eq!(k.value(1, 0), (1.0f64).sin(), epsilon = 1e-15);
        assert!(k.separable_factor().is_some());
    }

    #[test]
    fn separable_rejects_bad_factors() {
        assert!(matches!(
            separable_kernel(&[(0, 0.9), (1, 0.5), (-1, 0.5)]),
            Err(KernelError::Normalization(_))
        ));
        assert!(matches!(
            separable_kernel(&[(0, 1.0), (1, 0.5), (-1, 0.3)]),
            Err(KernelError::AsymmetricRho { .. })
        ));
    }

    #[test]
    fn validate_flags_injected_symmetry_violation() {
        let k = CovKernel::from_entries_unchecked(&[(0, 0, 1.0), (1, 0, 0.5), (0, 1, 0.3)]);
        let report = k.validate();
        assert!(!report.all_passed());
        assert!(report
            .checks
            .iter()
            .any(|c| c.name.starts_with("symmetry") && !c.passed));
        assert!(CovKernel::from_entries(&[(0, 0, 1.0), (1, 0, 0.5), (0, 1, 0.3)]).is_err());
    }

    #[test]
    fn validate_flags_negative_spectral_density() {
        let k = separable_kernel(&[(0, 1.0), (1, 0.7), (-1, 0.7)]).unwrap();
        let report = k.validate();
        let check = report
            .checks
            .iter()
            .find(|c| c.name.contains("r(x) >= 0"))
            .unwrap();
        assert!(!check.passed);
        // sampled min is 1 - 1.4 = -0.4
        assert!(check.detail.contains("-0.4"));
    }

    #[test]
    fn spectral_density_iid_is_one() {
        let f = spectral_density(&iid_kernel(), &QuadratureSpec::single(16)).unwrap();
        for i in 0..f.len() {
            for j in 0..f.len() {
                assert_eq!(f.value(i, j), 1.0);
            }
        }
    }

    #[test]
    fn spectral_density_cross_kernel_closed_form() {
        let a = 0.2;
        let k = CovKernel::from_entries(&[
            (0, 0, 1.0),
            (1, 0, a),
            (-1, 0, a),
            (0, 1, a),
            (0, -1, a),
        ])
        .unwrap();
        let f = spectral_density(&k, &QuadratureSpec::single(24)).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        for i in 0..f.len() {
            for j in 0..f.len() {
                let expect = 1.0
                    + 2.0 * a * (tau * f.nodes()[i]).cos()
                    + 2.0 * a * (tau * f.nodes()[j]).cos();
                assert_abs_diff_eq!(f.value(i, j), expect, epsilon = 1e-12);
                assert_abs_diff_eq!(f.value(i, j), f.value(j, i), epsilon = 1e-14);
            }
        }
        // f(0,0) would be 1 + 4a = Σ R(k,l); check through the quadrature sum
        let total: f64 = k.entries().map(|(_, r)| r).sum();
        assert_abs_diff_eq!(total, 1.0 + 4.0 * a, epsilon = 1e-15);
        assert!(f.max_abs() <= k.rbar() * (1.0 + 1e-12));
    }

    #[test]
    fn spectral_density_separable_product_structure() {
        let (rho, _) = ar1_rho(0.5, 6);
        let k = separable_kernel(&rho).unwrap();
        let f = spectral_density(&k, &QuadratureSpec::single(20)).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let r_tilde = |x: f64| -> f64 {
            rho.iter().map(|&(kk, v)| v * (tau * kk as f64 * x).cos()).sum()
        };
        for i in 0..f.len() {
            for j in 0..f.len() {
                let expect = r_tilde(f.nodes()[i]) * r_tilde(f.nodes()[j]);
                assert_abs_diff_eq!(f.value(i, j), expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn spectral_density_detects_broken_kernel() {
        // reflection violated: R(1,0) present without R(0,-1) partner sums
        let k = CovKernel::from_entries_unchecked(&[(0, 0, 1.0), (1, 0, 0.5)]);
        let err = spectral_density(&k, &QuadratureSpec::single(16)).unwrap_err();
        assert!(matches!(err, KernelError::NumericalConsistency { .. }));
    }

    #[test]
    fn kernel_file_roundtrip() {
        let f = parse_kernel_file(
            r#"{"type":"separable","rho":[[0,1.0],[1,0.5],[-1,0.5]]}"#,
        )
        .unwrap();
        let loaded = f.build().unwrap();
        assert_abs_diff_eq!(loaded.kernel.value(1, 1), 0.25, epsilon = 1e-15);

        let f = parse_kernel_file(r#"{"type":"coeffs","entries":[[0,0,1.0]]}"#).unwrap();
        let loaded = f.build().unwrap();
        assert!(loaded.coeffs.is_some());

        assert!(parse_kernel_file(r#"{"entries":[[0,0,1.0]]}"#).is_err());
        assert!(parse_kernel_file(r#"{"type":"coeffs"}"#)
            .unwrap_err()
            .to_string()
            .contains("entries"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Random symmetric coefficient sets always produce valid kernels.
        #[test]
        fn constructed_kernels_pass_validation(
            raw in proptest::collection::vec(((-3i32..=3, -3i32..=3), -2.0f64..2.0), 1..12)
        ) {
            let mut entries = std::collections::BTreeMap::new();
            for ((k, l), c) in raw {
                entries.insert((k, l), c);
                entries.insert((l, k), c);
            }
            prop_assume!(entries.values().any(|&c| c != 0.0));
            let coeffs = LinearCoeffs::new(entries).unwrap();
            let kernel = kernel_from_coeffs(&coeffs);
            prop_assert!(kernel.validate().all_passed());
            let bound = coeffs.abs_sum().powi(2);
            prop_assert!(kernel.rbar() <= bound * (1.0 + 1e-12) + 1e-12);
            prop_assert!(kernel.support_radius() <= 2 * coeffs.bound());

            let f = spectral_density(&kernel, &QuadratureSpec::single(12)).unwrap();
            prop_assert!(f.max_abs() <= kernel.rbar() * (1.0 + 1e-9) + 1e-12);
        }
    }
}
