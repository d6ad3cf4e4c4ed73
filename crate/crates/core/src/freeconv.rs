//! Closed special cases of the limit law.
//!
//! For separable kernels `R(u,v) = R(u,0) R(0,v)` the limit is the free
//! multiplicative convolution `μ_r ⊠ μ_s` of the semicircle law with the law
//! of `r(U)`, `U ~ Uniform(-π,π)`, `r(x) = Σ_k R(k,0) e^{-ikx}`. Its even
//! moments come from Kreweras block sizes:
//! `∫x^{2m} d(μ_r ⊠ μ_s) = Σ_{σ∈NC₂(2m)} Π_j ∫x^{l_j^σ} dμ_r`.
//! Kernels with `R(k,0) = 0` for `k ≠ 0` collapse to a (dilated) semicircle.
//! μ_r is carried as an evaluator plus moments — the block formula needs
//! nothing else; densities of the product laws come from [`crate::stieltjes`].

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{catalan_f64, enumerate_nc2, kreweras, CombinatoricsError};
use crate::kernel::{
    kernel_from_coeffs, separable_kernel, CovKernel, KernelError, LinearCoeffs,
};

#[derive(Debug, Error)]
pub enum FreeConvError {
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("moment of order {order} of the radial law diverges")]
    DivergentMoment { order: usize },
    #[error("radial law requires a separable kernel (no 1-D factor present)")]
    NotSeparable,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

const QUADRATURE_SAMPLES: usize = 4096;
/// Combinatorial moment sums beyond this many tuples fall back to quadrature.
const COMBINATORIAL_BUDGET: f64 = 2e8;

#[derive(Clone)]
enum MomentSource {
    /// Finite 1-D autocovariance: zero-sum tuple sums, exact.
    Rho(Vec<(i32, f64)>),
    /// Direct evaluator: uniform-grid quadrature of `r(x)^j / 2π`.
    Quadrature,
    /// Atoms `(value, probability)`.
    Atomic(Vec<(f64, f64)>),
    /// `r(x) ∝ |x|^{-1/2}`: mean 1, every higher moment diverges.
    InverseSqrt,
}

/// The law μ_r of `r(U)` with `U ~ Uniform(-π,π)`.
pub struct RadialLaw {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    source: MomentSource,
    nonneg_certified: bool,
    kind: &'static str,
}

impl std::fmt::Debug for RadialLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialLaw")
            .field("kind", &self.kind)
            .field("nonneg_certified", &self.nonneg_certified)
            .finish()
    }
}

impl RadialLaw {
    /// Evaluates `r(x)` for `x ∈ [-π, π]`.
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn nonneg_certified(&self) -> bool {
        self.nonneg_certified
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    fn sampled_min(eval: &dyn Fn(f64) -> f64) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..QUADRATURE_SAMPLES {
            let x = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / QUADRATURE_SAMPLES as f64;
            min = min.min(eval(x));
        }
        min
    }

    /// Builds the radial law of a separable kernel from its 1-D factor.
    pub fn from_separable(kernel: &CovKernel) -> Result<Self, FreeConvError> {
        let rho = kernel.separable_factor().ok_or(FreeConvError::NotSeparable)?;
        Ok(Self::from_rho(rho))
    }

    /// Radial law of a finite symmetric autocovariance sequence.
    pub fn from_rho(rho: Vec<(i32, f64)>) -> Self {
        let rho_eval = rho.clone();
        let eval = Arc::new(move |x: f64| -> f64 {
            rho_eval.iter().map(|&(k, v)| v * (k as f64 * x).cos()).sum()
        });
        let nonneg = Self::sampled_min(eval.as_ref()) >= -1e-10;
        Self { eval, source: MomentSource::Rho(rho), nonneg_certified: nonneg, kind: "cosine_polynomial" }
    }
}

/// `∫ x^j dμ_r`: a zero-sum tuple sum over the 1-D factor when one is
/// available, quadrature of `r^j/2π` otherwise, closed forms for the atomic
/// and inverse-square-root laws. Divergent moments are flagged, never
/// approximated.
pub fn mu_r_moment(law: &RadialLaw, j: usize) -> Result<f64, FreeConvError> {
    if j == 0 {
        return Ok(1.0);
    }
    match &law.source {
        MomentSource::Rho(rho) => {
            let radius = rho.iter().map(|&(k, _)| k.abs()).max().unwrap_or(0);
            let width = 2.0 * radius as f64 + 1.0;
            if width.powi(j as i32 - 1) > COMBINATORIAL_BUDGET {
                return Ok(quadrature_moment(law, j));
            }
            Ok(zero_sum_moment(rho, radius, j))
        }
        MomentSource::Quadrature => Ok(quadrature_moment(law, j)),
        MomentSource::Atomic(atoms) => {
            Ok(atoms.iter().map(|&(v, p)| p * v.powi(j as i32)).sum())
        }
        MomentSource::InverseSqrt => {
            if j == 1 {
                Ok(1.0)
            } else {
                Err(FreeConvError::DivergentMoment { order: j })
            }
        }
    }
}

/// `Σ_{k_1+…+k_j=0} Π ρ_{k_i}` over the truncated support.
fn zero_sum_moment(rho: &[(i32, f64)], radius: i32, j: usize) -> f64 {
    let dim = (2 * radius + 1) as usize;
    let mut table = vec![0.0f64; dim];
    for &(k, v) in rho {
        table[(k + radius) as usize] = v;
    }
    if j == 1 {
        return table[radius as usize];
    }
    // digits are the first j-1 coordinates; the last is the negated sum
    let mut digits = vec![-radius; j - 1];
    let mut total = 0.0;
    'outer: loop {
        let sum: i32 = digits.iter().sum();
        if sum.abs() <= radius {
            let mut prod = table[(-sum + radius) as usize];
            for &d in &digits {
                if prod == 0.0 {
                    break;
                }
                prod *= table[(d + radius) as usize];
            }
            total += prod;
        }
        for i in (0..digits.len()).rev() {
            if digits[i] < radius {
                digits[i] += 1;
                continue 'outer;
            }
            digits[i] = -radius;
        }
        break;
    }
    total
}

/// `(2π)^{-1} ∫ r(x)^j dx` on a uniform grid (periodic, so the rectangle
/// rule is spectrally accurate for smooth `r`).
fn quadrature_moment(law: &RadialLaw, j: usize) -> f64 {
    let n = QUADRATURE_SAMPLES;
    let mut acc = 0.0;
    for i in 0..n {
        let x = -std::f64::consts::PI
            + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
        acc += law.eval(x).powi(j as i32);
    }
    acc / n as f64
}

/// Even moments of `μ_r ⊠ μ_s`.
#[derive(Debug, Clone)]
pub struct FreeProductMoments {
    values: Vec<f64>,
}

impl FreeProductMoments {
    /// `β_{2m}` for `1 <= m <= m_max`.
    pub fn beta(&self, two_m: usize) -> Option<f64> {
        if two_m == 0 {
            return Some(1.0);
        }
        if two_m % 2 != 0 {
            return None;
        }
        self.values.get(two_m / 2 - 1).copied()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The Kreweras block-size moment formula for `μ_r ⊠ μ_s`.
pub fn free_mult_semicircle(
    law: &RadialLaw,
    m_max: usize,
) -> Result<FreeProductMoments, FreeConvError> {
    // largest Kreweras block over NC₂(2m), m <= m_max, has size m_max
    let mut mu = vec![1.0; m_max + 1];
    for (j, slot) in mu.iter_mut().enumerate().skip(1) {
        *slot = mu_r_moment(law, j)?;
    }
    let mut values = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let mut total = 0.0;
        for sigma in enumerate_nc2(m)? {
            let blocks = kreweras(&sigma)?;
            let prod: f64 = blocks.block_sizes().iter().map(|&l| mu[l]).product();
            total += prod;
        }
        values.push(total);
    }
    Ok(FreeProductMoments { values })
}

/// Closed-form radial law of the two-sided AR(1) autocovariance
/// `ρ_k = ρ^{|k|}`: `r(x) = (1-ρ²) / (1 - 2ρ cos x + ρ²)`, non-negative for
/// every `|ρ| < 1`.
pub fn ar1_radial(rho: f64) -> Result<RadialLaw, FreeConvError> {
    if !(rho.abs() < 1.0) {
        return Err(FreeConvError::InvalidParameter(format!(
            "AR(1) parameter must satisfy |rho| < 1, got {rho}"
        )));
    }
    let eval = Arc::new(move |x: f64| -> f64 {
        (1.0 - rho * rho) / (1.0 - 2.0 * rho * x.cos() + rho * rho)
    });
    Ok(RadialLaw {
        eval,
        source: MomentSource::Quadrature,
        nonneg_certified: true,
        kind: "ar1",
    })
}

/// Semicircle reference: `2m`-th moment `C_m`.
pub fn semicircle_moment(m: usize) -> f64 {
    catalan_f64(m)
}

/// Semicircle reference: density `√(4-λ²)/2π` on `|λ| <= 2`, zero outside.
pub fn semicircle_density(lambda: f64) -> f64 {
    if lambda.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - lambda * lambda).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// Semicircle CDF in closed form.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * std::f64::consts::PI)
            + (x / 2.0).asin() / std::f64::consts::PI
    }
}

/// An atom of a discrete radial law: value and probability.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Atom {
    pub value: f64,
    pub probability: f64,
}

/// Machine-readable description of a theoretical limit law.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum LsdDescriptor {
    Semicircle,
    DilatedSemicircle {
        sigma: f64,
        support: [f64; 2],
    },
    /// `μ_r ⊠ μ_s` with `μ_r` the law of an AR(1) spectral density.
    FreeProductAr1 {
        rho: f64,
    },
    /// `μ_r ⊠ μ_s` with `r(U) = constant + Σ_k coeffs[k-1]·cos(kU)`.
    FreeProductCosine {
        constant: f64,
        cosine_coeffs: Vec<f64>,
    },
    /// `μ_r ⊠ μ_s` with an atomic `μ_r`; equals the classical product of
    /// `√value`-scaled Bernoulli and semicircle factors.
    FreeProductAtomic {
        atoms: Vec<Atom>,
    },
    /// `μ_r ⊠ μ_s` with `r(x) = (√π/2)|x|^{-1/2}`: moments of order four and
    /// higher are infinite.
    FreeProductInverseSqrt {
        second_moment: f64,
        fourth_moment_finite: bool,
    },
}

/// Named constructions with their theoretical limit laws.
#[derive(Debug, Clone, Copy)]
pub enum Preset {
    /// Two-dimensional AR(1) field, `E[Z_{i,j} Z_{i+k,j+l}] = ρ^{|k|+|l|}`,
    /// truncated at the given radius.
    Example1 { rho: f64, radius: i32 },
    /// Moving window sum of i.i.d. Gaussians over `{0..N}²`.
    Example2 { n: u32 },
    /// Independent copies of a 1-D autocovariance-γ process laid along
    /// rows: `R(u,v) = γ(u)·1(v = -u)`, truncated.
    Example3 { rho: f64, radius: i32 },
    /// Orthogonal-row coefficient array `scale·[[1,1],[1,-1]]`.
    Example4 { scale: f64 },
    /// Separable sinc kernel `R(u,v) = (sin u/u)(sin v/v)`.
    Example5,
    /// Inverse-square-root spectral density, truncated at the given radius.
    Example6 { radius: i32 },
}

/// Everything a preset yields: the kernel (when finitely supported), the
/// generating coefficients (when the construction has them), the radial law
/// (when separable), the limit-law descriptor, and the truncation tail
/// `Σ_{|k|>radius}|ρ_k|` when an infinite-support factor was cut.
#[derive(Debug)]
pub struct PresetBundle {
    pub kernel: Option<CovKernel>,
    pub coeffs: Option<LinearCoeffs>,
    pub radial: Option<RadialLaw>,
    pub descriptor: LsdDescriptor,
    pub truncation_tail: Option<f64>,
}

pub fn preset(p: Preset) -> Result<PresetBundle, FreeConvError> {
    match p {
        Preset::Example1 { rho, radius } => {
            if !(rho.abs() < 1.0) || radius < 1 {
                return Err(FreeConvError::InvalidParameter(format!(
                    "example1 needs |rho| < 1 and radius >= 1, got rho={rho}, radius={radius}"
                )));
            }
            let (factor, tail) = crate::kernel::ar1_rho(rho, radius);
            let kernel = separable_kernel(&factor)?;
            Ok(PresetBundle {
                kernel: Some(kernel),
                coeffs: None,
                radial: Some(ar1_radial(rho)?),
                descriptor: LsdDescriptor::FreeProductAr1 { rho },
                truncation_tail: Some(tail),
            })
        }
        Preset::Example2 { n } => {
            let np1 = n as f64 + 1.0;
            let mut entries = Vec::new();
            for k in 0..=n as i32 {
                for l in 0..=n as i32 {
                    entries.push(((k, l), 1.0));
                }
            }
            let coeffs = LinearCoeffs::new(entries)?;
            let kernel = kernel_from_coeffs(&coeffs);
            // displayed limit law: N+1 + 2(N+1)^{-1} Σ_k (N-k+1)² cos(kU),
            // free-multiplied with the semicircle
            let cosine_coeffs: Vec<f64> = (1..=n as i32)
                .map(|k| 2.0 * (np1 - k as f64).powi(2) / np1)
                .collect();
            let constant = np1;
            let cc = cosine_coeffs.clone();
            let eval = Arc::new(move |x: f64| -> f64 {
                constant + cc.iter().enumerate().map(|(i, c)| c * ((i as f64 + 1.0) * x).cos()).sum::<f64>()
            });
            let radial = RadialLaw {
                eval,
                source: MomentSource::Quadrature,
                nonneg_certified: false,
                kind: "cosine_polynomial",
            };
            Ok(PresetBundle {
                kernel: Some(kernel),
                coeffs: Some(coeffs),
                radial: Some(radial),
                descriptor: LsdDescriptor::FreeProductCosine { constant, cosine_coeffs },
                truncation_tail: None,
            })
        }
        Preset::Example3 { rho, radius } => {
            if !(rho.abs() < 1.0) || radius < 1 {
                return Err(FreeConvError::InvalidParameter(format!(
                    "example3 needs |rho| < 1 and radius >= 1, got rho={rho}, radius={radius}"
                )));
            }
            // R(u,v) = γ(u)·1(v = -u) with γ(u) = ρ^{|u|}
            let mut entries = Vec::new();
            for u in -radius..=radius {
                entries.push((u, -u, rho.powi(u.abs())));
            }
            let kernel = CovKernel::from_entries(&entries)?;
            Ok(PresetBundle {
                kernel: Some(kernel),
                coeffs: None,
                radial: None,
                descriptor: LsdDescriptor::Semicircle,
                truncation_tail: None,
            })
        }
        Preset::Example4 { scale } => {
            if scale == 0.0 || !scale.is_finite() {
                return Err(FreeConvError::InvalidParameter(
                    "example4 scale must be nonzero and finite".into(),
                ));
            }
            let entries = vec![
                ((0, 0), scale),
                ((0, 1), scale),
                ((1, 0), scale),
                ((1, 1), -scale),
            ];
            let coeffs = LinearCoeffs::new(entries)?;
            let kernel = kernel_from_coeffs(&coeffs);
            let sigma = coeffs.squared_sum().sqrt();
            Ok(PresetBundle {
                kernel: Some(kernel),
                coeffs: Some(coeffs),
                radial: None,
                descriptor: LsdDescriptor::DilatedSemicircle {
                    sigma,
                    support: [-2.0 * sigma, 2.0 * sigma],
                },
                truncation_tail: None,
            })
        }
        Preset::Example5 => {
            // r = π on |x| <= 1, else 0: atoms π w.p. 1/π and 0 w.p. 1 - 1/π
            let pi = std::f64::consts::PI;
            let eval = Arc::new(move |x: f64| if x.abs() <= 1.0 { pi } else { 0.0 });
            let atoms = vec![
                Atom { value: pi, probability: 1.0 / pi },
                Atom { value: 0.0, probability: 1.0 - 1.0 / pi },
            ];
            let radial = RadialLaw {
                eval,
                source: MomentSource::Atomic(
                    atoms.iter().map(|a| (a.value, a.probability)).collect(),
                ),
                nonneg_certified: true,
                kind: "atomic",
            };
            Ok(PresetBundle {
                kernel: None,
                coeffs: None,
                radial: Some(radial),
                descriptor: LsdDescriptor::FreeProductAtomic { atoms },
                truncation_tail: None,
            })
        }
        Preset::Example6 { radius } => {
            if radius < 1 {
                return Err(FreeConvError::InvalidParameter(
                    "example6 radius must be >= 1".into(),
                ));
            }
            let eval = Arc::new(move |x: f64| -> f64 {
                if x == 0.0 {
                    f64::INFINITY
                } else {
                    0.5 * std::f64::consts::PI.sqrt() / x.abs().sqrt()
                }
            });
            let radial = RadialLaw {
                eval,
                source: MomentSource::InverseSqrt,
                nonneg_certified: true,
                kind: "inverse_sqrt",
            };
            let rho = example6_truncated_rho(radius);
            let kernel = separable_kernel(&rho)?;
            Ok(PresetBundle {
                kernel: Some(kernel),
                coeffs: None,
                radial: Some(radial),
                descriptor: LsdDescriptor::FreeProductInverseSqrt {
                    second_moment: 1.0,
                    fourth_moment_finite: false,
                },
                truncation_tail: None,
            })
        }
    }
}

/// Truncated autocovariance of the inverse-square-root spectral density.
pub fn example6_truncated_rho(radius: i32) -> Vec<(i32, f64)> {
    (-radius..=radius).map(|k| (k, example6_rcoeff(k))).collect()
}

/// `R(n,0) = (2π)^{-1} ∫ e^{inx} (√π/2)|x|^{-1/2} dx` over `[-π,π]`.
///
/// After the substitution `x = t²` this is `(1/√π)∫₀^{√π} cos(n t²) dt`;
/// evaluated by oscillatory quadrature for small `n` and by the stationary
/// phase expansion at `X = √(nπ)` (where `sin(X²)` vanishes identically) for
/// large `n`.
pub fn example6_rcoeff(n: i32) -> f64 {
    let n = n.unsigned_abs() as u64;
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    if n <= 32 {
        // composite Simpson over enough panels to resolve the n/2 oscillations
        let panels = 1536 * (n as usize + 1);
        let h = sqrt_pi / panels as f64;
        let g = |t: f64| (nf * t * t).cos();
        let mut acc = g(0.0) + g(sqrt_pi);
        for i in 1..panels {
            let t = i as f64 * h;
            acc += if i % 2 == 0 { 2.0 * g(t) } else { 4.0 * g(t) };
        }
        let integral = acc * h / 3.0;
        integral / sqrt_pi
    } else {
        // F(X) = √(π/8) - (-1)^n/(4X³) + (15/16)(-1)^n/X⁷ + O(X^{-11})
        let x2 = nf * std::f64::consts::PI;
        let x3 = x2.powf(1.5);
        let x7 = x2.powf(3.5);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let f = (std::f64::consts::PI / 8.0).sqrt() + sign * (-0.25 / x3 + 15.0 / 16.0 / x7);
        f / (std::f64::consts::PI * nf).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ar1_rho;
    use crate::moments::beta_combinatorial;
    use approx::assert_abs_diff_eq;

    fn iid_law() -> RadialLaw {
        RadialLaw::from_rho(vec![(0, 1.0)])
    }

    #[test]
    fn iid_moments_are_one_and_product_is_catalan() {
        let law = iid_law();
        for j in 1..=8 {
            assert_eq!(mu_r_moment(&law, j).unwrap(), 1.0);
        }
        let fp = free_mult_semicircle(&law, 6).unwrap();
        for m in 1..=6 {
            assert_eq!(fp.beta(2 * m).unwrap(), catalan_f64(m));
        }
    }

    #[test]
    fn first_moment_is_one_for_normalized_factors() {
        let (rho, _) = ar1_rho(0.5, 12);
        let law = RadialLaw::from_rho(rho);
        assert_abs_diff_eq!(mu_r_moment(&law, 1).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn second_moment_matches_parseval() {
        let (rho, _) = ar1_rho(0.5, 12);
        let sum_sq: f64 = rho.iter().map(|&(_, v)| v * v).sum();
        let law = RadialLaw::from_rho(rho);
        let combinatorial = mu_r_moment(&law, 2).unwrap();
        assert_abs_diff_eq!(combinatorial, sum_sq, epsilon = 1e-12);
        // quadrature route agrees (Parseval)
        let q = quadrature_moment(&law, 2);
        assert_abs_diff_eq!(combinatorial, q, epsilon = 1e-9);
    }

    #[test]
    fn higher_moments_cross_check_quadrature() {
        let (rho, _) = ar1_rho(0.5, 8);
        let law = RadialLaw::from_rho(rho);
        for j in 3..=5 {
            let comb = mu_r_moment(&law, j).unwrap();
            let quad = quadrature_moment(&law, j);
            assert!((comb - quad).abs() < 1e-9, "j={j}: comb={comb} quad={quad}");
        }
    }

    #[test]
    fn free_product_m2_structure() {
        let (rho, _) = ar1_rho(0.5, 12);
        let law = RadialLaw::from_rho(rho.clone());
        let fp = free_mult_semicircle(&law, 2).unwrap();
        let mu1 = mu_r_moment(&law, 1).unwrap();
        let mu2 = mu_r_moment(&law, 2).unwrap();
        assert_abs_diff_eq!(fp.beta(4).unwrap(), 2.0 * mu1 * mu1 * mu2, epsilon = 1e-12);
        let sum_sq: f64 = rho.iter().map(|&(_, v)| v * v).sum();
        assert_abs_diff_eq!(fp.beta(4).unwrap(), 2.0 * sum_sq, epsilon = 1e-12);
    }

    #[test]
    fn separable_equivalence_with_combinatorial_betas() {
        let (rho, _) = ar1_rho(0.5, 6);
        let kernel = separable_kernel(&rho).unwrap();
        let law = RadialLaw::from_separable(&kernel).unwrap();
        let fp = free_mult_semicircle(&law, 5).unwrap();
        for m in 1..=5 {
            let beta = beta_combinatorial(&kernel, m, kernel.support_radius()).unwrap();
            assert!(
                (fp.beta(2 * m).unwrap() - beta).abs() <= 1e-9,
                "m={m}: freeconv={} comb={beta}",
                fp.beta(2 * m).unwrap()
            );
        }
    }

    #[test]
    fn ar1_radial_closed_form() {
        let law = ar1_radial(0.5).unwrap();
        assert_abs_diff_eq!(law.eval(0.0), 3.0, epsilon = 1e-15);
        assert!(law.nonneg_certified());
        assert!(ar1_radial(0.0).unwrap().eval(1.234) == 1.0);
        assert!(ar1_radial(1.0).is_err());

        // quadrature moments match the truncated combinatorial route
        let (rho, _) = ar1_rho(0.5, 40);
        let truncated = RadialLaw::from_rho(rho);
        for j in 1..=3 {
            let a = mu_r_moment(&law, j).unwrap();
            let b = mu_r_moment(&truncated, j).unwrap();
            assert!((a - b).abs() < 1e-8, "j={j}: {a} vs {b}");
        }
    }

    #[test]
    fn radial_symmetry_sampled() {
        for law in [ar1_radial(0.3).unwrap(), iid_law()] {
            for i in 0..64 {
                let x = std::f64::consts::PI * (i as f64 + 0.5) / 64.0;
                assert!((law.eval(x) - law.eval(-x)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn preset_example4_dilation() {
        let bundle = preset(Preset::Example4 { scale: 1.0 }).unwrap();
        match bundle.descriptor {
            LsdDescriptor::DilatedSemicircle { sigma, support } => {
                assert_abs_diff_eq!(sigma, 2.0, epsilon = 1e-15);
                assert_eq!(support, [-4.0, 4.0]);
            }
            other => panic!("unexpected descriptor {other:?}"),
        }
        // orthogonal rows force R(k,0) = 0 for k != 0
        let kernel = bundle.kernel.unwrap();
        assert_eq!(kernel.value(1, 0), 0.0);
        assert_abs_diff_eq!(kernel.value(0, 0), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn preset_example5_atoms() {
        let bundle = preset(Preset::Example5).unwrap();
        let law = bundle.radial.unwrap();
        let pi = std::f64::consts::PI;
        assert_abs_diff_eq!(mu_r_moment(&law, 1).unwrap(), 1.0, epsilon = 1e-15);
        for j in 2..=4 {
            assert_abs_diff_eq!(
                mu_r_moment(&law, j).unwrap(),
                pi.powi(j as i32 - 1),
                epsilon = 1e-12
            );
        }
        match bundle.descriptor {
            LsdDescriptor::FreeProductAtomic { atoms } => {
                assert_abs_diff_eq!(atoms[0].value, pi, epsilon = 1e-15);
                assert_abs_diff_eq!(atoms[0].probability, 1.0 / pi, epsilon = 1e-15);
            }
            other => panic!("unexpected descriptor {other:?}"),
        }
    }

    #[test]
    fn preset_example3_is_semicircle() {
        let bundle = preset(Preset::Example3 { rho: 0.5, radius: 8 }).unwrap();
        assert!(matches!(bundle.descriptor, LsdDescriptor::Semicircle));
        let kernel = bundle.kernel.unwrap();
        assert_eq!(kernel.value(1, 0), 0.0);
        assert_abs_diff_eq!(kernel.value(1, -1), 0.5, epsilon = 1e-15);
        assert!(kernel.validate().all_passed());
    }

    #[test]
    fn preset_example2_second_moment() {
        let bundle = preset(Preset::Example2 { n: 1 }).unwrap();
        let law = bundle.radial.unwrap();
        // mean of the displayed law is N+1, so β₂ = (N+1)²
        let fp = free_mult_semicircle(&law, 1).unwrap();
        assert_abs_diff_eq!(fp.beta(2).unwrap(), 4.0, epsilon = 1e-9);
        let kernel = bundle.kernel.unwrap();
        assert_abs_diff_eq!(kernel.variance(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn example6_moment_divergence_flags() {
        let bundle = preset(Preset::Example6 { radius: 4 }).unwrap();
        let law = bundle.radial.unwrap();
        assert_eq!(mu_r_moment(&law, 1).unwrap(), 1.0);
        assert!(matches!(
            mu_r_moment(&law, 2),
            Err(FreeConvError::DivergentMoment { order: 2 })
        ));
        assert!(free_mult_semicircle(&law, 2).is_err());
    }

    #[test]
    fn example6_coefficients() {
        assert_eq!(example6_rcoeff(0), 1.0);
        assert_eq!(example6_rcoeff(5), example6_rcoeff(-5));
        // independent fine-grid Simpson oracle for a few small orders
        for n in [1i32, 2, 3, 10] {
            let nf = n as f64;
            let sqrt_pi = std::f64::consts::PI.sqrt();
            let panels = 200_000;
            let h = sqrt_pi / panels as f64;
            let g = |t: f64| (nf * t * t).cos();
            let mut acc = g(0.0) + g(sqrt_pi);
            for i in 1..panels {
                acc += if i % 2 == 0 { 2.0 * g(i as f64 * h) } else { 4.0 * g(i as f64 * h) };
            }
            let oracle = acc * h / 3.0 / sqrt_pi;
            assert_abs_diff_eq!(example6_rcoeff(n), oracle, epsilon = 1e-10);
        }
        // quadrature and asymptotic branches agree across the crossover
        for n in 28..=36 {
            let nf = n as f64;
            let x2 = nf * std::f64::consts::PI;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let f = (std::f64::consts::PI / 8.0).sqrt()
                + sign * (-0.25 / x2.powf(1.5) + 15.0 / 16.0 / x2.powf(3.5));
            let asymptotic = f / (std::f64::consts::PI * nf).sqrt();
            assert_abs_diff_eq!(example6_rcoeff(n), asymptotic, epsilon = 1e-9);
        }
    }

    #[test]
    fn example6_truncated_fourth_moment_grows_without_bound() {
        // β₄(K) = 2(1 + 2 Σ_{n<=K} R(n,0)²) grows like ln K: verify strict
        // growth through the free-product route where feasible, then push the
        // same sum past 10 with the asymptotic coefficients.
        let mut last = 0.0;
        let beta4_direct = |k: i32| -> f64 {
            let sum_sq: f64 = (1..=k).map(|n| example6_rcoeff(n).powi(2)).sum();
            2.0 * (1.0 + 2.0 * sum_sq)
        };
        for k in [10, 100, 1000] {
            let law = RadialLaw::from_rho(example6_truncated_rho(k));
            let fp = free_mult_semicircle(&law, 2).unwrap();
            let beta4 = fp.beta(4).unwrap();
            assert_abs_diff_eq!(beta4, beta4_direct(k), epsilon = 1e-9);
            assert!(beta4 > last, "K={k}");
            last = beta4;
        }
        // H_K/2 growth: passes 10 near K ≈ 5·10⁶
        let mut sum_sq = 0.0;
        let mut exceeded = None;
        for n in 1..=10_000_000i32 {
            sum_sq += example6_rcoeff(n).powi(2);
            if 2.0 * (1.0 + 2.0 * sum_sq) > 10.0 {
                exceeded = Some(n);
                break;
            }
        }
        let k = exceeded.expect("fourth moment must exceed 10 by K = 1e7");
        assert!(k > 1000, "logarithmic growth cannot clear 10 this early: K={k}");
    }

    #[test]
    fn semicircle_reference_values() {
        assert_eq!(semicircle_moment(3), 5.0);
        assert_abs_diff_eq!(semicircle_density(0.0), 1.0 / std::f64::consts::PI, epsilon = 1e-15);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_abs_diff_eq!(semicircle_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_eq!(semicircle_cdf(-2.5), 0.0);
        assert_eq!(semicircle_cdf(2.5), 1.0);
        // CDF differentiates back to the density
        let h = 1e-6;
        for x in [-1.5, -0.5, 0.3, 1.7] {
            let d = (semicircle_cdf(x + h) - semicircle_cdf(x - h)) / (2.0 * h);
            assert_abs_diff_eq!(d, semicircle_density(x), epsilon = 1e-8);
        }
    }

    #[test]
    fn invalid_preset_parameters() {
        assert!(preset(Preset::Example1 { rho: 1.5, radius: 12 }).is_err());
        assert!(preset(Preset::Example4 { scale: 0.0 }).is_err());
        assert!(preset(Preset::Example6 { radius: 0 }).is_err());
    }
}
