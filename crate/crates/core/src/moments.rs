//! The even moment sequence `β_{2m}` of the limit law, computed three
//! independent ways:
//!
//! * [`beta_combinatorial`] — the truncated partition sum
//!   `β_{2m}^{(N)} = Σ_{σ∈NC₂(2m)} Σ_{k∈S(σ,N)} Π_{(u,v)∈σ} R(k_u,k_v)`,
//!   exact for finite-support kernels once `N` reaches the support radius;
//! * [`beta_recursive`] — the quadrature recursion
//!   `H_{2m}(x) = Σ_k H_{2(m-k)}(x) ∫ f(x,y) H_{2(k-1)}(y) dy` with
//!   `β_{2m} = ∫ H_{2m}`;
//! * [`wick_expected_trace`] — the exact finite-n Gaussian expectation
//!   `E[Tr(A_n^p)]` summed over all pairings, whose `n^{-(m+1)}` scaling
//!   drifts toward `β_{2m}`.
//!
//! Odd moments vanish identically and are not stored.

use thiserror::Error;

use crate::combinatorics::{
    self, catalan_f64, enumerate_nc2, enumerate_pairings, CombinatoricsError,
    KrewerasComplement, PairPartition,
};
use crate::kernel::{CovKernel, SpectralDensity2D};

#[derive(Debug, Error)]
pub enum MomentsError {
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error("truncation radius must be non-negative, got {0}")]
    NegativeTruncation(i32),
    #[error("recursion depth m_max={0} exceeds the cap 20")]
    RecursionCap(usize),
    #[error("wick trace cost cap exceeded: need n <= {max_n} and even p <= {max_p}, got n={n}, p={p}")]
    WickCap { n: usize, p: usize, max_n: usize, max_p: usize },
    #[error("moment value is not finite: beta_{0}")]
    NonFinite(usize),
    #[error(
        "per-partition absolute sum {sum:e} exceeds the bound m! rbar^m = {bound:e}; \
         a kernel or enumeration invariant is broken"
    )]
    BoundViolation { sum: f64, bound: f64 },
}

/// Provenance tag for a computed moment sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    Combinatorial,
    Recursive,
    Empirical,
    WickOracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationInfo {
    Radius(i32),
    Grid { points: usize },
    None,
}

/// Even moments `β_2, β_4, …, β_{2m}`; odd moments are identically zero.
#[derive(Debug, Clone)]
pub struct MomentSequence {
    values: Vec<f64>,
    method: MomentMethod,
    truncation: TruncationInfo,
}

impl MomentSequence {
    pub fn new(
        values: Vec<f64>,
        method: MomentMethod,
        truncation: TruncationInfo,
    ) -> Result<Self, MomentsError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MomentsError::NonFinite(2 * (i + 1)));
        }
        Ok(Self { values, method, truncation })
    }

    /// Largest available even order.
    pub fn max_order(&self) -> usize {
        2 * self.values.len()
    }

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

    /// The `p`-th moment of the limit law; zero for odd `p`.
    pub fn moment(&self, p: usize) -> f64 {
        if p % 2 == 1 {
            0.0
        } else {
            self.beta(p).unwrap_or(f64::NAN)
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn method(&self) -> MomentMethod {
        self.method
    }

    pub fn truncation(&self) -> TruncationInfo {
        self.truncation
    }

    /// `|β_{2m}| <= C_m m! rbar^m` for every stored order.
    pub fn check_bound(&self, rbar: f64) -> Result<(), MomentsError> {
        let mut fact = 1.0;
        for (i, &v) in self.values.iter().enumerate() {
            let m = i + 1;
            fact *= m as f64;
            let bound = catalan_f64(m) * fact * rbar.powi(m as i32);
            if v.abs() > bound * (1.0 + 1e-9) + 1e-9 {
                return Err(MomentsError::BoundViolation { sum: v.abs(), bound });
            }
        }
        Ok(())
    }
}

/// A non-crossing pair partition with its Kreweras complement and a
/// truncation radius: the index set `S(σ,N)` of zero-block-sum tuples.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    sigma: PairPartition,
    kreweras: KrewerasComplement,
    n_trunc: i32,
}

impl ConstraintSet {
    pub fn new(sigma: PairPartition, n_trunc: i32) -> Result<Self, MomentsError> {
        if n_trunc < 0 {
            return Err(MomentsError::NegativeTruncation(n_trunc));
        }
        let kreweras = combinatorics::kreweras(&sigma)?;
        Ok(Self { sigma, kreweras, n_trunc })
    }

    pub fn sigma(&self) -> &PairPartition {
        &self.sigma
    }

    pub fn kreweras(&self) -> &KrewerasComplement {
        &self.kreweras
    }

    pub fn truncation(&self) -> i32 {
        self.n_trunc
    }

    /// Iterates the tuples `k ∈ {-N,…,N}^{2m}` whose coordinates sum to zero
    /// within every Kreweras block. Per block of size `l` the first `l-1`
    /// coordinates run free and the last is determined and range-checked.
    pub fn tuples(&self) -> TupleIter<'_> {
        TupleIter::new(self)
    }
}

/// Odometer over the free coordinates of `S(σ,N)` (the first `l-1`
/// positions of each Kreweras block, in block order); the rightmost free
/// coordinate cycles fastest, each over `-N..=N` ascending.
pub struct TupleIter<'a> {
    cs: &'a ConstraintSet,
    digits: Vec<i32>,
    k: Vec<i32>,
    started: bool,
    done: bool,
}

impl<'a> TupleIter<'a> {
    fn new(cs: &'a ConstraintSet) -> Self {
        let free: usize = cs
            .kreweras
            .blocks()
            .iter()
            .map(|b| b.len().saturating_sub(1))
            .sum();
        let digits = vec![-cs.n_trunc; free];
        let k = vec![0; cs.sigma.size()];
        Self { cs, digits, k, started: false, done: false }
    }

    /// Fills `self.k` from the digits; false when a determined coordinate
    /// falls outside `[-N, N]`.
    fn realize(&mut self) -> bool {
        let n = self.cs.n_trunc;
        let blocks = self.cs.kreweras.blocks();
        let mut di = 0;
        for block in blocks {
            let mut sum: i64 = 0;
            for (pos, &idx) in block.iter().enumerate() {
                if pos + 1 < block.len() {
                    let d = self.digits[di];
                    di += 1;
                    self.k[idx - 1] = d;
                    sum += d as i64;
                } else {
                    let last = -sum;
                    if last.abs() > n as i64 {
                        return false;
                    }
                    self.k[idx - 1] = last as i32;
                }
            }
        }
        true
    }

    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        let n = self.cs.n_trunc;
        for i in (0..self.digits.len()).rev() {
            if self.digits[i] < n {
                self.digits[i] += 1;
                return true;
            }
            self.digits[i] = -n;
        }
        false
    }
}

impl Iterator for TupleIter<'_> {
    type Item = Vec<i32>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            if !self.advance() {
                self.done = true;
                return None;
            }
            if self.realize() {
                return Some(self.k.clone());
            }
        }
    }
}

/// Materialized `S(σ,N)` (convenience over [`ConstraintSet::tuples`]).
pub fn enumerate_s(cs: &ConstraintSet) -> Vec<Vec<i32>> {
    cs.tuples().collect()
}

struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn new() -> Self {
        Self { sum: 0.0, c: 0.0 }
    }

    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `β_{2m}^{(N)}`, summed per partition in enumeration order with
/// compensated accumulation. Exact (up to roundoff) for finite-support
/// kernels whenever `N >= kernel.support_radius()`.
pub fn beta_combinatorial(
    kernel: &CovKernel,
    m: usize,
    n_trunc: i32,
) -> Result<f64, MomentsError> {
    let table = kernel.table();
    let rbar = kernel.rbar();
    let fact: f64 = (1..=m).map(|i| i as f64).product();
    let per_sigma_bound = fact * rbar.powi(m as i32);

    let mut total = Kahan::new();
    for sigma in enumerate_nc2(m)? {
        let pairs: Vec<(usize, usize)> = sigma.pairs().to_vec();
        let cs = ConstraintSet::new(sigma, n_trunc)?;
        let mut part = Kahan::new();
        let mut part_abs = Kahan::new();
        for k in cs.tuples() {
            let mut prod = 1.0;
            for &(u, v) in &pairs {
                prod *= table.get(k[u - 1], k[v - 1]);
                if prod == 0.0 {
                    break;
                }
            }
            if prod != 0.0 {
                part.add(prod);
                part_abs.add(prod.abs());
            }
        }
        if part_abs.sum > per_sigma_bound * (1.0 + 1e-9) + 1e-9 {
            return Err(MomentsError::BoundViolation {
                sum: part_abs.sum,
                bound: per_sigma_bound,
            });
        }
        total.add(part.sum);
    }
    Ok(total.sum)
}

/// `β_2, …, β_{2 m_max}` by the combinatorial sum, bound-checked.
pub fn beta_combinatorial_sequence(
    kernel: &CovKernel,
    m_max: usize,
    n_trunc: i32,
) -> Result<MomentSequence, MomentsError> {
    let values = (1..=m_max)
        .map(|m| beta_combinatorial(kernel, m, n_trunc))
        .collect::<Result<Vec<_>, _>>()?;
    let seq = MomentSequence::new(
        values,
        MomentMethod::Combinatorial,
        TruncationInfo::Radius(n_trunc),
    )?;
    seq.check_bound(kernel.rbar())?;
    Ok(seq)
}

/// Last truncation increment `|β_{2m}^{(N)} - β_{2m}^{(N-1)}|`, a heuristic
/// convergence indicator for kernels truncated below their natural support
/// (no rate is claimed).
pub fn beta_truncation_increment(
    kernel: &CovKernel,
    m: usize,
    n_trunc: i32,
) -> Result<f64, MomentsError> {
    if n_trunc == 0 {
        return Ok(f64::NAN);
    }
    let cur = beta_combinatorial(kernel, m, n_trunc)?;
    let prev = beta_combinatorial(kernel, m, n_trunc - 1)?;
    Ok((cur - prev).abs())
}

/// The recursion output: moments plus the intermediate grid functions
/// `H_0, H_2, …, H_{2 m_max}` (one vector per order, over the grid nodes).
#[derive(Debug)]
pub struct RecursionOutput {
    pub moments: MomentSequence,
    pub h_functions: Vec<Vec<f64>>,
}

pub const RECURSION_CAP: usize = 20;

/// Moments through the spectral-density recursion on the quadrature grid.
pub fn beta_recursive(
    f: &SpectralDensity2D,
    m_max: usize,
) -> Result<RecursionOutput, MomentsError> {
    if m_max > RECURSION_CAP {
        return Err(MomentsError::RecursionCap(m_max));
    }
    let n = f.len();
    let w = f.weights();
    let mut h: Vec<Vec<f64>> = vec![vec![1.0; n]];
    // j_k[i] = ∫ f(x_i, y) H_{2(k-1)}(y) dy, refreshed as orders accumulate
    let mut j_cache: Vec<Vec<f64>> = Vec::new();
    let mut betas = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        // new inner integral against H_{2(m-1)}
        let prev = &h[m - 1];
        let mut jm = vec![0.0; n];
        for (i, jm_i) in jm.iter_mut().enumerate() {
            let mut acc = 0.0;
            for jj in 0..n {
                acc += w[jj] * f.value(i, jj) * prev[jj];
            }
            *jm_i = acc;
        }
        j_cache.push(jm);
        let mut hm = vec![0.0; n];
        for k in 1..=m {
            let outer = &h[m - k];
            let inner = &j_cache[k - 1];
            for i in 0..n {
                hm[i] += outer[i] * inner[i];
            }
        }
        let beta: f64 = hm.iter().zip(w).map(|(hi, wi)| hi * wi).sum();
        betas.push(beta);
        h.push(hm);
    }
    let moments = MomentSequence::new(
        betas,
        MomentMethod::Recursive,
        TruncationInfo::Grid { points: n },
    )?;
    Ok(RecursionOutput { moments, h_functions: h })
}

pub const WICK_MAX_N: usize = 8;
pub const WICK_MAX_P: usize = 6;

/// `(i,j) ⋆ (k,l) = (i∧j − k∧l, k∨l − i∨j)`: the covariance argument of two
/// symmetrized entries, `E[X_{i,j} X_{k,l}] = R((i,j) ⋆ (k,l))`.
#[inline]
fn star(a: (i32, i32), b: (i32, i32)) -> (i32, i32) {
    (a.0.min(a.1) - b.0.min(b.1), b.0.max(b.1) - a.0.max(a.1))
}

/// Exact `E[Tr(A_n^p)]` for the Gaussian ensemble with covariance `kernel`:
/// the full Wick sum over all pairings of the `p` trace factors, for every
/// closed index path in `{1,…,n}^p`.
pub fn wick_expected_trace(
    kernel: &CovKernel,
    n: usize,
    p: usize,
) -> Result<f64, MomentsError> {
    if n == 0 || n > WICK_MAX_N || p == 0 || p % 2 != 0 || p > WICK_MAX_P {
        return Err(MomentsError::WickCap { n, p, max_n: WICK_MAX_N, max_p: WICK_MAX_P });
    }
    let table = kernel.table();
    let pairings: Vec<Vec<(usize, usize)>> = enumerate_pairings(p / 2)?
        .into_iter()
        .map(|pi| pi.pairs().to_vec())
        .collect();

    let mut tuple = vec![1i32; p];
    let mut total = Kahan::new();
    loop {
        // trace factor j (1-based) couples entries (i_{j-1}, i_j), i_0 = i_p
        let endpoint = |j: usize| -> (i32, i32) {
            let prev = if j == 1 { tuple[p - 1] } else { tuple[j - 2] };
            (prev, tuple[j - 1])
        };
        let mut e_i = 0.0;
        for pairing in &pairings {
            let mut prod = 1.0;
            for &(u, v) in pairing {
                let (du, dv) = star(endpoint(u), endpoint(v));
                prod *= table.get(du, dv);
                if prod == 0.0 {
                    break;
                }
            }
            e_i += prod;
        }
        total.add(e_i);

        // odometer over {1,…,n}^p
        let mut pos = p;
        loop {
            if pos == 0 {
                return Ok(total.sum);
            }
            pos -= 1;
            if tuple[pos] < n as i32 {
                tuple[pos] += 1;
                break;
            }
            tuple[pos] = 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::catalan_f64;
    use crate::kernel::{
        ar1_rho, kernel_from_coeffs, separable_kernel, spectral_density, CovKernel,
        LinearCoeffs,
    };
    use crate::quadrature::QuadratureSpec;
    use approx::assert_abs_diff_eq;

    fn pp(pairs: &[(usize, usize)]) -> PairPartition {
        PairPartition::new(pairs.to_vec()).unwrap()
    }

    fn iid() -> CovKernel {
        kernel_from_coeffs(&LinearCoeffs::delta())
    }

    fn ar1(radius: i32) -> CovKernel {
        separable_kernel(&ar1_rho(0.5, radius).0).unwrap()
    }

    /// c = ones/2 on {0,1}^2: the smallest genuinely 2-D dependent kernel.
    fn box_kernel() -> CovKernel {
        let mut e = Vec::new();
        for k in 0..=1 {
            for l in 0..=1 {
                e.push(((k, l), 0.5));
            }
        }
        kernel_from_coeffs(&LinearCoeffs::new(e).unwrap())
    }

    #[test]
    fn tuples_singletons_force_zero() {
        let cs = ConstraintSet::new(pp(&[(1, 2)]), 5).unwrap();
        assert_eq!(enumerate_s(&cs), vec![vec![0, 0]]);
    }

    #[test]
    fn tuples_adjacent_pairs_m2() {
        // Kreweras blocks {1},{3},{2,4}: k1 = k3 = 0, k2 + k4 = 0
        let cs = ConstraintSet::new(pp(&[(1, 2), (3, 4)]), 1).unwrap();
        assert_eq!(
            enumerate_s(&cs),
            vec![vec![0, -1, 0, 1], vec![0, 0, 0, 0], vec![0, 1, 0, -1]]
        );
    }

    #[test]
    fn tuples_nested_pairs_m2() {
        // Kreweras blocks {2},{1,3},{4}: k2 = k4 = 0, k1 + k3 = 0
        let cs = ConstraintSet::new(pp(&[(1, 4), (2, 3)]), 1).unwrap();
        assert_eq!(
            enumerate_s(&cs),
            vec![vec![-1, 0, 1, 0], vec![0, 0, 0, 0], vec![1, 0, -1, 0]]
        );
    }

    /// Brute-force oracle: filter the full cube by the block-sum constraints.
    fn brute_force_s(sigma: &PairPartition, n: i32) -> Vec<Vec<i32>> {
        let blocks = combinatorics::kreweras(sigma).unwrap().blocks().to_vec();
        let len = sigma.size();
        let mut out = Vec::new();
        let total = (2 * n + 1).pow(len as u32);
        for code in 0..total {
            let mut c = code;
            let mut k = vec![0i32; len];
            for ki in k.iter_mut() {
                *ki = c % (2 * n + 1) - n;
                c /= 2 * n + 1;
            }
            if blocks
                .iter()
                .all(|b| b.iter().map(|&i| k[i - 1]).sum::<i32>() == 0)
            {
                out.push(k);
            }
        }
        out
    }

    #[test]
    fn tuple_iterator_matches_brute_force() {
        for (sigma, n) in [
            (pp(&[(1, 2), (3, 4)]), 2),
            (pp(&[(1, 4), (2, 3)]), 2),
            (pp(&[(1, 2), (3, 6), (4, 5)]), 1),
            (pp(&[(1, 6), (2, 5), (3, 4)]), 1),
        ] {
            let cs = ConstraintSet::new(sigma.clone(), n).unwrap();
            let mut got = enumerate_s(&cs);
            let mut want = brute_force_s(&sigma, n);
            got.sort();
            want.sort();
            assert_eq!(got, want, "σ={sigma}");
        }
    }

    #[test]
    fn beta2_is_one_for_unit_variance() {
        for kernel in [iid(), ar1(6), box_kernel()] {
            let b = beta_combinatorial(&kernel, 1, kernel.support_radius()).unwrap();
            if kernel.variance() == 1.0 {
                assert_abs_diff_eq!(b, 1.0, epsilon = 1e-14);
            }
        }
        // box kernel has variance 1 by construction
        assert_eq!(box_kernel().variance(), 1.0);
    }

    #[test]
    fn beta4_closed_form() {
        for kernel in [iid(), ar1(8), box_kernel()] {
            let radius = kernel.support_radius();
            let expect: f64 = 2.0
                * (-radius..=radius)
                    .map(|u| kernel.value(u, 0) * kernel.value(u, 0))
                    .sum::<f64>();
            let got = beta_combinatorial(&kernel, 2, radius).unwrap();
            assert_abs_diff_eq!(got, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn iid_moments_are_catalan() {
        for m in 1..=5 {
            let b = beta_combinatorial(&iid(), m, 0).unwrap();
            assert_eq!(b, catalan_f64(m));
        }
    }

    #[test]
    fn recursion_constant_density_gives_catalan() {
        let f = spectral_density(&iid(), &QuadratureSpec::default()).unwrap();
        let out = beta_recursive(&f, 8).unwrap();
        for m in 1..=8 {
            assert_abs_diff_eq!(
                out.moments.beta(2 * m).unwrap(),
                catalan_f64(m),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn recursion_matches_combinatorial_for_ar1() {
        let kernel = ar1(6);
        let f = spectral_density(&kernel, &QuadratureSpec::single(128)).unwrap();
        let rec = beta_recursive(&f, 3).unwrap();
        for m in 1..=3 {
            let comb = beta_combinatorial(&kernel, m, kernel.support_radius()).unwrap();
            assert_abs_diff_eq!(rec.moments.beta(2 * m).unwrap(), comb, epsilon = 1e-10);
        }
    }

    #[test]
    fn method_agreement_across_corpus() {
        for kernel in [iid(), box_kernel(), ar1(4)] {
            let f = spectral_density(&kernel, &QuadratureSpec::single(128)).unwrap();
            let rec = beta_recursive(&f, 5).unwrap();
            for m in 1..=5 {
                let comb =
                    beta_combinatorial(&kernel, m, kernel.support_radius()).unwrap();
                assert!(
                    (rec.moments.beta(2 * m).unwrap() - comb).abs() <= 1e-8,
                    "m={m}: rec={} comb={}",
                    rec.moments.beta(2 * m).unwrap(),
                    comb
                );
            }
        }
    }

    #[test]
    fn h_functions_respect_sup_bound() {
        for kernel in [box_kernel(), ar1(6)] {
            let rbar = kernel.rbar();
            let f = spectral_density(&kernel, &QuadratureSpec::default()).unwrap();
            let out = beta_recursive(&f, 5).unwrap();
            for (m, hm) in out.h_functions.iter().enumerate().skip(1) {
                let bound = rbar.powi(m as i32) * 4.0f64.powi(m as i32);
                let sup = hm.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                assert!(sup <= bound * (1.0 + 1e-12), "m={m}: sup={sup} bound={bound}");
            }
        }
    }

    #[test]
    fn monotone_truncation_for_nonnegative_kernels() {
        let kernel = ar1(6); // all R >= 0
        for m in 1..=3 {
            let mut prev = f64::NEG_INFINITY;
            for n in 0..=6 {
                let b = beta_combinatorial(&kernel, m, n).unwrap();
                assert!(b >= prev - 1e-12, "m={m} N={n}");
                prev = b;
            }
            assert!(beta_truncation_increment(&kernel, m, 6).unwrap() >= 0.0);
        }
    }

    #[test]
    fn wick_second_power_is_n_squared() {
        for kernel in [iid(), box_kernel()] {
            for n in 1..=8 {
                let t = wick_expected_trace(&kernel, n, 2).unwrap();
                assert_abs_diff_eq!(t, (n * n) as f64 * kernel.variance(), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn wick_scalar_matrix_recovers_gaussian_moments() {
        // n = 1: Tr(A^p) = X^p with X standard normal, so 3 and 15
        assert_abs_diff_eq!(wick_expected_trace(&iid(), 1, 4).unwrap(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wick_expected_trace(&iid(), 1, 6).unwrap(), 15.0, epsilon = 1e-12);
    }

    #[test]
    fn wick_cost_cap() {
        assert!(wick_expected_trace(&iid(), 9, 4).is_err());
        assert!(wick_expected_trace(&iid(), 4, 8).is_err());
        assert!(wick_expected_trace(&iid(), 4, 3).is_err());
    }

    #[test]
    fn wick_drift_toward_beta() {
        for kernel in [iid(), box_kernel()] {
            for m in 1..=2 {
                let beta =
                    beta_combinatorial(&kernel, m, kernel.support_radius()).unwrap();
                let gaps: Vec<f64> = [4usize, 6, 8]
                    .iter()
                    .map(|&n| {
                        let t = wick_expected_trace(&kernel, n, 2 * m).unwrap();
                        (t / (n as f64).powi(m as i32 + 1) - beta).abs()
                    })
                    .collect();
                assert!(gaps[0] >= gaps[1] - 1e-12 && gaps[1] >= gaps[2] - 1e-12, "{gaps:?}");
                assert!(
                    gaps[2] <= 0.35 * beta.abs().max(1e-12),
                    "final gap {} too large for beta {}",
                    gaps[2],
                    beta
                );
            }
        }
    }

    #[test]
    fn sequence_accessors() {
        let seq = beta_combinatorial_sequence(&iid(), 3, 0).unwrap();
        assert_eq!(seq.moment(0), 1.0);
        assert_eq!(seq.moment(3), 0.0);
        assert_eq!(seq.moment(4), 2.0);
        assert_eq!(seq.method(), MomentMethod::Combinatorial);
        assert!(seq.check_bound(1.0).is_ok());
    }
}
