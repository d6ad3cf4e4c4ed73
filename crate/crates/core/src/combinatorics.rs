//! Pair partitions and non-crossing pair partitions of `{1,…,2m}`, their
//! Kreweras complements, and Catalan numbers.
//!
//! Indices are 1-based throughout the public interface. Enumeration order is
//! deterministic: the partner of the smallest unpaired element ascends first,
//! then the rule applies recursively to what remains.

use num_bigint::BigUint;
use thiserror::Error;

/// Hard cap on the half-size `m` accepted by the enumeration routines.
///
/// `m = 8` means 2,027,025 pairings and 1,430 non-crossing ones; anything
/// larger is rejected rather than silently slow.
pub const ENUMERATION_CAP: usize = 8;

#[derive(Debug, Error)]
pub enum CombinatoricsError {
    #[error("half-size m={m} exceeds the enumeration cap m <= {cap}")]
    SizeLimit { m: usize, cap: usize },
    #[error("half-size m must be a positive integer")]
    ZeroSize,
    #[error("invalid pair partition: {0}")]
    InvalidPartition(String),
    #[error("Kreweras complement is only defined here for non-crossing pair partitions")]
    Crossing,
}

/// A pair partition of `{1,…,2m}`.
///
/// Pairs are stored sorted by first element, with `u < v` inside each pair,
/// and every index in `1..=2m` appears exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairPartition {
    m: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    /// Builds a partition from arbitrary pair order, normalizing it.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self, CombinatoricsError> {
        let m = pairs.len();
        if m == 0 {
            return Err(CombinatoricsError::ZeroSize);
        }
        let n = 2 * m;
        let mut seen = vec![false; n + 1];
        let mut normalized = Vec::with_capacity(m);
        for (a, b) in pairs {
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if u == v || u == 0 || v > n {
                return Err(CombinatoricsError::InvalidPartition(format!(
                    "pair ({a},{b}) out of range for 2m={n}"
                )));
            }
            for idx in [u, v] {
                if seen[idx] {
                    return Err(CombinatoricsError::InvalidPartition(format!(
                        "index {idx} appears more than once"
                    )));
                }
                seen[idx] = true;
            }
            normalized.push((u, v));
        }
        normalized.sort_unstable();
        Ok(Self { m, pairs: normalized })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Total number of elements, `2m`.
    pub fn size(&self) -> usize {
        2 * self.m
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// True iff no two pairs `(a,b)`, `(c,d)` satisfy `a < c < b < d`.
    pub fn is_noncrossing(&self) -> bool {
        for (i, &(_, b)) in self.pairs.iter().enumerate() {
            for &(c, d) in &self.pairs[i + 1..] {
                // pairs are sorted, so a < c always; they cross iff c < b < d
                if c < b && b < d {
                    return false;
                }
            }
        }
        true
    }

    /// The partner of each element, as a 1-based involution array.
    fn partner(&self) -> Vec<usize> {
        let mut p = vec![0usize; self.size() + 1];
        for &(u, v) in &self.pairs {
            p[u] = v;
            p[v] = u;
        }
        p
    }
}

impl std::fmt::Display for PairPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &(u, v) in &self.pairs {
            write!(f, "({u},{v})")?;
        }
        Ok(())
    }
}

/// The Kreweras complement of a non-crossing pair partition of `{1,…,2m}`.
///
/// Blocks are ordered so that the maximal element of `V_i` is strictly less
/// than that of `V_j` whenever `i < j`, elements ascend within each block,
/// and `t_map[i-1] = j` iff `i ∈ V_j` (both 1-based). The complement is the
/// maximal partition of the barred copies `{1̄,…,2m̄}` keeping the union
/// non-crossing on the interleaved cycle `1,1̄,…,2m,2m̄`; barred labels are
/// identified with plain indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrewerasComplement {
    blocks: Vec<Vec<usize>>,
    t_map: Vec<usize>,
}

impl KrewerasComplement {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block sizes in block order.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// `t_map[i-1]` is the 1-based index of the block containing `i`.
    pub fn t_map(&self) -> &[usize] {
        &self.t_map
    }
}

/// Kreweras complement via the cycle method: blocks are the cycles of the
/// permutation `i ↦ σ(i+1)` (cyclically), with `σ` read as an involution.
pub fn kreweras(sigma: &PairPartition) -> Result<KrewerasComplement, CombinatoricsError> {
    if !sigma.is_noncrossing() {
        return Err(CombinatoricsError::Crossing);
    }
    let n = sigma.size();
    let partner = sigma.partner();
    let next = |i: usize| -> usize { partner[if i == n { 1 } else { i + 1 }] };

    let mut visited = vec![false; n + 1];
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(sigma.m() + 1);
    for start in 1..=n {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        while !visited[cur] {
            visited[cur] = true;
            cycle.push(cur);
            cur = next(cur);
        }
        cycle.sort_unstable();
        blocks.push(cycle);
    }
    // strict total order: maxima are distinct elements of {1,…,2m}
    blocks.sort_by_key(|b| *b.last().expect("blocks are non-empty"));

    let mut t_map = vec![0usize; n];
    for (bi, block) in blocks.iter().enumerate() {
        for &i in block {
            t_map[i - 1] = bi + 1;
        }
    }
    Ok(KrewerasComplement { blocks, t_map })
}

fn check_cap(m: usize) -> Result<(), CombinatoricsError> {
    if m == 0 {
        return Err(CombinatoricsError::ZeroSize);
    }
    if m > ENUMERATION_CAP {
        return Err(CombinatoricsError::SizeLimit { m, cap: ENUMERATION_CAP });
    }
    Ok(())
}

fn enumerate_impl(m: usize, prune_crossing: bool) -> Vec<PairPartition> {
    let n = 2 * m;
    let mut used = vec![false; n + 1];
    let mut current: Vec<(usize, usize)> = Vec::with_capacity(m);
    let mut out = Vec::new();
    fn recurse(
        n: usize,
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<PairPartition>,
        prune: bool,
    ) {
        let a = match (1..=n).find(|&i| !used[i]) {
            Some(a) => a,
            None => {
                out.push(PairPartition { m: n / 2, pairs: current.clone() });
                return;
            }
        };
        used[a] = true;
        for b in a + 1..=n {
            if used[b] {
                continue;
            }
            if prune && current.iter().any(|&(u, v)| u < a && a < v && v < b) {
                // (u,v) with u < a < v < b crosses (a,b); any completion stays crossing
                continue;
            }
            used[b] = true;
            current.push((a, b));
            recurse(n, used, current, out, prune);
            current.pop();
            used[b] = false;
        }
        used[a] = false;
    }
    recurse(n, &mut used, &mut current, &mut out, prune_crossing);
    out
}

/// All `(2m−1)!!` pair partitions of `{1,…,2m}` in deterministic order.
pub fn enumerate_pairings(m: usize) -> Result<Vec<PairPartition>, CombinatoricsError> {
    check_cap(m)?;
    Ok(enumerate_impl(m, false))
}

/// The non-crossing pair partitions of `{1,…,2m}`; `catalan(m)` of them,
/// in the same order as `enumerate_pairings` filtered by `is_noncrossing`.
pub fn enumerate_nc2(m: usize) -> Result<Vec<PairPartition>, CombinatoricsError> {
    check_cap(m)?;
    Ok(enumerate_impl(m, true))
}

/// `C_m = (2m)! / (m! (m+1)!)`, exact.
pub fn catalan(m: usize) -> BigUint {
    let mut c = BigUint::from(1u32);
    for i in 0..m {
        // C_{i+1} = C_i * 2(2i+1) / (i+2)
        c = c * BigUint::from(2 * (2 * i as u64 + 1)) / BigUint::from(i as u64 + 2);
    }
    c
}

/// `catalan(m)` as an `f64`; exact for every `m` reachable by the moment
/// pipelines (`C_30 ≈ 3.8e15 < 2^53`).
pub fn catalan_f64(m: usize) -> f64 {
    use num_traits::ToPrimitive;
    catalan(m).to_f64().expect("catalan number representable")
}
