//! Self-contained dense symmetric eigensolver: Householder reduction to
//! tridiagonal form followed by the implicit-shift QL iteration, in the
//! classic EISPACK tred2/tql2 arrangement.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {dev:e} exceeds 1e-12 of scale")]
    NotSymmetric { i: usize, j: usize, dev: f64 },
    #[error("QL iteration failed to converge for eigenvalue {index} after 50 sweeps")]
    NoConvergence { index: usize },
}

/// Square symmetric matrix in row-major dense storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Largest symmetry deviation relative to the largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn check_symmetric(&self) -> Result<(), EigenError> {
        let scale = self.data.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let dev = (self.get(i, j) - self.get(j, i)).abs();
                if dev > 1e-12 * scale {
                    return Err(EigenError::NotSymmetric { i, j, dev });
                }
            }
        }
        Ok(())
    }
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(a: &SymmetricMatrix) -> Result<Vec<f64>, EigenError> {
    a.check_symmetric()?;
    let mut work = a.clone();
    let (mut d, mut e) = householder_tridiag(&mut work, false);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Full decomposition: eigenvalues ascending with matching eigenvector
/// columns in the returned matrix.
pub fn symmetric_eigen_decomposition(
    a: &SymmetricMatrix,
) -> Result<(Vec<f64>, SymmetricMatrix), EigenError> {
    a.check_symmetric()?;
    let n = a.n();
    let mut work = a.clone();
    let (mut d, mut e) = householder_tridiag(&mut work, true);
    ql_implicit(&mut d, &mut e, Some(&mut work))?;
    // sort eigenpairs ascending
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = SymmetricMatrix::zeros(n);
    for (col_new, &col_old) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col_new, work.get(row, col_old));
        }
    }
    Ok((values, vectors))
}

/// Householder reduction; `a` is overwritten (with the accumulated
/// orthogonal transform when `accumulate` is set). Returns the diagonal and
/// subdiagonal (`e[0]` unused).
fn householder_tridiag(a: &mut SymmetricMatrix, accumulate: bool) -> (Vec<f64>, Vec<f64>) {
    let n = a.n();
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a.get(i, k).abs()).sum();
            if scale == 0.0 {
                e[i] = a.get(i, l);
            } else {
                for k in 0..=l {
                    let v = a.get(i, k) / scale;
                    a.set(i, k, v);
                    h += v * v;
                }
                let f = a.get(i, l);
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a.set(i, l, f - g);
                let mut f_acc = 0.0;
                for j in 0..=l {
                    if accumulate {
                        a.set(j, i, a.get(i, j) / h);
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a.get(j, k) * a.get(i, k);
                    }
                    for k in j + 1..=l {
                        g += a.get(k, j) * a.get(i, k);
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a.get(i, j);
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a.get(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let v = a.get(j, k) - f * e[k] - g * a.get(i, k);
                        a.set(j, k, v);
                    }
                }
            }
        } else {
            e[i] = a.get(i, l);
        }
        d[i] = h;
    }
    if accumulate {
        d[0] = 0.0;
    }
    e[0] = 0.0;
    for i in 0..n {
        if accumulate {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += a.get(i, k) * a.get(k, j);
                    }
                    for k in 0..i {
                        let v = a.get(k, j) - g * a.get(k, i);
                        a.set(k, j, v);
                    }
                }
            }
            d[i] = a.get(i, i);
            a.set(i, i, 1.0);
            for j in 0..i {
                a.set(j, i, 0.0);
                a.set(i, j, 0.0);
            }
        } else {
            d[i] = a.get(i, i);
        }
    }
    (d, e)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, optionally rotating
/// eigenvector columns along.
fn ql_implicit(
    d: &mut [f64],
    e: &mut [f64],
    mut z: Option<&mut SymmetricMatrix>,
) -> Result<(), EigenError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(EigenError::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    for k in 0..n {
                        f = zm.get(k, i + 1);
                        zm.set(k, i + 1, s * zm.get(k, i) + c * f);
                        zm.set(k, i, c * zm.get(k, i) - s * f);
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
