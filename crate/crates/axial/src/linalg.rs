//! Small dense matrices and a cyclic Jacobi eigensolver.
//!
//! Everything here works at the dimensions the tests need (p up to a few
//! tens, p^2 x p^2 structural matrices), so a plain row-major `Vec<f64>`
//! is enough.

use crate::error::{Error, Result};

/// Square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        Matrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
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

    #[inline]
    pub fn add_assign_at(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a != 0.0 {
                    for j in 0..n {
                        out.add_assign_at(i, j, a * other.get(k, j));
                    }
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// x' A x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Column-stacking vectorization.
    pub fn vec(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors; column k pairs with `values[k]`.
    pub vectors: Matrix,
}

impl SymEigen {
    /// Eigenvector for the k-th largest eigenvalue.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.vectors.dim())
            .map(|i| self.vectors.get(i, k))
            .collect()
    }
}

/// Cyclic Jacobi with threshold strategy. Converges when the off-diagonal
/// Frobenius mass falls below 1e-14 times the Frobenius norm of the input;
/// at most 100 sweeps.
pub fn jacobi_eigen(a: &Matrix) -> Result<SymEigen> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let off_norm = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m.get(i, j) * m.get(i, j);
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _sweep in 0..100 {
        if off_norm(&m) < 1e-14 * norm {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Apply the rotation to rows/columns p and q.
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged && off_norm(&m) >= 1e-12 * norm {
        return Err(Error::Numeric("jacobi eigensolver did not converge".into()));
    }

    // Sort descending, ties broken by original column order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.get(j, j)
            .partial_cmp(&m.get(i, i))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&k| m.get(k, k)).collect();
    let mut vectors = Matrix::zeros(n);
    for (newcol, &oldcol) in order.iter().enumerate() {
        // Fix the sign so the largest-magnitude component is positive.
        let mut imax = 0;
        let mut best = 0.0;
        for i in 0..n {
            let x = v.get(i, oldcol).abs();
            if x > best {
                best = x;
                imax = i;
            }
        }
        let sign = if v.get(imax, oldcol) < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors.set(i, newcol, sign * v.get(i, oldcol));
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix via its eigensystem.
/// Eigenvalues with |lambda| below `tol` times the largest are dropped.
pub fn sym_pinv(a: &Matrix, tol: f64) -> Result<Matrix> {
    let eig = jacobi_eigen(a)?;
    let n = a.dim();
    let lmax = eig
        .values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mut out = Matrix::zeros(n);
    for k in 0..n {
        let lam = eig.values[k];
        if lam.abs() > tol * lmax {
            let inv = 1.0 / lam;
            for i in 0..n {
                for j in 0..n {
                    out.add_assign_at(i, j, inv * eig.vectors.get(i, k) * eig.vectors.get(j, k));
                }
            }
        }
    }
    Ok(out)
}

/// The p^2 x p^2 commutation matrix K_p: K_p vec(A) = vec(A').
pub fn commutation_matrix(p: usize) -> Matrix {
    let mut k = Matrix::zeros(p * p);
    for i in 0..p {
        for j in 0..p {
            // vec index of (i,j) is j*p + i; K maps it to the index of (j,i).
            k.set(i * p + j, j * p + i, 1.0);
        }
    }
    k
}

/// J_p = (vec I_p)(vec I_p)'.
pub fn j_matrix(p: usize) -> Matrix {
    let vec_i = Matrix::identity(p).vec();
    let mut j = Matrix::zeros(p * p);
    for a in 0..p * p {
        for b in 0..p * p {
            j.set(a, b, vec_i[a] * vec_i[b]);
        }
    }
    j
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector
/// `theta`, via the Householder reflection mapping e1 to theta. Returns
/// p-1 column vectors.
pub fn orthogonal_complement_basis(theta: &[f64]) -> Vec<Vec<f64>> {
    let p = theta.len();
    // H = I - 2 w w' / (w'w) with w = e1 - theta maps theta to e1 and
    // vice versa; its columns 2..p span theta-perp. Degenerate w (theta
    // close to e1) falls back to the canonical basis.
    let mut w: Vec<f64> = theta.to_vec();
    w[0] -= 1.0;
    let wnorm2: f64 = w.iter().map(|x| x * x).sum();
    let mut basis = Vec::with_capacity(p - 1);
    for col in 1..p {
        let mut h = vec![0.0; p];
        h[col] = 1.0;
        if wnorm2 > 1e-24 {
            let coef = 2.0 * w[col] / wnorm2;
            for i in 0..p {
                h[i] -= coef * w[i];
            }
        }
        basis.push(h);
    }
    basis
}
