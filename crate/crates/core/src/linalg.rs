//! Small dense Hermitian linear algebra: Jacobi eigendecomposition,
//! pseudo-inverse and Gram–Schmidt projection.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    /// Fills the upper triangle from `f(i, j)`, `i ≤ j`, and mirrors it by conjugation.
    /// Diagonal entries keep only their real part.
    pub fn from_upper<F: FnMut(usize, usize) -> Result<Complex64>>(n: usize, mut f: F) -> Result<Self> {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j)?;
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite("matrix entry"));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)` consistently.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        if i == j {
            self.data[i * self.n + i] = Complex64::new(v.re, 0.0);
        } else {
            self.data[i * self.n + j] = v;
            self.data[j * self.n + i] = v.conj();
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).fold(Complex64::new(0.0, 0.0), |acc, j| acc + self.get(i, j) * x[j]))
            .collect()
    }

    /// `x* A x`, real for Hermitian `A`.
    pub fn quadratic_form(&self, x: &[Complex64]) -> f64 {
        let ax = self.mul_vec(x);
        x.iter().zip(&ax).map(|(xi, axi)| (xi.conj() * axi).re).sum()
    }

    fn real_embedding(&self) -> Vec<f64> {
        // [[Re A, -Im A], [Im A, Re A]]
        let n = self.n;
        let m = 2 * n;
        let mut out = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                out[i * m + j] = v.re;
                out[(i + n) * m + (j + n)] = v.re;
                out[i * m + (j + n)] = -v.im;
                out[(i + n) * m + j] = v.im;
            }
        }
        out
    }
}

/// Eigendecomposition of a real symmetric `m×m` matrix (row-major) by cyclic
/// Jacobi rotations. Returns eigenvalues and column eigenvectors (row-major `V`).
pub fn symmetric_eigen(a: &[f64], m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = a.to_vec();
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return Ok((vec![0.0; m], v));
    }
    for sweep in 0..100 {
        // graded matrices can leave rotations cycling at the round-off floor;
        // past the usual sweep count fall back to the absolute criterion
        let floor = if sweep < 20 { 1e-300 } else { f64::EPSILON } * frob;
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                // relative threshold keeps small eigenvalues accurate
                if apq.abs() <= f64::EPSILON * (app * aqq).abs().sqrt() || apq.abs() <= floor {
                    continue;
                }
                rotated = true;
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - s * vkq;
                    v[k * m + q] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            let w = (0..m).map(|i| a[i * m + i]).collect();
            return Ok((w, v));
        }
    }
    let off = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * m + j] * a[i * m + j]).sum::<f64>();
    Err(Error::NonConvergence { panels: 100, error_estimate: off.sqrt() / frob })
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &HermitianMatrix) -> Result<Vec<f64>> {
    let m = 2 * a.dim();
    let (mut w, _) = symmetric_eigen(&a.real_embedding(), m)?;
    w.sort_by(|x, y| x.total_cmp(y));
    // the real embedding doubles every eigenvalue
    Ok(w.into_iter().step_by(2).collect())
}

/// Moore–Penrose inverse together with rank and conditioning data.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoInverse {
    pub matrix: HermitianMatrix,
    pub rank: usize,
    /// `σ_max / σ_min` over all singular values (infinite if singular).
    pub condition_estimate: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Pseudo-inverse with singular values below `rel_cutoff · σ_max` discarded.
pub fn pseudo_inverse(a: &HermitianMatrix, rel_cutoff: f64) -> Result<PseudoInverse> {
    let n = a.dim();
    let m = 2 * n;
    let (w, v) = symmetric_eigen(&a.real_embedding(), m)?;
    let smax = w.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let smin = w.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
    let cutoff = rel_cutoff * smax;
    let mut p = vec![0.0; m * m];
    let mut kept = 0;
    for (k, &lambda) in w.iter().enumerate() {
        if lambda.abs() <= cutoff || lambda == 0.0 {
            continue;
        }
        kept += 1;
        let inv = 1.0 / lambda;
        for i in 0..m {
            let vik = v[i * m + k] * inv;
            if vik == 0.0 {
                continue;
            }
            for j in 0..m {
                p[i * m + j] += vik * v[j * m + k];
            }
        }
    }
    let mut out = HermitianMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            // top-left block is Re, bottom-left is Im; average the two copies
            let re = 0.5 * (p[i * m + j] + p[(i + n) * m + (j + n)]);
            let im = 0.5 * (p[(i + n) * m + j] - p[i * m + (j + n)]);
            out.set(i, j, Complex64::new(re, im));
        }
    }
    let condition_estimate = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let min_eigenvalue = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_eigenvalue = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(PseudoInverse { matrix: out, rank: kept / 2, condition_estimate, min_eigenvalue, max_eigenvalue })
}

fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    // ⟨x, y⟩ = Σ x_n conj(y_n)
    x.iter().zip(y).fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b.conj())
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of `span(vectors)` by modified Gram–Schmidt with
/// reorthogonalization. Vectors whose residual falls below `rel_tol` times
/// their original norm are dropped as dependent.
pub fn orthonormal_basis(vectors: &[Vec<Complex64>], rel_tol: f64) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut w: Vec<Complex64> = v.iter().map(|x| x / n0).collect();
        for _pass in 0..2 {
            for q in &basis {
                let c = inner(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let nw = norm(&w);
        if nw > rel_tol {
            basis.push(w.into_iter().map(|x| x / nw).collect());
        }
    }
    basis
}

/// `x − P x` for `P` the orthogonal projection onto the span of an orthonormal basis.
pub fn project_out(basis: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    let mut r = x.to_vec();
    for _pass in 0..2 {
        for q in basis {
            let c = inner(&r, q);
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= c * qi;
            }
        }
    }
    r
}

pub fn vector_norm(x: &[Complex64]) -> f64 {
    norm(x)
}
