//! Symmetric banded matrices and the two factorizations the solvers need:
//! a band Cholesky for positive definite systems and a partially pivoted
//! band LU for the indefinite shifted systems of Rayleigh-quotient iteration.

use crate::error::{Error, Result};

/// Symmetric band matrix stored by upper diagonals: `diags[k][i] = A[i][i + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    n: usize,
    diags: Vec<Vec<f64>>,
}

impl SymBandMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let diags = (0..=bandwidth)
            .map(|k| vec![0.0; n.saturating_sub(k)])
            .collect();
        Self { n, diags }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.diags.len() - 1
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > self.bandwidth() {
            0.0
        } else {
            self.diags[k][lo]
        }
    }

    /// Adds `value` to the symmetric pair `(i, j)` and `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        assert!(k <= self.bandwidth(), "entry ({i}, {j}) outside band");
        self.diags[k][lo] += value;
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diags[0]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y: Vec<f64> = self.diags[0].iter().zip(x).map(|(a, b)| a * b).collect();
        for (k, d) in self.diags.iter().enumerate().skip(1) {
            for (i, &a) in d.iter().enumerate() {
                y[i] += a * x[i + k];
                y[i + k] += a * x[i];
            }
        }
        y
    }

    /// `self + alpha * diag(d)`.
    pub fn plus_diagonal(&self, alpha: f64, d: &[f64]) -> Self {
        let mut out = self.clone();
        for (a, di) in out.diags[0].iter_mut().zip(d) {
            *a += alpha * di;
        }
        out
    }

    pub fn cholesky(&self) -> Result<BandCholesky> {
        BandCholesky::factor(self)
    }

    pub fn lu(&self) -> Result<BandLu> {
        BandLu::factor(self)
    }
}

/// `A = L L^T` with `L` lower banded, stored row-wise: `l[i][k] = L[i][i - k]`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<Vec<f64>>,
}

impl BandCholesky {
    /// Fails with `IndefiniteForm` when a non-positive pivot appears.
    pub fn factor(a: &SymBandMatrix) -> Result<Self> {
        let n = a.dim();
        let bw = a.bandwidth();
        let mut l = vec![vec![0.0; bw + 1]; n];
        for i in 0..n {
            let jmin = i.saturating_sub(bw);
            for j in jmin..=i {
                let mut s = a.get(i, j);
                let kmin = jmin.max(j.saturating_sub(bw));
                for k in kmin..j {
                    s -= l[i][i - k] * l[j][j - k];
                }
                if j == i {
                    if !(s > 0.0) {
                        return Err(Error::IndefiniteForm { value: s });
                    }
                    l[i][0] = s.sqrt();
                } else {
                    l[i][i - j] = s / l[j][0];
                }
            }
        }
        Ok(Self { n, bw, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut y = b.to_vec();
        for i in 0..self.n {
            let mut s = y[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.l[i][i - k] * y[k];
            }
            y[i] = s / self.l[i][0];
        }
        for i in (0..self.n).rev() {
            let mut s = y[i];
            for k in (i + 1)..(i + 1 + self.bw).min(self.n) {
                s -= self.l[k][k - i] * y[k];
            }
            y[i] = s / self.l[i][0];
        }
        y
    }
}

/// Partially pivoted LU of a band matrix (`kl = ku = bandwidth`).
///
/// Row `i` of the working array covers columns `i - kl ..= i + kl + ku`, which is
/// wide enough to hold the fill created by row interchanges.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    width: usize,
    rows: Vec<f64>,
    mult: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &SymBandMatrix) -> Result<Self> {
        let n = a.dim();
        let kl = a.bandwidth();
        let ku = kl;
        let width = 2 * kl + ku + 1;
        let mut rows = vec![0.0; n * width];
        // column j of row i lives at i * width + (j + kl - i)
        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                rows[idx(i, j)] = a.get(i, j);
            }
        }
        let mut mult = vec![0.0; n * kl.max(1)];
        let mut piv = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = rows[idx(k, k)].abs();
            for i in (k + 1)..=last_row {
                let v = rows[idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularSolve { pivot: k });
            }
            piv[k] = p;
            if p != k {
                for j in k..=last_col {
                    rows.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = rows[idx(k, k)];
            for i in (k + 1)..=last_row {
                let l = rows[idx(i, k)] / pivot;
                mult[k * kl + (i - k - 1)] = l;
                rows[idx(i, k)] = 0.0;
                if l != 0.0 {
                    for j in (k + 1)..=last_col {
                        rows[idx(i, j)] -= l * rows[idx(k, j)];
                    }
                }
            }
        }
        Ok(Self {
            n,
            kl,
            width,
            rows,
            mult,
            piv,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let (n, kl, width) = (self.n, self.kl, self.width);
        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for i in (k + 1)..=(k + kl).min(n - 1) {
                x[i] -= self.mult[k * kl + (i - k - 1)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in (k + 1)..=(k + 2 * kl).min(n - 1) {
                s -= self.rows[idx(k, j)] * x[j];
            }
            x[k] = s / self.rows[idx(k, k)];
        }
        x
    }
}
