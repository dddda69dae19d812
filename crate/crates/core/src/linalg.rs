//! Fixed-capacity dense linear algebra for the small systems that show up at a
//! single point of a metric (dimension at most [`MAX_DIM`]).

use crate::math;

/// Largest supported manifold dimension (3 spatial + 1 augmented).
pub const MAX_DIM: usize = 4;

pub type Vector = [f64; MAX_DIM];

/// Cholesky pivots at or below this are treated as loss of definiteness.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix {
    n: usize,
    e: [[f64; MAX_DIM]; MAX_DIM],
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
pub struct NotPositiveDefinite {
    pub pivot: usize,
    pub value: f64,
}

impl Matrix {
    pub fn zeros(n: usize) -> Matrix {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        Matrix { n, e: [[0.0; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.e[i][i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.e[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.e[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.e[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.e[i][..self.n]
    }

    /// `vᵀ M w`.
    pub fn bilinear(&self, v: &[f64], w: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            let mut r = 0.0;
            for j in 0..self.n {
                r += self.e[i][j] * w[j];
            }
            s += v[i] * r;
        }
        s
    }

    /// `vᵀ M w` for symmetric `M`, exactly symmetric in `v` and `w`.
    pub fn sym_bilinear(&self, v: &[f64], w: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.e[i][i] * (v[i] * w[i]);
            for j in i + 1..self.n {
                s += self.e[i][j] * (v[i] * w[j] + v[j] * w[i]);
            }
        }
        s
    }

    pub fn quad(&self, v: &[f64]) -> f64 {
        self.bilinear(v, v)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vector {
        let mut out = [0.0; MAX_DIM];
        for i in 0..self.n {
            out[i] = (0..self.n).map(|j| self.e[i][j] * v[j]).sum();
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(math::abs(self.e[i][j] - other.e[i][j]));
            }
        }
        m
    }

    pub fn cholesky(&self) -> Result<Cholesky, NotPositiveDefinite> {
        let n = self.n;
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut d = self.e[j][j];
            for k in 0..j {
                d -= l.e[j][k] * l.e[j][k];
            }
            if !(d > PIVOT_TOLERANCE) {
                return Err(NotPositiveDefinite { pivot: j, value: d });
            }
            let djj = math::sqrt(d);
            l.e[j][j] = djj;
            for i in j + 1..n {
                let mut s = self.e[i][j];
                for k in 0..j {
                    s -= l.e[i][k] * l.e[j][k];
                }
                l.e[i][j] = s / djj;
            }
        }
        Ok(Cholesky { l })
    }

    /// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi).
    pub fn symmetric_eigenvalues(&self) -> Vector {
        let n = self.n;
        let mut a = self.e;
        for _sweep in 0..64 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[p][q] * a[p][q];
                }
            }
            if off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q] == 0.0 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = {
                        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                        sign / (math::abs(theta) + math::sqrt(theta * theta + 1.0))
                    };
                    let c = 1.0 / math::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev = [0.0; MAX_DIM];
        for i in 0..n {
            ev[i] = a[i][i];
        }
        ev[..n].sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.symmetric_eigenvalues()[0]
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone, Copy)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.l.n
    }

    pub fn solve(&self, b: &[f64]) -> Vector {
        let n = self.l.n;
        let l = &self.l.e;
        let mut y = [0.0; MAX_DIM];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        let mut x = [0.0; MAX_DIM];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k][i] * x[k];
            }
            x[i] = s / l[i][i];
        }
        x
    }

    /// `bᵀ A⁻¹ b`.
    pub fn inverse_quad(&self, b: &[f64]) -> f64 {
        let n = self.l.n;
        let l = &self.l.e;
        let mut y = [0.0; MAX_DIM];
        let mut s2 = 0.0;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
            s2 += y[i] * y[i];
        }
        s2
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.l.n;
        let mut inv = Matrix::zeros(n);
        for j in 0..n {
            let mut e = [0.0; MAX_DIM];
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv.e[i][j] = col[i];
            }
        }
        inv
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` for a numerically singular system.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Option<Vector> {
    let n = a.n;
    let mut m = a.e;
    let mut rhs = [0.0; MAX_DIM];
    rhs[..n].copy_from_slice(&b[..n]);
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(0.0f64, |acc, (i, j)| acc.max(math::abs(m[i][j])));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| math::abs(m[r][col]).total_cmp(&math::abs(m[s][col])))?;
        if math::abs(m[piv][col]) <= 1e-14 * scale {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = [0.0; MAX_DIM];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for k in i + 1..n {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_and_inverts() {
        let a = Matrix::from_fn(3, |i, j| if i == j { 4.0 } else { 1.0 / (1 + i + j) as f64 });
        let ch = a.cholesky().unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = ch.solve(&b);
        let back = a.mul_vec(&x);
        for i in 0..3 {
            assert!((back[i] - b[i]).abs() < 1e-14);
        }
        let inv = ch.inverse();
        assert!((inv.quad(&b) - ch.inverse_quad(&b)).abs() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(a.cholesky().is_err());
        assert!(Matrix::zeros(2).cholesky().is_err());
    }

    #[test]
    fn jacobi_eigenvalues() {
        let a = Matrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let ev = a.symmetric_eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        let d = Matrix::from_fn(3, |i, j| if i == j { [3.0, -1.0, 2.0][i] } else { 0.0 });
        assert_eq!(d.min_eigenvalue(), -1.0);
    }

    #[test]
    fn gaussian_elimination() {
        let a = Matrix::from_fn(3, |i, j| [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]][i][j]);
        let x = solve_linear(&a, &[3.0, 2.0, 4.0]).unwrap();
        for (xi, e) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((xi - e).abs() < 1e-14);
        }
        assert!(solve_linear(&Matrix::zeros(2), &[1.0, 1.0]).is_none());
    }
}
