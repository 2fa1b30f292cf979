//! Dense linear algebra for small symmetric systems.
//!
//! Model dimensions here are tiny (a handful of series), so everything is
//! straightforward row-major storage with O(n^3) factorizations.

use crate::{Error, Result};

/// Pivots below this floor fail the Cholesky factorization.
pub const PD_FLOOR: f64 = 1e-10;

/// Dense symmetric matrix; writes through [`SymMatrix::set`] keep both mirrored
/// entries in sync.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated once per unordered pair (i <= j).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from full rows, rejecting non-square or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let scale = rows[i][j].abs().max(rows[j][i].abs()).max(1.0);
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j}): {} vs {}",
                        rows[i][j], rows[j][i]
                    )));
                }
            }
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Lower Cholesky factor; fails with [`Error::NotPositiveDefinite`] when a
    /// pivot drops below [`PD_FLOOR`].
    pub fn cholesky(&self) -> Result<Cholesky> {
        let n = self.dim;
        let mut lower = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut acc = self.get(i, j);
                for k in 0..j {
                    acc -= lower[i * n + k] * lower[j * n + k];
                }
                if i == j {
                    if acc < PD_FLOOR {
                        return Err(Error::NotPositiveDefinite {
                            index: i,
                            pivot: acc,
                            floor: PD_FLOOR,
                        });
                    }
                    lower[i * n + j] = acc.sqrt();
                } else {
                    lower[i * n + j] = acc / lower[j * n + j];
                }
            }
        }
        Ok(Cholesky { dim: n, lower })
    }

    /// log det via the Cholesky factor.
    pub fn logdet(&self) -> Result<f64> {
        Ok(self.cholesky()?.logdet())
    }

    /// Solves `A x = b` for symmetric positive definite `A`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.cholesky()?.solve(b)
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.lower[i * self.dim + j]
        } else {
            0.0
        }
    }

    pub fn logdet(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.lower[i * self.dim + i].ln())
            .sum::<f64>()
            * 2.0
    }

    /// Solves `L y = b` by forward substitution.
    pub fn forward_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = b[i];
            for k in 0..i {
                acc -= self.lower[i * n + k] * y[k];
            }
            y[i] = acc / self.lower[i * n + i];
        }
        Ok(y)
    }

    /// Solves `A x = b` using the stored factor.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim;
        let mut x = self.forward_solve(b)?;
        for i in (0..n).rev() {
            let mut acc = x[i];
            for k in (i + 1)..n {
                acc -= self.lower[k * n + i] * x[k];
            }
            x[i] = acc / self.lower[i * n + i];
        }
        Ok(x)
    }

    /// Applies `L z`, the affine map sending standard normals to `N(0, A)`.
    pub fn transform(&self, z: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..=i).map(|k| self.lower[i * n + k] * z[k]).sum())
            .collect()
    }
}

/// Log density of `N(mu, Sigma)` at `x`, with `Sigma` passed by Cholesky factor.
pub fn mvn_logpdf(x: &[f64], mu: &[f64], chol: &Cholesky) -> Result<f64> {
    let n = chol.dim();
    if x.len() != n || mu.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len().max(mu.len()),
        });
    }
    let diff: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
    let y = chol.forward_solve(&diff)?;
    let mahalanobis_sq: f64 = y.iter().map(|v| v * v).sum();
    Ok(-0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + chol.logdet() + mahalanobis_sq))
}

/// General square matrix; used for lag cross-covariances, which are not
/// symmetric when the thinning rates differ across components.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn one_by_one_cholesky() {
        let m = SymMatrix::from_rows(&[vec![4.0]]).unwrap();
        let chol = m.cholesky().unwrap();
        assert_relative_eq!(chol.lower(0, 0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(chol.logdet(), 4.0_f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            m.cholesky(),
            Err(Error::NotPositiveDefinite { index: 1, .. })
        ));
    }

    #[test]
    fn tiny_diagonal_at_floor_is_accepted() {
        let m = SymMatrix::diagonal(&[1e-10, 1e-10]);
        assert!(m.cholesky().is_ok());
        let below = SymMatrix::diagonal(&[1e-11]);
        assert!(below.cholesky().is_err());
    }

    #[test]
    fn asymmetric_rows_rejected() {
        let err = SymMatrix::from_rows(&[vec![1.0, 0.3], vec![0.2, 1.0]]);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn solve_round_trip() {
        let a = SymMatrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap();
        let b = vec![1.0, -2.0, 0.5];
        let x = a.solve(&b).unwrap();
        for i in 0..3 {
            let ax: f64 = (0..3).map(|j| a.get(i, j) * x[j]).sum();
            assert_relative_eq!(ax, b[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn mvn_logpdf_against_explicit_bivariate_formula() {
        let sigma = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let chol = sigma.cholesky().unwrap();
        let mu = [0.3, -0.2];
        let x = [1.0, 0.7];
        let det: f64 = 2.0 * 1.0 - 0.5 * 0.5;
        let inv = [[1.0 / det, -0.5 / det], [-0.5 / det, 2.0 / det]];
        let d = [x[0] - mu[0], x[1] - mu[1]];
        let quad = d[0] * d[0] * inv[0][0] + 2.0 * d[0] * d[1] * inv[0][1] + d[1] * d[1] * inv[1][1];
        let expected = -0.5 * (2.0 * (2.0 * std::f64::consts::PI).ln() + det.ln() + quad);
        assert_relative_eq!(
            mvn_logpdf(&x, &mu, &chol).unwrap(),
            expected,
            epsilon = 1e-13
        );
    }

    #[test]
    fn standard_normal_logpdf_at_origin() {
        let chol = SymMatrix::identity(1).cholesky().unwrap();
        assert_relative_eq!(
            mvn_logpdf(&[0.0], &[0.0], &chol).unwrap(),
            -0.5 * (2.0 * std::f64::consts::PI).ln(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn transform_applies_lower_factor() {
        let sigma = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let chol = sigma.cholesky().unwrap();
        let v = chol.transform(&[1.0, 1.0]);
        assert_relative_eq!(v[0], chol.lower(0, 0), epsilon = 1e-14);
        assert_relative_eq!(v[1], chol.lower(1, 0) + chol.lower(1, 1), epsilon = 1e-14);
    }

    fn spd_strategy(dim: usize) -> impl Strategy<Value = SymMatrix> {
        proptest::collection::vec(-1.0f64..1.0, dim * dim).prop_map(move |vals| {
            // A^T A + 0.1 I is comfortably positive definite
            SymMatrix::from_fn(dim, |i, j| {
                let dot: f64 = (0..dim)
                    .map(|k| vals[k * dim + i] * vals[k * dim + j])
                    .sum();
                dot + if i == j { 0.1 } else { 0.0 }
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cholesky_reconstructs_input(m in (1usize..=5).prop_flat_map(spd_strategy)) {
            let chol = m.cholesky().unwrap();
            let n = m.dim();
            for i in 0..n {
                for j in 0..n {
                    let rebuilt: f64 = (0..n).map(|k| chol.lower(i, k) * chol.lower(j, k)).sum();
                    prop_assert!((rebuilt - m.get(i, j)).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn solve_inverts_multiplication(m in (2usize..=4).prop_flat_map(spd_strategy)) {
            let n = m.dim();
            let b: Vec<f64> = (0..n).map(|i| (i as f64) - 1.0).collect();
            let x = m.solve(&b).unwrap();
            for i in 0..n {
                let ax: f64 = (0..n).map(|j| m.get(i, j) * x[j]).sum();
                prop_assert!((ax - b[i]).abs() < 1e-8);
            }
        }
    }
}
