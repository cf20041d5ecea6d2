//! Dense LU with partial pivoting.

use thiserror::Error;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("matrix is singular at column {column}")]
pub struct LuError {
    /// Elimination column with no usable pivot.
    pub column: usize,
}

/// Solves A·x = b. A pivot smaller than 1e-13 times the largest entry of
/// its column's original magnitude is treated as singular.
pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, LuError> {
    let n = a.n;
    assert_eq!(b.len(), n);
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    let col_max: Vec<f64> = (0..n).map(|j| (0..n).map(|i| m[i * n + j].abs()).fold(0.0, f64::max)).collect();
    for k in 0..n {
        let (p, pivot) = (k..n).map(|i| (i, m[i * n + k].abs())).fold((k, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        if !(pivot > 1e-13 * col_max[k]) || pivot == 0.0 {
            return Err(LuError { column: k });
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let d = m[k * n + k];
        for i in k + 1..n {
            let f = m[i * n + k] / d;
            if f != 0.0 {
                m[i * n + k] = 0.0;
                for j in k + 1..n {
                    m[i * n + j] -= f * m[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k * n + j] * x[j]).sum();
        x[k] = (x[k] - s) / m[k * n + k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn solves_with_pivoting() {
        let a = DenseMatrix { n: 2, data: vec![0.0, 1.0, 2.0, 3.0] };
        let x = lu_solve(&a, &[4.0, 13.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] - 4.0).abs() < 1e-15);
    }

    #[test]
    fn singular_column_reported() {
        let a = DenseMatrix { n: 3, data: vec![1.0, 2.0, 0.0, 2.0, 4.0, 0.0, 0.0, 0.0, 1.0] };
        assert_eq!(lu_solve(&a, &[1.0, 2.0, 3.0]), Err(LuError { column: 1 }));
    }

    proptest! {
        #[test]
        fn residual_of_solution_is_small(entries in prop::collection::vec(-1.0f64..1.0, 16), b in prop::collection::vec(-1.0f64..1.0, 4)) {
            let mut a = DenseMatrix { n: 4, data: entries };
            for i in 0..4 {
                a.set(i, i, a.get(i, i) + 5.0);
            }
            let x = lu_solve(&a, &b).unwrap();
            let ax = a.mul_vec(&x);
            for (l, r) in ax.iter().zip(&b) {
                prop_assert!((l - r).abs() < 1e-12);
            }
        }
    }
}
