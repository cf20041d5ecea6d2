//! Finite-difference Jacobians in scaled coordinates.

use thiserror::Error;

use super::linalg::DenseMatrix;
use super::{EvalError, NonlinearSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobianError {
    #[error("residual {residual} is not finite")]
    NonFiniteResidual { residual: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Scaled Jacobian ∂(r/r_scale)/∂(x/x_scale) and the number of residual
/// evaluations spent on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub matrix: DenseMatrix,
    pub evaluations: usize,
}

fn check_finite(system: &NonlinearSystem, r: &[f64]) -> Result<(), JacobianError> {
    match r.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(JacobianError::NonFiniteResidual { residual: system.residual_names[i].clone() }),
        None => Ok(()),
    }
}

fn to_scaled(system: &NonlinearSystem, x: &[f64]) -> Vec<f64> {
    x.iter().zip(&system.variables).map(|(x, v)| x / v.scale).collect()
}

/// Groups of columns whose row sets do not overlap, so one evaluation
/// serves the whole group.
fn column_groups(n: usize, sparsity: &[Vec<usize>]) -> Vec<(Vec<usize>, Vec<Vec<usize>>)> {
    let mut rows_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, deps) in sparsity.iter().enumerate() {
        for &j in deps {
            if !rows_of[j].contains(&i) {
                rows_of[j].push(i);
            }
        }
    }
    let mut groups: Vec<(Vec<usize>, Vec<bool>)> = Vec::new();
    for (j, rows) in rows_of.iter().enumerate() {
        let slot = groups.iter_mut().find(|(_, used)| rows.iter().all(|&i| !used[i]));
        let (cols, used) = match slot {
            Some(g) => g,
            None => {
                groups.push((Vec::new(), vec![false; sparsity.len()]));
                groups.last_mut().expect("just pushed")
            }
        };
        cols.push(j);
        for &i in rows {
            used[i] = true;
        }
    }
    groups
        .into_iter()
        .map(|(cols, _)| {
            let rows = cols.iter().map(|&j| rows_of[j].clone()).collect();
            (cols, rows)
        })
        .collect()
}

/// Columns perturbed together, with the rows each one touches when sparsity is known.
type ColumnGroup = (Vec<usize>, Option<Vec<Vec<usize>>>);

/// Forward-difference Jacobian at scaled point `u` with scaled residual `r0`.
pub(crate) fn jacobian_scaled(
    system: &NonlinearSystem,
    u: &[f64],
    r0: &[f64],
    rel_step: f64,
) -> Result<Jacobian, JacobianError> {
    let n = u.len();
    let m = r0.len();
    let step = |j: usize| rel_step * u[j].abs().max(1.0);
    let mut matrix = DenseMatrix::zeros(n.max(m));
    let mut r = vec![0.0; m];
    let mut evaluations = 0;
    let mut up = u.to_vec();

    let groups: Vec<ColumnGroup> = match &system.sparsity {
        Some(s) => column_groups(n, s).into_iter().map(|(c, rows)| (c, Some(rows))).collect(),
        None => (0..n).map(|j| (vec![j], None)).collect(),
    };
    for (cols, rows) in &groups {
        // Perturb forward; fall back to a backward step if the forward point is not evaluable.
        let mut sign = 1.0;
        loop {
            for &j in cols {
                up[j] = u[j] + sign * step(j);
            }
            evaluations += 1;
            match system.eval_scaled(&up, &mut r) {
                Ok(()) => break,
                Err(e) if sign < 0.0 => return Err(e.into()),
                Err(_) => sign = -1.0,
            }
        }
        check_finite(system, &r)?;
        for (k, &j) in cols.iter().enumerate() {
            let h = sign * step(j);
            match rows {
                Some(rows) => {
                    for &i in &rows[k] {
                        matrix.set(i, j, (r[i] - r0[i]) / h);
                    }
                }
                None => {
                    for i in 0..m {
                        matrix.set(i, j, (r[i] - r0[i]) / h);
                    }
                }
            }
            up[j] = u[j];
        }
    }
    Ok(Jacobian { matrix, evaluations })
}

/// Scaled forward-difference Jacobian at physical point `x`.
pub fn jacobian(system: &NonlinearSystem, x: &[f64], rel_step: f64) -> Result<Jacobian, JacobianError> {
    let u = to_scaled(system, x);
    let mut r0 = vec![0.0; system.n_residuals()];
    system.eval_scaled(&u, &mut r0)?;
    check_finite(system, &r0)?;
    let mut jac = jacobian_scaled(system, &u, &r0, rel_step)?;
    jac.evaluations += 1;
    Ok(jac)
}

/// Scaled central-difference Jacobian at physical point `x`, dense.
pub fn jacobian_central(system: &NonlinearSystem, x: &[f64], rel_step: f64) -> Result<Jacobian, JacobianError> {
    let u = to_scaled(system, x);
    let n = u.len();
    let m = system.n_residuals();
    let mut matrix = DenseMatrix::zeros(n.max(m));
    let (mut rp, mut rm) = (vec![0.0; m], vec![0.0; m]);
    let mut up = u.clone();
    for j in 0..n {
        let h = rel_step * u[j].abs().max(1.0);
        up[j] = u[j] + h;
        system.eval_scaled(&up, &mut rp)?;
        up[j] = u[j] - h;
        system.eval_scaled(&up, &mut rm)?;
        up[j] = u[j];
        check_finite(system, &rp)?;
        check_finite(system, &rm)?;
        for i in 0..m {
            matrix.set(i, j, (rp[i] - rm[i]) / (2.0 * h));
        }
    }
    Ok(Jacobian { matrix, evaluations: 2 * n })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::components::UnitClass;
    use crate::solver::Variable;

    #[test]
    fn derivative_of_square() {
        let sys = NonlinearSystem::from_fn(&[3.0], |x, r| r[0] = x[0] * x[0]);
        let j = jacobian(&sys, &[3.0], 1e-7).unwrap();
        assert!((j.matrix.get(0, 0) - 6.0).abs() <= 1e-5);
    }

    #[test]
    fn non_finite_residual_is_named() {
        let sys = NonlinearSystem::from_fn(&[1.0], |x, r| r[0] = (x[0] - 2.0).sqrt());
        assert_eq!(
            jacobian(&sys, &[1.0], 1e-7).unwrap_err(),
            JacobianError::NonFiniteResidual { residual: "r0".into() }
        );
    }

    fn banded(sparse: bool) -> NonlinearSystem {
        // Tridiagonal-plus-corner nonlinear system; coefficients from a fixed LCG.
        let n = 10;
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let coeffs: Vec<[f64; 3]> = (0..n).map(|_| [next() + 1.0, next(), next()]).collect();
        let deps: Vec<Vec<usize>> =
            (0..n).map(|i| vec![i, (i + 1) % n, (i + n - 1) % n]).collect();
        let variables = (0..n)
            .map(|i| Variable {
                name: format!("x{i}"),
                unit: UnitClass::Dimensionless,
                scale: 1.0 + i as f64,
                initial: 0.0,
                positive: false,
            })
            .collect();
        NonlinearSystem::new(
            variables,
            (0..n).map(|i| format!("r{i}")).collect(),
            vec![2.0; n],
            sparse.then_some(deps),
            Arc::new(move |x: &[f64], r: &mut [f64]| {
                for i in 0..n {
                    let [a, b, c] = coeffs[i];
                    r[i] = a * x[i] * x[i] + b * x[(i + 1) % n].sin() + c * x[(i + n - 1) % n] * x[i];
                }
                Ok(())
            }),
        )
    }

    #[test]
    fn sparse_matches_dense() {
        let x: Vec<f64> = (0..10).map(|i| 0.3 + 0.17 * i as f64).collect();
        let dense = jacobian(&banded(false), &x, 1e-7).unwrap();
        let sparse = jacobian(&banded(true), &x, 1e-7).unwrap();
        assert!(sparse.evaluations < dense.evaluations);
        for (a, b) in dense.matrix.data.iter().zip(&sparse.matrix.data) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }
}
