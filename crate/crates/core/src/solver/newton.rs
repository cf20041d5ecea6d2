use super::jacobian::{jacobian_scaled, JacobianError};
use super::linalg::lu_solve;
use super::{NonlinearSystem, SolveResult, SolveStatus, SolverConfig};

/// Sufficient-decrease constant of the Armijo test.
const ARMIJO_C: f64 = 1e-4;
/// Fraction of its current value a positive variable may lose in one step.
const MAX_POSITIVE_LOSS: f64 = 0.8;

fn norm_inf(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn norm2_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

enum Trial {
    Ok(Vec<f64>),
    Bad,
}

fn trial(system: &NonlinearSystem, u: &[f64]) -> Trial {
    let mut r = vec![0.0; system.n_residuals()];
    match system.eval_scaled(u, &mut r) {
        Ok(()) if r.iter().all(|v| v.is_finite()) => Trial::Ok(r),
        _ => Trial::Bad,
    }
}

/// Largest step fraction that keeps every positive variable above
/// (1 − MAX_POSITIVE_LOSS) of its current value.
fn max_step_fraction(system: &NonlinearSystem, u: &[f64], du: &[f64]) -> f64 {
    system
        .variables
        .iter()
        .zip(u.iter().zip(du))
        .filter(|(v, (&u, &d))| v.positive && u > 0.0 && d < -MAX_POSITIVE_LOSS * u)
        .map(|(_, (&u, &d))| MAX_POSITIVE_LOSS * u / -d)
        .fold(1.0, f64::min)
}

/// Damped Newton iteration from the system's initial guess.
pub fn newton_solve(system: &NonlinearSystem, config: &SolverConfig) -> SolveResult {
    let scales: Vec<f64> = system.variables.iter().map(|v| v.scale).collect();
    let physical = |u: &[f64]| -> Vec<f64> { u.iter().zip(&scales).map(|(u, s)| u * s).collect() };
    let mut u: Vec<f64> = system.variables.iter().map(|v| v.initial / v.scale).collect();
    let mut r = vec![0.0; system.n_residuals()];

    let finish = |u: &[f64], norm: f64, iterations: usize, trace: Vec<f64>, status: SolveStatus| SolveResult {
        x: physical(u),
        residual_norm: norm,
        iterations,
        trace,
        status,
    };

    if let Err(e) = system.eval_scaled(&u, &mut r) {
        return finish(&u, f64::INFINITY, 0, vec![], SolveStatus::NonFiniteResidual { residual: e.to_string() });
    }
    if let Some(i) = r.iter().position(|v| !v.is_finite()) {
        let residual = system.residual_names[i].clone();
        return finish(&u, f64::INFINITY, 0, vec![], SolveStatus::NonFiniteResidual { residual });
    }
    let mut norm = norm_inf(&r);
    let mut trace = vec![norm];

    for iter in 0..config.max_iters {
        if norm <= config.tol_residual {
            return finish(&u, norm, iter, trace, SolveStatus::Converged);
        }
        let jac = match jacobian_scaled(system, &u, &r, config.fd_rel_step) {
            Ok(j) => j,
            Err(JacobianError::NonFiniteResidual { residual }) => {
                return finish(&u, norm, iter, trace, SolveStatus::NonFiniteResidual { residual })
            }
            Err(JacobianError::Eval(e)) => {
                return finish(&u, norm, iter, trace, SolveStatus::NonFiniteResidual { residual: e.to_string() })
            }
        };
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let du = match lu_solve(&jac.matrix, &rhs) {
            Ok(d) => d,
            Err(e) => {
                let variable = system.variables[e.column].name.clone();
                return finish(&u, norm, iter, trace, SolveStatus::SingularJacobian { variable });
            }
        };

        let f0 = norm2_sq(&r);
        let mut alpha = max_step_fraction(system, &u, &du);
        let mut accepted = None;
        for _ in 0..=config.max_backtracks {
            let cand: Vec<f64> = u.iter().zip(&du).map(|(u, d)| u + alpha * d).collect();
            if let Trial::Ok(rc) = trial(system, &cand) {
                if norm2_sq(&rc) <= (1.0 - 2.0 * ARMIJO_C * alpha) * f0 {
                    accepted = Some((cand, rc));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((cand, rc)) = accepted else {
            return finish(&u, norm, iter + 1, trace, SolveStatus::LineSearchStall);
        };
        let step = norm_inf(&du) * alpha;
        u = cand;
        r = rc;
        norm = norm_inf(&r);
        trace.push(norm);
        if norm <= config.tol_residual {
            return finish(&u, norm, iter + 1, trace, SolveStatus::Converged);
        }
        if step <= config.tol_step {
            return finish(&u, norm, iter + 1, trace, SolveStatus::LineSearchStall);
        }
    }
    let status = if norm <= config.tol_residual { SolveStatus::Converged } else { SolveStatus::MaxIters };
    finish(&u, norm, config.max_iters, trace, status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_four_converges_quadratically() {
        let sys = NonlinearSystem::from_fn(&[3.0], |x, r| r[0] = x[0] * x[0] - 4.0);
        let res = newton_solve(&sys, &SolverConfig::default());
        assert_eq!(res.status, SolveStatus::Converged);
        assert!((res.x[0] - 2.0).abs() < 1e-10);
        // residual = (x−2)(x+2), so e_k ≈ r_k / 4
        let errs: Vec<f64> = res.trace.iter().map(|r| r / 4.0).filter(|e| *e > 1e-9).collect();
        assert!(errs.len() >= 3);
        for w in errs.windows(2) {
            assert!(w[1] / (w[0] * w[0]) < 1.0, "{errs:?}");
        }
    }

    #[test]
    fn linear_system_in_one_step() {
        let sys = NonlinearSystem::from_fn(&[0.0, 0.0], |x, r| {
            r[0] = 2.0 * x[0] + x[1] - 3.0;
            r[1] = x[0] - 3.0 * x[1] + 2.0;
        });
        let res = newton_solve(&sys, &SolverConfig::default());
        assert_eq!(res.status, SolveStatus::Converged);
        // One Newton step is exact up to forward-difference roundoff, about eps/h relative.
        assert!(res.trace[1] <= 1e-8 * res.trace[0], "{:?}", res.trace);
        assert!(res.iterations <= 2, "{:?}", res.trace);
    }

    #[test]
    fn no_real_root_is_reported_not_crashed() {
        let sys = NonlinearSystem::from_fn(&[1.0], |x, r| r[0] = x[0] * x[0] + 1.0);
        let res = newton_solve(&sys, &SolverConfig::default());
        assert!(matches!(res.status, SolveStatus::MaxIters | SolveStatus::LineSearchStall), "{:?}", res.status);
    }

    #[test]
    fn singular_jacobian_names_variable() {
        let sys = NonlinearSystem::from_fn(&[1.0, 1.0], |x, r| {
            r[0] = x[0] + x[1] - 1.0;
            r[1] = 2.0 * x[0] + 2.0 * x[1] - 3.0;
        });
        let res = newton_solve(&sys, &SolverConfig::default());
        assert_eq!(res.status, SolveStatus::SingularJacobian { variable: "x1".into() });
    }

    #[test]
    fn positive_variables_stay_positive() {
        let mut sys = NonlinearSystem::from_fn(&[10.0], |x, r| r[0] = x[0].ln());
        sys.variables[0].positive = true;
        let res = newton_solve(&sys, &SolverConfig::default());
        assert_eq!(res.status, SolveStatus::Converged);
        assert!((res.x[0] - 1.0).abs() < 1e-9);
    }
}
