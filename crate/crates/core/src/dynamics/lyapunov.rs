use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use super::{is_stable, DriftDiffusion, Mat4};
use crate::error::{Error, Result};
use crate::model::OptomechSystem;

/// Index pairs (i ≤ j) of the 10 independent entries of a symmetric 4×4 matrix.
const PAIRS: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&p| p == (i, j)).expect("valid pair")
}

/// Solves `A·X + X·Aᵀ + Q = 0` for symmetric `Q` by a direct solve over the
/// 10 independent entries of `X`.
pub fn solve_continuous_lyapunov(a: &Mat4, q: &Mat4) -> Result<Mat4> {
    let mut m = SMatrix::<f64, 10, 10>::zeros();
    let mut rhs = SVector::<f64, 10>::zeros();
    for (row, &(i, j)) in PAIRS.iter().enumerate() {
        // (A X)_ij + (X Aᵀ)_ij = Σ_k A_ik X_kj + Σ_k X_ik A_jk
        for k in 0..4 {
            m[(row, pair_index(k, j))] += a[(i, k)];
            m[(row, pair_index(i, k))] += a[(j, k)];
        }
        rhs[row] = -0.5 * (q[(i, j)] + q[(j, i)]);
    }
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Lyapunov operator is singular".into()))?;
    let mut out = Mat4::zeros();
    for (row, &(i, j)) in PAIRS.iter().enumerate() {
        out[(i, j)] = x[row];
        out[(j, i)] = x[row];
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// Stationary covariance of (q, p, X, Y), symmetrised.
    pub covariance: Mat4,
    /// Mean phonon number (V_qq + V_pp − 1)/2.
    pub n_full: f64,
}

impl SteadyState {
    /// Solves the steady state of a stable drift/diffusion pair.
    pub fn solve(dd: &DriftDiffusion) -> Result<Self> {
        let stability = is_stable(dd);
        if !stability.stable {
            return Err(Error::Unstable {
                margin: stability.margin,
            });
        }
        let v = solve_continuous_lyapunov(&dd.drift, &dd.diffusion)?;
        Ok(Self {
            covariance: v,
            n_full: 0.5 * (v[(0, 0)] + v[(1, 1)] - 1.0),
        })
    }
}

pub fn steady_covariance(sys: &OptomechSystem) -> Result<SteadyState> {
    SteadyState::solve(&DriftDiffusion::from_system(sys)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::device_system;
    use crate::model::LinearizedRates;

    fn residual(a: &Mat4, v: &Mat4, q: &Mat4) -> f64 {
        (a * v + v * a.transpose() + q).norm() / q.norm()
    }

    #[test]
    fn zero_coupling_reproduces_thermal_state() {
        for n_th in [0.0, 3.0, 5.07e4] {
            let dd = DriftDiffusion::from_rates(&LinearizedRates {
                omega_m: 5.9e6,
                gamma_m: 198.0,
                kappa: 4.8e6,
                detuning: 5.9e6,
                coupling: 0.0,
                n_th,
            });
            let s = SteadyState::solve(&dd).unwrap();
            let v = s.covariance;
            assert!((v[(0, 0)] / (n_th + 0.5) - 1.0).abs() < 1e-9);
            assert!((v[(1, 1)] / (n_th + 0.5) - 1.0).abs() < 1e-9);
            assert!((v[(2, 2)] - 0.5).abs() < 1e-12);
            assert!((v[(3, 3)] - 0.5).abs() < 1e-12);
            assert!((s.n_full - n_th).abs() <= 1e-9 * (n_th + 1.0));
        }
    }

    #[test]
    fn residual_is_tiny_for_device_parameters() {
        let dd = DriftDiffusion::from_system(&device_system(0.5)).unwrap();
        let v = solve_continuous_lyapunov(&dd.drift, &dd.diffusion).unwrap();
        assert!(residual(&dd.drift, &v, &dd.diffusion) < 1e-10);
    }

    #[test]
    fn device_cooling_point_occupancy() {
        // scipy.linalg.solve_continuous_lyapunov on the same matrices
        let n = steady_covariance(&device_system(0.5)).unwrap().n_full;
        assert!((n / 40.044_452_24 - 1.0).abs() < 1e-7, "n_full = {n}");
        let n1 = steady_covariance(&device_system(1.0)).unwrap().n_full;
        assert!((n1 / 22.258_131_60 - 1.0).abs() < 1e-7, "n_full = {n1}");
    }

    #[test]
    fn unstable_system_is_refused() {
        let mut sys = device_system(1.0);
        sys.drive.detuning = -sys.mechanics.omega_m;
        assert!(matches!(
            steady_covariance(&sys),
            Err(Error::Unstable { .. })
        ));
    }
}
