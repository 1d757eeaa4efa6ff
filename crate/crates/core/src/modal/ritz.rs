//! Rayleigh–Ritz solution of the pad-loaded beam over clamped-clamped
//! eigenfunctions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::basis::ClampedMode;
use super::shape::{ModeShape, Normalization};
use super::{BeamGeometry, Pad, PadModel};
use crate::error::{Error, Result};
use crate::numerics::quadrature::kronrod_rule;

pub const DEFAULT_BASIS_SIZE: usize = 12;
pub const DEFAULT_SAMPLES: usize = 2001;
const PAD_PANELS: usize = 48;
const RESIDUAL_LIMIT: f64 = 1e-8;

/// Quadrature over the pad footprint in `x = c + R sin θ`, which absorbs the
/// square-root edges of the chord. Returns `(x, chord, dx-weight)`.
fn pad_rule(geom: &BeamGeometry, pad: &Pad) -> Vec<(f64, f64, f64)> {
    let r = pad.radius;
    if r == 0.0 {
        return Vec::new();
    }
    let clip = |x: f64| ((x - pad.center) / r).clamp(-1.0, 1.0).asin();
    let (t0, t1) = (clip(0.0), clip(geom.length));
    let mut edges = vec![t0, t1];
    if geom.width < 2.0 * r {
        // chord reaches the beam width here
        let t = (geom.width / (2.0 * r)).acos();
        edges.extend([-t, t].into_iter().filter(|&v| v > t0 && v < t1));
    }
    edges.sort_by(f64::total_cmp);
    edges
        .windows(2)
        .flat_map(|w| kronrod_rule(w[0], w[1], PAD_PANELS))
        .map(|(t, w)| {
            let (s, c) = t.sin_cos();
            (pad.center + r * s, 2.0 * r * c, w * r * c)
        })
        .collect()
}

/// Pad mass per unit length at a point of the footprint with the given chord.
fn pad_line_density(pad: &Pad, chord: f64) -> f64 {
    pad.mass * chord / (std::f64::consts::PI * pad.radius * pad.radius)
}

fn pad_extra_stiffness(geom: &BeamGeometry, pad: &Pad, chord: f64) -> f64 {
    match pad.model {
        PadModel::MassOnly => 0.0,
        PadModel::Stiffened => {
            let t = geom.thickness;
            geom.youngs_modulus * chord.min(geom.width) * ((t + pad.thickness).powi(3) - t.powi(3))
                / 12.0
        }
    }
}

fn assemble(geom: &BeamGeometry, basis: &[ClampedMode]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = basis.len();
    let l = geom.length;
    let mut k = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);
    // the bare beam is diagonal in its own eigenfunctions (∫φ² = L)
    for (i, b) in basis.iter().enumerate() {
        k[(i, i)] = geom.bending_stiffness() * b.beta.powi(4) * l;
        m[(i, i)] = geom.linear_density() * l;
    }
    if let Some(pad) = geom.pad.as_ref().filter(|p| p.radius > 0.0) {
        let mut phi = vec![0.0; n];
        let mut curv = vec![0.0; n];
        for (x, chord, w) in pad_rule(geom, pad) {
            for (j, b) in basis.iter().enumerate() {
                phi[j] = b.value(x);
                curv[j] = b.curvature(x);
            }
            let dm = w * pad_line_density(pad, chord);
            let dk = w * pad_extra_stiffness(geom, pad, chord);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += dm * phi[i] * phi[j];
                    k[(i, j)] += dk * curv[i] * curv[j];
                }
            }
        }
    }
    (k, m)
}

struct Expansion<'a> {
    basis: &'a [ClampedMode],
    coeffs: DVector<f64>,
}

impl Expansion<'_> {
    fn value(&self, x: f64) -> f64 {
        self.basis
            .iter()
            .zip(self.coeffs.iter())
            .map(|(b, a)| a * b.value(x))
            .sum()
    }

    /// Signed value at the refined position of the largest |u|.
    fn antinode(&self, samples: &[f64], xs: &[f64]) -> (f64, f64) {
        let k = samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .expect("samples");
        let (mut a, mut b) = (xs[k.saturating_sub(1)], xs[(k + 1).min(xs.len() - 1)]);
        // golden-section search for the maximum of |u|
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        for _ in 0..80 {
            if self.value(c).abs() > self.value(d).abs() {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        let x = 0.5 * (a + b);
        let (ux, uk) = (self.value(x), samples[k]);
        if ux.abs() >= uk.abs() {
            (x, ux)
        } else {
            (xs[k], uk)
        }
    }
}

/// Mode `n` (1-based) with the default basis size and sampling.
pub fn beam_mode(geom: &BeamGeometry, n: usize) -> Result<ModeShape> {
    beam_mode_with(geom, n, DEFAULT_BASIS_SIZE, DEFAULT_SAMPLES)
}

/// Mode `n` from `basis_size` clamped-clamped functions, sampled at
/// `samples` uniformly spaced points and normalised to a unit antinode.
pub fn beam_mode_with(
    geom: &BeamGeometry,
    n: usize,
    basis_size: usize,
    samples: usize,
) -> Result<ModeShape> {
    geom.validate()?;
    if n == 0 || n > basis_size {
        return Err(Error::domain(
            "mode index",
            format!("must lie in 1..={basis_size}, got {n}"),
        ));
    }
    if samples < 3 {
        return Err(Error::domain("samples", "need at least 3"));
    }
    let basis: Vec<ClampedMode> = (1..=basis_size)
        .map(|j| ClampedMode::new(j, geom.length))
        .collect::<Result<_>>()?;
    let (k, m) = assemble(geom, &basis);

    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("mass matrix is not positive definite".into()))?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Singular("mass factor is singular".into()))?;
    let mut c = &l_inv * &k * l_inv.transpose();
    c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..basis_size).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let idx = order[n - 1];
    let lambda = eig.eigenvalues[idx];
    let coeffs: DVector<f64> = l_inv.transpose() * eig.eigenvectors.column(idx);

    let residual = (&k * &coeffs - lambda * (&m * &coeffs)).norm()
        / ((&k * &coeffs).norm() + lambda.abs() * (&m * &coeffs).norm());
    if !(residual <= RESIDUAL_LIMIT) || !(lambda > 0.0) {
        return Err(Error::Eigensolve { residual });
    }

    let xs: Vec<f64> = (0..samples)
        .map(|i| geom.length * i as f64 / (samples - 1) as f64)
        .collect();
    let mut exp = Expansion {
        basis: &basis,
        coeffs,
    };
    let raw: Vec<f64> = xs.iter().map(|&x| exp.value(x)).collect();
    let (_, peak) = exp.antinode(&raw, &xs);
    exp.coeffs /= peak;
    let mut u: Vec<f64> = raw.iter().map(|v| v / peak).collect();
    // clamped ends are exact zeros of every basis function
    u[0] = 0.0;
    u[samples - 1] = 0.0;
    for v in &mut u {
        *v = v.clamp(-1.0, 1.0);
    }
    let mode_mass = (exp.coeffs.transpose() * &m * &exp.coeffs)[(0, 0)];
    Ok(ModeShape {
        x: xs,
        u,
        normalization: Normalization::AntinodeMax,
        mode_index: n,
        omega: lambda.sqrt(),
        modal_mass: mode_mass,
        mass_fraction: mode_mass / geom.total_mass(),
    })
}

/// `∫ (ρA + λ_pad) u² dx` for a sampled shape, with `u` interpolated
/// linearly between samples.
pub fn modal_mass(geom: &BeamGeometry, shape: &ModeShape) -> Result<f64> {
    geom.validate()?;
    let xs = &shape.x;
    if (xs[xs.len() - 1] - geom.length).abs() > 1e-9 * geom.length {
        return Err(Error::domain("shape", "grid does not span the beam"));
    }
    let u2 = |x: f64| shape.interpolate(x).powi(2);
    // trapezoid on the sample grid is exact for the piecewise-linear u up to O(dx²)
    let mut beam = 0.0;
    for i in 0..xs.len() - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        let (ua, ub) = (shape.u[i], shape.u[i + 1]);
        // exact integral of the square of a linear segment
        beam += (b - a) * (ua * ua + ua * ub + ub * ub) / 3.0;
    }
    let mut total = geom.linear_density() * beam;
    if let Some(pad) = geom.pad.as_ref().filter(|p| p.radius > 0.0) {
        total += pad_rule(geom, pad)
            .into_iter()
            .map(|(x, chord, w)| w * pad_line_density(pad, chord) * u2(x))
            .sum::<f64>();
    }
    Ok(total)
}
