//! Mass budget and transverse modes of a doubly clamped beam carrying a
//! circular mirror pad.

mod basis;
mod probe;
mod ritz;
mod shape;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

pub use basis::{clamped_root, clamped_roots, ClampedMode};
pub use probe::{effective_mass, intensity_weighted_displacement, Probe};
pub use ritz::{beam_mode, beam_mode_with, modal_mass, DEFAULT_BASIS_SIZE, DEFAULT_SAMPLES};
pub use shape::{ModeShape, Normalization};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub material: String,
    pub thickness: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    pub layers: Vec<Layer>,
    pub pad_radius: f64,
}

impl LayerStack {
    /// `pairs` repetitions of a (high, low) layer pair.
    pub fn bragg(pairs: usize, high: Layer, low: Layer, pad_radius: f64) -> Self {
        let layers = (0..pairs)
            .flat_map(|_| [high.clone(), low.clone()])
            .collect();
        Self { layers, pad_radius }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("pad_radius", self.pad_radius)?;
        for l in &self.layers {
            ensure_positive("layer thickness", l.thickness)?;
            ensure_positive("layer density", l.density)?;
        }
        Ok(())
    }

    pub fn thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// Areal density Σ tᵢ ρᵢ (kg/m²).
    pub fn areal_density(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness * l.density).sum()
    }
}

/// `π R² Σ tᵢ ρᵢ`.
pub fn stack_mass(stack: &LayerStack) -> Result<f64> {
    stack.validate()?;
    Ok(PI * stack.pad_radius * stack.pad_radius * stack.areal_density())
}

/// How the pad enters the beam model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PadModel {
    /// Distributed mass plus the bending stiffness of the thickened section.
    #[default]
    Stiffened,
    /// Distributed mass only.
    MassOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pad {
    pub mass: f64,
    pub radius: f64,
    /// Axial position of the pad centre (m from the left clamp).
    pub center: f64,
    pub thickness: f64,
    #[serde(default)]
    pub model: PadModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
    pub density: f64,
    pub youngs_modulus: f64,
    /// Fraction of the nominal volume left after etching.
    pub volume_factor: f64,
    pub pad: Option<Pad>,
}

impl BeamGeometry {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("length", self.length)?;
        ensure_positive("width", self.width)?;
        ensure_positive("thickness", self.thickness)?;
        ensure_positive("density", self.density)?;
        ensure_positive("youngs_modulus", self.youngs_modulus)?;
        ensure_positive("volume_factor", self.volume_factor)?;
        if let Some(p) = &self.pad {
            ensure_non_negative("pad mass", p.mass)?;
            ensure_non_negative("pad radius", p.radius)?;
            ensure_non_negative("pad thickness", p.thickness)?;
            if !(0.0..=self.length).contains(&p.center) {
                return Err(Error::domain("pad center", "must lie on the beam"));
            }
        }
        Ok(())
    }

    pub fn beam_mass(&self) -> f64 {
        self.density * self.length * self.width * self.thickness * self.volume_factor
    }

    /// Mass per unit length of the bare beam.
    pub fn linear_density(&self) -> f64 {
        self.beam_mass() / self.length
    }

    pub fn bending_stiffness(&self) -> f64 {
        self.youngs_modulus * self.width * self.thickness.powi(3) / 12.0
    }

    pub fn pad_mass(&self) -> f64 {
        self.pad.map_or(0.0, |p| p.mass)
    }

    pub fn total_mass(&self) -> f64 {
        self.beam_mass() + self.pad_mass()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassBudget {
    pub beam: f64,
    pub pad: f64,
    pub total: f64,
}

pub fn mass_budget(geom: &BeamGeometry, stack: &LayerStack) -> Result<MassBudget> {
    geom.validate()?;
    let beam = geom.beam_mass();
    let pad = stack_mass(stack)?;
    Ok(MassBudget {
        beam,
        pad,
        total: beam + pad,
    })
}

/// Mode mass from a spring constant and angular frequency, `k / ω²`.
pub fn spring_mass(k: f64, omega: f64) -> Result<f64> {
    ensure_positive("spring constant", k)?;
    ensure_positive("omega", omega)?;
    Ok(k / (omega * omega))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn mirror_stack_mass() {
        let m = stack_mass(&mirror_stack(8200.0)).unwrap();
        assert!((m / 48.593e-12 - 1.0).abs() < 1e-4, "{m:e}");
        let lo = stack_mass(&mirror_stack(6800.0)).unwrap();
        let hi = stack_mass(&mirror_stack(8300.0)).unwrap();
        assert!(lo > 40e-12 && hi < 50e-12, "{lo:e} {hi:e}");
        let mut empty = mirror_stack(8200.0);
        empty.pad_radius = 0.0;
        assert_eq!(stack_mass(&empty).unwrap(), 0.0);
    }

    #[test]
    fn stack_mass_is_linear_and_order_free() {
        let s = mirror_stack(8200.0);
        let mut half = s.clone();
        half.layers.iter_mut().for_each(|l| l.density *= 0.5);
        let mut rev = s.clone();
        rev.layers.reverse();
        let m = stack_mass(&s).unwrap();
        assert!((stack_mass(&half).unwrap() - 0.5 * m).abs() < 1e-15 * m);
        assert!((stack_mass(&rev).unwrap() - m).abs() < 1e-15 * m);
    }

    #[test]
    fn budget_and_spring_mass() {
        let b = mass_budget(&bare_beam(), &mirror_stack(8200.0)).unwrap();
        assert!((b.beam - 15e-12).abs() < 1e-24);
        assert_eq!(b.total, b.beam + b.pad);
        let m = spring_mass(2196.0, 2.0 * PI * 945e3).unwrap();
        assert!((m / 62.2887e-12 - 1.0).abs() < 1e-5, "{m:e}");
        assert!((spring_mass(4.0 * 2196.0, 4.0 * PI * 945e3).unwrap() - m).abs() < 1e-27);
        assert!(spring_mass(0.0, 1.0).is_err());
    }

    #[test]
    fn pad_must_sit_on_beam() {
        let mut g = loaded_beam(PadModel::MassOnly);
        g.pad.as_mut().unwrap().center = 120e-6;
        assert!(g.validate().is_err());
    }
}
