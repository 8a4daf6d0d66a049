//! Energy bookkeeping and the plane-wave power estimate, in SI units.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::qdyn::DensityMatrix;
use crate::smallmat::ComplexMatrix;

/// CODATA 2018 values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light, m/s.
    pub c0: f64,
    /// Vacuum permittivity, F/m.
    pub epsilon0: f64,
    /// Vacuum permeability, H/m.
    pub mu0: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Planck constant, J·s.
    pub h: f64,
    /// One debye in C·m.
    pub debye: f64,
    /// One electronvolt in J.
    pub electron_volt: f64,
}

pub const SI: PhysicalConstants = PhysicalConstants {
    c0: 2.997_924_58e8,
    epsilon0: 8.854_187_812_8e-12,
    mu0: 1.256_637_062_12e-6,
    hbar: 1.054_571_817e-34,
    h: 6.626_070_15e-34,
    debye: 3.335_64e-30,
    electron_volt: 1.602_176_634e-19,
};

/// How the gap is turned into the frequency in `P = E0 d f / π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrequencyConvention {
    /// `f = gap / h`.
    #[default]
    Ordinary,
    /// `ω = gap / ħ`, which is 2π times larger. Evaluated as `2π gap / h` so
    /// the ratio to the ordinary convention is exactly 2π.
    Angular,
}

impl fmt::Display for FrequencyConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrequencyConvention::Ordinary => "ordinary",
            FrequencyConvention::Angular => "angular",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarvestModel {
    /// W/m².
    pub intensity: f64,
    /// C·m.
    pub dipole: f64,
    /// J.
    pub gap: f64,
    /// Dipoles per m².
    pub density: f64,
    pub convention: FrequencyConvention,
}

impl HarvestModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("intensity", self.intensity),
            ("dipole", self.dipole),
            ("gap", self.gap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        if !(self.density.is_finite() && self.density >= 0.0) {
            return Err(Error::invalid(
                "density",
                format!("must be finite and >= 0, got {}", self.density),
            ));
        }
        Ok(())
    }

    /// Frequency in Hz (ordinary) or rad/s (angular).
    pub fn frequency(&self) -> f64 {
        match self.convention {
            FrequencyConvention::Ordinary => self.gap / SI.h,
            FrequencyConvention::Angular => 2.0 * PI * self.gap / SI.h,
        }
    }

    pub fn with_convention(self, convention: FrequencyConvention) -> Self {
        HarvestModel { convention, ..self }
    }
}

/// Inverts `I = ½ c0 ε0 E0²`.
pub fn field_amplitude(intensity: f64) -> Result<f64> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::invalid(
            "intensity",
            format!("must be finite and >= 0, got {intensity}"),
        ));
    }
    Ok((2.0 * intensity / (SI.c0 * SI.epsilon0)).sqrt())
}

/// `½ c0 ε0 E0²`.
pub fn intensity(field: f64) -> f64 {
    0.5 * SI.c0 * SI.epsilon0 * field * field
}

/// `T_flip = πħ / (E0 d)`: the resonant flip time with coupling `E0 d / 2`
/// playing the role of `ħA`.
pub fn flip_time(model: &HarvestModel) -> Result<f64> {
    model.validate()?;
    Ok(PI * SI.hbar / (field_amplitude(model.intensity)? * model.dipole))
}

/// `P = E0 d f / π` in watts, with `f` per the model's convention.
///
/// Under [`FrequencyConvention::Angular`] this equals `gap / T_flip`.
pub fn power_per_dipole(model: &HarvestModel) -> Result<f64> {
    model.validate()?;
    Ok(field_amplitude(model.intensity)? * model.dipole * model.frequency() / PI)
}

/// Power per dipole times the areal density, W/m².
pub fn power_per_area(model: &HarvestModel) -> Result<f64> {
    Ok(power_per_dipole(model)? * model.density)
}

/// `Tr(H0 ρT) - Tr(H0 ρ0)`.
pub fn delta_energy(
    rho0: &DensityMatrix,
    rho_t: &DensityMatrix,
    h0: &ComplexMatrix,
) -> Result<f64> {
    if h0.dim() != 2 {
        return Err(Error::Dimension {
            expected: "2",
            found: h0.dim(),
        });
    }
    if !h0.is_hermitian() {
        return Err(Error::NotHermitian {
            deviation: h0.hermiticity_error(),
        });
    }
    Ok((rho_t.expectation(h0) - rho0.expectation(h0)).re)
}
