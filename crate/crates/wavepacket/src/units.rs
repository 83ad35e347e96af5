//! Physical constants and unit-system selection.
//!
//! Constant values from CODATA 2018 / NIST. The `si` system carries the
//! real-world constants; the `natural` system sets ħ = c = k_B = 1 so that
//! desk-scale packet and scattering runs stay O(1).

use serde::{Deserialize, Serialize};

/// Reduced Planck constant (J·s)
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum (m/s)
pub const C_SI: f64 = 299_792_458.0;

/// Boltzmann constant (J/K)
pub const KB_SI: f64 = 1.380_649e-23;

/// Elementary charge (C)
pub const E_CHARGE_SI: f64 = 1.602_176_634e-19;

/// Electron mass (kg)
pub const M_ELECTRON_SI: f64 = 9.109_383_701_5e-31;

/// Vacuum permittivity (F/m)
pub const EPS0_SI: f64 = 8.854_187_812_8e-12;

/// Classical electron radius e²/(4πε₀ m_e c²) (m)
pub fn classical_electron_radius() -> f64 {
    let coulomb = E_CHARGE_SI * E_CHARGE_SI / (4.0 * std::f64::consts::PI * EPS0_SI);
    coulomb / (M_ELECTRON_SI * C_SI * C_SI)
}

/// Selectable unit system. All library operations are unit-agnostic
/// internally; this only fixes the values of the fundamental constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Natural,
    Si,
}

impl UnitSystem {
    pub fn hbar(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => HBAR_SI,
        }
    }

    pub fn c(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => C_SI,
        }
    }

    pub fn k_b(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => KB_SI,
        }
    }

    pub fn eps0(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => EPS0_SI,
        }
    }
}

impl std::str::FromStr for UnitSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "natural" => Ok(UnitSystem::Natural),
            "si" => Ok(UnitSystem::Si),
            other => Err(format!("unknown unit system `{other}` (expected `natural` or `si`)")),
        }
    }
}

impl std::fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnitSystem::Natural => write!(f, "natural"),
            UnitSystem::Si => write!(f, "si"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn electron_radius_matches_reference() {
        // r_e = 2.8179403262e-15 m
        let r = classical_electron_radius();
        assert!((r - 2.817_940_3e-15).abs() / 2.817_940_3e-15 < 1e-6);
    }

    #[test]
    fn natural_units_are_unity() {
        let u = UnitSystem::Natural;
        assert_eq!(u.hbar(), 1.0);
        assert_eq!(u.c(), 1.0);
        assert_eq!(u.k_b(), 1.0);
    }
}
