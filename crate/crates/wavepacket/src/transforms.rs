//! Deterministic width-transformation rules: Lorentz boosts, potential-energy
//! addition (nonrelativistic and relativistic), the massless scale
//! transformation, and material interfaces for electrons and light.
//!
//! All maps act on a [`WidthState`] bundle of central momentum, per-axis
//! momentum and position widths, mass, and energy. Transverse widths are
//! fixed points of the boost and potential maps; the longitudinal product
//! delta_x_l * delta_p_l is an adiabatic invariant of the potential maps.

use serde::Serialize;

use crate::error::{Error, Result};

/// Central momentum, widths, mass, and energy of a propagating packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthState {
    /// Central longitudinal momentum.
    pub p0_l: f64,
    /// Longitudinal momentum width.
    pub delta_p_l: f64,
    /// Transverse momentum width.
    pub delta_p_t: f64,
    /// Longitudinal position width.
    pub delta_x_l: f64,
    /// Transverse position width.
    pub delta_x_t: f64,
    pub mass: f64,
    /// Total energy, consistent with (p0_l, mass) and any potential offset.
    pub energy: f64,
}

impl WidthState {
    /// Massive on-shell state with coherence-length positions dx = hbar/dp.
    pub fn on_shell(p0_l: f64, delta_p_l: f64, delta_p_t: f64, mass: f64, c: f64, hbar: f64) -> Self {
        let energy = ((p0_l * c).powi(2) + (mass * c * c).powi(2)).sqrt();
        WidthState {
            p0_l,
            delta_p_l,
            delta_p_t,
            delta_x_l: hbar / delta_p_l,
            delta_x_t: hbar / delta_p_t,
            mass,
            energy,
        }
    }

    pub fn validate(&self, c: f64) -> Result<()> {
        for (name, v) in [
            ("delta_p_l", self.delta_p_l),
            ("delta_p_t", self.delta_p_t),
            ("delta_x_l", self.delta_x_l),
            ("delta_x_t", self.delta_x_t),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid("state", format!("{name} must be > 0, got {v}")));
            }
        }
        if self.mass < 0.0 {
            return Err(Error::invalid("state", "mass must be >= 0"));
        }
        if self.mass > 0.0 && self.energy < self.mass * c * c * (1.0 - 1e-12) {
            return Err(Error::invalid(
                "state",
                format!("energy {} below rest energy {}", self.energy, self.mass * c * c),
            ));
        }
        Ok(())
    }

    /// Central velocity from the relativistic dispersion.
    pub fn velocity(&self, c: f64) -> f64 {
        self.p0_l * c * c / self.energy
    }
}

/// Material interface kinds for [`cross_interface`].
#[derive(Debug, Clone, Copy)]
pub enum InterfaceSpec {
    /// Electron leaving a metal: work function `e0`, band effective mass
    /// `m_eff`, vacuum mass `m0`.
    ElectronMetal { e0: f64, m_eff: f64, m0: f64 },
    /// Light leaving an insulator with relative permeability and dielectric
    /// constant.
    LightDielectric { mu_r: f64, eps_r: f64 },
    /// Light leaving an absorbing medium with resistivity `rho` (absolute
    /// permittivity eps_r * eps0 applies).
    LightAbsorbing { mu_r: f64, eps_r: f64, rho: f64 },
}

/// Extra outputs of an absorbing-medium crossing.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AbsorptionReport {
    /// Lifetime in the medium, eps * rho.
    pub lifetime: f64,
    /// Energy width hbar / lifetime.
    pub energy_width: f64,
}

/// Boost along the longitudinal axis with velocity beta (units of c).
///
/// (E, p_l) and (dE, dp_l) transform by the same boost matrix, with the
/// energy width tied to dp_l through the dispersion relation at the central
/// momentum. The transverse momentum width is untouched; position widths
/// are recomputed as hbar/dp per axis.
pub fn lorentz_boost(state: &WidthState, beta: f64, c: f64, hbar: f64) -> Result<WidthState> {
    state.validate(c)?;
    if !(beta.abs() < 1.0) {
        return Err(Error::invalid("beta", format!("|beta| must be < 1, got {beta}")));
    }
    let gamma_l = 1.0 / (1.0 - beta * beta).sqrt();
    let p_new = gamma_l * (state.p0_l - beta * state.energy / c);
    let e_new = gamma_l * (state.energy - beta * c * state.p0_l);

    let d_e = state.velocity(c) * state.delta_p_l;
    let dp_l_new = (gamma_l * (state.delta_p_l - beta * d_e / c)).abs();
    Ok(WidthState {
        p0_l: p_new,
        delta_p_l: dp_l_new,
        delta_p_t: state.delta_p_t,
        delta_x_l: hbar / dp_l_new,
        delta_x_t: hbar / state.delta_p_t,
        mass: state.mass,
        energy: e_new,
    })
}

/// Nonrelativistic potential step: p2^2 = p1^2 + 2 m v0, with
/// dp2 = dp1 p1/p2 and dx2 = dx1 p2/p1; the longitudinal product is
/// conserved exactly and transverse widths are untouched.
pub fn add_potential_nonrel(state: &WidthState, v0: f64, c: f64) -> Result<WidthState> {
    state.validate(c)?;
    let p2_sq = state.p0_l * state.p0_l + 2.0 * state.mass * v0;
    if p2_sq <= 0.0 {
        return Err(Error::Domain(format!(
            "classically forbidden: p^2 + 2 m v0 = {p2_sq:.6e} <= 0"
        )));
    }
    let p2 = p2_sq.sqrt().copysign(state.p0_l);
    let ratio = state.p0_l / p2;
    Ok(WidthState {
        p0_l: p2,
        delta_p_l: state.delta_p_l * ratio.abs(),
        delta_p_t: state.delta_p_t,
        delta_x_l: state.delta_x_l / ratio.abs(),
        delta_x_t: state.delta_x_t,
        mass: state.mass,
        energy: state.energy + (p2_sq - state.p0_l * state.p0_l) / (2.0 * state.mass),
    })
}

/// Relativistic potential step: sqrt(p1^2 + m^2) = sqrt(p2^2 + m^2) + v0
/// (c = 1 form), with (p1/E1) dp1 = (p2/E2) dp2 and the reciprocal ratio
/// for dx; transverse widths untouched.
pub fn add_potential_rel(state: &WidthState, v0: f64, c: f64) -> Result<WidthState> {
    state.validate(c)?;
    let m_c2 = state.mass * c * c;
    let e1 = ((state.p0_l * c).powi(2) + m_c2 * m_c2).sqrt();
    let e2 = e1 + v0;
    if e2 <= m_c2 {
        return Err(Error::Domain(format!(
            "resulting energy {e2:.6e} does not exceed the rest energy {m_c2:.6e}"
        )));
    }
    let p2 = (e2 * e2 - m_c2 * m_c2).sqrt() / c * state.p0_l.signum();
    // v_i = p_i c^2 / E_i; dp scales by v1/v2, dx by v2/v1
    let v1 = state.p0_l * c * c / e1;
    let v2 = p2 * c * c / e2;
    let ratio = (v1 / v2).abs();
    Ok(WidthState {
        p0_l: p2,
        delta_p_l: state.delta_p_l * ratio,
        delta_p_t: state.delta_p_t,
        delta_x_l: state.delta_x_l / ratio,
        delta_x_t: state.delta_x_t,
        mass: state.mass,
        energy: state.energy + v0,
    })
}

/// Massless scale transformation: momenta scale by lambda, positions by
/// 1/lambda.
pub fn scale_transform(state: &WidthState, lambda: f64, c: f64) -> Result<WidthState> {
    state.validate(c)?;
    if state.mass != 0.0 {
        return Err(Error::Domain(
            "scale transformation applies only to the massless particle".into(),
        ));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("must be > 0, got {lambda}")));
    }
    Ok(WidthState {
        p0_l: state.p0_l * lambda,
        delta_p_l: state.delta_p_l * lambda,
        delta_p_t: state.delta_p_t * lambda,
        delta_x_l: state.delta_x_l / lambda,
        delta_x_t: state.delta_x_t / lambda,
        mass: 0.0,
        energy: state.energy * lambda,
    })
}

/// Carry a packet across a material interface.
///
/// Electron case: e0 + p1^2/2m_eff = p2^2/2m0 for the central momentum,
/// p1 dp1/m_eff = p2 dp2/m0 longitudinally and dp1^2/m_eff = dp2^2/m0
/// transversely. Light cases: c_m p1 = c p2 with c_m = c/sqrt(mu_r eps_r);
/// the absorbing case also reports the lifetime eps*rho and its energy
/// width. Position widths follow the coherence-length rule hbar/dp.
pub fn cross_interface(
    state: &WidthState,
    spec: &InterfaceSpec,
    c: f64,
    hbar: f64,
    eps0: f64,
) -> Result<(WidthState, Option<AbsorptionReport>)> {
    state.validate(c)?;
    match *spec {
        InterfaceSpec::ElectronMetal { e0, m_eff, m0 } => {
            if !(m_eff > 0.0 && m0 > 0.0) {
                return Err(Error::invalid("m_eff", "effective and vacuum masses must be > 0"));
            }
            let kinetic2 = e0 + state.p0_l * state.p0_l / (2.0 * m_eff);
            if kinetic2 <= 0.0 {
                return Err(Error::Domain(format!(
                    "vacuum kinetic energy {kinetic2:.6e} <= 0; electron cannot escape"
                )));
            }
            let p2 = (2.0 * m0 * kinetic2).sqrt() * state.p0_l.signum();
            let dp_l = state.delta_p_l * (state.p0_l / m_eff) * (m0 / p2).abs();
            let dp_t = state.delta_p_t * (m0 / m_eff).sqrt();
            Ok((
                WidthState {
                    p0_l: p2,
                    delta_p_l: dp_l,
                    delta_p_t: dp_t,
                    delta_x_l: hbar / dp_l,
                    delta_x_t: hbar / dp_t,
                    mass: m0,
                    energy: state.energy + kinetic2 - state.p0_l * state.p0_l / (2.0 * m_eff),
                },
                None,
            ))
        }
        InterfaceSpec::LightDielectric { mu_r, eps_r }
        | InterfaceSpec::LightAbsorbing { mu_r, eps_r, .. } => {
            if !(mu_r > 0.0 && eps_r > 0.0) {
                return Err(Error::invalid("mu/eps", "must be > 0"));
            }
            // c_m p1 = c p2  =>  p2 = p1 / sqrt(mu_r eps_r)
            let factor = 1.0 / (mu_r * eps_r).sqrt();
            let out = WidthState {
                p0_l: state.p0_l * factor,
                delta_p_l: state.delta_p_l * factor,
                delta_p_t: state.delta_p_t * factor,
                delta_x_l: hbar / (state.delta_p_l * factor),
                delta_x_t: hbar / (state.delta_p_t * factor),
                mass: 0.0,
                energy: state.energy,
            };
            let report = if let InterfaceSpec::LightAbsorbing { rho, .. } = *spec {
                if !(rho > 0.0) {
                    return Err(Error::invalid("rho", "resistivity must be > 0"));
                }
                let lifetime = eps_r * eps0 * rho;
                Some(AbsorptionReport { lifetime, energy_width: hbar / lifetime })
            } else {
                None
            };
            Ok((out, report))
        }
    }
}
