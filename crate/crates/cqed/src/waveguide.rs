//! Lumped LC-ladder equivalents of quarter- and half-wave waveguide
//! resonators.
//!
//! A shorted line seen from a distance lambda/4 presents the impedance
//! `i Z_c tan(pi omega / 2 omega_c)`; the partial-fraction expansion of
//! the tangent turns this into a ladder of parallel LC oscillators with
//! one capacitance `C` shared by all modes and per-mode inductances
//! falling off as `1/(2m+1)^2`. An open line at lambda/2 gives the same
//! ladder with different constants.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::constants::C_LIGHT;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveguideKind {
    QuarterWave,
    HalfWave,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WaveguideSpec {
    pub kind: WaveguideKind,
    /// Characteristic impedance [Ohm].
    pub z_c: f64,
    /// Fundamental angular frequency with ideal termination [rad/s].
    pub omega_c: f64,
    /// Number of retained modes.
    pub modes: usize,
}

/// One LC ladder rung per retained waveguide mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeLadder {
    /// Shared per-mode capacitance [F].
    pub c: f64,
    /// Per-mode inductance [H], strictly decreasing as 1/(2m+1)^2.
    pub l: Vec<f64>,
    /// Mode angular frequencies (2m+1) omega_0 [rad/s].
    pub omega: Vec<f64>,
}

impl WaveguideSpec {
    fn validate(&self) -> Result<()> {
        if !(self.z_c > 0.0) || !(self.omega_c > 0.0) || self.modes < 1 {
            return Err(Error::Value {
                line: 0,
                message: format!(
                    "waveguide spec requires Z_c > 0, omega_c > 0, M >= 1; got Z_c={}, omega_c={}, M={}",
                    self.z_c, self.omega_c, self.modes
                ),
            });
        }
        Ok(())
    }
}

/// Computes the LC ladder for a waveguide spec.
///
/// Quarter wave: C = pi/(4 omega_c Z_c), L_m = (1/(2m+1)^2) 4 Z_c/(pi omega_c).
/// Half wave:    C = pi/(2 omega_c Z_c), L_m = (1/(2m+1)^2) 2 Z_c/(pi omega_c).
pub fn lumped_equivalent(spec: &WaveguideSpec) -> Result<ModeLadder> {
    spec.validate()?;
    let pi = std::f64::consts::PI;
    let (c, l0) = match spec.kind {
        WaveguideKind::QuarterWave => (
            pi / (4.0 * spec.omega_c * spec.z_c),
            4.0 * spec.z_c / (pi * spec.omega_c),
        ),
        WaveguideKind::HalfWave => (
            pi / (2.0 * spec.omega_c * spec.z_c),
            2.0 * spec.z_c / (pi * spec.omega_c),
        ),
    };
    let mut l = Vec::with_capacity(spec.modes);
    let mut omega = Vec::with_capacity(spec.modes);
    for m in 0..spec.modes {
        let odd = (2 * m + 1) as f64;
        l.push(l0 / (odd * odd));
        omega.push(odd / (l0 * c).sqrt());
    }
    Ok(ModeLadder { c, l, omega })
}

/// Input impedance of the ladder: sum over parallel LC branches.
pub fn ladder_impedance(ladder: &ModeLadder, omega: f64) -> Result<C64> {
    for &pole in &ladder.omega {
        if (omega - pole).abs() <= 1e-12 * pole {
            return Err(Error::Pole { omega, pole });
        }
    }
    let mut z = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    for &lm in &ladder.l {
        let y = i * ladder.c * omega + 1.0 / (i * lm * omega);
        z += 1.0 / y;
    }
    Ok(z)
}

/// Closed-form line impedance the ladder approximates as M grows.
pub fn line_impedance(kind: WaveguideKind, z_c: f64, omega_c: f64, omega: f64) -> C64 {
    let pi = std::f64::consts::PI;
    match kind {
        WaveguideKind::QuarterWave => C64::new(0.0, z_c * (pi / 2.0 * omega / omega_c).tan()),
        WaveguideKind::HalfWave => C64::new(0.0, -z_c / (pi * omega / omega_c).tan()),
    }
}

/// Phase velocity and effective relative permittivity from the physical
/// line length and the measured fundamental frequency (half-wave
/// convention, lambda_1 = 2 length).
pub fn phase_velocity_check(length: f64, omega_r: f64) -> (f64, f64) {
    let lambda_1 = 2.0 * length;
    let v_phi = lambda_1 * omega_r / (2.0 * std::f64::consts::PI);
    let eps_r_eff = (C_LIGHT / v_phi).powi(2);
    (v_phi, eps_r_eff)
}
