//! Physical constants (SI units, CODATA 2018).

/// Planck constant [J s].
pub const H: f64 = 6.626_070_15e-34;
/// Reduced Planck constant [J s].
pub const HBAR: f64 = H / (2.0 * std::f64::consts::PI);
/// Elementary charge [C].
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant [J/K].
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum permittivity [F/m].
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light in vacuum [m/s].
pub const C_LIGHT: f64 = 299_792_458.0;
/// Newtonian gravitational constant [m^3 kg^-1 s^-2].
pub const G_NEWTON: f64 = 6.674_30e-11;
/// Atomic mass unit [kg].
pub const M_U: f64 = 1.660_539_066_60e-27;
/// Reduced flux quantum hbar/2e [Wb]. Enters the Josephson cosine argument.
pub const PHI_0_REDUCED: f64 = HBAR / (2.0 * E_CHARGE);
/// Flux quantum h/2e [Wb]. Flux ratios Phi/Phi_0 are expressed against this.
pub const PHI_0: f64 = H / (2.0 * E_CHARGE);

/// Angular frequency [rad/s] from ordinary frequency [Hz].
#[inline]
pub fn angular(f_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * f_hz
}

/// Ordinary frequency [Hz] from angular frequency [rad/s].
#[inline]
pub fn ordinary(omega: f64) -> f64 {
    omega / (2.0 * std::f64::consts::PI)
}
