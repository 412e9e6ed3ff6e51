//! Physical constants and unit conversions.

use crate::{Error, Result};

/// Speed of light in nm·THz (equivalently nm/ps).
pub const SPEED_OF_LIGHT: f64 = 299_792.458;

/// Planck constant in J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// OSNR reference bandwidth (0.1 nm near 1550 nm), GHz.
pub const OSNR_REFERENCE_GHZ: f64 = 12.5;

/// Frequency in THz of a vacuum wavelength in nm.
pub fn wavelength_to_frequency(lambda_nm: f64) -> Result<f64> {
    if !(lambda_nm > 0.0) || !lambda_nm.is_finite() {
        return Err(Error::Domain("wavelength must be positive and finite"));
    }
    Ok(SPEED_OF_LIGHT / lambda_nm)
}

/// Vacuum wavelength in nm of a frequency in THz.
pub fn frequency_to_wavelength(freq_thz: f64) -> Result<f64> {
    if !(freq_thz > 0.0) || !freq_thz.is_finite() {
        return Err(Error::Domain("frequency must be positive and finite"));
    }
    Ok(SPEED_OF_LIGHT / freq_thz)
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// `10·log10(x)`; zero maps to `-inf`.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

/// Attenuation in dB/km to the power attenuation coefficient in 1/km.
pub fn db_per_km_to_neper(alpha_db: f64) -> f64 {
    alpha_db * core::f64::consts::LN_10 / 10.0
}

/// Group-velocity dispersion β2 in ps²/km from D in ps/(nm·km).
pub fn beta2_from_dispersion(d_ps_nm_km: f64, lambda_nm: f64) -> f64 {
    -d_ps_nm_km * lambda_nm * lambda_nm / (2.0 * core::f64::consts::PI * SPEED_OF_LIGHT)
}

/// Third-order dispersion β3 in ps³/km from D and slope S (ps/(nm²·km)).
pub fn beta3_from_dispersion(d_ps_nm_km: f64, slope: f64, lambda_nm: f64) -> f64 {
    let k = lambda_nm / (2.0 * core::f64::consts::PI * SPEED_OF_LIGHT);
    k * k * (lambda_nm * lambda_nm * slope + 2.0 * lambda_nm * d_ps_nm_km)
}

/// Spectral width in nm of a slot `df_ghz` wide centred at `lambda_nm`.
pub fn slot_width_nm(lambda_nm: f64, df_ghz: f64) -> f64 {
    lambda_nm * lambda_nm * (df_ghz * 1e-3) / SPEED_OF_LIGHT
}
