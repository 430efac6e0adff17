//! First-order radio dissipation model.
//!
//! Transmitting `k` bits over `d` meters costs `k * e_elec + k * eps * d^n`,
//! where the amplifier switches from free-space (`n = 2`) to multipath
//! (`n = 4`) at the crossover distance `d0 = sqrt(eps_fs / eps_mp)`.
//! Receiving costs the circuit energy only, and aggregation is linear in the
//! number of fused bits. All quantities are SI: joules, meters, bits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadioError {
    #[error("message length must be at least one bit")]
    ZeroBits,
    #[error("distance must be a non-negative finite number, got {0}")]
    BadDistance(f64),
    #[error("radio parameter `{name}` must be strictly positive and finite, got {value}")]
    BadParam { name: &'static str, value: f64 },
}

// Dividing by exact powers of ten keeps `50 nJ` bitwise equal to `50e-9`.
const PER_NANO: f64 = 1e9;
const PER_PICO: f64 = 1e12;

/// Energy constants of the radio, stored in joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Transmitter/receiver circuit energy, J/bit.
    pub e_elec: f64,
    /// Free-space amplifier coefficient, J/bit/m².
    pub eps_fs: f64,
    /// Multipath amplifier coefficient, J/bit/m⁴.
    pub eps_mp: f64,
    /// Data aggregation energy, J/bit/signal.
    pub e_da: f64,
    /// Data frame length in bits.
    pub msg_bits: u64,
}

impl RadioParams {
    pub fn new(
        e_elec: f64,
        eps_fs: f64,
        eps_mp: f64,
        e_da: f64,
        msg_bits: u64,
    ) -> Result<Self, RadioError> {
        for (name, value) in [
            ("e_elec", e_elec),
            ("eps_fs", eps_fs),
            ("eps_mp", eps_mp),
            ("e_da", e_da),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(RadioError::BadParam { name, value });
            }
        }
        if msg_bits == 0 {
            return Err(RadioError::ZeroBits);
        }
        Ok(Self {
            e_elec,
            eps_fs,
            eps_mp,
            e_da,
            msg_bits,
        })
    }

    /// Builds parameters from the customary datasheet units: nJ/bit for the
    /// circuit and aggregation terms, pJ/bit/m² and pJ/bit/m⁴ for the
    /// amplifiers.
    pub fn from_datasheet_units(
        e_elec_nj: f64,
        eps_fs_pj: f64,
        eps_mp_pj: f64,
        e_da_nj: f64,
        msg_bits: u64,
    ) -> Result<Self, RadioError> {
        Self::new(
            e_elec_nj / PER_NANO,
            eps_fs_pj / PER_PICO,
            eps_mp_pj / PER_PICO,
            e_da_nj / PER_NANO,
            msg_bits,
        )
    }

    /// 50 nJ/bit circuit, 5 nJ/bit/signal aggregation, 10 pJ/bit/m² and
    /// 0.0013 pJ/bit/m⁴ amplifiers, 4000-bit frames.
    pub fn reference() -> Self {
        Self::from_datasheet_units(50.0, 10.0, 0.0013, 5.0, 4000)
            .expect("reference radio constants are valid")
    }

    pub fn crossover_distance(&self) -> f64 {
        crossover_distance(self)
    }
}

impl Default for RadioParams {
    fn default() -> Self {
        Self::reference()
    }
}

fn check_bits(k: u64) -> Result<f64, RadioError> {
    if k == 0 {
        Err(RadioError::ZeroBits)
    } else {
        Ok(k as f64)
    }
}

/// `d0 = sqrt(eps_fs / eps_mp)`.
pub fn crossover_distance(p: &RadioParams) -> f64 {
    (p.eps_fs / p.eps_mp).sqrt()
}

/// Energy to transmit `k` bits over `d` meters. A distance of exactly `d0`
/// uses the multipath branch.
pub fn tx_energy(k: u64, d: f64, p: &RadioParams) -> Result<f64, RadioError> {
    let bits = check_bits(k)?;
    if !(d >= 0.0 && d.is_finite()) {
        return Err(RadioError::BadDistance(d));
    }
    let amp = if d < crossover_distance(p) {
        p.eps_fs * d * d
    } else {
        p.eps_mp * d * d * d * d
    };
    Ok(bits * p.e_elec + bits * amp)
}

/// Energy to receive `k` bits.
pub fn rx_energy(k: u64, p: &RadioParams) -> Result<f64, RadioError> {
    Ok(check_bits(k)? * p.e_elec)
}

/// Energy to aggregate `m` frames of `k` bits each.
pub fn agg_energy(m: u64, k: u64, p: &RadioParams) -> Result<f64, RadioError> {
    let bits = check_bits(k)?;
    Ok(m as f64 * bits * p.e_da)
}
