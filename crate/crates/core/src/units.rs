//! Fixed physical constants, all expressed as frequencies.

/// Bohr magneton over Planck's constant, GHz/T.
pub const MU_B_GHZ_PER_T: f64 = 13.996245;

/// Boltzmann constant over Planck's constant, GHz/K.
pub const K_B_GHZ_PER_K: f64 = 20.836612;

pub const GHZ: f64 = 1e9;
pub const MHZ: f64 = 1e6;

/// Landé g-factor of a Russell–Saunders term.
pub fn lande_g(s: f64, l: f64, j: f64) -> f64 {
    let jj = j * (j + 1.0);
    1.0 + (jj + s * (s + 1.0) - l * (l + 1.0)) / (2.0 * jj)
}

pub fn kelvin_to_ghz(k: f64) -> f64 {
    k * K_B_GHZ_PER_K
}

pub fn ghz_to_kelvin(ghz: f64) -> f64 {
    ghz / K_B_GHZ_PER_K
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lande_factor_of_7f6_is_three_halves() {
        assert!((lande_g(3.0, 3.0, 6.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn microkelvin_in_hertz() {
        let hz = kelvin_to_ghz(1e-6) * GHZ;
        assert!((hz - 20_836.612).abs() < 1e-6);
    }
}
