//! Internal unit system: `ħ = 1`, time in fs, energy and angular frequency in
//! rad/fs.

/// Reduced Planck constant in meV·fs.
pub const HBAR_MEV_FS: f64 = 658.2119;

pub const FS_PER_PS: f64 = 1.0e3;
pub const FS_PER_NS: f64 = 1.0e6;

pub fn mev_to_rad_per_fs(energy_mev: f64) -> f64 {
    energy_mev / HBAR_MEV_FS
}

pub fn rad_per_fs_to_mev(omega: f64) -> f64 {
    omega * HBAR_MEV_FS
}

/// Angular frequency whose inverse is the given time, `Ω = 1 / τ`.
pub fn inverse_fs(period_fs: f64) -> f64 {
    1.0 / period_fs
}

pub fn ps_to_fs(t: f64) -> f64 {
    t * FS_PER_PS
}

pub fn ns_to_fs(t: f64) -> f64 {
    t * FS_PER_NS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_mev_in_rad_per_fs() {
        assert!((mev_to_rad_per_fs(5.0) - 7.596_4e-3).abs() < 1e-7);
        assert!((rad_per_fs_to_mev(mev_to_rad_per_fs(5.0)) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn time_conversions() {
        assert_eq!(ns_to_fs(0.8), 8.0e5);
        assert_eq!(ps_to_fs(7.5), 7500.0);
        assert_eq!(inverse_fs(50.0), 0.02);
    }
}
