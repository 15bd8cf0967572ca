//! Physical quantities written as `"<value> <unit>"` strings or bare numbers.

use hqc_core::units;
use serde::Deserialize;

/// A config value before unit conversion.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

fn split(text: &str) -> Result<(f64, &str), String> {
    let text = text.trim();
    let (value, unit) = text
        .split_once(char::is_whitespace)
        .ok_or_else(|| format!("expected \"<value> <unit>\", got {text:?}"))?;
    let value: f64 = value
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((value, unit.trim()))
}

fn finite_positive(x: f64) -> Result<f64, String> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be positive and finite, got {x}"))
    }
}

/// Rabi frequency in rad/fs. `"50 fs"` is read as `Ω⁻¹`.
pub fn rabi_frequency(q: &Quantity) -> Result<f64, String> {
    let value = match q {
        Quantity::Number(x) => *x,
        Quantity::Text(t) => {
            let (x, unit) = split(t)?;
            match unit {
                "rad/fs" | "1/fs" | "fs^-1" => x,
                "meV" => units::mev_to_rad_per_fs(x),
                "fs" => units::inverse_fs(finite_positive(x)?),
                other => return Err(format!("unknown frequency unit `{other}` (use rad/fs, meV or fs)")),
            }
        }
    };
    finite_positive(value)
}

/// Energy shift in rad/fs; bare numbers are meV.
pub fn energy(q: &Quantity) -> Result<f64, String> {
    let value = match q {
        Quantity::Number(x) => units::mev_to_rad_per_fs(*x),
        Quantity::Text(t) => {
            let (x, unit) = split(t)?;
            match unit {
                "meV" => units::mev_to_rad_per_fs(x),
                "rad/fs" => x,
                other => return Err(format!("unknown energy unit `{other}` (use meV or rad/fs)")),
            }
        }
    };
    finite_positive(value)
}

/// Duration in fs; bare numbers are fs.
pub fn duration(q: &Quantity) -> Result<f64, String> {
    let value = match q {
        Quantity::Number(x) => *x,
        Quantity::Text(t) => {
            let (x, unit) = split(t)?;
            match unit {
                "fs" => x,
                "ps" => units::ps_to_fs(x),
                "ns" => units::ns_to_fs(x),
                other => return Err(format!("unknown time unit `{other}` (use fs, ps or ns)")),
            }
        }
    };
    finite_positive(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(s: &str) -> Quantity {
        Quantity::Text(s.into())
    }

    #[test]
    fn inverse_femtoseconds() {
        assert!((rabi_frequency(&text("50 fs")).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(rabi_frequency(&text("0.02 rad/fs")).unwrap(), 0.02);
        assert_eq!(rabi_frequency(&Quantity::Number(0.02)).unwrap(), 0.02);
    }

    #[test]
    fn shift_in_mev() {
        let d = energy(&text("5 meV")).unwrap();
        // 5 / 658.2119
        assert!((d - 7.5963e-3).abs() < 1e-7);
        assert_eq!(energy(&Quantity::Number(5.0)).unwrap(), d);
    }

    #[test]
    fn durations() {
        assert!((duration(&text("0.8 ns")).unwrap() - 8e5).abs() < 1e-9);
        assert!((duration(&text("7.5 ps")).unwrap() - 7500.0).abs() < 1e-12);
        assert_eq!(duration(&Quantity::Number(10.0)).unwrap(), 10.0);
    }

    #[test]
    fn bad_units() {
        assert!(duration(&text("3 days")).is_err());
        assert!(rabi_frequency(&text("0.02")).is_err());
        assert!(rabi_frequency(&text("-50 fs")).is_err());
        assert!(energy(&text("five meV")).is_err());
    }
}
