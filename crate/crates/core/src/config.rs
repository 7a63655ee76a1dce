//! Field configuration files.
//!
//! A field is described by a small TOML document:
//!
//! ```toml
//! name = "Q(sqrt5)"
//! minpoly = [-1, -1, 1]            # integer coefficients, ascending degree
//! known_discriminant = 5           # optional cross-check
//! known_h_K = 1                    # optional class number
//!
//! # required for degree >= 3, computed for quadratic fields if omitted:
//! integral_basis = [["1", "0"], ["0", "1"]]   # rows over the power basis, "p/q" strings
//! fundamental_units = [["0", "1"]]            # coordinates over the integral basis
//!
//! # optional cusp class representatives [alpha : beta], default [1 : 0]:
//! [[cusp_reps]]
//! alpha = ["1", "0"]
//! beta = ["0", "0"]
//! ```
//!
//! Unknown keys are rejected.

use num::bigint::BigInt;
use num::rational::BigRational;
use serde::Deserialize;

use crate::field::{Field, FieldError, NumberField, DEFAULT_PRECISION_BITS};
use crate::numutil::parse_rational;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub name: String,
    /// Integer coefficients of the monic minimal polynomial, ascending.
    pub minpoly: Vec<i64>,
    /// Rows over the power basis, entries "p/q".
    pub integral_basis: Option<Vec<Vec<String>>>,
    /// Coordinates over the integral basis, entries "p/q".
    pub fundamental_units: Option<Vec<Vec<String>>>,
    #[serde(rename = "known_h_K")]
    pub known_h_k: Option<u32>,
    pub known_discriminant: Option<i64>,
    pub cusp_reps: Option<Vec<CuspRepConfig>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuspRepConfig {
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
}

impl FieldConfig {
    pub fn from_toml(text: &str) -> Result<Self, FieldError> {
        toml::from_str(text).map_err(|e| FieldError::Config(e.to_string()))
    }

    /// Validates the configuration and builds the field.
    pub fn build(&self, precision_bits: Option<u32>) -> Result<Field, FieldError> {
        let minpoly: Vec<BigInt> = self.minpoly.iter().map(|&c| BigInt::from(c)).collect();
        let basis = self
            .integral_basis
            .as_ref()
            .map(|rows| parse_rows(rows))
            .transpose()?;
        let units = self
            .fundamental_units
            .as_ref()
            .map(|rows| parse_rows(rows))
            .transpose()?;
        let reps = self
            .cusp_reps
            .as_ref()
            .map(|reps| {
                reps.iter()
                    .map(|r| Ok((parse_row(&r.alpha)?, parse_row(&r.beta)?)))
                    .collect::<Result<Vec<_>, FieldError>>()
            })
            .transpose()?;
        NumberField::build(
            &self.name,
            minpoly,
            basis,
            units,
            self.known_h_k,
            self.known_discriminant.map(BigInt::from),
            reps,
            precision_bits.unwrap_or(DEFAULT_PRECISION_BITS),
        )
    }
}

/// Parses a config file and builds the field in one step.
pub fn parse_field_config(text: &str) -> Result<Field, FieldError> {
    FieldConfig::from_toml(text)?.build(None)
}

/// As [`parse_field_config`] with explicit working precision.
pub fn parse_field_config_with_precision(
    text: &str,
    precision_bits: u32,
) -> Result<Field, FieldError> {
    FieldConfig::from_toml(text)?.build(Some(precision_bits))
}

fn parse_row(row: &[String]) -> Result<Vec<BigRational>, FieldError> {
    row.iter()
        .map(|s| {
            parse_rational(s).ok_or_else(|| FieldError::Config(format!("bad rational: {s:?}")))
        })
        .collect()
}

fn parse_rows(rows: &[Vec<String>]) -> Result<Vec<Vec<BigRational>>, FieldError> {
    rows.iter().map(|r| parse_row(r)).collect()
}

/// Built-in configuration texts used by tests and examples.
pub mod builtin {
    pub const Q_SQRT5: &str = r#"
name = "Q(sqrt5)"
minpoly = [-1, -1, 1]
known_discriminant = 5
known_h_K = 1
"#;

    pub const Q_SQRT2: &str = r#"
name = "Q(sqrt2)"
minpoly = [-2, 0, 1]
known_discriminant = 8
known_h_K = 1
"#;

    pub const Q_SQRT3: &str = r#"
name = "Q(sqrt3)"
minpoly = [-3, 0, 1]
known_discriminant = 12
known_h_K = 1
"#;

    pub const Q_SQRT10: &str = r#"
name = "Q(sqrt10)"
minpoly = [-10, 0, 1]
known_discriminant = 40
known_h_K = 2

[[cusp_reps]]
alpha = ["1", "0"]
beta = ["0", "0"]

[[cusp_reps]]
alpha = ["0", "1"]
beta = ["2", "0"]
"#;

    pub const CUBIC_49: &str = r#"
name = "Q(zeta7)+"
minpoly = [1, -2, -1, 1]
integral_basis = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
fundamental_units = [["0", "1", "0"], ["1", "-1", "0"]]
known_discriminant = 49
known_h_K = 1
"#;

    pub const ALL: [(&str, &str); 5] = [
        ("q_sqrt5", Q_SQRT5),
        ("q_sqrt2", Q_SQRT2),
        ("q_sqrt3", Q_SQRT3),
        ("q_sqrt10", Q_SQRT10),
        ("cubic_49", CUBIC_49),
    ];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        let text = "name = \"x\"\nminpoly = [-1, -1, 1]\nbogus = 3\n";
        assert!(FieldConfig::from_toml(text).is_err());
    }

    #[test]
    fn builds_builtin_quadratics() {
        for (name, text) in builtin::ALL {
            let field = parse_field_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(field.degree >= 2, "{name}");
        }
    }
}
