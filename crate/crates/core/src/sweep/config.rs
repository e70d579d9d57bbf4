//! `key = value` sweep configuration files.
//!
//! ```text
//! # start from a preset, then override
//! preset = sim-narrow-strong
//! phys = ble-1m, ble-2m
//! num_packets = 500
//! ```

use std::str::FromStr;

use super::{preset, ConfigError, SweepSpec, VotingMode};
use crate::channel::BeatingClass;
use crate::phy::PhyKind;

/// Parses a config file. Settings apply on top of `preset` when one is named,
/// otherwise on top of `sim-wide-strong`.
pub fn parse_config(text: &str) -> Result<SweepSpec, ConfigError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax(lineno + 1))?;
        entries.push((key.trim(), value.trim()));
    }

    let base = entries
        .iter()
        .rev()
        .find(|(k, _)| *k == "preset")
        .map_or("sim-wide-strong", |(_, v)| *v);
    let mut spec = preset(base)?;
    for (key, value) in entries {
        apply(&mut spec, key, value)?;
    }
    spec.validate()?;
    Ok(spec)
}

fn bad(key: &str, value: &str, reason: impl ToString) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_owned(),
        value: value.to_owned(),
        reason: reason.to_string(),
    }
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: ToString,
{
    value.parse().map_err(|e: T::Err| bad(key, value, e))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: ToString,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| item.parse().map_err(|e: T::Err| bad(key, item, e)))
        .collect()
}

pub(super) fn apply(spec: &mut SweepSpec, key: &str, value: &str) -> Result<(), ConfigError> {
    match key {
        "preset" => {}
        "name" => spec.name = value.to_owned(),
        "phys" => spec.phys = list::<PhyKind>(key, value)?,
        "cfo_values_hz" => spec.cfo_values_hz = list(key, value)?,
        "power_deltas_db" => spec.power_deltas_db = list(key, value)?,
        "snr_db" => spec.snr_db = scalar(key, value)?,
        "num_packets" => spec.num_packets = scalar(key, value)?,
        "slots_per_round" => spec.slots_per_round = scalar(key, value)?,
        "seed" | "master_seed" => spec.master_seed = scalar(key, value)?,
        "voting" => spec.voting = scalar::<VotingMode>(key, value)?,
        "ble_payload_bytes" => spec.ble_payload_bytes = scalar(key, value)?,
        "ieee_payload_bytes" => spec.ieee_payload_bytes = scalar(key, value)?,
        "tx_power_dbm" => spec.tx_power_dbm = scalar(key, value)?,
        "beating_class" => {
            spec.beating_class = match value {
                "auto" => None,
                _ => Some(scalar::<BeatingClass>(key, value)?),
            }
        }
        "narrow_min_periods" => spec.thresholds.narrow_min_periods = scalar(key, value)?,
        "strong_max_db" => spec.thresholds.strong_max_db = scalar(key, value)?,
        "capture_db" => spec.thresholds.capture_db = scalar(key, value)?,
        other => return Err(ConfigError::UnknownKey(other.to_owned())),
    }
    Ok(())
}

impl SweepSpec {
    /// Applies one `key = value` override, as in a config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        apply(self, key, value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_on_top_of_a_preset() {
        let spec = parse_config(
            "# narrow, uncoded only\n\
             preset = sim-narrow-strong\n\
             phys = ble-1m, ble-2m   # trailing comment\n\
             num_packets = 50\n\
             voting = on\n\
             beating_class = auto\n",
        )
        .unwrap();
        assert_eq!(spec.name, "sim-narrow-strong");
        assert_eq!(spec.phys, vec![PhyKind::Ble1M, PhyKind::Ble2M]);
        assert_eq!(spec.num_packets, 50);
        assert_eq!(spec.voting, VotingMode::On);
        assert_eq!(spec.beating_class, None);
        assert_eq!(spec.cfo_values_hz.len(), 7);
    }

    #[test]
    fn empty_file_is_the_default_preset() {
        assert_eq!(
            parse_config("").unwrap(),
            preset("sim-wide-strong").unwrap()
        );
    }

    #[test]
    fn errors_are_named() {
        assert_eq!(
            parse_config("bogus = 1"),
            Err(ConfigError::UnknownKey("bogus".into()))
        );
        assert_eq!(parse_config("phys"), Err(ConfigError::Syntax(1)));
        assert_eq!(parse_config("phys ="), Err(ConfigError::EmptyList("phys")));
        assert!(matches!(
            parse_config("num_packets = many"),
            Err(ConfigError::BadValue { key, .. }) if key == "num_packets"
        ));
        assert!(matches!(
            parse_config("phys = ble-1m, ble-9m"),
            Err(ConfigError::BadValue { value, .. }) if value == "ble-9m"
        ));
        assert_eq!(
            parse_config("cfo_values_hz = -5"),
            Err(ConfigError::NonPositiveCfo(-5.0))
        );
        assert!(matches!(
            parse_config("preset = nope"),
            Err(ConfigError::UnknownPreset { .. })
        ));
    }
}
