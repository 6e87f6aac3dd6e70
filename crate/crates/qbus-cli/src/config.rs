//! Flat key/value configuration: one `key = value` (or comma-separated
//! list) per line, `#` comments. Command-line flags override file values
//! field by field.

use qbus::{ErrorModel, TimeModel};
use std::collections::BTreeSet;

/// A configuration problem, always naming the offending field.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Raw parsed file contents; everything optional so flags can fill gaps.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub lengths: Option<Vec<usize>>,
    pub p: Option<Vec<f64>>,
    pub eta: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub model: Option<ErrorModel>,
    pub rounds: Option<u32>,
    pub noisy_ops: Option<bool>,
    pub target: Option<f64>,
    pub seed: Option<u64>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub taum: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut out = ConfigFile::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(
                    "syntax",
                    format!("line {}: expected 'key = value'", lineno + 1),
                ));
            };
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::new(key, "duplicate key"));
            }
            match key {
                "lengths" => out.lengths = Some(parse_list(key, value, parse_usize)?),
                "p" => out.p = Some(parse_list(key, value, parse_f64)?),
                "eta" => out.eta = Some(parse_list(key, value, parse_f64)?),
                "gamma" => out.gamma = Some(parse_list(key, value, parse_f64)?),
                "model" => {
                    out.model = Some(
                        value
                            .parse::<ErrorModel>()
                            .map_err(|e| ConfigError::new(key, e))?,
                    )
                }
                "rounds" => {
                    out.rounds = Some(
                        value
                            .parse::<u32>()
                            .map_err(|_| ConfigError::new(key, format!("not an integer: '{value}'")))?,
                    )
                }
                "noisy_ops" => {
                    out.noisy_ops = Some(match value {
                        "true" | "yes" | "1" => true,
                        "false" | "no" | "0" => false,
                        other => {
                            return Err(ConfigError::new(key, format!("not a boolean: '{other}'")))
                        }
                    })
                }
                "target" => out.target = Some(parse_f64(key, value)?),
                "seed" => {
                    out.seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| ConfigError::new(key, format!("not an integer: '{value}'")))?,
                    )
                }
                "tau1" => out.tau1 = Some(parse_f64(key, value)?),
                "tau2" => out.tau2 = Some(parse_f64(key, value)?),
                "taum" => out.taum = Some(parse_f64(key, value)?),
                other => return Err(ConfigError::new(other, "unknown key")),
            }
        }
        Ok(out)
    }

    /// Field-by-field override: anything set in `flags` wins.
    pub fn overridden_by(mut self, flags: &ConfigFile) -> ConfigFile {
        macro_rules! take {
            ($field:ident) => {
                if flags.$field.is_some() {
                    self.$field = flags.$field.clone();
                }
            };
        }
        take!(lengths);
        take!(p);
        take!(eta);
        take!(gamma);
        take!(model);
        take!(rounds);
        take!(noisy_ops);
        take!(target);
        take!(seed);
        take!(tau1);
        take!(tau2);
        take!(taum);
        self
    }
}

fn parse_list<T>(
    key: &str,
    value: &str,
    one: fn(&str, &str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    let items: Vec<&str> = value.split(',').map(str::trim).collect();
    if items.iter().all(|s| s.is_empty()) {
        return Err(ConfigError::new(key, "empty list"));
    }
    items
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(|s| one(key, s))
        .collect()
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse::<usize>()
        .map_err(|_| ConfigError::new(key, format!("not an integer: '{value}'")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v = value
        .parse::<f64>()
        .map_err(|_| ConfigError::new(key, format!("not a number: '{value}'")))?;
    if !v.is_finite() {
        return Err(ConfigError::new(key, format!("not finite: '{value}'")));
    }
    Ok(v)
}

/// A validated sweep: the cartesian product of the parameter lists, plus
/// optional purification and timing add-ons.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub lengths: Vec<usize>,
    pub p_values: Vec<f64>,
    pub eta_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub error_model: ErrorModel,
    pub purify_rounds: Option<u32>,
    pub noisy_ops: bool,
    pub purify_target: Option<f64>,
    pub time_model: Option<TimeModel>,
    pub seed: u64,
}

impl SweepSpec {
    pub fn from_config(config: &ConfigFile) -> Result<Self, ConfigError> {
        let lengths = config
            .lengths
            .clone()
            .ok_or_else(|| ConfigError::new("lengths", "missing (required)"))?;
        if lengths.is_empty() {
            return Err(ConfigError::new("lengths", "empty list"));
        }
        for &l in &lengths {
            if l < 2 {
                return Err(ConfigError::new("lengths", format!("length {l} below 2")));
            }
        }
        let p_values = config.p.clone().unwrap_or_else(|| vec![0.995]);
        for &p in &p_values {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::new("p", format!("{p} outside [0, 1]")));
            }
        }
        let eta_values = config.eta.clone().unwrap_or_else(|| vec![0.99]);
        for &eta in &eta_values {
            if !(0.5..=1.0).contains(&eta) {
                return Err(ConfigError::new("eta", format!("{eta} outside [1/2, 1]")));
            }
        }
        let gamma_values = config.gamma.clone().unwrap_or_else(|| vec![0.0]);
        for &gamma in &gamma_values {
            if gamma < 0.0 {
                return Err(ConfigError::new("gamma", format!("{gamma} negative")));
            }
        }
        let error_model = config.model.unwrap_or(ErrorModel::Dep);
        if gamma_values.iter().any(|&g| g > 0.0) && error_model != ErrorModel::CpeLeakage {
            return Err(ConfigError::new(
                "gamma",
                "nonzero gamma requires model = cpe-leak",
            ));
        }
        if let Some(target) = config.target {
            if !(0.0..=1.0).contains(&target) {
                return Err(ConfigError::new("target", format!("{target} outside [0, 1]")));
            }
        }
        let time_model = match (config.tau1, config.tau2, config.taum) {
            (None, None, None) => None,
            (Some(t1), Some(t2), Some(tm)) => Some(TimeModel::new(t1, t2, tm).map_err(|e| {
                ConfigError::new("tau1/tau2/taum", e.to_string())
            })?),
            (t1, t2, _tm) => {
                let missing = if t1.is_none() {
                    "tau1"
                } else if t2.is_none() {
                    "tau2"
                } else {
                    "taum"
                };
                return Err(ConfigError::new(
                    missing,
                    "time model needs all of tau1, tau2, taum",
                ));
            }
        };
        Ok(SweepSpec {
            lengths,
            p_values,
            eta_values,
            gamma_values,
            error_model,
            purify_rounds: config.rounds,
            noisy_ops: config.noisy_ops.unwrap_or(false),
            purify_target: config.target,
            time_model,
            seed: config.seed.unwrap_or(0),
        })
    }

    /// Parameter tuples in deterministic sweep order.
    pub fn tuples(&self) -> Vec<(usize, f64, f64, f64)> {
        let mut out = Vec::new();
        for &l in &self.lengths {
            for &p in &self.p_values {
                for &eta in &self.eta_values {
                    for &gamma in &self.gamma_values {
                        out.push((l, p, eta, gamma));
                    }
                }
            }
        }
        out
    }

    /// JSON echo of the spec, embedded next to the emitted rows.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lengths": self.lengths,
            "p_values": self.p_values,
            "eta_values": self.eta_values,
            "gamma_values": self.gamma_values,
            "error_model": self.error_model.as_str(),
            "purify_rounds": self.purify_rounds,
            "noisy_ops": self.noisy_ops,
            "purify_target": self.purify_target,
            "time_model": self.time_model.map(|tm| serde_json::json!({
                "tau_1bit": tm.tau_1bit,
                "tau_2bit": tm.tau_2bit,
                "tau_meas": tm.tau_meas,
            })),
            "seed": self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_file() {
        let text = "\
# sweep over two lengths
lengths = 4, 6
p = 0.99, 0.995
eta = 0.99
gamma = 0
model = dep
rounds = 6
noisy_ops = true
seed = 7
tau1 = 1
tau2 = 1
taum = 1
";
        let config = ConfigFile::parse(text).unwrap();
        assert_eq!(config.lengths, Some(vec![4, 6]));
        assert_eq!(config.p, Some(vec![0.99, 0.995]));
        assert_eq!(config.model, Some(ErrorModel::Dep));
        assert_eq!(config.noisy_ops, Some(true));
        let spec = SweepSpec::from_config(&config).unwrap();
        assert_eq!(spec.tuples().len(), 4);
        assert!(spec.time_model.is_some());
    }

    #[test]
    fn unknown_and_duplicate_keys_are_named() {
        let err = ConfigFile::parse("bogus = 1").unwrap_err();
        assert_eq!(err.field, "bogus");
        let err = ConfigFile::parse("p = 0.9\np = 0.8").unwrap_err();
        assert_eq!(err.field, "p");
    }

    #[test]
    fn bad_values_name_the_field() {
        let err = ConfigFile::parse("p = banana").unwrap_err();
        assert_eq!(err.field, "p");
        let config = ConfigFile::parse("lengths = 4\np = 1.5").unwrap();
        let err = SweepSpec::from_config(&config).unwrap_err();
        assert_eq!(err.field, "p");
        let config = ConfigFile::parse("lengths = 4\neta = 0.2").unwrap();
        assert_eq!(SweepSpec::from_config(&config).unwrap_err().field, "eta");
    }

    #[test]
    fn missing_lengths_is_an_error() {
        let config = ConfigFile::parse("p = 0.9").unwrap();
        let err = SweepSpec::from_config(&config).unwrap_err();
        assert_eq!(err.field, "lengths");
    }

    #[test]
    fn partial_time_model_is_rejected() {
        let config = ConfigFile::parse("lengths = 4\ntau1 = 1\ntau2 = 2").unwrap();
        let err = SweepSpec::from_config(&config).unwrap_err();
        assert_eq!(err.field, "taum");
    }

    #[test]
    fn gamma_requires_the_leakage_model() {
        let config = ConfigFile::parse("lengths = 4\ngamma = 0.01\nmodel = dep").unwrap();
        let err = SweepSpec::from_config(&config).unwrap_err();
        assert_eq!(err.field, "gamma");
        let config = ConfigFile::parse("lengths = 4\ngamma = 0.01\nmodel = cpe-leak").unwrap();
        assert!(SweepSpec::from_config(&config).is_ok());
    }

    #[test]
    fn flags_override_file_values() {
        let file = ConfigFile::parse("lengths = 4\np = 0.9").unwrap();
        let flags = ConfigFile {
            p: Some(vec![0.5]),
            ..Default::default()
        };
        let merged = file.overridden_by(&flags);
        assert_eq!(merged.p, Some(vec![0.5]));
        assert_eq!(merged.lengths, Some(vec![4]));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let config = ConfigFile::parse("\n# comment\nlengths = 8 # trailing\n\n").unwrap();
        assert_eq!(config.lengths, Some(vec![8]));
    }
}
