//! Configuration: the spacing mini-language, the flat `key = value` config
//! file, and the file-under-flags resolution used by every subcommand.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use deltalab_core::barriers::SparsenessSpec;

use crate::CliError;

/// Spacing mini-language:
///
/// * `power:beta=2`               — `x_n = n^beta`
/// * `exp`                        — `x_n = e^n`
/// * `paper:b=1,beta=2,c=1,a=1,gamma=1` (alias `polyexp:`)
///                                — `x_n = b n^beta + c e^(a n^gamma)`
/// * `random:span=100,seed=7`     — uniform on `[-span, span]`, seeded
///
/// Omitted keys take the defaults shown above; `random` requires an
/// explicit seed.
pub fn parse_spacing(s: &str) -> Result<SparsenessSpec, CliError> {
    let (family, args) = match s.split_once(':') {
        Some((f, a)) => (f.trim(), a.trim()),
        None => (s.trim(), ""),
    };
    let mut kv = BTreeMap::new();
    if !args.is_empty() {
        for pair in args.split(',') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("spacing parameter '{pair}' is not key=value")))?;
            kv.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    let mut num = |key: &str, default: f64| -> Result<f64, CliError> {
        match kv.remove(key) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("spacing parameter {key}={v} is not a number"))),
            None => Ok(default),
        }
    };
    let spec = match family {
        "power" => SparsenessSpec::Power { beta: num("beta", 2.0)? },
        "exp" => SparsenessSpec::Exponential,
        "paper" | "polyexp" => SparsenessSpec::PolyExp {
            b: num("b", 1.0)?,
            beta: num("beta", 2.0)?,
            c: num("c", 1.0)?,
            a: num("a", 1.0)?,
            gamma: num("gamma", 1.0)?,
        },
        "random" => {
            let span = num("span", f64::NAN)?;
            if !span.is_finite() {
                return Err(CliError::usage("random spacing requires span=<value>".to_string()));
            }
            let seed = kv
                .remove("seed")
                .ok_or_else(|| CliError::usage("random spacing requires an explicit seed=<value>".to_string()))?;
            let seed = seed
                .parse::<u64>()
                .map_err(|_| CliError::usage(format!("random seed '{seed}' is not an unsigned integer")))?;
            SparsenessSpec::Random { span, seed }
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown spacing family '{other}' (expected power, exp, paper, polyexp, or random)"
            )))
        }
    };
    if let Some(stray) = kv.keys().next() {
        return Err(CliError::usage(format!("spacing parameter '{stray}' does not apply to '{family}'")));
    }
    spec.validate().map_err(CliError::from)?;
    Ok(spec)
}

/// Known config sections (one per subcommand).
const SECTIONS: &[&str] = &[
    "positions",
    "sweep",
    "zoom",
    "pruefer",
    "histogram",
    "diagnose",
    "packet",
    "compare-random",
];

/// Flat `key = value` config file with one `[section]` per subcommand.
/// `#` starts a comment; unknown section names are errors.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(CliError::usage(format!(
                        "config line {}: unknown section [{name}]",
                        lineno + 1
                    )));
                }
                sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "config line {}: expected key = value, got '{line}'",
                    lineno + 1
                )));
            };
            let Some(section) = &current else {
                return Err(CliError::usage(format!(
                    "config line {}: key outside any [section]",
                    lineno + 1
                )));
            };
            sections
                .get_mut(section)
                .unwrap()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { sections })
    }

    /// The resolver for one subcommand: CLI flags take precedence over the
    /// file section, the file over built-in defaults. `known_keys` is the
    /// full flag vocabulary of the subcommand; stray file keys are errors.
    pub fn overlay<'a>(
        &'a self,
        section: &str,
        known_keys: &[&str],
    ) -> Result<Overlay<'a>, CliError> {
        let kv = self.sections.get(section);
        if let Some(kv) = kv {
            for key in kv.keys() {
                if !known_keys.contains(&key.as_str()) {
                    return Err(CliError::usage(format!(
                        "config section [{section}] has unknown key '{key}'"
                    )));
                }
            }
        }
        Ok(Overlay { kv })
    }
}

pub struct Overlay<'a> {
    kv: Option<&'a BTreeMap<String, String>>,
}

impl Overlay<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.kv.and_then(|m| m.get(key)).map(String::as_str)
    }

    /// CLI value, else file value, else default.
    pub fn get<T: FromStr>(&self, key: &str, cli: Option<T>, default: T) -> Result<T, CliError> {
        self.get_opt(key, cli).map(|v| v.unwrap_or(default))
    }

    /// CLI value, else file value, else `None`.
    pub fn get_opt<T: FromStr>(&self, key: &str, cli: Option<T>) -> Result<Option<T>, CliError> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.raw(key) {
            Some(text) => text
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::usage(format!("config value {key} = {text} failed to parse"))),
            None => Ok(None),
        }
    }

    pub fn get_flag(&self, key: &str, cli: bool) -> Result<bool, CliError> {
        if cli {
            return Ok(true);
        }
        match self.raw(key) {
            Some(text) => text
                .parse::<bool>()
                .map_err(|_| CliError::usage(format!("config value {key} = {text} is not true/false"))),
            None => Ok(false),
        }
    }

    pub fn spacing(&self, cli: Option<&str>, default: &str) -> Result<SparsenessSpec, CliError> {
        parse_spacing(cli.or_else(|| self.raw("spacing")).unwrap_or(default))
    }
}

/// Splits a comma-separated list of positive factors, e.g. `10,10`.
pub fn parse_factor_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("zoom factor '{p}' is not a number")))
        })
        .collect()
}
