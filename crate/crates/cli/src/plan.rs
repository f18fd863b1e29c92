//! Value lists, ranges and the flat `key = value` sweep configuration.

use std::collections::BTreeSet;
use std::fmt;

use cocycle_lab::{golden_mean, Tolerances};

pub const MAX_CELLS: usize = 10_000_000;
pub const MIN_ORBIT: usize = 1_000;
pub const WARN_ORBIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parses `v1,v2,...` or `min:max:count` (endpoints included).
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty value list".into());
    }
    let number = |s: &str| -> Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {:?}", s.trim()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("not finite: {v}"))
        }
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("range {text:?} is not min:max:count"));
        };
        let (lo, hi) = (number(lo)?, number(hi)?);
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("bad count in range {text:?}"))?;
        if count == 0 {
            return Err(format!("range {text:?} has count 0"));
        }
        if count > MAX_CELLS {
            return Err(format!("range {text:?} exceeds {MAX_CELLS} points"));
        }
        if count == 1 {
            return Ok(vec![lo]);
        }
        let step = (hi - lo) / (count - 1) as f64;
        return Ok((0..count)
            .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
            .collect());
    }
    text.split(',').map(number).collect()
}

/// `a2` either given directly or as a multiple of each `a1`.
#[derive(Debug, Clone, PartialEq)]
pub enum A2Values {
    Absolute(Vec<f64>),
    OverA1(Vec<f64>),
}

/// Energies given directly, or `count` points spanning
/// `±(2|a1| + 2|a2| + pad)` for each coupling pair.
#[derive(Debug, Clone, PartialEq)]
pub enum EnergyValues {
    Explicit(Vec<f64>),
    Span { count: usize, pad: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub a1: f64,
    pub a2: f64,
    pub energy: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub a1: Vec<f64>,
    pub a2: A2Values,
    pub energy: EnergyValues,
    pub eps: Vec<f64>,
    pub alpha: f64,
    pub n: usize,
    pub phases: usize,
    pub phase_offset: f64,
    pub seed: u64,
    /// Run a full ε-profile per cell to get regime and membership.
    pub profile: bool,
    pub tolerances: Tolerances,
}

const KEYS: [&str; 13] = [
    "a1",
    "a2",
    "a2_over_a1",
    "E",
    "E_count",
    "E_pad",
    "eps",
    "alpha",
    "n",
    "phases",
    "phase_offset",
    "seed",
    "profile",
];

impl SweepPlan {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(line, format!("line {} has no `=`", lineno + 1)));
            };
            let key = key.trim().to_string();
            if !seen.insert(key.clone()) {
                return Err(ConfigError::new(&key, "given twice"));
            }
            let known = KEYS.contains(&key.as_str())
                || key
                    .strip_prefix("tolerance.")
                    .is_some_and(|k| Tolerances::KEYS.contains(&k));
            if !known {
                return Err(ConfigError::new(&key, "unknown key"));
            }
            entries.push((key, value.trim().to_string()));
        }
        let get = |k: &str| entries.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        let values = |k: &str| -> Result<Option<Vec<f64>>, ConfigError> {
            get(k)
                .map(|v| parse_values(v).map_err(|m| ConfigError::new(k, m)))
                .transpose()
        };
        fn scalar<V: std::str::FromStr>(k: &str, v: Option<&str>, default: V) -> Result<V, ConfigError> {
            match v {
                None => Ok(default),
                Some(s) => s.parse().map_err(|_| ConfigError::new(k, format!("cannot parse {s:?}"))),
            }
        }

        let a1 = values("a1")?.ok_or_else(|| ConfigError::new("a1", "missing"))?;
        let a2 = match (values("a2")?, values("a2_over_a1")?) {
            (Some(_), Some(_)) => return Err(ConfigError::new("a2_over_a1", "conflicts with a2")),
            (Some(v), None) => A2Values::Absolute(v),
            (None, Some(r)) => A2Values::OverA1(r),
            (None, None) => return Err(ConfigError::new("a2", "missing (or give a2_over_a1)")),
        };
        let energy = match (values("E")?, get("E_count")) {
            (Some(_), Some(_)) => return Err(ConfigError::new("E_count", "conflicts with E")),
            (Some(v), None) => {
                if get("E_pad").is_some() {
                    return Err(ConfigError::new("E_pad", "only meaningful with E_count"));
                }
                EnergyValues::Explicit(v)
            }
            (None, Some(c)) => {
                let count: usize = scalar("E_count", Some(c), 0)?;
                if count == 0 {
                    return Err(ConfigError::new("E_count", "must be positive"));
                }
                let pad: f64 = scalar("E_pad", get("E_pad"), 2.5)?;
                if !(pad.is_finite() && pad >= 0.0) {
                    return Err(ConfigError::new("E_pad", "must be finite and nonnegative"));
                }
                EnergyValues::Span { count, pad }
            }
            (None, None) => return Err(ConfigError::new("E", "missing (or give E_count)")),
        };
        let eps = values("eps")?.unwrap_or_else(|| vec![0.0]);
        if eps.iter().any(|e| *e < 0.0) {
            return Err(ConfigError::new("eps", "must be nonnegative"));
        }
        let alpha: f64 = scalar("alpha", get("alpha"), golden_mean())?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ConfigError::new("alpha", "must lie in (0, 1)"));
        }
        let n: usize = scalar("n", get("n"), 100_000)?;
        if n < MIN_ORBIT {
            return Err(ConfigError::new("n", format!("{n} is below {MIN_ORBIT}")));
        }
        let phases: usize = scalar("phases", get("phases"), 256)?;
        if phases == 0 {
            return Err(ConfigError::new("phases", "must be positive"));
        }
        let phase_offset: f64 = scalar("phase_offset", get("phase_offset"), 0.0)?;
        let seed: u64 = scalar("seed", get("seed"), 0)?;
        let profile: bool = scalar("profile", get("profile"), false)?;
        let mut tolerances = Tolerances::default();
        for (key, value) in &entries {
            if let Some(k) = key.strip_prefix("tolerance.") {
                tolerances
                    .set(k, value)
                    .map_err(|e| ConfigError::new(key, e.to_string()))?;
            }
        }
        let plan = Self {
            a1,
            a2,
            energy,
            eps,
            alpha,
            n,
            phases,
            phase_offset,
            seed,
            profile,
            tolerances,
        };
        if plan.cell_count() > MAX_CELLS {
            return Err(ConfigError::new("E", format!("plan exceeds {MAX_CELLS} cells")));
        }
        Ok(plan)
    }

    pub fn cell_count(&self) -> usize {
        let a2 = match &self.a2 {
            A2Values::Absolute(v) | A2Values::OverA1(v) => v.len(),
        };
        let e = match &self.energy {
            EnergyValues::Explicit(v) => v.len(),
            EnergyValues::Span { count, .. } => *count,
        };
        self.a1
            .len()
            .saturating_mul(a2)
            .saturating_mul(e)
            .saturating_mul(self.eps.len())
    }

    /// Cells in `a1`, `a2`, `E`, `eps` order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.cell_count());
        for &a1 in &self.a1 {
            let a2s: Vec<f64> = match &self.a2 {
                A2Values::Absolute(v) => v.clone(),
                A2Values::OverA1(r) => r.iter().map(|r| r * a1).collect(),
            };
            for a2 in a2s {
                let energies = match &self.energy {
                    EnergyValues::Explicit(v) => v.clone(),
                    EnergyValues::Span { count, pad } => {
                        let half = 2.0 * a1.abs() + 2.0 * a2.abs() + pad;
                        parse_values(&format!("{}:{}:{}", -half, half, count)).expect("valid span")
                    }
                };
                for energy in energies {
                    for &eps in &self.eps {
                        out.push(Cell { a1, a2, energy, eps });
                    }
                }
            }
        }
        out
    }
}
