//! `key=value` run configuration: file contents overlaid with command-line
//! flags, then resolved into typed values.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use kicktop::measures::MEASURE_NAMES;
use kicktop::{Angles, DiscordSettings, Precession, SpinQuantum};

use crate::CliError;

/// Raw settings in insertion-independent (sorted) order.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str, allowed: &[&str]) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", n + 1)))?;
            raw.set(key.trim(), value.trim(), allowed)?;
        }
        Ok(raw)
    }

    pub fn load(path: &Path, allowed: &[&str]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, allowed)
    }

    pub fn set(&mut self, key: &str, value: &str, allowed: &[&str]) -> Result<(), CliError> {
        if !allowed.contains(&key) {
            return Err(CliError::usage(format!(
                "unknown config key '{key}' (allowed: {})",
                allowed.join(", ")
            )));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Flag values win over file values.
    pub fn overlay(&mut self, flags: &[(&str, Option<String>)], allowed: &[&str]) -> Result<(), CliError> {
        for (key, value) in flags {
            if let Some(v) = value {
                self.set(key, v, allowed)?;
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::usage(format!("{key}: cannot parse '{v}'"))),
        }
    }
}

/// An angle given either as a float or symbolically as `[n][*]pi[/m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSpec {
    pub text: String,
    pub value: f64,
    /// `(n, m)` for `n pi / m`, when given symbolically with integer `n`.
    pub rational: Option<(i64, u64)>,
}

pub fn parse_angle(text: &str) -> Result<AngleSpec, CliError> {
    let t = text.trim().to_ascii_lowercase();
    let bad = || CliError::usage(format!("cannot parse angle '{text}'"));
    let (value, rational) = match t.split_once("pi") {
        None => (t.parse::<f64>().map_err(|_| bad())?, None),
        Some((coeff, rest)) => {
            let coeff = coeff.trim().trim_end_matches('*').trim();
            let den: u64 = match rest.trim() {
                "" => 1,
                r => r
                    .strip_prefix('/')
                    .and_then(|d| d.trim().parse().ok())
                    .filter(|&d| d > 0)
                    .ok_or_else(bad)?,
            };
            match coeff {
                "" | "+" => (PI / den as f64, Some((1, den))),
                "-" => (-PI / den as f64, Some((-1, den))),
                c => match c.parse::<i64>() {
                    Ok(n) => (n as f64 * PI / den as f64, Some((n, den))),
                    Err(_) => (c.parse::<f64>().map_err(|_| bad())? * PI / den as f64, None),
                },
            }
        }
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(AngleSpec {
        text: text.trim().to_string(),
        value,
        rational,
    })
}

/// `0` and symbolic multiples of `pi/2` in `[0, 2pi]` become exact precessions.
pub fn parse_precession(text: &str) -> Result<Precession, CliError> {
    let a = parse_angle(text)?;
    if a.value == 0.0 {
        return Ok(Precession::ZERO);
    }
    if let Some((n, m)) = a.rational {
        if (2 * n) % m as i64 == 0 {
            let q = 2 * n / m as i64;
            if (0..=4).contains(&q) {
                return Ok(Precession::quarter(q as u8).expect("in range"));
            }
        }
    }
    Ok(Precession::Free(a.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscordGrid {
    Coarse,
    Fine,
}

impl DiscordGrid {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "coarse" => Ok(DiscordGrid::Coarse),
            "fine" => Ok(DiscordGrid::Fine),
            _ => Err(CliError::usage(format!("discord_grid must be coarse or fine, got '{text}'"))),
        }
    }

    pub fn settings(self) -> DiscordSettings {
        match self {
            DiscordGrid::Coarse => DiscordSettings::coarse(),
            DiscordGrid::Fine => DiscordSettings::fine(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DiscordGrid::Coarse => "coarse",
            DiscordGrid::Fine => "fine",
        }
    }
}

/// Kick strengths of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum KGrid {
    /// `k = r pi / s` for `r = 0..=r_max`.
    Rational { r_max: u64, s: u64 },
    List(Vec<AngleSpec>),
}

impl KGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            KGrid::Rational { r_max, s } => (0..=*r_max).map(|r| r as f64 * PI / *s as f64).collect(),
            KGrid::List(list) => list.iter().map(|a| a.value).collect(),
        }
    }
}

/// Everything a run needs, plus the canonical echo of it.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub echo: Vec<(String, String)>,
    pub raw: RawConfig,
}

impl Resolved {
    pub fn new(raw: RawConfig) -> Self {
        Resolved { echo: Vec::new(), raw }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.echo.push((key.to_string(), value.to_string()));
    }

    pub fn spin(&mut self, min_two_j: u32) -> Result<SpinQuantum, CliError> {
        let two_j: u32 = self.raw.parsed("two_j", 2)?;
        if two_j < min_two_j {
            return Err(CliError::usage(format!("two_j must be at least {min_two_j}")));
        }
        let spin = SpinQuantum::from_two_j(two_j).map_err(CliError::from_core)?;
        self.note("two_j", two_j);
        Ok(spin)
    }

    pub fn precession(&mut self) -> Result<Precession, CliError> {
        let text = self.raw.get("p").unwrap_or("pi/2").to_string();
        let p = parse_precession(&text)?;
        self.note("p", text);
        Ok(p)
    }

    pub fn k(&mut self) -> Result<AngleSpec, CliError> {
        let text = self
            .raw
            .get("k")
            .ok_or_else(|| CliError::usage("k is required"))?
            .to_string();
        let k = parse_angle(&text)?;
        self.note("k", text);
        Ok(k)
    }

    pub fn k_grid(&mut self) -> Result<KGrid, CliError> {
        if let Some(list) = self.raw.get("k_list").map(str::to_string) {
            if self.raw.get("r_max").is_some() || self.raw.get("s").is_some() {
                return Err(CliError::usage("give either k_list or r_max/s, not both"));
            }
            let points = list
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(parse_angle)
                .collect::<Result<Vec<_>, _>>()?;
            if points.is_empty() {
                return Err(CliError::usage("empty k grid"));
            }
            self.note("k_list", list);
            return Ok(KGrid::List(points));
        }
        let r_max: u64 = match self.raw.get("r_max") {
            Some(_) => self.raw.parsed("r_max", 0)?,
            None => return Err(CliError::usage("empty k grid: give r_max and s, or k_list")),
        };
        let s: u64 = self.raw.parsed("s", 40)?;
        if s == 0 {
            return Err(CliError::usage("s must be positive"));
        }
        self.note("r_max", r_max);
        self.note("s", s);
        Ok(KGrid::Rational { r_max, s })
    }

    pub fn t_max(&mut self, default: usize) -> Result<usize, CliError> {
        let t: usize = self.raw.parsed("t_max", default)?;
        self.note("t_max", t);
        Ok(t)
    }

    pub fn initial(&mut self) -> Result<Angles, CliError> {
        let theta = self.raw.get("theta0").unwrap_or("2.5").to_string();
        let phi = self.raw.get("phi0").unwrap_or("1.1").to_string();
        let a = Angles::new(parse_angle(&theta)?.value, parse_angle(&phi)?.value).map_err(CliError::from_core)?;
        self.note("theta0", theta);
        self.note("phi0", phi);
        Ok(a)
    }

    pub fn measures(&mut self) -> Result<Vec<&'static str>, CliError> {
        let text = self.raw.get("measures").unwrap_or("all").to_string();
        let selected = if text == "all" {
            MEASURE_NAMES.to_vec()
        } else {
            let wanted: Vec<&str> = text.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
            if let Some(bad) = wanted.iter().find(|w| !MEASURE_NAMES.contains(w)) {
                return Err(CliError::usage(format!(
                    "unknown measure '{bad}' (known: {})",
                    MEASURE_NAMES.join(", ")
                )));
            }
            MEASURE_NAMES.iter().copied().filter(|m| wanted.contains(m)).collect()
        };
        if selected.is_empty() {
            return Err(CliError::usage("no measures selected"));
        }
        self.note("measures", text);
        Ok(selected)
    }

    pub fn discord_grid(&mut self, default: DiscordGrid) -> Result<DiscordGrid, CliError> {
        let grid = match self.raw.get("discord_grid") {
            Some(t) => DiscordGrid::parse(t)?,
            None => default,
        };
        self.note("discord_grid", grid.name());
        Ok(grid)
    }

    pub fn seed(&mut self) -> Result<u64, CliError> {
        let seed: u64 = self.raw.parsed("seed", 0)?;
        self.note("seed", seed);
        Ok(seed)
    }

    pub fn count(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        let n: usize = self.raw.parsed(key, default)?;
        if n == 0 {
            return Err(CliError::usage(format!("{key} must be positive")));
        }
        self.note(key, n);
        Ok(n)
    }

    pub fn flag(&mut self, key: &str) -> Result<bool, CliError> {
        let b: bool = self.raw.parsed(key, false)?;
        self.note(key, b);
        Ok(b)
    }

    /// Not echoed: the same run written to two places gives identical bytes.
    pub fn out(&self) -> Option<PathBuf> {
        self.raw.get("out").map(PathBuf::from)
    }
}
