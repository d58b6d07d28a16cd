//! Run configuration: `key = value` text parsing, validation, and the
//! canonical serialization used by run manifests.

use crate::error::{Error, Result};
use crate::limiter::LimiterConfig;
use std::collections::HashSet;
use std::fmt::Write as _;

pub const PROBLEM_NAMES: [&str; 5] = [
    "burgers",
    "mbl1d",
    "mbl2d_ex4",
    "mbl2d_ex5_cyl",
    "mbl2d_ex5_cube",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    Cfl,
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    /// Cells along x; also along y unless `ny` is given.
    pub n: usize,
    pub ny: Option<usize>,
    pub k: usize,
    pub t_end: f64,
    pub tau: Option<f64>,
    pub u_b: Option<f64>,
    pub epsilon: Option<f64>,
    pub limiter: LimiterConfig,
    pub time_mode: TimeMode,
    pub cfl: Option<f64>,
    pub dt: Option<f64>,
    pub dt_max: Option<f64>,
    /// Write the cell-average field CSV.
    pub field: bool,
    /// Also write the full modal-coefficient dump.
    pub modal: bool,
    pub slice_axis: Option<usize>,
    pub slice_coord: Option<f64>,
    pub contour_levels: usize,
    /// Refinement list for convergence studies; empty disables the study.
    pub study: Vec<usize>,
    pub out_dir: String,
    /// Step-count safety cap for time integration.
    pub max_steps: usize,
    /// Reserved; the solver is deterministic and does not consume it.
    pub seed: u64,
}

struct Entry {
    source: String,
    key: String,
    value: String,
    used: bool,
}

fn parse_entries(text: &str, entries: &mut Vec<Entry>) -> Result<()> {
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let source = format!("line {}: '{}'", idx + 1, raw.trim());
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("{source}: expected key = value")))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(Error::config(format!("{source}: empty key or value")));
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(Error::config(format!("{source}: duplicate key '{key}'")));
        }
        entries.push(Entry {
            source,
            key,
            value,
            used: false,
        });
    }
    Ok(())
}

struct Fields {
    entries: Vec<Entry>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<(String, String)> {
        for e in self.entries.iter_mut() {
            if e.key == key {
                e.used = true;
                return Some((e.source.clone(), e.value.clone()));
            }
        }
        None
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((source, value)) => value
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::config(format!("{source}: expected {what}"))),
        }
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Result<T> {
        self.parse(key, what)?
            .ok_or_else(|| Error::config(format!("missing required key '{key}'")))
    }

    fn parse_bool(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some((source, value)) => match value.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(Error::config(format!("{source}: expected true or false"))),
            },
        }
    }

    fn finish(&self) -> Result<()> {
        if let Some(e) = self.entries.iter().find(|e| !e.used) {
            return Err(Error::config(format!(
                "{}: unknown key '{}'",
                e.source, e.key
            )));
        }
        Ok(())
    }
}

/// Parse a config file with optional `key=value` overrides applied on top.
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut entries = Vec::new();
    parse_entries(text, &mut entries)?;
    for (i, ov) in overrides.iter().enumerate() {
        let source = format!("override {}: '{}'", i + 1, ov);
        let (key, value) = ov
            .split_once('=')
            .ok_or_else(|| Error::config(format!("{source}: expected key=value")))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(Error::config(format!("{source}: empty key or value")));
        }
        entries.retain(|e| e.key != key);
        entries.push(Entry {
            source,
            key,
            value,
            used: false,
        });
    }
    build_config(Fields { entries })
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with_overrides(text, &[])
}

fn build_config(mut f: Fields) -> Result<RunConfig> {
    let (problem_src, problem) = f
        .take("problem")
        .ok_or_else(|| Error::config("missing required key 'problem'"))?;
    if !PROBLEM_NAMES.contains(&problem.as_str()) {
        return Err(Error::config(format!(
            "{problem_src}: unknown problem '{problem}', expected one of {PROBLEM_NAMES:?}"
        )));
    }
    let is_2d = problem.starts_with("mbl2d");

    let n: usize = f.require("n", "a positive integer")?;
    let ny: Option<usize> = f.parse("ny", "a positive integer")?;
    if n == 0 || ny == Some(0) {
        return Err(Error::config("mesh sizes must be positive"));
    }
    if ny.is_some() && !is_2d {
        return Err(Error::config("'ny' is only valid for 2D problems"));
    }

    let (k_src, k_val) = match f.take("k") {
        Some(kv) => kv,
        None => return Err(Error::config("missing required key 'k'")),
    };
    let k: usize = k_val
        .parse()
        .map_err(|_| Error::config(format!("{k_src}: expected an integer")))?;
    if !(1..=3).contains(&k) {
        return Err(Error::config(format!(
            "{k_src}: k must be one of {{1, 2, 3}}"
        )));
    }

    let t_end: f64 = f.require("t_end", "a number")?;
    if !(t_end > 0.0) {
        return Err(Error::config("t_end must be > 0"));
    }

    let tau: Option<f64> = f.parse("tau", "a number")?;
    let u_b: Option<f64> = f.parse("u_b", "a number")?;
    let epsilon: Option<f64> = f.parse("epsilon", "a number")?;

    let limiter = match f.take("limiter") {
        None => LimiterConfig::None,
        Some((source, value)) => match value.as_str() {
            "none" => LimiterConfig::None,
            "tvb" => LimiterConfig::MinmodTvb {
                m_tvb: f.parse("m_tvb", "a number")?.unwrap_or(0.0),
            },
            "weno" => LimiterConfig::Weno,
            "moe" => LimiterConfig::Moe {
                alpha: f.require("alpha", "a number")?,
            },
            _ => {
                return Err(Error::config(format!(
                    "{source}: limiter must be one of {{none, tvb, weno, moe}}"
                )))
            }
        },
    };
    limiter.validate()?;

    let time_mode = match f.take("time_mode") {
        None => TimeMode::Cfl,
        Some((source, value)) => match value.as_str() {
            "cfl" => TimeMode::Cfl,
            "fixed" => TimeMode::Fixed,
            _ => {
                return Err(Error::config(format!(
                    "{source}: time_mode must be cfl or fixed"
                )))
            }
        },
    };
    let cfl: Option<f64> = f.parse("cfl", "a number")?;
    let dt: Option<f64> = f.parse("dt", "a number")?;
    let dt_max: Option<f64> = f.parse("dt_max", "a number")?;
    if time_mode == TimeMode::Fixed && !matches!(dt, Some(d) if d > 0.0) {
        return Err(Error::config("time_mode = fixed requires dt > 0"));
    }

    let field = f.parse_bool("field", true)?;
    let modal = f.parse_bool("modal", false)?;

    let slice_axis = match f.take("slice_axis") {
        None => None,
        Some((source, value)) => match value.as_str() {
            "x" => Some(0),
            "y" => Some(1),
            _ => {
                return Err(Error::config(format!(
                    "{source}: slice_axis must be x or y"
                )))
            }
        },
    };
    let slice_coord: Option<f64> = f.parse("slice_coord", "a number")?;
    if slice_axis.is_some() != slice_coord.is_some() {
        return Err(Error::config(
            "slice_axis and slice_coord must be given together",
        ));
    }

    let contour_levels: usize = f.parse("contour_levels", "a positive integer")?.unwrap_or(20);
    if contour_levels == 0 {
        return Err(Error::config("contour_levels must be positive"));
    }

    let study = match f.take("study") {
        None => Vec::new(),
        Some((source, value)) => {
            let mut list = Vec::new();
            for part in value.split(',') {
                let v: usize = part.trim().parse().map_err(|_| {
                    Error::config(format!("{source}: expected comma-separated integers"))
                })?;
                list.push(v);
            }
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::config(format!(
                    "{source}: refinement list must be strictly increasing"
                )));
            }
            list
        }
    };

    let out_dir = f.take("out_dir").map(|(_, v)| v).unwrap_or_else(|| "out".to_string());
    let max_steps: usize = f.parse("max_steps", "a positive integer")?.unwrap_or(10_000_000);
    if max_steps == 0 {
        return Err(Error::config("max_steps must be positive"));
    }
    let seed: u64 = f.parse("seed", "a nonnegative integer")?.unwrap_or(0);

    f.finish()?;
    Ok(RunConfig {
        problem,
        n,
        ny,
        k,
        t_end,
        tau,
        u_b,
        epsilon,
        limiter,
        time_mode,
        cfl,
        dt,
        dt_max,
        field,
        modal,
        slice_axis,
        slice_coord,
        contour_levels,
        study,
        out_dir,
        max_steps,
        seed,
    })
}

impl RunConfig {
    /// Canonical `key = value` form; parsing it reproduces `self` exactly.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("problem", self.problem.clone());
        kv("n", self.n.to_string());
        if let Some(ny) = self.ny {
            kv("ny", ny.to_string());
        }
        kv("k", self.k.to_string());
        kv("t_end", fmt_f64(self.t_end));
        if let Some(v) = self.tau {
            kv("tau", fmt_f64(v));
        }
        if let Some(v) = self.u_b {
            kv("u_b", fmt_f64(v));
        }
        if let Some(v) = self.epsilon {
            kv("epsilon", fmt_f64(v));
        }
        match self.limiter {
            LimiterConfig::None => kv("limiter", "none".to_string()),
            LimiterConfig::MinmodTvb { m_tvb } => {
                kv("limiter", "tvb".to_string());
                kv("m_tvb", fmt_f64(m_tvb));
            }
            LimiterConfig::Weno => kv("limiter", "weno".to_string()),
            LimiterConfig::Moe { alpha } => {
                kv("limiter", "moe".to_string());
                kv("alpha", fmt_f64(alpha));
            }
        }
        kv(
            "time_mode",
            match self.time_mode {
                TimeMode::Cfl => "cfl".to_string(),
                TimeMode::Fixed => "fixed".to_string(),
            },
        );
        if let Some(v) = self.cfl {
            kv("cfl", fmt_f64(v));
        }
        if let Some(v) = self.dt {
            kv("dt", fmt_f64(v));
        }
        if let Some(v) = self.dt_max {
            kv("dt_max", fmt_f64(v));
        }
        kv("field", self.field.to_string());
        kv("modal", self.modal.to_string());
        if let Some(axis) = self.slice_axis {
            kv("slice_axis", if axis == 0 { "x" } else { "y" }.to_string());
        }
        if let Some(v) = self.slice_coord {
            kv("slice_coord", fmt_f64(v));
        }
        kv("contour_levels", self.contour_levels.to_string());
        if !self.study.is_empty() {
            let list: Vec<String> = self.study.iter().map(|n| n.to_string()).collect();
            kv("study", list.join(","));
        }
        kv("out_dir", self.out_dir.clone());
        kv("max_steps", self.max_steps.to_string());
        kv("seed", self.seed.to_string());
        s
    }
}

/// Shortest representation that parses back to the same f64.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Distinct problem names referenced by a study/run set, for sanity checks.
pub fn problem_name_set() -> HashSet<&'static str> {
    PROBLEM_NAMES.iter().copied().collect()
}
