//! Run configuration in a plain `key=value` format.
//!
//! One setting per line; blank lines and lines starting with `#` are
//! ignored. Every field is optional so that a file can be overlaid by
//! command-line flags. Numbers are written in Rust's shortest round-trip
//! form, which makes `parse(to_string(c)) == c` exact.

use crate::distmodel::DistributionModel;
use crate::error::{Error, Result};
use crate::scan::{linspace, ScanSettings};
use serde::Serialize;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Mc,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "mc" => Ok(Method::Mc),
            other => Err(Error::Config(format!("unknown method '{other}' (exact|mc)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Mc => "mc",
        })
    }
}

/// `a:b:n`, `n` evenly spaced points from `a` to `b` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.a, self.b, self.n)
    }
}

impl FromStr for GridSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("grid '{s}' is not of the form a:b:n")));
        }
        let a = parse_f64("grid start", parts[0])?;
        let b = parse_f64("grid end", parts[1])?;
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("grid size '{}' is not a count", parts[2])))?;
        if n == 0 || a > b {
            return Err(Error::Config(format!("grid '{s}' is empty")));
        }
        Ok(GridSpec { a, b, n })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.a, self.b, self.n)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub dist: Option<String>,
    pub lambda: Option<f64>,
    pub w: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub grid: Option<GridSpec>,
    pub method: Option<Method>,
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub scan_n: Option<usize>,
    pub dense_extra: Option<usize>,
    pub tol_tail: Option<f64>,
    pub root_tol: Option<f64>,
    pub out: Option<PathBuf>,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: '{v}' is not finite")));
    }
    Ok(x)
}

fn parse_int<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: '{v}' is not a non-negative integer")))
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: &RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if other.$f.is_some() {
                    self.$f = other.$f.clone();
                }
            )*};
        }
        take!(dist, lambda, w, alpha, grid, method, seed, n, scan_n, dense_extra, tol_tail, root_tol, out);
        self
    }

    pub fn distribution(&self) -> Result<Option<DistributionModel>> {
        self.dist.as_deref().map(DistributionModel::parse).transpose()
    }

    /// Scan settings with defaults for unset fields.
    pub fn scan_settings(&self) -> ScanSettings {
        let d = ScanSettings::default();
        ScanSettings {
            n: self.scan_n.unwrap_or(d.n),
            dense_extra: self.dense_extra.unwrap_or(d.dense_extra),
            tol_tail: self.tol_tail.unwrap_or(d.tol_tail),
            root_tol: self.root_tol.unwrap_or(d.root_tol),
        }
    }
}

impl FromStr for RunConfig {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "dist" => {
                    DistributionModel::parse(value)?;
                    c.dist = Some(value.to_string());
                }
                "lambda" => c.lambda = Some(parse_f64(key, value)?),
                "w" => {
                    let ws: Result<Vec<f64>> = value.split(',').map(|v| parse_f64(key, v)).collect();
                    c.w = Some(ws?);
                }
                "alpha" => c.alpha = Some(parse_f64(key, value)?),
                "grid" => c.grid = Some(value.parse()?),
                "method" => c.method = Some(value.parse()?),
                "seed" => c.seed = Some(parse_int(key, value)?),
                "n" => c.n = Some(parse_int(key, value)?),
                "scan_n" => c.scan_n = Some(parse_int(key, value)?),
                "dense_extra" => c.dense_extra = Some(parse_int(key, value)?),
                "tol_tail" => c.tol_tail = Some(parse_f64(key, value)?),
                "root_tol" => c.root_tol = Some(parse_f64(key, value)?),
                "out" => c.out = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(c)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = &self.dist {
            writeln!(f, "dist={v}")?;
        }
        if let Some(v) = self.lambda {
            writeln!(f, "lambda={v}")?;
        }
        if let Some(ws) = &self.w {
            let s: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
            writeln!(f, "w={}", s.join(","))?;
        }
        if let Some(v) = self.alpha {
            writeln!(f, "alpha={v}")?;
        }
        if let Some(v) = self.grid {
            writeln!(f, "grid={v}")?;
        }
        if let Some(v) = self.method {
            writeln!(f, "method={v}")?;
        }
        if let Some(v) = self.seed {
            writeln!(f, "seed={v}")?;
        }
        if let Some(v) = self.n {
            writeln!(f, "n={v}")?;
        }
        if let Some(v) = self.scan_n {
            writeln!(f, "scan_n={v}")?;
        }
        if let Some(v) = self.dense_extra {
            writeln!(f, "dense_extra={v}")?;
        }
        if let Some(v) = self.tol_tail {
            writeln!(f, "tol_tail={v}")?;
        }
        if let Some(v) = self.root_tol {
            writeln!(f, "root_tol={v}")?;
        }
        if let Some(v) = &self.out {
            writeln!(f, "out={}", v.display())?;
        }
        Ok(())
    }
}
