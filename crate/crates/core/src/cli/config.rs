//! Flat `key = value` configuration with `#` comments.
//!
//! Every lookup records the value actually used (including defaults), so
//! the run manifest can hash the resolved configuration rather than the
//! file text.

use std::cell::RefCell;
use std::collections::BTreeMap;

use crate::error::{Error, Result};

const KNOWN_KEYS: &[&str] = &[
    "n_atoms",
    "u0",
    "u1",
    "lambda",
    "Lambda",
    "Lambda_convention",
    "tilde_rescale",
    "detuning",
    "Lambda_grid",
    "zoom_grid",
    "n_list",
    "levels",
    "Lambda_values",
    "grid_points",
    "r_max",
    "restarts",
    "relax",
    "vari_coupling",
    "vari_ansatz",
    "vari_stride",
    "ramp.start",
    "ramp.end",
    "ramp.duration",
    "ramp.shape",
    "ramp.samples",
    "dt",
];

#[derive(Debug, Default)]
pub struct Config {
    raw: BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
}

fn bad(key: &str, value: &str, want: &str) -> Error {
    Error::Config(format!("{key} = {value:?}: expected {want}"))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: missing '='", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key {k:?}", i + 1)));
            }
            if raw.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {k:?}", i + 1)));
            }
        }
        Ok(Config {
            raw,
            resolved: RefCell::default(),
        })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.raw.contains_key(key)
    }

    fn lookup<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Option<T>, show: impl Fn(&T) -> String, want: &str) -> Result<T> {
        let value = match self.raw.get(key) {
            Some(v) => parse(v).ok_or_else(|| bad(key, v, want))?,
            None => default,
        };
        self.resolved.borrow_mut().insert(key.to_string(), show(&value));
        Ok(value)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        self.lookup(key, default, |s| s.parse().ok().filter(|x: &f64| x.is_finite()), |x| format!("{x:e}"), "a finite number")
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        self.lookup(key, default, |s| s.parse().ok(), |x| x.to_string(), "a nonnegative integer")
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool> {
        let parse = |s: &str| match s.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Some(true),
            "false" | "no" | "off" | "0" => Some(false),
            _ => None,
        };
        self.lookup(key, default, parse, |x| x.to_string(), "true or false")
    }

    /// A keyword resolved through `parse`; `show` gives its canonical name.
    pub fn choice<T: Copy>(&self, key: &str, default: T, parse: impl Fn(&str) -> Option<T>, show: impl Fn(T) -> &'static str) -> Result<T> {
        self.lookup(key, default, parse, |x| show(*x).to_string(), "a known keyword")
    }

    /// A grid in the syntax of [`parse_grid`]; the text is recorded as given.
    pub fn list_f64(&self, key: &str, default: &str) -> Result<Vec<f64>> {
        let text = self.raw.get(key).map_or(default, String::as_str);
        let grid = parse_grid(text).ok_or_else(|| bad(key, text, "a list a,b,c or ranges lo:hi:count joined by ';'"))?;
        self.resolved.borrow_mut().insert(key.to_string(), text.to_string());
        Ok(grid)
    }

    pub fn list_usize(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        let parse = |s: &str| -> Option<Vec<usize>> {
            s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(|t| t.parse().ok()).collect()
        };
        self.lookup(key, default.to_vec(), parse, |v| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }, "a comma-separated list of integers")
    }

    /// Canonical `key=value` lines of everything looked up so far.
    pub fn resolved_text(&self) -> String {
        self.resolved.borrow().iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }
}

/// `a,b,c` or `lo:hi:count` (inclusive, evenly spaced), or several of these
/// joined by `;`, whose union is taken. Empty text is the empty grid.
pub fn parse_grid(s: &str) -> Option<Vec<f64>> {
    if s.contains(';') {
        let parts: Option<Vec<Vec<f64>>> = s.split(';').map(parse_grid).collect();
        return parts.map(|p| merge_grids(&p));
    }
    let s = s.trim();
    if s.is_empty() {
        return Some(Vec::new());
    }
    if let Some((lo, rest)) = s.split_once(':') {
        let (hi, count) = rest.split_once(':')?;
        let lo: f64 = lo.trim().parse().ok()?;
        let hi: f64 = hi.trim().parse().ok()?;
        let count: usize = count.trim().parse().ok()?;
        if !lo.is_finite() || !hi.is_finite() {
            return None;
        }
        return Some(linspace(lo, hi, count));
    }
    s.split(',').map(|t| t.trim().parse().ok().filter(|x: &f64| x.is_finite())).collect()
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Union of grids, sorted, with points closer than 1e-12 merged.
pub fn merge_grids(parts: &[Vec<f64>]) -> Vec<f64> {
    let mut all: Vec<f64> = parts.iter().flatten().copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    all
}
