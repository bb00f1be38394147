//! Run configuration: command-line flags, optionally layered over a
//! `key = value` file. Flags win over the file.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use weldlab_core::grunsky::{OrderSchedule, Route};
use weldlab_core::Family;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Pair,
    Grunsky,
    Logdet,
    S1,
    Identity,
    Invert,
    Fuchsian,
    Scl,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

/// Conformal-welding laboratory: Grunsky operators, determinant potentials,
/// Liouville actions and the genus-two octagon group.
#[derive(Debug, Clone, Default, Parser, Serialize)]
#[command(name = "weldlab", version)]
pub struct Cli {
    /// What to compute.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Pair family: identity, ellipse or fourier_bump.
    #[arg(long)]
    pub family: Option<String>,
    /// Ellipse parameter, 0 < c < 1.
    #[arg(long)]
    pub c: Option<f64>,
    /// Fourier bump amplitude.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Fourier bump frequency.
    #[arg(long)]
    pub k: Option<u32>,
    /// Truncation orders, comma separated and strictly increasing.
    #[arg(long = "N")]
    pub orders: Option<String>,
    /// Quadrature grids `n_r x n_theta`, comma separated.
    #[arg(long)]
    pub grid: Option<String>,
    /// Boundary samples for the conformal map (disables refinement).
    #[arg(long = "M")]
    pub samples: Option<usize>,
    /// Tolerance of the command's checks.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file; defaults to `$WELDLAB_OUT_DIR/<command>.<format>` or stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub genus: Option<u32>,
    /// `S₂^dg` for the classical-action report.
    #[arg(long)]
    pub s2: Option<f64>,
    /// Maximal word length for group enumeration.
    #[arg(long = "L")]
    pub word_length: Option<usize>,
    /// Determinant route for `logdet`: b1 or b4.
    #[arg(long)]
    pub route: Option<String>,
    /// Block written by `grunsky --format csv`: b1, b2, b3 or b4.
    #[arg(long)]
    pub block: Option<String>,
    /// Sweep range `start:stop:step` over the family parameter.
    #[arg(long)]
    pub range: Option<String>,
    /// `key = value` file with defaults for any of the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Progress on stderr; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

fn fill<T: FromStr>(slot: &mut Option<T>, key: &str, value: &str) -> Result<(), String> {
    if slot.is_none() {
        *slot = Some(value.parse().map_err(|_| format!("config key {key}: cannot parse {value:?}"))?);
    }
    Ok(())
}

impl Cli {
    /// Fill unset fields from the config file text.
    pub fn merge_file(&mut self, text: &str) -> Result<(), String> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| format!("config line {}: expected key = value", n + 1))?;
            match key {
                "command" => fill(&mut self.command, key, value)?,
                "family" => fill(&mut self.family, key, value)?,
                "c" => fill(&mut self.c, key, value)?,
                "eps" => fill(&mut self.eps, key, value)?,
                "k" => fill(&mut self.k, key, value)?,
                "N" => fill(&mut self.orders, key, value)?,
                "grid" => fill(&mut self.grid, key, value)?,
                "M" => fill(&mut self.samples, key, value)?,
                "tol" => fill(&mut self.tol, key, value)?,
                "out" => fill(&mut self.out, key, value)?,
                "format" => fill(&mut self.format, key, value)?,
                "genus" => fill(&mut self.genus, key, value)?,
                "s2" => fill(&mut self.s2, key, value)?,
                "L" => fill(&mut self.word_length, key, value)?,
                "route" => fill(&mut self.route, key, value)?,
                "block" => fill(&mut self.block, key, value)?,
                "range" => fill(&mut self.range, key, value)?,
                "verbose" => {
                    if self.verbose == 0 {
                        self.verbose = value.parse().map_err(|_| format!("config key verbose: cannot parse {value:?}"))?;
                    }
                }
                _ => return Err(format!("config line {}: unknown key {key:?}", n + 1)),
            }
        }
        Ok(())
    }

    pub fn command(&self) -> Result<Command, String> {
        self.command.ok_or_else(|| "no command given".to_string())
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    /// The family with its parameters; `param` overrides the primary one.
    pub fn family_with(&self, param: Option<f64>) -> Result<Family, String> {
        let tag = self.family.as_deref().unwrap_or("identity");
        match tag {
            "identity" => Ok(Family::Identity),
            "ellipse" => {
                let c = param.or(self.c).ok_or("ellipse needs --c")?;
                if !(c > 0.0 && c < 1.0) {
                    return Err(format!("ellipse needs 0 < c < 1, got {c}"));
                }
                Ok(Family::Ellipse { c })
            }
            "fourier_bump" => {
                let eps = param.or(self.eps).ok_or("fourier_bump needs --eps")?;
                let k = self.k.ok_or("fourier_bump needs --k")?;
                if !(eps.abs() < 1.0) || k == 0 {
                    return Err(format!("fourier_bump needs |eps| < 1 and k >= 1, got eps={eps}, k={k}"));
                }
                Ok(Family::FourierBump { eps, k })
            }
            other => Err(format!("unknown family {other:?}")),
        }
    }

    pub fn family(&self) -> Result<Family, String> {
        self.family_with(None)
    }

    pub fn orders(&self, default: &[usize]) -> Result<Vec<usize>, String> {
        let Some(text) = &self.orders else {
            return Ok(default.to_vec());
        };
        let orders: Vec<usize> = text
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| format!("bad order {s:?}")))
            .collect::<Result<_, _>>()?;
        if orders.is_empty() || orders[0] == 0 || orders.windows(2).any(|w| w[1] <= w[0]) {
            return Err(format!("orders must be positive and strictly increasing, got {text}"));
        }
        Ok(orders)
    }

    pub fn grids(&self, default: &[(usize, usize)]) -> Result<Vec<(usize, usize)>, String> {
        let Some(text) = &self.grid else {
            return Ok(default.to_vec());
        };
        text.split(',')
            .map(|g| {
                let (a, b) = g.trim().split_once('x').ok_or_else(|| format!("grid {g:?} is not n_r x n_theta"))?;
                let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad grid size {s:?}"));
                Ok((parse(a)?, parse(b)?))
            })
            .collect()
    }

    pub fn tol(&self, default: f64) -> Result<f64, String> {
        let t = self.tol.unwrap_or(default);
        if t > 0.0 && t.is_finite() {
            Ok(t)
        } else {
            Err(format!("tolerance must be positive, got {t}"))
        }
    }

    pub fn route(&self) -> Result<Route, String> {
        match self.route.as_deref().unwrap_or("b1") {
            "b1" | "B1" => Ok(Route::B1),
            "b4" | "B4" => Ok(Route::B4),
            other => Err(format!("unknown route {other:?}")),
        }
    }

    /// Adaptive schedule from `--N`: one order is used as is, several give
    /// the first and last order of a doubling schedule.
    pub fn schedule(&self) -> Result<OrderSchedule, String> {
        if self.orders.is_none() {
            return Ok(OrderSchedule::default());
        }
        let o = self.orders(&[])?;
        if o.len() == 1 {
            Ok(OrderSchedule::fixed(o[0]))
        } else {
            Ok(OrderSchedule { start: o[0], max: *o.last().unwrap(), ..OrderSchedule::default() })
        }
    }

    pub fn range(&self) -> Result<Option<Vec<f64>>, String> {
        let Some(text) = &self.range else {
            return Ok(None);
        };
        let parts: Vec<f64> = text
            .split(':')
            .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad range bound {s:?}")))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(format!("range must be start:stop:step, got {text}"));
        };
        if !(step > 0.0) || stop < start {
            return Err(format!("empty or unbounded range {text}"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok(Some((0..count).map(|i| start + i as f64 * step).collect()))
    }

    /// The resolved settings echoed into every report.
    pub fn echo(&self) -> BTreeMap<String, serde_json::Value> {
        let v = serde_json::to_value(self).expect("config serializes");
        v.as_object()
            .map(|o| o.iter().filter(|(_, v)| !v.is_null()).map(|(k, v)| (k.clone(), v.clone())).collect())
            .unwrap_or_default()
    }
}
