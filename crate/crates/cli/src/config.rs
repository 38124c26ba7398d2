//! Line-oriented run configuration: `section.key = value`, one per line,
//! `#` starts a comment, lists are comma-separated. Unknown keys and
//! duplicate keys are hard errors carrying the offending line number, so
//! a typo can never silently fall back to a default.
//!
//! Sections: `grid` (x_left, x_right, m), `params` (n, a, b0, b, sigma,
//! eps, backend), `initial` (profile per species plus its parameters, or
//! `csv` with a path), `run` (T, dt_max, output_every, reactions), and
//! the experiment scalars `decay.mu`, `stability.delta`,
//! `sweep.eps_list`. Per-species parameter lists broadcast from length 1.

use anyhow::{anyhow, bail, Context, Result};
use btsim_core::dynamics::{build_profile, Profile, SimulationSpec};
use btsim_core::params::{Backend, ModelParams, ValidatedParams};
use btsim_core::Grid1D;
use std::collections::BTreeMap;
use std::path::Path;

const KNOWN_KEYS: &[&str] = &[
    "grid.x_left",
    "grid.x_right",
    "grid.m",
    "params.n",
    "params.a",
    "params.b0",
    "params.b",
    "params.sigma",
    "params.eps",
    "params.backend",
    "initial.profile",
    "initial.base",
    "initial.amplitude",
    "initial.center",
    "initial.width",
    "initial.left",
    "initial.right",
    "initial.jump_at",
    "initial.path",
    "run.T",
    "run.dt_max",
    "run.output_every",
    "run.reactions",
    "decay.mu",
    "stability.delta",
    "sweep.eps_list",
];

/// Key/value pairs as read from disk, before any interpretation.
#[derive(Debug)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {line_no}: expected `section.key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                bail!("line {line_no}: unknown key `{key}`");
            }
            if let Some((_, first)) = entries.get(key) {
                bail!("line {line_no}: duplicate key `{key}` (first set on line {first})");
            }
            entries.insert(key.to_string(), (value.to_string(), line_no));
        }
        Ok(RawConfig { entries })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| anyhow!("missing required key `{key}`"))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(key, self.require(key)?)
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let v = self.require(key)?;
        v.parse::<usize>()
            .map_err(|_| anyhow!("key `{key}`: `{v}` is not a nonnegative integer"))
    }

    fn list_f64(&self, key: &str) -> Result<Vec<f64>> {
        parse_list(key, self.require(key)?)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| anyhow!("key `{key}`: `{v}` is not a number"))?;
    if !x.is_finite() {
        bail!("key `{key}`: `{v}` is not finite");
    }
    Ok(x)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|item| parse_f64(key, item.trim()))
        .collect()
}

/// Per-species parameter: a list of length `n`, or length 1 broadcast.
fn spread(key: &str, values: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if values.len() == n {
        Ok(values)
    } else if values.len() == 1 {
        Ok(vec![values[0]; n])
    } else {
        bail!(
            "key `{key}`: expected 1 or {n} comma-separated values, got {}",
            values.len()
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub t_final: f64,
    pub dt_max: f64,
    pub output_every: f64,
    pub reactions: bool,
}

/// Fully interpreted configuration: validated parameters, built initial
/// densities, and the experiment scalars that individual subcommands
/// require.
#[derive(Debug)]
pub struct RunConfig {
    pub grid: Grid1D,
    pub params: ValidatedParams,
    pub initial: Vec<Vec<f64>>,
    pub run: RunSettings,
    pub mu: Option<f64>,
    pub delta: Option<f64>,
    pub eps_list: Option<Vec<f64>>,
    /// Sorted `key = value` pairs for the manifest echo.
    pub echo: Vec<(String, String)>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let raw = RawConfig::parse(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Self::from_raw(&raw, path.parent().unwrap_or(Path::new(".")))
            .with_context(|| format!("interpreting config {}", path.display()))
    }

    /// `base_dir` anchors relative CSV paths to the config file location.
    pub fn from_raw(raw: &RawConfig, base_dir: &Path) -> Result<Self> {
        let grid = Grid1D::new(
            raw.f64("grid.x_left")?,
            raw.f64("grid.x_right")?,
            raw.usize("grid.m")?,
        )?;

        let n = raw.usize("params.n")?;
        let a = raw.list_f64("params.a")?;
        let b0 = raw.list_f64("params.b0")?;
        let b = raw.list_f64("params.b")?;
        if a.len() != n * n {
            bail!("key `params.a`: expected {} entries (row-major), got {}", n * n, a.len());
        }
        if b.len() != n * n {
            bail!("key `params.b`: expected {} entries (row-major), got {}", n * n, b.len());
        }
        if b0.len() != n {
            bail!("key `params.b0`: expected {n} entries, got {}", b0.len());
        }
        let backend = match raw.require("params.backend")? {
            "nonlocal" => Backend::Nonlocal,
            "local" => Backend::Local,
            other => bail!("key `params.backend`: expected `nonlocal` or `local`, got `{other}`"),
        };
        let params = ModelParams {
            n,
            a,
            b0,
            b,
            sigma: raw.f64("params.sigma")?,
            eps: raw.f64("params.eps")?,
            backend,
        }
        .validate()?;

        let initial = build_initial(raw, &grid, n, base_dir)?;

        let run = RunSettings {
            t_final: raw.f64("run.T")?,
            dt_max: raw.f64("run.dt_max")?,
            output_every: raw.f64("run.output_every")?,
            reactions: match raw.get("run.reactions").unwrap_or("on") {
                "on" | "true" => true,
                "off" | "false" => false,
                other => bail!("key `run.reactions`: expected on/off, got `{other}`"),
            },
        };

        let eps_list = raw
            .get("sweep.eps_list")
            .map(|v| parse_list("sweep.eps_list", v))
            .transpose()?;

        let echo = raw
            .entries
            .iter()
            .map(|(k, (v, _))| (k.clone(), v.clone()))
            .collect();

        Ok(RunConfig {
            grid,
            params,
            initial,
            run,
            mu: raw.opt_f64("decay.mu")?,
            delta: raw.opt_f64("stability.delta")?,
            eps_list,
            echo,
        })
    }

    pub fn spec(&self) -> SimulationSpec {
        SimulationSpec {
            grid: self.grid.clone(),
            params: self.params.clone(),
            initial: self.initial.clone(),
            t_final: self.run.t_final,
            dt_max: self.run.dt_max,
            output_every: self.run.output_every,
            reactions_enabled: self.run.reactions,
        }
    }
}

fn build_initial(
    raw: &RawConfig,
    grid: &Grid1D,
    n: usize,
    base_dir: &Path,
) -> Result<Vec<Vec<f64>>> {
    let profile_spec = raw.require("initial.profile")?;

    if profile_spec == "csv" {
        let rel = raw.require("initial.path")?;
        let path = base_dir.join(rel);
        let columns = read_initial_csv(&path, grid.m(), n)
            .with_context(|| format!("reading initial data {}", path.display()))?;
        return columns
            .into_iter()
            .map(|c| Ok(build_profile(grid, &Profile::Samples(c))?))
            .collect();
    }

    let kinds: Vec<&str> = profile_spec.split(',').map(str::trim).collect();
    let kinds: Vec<&str> = if kinds.len() == 1 {
        vec![kinds[0]; n]
    } else if kinds.len() == n {
        kinds
    } else {
        bail!(
            "key `initial.profile`: expected 1 or {n} kinds, got {}",
            kinds.len()
        );
    };

    let per_species = |key: &str| -> Result<Option<Vec<f64>>> {
        match raw.get(key) {
            Some(v) => Ok(Some(spread(key, parse_list(key, v)?, n)?)),
            None => Ok(None),
        }
    };
    let need = |list: &Option<Vec<f64>>, key: &str, i: usize| -> Result<f64> {
        list.as_ref()
            .map(|v| v[i])
            .ok_or_else(|| anyhow!("species {}: profile needs key `{key}`", i + 1))
    };

    let base = per_species("initial.base")?;
    let amplitude = per_species("initial.amplitude")?;
    let center = per_species("initial.center")?;
    let width = per_species("initial.width")?;
    let left = per_species("initial.left")?;
    let right = per_species("initial.right")?;
    let jump_at = per_species("initial.jump_at")?;

    let mut initial = Vec::with_capacity(n);
    for (i, kind) in kinds.iter().enumerate() {
        let profile = match *kind {
            "constant" => Profile::Constant {
                value: need(&base, "initial.base", i)?,
            },
            "gaussian" => Profile::Gaussian {
                base: need(&base, "initial.base", i)?,
                amplitude: need(&amplitude, "initial.amplitude", i)?,
                center: need(&center, "initial.center", i)?,
                width: need(&width, "initial.width", i)?,
            },
            "step" => Profile::Step {
                left: need(&left, "initial.left", i)?,
                right: need(&right, "initial.right", i)?,
                jump_at: need(&jump_at, "initial.jump_at", i)?,
            },
            other => bail!(
                "key `initial.profile`: unknown kind `{other}` (constant, gaussian, step, csv)"
            ),
        };
        initial.push(build_profile(grid, &profile)?);
    }
    Ok(initial)
}

/// Headerless CSV of initial densities: one row per cell, `n` columns.
fn read_initial_csv(path: &Path, m: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut columns = vec![Vec::with_capacity(m); n];
    let mut rows = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != n {
            bail!("line {}: expected {n} columns, got {}", idx + 1, fields.len());
        }
        for (j, field) in fields.iter().enumerate() {
            let x: f64 = field
                .parse()
                .map_err(|_| anyhow!("line {}: `{field}` is not a number", idx + 1))?;
            columns[j].push(x);
        }
        rows += 1;
    }
    if rows != m {
        bail!("expected {m} rows of initial data, got {rows}");
    }
    Ok(columns)
}
