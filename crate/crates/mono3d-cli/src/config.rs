//! Flat key=value configuration files; command-line flags override file
//! values. The fit subcommand writes its outputs in the same format so they
//! can be passed straight back in.

use anyhow::{bail, Context, Result};
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default, Clone)]
pub struct ConfigMap {
    values: HashMap<String, String>,
}

impl ConfigMap {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not key=value: {line:?}", i + 1);
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse::<T>() {
                Ok(v) => Ok(Some(v)),
                Err(e) => bail!("config key {key}={raw:?}: {e}"),
            },
        }
    }
}

/// Flag value if given, else the config-file value.
pub fn resolve<T: FromStr>(flag: Option<T>, cfg: &ConfigMap, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

pub fn resolve_or<T: FromStr>(flag: Option<T>, cfg: &ConfigMap, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    Ok(resolve(flag, cfg, key)?.unwrap_or(default))
}

pub fn resolve_required<T: FromStr>(flag: Option<T>, cfg: &ConfigMap, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    resolve(flag, cfg, key)?
        .with_context(|| format!("missing required option --{} (config key {key})", key.replace('_', "-")))
}

/// Serialized per-axis Gaussian parameters (fit output, infer input).
pub fn write_gaussian_params(path: &Path, mu: [f64; 3], sigma: [f64; 3]) -> Result<()> {
    let text = format!(
        "mu_x={}\nmu_y={}\nmu_z={}\nsigma_x={}\nsigma_y={}\nsigma_z={}\n",
        mu[0], mu[1], mu[2], sigma[0], sigma[1], sigma[2]
    );
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_gaussian_params(path: &Path) -> Result<([f64; 3], [f64; 3])> {
    let cfg = ConfigMap::load(path)?;
    let need = |key: &str| -> Result<f64> {
        cfg.get::<f64>(key)?
            .with_context(|| format!("{} lacks {key}", path.display()))
    };
    Ok((
        [need("mu_x")?, need("mu_y")?, need("mu_z")?],
        [need("sigma_x")?, need("sigma_y")?, need("sigma_z")?],
    ))
}

pub fn write_ray_coefficient(path: &Path, k: f64, residual: f64) -> Result<()> {
    std::fs::write(path, format!("k={k}\nresidual={residual}\n"))
        .with_context(|| format!("writing {}", path.display()))
}

pub fn read_ray_coefficient(path: &Path) -> Result<f64> {
    let cfg = ConfigMap::load(path)?;
    cfg.get::<f64>("k")?
        .with_context(|| format!("{} lacks k", path.display()))
}
