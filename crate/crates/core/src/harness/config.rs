//! TOML campaign documents with `[potential]`, `[[bounds]]`, `[solver]`
//! and `[output]` sections.
//!
//! Any numeric array in `[potential]` or in a `[[bounds]]` entry is a grid
//! axis; the document expands to the Cartesian product of its axes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eigensolver::{Rect, SolverOptions};
use crate::enclosure::BoundSpec;
use crate::error::{Error, Result};
use crate::potential::PotentialConfig;
use crate::resolvent::BoundaryCondition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub potential: toml::Table,
    #[serde(default)]
    pub bounds: Vec<toml::Table>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(BoundaryCondition),
    Many(Vec<BoundaryCondition>),
}

fn de_bcs<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<BoundaryCondition>, D::Error> {
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(b) => vec![b],
        OneOrMany::Many(v) => v,
    })
}

/// Solver and region settings. Every default is listed here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// One boundary condition or a list (`"dirichlet"`, `"neumann"`, σ).
    #[serde(deserialize_with = "de_bcs")]
    pub bc: Vec<BoundaryCondition>,
    /// Initial truncation length (40).
    pub l: f64,
    /// Essential-spectrum margin (1e-3).
    pub margin: f64,
    /// Eigenvalue movement accepted under doubling of `L` (1e-9).
    pub truncation_tol: f64,
    /// Maximum eigenvalues per potential (64).
    pub max_count: usize,
    /// Explicit search box; default is `factor · R_max` in each direction.
    pub search_box: Option<Rect>,
    /// Search box half-width in units of the largest finite radius (10).
    pub search_factor: f64,
    /// Cap on the search box half-width (1e3).
    pub max_search_radius: f64,
    /// Number of sampled angles per region (720).
    pub n_theta: usize,
    /// Angles closer than this to 0 or 2π are not sampled (1e-3).
    pub theta_exclusion: f64,
    /// Multiplies every region radius; 1 except in harness self-tests.
    pub radius_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            bc: vec![BoundaryCondition::Dirichlet],
            l: 40.0,
            margin: 1e-3,
            truncation_tol: 1e-9,
            max_count: 64,
            search_box: None,
            search_factor: 10.0,
            max_search_radius: 1e3,
            n_theta: 720,
            theta_exclusion: 1e-3,
            radius_scale: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            l: self.l,
            margin: self.margin,
            truncation_tol: self.truncation_tol,
            max_count: self.max_count,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Report directory ("out"), relative to the config file.
    pub dir: String,
    /// Any of "csv", "json", "svg" (default csv and json).
    pub formats: Vec<String>,
    /// Logarithmic radial scale in SVG plots (false).
    pub svg_log_scale: bool,
    /// Seed recorded in reports and used by randomized probes (0x5eed).
    pub seed: u64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into(), formats: vec!["csv".into(), "json".into()], svg_log_scale: false, seed: 0x5eed }
    }
}

/// One point of a potential family.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPoint {
    pub kind: String,
    /// Scalar numeric parameters in key order.
    pub params: BTreeMap<String, f64>,
    pub config: PotentialConfig,
}

impl PotentialPoint {
    /// `key=value` pairs joined by `;`.
    pub fn label(&self) -> String {
        params_label(&self.params)
    }
}

pub fn params_label(params: &BTreeMap<String, f64>) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn normalize_numbers(v: &mut toml::Value) {
    match v {
        toml::Value::Integer(i) => *v = toml::Value::Float(*i as f64),
        toml::Value::Array(a) => a.iter_mut().for_each(normalize_numbers),
        toml::Value::Table(t) => t.iter_mut().for_each(|(_, x)| normalize_numbers(x)),
        _ => {}
    }
}

fn is_grid_axis(v: &toml::Value) -> bool {
    matches!(v, toml::Value::Array(a) if !a.is_empty() && a.iter().all(|x| x.is_float() || x.is_integer()))
}

/// Cartesian expansion of the numeric-array fields of `t`; the last key
/// varies fastest.
pub fn expand_grid(t: &toml::Table) -> Vec<toml::Table> {
    let mut t = t.clone();
    t.iter_mut().for_each(|(_, x)| normalize_numbers(x));
    let mut out = vec![toml::Table::new()];
    for (k, v) in &t {
        let choices: Vec<toml::Value> = if is_grid_axis(v) {
            v.as_array().cloned().unwrap_or_default()
        } else {
            vec![v.clone()]
        };
        out = out
            .into_iter()
            .flat_map(|base| {
                choices.iter().map(move |c| {
                    let mut b = base.clone();
                    b.insert(k.clone(), c.clone());
                    b
                })
            })
            .collect();
    }
    out
}

fn scalar_params(t: &toml::Table) -> BTreeMap<String, f64> {
    t.iter().filter_map(|(k, v)| v.as_float().map(|x| (k.clone(), x))).collect()
}

impl CampaignConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a document and returns it with the directory that relative
    /// paths refer to.
    pub fn from_file(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_toml_str(&text)?, base))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn potential_points(&self) -> Result<Vec<PotentialPoint>> {
        expand_grid(&self.potential)
            .into_iter()
            .map(|t| {
                let kind = t.get("kind").and_then(|k| k.as_str()).unwrap_or("").to_string();
                let params = scalar_params(&t);
                let config: PotentialConfig = toml::Value::Table(t)
                    .try_into()
                    .map_err(|e: toml::de::Error| Error::Config(format!("[potential]: {e}")))?;
                Ok(PotentialPoint { kind, params, config })
            })
            .collect()
    }

    pub fn bound_specs(&self) -> Result<Vec<BoundSpec>> {
        let mut out = Vec::new();
        for t in &self.bounds {
            for e in expand_grid(t) {
                let spec: BoundSpec = toml::Value::Table(e)
                    .try_into()
                    .map_err(|e: toml::de::Error| Error::Config(format!("[[bounds]]: {e}")))?;
                out.push(spec);
            }
        }
        Ok(out)
    }
}

/// Numeric fields of a bound selector, without the selector tag.
pub fn spec_params(spec: &BoundSpec) -> BTreeMap<String, f64> {
    let v = serde_json::to_value(spec).unwrap_or(serde_json::Value::Null);
    let mut m = BTreeMap::new();
    if let serde_json::Value::Object(o) = v {
        for (k, x) in o {
            if let Some(f) = x.as_f64() {
                m.insert(k, f);
            }
        }
    }
    m
}
