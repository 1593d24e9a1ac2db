//! Radius tables over exponent grids.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::expand_grid;
use crate::enclosure::{BoundSpec, Provenance};
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::resolvent::BoundaryCondition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// The grid coordinates of this row.
    pub params: BTreeMap<String, f64>,
    pub admissible: bool,
    /// `R(θ_ref)`; absent when inadmissible or when a norm failed.
    pub radius: Option<f64>,
    pub note: Option<String>,
    /// Smallest finite radius in the table.
    pub minimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub provenance: Option<Provenance>,
    pub theta_ref: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let keys: Vec<&String> = self.rows.first().map(|r| r.params.keys().collect()).unwrap_or_default();
        let mut out = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
        out.push_str(if keys.is_empty() { "admissible,radius,minimal,note\n" } else { ",admissible,radius,minimal,note\n" });
        for r in &self.rows {
            let mut cells: Vec<String> = keys.iter().map(|k| r.params[*k].to_string()).collect();
            cells.push(r.admissible.to_string());
            cells.push(r.radius.map(|x| x.to_string()).unwrap_or_default());
            cells.push(r.minimal.to_string());
            cells.push(r.note.clone().unwrap_or_default().replace(',', ";"));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Evaluates the selector `template` (a `[[bounds]]`-style table) at every
/// point of `grid` and reports `R(θ_ref)`. Inadmissible points are marked,
/// not fatal.
pub fn exponent_sweep(
    q: &Potential,
    bc: BoundaryCondition,
    template: &toml::Table,
    grid: &BTreeMap<String, Vec<f64>>,
    theta_ref: f64,
) -> Result<SweepTable> {
    let mut t = template.clone();
    for (k, v) in grid {
        if v.is_empty() {
            return Err(Error::Config(format!("sweep axis '{k}' is empty")));
        }
        t.insert(k.clone(), toml::Value::Array(v.iter().map(|&x| toml::Value::Float(x)).collect()));
    }
    let mut rows = Vec::new();
    let mut provenance = None;
    for point in expand_grid(&t) {
        let params: BTreeMap<String, f64> =
            grid.keys().filter_map(|k| point.get(k).and_then(|v| v.as_float()).map(|x| (k.clone(), x))).collect();
        let spec: BoundSpec =
            toml::Value::Table(point).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        provenance = Some(spec.provenance());
        let row = match spec.check_admissible() {
            Err(e) => SweepRow { params, admissible: false, radius: None, note: Some(e.to_string()), minimal: false },
            Ok(()) => match spec.resolve(q, bc).and_then(|b| b.radius(theta_ref)) {
                Ok(r) => SweepRow { params, admissible: true, radius: Some(r), note: None, minimal: false },
                Err(e) => SweepRow { params, admissible: true, radius: None, note: Some(e.to_string()), minimal: false },
            },
        };
        rows.push(row);
    }
    let best = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.radius.filter(|x| x.is_finite()).map(|x| (i, x)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((i, _)) = best {
        rows[i].minimal = true;
    }
    Ok(SweepTable { provenance, theta_ref, rows })
}
