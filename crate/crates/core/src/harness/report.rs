//! CSV records, JSON summaries and SVG plots.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::campaign::{CampaignResult, VerificationRecord};
use super::svg::{render_panel_svg, SvgOptions};
use crate::enclosure::Provenance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// No record was checked, so the campaign passes vacuously.
    pub vacuous: bool,
    /// No non-skipped record failed.
    pub all_pass: bool,
    /// Smallest finite `R(θ) - |λ|` per provenance.
    pub worst_margin: BTreeMap<Provenance, f64>,
    /// Largest required constant per weak-norm provenance, when its
    /// regions were built with `C = 1`.
    pub empirical_c: BTreeMap<Provenance, f64>,
    pub inadmissible: Vec<String>,
    pub search_clipped: usize,
    pub seed: u64,
}

pub fn summarize(result: &CampaignResult) -> Summary {
    let mut s = Summary {
        total: result.records.len(),
        passed: 0,
        failed: 0,
        skipped: 0,
        vacuous: false,
        all_pass: true,
        worst_margin: BTreeMap::new(),
        empirical_c: BTreeMap::new(),
        inadmissible: result.inadmissible.clone(),
        search_clipped: result.panels.iter().filter(|p| p.search_clipped).count(),
        seed: result.seed,
    };
    for r in &result.records {
        if r.is_skipped() {
            s.skipped += 1;
            continue;
        }
        if r.pass {
            s.passed += 1;
        } else {
            s.failed += 1;
        }
        if let Some(m) = r.margin.filter(|m| m.is_finite()) {
            let e = s.worst_margin.entry(r.provenance).or_insert(f64::INFINITY);
            *e = e.min(m);
        }
        if let Some(c) = r.required_c {
            let e = s.empirical_c.entry(r.provenance).or_insert(0.0);
            *e = e.max(c);
        }
    }
    s.vacuous = s.passed + s.failed == 0;
    s.all_pass = s.failed == 0;
    s
}

pub fn write_csv<W: Write>(records: &[VerificationRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<VerificationRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Io(e.to_string()))
}

/// File-name-safe rendering of a panel label.
fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

/// Writes `records.csv`, `summary.json` and one SVG per panel into `dir`,
/// according to `formats`. Returns the written paths.
pub fn render_report(result: &CampaignResult, dir: &Path, formats: &[Format], svg: &SvgOptions) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if formats.contains(&Format::Csv) {
        let p = dir.join("records.csv");
        write_csv(&result.records, std::fs::File::create(&p)?)?;
        written.push(p);
    }
    if formats.contains(&Format::Json) {
        let p = dir.join("summary.json");
        let text = serde_json::to_string_pretty(&summarize(result)).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&p, text)?;
        written.push(p);
    }
    if formats.contains(&Format::Svg) {
        for (i, panel) in result.panels.iter().enumerate() {
            let name = format!("panel_{i:03}_{}_{}.svg", slug(&panel.params), slug(&panel.bc.to_string()));
            let p = dir.join(name);
            std::fs::write(&p, render_panel_svg(panel, svg))?;
            written.push(p);
        }
    }
    Ok(written)
}
