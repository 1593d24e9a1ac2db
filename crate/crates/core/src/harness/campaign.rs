//! Containment verification: every computed eigenvalue against every
//! enclosure region.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{params_label, spec_params, CampaignConfig, OutputConfig, PotentialPoint, SolverConfig};
use crate::eigensolver::{find_eigenvalues_with, Eigenvalue, Method, Rect};
use crate::enclosure::{enclosure_region, passes, theta_grid, Bound, BoundSpec, EnclosureRegion, Provenance};
use crate::error::{Error, Result};
use crate::resolvent::{spectral_point, BoundaryCondition};

/// A validated campaign: admissibility is settled before any solve.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub potentials: Vec<PotentialPoint>,
    pub bounds: Vec<BoundSpec>,
    /// Selectors rejected by the exponent gates, with reasons.
    pub inadmissible: Vec<(BoundSpec, String)>,
    pub solver: SolverConfig,
    pub output: OutputConfig,
    pub base_dir: PathBuf,
}

impl Campaign {
    pub fn from_config(cfg: &CampaignConfig, base_dir: &Path) -> Result<Self> {
        let potentials = cfg.potential_points()?;
        let mut bounds = Vec::new();
        let mut inadmissible = Vec::new();
        for spec in cfg.bound_specs()? {
            match spec.check_admissible() {
                Ok(()) => bounds.push(spec),
                Err(e) => inadmissible.push((spec, e.to_string())),
            }
        }
        if cfg.solver.bc.is_empty() {
            return Err(Error::Config("[solver] bc must not be empty".into()));
        }
        Ok(Campaign {
            potentials,
            bounds,
            inadmissible,
            solver: cfg.solver.clone(),
            output: cfg.output.clone(),
            base_dir: base_dir.to_path_buf(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let (cfg, base) = CampaignConfig::from_file(path)?;
        Self::from_config(&cfg, &base)
    }

    pub fn thetas(&self) -> Vec<f64> {
        theta_grid(self.solver.n_theta, self.solver.theta_exclusion)
    }
}

/// One (eigenvalue, bound) pair, or a skipped entry with its reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub potential: String,
    pub params: String,
    #[serde(with = "bc_text")]
    pub bc: BoundaryCondition,
    pub lambda_re: Option<f64>,
    pub lambda_im: Option<f64>,
    pub residual: Option<f64>,
    pub truncation_l: Option<f64>,
    pub method: Option<Method>,
    pub provenance: Provenance,
    pub bound_params: String,
    pub theta: Option<f64>,
    pub radius: Option<f64>,
    /// `R(θ) - |λ|`.
    pub margin: Option<f64>,
    /// For unscaled weak-norm bounds: the smallest constant `C` that
    /// would put this eigenvalue on the region boundary.
    pub required_c: Option<f64>,
    pub pass: bool,
    pub skipped: Option<String>,
}

mod bc_text {
    use super::BoundaryCondition;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bc: &BoundaryCondition, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(bc)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BoundaryCondition, D::Error> {
        let t = String::deserialize(d)?;
        t.parse().map_err(serde::de::Error::custom)
    }
}

impl VerificationRecord {
    pub fn lambda(&self) -> Option<Complex64> {
        Some(Complex64::new(self.lambda_re?, self.lambda_im?))
    }

    pub fn eigenvalue(&self) -> Option<Eigenvalue> {
        Some(Eigenvalue {
            lambda: self.lambda()?,
            residual: self.residual?,
            method: self.method?,
            truncation_l: self.truncation_l?,
            truncation_delta: 0.0,
            bc: self.bc,
        })
    }

    pub fn is_skipped(&self) -> bool {
        self.skipped.is_some()
    }
}

/// Regions and eigenvalues for one (potential, boundary condition) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub potential: String,
    pub params: String,
    pub bc: BoundaryCondition,
    pub regions: Vec<EnclosureRegion>,
    pub eigenvalues: Vec<Eigenvalue>,
    pub search_box: Option<Rect>,
    /// Set when the default search box was capped below `factor · R_max`.
    pub search_clipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub records: Vec<VerificationRecord>,
    pub panels: Vec<Panel>,
    pub inadmissible: Vec<String>,
    pub seed: u64,
}

/// Exponent of `C` in the radius, `R ∝ C^e`, for bounds with a constant.
fn c_exponent(bound: &Bound) -> Option<(f64, f64)> {
    match *bound {
        Bound::Thm5Weak { cfg, c, .. } => cfg.thm1_alpha().ok().map(|a| (1.0 / (1.0 + a), c)),
        Bound::Cor5 { gamma, c, .. } => Some(((2.0 * gamma - 1.0) / (4.0 * gamma), c)),
        _ => None,
    }
}

struct Resolved {
    spec_label: String,
    provenance: Provenance,
    outcome: std::result::Result<(Bound, EnclosureRegion), String>,
}

fn skipped(point: &PotentialPoint, bc: BoundaryCondition, r: &Resolved, reason: String) -> VerificationRecord {
    VerificationRecord {
        potential: point.kind.clone(),
        params: point.label(),
        bc,
        lambda_re: None,
        lambda_im: None,
        residual: None,
        truncation_l: None,
        method: None,
        provenance: r.provenance,
        bound_params: r.spec_label.clone(),
        theta: None,
        radius: None,
        margin: None,
        required_c: None,
        pass: false,
        skipped: Some(reason),
    }
}

fn run_item(c: &Campaign, point: &PotentialPoint, bc: BoundaryCondition, thetas: &[f64]) -> (Vec<VerificationRecord>, Panel) {
    let mut panel = Panel {
        potential: point.kind.clone(),
        params: point.label(),
        bc,
        regions: Vec::new(),
        eigenvalues: Vec::new(),
        search_box: None,
        search_clipped: false,
    };
    let built = point.config.build(&c.base_dir);
    let resolved: Vec<Resolved> = c
        .bounds
        .iter()
        .map(|spec| {
            let outcome = built.as_ref().map_err(|e| format!("potential: {e}")).and_then(|q| {
                let bound = spec.resolve(q, bc).map_err(|e| e.to_string())?;
                let mut region = enclosure_region(&bound, thetas).map_err(|e| e.to_string())?;
                if c.solver.radius_scale != 1.0 {
                    region.radii.iter_mut().for_each(|r| *r *= c.solver.radius_scale);
                    if let Some(r) = region.negative_axis_radius.as_mut() {
                        *r *= c.solver.radius_scale;
                    }
                }
                Ok((bound, region))
            });
            Resolved { spec_label: params_label(&spec_params(spec)), provenance: spec.provenance(), outcome }
        })
        .collect();
    let mut records: Vec<VerificationRecord> = resolved
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().map(|e| skipped(point, bc, r, e.clone())))
        .collect();
    let ok: Vec<&Resolved> = resolved.iter().filter(|r| r.outcome.is_ok()).collect();
    panel.regions = ok.iter().map(|r| r.outcome.as_ref().unwrap().1.clone()).collect();
    let q = match built {
        Ok(q) => q,
        Err(_) => return (records, panel),
    };
    if ok.is_empty() {
        return (records, panel);
    }

    let search_box = match c.solver.search_box {
        Some(b) => b,
        None => {
            let r_max = panel.regions.iter().map(|r| r.max_finite_radius()).fold(0.0, f64::max);
            let wanted = c.solver.search_factor * r_max;
            panel.search_clipped = wanted > c.solver.max_search_radius;
            let x = wanted.min(c.solver.max_search_radius).max(1.0);
            Rect::new(-x, x, -x, x)
        }
    };
    panel.search_box = Some(search_box);
    let found = find_eigenvalues_with(&q, &search_box, bc, &c.solver.solver_options());
    let eigs = match found {
        Ok(s) => {
            if s.truncated {
                log::warn!("{} {bc}: eigenvalue search truncated at {}", point.label(), c.solver.max_count);
            }
            s.eigenvalues
        }
        Err(e) => {
            for r in &ok {
                records.push(skipped(point, bc, r, format!("solver: {e}")));
            }
            return (records, panel);
        }
    };
    let mut pairs = Vec::new();
    for e in &eigs {
        for r in &ok {
            let (bound, region) = r.outcome.as_ref().unwrap();
            let rec = match region.margin(e.lambda) {
                Ok((radius, margin)) => {
                    let required_c = c_exponent(bound).and_then(|(ex, c0)| {
                        (region.unscaled && radius.is_finite() && radius > 0.0)
                            .then(|| c0 * (e.lambda.norm() / radius).powf(1.0 / ex))
                    });
                    VerificationRecord {
                        potential: point.kind.clone(),
                        params: point.label(),
                        bc,
                        lambda_re: Some(e.lambda.re),
                        lambda_im: Some(e.lambda.im),
                        residual: Some(e.residual),
                        truncation_l: Some(e.truncation_l),
                        method: Some(e.method),
                        provenance: r.provenance,
                        bound_params: r.spec_label.clone(),
                        theta: spectral_point(e.lambda).ok().map(|sp| sp.theta),
                        radius: Some(radius),
                        margin: Some(margin),
                        required_c,
                        pass: passes(radius, margin),
                        skipped: None,
                    }
                }
                Err(err) => skipped(point, bc, r, format!("region: {err}")),
            };
            pairs.push((e.lambda.norm(), rec));
        }
    }
    pairs.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.provenance.cmp(&b.1.provenance))
            .then(a.1.bound_params.cmp(&b.1.bound_params))
    });
    records.extend(pairs.into_iter().map(|p| p.1));
    panel.eigenvalues = eigs;
    (records, panel)
}

/// Runs every (potential, boundary condition) item on up to `jobs` threads;
/// records come back in grid order regardless of scheduling.
pub fn run_campaign(c: &Campaign, jobs: usize) -> Result<CampaignResult> {
    let thetas = c.thetas();
    let items: Vec<(&PotentialPoint, BoundaryCondition)> =
        c.potentials.iter().flat_map(|p| c.solver.bc.iter().map(move |&bc| (p, bc))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<(Vec<VerificationRecord>, Panel)> =
        pool.install(|| items.par_iter().map(|&(p, bc)| run_item(c, p, bc, &thetas)).collect());
    let mut records = Vec::new();
    let mut panels = Vec::new();
    for (r, p) in results {
        records.extend(r);
        panels.push(p);
    }
    let inadmissible = c
        .inadmissible
        .iter()
        .map(|(s, why)| format!("{} [{}]: {why}", s.provenance(), params_label(&spec_params(s))))
        .collect();
    Ok(CampaignResult { records, panels, inadmissible, seed: c.output.seed })
}
