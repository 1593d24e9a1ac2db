use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use halfline_spectra::eigensolver::{find_eigenvalues_with, EigenSearch, Eigenvalue, Rect};
use halfline_spectra::enclosure::{enclosure_region, theta_grid, EnclosureRegion};
use halfline_spectra::harness::config::{params_label, spec_params};
use halfline_spectra::harness::report::{render_report, summarize, Format};
use halfline_spectra::harness::svg::{render_panel_svg, SvgOptions};
use halfline_spectra::harness::{exponent_sweep, run_campaign, Campaign, CampaignConfig, Panel};
use halfline_spectra::potential::{Potential, PotentialConfig};
use halfline_spectra::resolvent::{kernel_row_norm, spectral_point, BoundaryCondition};
use halfline_spectra::specfun::{g_eval_sigma_or_plain, GEval};
use halfline_spectra::{Error, Result};

#[derive(Parser)]
#[command(name = "halfline-spectra", version, about = "Eigenvalue enclosures for half-line Schrödinger operators")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML document with [potential], [[bounds]], [solver], [output]
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (stdout when omitted, except for `verify`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv, json or svg
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Seed for randomized checks
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enclosure radii R(θ) for every selected bound
    Bounds {
        /// JSON eigenvalue file drawn as markers in SVG output
        #[arg(long)]
        eigs: Option<PathBuf>,
    },
    /// Eigenvalues by shooting and argument-principle search
    Eigs {
        /// Search box re_min,re_max,im_min,im_max
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        search_box: Option<Vec<f64>>,
    },
    /// Containment campaign; exit code 1 when any record fails
    Verify,
    /// Random check of the resolvent row-norm inequalities
    KernelCheck {
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// g(a), or g_σ(a; μ) when --sigma is given
    Gfun {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        a: Vec<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu_re: f64,
        #[arg(long, default_value_t = 1.0)]
        mu_im: f64,
    },
    /// Radius table over an exponent grid ([sweep] section)
    Sweep,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Bounds { eigs } => cmd_bounds(&cli.common, eigs.as_deref()),
        Cmd::Eigs { search_box } => cmd_eigs(&cli.common, search_box.as_deref()),
        Cmd::Verify => cmd_verify(&cli.common),
        Cmd::KernelCheck { samples } => cmd_kernel_check(&cli.common, *samples),
        Cmd::Gfun { a, sigma, mu_re, mu_im } => cmd_gfun(&cli.common, a, *sigma, Complex64::new(*mu_re, *mu_im)),
        Cmd::Sweep => cmd_sweep(&cli.common),
    }
}

fn load_config(common: &Common) -> Result<(CampaignConfig, PathBuf)> {
    let path = common.config.as_deref().ok_or_else(|| Error::Config("--config is required".into()))?;
    CampaignConfig::from_file(path)
}

/// Writes to `<out>/<name>` or stdout.
fn emit(common: &Common, name: &str, text: &str) -> Result<()> {
    match &common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
}

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        "inf".into()
    }
}

fn cmd_bounds(common: &Common, eigs: Option<&Path>) -> Result<u8> {
    let (cfg, base) = load_config(common)?;
    let campaign = Campaign::from_config(&cfg, &base)?;
    for (spec, why) in &campaign.inadmissible {
        eprintln!("skipping {} [{}]: {why}", spec.provenance(), params_label(&spec_params(spec)));
    }
    let thetas = campaign.thetas();
    let markers: Vec<Eigenvalue> = match eigs {
        Some(p) => read_eigenvalues(p)?,
        None => Vec::new(),
    };
    let mut panels = Vec::new();
    for point in &campaign.potentials {
        let q = point.config.build(&base)?;
        for &bc in &campaign.solver.bc {
            let mut regions = Vec::new();
            for spec in &campaign.bounds {
                let bound = spec.resolve(&q, bc)?;
                regions.push(enclosure_region(&bound, &thetas)?);
            }
            panels.push(Panel {
                potential: point.kind.clone(),
                params: point.label(),
                bc,
                regions,
                eigenvalues: markers.iter().filter(|e| e.bc == bc).copied().collect(),
                search_box: None,
                search_clipped: false,
            });
        }
    }
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("potential,params,bc,provenance,bound_params,theta,radius\n");
            for p in &panels {
                for r in &p.regions {
                    let bp = params_label(&r.parameters);
                    if let Some(nr) = r.negative_axis_radius {
                        s.push_str(&format!("{},{},{},{},{},{},{}\n", p.potential, p.params, p.bc, r.provenance, bp, std::f64::consts::PI, fmt_f64(nr)));
                        continue;
                    }
                    for (t, rad) in r.thetas.iter().zip(&r.radii) {
                        s.push_str(&format!("{},{},{},{},{},{},{}\n", p.potential, p.params, p.bc, r.provenance, bp, t, fmt_f64(*rad)));
                    }
                }
            }
            emit(common, "bounds.csv", &s)?;
        }
        Format::Json => {
            let regions: Vec<&EnclosureRegion> = panels.iter().flat_map(|p| &p.regions).collect();
            emit(common, "bounds.json", &to_json(&regions)?)?;
        }
        Format::Svg => {
            let opts = SvgOptions { log_scale: campaign.output.svg_log_scale, ..SvgOptions::default() };
            for (i, p) in panels.iter().enumerate() {
                emit(common, &format!("bounds_{i:03}.svg"), &render_panel_svg(p, &opts))?;
            }
        }
    }
    Ok(0)
}

/// Accepts a list of eigenvalues or the output of `eigs`.
fn read_eigenvalues(path: &Path) -> Result<Vec<Eigenvalue>> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(v) = serde_json::from_str::<Vec<Eigenvalue>>(&text) {
        return Ok(v);
    }
    let runs: Vec<EigsOutput> = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(runs.into_iter().flat_map(|r| r.search.eigenvalues).collect())
}

#[derive(Serialize, serde::Deserialize)]
struct EigsOutput {
    potential: String,
    params: String,
    bc: BoundaryCondition,
    search_box: Rect,
    search: EigenSearch,
}

fn cmd_eigs(common: &Common, search_box: Option<&[f64]>) -> Result<u8> {
    let (cfg, base) = load_config(common)?;
    let campaign = Campaign::from_config(&cfg, &base)?;
    let thetas = theta_grid(campaign.solver.n_theta, campaign.solver.theta_exclusion);
    let mut out = Vec::new();
    for point in &campaign.potentials {
        let q = point.config.build(&base)?;
        for &bc in &campaign.solver.bc {
            let b = match (search_box, campaign.solver.search_box) {
                (Some(&[a, b, c, d]), _) => Rect::new(a, b, c, d),
                (Some(_), _) => return Err(Error::Config("--search-box takes four numbers".into())),
                (None, Some(b)) => b,
                (None, None) => {
                    let mut r_max: f64 = 0.0;
                    for spec in &campaign.bounds {
                        if let Ok(reg) = spec.resolve(&q, bc).and_then(|bd| enclosure_region(&bd, &thetas)) {
                            r_max = r_max.max(reg.max_finite_radius());
                        }
                    }
                    let x = (campaign.solver.search_factor * r_max).min(campaign.solver.max_search_radius).max(1.0);
                    Rect::new(-x, x, -x, x)
                }
            };
            let search = find_eigenvalues_with(&q, &b, bc, &campaign.solver.solver_options())?;
            out.push(EigsOutput { potential: point.kind.clone(), params: point.label(), bc, search_box: b, search });
        }
    }
    emit(common, "eigs.json", &to_json(&out)?)?;
    Ok(0)
}

fn cmd_verify(common: &Common) -> Result<u8> {
    let (cfg, base) = load_config(common)?;
    let mut campaign = Campaign::from_config(&cfg, &base)?;
    if let Some(seed) = common.seed {
        campaign.output.seed = seed;
    }
    let result = run_campaign(&campaign, common.jobs)?;
    let formats: Vec<Format> = match common.format {
        Some(f) => vec![f],
        None => campaign.output.formats.iter().map(|s| s.parse()).collect::<Result<_>>()?,
    };
    let dir = common.out.clone().unwrap_or_else(|| base.join(&campaign.output.dir));
    let svg = SvgOptions { log_scale: campaign.output.svg_log_scale, ..SvgOptions::default() };
    for p in render_report(&result, &dir, &formats, &svg)? {
        eprintln!("wrote {}", p.display());
    }
    let summary = summarize(&result);
    print!("{}", to_json(&summary)?);
    Ok(if summary.all_pass { 0 } else { 1 })
}

fn cmd_kernel_check(common: &Common, samples: usize) -> Result<u8> {
    let seed = common.seed.unwrap_or(0x5eed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_slack = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..samples {
        let modulus = 10f64.powf(rng.random_range(-2.0..2.0));
        let theta = rng.random_range(1e-3..(2.0 * std::f64::consts::PI - 1e-3));
        let alpha = rng.random_range(1.0..8.0);
        let x = rng.random_range(0.0..20.0);
        let sp = spectral_point(Complex64::from_polar(modulus, theta))?;
        let rn = kernel_row_norm(x, &sp, alpha, BoundaryCondition::Dirichlet)?;
        let slack = (rn.closed_form_bound - rn.quadrature).min(rn.global_bound - rn.closed_form_bound)
            / rn.global_bound.max(1e-300);
        worst_slack = worst_slack.min(slack);
        if slack < -1e-9 {
            failures += 1;
        }
    }
    let mut s = String::from("samples,seed,failures,worst_relative_slack\n");
    s.push_str(&format!("{samples},{seed},{failures},{worst_slack}\n"));
    emit(common, "kernel_check.csv", &s)?;
    Ok(if failures == 0 { 0 } else { 1 })
}

fn cmd_gfun(common: &Common, a: &[f64], sigma: Option<f64>, mu: Complex64) -> Result<u8> {
    let rows: Vec<GEval> = a.iter().map(|&x| g_eval_sigma_or_plain(x, sigma, mu)).collect::<Result<_>>()?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Json => emit(common, "gfun.json", &to_json(&rows)?)?,
        _ => {
            let mut s = String::from("a,g,maximizer_y\n");
            for r in rows {
                s.push_str(&format!("{},{},{}\n", r.argument, r.value, fmt_f64(r.maximizer_y)));
            }
            emit(common, "gfun.csv", &s)?;
        }
    }
    Ok(0)
}

fn cmd_sweep(common: &Common) -> Result<u8> {
    let path = common.config.as_deref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path)?;
    let doc: toml::Table = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let pot: PotentialConfig = doc
        .get("potential")
        .cloned()
        .ok_or_else(|| Error::Config("missing [potential]".into()))?
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(format!("[potential]: {e}")))?;
    let q: Potential = pot.build(&base)?;
    let mut sweep = doc
        .get("sweep")
        .and_then(|v| v.as_table())
        .cloned()
        .ok_or_else(|| Error::Config("missing [sweep]".into()))?;
    let theta_ref = match sweep.remove("theta_ref") {
        Some(v) => v.as_float().or_else(|| v.as_integer().map(|i| i as f64)).ok_or_else(|| Error::Config("theta_ref must be a number".into()))?,
        None => std::f64::consts::PI,
    };
    let bc: BoundaryCondition = match sweep.remove("bc") {
        Some(v) => v.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?,
        None => BoundaryCondition::Dirichlet,
    };
    let grid: BTreeMap<String, Vec<f64>> = match sweep.remove("grid") {
        Some(v) => v.try_into().map_err(|e: toml::de::Error| Error::Config(format!("[sweep.grid]: {e}")))?,
        None => BTreeMap::new(),
    };
    let table = exponent_sweep(&q, bc, &sweep, &grid, theta_ref)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Json => emit(common, "sweep.json", &to_json(&table)?)?,
        _ => emit(common, "sweep.csv", &table.to_csv())?,
    }
    Ok(0)
}
