use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use halfline_spectra::eigensolver::{Eigenvalue, Method};
use halfline_spectra::enclosure::{contains_with_tol, enclosure_region, theta_grid, Bound, Provenance};
use halfline_spectra::harness::report::{read_csv, summarize, write_csv};
use halfline_spectra::harness::svg::{render_panel_svg, SvgOptions};
use halfline_spectra::harness::*;
use halfline_spectra::potential::Potential;
use halfline_spectra::resolvent::BoundaryCondition;
use num_complex::Complex64;

fn campaign(doc: &str) -> Campaign {
    Campaign::from_config(&CampaignConfig::from_toml_str(doc).unwrap(), Path::new(".")).unwrap()
}

const FAMILY: &str = r#"
[potential]
kind = "exponential"
c = [-1, -2, -3, -4, -5, -6, -7, -8, -9, -10]

[[bounds]]
bound = "thm2"

[solver]
n_theta = 240
"#;

#[test]
fn zero_potential_campaign_is_vacuous() {
    let c = campaign("[potential]\nkind = \"zero\"\n[[bounds]]\nbound = \"thm2\"\n");
    let r = run_campaign(&c, 1).unwrap();
    assert!(r.records.is_empty());
    let s = summarize(&r);
    assert!(s.vacuous && s.all_pass);
}

#[test]
fn real_exponential_family_passes_theorem_2_and_reverifies() {
    let c = campaign(FAMILY);
    let r = run_campaign(&c, 1).unwrap();
    let s = summarize(&r);
    assert!(s.passed >= 5, "{s:?}");
    assert_eq!(s.failed, 0);
    assert_eq!(s.skipped, 0);
    // each record re-verifies against an independently rebuilt region
    let thetas = c.thetas();
    for rec in &r.records {
        let q = Potential::exponential(rec.params.split(';').next().unwrap()[2..].parse().unwrap(), 0.0, 1.0);
        let bound = halfline_spectra::enclosure::BoundSpec::Thm2 { p: 2.0, scheme: halfline_spectra::potential::Scheme::SqrtSplit }
            .resolve(&q, rec.bc)
            .unwrap();
        let region = enclosure_region(&bound, &thetas).unwrap();
        assert_eq!(contains_with_tol(&region, rec.lambda().unwrap()).unwrap(), rec.pass);
    }
    // deterministic
    let again = run_campaign(&c, 2).unwrap();
    assert_eq!(r.records, again.records);
}

#[test]
fn shrunken_bound_produces_failures() {
    let doc = FAMILY.replace("n_theta = 240", "n_theta = 240\nradius_scale = 0.01");
    let r = run_campaign(&campaign(&doc), 1).unwrap();
    let s = summarize(&r);
    assert!(s.failed > 0);
    for rec in r.records.iter().filter(|x| !x.pass) {
        assert!(rec.margin.unwrap() < 0.0);
    }
}

#[test]
fn csv_round_trip_is_exact() {
    let doc = FAMILY.replace("c = [-1, -2, -3, -4, -5, -6, -7, -8, -9, -10]", "c = [-1, -9]")
        + "\n[[bounds]]\nbound = \"thm5_weak\"\nr = 4.0\ns = 4.0\n";
    let r = run_campaign(&campaign(&doc), 1).unwrap();
    assert!(r.records.iter().any(|x| x.required_c.is_some()));
    let mut buf = Vec::new();
    write_csv(&r.records, &mut buf).unwrap();
    let back = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, r.records);
}

#[test]
fn inadmissible_selectors_are_listed_not_run() {
    let doc = "[potential]\nkind = \"exponential\"\nc = -2.0\n[[bounds]]\nbound = \"thm1\"\nr = 2.0\ns = 1.5\n[[bounds]]\nbound = \"thm2\"\n";
    let c = campaign(doc);
    assert_eq!(c.bounds.len(), 1);
    assert_eq!(c.inadmissible.len(), 1);
    let r = run_campaign(&c, 1).unwrap();
    assert_eq!(r.inadmissible.len(), 1);
    assert!(r.records.iter().all(|x| x.provenance == Provenance::Thm2));
}

#[test]
fn svg_has_one_curve_per_region() {
    let q = Potential::exponential(-3.0, 0.0, 1.0);
    let thetas = theta_grid(90, 1e-3);
    let regions = vec![
        enclosure_region(&Bound::Thm2 { na: 1.7, nb: 1.7 }, &thetas).unwrap(),
        enclosure_region(&Bound::Rem1 { integral: 2.0, gamma: 1.0 }, &thetas).unwrap(),
    ];
    let panel = Panel {
        potential: "exponential".into(),
        params: "c=-3".into(),
        bc: BoundaryCondition::Dirichlet,
        regions,
        eigenvalues: vec![Eigenvalue {
            lambda: Complex64::new(-0.13, 0.0),
            residual: 0.0,
            method: Method::Shooting,
            truncation_l: 40.0,
            truncation_delta: 0.0,
            bc: BoundaryCondition::Dirichlet,
        }],
        search_box: None,
        search_clipped: false,
    };
    let _ = q;
    for log_scale in [false, true] {
        let svg = render_panel_svg(&panel, &SvgOptions { log_scale, ..Default::default() });
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("class=\"essential\"").count(), 1);
    }
}

#[test]
fn sweeps_mark_inadmissible_entries() {
    let q = Potential::exponential(-1.0, 0.0, 1.0);
    let bc = BoundaryCondition::Dirichlet;
    let pi = std::f64::consts::PI;

    let t: toml::Table = toml::from_str("bound = \"cor2\"").unwrap();
    let grid = BTreeMap::from([("gamma".to_string(), vec![0.6, 0.75, 1.0, 1.5, 2.0, 3.0])]);
    let table = exponent_sweep(&q, bc, &t, &grid, pi).unwrap();
    assert!(table.rows.iter().all(|r| r.admissible && r.radius.unwrap().is_finite()));
    assert_eq!(table.rows.iter().filter(|r| r.minimal).count(), 1);

    let t: toml::Table = toml::from_str("bound = \"thm1\"").unwrap();
    let grid = BTreeMap::from([("r".to_string(), vec![1.0, 1.5, 2.0]), ("s".to_string(), vec![1.0, 2.0])]);
    let table = exponent_sweep(&q, bc, &t, &grid, pi).unwrap();
    assert!(table.rows.iter().all(|r| !r.admissible));

    let t: toml::Table = toml::from_str("bound = \"cor3\"\nr = 3.0").unwrap();
    let grid = BTreeMap::from([("tau".to_string(), vec![0.25, 0.5, 1.0, 2.0])]);
    let table = exponent_sweep(&q, bc, &t, &grid, pi).unwrap();
    for row in &table.rows {
        assert_eq!(row.admissible, row.params["tau"] * 3.0 > 1.0, "{row:?}");
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_halfline-spectra"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, FAMILY.replace("-4, -5, -6, -7, -8, -9, -10", "-4")).unwrap();
    let out = dir.path().join("out");
    let st = cli().args(["verify", "--config"]).arg(&good).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(out.join("records.csv").exists() && out.join("summary.json").exists());

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, FAMILY.replace("-4, -5, -6, -7, -8, -9, -10", "-4").replace("n_theta = 240", "n_theta = 240\nradius_scale = 0.01"))
        .unwrap();
    let st = cli().args(["verify", "--config"]).arg(&bad).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(1));

    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "[potential]\nkind = \"nonsense\"\n").unwrap();
    let st = cli().args(["verify", "--config"]).arg(&broken).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let g = cli().args(["gfun", "--a", "0,1"]).output().unwrap();
    assert!(g.status.success());
    assert!(String::from_utf8_lossy(&g.stdout).starts_with("a,g,maximizer_y\n0,1,inf"));
}
