//! Acceptance criteria 1-7, run in sequence so that wall-clock limits are
//! meaningful. Each criterion prints one PASS/FAIL line.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use halfline_spectra::eigensolver::{dense_fd_eigs, find_eigenvalues, Rect};
use halfline_spectra::enclosure::*;
use halfline_spectra::harness::report::summarize;
use halfline_spectra::harness::{run_campaign, Campaign, CampaignConfig, CampaignResult};
use halfline_spectra::potential::*;
use halfline_spectra::resolvent::*;
use halfline_spectra::specfun::g;

type Check = std::result::Result<String, String>;

struct Outcome {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: usize, title: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Check) -> Outcome {
    let start = Instant::now();
    let res = f();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match res {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(lim) = limit {
        if elapsed > lim {
            pass = false;
            detail = format!("{detail}; runtime {:.1}s exceeds {}s", elapsed.as_secs_f64(), lim.as_secs());
        }
    }
    let o = Outcome { id, title, pass, detail, elapsed };
    println!(
        "[{}] criterion {}: {} ({:.1}s) {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.id,
        o.title,
        o.elapsed.as_secs_f64(),
        o.detail
    );
    o
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn random_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> SpectralPoint {
    loop {
        let theta = rng.random_range(0.0..2.0 * PI);
        if theta > 0.0 {
            return SpectralPoint::from_polar(log_uniform(rng, lo, hi), theta).unwrap();
        }
    }
}

// ---------------------------------------------------------------------------
// 1. Kernel norms

fn kernel_norms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_slack = f64::INFINITY;
    let mut worst_rel = 0.0f64;
    for _ in 0..500 {
        let sp = random_point(&mut rng, 1e-2, 1e2);
        let alpha = rng.random_range(1.0..=8.0);
        let x = rng.random_range(0.0..=20.0);
        let rn = kernel_row_norm(x, &sp, alpha, BoundaryCondition::Dirichlet).map_err(|e| e.to_string())?;
        let slack = (rn.closed_form_bound - rn.quadrature).min(rn.global_bound - rn.closed_form_bound) / rn.global_bound;
        worst_slack = worst_slack.min(slack);
        ensure(slack >= -1e-9, || format!("λ = {}, α = {alpha}, x = {x}: slack {slack:e}", sp.lambda))?;
        let (q1, q2) = displayed_integrals_quadrature(x, &sp, alpha).map_err(|e| e.to_string())?;
        let (c1, c2) = displayed_integrals_closed(x, &sp, alpha).map_err(|e| e.to_string())?;
        let r = rel(q1, c1).max(rel(q2, c2));
        worst_rel = worst_rel.max(r);
        ensure(r <= 1e-6, || format!("λ = {}, α = {alpha}, x = {x}: displayed integrals differ by {r:e}", sp.lambda))?;
    }
    Ok(format!("500 samples, worst relative slack {worst_slack:.2e}, worst closed/quadrature gap {worst_rel:.2e}"))
}

// ---------------------------------------------------------------------------
// 2. g-function

fn brute_g(a: f64) -> f64 {
    let y_max = 40.0 + 10.0 * PI / a.abs();
    let n = 1_000_000;
    (0..=n)
        .map(|i| {
            let y = y_max * i as f64 / n as f64;
            (Complex64::from_polar(1.0, a * y) - (-y).exp()).norm()
        })
        .fold(1.0, f64::max)
}

/// Grid maximization of `2|μ||k(x, y)|` over `[0, 40]²` followed by local
/// zooms around the best cells.
fn brute_kernel_sup(sp: &SpectralPoint, bc: BoundaryCondition) -> f64 {
    let scale = 2.0 * sp.mu.norm();
    let f = |x: f64, y: f64| scale * kernel(x.max(0.0), y.max(0.0), sp, bc).norm();
    let n = 400;
    let h = 40.0 / n as f64;
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..=n {
        for j in 0..=n {
            let (x, y) = (i as f64 * h, j as f64 * h);
            cells.push((f(x, y), x, y));
        }
    }
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = cells[0].0;
    for &(_, x0, y0) in cells.iter().take(40) {
        let (mut cx, mut cy, mut w) = (x0, y0, h);
        for _ in 0..12 {
            let m = 10;
            let mut local = (f(cx, cy), cx, cy);
            for i in -m..=m {
                for j in -m..=m {
                    let (x, y) = (cx + w * i as f64 / m as f64, cy + w * j as f64 / m as f64);
                    if x >= 0.0 && y >= 0.0 {
                        let v = f(x, y);
                        if v > local.0 {
                            local = (v, x, y);
                        }
                    }
                }
            }
            cx = local.1;
            cy = local.2;
            best = best.max(local.0);
            w *= 0.25;
        }
    }
    best
}

fn g_suite() -> Check {
    let g0 = g(0.0).value;
    ensure((g0 - 1.0).abs() <= 1e-9, || format!("g(0) = {g0}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let a = rng.random_range(-50.0..50.0);
        let d = (g(a).value - g(-a).value).abs();
        ensure(d <= 1e-12, || format!("g({a}) - g(-a) = {d:e}"))?;
    }
    let mut worst_1d = 0.0f64;
    for a in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0] {
        let (v, b) = (g(a).value, brute_g(a));
        worst_1d = worst_1d.max((v - b).abs());
        ensure((v - b).abs() <= 1e-6, || format!("g({a}) = {v}, grid {b}"))?;
    }
    let mut worst_2d = 0.0f64;
    for k in 0..20 {
        let sp = random_point(&mut rng, 0.1, 10.0);
        let bc = if k % 2 == 0 { BoundaryCondition::Dirichlet } else { BoundaryCondition::Robin(rng.random_range(0.0..3.0)) };
        let v = 2.0 * sp.mu.norm() * row_norm_sup_extremal(&sp, bc).map_err(|e| e.to_string())?;
        let b = brute_kernel_sup(&sp, bc);
        worst_2d = worst_2d.max((v - b).abs());
        ensure((v - b).abs() <= 1e-4, || format!("λ = {}, {bc}: sup {v} vs grid {b}", sp.lambda))?;
    }
    Ok(format!("g(0) = {g0}, worst 1-D gap {worst_1d:.1e}, worst 2-D gap {worst_2d:.1e}"))
}

// ---------------------------------------------------------------------------
// 3. Formula consistency

fn exp_family() -> Vec<Potential> {
    [(-1.0, 0.0), (-3.0, PI / 6.0), (-5.0, PI / 4.0), (-10.0, PI / 2.0), (2.0, PI / 3.0)]
        .iter()
        .map(|&(c, phi)| Potential::exponential(c, phi, 1.0))
        .collect()
}

fn formula_consistency() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let err = |e: halfline_spectra::error::Error| e.to_string();
    let mut worst = [0.0f64; 5];

    for _ in 0..100 {
        let na = log_uniform(&mut rng, 1e-2, 1e2);
        let nb = log_uniform(&mut rng, 1e-2, 1e2);
        let r = rng.random_range(2.05..20.0);
        let p = rng.random_range(1.05..2.0f64.min(r));
        let theta = rng.random_range(0.01..2.0 * PI - 0.01);
        let c1 = bound_cor1(na, nb, p, r, theta).map_err(err)?;
        let t1 = bound_thm1(na, nb, &ExponentConfig::new(p, r, r).map_err(err)?, theta).map_err(err)?;
        worst[0] = worst[0].max(rel(c1, t1));
    }

    let family = exp_family();
    for i in 0..100 {
        let q = &family[i % family.len()];
        let gamma = rng.random_range(0.55..4.0);
        let theta = rng.random_range(0.01..2.0 * PI - 0.01);
        let r = 2.0 * gamma + 1.0;
        let f = factorize(q, Scheme::SqrtSplit);
        let (na, nb) = f.norms(r, r).map_err(err)?;
        let integral = power_integral(q, gamma + 0.5).map_err(err)?.0;
        let c2 = bound_cor2(integral, gamma, 2.0, theta).map_err(err)?;
        worst[1] = worst[1].max(rel(c2, bound_cor1(na.value, nb.value, 2.0, r, theta).map_err(err)?));
        worst[2] = worst[2].max(rel(bound_cor2(integral, gamma, 2.0, PI).map_err(err)?, bound_rem1(integral, gamma).map_err(err)?));

        let tau = rng.random_range(0.2..0.9);
        let rc = rng.random_range(2.05f64.max(1.0 / tau + 0.05)..12.0);
        let fw = factorize(q, Scheme::PowerWeight(tau));
        let (wa, wb) = fw.norms(rc, rc).map_err(err)?;
        let iw = power_integral(&fw.b, rc).map_err(err)?.0;
        let c3 = bound_cor3(iw, rc, tau, 2.0, theta).map_err(err)?;
        worst[3] = worst[3].max(rel(c3, bound_cor1(wa.value, wb.value, 2.0, rc, theta).map_err(err)?));

        let fe = factorize(q, Scheme::ExpWeight(tau));
        let (ea, eb) = fe.norms(rc, rc).map_err(err)?;
        let ie = power_integral(&fe.b, rc).map_err(err)?.0;
        let c4 = bound_cor4(ie, rc, tau, 2.0, theta).map_err(err)?;
        worst[3] = worst[3].max(rel(c4, bound_cor1(ea.value, eb.value, 2.0, rc, theta).map_err(err)?));
    }

    for _ in 0..100 {
        let alpha = rng.random_range(1.0..50.0);
        let t = rng.random_range(0.01..0.99);
        let (beta, gamma) = interpolation_exponents(alpha, t).map_err(err)?;
        worst[4] = worst[4].max((1.0 / alpha + 1.0 / beta - 1.0 / gamma - 1.0).abs());
    }

    let limits = [1e-12, 1e-12, 1e-14, 1e-12, 1e-14];
    let names = ["cor1/thm1", "cor2/cor1", "cor2(π)/rem1", "cor3,cor4/cor1", "interpolation"];
    let report: Vec<String> = names.iter().zip(&worst).map(|(n, w)| format!("{n} {w:.1e}")).collect();
    for ((n, w), lim) in names.iter().zip(&worst).zip(&limits) {
        ensure(w < lim, || format!("{n}: {w:e} exceeds {lim:e}; {}", report.join(", ")))?;
    }
    Ok(report.join(", "))
}

// ---------------------------------------------------------------------------
// 4. Solver validation

fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) * flo <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn solver_validation() -> Check {
    let err = |e: halfline_spectra::error::Error| e.to_string();
    // q = -V0 on [0, a]: k cot(ka) = -κ with k² + κ² = V0.
    let (v0, a) = (2.0f64, 2.0f64);
    let kappa = bisect(
        |kappa| {
            let k = (v0 - kappa * kappa).sqrt();
            k * (k * a).cos() + kappa * (k * a).sin()
        },
        1e-9,
        v0.sqrt() - 1e-12,
        1e-12,
    );
    let exact = -kappa * kappa;
    let well = Potential::square_well(v0, 0.0, a);
    let found = find_eigenvalues(&well, &Rect::new(-3.0, 3.0, -3.0, 3.0), BoundaryCondition::Dirichlet, 10).map_err(err)?;
    ensure(found.eigenvalues.len() == 1, || format!("square well: {} eigenvalues", found.eigenvalues.len()))?;
    let well_err = (found.eigenvalues[0].lambda - exact).norm();
    ensure(well_err <= 1e-8, || format!("square well {} vs {exact}", found.eigenvalues[0].lambda))?;

    let mut worst = 0.0f64;
    let mut matched = 0;
    let mut long_matched = Vec::new();
    let names = ["exp_complex", "exp_complex_b", "exp_complex_c", "exp_imaginary", "exp_sum_complex"];
    let cat = catalog();
    for name in names {
        let q = &cat.iter().find(|(n, _)| *n == name).unwrap().1;
        let m = q.max_abs() + 1.0;
        let b = Rect::new(-m, m, -m, m);
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Robin(1.0)] {
            let shoot = find_eigenvalues(q, &b, bc, 64).map_err(err)?;
            let fd: Vec<Complex64> = dense_fd_eigs(q, 40.0, 4096, bc).map_err(err)?.into_iter().filter(|z| b.contains(*z)).collect();
            ensure(!fd.is_empty(), || format!("{name} {bc}: no FD eigenvalues"))?;
            let dist = |z: Complex64, set: &mut dyn Iterator<Item = Complex64>| set.map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            for &z in &fd {
                let d = dist(z, &mut shoot.eigenvalues.iter().map(|e| e.lambda));
                worst = worst.max(d);
                ensure(d <= 1e-5, || format!("{name} {bc}: FD {z} is {d:e} from shooting"))?;
                matched += 1;
            }
            // Slowly decaying modes are rejected by the L = 40 truncation
            // check; they must reappear on a longer interval.
            let missing: Vec<Complex64> =
                shoot.eigenvalues.iter().map(|e| e.lambda).filter(|&z| dist(z, &mut fd.iter().copied()) > 1e-5).collect();
            if !missing.is_empty() {
                let long = dense_fd_eigs(q, 80.0, 8192, bc).map_err(err)?;
                for z in missing {
                    let d = dist(z, &mut long.iter().copied());
                    ensure(d <= 1e-5, || format!("{name} {bc}: shooting {z} has no FD match even at L = 80 ({d:e})"))?;
                    long_matched.push(format!("{name} {bc} {z:.4}"));
                }
            }
        }
    }

    let mut worst_im = 0.0f64;
    for name in ["exp_real", "square_well", "power_decay"] {
        let q = &cat.iter().find(|(n, _)| *n == name).unwrap().1;
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::neumann(), BoundaryCondition::Robin(1.0)] {
            let r = find_eigenvalues(q, &Rect::new(-3.0, 3.0, -3.0, 3.0), bc, 64).map_err(err)?;
            for e in r.eigenvalues {
                worst_im = worst_im.max(e.lambda.im.abs());
                ensure(e.lambda.im.abs() < 1e-9, || format!("{name} {bc}: {}", e.lambda))?;
            }
        }
    }
    Ok(format!(
        "square well error {well_err:.1e}; {matched} FD eigenvalues matched, worst {worst:.1e}; \
         matched only at L = 80: [{}]; self-adjoint max |Im| {worst_im:.1e}",
        long_matched.join(", ")
    ))
}

// ---------------------------------------------------------------------------
// 5. Containment campaign (and the Cor 5 part of 7)

const DIRICHLET_FAMILY: &str = r#"
[potential]
kind = "exponential"
c = [-1, -2, -3, -4, -5, -6, -7, -8, -9, -10]
phi = [0.0, 0.5235987755982988, 0.7853981633974483, 1.5707963267948966]
kappa = 1.0

[[bounds]]
bound = "thm2"
p = 2.0

[[bounds]]
bound = "cor2"
gamma = [0.75, 1.0, 1.5, 2.0]

[[bounds]]
bound = "cor5"
gamma = [0.75, 1.0, 1.5, 2.0]
c = 1.0

[solver]
bc = "dirichlet"
"#;

const ROBIN_FAMILY: &str = r#"
[potential]
kind = "exponential"
c = [-1, -2, -3, -4, -5, -6, -7, -8, -9, -10]
phi = [0.0, 0.5235987755982988, 0.7853981633974483, 1.5707963267948966]
kappa = 1.0

[[bounds]]
bound = "thm3_neg"
r = [4.0, 3.0]
s = 4.0

[[bounds]]
bound = "thm4"

[solver]
bc = [0.0, 1.0]
"#;

fn campaign(doc: &str) -> std::result::Result<(Campaign, CampaignResult), String> {
    let cfg = CampaignConfig::from_toml_str(doc).map_err(|e| e.to_string())?;
    let c = Campaign::from_config(&cfg, Path::new(".")).map_err(|e| e.to_string())?;
    let r = run_campaign(&c, 1).map_err(|e| e.to_string())?;
    Ok((c, r))
}

fn check_records(r: &CampaignResult, keep: &[Provenance]) -> Check {
    let mut counted = 0;
    let mut eigenvalues = 0;
    for p in &r.panels {
        eigenvalues += p.eigenvalues.len();
    }
    for rec in r.records.iter().filter(|x| keep.contains(&x.provenance)) {
        ensure(!rec.is_skipped(), || format!("{} {} {}: skipped: {:?}", rec.params, rec.bc, rec.provenance, rec.skipped))?;
        ensure(rec.pass, || {
            format!("{} {} {} [{}]: λ = {:?} outside, margin {:?}", rec.params, rec.bc, rec.provenance, rec.bound_params, rec.lambda(), rec.margin)
        })?;
        counted += 1;
    }
    ensure(eigenvalues > 0, || "no eigenvalues found".into())?;
    Ok(format!("{eigenvalues} eigenvalues, {counted} containment records"))
}

fn containment(dirichlet: &CampaignResult, robin: &CampaignResult) -> Check {
    let d = check_records(dirichlet, &[Provenance::Thm2, Provenance::Cor2])?;
    let r = check_records(robin, &[Provenance::Thm3Neg, Provenance::Thm4])?;
    let inadmissible = dirichlet.inadmissible.len() + robin.inadmissible.len();
    Ok(format!("Dirichlet: {d}; Robin: {r}; {inadmissible} inadmissible selectors"))
}

// ---------------------------------------------------------------------------
// 6. Bordered-resolvent probe

fn probe() -> Check {
    let err = |e: halfline_spectra::error::Error| e.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cat = catalog();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let (name, q) = &cat[i % cat.len()];
        let sp = random_point(&mut rng, 0.1, 10.0);
        let p: f64 = rng.random_range(1.2..4.0);
        let s = rng.random_range(p..3.0 * p);
        let r = conjugate(p).max(conjugate(s)) * rng.random_range(1.05..3.0);
        let alpha = alpha_exponent(r, s).map_err(err)?.finite().ok_or("extremal exponents drawn")?;
        let f = factorize(q, Scheme::SqrtSplit);
        let (na, nb) = (lebesgue_norm(&f.a, r).map_err(err)?.value, lebesgue_norm(&f.b, s).map_err(err)?.value);
        let bound = row_norm_global_bound(&sp, alpha).map_err(err)? * na * nb;
        let v = bordered_resolvent_norm_probe(&f, &sp, p, 64).map_err(err)?;
        worst = worst.max(v / bound);
        ensure(v <= bound * (1.0 + 1e-6), || format!("{name}, λ = {}, p = {p}, r = {r}, s = {s}: {v} > {bound}", sp.lambda))?;
    }
    Ok(format!("50 configurations, largest probe/bound ratio {worst:.4}"))
}

// ---------------------------------------------------------------------------
// 7. Weak and Lorentz norms

fn weak_suite(dirichlet: &CampaignResult, campaign: &Campaign) -> Check {
    let err = |e: halfline_spectra::error::Error| e.to_string();
    let ind = Potential::square_well(-1.5, 0.0, 2.0);
    let pw = Potential::power_decay(1.0, 0.0, 2.0);
    let ex = Potential::exponential(3.0, 0.4, 1.5);
    let weak_cases: [(&Potential, f64, f64); 6] = [
        (&ind, 3.0, 1.5 * 2f64.powf(1.0 / 3.0)),
        (&ind, 0.5, 1.5 * 4.0),
        (&pw, 0.5, 1.0),
        // rρ > 1: sup at (c/t)^{1/ρ} = rρ/(rρ-1)
        (&pw, 1.0, 0.25),
        (&pw, 3.0, ((6f64 / 5.0).powf(-6.0) / 5.0).powf(1.0 / 3.0)),
        (&ex, 2.0, 3.0 * (std::f64::consts::E * 2.0 * 1.5).powf(-0.5)),
    ];
    let mut worst = 0.0f64;
    for (f, r, want) in weak_cases {
        let got = weak_norm(f, r).map_err(err)?.value;
        worst = worst.max(rel(got, want));
        ensure(rel(got, want) <= 1e-8, || format!("weak r = {r}: {got} vs {want}"))?;
    }
    // c e^{-κx}: ‖f‖_{p,r}^r = r c^r κ^{-r/p} Γ(r/p + 1) / r^{r/p + 1}
    let lorentz_cases: [(&Potential, f64, f64, f64); 4] = [
        (&ind, 2.0, 1.0, 1.5 * 2f64.sqrt()),
        (&ind, 3.0, 5.0, 1.5 * 2f64.powf(1.0 / 3.0)),
        (&ex, 1.0, 2.0, 3.0 / (2f64.sqrt() * 1.5)),
        (&ex, 1.0, 3.0, (3.0 * 27.0 * 1.5f64.powi(-3) * 6.0 / 81.0f64).powf(1.0 / 3.0)),
    ];
    for (f, p, r, want) in lorentz_cases {
        let got = lorentz_norm(f, p, r).map_err(err)?.value;
        worst = worst.max(rel(got, want));
        ensure(rel(got, want) <= 1e-8, || format!("Lorentz ({p}, {r}): {got} vs {want}"))?;
    }

    let mut worst_lr = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for (name, q) in catalog() {
        for r in [1.0, 2.0, 3.5] {
            let strong = lebesgue_norm(&q, r).map_err(err)?.value;
            let lorentz = lorentz_norm(&q, r, r).map_err(err)?.value;
            let weak = weak_norm(&q, r).map_err(err)?.value;
            worst_lr = worst_lr.max(rel(strong, lorentz));
            worst_ratio = worst_ratio.max(weak / strong);
            ensure(rel(strong, lorentz) <= 1e-6, || format!("{name} r = {r}: L_r {strong} vs L_rr {lorentz}"))?;
            ensure(weak <= strong * (1.0 + 1e-12), || format!("{name} r = {r}: weak {weak} > strong {strong}"))?;
        }
    }

    // Corollary 5: C reported, containment checked with the estimated C.
    let summary = summarize(dirichlet);
    let cor5: Vec<_> = dirichlet.records.iter().filter(|x| x.provenance == Provenance::Cor5 && !x.is_skipped()).collect();
    ensure(!cor5.is_empty(), || "no Cor 5 records".into())?;
    let at_one = cor5.iter().filter(|x| x.pass).count();
    let c_emp = summary.empirical_c.get(&Provenance::Cor5).copied().ok_or("no empirical C")?;
    let thetas = campaign.thetas();
    let mut checked = 0;
    for (panel, point) in dirichlet.panels.iter().zip(&campaign.potentials) {
        ensure(panel.params == point.label(), || "panel order".into())?;
        let q = point.config.build(Path::new(".")).map_err(err)?;
        for gamma in [0.75, 1.0, 1.5, 2.0] {
            let bound = BoundSpec::Cor5 { p: 2.0, gamma, c: c_emp }.resolve(&q, panel.bc).map_err(err)?;
            let region = enclosure_region(&bound, &thetas).map_err(err)?;
            for e in &panel.eigenvalues {
                ensure(contains_with_tol(&region, e.lambda).map_err(err)?, || {
                    format!("{} γ = {gamma}: {} outside with C = {c_emp}", panel.params, e.lambda)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "closed forms worst {worst:.1e}; L_rr vs L_r worst {worst_lr:.1e}; max weak/strong {worst_ratio:.3}; \
         Cor 5 empirical C = {c_emp:.4} ({at_one}/{} contained at C = 1, {checked} contained at estimated C)",
        cor5.len()
    ))
}

#[test]
fn acceptance_criteria() {
    println!();
    let secs = Duration::from_secs;
    let mut out = Vec::new();
    out.push(run(1, "kernel-norm suite", Some(secs(30)), kernel_norms));
    out.push(run(2, "g-function suite", Some(secs(60)), g_suite));
    out.push(run(3, "formula consistency", None, formula_consistency));
    out.push(run(4, "solver validation", Some(secs(300)), solver_validation));

    let start = Instant::now();
    let dirichlet = campaign(DIRICHLET_FAMILY);
    let robin = campaign(ROBIN_FAMILY);
    let campaign_time = start.elapsed();
    out.push(run(5, "containment campaign", None, || {
        let (_, d) = dirichlet.as_ref().map_err(Clone::clone)?;
        let (_, r) = robin.as_ref().map_err(Clone::clone)?;
        let detail = containment(d, r)?;
        ensure(campaign_time <= secs(600), || format!("{detail}; campaigns took {:.1}s", campaign_time.as_secs_f64()))?;
        Ok(format!("{detail}; campaigns took {:.1}s", campaign_time.as_secs_f64()))
    }));
    out.push(run(6, "bordered-resolvent probe", None, probe));
    out.push(run(7, "weak-norm suite", None, || {
        let (c, d) = dirichlet.as_ref().map_err(Clone::clone)?;
        weak_suite(d, c)
    }));

    let failed: Vec<usize> = out.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!("acceptance: {}/{} criteria passed", out.len() - failed.len(), out.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
