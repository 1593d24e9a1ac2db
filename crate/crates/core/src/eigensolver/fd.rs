//! Dense finite-difference eigenvalues: an oracle independent of shooting.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quad::gauss_legendre;
use crate::resolvent::BoundaryCondition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdOptions {
    /// Minimum distance from `[0, ∞)`.
    pub margin: f64,
    /// Maximum modulus.
    pub cap: f64,
    /// Extrapolate with the grid of half the step.
    pub richardson: bool,
    /// Keep only eigenvalues that survive doubling `L` at fixed step.
    pub l_doubling: bool,
    /// Relative tolerance for matching eigenvalues across grids.
    pub match_tol: f64,
    /// Richardson correction below which a value is flagged converged.
    pub converged_tol: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { margin: 1e-3, cap: 1e3, richardson: true, l_doubling: true, match_tol: 1e-5, converged_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEigenvalue {
    pub lambda: Complex64,
    /// Value on the base grid before extrapolation.
    pub base: Complex64,
    /// `|λ_{h/2} - λ_h|`, zero when extrapolation is off.
    pub richardson_delta: f64,
    pub converged: bool,
}

/// Grid step and node positions for `n` unknowns.
fn grid(l: f64, n: usize, bc: BoundaryCondition) -> (f64, Vec<f64>) {
    match bc {
        BoundaryCondition::Dirichlet => {
            let h = l / (n + 1) as f64;
            (h, (1..=n).map(|j| j as f64 * h).collect())
        }
        BoundaryCondition::Robin(_) => {
            let h = l / n as f64;
            (h, (0..n).map(|j| j as f64 * h).collect())
        }
    }
}

fn cell_average(q: &Potential, a: f64, b: f64, breaks: &[f64], nodes: &[(f64, f64)]) -> Complex64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&t| t > a && t < b));
    pts.push(b);
    let mut sum = Complex64::new(0.0, 0.0);
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for &(t, wt) in nodes {
            sum += q.value(mid + half * t) * (wt * half);
        }
    }
    sum / (b - a)
}

/// Symmetric tridiagonal FD matrix `(diagonal, off-diagonal)` for
/// `-u'' + q u` on `[0, L]` with `u(L) = 0`.
///
/// The Robin row uses a ghost node `u_{-1} = u_1 - 2hσu_0`; scaling `u_0`
/// by `1/√2` makes the matrix complex symmetric.
pub fn fd_matrix(q: &Potential, l: f64, n: usize, bc: BoundaryCondition) -> (Vec<Complex64>, Vec<Complex64>) {
    let (h, xs) = grid(l, n, bc);
    let h2 = h * h;
    let breaks = q.breakpoints();
    let (gx, gw) = gauss_legendre(4);
    let nodes: Vec<(f64, f64)> = gx.into_iter().zip(gw).collect();
    let mut diag: Vec<Complex64> = xs
        .iter()
        .map(|&x| {
            let a = (x - 0.5 * h).max(0.0);
            let b = (x + 0.5 * h).min(l);
            Complex64::new(2.0 / h2, 0.0) + cell_average(q, a, b, &breaks, &nodes)
        })
        .collect();
    let mut off = vec![Complex64::new(-1.0 / h2, 0.0); n.saturating_sub(1)];
    if let BoundaryCondition::Robin(sigma) = bc {
        diag[0] = Complex64::new((2.0 + 2.0 * h * sigma) / h2, 0.0) + q.value(0.0);
        if !off.is_empty() {
            off[0] = Complex64::new(-std::f64::consts::SQRT_2 / h2, 0.0);
        }
    }
    (diag, off)
}

/// Eigenvalues of a complex symmetric tridiagonal matrix by implicit QL
/// with Wilkinson-type shifts.
pub fn tridiagonal_eigenvalues(diag: &[Complex64], off: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.resize(n, zero);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].norm() + d[m + 1].norm();
                if e[m].norm() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                return Err(Error::Convergence(format!("QL iteration stalled at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + one).sqrt();
            let r_sel = if (g + r).norm() >= (g - r).norm() { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + r_sel);
            let (mut s, mut c, mut p) = (one, one, zero);
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r.norm() == 0.0 {
                    d[i + 1] -= p;
                    e[m] = zero;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = zero;
        }
    }
    if d.iter().any(|z| !z.is_finite()) {
        return Err(Error::Convergence("non-finite eigenvalue from QL iteration".into()));
    }
    Ok(d)
}

/// Full unfiltered FD spectrum.
pub fn fd_spectrum(q: &Potential, l: f64, n: usize, bc: BoundaryCondition) -> Result<Vec<Complex64>> {
    let (d, e) = fd_matrix(q, l, n, bc);
    tridiagonal_eigenvalues(&d, &e)
}

fn dist_to_cut(z: Complex64) -> f64 {
    if z.re >= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

/// Newton iteration on `det(T - z)` through the ratio form of the
/// three-term recurrence; converges to the eigenvalue of `T` nearest a
/// good starting guess.
pub fn det_newton(diag: &[Complex64], off: &[Complex64], z0: Complex64) -> Option<Complex64> {
    let e2: Vec<Complex64> = off.iter().map(|e| e * e).collect();
    let tiny = Complex64::new(f64::MIN_POSITIVE.sqrt(), 0.0);
    let mut z = z0;
    for _ in 0..60 {
        // r_k = p_k / p_{k-1}, dr_k = d r_k / dz; p'/p = Σ dr_k / r_k
        let mut r = diag[0] - z;
        let mut dr = Complex64::new(-1.0, 0.0);
        if r.norm() == 0.0 {
            r = tiny;
        }
        let mut logder = dr / r;
        for k in 1..diag.len() {
            let ratio = e2[k - 1] / r;
            let r_new = diag[k] - z - ratio;
            dr = Complex64::new(-1.0, 0.0) + ratio * dr / r;
            r = if r_new.norm() == 0.0 { tiny } else { r_new };
            logder += dr / r;
        }
        let step = 1.0 / logder;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        // the recurrence carries roundoff of order 1e-12 relative to 4/h²
        if step.norm() <= 1e-10 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// Filtered and extrapolated FD eigenvalues with diagnostics.
pub fn dense_fd_eigs_with(
    q: &Potential,
    l: f64,
    n: usize,
    bc: BoundaryCondition,
    opts: &FdOptions,
) -> Result<Vec<FdEigenvalue>> {
    if n < 64 {
        return Err(Error::Config(format!("need at least 64 grid points, got {n}")));
    }
    let keep = |z: &Complex64| dist_to_cut(*z) > opts.margin && z.norm() < opts.cap;
    let base: Vec<Complex64> = fd_spectrum(q, l, n, bc)?.into_iter().filter(keep).collect();
    // same step on [0, 2L], and half the step on [0, L]
    let n_fine = match bc {
        BoundaryCondition::Dirichlet => 2 * n + 1,
        BoundaryCondition::Robin(_) => 2 * n,
    };
    let long = if opts.l_doubling && !base.is_empty() { Some(fd_matrix(q, 2.0 * l, n_fine, bc)) } else { None };
    let fine = if opts.richardson && !base.is_empty() { Some(fd_matrix(q, l, n_fine, bc)) } else { None };
    let mut out = Vec::new();
    for &z in &base {
        let tol = opts.match_tol * (1.0 + z.norm());
        if let Some((d, e)) = &long {
            match det_newton(d, e, z) {
                Some(w) if (w - z).norm() <= tol => {}
                _ => {
                    log::debug!("fd: dropping {z} (moves under L-doubling)");
                    continue;
                }
            }
        }
        let mut ev = FdEigenvalue { lambda: z, base: z, richardson_delta: 0.0, converged: !opts.richardson };
        if let Some((d, e)) = &fine {
            if let Some(w) = det_newton(d, e, z) {
                let delta = (w - z).norm();
                if delta <= 1e3 * tol {
                    ev.lambda = (4.0 * w - z) / 3.0;
                    ev.richardson_delta = delta;
                    ev.converged = (ev.lambda - w).norm() <= opts.converged_tol * (1.0 + z.norm());
                }
            }
        }
        out.push(ev);
    }
    out.sort_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()));
    Ok(out)
}

/// Eigenvalues of the FD discretization on `[0, L]` away from `[0, ∞)`.
pub fn dense_fd_eigs(q: &Potential, l: f64, n: usize, bc: BoundaryCondition) -> Result<Vec<Complex64>> {
    Ok(dense_fd_eigs_with(q, l, n, bc, &FdOptions::default())?.into_iter().map(|e| e.lambda).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_dirichlet_spectrum_is_exact() {
        let (l, n) = (10.0, 100);
        let mut ev: Vec<f64> = fd_spectrum(&Potential::zero(), l, n, BoundaryCondition::Dirichlet)
            .unwrap()
            .into_iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-9);
                z.re
            })
            .collect();
        ev.sort_by(f64::total_cmp);
        let h = l / (n + 1) as f64;
        for (k, v) in ev.iter().enumerate() {
            let s = ((k + 1) as f64 * std::f64::consts::PI * h / (2.0 * l)).sin();
            let exact = 4.0 / (h * h) * s * s;
            assert!((v - exact).abs() < 1e-9 * exact.max(1.0), "{v} vs {exact}");
        }
        assert!(dense_fd_eigs(&Potential::zero(), l, n, BoundaryCondition::Dirichlet).unwrap().is_empty());
    }

    #[test]
    fn ql_matches_characteristic_polynomial() {
        // eigenvalues must annihilate det(T - z) computed by the three-term recurrence
        let d: Vec<Complex64> = (0..12).map(|k| Complex64::new(k as f64 * 0.3 - 1.0, 0.2 * (k % 3) as f64)).collect();
        let e: Vec<Complex64> = (0..11).map(|k| Complex64::new(0.5, -0.1 * k as f64)).collect();
        let ev = tridiagonal_eigenvalues(&d, &e).unwrap();
        for &z in &ev {
            let (mut p0, mut p1) = (Complex64::new(1.0, 0.0), d[0] - z);
            for k in 1..d.len() {
                let p2 = (d[k] - z) * p1 - e[k - 1] * e[k - 1] * p0;
                p0 = p1;
                p1 = p2;
            }
            // compare with the scale of the polynomial near z
            let scale: f64 = d.iter().map(|dk| (dk - z).norm() + 1.0).product();
            assert!(p1.norm() < 1e-10 * scale, "{z}: {}", p1.norm());
        }
        let tr: Complex64 = d.iter().sum();
        let sum: Complex64 = ev.iter().sum();
        assert!((tr - sum).norm() < 1e-10);
    }

    #[test]
    fn robin_row_is_symmetric_ghost_stencil() {
        let (d, e) = fd_matrix(&Potential::zero(), 4.0, 64, BoundaryCondition::Robin(1.0));
        let h = 4.0 / 64.0;
        assert!((d[0].re - (2.0 + 2.0 * h) / (h * h)).abs() < 1e-9);
        assert!((e[0].re + std::f64::consts::SQRT_2 / (h * h)).abs() < 1e-9);
    }

    #[test]
    fn neumann_free_spectrum_matches_cosine_modes() {
        // σ = 0 with u(L) = 0: exact FD modes are cos((k+1/2)πx/L) sampled
        let (l, n) = (5.0, 80);
        let mut ev: Vec<f64> =
            fd_spectrum(&Potential::zero(), l, n, BoundaryCondition::neumann()).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        let h = l / n as f64;
        for (k, v) in ev.iter().enumerate() {
            let s = ((k as f64 + 0.5) * std::f64::consts::PI * h / (2.0 * l)).sin();
            let exact = 4.0 / (h * h) * s * s;
            assert!((v - exact).abs() < 1e-8 * exact.max(1.0));
        }
    }
}
