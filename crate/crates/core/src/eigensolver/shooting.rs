//! Jost-normalized characteristic function by backward shooting.

use num_complex::Complex64;

use super::ode::{self, State};
use crate::error::Result;
use crate::potential::{Potential, Tail};
use crate::resolvent::{spectral_point, BoundaryCondition};

/// Default relative tolerance for root refinement.
pub const SHOOT_RTOL: f64 = 1e-11;

/// `F(λ)` with the default tolerance; see [`characteristic`].
pub fn shoot_characteristic(q: &Potential, lambda: Complex64, l: f64, bc: BoundaryCondition) -> Result<Complex64> {
    characteristic(q, lambda, l, bc, SHOOT_RTOL)
}

/// Integrates `u'' = (q - λ) u` from `x = L` down to 0, starting from
/// `u(L) = e^{iμL}`, `u'(L) = iμ e^{iμL}`, and returns `u(0)` (Dirichlet)
/// or `u'(0) - σ u(0)` (Robin).
///
/// When `q` vanishes identically beyond some `X < L` the solution is
/// `e^{iμx}` on `[X, L]` and integration starts at `X`.
pub fn characteristic(q: &Potential, lambda: Complex64, l: f64, bc: BoundaryCondition, rtol: f64) -> Result<Complex64> {
    let sp = spectral_point(lambda)?;
    let i_mu = Complex64::i() * sp.mu;
    let start = match q.tail() {
        Tail::Compact(w) => w.min(l),
        _ => l,
    };
    // state carries u / e^{scale}
    let mut log_scale = i_mu * start;
    let mut y: State = [Complex64::new(1.0, 0.0), i_mu];
    let rhs = |x: f64, y: &State| [y[1], (q.value(x) - lambda) * y[0]];

    let mut knots: Vec<f64> = q.breakpoints().into_iter().filter(|&b| b > 0.0 && b < start).collect();
    knots.push(0.0);
    knots.sort_by(|a, b| b.total_cmp(a));
    knots.dedup();
    let mut x = start;
    let h0 = 0.1 / (1.0 + sp.mu.norm());
    for &x_next in &knots {
        let (y_end, _) = ode::integrate(rhs, x, x_next, y, rtol, h0, |s: &mut State| {
            let m = s[0].norm().max(s[1].norm());
            if m > 1e100 {
                s[0] /= m;
                s[1] /= m;
                log_scale += m.ln();
            }
        })?;
        y = y_end;
        x = x_next;
    }
    let value = match bc {
        BoundaryCondition::Dirichlet => y[0],
        BoundaryCondition::Robin(sigma) => y[1] - sigma * y[0],
    };
    Ok(value * log_scale.exp())
}
