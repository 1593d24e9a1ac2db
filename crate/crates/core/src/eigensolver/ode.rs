//! Dormand–Prince 5(4) integrator for the complex first-order system
//! `(u, u')' = (u', (q - λ) u)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type State = [Complex64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*, the embedded error weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 2_000_000;

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += k[0] * (h * c);
        out[1] += k[1] * (h * c);
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction) with
/// relative tolerance `rtol`. `rescale` runs after every accepted step and
/// may renormalize the state.
pub fn integrate<F, R>(f: F, x0: f64, x1: f64, y0: State, rtol: f64, h_init: f64, mut rescale: R) -> Result<(State, Stats)>
where
    F: Fn(f64, &State) -> State,
    R: FnMut(&mut State),
{
    let span = x1 - x0;
    let mut stats = Stats::default();
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = span.signum();
    let mut h = h_init.abs().min(span.abs()).max(1e-12 * span.abs()) * dir;
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let atol = 1e-300;
    while (x1 - x) * dir > 0.0 {
        if stats.accepted + stats.rejected > MAX_STEPS {
            return Err(Error::Integration(format!("step budget exhausted at x = {x}")));
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(x + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(x + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(x + h, &y_new);
        let mut err = [Complex64::new(0.0, 0.0); 2];
        for i in 0..2 {
            err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        }
        let scale = atol + rtol * norm(&y).max(norm(&y_new));
        let e = norm(&err) / scale;
        if !e.is_finite() {
            h *= 0.25;
            stats.rejected += 1;
            if h.abs() < 1e-14 * span.abs() {
                return Err(Error::Integration(format!("non-finite state near x = {x}")));
            }
            continue;
        }
        if e <= 1.0 {
            x += h;
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            let before = y;
            rescale(&mut y);
            if before != y {
                k1 = f(x, &y);
            }
            let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
            if h.abs() < 1e-14 * span.abs().max(x.abs()) {
                return Err(Error::Integration(format!("step size underflow near x = {x}")));
            }
        }
    }
    Ok((y, stats))
}

fn norm(y: &State) -> f64 {
    y[0].norm().max(y[1].norm())
}
