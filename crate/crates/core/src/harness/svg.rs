//! Region boundaries and eigenvalues in the λ-plane as SVG.

use std::fmt::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::campaign::Panel;
use crate::enclosure::EnclosureRegion;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvgOptions {
    /// `ρ ↦ ln(1 + ρ/ρ₀)` radial scale instead of linear.
    pub log_scale: bool,
    /// Side length in pixels.
    pub size: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { log_scale: false, size: 640.0 }
    }
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

struct Frame {
    extent: f64,
    log: bool,
    rho0: f64,
    center: f64,
    scale: f64,
}

impl Frame {
    fn radial(&self, rho: f64) -> f64 {
        if self.log {
            self.extent * (1.0 + rho / self.rho0).ln() / (1.0 + self.extent / self.rho0).ln()
        } else {
            rho
        }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let rho = self.radial(z.norm().min(self.extent));
        let t = z.arg();
        (self.center + self.scale * rho * t.cos(), self.center - self.scale * rho * t.sin())
    }
}

fn region_points(region: &EnclosureRegion, f: &Frame) -> Vec<(f64, f64)> {
    if let Some(r) = region.negative_axis_radius {
        return vec![f.map(Complex64::new(0.0, 0.0)), f.map(Complex64::new(-r.min(f.extent), 0.0))];
    }
    region
        .thetas
        .iter()
        .zip(&region.radii)
        .map(|(&t, &r)| f.map(Complex64::from_polar(r.min(f.extent), t)))
        .collect()
}

/// Closed region curves (`<polygon>`), eigenvalue markers (`<circle>`) and
/// the essential spectrum as a ray along the positive axis.
pub fn render_panel_svg(panel: &Panel, opts: &SvgOptions) -> String {
    let largest = panel
        .regions
        .iter()
        .map(|r| r.max_finite_radius())
        .chain(panel.eigenvalues.iter().map(|e| e.lambda.norm()))
        .fold(0.0, f64::max);
    let extent = 1.2 * if largest > 0.0 { largest } else { 1.0 };
    let size = opts.size;
    let f = Frame { extent, log: opts.log_scale, rho0: 1e-3 * extent, center: size / 2.0, scale: 0.45 * size / extent };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    let _ = writeln!(s, r#"<title>{} {}</title>"#, panel.params, panel.bc);
    let (c, lo, hi) = (f.center, f.center - 0.45 * size, f.center + 0.45 * size);
    let _ = writeln!(s, r##"<line class="axis" x1="{lo}" y1="{c}" x2="{c}" y2="{c}" stroke="#999" stroke-width="1"/>"##);
    let _ = writeln!(s, r##"<line class="axis" x1="{c}" y1="{lo}" x2="{c}" y2="{hi}" stroke="#999" stroke-width="1"/>"##);
    let _ = writeln!(
        s,
        r##"<line class="essential" x1="{c}" y1="{c}" x2="{hi}" y2="{c}" stroke="black" stroke-width="3"/>"##
    );
    for (i, region) in panel.regions.iter().enumerate() {
        let pts: Vec<String> = region_points(region, &f).iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let _ = writeln!(
            s,
            r#"<polygon class="region" data-provenance="{}" points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            region.provenance,
            pts.join(" "),
            PALETTE[i % PALETTE.len()]
        );
    }
    for e in &panel.eigenvalues {
        let (x, y) = f.map(e.lambda);
        let _ = writeln!(
            s,
            r#"<circle class="eigenvalue" cx="{x:.3}" cy="{y:.3}" r="4" fill="black"><title>{} {:+}i</title></circle>"#,
            e.lambda.re, e.lambda.im
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="8" y="18" font-family="sans-serif" font-size="12">|λ| ≤ {:.4} ({} radial scale)</text>"#,
        extent,
        if opts.log_scale { "log" } else { "linear" }
    );
    s.push_str("</svg>\n");
    s
}
