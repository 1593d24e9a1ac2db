//! Verification campaigns, exponent sweeps and reports.

pub mod campaign;
pub mod config;
pub mod report;
pub mod svg;
pub mod sweep;

pub use campaign::{run_campaign, Campaign, CampaignResult, Panel, VerificationRecord};
pub use config::{CampaignConfig, OutputConfig, SolverConfig};
pub use report::{render_report, Format, Summary};
pub use sweep::{exponent_sweep, SweepRow, SweepTable};
