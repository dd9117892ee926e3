//! Deterministic reproductions of the ridge double-descent risk curves and
//! the lattice MDL curve.
//!
//! [`kfold_curve`] fits ridge regression over an `(n, α, d)` grid with
//! K-fold cross-validation. Data for each `n` come from one master design
//! matrix whose first `d` columns are used at dimension `d`, so curves vary
//! smoothly in `d`. [`mdl_lattice_curve`] scores Boolean lattice models of
//! growing size with the lattice volume upper bound.

mod config;
mod mdl;
mod output;
mod ridge;
mod risk;

pub use config::{ExperimentConfig, DESK_D_GRID};
pub use mdl::{mdl_lattice_curve, mdl_score, MdlCase, MdlCurve, MdlCurveConfig, MdlPoint};
pub use output::{
    emit_results, format_float, read_risk_csv, risk_chart, write_csv, write_risk_csv, write_svg,
    LineChart, OutputFormat, Series, RISK_COLUMNS,
};
pub use ridge::{generate_dataset, ridge_fit, ridge_fit_dual, ridge_fit_primal, Dataset};
pub use risk::{fold_partition, kfold_curve, RiskCurve, RiskRecord};
