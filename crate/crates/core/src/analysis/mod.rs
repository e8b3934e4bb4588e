//! Lyapunov exponents `Lambda_mu(P) = -int log|P'| dmu` by every available
//! route: closed-form degenerate limits, Monte Carlo and exact-tree averages,
//! the branch fixed-point oracle and the second-order expansion on the circle.

mod closed_form;
mod compare;
mod derivatives;
mod estimate;
mod expansion;
mod pressure;

use serde::{Deserialize, Serialize};

pub use closed_form::{closed_form_complex, closed_form_real};
pub use compare::{comparison_report, ComparisonReport, ComparisonRow, McParams};
pub use derivatives::{
    derivative_report, real_formula_report, verify_real_formula, DerivativeReport, RealFormulaReport, DEFAULT_STEP,
};
pub use estimate::{check_connected, fixed_point_exponent, lyapunov_mc, lyapunov_of_measure, lyapunov_tree};
pub use expansion::{expansion_terms, ExpansionFamily, ExpansionReport, ExpansionRow};
pub use pressure::{pressure_scan, simplex_grid, PressureCell, PressureScanResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedFormReal,
    ClosedFormComplex,
    MonteCarlo,
    Tree,
    FixedPointOracle,
    Expansion,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub value: f64,
    /// Zero for every method except Monte Carlo.
    pub stderr: f64,
    pub n: usize,
    pub method: Method,
}

impl LyapunovEstimate {
    pub(crate) fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            stderr: 0.0,
            n: 1,
            method,
        }
    }
}
