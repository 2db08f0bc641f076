pub mod error;
pub mod focal;
pub mod lambert;
pub mod real;
pub mod roots;

pub use error::{FocalError, Result};
pub use focal::{
    focal_d1_inverse, focal_loss, focal_loss_d1, focal_loss_d2, kappa, kappa_zero, phi, phi_peak,
    FocusParam, PhiPeak, Prob,
};
pub use lambert::{lambert_w0, lambert_wm1};
pub use real::Real;
pub mod io;
pub mod pmf;

pub use pmf::{
    cross_entropy, focal_entropy, focal_entropy_dgamma, h_gamma, harmonic_mean, kl_divergence,
    majorizes, rho_and_r, focal_entropy_log, shannon_entropy, tilt, EntropyValue, GammaDerivatives, Pmf, RhoR,
};
pub mod minimizer;

pub use minimizer::{
    alpha_asymptotic, alpha_bounds, inverse_operator, normalization_f, recurse_minimizer,
    solve_minimizer, AlphaBounds, MinimizerResult, PhiBoundKind,
};
pub mod oracle;
pub mod regime;

pub use oracle::{brute_force_minimizer, OracleMode};
pub use regime::{
    analyze, binary_bounds, entropy_consequences, gamma0, limit_diagnostic, phi_roots, power_law,
    simplex_scan, sufficient_conditions, BinaryBoundsResult, EntropyConsequences, LimitDiagnostic,
    LimitPoint, PhiRoots, RegimeReport, ScanCell, ScanTable, SufficientConditions, Tag,
};

pub type FocusParam64 = FocusParam<f64>;
pub type Pmf64 = Pmf<f64>;
pub type MinimizerResult64 = MinimizerResult<f64>;
pub type AlphaBounds64 = AlphaBounds<f64>;
pub type RegimeReport64 = RegimeReport<f64>;
pub type BinaryBoundsResult64 = BinaryBoundsResult<f64>;
pub type ScanTable64 = ScanTable<f64>;
pub type FocusParam32 = FocusParam<f32>;
pub type Pmf32 = Pmf<f32>;
pub type MinimizerResult32 = MinimizerResult<f32>;
