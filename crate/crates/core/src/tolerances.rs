//! Sample counts, tolerances and thresholds shared across the crate.
//!
//! Every numeric knob that a check or verdict depends on lives here so that
//! a reader can audit them in one place.

/// Relative tolerance used by sampled invariant checks (bounds, symmetry,
/// domination).
pub const INVARIANT_REL_TOL: f64 = 1e-6;

/// Number of log-spaced points used to verify order-function bounds.
pub const ORDER_BOUND_SAMPLES: usize = 10_000;
/// Upper end of the order-function bound sweep.
pub const ORDER_BOUND_MAX_U: f64 = 1e12;

/// Number of sampled pairs for kernel symmetry/domination checks.
pub const KERNEL_PAIR_SAMPLES: usize = 256;
/// Number of random vectors used by form and exponent invariant checks.
pub const RANDOM_VECTOR_SAMPLES: usize = 100;

/// Default relative tolerance for a single exponent evaluation.
pub const EXPONENT_REL_TOL: f64 = 1e-9;
/// Absolute floor below which exponent contributions are ignored.
pub const EXPONENT_ABS_TOL: f64 = 1e-300;
/// Panel budget per improper sub-range of an exponent evaluation.
pub const EXPONENT_MAX_PANELS: usize = 4_000;
/// Maximum number of half-period terms fed to the alternating-series
/// accelerator.
pub const EXPONENT_MAX_PERIODS: usize = 2_048;

/// Taylor guard threshold for `1 - cos t`.
pub const TAYLOR_GUARD: f64 = 1e-4;

/// Half-width of the indeterminate band around exponent -1 in tail fits.
pub const TAIL_BAND: f64 = 0.05;
/// Default number of log-substitution levels for tail classification.
pub const TAIL_MAX_DEPTH: usize = 3;
/// Number of geometric checkpoints in a tail fit window.
pub const TAIL_WINDOW: usize = 8;
/// Far end of the level-0 checkpoint window at infinity.
pub const TAIL_FAR_INFINITY: f64 = 1e150;
/// Near end of the level-0 checkpoint window at zero.
pub const TAIL_NEAR_ZERO: f64 = 1e-150;

/// Largest radius for the sufficient recurrence criterion.
pub const U04_R_MAX: f64 = 1e12;
/// Number of trailing checkpoints that must look bounded.
pub const U04_TRAILING: usize = 8;
/// Slack relative to the running maximum for "bounded" trailing checkpoints.
pub const U04_SLACK: f64 = 0.05;

/// Chung-Fuchs radius.
pub const CHUNG_FUCHS_RADIUS: f64 = 1.0;

/// Relative residual demanded from every resolvent solve.
pub const RESOLVENT_RESIDUAL: f64 = 1e-10;
/// Iteration budget for conjugate gradients.
pub const CG_MAX_ITER: usize = 20_000;
/// Floor used when checking positivity preservation of resolvents.
pub const POSITIVITY_FLOOR: f64 = -1e-12;
/// Lower PSD floor relative to the squared norm of the test vector.
pub const PSD_FLOOR: f64 = -1e-12;

/// Jump-kernel entries below this fraction of the largest entry are dropped.
pub const JUMP_TRUNCATION: f64 = 1e-14;

/// Relative resolvent error required at the largest index.
pub const MOSCO_THRESHOLD: f64 = 1e-2;
/// Required decrease factor between smallest and largest index.
pub const MOSCO_DECREASE: f64 = 2.0;
/// Errors below this are treated as exact agreement.
pub const MOSCO_EXACT_FLOOR: f64 = 1e-13;
/// Implicit Euler steps used for semigroup errors.
pub const SEMIGROUP_STEPS: usize = 32;

/// Ratio last/first below which an assumption sequence is "vanishing".
pub const ASSUMPTION_VANISH_RATIO: f64 = 0.25;
/// Absolute level below which a distance counts as zero.
pub const ASSUMPTION_ZERO: f64 = 1e-12;
