//! Integrated density of states: finite-volume and periodic estimates, exponent
//! fits and the localization-input checks.

pub mod checks;
pub mod curve;
pub mod decay;
pub mod empirical;
pub mod fit;
pub mod stats;

pub use checks::{
    event_e_check, ile_check, sandwich_check, wegner_check, CheckName, CheckReport, IleParams,
    SandwichParams, Verdict, WegnerParams, WegnerReport,
};
pub use curve::{Ensemble, IdsCurve};
pub use decay::{decay_diagnostic, shell_decay, DecayReport};
pub use empirical::{
    empirical_ids, expected_periodic_ids, finite_volume_ids, periodic_approx_ids, RandomMedium,
};
pub use fit::{
    fit_double_log, lifshitz_exponent, theoretical_exponent, Edge, ExponentFit, FitOptions,
    RangeKind,
};
pub use stats::{clopper_pearson, Proportion};
