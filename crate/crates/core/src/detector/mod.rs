//! Detector dynamics: switching, response functionals, state maps and rates.

mod coupling;
mod evolve;
mod rate;
mod response;
mod switching;

pub use coupling::{default_charge, CouplingKind, CouplingModel, Smearing};
pub use evolve::{
    bloch_update, evolve_leading_order, flip_probability, Evolution, InitialState, QubitState, PERTURBATIVE_LIMIT,
};
pub use rate::{adiabatic_rate_closed, adiabatic_rate_numeric, neville_at_zero, RateEstimate};
pub use response::{response_k, response_l, response_m, response_set, ResponseSet};
pub use switching::{chi_fourier, chi_fourier_abs2, dawson, q_kernel, q_kernel_by_autocorrelation, SwitchingFunction};
