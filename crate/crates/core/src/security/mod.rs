//! Closed-form security quantities: Bell-diagonal spectra and their
//! entropies, key-rate curves, the BB84 comparison and the Bell twirl.

mod entropy;
mod rates;
mod twirl;

pub use entropy::{
    entropies, mutual_information, mutual_information_printed, rate_lower_bound,
    spectrum_from_noise, xlog3x, EntropyReport, GroupSums, Spectrum9,
};
pub use rates::{
    bb84_rate, bb84_root, bisect, h2, key_rate, key_rate_in, key_rate_root, minentropy_bound,
    LogBase,
};
pub use twirl::{bell_offdiagonal, bell_twirl, gamma_membership, spectrum_of};
