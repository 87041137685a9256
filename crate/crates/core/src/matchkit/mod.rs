//! Matches, gaps, `f̄_δ` for periodic pairs, the Feldman-Katok distance,
//! Besicovitch pseudometrics and word metrics.

mod besicovitch;
pub mod lcs;
mod matching;
mod periodic;
mod words;

pub use besicovitch::{besicovitch, Besicovitch};
pub use matching::{compose_matches, fk_finite, gap, max_match, Certification, GapValue, Match, MatchMode, BRUTE_MAX};
pub use periodic::{fbar_delta_periodic, fbar_doubling_sequence, fk_distance, gcd, lcm, FkOptions, FkResult};
pub use words::{fhat_estimate, word_lcs, word_metrics, WordMetrics};
