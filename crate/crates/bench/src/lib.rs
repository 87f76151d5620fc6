//! Fixtures shared by the benchmarks.

use hartman_core::corpus::golden;
use hartman_core::rational::ratio;
use hartman_core::sequence::cut_sequence;
use hartman_core::HartmanFunction;

/// `1_[0,1/3)(n α)` for the golden conjugate `α`.
pub fn golden_cut() -> HartmanFunction {
    cut_sequence(golden(), ratio(1, 3)).expect("valid cut sequence")
}
