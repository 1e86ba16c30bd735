//! A bijection between derangements and permutations with exactly one fixed
//! point, witnessing `d_n = n·d_{n-1} + (-1)^n`, together with the tooling to
//! check it exhaustively.
//!
//! Permutations are handled in canonical cycle notation: each cycle starts at
//! its smallest element and cycles are ordered by their first element.
//!
//! ```
//! use derangements::{parse_cycles, psi, psi_inverse, FormatMode};
//!
//! let pi = parse_cycles("(1,2,3,4)").unwrap();
//! let sigma = psi(&pi).unwrap();
//! assert_eq!(sigma.format(FormatMode::FixedPointFirst).unwrap(), "(2)(1,3,4)");
//! assert_eq!(psi_inverse(&sigma).unwrap(), pi);
//! ```

pub mod bijection;
pub mod cli;
pub mod enumerate;
pub mod perm;
pub mod verify;

pub use bijection::{
    classify_case, prefix_k, psi, psi_inverse, psi_mapping, BijectionCase, BijectionError, Mapping,
};
pub use enumerate::{
    count_all_bruteforce, count_class_bruteforce, count_d_rec1, count_d_rec2, count_table,
    iter_class, ClassCounts, CountRecord, EnumerateError, LexPermutations, MethodAgreement,
    DEFAULT_BOUND,
};
pub use perm::{
    classify, excluded_derangement, excluded_fixed, fixed_points, format_cycles, from_cycle_form,
    parse_cycles, to_cycle_form, CycleForm, Element, FormatMode, PermClass, PermError, Permutation,
};
pub use verify::{
    compare_tables, golden_rows, golden_tables, normalize_separators, verify_n,
    verify_n_with_bound, Failure, Highlight, Phase, RowComparison, Table, TableRow, VerifyReport,
};
