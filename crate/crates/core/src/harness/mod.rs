//! Random instances, property runs, worked examples and counterexample search.

pub mod generate;
pub mod reproduce;
pub mod search;
pub mod suite;

pub use generate::{random_hermitian, random_unital_family, rng_from_seed, trial_seed};
pub use reproduce::{reproduce, Case, Reproduction};
pub use search::{search_classic_nonconvex, search_th3_th4_order, SearchTarget};
pub use suite::{
    run_quasi_suite, run_suite, DimRange, InstanceShape, QuasiCheck, QuasiConfig, RunSummary, TrialConfig,
};
