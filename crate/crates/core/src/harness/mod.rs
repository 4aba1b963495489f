//! Benchmark inputs, configurations, timing, verification and reporting.

pub mod case;
pub mod csv;
pub mod gen;
pub mod matrix_market;
pub mod rng;
pub mod runner;
pub mod traced;

pub use case::{flop_count, paper_defaults, BenchCase, Kernel, Variant};
pub use csv::{csv_read, csv_write, CsvRow};
pub use gen::{gen_banded_spd, gen_dense, gen_signal, gen_sparse};
pub use matrix_market::{mm_read, mm_read_path};
pub use rng::Rng;
pub use runner::{prepare, run_case, sweep_workers, BenchResult, Verified};
pub use traced::{capture_case, CapturedCase};
