//! Generators, exact references and the benchmark driver.

pub mod bench;
pub mod generators;
pub mod reference;

pub use bench::{bench, bench_one, large_cases, BenchCase, BenchMethod, BenchRecord, FunctionPair, PairRun};
pub use generators::{GeneratorSpec, Generated, SeparableFactor};
pub use reference::SeparableReference;
