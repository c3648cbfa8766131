//! Placeholder library target; the crate only carries benchmarks.
