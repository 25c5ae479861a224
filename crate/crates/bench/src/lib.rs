//! Criterion benchmarks for the spectrum, EBK, shooting and monodromy
//! routines; see `benches/`.
