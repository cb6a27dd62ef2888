//! Benchmarks for the opbracket engine live in `benches/`.
