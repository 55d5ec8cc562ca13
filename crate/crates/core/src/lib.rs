//! Timing-diagram and interval-logic requirements: parsing, semantics,
//! translation to automata, analysis and controller synthesis.

pub mod syntax;
pub mod par;
pub mod semantics;
pub mod timing_diagram;
pub mod translate;
pub mod automata;
pub mod compile;
pub mod analysis;
pub mod synth;
pub mod codegen;
pub mod gen;
