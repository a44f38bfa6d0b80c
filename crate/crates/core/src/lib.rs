//! Static analyses for Python source: parsing, rewriting, control flow,
//! SSA with constant folding, module graphs, call graphs and type inference.

pub mod callgraph;
pub mod cfg;
pub mod error;
pub mod frontend;
pub mod modgraph;
pub mod rewriter;
pub mod ssa;
pub mod typeinfer;

pub use error::{Error, Result};
pub use frontend::{parse_module, unparse_module, Module, ParseError, SourceFile, Span};
