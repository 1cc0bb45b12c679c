//! Symmetrizability decisions with LP certificates, the input connectivity
//! graph, and an exhaustive worst-case error probe for tiny codes.

mod converse;
mod graph;
mod margin;

pub use converse::{converse_probe, DecodeTable, ProbeResult, DEFAULT_PROBE_BUDGET};
pub use graph::{build_graph, edge_test, ChannelGraph, EdgeResult};
pub use margin::{
    indicator_u_given_x, indicator_u_given_x_with, sym_margin, sym_margin_with, violation_under,
    SymReport, SymTarget, SymVariant, UndefinedRowPolicy, DEFAULT_SYM_TOL,
};
