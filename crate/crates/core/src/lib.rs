//! Strongly regular graphs: seed constructions, Godsil-McKay and
//! Wang-Qiu-Hu switching, canonical labelling, breadth-first exploration of
//! switching classes and analysis of the resulting graph stores.

pub mod analyze;
pub mod canon;
pub mod explorer;
pub mod graph;
pub mod graph6;
pub mod seeds;
pub mod srg;
pub mod switching;

pub use canon::{aut_group_order, canonical_form, canonical_key, AutInfo, Canonical, CanonicalKey};
pub use graph::{Graph, GraphError};
pub use graph6::{emit_graph6, emit_graph6_string, parse_graph6, Graph6Error};
pub use srg::{srg_spectrum, verify_srg, NotSrg, Spectrum, SrgParams};
