//! Instance-to-instance and instance-to-graph transformations.

mod balance;
mod copy;
mod double;
mod fglss;
mod label_extended;
mod subsample;

use serde::{Deserialize, Serialize};

use crate::csp::{Assignment, CspInstance, Vertex};

pub use balance::{balance_degrees, degrees_for_ratio, DegreeBalance};
pub use copy::copy_expand;
pub use double::bipartite_double;
pub use fglss::{fglss, FglssGraph, FglssVertex};
pub use label_extended::{label_extended, LabelExtendedGraph};
pub use subsample::{
    subsample_params, subsample_reduce, Overrides, ParamInputs, ParamMode, ReductionReport, SubsampleParams,
};

/// A transformed instance together with the source vertex of every new vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transformed {
    pub instance: CspInstance,
    pub origin: Vec<Vertex>,
}

impl Transformed {
    /// Copies each source label onto all of its images.
    pub fn lift(&self, psi: &Assignment) -> Assignment {
        Assignment(self.origin.iter().map(|&v| psi.0[v]).collect())
    }
}
