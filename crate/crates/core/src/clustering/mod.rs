//! Binarization, cluster decompositions of binary trees and the cluster forest
//! induced by cuts.

mod alt_partition;
mod binarize;
mod decompose;
mod icf;

pub use alt_partition::alt_partition;
pub use binarize::{binarize, Binarized};
pub use decompose::{decompose, Cluster, ClusterDecomposition};
pub use icf::{ClusterEdge, InducedClusterForest};
