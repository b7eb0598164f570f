//! Small public datasets bundled for tests and examples.

use crate::graph::Graph;
use crate::io::parse_edge_list;

/// Zachary's karate club edge list (1-based labels, 34 nodes, 78 edges).
pub const KARATE_EDGES: &str = include_str!("../data/karate.edges");

pub fn karate_club() -> Graph {
    parse_edge_list(KARATE_EDGES).expect("bundled karate club edge list parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn karate_shape() {
        let g = karate_club();
        assert_eq!(g.node_count(), 34);
        assert_eq!(g.edge_count(), 78);
        assert_eq!(g.total_weight(), 78.0);
    }
}
