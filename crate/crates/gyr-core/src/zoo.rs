//! Small reference graphs used across tests, benches and docs.

use crate::graph::DirectedMultigraph;

/// Two vertices joined by one edge.
pub fn single_edge() -> DirectedMultigraph {
    DirectedMultigraph::new(2, vec![(1, 2)]).unwrap()
}

/// Two vertices joined by two parallel edges.
pub fn double_edge() -> DirectedMultigraph {
    DirectedMultigraph::new(2, vec![(1, 2), (1, 2)]).unwrap()
}

/// Three vertices in a directed 3-cycle.
pub fn triangle() -> DirectedMultigraph {
    DirectedMultigraph::new(3, vec![(1, 2), (2, 3), (3, 1)]).unwrap()
}

/// Two vertices joined by three parallel edges.
pub fn theta() -> DirectedMultigraph {
    DirectedMultigraph::new(2, vec![(1, 2), (1, 2), (1, 2)]).unwrap()
}

/// One vertex with a single loop.
pub fn loop_graph() -> DirectedMultigraph {
    DirectedMultigraph::new(1, vec![(1, 1)]).unwrap()
}

/// One vertex with two loops.
pub fn figure_eight() -> DirectedMultigraph {
    DirectedMultigraph::new(1, vec![(1, 1), (1, 1)]).unwrap()
}

/// All zoo graphs with stable names, in a stable order.
pub fn all() -> Vec<(&'static str, DirectedMultigraph)> {
    vec![
        ("single_edge", single_edge()),
        ("double_edge", double_edge()),
        ("triangle", triangle()),
        ("theta", theta()),
        ("loop", loop_graph()),
        ("figure_eight", figure_eight()),
    ]
}
