use proptest::prelude::*;
use walkscan::graph::write_edge_list;
use walkscan::{load_edge_list, nodes_within_distance, Graph, NodeSet};

fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |edges| Graph::from_edges(n, edges).unwrap())
    })
}

proptest! {
    #[test]
    fn edge_list_round_trip(g in graph_strategy(30)) {
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), &buf).unwrap();
        let loaded = load_edge_list(file.path()).unwrap();

        prop_assert_eq!(loaded.edge_count(), g.edge_count());
        prop_assert_eq!(loaded.loop_count(), g.loop_count());
        for (u, v) in g.edges() {
            let a = loaded.dense_id(u as u64).unwrap();
            let b = loaded.dense_id(v as u64).unwrap();
            prop_assert!(loaded.has_edge(a, b));
        }
        let mut before: Vec<usize> = (0..g.node_count()).map(|v| g.degree(v)).filter(|&d| d > 0).collect();
        let mut after: Vec<usize> = (0..loaded.node_count()).map(|v| loaded.degree(v)).collect();
        before.sort_unstable();
        after.sort_unstable();
        prop_assert_eq!(before, after);

        // writing again reproduces the same text
        let mut again = Vec::new();
        write_edge_list(&loaded, &mut again).unwrap();
        let reloaded = load_edge_list({
            std::fs::write(file.path(), &again).unwrap();
            file.path()
        }).unwrap();
        prop_assert_eq!(reloaded.edges().collect::<Vec<_>>(), loaded.edges().collect::<Vec<_>>());
    }

    #[test]
    fn degree_sum(g in graph_strategy(40)) {
        let total: usize = (0..g.node_count()).map(|v| g.degree(v)).sum();
        let loops = g.edges().filter(|(u, v)| u == v).count();
        let plain = g.edges().count() - loops;
        prop_assert_eq!(loops, g.loop_count());
        prop_assert_eq!(total, 2 * plain + loops);
        prop_assert_eq!(total, g.volume());
    }

    #[test]
    fn distance_balls_grow(g in graph_strategy(40), picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..4)) {
        let n = g.node_count();
        let sources: NodeSet = picks.iter().map(|i| i.index(n)).collect();
        let mut previous = nodes_within_distance(&g, &sources, 0);
        prop_assert_eq!(&previous, &sources);
        for l in 1..5 {
            let ball = nodes_within_distance(&g, &sources, l);
            prop_assert!(previous.is_subset(&ball));
            previous = ball;
        }
    }
}
