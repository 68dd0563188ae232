use std::cmp::Reverse;
use std::collections::BinaryHeap;

use proptest::prelude::*;

use adim_core::search::FnSpace;
use adim_core::{weighted_astar, Cost, SearchLimits, SearchStatus};

fn graph() -> impl Strategy<Value = Vec<Vec<(usize, Cost)>>> {
    (2usize..40).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec((0..n, 1u64..50), 0..5), n))
}

fn dijkstra(adj: &[Vec<(usize, Cost)>], src: usize) -> Vec<Option<Cost>> {
    let mut dist = vec![None; adj.len()];
    let mut heap = BinaryHeap::from([Reverse((0, src))]);
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some() {
            continue;
        }
        dist[u] = Some(d);
        for &(v, c) in &adj[u] {
            heap.push(Reverse((d + c, v)));
        }
    }
    dist
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weighted_astar_stays_within_epsilon(adj in graph(), eps in 1.0f64..3.0, scale in 0.0f64..=1.0) {
        let goal = adj.len() - 1;
        let rev = {
            let mut r = vec![Vec::new(); adj.len()];
            for (u, es) in adj.iter().enumerate() {
                for &(v, c) in es {
                    r[v].push((u, c));
                }
            }
            r
        };
        let to_goal = dijkstra(&rev, goal);
        let opt = dijkstra(&adj, 0)[goal];
        let space = FnSpace::new(
            |&u: &usize| adj[u].clone(),
            |&u: &usize| u == goal,
            |&u: &usize| to_goal[u].map(|d| (d as f64 * scale) as Cost),
        );
        let r = weighted_astar(&space, 0usize, eps, &SearchLimits::unlimited());
        match opt {
            None => prop_assert_eq!(r.status, SearchStatus::NoPath),
            Some(opt) => {
                prop_assert!(r.found());
                prop_assert!(r.cost as f64 <= eps * opt as f64 + 1e-9);
                let path = r.path.unwrap();
                prop_assert_eq!(path[0], 0);
                prop_assert_eq!(*path.last().unwrap(), goal);
                prop_assert_eq!(*r.path_costs.last().unwrap(), r.cost);
            }
        }
    }
}
