//! Best-first n-shortest-string search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::fst::{StateId, Wfst};
use crate::symbols::{Label, EPS};
use crate::weight::Weight;

/// Lowest-cost distinct strings of `f` in nondecreasing cost order, ties
/// broken lexicographically by symbol id. Input-tape labels are reported.
///
/// Requires an acyclic machine or strictly positive cycles.
pub fn shortest_path(f: &Wfst, n: usize) -> Vec<(Vec<Label>, Weight)> {
    let start = match f.start {
        Some(s) => s,
        None => return Vec::new(),
    };
    if n == 0 {
        return Vec::new();
    }
    let heuristic = distance_to_final(f);
    if heuristic[start].is_zero() {
        return Vec::new(); // empty language
    }

    #[derive(PartialEq)]
    struct Item {
        priority: f64,
        labels: Vec<Label>,
        cost: f64,
        state: StateId,
    }
    impl Eq for Item {}
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> Ordering {
            // BinaryHeap is a max-heap; invert for min-by-(priority, labels)
            other
                .priority
                .partial_cmp(&self.priority)
                .unwrap_or(Ordering::Equal)
                .then_with(|| other.labels.cmp(&self.labels))
        }
    }
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut heap = BinaryHeap::new();
    heap.push(Item {
        priority: heuristic[start].value(),
        labels: Vec::new(),
        cost: 0.0,
        state: start,
    });
    let mut results: Vec<(Vec<Label>, Weight)> = Vec::new();
    // cap guards pathological duplicate-path blowup on cyclic input
    let mut popped = 0usize;
    let pop_limit = 1_000_000usize;
    while let Some(item) = heap.pop() {
        popped += 1;
        if popped > pop_limit {
            break;
        }
        let fw = f.final_weight(item.state);
        if !fw.is_zero() {
            let total = item.cost + fw.value();
            // admissible heuristic ⇒ results come out in cost order
            if !results.iter().any(|(s, _)| s == &item.labels) {
                results.push((item.labels.clone(), Weight::new(total)));
                if results.len() >= n {
                    return results;
                }
            }
        }
        for arc in &f.arcs[item.state] {
            let h = heuristic[arc.next_state];
            if h.is_zero() {
                continue;
            }
            let cost = item.cost + arc.weight.value();
            let mut labels = item.labels.clone();
            if arc.ilabel != EPS {
                labels.push(arc.ilabel);
            }
            heap.push(Item {
                priority: cost + h.value(),
                labels,
                cost,
                state: arc.next_state,
            });
        }
    }
    results
}

/// Per-state minimum cost to reach a final state (including the final
/// weight); `Weight::zero()` for non-coaccessible states.
pub fn distance_to_final(f: &Wfst) -> Vec<Weight> {
    let n = f.num_states();
    let mut dist: Vec<Weight> = (0..n).map(|s| f.final_weight(s)).collect();
    if let Ok(order) = f.topo_order() {
        for &s in order.iter().rev() {
            for a in &f.arcs[s] {
                dist[s] = dist[s].plus(a.weight.times(dist[a.next_state]));
            }
        }
    } else {
        // cyclic: relax to fixpoint (cycles must be strictly positive)
        for _ in 0..n {
            let mut changed = false;
            for s in 0..n {
                for a in &f.arcs[s] {
                    let w = a.weight.times(dist[a.next_state]);
                    if w.value() < dist[s].value() - 1e-15 {
                        dist[s] = w;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::{build_linear, union, Arc, SharedTable};
    use crate::symbols::SymbolTable;

    fn table(words: &[&str]) -> SharedTable {
        let mut t = SymbolTable::new();
        for w in words {
            t.intern(w);
        }
        std::sync::Arc::new(t)
    }

    #[test]
    fn single_string() {
        let syms = table(&["a"]);
        let a = syms.get("a").unwrap();
        let f = build_linear(&syms, &[a], Weight::one());
        let paths = shortest_path(&f, 1);
        assert_eq!(paths, vec![(vec![a], Weight::one())]);
    }

    #[test]
    fn two_paths_sorted() {
        let syms = table(&["a", "b"]);
        let a = syms.get("a").unwrap();
        let b = syms.get("b").unwrap();
        let f = union(&[
            build_linear(&syms, &[a], Weight::new(2.0)),
            build_linear(&syms, &[b], Weight::new(1.5)),
        ])
        .unwrap();
        let paths = shortest_path(&f, 2);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].0, vec![b]);
        assert!(paths[0].1.approx_eq(Weight::new(1.5), 1e-9));
        assert_eq!(paths[1].0, vec![a]);
    }

    #[test]
    fn tie_breaks_lexicographically() {
        let syms = table(&["a", "b"]);
        let a = syms.get("a").unwrap();
        let b = syms.get("b").unwrap();
        let f = union(&[
            build_linear(&syms, &[b], Weight::new(1.0)),
            build_linear(&syms, &[a], Weight::new(1.0)),
        ])
        .unwrap();
        let paths = shortest_path(&f, 2);
        assert_eq!(paths[0].0, vec![a]);
        assert_eq!(paths[1].0, vec![b]);
    }

    #[test]
    fn duplicate_strings_collapse() {
        let syms = table(&["a"]);
        let a = syms.get("a").unwrap();
        let f = union(&[
            build_linear(&syms, &[a], Weight::new(1.0)),
            build_linear(&syms, &[a], Weight::new(3.0)),
        ])
        .unwrap();
        let paths = shortest_path(&f, 5);
        assert_eq!(paths.len(), 1);
        assert!(paths[0].1.approx_eq(Weight::new(1.0), 1e-9));
    }

    #[test]
    fn empty_language_gives_empty_list() {
        let syms = table(&["a"]);
        let mut f = Wfst::acceptor(syms);
        let s = f.add_state();
        f.set_start(s); // no finals
        assert!(shortest_path(&f, 3).is_empty());
    }

    #[test]
    fn positive_cycle_guard() {
        let syms = table(&["a", "b"]);
        let a = syms.get("a").unwrap();
        let b = syms.get("b").unwrap();
        let mut f = Wfst::acceptor(syms);
        let s = f.add_state();
        f.set_start(s);
        f.set_final(s, Weight::one());
        f.add_arc(s, Arc::new(a, a, Weight::new(1.0), s));
        f.add_arc(s, Arc::new(b, b, Weight::new(0.5), s));
        let paths = shortest_path(&f, 3);
        assert_eq!(paths[0].0, Vec::<Label>::new());
        assert_eq!(paths[1].0, vec![b]);
        // "a" and "b b" tie at weight 1.0; the shorter-lexicographic string wins.
        assert_eq!(paths[2].0, vec![a]);
    }
}
