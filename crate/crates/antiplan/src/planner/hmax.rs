//! The max heuristic as a generalized Dijkstra over dynamic facts. Each
//! action keeps a countdown of unsatisfied preconditions; when the last
//! one settles, the settling value is exactly the max over preconditions,
//! so the action relaxes its add effects at cost + that value.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{CompiledProblem, FactSet};

#[derive(PartialEq)]
struct Entry {
    val: f64,
    fact: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .val
            .total_cmp(&self.val)
            .then_with(|| other.fact.cmp(&self.fact))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable buffers; one per search avoids an allocation per node.
pub struct Scratch {
    vals: Vec<f64>,
    counters: Vec<u32>,
}

impl Scratch {
    pub fn new(n_dyn: usize, n_actions: usize) -> Self {
        Scratch {
            vals: vec![f64::INFINITY; n_dyn],
            counters: vec![0; n_actions],
        }
    }
}

pub fn eval(
    cp: &CompiledProblem,
    enabled: &[bool],
    state: &FactSet,
    dyn_goal: &[u32],
    scratch: &mut Scratch,
) -> f64 {
    if dyn_goal.is_empty() {
        return 0.0;
    }
    let vals = &mut scratch.vals;
    let counters = &mut scratch.counters;
    vals.fill(f64::INFINITY);
    let mut heap = BinaryHeap::with_capacity(64);
    let mut remaining = 0usize;
    for &g in dyn_goal {
        if !state.contains(g) {
            remaining += 1;
        }
    }
    if remaining == 0 {
        return 0.0;
    }

    for (ai, a) in cp.actions.iter().enumerate() {
        counters[ai] = if enabled[ai] { a.pre.len() as u32 } else { u32::MAX };
    }

    let mut relax = |heap: &mut BinaryHeap<Entry>, vals: &mut Vec<f64>, ai: usize, max_pre: f64| {
        let nd = cp.actions[ai].cost + max_pre;
        for &f in &cp.actions[ai].add {
            if nd < vals[f as usize] {
                vals[f as usize] = nd;
                heap.push(Entry { val: nd, fact: f });
            }
        }
    };

    // Settle the given facts at zero; actions with no dynamic
    // preconditions trigger immediately.
    for f in state.ones() {
        vals[f as usize] = 0.0;
        heap.push(Entry { val: 0.0, fact: f });
    }
    for ai in 0..cp.actions.len() {
        if counters[ai] == 0 {
            relax(&mut heap, vals, ai, 0.0);
        }
    }

    let goal_is = |f: u32| dyn_goal.binary_search(&f).is_ok();
    while let Some(Entry { val, fact }) = heap.pop() {
        if val > vals[fact as usize] {
            continue;
        }
        // First settle of this fact.
        vals[fact as usize] = val;
        if goal_is(fact) && !state.contains(fact) {
            remaining -= 1;
            if remaining == 0 {
                return val;
            }
        }
        for idx in &cp.pre_index[fact as usize] {
            let ai = *idx as usize;
            if counters[ai] == u32::MAX {
                continue;
            }
            counters[ai] -= 1;
            if counters[ai] == 0 {
                relax(&mut heap, vals, ai, val);
            }
        }
    }
    f64::INFINITY
}
