//! A* over dynamic fact sets. Ties on f break toward lower h, then the
//! lexicographically smallest action sequence, so identical inputs always
//! produce identical plans. Reopening is enabled: hmax is admissible but
//! not guaranteed consistent, and duplicate states are kept on their best
//! known g.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::{hmax, CompiledProblem, FactSet};

struct Entry {
    f: f64,
    h: f64,
    seq: Vec<u32>,
    state: FactSet,
    g: f64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; reverse for min-by (f, h, seq).
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const G_EPS: f64 = 1e-9;

/// Returns the optimal action sequence, its cost, and the expansion count,
/// or None when the goal is unreachable.
pub fn search(
    cp: &CompiledProblem,
    enabled: &[bool],
    start: &FactSet,
    dyn_goal: &[u32],
) -> Option<(Vec<u32>, f64, usize)> {
    let mut scratch = hmax::Scratch::new(cp.n_dyn, cp.actions.len());
    let mut best_g: HashMap<FactSet, f64> = HashMap::new();
    let mut open = BinaryHeap::new();

    let h0 = hmax::eval(cp, enabled, start, dyn_goal, &mut scratch);
    if !h0.is_finite() {
        return None;
    }
    best_g.insert(start.clone(), 0.0);
    open.push(Entry { f: h0, h: h0, seq: Vec::new(), state: start.clone(), g: 0.0 });

    let mut expanded = 0usize;
    while let Some(Entry { seq, state, g, .. }) = open.pop() {
        match best_g.get(&state) {
            Some(&bg) if g > bg + G_EPS => continue, // stale entry
            _ => {}
        }
        if state.contains_all(dyn_goal) {
            return Some((seq, g, expanded));
        }
        expanded += 1;
        for (ai, action) in cp.actions.iter().enumerate() {
            if !enabled[ai] || !state.contains_all(&action.pre) {
                continue;
            }
            let mut succ = state.clone();
            for &f in &action.del {
                succ.clear(f);
            }
            for &f in &action.add {
                succ.set(f);
            }
            let g2 = g + action.cost;
            match best_g.get(&succ) {
                Some(&bg) if g2 >= bg - G_EPS => continue,
                _ => {}
            }
            let h2 = hmax::eval(cp, enabled, &succ, dyn_goal, &mut scratch);
            if !h2.is_finite() {
                continue;
            }
            best_g.insert(succ.clone(), g2);
            let mut seq2 = seq.clone();
            seq2.push(ai as u32);
            open.push(Entry { f: g2 + h2, h: h2, seq: seq2, state: succ, g: g2 });
        }
    }
    None
}
