//! Optimal forward search over grounded problems: A* with the admissible
//! max heuristic, deterministic tie-breaking, and cost-based reopening.
//!
//! Facts that no action adds or deletes are compiled out of the search
//! state; their truth is checked once per solve against the provided
//! initial facts.

mod astar;
mod facts;
mod hmax;

pub use facts::FactSet;

use crate::pddl::{GroundAction, GroundedDomain, GroundedProblem};

/// A minimum-cost plan: the action sequence, its total cost, and the
/// number of nodes the search expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub actions: Vec<GroundAction>,
    pub cost: f64,
    pub expanded: usize,
}

impl Plan {
    pub fn empty() -> Self {
        Plan { actions: Vec::new(), cost: 0.0, expanded: 0 }
    }
}

/// Unsolvable is an ordinary outcome, not a failure.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanOutcome {
    Solved(Plan),
    Unsolvable,
}

impl PlanOutcome {
    pub fn solved(self) -> Option<Plan> {
        match self {
            PlanOutcome::Solved(p) => Some(p),
            PlanOutcome::Unsolvable => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledAction {
    /// Grounded indices of precondition facts outside the dynamic set;
    /// checked against the initial facts once per solve.
    pub static_pre: Vec<u32>,
    /// Dynamic-index precondition, add, and delete sets (sorted).
    pub pre: Vec<u32>,
    pub add: Vec<u32>,
    pub del: Vec<u32>,
    pub cost: f64,
}

/// A grounded domain preprocessed for search, reusable across solves with
/// different initial states and goals.
#[derive(Debug, Clone)]
pub struct CompiledProblem {
    pub n_facts: usize,
    pub n_dyn: usize,
    dyn_of: Vec<Option<u32>>,
    pub actions: Vec<CompiledAction>,
    /// Actions of the metric move schema, eligible for move-after-move
    /// dominance pruning.
    pub is_move: Vec<bool>,
    /// For each dynamic fact, the actions with it as a precondition.
    pre_index: Vec<Vec<u32>>,
}

impl CompiledProblem {
    pub fn compile(gd: &GroundedDomain) -> Self {
        let n_facts = gd.facts.len();
        let mut touched = vec![false; n_facts];
        for a in &gd.actions {
            for &f in a.add.iter().chain(a.del.iter()) {
                touched[f as usize] = true;
            }
        }
        let mut dyn_of = vec![None; n_facts];
        let mut n_dyn = 0u32;
        for (i, &t) in touched.iter().enumerate() {
            if t {
                dyn_of[i] = Some(n_dyn);
                n_dyn += 1;
            }
        }
        let remap = |ids: &[u32]| -> Vec<u32> {
            let mut v: Vec<u32> = ids
                .iter()
                .filter_map(|&f| dyn_of[f as usize])
                .collect();
            v.sort_unstable();
            v
        };
        let actions: Vec<CompiledAction> = gd
            .actions
            .iter()
            .map(|a| CompiledAction {
                static_pre: a
                    .pre
                    .iter()
                    .copied()
                    .filter(|&f| dyn_of[f as usize].is_none())
                    .collect(),
                pre: remap(&a.pre),
                add: remap(&a.add),
                del: remap(&a.del),
                cost: a.cost,
            })
            .collect();
        let is_move = gd
            .actions
            .iter()
            .map(|a| gd.metric_schema.as_deref() == Some(a.schema.as_str()))
            .collect();
        let mut pre_index = vec![Vec::new(); n_dyn as usize];
        for (ai, a) in actions.iter().enumerate() {
            for &f in &a.pre {
                pre_index[f as usize].push(ai as u32);
            }
        }
        CompiledProblem {
            n_facts,
            n_dyn: n_dyn as usize,
            dyn_of,
            actions,
            is_move,
            pre_index,
        }
    }

    /// Dynamic-state bitset for a full initial fact list.
    pub fn dyn_state(&self, init: &[u32]) -> FactSet {
        let mut s = FactSet::zeros(self.n_dyn);
        for &f in init {
            if let Some(d) = self.dyn_of[f as usize] {
                s.set(d);
            }
        }
        s
    }

    /// Splits a goal into its dynamic part and the static facts that must
    /// already hold in the initial set.
    pub fn split_goal(&self, goal: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let mut dyn_goal = Vec::new();
        let mut static_goal = Vec::new();
        for &f in goal {
            match self.dyn_of[f as usize] {
                Some(d) => dyn_goal.push(d),
                None => static_goal.push(f),
            }
        }
        dyn_goal.sort_unstable();
        dyn_goal.dedup();
        (dyn_goal, static_goal)
    }

    /// Per-solve action enablement from static preconditions.
    pub fn enabled(&self, init: &FactSet) -> Vec<bool> {
        self.actions
            .iter()
            .map(|a| a.static_pre.iter().all(|&f| init.contains(f)))
            .collect()
    }
}

/// Optimal plan for a self-contained grounded problem.
pub fn plan(problem: &GroundedProblem) -> PlanOutcome {
    let gd = GroundedDomain::from_problem(problem);
    let cp = CompiledProblem::compile(&gd);
    plan_compiled(&gd, &cp, &problem.init, &problem.goal)
}

/// Optimal plan over a precompiled domain. `init` and `goal` are grounded
/// fact indices.
pub fn plan_compiled(
    gd: &GroundedDomain,
    cp: &CompiledProblem,
    init: &[u32],
    goal: &[u32],
) -> PlanOutcome {
    let init_full = FactSet::from_indices(cp.n_facts, init);
    let (dyn_goal, static_goal) = cp.split_goal(goal);
    if !static_goal.iter().all(|&f| init_full.contains(f)) {
        return PlanOutcome::Unsolvable;
    }
    let enabled = cp.enabled(&init_full);
    let start = cp.dyn_state(init);
    match astar::search(cp, &enabled, &start, &dyn_goal) {
        None => PlanOutcome::Unsolvable,
        Some((indices, cost, expanded)) => PlanOutcome::Solved(Plan {
            actions: indices
                .iter()
                .map(|&i| gd.actions[i as usize].clone())
                .collect(),
            cost,
            expanded,
        }),
    }
}

/// The admissible max heuristic evaluated from an arbitrary fact set:
/// the delete-relaxed fixed point h(f) = min over achievers of
/// cost(a) + max over pre(a) of h(p), with h = 0 on the given facts;
/// returns the max over the problem's goal facts (infinity if
/// unreachable).
pub fn hmax(problem: &GroundedProblem, facts: &[u32]) -> f64 {
    let gd = GroundedDomain::from_problem(problem);
    let cp = CompiledProblem::compile(&gd);
    let full = FactSet::from_indices(cp.n_facts, facts);
    let (dyn_goal, static_goal) = cp.split_goal(&problem.goal);
    if !static_goal.iter().all(|&f| full.contains(f)) {
        return f64::INFINITY;
    }
    let enabled = cp.enabled(&full);
    let state = cp.dyn_state(facts);
    let mut scratch = hmax::Scratch::new(cp.n_dyn, cp.actions.len());
    hmax::eval(&cp, &enabled, &state, &dyn_goal, &mut scratch)
}

impl GroundedDomain {
    /// View a self-contained problem as a domain for compilation.
    pub fn from_problem(problem: &GroundedProblem) -> GroundedDomain {
        GroundedDomain::from_parts(problem.facts.clone(), problem.actions.clone(), None)
    }
}
