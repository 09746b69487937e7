//! Action grounding by delete-relaxed reachability: starting from the
//! initial facts, instantiate every schema binding whose precondition is
//! reachable, feeding add effects back until a fixed point. Facts and
//! actions come out in a canonical sorted order so two grounding routes
//! can be compared directly.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::{ActionSchema, CostExpr, Fact, GroundAction, GroundedProblem, Literal, PddlDomain, Term};
use crate::blockworld::{DomainError, Environment, Location, TaskSpec, WorldState};
use crate::motion::MoveCostTable;

pub const ROBOT: &str = "robot";
pub const PICK_PLACE_COST: f64 = 100.0;

#[derive(Debug, Clone, thiserror::Error)]
pub enum GroundError {
    #[error("missing move cost for ({0}, {1})")]
    MissingMoveCost(String, String),
    #[error("unknown cost function {0}")]
    UnknownCostFunction(String),
    #[error("grounded cost for {0} is negative or non-finite: {1}")]
    BadCost(String, f64),
    #[error("add and delete effects overlap in {0}")]
    ContradictoryEffect(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("fact {0} outside the grounded universe")]
    UnknownFact(Fact),
}

/// A reusable grounding of a domain against a fixed entity universe. The
/// action set is independent of the concrete start state, so one
/// `GroundedDomain` serves every solve in its environment.
#[derive(Debug, Clone)]
pub struct GroundedDomain {
    pub facts: Vec<Fact>,
    pub actions: Vec<GroundAction>,
    index: HashMap<Fact, u32>,
    /// Schema whose grounded costs form a shortest-path metric (the
    /// blockworld `move`); planners may use this for dominance pruning.
    pub metric_schema: Option<String>,
}

impl GroundedDomain {
    pub fn from_parts(
        facts: Vec<Fact>,
        actions: Vec<GroundAction>,
        metric_schema: Option<String>,
    ) -> Self {
        let index = facts
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i as u32))
            .collect();
        GroundedDomain { facts, actions, index, metric_schema }
    }

    pub fn fact_id(&self, fact: &Fact) -> Result<u32, GroundError> {
        self.index
            .get(fact)
            .copied()
            .ok_or_else(|| GroundError::UnknownFact(fact.clone()))
    }

    /// Initial fact set for a world state in this universe.
    pub fn state_facts(&self, env: &Environment, s: &WorldState) -> Result<Vec<u32>, GroundError> {
        let mut out = Vec::new();
        for fact in base_static_facts(env).into_iter().chain(dynamic_facts(env, s)?) {
            out.push(self.fact_id(&fact)?);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Conjunctive goal for a task: each directive's object in its region,
    /// hand empty.
    pub fn task_goal(&self, env: &Environment, task: &TaskSpec) -> Result<Vec<u32>, GroundError> {
        env.check_task(task)?;
        let mut out = Vec::new();
        for (obj, region) in &task.directives {
            out.push(self.fact_id(&fact2("InRegion", obj.as_str(), region.as_str()))?);
        }
        out.push(self.fact_id(&fact1("HandEmpty", ROBOT))?);
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Conjunctive goal pinning the exact placement of every object (hand
    /// empty, robot anywhere).
    pub fn state_goal(&self, target: &WorldState) -> Result<Vec<u32>, GroundError> {
        let mut out = Vec::new();
        for (obj, slot) in &target.placements {
            out.push(self.fact_id(&fact2("In", obj.as_str(), slot.as_str()))?);
        }
        out.push(self.fact_id(&fact1("HandEmpty", ROBOT))?);
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

fn fact1(pred: &str, a: &str) -> Fact {
    Fact { pred: pred.to_string(), args: vec![a.to_string()] }
}

fn fact2(pred: &str, a: &str, b: &str) -> Fact {
    Fact { pred: pred.to_string(), args: vec![a.to_string(), b.to_string()] }
}

fn base_static_facts(env: &Environment) -> Vec<Fact> {
    let mut facts = vec![fact1("Robot", ROBOT)];
    for loc in env.locations() {
        facts.push(fact1("Location", &loc.to_string()));
    }
    for region in &env.regions {
        facts.push(fact1("Region", region.id.as_str()));
        for slot in &region.slots {
            facts.push(fact1("Slot", slot.id.as_str()));
            facts.push(fact2("Within", slot.id.as_str(), region.id.as_str()));
        }
    }
    for obj in &env.objects {
        facts.push(fact1("Block", obj.id.as_str()));
    }
    facts
}

fn dynamic_facts(env: &Environment, s: &WorldState) -> Result<Vec<Fact>, GroundError> {
    s.check_invariants()?;
    let mut facts = vec![fact2("At", ROBOT, &s.robot_at.to_string())];
    if env.location_point(&s.robot_at).is_none() {
        return Err(GroundError::Domain(DomainError::UnknownEntity(
            "location",
            s.robot_at.to_string(),
        )));
    }
    match &s.holding {
        Some(obj) => facts.push(fact2("Holding", ROBOT, obj.as_str())),
        None => facts.push(fact1("HandEmpty", ROBOT)),
    }
    let mut occupied = HashSet::new();
    for (obj, slot) in &s.placements {
        let (region, _) = env
            .slot(slot)
            .ok_or_else(|| DomainError::UnknownEntity("slot", slot.0.clone()))?;
        if env.object(obj).is_none() {
            return Err(GroundError::Domain(DomainError::UnknownEntity(
                "object",
                obj.0.clone(),
            )));
        }
        facts.push(fact2("In", obj.as_str(), slot.as_str()));
        facts.push(fact2("InRegion", obj.as_str(), region.id.as_str()));
        occupied.insert(slot.clone());
    }
    for (_, slot) in env.slots() {
        if !occupied.contains(&slot.id) {
            facts.push(fact1("Free", slot.id.as_str()));
        }
    }
    Ok(facts)
}

/// Grounds a domain against an environment's entity universe, resolving
/// symbolic move costs from the table. The seeding state only provides the
/// reachability base; all legal placements end up reachable.
pub fn ground_domain(
    domain: &PddlDomain,
    env: &Environment,
    move_costs: &MoveCostTable,
) -> Result<GroundedDomain, GroundError> {
    let init: Vec<Fact> = base_static_facts(env)
        .into_iter()
        .chain(dynamic_facts(env, &env.initial_state)?)
        .collect();
    let lookup = move_cost_lookup(env, move_costs);
    let mut gd = ground_reachable(domain, &init, &lookup)?;
    gd.metric_schema = Some("move".to_string());
    Ok(gd)
}

/// The grounding of a parsed problem file; function assignments from the
/// problem's `:init` resolve symbolic costs.
pub fn ground_problem(
    domain: &PddlDomain,
    problem: &super::PddlProblem,
) -> Result<(GroundedDomain, Vec<u32>, Vec<u32>), GroundError> {
    let values: HashMap<(String, Vec<String>), f64> = problem
        .function_values
        .iter()
        .filter(|(name, _, _)| name != "total-cost")
        .map(|(name, args, v)| ((name.clone(), args.clone()), *v))
        .collect();
    let lookup = move |name: &str, args: &[String]| -> Option<f64> {
        values.get(&(name.to_string(), args.to_vec())).copied()
    };
    let gd = ground_reachable(domain, &problem.init, &lookup)?;
    let mut init: Vec<u32> = problem
        .init
        .iter()
        .map(|lit| gd.fact_id(&literal_fact(lit)))
        .collect::<Result<_, _>>()?;
    init.sort_unstable();
    init.dedup();
    let mut goal: Vec<u32> = problem
        .goal
        .iter()
        .map(|lit| gd.fact_id(&literal_fact(lit)))
        .collect::<Result<_, _>>()?;
    goal.sort_unstable();
    goal.dedup();
    Ok((gd, init, goal))
}

fn literal_fact(lit: &Literal) -> Fact {
    Fact {
        pred: lit.pred.clone(),
        args: lit.args.iter().map(|t| t.name().to_string()).collect(),
    }
}

fn move_cost_lookup<'a>(
    env: &'a Environment,
    table: &'a MoveCostTable,
) -> impl Fn(&str, &[String]) -> Option<f64> + 'a {
    let by_name: BTreeMap<String, Location> = env
        .locations()
        .into_iter()
        .map(|l| (l.to_string(), l))
        .collect();
    move |name: &str, args: &[String]| {
        if name != "move-cost" || args.len() != 2 {
            return None;
        }
        let a = by_name.get(&args[0])?;
        let b = by_name.get(&args[1])?;
        table.cost(a, b)
    }
}

/// The spec-level one-shot grounding: domain + environment + start state +
/// task, producing a self-contained `GroundedProblem`.
pub fn ground(
    domain: &PddlDomain,
    env: &Environment,
    s0: &WorldState,
    task: &TaskSpec,
    move_costs: &MoveCostTable,
) -> Result<GroundedProblem, GroundError> {
    let gd = ground_domain(domain, env, move_costs)?;
    let init = gd.state_facts(env, s0)?;
    let goal = gd.task_goal(env, task)?;
    Ok(GroundedProblem {
        facts: gd.facts,
        actions: gd.actions,
        init,
        goal,
    })
}

/// Enumerates parameter bindings satisfying the precondition against the
/// reachable facts.
fn enumerate_bindings(
    schema: &ActionSchema,
    by_pred: &HashMap<&str, Vec<&Fact>>,
) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut bind: HashMap<&str, String> = HashMap::new();
    descend(schema, by_pred, 0, &mut bind, &mut out);
    out
}

fn descend<'s>(
    schema: &'s ActionSchema,
    by_pred: &HashMap<&str, Vec<&Fact>>,
    i: usize,
    bind: &mut HashMap<&'s str, String>,
    out: &mut Vec<Vec<String>>,
) {
    if i == schema.precondition.len() {
        let args: Vec<String> = schema
            .params
            .iter()
            .map(|p| bind.get(p.as_str()).cloned().unwrap_or_else(|| p.clone()))
            .collect();
        out.push(args);
        return;
    }
    let lit = &schema.precondition[i];
    let Some(candidates) = by_pred.get(lit.pred.as_str()) else {
        return;
    };
    'facts: for fact in candidates {
        if fact.args.len() != lit.args.len() {
            continue;
        }
        let mut added: Vec<&str> = Vec::new();
        for (term, value) in lit.args.iter().zip(&fact.args) {
            match term {
                Term::Const(c) => {
                    if c != value {
                        for a in added.drain(..) {
                            bind.remove(a);
                        }
                        continue 'facts;
                    }
                }
                Term::Var(v) => match bind.get(v.as_str()) {
                    Some(existing) if existing != value => {
                        for a in added.drain(..) {
                            bind.remove(a);
                        }
                        continue 'facts;
                    }
                    Some(_) => {}
                    None => {
                        bind.insert(v.as_str(), value.clone());
                        added.push(v.as_str());
                    }
                },
            }
        }
        descend(schema, by_pred, i + 1, bind, out);
        for a in added {
            bind.remove(a);
        }
    }
}

fn instantiate(lit: &Literal, params: &[String], args: &[String]) -> Fact {
    Fact {
        pred: lit.pred.clone(),
        args: lit
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(v) => {
                    let i = params.iter().position(|p| p == v).expect("bound parameter");
                    args[i].clone()
                }
            })
            .collect(),
    }
}

fn ground_reachable(
    domain: &PddlDomain,
    init: &[impl AsFact],
    cost_lookup: &impl Fn(&str, &[String]) -> Option<f64>,
) -> Result<GroundedDomain, GroundError> {
    let mut reachable: Vec<Fact> = init.iter().map(|f| f.as_fact()).collect();
    reachable.sort();
    reachable.dedup();
    let mut known: HashSet<Fact> = reachable.iter().cloned().collect();
    let mut grounded: Vec<(String, Vec<String>)> = Vec::new();
    let mut grounded_set: HashSet<(String, Vec<String>)> = HashSet::new();

    loop {
        let by_pred = index_by_pred(&reachable);
        let mut new_actions = Vec::new();
        for schema in &domain.actions {
            for args in enumerate_bindings(schema, &by_pred) {
                let key = (schema.name.clone(), args);
                if !grounded_set.contains(&key) {
                    grounded_set.insert(key.clone());
                    new_actions.push(key);
                }
            }
        }
        if new_actions.is_empty() {
            break;
        }
        for (name, args) in &new_actions {
            let schema = domain.action(name).expect("schema exists");
            for lit in &schema.add {
                let fact = instantiate(lit, &schema.params, args);
                if known.insert(fact.clone()) {
                    reachable.push(fact);
                }
            }
        }
        grounded.extend(new_actions);
    }

    // Canonical fact order.
    let mut facts = reachable;
    facts.sort();
    let index: HashMap<Fact, u32> = facts
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i as u32))
        .collect();

    grounded.sort();
    let mut actions = Vec::with_capacity(grounded.len());
    for (name, args) in grounded {
        let schema = domain.action(&name).expect("schema exists");
        let resolve = |lits: &[Literal]| -> Vec<u32> {
            let mut v: Vec<u32> = lits
                .iter()
                .map(|l| index[&instantiate(l, &schema.params, &args)])
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let pre = resolve(&schema.precondition);
        let add = resolve(&schema.add);
        let del = resolve(&schema.del);
        if add.iter().any(|f| del.binary_search(f).is_ok()) {
            // Self-contradictory instantiation (e.g. move l l); skip it.
            continue;
        }
        let cost = match &schema.cost {
            CostExpr::Constant(c) => *c,
            CostExpr::Function { name: fname, args: fargs } => {
                let concrete: Vec<String> = fargs
                    .iter()
                    .map(|t| match t {
                        Term::Const(c) => c.clone(),
                        Term::Var(v) => {
                            let i = schema.params.iter().position(|p| p == v).expect("bound");
                            args[i].clone()
                        }
                    })
                    .collect();
                cost_lookup(fname, &concrete).ok_or_else(|| {
                    if fname == "move-cost" && concrete.len() == 2 {
                        GroundError::MissingMoveCost(concrete[0].clone(), concrete[1].clone())
                    } else {
                        GroundError::UnknownCostFunction(fname.clone())
                    }
                })?
            }
        };
        let ga = GroundAction { schema: name, args, pre, add, del, cost };
        if !cost.is_finite() || cost < 0.0 {
            return Err(GroundError::BadCost(ga.name(), cost));
        }
        actions.push(ga);
    }

    Ok(GroundedDomain { facts, actions, index, metric_schema: None })
}

fn index_by_pred(facts: &[Fact]) -> HashMap<&str, Vec<&Fact>> {
    let mut map: HashMap<&str, Vec<&Fact>> = HashMap::new();
    for f in facts {
        map.entry(f.pred.as_str()).or_default().push(f);
    }
    map
}

trait AsFact {
    fn as_fact(&self) -> Fact;
}

impl AsFact for Fact {
    fn as_fact(&self) -> Fact {
        self.clone()
    }
}

impl AsFact for Literal {
    fn as_fact(&self) -> Fact {
        literal_fact(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_region_env;
    use crate::motion::{compute_move_costs, MotionParams};
    use crate::pddl::{parse_domain, BLOCKWORLD_DOMAIN};

    fn grounded_fixture() -> (Environment, GroundedDomain) {
        let env = two_region_env();
        let domain = parse_domain(BLOCKWORLD_DOMAIN).unwrap();
        let costs = compute_move_costs(&env, &MotionParams::default()).unwrap();
        let gd = ground_domain(&domain, &env, &costs).unwrap();
        (env, gd)
    }

    #[test]
    fn move_count_is_ordered_pairs_of_locations() {
        // 2 regions x 2 slots -> 6 locations -> P(6,2) = 30 moves.
        let (_, gd) = grounded_fixture();
        let moves = gd.actions.iter().filter(|a| a.schema == "move").count();
        assert_eq!(moves, 30);
    }

    #[test]
    fn every_pick_and_place_costs_100() {
        let (_, gd) = grounded_fixture();
        let mut seen = 0;
        for a in &gd.actions {
            if a.schema == "pick" || a.schema == "place" {
                assert_eq!(a.cost, PICK_PLACE_COST);
                seen += 1;
            }
        }
        // 3 blocks x 4 slots, for both pick and place.
        assert_eq!(seen, 2 * 3 * 4);
    }

    #[test]
    fn add_and_delete_never_overlap() {
        let (_, gd) = grounded_fixture();
        for a in &gd.actions {
            assert!(a.add.iter().all(|f| a.del.binary_search(f).is_err()), "{}", a.name());
        }
    }

    #[test]
    fn satisfied_goal_is_subset_of_init() {
        let (env, gd) = grounded_fixture();
        let task = TaskSpec::single("A", "red");
        let init = gd.state_facts(&env, &env.initial_state).unwrap();
        let goal = gd.task_goal(&env, &task).unwrap();
        assert!(goal.iter().all(|g| init.binary_search(g).is_ok()));
    }

    #[test]
    fn missing_move_cost_is_reported() {
        let env = two_region_env();
        let domain = parse_domain(BLOCKWORLD_DOMAIN).unwrap();
        let empty = MoveCostTable { locations: vec![], costs: vec![] };
        let err = ground_domain(&domain, &env, &empty).unwrap_err();
        assert!(matches!(err, GroundError::MissingMoveCost(..)));
    }
}
