//! Renders environments and tasks to PDDL text. Parsing the rendered pair
//! and grounding it yields a problem isomorphic to grounding the
//! structures directly; floats print in shortest round-trip form so costs
//! survive the text detour bit-exactly.

use std::fmt::Write;

use crate::blockworld::{Environment, TaskSpec, WorldState};
use crate::motion::MoveCostTable;

use super::ground::ROBOT;
use super::BLOCKWORLD_DOMAIN;

/// The domain side of the text interface.
pub fn render_domain() -> &'static str {
    BLOCKWORLD_DOMAIN
}

/// Renders a problem file for the given start state and task, embedding
/// the move-cost table as function assignments.
pub fn render_problem(
    env: &Environment,
    s0: &WorldState,
    task: &TaskSpec,
    move_costs: &MoveCostTable,
) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "(define (problem blockworld-env-{})", env.seed).unwrap();
    writeln!(w, "  (:domain blockworld)").unwrap();

    write!(w, "  (:objects {ROBOT}").unwrap();
    for region in &env.regions {
        write!(w, " {}", region.id).unwrap();
        for slot in &region.slots {
            write!(w, " {}", slot.id).unwrap();
        }
    }
    for obj in &env.objects {
        write!(w, " {}", obj.id).unwrap();
    }
    writeln!(w, ")").unwrap();

    writeln!(w, "  (:init").unwrap();
    writeln!(w, "    (Robot {ROBOT})").unwrap();
    for loc in env.locations() {
        writeln!(w, "    (Location {loc})").unwrap();
    }
    for region in &env.regions {
        writeln!(w, "    (Region {})", region.id).unwrap();
        for slot in &region.slots {
            writeln!(w, "    (Slot {}) (Within {} {})", slot.id, slot.id, region.id).unwrap();
        }
    }
    for obj in &env.objects {
        writeln!(w, "    (Block {})", obj.id).unwrap();
    }
    writeln!(w, "    (At {ROBOT} {})", s0.robot_at).unwrap();
    match &s0.holding {
        Some(obj) => writeln!(w, "    (Holding {ROBOT} {obj})").unwrap(),
        None => writeln!(w, "    (HandEmpty {ROBOT})").unwrap(),
    }
    for (obj, slot) in &s0.placements {
        let (region, _) = env.slot(slot).expect("placement slot exists");
        writeln!(w, "    (In {obj} {slot}) (InRegion {obj} {})", region.id).unwrap();
    }
    for (_, slot) in env.slots() {
        if s0.is_slot_free(&slot.id) {
            writeln!(w, "    (Free {})", slot.id).unwrap();
        }
    }
    writeln!(w, "    (= (total-cost) 0)").unwrap();
    for a in &move_costs.locations {
        for b in &move_costs.locations {
            if a != b {
                let c = move_costs.cost(a, b).expect("table is complete");
                writeln!(w, "    (= (move-cost {a} {b}) {c})").unwrap();
            }
        }
    }
    writeln!(w, "  )").unwrap();

    write!(w, "  (:goal (and").unwrap();
    for (obj, region) in &task.directives {
        write!(w, " (InRegion {obj} {region})").unwrap();
    }
    write!(w, " (HandEmpty {ROBOT})").unwrap();
    writeln!(w, "))").unwrap();
    writeln!(w, "  (:metric minimize (total-cost))").unwrap();
    writeln!(w, ")").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockworld::TaskSpec;
    use crate::fixtures::two_region_env;
    use crate::motion::{compute_move_costs, MotionParams};
    use crate::pddl::{ground, ground_problem, parse_domain, parse_problem};

    #[test]
    fn rendered_problem_parses_and_grounds_isomorphically() {
        let env = two_region_env();
        let costs = compute_move_costs(&env, &MotionParams::default()).unwrap();
        let domain = parse_domain(render_domain()).unwrap();
        let task = TaskSpec::single("A", "blue");

        let direct = ground(&domain, &env, &env.initial_state, &task, &costs).unwrap();

        let text = render_problem(&env, &env.initial_state, &task, &costs);
        let problem = parse_problem(&text).unwrap();
        let (gd, init, goal) = ground_problem(&domain, &problem).unwrap();

        // Canonical ordering makes isomorphism plain equality.
        assert_eq!(direct.facts, gd.facts);
        assert_eq!(direct.actions, gd.actions);
        assert_eq!(direct.init, init);
        assert_eq!(direct.goal, goal);
    }

    #[test]
    fn rendering_is_deterministic() {
        let env = two_region_env();
        let costs = compute_move_costs(&env, &MotionParams::default()).unwrap();
        let task = TaskSpec::single("B", "red");
        let a = render_problem(&env, &env.initial_state, &task, &costs);
        let b = render_problem(&env, &env.initial_state, &task, &costs);
        assert_eq!(a, b);
    }

    #[test]
    fn two_directive_goal_has_two_membership_conjuncts() {
        let env = two_region_env();
        let costs = compute_move_costs(&env, &MotionParams::default()).unwrap();
        let task = TaskSpec::new(vec![
            ("A".into(), "blue".into()),
            ("B".into(), "red".into()),
        ])
        .unwrap();
        let text = render_problem(&env, &env.initial_state, &task, &costs);
        assert_eq!(text.matches("(InRegion A blue)").count() >= 1, true);
        let goal_line = text.lines().find(|l| l.contains(":goal")).unwrap();
        assert_eq!(goal_line.matches("InRegion").count(), 2);
    }
}
