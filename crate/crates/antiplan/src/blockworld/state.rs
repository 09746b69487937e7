//! World-state transitions. `apply_action` interprets grounded pick,
//! place, and move actions directly on a `WorldState`; the fact-level
//! successor in the grounder must commute with it.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{DomainError, Environment, Location, ObjectId, SlotId, WorldState};
use crate::pddl::GroundAction;

fn violation(action: &GroundAction, reason: impl Into<String>) -> DomainError {
    DomainError::PreconditionViolation {
        action: action.name(),
        reason: reason.into(),
    }
}

/// Applies a grounded action to a state, checking preconditions.
///
/// Argument layout follows the blockworld schemas: `pick ?r ?b ?s ...`,
/// `place ?r ?b ?s ...`, `move ?r ?from ?to`.
pub fn apply_action(
    env: &Environment,
    state: &WorldState,
    action: &GroundAction,
) -> Result<WorldState, DomainError> {
    let arg = |i: usize| -> Result<&str, DomainError> {
        action
            .args
            .get(i)
            .map(|s| s.as_str())
            .ok_or_else(|| violation(action, format!("missing argument {i}")))
    };
    let mut next = state.clone();
    match action.schema.as_str() {
        "pick" => {
            let block = ObjectId::new(arg(1)?);
            let slot = SlotId::new(arg(2)?);
            if env.object(&block).is_none() {
                return Err(DomainError::UnknownEntity("object", block.0));
            }
            if state.holding.is_some() {
                return Err(violation(action, "hand not empty"));
            }
            if state.robot_at != Location::Slot(slot.clone()) {
                return Err(violation(action, format!("robot not at {slot}")));
            }
            if state.placements.get(&block) != Some(&slot) {
                return Err(violation(action, format!("{block} not in {slot}")));
            }
            next.placements.remove(&block);
            next.holding = Some(block);
        }
        "place" => {
            let block = ObjectId::new(arg(1)?);
            let slot = SlotId::new(arg(2)?);
            if env.slot(&slot).is_none() {
                return Err(DomainError::UnknownEntity("slot", slot.0));
            }
            if state.holding.as_ref() != Some(&block) {
                return Err(violation(action, format!("not holding {block}")));
            }
            if state.robot_at != Location::Slot(slot.clone()) {
                return Err(violation(action, format!("robot not at {slot}")));
            }
            if !state.is_slot_free(&slot) {
                return Err(violation(action, format!("{slot} occupied")));
            }
            next.placements.insert(block, slot);
            next.holding = None;
        }
        "move" => {
            let from = parse_location(env, arg(1)?)?;
            let to = parse_location(env, arg(2)?)?;
            if state.robot_at != from {
                return Err(violation(action, format!("robot not at {from}")));
            }
            if from == to {
                return Err(violation(action, "move to current location"));
            }
            next.robot_at = to;
        }
        other => {
            return Err(violation(action, format!("unknown schema {other}")));
        }
    }
    Ok(next)
}

fn parse_location(env: &Environment, name: &str) -> Result<Location, DomainError> {
    let slot = SlotId::new(name);
    if env.slot(&slot).is_some() {
        return Ok(Location::Slot(slot));
    }
    let region = super::RegionId::new(name);
    if env.region(&region).is_some() {
        return Ok(Location::Region(region));
    }
    Err(DomainError::UnknownEntity("location", name.to_string()))
}

/// Samples a uniformly random legal placement of all objects into distinct
/// slots plus a random robot location, with an empty hand. Any such state
/// is reachable as long as the environment keeps at least one free slot.
pub fn random_reachable_state(env: &Environment, rng: &mut impl Rng) -> WorldState {
    let slot_ids: Vec<SlotId> = env.slots().map(|(_, s)| s.id.clone()).collect();
    let mut chosen = slot_ids.clone();
    chosen.shuffle(rng);
    let placements = env
        .objects
        .iter()
        .map(|o| o.id.clone())
        .zip(chosen.into_iter())
        .collect();
    let locations = env.locations();
    let robot_at = locations[rng.gen_range(0..locations.len())].clone();
    WorldState {
        placements,
        robot_at,
        holding: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_region_env;
    use crate::pddl::GroundAction;

    fn ga(schema: &str, args: &[&str]) -> GroundAction {
        GroundAction {
            schema: schema.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
            pre: vec![],
            add: vec![],
            del: vec![],
            cost: 100.0,
        }
    }

    #[test]
    fn pick_then_place_is_identity() {
        let env = two_region_env();
        let mut s = env.initial_state.clone();
        s.robot_at = Location::Slot(SlotId::new("red_s0"));
        let picked = apply_action(&env, &s, &ga("pick", &["robot", "A", "red_s0"])).unwrap();
        assert_eq!(picked.holding, Some(ObjectId::new("A")));
        assert!(picked.is_slot_free(&SlotId::new("red_s0")));
        let back = apply_action(&env, &picked, &ga("place", &["robot", "A", "red_s0"])).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn pick_with_full_hand_is_rejected() {
        let env = two_region_env();
        let mut s = env.initial_state.clone();
        s.robot_at = Location::Slot(SlotId::new("red_s0"));
        let picked = apply_action(&env, &s, &ga("pick", &["robot", "A", "red_s0"])).unwrap();
        let err = apply_action(&env, &picked, &ga("pick", &["robot", "B", "blue_s0"]));
        assert!(matches!(err, Err(DomainError::PreconditionViolation { .. })));
    }

    #[test]
    fn move_changes_only_robot() {
        let env = two_region_env();
        let s = env.initial_state.clone();
        let from = s.robot_at.to_string();
        let moved = apply_action(&env, &s, &ga("move", &[&"robot", &from, &"blue_s1"])).unwrap();
        assert_eq!(moved.robot_at, Location::Slot(SlotId::new("blue_s1")));
        assert_eq!(moved.placements, s.placements);
        assert_eq!(moved.holding, s.holding);
    }

    #[test]
    fn random_states_satisfy_invariants() {
        let env = two_region_env();
        let mut rng = rand::rngs::mock::StepRng::new(7, 0x9e37_79b9_7f4a_7c15);
        for _ in 0..50 {
            let s = random_reachable_state(&env, &mut rng);
            s.check_invariants().unwrap();
            assert_eq!(s.placements.len(), env.objects.len());
        }
    }
}
