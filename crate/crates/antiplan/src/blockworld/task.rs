//! Task predicates and sampling from the task distribution.

use rand::Rng;

use super::{DomainError, Environment, ObjectId, RegionId, TaskDistribution, TaskSpec, WorldState};

/// True iff every directive's object occupies some slot of its target
/// region and the robot's hand is empty. Does not depend on the robot's
/// location.
pub fn is_task_satisfied(
    env: &Environment,
    state: &WorldState,
    task: &TaskSpec,
) -> Result<bool, DomainError> {
    if state.holding.is_some() {
        // A directive object could be in hand; the task is incomplete
        // either way.
        for (obj, region) in &task.directives {
            if env.object(obj).is_none() {
                return Err(DomainError::UnknownEntity("object", obj.0.clone()));
            }
            if env.region(region).is_none() {
                return Err(DomainError::UnknownEntity("region", region.0.clone()));
            }
        }
        return Ok(false);
    }
    for (obj, region) in &task.directives {
        if env.object(obj).is_none() {
            return Err(DomainError::UnknownEntity("object", obj.0.clone()));
        }
        let region_def = env
            .region(region)
            .ok_or_else(|| DomainError::UnknownEntity("region", region.0.clone()))?;
        let in_region = state
            .placements
            .get(obj)
            .map(|slot| region_def.slots.iter().any(|s| &s.id == slot))
            .unwrap_or(false);
        if !in_region {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Draws a task according to the distribution's probabilities.
pub fn sample_task<'d>(dist: &'d TaskDistribution, rng: &mut impl Rng) -> &'d TaskSpec {
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    for (task, p) in &dist.entries {
        acc += p;
        if x < acc {
            return task;
        }
    }
    // Rounding can leave a sliver above the last accumulator value.
    &dist.entries.last().expect("distribution is non-empty").0
}

/// Parses the CLI task syntax `obj:region[,obj:region]`, e.g. `A:red` or
/// `A:red,B:blue`.
pub fn parse_task(text: &str) -> Result<TaskSpec, DomainError> {
    let mut directives = Vec::new();
    for part in text.split(',') {
        let (obj, region) = part
            .split_once(':')
            .ok_or_else(|| DomainError::BadTaskSyntax(text.to_string()))?;
        let (obj, region) = (obj.trim(), region.trim());
        if obj.is_empty() || region.is_empty() {
            return Err(DomainError::BadTaskSyntax(text.to_string()));
        }
        directives.push((ObjectId::new(obj), RegionId::new(region)));
    }
    TaskSpec::new(directives).map_err(|_| DomainError::BadTaskSyntax(text.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_region_env;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn satisfied_when_object_in_target_region() {
        let env = two_region_env();
        let task = TaskSpec::single("A", "red");
        // A starts in red_s0 in the fixture.
        assert!(is_task_satisfied(&env, &env.initial_state, &task).unwrap());
        let other = TaskSpec::single("A", "blue");
        assert!(!is_task_satisfied(&env, &env.initial_state, &other).unwrap());
    }

    #[test]
    fn held_object_does_not_satisfy() {
        let env = two_region_env();
        let mut s = env.initial_state.clone();
        let a = ObjectId::new("A");
        s.placements.remove(&a);
        s.holding = Some(a);
        let task = TaskSpec::single("A", "red");
        assert!(!is_task_satisfied(&env, &s, &task).unwrap());
    }

    #[test]
    fn unknown_entity_is_an_error() {
        let env = two_region_env();
        let task = TaskSpec::single("nope", "red");
        assert!(matches!(
            is_task_satisfied(&env, &env.initial_state, &task),
            Err(DomainError::UnknownEntity(..))
        ));
    }

    #[test]
    fn single_entry_distribution_always_sampled() {
        let task = TaskSpec::single("A", "red");
        let dist = TaskDistribution::uniform(vec![task.clone()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(sample_task(&dist, &mut rng), &task);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let tasks: Vec<TaskSpec> = (0..10)
            .map(|i| TaskSpec::single(format!("o{i}"), "red"))
            .collect();
        let dist = TaskDistribution::uniform(tasks).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| sample_task(&dist, &mut rng).clone()).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn task_syntax_round_trip() {
        let task = parse_task("A:red,B:blue").unwrap();
        assert_eq!(task.to_string(), "A:red,B:blue");
        assert!(parse_task("A").is_err());
        assert!(parse_task("A:red,A:blue").is_err());
        assert!(parse_task("").is_err());
    }
}
