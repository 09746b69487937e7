//! Versioned JSON schema for environments. Files are conventionally named
//! `env_<seed>.json` and carry the initial state inline plus, optionally,
//! the precomputed move-cost table for reproducibility.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    DomainError, Environment, Location, ObjectDef, ObjectId, Region, SlotId, TaskDistribution,
    WorldState,
};
use crate::motion::MoveCostTable;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvFile {
    pub schema_version: u32,
    pub seed: u64,
    pub width: f64,
    pub height: f64,
    pub robot_radius: f64,
    pub regions: Vec<Region>,
    pub objects: Vec<ObjectDef>,
    pub placements: BTreeMap<ObjectId, SlotId>,
    pub robot_at: Location,
    pub holding: Option<ObjectId>,
    pub task_distribution: TaskDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub move_costs: Option<MoveCostTable>,
}

impl EnvFile {
    pub fn from_environment(env: &Environment, move_costs: Option<&MoveCostTable>) -> Self {
        EnvFile {
            schema_version: SCHEMA_VERSION,
            seed: env.seed,
            width: env.width,
            height: env.height,
            robot_radius: env.robot_radius,
            regions: env.regions.clone(),
            objects: env.objects.clone(),
            placements: env.initial_state.placements.clone(),
            robot_at: env.initial_state.robot_at.clone(),
            holding: env.initial_state.holding.clone(),
            task_distribution: env.task_distribution.clone(),
            move_costs: move_costs.cloned(),
        }
    }

    pub fn into_environment(self) -> Result<(Environment, Option<MoveCostTable>), DomainError> {
        let env = Environment {
            seed: self.seed,
            width: self.width,
            height: self.height,
            regions: self.regions,
            objects: self.objects,
            robot_radius: self.robot_radius,
            initial_state: WorldState {
                placements: self.placements,
                robot_at: self.robot_at,
                holding: self.holding,
            },
            task_distribution: self.task_distribution,
        };
        env.check_invariants()?;
        Ok((env, self.move_costs))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0}, expected {SCHEMA_VERSION}")]
    Version(u32),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

pub fn write_env_file(
    path: impl AsRef<Path>,
    env: &Environment,
    move_costs: Option<&MoveCostTable>,
) -> Result<(), SchemaError> {
    let file = EnvFile::from_environment(env, move_costs);
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_env_file(
    path: impl AsRef<Path>,
) -> Result<(Environment, Option<MoveCostTable>), SchemaError> {
    let text = std::fs::read_to_string(path)?;
    let file: EnvFile = serde_json::from_str(&text)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(SchemaError::Version(file.schema_version));
    }
    Ok(file.into_environment()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_region_env;

    #[test]
    fn env_file_round_trip() {
        let env = two_region_env();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(format!("env_{}.json", env.seed));
        write_env_file(&path, &env, None).unwrap();
        let (back, costs) = read_env_file(&path).unwrap();
        assert_eq!(back, env);
        assert!(costs.is_none());
    }

    #[test]
    fn bad_version_is_rejected() {
        let env = two_region_env();
        let mut file = EnvFile::from_environment(&env, None);
        file.schema_version = 99;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("env_bad.json");
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        assert!(matches!(read_env_file(&path), Err(SchemaError::Version(99))));
    }
}
