//! The blockworld domain model: environments with colored regions and
//! capacity-one slots, movable blocks, the robot, and the task
//! distribution the planner anticipates over.
//!
//! All values here are immutable after construction and safe to share
//! across threads.

mod generate;
mod schema;
mod state;
mod task;

pub use generate::{generate_environment, GenParams};
pub use schema::{read_env_file, write_env_file, EnvFile, SCHEMA_VERSION};
pub use state::{apply_action, random_reachable_state};
pub use task::{is_task_satisfied, parse_task, sample_task};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};

/// A named color from the fixed palette, stored as RGBA in `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Color(pub [f64; 4]);

impl Color {
    pub const RED: Color = Color([1.0, 0.0, 0.0, 1.0]);
    pub const BLUE: Color = Color([0.0, 0.0, 1.0, 1.0]);
    pub const GREEN: Color = Color([0.0, 1.0, 0.0, 1.0]);
    pub const YELLOW: Color = Color([1.0, 1.0, 0.0, 1.0]);
    pub const WHITE: Color = Color([1.0, 1.0, 1.0, 1.0]);

    pub const PALETTE: [(&'static str, Color); 5] = [
        ("red", Color::RED),
        ("blue", Color::BLUE),
        ("green", Color::GREEN),
        ("yellow", Color::YELLOW),
        ("white", Color::WHITE),
    ];

    pub fn is_white(&self) -> bool {
        *self == Color::WHITE
    }

    pub fn name(&self) -> &'static str {
        Color::PALETTE
            .iter()
            .find(|(_, c)| c == self)
            .map(|(n, _)| *n)
            .unwrap_or("custom")
    }
}

macro_rules! id_type {
    ($name:ident) => {
        #[derive(
            Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }
    };
}

id_type!(RegionId);
id_type!(SlotId);
id_type!(ObjectId);

/// A capacity-one placement location inside a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub id: SlotId,
    pub position: Point,
}

/// A rectangular surface with slots on top. The robot cannot drive through
/// it; it interacts from the access points on its boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: RegionId,
    pub color: Color,
    pub footprint: Rect,
    pub slots: Vec<Slot>,
    /// Free-space point next to the footprint where the robot can stand.
    pub approach_point: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectDef {
    pub id: ObjectId,
    pub color: Color,
    pub semantic_class: String,
}

/// Somewhere the robot can stand: a region's approach point or the access
/// point of a slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Region(RegionId),
    Slot(SlotId),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Region(r) => f.write_str(r.as_str()),
            Location::Slot(s) => f.write_str(s.as_str()),
        }
    }
}

/// Full symbolic snapshot of the world: which object sits in which slot,
/// where the robot stands, and what it holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorldState {
    pub placements: BTreeMap<ObjectId, SlotId>,
    pub robot_at: Location,
    pub holding: Option<ObjectId>,
}

impl WorldState {
    /// Checks the structural invariants: slot capacity one, and a held
    /// object is never simultaneously placed.
    pub fn check_invariants(&self) -> Result<(), DomainError> {
        let mut seen = std::collections::BTreeSet::new();
        for slot in self.placements.values() {
            if !seen.insert(slot) {
                return Err(DomainError::SlotOverfull(slot.clone()));
            }
        }
        if let Some(held) = &self.holding {
            if self.placements.contains_key(held) {
                return Err(DomainError::HeldAndPlaced(held.clone()));
            }
        }
        Ok(())
    }

    pub fn slot_occupant(&self, slot: &SlotId) -> Option<&ObjectId> {
        self.placements.iter().find(|(_, s)| *s == slot).map(|(o, _)| o)
    }

    pub fn is_slot_free(&self, slot: &SlotId) -> bool {
        self.slot_occupant(slot).is_none()
    }
}

/// A placement directive: put this object somewhere in that region.
pub type Directive = (ObjectId, RegionId);

/// One or two placement directives over distinct, non-white objects and
/// non-white regions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TaskSpec {
    pub directives: Vec<Directive>,
}

impl TaskSpec {
    pub fn new(directives: Vec<Directive>) -> Result<Self, DomainError> {
        if directives.is_empty() || directives.len() > 2 {
            return Err(DomainError::BadTaskArity(directives.len()));
        }
        if directives.len() == 2 && directives[0].0 == directives[1].0 {
            return Err(DomainError::DuplicateTaskObject(directives[0].0.clone()));
        }
        Ok(TaskSpec { directives })
    }

    pub fn single(object: impl Into<ObjectId>, region: impl Into<RegionId>) -> Self {
        TaskSpec {
            directives: vec![(object.into(), region.into())],
        }
    }
}

impl fmt::Display for TaskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .directives
            .iter()
            .map(|(o, r)| format!("{}:{}", o, r))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// The task distribution inherent to an environment. Probabilities are
/// positive and sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDistribution {
    pub entries: Vec<(TaskSpec, f64)>,
}

impl TaskDistribution {
    pub fn new(entries: Vec<(TaskSpec, f64)>) -> Result<Self, DomainError> {
        if entries.is_empty() {
            return Err(DomainError::EmptyDistribution);
        }
        let total: f64 = entries.iter().map(|(_, p)| p).sum();
        if entries.iter().any(|(_, p)| *p <= 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(DomainError::BadProbabilities(total));
        }
        Ok(TaskDistribution { entries })
    }

    /// Equiprobable distribution over the given tasks.
    pub fn uniform(tasks: Vec<TaskSpec>) -> Result<Self, DomainError> {
        let n = tasks.len();
        if n == 0 {
            return Err(DomainError::EmptyDistribution);
        }
        let p = 1.0 / n as f64;
        TaskDistribution::new(tasks.into_iter().map(|t| (t, p)).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A procedurally generated world: geometry, entities, initial state, and
/// the task distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub width: f64,
    pub height: f64,
    pub regions: Vec<Region>,
    pub objects: Vec<ObjectDef>,
    pub robot_radius: f64,
    pub initial_state: WorldState,
    pub task_distribution: TaskDistribution,
}

impl Environment {
    pub fn region(&self, id: &RegionId) -> Option<&Region> {
        self.regions.iter().find(|r| &r.id == id)
    }

    pub fn object(&self, id: &ObjectId) -> Option<&ObjectDef> {
        self.objects.iter().find(|o| &o.id == id)
    }

    pub fn slot(&self, id: &SlotId) -> Option<(&Region, &Slot)> {
        self.regions
            .iter()
            .find_map(|r| r.slots.iter().find(|s| &s.id == id).map(|s| (r, s)))
    }

    pub fn slots(&self) -> impl Iterator<Item = (&Region, &Slot)> {
        self.regions.iter().flat_map(|r| r.slots.iter().map(move |s| (r, s)))
    }

    /// All navigation locations: every slot access point plus every region
    /// approach point, in a fixed deterministic order.
    pub fn locations(&self) -> Vec<Location> {
        let mut locs: Vec<Location> = self
            .regions
            .iter()
            .map(|r| Location::Region(r.id.clone()))
            .chain(self.slots().map(|(_, s)| Location::Slot(s.id.clone())))
            .collect();
        locs.sort();
        locs
    }

    /// Where the robot physically stands for a symbolic location: the slot
    /// access point or the region approach point.
    pub fn location_point(&self, loc: &Location) -> Option<Point> {
        match loc {
            Location::Region(r) => self.region(r).map(|r| r.approach_point),
            Location::Slot(s) => self.slot_access_point(s),
        }
    }

    /// Point just outside the region footprint from which a slot is
    /// manipulated: the slot position projected out of the inflated
    /// footprint through the nearest edge.
    pub fn slot_access_point(&self, id: &SlotId) -> Option<Point> {
        let (region, slot) = self.slot(id)?;
        Some(access_point(&region.footprint, &slot.position, self.robot_radius))
    }

    /// Validates every environment invariant; used after generation and
    /// after deserializing untrusted files.
    pub fn check_invariants(&self) -> Result<(), DomainError> {
        let bounds = Rect::new(0.0, 0.0, self.width, self.height);
        for (i, r) in self.regions.iter().enumerate() {
            let fp = r.footprint;
            if fp.x < 0.0 || fp.y < 0.0 || fp.x + fp.w > self.width || fp.y + fp.h > self.height {
                return Err(DomainError::RegionOutOfBounds(r.id.clone()));
            }
            for other in &self.regions[i + 1..] {
                if fp.overlaps(&other.footprint) {
                    return Err(DomainError::RegionsOverlap(r.id.clone(), other.id.clone()));
                }
            }
            for s in &r.slots {
                if !fp.contains(&s.position) {
                    return Err(DomainError::SlotOutsideRegion(s.id.clone()));
                }
            }
            if !bounds.contains(&r.approach_point)
                || self.regions.iter().any(|o| o.footprint.contains(&r.approach_point))
            {
                return Err(DomainError::BadApproachPoint(r.id.clone()));
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        for o in &self.objects {
            if !ids.insert(&o.id) {
                return Err(DomainError::DuplicateObject(o.id.clone()));
            }
        }
        self.initial_state.check_invariants()?;
        for (obj, slot) in &self.initial_state.placements {
            if self.object(obj).is_none() {
                return Err(DomainError::UnknownEntity("object", obj.0.clone()));
            }
            if self.slot(slot).is_none() {
                return Err(DomainError::UnknownEntity("slot", slot.0.clone()));
            }
        }
        if self.task_distribution.is_empty() {
            return Err(DomainError::EmptyDistribution);
        }
        for (task, _) in &self.task_distribution.entries {
            self.check_task(task)?;
        }
        Ok(())
    }

    /// Validates that a task references known, non-white entities.
    pub fn check_task(&self, task: &TaskSpec) -> Result<(), DomainError> {
        for (obj, region) in &task.directives {
            let od = self
                .object(obj)
                .ok_or_else(|| DomainError::UnknownEntity("object", obj.0.clone()))?;
            let rd = self
                .region(region)
                .ok_or_else(|| DomainError::UnknownEntity("region", region.0.clone()))?;
            if od.color.is_white() || rd.color.is_white() {
                return Err(DomainError::WhiteEntityInTask(task.clone()));
            }
        }
        Ok(())
    }
}

/// Access point for a slot at `pos` inside `footprint`: step out through
/// the nearest footprint edge, `radius + 0.1` clear of it.
pub(crate) fn access_point(footprint: &Rect, pos: &Point, radius: f64) -> Point {
    let clearance = radius + 0.1;
    let left = pos.x - footprint.x;
    let right = footprint.x + footprint.w - pos.x;
    let down = pos.y - footprint.y;
    let up = footprint.y + footprint.h - pos.y;
    let min = left.min(right).min(down).min(up);
    if min == left {
        Point::new(footprint.x - clearance, pos.y)
    } else if min == right {
        Point::new(footprint.x + footprint.w + clearance, pos.y)
    } else if min == down {
        Point::new(pos.x, footprint.y - clearance)
    } else {
        Point::new(pos.x, footprint.y + footprint.h + clearance)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum DomainError {
    #[error("unknown {0}: {1}")]
    UnknownEntity(&'static str, String),
    #[error("slot {0} holds more than one object")]
    SlotOverfull(SlotId),
    #[error("object {0} is both held and placed")]
    HeldAndPlaced(ObjectId),
    #[error("task must have 1 or 2 directives, got {0}")]
    BadTaskArity(usize),
    #[error("task directives reference object {0} twice")]
    DuplicateTaskObject(ObjectId),
    #[error("task distribution is empty")]
    EmptyDistribution,
    #[error("task probabilities must be positive and sum to 1, got {0}")]
    BadProbabilities(f64),
    #[error("task references a white entity: {0}")]
    WhiteEntityInTask(TaskSpec),
    #[error("region {0} extends outside the workspace")]
    RegionOutOfBounds(RegionId),
    #[error("regions {0} and {1} overlap")]
    RegionsOverlap(RegionId, RegionId),
    #[error("slot {0} lies outside its region footprint")]
    SlotOutsideRegion(SlotId),
    #[error("approach point of region {0} is not in free space")]
    BadApproachPoint(RegionId),
    #[error("duplicate object id {0}")]
    DuplicateObject(ObjectId),
    #[error("action {action} not applicable: {reason}")]
    PreconditionViolation { action: String, reason: String },
    #[error("cannot parse task spec {0:?}: expected \"obj:region[,obj:region]\"")]
    BadTaskSyntax(String),
}
