//! Ground-truth rule application for every task family.
//!
//! Solvers are pure functions of the input grid and the task parameters.

mod attribute;
mod physics;
mod sequential;
mod spatial;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use attribute::{solve_count, solve_shape, solve_size};
pub use physics::{gravity_step, settle_depth, solve_expansion, solve_gravity, solve_reflection, trace_ray, RayTrace};
pub use sequential::{
    category_rules, path_search, solve_categorization, solve_planning, solve_sort, sort_layout, CategoryRule,
    CategoryRules, PathSearch,
};
pub use spatial::{solve_move, solve_rotation, solve_symmetry};

use crate::constraints::{constraint_set, ConstraintViolation};
use crate::grid::{Axis, Grid, GridError};
use crate::taxonomy::{
    CountMode, Direction, Family, Heading, RotationPivot, ShapeMode, SizeMode, SortDirection, SortKey, TaskKind,
    TaskSpec,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("input violates task constraints: {0}")]
    ConstraintViolated(#[from] ConstraintViolation),
    #[error("parameters for {params} passed to a {task} task")]
    ParamsMismatch { task: Family, params: Family },
    #[error("variable value {value} outside {min}..={max}")]
    VariableOutOfRange { value: i32, min: i32, max: i32 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("object with attribute {0} matches no single category")]
    AmbiguousCategory(u8),
    #[error("sort keys tie; order is undefined")]
    TieBreak,
    #[error("no unique shortest path from agent to goal")]
    NoUniquePath,
    #[error("ray cannot leave the emitter")]
    DegenerateRay,
    #[error("{0}")]
    Malformed(String),
}

pub(crate) fn malformed(msg: impl Into<String>) -> SolveError {
    SolveError::Malformed(msg.into())
}

/// Family-specific rule parameters, fully determined by a task and its
/// variable value (see [`SolverParams::for_task`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SolverParams {
    Size { mode: SizeMode, side: u8 },
    Count { mode: CountMode, target_count: u8 },
    Shape { mode: ShapeMode, shape_index: u8 },
    Move { direction: Direction, distance: u8 },
    Rotation { pivot: RotationPivot, quarter_turns: u8 },
    Symmetry { axis: Axis, object_count: u8 },
    Categorization { rules: CategoryRules },
    Sort { key: SortKey, direction: SortDirection, object_count: u8 },
    Planning { steps: u8 },
    Gravity { applications: u8 },
    Reflection { heading: Heading, bounces: u8 },
    Expansion { applications: u8 },
}

impl SolverParams {
    pub fn for_task(task: &TaskSpec, value: i32) -> Result<Self, SolveError> {
        let var = &task.variable;
        if !var.contains(value) {
            return Err(SolveError::VariableOutOfRange {
                value,
                min: var.min,
                max: var.max,
            });
        }
        let v = value as u8;
        Ok(match task.kind {
            TaskKind::Size(mode) => SolverParams::Size { mode, side: v },
            TaskKind::Count(mode) => SolverParams::Count { mode, target_count: v },
            TaskKind::Shape(mode) => SolverParams::Shape { mode, shape_index: v },
            TaskKind::Move(direction) => SolverParams::Move { direction, distance: v },
            TaskKind::Rotation(pivot) => SolverParams::Rotation {
                pivot,
                quarter_turns: (value / 90) as u8,
            },
            TaskKind::Symmetry(axis) => SolverParams::Symmetry { axis, object_count: v },
            TaskKind::Categorization(attr) => SolverParams::Categorization {
                rules: category_rules(attr, value as usize),
            },
            TaskKind::Sort(key, direction) => SolverParams::Sort {
                key,
                direction,
                object_count: v,
            },
            TaskKind::Planning(_) => SolverParams::Planning { steps: v },
            TaskKind::Gravity(_) => SolverParams::Gravity { applications: v },
            TaskKind::Reflection(heading) => SolverParams::Reflection { heading, bounces: v },
            TaskKind::Expansion(_) => SolverParams::Expansion { applications: v },
        })
    }

    pub fn family(&self) -> Family {
        match self {
            SolverParams::Size { .. } => Family::Size,
            SolverParams::Count { .. } => Family::Count,
            SolverParams::Shape { .. } => Family::Shape,
            SolverParams::Move { .. } => Family::Move,
            SolverParams::Rotation { .. } => Family::Rotation,
            SolverParams::Symmetry { .. } => Family::Symmetry,
            SolverParams::Categorization { .. } => Family::Categorization,
            SolverParams::Sort { .. } => Family::Sort,
            SolverParams::Planning { .. } => Family::Planning,
            SolverParams::Gravity { .. } => Family::Gravity,
            SolverParams::Reflection { .. } => Family::Reflection,
            SolverParams::Expansion { .. } => Family::Expansion,
        }
    }

    /// The task variable value these parameters encode.
    pub fn variable_value(&self) -> i32 {
        match self {
            SolverParams::Size { side, .. } => i32::from(*side),
            SolverParams::Count { target_count, .. } => i32::from(*target_count),
            SolverParams::Shape { shape_index, .. } => i32::from(*shape_index),
            SolverParams::Move { distance, .. } => i32::from(*distance),
            SolverParams::Rotation { quarter_turns, .. } => i32::from(*quarter_turns) * 90,
            SolverParams::Symmetry { object_count, .. } => i32::from(*object_count),
            SolverParams::Categorization { rules } => rules.rules.len() as i32,
            SolverParams::Sort { object_count, .. } => i32::from(*object_count),
            SolverParams::Planning { steps } => i32::from(*steps),
            SolverParams::Gravity { applications } => i32::from(*applications),
            SolverParams::Reflection { bounces, .. } => i32::from(*bounces),
            SolverParams::Expansion { applications } => i32::from(*applications),
        }
    }
}

/// Validates `input` against the task's constraint set, then applies the
/// family rule.
pub fn solve(task: &TaskSpec, params: &SolverParams, input: &Grid) -> Result<Grid, SolveError> {
    if params.family() != task.family {
        return Err(SolveError::ParamsMismatch {
            task: task.family,
            params: params.family(),
        });
    }
    constraint_set(task, params).validate(input)?;
    apply(params, input)
}

/// Rule application without the constraint check.
pub fn apply(params: &SolverParams, input: &Grid) -> Result<Grid, SolveError> {
    match params {
        SolverParams::Size { mode, .. } => solve_size(input, *mode),
        SolverParams::Count { mode, .. } => solve_count(input, *mode),
        SolverParams::Shape { mode, shape_index } => solve_shape(input, *mode, *shape_index),
        SolverParams::Move { direction, distance } => solve_move(input, *direction, *distance),
        SolverParams::Rotation { pivot, quarter_turns } => solve_rotation(input, *pivot, *quarter_turns),
        SolverParams::Symmetry { axis, .. } => solve_symmetry(input, *axis),
        SolverParams::Categorization { rules } => solve_categorization(input, rules),
        SolverParams::Sort { key, direction, .. } => solve_sort(input, *key, *direction),
        SolverParams::Planning { steps } => solve_planning(input, *steps),
        SolverParams::Gravity { applications } => Ok(solve_gravity(input, *applications)),
        SolverParams::Reflection { heading, bounces } => solve_reflection(input, *heading, *bounces),
        SolverParams::Expansion { applications } => Ok(solve_expansion(input, *applications)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{catalog, task};

    #[test]
    fn params_roundtrip_variable_value() {
        for t in catalog() {
            for v in t.variable.values() {
                let p = SolverParams::for_task(t, v).unwrap();
                assert_eq!(p.family(), t.family);
                assert_eq!(p.variable_value(), v, "{}", t.task_id);
            }
        }
    }

    #[test]
    fn out_of_range_value() {
        let t = task("move_up").unwrap();
        assert!(matches!(
            SolverParams::for_task(t, 31),
            Err(SolveError::VariableOutOfRange { .. })
        ));
        let r = task("rotation_center").unwrap();
        assert!(SolverParams::for_task(r, 45).is_err());
        assert!(SolverParams::for_task(r, 0).is_err());
    }

    #[test]
    fn mismatched_params_rejected() {
        let t = task("move_up").unwrap();
        let p = SolverParams::Gravity { applications: 1 };
        let g = Grid::blank(3, 3).unwrap();
        assert!(matches!(solve(t, &p, &g), Err(SolveError::ParamsMismatch { .. })));
    }

    #[test]
    fn constraint_violation_surfaces() {
        let t = task("move_right").unwrap();
        let p = SolverParams::for_task(t, 2).unwrap();
        // no object at all
        let g = Grid::blank(3, 5).unwrap();
        assert!(matches!(solve(t, &p, &g), Err(SolveError::ConstraintViolated(_))));
    }
}
