//! The four-level task hierarchy: levels, rule families, concrete tasks and
//! each task's complexity variable with its instance budget.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Axis;

#[derive(Debug, Error, PartialEq)]
pub enum TaxonomyError {
    #[error("unknown rule family `{0}`")]
    UnknownFamily(String),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("budget scale must be a positive finite number, got {0}")]
    BadScale(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CognitiveLevel {
    Attribute,
    Spatial,
    Sequential,
    Conceptual,
}

impl CognitiveLevel {
    pub const ALL: [CognitiveLevel; 4] = [
        CognitiveLevel::Attribute,
        CognitiveLevel::Spatial,
        CognitiveLevel::Sequential,
        CognitiveLevel::Conceptual,
    ];

    pub fn ordinal(self) -> u8 {
        self as u8 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            CognitiveLevel::Attribute => "attribute",
            CognitiveLevel::Spatial => "spatial",
            CognitiveLevel::Sequential => "sequential",
            CognitiveLevel::Conceptual => "conceptual",
        }
    }

    pub fn families(self) -> [Family; 3] {
        use Family::*;
        match self {
            CognitiveLevel::Attribute => [Size, Count, Shape],
            CognitiveLevel::Spatial => [Move, Rotation, Symmetry],
            CognitiveLevel::Sequential => [Categorization, Sort, Planning],
            CognitiveLevel::Conceptual => [Gravity, Reflection, Expansion],
        }
    }
}

impl fmt::Display for CognitiveLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Size,
    Count,
    Shape,
    Move,
    Rotation,
    Symmetry,
    Categorization,
    Sort,
    Planning,
    Gravity,
    Reflection,
    Expansion,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::Size,
        Family::Count,
        Family::Shape,
        Family::Move,
        Family::Rotation,
        Family::Symmetry,
        Family::Categorization,
        Family::Sort,
        Family::Planning,
        Family::Gravity,
        Family::Reflection,
        Family::Expansion,
    ];

    pub fn level(self) -> CognitiveLevel {
        use Family::*;
        match self {
            Size | Count | Shape => CognitiveLevel::Attribute,
            Move | Rotation | Symmetry => CognitiveLevel::Spatial,
            Categorization | Sort | Planning => CognitiveLevel::Sequential,
            Gravity | Reflection | Expansion => CognitiveLevel::Conceptual,
        }
    }

    pub fn name(self) -> &'static str {
        use Family::*;
        match self {
            Size => "size",
            Count => "count",
            Shape => "shape",
            Move => "move",
            Rotation => "rotation",
            Symmetry => "symmetry",
            Categorization => "categorization",
            Sort => "sort",
            Planning => "planning",
            Gravity => "gravity",
            Reflection => "reflection",
            Expansion => "expansion",
        }
    }

    pub fn description(self) -> &'static str {
        use Family::*;
        match self {
            Size => "Apply a fixed rule while the size of the whole grid changes.",
            Count => "Count objects; the number of objects changes.",
            Shape => "Apply a fixed rule to one shape from a ten-shape library.",
            Move => "Move the object a number of cells in one direction.",
            Rotation => "Rotate the object clockwise about an endpoint or its center, or rotate the whole grid.",
            Symmetry => "Mirror every object across a horizontal, vertical or diagonal axis.",
            Categorization => "Infer object categories from examples and recolor each category.",
            Sort => "Rearrange objects in order of a key.",
            Planning => "Find the unique shortest path from the agent to the goal and walk it.",
            Gravity => "Airborne objects fall as rigid bodies until they rest.",
            Reflection => "A diagonal light ray reflects off walls a fixed number of times.",
            Expansion => "Heated objects expand ring by ring until obstructed.",
        }
    }

    /// Instance count under the default budget.
    pub fn default_budget(self) -> u32 {
        use Family::*;
        match self {
            Size => 629,
            Count => 570,
            Shape => 450,
            Move => 1500,
            Rotation => 108,
            Symmetry => 75,
            Categorization => 65,
            Sort => 240,
            Planning => 105,
            Gravity => 63,
            Reflection => 100,
            Expansion => 50,
        }
    }

    pub fn variable(self) -> VariableSpec {
        use Family::*;
        let (name, min, max, step, semantics) = match self {
            Size => ("size", 10, 30, 1, "side length of the square canvas"),
            Count => ("number", 2, 10, 1, "number of objects to count"),
            Shape => ("shape", 1, 10, 1, "index into the ten-shape library"),
            Move => ("distance", 1, 30, 1, "cells moved"),
            Rotation => ("angle", 90, 270, 90, "clockwise rotation in degrees (quarter turns)"),
            Symmetry => ("number", 1, 8, 1, "objects to mirror"),
            Categorization => ("category", 1, 5, 1, "categories to distinguish"),
            Sort => ("order", 1, 9, 1, "objects to sort"),
            Planning => ("step", 1, 9, 1, "moves on the shortest path"),
            Gravity => ("number", 1, 8, 1, "gravity applications needed for every object to rest"),
            Reflection => ("number", 1, 8, 1, "wall reflections of the ray"),
            Expansion => ("number", 1, 8, 1, "expansion rings"),
        };
        VariableSpec {
            name: name.to_string(),
            min,
            max,
            step,
            semantics: semantics.to_string(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| TaxonomyError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub min: i32,
    pub max: i32,
    /// Spacing between admissible values; 90 for rotation angles, else 1.
    pub step: i32,
    pub semantics: String,
}

impl VariableSpec {
    pub fn values(&self) -> Vec<i32> {
        (self.min..=self.max).step_by(self.step as usize).collect()
    }

    pub fn contains(&self, value: i32) -> bool {
        value >= self.min && value <= self.max && (value - self.min) % self.step == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
    UpperRight,
}

impl Direction {
    pub const ALL: [Direction; 5] = [
        Direction::Up,
        Direction::Down,
        Direction::Left,
        Direction::Right,
        Direction::UpperRight,
    ];

    /// Unit step as (row delta, col delta).
    pub fn step(self) -> (i32, i32) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
            Direction::UpperRight => (-1, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::UpperRight => "upper_right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationPivot {
    /// The object's lexicographically smallest cell.
    Endpoint,
    /// The center of the object's bounding box.
    Center,
    /// The whole raster turns.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoryAttribute {
    Color,
    Shape,
    CellCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    Size,
    Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortDirection {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MazeStyle {
    Sparse,
    Dense,
    Maze,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GravityLayout {
    Stack,
    StackWithDebris,
    Towers,
}

/// Initial heading of a light ray, as (row delta, col delta).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heading {
    UpRight,
    UpLeft,
    DownRight,
}

impl Heading {
    pub fn step(self) -> (i32, i32) {
        match self {
            Heading::UpRight => (-1, 1),
            Heading::UpLeft => (-1, -1),
            Heading::DownRight => (1, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionLayout {
    Single,
    Multi,
    Walls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeMode {
    /// Output is the crop of the only object.
    Crop,
    /// Output draws a frame around the canvas.
    Frame,
    /// Output extends a seed cell into a diagonal ray.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// 1xN bar of the objects' color.
    Objects,
    /// 1xN bar counting only blue objects among distractors.
    TargetColor,
    /// 1xN row listing each object's color in reading order.
    ColorSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeMode {
    /// Replace every marker cell by the shape.
    Stamp,
    /// Crop the shape out of gray noise.
    Crop,
    /// Recolor every copy of the shape among other library shapes.
    Match,
}

/// The concrete rule of a task; selects its generator, constraints and solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Size(SizeMode),
    Count(CountMode),
    Shape(ShapeMode),
    Move(Direction),
    Rotation(RotationPivot),
    Symmetry(Axis),
    Categorization(CategoryAttribute),
    Sort(SortKey, SortDirection),
    Planning(MazeStyle),
    Gravity(GravityLayout),
    Reflection(Heading),
    Expansion(ExpansionLayout),
}

impl TaskKind {
    pub fn family(self) -> Family {
        match self {
            TaskKind::Size(_) => Family::Size,
            TaskKind::Count(_) => Family::Count,
            TaskKind::Shape(_) => Family::Shape,
            TaskKind::Move(_) => Family::Move,
            TaskKind::Rotation(_) => Family::Rotation,
            TaskKind::Symmetry(_) => Family::Symmetry,
            TaskKind::Categorization(_) => Family::Categorization,
            TaskKind::Sort(..) => Family::Sort,
            TaskKind::Planning(_) => Family::Planning,
            TaskKind::Gravity(_) => Family::Gravity,
            TaskKind::Reflection(_) => Family::Reflection,
            TaskKind::Expansion(_) => Family::Expansion,
        }
    }

    pub fn variant(self) -> &'static str {
        match self {
            TaskKind::Size(SizeMode::Crop) => "crop",
            TaskKind::Size(SizeMode::Frame) => "frame",
            TaskKind::Size(SizeMode::Diagonal) => "diagonal",
            TaskKind::Count(CountMode::Objects) => "objects",
            TaskKind::Count(CountMode::TargetColor) => "target_color",
            TaskKind::Count(CountMode::ColorSequence) => "color_sequence",
            TaskKind::Shape(ShapeMode::Stamp) => "stamp",
            TaskKind::Shape(ShapeMode::Crop) => "crop",
            TaskKind::Shape(ShapeMode::Match) => "match",
            TaskKind::Move(d) => d.name(),
            TaskKind::Rotation(RotationPivot::Endpoint) => "endpoint",
            TaskKind::Rotation(RotationPivot::Center) => "center",
            TaskKind::Rotation(RotationPivot::Grid) => "grid",
            TaskKind::Symmetry(Axis::Horizontal) => "horizontal",
            TaskKind::Symmetry(Axis::Vertical) => "vertical",
            TaskKind::Symmetry(Axis::MainDiagonal) => "diagonal",
            TaskKind::Categorization(CategoryAttribute::Color) => "color",
            TaskKind::Categorization(CategoryAttribute::Shape) => "shape",
            TaskKind::Categorization(CategoryAttribute::CellCount) => "cell_count",
            TaskKind::Sort(SortKey::Size, SortDirection::Ascending) => "size_ascending",
            TaskKind::Sort(SortKey::Size, SortDirection::Descending) => "size_descending",
            TaskKind::Sort(SortKey::Position, SortDirection::Ascending) => "position_ascending",
            TaskKind::Sort(SortKey::Position, SortDirection::Descending) => "position_descending",
            TaskKind::Planning(MazeStyle::Sparse) => "sparse",
            TaskKind::Planning(MazeStyle::Dense) => "dense",
            TaskKind::Planning(MazeStyle::Maze) => "maze",
            TaskKind::Gravity(GravityLayout::Stack) => "stack",
            TaskKind::Gravity(GravityLayout::StackWithDebris) => "stack_with_debris",
            TaskKind::Gravity(GravityLayout::Towers) => "towers",
            TaskKind::Reflection(Heading::UpRight) => "up_right",
            TaskKind::Reflection(Heading::UpLeft) => "up_left",
            TaskKind::Reflection(Heading::DownRight) => "down_right",
            TaskKind::Expansion(ExpansionLayout::Single) => "single",
            TaskKind::Expansion(ExpansionLayout::Multi) => "multi",
            TaskKind::Expansion(ExpansionLayout::Walls) => "walls",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskSpec {
    pub task_id: String,
    pub level: CognitiveLevel,
    pub family: Family,
    pub variant: String,
    pub kind: TaskKind,
    pub variable: VariableSpec,
}

impl TaskSpec {
    fn new(kind: TaskKind) -> Self {
        let family = kind.family();
        Self {
            task_id: format!("{}_{}", family.name(), kind.variant()),
            level: family.level(),
            family,
            variant: kind.variant().to_string(),
            kind,
            variable: family.variable(),
        }
    }
}

fn build_catalog() -> Vec<TaskSpec> {
    use TaskKind as K;
    let mut kinds = vec![
        K::Size(SizeMode::Crop),
        K::Size(SizeMode::Frame),
        K::Size(SizeMode::Diagonal),
        K::Count(CountMode::Objects),
        K::Count(CountMode::TargetColor),
        K::Count(CountMode::ColorSequence),
        K::Shape(ShapeMode::Stamp),
        K::Shape(ShapeMode::Crop),
        K::Shape(ShapeMode::Match),
    ];
    kinds.extend(Direction::ALL.map(K::Move));
    kinds.extend([
        K::Rotation(RotationPivot::Endpoint),
        K::Rotation(RotationPivot::Center),
        K::Rotation(RotationPivot::Grid),
        K::Symmetry(Axis::Horizontal),
        K::Symmetry(Axis::Vertical),
        K::Symmetry(Axis::MainDiagonal),
        K::Categorization(CategoryAttribute::Color),
        K::Categorization(CategoryAttribute::Shape),
        K::Categorization(CategoryAttribute::CellCount),
        K::Sort(SortKey::Size, SortDirection::Ascending),
        K::Sort(SortKey::Size, SortDirection::Descending),
        K::Sort(SortKey::Position, SortDirection::Ascending),
        K::Planning(MazeStyle::Sparse),
        K::Planning(MazeStyle::Dense),
        K::Planning(MazeStyle::Maze),
        K::Gravity(GravityLayout::Stack),
        K::Gravity(GravityLayout::StackWithDebris),
        K::Gravity(GravityLayout::Towers),
        K::Reflection(Heading::UpRight),
        K::Reflection(Heading::UpLeft),
        K::Reflection(Heading::DownRight),
        K::Expansion(ExpansionLayout::Single),
        K::Expansion(ExpansionLayout::Multi),
        K::Expansion(ExpansionLayout::Walls),
    ]);
    kinds.into_iter().map(TaskSpec::new).collect()
}

/// Every registered task, grouped by level then family, in a fixed order.
pub fn catalog() -> &'static [TaskSpec] {
    static CATALOG: OnceLock<Vec<TaskSpec>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

pub fn task(task_id: &str) -> Result<&'static TaskSpec, TaxonomyError> {
    catalog()
        .iter()
        .find(|t| t.task_id == task_id)
        .ok_or_else(|| TaxonomyError::UnknownTask(task_id.to_string()))
}

pub fn family_tasks(family: Family) -> impl Iterator<Item = &'static TaskSpec> {
    catalog().iter().filter(move |t| t.family == family)
}

/// Uniform scaling of the default per-value instance counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetConfig {
    pub scale: f64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

impl BudgetConfig {
    pub fn scaled(scale: f64) -> Result<Self, TaxonomyError> {
        if scale.is_finite() && scale > 0.0 {
            Ok(Self { scale })
        } else {
            Err(TaxonomyError::BadScale(scale))
        }
    }

    fn apply(&self, default_count: u32) -> u32 {
        if self.scale == 1.0 {
            default_count
        } else {
            ((default_count as f64 * self.scale).floor() as u32).max(1)
        }
    }
}

/// One (task, variable value) cell of the dataset with its instance count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub task: &'static TaskSpec,
    pub value: i32,
    pub count: u32,
}

/// Splits the family budget evenly over its (task, value) slots in catalog
/// order; the remainder goes one apiece to the earliest slots.
pub fn slots(family: Family, config: &BudgetConfig) -> Vec<Slot> {
    let pairs: Vec<(&'static TaskSpec, i32)> = family_tasks(family)
        .flat_map(|t| t.variable.values().into_iter().map(move |v| (t, v)))
        .collect();
    let n = pairs.len() as u32;
    let total = family.default_budget();
    let (base, extra) = (total / n, total % n);
    pairs
        .into_iter()
        .enumerate()
        .map(|(i, (task, value))| Slot {
            task,
            value,
            count: config.apply(base + u32::from((i as u32) < extra)),
        })
        .collect()
}

/// All slots of the dataset in catalog order.
pub fn all_slots(config: &BudgetConfig) -> Vec<Slot> {
    Family::ALL.into_iter().flat_map(|f| slots(f, config)).collect()
}

pub fn budget_for(family: Family, config: &BudgetConfig) -> u32 {
    slots(family, config).iter().map(|s| s.count).sum()
}

/// Flat row of the catalog document.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry<'a> {
    pub task_id: &'a str,
    pub level: CognitiveLevel,
    pub level_ordinal: u8,
    pub family: Family,
    pub variant: &'a str,
    pub variable: &'a VariableSpec,
    pub budget: u32,
}

pub fn catalog_entries(config: &BudgetConfig) -> Vec<CatalogEntry<'static>> {
    let slots = all_slots(config);
    catalog()
        .iter()
        .map(|t| CatalogEntry {
            task_id: &t.task_id,
            level: t.level,
            level_ordinal: t.level.ordinal(),
            family: t.family,
            variant: &t.variant,
            variable: &t.variable,
            budget: slots.iter().filter(|s| s.task.task_id == t.task_id).map(|s| s.count).sum(),
        })
        .collect()
}

pub fn catalog_json(config: &BudgetConfig) -> String {
    serde_json::to_string_pretty(&catalog_entries(config)).expect("catalog serializes")
}
