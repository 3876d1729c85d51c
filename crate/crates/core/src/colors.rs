//! Cell values with a fixed role across tasks.

pub const BLUE: u8 = 1;
pub const RED: u8 = 2;
pub const GREEN: u8 = 3;
pub const YELLOW: u8 = 4;
pub const GRAY: u8 = 5;
pub const MAGENTA: u8 = 6;
pub const ORANGE: u8 = 7;
pub const AZURE: u8 = 8;
pub const MAROON: u8 = 9;

/// All object colors.
pub const OBJECT_COLORS: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

pub const FRAME: u8 = AZURE;
pub const COUNT_TARGET: u8 = BLUE;
pub const NOISE: u8 = GRAY;
pub const MATCH_HIGHLIGHT: u8 = RED;
pub const WALL: u8 = GRAY;
pub const AGENT: u8 = RED;
pub const GOAL: u8 = GREEN;
pub const TRAIL: u8 = YELLOW;
pub const EMITTER: u8 = GREEN;
pub const RAY: u8 = YELLOW;
pub const HEAT: u8 = RED;
