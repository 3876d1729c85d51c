use serde::{Deserialize, Serialize};

use crate::dataset::Puzzle;
use crate::grid::Grid;

/// Text scaffolding around the grids of a prompt. Grids are always written
/// as bracketed integer rows, which [`super::parse_grid`] reads back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptTemplate {
    pub preamble: String,
    /// Header before each train pair; `{n}` is replaced by the 1-based index.
    pub pair_header: String,
    pub input_label: String,
    pub output_label: String,
    pub test_header: String,
    /// Closing instruction. Must not contain a grid literal, or the echo of
    /// the prompt would no longer end with the test input.
    pub answer_instruction: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self {
            preamble: "Find the common rule that maps an input grid to an output grid, given the examples below. \
                       Grids are lists of rows; each cell is an integer color from 0 to 9, and 0 is the background."
                .into(),
            pair_header: "--Example {n}--".into(),
            input_label: "INPUT:".into(),
            output_label: "OUTPUT:".into(),
            test_header: "--Test--".into(),
            answer_instruction: "Apply the rule to the test input. Reply with the complete output grid in the same \
                                 bracketed format, written last in your answer."
                .into(),
        }
    }
}

/// `[[a,b],\n[c,d]]`, one row per line.
pub fn format_grid(grid: &Grid) -> String {
    let rows: Vec<String> = (0..grid.rows())
        .map(|r| {
            let cells: Vec<String> = grid.row(r).iter().map(u8::to_string).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(",\n"))
}

pub fn build_prompt(puzzle: &Puzzle, template: &PromptTemplate) -> String {
    let mut out = String::new();
    out.push_str(&template.preamble);
    out.push_str("\n\n");
    for (i, pair) in puzzle.train.iter().enumerate() {
        out.push_str(&template.pair_header.replace("{n}", &(i + 1).to_string()));
        out.push_str("\n\n");
        for (label, grid) in [(&template.input_label, &pair.input), (&template.output_label, &pair.output)] {
            out.push_str(label);
            out.push_str("\n\n");
            out.push_str(&format_grid(grid));
            out.push_str("\n\n");
        }
    }
    out.push_str(&template.test_header);
    out.push_str("\n\n");
    out.push_str(&template.input_label);
    out.push_str("\n\n");
    out.push_str(&format_grid(&puzzle.test_input));
    out.push_str("\n\n");
    out.push_str(&template.answer_instruction);
    out.push('\n');
    out
}
