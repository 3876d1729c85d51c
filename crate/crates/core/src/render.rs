//! Grid to PNG rendering.
//!
//! A grid of `rows x cols` cells becomes an image of
//! `cols * cell_px + (cols + 1) * line_px` by `rows * cell_px + (rows + 1) * line_px`
//! pixels. Rendering is pure and has no anti-aliasing, so identical inputs give
//! identical bytes.

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder, Rgb, RgbImage};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Puzzle;
use crate::grid::Grid;

/// The usual ARC colors, indexed by cell value.
pub const ARC_PALETTE: [[u8; 3]; 10] = [
    [0x00, 0x00, 0x00], // 0 black (background)
    [0x00, 0x74, 0xD9], // 1 blue
    [0xFF, 0x41, 0x36], // 2 red
    [0x2E, 0xCC, 0x40], // 3 green
    [0xFF, 0xDC, 0x00], // 4 yellow
    [0xAA, 0xAA, 0xAA], // 5 gray
    [0xF0, 0x12, 0xBE], // 6 magenta
    [0xFF, 0x85, 0x1B], // 7 orange
    [0x7F, 0xDB, 0xFF], // 8 sky
    [0x87, 0x0C, 0x25], // 9 maroon
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Every panel in one composite image.
    SingleImage,
    /// One image per panel.
    MultiImage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderStyle {
    pub cell_px: u32,
    pub line_px: u32,
    pub line_color: [u8; 3],
    pub palette: [[u8; 3]; 10],
    pub layout: Layout,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            cell_px: 16,
            line_px: 1,
            line_color: [0x55, 0x55, 0x55],
            palette: ARC_PALETTE,
            layout: Layout::MultiImage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("the canonical layout needs 3 train pairs, got {0}")]
    LayoutUnsupported(usize),
    #[error("cell size must be positive")]
    ZeroCell,
}

/// Pixel size (width, height) of a rendered grid.
pub fn image_size(rows: usize, cols: usize, style: &RenderStyle) -> (u32, u32) {
    let side = |n: usize| n as u32 * style.cell_px + (n as u32 + 1) * style.line_px;
    (side(cols), side(rows))
}

pub fn grid_image(grid: &Grid, style: &RenderStyle) -> RgbImage {
    let (w, h) = image_size(grid.rows(), grid.cols(), style);
    let mut img = RgbImage::from_pixel(w, h, Rgb(style.line_color));
    let step = style.cell_px + style.line_px;
    for r in 0..grid.rows() {
        for c in 0..grid.cols() {
            let color = Rgb(style.palette[usize::from(grid.get(r, c))]);
            let (x0, y0) = (style.line_px + c as u32 * step, style.line_px + r as u32 * step);
            for y in y0..y0 + style.cell_px {
                for x in x0..x0 + style.cell_px {
                    img.put_pixel(x, y, color);
                }
            }
        }
    }
    img
}

pub fn encode_png(img: &RgbImage) -> Vec<u8> {
    let mut buf = Vec::new();
    PngEncoder::new(&mut buf)
        .write_image(img.as_raw(), img.width(), img.height(), ExtendedColorType::Rgb8)
        .expect("encoding to memory does not fail");
    buf
}

pub fn render_grid(grid: &Grid, style: &RenderStyle) -> Result<Vec<u8>, RenderError> {
    if style.cell_px == 0 {
        return Err(RenderError::ZeroCell);
    }
    Ok(encode_png(&grid_image(grid, style)))
}

/// One output file of an episode render.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedImage {
    /// Panel name, `single` for the composite.
    pub panel: String,
    pub png: Vec<u8>,
}

impl RenderedImage {
    pub fn file_name(&self, episode_id: &str) -> String {
        format!("{episode_id}_{}.png", self.panel)
    }
}

/// Train pairs then the test input; the test output is never a panel.
fn panels(puzzle: &Puzzle) -> Vec<(String, String, &Grid)> {
    let mut out = Vec::new();
    for (i, p) in puzzle.train.iter().enumerate() {
        let n = i + 1;
        out.push((format!("train{n}_input"), format!("TRAIN {n} INPUT"), &p.input));
        out.push((format!("train{n}_output"), format!("TRAIN {n} OUTPUT"), &p.output));
    }
    out.push(("test_input".into(), "TEST INPUT".into(), &puzzle.test_input));
    out
}

/// Renders with the canonical layout, which expects three train pairs: seven
/// panels, or one composite holding them.
pub fn render_episode(puzzle: &Puzzle, style: &RenderStyle) -> Result<Vec<RenderedImage>, RenderError> {
    if puzzle.train.len() != 3 {
        return Err(RenderError::LayoutUnsupported(puzzle.train.len()));
    }
    render_episode_generic(puzzle, style)
}

/// Same layouts for any number of train pairs (`2K + 1` panels).
pub fn render_episode_generic(puzzle: &Puzzle, style: &RenderStyle) -> Result<Vec<RenderedImage>, RenderError> {
    if style.cell_px == 0 {
        return Err(RenderError::ZeroCell);
    }
    let panels = panels(puzzle);
    Ok(match style.layout {
        Layout::MultiImage => panels
            .into_iter()
            .map(|(panel, _, g)| RenderedImage {
                panel,
                png: encode_png(&grid_image(g, style)),
            })
            .collect(),
        Layout::SingleImage => vec![RenderedImage {
            panel: "single".into(),
            png: encode_png(&composite(&panels, style)),
        }],
    })
}

const MARGIN: u32 = 12;
const FONT_SCALE: u32 = 2;
const LABEL_H: u32 = 5 * FONT_SCALE + 6;
const BACKDROP: Rgb<u8> = Rgb([0xFF, 0xFF, 0xFF]);
const INK: Rgb<u8> = Rgb([0x22, 0x22, 0x22]);

/// Two columns (inputs, outputs), one row per train pair, then the test input.
fn composite(panels: &[(String, String, &Grid)], style: &RenderStyle) -> RgbImage {
    let cells: Vec<(RgbImage, &str)> = panels.iter().map(|(_, label, g)| (grid_image(g, style), label.as_str())).collect();
    let panel_w = |i: usize| cells[i].0.width().max(text_width(cells[i].1));
    let mut col_w = [0u32; 2];
    for i in 0..cells.len() {
        col_w[i % 2] = col_w[i % 2].max(panel_w(i));
    }
    let n_rows = cells.len().div_ceil(2);
    let row_h: Vec<u32> = (0..n_rows)
        .map(|r| (2 * r..(2 * r + 2).min(cells.len())).map(|i| cells[i].0.height()).max().unwrap_or(0) + LABEL_H)
        .collect();
    let width = MARGIN * 3 + col_w[0] + col_w[1];
    let height = MARGIN * (n_rows as u32 + 1) + row_h.iter().sum::<u32>();
    let mut out = RgbImage::from_pixel(width, height, BACKDROP);
    let mut y = MARGIN;
    for (r, h) in row_h.iter().enumerate() {
        for k in 0..2 {
            let i = 2 * r + k;
            let Some((img, label)) = cells.get(i) else { continue };
            let x = MARGIN + k as u32 * (col_w[0] + MARGIN);
            draw_text(&mut out, x, y, label);
            image::imageops::replace(&mut out, img, i64::from(x), i64::from(y + LABEL_H));
        }
        y += h + MARGIN;
    }
    out
}

/// 3x5 glyphs, one byte per row, low three bits used.
fn glyph(c: char) -> [u8; 5] {
    match c {
        'A' => [0b010, 0b101, 0b111, 0b101, 0b101],
        'E' => [0b111, 0b100, 0b110, 0b100, 0b111],
        'I' => [0b111, 0b010, 0b010, 0b010, 0b111],
        'N' => [0b101, 0b111, 0b111, 0b111, 0b101],
        'O' => [0b111, 0b101, 0b101, 0b101, 0b111],
        'P' => [0b110, 0b101, 0b110, 0b100, 0b100],
        'R' => [0b110, 0b101, 0b110, 0b101, 0b101],
        'S' => [0b011, 0b100, 0b010, 0b001, 0b110],
        'T' => [0b111, 0b010, 0b010, 0b010, 0b010],
        'U' => [0b101, 0b101, 0b101, 0b101, 0b111],
        '0' => [0b111, 0b101, 0b101, 0b101, 0b111],
        '1' => [0b010, 0b110, 0b010, 0b010, 0b111],
        '2' => [0b110, 0b001, 0b010, 0b100, 0b111],
        '3' => [0b110, 0b001, 0b010, 0b001, 0b110],
        '4' => [0b101, 0b101, 0b111, 0b001, 0b001],
        '5' => [0b111, 0b100, 0b110, 0b001, 0b110],
        '6' => [0b011, 0b100, 0b111, 0b101, 0b111],
        '7' => [0b111, 0b001, 0b010, 0b010, 0b010],
        '8' => [0b111, 0b101, 0b111, 0b101, 0b111],
        '9' => [0b111, 0b101, 0b111, 0b001, 0b110],
        _ => [0; 5],
    }
}

fn text_width(text: &str) -> u32 {
    text.chars().count() as u32 * 4 * FONT_SCALE
}

fn draw_text(img: &mut RgbImage, x: u32, y: u32, text: &str) {
    for (i, ch) in text.chars().enumerate() {
        let gx = x + i as u32 * 4 * FONT_SCALE;
        for (row, bits) in glyph(ch).iter().enumerate() {
            for col in 0..3u32 {
                if bits >> (2 - col) & 1 == 1 {
                    for dy in 0..FONT_SCALE {
                        for dx in 0..FONT_SCALE {
                            let (px, py) = (gx + col * FONT_SCALE + dx, y + row as u32 * FONT_SCALE + dy);
                            if px < img.width() && py < img.height() {
                                img.put_pixel(px, py, INK);
                            }
                        }
                    }
                }
            }
        }
    }
}
