//! RGB raster patches with binary PPM (P6) I/O and integer line drawing.
//!
//! PPM is dependency-free and bit-exact, which the rendering determinism
//! tests rely on. Lines use the integer midpoint walk with a square stamp
//! per step; segments are clipped to the patch before rasterization so
//! far-offscreen projections cost nothing.

use std::io::Read;
use std::path::Path;
use thiserror::Error;

pub type Rgb = [u8; 3];

/// Wireframe drawing convention: green, linewidth 1.
pub const GREEN: Rgb = [0, 255, 0];

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("not a P6 PPM: bad magic")]
    InvalidMagic,
    #[error("malformed PPM header: {0}")]
    MalformedHeader(&'static str),
    #[error("unsupported maxval {0} (only 255)")]
    UnsupportedMaxval(u64),
    #[error("pixel data truncated: expected {expected} bytes, got {got}")]
    TruncatedData { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Row-major RGB image patch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterPatch {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl RasterPatch {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            pixels.extend_from_slice(&fill);
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, color: Rgb) {
        let i = (y * self.width + x) * 3;
        self.pixels[i..i + 3].copy_from_slice(&color);
    }

    /// Count of pixels exactly equal to `color`.
    pub fn count_color(&self, color: Rgb) -> usize {
        self.pixels.chunks_exact(3).filter(|c| *c == color).count()
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn from_ppm(data: &[u8]) -> Result<Self, RasterError> {
        let mut cursor = 0usize;
        if data.len() < 2 || &data[0..2] != b"P6" {
            return Err(RasterError::InvalidMagic);
        }
        cursor += 2;
        let mut fields = [0u64; 3];
        for field in &mut fields {
            *field = read_header_number(data, &mut cursor)?;
        }
        // exactly one whitespace byte separates the header from the payload
        if cursor >= data.len() || !data[cursor].is_ascii_whitespace() {
            return Err(RasterError::MalformedHeader("missing payload separator"));
        }
        cursor += 1;
        let (width, height, maxval) = (fields[0] as usize, fields[1] as usize, fields[2]);
        if maxval != 255 {
            return Err(RasterError::UnsupportedMaxval(maxval));
        }
        let expected = width * height * 3;
        let got = data.len() - cursor;
        if got < expected {
            return Err(RasterError::TruncatedData { expected, got });
        }
        Ok(Self {
            width,
            height,
            pixels: data[cursor..cursor + expected].to_vec(),
        })
    }

    pub fn from_ppm_file(path: &Path) -> Result<Self, RasterError> {
        let mut data = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut data)?;
        Self::from_ppm(&data)
    }

    pub fn write_ppm_file(&self, path: &Path) -> Result<(), RasterError> {
        std::fs::write(path, self.to_ppm())?;
        Ok(())
    }
}

fn read_header_number(data: &[u8], cursor: &mut usize) -> Result<u64, RasterError> {
    // skip whitespace and '#' comments
    loop {
        while *cursor < data.len() && data[*cursor].is_ascii_whitespace() {
            *cursor += 1;
        }
        if *cursor < data.len() && data[*cursor] == b'#' {
            while *cursor < data.len() && data[*cursor] != b'\n' {
                *cursor += 1;
            }
        } else {
            break;
        }
    }
    let start = *cursor;
    while *cursor < data.len() && data[*cursor].is_ascii_digit() {
        *cursor += 1;
    }
    if *cursor == start {
        return Err(RasterError::MalformedHeader("expected a number"));
    }
    std::str::from_utf8(&data[start..*cursor])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or(RasterError::MalformedHeader("unparsable number"))
}

/// Liang-Barsky clip of the parametric segment to a rectangle. Returns the
/// clipped endpoints or None when fully outside.
fn clip_segment(
    a: [f64; 2],
    b: [f64; 2],
    lo: [f64; 2],
    hi: [f64; 2],
) -> Option<([f64; 2], [f64; 2])> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for axis in 0..2 {
        for (p, q) in [(-d[axis], a[axis] - lo[axis]), (d[axis], hi[axis] - a[axis])] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    if r > t1 {
                        return None;
                    }
                    t0 = t0.max(r);
                } else {
                    if r < t0 {
                        return None;
                    }
                    t1 = t1.min(r);
                }
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((
        [a[0] + t0 * d[0], a[1] + t0 * d[1]],
        [a[0] + t1 * d[0], a[1] + t1 * d[1]],
    ))
}

/// Draw the segment a→b (pixel coordinates) with a square stamp of radius
/// ⌊(linewidth−1)/2⌋ per step; even widths draw like the next lower odd
/// width. Pixels outside the patch are skipped.
pub fn draw_segment(patch: &mut RasterPatch, a: [f64; 2], b: [f64; 2], color: Rgb, linewidth: u32) {
    if patch.width == 0 || patch.height == 0 {
        return;
    }
    let radius = (linewidth.saturating_sub(1) / 2) as i64;
    let margin = radius as f64 + 1.0;
    let lo = [-margin, -margin];
    let hi = [
        patch.width as f64 - 1.0 + margin,
        patch.height as f64 - 1.0 + margin,
    ];
    let Some((ca, cb)) = clip_segment(a, b, lo, hi) else {
        return;
    };
    let (x0, y0) = (ca[0].round() as i64, ca[1].round() as i64);
    let (x1, y1) = (cb[0].round() as i64, cb[1].round() as i64);

    let mut stamp = |cx: i64, cy: i64| {
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                let (px, py) = (cx + dx, cy + dy);
                if px >= 0 && py >= 0 && (px as usize) < patch.width && (py as usize) < patch.height
                {
                    patch.set(px as usize, py as usize, color);
                }
            }
        }
    };

    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut x, mut y) = (x0, y0);
    loop {
        stamp(x, y);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}
