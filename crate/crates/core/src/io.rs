//! Text formats: grid CSV, sample CSV and PGM heatmaps.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CopulaError, Result};
use crate::grid::{CopulaGrid, SampleSet};

/// Twelve significant digits, shortest form, `.` as decimal point.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // scientific formatting rounds to 12 significant digits; reparsing gives the
    // shortest decimal that round-trips that value
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let s = format!("{rounded}");
    if s.len() <= 24 {
        s
    } else {
        format!("{rounded:e}")
    }
}

pub fn grid_to_csv(grid: &CopulaGrid) -> String {
    let n = grid.n();
    let mut out = String::with_capacity(n * n * 16);
    writeln!(out, "N={n}").unwrap();
    for row in grid.masses().chunks(n) {
        let line: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn grid_from_csv(text: &str, label: &str) -> Result<CopulaGrid> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| CopulaError::Parse("empty grid file".into()))?;
    let n: usize = header
        .strip_prefix("N=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| CopulaError::Parse(format!("expected 'N=<int>' header, got '{header}'")))?;
    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| CopulaError::Parse(format!("row {}: invalid number '{c}'", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(CopulaError::Parse(format!(
            "header declares {n} rows, found {}",
            rows.len()
        )));
    }
    CopulaGrid::from_mass(&rows, label)
}

pub fn write_grid(path: &Path, grid: &CopulaGrid) -> Result<()> {
    fs::write(path, grid_to_csv(grid))?;
    Ok(())
}

/// Reads a grid file; the label is the file stem.
pub fn read_grid(path: &Path) -> Result<CopulaGrid> {
    let text = fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    grid_from_csv(&text, &label)
}

pub fn samples_to_csv(samples: &SampleSet) -> String {
    let mut out = String::from("x,y\n");
    for &(x, y) in samples.pairs() {
        writeln!(out, "{},{}", format_number(x), format_number(y)).unwrap();
    }
    out
}

/// Parses an `x,y` sample file. `pseudo` marks the values as
/// pseudo-observations in `(0, 1)`, which the estimator bins directly instead
/// of ranking.
pub fn samples_from_csv(text: &str, pseudo: bool) -> Result<SampleSet> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| CopulaError::Parse("empty sample file".into()))?;
    if header.replace(' ', "") != "x,y" {
        return Err(CopulaError::Parse(format!(
            "expected header 'x,y', got '{header}'"
        )));
    }
    let mut pairs = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut parts = line.split(',').map(str::trim);
        let parse = |p: Option<&str>| -> Result<f64> {
            p.and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| CopulaError::Parse(format!("line {}: expected 'x,y'", i + 2)))
        };
        let x = parse(parts.next())?;
        let y = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(CopulaError::Parse(format!(
                "line {}: too many fields",
                i + 2
            )));
        }
        pairs.push((x, y));
    }
    if pairs.len() < 2 {
        return Err(CopulaError::TooFewSamples {
            count: pairs.len(),
            min: 4,
        });
    }
    SampleSet::new(pairs, pseudo)
}

/// Plain PGM (P2, 8-bit): gray level proportional to cell mass, the heaviest
/// cell white. Image rows run from high to low first coordinate so the
/// picture has the usual orientation.
pub fn heatmap_pgm(grid: &CopulaGrid) -> String {
    let n = grid.n();
    let max = grid.masses().iter().cloned().fold(0.0, f64::max);
    let mut out = format!("P2\n{n} {n}\n255\n");
    for i in (0..n).rev() {
        let line: Vec<String> = (0..n)
            .map(|j| {
                let level = if max > 0.0 {
                    grid.mass(i, j) / max
                } else {
                    0.0
                };
                ((level * 255.0).round() as u8).to_string()
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Mass matrix as plain CSV without header, in the same orientation as the
/// PGM.
pub fn heatmap_csv(grid: &CopulaGrid) -> String {
    let n = grid.n();
    let mut out = String::new();
    for i in (0..n).rev() {
        let line: Vec<String> = (0..n).map(|j| format_number(grid.mass(i, j))).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
