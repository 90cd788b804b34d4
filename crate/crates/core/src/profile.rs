//! Exact step-function representation of conditional distribution profiles.
//!
//! Row `i` of a [`ProfileField`] is the map `t -> d/dt C(v, t)` at `v = (i+1)/n`,
//! held as a right-continuous step function on `[0, 1]` with arbitrary
//! breakpoints. Grid-derived rows have breakpoints `j/n`; the upper product
//! transform moves breakpoints to the values of the input, and sorting or
//! inverting moves them again. Keeping them exact is what makes `T o T` equal
//! the increasing rearrangement and `S o S` the identity.

use crate::error::{CopulaError, Result};
use crate::grid::{CopulaGrid, DerivativeField};
use crate::quadrature::vertex_weights;

/// Right-continuous step function on `[0, 1]`.
///
/// `knots` has one more element than `values`, starts at 0 and ends at 1; piece
/// `i` takes `values[i]` on `[knots[i], knots[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl StepProfile {
    /// Step function with `values.len()` equal-width bins.
    pub fn uniform(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0, "empty profile");
        let knots = (0..=n).map(|j| j as f64 / n as f64).collect();
        Self::from_parts(knots, values.to_vec())
    }

    /// Builds a profile from explicit breakpoints, dropping empty pieces and
    /// merging neighbours with identical values.
    pub fn from_parts(knots: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(
            knots.len(),
            values.len() + 1,
            "knots/values length mismatch"
        );
        let mut k = Vec::with_capacity(knots.len());
        let mut v: Vec<f64> = Vec::with_capacity(values.len());
        k.push(0.0);
        for (i, &val) in values.iter().enumerate() {
            let right = if i + 1 == values.len() {
                1.0
            } else {
                knots[i + 1].clamp(0.0, 1.0)
            };
            let left = *k.last().unwrap();
            if right <= left {
                continue;
            }
            if v.last() == Some(&val) {
                *k.last_mut().unwrap() = right;
            } else {
                v.push(val);
                k.push(right);
            }
        }
        if v.is_empty() {
            // all pieces degenerate: keep the last value on the full interval
            v.push(*values.last().unwrap());
            k.push(1.0);
        }
        StepProfile {
            knots: k,
            values: v,
        }
    }

    pub fn constant(value: f64) -> Self {
        StepProfile {
            knots: vec![0.0, 1.0],
            values: vec![value],
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(left, right, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.knots[i], self.knots[i + 1], v))
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.knots[1..].partition_point(|&k| k <= t);
        self.values[idx.min(self.values.len() - 1)]
    }

    /// Left limit at `t` (the value just before `t`).
    pub fn left_limit(&self, t: f64) -> f64 {
        let idx = self.knots[1..].partition_point(|&k| k < t);
        self.values[idx.min(self.values.len() - 1)]
    }

    /// `int_0^u f(t) dt`.
    pub fn integral_to(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let mut acc = 0.0;
        for (l, r, v) in self.pieces() {
            if r <= u {
                acc += (r - l) * v;
            } else {
                if u > l {
                    acc += (u - l) * v;
                }
                break;
            }
        }
        acc
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(l, r, v)| (r - l) * v).sum()
    }

    /// `int_0^1 g(f(t)) dt`.
    pub fn integral_of<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.pieces().map(|(l, r, v)| (r - l) * g(v)).sum()
    }

    /// Averages over `n` equal bins.
    pub fn bin_averages(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut prev = 0.0;
        for l in 1..=n {
            let cur = self.integral_to(l as f64 / n as f64);
            out.push(n as f64 * (cur - prev));
            prev = cur;
        }
        out
    }

    /// Largest upward jump between consecutive pieces (0 for nonincreasing
    /// profiles).
    pub fn max_rise(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.max_rise() <= tol
    }

    /// The survival-measure profile `u -> lambda{t : f(t) > u}`.
    ///
    /// This is the conditional profile of the upper product with independence:
    /// `d/du int_0^1 min(f(t), u) dt`.
    pub fn survival(&self) -> StepProfile {
        let mut levels: Vec<(f64, f64)> = self
            .pieces()
            .map(|(l, r, v)| (v.clamp(0.0, 1.0), r - l))
            .collect();
        levels.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(levels.len());
        for (v, w) in levels {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => merged.push((v, w)),
            }
        }
        // mass strictly above each level
        let mut above = vec![0.0; merged.len() + 1];
        for i in (0..merged.len()).rev() {
            above[i] = above[i + 1] + merged[i].1;
        }
        let mut knots = vec![0.0];
        let mut values = Vec::new();
        let mut cursor = 0.0;
        for (i, &(level, _)) in merged.iter().enumerate() {
            if level > cursor {
                values.push(above[i]);
                knots.push(level);
                cursor = level;
            }
        }
        if cursor < 1.0 {
            values.push(0.0);
            knots.push(1.0);
        } else {
            *knots.last_mut().unwrap() = 1.0;
        }
        StepProfile::from_parts(knots, values)
    }

    /// Decreasing rearrangement: the same pieces sorted by value, largest first.
    pub fn decreasing_rearrangement(&self) -> StepProfile {
        let mut pieces: Vec<(f64, f64)> = self.pieces().map(|(l, r, v)| (v, r - l)).collect();
        pieces.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut knots = Vec::with_capacity(pieces.len() + 1);
        let mut values = Vec::with_capacity(pieces.len());
        knots.push(0.0);
        let mut acc = 0.0;
        for (v, w) in pieces {
            acc += w;
            values.push(v);
            knots.push(acc);
        }
        *knots.last_mut().unwrap() = 1.0;
        StepProfile::from_parts(knots, values)
    }

    /// Generalized inverse `w -> inf{t : f(t) <= w}` of a nonincreasing profile
    /// (with `inf {} = 1`). The caller guarantees monotonicity.
    pub fn generalized_inverse(&self) -> StepProfile {
        let m = self.values.len();
        let mut knots = vec![0.0];
        let mut values = Vec::with_capacity(m + 1);
        let mut cursor = 0.0;
        // below the smallest value nothing satisfies f(t) <= w
        let lowest = self.values[m - 1].clamp(0.0, 1.0);
        if lowest > cursor {
            values.push(1.0);
            knots.push(lowest);
            cursor = lowest;
        }
        // on [a_i, a_{i-1}) the first piece with value <= w is piece i
        for i in (1..m).rev() {
            let upper = self.values[i - 1].clamp(0.0, 1.0);
            if upper > cursor {
                values.push(self.knots[i]);
                knots.push(upper);
                cursor = upper;
            }
        }
        if cursor < 1.0 {
            values.push(0.0);
            knots.push(1.0);
        } else {
            *knots.last_mut().unwrap() = 1.0;
        }
        StepProfile::from_parts(knots, values)
    }

    /// Prefix integrals at every breakpoint: `(x, int_0^x f)`.
    pub fn prefix_points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.knots.len());
        let mut acc = 0.0;
        out.push((0.0, 0.0));
        for (l, r, v) in self.pieces() {
            acc += (r - l) * v;
            out.push((r, acc));
        }
        out
    }

    /// Walks the common refinement of two profiles, yielding
    /// `(width, self value, other value)`.
    pub fn zip_pieces<'a>(&'a self, other: &'a StepProfile) -> ZipPieces<'a> {
        ZipPieces {
            a: self,
            b: other,
            i: 0,
            j: 0,
            cursor: 0.0,
        }
    }

    /// `int_0^1 |f - g|^p`.
    pub fn lp_distance_pow(&self, other: &StepProfile, p: f64) -> f64 {
        self.zip_pieces(other)
            .map(|(w, a, b)| w * (a - b).abs().powf(p))
            .sum()
    }
}

pub struct ZipPieces<'a> {
    a: &'a StepProfile,
    b: &'a StepProfile,
    i: usize,
    j: usize,
    cursor: f64,
}

impl Iterator for ZipPieces<'_> {
    type Item = (f64, f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.i >= self.a.values.len() || self.j >= self.b.values.len() {
                return None;
            }
            let ra = self.a.knots[self.i + 1];
            let rb = self.b.knots[self.j + 1];
            let right = ra.min(rb);
            let item = (
                right - self.cursor,
                self.a.values[self.i],
                self.b.values[self.j],
            );
            if ra <= right {
                self.i += 1;
            }
            if rb <= right {
                self.j += 1;
            }
            let width = item.0;
            self.cursor = right;
            if width > 0.0 {
                return Some(item);
            }
        }
    }
}

/// Conditional profiles at the vertex rows `v = 1/n, ..., 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileField {
    n: usize,
    rows: Vec<StepProfile>,
}

impl ProfileField {
    pub fn new(n: usize, rows: Vec<StepProfile>) -> Self {
        assert_eq!(
            rows.len(),
            n,
            "profile field needs one row per vertex level"
        );
        ProfileField { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row `i` holds the profile at `v = (i + 1)/n`.
    pub fn rows(&self) -> &[StepProfile] {
        &self.rows
    }

    pub fn map_rows<F: Fn(&StepProfile) -> StepProfile>(&self, f: F) -> ProfileField {
        ProfileField {
            n: self.n,
            rows: self.rows.iter().map(f).collect(),
        }
    }

    /// `C(k/n, l/n)` for `k, l = 0..=n`, row-major `(n+1) x (n+1)`.
    pub fn vertex_values(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; (n + 1) * (n + 1)];
        for (i, row) in self.rows.iter().enumerate() {
            let k = i + 1;
            let pts = row.prefix_points();
            // integral is piecewise linear between breakpoints
            let mut p = 0;
            for l in 0..=n {
                let u = l as f64 / n as f64;
                while p + 1 < pts.len() && pts[p + 1].0 <= u {
                    p += 1;
                }
                let val = if p + 1 < pts.len() && pts[p].0 < u {
                    let (x0, y0) = pts[p];
                    let (x1, y1) = pts[p + 1];
                    y0 + (y1 - y0) * (u - x0) / (x1 - x0)
                } else {
                    pts[p].1
                };
                out[k * (n + 1) + l] = val;
            }
            // exact boundary: C(v, 1) = v
            out[k * (n + 1) + n] = k as f64 / n as f64;
        }
        out
    }

    /// Checkerboard projection: the grid whose vertex values coincide with
    /// this field's.
    pub fn to_grid(&self, label: impl Into<String>) -> CopulaGrid {
        CopulaGrid::from_vertex_values(self.n, &self.vertex_values(), label)
    }

    /// Bin averages of every row.
    pub fn to_field(&self) -> DerivativeField {
        self.to_grid("").derivative_field()
    }

    /// Largest upward jump over all rows, with the row index.
    pub fn worst_rise(&self) -> (usize, f64) {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.max_rise()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    pub fn is_si(&self, tol: f64) -> bool {
        self.worst_rise().1 <= tol
    }

    /// `sum_k w_k f(row_k, v_k)` with the vertex quadrature in `v`; row 0 is the
    /// zero profile and contributes `f(0, 0)`, which callers arrange to vanish.
    pub(crate) fn integrate_rows<F: FnMut(&StepProfile, f64) -> f64>(&self, mut f: F) -> f64 {
        let w = vertex_weights(self.n);
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let k = i + 1;
                w[k] * f(row, k as f64 / self.n as f64)
            })
            .sum()
    }

    pub(crate) fn check_same_n(&self, other: &ProfileField) -> Result<()> {
        if self.n != other.n {
            return Err(CopulaError::ResolutionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl From<&DerivativeField> for ProfileField {
    fn from(field: &DerivativeField) -> Self {
        let n = field.n();
        let rows = (1..=n)
            .map(|k| StepProfile::uniform(field.row(k)))
            .collect();
        ProfileField { n, rows }
    }
}

impl From<&CopulaGrid> for ProfileField {
    fn from(grid: &CopulaGrid) -> Self {
        ProfileField::from(&grid.derivative_field())
    }
}
