//! Checkerboard copulas, their derivative fields and sample sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Axis, CopulaError, Result};

/// Tolerance for marginal sums on externally supplied matrices.
pub const INPUT_TOL: f64 = 1e-9;
/// Marginals are re-fitted when they drift further than this.
const INTERNAL_TOL: f64 = 1e-13;

/// Checkerboard copula held as an `n x n` cell-mass matrix.
///
/// Row `i` covers the first coordinate `v` in `[i/n, (i+1)/n)`, column `j` the
/// conditioning coordinate `t` in `[j/n, (j+1)/n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaGrid {
    n: usize,
    mass: Vec<f64>,
    label: String,
}

impl CopulaGrid {
    /// Validating constructor. Entries in `[-1e-12, 0)` are treated as round-off
    /// and clamped; marginals may be off by up to `1e-9` and are then fitted back
    /// to exact uniformity.
    pub fn from_mass(matrix: &[Vec<f64>], label: impl Into<String>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(CopulaError::Empty);
        }
        let mut mass = Vec::with_capacity(n * n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(CopulaError::NonSquare {
                    rows: n,
                    bad_row: i,
                    cols: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(CopulaError::NonFinite { row: i, col: j });
                }
                if x < -1e-12 {
                    return Err(CopulaError::NegativeMass {
                        row: i,
                        col: j,
                        value: x,
                    });
                }
                mass.push(x.max(0.0));
            }
        }
        check_marginals(n, &mass, INPUT_TOL)?;
        if marginal_deviation(n, &mass).2 > INTERNAL_TOL {
            proportional_fit(n, &mut mass, 1e-15, 10_000);
        }
        Ok(CopulaGrid {
            n,
            mass,
            label: label.into(),
        })
    }

    /// Grid from row-major masses already known to be valid (internal use).
    pub(crate) fn from_flat(n: usize, mass: Vec<f64>, label: impl Into<String>) -> Self {
        debug_assert_eq!(mass.len(), n * n);
        CopulaGrid {
            n,
            mass,
            label: label.into(),
        }
    }

    /// Grid whose cumulative sums are the given `(n+1) x (n+1)` vertex values.
    pub fn from_vertex_values(n: usize, verts: &[f64], label: impl Into<String>) -> Self {
        let m = n + 1;
        assert_eq!(verts.len(), m * m);
        let mut mass = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let d = verts[(i + 1) * m + j + 1] - verts[i * m + j + 1] - verts[(i + 1) * m + j]
                    + verts[i * m + j];
                mass.push(d.max(0.0));
            }
        }
        Self::from_flat(n, mass, label)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Mass of cell `(i, j)`, zero-based.
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.n + j]
    }

    /// Row-major cell masses.
    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn mass_matrix(&self) -> Vec<Vec<f64>> {
        self.mass.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Cumulative sums `C(k/n, l/n)` for `k, l = 0..=n`, row-major.
    pub fn vertex_values(&self) -> Vec<f64> {
        let n = self.n;
        let m = n + 1;
        let mut v = vec![0.0; m * m];
        for i in 0..n {
            let mut run = 0.0;
            for j in 0..n {
                run += self.mass[i * n + j];
                v[(i + 1) * m + j + 1] = v[i * m + j + 1] + run;
            }
        }
        // boundary values are known exactly
        for k in 0..=n {
            v[k * m + n] = k as f64 / n as f64;
            v[n * m + k] = k as f64 / n as f64;
        }
        v
    }

    /// `h[k][j] = n * sum_{i < k} mass[i][j]`, rows `k = 1..=n`.
    pub fn derivative_field(&self) -> DerivativeField {
        let n = self.n;
        let mut h = vec![0.0; n * n];
        let mut acc = vec![0.0; n];
        for k in 0..n {
            for j in 0..n {
                acc[j] += self.mass[k * n + j];
                h[k * n + j] = (n as f64 * acc[j]).clamp(0.0, 1.0);
            }
        }
        h[(n - 1) * n..].fill(1.0);
        DerivativeField { n, h }
    }

    /// Piecewise-bilinear distribution function at `(x, y)`, where `x` is the
    /// first (row) coordinate.
    pub fn cdf(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(CopulaError::Domain(format!(
                "({x}, {y}) is outside the unit square"
            )));
        }
        let n = self.n;
        let m = n + 1;
        let verts = self.vertex_values();
        let sx = x * n as f64;
        let sy = y * n as f64;
        let i = (sx.floor() as usize).min(n - 1);
        let j = (sy.floor() as usize).min(n - 1);
        let fx = sx - i as f64;
        let fy = sy - j as f64;
        let c00 = verts[i * m + j];
        let c01 = verts[i * m + j + 1];
        let c10 = verts[(i + 1) * m + j];
        let c11 = verts[(i + 1) * m + j + 1];
        Ok((1.0 - fx) * (1.0 - fy) * c00
            + (1.0 - fx) * fy * c01
            + fx * (1.0 - fy) * c10
            + fx * fy * c11)
    }

    pub fn is_si(&self, tol: f64) -> bool {
        self.derivative_field().is_si(tol)
    }

    /// Draws `count` points: a cell with probability equal to its mass, then a
    /// uniform point inside it.
    pub fn sample(&self, count: usize, seed: u64) -> SampleSet {
        let n = self.n;
        let mut cum = Vec::with_capacity(n * n);
        let mut acc = 0.0;
        for &m in &self.mass {
            acc += m;
            cum.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::with_capacity(count);
        for _ in 0..count {
            let r = rng.random::<f64>() * total;
            let mut cell = cum.partition_point(|&c| c <= r).min(n * n - 1);
            while self.mass[cell] == 0.0 && cell > 0 {
                cell -= 1;
            }
            let (i, j) = (cell / n, cell % n);
            let x = (i as f64 + open01(&mut rng)) / n as f64;
            let y = (j as f64 + open01(&mut rng)) / n as f64;
            pairs.push((x, y));
        }
        SampleSet {
            pairs,
            pseudo: true,
        }
    }

    /// Random grid with uneven cell masses: i.i.d. uniforms raised to
    /// `sharpness`, fitted to uniform marginals.
    pub fn random(n: usize, sharpness: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mass: Vec<f64> = (0..n * n)
            .map(|_| open01(&mut rng).powf(sharpness))
            .collect();
        proportional_fit(n, &mut mass, 1e-15, 100_000);
        Self::from_flat(n, mass, format!("random:{seed}"))
    }
}

fn open01(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u = rng.random::<f64>();
        if u > 0.0 {
            return u;
        }
    }
}

/// `grid_from_mass` as a free function.
pub fn grid_from_mass(matrix: &[Vec<f64>], label: impl Into<String>) -> Result<CopulaGrid> {
    CopulaGrid::from_mass(matrix, label)
}

/// Worst row deviation, worst column deviation and their maximum, each as
/// `(index, deviation)` for rows and columns.
fn marginal_deviation(n: usize, mass: &[f64]) -> ((usize, f64, f64), (usize, f64, f64), f64) {
    let target = 1.0 / n as f64;
    let mut worst_row = (0, 0.0, target);
    let mut worst_col = (0, 0.0, target);
    let mut cols = vec![0.0; n];
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += mass[i * n + j];
            cols[j] += mass[i * n + j];
        }
        let d = (s - target).abs();
        if d > worst_row.1 {
            worst_row = (i, d, s);
        }
    }
    for (j, &s) in cols.iter().enumerate() {
        let d = (s - target).abs();
        if d > worst_col.1 {
            worst_col = (j, d, s);
        }
    }
    let worst = worst_row.1.max(worst_col.1);
    (worst_row, worst_col, worst)
}

fn check_marginals(n: usize, mass: &[f64], tol: f64) -> Result<()> {
    let (row, col, _) = marginal_deviation(n, mass);
    let expected = 1.0 / n as f64;
    let (axis, (index, deviation, sum)) = if row.1 >= col.1 {
        (Axis::Row, row)
    } else {
        (Axis::Column, col)
    };
    if deviation > tol {
        return Err(CopulaError::MarginalViolation {
            axis,
            index,
            sum,
            expected,
            deviation,
        });
    }
    Ok(())
}

/// Alternating row/column scaling until every marginal is within `tol` of
/// `1/n`. Empty rows or columns cannot be fitted; callers fill them first.
/// Returns whether the tolerance was reached.
pub fn proportional_fit(n: usize, mass: &mut [f64], tol: f64, max_iter: usize) -> bool {
    let target = 1.0 / n as f64;
    let mut cols = vec![0.0; n];
    for _ in 0..max_iter {
        for i in 0..n {
            let row = &mut mass[i * n..(i + 1) * n];
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                let f = target / s;
                row.iter_mut().for_each(|x| *x *= f);
            }
        }
        cols.fill(0.0);
        for i in 0..n {
            for j in 0..n {
                cols[j] += mass[i * n + j];
            }
        }
        for i in 0..n {
            for j in 0..n {
                if cols[j] > 0.0 {
                    mass[i * n + j] *= target / cols[j];
                }
            }
        }
        if marginal_deviation(n, mass).2 <= tol {
            return true;
        }
    }
    false
}

/// Conditional distribution functions on the grid: row `k` (for `k = 1..=n`)
/// holds `d/dt C(k/n, t)` on the `n` bins of `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeField {
    n: usize,
    h: Vec<f64>,
}

impl DerivativeField {
    /// Builds a field from rows `k = 1..=n`. No validation beyond shape.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "field must be square");
        DerivativeField {
            n,
            h: rows.concat(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row at `v = k/n`, `k` in `1..=n`.
    pub fn row(&self, k: usize) -> &[f64] {
        assert!(
            (1..=self.n).contains(&k),
            "row index {k} outside 1..={}",
            self.n
        );
        &self.h[(k - 1) * self.n..k * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.h.chunks(self.n)
    }

    /// `mass[i][j] = (h[i][j] - h[i-1][j]) / n`.
    pub fn to_grid(&self, label: impl Into<String>) -> CopulaGrid {
        let n = self.n;
        let mut mass = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let below = if i == 0 { 0.0 } else { self.h[(i - 1) * n + j] };
                mass[i * n + j] = ((self.h[i * n + j] - below) / n as f64).max(0.0);
            }
        }
        CopulaGrid::from_flat(n, mass, label)
    }

    /// Largest upward step within any row, with its row number `k`.
    pub fn worst_rise(&self) -> (usize, f64) {
        let mut worst = (1, 0.0);
        for (i, row) in self.rows().enumerate() {
            for w in row.windows(2) {
                if w[1] - w[0] > worst.1 {
                    worst = (i + 1, w[1] - w[0]);
                }
            }
        }
        worst
    }

    /// Every row nonincreasing up to `tol`.
    pub fn is_si(&self, tol: f64) -> bool {
        self.worst_rise().1 <= tol
    }
}

/// Bivariate observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pairs: Vec<(f64, f64)>,
    pseudo: bool,
}

impl SampleSet {
    pub fn new(pairs: Vec<(f64, f64)>, pseudo: bool) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(CopulaError::TooFewSamples {
                count: pairs.len(),
                min: 2,
            });
        }
        if let Some(p) = pairs.iter().find(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(CopulaError::Parse(format!("non-finite sample {p:?}")));
        }
        if pseudo {
            if let Some(p) = pairs
                .iter()
                .find(|p| !(p.0 > 0.0 && p.0 < 1.0 && p.1 > 0.0 && p.1 < 1.0))
            {
                return Err(CopulaError::Domain(format!(
                    "pseudo-observation {p:?} is not inside the open unit square"
                )));
            }
        }
        Ok(SampleSet { pairs, pseudo })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn is_pseudo(&self) -> bool {
        self.pseudo
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub const DEFAULT_EXPONENT: f64 = 0.45;

/// Resolution used by the empirical checkerboard for `count` observations.
pub fn estimator_resolution(count: usize, exponent: f64) -> usize {
    ((count as f64).powf(exponent).floor() as usize).max(1)
}

/// Zero-based bin of each value after ranking, ties broken by input order.
fn rank_bins(values: &[f64], n: usize) -> Vec<usize> {
    let count = values.len();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut bins = vec![0; count];
    for (r, &idx) in order.iter().enumerate() {
        bins[idx] = r * n / count;
    }
    bins
}

/// Rank-histogram checkerboard estimator at resolution `floor(count^exponent)`,
/// fitted to uniform marginals.
pub fn empirical_checkerboard(samples: &SampleSet, exponent: f64) -> Result<CopulaGrid> {
    if !(exponent > 0.0 && exponent < 0.5) {
        return Err(CopulaError::ParamOutOfRange(format!(
            "exponent {exponent} must lie in (0, 0.5)"
        )));
    }
    let count = samples.len();
    if count < 4 {
        return Err(CopulaError::TooFewSamples { count, min: 4 });
    }
    let xs: Vec<f64> = samples.pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = samples.pairs.iter().map(|p| p.1).collect();
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(CopulaError::DegenerateRanks("x"));
    }
    if ys.iter().all(|&y| y == ys[0]) {
        return Err(CopulaError::DegenerateRanks("y"));
    }
    let n = estimator_resolution(count, exponent);
    let (bx, by) = if samples.pseudo {
        let bin = |u: f64| ((u * n as f64) as usize).min(n - 1);
        (
            xs.iter().map(|&u| bin(u)).collect::<Vec<_>>(),
            ys.iter().map(|&u| bin(u)).collect::<Vec<_>>(),
        )
    } else {
        (rank_bins(&xs, n), rank_bins(&ys, n))
    };
    let mut mass = vec![0.0; n * n];
    let w = 1.0 / count as f64;
    for (&i, &j) in bx.iter().zip(&by) {
        mass[i * n + j] += w;
    }
    fill_empty_lines(n, &mut mass);
    proportional_fit(n, &mut mass, 1e-12, 100_000);
    Ok(CopulaGrid::from_flat(n, mass, format!("empirical:{count}")))
}

/// Pseudo-observations can leave a row or column of the histogram empty, which
/// proportional fitting cannot repair; such lines receive independence mass.
fn fill_empty_lines(n: usize, mass: &mut [f64]) {
    let fill = 1.0 / (n * n) as f64;
    for i in 0..n {
        if mass[i * n..(i + 1) * n].iter().all(|&x| x == 0.0) {
            mass[i * n..(i + 1) * n].fill(fill);
        }
    }
    for j in 0..n {
        if (0..n).all(|i| mass[i * n + j] == 0.0) {
            (0..n).for_each(|i| mass[i * n + j] = fill);
        }
    }
}
