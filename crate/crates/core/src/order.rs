//! Distances between copula derivatives and the lower orthant and Schur orders.

use serde::Serialize;

use crate::error::{CopulaError, Result};
use crate::grid::{CopulaGrid, DerivativeField};
use crate::profile::{ProfileField, StepProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Less,
    Greater,
    Equal,
    Incomparable,
}

impl Relation {
    /// The relation seen from the other side.
    pub fn flip(self) -> Relation {
        match self {
            Relation::Less => Relation::Greater,
            Relation::Greater => Relation::Less,
            r => r,
        }
    }

    pub fn is_less_or_equal(self) -> bool {
        matches!(self, Relation::Less | Relation::Equal)
    }
}

/// Location and size of the smaller of the two conflicting violations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub index: (usize, usize),
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub witness: Option<Witness>,
}

/// Tracks the largest excess in each direction of `a - b`.
#[derive(Default)]
struct Excess {
    above: (f64, (usize, usize)),
    below: (f64, (usize, usize)),
}

impl Excess {
    fn push(&mut self, diff: f64, at: (usize, usize)) {
        if diff > self.above.0 {
            self.above = (diff, at);
        }
        if -diff > self.below.0 {
            self.below = (-diff, at);
        }
    }

    fn verdict(&self, tol: f64) -> OrderVerdict {
        let (up, down) = (self.above.0 > tol, self.below.0 > tol);
        let relation = match (up, down) {
            (false, false) => Relation::Equal,
            (false, true) => Relation::Less,
            (true, false) => Relation::Greater,
            (true, true) => Relation::Incomparable,
        };
        let witness = (relation == Relation::Incomparable).then(|| {
            let (magnitude, index) = if self.above.0 <= self.below.0 {
                self.above
            } else {
                self.below
            };
            Witness { index, magnitude }
        });
        OrderVerdict { relation, witness }
    }

    fn margin(&self, tol: f64) -> f64 {
        (self.above.0 - tol).abs().min((self.below.0 - tol).abs())
    }
}

fn mismatch(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(CopulaError::ResolutionMismatch { left: a, right: b });
    }
    Ok(())
}

/// `(sum_k w_k int |f_k - g_k|^p)^(1/p)` over the exact profiles.
pub fn dp_distance_profiles(a: &ProfileField, b: &ProfileField, p: f64) -> Result<f64> {
    a.check_same_n(b)?;
    if p < 1.0 {
        return Err(CopulaError::ParamOutOfRange(format!(
            "p = {p} must be at least 1"
        )));
    }
    let rows = b.rows();
    let mut i = 0;
    let s = a.integrate_rows(|row, _| {
        let d = row.lp_distance_pow(&rows[i], p);
        i += 1;
        d
    });
    Ok(s.max(0.0).powf(1.0 / p))
}

/// `d_p` between derivative fields.
pub fn dp_distance(d: &DerivativeField, e: &DerivativeField, p: f64) -> Result<f64> {
    mismatch(d.n(), e.n())?;
    dp_distance_profiles(&ProfileField::from(d), &ProfileField::from(e), p)
}

/// `(sum_k w_k int |f_k|^p)^(1/p)`.
pub fn norm_profiles(a: &ProfileField, p: f64) -> f64 {
    a.integrate_rows(|row, _| row.integral_of(|h| h.abs().powf(p)))
        .powf(1.0 / p)
}

/// Largest vertex-wise difference of two grids.
pub fn vertex_sup_distance(a: &CopulaGrid, b: &CopulaGrid) -> Result<f64> {
    mismatch(a.n(), b.n())?;
    Ok(a.vertex_values()
        .iter()
        .zip(b.vertex_values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

fn lo_excess_grid(a: &CopulaGrid, b: &CopulaGrid) -> Excess {
    let m = a.n() + 1;
    let mut ex = Excess::default();
    for (idx, (x, y)) in a.vertex_values().iter().zip(b.vertex_values()).enumerate() {
        ex.push(x - y, (idx / m, idx % m));
    }
    ex
}

/// Pointwise order of two grids at their vertices.
pub fn lo_compare(a: &CopulaGrid, b: &CopulaGrid, tol: f64) -> Result<OrderVerdict> {
    mismatch(a.n(), b.n())?;
    Ok(lo_excess_grid(a, b).verdict(tol))
}

/// Compares two nondecreasing piecewise-linear functions given by their
/// breakpoints, at the union of breakpoints (where any extreme difference
/// occurs). Witness index is `(row, breakpoint)`.
fn push_piecewise_linear(ex: &mut Excess, row: usize, f: &[(f64, f64)], g: &[(f64, f64)]) {
    let eval = |pts: &[(f64, f64)], x: f64| {
        let i = pts.partition_point(|p| p.0 <= x);
        if i == 0 {
            return pts[0].1;
        }
        if i >= pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (x0, y0) = pts[i - 1];
        let (x1, y1) = pts[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    };
    let mut xs: Vec<f64> = f.iter().chain(g).map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for (i, &x) in xs.iter().enumerate() {
        ex.push(eval(f, x) - eval(g, x), (row + 1, i));
    }
}

fn lo_excess_profiles(a: &ProfileField, b: &ProfileField) -> Excess {
    let mut ex = Excess::default();
    for (k, (ra, rb)) in a.rows().iter().zip(b.rows()).enumerate() {
        push_piecewise_linear(&mut ex, k, &ra.prefix_points(), &rb.prefix_points());
    }
    ex
}

/// Pointwise order of the copulas described by exact profiles: each row's
/// integral is compared at all breakpoints.
pub fn lo_compare_profiles(a: &ProfileField, b: &ProfileField, tol: f64) -> Result<OrderVerdict> {
    a.check_same_n(b)?;
    Ok(lo_excess_profiles(a, b).verdict(tol))
}

fn sorted_prefix(row: &StepProfile) -> Vec<(f64, f64)> {
    row.decreasing_rearrangement().prefix_points()
}

fn schur_excess(a: &ProfileField, b: &ProfileField) -> Excess {
    let mut ex = Excess::default();
    for (k, (ra, rb)) in a.rows().iter().zip(b.rows()).enumerate() {
        push_piecewise_linear(&mut ex, k, &sorted_prefix(ra), &sorted_prefix(rb));
    }
    ex
}

/// Schur order of copula derivatives: row by row, the running integrals of
/// the decreasing rearrangements are compared.
pub fn schur_compare_profiles(
    a: &ProfileField,
    b: &ProfileField,
    tol: f64,
) -> Result<OrderVerdict> {
    a.check_same_n(b)?;
    Ok(schur_excess(a, b).verdict(tol))
}

pub fn schur_compare(d: &DerivativeField, e: &DerivativeField, tol: f64) -> Result<OrderVerdict> {
    mismatch(d.n(), e.n())?;
    let n = d.n();
    let mut ex = Excess::default();
    for k in 1..=n {
        let mut a = d.row(k).to_vec();
        let mut b = e.row(k).to_vec();
        a.sort_by(|x, y| y.total_cmp(x));
        b.sort_by(|x, y| y.total_cmp(x));
        let (mut sa, mut sb) = (0.0, 0.0);
        for j in 0..n {
            sa += a[j];
            sb += b[j];
            ex.push((sa - sb) / n as f64, (k, j + 1));
        }
    }
    Ok(ex.verdict(tol))
}

/// Which comparison a robustness probe should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    LowerOrthant,
    Schur,
}

/// Verdict for the exact profiles if it is the same at `tol / 10`, `tol` and
/// `10 tol`; `None` for near-ties whose verdict depends on the tolerance.
pub fn robust_relation(
    kind: OrderKind,
    a: &ProfileField,
    b: &ProfileField,
    tol: f64,
) -> Result<Option<Relation>> {
    a.check_same_n(b)?;
    let ex = match kind {
        OrderKind::LowerOrthant => lo_excess_profiles(a, b),
        OrderKind::Schur => schur_excess(a, b),
    };
    let r = ex.verdict(tol).relation;
    let stable = [tol / 10.0, 10.0 * tol]
        .iter()
        .all(|&t| ex.verdict(t).relation == r);
    Ok(stable.then_some(r))
}

/// Distance of the observed excesses from the decision threshold.
pub fn decision_margin(kind: OrderKind, a: &ProfileField, b: &ProfileField, tol: f64) -> f64 {
    match kind {
        OrderKind::LowerOrthant => lo_excess_profiles(a, b).margin(tol),
        OrderKind::Schur => schur_excess(a, b).margin(tol),
    }
}
