//! Copula products and the operators acting on conditional profiles: the
//! upper product transform `T(C) = C v Pi`, the increasing rearrangement, and
//! the reflection `S`.

use crate::error::{CopulaError, Result};
use crate::grid::{CopulaGrid, DerivativeField};
use crate::normal;
use crate::profile::{ProfileField, StepProfile};
use crate::quadrature::{gauss_legendre_nodes, kahan_sum};

/// Rows may rise by this much and still count as nonincreasing for `S`.
pub const SI_TOL: f64 = 1e-12;

fn check_same_n(d: &DerivativeField, e: &DerivativeField) -> Result<()> {
    if d.n() != e.n() {
        return Err(CopulaError::ResolutionMismatch {
            left: d.n(),
            right: e.n(),
        });
    }
    Ok(())
}

/// Grid with vertex values `V(k, l) = (1/n) sum_j op(h_D[k][j], h_E[l][j])`.
///
/// Cell masses are formed from the second differences of `op` inside the sum
/// rather than by differencing vertex values: derivative fields of the result
/// multiply every absolute error by `n`, and differencing values near 1/2
/// would leave errors of order `n^2` ulps.
fn product_grid<F: Fn(f64, f64) -> f64>(
    d: &DerivativeField,
    e: &DerivativeField,
    op: F,
    label: String,
) -> CopulaGrid {
    let n = d.n();
    let zeros = vec![0.0; n];
    // rows 0..=n, row 0 being the zero profile
    let rows = |f: &'_ DerivativeField| -> Vec<Vec<f64>> {
        std::iter::once(zeros.clone())
            .chain(f.rows().map(<[f64]>::to_vec))
            .collect()
    };
    let (rd, re) = (rows(d), rows(e));
    let mut mass = vec![0.0; n * n];
    for i in 0..n {
        let (a0, a1) = (&rd[i], &rd[i + 1]);
        for j in 0..n {
            let (b0, b1) = (&re[j], &re[j + 1]);
            let s = kahan_sum((0..n).map(|t| {
                (op(a1[t], b1[t]) - op(a0[t], b1[t])) - (op(a1[t], b0[t]) - op(a0[t], b0[t]))
            }));
            mass[i * n + j] = (s / n as f64).max(0.0);
        }
    }
    CopulaGrid::from_flat(n, mass, label)
}

/// Upper product `D v E`: conditional laws coupled comonotonically.
pub fn upper_product(d: &DerivativeField, e: &DerivativeField) -> Result<CopulaGrid> {
    check_same_n(d, e)?;
    Ok(product_grid(d, e, f64::min, "upper-product".into()))
}

/// Markov product `D * E`: conditional laws coupled independently.
pub fn markov_product(d: &DerivativeField, e: &DerivativeField) -> Result<CopulaGrid> {
    check_same_n(d, e)?;
    Ok(product_grid(d, e, |x, y| x * y, "markov-product".into()))
}

/// `T` on exact profiles: every row is replaced by its survival profile.
pub fn upper_transform_profiles(p: &ProfileField) -> ProfileField {
    p.map_rows(StepProfile::survival)
}

pub fn upper_transform(field: &DerivativeField) -> CopulaGrid {
    upper_transform_profiles(&ProfileField::from(field)).to_grid("T")
}

/// Increasing rearrangement on exact profiles: every row sorted decreasingly.
pub fn rearrange_profiles(p: &ProfileField) -> ProfileField {
    p.map_rows(StepProfile::decreasing_rearrangement)
}

/// Rows of the field sorted into nonincreasing order. Equal-width bins make
/// this exact, so it coincides with `T(T(C))` at every vertex.
pub fn increasing_rearrangement(field: &DerivativeField) -> CopulaGrid {
    let rows: Vec<Vec<f64>> = field
        .rows()
        .map(|r| {
            let mut r = r.to_vec();
            r.sort_by(|a, b| b.total_cmp(a));
            r
        })
        .collect();
    DerivativeField::from_rows(&rows).to_grid("rearranged")
}

/// `S` on exact profiles: generalized inverse of every (nonincreasing) row.
pub fn reflect_profiles(p: &ProfileField) -> Result<ProfileField> {
    let (row, magnitude) = p.worst_rise();
    if magnitude > SI_TOL {
        return Err(CopulaError::NotStochasticallyIncreasing {
            row: row + 1,
            magnitude,
        });
    }
    // rises below tolerance are round-off; sorting removes them before inverting
    Ok(p.map_rows(|r| r.decreasing_rearrangement().generalized_inverse()))
}

pub fn reflection(field: &DerivativeField) -> Result<CopulaGrid> {
    let (row, magnitude) = field.worst_rise();
    if magnitude > SI_TOL {
        return Err(CopulaError::NotStochasticallyIncreasing { row, magnitude });
    }
    Ok(reflect_profiles(&ProfileField::from(field))?.to_grid("S"))
}

/// Marginal law `F` for the convolution construction of fixed points of `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalSpec {
    Normal,
    Uniform,
}

impl MarginalSpec {
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            MarginalSpec::Normal => normal::cdf(x),
            MarginalSpec::Uniform => x.clamp(0.0, 1.0),
        }
    }

    pub fn quantile(self, t: f64) -> f64 {
        match self {
            MarginalSpec::Normal => normal::quantile(t),
            MarginalSpec::Uniform => t.clamp(0.0, 1.0),
        }
    }

    /// Distribution function of the sum of two independent draws.
    pub fn conv_cdf(self, x: f64) -> f64 {
        match self {
            MarginalSpec::Normal => normal::cdf(x / std::f64::consts::SQRT_2),
            MarginalSpec::Uniform => {
                if x <= 0.0 {
                    0.0
                } else if x <= 1.0 {
                    0.5 * x * x
                } else if x < 2.0 {
                    1.0 - 0.5 * (2.0 - x) * (2.0 - x)
                } else {
                    1.0
                }
            }
        }
    }

    pub fn conv_quantile(self, v: f64) -> f64 {
        match self {
            MarginalSpec::Normal => std::f64::consts::SQRT_2 * normal::quantile(v),
            MarginalSpec::Uniform => {
                let v = v.clamp(0.0, 1.0);
                if v <= 0.5 {
                    (2.0 * v).sqrt()
                } else {
                    2.0 - (2.0 * (1.0 - v)).sqrt()
                }
            }
        }
    }

    /// `k_v(t) = F(G^{-1}(v) - F^{-1}(t))`.
    pub fn kernel(self, v: f64, t: f64) -> f64 {
        self.cdf(self.conv_quantile(v) - self.quantile(t))
    }
}

impl std::str::FromStr for MarginalSpec {
    type Err = CopulaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" => Ok(MarginalSpec::Normal),
            "uniform" => Ok(MarginalSpec::Uniform),
            other => Err(CopulaError::Parse(format!("unknown marginal '{other}'"))),
        }
    }
}

/// Grid of the copula with conditional profiles `k_v`.
///
/// Bin averages come from 8-point Gauss-Legendre per bin. The discretized
/// rows only have mean `v` up to `O(1/n^2)`, so row `k` uses the level `v'`
/// near `k/n` whose bin averages have mean exactly `k/n` (found by secant
/// steps). Adjusting the level rather than rescaling keeps the rows ordered
/// in `k`, which the cell masses need to stay nonnegative.
pub fn convolution_fixed_point(marginal: MarginalSpec, n: usize) -> Result<CopulaGrid> {
    if n < 2 {
        return Err(CopulaError::ParamOutOfRange(format!(
            "resolution n = {n} must be at least 2"
        )));
    }
    // F^{-1} at the Gauss-Legendre nodes of every bin, with the node weights
    // already scaled to produce bin averages
    let nodes: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|j| {
            let (a, b) = (j as f64 / n as f64, (j + 1) as f64 / n as f64);
            gauss_legendre_nodes(a, b)
                .iter()
                .map(|&(t, w)| (marginal.quantile(t), w * n as f64))
                .collect()
        })
        .collect();
    let row_at = |level: f64| -> Vec<f64> {
        let g = marginal.conv_quantile(level);
        nodes
            .iter()
            .map(|bin| {
                bin.iter()
                    .map(|&(q, w)| w * marginal.cdf(g - q))
                    .sum::<f64>()
                    .clamp(0.0, 1.0)
            })
            .collect()
    };
    let mean = |row: &[f64]| row.iter().sum::<f64>() / n as f64;
    let mut rows = Vec::with_capacity(n);
    for k in 1..n {
        let v = k as f64 / n as f64;
        let (mut x0, mut x1) = (v, v);
        let mut row = row_at(x0);
        let mut e0 = mean(&row) - v;
        if e0 != 0.0 {
            x1 = (v - e0).clamp(1e-300, 1.0 - 1e-16);
        }
        for _ in 0..40 {
            if e0.abs() <= 1e-16 {
                break;
            }
            row = row_at(x1);
            let e1 = mean(&row) - v;
            if e1.abs() <= 1e-16 || e1 == e0 {
                break;
            }
            let next = (x1 - e1 * (x1 - x0) / (e1 - e0)).clamp(1e-300, 1.0 - 1e-16);
            x0 = x1;
            e0 = e1;
            x1 = next;
        }
        // remove the last few ulps of drift
        let m = mean(&row);
        if m > v {
            let f = v / m;
            row.iter_mut().for_each(|h| *h *= f);
        } else if m < v {
            let f = (1.0 - v) / (1.0 - m);
            row.iter_mut().for_each(|h| *h = 1.0 - (1.0 - *h) * f);
        }
        rows.push(row);
    }
    rows.push(vec![1.0; n]);
    let label = match marginal {
        MarginalSpec::Normal => "fixed-point:normal",
        MarginalSpec::Uniform => "fixed-point:uniform",
    };
    Ok(DerivativeField::from_rows(&rows).to_grid(label))
}

/// Distance in the sup norm from `(x, y)` to the completed graph of the
/// nonincreasing step function `h`, with `h(0-) = 1` and `h(1+) = 0`.
fn graph_distance(h: &StepProfile, x: f64, y: f64) -> f64 {
    let within = |r: f64| {
        let right = if x + r >= 1.0 { 0.0 } else { h.value_at(x + r) };
        let left = if x - r <= 0.0 {
            1.0
        } else {
            h.left_limit(x - r)
        };
        right <= y + r && left >= y - r
    };
    if within(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if within(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Largest deviation from the involution property `h_v(h_v(t)) = t`, measured
/// as the distance of each reflected point `(h_v(t), t)` to the graph of `h_v`,
/// over all interior rows and bin-midpoint samples of `t`. Rows that are not
/// nonincreasing contribute at least their largest rise.
pub fn involution_defect(p: &ProfileField) -> f64 {
    let n = p.n();
    let mut worst: f64 = 0.0;
    for row in &p.rows()[..n - 1] {
        worst = worst.max(row.max_rise());
        for j in 0..n {
            let t = (j as f64 + 0.5) / n as f64;
            let ht = row.value_at(t);
            worst = worst.max(graph_distance(row, ht, t));
        }
    }
    worst
}
