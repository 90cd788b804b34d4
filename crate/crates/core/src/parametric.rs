//! Named copula families and their checkerboard discretizations.

use std::fmt;
use std::str::FromStr;

use crate::error::{CopulaError, Result};
use crate::grid::CopulaGrid;
use crate::normal;
use crate::quadrature::adaptive_simpson;

/// Correlations this close to +-1 are treated as M or W.
const RHO_EDGE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ParametricCopula {
    Gaussian {
        rho: f64,
    },
    /// `C(x, y) = xy + theta * xy(1 - x)(1 - y)`.
    Efgm {
        theta: f64,
    },
    FrechetM,
    FrechetW,
    Independence,
    /// One-based permutation of `m` stripes; stripe `i` of the first
    /// coordinate is mapped comonotonically onto stripe `sigma(i)`.
    ShuffleOfMin(Vec<usize>),
}

impl ParametricCopula {
    pub fn gaussian(rho: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(CopulaError::ParamOutOfRange(format!(
                "gaussian rho = {rho} must lie in [-1, 1]"
            )));
        }
        Ok(ParametricCopula::Gaussian { rho })
    }

    pub fn efgm(theta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&theta) {
            return Err(CopulaError::ParamOutOfRange(format!(
                "efgm theta = {theta} must lie in [-1, 1]"
            )));
        }
        Ok(ParametricCopula::Efgm { theta })
    }

    pub fn shuffle(sigma: Vec<usize>) -> Result<Self> {
        let m = sigma.len();
        let mut seen = vec![false; m];
        for &s in &sigma {
            if s == 0 || s > m || seen[s - 1] {
                return Err(CopulaError::ParamOutOfRange(format!(
                    "shuffle {sigma:?} is not a permutation of 1..={m}"
                )));
            }
            seen[s - 1] = true;
        }
        if m == 0 {
            return Err(CopulaError::ParamOutOfRange("empty shuffle".into()));
        }
        Ok(ParametricCopula::ShuffleOfMin(sigma))
    }

    /// Distribution function at `(x, y)`, `x` the first coordinate.
    pub fn cdf(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let y = y.clamp(0.0, 1.0);
        match self {
            ParametricCopula::Independence => x * y,
            ParametricCopula::FrechetM => x.min(y),
            ParametricCopula::FrechetW => (x + y - 1.0).max(0.0),
            ParametricCopula::Efgm { theta } => x * y + theta * x * y * (1.0 - x) * (1.0 - y),
            ParametricCopula::Gaussian { rho } => {
                if *rho >= 1.0 - RHO_EDGE {
                    x.min(y)
                } else if *rho <= -1.0 + RHO_EDGE {
                    (x + y - 1.0).max(0.0)
                } else if x == 0.0 || y == 0.0 {
                    0.0
                } else if x == 1.0 {
                    y
                } else if y == 1.0 {
                    x
                } else {
                    normal::bvn_cdf(normal::quantile(x), normal::quantile(y), *rho)
                }
            }
            ParametricCopula::ShuffleOfMin(sigma) => {
                let m = sigma.len() as f64;
                let w = 1.0 / m;
                sigma
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| {
                        let reach = (x - i as f64 / m).min(y - (s - 1) as f64 / m);
                        reach.clamp(0.0, w)
                    })
                    .sum()
            }
        }
    }

    /// Checkerboard grid at resolution `n`: cell masses are rectangle
    /// probabilities of the copula.
    pub fn materialize(&self, n: usize) -> Result<CopulaGrid> {
        if n < 2 {
            return Err(CopulaError::ParamOutOfRange(format!(
                "resolution n = {n} must be at least 2"
            )));
        }
        let label = self.to_string();
        let diag = |pos: &dyn Fn(usize) -> usize| {
            let mut mass = vec![0.0; n * n];
            for i in 0..n {
                mass[i * n + pos(i)] = 1.0 / n as f64;
            }
            mass
        };
        let mass = match self {
            ParametricCopula::Independence => vec![1.0 / (n * n) as f64; n * n],
            ParametricCopula::FrechetM => diag(&|i| i),
            ParametricCopula::FrechetW => diag(&|i| n - 1 - i),
            ParametricCopula::Gaussian { rho } if *rho == 0.0 => {
                vec![1.0 / (n * n) as f64; n * n]
            }
            ParametricCopula::Gaussian { rho } if rho.abs() >= 1.0 - RHO_EDGE => {
                if *rho > 0.0 {
                    diag(&|i| i)
                } else {
                    diag(&|i| n - 1 - i)
                }
            }
            ParametricCopula::ShuffleOfMin(sigma) => {
                let m = sigma.len();
                if !n.is_multiple_of(m) {
                    return Err(CopulaError::ResolutionMismatch { left: n, right: m });
                }
                let s = n / m;
                diag(&|i| (sigma[i / s] - 1) * s + i % s)
            }
            _ => {
                let m = n + 1;
                let mut verts = vec![0.0; m * m];
                for k in 0..=n {
                    for l in 0..=n {
                        verts[k * m + l] = self.cdf(k as f64 / n as f64, l as f64 / n as f64);
                    }
                }
                return Ok(CopulaGrid::from_vertex_values(n, &verts, label));
            }
        };
        Ok(CopulaGrid::from_flat(n, mass, label))
    }
}

/// Shuffle on `m^2` stripes that transposes the `m x m` index block:
/// `sigma(a*m + b + 1) = b*m + a + 1`.
pub fn transpose_shuffle(m: usize) -> Result<ParametricCopula> {
    if m < 2 {
        return Err(CopulaError::ParamOutOfRange(format!(
            "transpose shuffle needs m >= 2, got {m}"
        )));
    }
    let mut sigma = vec![0; m * m];
    for a in 0..m {
        for b in 0..m {
            sigma[a * m + b] = b * m + a + 1;
        }
    }
    Ok(ParametricCopula::ShuffleOfMin(sigma))
}

/// Quantile of the EFGM conditional law `x -> d/dt C(x, t)` at level `w`.
///
/// Written as `2w / ((1+a) + sqrt((1+a)^2 - 4aw))` with `a = theta (1 - 2t)`,
/// which has no cancellation and no singularity at `t = 1/2`.
pub fn efgm_conditional_quantile(theta: f64, t: f64, w: f64) -> f64 {
    let a = theta * (1.0 - 2.0 * t);
    let b = 1.0 + a;
    2.0 * w / (b + (b * b - 4.0 * a * w).max(0.0).sqrt())
}

/// `int_0^1 F_t^{-1}(v) dt` for the EFGM conditional quantiles. A copula would
/// need this to equal `v`.
pub fn efgm_inverse_first_integral(theta: f64, v: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(CopulaError::ParamOutOfRange(format!(
            "efgm theta = {theta} must lie in [-1, 1]"
        )));
    }
    if !(v > 0.0 && v < 1.0) {
        return Err(CopulaError::Domain(format!("v = {v} must lie in (0, 1)")));
    }
    let f = |t: f64| efgm_conditional_quantile(theta, t, v);
    Ok(adaptive_simpson(&f, 0.0, 1.0, 1e-10))
}

impl fmt::Display for ParametricCopula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParametricCopula::Gaussian { rho } => write!(f, "gaussian:{rho}"),
            ParametricCopula::Efgm { theta } => write!(f, "efgm:{theta}"),
            ParametricCopula::FrechetM => f.write_str("m"),
            ParametricCopula::FrechetW => f.write_str("w"),
            ParametricCopula::Independence => f.write_str("pi"),
            ParametricCopula::ShuffleOfMin(sigma) => {
                let parts: Vec<String> = sigma.iter().map(|s| s.to_string()).collect();
                write!(f, "shuffle:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for ParametricCopula {
    type Err = CopulaError;

    /// `gaussian:<rho>`, `efgm:<theta>`, `m`, `w`, `pi`,
    /// `shuffle:<permutation>`, `tshuffle:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim().to_ascii_lowercase(), Some(a.trim())),
            None => (s.to_ascii_lowercase(), None),
        };
        let number = |what: &str| -> Result<f64> {
            let a =
                arg.ok_or_else(|| CopulaError::Parse(format!("{head} needs a {what} value")))?;
            a.parse::<f64>()
                .map_err(|_| CopulaError::Parse(format!("invalid {what} value '{a}'")))
        };
        match (head.as_str(), arg) {
            ("m", None) => Ok(ParametricCopula::FrechetM),
            ("w", None) => Ok(ParametricCopula::FrechetW),
            ("pi", None) => Ok(ParametricCopula::Independence),
            ("gaussian", _) => ParametricCopula::gaussian(number("rho")?),
            ("efgm", _) => ParametricCopula::efgm(number("theta")?),
            ("shuffle", Some(a)) => {
                let sigma = a
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<usize>()
                            .map_err(|_| CopulaError::Parse(format!("invalid shuffle entry '{p}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                ParametricCopula::shuffle(sigma)
            }
            ("tshuffle", Some(a)) => {
                let m = a
                    .parse::<usize>()
                    .map_err(|_| CopulaError::Parse(format!("invalid tshuffle size '{a}'")))?;
                transpose_shuffle(m)
            }
            _ => Err(CopulaError::Parse(format!("unknown copula family '{s}'"))),
        }
    }
}
