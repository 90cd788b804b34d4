//! Quadrature rules used across the crate.

/// Weights `w_0..=w_n` for integrating a function of `v` on `[0, 1]` from its
/// values at the vertices `v = k/n`.
///
/// The rule is exact for polynomials of degree at most two for every `n >= 2`
/// (composite Simpson, closed with a Simpson 3/8 panel when `n` is odd), so the
/// independence and comonotone profiles integrate without discretization error.
/// `n = 1` falls back to the trapezoid rule.
pub fn vertex_weights(n: usize) -> Vec<f64> {
    assert!(n >= 1, "vertex_weights needs n >= 1");
    let step = 1.0 / n as f64;
    let mut w = vec![0.0; n + 1];
    if n == 1 {
        w[0] = 0.5;
        w[1] = 0.5;
        return w;
    }
    let simpson_panels = if n.is_multiple_of(2) { n } else { n - 3 };
    let mut i = 0;
    while i < simpson_panels {
        w[i] += step / 3.0;
        w[i + 1] += 4.0 * step / 3.0;
        w[i + 2] += step / 3.0;
        i += 2;
    }
    if n % 2 == 1 {
        let s = simpson_panels;
        let c = 3.0 * step / 8.0;
        w[s] += c;
        w[s + 1] += 3.0 * c;
        w[s + 2] += 3.0 * c;
        w[s + 3] += c;
    }
    w
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, 8 points.
#[allow(clippy::excessive_precision)]
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// 8-point Gauss-Legendre integral of `f` over `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL8.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Nodes and weights of the 8-point rule on `[a, b]`.
pub fn gauss_legendre_nodes(a: f64, b: f64) -> [(f64, f64); 8] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL8.map(|(x, w)| (mid + half * x, w * half))
}

/// Adaptive Simpson integration with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Compensated (Neumaier) sum.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
