//! Reference computations that avoid the library's code paths.

#![allow(dead_code)]

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_2;

/// Two-sided Student-t tail probability by quadrature.
///
/// Substituting `t = tan(theta)` maps the unnormalized t density onto
/// `[0, pi/2)` as `cos^(df-1) * (cos^2 + sin^2/df)^(-(df+1)/2)`, which is
/// bounded for `df >= 1`. The tail mass over the total mass needs no gamma
/// functions.
pub fn t_two_sided_quadrature(t: f64, df: f64) -> f64 {
    let g = |theta: f64| {
        let (s, c) = theta.sin_cos();
        if c <= 0.0 {
            return if df == 1.0 { 1.0 } else { 0.0 };
        }
        ((df - 1.0) * c.ln() - 0.5 * (df + 1.0) * (c * c + s * s / df).ln()).exp()
    };
    let start = t.abs().atan();
    let tail = integrate(&g, start, FRAC_PI_2);
    let total = integrate(&g, 0.0, FRAC_PI_2);
    tail / total
}

/// Composite adaptive Simpson over 256 initial panels.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const PANELS: usize = 256;
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == PANELS { b } else { lo + h };
            let mid = 0.5 * (lo + hi);
            let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            simpson(f, lo, hi, flo, fmid, fhi, whole, 1e-15, 30)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// BH by scanning every k: `k*` is the largest k with at least k p-values
/// at or below `k q / N`; the rejected rows are those at or below the
/// `k*` threshold.
pub fn bh_brute_force(p: &[f64], q: f64) -> HashSet<usize> {
    let n = p.len();
    let threshold = |k: usize| k as f64 * q / n as f64;
    let k_star = (1..=n)
        .filter(|&k| p.iter().filter(|&&v| v <= threshold(k)).count() >= k)
        .max()
        .unwrap_or(0);
    if k_star == 0 {
        return HashSet::new();
    }
    (0..n).filter(|&i| p[i] <= threshold(k_star)).collect()
}

pub fn direct_union(lists: &[Vec<usize>]) -> usize {
    lists.iter().flatten().collect::<HashSet<_>>().len()
}

/// False-discovery proportion by direct counting, 0 for an empty list.
pub fn direct_afdr(list: &HashSet<usize>, truth: &HashSet<usize>) -> f64 {
    if list.is_empty() {
        0.0
    } else {
        list.difference(truth).count() as f64 / list.len() as f64
    }
}
