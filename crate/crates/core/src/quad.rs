//! Shared quadrature utilities: composite and adaptive Simpson rules for
//! complex integrands, a cumulative Simpson pass, and an oscillatory
//! segment summer with tail averaging.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Composite Simpson on a uniform grid; `n` panels (even), `n + 1` nodes.
pub fn simpson<F>(f: F, a: f64, b: f64, n: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let n = if n % 2 == 0 { n.max(2) } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + j as f64 * h);
    }
    acc * (h / 3.0)
}

fn simpson_step(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_rec<F>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: usize,
) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_step(a, m, fa, flm, fm);
    let right = simpson_step(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() < 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson with absolute tolerance `tol`.
pub fn adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson_step(a, b, fa, fm, fb);
    adaptive_rec(&f, a, m, b, fa, fm, fb, whole, tol, 28)
}

/// Cumulative integral I[j] = int_0^{q_j} y dq on a uniform grid, by
/// three-point Newton-Cotes half steps. O(h^4) local accuracy.
pub fn cumulative(y: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = y.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (y[0] + y[1]);
        return out;
    }
    for j in 1..n {
        let step = if j + 1 < n {
            h / 12.0 * (5.0 * y[j - 1] + 8.0 * y[j] - y[j + 1])
        } else {
            h / 12.0 * (-y[j - 2] + 8.0 * y[j - 1] + 5.0 * y[j])
        };
        out[j] = out[j - 1] + step;
    }
    out
}

/// Iterated-mean limit of the partial sums of an alternating tail.
pub fn euler_limit(terms: &[Complex64]) -> Complex64 {
    let mut row: Vec<Complex64> = Vec::with_capacity(terms.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for t in terms {
        acc += t;
        row.push(acc);
    }
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
    }
    row.first().copied().unwrap_or_else(|| Complex64::new(0.0, 0.0))
}

/// Integrate an oscillatory integrand over [start, inf) by splitting at the
/// sign-change points `node(k)` (strictly increasing, unbounded), summing
/// the first `k_direct` segments directly and averaging the alternating
/// tail of the next `k_tail` segments.
pub fn oscillatory_tail<F, N>(
    f: F,
    node: N,
    start: f64,
    k_first: usize,
    k_direct: usize,
    k_tail: usize,
    seg_tol: f64,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
    N: Fn(usize) -> f64,
{
    let mut a = start;
    let mut total = Complex64::new(0.0, 0.0);
    let mut k = k_first;
    while node(k) <= start {
        k += 1;
    }
    for _ in 0..k_direct {
        let b = node(k);
        total += adaptive(&f, a, b, seg_tol);
        a = b;
        k += 1;
    }
    let mut tail_terms = Vec::with_capacity(k_tail);
    for _ in 0..k_tail {
        let b = node(k);
        tail_terms.push(adaptive(&f, a, b, seg_tol));
        a = b;
        k += 1;
    }
    // convergence check: the averaged head must be stable against dropping
    // the last few tail segments
    let full = euler_limit(&tail_terms);
    let short = euler_limit(&tail_terms[..tail_terms.len().saturating_sub(4)]);
    if (full - short).norm() > 1e4 * seg_tol.max(1e-14) {
        return Err(Error::Quadrature(format!(
            "oscillatory tail not settled: head moved by {:.3e}",
            (full - short).norm()
        )));
    }
    Ok(total + full)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_matches_polynomial() {
        let v = simpson(|x| Complex64::new(x * x * x, x), 0.0, 2.0, 64);
        assert!((v.re - 4.0).abs() < 1e-12);
        assert!((v.im - 2.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let v = adaptive(|x| Complex64::new((20.0 * x).sin(), 0.0), 0.0, 1.0, 1e-12);
        let exact = (1.0 - (20.0f64).cos()) / 20.0;
        assert!((v.re - exact).abs() < 1e-10);
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let n = 401;
        let h = 2.0 / (n - 1) as f64;
        let y: Vec<Complex64> = (0..n)
            .map(|j| {
                let q = j as f64 * h;
                Complex64::new((3.0 * q).cos(), q)
            })
            .collect();
        let cum = cumulative(&y, h);
        for j in [100, 250, 400] {
            let q = j as f64 * h;
            let exact = Complex64::new((3.0 * q).sin() / 3.0, 0.5 * q * q);
            assert!((cum[j] - exact).norm() < 1e-9, "at q = {q}");
        }
    }

    #[test]
    fn euler_limit_sums_alternating_series() {
        // sum (-1)^k / sqrt(k+1) = eta(1/2)
        let terms: Vec<Complex64> = (0..60)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign / ((k + 1) as f64).sqrt(), 0.0)
            })
            .collect();
        let eta_half = 0.6048986434216303;
        assert!((euler_limit(&terms).re - eta_half).abs() < 1e-12);
    }
}
