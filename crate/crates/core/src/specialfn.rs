//! Self-contained special functions: complex log-gamma, the Riemann-Siegel
//! theta and Z functions, zeta on the critical line, Dirichlet L-functions
//! for the real characters mod 3 and 4, and smooth zero-counting helpers.
//!
//! Everything here is pure and reentrant; callers may evaluate over grids
//! in parallel.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const LN_PI: f64 = 1.1447298858494001741434273513530587116472948129153;
const LN_2: f64 = std::f64::consts::LN_2;
const HALF_LN_2PI: f64 = 0.91893853320467274178032973640561763986139747363778;

/// Stirling coefficients B_{2k} / ((2k)(2k-1)), k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    7.0 / 1092.0,
    -3617.0 / 122_400.0,
];

/// Principal-branch log Gamma for Re z > 0.
///
/// Shifts the argument by recurrence until Re z >= 15, then applies the
/// Stirling series. Absolute error is below 1e-12 for |z| <= 200.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("log_gamma requires Re z > 0, got {z}")));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling_log_gamma(w) - shift)
}

fn stirling_log_gamma(w: Complex64) -> Complex64 {
    let mut series = Complex64::new(0.0, 0.0);
    let w2 = w * w;
    let mut p = w;
    for c in STIRLING {
        series += c / p;
        p *= w2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series
}

/// Riemann-Siegel theta: Im log Gamma(1/4 + it/2) - (t/2) ln pi.
///
/// Continuous and odd in t. The gamma argument stays in the right half
/// plane, so the principal branch already gives the continuous angle.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    let lg = log_gamma(Complex64::new(0.25, 0.5 * t)).expect("Re = 1/4 > 0");
    lg.im - 0.5 * t * LN_PI
}

/// Configuration for the alternating-series engine.
#[derive(Debug, Clone, Copy)]
pub struct SeriesBudget {
    pub terms: usize,
    pub tol: f64,
}

impl Default for SeriesBudget {
    fn default() -> Self {
        SeriesBudget { terms: 2000, tol: 1e-13 }
    }
}

/// Sum an alternating-ish complex series by direct summation of the first
/// `n_direct` terms followed by iterated averaging of the tail partial sums.
///
/// `term(k)` must include the sign. Fails if the averaging table does not
/// stabilise below `tol` within the term budget.
pub(crate) fn accelerated_sum<F>(mut term: F, n_direct: usize, budget: SeriesBudget) -> Result<Complex64>
where
    F: FnMut(usize) -> Complex64,
{
    let window = 192usize;
    if n_direct + 16 > budget.terms {
        return Err(Error::Accuracy(format!(
            "series needs {} direct terms, budget is {}",
            n_direct, budget.terms
        )));
    }
    let mut direct = Complex64::new(0.0, 0.0);
    for k in 0..n_direct {
        direct += term(k);
    }
    let window = window.min(budget.terms - n_direct);
    let mut row: Vec<Complex64> = Vec::with_capacity(window);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..window {
        acc += term(n_direct + k);
        row.push(acc);
    }
    // iterated means; the head stabilises geometrically for alternating tails
    let mut prev = row[0];
    let mut stable = 0usize;
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
        let head = row[0];
        if (head - prev).norm() < budget.tol {
            stable += 1;
            if stable >= 2 {
                return Ok(direct + head);
            }
        } else {
            stable = 0;
        }
        prev = head;
    }
    if row.len() == 1 && (row[0] - prev).norm() < 1e-10 {
        return Ok(direct + row[0]);
    }
    Err(Error::Accuracy("alternating-series averaging did not stabilise".into()))
}

/// Run `f` with the default budget, doubling the term budget on failure.
fn with_doubling<F>(mut f: F) -> Result<Complex64>
where
    F: FnMut(SeriesBudget) -> Result<Complex64>,
{
    let mut budget = SeriesBudget::default();
    for _ in 0..3 {
        match f(budget) {
            Ok(v) => return Ok(v),
            Err(Error::Accuracy(_)) => budget.terms *= 2,
            Err(e) => return Err(e),
        }
    }
    f(budget)
}

/// zeta(s) for Re s > 0 via the alternating series
/// zeta(s) = (2^{1-s} - 1)^{-1} sum (-1)^n n^{-s} with averaging acceleration.
pub fn zeta_s(s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("zeta_s requires Re s > 0, got {s}")));
    }
    let eta = with_doubling(|budget| {
        let n_direct = (1.3 * s.im.abs()).ceil() as usize + 24;
        accelerated_sum(
            |k| {
                let n = (k + 1) as f64;
                let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
                sign * (-s * n.ln()).exp()
            },
            n_direct,
            budget,
        )
    })?;
    let denom = ((1.0 - s) * LN_2).exp() - 1.0;
    Ok(eta / denom)
}

/// zeta(1/2 + it).
pub fn zeta_critical(t: f64) -> Result<Complex64> {
    zeta_s(Complex64::new(0.5, t))
}

/// Riemann-Siegel Z: the real rotation of zeta on the critical line,
/// Z(t) = e^{i theta(t)} zeta(1/2 + it). Even in t.
pub fn riemann_siegel_z(t: f64) -> Result<f64> {
    let w = Complex64::from_polar(1.0, riemann_siegel_theta(t)) * zeta_critical(t)?;
    if w.im.abs() > 1e-6 {
        return Err(Error::Accuracy(format!(
            "Im of e^(i theta) zeta = {} exceeds consistency tolerance",
            w.im
        )));
    }
    Ok(w.re)
}

/// Real non-principal character value chi(n) for modulus 3 or 4.
pub fn real_character(n: u64, modulus: u8) -> Result<i8> {
    match modulus {
        3 => Ok(match n % 3 {
            1 => 1,
            2 => -1,
            _ => 0,
        }),
        4 => Ok(match n % 4 {
            1 => 1,
            3 => -1,
            _ => 0,
        }),
        m => Err(Error::Domain(format!("unsupported modulus {m}; use 3 or 4"))),
    }
}

/// Dirichlet L(1/2 + it, chi) for the real non-principal character of
/// modulus 3 or 4, via accelerated alternating series.
///
/// Modulus 4 is directly alternating over odd n. Modulus 3 is summed as
/// L(s) = [sum_m (-1)^m ((3m+1)^{-s} + (3m+2)^{-s})] / (1 + 2^{1-s}),
/// which restores strict alternation with a smooth group magnitude.
pub fn dirichlet_l_critical(t: f64, modulus: u8) -> Result<Complex64> {
    let s = Complex64::new(0.5, t);
    match modulus {
        4 => with_doubling(|budget| {
            let n_direct = (1.3 * t.abs()).ceil() as usize + 24;
            accelerated_sum(
                |k| {
                    let n = (2 * k + 1) as f64;
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (-s * n.ln()).exp()
                },
                n_direct,
                budget,
            )
        }),
        3 => {
            let sum = with_doubling(|budget| {
                let n_direct = (1.3 * t.abs()).ceil() as usize + 24;
                accelerated_sum(
                    |m| {
                        let n1 = (3 * m + 1) as f64;
                        let n2 = (3 * m + 2) as f64;
                        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                        sign * ((-s * n1.ln()).exp() + (-s * n2.ln()).exp())
                    },
                    n_direct,
                    budget,
                )
            })?;
            let denom = 1.0 + ((1.0 - s) * LN_2).exp();
            Ok(sum / denom)
        }
        m => Err(Error::Domain(format!("unsupported modulus {m}; use 3 or 4"))),
    }
}

/// Smooth zero-counting function
/// <N(E)> = (1/pi) Im log Gamma(1/4 + iE/2) - (E/2pi) ln pi + 1,
/// identically theta(E)/pi + 1.
pub fn smooth_counting(e: f64) -> f64 {
    let lg = log_gamma(Complex64::new(0.25, 0.5 * e)).expect("Re = 1/4 > 0");
    lg.im / std::f64::consts::PI - e / (2.0 * std::f64::consts::PI) * LN_PI + 1.0
}

/// Asymptotic counting form (E/2pi)(log(E/2pi) - 1) + 7/8.
pub fn smooth_counting_asymptotic(e: f64) -> f64 {
    let x = e / (2.0 * std::f64::consts::PI);
    x * (x.ln() - 1.0) + 0.875
}

/// The n-th positive smooth zero: the solution of cos theta(t) = 0 on the
/// increasing branch of theta, i.e. theta(t) = (n - 3/2) pi for t > 2 pi,
/// so that the smooth count at the n-th zero equals n - 1/2.
///
/// Found by bisection to 1e-10.
pub fn smooth_zero(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("smooth_zero index starts at 1".into()));
    }
    let target = (n as f64 - 1.5) * std::f64::consts::PI;
    // theta has its minimum at t = 2 pi and increases beyond it
    let mut lo = 6.29;
    let mut hi = 20.0;
    let mut guard = 0;
    while riemann_siegel_theta(hi) < target {
        hi *= 2.0;
        guard += 1;
        if guard > 16 {
            return Err(Error::Bracket(format!("no bracket for smooth zero {n} below t = {hi}")));
        }
    }
    if riemann_siegel_theta(lo) > target {
        return Err(Error::Bracket(format!("smooth zero {n} lies below the search branch")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if riemann_siegel_theta(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One sample of the zeta-related quantities at ordinate t.
#[derive(Debug, Clone, Copy)]
pub struct CountingPoint {
    pub t: f64,
    pub theta: f64,
    pub z: f64,
    pub zeta: Complex64,
    pub n_smooth: f64,
}

/// Evaluate theta, Z, zeta and the smooth count at t, enforcing the
/// zeta = Z e^{-i theta} consistency.
pub fn counting_point(t: f64) -> Result<CountingPoint> {
    let theta = riemann_siegel_theta(t);
    let zeta = zeta_critical(t)?;
    let w = Complex64::from_polar(1.0, theta) * zeta;
    if w.im.abs() > 1e-6 {
        return Err(Error::Accuracy(format!("Z consistency residual {}", w.im)));
    }
    Ok(CountingPoint {
        t,
        theta,
        z: w.re,
        zeta,
        n_smooth: theta / std::f64::consts::PI + 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT_PI_LN: f64 = 0.57236494292470008707171367567652935582364740645765;

    /// Independent check path: shift by +20 through the recurrence, apply
    /// the Stirling series there, and undo the shift.
    fn log_gamma_oracle(z: Complex64) -> Complex64 {
        let mut shift = Complex64::new(0.0, 0.0);
        let mut w = z;
        for _ in 0..20 {
            shift += w.ln();
            w += 1.0;
        }
        super::stirling_log_gamma(w) - shift
    }

    #[test]
    fn log_gamma_at_one_and_half() {
        assert!(log_gamma(Complex64::new(1.0, 0.0)).unwrap().norm() < 1e-12);
        let lg_half = log_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((lg_half.re - SQRT_PI_LN).abs() < 1e-12);
        assert!(lg_half.im.abs() < 1e-12);
    }

    #[test]
    fn log_gamma_complex_matches_oracle() {
        let z = Complex64::new(0.25, 7.0);
        let got = log_gamma(z).unwrap();
        let want = log_gamma_oracle(z);
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
        // frozen from the oracle
        assert!((got - Complex64::new(-10.562953339040002, 6.230160500529651)).norm() < 1e-9);
    }

    #[test]
    fn log_gamma_rejects_left_half_plane() {
        assert!(log_gamma(Complex64::new(-1.0, 3.0)).is_err());
        assert!(log_gamma(Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn theta_zero_and_oddness() {
        assert_eq!(riemann_siegel_theta(0.0), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t = rng.gen_range(-100.0..100.0);
            let s = riemann_siegel_theta(t) + riemann_siegel_theta(-t);
            assert!(s.abs() < 1e-10, "theta oddness residual {s} at t = {t}");
        }
    }

    #[test]
    fn theta_matches_asymptotic_expansion() {
        // second path: theta ~ (t/2) ln(t/2pi) - t/2 - pi/8 + 1/(48 t)
        let t: f64 = 14.134725;
        let direct = riemann_siegel_theta(t);
        let asym = 0.5 * t * (t / (2.0 * std::f64::consts::PI)).ln() - 0.5 * t
            - std::f64::consts::PI / 8.0
            + 1.0 / (48.0 * t);
        assert!((direct - asym).abs() < 1e-6, "{direct} vs {asym}");
        assert!((direct - (-1.7286703041172765)).abs() < 1e-9);
    }

    #[test]
    fn zeta_half_value() {
        let z = zeta_critical(0.0).unwrap();
        assert!((z.re - (-1.4603545088095868)).abs() < 1e-10);
        assert!(z.im.abs() < 1e-12);
        // ten-fold budget oracle agrees
        let big = with_doubling(|_| {
            accelerated_sum(
                |k| {
                    let n = (k + 1) as f64;
                    let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (-Complex64::new(0.5, 0.0) * n.ln()).exp()
                },
                24,
                SeriesBudget { terms: 20_000, tol: 1e-14 },
            )
        })
        .unwrap()
            / (((1.0 - Complex64::new(0.5, 0.0)) * LN_2).exp() - 1.0);
        assert!((z - big).norm() < 1e-10);
    }

    #[test]
    fn zeta_conjugation_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..25 {
            let t = rng.gen_range(0.0..100.0);
            let a = zeta_critical(t).unwrap();
            let b = zeta_critical(-t).unwrap();
            assert!((a - b.conj()).norm() < 1e-10, "conjugation residual at t = {t}");
        }
    }

    #[test]
    fn zeta_small_at_first_riemann_zero() {
        // the zero is bracketed by a sign change of Z
        let z_lo = riemann_siegel_z(14.0).unwrap();
        let z_hi = riemann_siegel_z(14.2).unwrap();
        assert!(z_lo * z_hi < 0.0, "Z does not change sign on [14.0, 14.2]");
        assert!(zeta_critical(14.134725).unwrap().norm() < 1e-4);
    }

    #[test]
    fn z_at_zero_and_evenness() {
        let z0 = riemann_siegel_z(0.0).unwrap();
        assert!((z0 - (-1.4603545088095868)).abs() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..25 {
            let t = rng.gen_range(0.0..100.0);
            let a = riemann_siegel_z(t).unwrap();
            let b = riemann_siegel_z(-t).unwrap();
            assert!((a - b).abs() < 1e-10, "Z evenness residual at t = {t}");
        }
    }

    #[test]
    fn z_times_phase_reproduces_zeta() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let t = rng.gen_range(-100.0..100.0);
            let p = counting_point(t).unwrap();
            let back = p.z * Complex64::from_polar(1.0, -p.theta);
            assert!((back - p.zeta).norm() < 1e-8);
        }
    }

    #[test]
    fn dirichlet_beta_half() {
        let v = dirichlet_l_critical(0.0, 4).unwrap();
        assert!((v.re - 0.6676914571896092).abs() < 1e-9, "{v}");
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn dirichlet_mod3_budgets_agree() {
        let v = dirichlet_l_critical(0.0, 3).unwrap();
        let s = Complex64::new(0.5, 0.0);
        let big = accelerated_sum(
            |m| {
                let n1 = (3 * m + 1) as f64;
                let n2 = (3 * m + 2) as f64;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * ((-s * n1.ln()).exp() + (-s * n2.ln()).exp())
            },
            24,
            SeriesBudget { terms: 20_000, tol: 1e-14 },
        )
        .unwrap()
            / (1.0 + ((1.0 - s) * LN_2).exp());
        assert!((v - big).norm() < 1e-8);
        assert!((v.re - 0.4808675576968286).abs() < 1e-8);
    }

    #[test]
    fn dirichlet_conjugation() {
        for modulus in [3u8, 4u8] {
            let mut rng = ChaCha8Rng::seed_from_u64(15 + modulus as u64);
            for _ in 0..10 {
                let t = rng.gen_range(0.0..60.0);
                let a = dirichlet_l_critical(t, modulus).unwrap();
                let b = dirichlet_l_critical(-t, modulus).unwrap();
                assert!((a - b.conj()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn dirichlet_rejects_other_moduli() {
        assert!(dirichlet_l_critical(1.0, 5).is_err());
    }

    #[test]
    fn smooth_counting_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let e = rng.gen_range(-200.0..200.0);
            let diff = smooth_counting(e) - (riemann_siegel_theta(e) / std::f64::consts::PI + 1.0);
            assert!(diff.abs() < 1e-10);
        }
        assert!(smooth_counting(0.0).is_finite());
        let e = 100.0;
        assert!((smooth_counting(e) - smooth_counting_asymptotic(e)).abs() < 0.01);
    }

    #[test]
    fn smooth_counting_monotone_above_ten() {
        let mut prev = smooth_counting(10.0);
        let mut e = 10.5;
        while e < 300.0 {
            let v = smooth_counting(e);
            assert!(v > prev);
            prev = v;
            e += 0.5;
        }
    }

    #[test]
    fn smooth_zero_first_and_monotone() {
        let t1 = smooth_zero(1).unwrap();
        assert!((t1 - 14.134725).abs() / 14.134725 < 0.03, "t1 = {t1}");
        assert!((t1 - 14.517919628262).abs() < 1e-8);
        let mut prev = 0.0;
        for n in 1..=20 {
            let t = smooth_zero(n).unwrap();
            assert!(t > prev);
            assert!(riemann_siegel_theta(t).cos().abs() < 1e-9);
            prev = t;
        }
    }

    #[test]
    fn zeta_rejects_left_half() {
        assert!(zeta_s(Complex64::new(-0.5, 3.0)).is_err());
    }
}
