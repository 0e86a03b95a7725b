//! The analytic core: the R and S integral transforms, the Jost functions
//! of the one- and two-potential models, amplitude vectors, wavefunction
//! reconstruction, and localized-state norms.
//!
//! Closed forms are dispatched for step and exponential families (and for
//! a constant second potential at finite cutoff); everything else falls
//! back to quadrature with a cumulative inner pass.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{phi1, phi2, ExpTerm, Length, ModelConfig, Potential};
use crate::quad;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    M1,
    M2,
}

/// An interacting model: potentials a, b and the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub a: Potential,
    pub b: Potential,
    pub l: Length,
}

impl ModelSpec {
    /// One-potential model; b is forced to the constant 1.
    pub fn m1(a: Potential, l: Length) -> Result<Self> {
        let m = ModelSpec { kind: ModelKind::M1, a, b: Potential::ConstantOne, l };
        m.validate()?;
        Ok(m)
    }

    pub fn m2(a: Potential, b: Potential, l: Length) -> Result<Self> {
        let m = ModelSpec { kind: ModelKind::M2, a, b, l };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.a.validate()?;
        self.b.validate()?;
        if let Length::Finite(l) = self.l {
            if !(l > 0.0) {
                return Err(Error::Config(format!("cutoff must be positive, got {l}")));
            }
        }
        if self.kind == ModelKind::M1 && self.b != Potential::ConstantOne {
            return Err(Error::Config("the one-potential model fixes b = 1".into()));
        }
        if self.l == Length::Infinite {
            if !self.a.is_decaying() {
                return Err(Error::Config("potential a must decay for an infinite cutoff".into()));
            }
            if self.kind == ModelKind::M2 && !self.b.is_decaying() {
                return Err(Error::Config("potential b must decay for an infinite cutoff".into()));
            }
        }
        Ok(())
    }

    pub fn from_config(cfg: &ModelConfig) -> Result<Self> {
        match cfg.model.as_str() {
            "M1" => {
                match &cfg.b {
                    None | Some(Potential::ConstantOne) => {}
                    Some(other) => {
                        return Err(Error::Config(format!(
                            "model M1 fixes b = constant_one, got {other:?}"
                        )))
                    }
                }
                ModelSpec::m1(cfg.a.clone(), cfg.l)
            }
            "M2" => {
                let b = cfg
                    .b
                    .clone()
                    .ok_or_else(|| Error::Config("model M2 requires a b potential".into()))?;
                ModelSpec::m2(cfg.a.clone(), b, cfg.l)
            }
            other => Err(Error::Config(format!("unknown model kind {other:?}; use M1 or M2"))),
        }
    }

    /// Smallest decay rate over the model's potentials.
    pub fn min_decay_rate(&self) -> f64 {
        self.a.min_decay_rate().min(match self.kind {
            ModelKind::M1 => f64::INFINITY,
            ModelKind::M2 => self.b.min_decay_rate(),
        })
    }

    /// Known poles of the Jost function in the lower half plane, with
    /// orders: E = -i rate for every exponential rate, order 2 when the
    /// rate appears in both potentials of an M2 model.
    pub fn known_poles(&self) -> Vec<(Complex64, u32)> {
        let rates = |p: &Potential| -> Vec<f64> {
            match p {
                Potential::ExpSum { terms } => {
                    let mut r: Vec<f64> = terms.iter().map(|t| t.rate).collect();
                    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    r.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
                    r
                }
                _ => Vec::new(),
            }
        };
        let ra = rates(&self.a);
        let rb = if self.kind == ModelKind::M2 { rates(&self.b) } else { Vec::new() };
        let mut out: Vec<(Complex64, u32)> = Vec::new();
        for r in &ra {
            let shared = rb.iter().any(|s| (s - r).abs() < 1e-12);
            out.push((Complex64::new(0.0, -r), if shared { 2 } else { 1 }));
        }
        for r in &rb {
            if !ra.iter().any(|s| (s - r).abs() < 1e-12) {
                out.push((Complex64::new(0.0, -r), 1));
            }
        }
        out
    }
}

/// Jost data at one energy.
#[derive(Debug, Clone, Copy)]
pub struct JostValue {
    pub e: Complex64,
    /// F(E) for M2, F1(E) for M1.
    pub f: Complex64,
    /// The same function evaluated directly at -E.
    pub f_neg: Complex64,
    /// f1(E) = 1 + R_a(E), present for M1 only.
    pub f1: Option<Complex64>,
}

/// Solution amplitudes (A, B, C_infinity); for M1 the third component is
/// the plane-wave coefficient of the one-potential model.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeVector {
    pub a: Complex64,
    pub b: Complex64,
    pub c_inf: Complex64,
}

impl AmplitudeVector {
    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c_inf.norm_sqr()).sqrt()
    }

    pub fn scale(&self, k: Complex64) -> AmplitudeVector {
        AmplitudeVector { a: k * self.a, b: k * self.b, c_inf: k * self.c_inf }
    }
}

// ---------------------------------------------------------------------------
// R and S transforms
// ---------------------------------------------------------------------------

/// R_f(E) = (iE/2) int_0^L f(q) e^{iEq} dq.
pub fn transform_r(f: &Potential, e: Complex64, l: Length) -> Result<Complex64> {
    if e.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    match (f, l) {
        (Potential::ConstantOne, Length::Finite(l)) => Ok(0.5 * ((I * e * l).exp() - 1.0)),
        (Potential::ConstantOne, Length::Infinite) => {
            Err(Error::Domain("R of the constant potential needs a finite cutoff".into()))
        }
        (Potential::Step { amplitude, q_edge }, _) => {
            let q1 = l.clip(*q_edge);
            Ok(0.5 * amplitude * ((I * e * q1).exp() - 1.0))
        }
        (Potential::ExpSum { terms }, Length::Infinite) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                let den = e + I * t.rate;
                if den.norm() < 1e-12 * (1.0 + e.norm()) {
                    return Err(Error::Pole(e));
                }
                acc += -0.5 * t.coef * e / den;
            }
            Ok(acc)
        }
        (Potential::ExpSum { terms }, Length::Finite(l)) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                acc += 0.5 * I * e * t.coef * l * phi1((I * e - t.rate) * l);
            }
            Ok(acc)
        }
        (_, Length::Finite(l)) => Ok(0.5 * I * e * f.fourier_hat_truncated(e, l)?),
        (_, Length::Infinite) => Ok(0.5 * I * e * f.fourier_hat(e)?),
    }
}

/// S_{f,g}(E) = (iE/2) int fg - (E^2/2) int f e^{iEq} int_0^q g e^{-iEq'}.
pub fn transform_s(f: &Potential, g: &Potential, e: Complex64, l: Length) -> Result<Complex64> {
    if e.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    use Potential::*;
    match (f, g) {
        (ConstantOne, ConstantOne) => match l {
            Length::Finite(lf) => Ok(0.5 * ((I * e * lf).exp() - 1.0)),
            Length::Infinite => Err(Error::Domain("S_{1,1} needs a finite cutoff".into())),
        },
        // S_{f,1} = R_f at any cutoff
        (_, ConstantOne) => transform_r(f, e, l),
        // S_{1,g} = -e^{iEL} R_g(-E), from the exchange identity
        (ConstantOne, _) => match l {
            Length::Finite(lf) => Ok(-(I * e * lf).exp() * transform_r(g, -e, l)?),
            Length::Infinite => Err(Error::Domain("S_{1,g} needs a finite cutoff".into())),
        },
        (Step { amplitude: a1, q_edge: e1 }, Step { amplitude: a2, q_edge: e2 }) => {
            Ok(s_step_pair(*a1, l.clip(*e1), *a2, l.clip(*e2), e))
        }
        (ExpSum { terms: tf }, ExpSum { terms: tg }) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t1 in tf {
                for t2 in tg {
                    acc += s_exp_pair(t1, t2, e, l)?;
                }
            }
            Ok(acc)
        }
        (Step { amplitude, q_edge }, ExpSum { terms }) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                acc += s_step_exp(*amplitude, l.clip(*q_edge), t, e);
            }
            Ok(acc)
        }
        (ExpSum { terms }, Step { amplitude, q_edge }) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                acc += s_exp_step(t, *amplitude, l.clip(*q_edge), e, l)?;
            }
            Ok(acc)
        }
        _ => s_quad(f, g, e, l, Weight::One, Weight::One),
    }
}

/// Exponential pair: f = c1 e^{-r1 q}, g = c2 e^{-r2 q}.
fn s_exp_pair(t1: &ExpTerm, t2: &ExpTerm, e: Complex64, l: Length) -> Result<Complex64> {
    let (c1, r1) = (t1.coef, t1.rate);
    let (c2, r2) = (t2.coef, t2.rate);
    match l {
        Length::Infinite => {
            let den = e + I * r1;
            if den.norm() < 1e-12 * (1.0 + e.norm()) {
                return Err(Error::Pole(e));
            }
            Ok(-c1 * c2 * r1 / (2.0 * (r1 + r2)) * e / den)
        }
        Length::Finite(l) => {
            let w = I * e - r1;
            let t_prod = 0.5 * I * e * c1 * c2 * l * phi1(-(r1 + r2) * l);
            let z = Complex64::new(r2, 0.0) + I * e;
            let k = if (z * l).norm() < 1e-6 {
                // inner integral ~ q - z q^2 / 2
                l * l * phi2(w * l) - 0.5 * z * l * l * l * phi3(w * l)
            } else {
                (l * phi1(w * l) - l * phi1(-(r1 + r2) * l)) / z
            };
            Ok(t_prod - 0.5 * e * e * c1 * c2 * k)
        }
    }
}

/// int_0^1 u^2 e^{xu} du, stable near x = 0.
fn phi3(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        1.0 / 3.0 + x / 4.0 + x * x / 10.0 + x * x * x / 36.0
    } else {
        ((x * x - 2.0 * x + 2.0) * x.exp() - 2.0) / (x * x * x)
    }
}

/// Step pair with effective edges qf, qg (already clipped to the cutoff).
fn s_step_pair(a1: f64, qf: f64, a2: f64, qg: f64, e: Complex64) -> Complex64 {
    let c = 0.5 * a1 * a2;
    let ef = (I * e * qf).exp();
    let eg = (I * e * qg).exp();
    if qf <= qg {
        c * (ef - 1.0)
    } else {
        c * ((eg - 1.0) + (1.0 - 1.0 / eg) * (ef - eg))
    }
}

/// f = step of height `amp` up to q1, g = exponential term.
fn s_step_exp(amp: f64, q1: f64, t: &ExpTerm, e: Complex64) -> Complex64 {
    let (c, r) = (t.coef, t.rate);
    let t_prod = 0.5 * I * e * amp * c * q1 * phi1(Complex64::new(-r * q1, 0.0));
    let z = Complex64::new(r, 0.0) + I * e;
    let k = if (z * q1).norm() < 1e-6 {
        q1 * q1 * phi2(I * e * q1) - 0.5 * z * q1 * q1 * q1 * phi3(I * e * q1)
    } else {
        (q1 * phi1(I * e * q1) - q1 * phi1(Complex64::new(-r * q1, 0.0))) / z
    };
    t_prod - 0.5 * e * e * amp * c * k
}

/// f = exponential term, g = step of height `amp` up to q1.
fn s_exp_step(t: &ExpTerm, amp: f64, q1: f64, e: Complex64, l: Length) -> Result<Complex64> {
    let (c, r) = (t.coef, t.rate);
    let w = I * e - r;
    let t_prod = 0.5 * I * e * c * amp * q1 * phi1(Complex64::new(-r * q1, 0.0));
    let b = q1 * phi1(Complex64::new(-r * q1, 0.0));
    let (a_full, c_rest) = match l {
        Length::Infinite => {
            if w.re >= -1e-12 * (1.0 + e.norm()) {
                return Err(Error::Pole(e));
            }
            (-1.0 / w, -(w * q1).exp() / w * (-I * e * q1).exp())
        }
        Length::Finite(lf) => {
            let rest = (lf - q1).max(0.0);
            (
                lf * phi1(w * lf),
                (-I * e * q1).exp() * (w * q1).exp() * rest * phi1(w * rest),
            )
        }
    };
    Ok(t_prod + 0.5 * I * e * c * amp * (a_full - b - c_rest))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weight {
    One,
    /// Multiply the potential pointwise by q.
    Q,
}

impl Weight {
    fn apply(&self, q: f64, v: f64) -> f64 {
        match self {
            Weight::One => v,
            Weight::Q => q * v,
        }
    }
}

/// Quadrature fallback: composite Simpson with a cumulative inner pass,
/// refined until two resolutions agree.
pub(crate) fn s_quad(
    f: &Potential,
    g: &Potential,
    e: Complex64,
    l: Length,
    wf: Weight,
    wg: Weight,
) -> Result<Complex64> {
    let l_eff = match l {
        Length::Finite(lf) => lf,
        Length::Infinite => f.q_cutoff()?.max(g.q_cutoff()?),
    };
    let min_rate = f.min_decay_rate().min(g.min_decay_rate());
    if l == Length::Infinite && e.im < -0.5 * min_rate.min(2.0) {
        return Err(Error::Quadrature(format!(
            "truncated transform untrustworthy below Im E = {}, got {e}",
            -0.5 * min_rate.min(2.0)
        )));
    }
    if e.im.abs() * l_eff > 600.0 {
        return Err(Error::Quadrature("e^(iEq) dynamic range too large".into()));
    }

    let eval = |n: usize| -> Complex64 {
        let h = l_eff / n as f64;
        let fs: Vec<f64> = (0..=n).map(|j| wf.apply(j as f64 * h, f.eval_q(j as f64 * h))).collect();
        let gs: Vec<f64> = (0..=n).map(|j| wg.apply(j as f64 * h, g.eval_q(j as f64 * h))).collect();
        let inner: Vec<Complex64> = (0..=n)
            .map(|j| {
                let q = j as f64 * h;
                gs[j] * (-I * e * q).exp()
            })
            .collect();
        let cum = quad::cumulative(&inner, h);
        let mut outer = Complex64::new(0.0, 0.0);
        let mut prod = Complex64::new(0.0, 0.0);
        for j in 0..=n {
            let q = j as f64 * h;
            let w = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            outer += w * fs[j] * (I * e * q).exp() * cum[j];
            prod += w * Complex64::new(fs[j] * gs[j], 0.0);
        }
        outer *= h / 3.0;
        prod *= h / 3.0;
        0.5 * I * e * prod - 0.5 * e * e * outer
    };

    let mut n = (((l_eff * 16.0 * (1.0 + 0.25 * e.re.abs())).ceil() as usize).max(512) + 1) & !1usize;
    let mut prev = eval(n);
    for _ in 0..6 {
        n *= 2;
        if n > (1 << 22) {
            return Err(Error::Quadrature(format!("grid blew past budget at n = {n}")));
        }
        let cur = eval(n);
        let diff = (cur - prev).norm();
        if diff < 1e-9_f64.max(1e-9 * cur.norm()) {
            return Ok(cur + (cur - prev) / 15.0);
        }
        prev = cur;
    }
    Err(Error::Quadrature("inner/outer Simpson refinement did not settle".into()))
}

// ---------------------------------------------------------------------------
// Jost functions
// ---------------------------------------------------------------------------

/// F1(E) = 1 + 2 R_a - S_{a,a} for the one-potential model.
pub fn jost_f1(m: &ModelSpec, e: Complex64) -> Result<JostValue> {
    if m.kind != ModelKind::M1 {
        return Err(Error::Domain("jost_f1 expects an M1 model".into()));
    }
    let r = transform_r(&m.a, e, m.l)?;
    let s = transform_s(&m.a, &m.a, e, m.l)?;
    let rn = transform_r(&m.a, -e, m.l)?;
    let sn = transform_s(&m.a, &m.a, -e, m.l)?;
    Ok(JostValue {
        e,
        f: 1.0 + 2.0 * r - s,
        f_neg: 1.0 + 2.0 * rn - sn,
        f1: Some(1.0 + r),
    })
}

/// F(E) = 1 + S_{a,b} - S_{b,a} + S_{a,a} S_{b,b} - S_{a,b} S_{b,a}.
pub fn jost_f(m: &ModelSpec, e: Complex64) -> Result<JostValue> {
    if m.kind != ModelKind::M2 {
        return Err(Error::Domain("jost_f expects an M2 model".into()));
    }
    let eval = |en: Complex64| -> Result<Complex64> {
        let sab = transform_s(&m.a, &m.b, en, m.l)?;
        let sba = transform_s(&m.b, &m.a, en, m.l)?;
        let saa = transform_s(&m.a, &m.a, en, m.l)?;
        let sbb = transform_s(&m.b, &m.b, en, m.l)?;
        Ok(1.0 + sab - sba + saa * sbb - sab * sba)
    };
    Ok(JostValue { e, f: eval(e)?, f_neg: eval(-e)?, f1: None })
}

/// Dispatch on the model kind; `f` carries F or F1 accordingly.
pub fn jost_value(m: &ModelSpec, e: Complex64) -> Result<JostValue> {
    match m.kind {
        ModelKind::M1 => jost_f1(m, e),
        ModelKind::M2 => jost_f(m, e),
    }
}

/// Just the Jost function value (F or F1) at E.
pub fn jost_fn(m: &ModelSpec, e: Complex64) -> Result<Complex64> {
    match m.kind {
        ModelKind::M1 => {
            let r = transform_r(&m.a, e, m.l)?;
            let s = transform_s(&m.a, &m.a, e, m.l)?;
            Ok(1.0 + 2.0 * r - s)
        }
        ModelKind::M2 => {
            let sab = transform_s(&m.a, &m.b, e, m.l)?;
            let sba = transform_s(&m.b, &m.a, e, m.l)?;
            let saa = transform_s(&m.a, &m.a, e, m.l)?;
            let sbb = transform_s(&m.b, &m.b, e, m.l)?;
            Ok(1.0 + sab - sba + saa * sbb - sab * sba)
        }
    }
}

// ---------------------------------------------------------------------------
// Amplitudes
// ---------------------------------------------------------------------------

type Row = [Complex64; 3];

/// Rows of the homogeneous 3x3 system for (A, B, C_inf) at finite cutoff.
pub fn system_rows(m: &ModelSpec, e: Complex64, l: f64) -> Result<(Row, Row, Row)> {
    let len = Length::Finite(l);
    let el = (I * e * l).exp();
    match m.kind {
        ModelKind::M2 => {
            let sab = transform_s(&m.a, &m.b, e, len)?;
            let sba = transform_s(&m.b, &m.a, e, len)?;
            let saa = transform_s(&m.a, &m.a, e, len)?;
            let sbb = transform_s(&m.b, &m.b, e, len)?;
            let ra = transform_r(&m.a, e, len)?;
            let rb = transform_r(&m.b, e, len)?;
            let rat = transform_r(&m.a, -e, len)?;
            let rbt = transform_r(&m.b, -e, len)?;
            Ok((
                [1.0 + sab, -saa, el * ra],
                [sbb, 1.0 - sba, el * rb],
                [-2.0 * rbt, 2.0 * rat, el + 1.0],
            ))
        }
        ModelKind::M1 => {
            let ra = transform_r(&m.a, e, len)?;
            let saa = transform_s(&m.a, &m.a, e, len)?;
            let rat = transform_r(&m.a, -e, len)?;
            Ok((
                [1.0 + 2.0 * ra, -saa, el * ra],
                [-Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), -el],
                [Complex64::new(2.0, 0.0), 2.0 * rat, el + 1.0],
            ))
        }
    }
}

fn cross(u: &Row, v: &Row) -> Row {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn row_norm(r: &Row) -> f64 {
    (r[0].norm_sqr() + r[1].norm_sqr() + r[2].norm_sqr()).sqrt()
}

/// Amplitude vector w = v1 x v2 of the finite-cutoff system. Its third
/// component equals the Jost function. Fails when the rows are collinear
/// (the exceptional case, e.g. exactly at a localized level).
pub fn amplitudes(m: &ModelSpec, e: f64, l: f64) -> Result<AmplitudeVector> {
    let (v1, v2, _) = system_rows(m, Complex64::new(e, 0.0), l)?;
    let w = cross(&v1, &v2);
    let wn = row_norm(&w);
    let scale = row_norm(&v1) * row_norm(&v2);
    if wn < 1e-12 * scale {
        return Err(Error::Collinear { ratio: wn / scale });
    }
    Ok(AmplitudeVector { a: w[0], b: w[1], c_inf: w[2] })
}

/// Residual max_i |v_i . w| / |w| of the full system; vanishes at
/// eigen-energies of the finite model.
pub fn system_residual(m: &ModelSpec, e: f64, l: f64, w: &AmplitudeVector) -> Result<f64> {
    let (v1, v2, v3) = system_rows(m, Complex64::new(e, 0.0), l)?;
    let wv = [w.a, w.b, w.c_inf];
    let dot = |r: &Row| (r[0] * wv[0] + r[1] * wv[1] + r[2] * wv[2]).norm();
    Ok(dot(&v1).max(dot(&v2)).max(dot(&v3)) / w.norm())
}

/// Amplitudes of a localized state (a zero of the Jost function): the
/// cross-product rows degenerate there, so the vector is taken from the
/// amplitude rows directly with C_inf = 0.
pub fn localized_amplitudes(m: &ModelSpec, e: f64) -> Result<AmplitudeVector> {
    let ec = Complex64::new(e, 0.0);
    match m.kind {
        ModelKind::M1 => Ok(AmplitudeVector {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(1.0, 0.0),
            c_inf: Complex64::new(0.0, 0.0),
        }),
        ModelKind::M2 => {
            let saa = transform_s(&m.a, &m.a, ec, m.l)?;
            let sab = transform_s(&m.a, &m.b, ec, m.l)?;
            let sba = transform_s(&m.b, &m.a, ec, m.l)?;
            let sbb = transform_s(&m.b, &m.b, ec, m.l)?;
            // rows (1 + S_ab) A - S_aa B = 0 and S_bb A + (1 - S_ba) B = 0
            // agree when F = 0; pick the better-conditioned one
            let w1 = (saa, 1.0 + sab);
            let w2 = (1.0 - sba, -sbb);
            let n1 = w1.0.norm_sqr() + w1.1.norm_sqr();
            let n2 = w2.0.norm_sqr() + w2.1.norm_sqr();
            let (a, b) = if n1 >= n2 { w1 } else { (w2.0, w2.1) };
            if (a.norm_sqr() + b.norm_sqr()).sqrt() < 1e-14 {
                return Err(Error::Collinear { ratio: 0.0 });
            }
            Ok(AmplitudeVector { a, b, c_inf: Complex64::new(0.0, 0.0) })
        }
    }
}

// ---------------------------------------------------------------------------
// Wavefunction reconstruction
// ---------------------------------------------------------------------------

/// int_0^q e^{-iEq'} df/dq' dq' for the causal potential derivative.
fn causal_deriv_integral(p: &Potential, e: Complex64, q: f64) -> Result<Complex64> {
    match p {
        Potential::ConstantOne => Ok(Complex64::new(0.0, 0.0)),
        Potential::Step { amplitude, q_edge } => {
            if q >= *q_edge {
                Ok(-amplitude * (-I * e * q_edge).exp())
            } else {
                Ok(Complex64::new(0.0, 0.0))
            }
        }
        Potential::ExpSum { terms } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                let z = Complex64::new(t.rate, 0.0) + I * e;
                acc += -t.coef * t.rate * q * phi1(-z * q);
            }
            Ok(acc)
        }
        Potential::Sampled(g) => {
            // piecewise-constant slopes integrate exactly
            let h = g.h();
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..g.values.len() - 1 {
                let q0 = j as f64 * h;
                if q0 >= q {
                    break;
                }
                let q1 = ((j + 1) as f64 * h).min(q);
                let slope = (g.values[j + 1] - g.values[j]) / h;
                acc += slope * (-I * e * q0).exp() * (q1 - q0) * phi1(-I * e * (q1 - q0));
            }
            Ok(acc)
        }
        _ => {
            // derivative by central differences under adaptive quadrature
            let fd = |x: f64| {
                let h = 1e-6 * (1.0 + x.abs());
                (p.eval_q(x + h) - p.eval_q((x - h).max(0.0))) / (x + h - (x - h).max(0.0))
            };
            Ok(quad::adaptive(
                |x| Complex64::new(fd(x), 0.0) * (-I * e * x).exp(),
                0.0,
                q,
                1e-10,
            ))
        }
    }
}

/// Reconstruct psi(x) = x^{-1/2} e^{iEq} [C + int_0^q e^{-iEq'}(a' B - b' A)]
/// at x in [1, e^L], with C recovered from the boundary relation.
pub fn wavefunction(m: &ModelSpec, e: f64, w: &AmplitudeVector, x: f64) -> Result<Complex64> {
    if x < 1.0 {
        return Err(Error::Domain(format!("wavefunction domain starts at x = 1, got {x}")));
    }
    let q = x.ln();
    if let Length::Finite(l) = m.l {
        if q > l + 1e-12 {
            return Err(Error::Domain(format!("x = {x} lies beyond the cutoff")));
        }
    }
    let ec = Complex64::new(e, 0.0);
    let a1 = m.a.at_origin();
    let b1 = m.b.at_origin();
    let c = match m.l {
        Length::Finite(l) => {
            let el = (I * ec * l).exp();
            let c_inf = match m.kind {
                ModelKind::M2 => w.c_inf,
                ModelKind::M1 => w.c_inf + (-I * ec * l).exp() * w.a,
            };
            -el * c_inf - b1 * w.a + a1 * w.b
        }
        Length::Infinite => {
            if w.c_inf.norm() > 1e-6 * w.norm() {
                return Err(Error::Domain(
                    "wavefunction on the half line needs a localized amplitude vector".into(),
                ));
            }
            match m.kind {
                ModelKind::M2 => a1 * w.b - b1 * w.a,
                ModelKind::M1 => a1 * w.b - 2.0 * w.a,
            }
        }
    };
    let j = causal_deriv_integral(&m.a, ec, q)? * w.b - causal_deriv_integral(&m.b, ec, q)? * w.a;
    let phit = (I * ec * q).exp() * (c + j);
    Ok(phit / x.sqrt())
}

// ---------------------------------------------------------------------------
// Localized-state norm
// ---------------------------------------------------------------------------

fn int_fg(f: &Potential, g: &Potential) -> Result<f64> {
    if let (Potential::ExpSum { terms: tf }, Potential::ExpSum { terms: tg }) = (f, g) {
        let mut acc = 0.0;
        for t1 in tf {
            for t2 in tg {
                acc += t1.coef * t2.coef / (t1.rate + t2.rate);
            }
        }
        return Ok(acc);
    }
    let cutoff = f.q_cutoff()?.max(g.q_cutoff()?);
    Ok(quad::adaptive(|q| Complex64::new(f.eval_q(q) * g.eval_q(q), 0.0), 0.0, cutoff, 1e-11).re)
}

/// S_{f, q g}(E) with the second argument multiplied pointwise by q.
fn s_with_q_second(f: &Potential, g: &Potential, e: Complex64, l: Length) -> Result<Complex64> {
    if let (Potential::ExpSum { terms: tf }, Potential::ExpSum { terms: tg }) = (f, g) {
        if l == Length::Infinite {
            let mut acc = Complex64::new(0.0, 0.0);
            for t1 in tf {
                for t2 in tg {
                    let den = e + I * t1.rate;
                    if den.norm() < 1e-12 * (1.0 + e.norm()) {
                        return Err(Error::Pole(e));
                    }
                    // -d/dr2 of the plain exponential pair
                    acc += -t1.coef * t2.coef * t1.rate * e
                        / (2.0 * (t1.rate + t2.rate).powi(2) * den);
                }
            }
            return Ok(acc);
        }
    }
    s_quad(f, g, e, l, Weight::One, Weight::Q)
}

/// Quadratic-form coefficient of the localized-state norm:
/// Omega_{f,g} = -2 (S_{g,qf} + S~_{f,qg} + (i/E)(S_{g,f} - S~_{f,g})) - int fg.
fn omega(f: &Potential, g: &Potential, e: f64, l: Length) -> Result<Complex64> {
    let ec = Complex64::new(e, 0.0);
    let t1 = s_with_q_second(g, f, ec, l)?;
    let t2 = s_with_q_second(f, g, -ec, l)?;
    let sgf = transform_s(g, f, ec, l)?;
    let sfg_neg = transform_s(f, g, -ec, l)?;
    Ok(-2.0 * (t1 + t2 + I / ec * (sgf - sfg_neg)) - int_fg(f, g)?)
}

/// <psi|psi> of a localized M2 eigenstate from the amplitude quadratic form.
/// The result must be real and non-negative.
pub fn norm_localized(m: &ModelSpec, e: f64, w: &AmplitudeVector) -> Result<f64> {
    if m.kind != ModelKind::M2 {
        return Err(Error::Domain("localized-state norm is defined for M2 models".into()));
    }
    if e == 0.0 {
        return Err(Error::Domain("localized-state norm needs E != 0".into()));
    }
    let obb = omega(&m.b, &m.b, e, m.l)?;
    let oab = omega(&m.a, &m.b, e, m.l)?;
    let oba = omega(&m.b, &m.a, e, m.l)?;
    let oaa = omega(&m.a, &m.a, e, m.l)?;
    let v = w.a.conj() * (obb * w.a - oab * w.b) + w.b.conj() * (-oba * w.a + oaa * w.b);
    let scale = 1.0 + v.re.abs();
    if v.im.abs() > 1e-9 * scale {
        return Err(Error::Accuracy(format!("norm has spurious imaginary part {}", v.im)));
    }
    if v.re < -1e-9 * scale {
        return Err(Error::NegativeNorm(v.re));
    }
    Ok(v.re)
}
