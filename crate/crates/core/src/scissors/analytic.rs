//! Closed-form conditional amplitudes for the canonical events.
//!
//! Results carry the same global phase convention as the printed formulas
//! (the `e^{iξ₁}`-type factor common to all `c_n` is dropped for `d ≤ 5`), so
//! they agree with [`conditional_amplitudes`](super::conditional_amplitudes)
//! only up to one global phase.
//!
//! Shorthand: `fₖ⁽ⁿ⁾ = rₖ² − n tₖ²`, `gₖ = 2rₖ² − tₖ²`.

use num_complex::Complex64;

use super::{ConditionalAmplitudes, MeasurementEvent};
use crate::error::{invalid, Result};
use crate::network::{amplitudes, GqsdSpec};

const EXACT_TOL: f64 = 1e-12;

fn e(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

/// Splitter amplitudes and phases with one-based indexing, mirror phases
/// folded into the neighbouring shifters.
struct Params {
    t: [f64; 6],
    r: [f64; 6],
    x: [f64; 7],
}

impl Params {
    fn new(spec: &GqsdSpec) -> Result<Self> {
        spec.validate()?;
        let mut t = [0.0; 6];
        let mut r = [0.0; 6];
        for k in 1..=5 {
            (t[k], r[k]) = amplitudes(spec.transmittance(k));
        }
        let mut x = [0.0; 7];
        x[1..].copy_from_slice(&spec.phases);
        // The mode-3 exit mirror only contributes a global phase.
        x[1] += spec.mirror_zeta;
        x[3] += spec.mirror_zeta;
        x[5] += spec.mirror_zeta;
        Ok(Self { t, r, x })
    }

    fn f(&self, k: usize, n: f64) -> f64 {
        self.r[k] * self.r[k] - n * self.t[k] * self.t[k]
    }

    fn g(&self, k: usize) -> f64 {
        2.0 * self.r[k] * self.r[k] - self.t[k] * self.t[k]
    }
}

fn require_unit(spec: &GqsdSpec, ks: &[usize], formula: &str) -> Result<()> {
    for &k in ks {
        if (spec.transmittance(k) - 1.0).abs() > EXACT_TOL {
            return Err(invalid(format!("{formula} requires T{k} = 1")));
        }
    }
    Ok(())
}

/// Multiplies `c_n` by `e^{inφ}` (a phase acting on output mode 0 only).
fn output_phase(c: Vec<Complex64>, phi: f64) -> Vec<Complex64> {
    c.into_iter().enumerate().map(|(n, x)| x * e(n as f64 * phi)).collect()
}

/// Closed forms for the two-splitter reduction (d = 2, 3) and the
/// BS3-free device (d = 4, 5).
///
/// Accepted events (inputs / counts):
/// - d = 2: `(1,0,0)` or `(0,1,0)` / `(1,0,0)` or `(0,0,1)`, needs `T₂ = T₃ = T₅ = 1`;
/// - d = 3: `(1,1,0)/(1,0,1)`, same splitters removed;
/// - d = 4: `(1,1,1)/(1,1,1)`, needs `T₃ = 1`;
/// - d = 5: `(1,2,1)/(1,2,1)`, needs `T₃ = 1`.
pub fn analytic_amplitudes(spec: &GqsdSpec, event: &MeasurementEvent) -> Result<ConditionalAmplitudes> {
    let p = Params::new(spec)?;
    let (t, r, x) = (&p.t, &p.r, &p.x);
    let c = match (event.inputs, event.counts) {
        (inputs @ ([1, 0, 0] | [0, 1, 0]), counts @ ([1, 0, 0] | [0, 0, 1])) => {
            require_unit(spec, &[2, 3, 5], "two-splitter qubit formula")?;
            // With B₃ removed, P₃ and P₄ act back to back on mode 1.
            let ph = e(x[3] + x[4]);
            let c = match (inputs[0] == 1, counts[0] == 1) {
                (true, false) => vec![ph * r[1] * r[4], (t[1] * t[4]).into()],
                (false, true) => vec![ph * t[1] * t[4], (r[1] * r[4]).into()],
                (false, false) => vec![-ph * t[1] * r[4], (r[1] * t[4]).into()],
                (true, true) => vec![-ph * r[1] * t[4], (t[1] * r[4]).into()],
            };
            output_phase(c, x[2] + x[6])
        }
        ([1, 1, 0], [1, 0, 1]) => {
            require_unit(spec, &[2, 3, 5], "two-splitter qutrit formula")?;
            let x4 = x[3] + x[4];
            let outer = 2.0 * r[1] * t[1] * r[4] * t[4];
            let c = vec![e(2.0 * x4) * outer, e(x4) * p.f(1, 1.0) * p.f(4, 1.0), outer.into()];
            output_phase(c, x[2] + x[6])
        }
        ([1, 1, 1], [1, 1, 1]) => {
            require_unit(spec, &[3], "quartit formula")?;
            output_phase(quartit(&p, x[3] + x[4]), x[6])
        }
        ([1, 2, 1], [1, 2, 1]) => {
            require_unit(spec, &[3], "five-level formula")?;
            output_phase(five_level(&p, x[3] + x[4]), x[6])
        }
        _ => {
            return Err(invalid(format!(
                "no closed form for inputs {:?} / counts {:?}",
                event.inputs, event.counts
            )))
        }
    };
    Ok(ConditionalAmplitudes { c })
}

fn quartit(p: &Params, x4: f64) -> Vec<Complex64> {
    let (t, r, x) = (&p.t, &p.r, &p.x);
    let (x2, x5) = (x[2], x[5]);
    let f1 = |k| p.f(k, 1.0);
    let f2 = |k| p.f(k, 2.0);

    let c0 = -2.0
        * e(x4 + x5)
        * t[2]
        * t[4]
        * (e(x2 + x5) * f1(1) * r[2] * r[5] * t[5] + e(x4) * f1(5) * r[1] * t[1] * r[4]);
    let c1 = -2.0 * r[1] * t[1] * r[2] * r[4] * r[5] * t[5] * (e(2.0 * (x2 + x5)) * f2(2) + e(2.0 * x4) * f2(4))
        + e(x2 + x4 + x5) * f1(1) * f1(2) * f1(4) * f1(5);
    let c2 = 2.0
        * e(x2)
        * t[2]
        * t[4]
        * (e(x2 + x5) * r[1] * t[1] * p.g(2) * r[4] * f1(5) + e(x4) * f1(1) * r[2] * p.g(4) * r[5] * t[5]);
    let c3 = 6.0 * e(2.0 * x2) * r[1] * t[1] * r[2] * t[2].powi(2) * r[4] * t[4].powi(2) * r[5] * t[5];
    vec![c0, c1, c2, c3]
}

fn five_level(p: &Params, x4: f64) -> Vec<Complex64> {
    let (t, r, x) = (&p.t, &p.r, &p.x);
    let (x2, x5) = (x[2], x[5]);
    let f = |k, n| p.f(k, n);
    let g = |k| p.g(k);
    let sq = |v: f64| v * v;

    let c0 = e(x4 + x5)
        * t[2]
        * t[4]
        * (3.0 * e(2.0 * (x2 + x5)) * f(1, 2.0) * r[1] * sq(r[2]) * r[5] * sq(t[5])
            + 2.0 * e(x2 + x4 + x5) * g(1) * t[1] * r[2] * r[4] * g(5) * t[5]
            + 3.0 * e(2.0 * x4) * r[1] * sq(t[1]) * sq(r[4]) * r[5] * f(5, 2.0));

    let c1 = 3.0
        * r[1]
        * t[1]
        * r[2]
        * r[4]
        * r[5]
        * t[5]
        * (e(3.0 * (x2 + x5)) * r[1] * f(2, 3.0) * r[2] * t[5] + e(3.0 * x4) * t[1] * f(4, 3.0) * r[4] * r[5])
        - e(x2 + x4 + x5)
            * (e(x2 + x5) * f(1, 2.0) * r[1] * f(2, 2.0) * r[2] * f(4, 1.0) * g(5) * t[5]
                + e(x4) * g(1) * t[1] * f(2, 1.0) * f(4, 2.0) * r[4] * f(5, 2.0) * r[5]);

    let c2 = e(x2)
        * t[2]
        * t[4]
        * (2.0
            * t[1]
            * r[2]
            * r[4]
            * t[5]
            * (3.0 * e(2.0 * x4) * (sq(r[1]) * sq(t[4]) - sq(r[1]) * g(4) + sq(t[1]) * f(4, 1.0)) * sq(r[5])
                - e(2.0 * (x2 + x5)) * sq(r[1]) * (f(2, 2.0) * g(5) + g(2) * f(5, 1.0) + g(2) * sq(r[5])))
            + e(x2 + x4 + x5)
                * r[1]
                * r[5]
                * (2.0 * sq(r[1]) * g(2) * sq(r[4]) * f(5, 1.0)
                    - 2.0 * sq(t[1]) * (f(2, 1.0) + sq(r[2])) * g(4) * f(5, 2.0)
                    - sq(r[1]) * g(2) * (sq(t[4]) * f(5, 2.0) + 2.0 * sq(r[4]) * sq(t[5]))));

    let c3 = 3.0
        * e(2.0 * x2)
        * r[1]
        * sq(t[2])
        * sq(t[4])
        * r[5]
        * (e(x2 + x5) * r[1] * t[1] * (3.0 * sq(r[2]) - sq(t[2])) * r[4] * f(5, 2.0)
            + e(x4) * f(1, 2.0) * r[2] * (3.0 * sq(r[4]) - sq(t[4])) * r[5] * t[5]);

    let c4 = 12.0 * e(3.0 * x2) * sq(r[1]) * t[1] * r[2] * t[2].powi(3) * r[4] * t[4].powi(3) * t[5] * sq(r[5]);
    vec![c0, c1, c2, c3, c4]
}

/// `[c₄, c₅]` for the six-level event `(2,1,2)/(2,1,2)`, valid for any `T₃`.
/// These two carry their full phase, including `ξ₁`.
pub fn analytic_six_partial(spec: &GqsdSpec) -> Result<[Complex64; 2]> {
    let p = Params::new(spec)?;
    let (t, r, x) = (&p.t, &p.r, &p.x);
    let sq = |v: f64| v * v;
    let c5 = 30.0
        * e(2.0 * x[1] + 3.0 * x[2])
        * r[1]
        * sq(t[1])
        * sq(r[2])
        * t[2].powi(3)
        * sq(r[4])
        * t[4].powi(3)
        * r[5]
        * sq(t[5]);
    let inner = 3.0 * sq(r[2]) - 2.0 * sq(t[2]);
    let c4 = 6.0
        * e(2.0 * (x[1] + x[2]))
        * t[1]
        * r[2]
        * sq(t[2])
        * r[4]
        * sq(t[4])
        * t[5]
        * ((3.0 * sq(r[4]) - 2.0 * sq(t[4]))
            * e(x[4])
            * (e(x[2]) * r[1] * t[1] * inner * r[3] + e(x[3]) * p.g(1) * r[2] * t[3])
            * r[5]
            * t[5]
            + e(x[5]) * (e(x[2]) * r[1] * t[1] * inner * t[3] - e(x[3]) * p.g(1) * r[2] * r[3]) * r[4] * p.g(5));
    Ok([c4 * e(4.0 * x[6]), c5 * e(5.0 * x[6])])
}

/// Sign choice in the qutrit splitter relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QutritBranch {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QutritRelation {
    pub transmittance_4: f64,
    pub xi_4: f64,
    /// `T₄` landed on 0 or 1, i.e. BS4 is not a splitter any more.
    pub degenerate: bool,
}

/// `T₄ = ½(1 ± r₁t₁/√(1 − 3(r₁t₁)²))`, which makes the two-splitter qutrit
/// amplitudes equal.
///
/// The middle amplitude carries `e^{iξ₄}(1−2T₁)(1−2T₄)`, so `ξ₄ = 0` when
/// both splitters lean the same way and `π` otherwise. For `T₁ < ½` this
/// pairs `+` with `π` and `−` with `0`; above `½` the pairing swaps.
pub fn qutrit_bs_relation(t1: f64, branch: QutritBranch) -> Result<QutritRelation> {
    if !(0.0..=1.0).contains(&t1) {
        return Err(invalid(format!("T1 = {t1} outside [0, 1]")));
    }
    let rt = (t1 * (1.0 - t1)).sqrt();
    let disc = 1.0 - 3.0 * rt * rt;
    if disc <= 0.0 {
        return Err(invalid("qutrit relation undefined: 1 − 3(r₁t₁)² ≤ 0"));
    }
    let ratio = rt / disc.sqrt();
    let transmittance_4 = match branch {
        QutritBranch::Plus => 0.5 * (1.0 + ratio),
        QutritBranch::Minus => 0.5 * (1.0 - ratio),
    };
    let xi_4 = if (1.0 - 2.0 * t1) * (1.0 - 2.0 * transmittance_4) >= 0.0 {
        0.0
    } else {
        std::f64::consts::PI
    };
    let degenerate = !(EXACT_TOL..=1.0 - EXACT_TOL).contains(&transmittance_4);
    Ok(QutritRelation {
        transmittance_4: transmittance_4.clamp(0.0, 1.0),
        xi_4,
        degenerate,
    })
}
