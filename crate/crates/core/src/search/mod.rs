//! Multi-start search for device settings that realize a truncation target,
//! and the regression catalog of known solutions.
//!
//! The search space is the 10-vector `[θ₁…θ₅, ξ₁…ξ₅]` with `Tₖ = cos²θₖ`;
//! `ξ₆` is held fixed. Each restart runs a Nelder-Mead simplex on the
//! relative defect `Δ/|c_{k₀}|` (plain `Δ` is minimized by switching the
//! device off) and is then polished by Gauss-Newton steps on the residual
//! vector behind `Δ`.

mod catalog;
mod nelder_mead;

use std::cmp::Ordering;
use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use catalog::{
    catalog, verify_catalog, verify_entries, CatalogEntry, CatalogReport, EntryCheck, EntryResult, Exactness,
};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};

use crate::error::{invalid, Result};
use crate::network::GqsdSpec;
use crate::scissors::{
    conditional_amplitudes, symmetry_orbit, truncation_defect, ConditionalAmplitudes, MeasurementEvent,
    TruncationTarget,
};

/// Number of search parameters.
pub const N_PARAMS: usize = 10;

/// `[θ₁…θ₅, ξ₁…ξ₅]` to a spec with the given `ξ₆`.
pub fn params_to_spec(params: &[f64; N_PARAMS], xi6: f64) -> GqsdSpec {
    let mut spec = GqsdSpec::default();
    for k in 0..5 {
        spec.transmittances[k] = params[k].cos().powi(2).clamp(0.0, 1.0);
        spec.phases[k] = params[5 + k];
    }
    spec.phases[5] = xi6;
    spec
}

/// Inverse of [`params_to_spec`] with `θₖ ∈ [0, π/2]`.
pub fn spec_to_params(spec: &GqsdSpec) -> [f64; N_PARAMS] {
    std::array::from_fn(|i| {
        if i < 5 {
            spec.transmittances[i].sqrt().acos()
        } else {
            spec.phases[i - 5]
        }
    })
}

/// `Δ` at the given parameters, with `ξ₆ = 0`.
pub fn objective(
    params: &[f64; N_PARAMS],
    event: &MeasurementEvent,
    target: &TruncationTarget,
    quotient_phase: bool,
) -> f64 {
    let spec = params_to_spec(params, 0.0);
    conditional_amplitudes(&spec, event)
        .and_then(|c| truncation_defect(&c, target, quotient_phase))
        .unwrap_or(f64::INFINITY)
}

/// Ranges for `[T₁…T₅, ξ₁…ξ₅]`; `lo == hi` freezes a parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamBounds {
    pub lo: [f64; N_PARAMS],
    pub hi: [f64; N_PARAMS],
}

impl Default for ParamBounds {
    /// Every `T` in `[0, 1]`, `ξ₂…ξ₅` in `[0, 2π]`, `ξ₁ = 0` (it only adds a
    /// global phase).
    fn default() -> Self {
        let mut lo = [0.0; N_PARAMS];
        let mut hi = [1.0; N_PARAMS];
        lo[5] = 0.0;
        hi[5] = 0.0;
        for i in 6..N_PARAMS {
            lo[i] = 0.0;
            hi[i] = TAU;
        }
        Self { lo, hi }
    }
}

impl ParamBounds {
    /// Freezes entry `i` (0-4 for `T₁…T₅`, 5-9 for `ξ₁…ξ₅`).
    pub fn freeze(mut self, i: usize, value: f64) -> Self {
        self.lo[i] = value;
        self.hi[i] = value;
        self
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.lo[i] == self.hi[i]
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..N_PARAMS).filter(|&i| !self.is_frozen(i)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..N_PARAMS {
            let (lo, hi) = (self.lo[i], self.hi[i]);
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(invalid(format!("bad bounds [{lo}, {hi}] for parameter {i}")));
            }
            if i < 5 && (lo < 0.0 || hi > 1.0) {
                return Err(invalid(format!(
                    "transmittance bounds [{lo}, {hi}] for T{} leave [0, 1]",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Bounds in search coordinates: `θ` for transmittances, `ξ` unchanged.
    fn internal(&self, i: usize) -> (f64, f64) {
        if i < 5 {
            (self.hi[i].sqrt().acos(), self.lo[i].sqrt().acos())
        } else {
            (self.lo[i], self.hi[i])
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Number of independent restarts.
    pub restarts: usize,
    /// Objective evaluations allowed per restart for the simplex stage.
    pub max_iterations: usize,
    /// A run counts as converged when `Δ` falls below this.
    pub convergence_tol: f64,
    pub bounds: ParamBounds,
    pub random_seed: u64,
    pub quotient_phase: bool,
    /// Converged runs with `|c_{k₀}|` below this are discarded as trivial.
    pub min_amplitude: f64,
    /// Optional centre for the restarts; restart 0 starts exactly here.
    pub start: Option<GqsdSpec>,
    /// Max perturbation (radians in `θ` and `ξ`) around `start`.
    pub start_spread: f64,
    pub xi6: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iterations: 4000,
            convergence_tol: 1e-12,
            bounds: ParamBounds::default(),
            random_seed: 0,
            quotient_phase: false,
            min_amplitude: 1e-3,
            start: None,
            start_spread: 0.05,
            xi6: 0.0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(invalid("convergence_tol must be positive"));
        }
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(invalid("restarts and max_iterations must be positive"));
        }
        if !(self.min_amplitude >= 0.0 && self.start_spread >= 0.0 && self.xi6.is_finite()) {
            return Err(invalid("min_amplitude and start_spread must be non-negative"));
        }
        if let Some(s) = &self.start {
            s.validate()?;
        }
        self.bounds.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolutionSource {
    Published,
    Found,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionRecord {
    pub spec: GqsdSpec,
    pub event: MeasurementEvent,
    pub target: TruncationTarget,
    pub defect: f64,
    /// `|c_{k₀}|`, the common magnitude of the kept amplitudes.
    pub amplitude: f64,
    pub source: SolutionSource,
}

impl SolutionRecord {
    pub fn evaluate(
        spec: GqsdSpec,
        event: MeasurementEvent,
        target: TruncationTarget,
        source: SolutionSource,
    ) -> Result<Self> {
        let c = conditional_amplitudes(&spec, &event)?;
        let defect = truncation_defect(&c, &target, false)?;
        let amplitude = c.c[target.reference()].norm();
        Ok(Self {
            spec,
            event,
            target,
            defect,
            amplitude,
            source,
        })
    }

    /// `Δ` recomputed from the stored spec.
    pub fn recompute_defect(&self, quotient_phase: bool) -> Result<f64> {
        let c = conditional_amplitudes(&self.spec, &self.event)?;
        truncation_defect(&c, &self.target, quotient_phase)
    }
}

/// Residuals whose 1-norm of complex pairs is `Δ`, after rotating `c_{k₀}`
/// onto the positive real axis.
fn residuals(c: &ConditionalAmplitudes, target: &TruncationTarget) -> Vec<f64> {
    let k0 = target.reference();
    let q = c.phase_quotient(k0);
    let mut out = Vec::with_capacity(2 * c.d());
    for (n, &x) in q.c.iter().enumerate() {
        if n == k0 {
            continue;
        }
        let r = if target.keeps(n) { x - q.c[k0] } else { x };
        out.push(r.re);
        out.push(r.im);
    }
    out
}

/// Outcome of [`refine`].
#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub spec: GqsdSpec,
    pub defect: f64,
    pub iterations: usize,
}

/// Gauss-Newton projection of `spec` onto the solution set of `target`,
/// moving only the listed parameters (0-4: `θ₁…θ₅`, 5-9: `ξ₁…ξ₅`).
///
/// Each step is the minimum-norm least-squares update from a pseudo-inverse
/// of a central-difference Jacobian, so the result stays close to the start
/// when the solutions form a continuous family.
pub fn refine(
    spec: &GqsdSpec,
    event: &MeasurementEvent,
    target: &TruncationTarget,
    free: &[usize],
    max_iterations: usize,
) -> Result<Refinement> {
    event.validate()?;
    if let Some(&bad) = free.iter().find(|&&i| i >= N_PARAMS) {
        return Err(invalid(format!("parameter index {bad} out of range")));
    }
    let xi6 = spec.xi(6);
    let eval = |p: &[f64; N_PARAMS]| -> Result<(Vec<f64>, f64)> {
        let mut s = params_to_spec(p, xi6);
        s.mirror_zeta = spec.mirror_zeta;
        let c = conditional_amplitudes(&s, event)?;
        Ok((residuals(&c, target), truncation_defect(&c, target, false)?))
    };
    let norm = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut p = spec_to_params(spec);
    let (mut r, mut defect) = eval(&p)?;
    let mut iterations = 0;
    const H: f64 = 1e-7;
    while iterations < max_iterations && defect > 1e-15 && !free.is_empty() {
        iterations += 1;
        let mut jac = DMatrix::<f64>::zeros(r.len(), free.len());
        for (col, &i) in free.iter().enumerate() {
            let (mut plus, mut minus) = (p, p);
            plus[i] += H;
            minus[i] -= H;
            let (rp, _) = eval(&plus)?;
            let (rm, _) = eval(&minus)?;
            for row in 0..r.len() {
                jac[(row, col)] = (rp[row] - rm[row]) / (2.0 * H);
            }
        }
        let svd = jac.svd(true, true);
        let eps = 1e-10 * svd.singular_values.max();
        let step = match svd.solve(&DVector::from_column_slice(&r), eps) {
            Ok(s) => s,
            Err(_) => break,
        };
        // Halve the step until the residual shrinks.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let mut trial = p;
            for (k, &i) in free.iter().enumerate() {
                trial[i] -= scale * step[k];
            }
            let (rt, dt) = eval(&trial)?;
            if norm(&rt) < norm(&r) {
                p = trial;
                r = rt;
                defect = dt;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted || step.norm() * scale < 1e-16 {
            break;
        }
    }
    let mut out = params_to_spec(&p, xi6);
    out.mirror_zeta = spec.mirror_zeta;
    // Exact fixed values survive the cos² round trip.
    for k in 0..5 {
        if !free.contains(&k) {
            out.transmittances[k] = spec.transmittances[k];
        }
    }
    Ok(Refinement {
        spec: out,
        defect,
        iterations,
    })
}

fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if TAU - w < 1e-12 {
        0.0
    } else {
        w
    }
}

/// Removes phase freedoms that only contribute a global factor: `ξ₁` always,
/// and `ξ₃` (folded into `ξ₄`) when `T₃ = 1`.
fn gauge_fix(spec: &GqsdSpec) -> GqsdSpec {
    let mut s = *spec;
    s.phases[0] = 0.0;
    if s.transmittances[2] == 1.0 {
        s.phases[3] += s.phases[2];
        s.phases[2] = 0.0;
    }
    for p in s.phases.iter_mut() {
        *p = wrap_phase(*p);
    }
    s
}

/// Members of the symmetry class that share the amplitudes of `spec`
/// (quartit event with `T₃ = 1` only).
fn equivalents(spec: &GqsdSpec, event: &MeasurementEvent) -> Vec<GqsdSpec> {
    if *event != MeasurementEvent::quartit() || spec.transmittances[2] != 1.0 {
        return vec![*spec];
    }
    symmetry_orbit(spec).unwrap_or_else(|_| vec![*spec])
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Two solutions coincide when some symmetry image of one has the other's
/// transmittances and both give the same amplitudes up to a global phase.
/// Comparing amplitudes rather than raw phases absorbs the phase directions
/// that only rotate `c` globally.
fn same_solution(a: &Candidate, b: &Candidate, event: &MeasurementEvent) -> bool {
    let same_t = equivalents(&a.record.spec, event)
        .iter()
        .any(|s| max_abs_diff(&s.transmittances, &b.record.spec.transmittances) < DEDUP_THRESHOLD);
    same_t && crate::scissors::phase_aligned_distance(&a.amplitudes, &b.amplitudes) < DEDUP_THRESHOLD
}

struct Candidate {
    record: SolutionRecord,
    amplitudes: Vec<Complex64>,
}

/// Max-norm threshold below which two solutions coincide.
pub const DEDUP_THRESHOLD: f64 = 1e-6;

fn single_run(
    event: &MeasurementEvent,
    target: &TruncationTarget,
    config: &SearchConfig,
    restart: usize,
) -> Option<SolutionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.random_seed);
    rng.set_stream(restart as u64);
    let bounds = &config.bounds;
    let free = bounds.free_indices();

    let mut base = [0.0; N_PARAMS];
    for (i, b) in base.iter_mut().enumerate() {
        *b = bounds.internal(i).0;
    }
    let centre = config.start.map(|s| spec_to_params(&s));
    let x0: Vec<f64> = free
        .iter()
        .map(|&i| {
            let (lo, hi) = bounds.internal(i);
            match centre {
                Some(c) if restart == 0 => c[i].clamp(lo, hi),
                Some(c) => (c[i] + rng.random_range(-1.0..=1.0) * config.start_spread).clamp(lo, hi),
                None => rng.random_range(lo..=hi),
            }
        })
        .collect();

    let assemble = |x: &[f64]| {
        let mut p = base;
        for (k, &i) in free.iter().enumerate() {
            let (lo, hi) = bounds.internal(i);
            p[i] = if i < 5 { x[k].clamp(lo, hi) } else { x[k] };
        }
        params_to_spec(&p, config.xi6)
    };
    let k0 = target.reference();
    let relative = |x: &[f64]| {
        let spec = assemble(x);
        match conditional_amplitudes(&spec, event) {
            Ok(c) => {
                let scale = c.c[k0].norm();
                if scale < 1e-300 {
                    return f64::INFINITY;
                }
                truncation_defect(&c, target, config.quotient_phase).unwrap_or(f64::INFINITY) / scale
            }
            Err(_) => f64::INFINITY,
        }
    };

    let step: Vec<f64> = free
        .iter()
        .map(|&i| {
            if centre.is_some() {
                config.start_spread.max(1e-3)
            } else if i < 5 {
                0.2
            } else {
                0.5
            }
        })
        .collect();
    let opts = NelderMeadOptions {
        max_evaluations: config.max_iterations,
        ..Default::default()
    };
    let nm = nelder_mead(relative, &x0, &step, &opts);
    let spec = assemble(&nm.x);

    let polished = refine(&spec, event, target, &free, 30).ok()?;
    let record =
        SolutionRecord::evaluate(gauge_fix(&polished.spec), *event, target.clone(), SolutionSource::Found).ok()?;
    (record.defect < config.convergence_tol && record.amplitude >= config.min_amplitude).then_some(record)
}

/// Runs `config.restarts` seeded searches in parallel and returns the
/// distinct converged solutions, best amplitude first.
pub fn optimize(
    event: &MeasurementEvent,
    target: &TruncationTarget,
    config: &SearchConfig,
) -> Result<Vec<SolutionRecord>> {
    event.validate()?;
    config.validate()?;
    if target.d() != event.dim() {
        return Err(invalid(format!(
            "target dimension {} does not match event dimension {}",
            target.d(),
            event.dim()
        )));
    }
    let runs: Vec<Option<SolutionRecord>> = (0..config.restarts)
        .into_par_iter()
        .map(|i| single_run(event, target, config, i))
        .collect();

    let mut kept: Vec<Candidate> = Vec::new();
    for record in runs.into_iter().flatten() {
        let amplitudes = normalized_amplitudes(&record.spec, event, target)?;
        let candidate = Candidate { record, amplitudes };
        match kept.iter_mut().find(|k| same_solution(k, &candidate, event)) {
            Some(existing) if candidate.record.defect < existing.record.defect => *existing = candidate,
            Some(_) => {}
            None => kept.push(candidate),
        }
    }
    let mut records: Vec<SolutionRecord> = kept.into_iter().map(|k| k.record).collect();
    records.sort_by(|a, b| {
        b.amplitude.total_cmp(&a.amplitude).then_with(|| {
            let ka = a.spec.transmittances.iter().chain(&a.spec.phases);
            let kb = b.spec.transmittances.iter().chain(&b.spec.phases);
            ka.partial_cmp(kb).unwrap_or(Ordering::Equal)
        })
    });
    Ok(records)
}

/// Rotates every amplitude so that `c_{k₀}` is real and non-negative.
pub fn normalized_amplitudes(
    spec: &GqsdSpec,
    event: &MeasurementEvent,
    target: &TruncationTarget,
) -> Result<Vec<Complex64>> {
    Ok(conditional_amplitudes(spec, event)?
        .phase_quotient(target.reference())
        .c)
}
