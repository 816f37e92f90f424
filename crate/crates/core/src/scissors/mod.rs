//! Projection synthesis on the eight-port device.
//!
//! Modes 0-2 carry Fock states `|n₁ n₂ n₃⟩`, mode 3 the field `|ψ⟩`. Counting
//! `(N₂, N₃, N₄)` photons in output modes 1-3 with `N₂+N₃+N₄ = n₁+n₂+n₃ = d−1`
//! leaves output mode 0 in `Σ_n c_n γ_n |n⟩`, where
//! `c_n = ⟨n N₂ N₃ N₄| U |n₁ n₂ n₃ n⟩` vanishes for `n ≥ d`.

mod analytic;
mod symmetry;

use std::collections::BTreeSet;

use num_complex::Complex64;

pub use analytic::{analytic_amplitudes, analytic_six_partial, qutrit_bs_relation, QutritBranch, QutritRelation};
pub use symmetry::{symmetry_orbit, symmetry_transforms};

use crate::error::{invalid, Error, Result};
use crate::evolution::evolve_gqsd;
use crate::fock::{InputField, MultimodeState, OccupationVector, QuditState};
use crate::network::GqsdSpec;

/// Fock inputs on modes 0-2 and the photon counts registered on modes 1-3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeasurementEvent {
    pub inputs: [u32; 3],
    pub counts: [u32; 3],
}

impl MeasurementEvent {
    pub fn new(inputs: [u32; 3], counts: [u32; 3]) -> Result<Self> {
        let event = Self { inputs, counts };
        event.validate()?;
        Ok(event)
    }

    /// `|111⟩` in, one photon on every detector.
    pub fn quartit() -> Self {
        Self {
            inputs: [1, 1, 1],
            counts: [1, 1, 1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sent: u32 = self.inputs.iter().sum();
        let seen: u32 = self.counts.iter().sum();
        if sent != seen {
            return Err(invalid(format!(
                "detected photons {seen} differ from auxiliary photons {sent}"
            )));
        }
        Ok(())
    }

    /// Qudit dimension `d = n₁+n₂+n₃+1`.
    pub fn dim(&self) -> usize {
        self.inputs.iter().sum::<u32>() as usize + 1
    }
}

/// `c₀…c_{d−1}` for one device setting and measurement event.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalAmplitudes {
    pub c: Vec<Complex64>,
}

impl ConditionalAmplitudes {
    pub fn d(&self) -> usize {
        self.c.len()
    }

    /// Copy rotated so that `c[reference]` is real and non-negative.
    pub fn phase_quotient(&self, reference: usize) -> Self {
        let z = self.c[reference];
        let rot = if z.norm() > 0.0 {
            z.conj() / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Self {
            c: self.c.iter().map(|x| x * rot).collect(),
        }
    }
}

/// Which Fock indices a (selective) truncation should keep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationTarget {
    d: usize,
    keep: BTreeSet<usize>,
}

impl TruncationTarget {
    pub fn new(d: usize, keep: impl IntoIterator<Item = usize>) -> Result<Self> {
        let keep: BTreeSet<usize> = keep.into_iter().collect();
        if keep.is_empty() {
            return Err(invalid("truncation target must keep at least one Fock index"));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= d) {
            return Err(invalid(format!("kept index {bad} not below d = {d}")));
        }
        Ok(Self { d, keep })
    }

    /// Keep every index below `d`.
    pub fn full(d: usize) -> Self {
        Self {
            d,
            keep: (0..d).collect(),
        }
    }

    /// Remove the listed indices (hole burning).
    pub fn holes(d: usize, holes: &[usize]) -> Result<Self> {
        Self::new(d, (0..d).filter(|n| !holes.contains(n)))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn keep(&self) -> &BTreeSet<usize> {
        &self.keep
    }

    pub fn keeps(&self, n: usize) -> bool {
        self.keep.contains(&n)
    }

    /// The index every kept amplitude is compared with: `min(K)`.
    pub fn reference(&self) -> usize {
        *self.keep.iter().next().expect("non-empty by construction")
    }
}

/// `c_n` for `n = 0…len−1`, which may run past `d` to probe the cutoff.
pub fn amplitudes_up_to(spec: &GqsdSpec, event: &MeasurementEvent, len: usize) -> Result<Vec<Complex64>> {
    let [n1, n2, n3] = event.inputs;
    let [m2, m3, m4] = event.counts;
    let terms = (0..len as u32).map(|n| (OccupationVector::new(vec![n1, n2, n3, n]), Complex64::new(1.0, 0.0)));
    // Different n carry different photon totals, so one evolution serves all.
    let input = MultimodeState::from_terms(4, terms)?;
    let out = evolve_gqsd(&input, spec)?;
    Ok((0..len as u32).map(|n| out.amplitude_of(&[n, m2, m3, m4])).collect())
}

pub fn conditional_amplitudes(spec: &GqsdSpec, event: &MeasurementEvent) -> Result<ConditionalAmplitudes> {
    event.validate()?;
    Ok(ConditionalAmplitudes {
        c: amplitudes_up_to(spec, event, event.dim())?,
    })
}

/// Sum of deviations of kept amplitudes from `c_{min K}` plus the magnitudes
/// of the amplitudes that should vanish.
///
/// For the full target this is `Σ_{n≥1} |c_n − c₀|`.
pub fn truncation_defect(c: &ConditionalAmplitudes, target: &TruncationTarget, quotient_phase: bool) -> Result<f64> {
    if c.d() != target.d() {
        return Err(invalid(format!(
            "amplitude count {} does not match target dimension {}",
            c.d(),
            target.d()
        )));
    }
    let k0 = target.reference();
    let rotated;
    let c = if quotient_phase {
        rotated = c.phase_quotient(k0);
        &rotated
    } else {
        c
    };
    let reference = c.c[k0];
    Ok(c.c
        .iter()
        .enumerate()
        .map(|(n, &x)| {
            if n == k0 {
                0.0
            } else if target.keeps(n) {
                (x - reference).norm()
            } else {
                x.norm()
            }
        })
        .sum())
}

/// Optimal-phase distance `min_φ max_n |a_n − e^{iφ} b_n|`, with `φ` taken from
/// the overlap `Σ b̄_n a_n`.
pub fn phase_aligned_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let rot = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter().zip(b).map(|(x, y)| (x - rot * y).norm()).fold(0.0, f64::max)
}

/// Outcome of an ideal post-selected truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub amplitudes: ConditionalAmplitudes,
    pub qudit: QuditState,
    /// Born probability of the heralding count pattern.
    pub probability: f64,
}

pub fn truncate(spec: &GqsdSpec, event: &MeasurementEvent, field: &InputField) -> Result<Truncation> {
    let amplitudes = conditional_amplitudes(spec, event)?;
    let gammas = field.gammas()?;
    let sigma: Vec<Complex64> = amplitudes
        .c
        .iter()
        .enumerate()
        .map(|(n, c)| c * gammas.get(n).copied().unwrap_or_default())
        .collect();
    let probability: f64 = sigma.iter().map(|s| s.norm_sqr()).sum();
    if probability.sqrt() < 1e-14 {
        return Err(Error::ZeroProbability(probability));
    }
    Ok(Truncation {
        amplitudes,
        qudit: QuditState::from_unnormalized(sigma)?,
        probability,
    })
}
