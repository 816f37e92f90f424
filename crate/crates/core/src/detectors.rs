//! Imperfect photon counting.
//!
//! A counter of efficiency `η` with mean dark count `ν` per resolution window
//! registers `N` clicks on `|m⟩` with probability
//!
//! `w_N(m) = Σ_{n=0}^{min(N,m)} e^{−ν} ν^{N−n}/(N−n)! · C(m,n) ηⁿ (1−η)^{m−n}`.
//!
//! Conventional counters only tell `N = 0` from `N ≥ 1`; single-photon
//! resolving ones also separate `N = 1`. All operators are diagonal in the
//! Fock basis, so conditioning reduces to weighting the detected-mode
//! occupations.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::evolution::{binomial, evolve_gqsd};
use crate::fock::{embed_input, InputField, MultimodeState, QuditState};
use crate::network::GqsdSpec;
use crate::scissors::{truncate, MeasurementEvent};

/// Probabilities below this are treated as an impossible outcome.
pub const MIN_PROBABILITY: f64 = 1e-30;
/// Target for the neglected dark-count Poisson tail.
pub const DARK_TAIL_EPSILON: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    /// Binary: click or no click.
    Conventional,
    /// Trinary: 0, 1 or at least 2.
    SinglePhotonResolving,
    /// Full count.
    NumberResolving,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 3] = [Self::Conventional, Self::SinglePhotonResolving, Self::NumberResolving];

    /// One-letter tag: `c`, `s` or `r`.
    pub fn tag(self) -> char {
        match self {
            Self::Conventional => 'c',
            Self::SinglePhotonResolving => 's',
            Self::NumberResolving => 'r',
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "c" => Ok(Self::Conventional),
            "s" => Ok(Self::SinglePhotonResolving),
            "r" => Ok(Self::NumberResolving),
            other => Err(invalid(format!("unknown detector kind '{other}' (expected c, s or r)"))),
        }
    }

    /// Outcome a detector of this kind must report when the event asks for
    /// `required` photons.
    pub fn outcome_for_count(self, required: u32) -> OutcomeLabel {
        match (self, required) {
            (Self::Conventional, 0) => OutcomeLabel::NoClick,
            (Self::Conventional, _) => OutcomeLabel::Click,
            (Self::SinglePhotonResolving, 0) => OutcomeLabel::Zero,
            (Self::SinglePhotonResolving, 1) => OutcomeLabel::One,
            (Self::SinglePhotonResolving, _) => OutcomeLabel::TwoOrMore,
            (Self::NumberResolving, n) => OutcomeLabel::Count(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeLabel {
    NoClick,
    Click,
    Zero,
    One,
    TwoOrMore,
    Count(u32),
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoClick => write!(f, "no-click"),
            Self::Click => write!(f, "click"),
            Self::Zero => write!(f, "0"),
            Self::One => write!(f, "1"),
            Self::TwoOrMore => write!(f, ">=2"),
            Self::Count(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorModel {
    pub kind: DetectorKind,
    pub eta: f64,
    pub nu: f64,
}

impl DetectorModel {
    pub fn new(kind: DetectorKind, eta: f64, nu: f64) -> Result<Self> {
        let m = Self { kind, eta, nu };
        m.validate()?;
        Ok(m)
    }

    pub fn ideal(kind: DetectorKind) -> Self {
        Self {
            kind,
            eta: 1.0,
            nu: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(invalid(format!("efficiency {} outside [0, 1]", self.eta)));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(invalid(format!(
                "dark count mean {} must be finite and non-negative",
                self.nu
            )));
        }
        Ok(())
    }

    /// Outcomes this kind can report, for counts up to `max_count` when
    /// number resolving.
    pub fn outcome_family(&self, max_count: u32) -> Vec<OutcomeLabel> {
        match self.kind {
            DetectorKind::Conventional => vec![OutcomeLabel::NoClick, OutcomeLabel::Click],
            DetectorKind::SinglePhotonResolving => vec![OutcomeLabel::Zero, OutcomeLabel::One, OutcomeLabel::TwoOrMore],
            DetectorKind::NumberResolving => (0..=max_count).map(OutcomeLabel::Count).collect(),
        }
    }

    /// `w_N(m)` for a number-resolving reading of `n_clicks`.
    pub fn count_weight(&self, n_clicks: u32, m: u32) -> f64 {
        let (eta, nu) = (self.eta, self.nu);
        let mut poisson = (-nu).exp(); // e^{−ν} ν^k / k! for k = N − n, built from k = 0
        let mut terms = Vec::with_capacity(n_clicks.min(m) as usize + 1);
        for k in 0..=n_clicks {
            let n = n_clicks - k;
            if n <= m {
                let loss = if m - n == 0 {
                    1.0
                } else {
                    (1.0 - eta).powi((m - n) as i32)
                };
                let gain = if n == 0 { 1.0 } else { eta.powi(n as i32) };
                terms.push(poisson * binomial(m, n) * gain * loss);
            }
            poisson *= nu / f64::from(k + 1);
        }
        terms.iter().sum()
    }

    /// Weight on `|m⟩` of the operator for `label`.
    pub fn outcome_weight(&self, label: OutcomeLabel, m: u32) -> Result<f64> {
        use OutcomeLabel::*;
        let w = match (self.kind, label) {
            (DetectorKind::Conventional, NoClick) | (DetectorKind::SinglePhotonResolving, Zero) => {
                self.count_weight(0, m)
            }
            (DetectorKind::Conventional, Click) => 1.0 - self.count_weight(0, m),
            (DetectorKind::SinglePhotonResolving, One) => self.count_weight(1, m),
            (DetectorKind::SinglePhotonResolving, TwoOrMore) => 1.0 - self.count_weight(0, m) - self.count_weight(1, m),
            (DetectorKind::NumberResolving, Count(n)) => self.count_weight(n, m),
            (kind, label) => {
                return Err(invalid(format!(
                    "outcome '{label}' is not available for detector kind '{}'",
                    kind.tag()
                )))
            }
        };
        Ok(w)
    }
}

/// `ν = τ_res · R_dark`.
pub fn nu_from_dark_rate(dark_rate: f64, tau_res: f64) -> Result<f64> {
    if !(dark_rate >= 0.0 && tau_res >= 0.0) {
        return Err(invalid("dark-count rate and resolution time must be non-negative"));
    }
    Ok(dark_rate * tau_res)
}

/// Smallest `k` with `P(Poisson(ν) > k) < eps`.
pub fn dark_count_tail(nu: f64, eps: f64) -> u32 {
    let mut term = (-nu).exp();
    let mut cdf = term;
    let mut k = 0u32;
    while 1.0 - cdf >= eps && k < 1000 {
        k += 1;
        term *= nu / f64::from(k);
        cdf += term;
    }
    k
}

/// Fock-diagonal operator `Σ_m w_m |m⟩⟨m|` on `m = 0…m_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmOperator {
    pub weights: Vec<f64>,
}

impl PovmOperator {
    pub fn m_max(&self) -> u32 {
        self.weights.len() as u32 - 1
    }
}

pub fn povm_number_resolving(model: &DetectorModel, n_clicks: u32, m_max: u32) -> PovmOperator {
    PovmOperator {
        weights: (0..=m_max).map(|m| model.count_weight(n_clicks, m)).collect(),
    }
}

pub fn povm_for_outcome(model: &DetectorModel, label: OutcomeLabel, m_max: u32) -> Result<PovmOperator> {
    model.validate()?;
    let weights = (0..=m_max)
        .map(|m| model.outcome_weight(label, m))
        .collect::<Result<_>>()?;
    Ok(PovmOperator { weights })
}

/// Number-resolving family `N = 0…m_max + N_tail` where `N_tail` keeps the
/// neglected dark-count tail below [`DARK_TAIL_EPSILON`].
pub fn number_resolving_family(model: &DetectorModel, m_max: u32) -> Vec<PovmOperator> {
    let top = m_max + dark_count_tail(model.nu, DARK_TAIL_EPSILON);
    (0..=top).map(|n| povm_number_resolving(model, n, m_max)).collect()
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(DMatrix<Complex64>);

impl DensityMatrix {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self(m);
        rho.validate()?;
        Ok(rho)
    }

    pub fn pure(state: &QuditState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.coeffs());
        Self(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        if !m.is_square() || m.nrows() == 0 {
            return Err(invalid("density matrix must be square and non-empty"));
        }
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(invalid(format!("density matrix not Hermitian (residual {herm:e})")));
        }
        if (m.trace().re - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("density matrix trace {} differs from 1", m.trace().re)));
        }
        let min_eig = m.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-10 {
            return Err(invalid(format!("density matrix has negative eigenvalue {min_eig:e}")));
        }
        Ok(())
    }
}

/// `ρ = Tr₂₃₄(Π₂Π₃Π₄|Φ⟩⟨Φ|)/p` on mode 0 and the outcome probability `p`.
pub fn conditional_density_matrix(
    output: &MultimodeState,
    models: &[DetectorModel; 3],
    outcomes: &[OutcomeLabel; 3],
) -> Result<(DensityMatrix, f64)> {
    if output.modes() != 4 {
        return Err(invalid(format!(
            "expected a four-mode state, got {} modes",
            output.modes()
        )));
    }
    for m in models {
        m.validate()?;
    }
    let dim = output.iter().map(|(k, _)| k.get(0)).max().unwrap_or(0) as usize + 1;

    // Mode-0 vectors grouped by the detected occupations (m₂, m₃, m₄).
    let mut groups: BTreeMap<[u32; 3], Vec<Complex64>> = BTreeMap::new();
    for (key, &amp) in output.iter() {
        let detected = [key.get(1), key.get(2), key.get(3)];
        groups
            .entry(detected)
            .or_insert_with(|| vec![Complex64::default(); dim])[key.get(0) as usize] += amp;
    }

    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for (detected, v) in &groups {
        let mut w = 1.0;
        for i in 0..3 {
            w *= models[i].outcome_weight(outcomes[i], detected[i])?;
        }
        if w == 0.0 {
            continue;
        }
        for r in 0..dim {
            for c in 0..dim {
                rho[(r, c)] += v[r] * v[c].conj() * w;
            }
        }
    }
    let probability = rho.trace().re;
    if probability < MIN_PROBABILITY {
        return Err(Error::ZeroProbability(probability));
    }
    rho /= Complex64::new(probability, 0.0);
    // Remove rounding asymmetry before validation.
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    Ok((DensityMatrix::from_matrix(rho)?, probability))
}

/// `F = ⟨φ|ρ|φ⟩`, zero-padding whichever side is shorter.
pub fn fidelity(rho: &DensityMatrix, ideal: &QuditState) -> f64 {
    let phi = ideal.coeffs();
    let n = rho.dim().min(phi.len());
    let mut f = Complex64::default();
    for r in 0..n {
        for c in 0..n {
            f += phi[r].conj() * rho.0[(r, c)] * phi[c];
        }
    }
    f.re
}

/// Fidelity of the detector-conditioned output against the ideal truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub probability: f64,
}

/// Runs the device on `|n₁n₂n₃⟩|ψ⟩`, conditions on the outcomes each model
/// reports for the event's required counts, and compares with the ideally
/// truncated state.
pub fn truncation_fidelity(
    spec: &GqsdSpec,
    event: &MeasurementEvent,
    field: &InputField,
    models: &[DetectorModel; 3],
) -> Result<FidelityReport> {
    event.validate()?;
    let ideal = truncate(spec, event, field)?;
    let [n1, n2, n3] = event.inputs;
    let input = embed_input(field, 3, &[(0, n1), (1, n2), (2, n3)], 4)?;
    let output = evolve_gqsd(&input, spec)?;
    let outcomes = std::array::from_fn(|i| models[i].kind.outcome_for_count(event.counts[i]));
    let (rho, probability) = conditional_density_matrix(&output, models, &outcomes)?;
    Ok(FidelityReport {
        fidelity: fidelity(&rho, &ideal.qudit),
        probability,
    })
}
