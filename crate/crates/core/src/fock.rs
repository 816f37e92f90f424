//! Fock-basis states: occupation labels, sparse multimode states, single-mode
//! input fields and the truncated qudit states they turn into.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::PRUNE_THRESHOLD;

/// Photon counts per optical mode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: impl Into<Vec<u32>>) -> Self {
        Self(counts.into())
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Total photon number across all modes.
    pub fn total_photons(&self) -> u32 {
        self.0.iter().sum()
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }
}

impl From<&[u32]> for OccupationVector {
    fn from(counts: &[u32]) -> Self {
        Self(counts.to_vec())
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// Sparse superposition of multimode Fock states.
///
/// Keys are kept in lexicographic order so that every traversal, and hence
/// every floating-point accumulation built on one, is reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct MultimodeState {
    modes: usize,
    amplitudes: BTreeMap<OccupationVector, Complex64>,
    normalized: bool,
}

impl MultimodeState {
    /// The zero vector on `modes` modes.
    pub fn empty(modes: usize) -> Self {
        Self {
            modes,
            amplitudes: BTreeMap::new(),
            normalized: false,
        }
    }

    /// Builds a state from explicit terms; repeated keys are summed.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex64)>,
    {
        let mut state = Self::empty(modes);
        for (key, amp) in terms {
            if key.modes() != modes {
                return Err(invalid(format!(
                    "occupation {key} has {} modes, expected {modes}",
                    key.modes()
                )));
            }
            state.accumulate(key, amp);
        }
        state.prune();
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, key: &OccupationVector) -> Complex64 {
        self.amplitudes.get(key).copied().unwrap_or_default()
    }

    pub fn amplitude_of(&self, counts: &[u32]) -> Complex64 {
        self.amplitude(&OccupationVector::from(counts))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm.
    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if norm < PRUNE_THRESHOLD {
            return Err(Error::ZeroProbability(norm * norm));
        }
        for a in self.amplitudes.values_mut() {
            *a /= norm;
        }
        self.normalized = true;
        Ok(())
    }

    /// Linear combination `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.modes != other.modes {
            return Err(invalid("cannot combine states with different mode counts"));
        }
        let mut out = Self::empty(self.modes);
        for (k, v) in &self.amplitudes {
            out.accumulate(k.clone(), a * v);
        }
        for (k, v) in &other.amplitudes {
            out.accumulate(k.clone(), b * v);
        }
        out.prune();
        Ok(out)
    }

    /// Largest entrywise amplitude difference over the union of supports.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v) in &self.amplitudes {
            worst = worst.max((v - other.amplitude(k)).norm());
        }
        for (k, v) in &other.amplitudes {
            if !self.amplitudes.contains_key(k) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// Amplitudes along `mode` with every other mode pinned to `fixed`
    /// (listed in mode order, skipping `mode`). Index `n` of the result is the
    /// amplitude with `n` photons in `mode`.
    pub fn slice(&self, mode: usize, fixed: &[u32]) -> Vec<Complex64> {
        assert!(mode < self.modes && fixed.len() + 1 == self.modes);
        let mut out = Vec::new();
        for (key, amp) in &self.amplitudes {
            let matches = key
                .counts()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != mode)
                .map(|(_, n)| *n)
                .eq(fixed.iter().copied());
            if matches {
                let n = key.get(mode) as usize;
                if out.len() <= n {
                    out.resize(n + 1, Complex64::default());
                }
                out[n] = *amp;
            }
        }
        out
    }

    pub(crate) fn accumulate(&mut self, key: OccupationVector, amp: Complex64) {
        *self.amplitudes.entry(key).or_default() += amp;
    }

    pub(crate) fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }

    pub(crate) fn set_normalized(&mut self, flag: bool) {
        self.normalized = flag;
    }

    pub(crate) fn map_amplitudes(&mut self, mut f: impl FnMut(&OccupationVector, Complex64) -> Complex64) {
        for (k, a) in self.amplitudes.iter_mut() {
            *a = f(k, *a);
        }
    }
}

/// Single-mode pure input field entering the device.
#[derive(Clone, Debug, PartialEq)]
pub enum InputField {
    /// Finite Fock expansion `γ₀…γ_nmax`, normalized.
    FockExpansion(Vec<Complex64>),
    /// Coherent state, expanded on demand with the given Poisson tail bound.
    Coherent { alpha: Complex64, tail_epsilon: f64 },
}

/// Default neglected Poisson tail mass for coherent-state cutoffs.
pub const DEFAULT_TAIL_EPSILON: f64 = 1e-12;

impl InputField {
    /// Normalizes the given coefficients.
    pub fn fock_expansion(gammas: Vec<Complex64>) -> Result<Self> {
        if gammas.is_empty() || gammas.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
            return Err(invalid("Fock expansion must be non-empty and finite"));
        }
        let norm = gammas.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("Fock expansion has zero norm"));
        }
        Ok(Self::FockExpansion(gammas.into_iter().map(|g| g / norm).collect()))
    }

    pub fn vacuum() -> Self {
        Self::FockExpansion(vec![Complex64::new(1.0, 0.0)])
    }

    pub fn coherent(alpha: Complex64) -> Self {
        Self::Coherent {
            alpha,
            tail_epsilon: DEFAULT_TAIL_EPSILON,
        }
    }

    /// Resolved Fock coefficients.
    pub fn gammas(&self) -> Result<Vec<Complex64>> {
        match self {
            Self::FockExpansion(g) => Ok(g.clone()),
            Self::Coherent { alpha, tail_epsilon } => match coherent_expansion(*alpha, *tail_epsilon)? {
                Self::FockExpansion(g) => Ok(g),
                Self::Coherent { .. } => unreachable!(),
            },
        }
    }
}

/// Poisson terms `p_n = e^{-μ} μⁿ/n!` for `n = 0..len`.
fn poisson_terms(mean: f64, len: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(len);
    let mut term = (-mean).exp();
    for n in 0..len {
        if n > 0 {
            term *= mean / n as f64;
        }
        p.push(term);
    }
    p
}

/// Truncated Fock expansion of the coherent state `|α⟩`.
///
/// The cutoff `n_max` is the smallest index whose neglected Poisson tail
/// `Σ_{n>n_max} p_n` is below `tail_epsilon`; the kept coefficients are then
/// renormalized.
pub fn coherent_expansion(alpha: Complex64, tail_epsilon: f64) -> Result<InputField> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(invalid("coherent amplitude must be finite"));
    }
    if !(tail_epsilon > 0.0 && tail_epsilon < 1.0) {
        return Err(invalid("tail_epsilon must lie in (0, 1)"));
    }
    let mean = alpha.norm_sqr();
    // Sum the tail from well past the mode of the distribution downwards.
    let horizon = (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize;
    let p = poisson_terms(mean, horizon);
    let mut tail = vec![0.0; horizon + 1];
    for n in (0..horizon).rev() {
        tail[n] = tail[n + 1] + p[n];
    }
    // tail[n + 1] is the mass beyond n.
    let n_max = (0..horizon)
        .find(|&n| tail[n + 1] < tail_epsilon)
        .ok_or_else(|| invalid("coherent amplitude too large for cutoff search"))?;

    let mut gammas = Vec::with_capacity(n_max + 1);
    let mut coeff = Complex64::new((-mean / 2.0).exp(), 0.0);
    for n in 0..=n_max {
        if n > 0 {
            coeff *= alpha / (n as f64).sqrt();
        }
        gammas.push(coeff);
    }
    InputField::fock_expansion(gammas)
}

/// Normalized `d`-level state obtained from a truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditState {
    coeffs: Vec<Complex64>,
}

impl QuditState {
    pub fn from_unnormalized(coeffs: Vec<Complex64>) -> Result<Self> {
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr.sqrt() < 1e-14 {
            return Err(Error::ZeroProbability(norm_sqr));
        }
        let norm = norm_sqr.sqrt();
        Ok(Self {
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
}

/// `|n₁,…,n_N⟩` with unit amplitude.
pub fn fock_product_state(counts: &[u32]) -> MultimodeState {
    let mut state = MultimodeState::empty(counts.len());
    state.accumulate(OccupationVector::from(counts), Complex64::new(1.0, 0.0));
    state.set_normalized(true);
    state
}

/// Tensor product of Fock states on `fock_inputs` (mode, count) with the
/// expansion of `field` on `field_mode`. Unlisted modes hold vacuum.
pub fn embed_input(
    field: &InputField,
    field_mode: usize,
    fock_inputs: &[(usize, u32)],
    modes: usize,
) -> Result<MultimodeState> {
    if field_mode >= modes {
        return Err(invalid(format!(
            "field mode {field_mode} out of range for {modes} modes"
        )));
    }
    let mut base = vec![0u32; modes];
    let mut taken = vec![false; modes];
    taken[field_mode] = true;
    for &(mode, count) in fock_inputs {
        if mode >= modes {
            return Err(invalid(format!("Fock mode {mode} out of range for {modes} modes")));
        }
        if taken[mode] {
            return Err(invalid(format!("mode {mode} assigned twice")));
        }
        taken[mode] = true;
        base[mode] = count;
    }
    let gammas = field.gammas()?;
    let mut state = MultimodeState::empty(modes);
    for (n, g) in gammas.into_iter().enumerate() {
        let mut key = base.clone();
        key[field_mode] = n as u32;
        state.accumulate(OccupationVector::new(key), g);
    }
    state.prune();
    state.normalize()?;
    Ok(state)
}
