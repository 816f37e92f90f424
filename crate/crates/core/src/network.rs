//! Scattering matrices of beam splitters, phase shifters and mirrors, and of
//! the complete eight-port device.
//!
//! Convention: a photon created in input mode `i` leaves in output mode `j`
//! with amplitude `S[(j, i)]`. A beam splitter on modes `(i, j)`, `i < j`,
//! has the real block `[[t, r], [-r, t]]` on rows/columns `(i, j)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringMatrix(DMatrix<Complex64>);

impl ScatteringMatrix {
    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// Wraps a square matrix. Unitarity is not checked here; see
    /// [`verify_unitary`].
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(invalid("scattering matrix must be square"));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn then_after(&self, rhs: &Self) -> Self {
        Self(&self.0 * &rhs.0)
    }

    /// `max |S†S − I|` over all entries.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let g = self.0.adjoint() * &self.0;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { ONE } else { Complex64::default() };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn max_difference(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn verify_unitary(s: &ScatteringMatrix, tol: f64) -> bool {
    s.unitarity_residual() < tol
}

/// A single linear-optical element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementSpec {
    /// Real beam splitter between `modes.0 < modes.1` with transmittance `T = t²`.
    BeamSplitter { modes: (usize, usize), transmittance: f64 },
    /// Multiplies creation operators of `mode` by `e^{iφ}`.
    PhaseShifter { mode: usize, phase: f64 },
    /// Mirror reflection phase; acts like a phase shifter.
    Mirror { mode: usize, phase: f64 },
}

impl ElementSpec {
    pub fn beam_splitter(i: usize, j: usize, transmittance: f64) -> Self {
        Self::BeamSplitter {
            modes: (i, j),
            transmittance,
        }
    }

    pub fn phase_shifter(mode: usize, phase: f64) -> Self {
        Self::PhaseShifter { mode, phase }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            Self::BeamSplitter {
                modes: (i, j),
                transmittance,
            } => {
                if !(0.0..=1.0).contains(&transmittance) {
                    return Err(invalid(format!("transmittance {transmittance} outside [0, 1]")));
                }
                if i >= j || j >= dim {
                    return Err(invalid(format!(
                        "beam splitter modes ({i}, {j}) invalid for {dim} modes"
                    )));
                }
            }
            Self::PhaseShifter { mode, phase } | Self::Mirror { mode, phase } => {
                if mode >= dim {
                    return Err(invalid(format!("mode {mode} out of range for {dim} modes")));
                }
                if !phase.is_finite() {
                    return Err(invalid("phase must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// `(t, r)` amplitudes of a beam splitter with transmittance `T`.
pub(crate) fn amplitudes(transmittance: f64) -> (f64, f64) {
    (transmittance.sqrt(), (1.0 - transmittance).sqrt())
}

pub fn element_matrix(e: &ElementSpec, dim: usize) -> Result<ScatteringMatrix> {
    e.validate(dim)?;
    let mut m = DMatrix::identity(dim, dim);
    match *e {
        ElementSpec::BeamSplitter {
            modes: (i, j),
            transmittance,
        } => {
            let (t, r) = amplitudes(transmittance);
            m[(i, i)] = Complex64::new(t, 0.0);
            m[(i, j)] = Complex64::new(r, 0.0);
            m[(j, i)] = Complex64::new(-r, 0.0);
            m[(j, j)] = Complex64::new(t, 0.0);
        }
        ElementSpec::PhaseShifter { mode, phase } | ElementSpec::Mirror { mode, phase } => {
            m[(mode, mode)] = Complex64::from_polar(1.0, phase);
        }
    }
    Ok(ScatteringMatrix(m))
}

/// Product of element matrices taken in operator order: `elements[0]` is the
/// leftmost factor and acts last.
pub fn network_matrix(elements: &[ElementSpec], dim: usize) -> Result<ScatteringMatrix> {
    let mut s = ScatteringMatrix::identity(dim);
    for e in elements {
        s = s.then_after(&element_matrix(e, dim)?);
    }
    Ok(s)
}

/// Parameters of the eight-port device: five beam-splitter transmittances
/// `T₁…T₅` and six phase shifts `ξ₁…ξ₆` (stored zero-based).
///
/// Beam splitters couple modes `B₁:(0,1) B₂:(0,2) B₃:(1,2) B₄:(1,3) B₅:(2,3)`.
/// Phase shifters `P₁ P₂ P₆` sit on mode 0, `P₃ P₄` on mode 1, `P₅` on mode 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GqsdSpec {
    pub transmittances: [f64; 5],
    pub phases: [f64; 6],
    /// Reflection phase of the large mirror (modes 0-3); zero by default.
    pub mirror_zeta: f64,
}

const BS_MODES: [(usize, usize); 5] = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)];
const PS_MODES: [usize; 6] = [0, 0, 1, 1, 2, 0];

impl Default for GqsdSpec {
    fn default() -> Self {
        Self {
            transmittances: [1.0; 5],
            phases: [0.0; 6],
            mirror_zeta: 0.0,
        }
    }
}

impl GqsdSpec {
    pub fn new(transmittances: [f64; 5], phases: [f64; 6]) -> Result<Self> {
        let spec = Self {
            transmittances,
            phases,
            mirror_zeta: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Transmittances with every phase zero.
    pub fn with_transmittances(transmittances: [f64; 5]) -> Result<Self> {
        Self::new(transmittances, [0.0; 6])
    }

    /// Returns a copy with `ξ_k` (one-based, as in the device labels) set.
    pub fn with_xi(mut self, k: usize, value: f64) -> Self {
        self.phases[k - 1] = value;
        self
    }

    pub fn xi(&self, k: usize) -> f64 {
        self.phases[k - 1]
    }

    pub fn transmittance(&self, k: usize) -> f64 {
        self.transmittances[k - 1]
    }

    pub fn validate(&self) -> Result<()> {
        for (k, t) in self.transmittances.iter().enumerate() {
            if !(0.0..=1.0).contains(t) {
                return Err(invalid(format!("T{} = {t} outside [0, 1]", k + 1)));
            }
        }
        if self.phases.iter().chain([&self.mirror_zeta]).any(|p| !p.is_finite()) {
            return Err(invalid("phases must be finite"));
        }
        Ok(())
    }

    /// Element sequence in operator order `P₆B₅P₅B₄P₄B₃P₃B₂P₂B₁P₁`; with a
    /// nonzero mirror phase, mirror elements join `P₁`, `P₃`, `P₅` and the
    /// mode-3 exit.
    pub fn elements(&self) -> Vec<ElementSpec> {
        let zeta = self.mirror_zeta;
        let mirror = |mode| ElementSpec::Mirror { mode, phase: zeta };
        let ps = |k: usize| ElementSpec::phase_shifter(PS_MODES[k], self.phases[k]);
        let bs = |k: usize| ElementSpec::beam_splitter(BS_MODES[k].0, BS_MODES[k].1, self.transmittances[k]);

        let mut out = Vec::with_capacity(15);
        if zeta != 0.0 {
            out.push(mirror(3));
        }
        out.push(ps(5));
        for k in (0..5).rev() {
            out.push(bs(k));
            out.push(ps(k));
            if zeta != 0.0 {
                match k {
                    0 => out.push(mirror(0)),
                    2 => out.push(mirror(1)),
                    4 => out.push(mirror(2)),
                    _ => {}
                }
            }
        }
        out
    }
}

pub fn gqsd_matrix(spec: &GqsdSpec) -> Result<ScatteringMatrix> {
    spec.validate()?;
    network_matrix(&spec.elements(), 4)
}

/// General lossless two-port beam splitter with internal phases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralBsSpec {
    pub transmittance: f64,
    pub theta_0: f64,
    pub theta_t: f64,
    pub theta_r: f64,
}

/// `e^{iθ₀'} · P₊ · B · P₋` factorization of a general beam splitter.
#[derive(Clone, Debug, PartialEq)]
pub struct BsDecomposition {
    pub global_phase: f64,
    pub p_plus: ScatteringMatrix,
    pub bs: ScatteringMatrix,
    pub p_minus: ScatteringMatrix,
}

impl BsDecomposition {
    pub fn reconstruct(&self) -> ScatteringMatrix {
        let m = self.p_plus.then_after(&self.bs).then_after(&self.p_minus);
        ScatteringMatrix(m.0 * Complex64::from_polar(1.0, self.global_phase))
    }
}

/// The 2×2 matrix `e^{iθ₀}[[t e^{iθt}, r e^{iθr}], [-r e^{-iθr}, t e^{-iθt}]]`.
pub fn general_bs_matrix(g: &GeneralBsSpec) -> Result<ScatteringMatrix> {
    if !(0.0..=1.0).contains(&g.transmittance) {
        return Err(invalid("transmittance outside [0, 1]"));
    }
    let (t, r) = amplitudes(g.transmittance);
    let e = |phi: f64| Complex64::from_polar(1.0, phi);
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            e(g.theta_t) * t,
            e(g.theta_r) * r,
            -e(-g.theta_r) * r,
            e(-g.theta_t) * t,
        ],
    ) * e(g.theta_0);
    Ok(ScatteringMatrix(m))
}

pub fn decompose_general_bs(g: &GeneralBsSpec) -> Result<BsDecomposition> {
    let diag = |phase: f64| {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 0)] = Complex64::from_polar(1.0, phase);
        ScatteringMatrix(m)
    };
    Ok(BsDecomposition {
        global_phase: g.theta_0 - g.theta_t,
        p_plus: diag(g.theta_t + g.theta_r),
        bs: element_matrix(&ElementSpec::beam_splitter(0, 1, g.transmittance), 2)?,
        p_minus: diag(g.theta_t - g.theta_r),
    })
}
