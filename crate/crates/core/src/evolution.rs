//! Evolution of Fock-basis states through linear-optical networks.
//!
//! Two independent routes are provided:
//!
//! - [`evolve_fock_oracle`] expands `Π_l S_{j_l x_l} a†_{j_l}` over every
//!   index tuple `(j₁…j_M)` of a Fock input. It costs `N^M` and exists to
//!   check the production path.
//! - [`evolve`] applies one element at a time: phase shifters rescale
//!   amplitudes, beam splitters expand `(t aᵢ† − r aⱼ†)^{nᵢ}(r aᵢ† + t aⱼ†)^{nⱼ}`
//!   binomially on the two affected modes.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{MultimodeState, OccupationVector};
use crate::network::{amplitudes, ElementSpec, GqsdSpec, ScatteringMatrix};

/// Largest photon number the oracle accepts by default.
pub const DEFAULT_ORACLE_LIMIT: u32 = 10;

const TABLE_LEN: usize = 171;

fn sqrt_factorials() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; TABLE_LEN];
        for n in 1..TABLE_LEN {
            t[n] = t[n - 1] * (n as f64).sqrt();
        }
        t
    })
}

pub(crate) fn sqrt_factorial(n: u32) -> f64 {
    sqrt_factorials()[n as usize]
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Output state for a Fock input via the multi-index expansion, refusing
/// inputs with more than [`DEFAULT_ORACLE_LIMIT`] photons.
pub fn evolve_fock_oracle(s: &ScatteringMatrix, input: &OccupationVector) -> Result<MultimodeState> {
    evolve_fock_oracle_with_limit(s, input, DEFAULT_ORACLE_LIMIT)
}

pub fn evolve_fock_oracle_with_limit(
    s: &ScatteringMatrix,
    input: &OccupationVector,
    limit: u32,
) -> Result<MultimodeState> {
    let n_modes = s.dim();
    assert_eq!(input.modes(), n_modes, "input length must match matrix dimension");
    let photons = input.total_photons();
    if photons > limit {
        return Err(Error::ResourceLimit { photons, limit });
    }
    // x_l: the input mode of the l-th creation operator.
    let labels: Vec<usize> = input
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(mode, &n)| std::iter::repeat_n(mode, n as usize))
        .collect();
    let m = labels.len();

    let mut sums: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
    let mut js = vec![0usize; m];
    loop {
        let mut amp = Complex64::new(1.0, 0.0);
        let mut occ = vec![0u32; n_modes];
        for (l, &j) in js.iter().enumerate() {
            amp *= s.entry(j, labels[l]);
            occ[j] += 1;
        }
        *sums.entry(occ).or_default() += amp;

        // Odometer over (j₁…j_M) ∈ {0…N-1}^M.
        let mut pos = 0;
        loop {
            if pos == m {
                break;
            }
            js[pos] += 1;
            if js[pos] < n_modes {
                break;
            }
            js[pos] = 0;
            pos += 1;
        }
        if pos == m {
            break;
        }
    }

    let input_norm: f64 = input.counts().iter().map(|&n| sqrt_factorial(n)).product();
    let terms = sums.into_iter().map(|(occ, amp)| {
        let out_norm: f64 = occ.iter().map(|&n| sqrt_factorial(n)).product();
        (OccupationVector::new(occ), amp * out_norm / input_norm)
    });
    let mut out = MultimodeState::from_terms(n_modes, terms)?;
    out.set_normalized(true);
    Ok(out)
}

/// Oracle route extended by linearity to superpositions.
pub fn evolve_oracle(s: &ScatteringMatrix, state: &MultimodeState) -> Result<MultimodeState> {
    let mut out = MultimodeState::empty(state.modes());
    for (key, amp) in state.iter() {
        for (k, a) in evolve_fock_oracle(s, key)?.iter() {
            out.accumulate(k.clone(), amp * a);
        }
    }
    out.prune();
    out.set_normalized(state.is_normalized());
    Ok(out)
}

/// Applies a single element to a state.
pub fn apply_element(state: &MultimodeState, e: &ElementSpec) -> Result<MultimodeState> {
    e.validate(state.modes())?;
    match *e {
        ElementSpec::PhaseShifter { mode, phase } | ElementSpec::Mirror { mode, phase } => {
            let mut out = state.clone();
            if phase != 0.0 {
                out.map_amplitudes(|key, a| a * Complex64::from_polar(1.0, phase * f64::from(key.get(mode))));
            }
            Ok(out)
        }
        ElementSpec::BeamSplitter {
            modes: (i, j),
            transmittance,
        } => {
            if transmittance == 1.0 {
                return Ok(state.clone());
            }
            Ok(apply_beam_splitter(state, i, j, transmittance))
        }
    }
}

fn apply_beam_splitter(state: &MultimodeState, i: usize, j: usize, transmittance: f64) -> MultimodeState {
    let (t, r) = amplitudes(transmittance);
    let mut out = MultimodeState::empty(state.modes());
    let mut block: Vec<f64> = Vec::new();
    for (key, &amp) in state.iter() {
        let (ni, nj) = (key.get(i), key.get(j));
        let total = ni + nj;
        // block[m]: real coefficient of a_i†^m a_j†^{total-m}.
        block.clear();
        block.resize(total as usize + 1, 0.0);
        for p in 0..=ni {
            let ca = binomial(ni, p) * t.powi(p as i32) * (-r).powi((ni - p) as i32);
            if ca == 0.0 {
                continue;
            }
            for q in 0..=nj {
                let cb = binomial(nj, q) * r.powi(q as i32) * t.powi((nj - q) as i32);
                block[(p + q) as usize] += ca * cb;
            }
        }
        let pref = amp / (sqrt_factorial(ni) * sqrt_factorial(nj));
        for (mi, &coef) in block.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            let mi = mi as u32;
            let mj = total - mi;
            let mut k = key.clone();
            k.counts_mut()[i] = mi;
            k.counts_mut()[j] = mj;
            out.accumulate(k, pref * coef * sqrt_factorial(mi) * sqrt_factorial(mj));
        }
    }
    out.prune();
    out.set_normalized(state.is_normalized());
    out
}

/// Evolves through `elements` given in operator order (leftmost factor
/// first); they are applied right to left.
pub fn evolve(state: &MultimodeState, elements: &[ElementSpec]) -> Result<MultimodeState> {
    for e in elements {
        e.validate(state.modes())?;
    }
    let mut current = state.clone();
    for e in elements.iter().rev() {
        current = apply_element(&current, e)?;
    }
    Ok(current)
}

/// Evolves a four-mode state through the device.
pub fn evolve_gqsd(state: &MultimodeState, spec: &GqsdSpec) -> Result<MultimodeState> {
    spec.validate()?;
    evolve(state, &spec.elements())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fock_product_state;
    use crate::network::{element_matrix, gqsd_matrix};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn occ(v: &[u32]) -> OccupationVector {
        OccupationVector::from(v)
    }

    fn half_bs() -> ScatteringMatrix {
        element_matrix(&ElementSpec::beam_splitter(0, 1, 0.5), 2).unwrap()
    }

    #[test]
    fn oracle_identity() {
        let out = evolve_fock_oracle(&ScatteringMatrix::identity(4), &occ(&[1, 1, 1, 0])).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.amplitude_of(&[1, 1, 1, 0]) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn oracle_single_photon_on_balanced_splitter() {
        let out = evolve_fock_oracle(&half_bs(), &occ(&[1, 0])).unwrap();
        assert!((out.amplitude_of(&[1, 0]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((out.amplitude_of(&[0, 1]) - c(-FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn oracle_hong_ou_mandel() {
        let out = evolve_fock_oracle(&half_bs(), &occ(&[1, 1])).unwrap();
        assert!((out.amplitude_of(&[2, 0]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((out.amplitude_of(&[0, 2]) - c(-FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(out.amplitude_of(&[1, 1]).norm() < 1e-15);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn oracle_enforces_limit() {
        let err = evolve_fock_oracle_with_limit(&ScatteringMatrix::identity(2), &occ(&[3, 2]), 4);
        assert_eq!(err, Err(Error::ResourceLimit { photons: 5, limit: 4 }));
    }

    #[test]
    fn element_examples() {
        let s = MultimodeState::from_terms(2, [(occ(&[3, 1]), c(0.5))]).unwrap();
        let out = apply_element(&s, &ElementSpec::phase_shifter(0, 0.3)).unwrap();
        assert!((out.amplitude_of(&[3, 1]) - Complex64::from_polar(0.5, 0.9)).norm() < 1e-15);

        let unchanged = apply_element(&s, &ElementSpec::beam_splitter(0, 1, 1.0)).unwrap();
        assert_eq!(unchanged, s);

        let hom = apply_element(&fock_product_state(&[1, 1]), &ElementSpec::beam_splitter(0, 1, 0.5)).unwrap();
        let oracle = evolve_fock_oracle(&half_bs(), &occ(&[1, 1])).unwrap();
        assert!(hom.max_difference(&oracle) < 1e-15);
    }

    #[test]
    fn empty_network_is_identity() {
        let s = fock_product_state(&[2, 0, 1]);
        assert_eq!(evolve(&s, &[]).unwrap(), s);
    }

    #[test]
    fn quartit_solution_amplitude() {
        let spec = GqsdSpec::with_transmittances([1.0 / 3.0, 0.25, 1.0, 1.0 / 3.0, 0.5])
            .unwrap()
            .with_xi(5, FRAC_PI_2);
        let out = evolve_gqsd(&fock_product_state(&[1, 1, 1, 3]), &spec).unwrap();
        assert!((out.amplitude_of(&[3, 1, 1, 1]) - c(1.0 / 12.0)).norm() < 1e-14);
        let oracle = evolve_fock_oracle(&gqsd_matrix(&spec).unwrap(), &occ(&[1, 1, 1, 3])).unwrap();
        assert!(out.max_difference(&oracle) < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert!((sqrt_factorial(4) - 24f64.sqrt()).abs() < 1e-15);
    }
}
