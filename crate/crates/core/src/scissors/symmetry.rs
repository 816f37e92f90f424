//! Parameter maps that leave the quartit amplitudes `c₀…c₃` unchanged.

use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Result};
use crate::network::GqsdSpec;

const PHASE_TOL: f64 = 1e-9;
const ORBIT_TOL: f64 = 1e-12;

fn wrap(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if TAU - w < PHASE_TOL {
        0.0
    } else {
        w
    }
}

fn phases_equal(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d < PHASE_TOL || TAU - d < PHASE_TOL
}

/// Images of a `T₃ = 1` spec under the three amplitude-preserving maps:
///
/// - (a) `T → [T₅, T₄, 1, T₂, T₁]`, phases kept; only emitted when
///   `ξ₃ + ξ₄ ≡ ξ₂ + ξ₅ (mod 2π)`, the regime in which it holds;
/// - (b) `T₁ → 1 − T₁` with `ξ₂ → ξ₂ + π`;
/// - (c) `T₅ → 1 − T₅` with `ξ₅ → ξ₅ + π`.
pub fn symmetry_transforms(spec: &GqsdSpec) -> Result<Vec<GqsdSpec>> {
    spec.validate()?;
    if (spec.transmittance(3) - 1.0).abs() > 1e-12 {
        return Err(invalid("symmetry transforms require T3 = 1"));
    }
    let t = spec.transmittances;
    let mut out = Vec::with_capacity(3);
    if phases_equal(spec.xi(3) + spec.xi(4), spec.xi(2) + spec.xi(5)) {
        let mut a = *spec;
        a.transmittances = [t[4], t[3], 1.0, t[1], t[0]];
        out.push(a);
    }
    let mut b = *spec;
    b.transmittances[0] = 1.0 - t[0];
    out.push(b.with_xi(2, wrap(spec.xi(2) + PI)));

    let mut c = *spec;
    c.transmittances[4] = 1.0 - t[4];
    out.push(c.with_xi(5, wrap(spec.xi(5) + PI)));
    Ok(out)
}

fn same_point(a: &GqsdSpec, b: &GqsdSpec) -> bool {
    a.mirror_zeta == b.mirror_zeta
        && a.transmittances
            .iter()
            .zip(&b.transmittances)
            .all(|(x, y)| (x - y).abs() < ORBIT_TOL)
        && a.phases.iter().zip(&b.phases).all(|(&x, &y)| phases_equal(x, y))
}

/// Closure of `spec` under [`symmetry_transforms`], starting with `spec`.
pub fn symmetry_orbit(spec: &GqsdSpec) -> Result<Vec<GqsdSpec>> {
    let mut orbit = vec![*spec];
    let mut next = 0;
    while next < orbit.len() {
        let current = orbit[next];
        next += 1;
        for image in symmetry_transforms(&current)? {
            if !orbit.iter().any(|s| same_point(s, &image)) {
                orbit.push(image);
            }
        }
    }
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scissors::{conditional_amplitudes, truncation_defect, MeasurementEvent, TruncationTarget};
    use std::f64::consts::FRAC_PI_2;

    fn twelfth() -> GqsdSpec {
        GqsdSpec::with_transmittances([1.0 / 3.0, 0.25, 1.0, 1.0 / 3.0, 0.5])
            .unwrap()
            .with_xi(5, FRAC_PI_2)
    }

    #[test]
    fn twelfth_solution_under_c() {
        let images = symmetry_transforms(&twelfth()).unwrap();
        let c_image = images.last().unwrap();
        assert_eq!(c_image.transmittances, [1.0 / 3.0, 0.25, 1.0, 1.0 / 3.0, 0.5]);
        assert!((c_image.xi(5) - 1.5 * PI).abs() < 1e-15);
        let amps = conditional_amplitudes(c_image, &MeasurementEvent::quartit()).unwrap();
        assert!(truncation_defect(&amps, &TruncationTarget::full(4), false).unwrap() < 1e-14);
    }

    #[test]
    fn reflection_is_an_involution() {
        let spec = GqsdSpec::with_transmittances([0.2, 0.3, 1.0, 0.6, 0.7]).unwrap();
        let a = &symmetry_transforms(&spec).unwrap()[0];
        assert_eq!(a.transmittances, [0.7, 0.6, 1.0, 0.3, 0.2]);
        let back = &symmetry_transforms(a).unwrap()[0];
        assert_eq!(back.transmittances, spec.transmittances);
    }

    #[test]
    fn reflection_needs_phase_condition() {
        let spec = GqsdSpec::with_transmittances([0.2, 0.3, 1.0, 0.6, 0.7])
            .unwrap()
            .with_xi(4, 0.4);
        assert_eq!(symmetry_transforms(&spec).unwrap().len(), 2);
    }

    #[test]
    fn rejects_general_t3() {
        let spec = GqsdSpec::with_transmittances([0.2, 0.3, 0.5, 0.6, 0.7]).unwrap();
        assert!(symmetry_transforms(&spec).is_err());
    }

    #[test]
    fn orbit_of_generic_point_has_eight_members() {
        let spec = GqsdSpec::with_transmittances([0.2, 0.3, 1.0, 0.6, 0.7]).unwrap();
        let orbit = symmetry_orbit(&spec).unwrap();
        assert_eq!(orbit.len(), 8);
        let ev = MeasurementEvent::quartit();
        let base = conditional_amplitudes(&spec, &ev).unwrap();
        for s in &orbit {
            let c = conditional_amplitudes(s, &ev).unwrap();
            for (x, y) in c.c.iter().zip(&base.c) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }
}
