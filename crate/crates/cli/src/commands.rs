//! One function per subcommand; each turns a config into a report.

use gqsd::detectors::truncation_fidelity;
use gqsd::network::gqsd_matrix;
use gqsd::scissors::{conditional_amplitudes, truncate, truncation_defect};
use gqsd::search::{catalog, optimize, verify_entries, CatalogEntry, EntryCheck, Exactness};
use gqsd::Error;

use crate::config::{ConfigError, RunConfig};
use crate::output::{Cell, Report};

/// Amplitudes below this count as zero when classifying a truncation.
const ZERO_AMPLITUDE: f64 = 1e-12;
/// Defect below which a truncation counts as exact.
const EXACT_DEFECT: f64 = 1e-10;

pub type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Report,
    /// False when a verification failed.
    pub passed: bool,
}

fn ok(report: Report) -> Outcome {
    Outcome { report, passed: true }
}

pub fn matrix(cfg: &RunConfig) -> Result<Outcome> {
    let s = gqsd_matrix(&cfg.spec()?)?;
    let mut report = Report::new("scattering matrix", vec!["row", "col", "re", "im"]);
    report.scalar("unitarity_residual", s.unitarity_residual());
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            let z = s.entry(i, j);
            report.row(vec![i.into(), j.into(), z.re.into(), z.im.into()]);
        }
    }
    Ok(ok(report))
}

pub fn truncate_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let event = cfg.event()?;
    let target = cfg.target(&event)?;
    let c = conditional_amplitudes(&spec, &event)?;
    let raw = truncation_defect(&c, &target, false)?;
    let quotient = truncation_defect(&c, &target, true)?;
    let defect = if cfg.quotient_phase.unwrap_or(false) {
        quotient
    } else {
        raw
    };

    let nonzero: Vec<usize> = (0..c.d()).filter(|&n| c.c[n].norm() > ZERO_AMPLITUDE).collect();
    let status = match nonzero.as_slice() {
        [] => "no amplitude".to_string(),
        [k] => format!("Fock synthesis |{k}>"),
        _ if defect < EXACT_DEFECT && target.keep().len() == target.d() => "perfect truncation".into(),
        _ if defect < EXACT_DEFECT => {
            let keep: Vec<String> = target.keep().iter().map(|k| k.to_string()).collect();
            format!("selective truncation keeping {{{}}}", keep.join(", "))
        }
        _ => "imperfect truncation".into(),
    };

    let mut report = Report::new(
        "conditional amplitudes",
        vec!["n", "c_re", "c_im", "c_abs", "qudit_re", "qudit_im"],
    );
    report.scalar("dimension", c.d());
    report.scalar("defect", raw);
    report.scalar("defect_phase_quotient", quotient);
    report.scalar("status", status);

    let mut qudit = None;
    if let Some(field) = cfg.field()? {
        match truncate(&spec, &event, &field) {
            Ok(t) => {
                report.scalar("probability", t.probability);
                report.scalar("outcome", "ok");
                qudit = Some(t.qudit);
            }
            Err(Error::ZeroProbability(p)) => {
                report.scalar("probability", p);
                report.scalar("outcome", "zero-probability outcome");
            }
            Err(e) => return Err(e.into()),
        }
    }
    for (n, z) in c.c.iter().enumerate() {
        let (q_re, q_im) = match &qudit {
            Some(q) => (Cell::Num(q.coeffs()[n].re), Cell::Num(q.coeffs()[n].im)),
            None => (Cell::Empty, Cell::Empty),
        };
        report.row(vec![n.into(), z.re.into(), z.im.into(), z.norm().into(), q_re, q_im]);
    }
    Ok(ok(report))
}

/// The catalog, plus an entry built from the config when it names a device.
pub fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let mut entries = catalog();
    if cfg.transmittances.is_some() {
        let event = cfg.event()?;
        let mut entry = CatalogEntry {
            name: "config",
            spec: cfg.spec()?,
            event,
            target: cfg.target(&event)?,
            exactness: Exactness::Exact,
            checks: Vec::new(),
        };
        if let Some(value) = cfg.expect_amplitude {
            entry.checks.push(EntryCheck::Amplitude {
                value,
                tol: EXACT_DEFECT,
            });
        }
        entries.push(entry);
    }
    let results = verify_entries(&entries);
    let mut report = Report::new(
        "catalog verification",
        vec![
            "name",
            "passed",
            "defect",
            "amplitude",
            "refined_defect",
            "drift",
            "failures",
        ],
    );
    let failed = results.results.iter().filter(|r| !r.passed).count();
    report.scalar("entries", results.results.len());
    report.scalar("failed", failed);
    for r in &results.results {
        report.row(vec![
            r.name.into(),
            r.passed.into(),
            r.defect.into(),
            r.amplitude.into(),
            r.refined_defect.into(),
            r.drift.into(),
            r.failures.join("; ").into(),
        ]);
    }
    Ok(Outcome {
        report,
        passed: failed == 0,
    })
}

pub fn optimize_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let event = cfg.event()?;
    let target = cfg.target(&event)?;
    let search = cfg.search()?;
    let records = optimize(&event, &target, &search)?;
    let mut report = Report::new(
        "search results",
        vec![
            "rank",
            "T1",
            "T2",
            "T3",
            "T4",
            "T5",
            "xi1",
            "xi2",
            "xi3",
            "xi4",
            "xi5",
            "xi6",
            "defect",
            "amplitude",
        ],
    );
    report.scalar("restarts", search.restarts);
    report.scalar("seed", Cell::Int(search.random_seed as i64));
    report.scalar("records", records.len());
    for (rank, r) in records.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(rank + 1).into()];
        row.extend(r.spec.transmittances.iter().map(|&t| Cell::Num(t)));
        row.extend(r.spec.phases.iter().map(|&p| Cell::Num(p)));
        row.push(r.defect.into());
        row.push(r.amplitude.into());
        report.row(row);
    }
    Ok(ok(report))
}

pub fn fidelity_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let event = cfg.event()?;
    let field = cfg.field()?.ok_or(ConfigError::Missing("field"))?;
    let mut report = Report::new(
        "detector fidelities",
        vec!["kind", "eta", "nu", "fidelity", "probability"],
    );
    for kind in cfg.detector_kinds() {
        let model = cfg.detector(kind)?;
        let r = truncation_fidelity(&spec, &event, &field, &[model; 3])?;
        report.row(vec![
            kind.tag().to_string().into(),
            model.eta.into(),
            model.nu.into(),
            r.fidelity.into(),
            r.probability.into(),
        ]);
    }
    Ok(ok(report))
}
