//! Seeded verification campaigns. Trials draw from one ChaCha stream in
//! order, so a `RunConfig` and pair fully determine the report.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use cm_bethe::sampling::{random_cauchy_pair, random_point_off_spectrum, random_section, rng_from_seed};
use cm_bethe::{
    adjugate_witness, check_factorization, check_hirota_ratio, check_lemma1, check_rnba, tau_roots, validate_pair,
    CMPair, Complex64, Error, Identity, LatticeSection, ResidualReport, SectionEvaluator, Sign, Status, Tolerances,
};
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Lemma1,
    Factorization,
    Hirota,
    Rnba,
    All,
}

impl CheckKind {
    fn includes(self, other: CheckKind) -> bool {
        self == CheckKind::All || self == other
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub check: CheckKind,
    pub seed: u64,
    pub trials: usize,
    pub m: Option<Complex64>,
    pub eta: Option<Complex64>,
    pub lambda1: Option<Complex64>,
    pub lambda2: Option<Complex64>,
    pub tol: Tolerances,
}

pub enum PairSource {
    Fixed(CMPair),
    Random(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub n: usize,
    pub section: Option<LatticeSection>,
    pub m: Complex64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(flatten)]
    pub report: ResidualReport,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub degenerate: usize,
    pub fail: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignResult {
    pub config: RunConfig,
    pub reports: Vec<TrialReport>,
    pub summary: Summary,
}

impl CampaignResult {
    fn new(config: &RunConfig, reports: Vec<TrialReport>) -> Self {
        let mut summary = Summary::default();
        for r in &reports {
            match r.report.status {
                Status::Pass => summary.pass += 1,
                Status::Degenerate => summary.degenerate += 1,
                Status::Fail => summary.fail += 1,
            }
        }
        Self {
            config: config.clone(),
            reports,
            summary,
        }
    }
}

/// A numerical error inside one check becomes a failing report rather than
/// aborting the campaign.
fn failed(identity: Identity, err: &Error) -> ResidualReport {
    let zero = Complex64::new(0.0, 0.0);
    ResidualReport {
        identity,
        lhs: zero,
        rhs: zero,
        abs_residual: f64::NAN,
        rel_residual: f64::NAN,
        status: Status::Fail,
        detail: Some(err.to_string()),
    }
}

fn or_failed(identity: Identity, r: cm_bethe::Result<ResidualReport>) -> ResidualReport {
    r.unwrap_or_else(|e| failed(identity, &e))
}

struct Trial<'a> {
    index: usize,
    pair: &'a CMPair,
    section: LatticeSection,
    m: Complex64,
    out: &'a mut Vec<TrialReport>,
}

impl Trial<'_> {
    fn push(&mut self, root: Option<Complex64>, j: Option<usize>, report: ResidualReport) {
        self.out.push(TrialReport {
            trial: self.index,
            n: self.pair.n(),
            section: Some(self.section),
            m: self.m,
            root,
            j,
            report,
        });
    }
}

pub fn run(source: &PairSource, config: &RunConfig) -> Result<CampaignResult> {
    let tol = &config.tol;
    let mut rng = rng_from_seed(config.seed);
    let mut reports = Vec::new();
    for index in 0..config.trials {
        let drawn;
        let pair = match source {
            PairSource::Fixed(p) => p,
            PairSource::Random(n) => {
                drawn = random_cauchy_pair(&mut rng, *n, tol)?;
                &drawn
            }
        };
        let generic = random_section(&mut rng, pair)?;
        let section = LatticeSection::new(
            config.eta.unwrap_or(generic.eta),
            config.lambda1.unwrap_or(generic.lambda1),
            config.lambda2.unwrap_or(generic.lambda2),
        )?;
        section
            .validate_for(pair, tol)
            .with_context(|| format!("trial {index}: invalid section"))?;
        let m = config
            .m
            .unwrap_or_else(|| Complex64::new(rng.random_range(-3..=3) as f64, 0.0));
        let mut trial = Trial {
            index,
            pair,
            section,
            m,
            out: &mut reports,
        };
        if config.check.includes(CheckKind::Lemma1) {
            lemma1(&mut trial, &mut rng, tol)?;
        }
        let roots = if config.check == CheckKind::Lemma1 {
            Vec::new()
        } else {
            tau_roots(pair, &section, m, tol)?
        };
        for &root in &roots {
            if config.check.includes(CheckKind::Factorization) {
                for (sign, id) in [(Sign::Plus, Identity::FactorizationPlus), (Sign::Minus, Identity::FactorizationMinus)] {
                    let r = or_failed(id, check_factorization(pair, &section, m, root, sign, tol));
                    trial.push(Some(root), None, r);
                }
            }
            if config.check.includes(CheckKind::Hirota) {
                let r = or_failed(Identity::HirotaRatio, check_hirota_ratio(pair, &section, m, root, tol));
                trial.push(Some(root), None, r);
            }
        }
        if config.check.includes(CheckKind::Rnba) {
            let one = Complex64::new(1.0, 0.0);
            let prev = tau_roots(pair, &section, m - one, tol)?;
            let next = tau_roots(pair, &section, m + one, tol)?;
            for j in 0..roots.len() {
                let r = or_failed(Identity::Rnba, check_rnba(&prev, &roots, &next, section.eta, j, tol));
                trial.push(Some(roots[j]), Some(j), r);
            }
        }
    }
    Ok(CampaignResult::new(config, reports))
}

/// The adjugate identities need `det X = 0`. A nonsingular `X` is replaced by
/// `X' = X + (x / eta)(lambda1 - Z)^{-1} + m (lambda2 - Z)^{-1}` at a root `x`
/// of `tau^m`, which is singular and keeps `Z` (the commuting-flow image).
fn lemma1<R: Rng + ?Sized>(trial: &mut Trial<'_>, rng: &mut R, tol: &Tolerances) -> Result<()> {
    let pair = trial.pair;
    let shifted;
    let (target, root) = match adjugate_witness(pair.x(), tol) {
        Err(Error::NotSingular { .. }) => {
            let root = tau_roots(pair, &trial.section, trial.m, tol)?[0];
            let x_prime = SectionEvaluator::new(pair, trial.section, tol)?.matrix(trial.m, root)?;
            shifted = validate_pair(&x_prime, pair.z(), tol.rank_one)?;
            (&shifted, Some(root))
        }
        _ => (pair, None),
    };
    let spectrum = target.z().eigenvalues()?;
    let a = random_point_off_spectrum(rng, &spectrum, 0.1);
    let b = random_point_off_spectrum(rng, &spectrum, 0.1);
    match check_lemma1(target, a, b, tol) {
        Ok(reports) => {
            for r in reports {
                trial.push(root, None, r);
            }
        }
        Err(e) => {
            for id in [Identity::Lemma1Part1, Identity::Lemma1Part2, Identity::Lemma1Part3] {
                trial.push(root, None, failed(id, &e));
            }
        }
    }
    Ok(())
}

#[derive(Debug, serde::Deserialize)]
struct CsvRow {
    m: i64,
    j: usize,
    re: f64,
    im: f64,
}

/// Checks every interior level of a trajectory CSV (`m,j,re,im`).
pub fn audit_csv(text: &str, eta: Complex64, config: &RunConfig) -> Result<CampaignResult> {
    let mut levels: BTreeMap<i64, BTreeMap<usize, Complex64>> = BTreeMap::new();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    for (line, row) in reader.deserialize::<CsvRow>().enumerate() {
        let row = row.with_context(|| format!("roots CSV record {}", line + 1))?;
        if levels.entry(row.m).or_default().insert(row.j, Complex64::new(row.re, row.im)).is_some() {
            bail!("duplicate entry m = {}, j = {}", row.m, row.j);
        }
    }
    let levels: BTreeMap<i64, Vec<Complex64>> = levels
        .into_iter()
        .map(|(m, row)| (m, row.into_values().collect()))
        .collect();
    let n = levels.values().next().map_or(0, Vec::len);
    if levels.values().any(|l| l.len() != n) {
        bail!("every level must hold the same number of roots");
    }
    let mut reports = Vec::new();
    for (&m, cur) in &levels {
        let (Some(prev), Some(next)) = (levels.get(&(m - 1)), levels.get(&(m + 1))) else {
            continue;
        };
        for j in 0..n {
            let report = check_rnba(prev, cur, next, eta, j, &config.tol)?;
            reports.push(TrialReport {
                trial: reports.len(),
                n,
                section: None,
                m: Complex64::new(m as f64, 0.0),
                root: Some(cur[j]),
                j: Some(j),
                report,
            });
        }
    }
    Ok(CampaignResult::new(config, reports))
}
