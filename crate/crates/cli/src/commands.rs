use std::f64::consts::TAU;

use popuc::catalog::{self, Example};
use popuc::cauchy::{bernstein_szego_gdj, measure_gdj, GdjTriple, Region};
use popuc::electro::{
    equilibrium_report, generators_from_points, lame_normal_form, measure_equilibrium, plot_rows,
    ChargeConfiguration, EquilibriumReport, GeneratorDiagnostics, LameForm,
};
use popuc::ode::{
    derivative_identity_check, first_order_system, h_fn, second_order_ode, verify_ode, OdeCoefficients,
    ResidualReport, SystemCoefficients,
};
use popuc::opuc::{bernstein_szego_lift, popuc, validate_points, MeasureSpec, NamedMeasure, OpucSequence};
use popuc::poly::sort_roots;
use popuc::sampling::{region_samples, stratified_circle_points};
use popuc::{Complex64, RationalFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{read_points, ExampleName, Format, MeasureArgs, PointsArgs, DEFAULT_BETA};
use crate::error::CliError;

/// Rendered results of one subcommand.
pub struct Outcome {
    pub json: String,
    pub csv: Option<Vec<u8>>,
    /// Format used when `--format` is absent.
    pub default_format: Format,
    /// Whether every asserted check passed.
    pub pass: bool,
}

impl Outcome {
    fn json<T: Serialize>(body: &T, pass: bool) -> Result<Self, CliError> {
        Ok(Outcome { json: pretty(body)?, csv: None, default_format: Format::Json, pass })
    }
}

fn pretty<T: Serialize>(body: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(body)?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
}

/// Jitter bound for randomly drawn point sets; see
/// [`stratified_circle_points`].
const RANDOM_JITTER: f64 = 0.3;

/// Per-sample tolerance for comparing with closed forms.
const CLOSED_FORM_TOL: f64 = 1e-9;

/// Tolerance for the Lame form, whose locations come from root finding.
const LAME_TOL: f64 = 1e-8;

const CHECK_SAMPLES: usize = 16;

/// The data a measure-based subcommand starts from.
struct Setup {
    measure: MeasureSpec,
    seq: OpucSequence,
    n: usize,
    beta: Complex64,
    region: Region,
}

impl Setup {
    fn new(a: &MeasureArgs) -> Result<Self, CliError> {
        let measure = a.measure()?;
        let n = a.require_n()?;
        let seq = measure.opuc_sequence(n)?;
        Ok(Setup { measure, seq, n, beta: a.beta(), region: a.region() })
    }

    fn gdj(&self) -> Result<GdjTriple, CliError> {
        Ok(measure_gdj(&self.measure, &self.seq, self.n, self.region)?)
    }
}

#[derive(Serialize)]
struct Xy {
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct ZerosOut<'a> {
    measure: &'a MeasureSpec,
    n: usize,
    beta: Complex64,
    zeros: Vec<Complex64>,
    max_modulus_deviation: f64,
}

pub fn zeros(a: &MeasureArgs) -> Result<Outcome, CliError> {
    let s = Setup::new(a)?;
    let mut zeros = popuc(&s.seq, s.n, s.beta)?.roots()?;
    sort_roots(&mut zeros);
    let max_modulus_deviation = zeros.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let rows: Vec<Xy> = zeros.iter().map(|z| Xy { x: z.re, y: z.im }).collect();
    let body = ZerosOut { measure: &s.measure, n: s.n, beta: s.beta, zeros, max_modulus_deviation };
    let mut out = Outcome::json(&body, true)?;
    out.csv = Some(to_csv(&rows)?);
    Ok(out)
}

#[derive(Serialize)]
struct GdjOut<'a> {
    measure: &'a MeasureSpec,
    #[serde(flatten)]
    gdj: GdjTriple,
}

pub fn gdj(a: &MeasureArgs) -> Result<Outcome, CliError> {
    let s = Setup::new(a)?;
    Outcome::json(&GdjOut { measure: &s.measure, gdj: s.gdj()? }, true)
}

/// `y'' + (p)y' + (q)y = 0`, with `p` in partial fractions and a vanishing
/// `q` left out.
fn equation(lame: &LameForm, q: &RationalFn) -> String {
    let mut s = format!("y'' + ({lame})y'");
    if !q.is_zero() {
        s.push_str(&format!(" + ({q})y"));
    }
    s.push_str(" = 0");
    s
}

fn assemble(seq: &OpucSequence, n: usize, gdj: &GdjTriple, beta: Complex64) -> Result<(OdeCoefficients, LameForm), CliError> {
    let ode = second_order_ode(seq, n, gdj, beta)?;
    let h = h_fn(seq, n, gdj, beta, beta)?;
    let lame = lame_normal_form(&ode, &h)?;
    Ok((ode, lame))
}

#[derive(Serialize)]
struct OdeOut<'a> {
    measure: &'a MeasureSpec,
    equation: String,
    #[serde(flatten)]
    ode: OdeCoefficients,
    lame: LameForm,
}

pub fn ode(a: &MeasureArgs) -> Result<Outcome, CliError> {
    let s = Setup::new(a)?;
    let (ode, lame) = assemble(&s.seq, s.n, &s.gdj()?, s.beta)?;
    let equation = equation(&lame, &ode.q);
    Outcome::json(&OdeOut { measure: &s.measure, equation, ode, lame }, true)
}

#[derive(Serialize)]
struct SystemOut<'a> {
    measure: &'a MeasureSpec,
    region: Region,
    #[serde(flatten)]
    system: SystemCoefficients,
    residual: ResidualReport,
    pass: bool,
}

pub fn system(a: &MeasureArgs, tau: Complex64) -> Result<Outcome, CliError> {
    let s = Setup::new(a)?;
    let system = first_order_system(&s.seq, s.n, &s.gdj()?, s.beta, tau)?;
    let u = popuc(&s.seq, s.n, s.beta)?;
    let v = popuc(&s.seq, s.n, tau)?;
    let residual = system.residual(&u, &v, s.region)?;
    let pass = residual.pass;
    Outcome::json(&SystemOut { measure: &s.measure, region: s.region, system, residual, pass }, pass)
}

/// Points from `--points`, checked against `--n` and `--beta`.
fn points_input(p: &PointsArgs) -> Result<Option<Vec<Complex64>>, CliError> {
    let Some(path) = &p.points else { return Ok(None) };
    if p.common.beta.is_some() {
        return Err(CliError::Usage("--beta is determined by --points".into()));
    }
    let points = validate_points(&read_points(path)?)?;
    if let Some(n) = p.common.n {
        if n != points.len() {
            return Err(popuc::Error::InvalidInput(format!(
                "--n {n} does not match the {} points given",
                points.len()
            ))
            .into());
        }
    }
    Ok(Some(points))
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Source<'a> {
    Measure { measure: &'a MeasureSpec },
    Points,
    Random { seed: u64 },
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    source: Source<'a>,
    n: usize,
    beta: Complex64,
    region: Region,
    equation: String,
    ode: ResidualReport,
    derivative_identity: ResidualReport,
    pass: bool,
}

pub fn verify(p: &PointsArgs) -> Result<Outcome, CliError> {
    let region = p.common.region();
    let (measure, seq, n, beta, gdj) = match points_input(p)? {
        Some(points) => {
            let n = points.len();
            let (seq, beta) = bernstein_szego_lift(&points)?;
            let gdj = bernstein_szego_gdj(&seq, n, region)?;
            (None, seq, n, beta, gdj)
        }
        None => {
            let s = Setup::new(&p.common)?;
            let gdj = s.gdj()?;
            (Some(s.measure), s.seq, s.n, s.beta, gdj)
        }
    };
    let (ode, lame) = assemble(&seq, n, &gdj, beta)?;
    let y = popuc(&seq, n, beta)?;
    let ode_report = verify_ode(&ode, &y)?;
    let derivative_identity = derivative_identity_check(&seq, n, &gdj, beta)?;
    let pass = ode_report.pass && derivative_identity.pass;
    let source = match &measure {
        Some(m) => Source::Measure { measure: m },
        None => Source::Points,
    };
    let body = VerifyOut {
        source,
        n,
        beta,
        region,
        equation: equation(&lame, &ode.q),
        ode: ode_report,
        derivative_identity,
        pass,
    };
    Outcome::json(&body, pass)
}

#[derive(Serialize)]
struct EquilibriumOut<'a> {
    source: Source<'a>,
    n: usize,
    beta: Complex64,
    region: Region,
    points: Vec<Complex64>,
    configuration: ChargeConfiguration,
    total_charge: f64,
    report: EquilibriumReport,
    lame: LameForm,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<GeneratorDiagnostics>,
    pass: bool,
}

/// Stratified random points: a uniform rotation plus a bounded jitter per slot.
fn random_points(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rotation = rng.random_range(0.0..TAU);
    let jitter: Vec<f64> = (0..n).map(|_| rng.random_range(-RANDOM_JITTER..RANDOM_JITTER)).collect();
    stratified_circle_points(rotation, &jitter)
}

pub fn equilibrium(p: &PointsArgs, default_format: Format) -> Result<Outcome, CliError> {
    let region = p.common.region();
    let from_points = |points: Vec<Complex64>, source: Source<'static>| -> Result<EquilibriumOut<'static>, CliError> {
        let (configuration, diagnostics) = generators_from_points(&points, region)?;
        let report = equilibrium_report(&configuration, &points)?;
        Ok(EquilibriumOut {
            source,
            n: points.len(),
            beta: diagnostics.beta,
            region,
            total_charge: configuration.total_charge(),
            pass: report.total_pass,
            lame: diagnostics.lame.clone(),
            points,
            configuration,
            report,
            diagnostics: Some(diagnostics),
        })
    };
    let measure;
    let body = if let Some(points) = points_input(p)? {
        from_points(points, Source::Points)?
    } else if p.common.measure.is_some() {
        measure = p.common.measure()?;
        let n = p.common.require_n()?;
        let beta = p.common.beta();
        let eq = measure_equilibrium(&measure, n, beta, region)?;
        EquilibriumOut {
            source: Source::Measure { measure: &measure },
            n,
            beta,
            region,
            total_charge: eq.configuration.total_charge(),
            pass: eq.report.total_pass,
            points: eq.points,
            configuration: eq.configuration,
            report: eq.report,
            lame: eq.lame,
            diagnostics: None,
        }
    } else {
        let n = p.common.require_n()?;
        if p.common.beta.is_some() {
            return Err(CliError::Usage("--beta is determined by the random points".into()));
        }
        from_points(random_points(n, p.common.seed), Source::Random { seed: p.common.seed })?
    };
    let rows = plot_rows(&body.points, &body.configuration);
    Ok(Outcome {
        json: pretty(&body)?,
        csv: Some(to_csv(&rows)?),
        default_format,
        pass: body.pass,
    })
}

/// Settings for the four reference plots.
pub fn figure_preset(figure: u8, p: &mut PointsArgs) {
    let (measure, n, region) = match figure {
        1 => ("bernstein_szego", 22, crate::args::RegionArg::Exterior),
        2 => ("bernstein_szego", 22, crate::args::RegionArg::Interior),
        3 => ("single_moment", 14, crate::args::RegionArg::Exterior),
        _ => ("single_moment", 14, crate::args::RegionArg::Interior),
    };
    p.common.measure = Some(measure.into());
    p.common.n = Some(n);
    p.common.beta = Some(DEFAULT_BETA);
    p.common.region = region;
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        Check { name, value, tolerance, pass: value < tolerance }
    }

    fn report(name: &'static str, r: &ResidualReport) -> Self {
        Check { name, value: r.max_residual.max(r.coefficient_ratio), tolerance: r.tolerance, pass: r.pass }
    }
}

#[derive(Serialize)]
struct ExampleOut<'a> {
    example: &'static str,
    measure: &'a MeasureSpec,
    n: usize,
    beta: Complex64,
    region: Region,
    equation: String,
    checks: Vec<Check>,
    pass: bool,
}

/// Largest relative gap between the Lame form and the predicted
/// `sum t / (z - w)` at `samples`.
fn lame_gap(lame: &LameForm, expected: &[(Complex64, f64)], samples: &[Complex64]) -> f64 {
    samples
        .iter()
        .map(|&z| {
            let a = lame.eval(z);
            let b: Complex64 = expected.iter().map(|&(w, t)| t / (z - w)).sum();
            (a - b).norm() / (1.0 + a.norm())
        })
        .fold(0.0, f64::max)
}

pub fn example(name: ExampleName, a: &MeasureArgs) -> Result<Outcome, CliError> {
    if a.measure.is_some() || a.zeta.is_some() {
        return Err(CliError::Usage("the examples fix their own measure; drop --measure and --zeta".into()));
    }
    if a.sieve.is_some() && name != ExampleName::Sieved {
        return Err(CliError::Usage("--M applies to the sieved example only".into()));
    }
    let half = Complex64::new(0.5, 0.0);
    let sieve = a.sieve.unwrap_or(2);
    let (label, named, example, default_n) = match name {
        ExampleName::Lebesgue => ("lebesgue", NamedMeasure::Lebesgue, Example::Lebesgue, 7),
        ExampleName::BernsteinSzego => ("bernstein_szego", NamedMeasure::BernsteinSzego, Example::BernsteinSzego, 22),
        ExampleName::Sieved => ("sieved", NamedMeasure::SievedBs, Example::Sieved(sieve), 9),
        ExampleName::SingleMoment => ("single_moment", NamedMeasure::SingleMoment, Example::SingleMoment, 14),
    };
    let measure = MeasureSpec::named(named, half, sieve)?;
    let n = a.n.unwrap_or(default_n);
    let beta = a.beta();
    let region = a.region();
    let seq = measure.opuc_sequence(n)?;
    let gdj = measure_gdj(&measure, &seq, n, region)?;

    let closed = catalog::closed_forms(example, n, region)?;
    let closed_h = catalog::closed_h(example, n, beta, region)?;
    let h = h_fn(&seq, n, &gdj, beta, beta)?;
    let samples = region_samples(
        region,
        CHECK_SAMPLES,
        &[&gdj.g, &gdj.d, &gdj.j, &closed.g, &closed.d, &closed.j, &h, &closed_h],
    );
    let mut checks = vec![
        Check::below("G", gdj.g.max_deviation(&closed.g, &samples), CLOSED_FORM_TOL),
        Check::below("D", gdj.d.max_deviation(&closed.d, &samples), CLOSED_FORM_TOL),
        Check::below("J", gdj.j.max_deviation(&closed.j, &samples), CLOSED_FORM_TOL),
        Check::below("h", h.max_deviation(&closed_h, &samples), CLOSED_FORM_TOL),
    ];

    let (ode, lame) = assemble(&seq, n, &gdj, beta)?;
    let y = popuc(&seq, n, beta)?;
    checks.push(Check::report("ode", &verify_ode(&ode, &y)?));
    checks.push(Check::report("derivative_identity", &derivative_identity_check(&seq, n, &gdj, beta)?));
    checks.push(Check::below("lame_vs_p", lame.mismatch, LAME_TOL));
    let expected = catalog::expected_lame(example, n, beta, region)?;
    checks.push(Check::below("lame_vs_closed_form", lame_gap(&lame, &expected, &samples), LAME_TOL));

    let mut points = y.roots()?;
    sort_roots(&mut points);
    let report = equilibrium_report(&lame.configuration(), &points)?;
    checks.push(Check::below("equilibrium", report.max_total, report.tolerance));

    let pass = checks.iter().all(|c| c.pass);
    let body = ExampleOut {
        example: label,
        measure: &measure,
        n,
        beta,
        region,
        equation: equation(&lame, &ode.q),
        checks,
        pass,
    };
    Outcome::json(&body, pass)
}
