use std::path::{Path, PathBuf};

use gamma_spectrum::asymptotics::{detect_rational, AsymptoticsError};
use gamma_spectrum::spectra::SpectraError;
use gamma_spectrum::trigzeros::TrigError;
use gamma_spectrum::{
    a_density, brute_count, compare, complex_spectrum, phase_grid, predict, rational_density, real_spectrum,
    ComparisonReport, DeltaCurve, DensityPrediction, PiecewiseConstantPotential, Potential, Rectangle, TrigParams,
};
use serde::Serialize;

use crate::config::{CountCompareArgs, DeltaArgs, PhaseplotArgs, RecordArgs, SpectrumArgs, TrigDensityArgs};
use crate::spec::{parse_potential, parse_rect};
use crate::Failure;

pub const DEFAULT_TOL: f64 = 1e-10;

pub fn require<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}

pub fn positive(x: f64, flag: &str) -> Result<f64, Failure> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Failure::Usage(format!("--{flag} must be positive and finite, got {x}")))
    }
}

pub fn potential(spec: Option<&str>) -> Result<Potential<f64>, Failure> {
    parse_potential(require(spec, "potential")?).map_err(Failure::Usage)
}

pub fn piecewise<'a>(v: &'a Potential<f64>, what: &str) -> Result<&'a PiecewiseConstantPotential<f64>, Failure> {
    v.as_piecewise()
        .ok_or_else(|| Failure::Usage(format!("{what} needs a piecewise-constant potential")))
}

pub fn rectangle(s: &str) -> Result<Rectangle<f64>, Failure> {
    let [a, b, c, d] = parse_rect(s).map_err(Failure::Usage)?;
    Rectangle::new(a, b, c, d).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn spectra_failure(e: SpectraError) -> Failure {
    match e {
        SpectraError::NonPositiveRadius(_) | SpectraError::InvalidRectangle(_) | SpectraError::GridTooSmall => {
            Failure::Usage(e.to_string())
        }
        other => Failure::Numerical(other.to_string()),
    }
}

fn asymptotics_failure(e: AsymptoticsError) -> Failure {
    match e {
        AsymptoticsError::InsufficientRoots(_) | AsymptoticsError::Potential(_) => Failure::Numerical(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    }
}

fn trig_failure(e: TrigError) -> Failure {
    match e {
        TrigError::OutOfDomain(_) | TrigError::StepTooLarge { .. } | TrigError::NotCoprime { .. } => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Numerical(e.to_string()),
    }
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    use std::io::Write;
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(bytes)?;
            s.flush()?;
            Ok(())
        }
    }
}

pub fn json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable report");
    s.push('\n');
    s.into_bytes()
}

pub fn spectrum(a: SpectrumArgs) -> Result<(), Failure> {
    let v = potential(a.potential.as_deref())?;
    let k = positive(require(a.k, "k")?, "k")?;
    let tol = positive(a.tol.unwrap_or(DEFAULT_TOL), "tol")?;
    let s = match (a.radius, a.rect.as_deref()) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either --R or --rect, not both".into())),
        (None, None) => return Err(Failure::Usage("missing --R (real spectrum) or --rect (complex roots)".into())),
        (Some(r), None) => real_spectrum(&v, k, positive(r, "R")?, tol).map_err(spectra_failure)?,
        (None, Some(rect)) => {
            let rect = rectangle(rect)?;
            complex_spectrum(piecewise(&v, "--rect")?, k, rect, tol).map_err(spectra_failure)?
        }
    };
    emit(a.out.as_deref(), s.to_json_lines().as_bytes())
}

#[derive(Serialize)]
pub struct CountReport {
    pub potential: String,
    pub k: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub prediction: DensityPrediction<f64>,
    /// Positive real roots in `(0, R]`.
    pub roots_found: usize,
    /// Absent when fewer than 10 roots leave no slope to fit.
    pub comparison: Option<ComparisonReport>,
}

pub fn count_report(spec: &str, k: f64, radius: f64, tol: f64) -> Result<CountReport, Failure> {
    let v = parse_potential(spec).map_err(Failure::Usage)?;
    let p = piecewise(&v, "count-compare")?;
    let prediction = predict(p, k).map_err(asymptotics_failure)?;
    let s = real_spectrum(&v, k, radius, tol).map_err(spectra_failure)?;
    let roots_found = s.real_values().iter().filter(|g| **g > 0.0 && **g <= radius).count();
    let comparison = match compare(&s, &prediction, radius) {
        Ok(c) => Some(c),
        Err(AsymptoticsError::InsufficientRoots(_)) => None,
        Err(e) => return Err(asymptotics_failure(e)),
    };
    Ok(CountReport {
        potential: spec.to_string(),
        k,
        radius,
        prediction,
        roots_found,
        comparison,
    })
}

#[derive(Serialize)]
struct CountCompareOutput {
    report: CountReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<CountReport>,
    /// Empirical slope over the baseline's.
    #[serde(skip_serializing_if = "Option::is_none")]
    slope_ratio: Option<f64>,
}

pub fn count_compare(a: CountCompareArgs) -> Result<(), Failure> {
    let spec = require(a.potential.as_deref(), "potential")?;
    let k = positive(require(a.k, "k")?, "k")?;
    let radius = positive(require(a.radius, "R")?, "R")?;
    let tol = positive(a.tol.unwrap_or(DEFAULT_TOL), "tol")?;
    let report = count_report(spec, k, radius, tol)?;
    let baseline = a.baseline.as_deref().map(|b| count_report(b, k, radius, tol)).transpose()?;
    let slope_ratio = match (&report.comparison, baseline.as_ref().and_then(|b| b.comparison.as_ref())) {
        (Some(r), Some(b)) if b.empirical_slope != 0.0 => Some(r.empirical_slope / b.empirical_slope),
        _ => None,
    };
    emit(a.out.as_deref(), &json(&CountCompareOutput { report, baseline, slope_ratio }))
}

pub fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn write_phaseplot(p: &PiecewiseConstantPotential<f64>, k: f64, rect: Rectangle<f64>, nx: usize, ny: usize, prefix: &Path) -> Result<Vec<PathBuf>, Failure> {
    if nx < 2 || ny < 2 {
        return Err(Failure::Usage(format!("--nx and --ny must be at least 2, got {nx} × {ny}")));
    }
    let grid = phase_grid(p, k, rect, nx, ny).map_err(spectra_failure)?;
    let ppm = with_extension(prefix, "ppm");
    let csv = with_extension(prefix, "csv");
    emit(Some(&ppm), &grid.to_ppm())?;
    emit(Some(&csv), grid.to_csv().as_bytes())?;
    Ok(vec![ppm, csv])
}

pub fn phaseplot(a: PhaseplotArgs) -> Result<(), Failure> {
    let v = potential(a.potential.as_deref())?;
    let k = positive(require(a.k, "k")?, "k")?;
    let rect = rectangle(require(a.rect.as_deref(), "rect")?)?;
    let prefix = require(a.out, "out")?;
    let files = write_phaseplot(piecewise(&v, "phaseplot")?, k, rect, a.nx.unwrap_or(400), a.ny.unwrap_or(200), &prefix)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

pub fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn delta(a: DeltaArgs) -> Result<(), Failure> {
    let v = potential(a.potential.as_deref())?;
    let k = positive(require(a.k, "k")?, "k")?;
    let lo = a.gamma_min.unwrap_or(0.0);
    let hi = require(a.gamma_max, "gamma-max")?;
    let n = a.points.unwrap_or(401);
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Failure::Usage(format!("need finite --gamma-min < --gamma-max, got {lo}, {hi}")));
    }
    if n < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    let curve = DeltaCurve::compute(&v, &uniform(lo, hi, n), k).map_err(|e| Failure::Numerical(e.to_string()))?;
    emit(a.out.as_deref(), curve.to_csv().as_bytes())
}

#[derive(Serialize)]
struct TrigReport {
    alpha: f64,
    beta: f64,
    #[serde(rename = "R")]
    radius: f64,
    step: f64,
    count: usize,
    tangential_zeros: usize,
    empirical_density: f64,
    /// `A(α, β)/π`.
    predicted_density: f64,
    branch: gamma_spectrum::DensityBranch,
    degenerate: bool,
    /// Exact rational-branch density when `β = p/q` and `αβ > 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_density: Option<f64>,
    relative_gap: f64,
}

pub fn trig_density(a: TrigDensityArgs) -> Result<(), Failure> {
    let alpha = require(a.alpha, "alpha")?;
    let beta = require(a.beta, "beta")?;
    let radius = positive(a.radius.unwrap_or(1e4), "R")?;
    let params = TrigParams::new(alpha, beta).map_err(trig_failure)?;
    let step = positive(a.step.unwrap_or_else(|| params.max_step()), "step")?;
    let density = a_density(alpha, beta, None).map_err(asymptotics_failure)?;
    let exact = match (alpha * beta > 1.0, detect_rational(beta, 1_000_000, 1e-12)) {
        (true, Some((p, q))) => Some(rational_density(p, q, alpha).map_err(trig_failure)?),
        _ => None,
    };
    let c = brute_count(&params, radius, step).map_err(trig_failure)?;
    let empirical = c.count as f64 / radius;
    let predicted = density.value / std::f64::consts::PI;
    let reference = exact.unwrap_or(predicted);
    let report = TrigReport {
        alpha,
        beta,
        radius,
        step,
        count: c.count,
        tangential_zeros: c.tangential.len(),
        empirical_density: empirical,
        predicted_density: predicted,
        branch: density.branch,
        degenerate: density.degenerate,
        exact_density: exact,
        relative_gap: (empirical - reference).abs() / reference,
    };
    emit(a.out.as_deref(), &json(&report))
}

pub fn record(a: RecordArgs) -> Result<(), Failure> {
    let v = potential(a.potential.as_deref())?;
    let mut s = v.to_record_string().map_err(|e| Failure::Usage(e.to_string()))?;
    s.push('\n');
    emit(a.out.as_deref(), s.as_bytes())
}
