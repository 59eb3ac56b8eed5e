//! Canned runs for the worked examples.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gamma_spectrum::catalog::{antisymmetric_pair, step_pair, twin_gap, unit_barrier};
use gamma_spectrum::{
    complex_spectrum, determinant, hrp_potential, real_spectrum, DeltaCurve, PiecewiseConstantPotential, Potential,
    Rectangle,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::{count_report, emit, json, spectra_failure, uniform, write_phaseplot, DEFAULT_TOL};
use crate::config::ReproduceArgs;
use crate::Failure;

const EXAMPLES: &[&str] = &["2.1", "2.2", "2.3", "2.4", "2.5"];

struct Bundle {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Bundle {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let p = self.dir.join(name);
        emit(Some(&p), bytes)?;
        self.files.push(p);
        Ok(())
    }

    fn phaseplot(&mut self, name: &str, p: &PiecewiseConstantPotential<f64>, rect: Rectangle<f64>, nx: usize, ny: usize) -> Result<(), Failure> {
        let files = write_phaseplot(p, 1.0, rect, nx, ny, &self.dir.join(name))?;
        self.files.extend(files);
        Ok(())
    }
}

fn rect(a: f64, b: f64, c: f64, d: f64) -> Rectangle<f64> {
    Rectangle::new(a, b, c, d).expect("canned rectangle")
}

/// `gamma,d` rows of the real determinant, `k = 1`.
fn det_curve(p: &PiecewiseConstantPotential<f64>, hi: f64, n: usize) -> Result<String, Failure> {
    let rows = uniform(0.0, hi, n)
        .into_par_iter()
        .map(|g| determinant(p, Complex64::new(g, 0.0), 1.0).map(|d| (g, d.re)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Numerical(e.to_string()))?;
    let mut out = String::from("gamma,d\n");
    for (g, d) in rows {
        writeln!(out, "{g},{d}").unwrap();
    }
    Ok(out)
}

/// `R,count,predicted` on a uniform radius grid.
fn counting_trace(roots: &[f64], slope: f64, hi: f64, n: usize) -> String {
    let mut out = String::from("R,count,predicted\n");
    for r in uniform(0.0, hi, n) {
        let c = roots.iter().filter(|g| **g > 0.0 && **g <= r).count();
        writeln!(out, "{r},{c},{}", slope * r).unwrap();
    }
    out
}

fn real_roots(v: &Potential<f64>, k: f64, radius: f64) -> Result<(String, Vec<f64>), Failure> {
    let s = real_spectrum(v, k, radius, DEFAULT_TOL).map_err(spectra_failure)?;
    Ok((s.to_json_lines(), s.real_values()))
}

fn example_1(b: &mut Bundle) -> Result<(), Failure> {
    let v1 = unit_barrier::<f64>();
    b.write("v1_det.csv", det_curve(&v1, 50.0, 5001)?.as_bytes())?;
    let (lines, roots) = real_roots(&Potential::Piecewise(v1.clone()), 1.0, 200.0)?;
    b.write("v1_spectrum.jsonl", lines.as_bytes())?;
    let mut idx = String::from("n,gamma,asymptote\n");
    for (n, g) in roots.iter().filter(|g| **g > 0.0).enumerate() {
        writeln!(idx, "{},{g},{}", n + 1, std::f64::consts::FRAC_PI_2 * (n + 1) as f64).unwrap();
    }
    b.write("v1_roots_vs_n.csv", idx.as_bytes())?;
    b.phaseplot("v1_phase", &v1, rect(-20.0, 20.0, -4.0, 4.0), 800, 160)
}

fn example_2(b: &mut Bundle) -> Result<(), Failure> {
    for g in [0.0f64, 1.0] {
        let p = antisymmetric_pair(g);
        b.write(&format!("v2_g{g}_det.csv"), det_curve(&p, 50.0, 5001)?.as_bytes())?;
        b.phaseplot(&format!("v2_g{g}_phase"), &p, rect(0.0, 40.0, -3.0, 3.0), 800, 120)?;
        let s = complex_spectrum(&p, 1.0, rect(0.5, 40.0, -3.0, 3.0), DEFAULT_TOL).map_err(spectra_failure)?;
        b.write(&format!("v2_g{g}_complex.jsonl"), s.to_json_lines().as_bytes())?;
        // Printed curves and the leading-order balance of the determinant.
        let mut out = String::from("re,im_printed,im_leading_order\n");
        for re in uniform(1.0, 40.0, 391) {
            let (printed, leading) = if g == 0.0 {
                (re.ln() / 2.0, (2.0 * re).ln() / 2.0)
            } else {
                let a = (1.0 / g.sinh()).asinh();
                (a, a / 2.0)
            };
            writeln!(out, "{re},{printed},{leading}").unwrap();
        }
        b.write(&format!("v2_g{g}_asymptotes.csv"), out.as_bytes())?;
    }
    Ok(())
}

fn counting_examples(b: &mut Bundle, tag: &str, cases: &[(String, String, PiecewiseConstantPotential<f64>)]) -> Result<(), Failure> {
    for (name, spec, p) in cases {
        b.write(&format!("{tag}_{name}_det.csv"), det_curve(p, 50.0, 5001)?.as_bytes())?;
        let (lines, roots) = real_roots(&Potential::Piecewise(p.clone()), 1.0, 150.0)?;
        b.write(&format!("{tag}_{name}_spectrum.jsonl"), lines.as_bytes())?;
        let report = count_report(spec, 1.0, 150.0, DEFAULT_TOL)?;
        let slope = report.prediction.slope;
        b.write(&format!("{tag}_{name}_report.json"), &json(&report))?;
        b.write(&format!("{tag}_{name}_counting.csv"), counting_trace(&roots, slope, 150.0, 601).as_bytes())?;
    }
    Ok(())
}

fn example_3(b: &mut Bundle) -> Result<(), Failure> {
    let cases: Vec<_> = [0.0f64, 1.0]
        .into_iter()
        .map(|g| (format!("g{g}_b2"), format!("v3:{g}:2"), step_pair(g, 2.0)))
        .collect();
    counting_examples(b, "v3", &cases)
}

fn example_4(b: &mut Bundle) -> Result<(), Failure> {
    let cases: Vec<_> = [0.5f64, 1.0]
        .into_iter()
        .map(|g| (format!("g{g}"), format!("v4:{g}"), twin_gap(g)))
        .collect();
    counting_examples(b, "v4", &cases)
}

fn example_5(b: &mut Bundle) -> Result<(), Failure> {
    let v: Potential<f64> = hrp_potential().into();
    for k in [1.0f64, 1.5] {
        let curve = DeltaCurve::compute(&v, &uniform(0.0, 12.0, 1201), k).map_err(|e| Failure::Numerical(e.to_string()))?;
        let mut out = String::from("gamma,cos_delta\n");
        for (g, d) in curve.gammas.iter().zip(&curve.delta_values) {
            writeln!(out, "{g},{}", d.cos()).unwrap();
        }
        b.write(&format!("hrp_k{k}_cos_delta.csv"), out.as_bytes())?;
        let (lines, _) = real_roots(&v, k, 12.0)?;
        b.write(&format!("hrp_k{k}_spectrum.jsonl"), lines.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    example: &'a str,
    files: Vec<String>,
}

pub fn run(a: ReproduceArgs) -> Result<(), Failure> {
    let id = a.example.ok_or_else(|| Failure::Usage(format!("missing example id (one of {})", EXAMPLES.join(", "))))?;
    if !EXAMPLES.contains(&id.as_str()) {
        return Err(Failure::Usage(format!("unknown example `{id}` (expected one of {})", EXAMPLES.join(", "))));
    }
    let dir = a.out.unwrap_or_else(|| PathBuf::from(format!("reproduce-{id}")));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let mut b = Bundle { dir, files: Vec::new() };
    match id.as_str() {
        "2.1" => example_1(&mut b)?,
        "2.2" => example_2(&mut b)?,
        "2.3" => example_3(&mut b)?,
        "2.4" => example_4(&mut b)?,
        _ => example_5(&mut b)?,
    }
    let summary = Summary {
        example: &id,
        files: b.files.iter().map(|p| display(p)).collect(),
    };
    println!("{}", serde_json::to_string(&summary).expect("summary"));
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
