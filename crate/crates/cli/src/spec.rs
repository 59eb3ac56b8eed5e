//! Potential mini-language.
//!
//! ```text
//! w:[a0,a1,...,am]:v1,...,vm   piecewise constant
//! v1 | v2:g | v3:g:b | v4:g     catalogue potentials
//! hrp | sech:A:w                analytic potentials
//! @path                         potential text record
//! ```

use gamma_spectrum::catalog::{antisymmetric_pair, step_pair, twin_gap, unit_barrier};
use gamma_spectrum::{build_w, hrp_potential, AnalyticPotential, AnalyticShape, Potential};

fn number(s: &str, what: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("{what}: `{s}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{what}: `{s}` is not finite"))
    }
}

fn list(s: &str, what: &str) -> Result<Vec<f64>, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| number(t, what)).collect()
}

fn args<'a>(parts: &[&'a str], n: usize, name: &str) -> Result<Vec<&'a str>, String> {
    if parts.len() != n + 1 {
        return Err(format!("`{name}` takes {n} parameter(s), got {}", parts.len() - 1));
    }
    Ok(parts[1..].to_vec())
}

pub fn parse_potential(s: &str) -> Result<Potential<f64>, String> {
    let s = s.trim();
    if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))?;
        return Potential::from_record_str(text.trim()).map_err(|e| e.to_string());
    }
    if let Some(rest) = s.strip_prefix("w:") {
        let rest = rest.trim_start();
        let body = rest.strip_prefix('[').ok_or("w: breakpoints must be written as [a0,a1,...]")?;
        let (bps, tail) = body.split_once(']').ok_or("w: missing `]`")?;
        let vals = tail.trim_start().strip_prefix(':').ok_or("w: expected `:` before the values")?;
        let p = build_w(&list(bps, "breakpoint")?, &list(vals, "value")?).map_err(|e| e.to_string())?;
        return Ok(Potential::Piecewise(p));
    }
    let parts: Vec<&str> = s.split(':').collect();
    let name = parts[0].trim().to_ascii_lowercase();
    let p: Potential<f64> = match name.as_str() {
        "v1" => {
            args(&parts, 0, "v1")?;
            unit_barrier().into()
        }
        "v2" => {
            let a = args(&parts, 1, "v2")?;
            antisymmetric_pair(nonneg(number(a[0], "gap")?, "gap")?).into()
        }
        "v3" => {
            let a = args(&parts, 2, "v3")?;
            let b = number(a[1], "b")?;
            if b <= 0.0 {
                return Err(format!("v3: b must be positive, got {b}"));
            }
            step_pair(nonneg(number(a[0], "gap")?, "gap")?, b).into()
        }
        "v4" => {
            let a = args(&parts, 1, "v4")?;
            twin_gap(nonneg(number(a[0], "gap")?, "gap")?).into()
        }
        "hrp" => {
            args(&parts, 0, "hrp")?;
            hrp_potential().into()
        }
        "sech" => {
            let a = args(&parts, 2, "sech")?;
            let shape = AnalyticShape::Sech {
                amplitude: number(a[0], "amplitude")?,
                width: number(a[1], "width")?,
            };
            AnalyticPotential::from_shape(shape).map_err(|e| e.to_string())?.into()
        }
        _ => return Err(format!("unknown potential `{s}`")),
    };
    Ok(p)
}

fn nonneg(x: f64, what: &str) -> Result<f64, String> {
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("{what} must be non-negative, got {x}"))
    }
}

/// `re_min,re_max,im_min,im_max`.
pub fn parse_rect(s: &str) -> Result<[f64; 4], String> {
    let v = list(s, "rectangle")?;
    <[f64; 4]>::try_from(v).map_err(|_| format!("rectangle needs four numbers re_min,re_max,im_min,im_max, got `{s}`"))
}
