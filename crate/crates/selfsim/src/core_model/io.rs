//! CSV persistence for sampled fields and profiles.

use super::field::{SpectralField, TailModel};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::path::Path;

/// Write `xi, re, im, dre, dim` (plus `ripple_re, ripple_im` when present).
pub fn write_field_csv(path: &Path, f: &SpectralField) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let has_ripple = f.ripple.is_some();
    let mut header = vec!["xi", "re", "im", "dre", "dim"];
    if has_ripple {
        header.extend(["ripple_re", "ripple_im"]);
    }
    w.write_record(&header)?;
    for j in 0..f.grid.len() {
        let d = f.deriv.as_ref().map_or(C64::new(f64::NAN, f64::NAN), |d| d[j]);
        let mut rec = vec![
            f.grid[j].to_string(),
            f.values[j].re.to_string(),
            f.values[j].im.to_string(),
            d.re.to_string(),
            d.im.to_string(),
        ];
        if let Some(r) = &f.ripple {
            rec.push(r[j].re.to_string());
            rec.push(r[j].im.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a field written by [`write_field_csv`]; the tail comes from the envelope.
pub fn read_field_csv(path: &Path, tail: TailModel) -> Result<SpectralField> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let has_ripple = headers.iter().any(|h| h == "ripple_re");
    let (mut grid, mut values, mut deriv, mut ripple) = (vec![], vec![], vec![], vec![]);
    let mut deriv_ok = true;
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Parse("short record".into()))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(e.to_string()))
        };
        grid.push(num(0)?);
        values.push(C64::new(num(1)?, num(2)?));
        let d = C64::new(num(3)?, num(4)?);
        deriv_ok &= d.is_finite();
        deriv.push(d);
        if has_ripple {
            ripple.push(C64::new(num(5)?, num(6)?));
        }
    }
    SpectralField::with_ripple(
        grid,
        values,
        deriv_ok.then_some(deriv),
        tail,
        has_ripple.then_some(ripple),
    )
}

/// Write a real profile `y, v, dv`.
pub fn write_profile_csv(path: &Path, ys: &[f64], vs: &[f64], dvs: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["y", "v", "dv"])?;
    for j in 0..ys.len() {
        w.write_record([ys[j].to_string(), vs[j].to_string(), dvs[j].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::field::ripple_carrier;
    use super::*;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        let g: Vec<f64> = (0..40).map(|i| i as f64 * 0.37).collect();
        let vals: Vec<C64> = g.iter().map(|&x| C64::new(x.sin() / 3.0, 1.0 / (1.0 + x))).collect();
        let der: Vec<C64> = g.iter().map(|&x| C64::new(x.cos() / 3.0, -1.0 / (1.0 + x).powi(2))).collect();
        let rip: Vec<C64> = g.iter().map(|&x| C64::new(1e-4, 0.0) * ripple_carrier(0.1 * x)).collect();
        let f = SpectralField::with_ripple(g, vals, Some(der), TailModel::zero(14.43), Some(rip)).unwrap();
        write_field_csv(&p, &f).unwrap();
        let h = read_field_csv(&p, f.tail).unwrap();
        for j in 0..f.grid.len() {
            assert!((f.values[j] - h.values[j]).norm() <= 1e-12 * (1.0 + f.values[j].norm()));
            assert!((f.ripple.as_ref().unwrap()[j] - h.ripple.as_ref().unwrap()[j]).norm() <= 1e-16);
        }
    }
}
