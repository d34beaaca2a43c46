use std::io::Write;

use anyhow::Result;
use distortion_bounds::regions::BoundaryCurve;
use serde_json::Value;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{x:.16e}")
    }
}

/// JSON number, or the strings `"inf"`, `"-inf"`, `"nan"` for non-finite values.
pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(fmt_f64(x))
    }
}

pub fn json_vec(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_f64(x)).collect())
}

pub fn json_labels(labels: &[bool]) -> Value {
    Value::Array(labels.iter().map(|&b| Value::from(u8::from(b))).collect())
}

/// Writes `free_coord,solved_coord,binding`, one row per sample; infeasible
/// points carry `nan` in the solved column.
pub fn write_curve_csv<W: Write>(curve: &BoundaryCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["free_coord", "solved_coord", "binding"])?;
    for s in &curve.samples {
        w.write_record([
            fmt_f64(s.free),
            fmt_f64(s.solved.unwrap_or(f64::NAN)),
            s.binding.as_str().to_owned(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
