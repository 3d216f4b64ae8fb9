//! CSV serialisation of sweep rows.
//!
//! Every row carries its full parameter set so a plot can be regenerated
//! from a single file. Floats are written with 12 significant digits.

use std::io::{Read, Write};

use super::{Curve, SweepRow};
use crate::error::{Error, Result};

pub const HEADER: [&str; 14] = [
    "scenario",
    "curve",
    "eta",
    "tau",
    "qfi",
    "qfi_benchmark",
    "beats_benchmark",
    "n_signal",
    "n_low",
    "t0",
    "omega1",
    "omega2",
    "g",
    "gprime",
];

const SIG_DIGITS: usize = 12;

/// `printf("%.12g")`-style formatting.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(io)?;
    for r in rows {
        let eta = r.eta().map(format_sig).unwrap_or_default();
        w.write_record([
            r.scenario.as_str(),
            r.curve.label(),
            &eta,
            &format_sig(r.tau),
            &format_sig(r.qfi),
            &format_sig(r.qfi_benchmark),
            if r.beats_benchmark { "true" } else { "false" },
            &format_sig(r.n_signal),
            &format_sig(r.n_low),
            &format_sig(r.t0),
            &format_sig(r.omega1),
            &format_sig(r.omega2),
            &format_sig(r.g),
            &format_sig(r.gprime),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(|e| Error::Io(e.to_string()))?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::domain(format!("unexpected CSV header: {header:?}")));
    }
    rdr.records()
        .enumerate()
        .map(|(line, rec)| {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            let num = |k: usize| -> Result<f64> {
                rec[k].parse().map_err(|_| {
                    Error::domain(format!(
                        "row {}: column {} is not a number: '{}'",
                        line + 1,
                        HEADER[k],
                        &rec[k]
                    ))
                })
            };
            let curve = match &rec[1] {
                "source" => Curve::Source { eta: num(2)? },
                "single_thermal" => Curve::SingleThermal,
                "coherent" => Curve::Coherent,
                other => {
                    return Err(Error::domain(format!(
                        "row {}: unknown curve '{other}'",
                        line + 1
                    )))
                }
            };
            let beats_benchmark = match &rec[6] {
                "true" => true,
                "false" => false,
                other => {
                    return Err(Error::domain(format!(
                        "row {}: beats_benchmark must be true/false, got '{other}'",
                        line + 1
                    )))
                }
            };
            Ok(SweepRow {
                scenario: rec[0].to_string(),
                curve,
                tau: num(3)?,
                qfi: num(4)?,
                qfi_benchmark: num(5)?,
                beats_benchmark,
                n_signal: num(7)?,
                n_low: num(8)?,
                t0: num(9)?,
                omega1: num(10)?,
                omega2: num(11)?,
                g: num(12)?,
                gprime: num(13)?,
            })
        })
        .collect()
}

/// Rounds to the precision [`format_sig`] preserves.
pub fn round_sig(x: f64) -> f64 {
    format_sig(x).parse().expect("formatted float parses")
}
