//! Waveform CSV: header `time,<probe1>,<probe2>,...`, one row per step,
//! pressures in kPa with six significant digits.

use std::io::{Read, Write};

use thiserror::Error;

use super::Waveform;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("row {row}: {message}")]
    Format { row: usize, message: String },
}

/// Formats like C's `%.{digits}g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed.
pub fn format_sig<T: Scalar>(x: T, digits: usize) -> String {
    let digits = digits.max(1);
    let v = x.to_f64().unwrap_or(f64::NAN);
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_waveform_csv<T: Scalar, W: Write>(wave: &Waveform<T>, out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = std::iter::once("time").chain(wave.probes.iter().map(String::as_str)).collect();
    w.write_record(&header)?;
    for (k, t) in wave.times.iter().enumerate() {
        let row: Vec<String> = std::iter::once(t.to_string())
            .chain(wave.pressures.iter().map(|s| format_sig(s[k], 6)))
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a waveform CSV back; only times and probe pressures are carried.
pub fn read_waveform_csv<T: Scalar, R: Read>(input: R) -> Result<Waveform<T>, CsvError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("time") {
        return Err(CsvError::Format {
            row: 0,
            message: "first column must be `time`".into(),
        });
    }
    let probes: Vec<String> = header.iter().skip(1).map(String::from).collect();
    let mut wave = Waveform {
        times: Vec::new(),
        pressures: vec![Vec::new(); probes.len()],
        probes,
        valves: Vec::new(),
        lambdas: Vec::new(),
        actuators: Vec::new(),
        elongations: Vec::new(),
    };
    for (k, record) in r.records().enumerate() {
        let record = record?;
        let parse = |s: &str| {
            s.parse::<T>().map_err(|_| CsvError::Format {
                row: k + 1,
                message: format!("not a number: {s:?}"),
            })
        };
        let t = parse(&record[0])?;
        if wave.times.last().is_some_and(|&last| !(t > last)) {
            return Err(CsvError::Format {
                row: k + 1,
                message: "times must be strictly increasing".into(),
            });
        }
        wave.times.push(t);
        for (series, field) in wave.pressures.iter_mut().zip(record.iter().skip(1)) {
            series.push(parse(field)?);
        }
    }
    Ok(wave)
}
