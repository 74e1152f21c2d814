//! CSV output. Numbers are written with 9 significant digits and a `.`
//! decimal separator, in fixed notation for exponents in `[-4, 9)` and
//! scientific notation otherwise, so output is byte-stable across runs.

use std::io::Write;

use crate::blockage::PeriodSamples;
use crate::delay::{QueueDelay, RegionGrid};
use crate::error::Result;

const SIG_DIGITS: usize = 9;

/// Formats `x` with 9 significant digits, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn fmt_delay(d: QueueDelay) -> String {
    match d {
        QueueDelay::Finite(s) => fmt_num(s),
        QueueDelay::Diverged => "diverged".to_string(),
    }
}

/// Writes a header row then every record.
pub fn write_table<W: Write, I>(out: W, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const PERIOD_HEADER: [&str; 3] = ["slot_index", "x_seconds", "y_seconds"];

pub fn write_period_samples<W: Write>(out: W, samples: &PeriodSamples) -> Result<()> {
    let rows = samples
        .nonlos_s
        .iter()
        .zip(&samples.los_s)
        .enumerate()
        .map(|(i, (x, y))| vec![i.to_string(), fmt_num(*x), fmt_num(*y)]);
    write_table(out, &PERIOD_HEADER, rows)
}

pub const REGION_HEADER: [&str; 7] = [
    "theta_deg",
    "blockage_fraction",
    "choice",
    "delay_fallback_s",
    "delay_relay_s",
    "service_rate_fallback_bps",
    "service_rate_relay_bps",
];

pub fn write_region<W: Write>(out: W, grid: &RegionGrid) -> Result<()> {
    let rows = grid.cells.iter().map(|c| {
        vec![
            fmt_num(c.theta_deg),
            fmt_num(c.blockage_fraction),
            c.label.to_string(),
            fmt_delay(c.report.delay_fallback),
            fmt_delay(c.report.delay_relay),
            fmt_num(c.report.service_rate_fallback_bps),
            fmt_num(c.report.service_rate_relay_bps),
        ]
    });
    write_table(out, &REGION_HEADER, rows)
}
