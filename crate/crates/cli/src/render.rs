//! Output shaping for the three commands; all numeric strings originate in
//! the core types, so every format prints identical digits.

use egfasym::asymptotics::AsympEstimate;
use egfasym::numerics::Real;
use egfasym::oeis::{ComparisonReport, SequenceId};
use egfasym::params::EgfParams;
use egfasym::richardson::{ExtrapolationReport, RatioSeries};
use egfasym::series::CoeffTable;
use std::io::{self, Write};

#[derive(Copy, Clone, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Jsonl,
}

/// Positional decimal (`1.0097…`, `0.0042`) when the exponent is small,
/// falling back to scientific notation outside ±a dozen places.
pub fn plain_decimal(x: &Real, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (neg, ds, e10) = x.decimal_parts(sig);
    let sign = if neg { "-" } else { "" };
    let digits: String = ds.iter().map(|d| char::from(b'0' + d)).collect();
    if e10 >= 1 && (e10 as usize) <= digits.len().min(12) {
        let (int_part, frac) = digits.split_at(e10 as usize);
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    } else if (-3..=0).contains(&e10) {
        format!("{sign}0.{}{digits}", "0".repeat(e10.unsigned_abs() as usize))
    } else {
        x.to_sci(sig)
    }
}

pub fn coeff_table(table: &CoeffTable, out: &mut impl Write) -> io::Result<()> {
    let width = table.n_max().to_string().len().max(1);
    writeln!(out, "{:>width$}  a(n)", "n")?;
    for n in 0..table.len() {
        writeln!(out, "{n:>width$}  {}", table.rendered_value(n))?;
    }
    Ok(())
}

pub struct AsympRow {
    pub n: u64,
    pub formula: String,
    /// Saddle point used, absent for the simplified formula.
    pub z: Option<String>,
    pub log10: String,
    pub value: String,
}

impl AsympRow {
    pub fn new(est: &AsympEstimate, z: Option<&Real>) -> Self {
        AsympRow {
            n: est.n,
            formula: est.formula.to_string(),
            z: z.map(|z| z.to_sci(24)),
            log10: plain_decimal(&est.log10(), 24),
            value: est.rendered(),
        }
    }
}

pub fn asymp_table(rows: &[AsympRow], out: &mut impl Write) -> io::Result<()> {
    writeln!(
        out,
        "{:>10}  {:<10}  {:<32}  {:<28}  estimate",
        "n", "formula", "z", "log10"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:>10}  {:<10}  {:<32}  {:<28}  {}",
            r.n,
            r.formula,
            r.z.as_deref().unwrap_or("-"),
            r.log10,
            r.value
        )?;
    }
    Ok(())
}

pub fn asymp_csv(rows: &[AsympRow], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "n,formula,z,log10,estimate")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            r.formula,
            r.z.as_deref().unwrap_or(""),
            r.log10,
            r.value
        )?;
    }
    Ok(())
}

pub fn asymp_jsonl(rows: &[AsympRow], out: &mut impl Write) -> io::Result<()> {
    for r in rows {
        let row = serde_json::json!({
            "n": r.n,
            "formula": r.formula,
            "z": r.z,
            "log10": r.log10,
            "estimate": r.value,
        });
        writeln!(out, "{row}")?;
    }
    Ok(())
}

fn comparison_phrase(c: &ComparisonReport) -> String {
    match &c.first_mismatch {
        None => format!(
            "{} terms match the published values exactly (b-file indices {}..{})",
            c.matched,
            c.aligned_offset,
            c.aligned_offset + c.compared as i64 - 1
        ),
        Some(m) => format!(
            "MISMATCH after {} matches; index {}: published {}, computed {}",
            c.matched, m.index, m.expected, m.got
        ),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn verify_report(
    format: Format,
    params: &EgfParams,
    anum: Option<&SequenceId>,
    comparison: Option<&ComparisonReport>,
    series: &RatioSeries,
    report: &ExtrapolationReport,
    render_digits: usize,
    out: &mut impl Write,
) -> io::Result<()> {
    let len = series.len();
    let f_last = plain_decimal(series.at(len), render_digits);
    match format {
        Format::Table => {
            writeln!(out, "family: {params}")?;
            if let Some(anum) = anum {
                writeln!(out, "sequence: {anum}")?;
            }
            match comparison {
                Some(c) => writeln!(out, "comparison: {}", comparison_phrase(c))?,
                None => writeln!(out, "comparison: skipped (no sequence or b-file supplied)")?,
            }
            writeln!(
                out,
                "ratio series: formula={} L={} digits={}",
                series.formula,
                len,
                series.ctx.digits()
            )?;
            writeln!(out, "f(L) = {f_last}")?;
            let w = report
                .orders
                .iter()
                .map(|o| o.to_string().len())
                .max()
                .unwrap_or(1)
                .max(5);
            writeln!(out, "{:>w$}  extrapolant", "order")?;
            for (order, ext) in report.orders.iter().zip(&report.extrapolants) {
                writeln!(out, "{order:>w$}  {}", plain_decimal(ext, render_digits))?;
            }
        }
        Format::Csv => {
            writeln!(out, "# family {params}")?;
            if let Some(anum) = anum {
                writeln!(out, "# sequence {anum}")?;
            }
            match comparison {
                Some(c) => writeln!(
                    out,
                    "# comparison matched={} compared={} clean={}",
                    c.matched,
                    c.compared,
                    c.is_clean()
                )?,
                None => writeln!(out, "# comparison skipped")?,
            }
            writeln!(
                out,
                "# ratio formula={} L={} digits={} fL={}",
                series.formula,
                len,
                series.ctx.digits(),
                f_last
            )?;
            writeln!(out, "order,extrapolant")?;
            for (order, ext) in report.orders.iter().zip(&report.extrapolants) {
                writeln!(out, "{order},{}", plain_decimal(ext, render_digits))?;
            }
        }
        Format::Jsonl => {
            let header = serde_json::json!({
                "type": "run",
                "family": params.to_string(),
                "sequence": anum.map(|a| a.to_string()),
                "formula": series.formula.to_string(),
                "terms": len,
                "digits": series.ctx.digits(),
            });
            writeln!(out, "{header}")?;
            if let Some(c) = comparison {
                let row = serde_json::json!({
                    "type": "comparison",
                    "matched": c.matched,
                    "compared": c.compared,
                    "clean": c.is_clean(),
                    "first_mismatch": c.first_mismatch.as_ref().map(|m| {
                        serde_json::json!({
                            "index": m.index,
                            "published": m.expected,
                            "computed": m.got,
                        })
                    }),
                });
                writeln!(out, "{row}")?;
            }
            writeln!(
                out,
                "{}",
                serde_json::json!({ "type": "ratio", "n": len, "value": f_last })
            )?;
            for (order, ext) in report.orders.iter().zip(&report.extrapolants) {
                let row = serde_json::json!({
                    "type": "extrapolant",
                    "order": order,
                    "value": plain_decimal(ext, render_digits),
                });
                writeln!(out, "{row}")?;
            }
        }
    }
    Ok(())
}
