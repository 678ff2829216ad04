//! Output formatting.
//!
//! Every number leaves the program through `format_number`: scientific
//! notation with 12 significant digits, negative zero normalized. JSON output
//! mirrors the result structs field for field; CSV tables are hand-assembled
//! because every field is a number, a bool, or a short label.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::dynamics::{idx, MomentState};
use crate::error::{Error, Result};
use crate::harness::{DispersionRow, RunResult, SweepRow};

/// 12 significant digits in scientific notation.
pub fn format_number(value: f64) -> String {
    // -0.0 carries no information worth a sign flip in a diff
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{v:.11e}")
}

/// Pretty JSON structure with all floats routed through `format_number`.
struct SigFigFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for SigFigFormatter<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(format_number(value).as_bytes())
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object_value(writer)
    }
}

/// Serializes any result value to the canonical JSON text, newline-terminated.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buffer = Vec::new();
    let formatter = SigFigFormatter {
        inner: PrettyFormatter::new(),
    };
    let mut ser = Serializer::with_formatter(&mut buffer, formatter);
    value.serialize(&mut ser).map_err(|e| Error::Domain {
        module: "emit",
        message: format!("serialization failed: {e}"),
    })?;
    let mut text = String::from_utf8(buffer).expect("serializer emits UTF-8");
    text.push('\n');
    Ok(text)
}

/// Quotes a CSV field only when RFC 4180 requires it.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const SWEEP_CSV_HEADER: &str = "axis_value,lambda,lambda_imag,n3,entangled,t_end_s,dt_s,\
conjugate_drift,re_g2,im_g2,re_g3,im_g3";

/// Sweep table, one line per grid point. A failed point keeps its axis value,
/// leaves the data cells empty, and its error goes to the caller's log.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 256);
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format_number(row.axis_value));
        match &row.result {
            Some(r) => {
                for v in [r.lambda, r.lambda_imag, r.n3] {
                    out.push(',');
                    out.push_str(&format_number(v));
                }
                out.push(',');
                out.push_str(if r.entangled { "true" } else { "false" });
                for v in [
                    r.t_end_s,
                    r.dt_s,
                    r.conjugate_drift,
                    r.g2.re,
                    r.g2.im,
                    r.g3.re,
                    r.g3.im,
                ] {
                    out.push(',');
                    out.push_str(&format_number(v));
                }
            }
            None => out.push_str(&",".repeat(11)),
        }
        out.push('\n');
    }
    out
}

/// A single run rendered as a one-row sweep table; the axis column carries
/// the interaction length.
pub fn run_csv(result: &RunResult) -> String {
    sweep_csv(&[SweepRow {
        axis_value: result.config.geometry.length,
        result: Some(result.clone()),
        error: None,
    }])
}

pub const DISPERSION_CSV_HEADER: &str = "f_hz,re_beta,im_beta,re_alpha,gamma,v_g,xi";

pub fn dispersion_csv(rows: &[DispersionRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 160);
    out.push_str(DISPERSION_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let fields = [
            row.f_hz, row.re_beta, row.im_beta, row.re_alpha, row.gamma, row.v_g, row.xi,
        ];
        let mut first = true;
        for v in fields {
            if !first {
                out.push(',');
            }
            out.push_str(&format_number(v));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Moment trajectory: time plus the real and imaginary part of every moment.
pub fn trajectory_csv(trajectory: &[MomentState]) -> String {
    let mut out = String::with_capacity(64 + trajectory.len() * 29 * 20);
    out.push_str("t_s");
    for name in idx::NAMES {
        out.push_str(",re_");
        out.push_str(name);
        out.push_str(",im_");
        out.push_str(name);
    }
    out.push('\n');
    for state in trajectory {
        out.push_str(&format_number(state.t));
        for z in state.x {
            out.push(',');
            out.push_str(&format_number(z.re));
            out.push(',');
            out.push_str(&format_number(z.im));
        }
        out.push('\n');
    }
    out
}

/// Writes to the path when given one, otherwise to stdout.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            // explicit flush: the process may exit without running destructors
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
