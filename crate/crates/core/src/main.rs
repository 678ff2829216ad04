//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for configuration problems (bad flags, bad
//! config file, IO), 2 for numeric failures (lost confinement, overflow,
//! refinement that will not settle).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use plasmonq::config::RunConfig;
use plasmonq::emit;
use plasmonq::error::{Error, Result};
use plasmonq::harness::{self, PresetKind, SweepAxis, SweepRow};

#[derive(Parser)]
#[command(
    name = "plasmonq",
    version,
    about = "Microwave-optical entanglement in a graphene-loaded capacitor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Guided-mode table (beta, alpha, loss, group velocity, xi) across an
    /// optical band
    Dispersion {
        /// JSON configuration file; defaults describe the baseline device
        #[arg(long)]
        config: Option<PathBuf>,
        /// Band start (Hz)
        #[arg(long, default_value_t = 150e12)]
        from: f64,
        /// Band end (Hz)
        #[arg(long, default_value_t = 250e12)]
        to: f64,
        #[arg(long, default_value_t = 51)]
        points: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Single end-to-end run: modes, rates, moment integration, witness
    Run {
        /// JSON configuration file; defaults describe the baseline device
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also write the moment trajectory to <out>.trajectory.csv
        #[arg(long)]
        emit_trajectory: bool,
    },
    /// Parameter sweep: either a named preset or an explicit axis grid
    Sweep {
        /// One of: fig2, fig3a, fig3b, fig4a, fig4b, fig5a, fig5b, fig6a, fig6b
        #[arg(long, conflicts_with_all = ["axis", "from", "to", "points"])]
        preset: Option<String>,
        /// One of: length, pump, photons, frequency
        #[arg(long)]
        axis: Option<String>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// JSON configuration file the sweep starts from
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; multi-curve presets in CSV write one file per curve
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_path(p),
        None => Ok(RunConfig::default()),
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dispersion {
            config,
            from,
            to,
            points,
            out,
            format,
        } => {
            let config = load_config(config.as_deref())?;
            let rows = harness::dispersion_table(&config, from, to, points)?;
            let text = match format {
                Format::Csv => emit::dispersion_csv(&rows),
                Format::Json => emit::to_json(&rows)?,
            };
            emit::write_output(out.as_deref(), &text)
        }
        Command::Run {
            config,
            out,
            format,
            emit_trajectory,
        } => {
            let mut config = load_config(config.as_deref())?;
            if emit_trajectory {
                config.numerics.emit_trajectory = true;
            }
            if config.numerics.emit_trajectory && out.is_none() {
                return Err(Error::Config(
                    "a trajectory needs --out so the sidecar file has somewhere to go".into(),
                ));
            }
            let output = harness::run_single(&config)?;
            for warning in &output.result.diagnostics.warnings {
                eprintln!("warning: {warning}");
            }
            let text = match format {
                Format::Json => emit::to_json(&output.result)?,
                Format::Csv => emit::run_csv(&output.result),
            };
            emit::write_output(out.as_deref(), &text)?;
            if let Some(trajectory) = &output.trajectory {
                let path = trajectory_path(out.as_deref().expect("out checked above"));
                emit::write_output(Some(&path), &emit::trajectory_csv(trajectory))?;
            }
            Ok(())
        }
        Command::Sweep {
            preset,
            axis,
            from,
            to,
            points,
            config,
            out,
            format,
        } => {
            let base = load_config(config.as_deref())?;
            match (preset, axis) {
                (Some(name), None) => run_preset(&base, &name, out.as_deref(), format),
                (None, Some(axis)) => {
                    let axis: SweepAxis = axis.parse()?;
                    let (from, to, points) = match (from, to, points) {
                        (Some(f), Some(t), Some(p)) => (f, t, p),
                        _ => {
                            return Err(Error::Config(
                                "an axis sweep needs --from, --to, and --points".into(),
                            ))
                        }
                    };
                    let grid = harness::linear_grid(from, to, points)?;
                    let rows = harness::sweep(&base, axis, &grid);
                    report_row_errors(&rows);
                    let text = match format {
                        Format::Csv => emit::sweep_csv(&rows),
                        Format::Json => emit::to_json(&rows)?,
                    };
                    emit::write_output(out.as_deref(), &text)?;
                    fail_if_nothing_ran(&rows)
                }
                (None, None) => Err(Error::Config(
                    "sweep needs either --preset or --axis".into(),
                )),
                (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
            }
        }
    }
}

fn run_preset(base: &RunConfig, name: &str, out: Option<&Path>, format: Format) -> Result<()> {
    let preset = harness::preset(name).ok_or_else(|| {
        Error::Config(format!(
            "unknown preset '{name}' (available: {})",
            harness::PRESET_NAMES.join(", ")
        ))
    })?;
    match preset.kind {
        PresetKind::Dispersion {
            from_hz,
            to_hz,
            points,
        } => {
            let rows = harness::dispersion_table(base, from_hz, to_hz, points)?;
            let text = match format {
                Format::Csv => emit::dispersion_csv(&rows),
                Format::Json => emit::to_json(&rows)?,
            };
            emit::write_output(out, &text)
        }
        PresetKind::Sweep {
            axis,
            from,
            to,
            points,
            scale,
            ref curves,
        } => {
            let results = harness::run_preset_sweep(base, axis, from, to, points, scale, curves)?;
            for curve in &results {
                report_row_errors(&curve.rows);
            }
            let descriptor = serde_json::json!({
                "preset": preset.name,
                "axis": axis.name(),
                "from": from,
                "to": to,
                "points": points,
                "scale": scale,
            });
            match format {
                Format::Json => {
                    let mut doc = descriptor;
                    doc["curves"] = serde_json::to_value(&results).map_err(|e| Error::Domain {
                        module: "emit",
                        message: format!("serialization failed: {e}"),
                    })?;
                    emit::write_output(out, &emit::to_json(&doc)?)?;
                }
                Format::Csv => {
                    // one table per curve; the sidecar records what was run
                    let out = out.ok_or_else(|| {
                        Error::Config(
                            "a multi-curve preset in CSV needs --out (one file per curve)".into(),
                        )
                    })?;
                    let mut curve_files = Vec::new();
                    for curve in &results {
                        let path = curve_path(out, &curve.label);
                        emit::write_output(Some(&path), &emit::sweep_csv(&curve.rows))?;
                        curve_files.push(serde_json::json!({
                            "label": curve.label,
                            "overrides": curve.overrides,
                            "file": path.file_name().unwrap_or_default().to_string_lossy(),
                        }));
                    }
                    let mut doc = descriptor;
                    doc["curves"] = serde_json::Value::Array(curve_files);
                    emit::write_output(Some(&meta_path(out)), &emit::to_json(&doc)?)?;
                }
            }
            let all_rows: Vec<&SweepRow> = results.iter().flat_map(|c| c.rows.iter()).collect();
            if !all_rows.is_empty() && all_rows.iter().all(|r| r.result.is_none()) {
                return Err(Error::Domain {
                    module: "harness",
                    message: "every sweep point failed".into(),
                });
            }
            Ok(())
        }
    }
}

fn report_row_errors(rows: &[SweepRow]) {
    for row in rows {
        if let Some(err) = &row.error {
            eprintln!("warning: point {} failed: {err}", row.axis_value);
        }
    }
}

fn fail_if_nothing_ran(rows: &[SweepRow]) -> Result<()> {
    if !rows.is_empty() && rows.iter().all(|r| r.result.is_none()) {
        return Err(Error::Domain {
            module: "harness",
            message: "every sweep point failed".into(),
        });
    }
    Ok(())
}

/// `res.json` -> `res.json.trajectory.csv`
fn trajectory_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|s| s.to_os_string())
        .unwrap_or_default();
    name.push(".trajectory.csv");
    out.with_file_name(name)
}

/// `res.csv` + label `fm_5ghz` -> `res.fm_5ghz.csv`
fn curve_path(out: &Path, label: &str) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    let ext = out
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    out.with_file_name(format!("{stem}.{label}.{ext}"))
}

/// `res.csv` -> `res.meta.json`
fn meta_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.meta.json"))
}
