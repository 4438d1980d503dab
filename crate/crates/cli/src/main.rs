mod args;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use catlike_core::output::{render, write_figure};
use catlike_core::{
    reports_to_json, run_battery, run_preset, run_scenario, run_z_sweep, AlgebraKind, Error, Figure,
    FigurePreset, OutputFormat,
};
use clap::Parser;

use args::{resolve, resolve_sweep, Cli, Command};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Bad input is a usage error; anything the physics rejects is a failure.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::UnknownPreset(_) => EXIT_USAGE,
        Error::Scenario { source, .. } => exit_code(source),
        _ => EXIT_FAILURE,
    }
}

fn dispatch(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Run { scenario, output } => {
            let r = resolve(&scenario, &output, AlgebraKind::Gha)?;
            if r.algebra.is_none() {
                return Err(Error::Config("missing `--algebra` (gha|su11)".into()));
            }
            let figure = Figure::single(run_scenario(&r.config)?);
            emit(&figure, r.format, r.out.as_deref())?;
        }
        Command::SweepZ {
            scenario,
            t,
            zmin,
            zmax,
            points,
            output,
        } => {
            let r = resolve(&scenario, &output, AlgebraKind::Gha)?;
            if r.algebra.is_none() {
                return Err(Error::Config("missing `--algebra` (gha|su11)".into()));
            }
            let sweep = resolve_sweep(&r.file, t, zmin, zmax, points);
            let figure = Figure::single(run_z_sweep(&r.config, &sweep)?);
            emit(&figure, r.format, r.out.as_deref())?;
        }
        Command::Preset { id, output } => {
            let format = output.format.unwrap_or_default();
            if id == "all" {
                let dir = output
                    .out
                    .ok_or_else(|| Error::Config("`preset all` needs --out DIR".into()))?;
                fs::create_dir_all(&dir)?;
                for preset in FigurePreset::ALL {
                    let path = preset_path(&dir, preset, format);
                    emit(&run_preset(preset)?, format, Some(&path))?;
                    eprintln!("wrote {}", path.display());
                }
            } else {
                let preset: FigurePreset = id.parse()?;
                emit(&run_preset(preset)?, format, output.out.as_deref())?;
            }
        }
        Command::Validate { scenario, output } => {
            let r = resolve(&scenario, &output, AlgebraKind::Gha)?;
            let kinds: Vec<AlgebraKind> = match r.algebra {
                Some(kind) => vec![kind],
                None => AlgebraKind::ALL.to_vec(),
            };
            let reports: Vec<_> = kinds
                .into_iter()
                .map(|algebra| {
                    run_battery(&catlike_core::ScenarioConfig {
                        algebra,
                        ..r.config.clone()
                    })
                })
                .collect();
            let text = match r.format {
                OutputFormat::Json => reports_to_json(&reports)?,
                OutputFormat::Csv => reports.iter().map(|rep| format!("{rep}\n")).collect(),
            };
            write_text(&text, r.out.as_deref())?;
            if !reports.iter().all(|rep| rep.passed()) {
                return Ok(ExitCode::from(EXIT_FAILURE));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn preset_path(dir: &Path, preset: FigurePreset, format: OutputFormat) -> PathBuf {
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    dir.join(format!("{}.{ext}", preset.id()))
}

fn emit(figure: &Figure, format: OutputFormat, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => write_figure(BufWriter::new(File::create(path)?), figure, format),
        None => write_text(&render(figure, format)?, None),
    }
}

fn write_text(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
