//! CSV and JSON writers for figures.
//!
//! Both formats require every trace of a figure to share one grid; values
//! are printed with 17 significant digits so they round-trip exactly.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{Abscissa, Figure, FigurePreset, ScenarioRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (expected csv|json)"))),
        }
    }
}

fn shared_grid(figure: &Figure) -> Result<(Abscissa, &[f64])> {
    let first = figure
        .traces
        .first()
        .ok_or_else(|| Error::Config("figure has no traces".into()))?;
    for trace in &figure.traces[1..] {
        if trace.abscissa != first.abscissa || trace.points != first.points {
            return Err(Error::Config(format!(
                "traces {} and {} use different grids",
                first.scenario.label, trace.scenario.label
            )));
        }
    }
    Ok((first.abscissa, &first.points))
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// `t,<label>,...` (or `z,...` for sweeps), one row per grid point.
pub fn to_csv(figure: &Figure) -> Result<String> {
    let (abscissa, points) = shared_grid(figure)?;
    let mut out = String::from(abscissa.as_str());
    for trace in &figure.traces {
        out.push(',');
        out.push_str(&trace.scenario.label);
    }
    out.push('\n');
    for (i, p) in points.iter().enumerate() {
        out.push_str(&number(*p));
        for trace in &figure.traces {
            let _ = write!(out, ",{}", number(trace.values[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize)]
struct JsonScenario<'a> {
    preset: Option<FigurePreset>,
    abscissa: Abscissa,
    curves: Vec<&'a ScenarioRecord>,
}

#[derive(Serialize)]
struct JsonRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<f64>,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct JsonFigure<'a> {
    scenario: JsonScenario<'a>,
    series: Vec<JsonRow>,
}

/// `{"scenario": {...}, "series": [{"t": .., "values": [..]}, ...]}`; the
/// order of `values` follows `scenario.curves`.
pub fn to_json(figure: &Figure) -> Result<String> {
    let (abscissa, points) = shared_grid(figure)?;
    let series = points
        .iter()
        .enumerate()
        .map(|(i, &p)| JsonRow {
            t: (abscissa == Abscissa::T).then_some(p),
            z: (abscissa == Abscissa::Z).then_some(p),
            values: figure.traces.iter().map(|tr| tr.values[i]).collect(),
        })
        .collect();
    let doc = JsonFigure {
        scenario: JsonScenario {
            preset: figure.preset,
            abscissa,
            curves: figure.traces.iter().map(|t| &t.scenario).collect(),
        },
        series,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

pub fn render(figure: &Figure, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv(figure),
        OutputFormat::Json => to_json(figure),
    }
}

pub fn write_figure<W: Write>(mut sink: W, figure: &Figure, format: OutputFormat) -> Result<()> {
    sink.write_all(render(figure, format)?.as_bytes())?;
    sink.flush()?;
    Ok(())
}
