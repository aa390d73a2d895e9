//! Command-line front end for `cyclefit`: flag and config handling, output
//! bundles, and SVG charts.

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;

pub mod args;
pub mod bundle;
pub mod commands;
pub mod error;
pub mod settings;
pub mod svg;

pub use bundle::Bundle;
pub use error::CliError;
pub use settings::Settings;

use args::{Cli, Command};

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn flags_json<T: serde::Serialize>(parts: &[&T]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for part in parts {
        if let serde_json::Value::Object(m) = serde_json::to_value(part).expect("flags serialize") {
            map.extend(m);
        }
    }
    serde_json::Value::Object(map)
}

/// Settings and bundle for a parsed command line, without touching the
/// output directory.
pub fn build(command: &Command) -> Result<(Settings, Bundle), CliError> {
    match command {
        Command::Analyze { data, model } => {
            let mut flags = flags_json(&[data]);
            merge(&mut flags, flags_json(&[model]));
            let s = Settings::resolve(data.config.as_deref(), flags)?;
            let b = commands::analyze(&s)?;
            Ok((s, b))
        }
        Command::RwmTest { data } => {
            let s = Settings::resolve(data.config.as_deref(), flags_json(&[data]))?;
            let b = commands::rwm_test(&s)?;
            Ok((s, b))
        }
        Command::Forecast { data, model, forecast } => {
            let mut flags = flags_json(&[data]);
            merge(&mut flags, flags_json(&[model]));
            merge(&mut flags, flags_json(&[forecast]));
            let s = Settings::resolve(data.config.as_deref(), flags)?;
            let b = commands::forecast_cmd(&s)?;
            Ok((s, b))
        }
        Command::Simulate { sim } => {
            let s = Settings::resolve(sim.config.as_deref(), flags_json(&[sim]))?;
            let b = commands::simulate(&s)?;
            Ok((s, b))
        }
    }
}

fn merge(into: &mut serde_json::Value, from: serde_json::Value) {
    if let (serde_json::Value::Object(a), serde_json::Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

/// Parse `argv`, run the command and write its outputs. Returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 4 } else { 0 };
        }
    };
    let result = build(&cli.command).and_then(|(settings, bundle)| {
        bundle.write_to(&settings.out)?;
        Ok((settings, bundle))
    });
    match result {
        Ok((settings, bundle)) => {
            println!(
                "{}: wrote {} files to {}",
                cli.command.name(),
                bundle.names().count(),
                settings.out.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
