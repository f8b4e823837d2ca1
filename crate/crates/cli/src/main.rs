use std::fs;
use std::process::ExitCode;

use clap::Parser;
use credal_cli::commands::error_json;
use credal_cli::{run, Cli, CliError, Format};

fn write_json(path: &std::path::Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(value).expect("json value serializes");
    body.push('\n');
    fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|report| {
        if let Some(path) = &cli.out {
            write_json(path, &report.json)?;
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("serializes")),
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            let body = error_json(cli.command.name(), cli.scenario.as_deref(), &err);
            if cli.format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&body).expect("serializes"));
            }
            if let Some(path) = &cli.out {
                if let Err(e) = write_json(path, &body) {
                    eprintln!("error: {e}");
                }
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
