mod args;
mod commands;
mod error;
mod output;
mod settings;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;
use commands::{dispatch, write_output, Ctx};
use cutdens::Guards;
use error::{CliError, CliResult};
use output::{render, Envelope, Format, TOOL, VERSION};
use settings::Settings;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cutdens: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    let mut settings = Settings::load(g.config.as_deref())?;
    let seed = settings.seed(g.seed);
    let guards_mode = settings.text("guards", g.guards.as_deref(), Some("on")).unwrap_or_default();
    let guards = match guards_mode.as_str() {
        "on" => Guards::default(),
        "off" => {
            eprintln!("cutdens warning: resource guards are off; exact routines may run for a very long time");
            Guards::off()
        }
        other => {
            settings.diagnostics.input(format!("--guards `{other}` must be on or off"));
            Guards::default()
        }
    };
    let format: Option<Format> = settings.get("out", g.out.as_deref(), Some("json"));
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(CliError::input("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::failure(e.to_string()))?;
    }

    let command = cli.command.name();
    let mut ctx = Ctx {
        s: &mut settings,
        guards,
        seed,
        check: g.check,
    };
    let Some(output) = dispatch(&cli.command, &mut ctx)? else {
        let report = json!({ "command": command, "valid": true, "diagnostics": [] });
        return write_output(g.output.as_deref(), &format!("{report:#}\n"));
    };
    let envelope = Envelope {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        command: command.to_string(),
        seed,
        guards: guards_mode,
        config: settings.echo().clone(),
        result: output.result,
    };
    let text = render(&envelope, &output.table, format.unwrap_or(Format::Json));
    write_output(g.output.as_deref(), &text)
}
