use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use toposkit_cli::{run_command, Command, Flags, Format, Input, Scope};

/// Checks sheaf conditions, sheafifies, and audits Giraud's axioms on
/// finite sites described in a small text format.
#[derive(Parser, Debug)]
#[command(name = "toposkit", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Site document; optional for `giraud-audit --scope rmod`.
    file: Option<PathBuf>,
    #[arg(long)]
    presheaf: Option<String>,
    #[arg(long)]
    object: Option<String>,
    /// Ring such as `Z/4` or `Z/2 x Z/3`.
    #[arg(long)]
    ring: Option<String>,
    /// Size bound for enumerated modules or presheaf values.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Where `sheafify` writes the resulting document.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Scope::Rmod)]
    scope: Scope,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let input = match &cli.file {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => Some(Input { path: path.display().to_string(), text }),
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let flags = Flags {
        presheaf: cli.presheaf,
        object: cli.object,
        ring: cli.ring,
        bound: cli.bound,
        format: cli.format,
        out: cli.out,
        scope: cli.scope,
    };
    let outcome = run_command(cli.command, input.as_ref(), &flags);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.exit_code as u8)
}
