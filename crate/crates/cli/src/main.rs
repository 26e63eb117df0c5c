use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use mmfield_cli::{args::Command, Cli, EXIT_OK, EXIT_USAGE};

fn write(path: &std::path::Path, text: &str) -> std::io::Result<()> {
    std::fs::write(path, text)
}

fn main() {
    mmfield_cli::init_threads();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let outcome = mmfield_cli::run(&cli);
    let text = serde_json::to_string_pretty(&outcome.json).expect("json serializes") + "\n";
    let out = cli.global.out.clone();
    let result = match &out {
        Some(p) => write(p, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = result {
        eprintln!("mmfield: cannot write output: {e}");
        std::process::exit(EXIT_USAGE);
    }
    if let Some(svg) = &outcome.svg {
        let is_demo = matches!(cli.command, Command::Demo { .. });
        if cli.global.emit_svg || is_demo {
            let path = match (&out, &cli.command) {
                (Some(p), _) => p.with_extension("svg"),
                (None, Command::Demo { figure }) => PathBuf::from(format!("{figure:?}.svg").to_lowercase()),
                (None, _) => PathBuf::from("mmfield.svg"),
            };
            if let Err(e) = write(&path, svg) {
                eprintln!("mmfield: cannot write {}: {e}", path.display());
                std::process::exit(EXIT_USAGE);
            }
        }
    }
    std::process::exit(outcome.code);
}
