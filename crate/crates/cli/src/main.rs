use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use padic_radii_cli::{execute, load_document, svg, Report};

#[derive(Parser)]
#[command(name = "padic-radii", version, about = "Exact radii of convergence for p-adic differential modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task in a problem document.
    Run {
        doc: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write each breakpoint table as a CSV file.
        #[arg(long)]
        csv_dir: Option<PathBuf>,
        /// Write an SVG plot per computed profile.
        #[arg(long)]
        svg_dir: Option<PathBuf>,
        /// Omit the timestamp so reports are byte-identical across runs.
        #[arg(long)]
        reproducible: bool,
    },
    /// Run only the `check` tasks.
    Check {
        doc: PathBuf,
        #[arg(long)]
        reproducible: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("padic-radii: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    if let Ok(n) = std::env::var("PADIC_RADII_THREADS") {
        let n: usize = n.parse().map_err(|_| format!("PADIC_RADII_THREADS={n} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    let (doc_path, checks_only, reproducible) = match &cli.command {
        Command::Run { doc, reproducible, .. } => (doc, false, *reproducible),
        Command::Check { doc, reproducible } => (doc, true, *reproducible),
    };
    let text = std::fs::read_to_string(doc_path).map_err(|e| format!("{}: {e}", doc_path.display()))?;
    let doc = load_document(&text).map_err(|e| format!("{}: {e}", doc_path.display()))?;
    let report = execute(&doc, checks_only);

    let stamp = (!reproducible).then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
    let json = report.to_json(stamp);
    match &cli.command {
        Command::Run { out: Some(path), .. } => write(path, &json)?,
        _ => print!("{json}"),
    }
    if let Command::Run { csv_dir, svg_dir, .. } = &cli.command {
        if let Some(dir) = csv_dir {
            emit(dir, &report, "csv", |_, a| a.csv.clone())?;
        }
        if let Some(dir) = svg_dir {
            emit(dir, &report, "svg", |title, a| svg::render(title, &a.curves))?;
        }
    }
    Ok(report.all_ok())
}

fn emit(
    dir: &Path,
    report: &Report,
    ext: &str,
    body: impl Fn(&str, &padic_radii_cli::execute::Artifact) -> String,
) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    for t in &report.tasks {
        for a in &t.artifacts {
            let stem = format!("{}-{}", t.file_stem(), a.name);
            write(&dir.join(format!("{stem}.{ext}")), &body(&stem, a))?;
        }
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}
