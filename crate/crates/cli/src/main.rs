//! The `wildrep` binary: analyze class descriptions, browse the built-in
//! Painlevé catalog, realize forests.
//!
//! Exit codes: 0 success, 2 unreadable or unparsable input, 3 well-formed
//! input describing invalid data, 4 analysis or output failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wildrep_cli::pipeline::{analyze_source, verify_analysis, Analysis, CliError};
use wildrep_cli::{catalog, dot, print, report};

#[derive(Parser)]
#[command(
    name = "wildrep",
    version,
    about = "Readings and diagrams for the formal data of connections on the sphere"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze a class description file
    Analyze {
        /// Path to a class description
        file: PathBuf,
        /// Write the JSON report to this path
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Write DOT renderings into this directory
        #[arg(long, value_name = "DIR")]
        dot_dir: Option<PathBuf>,
        /// Treat the input as full formal data and strip it first
        #[arg(long)]
        unmodified: bool,
        /// Re-derive every reading's rank and realized diagram, failing on
        /// any mismatch
        #[arg(long)]
        verify_readings: bool,
    },
    /// Analyze a built-in Painlevé class
    Painleve {
        /// One of PI, PII, PIII2, PIII1, PIII0, PIV, PV, PVI, or `all`
        name: String,
        /// Write the JSON report (an array for `all`) to this path
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Write DOT renderings into this directory
        #[arg(long, value_name = "DIR")]
        dot_dir: Option<PathBuf>,
    },
    /// Realize a fission forest file as a concrete class
    Realize {
        /// Path to a forest in the JSON shape reports use
        forest: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wildrep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Analyze {
            file,
            json,
            dot_dir,
            unmodified,
            verify_readings,
        } => {
            let src = read_input(&file)?;
            let a = analyze_source(&src, unmodified)?;
            if verify_readings {
                verify_analysis(&a)?;
            }
            print!("{}", render_text(&a, verify_readings));
            if let Some(path) = &json {
                write_output(path, &report::to_json(&report::report(&a)))?;
            }
            if let Some(dir) = &dot_dir {
                write_dots(dir, &a)?;
            }
            Ok(())
        }
        Cmd::Painleve {
            name,
            json,
            dot_dir,
        } => {
            let entries: Vec<&catalog::CatalogEntry> = if name.eq_ignore_ascii_case("all") {
                catalog::CATALOG.iter().collect()
            } else {
                vec![catalog::get(&name).ok_or_else(|| {
                    CliError::Semantic(format!(
                        "no class named `{name}`; known names: {}, all",
                        catalog::names().join(", ")
                    ))
                })?]
            };
            let mut reports = Vec::with_capacity(entries.len());
            for e in entries {
                let a = analyze_source(e.source, false)?;
                print!("{}", render_text(&a, false));
                if let Some(dir) = &dot_dir {
                    write_dots(dir, &a)?;
                }
                reports.push(report::report(&a));
            }
            if let Some(path) = &json {
                let body = if reports.len() == 1 {
                    report::to_json(&reports[0])
                } else {
                    let mut s = serde_json::to_string_pretty(&reports)
                        .expect("report serialization cannot fail");
                    s.push('\n');
                    s
                };
                write_output(path, &body)?;
            }
            Ok(())
        }
        Cmd::Realize { forest } => {
            let src = read_input(&forest)?;
            let dto: report::ForestDto =
                serde_json::from_str(&src).map_err(|e| CliError::Json(e.to_string()))?;
            let f = report::forest_from_dto(&dto)?;
            let g = wildrep_core::realize(&f)?;
            print!("{}", print::print_class("realized", &g)?);
            Ok(())
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.display().to_string(),
        err: e.to_string(),
    })
}

fn write_output(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Engine(wildrep_core::Error::Invalid(
        format!("cannot write {}: {e}", path.display()),
    )))
}

fn write_dots(dir: &Path, a: &Analysis) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Engine(wildrep_core::Error::Invalid(format!(
            "cannot create {}: {e}",
            dir.display()
        )))
    })?;
    let name = dot::sanitize(&a.name);
    write_output(
        &dir.join(format!("{name}.enriched.dot")),
        &dot::tree_dot("enriched", a.readings.enriched.tree()),
    )?;
    let mut readings = vec![&a.readings.generic];
    readings.extend(a.readings.nearby.iter());
    for r in readings {
        write_output(
            &dir.join(format!("{name}.reading.{}.dot", dot::sanitize(&r.label))),
            &dot::forest_dot(&format!("reading_{}", dot::sanitize(&r.label)), &r.forest),
        )?;
    }
    write_output(
        &dir.join(format!("{name}.diagram.dot")),
        &dot::diagram_dot("diagram", &a.diagram),
    )?;
    Ok(())
}

fn render_text(a: &Analysis, verified: bool) -> String {
    let mut out = String::new();
    let r = &a.readings;
    let _ = writeln!(
        out,
        "class {}: k = {}, distinct forests {}",
        a.name,
        r.enriched.k(),
        a.distinct_forests
    );
    let word: Vec<String> = r.enriched.word().iter().map(|e| e.to_string()).collect();
    let _ = writeln!(out, "  enriched word: {}", word.join(", "));
    for g in r.enriched.groups() {
        let members: Vec<String> = g.members.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(
            out,
            "  group lambda = {}: entries {{{}}}",
            g.lambda,
            members.join(", ")
        );
    }
    let _ = writeln!(out, "  readings (rank, finite + infinity singularities):");
    for reading in std::iter::once(&r.generic).chain(r.nearby.iter()) {
        let _ = writeln!(
            out,
            "    {:<10} rank {:<3} singularities {} + 1   forest {}",
            reading.label, reading.rank, reading.finite_singularities, reading.forest
        );
    }
    let _ = writeln!(out, "  diagram:");
    for (i, n) in a.diagram.nodes.iter().enumerate() {
        let leg = if n.leg.is_empty() {
            String::new()
        } else {
            let chain: Vec<String> = n.leg.iter().map(|d| d.to_string()).collect();
            format!("  leg [{}]", chain.join(", "))
        };
        let _ = writeln!(
            out,
            "    node {i}: {} at {}  mult {}{leg}",
            n.circle, n.point, n.mult
        );
    }
    for row in &a.diagram.b {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
        let _ = writeln!(out, "    B [{}]", cells.join(" "));
    }
    let _ = writeln!(out, "  dimension: {}", a.diagram.dimension());
    if verified {
        let _ = writeln!(out, "  readings verified: ranks and realized diagrams agree");
    }
    out
}
