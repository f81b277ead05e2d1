//! End-to-end analysis: source text in, readings and diagram out, with one
//! error type that fixes the process exit code.

use std::fmt;

use crate::parse::{self, ParseError, SemanticError};
use wildrep_core::{
    diagram, diagram_eq, distinct_forest_count, readings, realize, verify_readings, Diagram,
    Error, Flavor, GlobalClass, NearbyReadings,
};

/// What went wrong, coarse enough to pick an exit code: 2 for input that
/// cannot be read or parsed, 3 for well-formed input describing invalid
/// data, 4 for a failure of the analysis itself.
#[derive(Debug)]
pub enum CliError {
    Read { path: String, err: String },
    Parse(ParseError),
    Json(String),
    Semantic(String),
    Engine(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse(_) | CliError::Json(_) => 2,
            CliError::Semantic(_) => 3,
            CliError::Engine(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Read { path, err } => write!(f, "cannot read {path}: {err}"),
            CliError::Parse(e) => write!(f, "syntax error at {e}"),
            CliError::Json(e) => write!(f, "invalid forest JSON: {e}"),
            CliError::Semantic(e) => write!(f, "invalid class: {e}"),
            CliError::Engine(e) => write!(f, "analysis failed: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl From<SemanticError> for CliError {
    fn from(e: SemanticError) -> Self {
        CliError::Semantic(e.0)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

/// Everything the analysis produces for one class.
#[derive(Debug)]
pub struct Analysis {
    pub name: String,
    pub source: String,
    /// The class analyzed, always in stripped form.
    pub class: GlobalClass,
    pub readings: NearbyReadings,
    pub diagram: Diagram,
    pub distinct_forests: usize,
}

/// Runs the whole pipeline on one source text. With `unmodified` the text
/// is taken to describe the full formal data and the trivial tame blocks
/// are stripped first.
pub fn analyze_source(src: &str, unmodified: bool) -> Result<Analysis, CliError> {
    let ast = parse::parse(src)?;
    let flavor = if unmodified {
        Flavor::Unmodified
    } else {
        Flavor::Modified
    };
    let g = parse::build(&ast, flavor)?;
    let g = if unmodified { g.modify()? } else { g };
    analyze_class(ast.name, src.to_string(), g)
}

/// Runs the pipeline on an already built stripped class.
pub fn analyze_class(
    name: String,
    source: String,
    class: GlobalClass,
) -> Result<Analysis, CliError> {
    let readings = readings(&class)?;
    let diagram = diagram(&class)?;
    let distinct_forests = distinct_forest_count(&readings);
    Ok(Analysis {
        name,
        source,
        class,
        readings,
        diagram,
        distinct_forests,
    })
}

/// Cross-checks an analysis: reading ranks must match both their closed
/// form and their forests, and realizing any reading's forest must yield a
/// class with the same diagram.
pub fn verify_analysis(a: &Analysis) -> Result<(), CliError> {
    verify_readings(&a.readings)?;
    let mut all = vec![&a.readings.generic];
    all.extend(a.readings.nearby.iter());
    for r in all {
        let g = realize(&r.forest)?;
        let d = diagram(&g)?;
        if !diagram_eq(&d, &a.diagram) {
            return Err(CliError::Engine(Error::Invalid(format!(
                "the realized {} reading has a different diagram",
                r.label
            ))));
        }
    }
    Ok(())
}
