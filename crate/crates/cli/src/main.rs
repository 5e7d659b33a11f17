//! `kbctl`: check ontologies, ingest annotated documents, query and
//! manage the ontology version of a workspace.

mod commands;
mod error;
mod manifest;
mod sources;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ontokb::Mode;

#[derive(Debug, Parser)]
#[command(name = "kbctl", version, about = "Frame-logic knowledge base workspace tool")]
struct Cli {
    /// Workspace directory holding `kbctl.manifest`.
    #[arg(long, global = true, default_value = ".")]
    workspace: PathBuf,
    /// Reject ill-typed facts and unknown names (the default).
    #[arg(long, global = true, conflicts_with = "lenient")]
    strict: bool,
    /// Keep going past unknown names and repairable markup, with warnings.
    #[arg(long, global = true)]
    lenient: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and check ontology sources. Without files, checks the workspace.
    Check { files: Vec<PathBuf> },
    /// Evaluate a query against the saturated workspace.
    Query(QueryArgs),
    /// Ingest RDF-annotated documents into the workspace.
    Ingest {
        #[arg(required = true)]
        docs: Vec<PathBuf>,
        /// Map every member of an Alt container, not only the first.
        #[arg(long)]
        all_alternatives: bool,
    },
    /// Show or bump the ontology version.
    Version {
        #[command(subcommand)]
        action: VersionAction,
    },
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Query text, e.g. `FORALL X <- X : TPerson.`
    #[arg(short = 'q', long = "query", conflicts_with = "file", required_unless_present = "file")]
    text: Option<String>,
    /// File holding the query.
    #[arg(short = 'f', long = "file")]
    file: Option<PathBuf>,
    /// Print derivation traces for the facts supporting row N (1-based).
    #[arg(long, value_name = "N")]
    explain: Option<usize>,
    /// Tab-separated output.
    #[arg(long)]
    tsv: bool,
}

#[derive(Debug, Subcommand)]
enum VersionAction {
    Show,
    Bump,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mode = match (cli.strict, cli.lenient) {
        (_, true) => Some(Mode::Lenient),
        (true, _) => Some(Mode::Strict),
        _ => None,
    };
    let result = match cli.command {
        Command::Check { files } => commands::check::run(&cli.workspace, mode, &files),
        Command::Query(args) => commands::query::run(&cli.workspace, mode, &args),
        Command::Ingest { docs, all_alternatives } => commands::ingest::run(&cli.workspace, mode, &docs, all_alternatives),
        Command::Version { action: VersionAction::Show } => commands::version::show(&cli.workspace),
        Command::Version { action: VersionAction::Bump } => commands::version::bump(&cli.workspace, mode),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kbctl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn strict_and_lenient_conflict() {
        assert!(Cli::try_parse_from(["kbctl", "--strict", "--lenient", "version", "show"]).is_err());
    }

    #[test]
    fn query_needs_text_or_file() {
        assert!(Cli::try_parse_from(["kbctl", "query"]).is_err());
        assert!(Cli::try_parse_from(["kbctl", "query", "-q", "x", "-f", "y"]).is_err());
        assert!(Cli::try_parse_from(["kbctl", "query", "-q", "FORALL X <- X : A."]).is_ok());
    }
}
