use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fusionbp::bimodule::enumerate_fusion_bimodules;

// stdout writes ignore a closed pipe
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! out_ln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}
use fusionbp::fusionring::builtin::{ah1_from_table, ah2_from_presentation, ah3_from_presentation, builtin_ring};
use fusionbp::groupoid::{Subject, World};
use fusionbp::io::{self, IoError};
use fusionbp::nimrep::{enumerate_fusion_modules, Side};
use fusionbp::report::{self, PipelineError};
use fusionbp::subfactors::{count_subfactors, principal_graphs};
use fusionbp::workspace::{Stage, Workspace, WorkspaceError, AH_RINGS};

#[derive(Parser)]
#[command(name = "fusionbp", version, about = "Fusion modules, bimodules and Morita autoequivalences of the Asaeda-Haagerup rings")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fusion ring files.
    Ring {
        #[command(subcommand)]
        cmd: RingCmd,
    },
    /// Fusion module catalogs.
    Modules {
        #[command(subcommand)]
        cmd: ModulesCmd,
    },
    /// Fusion bimodule catalogs.
    Bimodules {
        #[command(subcommand)]
        cmd: BimodulesCmd,
    },
    /// Multiplicative compatibility tables.
    Compat {
        #[command(subcommand)]
        cmd: CompatCmd,
    },
    /// Realization deduction.
    Groupoid {
        #[command(subcommand)]
        cmd: GroupoidCmd,
    },
    /// Subfactor census.
    Subfactors {
        #[command(subcommand)]
        cmd: SubfactorsCmd,
    },
    /// Principal graph export.
    Graphs {
        #[command(subcommand)]
        cmd: GraphsCmd,
    },
    /// Reports over a finished workspace.
    Report {
        #[command(subcommand)]
        cmd: ReportCmd,
    },
}

#[derive(Subcommand)]
enum RingCmd {
    /// Print a built-in ring.
    Builtin {
        name: String,
        /// Recompute from the multiplication table or presentation instead
        /// of loading the stored snapshot.
        #[arg(long)]
        derive: bool,
    },
    /// Parse and validate a ring file.
    Validate { file: PathBuf },
}

#[derive(Subcommand)]
enum ModulesCmd {
    Enumerate {
        #[arg(long)]
        ring: PathBuf,
        #[arg(long, default_value = "left")]
        side: Side,
    },
}

#[derive(Subcommand)]
enum BimodulesCmd {
    Enumerate {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
}

#[derive(Args)]
struct WorkspaceArg {
    /// Workspace root; falls back to $FUSIONBP_WORKSPACE, then ./workspace.
    #[arg(long)]
    workspace: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CompatCmd {
    Tables {
        #[command(flatten)]
        ws: WorkspaceArg,
    },
}

#[derive(Subcommand)]
enum GroupoidCmd {
    Deduce {
        #[command(flatten)]
        ws: WorkspaceArg,
    },
}

#[derive(Subcommand)]
enum SubfactorsCmd {
    Count {
        #[command(flatten)]
        ws: WorkspaceArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
}

#[derive(Subcommand)]
enum GraphsCmd {
    Export {
        /// Catalog id such as AH1-AH2-3.
        #[arg(long)]
        bimodule: String,
        /// Basis index of the generating object.
        #[arg(long)]
        object: usize,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
        #[command(flatten)]
        ws: WorkspaceArg,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    Acceptance {
        #[command(flatten)]
        ws: WorkspaceArg,
    },
}

enum Failure {
    Invalid(String),
    Usage(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.exit_code() == 2 {
            Failure::Usage(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl From<WorkspaceError> for Failure {
    fn from(e: WorkspaceError) -> Self {
        PipelineError::from(e).into()
    }
}

fn io_failure(path: &std::path::Path, e: IoError) -> Failure {
    match e {
        IoError::Parse { .. } => Failure::Usage(format!("{}: {e}", path.display())),
        IoError::Invalid(_) => Failure::Invalid(format!("{}: {e}", path.display())),
    }
}

fn read_ring(path: &PathBuf) -> Result<fusionbp::fusionring::FusionRing, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    io::parse_ring(&text).map_err(|e| io_failure(path, e))
}

/// Rings and catalog, building whichever is missing or stale.
fn prepare(ws: &Workspace) -> Result<(), Failure> {
    if !ws.is_current(Stage::Rings) {
        eprintln!("initialising rings in {}", ws.root().display());
        ws.init_rings(&AH_RINGS)?;
    }
    if !ws.is_current(Stage::Catalog) {
        eprintln!("enumerating modules and bimodules");
        ws.build_catalog()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ring { cmd } => match cmd {
            RingCmd::Builtin { name, derive } => {
                let r = if derive {
                    match name.as_str() {
                        "AH1" => ah1_from_table(),
                        "AH2" => ah2_from_presentation(),
                        "AH3" => ah3_from_presentation(),
                        _ => builtin_ring(&name),
                    }
                } else {
                    builtin_ring(&name)
                };
                let r = r.map_err(|e| Failure::Usage(e.to_string()))?;
                out!("{}", io::render_ring(&r));
            }
            RingCmd::Validate { file } => {
                let r = read_ring(&file)?;
                out_ln!("{}: valid ring {} of rank {}, global dim2 {}", file.display(), r.name(), r.rank(), r.global_dim2());
            }
        },
        Command::Modules {
            cmd: ModulesCmd::Enumerate { ring, side },
        } => {
            let r = Arc::new(read_ring(&ring)?);
            out!("{}", io::render_modules(&enumerate_fusion_modules(&r, side)));
        }
        Command::Bimodules {
            cmd: BimodulesCmd::Enumerate { left, right },
        } => {
            let l = Arc::new(read_ring(&left)?);
            let r = Arc::new(read_ring(&right)?);
            let lm = enumerate_fusion_modules(&l, Side::Left);
            let rm = enumerate_fusion_modules(&r, Side::Right);
            out!("{}", io::render_bimodules(&enumerate_fusion_bimodules(&lm, &rm)));
        }
        Command::Compat {
            cmd: CompatCmd::Tables { ws },
        } => {
            let ws = Workspace::locate(ws.workspace);
            prepare(&ws)?;
            let t = ws.build_tables(None)?.expect("unbounded run completes");
            let cells: usize = t.bimodule.values().map(|x| x.iter().map(|r| r.len()).sum::<usize>()).sum();
            let mcells: usize = t.module.values().map(|x| x.iter().map(|r| r.len()).sum::<usize>()).sum();
            out_ln!("{} bimodule triples ({cells} cells), {} module pairs ({mcells} cells)", t.bimodule.len(), t.module.len());
        }
        Command::Groupoid {
            cmd: GroupoidCmd::Deduce { ws },
        } => {
            let ws = Workspace::locate(ws.workspace);
            let cat = ws.catalog()?;
            let tables = ws.tables(&cat)?;
            let (facts, log) = report::run_deduction(&cat, &tables, None).map_err(|e| Failure::Invalid(e.to_string()))?;
            let replayed = report::replay(&cat, &tables, &log).map_err(|e| Failure::Invalid(format!("verifier rejected the log: {e}")))?;
            if replayed != facts {
                return Err(Failure::Invalid("verifier replay disagrees with the engine".into()));
            }
            ws.write_facts(&log)?;
            out!("{}", report::summarize_facts(&World::new(&cat, &tables), &facts));
            out_ln!("{} derivation steps, replay ok", log.len());
        }
        Command::Subfactors {
            cmd: SubfactorsCmd::Count { ws },
        } => {
            let ws = Workspace::locate(ws.workspace);
            let cat = ws.catalog()?;
            let tables = ws.tables(&cat)?;
            let log = ws.facts()?;
            let facts = report::replay(&cat, &tables, &log).map_err(|e| Failure::Invalid(e.to_string()))?;
            let census = count_subfactors(&World::new(&cat, &tables), &facts).map_err(|e| Failure::Invalid(e.to_string()))?;
            let summary = report::census_summary(&census);
            ws.write_records(&census.records, &summary)?;
            out!("{summary}");
        }
        Command::Graphs {
            cmd: GraphsCmd::Export { bimodule, object, format, ws },
        } => {
            let ws = Workspace::locate(ws.workspace);
            let cat = ws.catalog()?;
            let Ok(Subject::Bimodule(a, b, i)) = bimodule.parse::<Subject>() else {
                return Err(Failure::Usage(format!("`{bimodule}` is not a bimodule id")));
            };
            let bm = cat
                .bimodules(&a, &b)
                .get(i)
                .ok_or_else(|| Failure::Usage(format!("no catalog entry {bimodule}")))?;
            if object >= bm.rank() {
                return Err(Failure::Usage(format!("{bimodule} has rank {}", bm.rank())));
            }
            let (p, d) = principal_graphs(bm, object).map_err(Failure::Invalid)?;
            match format {
                GraphFormat::Dot => {
                    out_ln!("// {bimodule} object {object}, index2 = {}", bm.dim2()[object]);
                    out!("{}", p.to_dot(&format!("{bimodule}-{object}-principal")));
                    out!("{}", d.to_dot(&format!("{bimodule}-{object}-dual")));
                }
            }
        }
        Command::Report {
            cmd: ReportCmd::Acceptance { ws },
        } => {
            let ws = Workspace::locate(ws.workspace);
            let crit = report::workspace_acceptance(&ws)?;
            for c in &crit {
                out_ln!("{}", c.line());
            }
            if let Ok(text) = ws.records_text() {
                out_ln!("records: {} lines", text.lines().count());
            }
            if crit.iter().any(|c| !c.pass) {
                return Err(Failure::Invalid("acceptance criteria failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: invalid --jobs {n}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
