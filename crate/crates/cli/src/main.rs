//! `lancet`: command-line access to the analyses in `lancet-core`.
//!
//! Exit codes: 0 on success, 1 when `--strict` is set and the analysis
//! reported diagnostics, 2 on parse, I/O or usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use lancet_core::callgraph;
use lancet_core::cfg::{self, Cfg};
use lancet_core::frontend::{parse_module, read_source, unparse_module, Module};
use lancet_core::modgraph::{call_sites, ImportGraph, NameContext, Resolved};
use lancet_core::rewriter::simplify_module;
use lancet_core::ssa;
use lancet_core::typeinfer::{infer_types, records_to_json, HeuristicTable};

#[derive(Parser)]
#[command(name = "lancet", version, about = "Static analyses for Python source")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Exit with status 1 when the analysis reports diagnostics.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the source after simplification.
    Rewrite { file: PathBuf },
    /// Control-flow graph of a module and its functions.
    Cfg {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = CfgFormat::Json)]
        format: CfgFormat,
    },
    /// SSA use sets and folded constants.
    Ssa {
        file: PathBuf,
        /// Analyze this function (dotted path for nested ones) instead of
        /// the module body.
        #[arg(long)]
        function: Option<String>,
        #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
        format: JsonFormat,
        /// Analyze the source as written.
        #[arg(long)]
        no_simplify: bool,
    },
    /// Name-copy alias pairs.
    Alias {
        file: PathBuf,
        #[arg(long)]
        function: Option<String>,
        #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
        format: JsonFormat,
        #[arg(long)]
        no_simplify: bool,
    },
    /// Import graph of a package directory.
    Imports {
        root: PathBuf,
        #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
        format: JsonFormat,
    },
    /// Fully qualified callee of every call site.
    Fqn { file: PathBuf },
    /// Call graph from one or more entry files.
    Callgraph {
        #[arg(long = "entry", required = true, num_args = 1..)]
        entries: Vec<PathBuf>,
        /// Package root the entries belong to.
        #[arg(long)]
        package: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CallgraphFormat::SimpleJson)]
        format: CallgraphFormat,
    },
    /// Type sets for variables, parameters and return values.
    Typeinfer {
        entry: PathBuf,
        #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
        format: JsonFormat,
        #[arg(long)]
        no_simplify: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CfgFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum JsonFormat {
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CallgraphFormat {
    SimpleJson,
    Edges,
}

struct Report {
    text: String,
    warnings: Vec<String>,
}

impl Report {
    fn clean(text: String) -> Self {
        Report {
            text,
            warnings: Vec::new(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if let Err(e) = emit(&report.text, cli.output.as_deref()) {
                eprintln!("lancet: {e:#}");
                return ExitCode::from(2);
            }
            if cli.strict && !report.warnings.is_empty() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("lancet: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, sink: Option<&Path>) -> anyhow::Result<()> {
    match sink {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "module".into())
}

fn load(file: &Path) -> anyhow::Result<Module> {
    let text = read_source(file)?;
    Ok(parse_module(&text, &file.display().to_string())?)
}

fn prepared(file: &Path, no_simplify: bool) -> anyhow::Result<Module> {
    let m = load(file)?;
    if no_simplify {
        Ok(m)
    } else {
        Ok(simplify_module(&m)?)
    }
}

fn select<'a>(cfg: &'a Cfg, function: Option<&str>) -> anyhow::Result<&'a Cfg> {
    let Some(f) = function else { return Ok(cfg) };
    cfg.all_nested()
        .into_iter()
        .find(|(path, _)| path == f)
        .map(|(_, c)| c)
        .ok_or_else(|| anyhow!("no function `{f}`"))
}

fn run(command: &Command) -> anyhow::Result<Report> {
    Ok(match command {
        Command::Rewrite { file } => {
            let m = simplify_module(&load(file)?)?;
            Report::clean(unparse_module(&m))
        }
        Command::Cfg { file, format } => {
            let c = cfg::build_from_module(&stem(file), &load(file)?);
            Report::clean(match format {
                CfgFormat::Json => json_text(&c.to_json()),
                CfgFormat::Dot => cfg::to_dot(&c, true),
            })
        }
        Command::Ssa {
            file,
            function,
            no_simplify,
            ..
        } => {
            let c = cfg::build_from_module(&stem(file), &prepared(file, *no_simplify)?);
            let (uses, consts) = ssa::analyze(select(&c, function.as_deref())?);
            Report::clean(json_text(&ssa::to_json(&uses, &consts)))
        }
        Command::Alias {
            file,
            function,
            no_simplify,
            ..
        } => {
            let c = cfg::build_from_module(&stem(file), &prepared(file, *no_simplify)?);
            let (_, consts) = ssa::analyze(select(&c, function.as_deref())?);
            Report::clean(json_text(&ssa::aliases_to_json(&ssa::alias_pairs(&consts))))
        }
        Command::Imports { root, .. } => {
            let g = ImportGraph::build(root)?;
            let mut warnings: Vec<String> = g
                .tree
                .parse_errors()
                .into_iter()
                .map(|e| e.to_string())
                .collect();
            warnings.extend(g.diagnostics.iter().map(|d| d.to_string()));
            Report {
                text: json_text(&g.to_json()),
                warnings,
            }
        }
        Command::Fqn { file } => {
            let m = load(file)?;
            let ctx = NameContext::for_module(&stem(file), false, &m);
            let mut text = String::new();
            for site in call_sites(&m, &ctx) {
                let target = match &site.resolved {
                    Resolved::Fqn(f) => f.as_str(),
                    Resolved::Unresolved(_) => "UNRESOLVED",
                };
                text.push_str(&format!(
                    "{}:{} {} -> {}\n",
                    site.span.start_line, site.span.start_col, site.syntactic, target
                ));
            }
            Report::clean(text)
        }
        Command::Callgraph {
            entries,
            package,
            format,
        } => {
            let cg = callgraph::analyze(entries, package.as_deref())?;
            let mut warnings: Vec<String> = cg.parse_errors.iter().map(|e| e.to_string()).collect();
            warnings.extend(cg.diagnostics.iter().map(|d| d.to_string()));
            Report {
                text: match format {
                    CallgraphFormat::SimpleJson => callgraph::to_simple_json(&cg),
                    CallgraphFormat::Edges => callgraph::to_edge_lines(&cg),
                },
                warnings,
            }
        }
        Command::Typeinfer {
            entry, no_simplify, ..
        } => {
            let table = HeuristicTable::from_env()?;
            let r = infer_types(&stem(entry), entry, &table, !no_simplify)?;
            let mut warnings: Vec<String> = r.parse_errors.iter().map(|e| e.to_string()).collect();
            warnings.extend(r.diagnostics.iter().map(|d| d.to_string()));
            Report {
                text: json_text(&records_to_json(&r.records)),
                warnings,
            }
        }
    })
}
