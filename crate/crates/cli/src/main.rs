use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use celldga_core::catalog;
use celldga_core::cellcomplex::{parallel, validate, Decomposition};
use celldga_core::dgabuild::{build_dga_with, stpair, BuildOptions, BuildResult};
use celldga_core::invariants::{augmentations, betti, linearize, DEFAULT_AUG_CAP};
use celldga_core::transform::{cancel_pipeline, verify_chain_map};

/// Cellular DGAs of Legendrian surfaces from square decompositions.
#[derive(Parser)]
#[command(name = "celldga", version, about)]
struct Cli {
    /// Emit errors as a JSON document on stdout.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct GradingArgs {
    /// Force the grading modulus (must be compatible with the cusp
    /// constraints).
    #[arg(long)]
    m_override: Option<u32>,
    /// Pin base-region Maslov potentials, e.g. "0=1,3=2".
    #[arg(long)]
    base_mu: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a decomposition against the admissibility conditions.
    Validate { input: String },
    /// Build the cellular DGA and print it as JSON.
    Build {
        input: String,
        #[command(flatten)]
        grading: GradingArgs,
    },
    /// Verify that the differential squares to zero.
    D2 {
        input: String,
        #[command(flatten)]
        grading: GradingArgs,
    },
    /// Apply a cancellation pipeline (a JSON list of {"x","y"} pairs).
    Simplify {
        input: String,
        /// Path to the pipeline script.
        #[arg(long)]
        pipeline: String,
        #[command(flatten)]
        grading: GradingArgs,
    },
    /// Enumerate graded Z/2 augmentations.
    Augment {
        input: String,
        /// Cap on the number of degree-0 generators.
        #[arg(long, default_value_t = DEFAULT_AUG_CAP)]
        cap: usize,
        #[command(flatten)]
        grading: GradingArgs,
    },
    /// Linearized homology: a Betti table at a chosen augmentation.
    Linhom {
        input: String,
        /// Index into the enumerated augmentation list.
        #[arg(long, default_value_t = 0)]
        aug_index: usize,
        #[arg(long, default_value_t = DEFAULT_AUG_CAP)]
        cap: usize,
        #[command(flatten)]
        grading: GradingArgs,
    },
    /// Verify the swallowtail chain map on an S/T pair.
    IsoCheck {
        /// A catalog S/T entry such as catalog:swallowtail-ST-n3, or use
        /// --sheets/--cusp.
        input: Option<String>,
        /// Sheet count right of the cusp.
        #[arg(long)]
        sheets: Option<u32>,
        /// Base index of the swallowtail sheets.
        #[arg(long, default_value_t = 1)]
        cusp: u32,
    },
    /// Compute the E_par refinement and print it as JSON.
    Parallel { input: String },
    /// List catalog entries, or print a named one.
    Catalog { name: Option<String> },
}

enum CmdError {
    Parse(String),
    Semantic(String),
}

impl CmdError {
    fn code(&self) -> u8 {
        match self {
            CmdError::Parse(_) => 2,
            CmdError::Semantic(_) => 1,
        }
    }
    fn message(&self) -> &str {
        match self {
            CmdError::Parse(m) | CmdError::Semantic(m) => m,
        }
    }
}

fn load(input: &str) -> Result<Decomposition, CmdError> {
    if let Some(name) = input.strip_prefix("catalog:") {
        return catalog::get(name)
            .ok_or_else(|| CmdError::Parse(format!("unknown catalog entry {name}")));
    }
    let text = fs::read_to_string(input)
        .map_err(|e| CmdError::Parse(format!("cannot read {input}: {e}")))?;
    Decomposition::from_json(&text).map_err(|e| CmdError::Parse(format!("bad decomposition: {e}")))
}

fn grading_options(g: &GradingArgs) -> Result<BuildOptions, CmdError> {
    let mut base_mu = BTreeMap::new();
    if let Some(pins) = &g.base_mu {
        for part in pins.split(',').filter(|p| !p.is_empty()) {
            let (r, v) = part
                .split_once('=')
                .ok_or_else(|| CmdError::Parse(format!("bad --base-mu entry {part}")))?;
            let r: usize = r
                .trim()
                .parse()
                .map_err(|_| CmdError::Parse(format!("bad region id {r}")))?;
            let v: i64 = v
                .trim()
                .parse()
                .map_err(|_| CmdError::Parse(format!("bad potential {v}")))?;
            base_mu.insert(r, v);
        }
    }
    Ok(BuildOptions { m_override: g.m_override, base_mu })
}

fn build(input: &str, g: &GradingArgs) -> Result<BuildResult, CmdError> {
    let dec = load(input)?;
    let opts = grading_options(g)?;
    build_dga_with(&dec, &opts).map_err(|e| CmdError::Semantic(e.to_string()))
}

fn run(cli: &Cli) -> Result<(), CmdError> {
    match &cli.command {
        Command::Validate { input } => {
            let dec = load(input)?;
            let report = validate(&dec);
            if report.is_valid() {
                println!("valid");
                Ok(())
            } else {
                for v in &report.violations {
                    println!("[{}] {}", v.code, v.detail);
                }
                Err(CmdError::Semantic(format!(
                    "{} violation(s)",
                    report.violations.len()
                )))
            }
        }
        Command::Build { input, grading } => {
            let built = build(input, grading)?;
            print!("{}", built.dga.to_json());
            Ok(())
        }
        Command::D2 { input, grading } => {
            let built = build(input, grading)?;
            if built.d2_failures.is_empty() {
                println!("d^2 = 0 on {} generators", built.dga.gen_count());
                Ok(())
            } else {
                for (g, p) in &built.d2_failures {
                    println!("{}: {}", built.dga.name_of(*g), built.dga.render(p));
                }
                Err(CmdError::Semantic(format!(
                    "d^2 != 0 at {} generator(s)",
                    built.d2_failures.len()
                )))
            }
        }
        Command::Simplify { input, pipeline, grading } => {
            let built = build(input, grading)?;
            let text = fs::read_to_string(pipeline)
                .map_err(|e| CmdError::Parse(format!("cannot read {pipeline}: {e}")))?;
            let steps: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CmdError::Parse(format!("bad pipeline: {e}")))?;
            let mut pairs: Vec<(String, String)> = Vec::new();
            for step in steps
                .as_array()
                .ok_or_else(|| CmdError::Parse("pipeline must be a JSON array".into()))?
            {
                let get = |k: &str| {
                    step.get(k)
                        .and_then(|v| v.as_str())
                        .map(str::to_string)
                        .ok_or_else(|| CmdError::Parse(format!("pipeline step missing \"{k}\"")))
                };
                pairs.push((get("x")?, get("y")?));
            }
            let out = cancel_pipeline(&built.dga, &pairs)
                .map_err(|e| CmdError::Semantic(e.to_string()))?;
            print!("{}", out.to_json());
            Ok(())
        }
        Command::Augment { input, cap, grading } => {
            let built = build(input, grading)?;
            let augs =
                augmentations(&built.dga, *cap).map_err(|e| CmdError::Semantic(e.to_string()))?;
            let dump: Vec<BTreeMap<String, u8>> =
                augs.iter().map(|a| a.dump(&built.dga)).collect();
            let doc = serde_json::json!({ "count": augs.len(), "augmentations": dump });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(())
        }
        Command::Linhom { input, aug_index, cap, grading } => {
            let built = build(input, grading)?;
            let augs =
                augmentations(&built.dga, *cap).map_err(|e| CmdError::Semantic(e.to_string()))?;
            let eps = augs
                .get(*aug_index)
                .ok_or_else(|| {
                    CmdError::Semantic(format!(
                        "augmentation index {aug_index} out of range ({} found)",
                        augs.len()
                    ))
                })?;
            let lc = linearize(&built.dga, eps).map_err(|e| CmdError::Semantic(e.to_string()))?;
            let table: BTreeMap<String, usize> = betti(&lc)
                .into_iter()
                .map(|(d, r)| (d.to_string(), r))
                .collect();
            println!("{}", serde_json::to_string_pretty(&table).unwrap());
            Ok(())
        }
        Command::IsoCheck { input, sheets, cusp } => {
            let (n, k) = match (input, sheets) {
                (Some(name), _) => {
                    let name = name.strip_prefix("catalog:").unwrap_or(name);
                    catalog::st_params(name).ok_or_else(|| {
                        CmdError::Parse(format!("{name} is not a swallowtail S/T entry"))
                    })?
                }
                (None, Some(n)) => (*n, *cusp),
                (None, None) => {
                    return Err(CmdError::Parse(
                        "need a catalog entry or --sheets".to_string(),
                    ))
                }
            };
            let pair = stpair::st_pair(n, k).map_err(|e| CmdError::Semantic(e.to_string()))?;
            let phi = stpair::swallowtail_phi(&pair);
            let fails = verify_chain_map(&phi, &pair.d1, &pair.d2)
                .map_err(|e| CmdError::Semantic(e.to_string()))?;
            if fails.is_empty() {
                println!("chain map verified on {} generators", pair.d1.gen_count());
                Ok(())
            } else {
                for (g, p) in &fails {
                    println!("{}: {}", pair.d1.name_of(*g), pair.d1.render(p));
                }
                Err(CmdError::Semantic(format!(
                    "chain map fails at {} generator(s)",
                    fails.len()
                )))
            }
        }
        Command::Parallel { input } => {
            let dec = load(input)?;
            let par = parallel::to_parallel(&dec).map_err(|e| CmdError::Semantic(e.to_string()))?;
            let dump = parallel::dump(&par);
            println!("{}", serde_json::to_string_pretty(&dump).unwrap());
            Ok(())
        }
        Command::Catalog { name } => match name {
            None => {
                for n in catalog::names() {
                    println!("{n}");
                }
                Ok(())
            }
            Some(n) => {
                let d = catalog::get(n)
                    .ok_or_else(|| CmdError::Parse(format!("unknown catalog entry {n}")))?;
                print!("{}", d.to_json());
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.json_errors {
                let doc = serde_json::json!({ "error": e.message(), "code": e.code() });
                println!("{}", serde_json::to_string(&doc).unwrap());
            } else {
                eprintln!("error: {}", e.message());
            }
            ExitCode::from(e.code())
        }
    }
}
