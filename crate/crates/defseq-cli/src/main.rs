//! `defseq` — batch front end for the defining-sequence toolkit.
//!
//! Machine output is a single JSON document on stdout; human diagnostics go
//! to stderr. Exit codes: 0 success (including `compare` verdict Unknown),
//! 1 domain failure (admissibility false, bijection violation, malformed
//! input, failed certification), 2 usage, 3 `compare` verdict Distinct,
//! 4 resource cap exceeded, 5 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use defseq::{
    antoine_chain, antoine_from_target, bing_pattern, certify_geometry, check_admissible,
    component_counts, distinguish, embed_antoine, export_obj, mod2_linking_sequence,
    parse_relation, parse_system, placements_to_json, system_to_json,
    verify_component_bijection, whitehead_pattern, BijectionOutcome, EmbedParams, Error,
    ExpandOptions, FormalClass, GeneratedSystem, ParitySeq, PatternSystem, Verdict,
};

#[derive(Parser)]
#[command(name = "defseq", version, about = "Toroidal defining-sequence toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a pattern system and print it (optionally writing a file).
    Generate {
        #[command(subcommand)]
        family: Family,
        /// Also write the JSON document to this path.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Print component counts, the mod-2 linking sequence L, and ν.
    Invariants {
        /// Pattern-system JSON file.
        file: PathBuf,
        /// How many leading terms of each sequence to tabulate.
        #[arg(long, default_value_t = 12)]
        terms: usize,
    },
    /// Check admissibility to a depth; exit 0 iff the overall verdict holds.
    Check {
        /// Pattern-system JSON file.
        file: PathBuf,
        /// Replacement stages to inspect.
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Compare two systems; exit 3 when they are distinguished, 0 otherwise.
    Compare {
        a: PathBuf,
        b: PathBuf,
    },
    /// Verify a claimed stage bijection; prints a certificate or a trace.
    Bijection {
        /// Pattern-system JSON file for the first family.
        c: PathBuf,
        /// Pattern-system JSON file for the second family.
        d: PathBuf,
        /// Nesting-relation JSON file (fixes the stage).
        rel: PathBuf,
    },
    /// Realize a chain system in R³; print placements or a certification.
    Geom {
        /// Pattern-system JSON file.
        file: PathBuf,
        /// Replacement stages to realize.
        #[arg(long)]
        depth: u32,
        /// Child ring radius over parent tube radius (default 0.22).
        #[arg(long)]
        shrink: Option<f64>,
        /// Tube radius over ring radius (default 0.35).
        #[arg(long = "tube")]
        tube: Option<f64>,
        /// Certify the placements and print the report instead.
        #[arg(long)]
        certify: bool,
        /// Also export a Wavefront OBJ mesh to this path.
        #[arg(long)]
        obj: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Cyclic chain of k unknotted beads.
    Antoine {
        #[arg(long)]
        k: usize,
    },
    /// Chain system whose mod-2 linking sequence equals a target.
    FromTarget {
        /// Target parity sequence, e.g. "pre:0;per:1,0".
        #[arg(long)]
        l: String,
    },
    /// The classical Bing double pattern.
    Bing,
    /// The classical Whitehead pattern.
    Whitehead,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Resource { .. } => 4,
                Error::Io(_) => 5,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn expand_opts() -> ExpandOptions {
    let mut opts = ExpandOptions::default();
    if let Ok(value) = std::env::var("DEFSEQ_NODE_CAP") {
        match value.parse::<usize>() {
            Ok(cap) if cap > 0 => opts.node_cap = cap,
            _ => eprintln!("warning: ignoring unparsable DEFSEQ_NODE_CAP {value:?}"),
        }
    }
    opts
}

fn load_system(path: &Path) -> Result<PatternSystem, Error> {
    parse_system(&std::fs::read_to_string(path)?)
}

fn emit(doc: &impl serde::Serialize) {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable output");
    s.push('\n');
    print!("{s}");
}

fn run(cmd: Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::Generate { family, output } => {
            let generated = build(family)?;
            for w in &generated.warnings {
                eprintln!("warning: {w}");
            }
            let text = system_to_json(&generated.system);
            if let Some(path) = &output {
                std::fs::write(path, &text)?;
            }
            print!("{text}");
            Ok(0)
        }
        Cmd::Invariants { file, terms } => {
            let ps = load_system(&file)?;
            let counts = component_counts(&ps)?;
            let l = mod2_linking_sequence(&ps)?;
            if !check_admissible(&ps, 2, expand_opts())?.overall {
                eprintln!("note: raw L, invariance not asserted (admissibility not established)");
            }
            let class = FormalClass::of(ps);
            let (nu_seq, warnings) = defseq::nu_with_warnings(&class)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            emit(&json!({
                "counts": {
                    "prefix": counts.prefix().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "multipliers": counts.multipliers(),
                    "additive": counts.additive_terms(),
                },
                "counts_terms": counts.values(terms).iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "L": l,
                "L_terms": bits(&l, terms),
                "nu": nu_seq,
                "nu_terms": bits(&nu_seq, terms),
            }));
            Ok(0)
        }
        Cmd::Check { file, depth } => {
            let ps = load_system(&file)?;
            let report = check_admissible(&ps, depth, expand_opts())?;
            emit(&report);
            Ok(if report.overall { 0 } else { 1 })
        }
        Cmd::Compare { a, b } => {
            let ca = FormalClass::of(load_system(&a)?);
            let cb = FormalClass::of(load_system(&b)?);
            let verdict = distinguish(&ca, &cb)?;
            emit(&verdict);
            Ok(match verdict {
                Verdict::Unknown => 0,
                Verdict::DistinctByNu { .. } | Verdict::DistinctByCounts { .. } => 3,
            })
        }
        Cmd::Bijection { c, d, rel } => {
            let relation = parse_relation(&std::fs::read_to_string(&rel)?)?;
            let opts = expand_opts();
            let cs = defseq::stage(&load_system(&c)?, relation.stage, opts)?;
            let ds = defseq::stage(&load_system(&d)?, relation.stage, opts)?;
            let outcome = verify_component_bijection(&cs, &ds, &relation)?;
            emit(&outcome);
            Ok(match outcome {
                BijectionOutcome::Certificate(_) => 0,
                BijectionOutcome::Violation { .. } => 1,
            })
        }
        Cmd::Geom { file, depth, shrink, tube, certify, obj } => {
            let ps = load_system(&file)?;
            let defaults = EmbedParams::default();
            let params = EmbedParams {
                shrink: shrink.unwrap_or(defaults.shrink),
                tube_ratio: tube.unwrap_or(defaults.tube_ratio),
            };
            let placements = embed_antoine(&ps, depth, params, expand_opts())?;
            if let Some(path) = &obj {
                export_obj(&placements, path)?;
            }
            if certify {
                let report = certify_geometry(&placements)?;
                emit(&report);
                Ok(if report.pass { 0 } else { 1 })
            } else {
                print!("{}", placements_to_json(&placements));
                Ok(0)
            }
        }
    }
}

fn build(family: Family) -> Result<GeneratedSystem, Error> {
    match family {
        Family::Antoine { k } => antoine_chain(k),
        Family::FromTarget { l } => {
            let target = ParitySeq::parse_spec(&l).map_err(|message| Error::Generator {
                message: format!("bad --l value: {message}"),
            })?;
            antoine_from_target(&target)
        }
        Family::Bing => Ok(bing_pattern()),
        Family::Whitehead => Ok(whitehead_pattern()),
    }
}

fn bits(seq: &ParitySeq, terms: usize) -> Vec<u8> {
    seq.prefix(terms).into_iter().map(|z| z.as_u8()).collect()
}
