//! `mk`: generate complexes, compute homology, check matchings and certify.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kneser_morse_core::certify::{certify, CertifyOptions};
use kneser_morse_core::complex::{face_cap_from_env, neighborhood_complex};
use kneser_morse_core::homology::{betti_with, Ring};
use kneser_morse_core::io::{parse_face_list, parse_matching, write_face_list};
use kneser_morse_core::kneser::{Family, GroundParam, Graph};
use kneser_morse_core::morse::{collapse_by_matching, verify_matching};
use kneser_morse_core::pipeline::{collapse_s_to_sg_with, BettiCheck, StageKind};
use kneser_morse_core::Error;
use serde_json::{json, Value};

const EXIT_FAIL: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(name = "mk", version, about = "Neighborhood complexes of Kneser graphs KG(2,k) and their Morse matchings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Face cap for full enumeration (overrides MK_CAP).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    cap: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Kneser,
    Stable,
    S,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Kneser => Family::Kneser,
            FamilyArg::Stable => Family::Stable,
            FamilyArg::S => Family::S,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RingArg {
    Gf2,
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum BettiArg {
    Off,
    Stage,
    Step,
}

#[derive(Subcommand)]
enum Command {
    /// Dump a graph, or with --complex the face list of its neighborhood complex.
    Gen {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        complex: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Reduced (or unreduced) Betti numbers of a face list.
    Betti {
        faces: PathBuf,
        #[arg(long, value_enum, default_value_t = RingArg::Gf2)]
        ring: RingArg,
        #[arg(long)]
        unreduced: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Check that a matching file is an acyclic matching on a face list.
    VerifyMatching {
        faces: PathBuf,
        matching: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Collapse N(S) onto N(SG) for --k, or a face list along a matching.
    Collapse {
        #[arg(long, required_unless_present = "faces", conflicts_with = "faces")]
        k: Option<u32>,
        #[arg(long, requires = "matching")]
        faces: Option<PathBuf>,
        #[arg(long, requires = "faces")]
        matching: Option<PathBuf>,
        /// Homology check along the filtration (--k mode only).
        #[arg(long, value_enum, default_value_t = BettiArg::Stage)]
        betti: BettiArg,
        #[command(flatten)]
        output: Output,
    },
    /// Run every check for one k and report claimed against computed values.
    Certify {
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        output: Output,
    },
}

/// What a subcommand produced: the rendered report and whether its checks passed.
struct Report {
    json: Value,
    text: String,
    pass: bool,
}

fn read(path: &Path) -> Result<String, Error> {
    Ok(std::fs::read_to_string(path)?)
}

fn cap(output: &Output) -> u64 {
    output.cap.unwrap_or_else(face_cap_from_env)
}

fn gen(k: u32, family: FamilyArg, complex: bool, output: &Output) -> Result<Report, Error> {
    let g = Graph::family(GroundParam::new(k)?, family.into());
    if !complex {
        let text = g.dump();
        let edges: Vec<[String; 2]> = g.edges().iter().map(|(u, v)| [u.to_string(), v.to_string()]).collect();
        let json = json!({"k": k, "graph": g.name(), "vertices": g.vertex_count(), "edges": edges});
        return Ok(Report { json, text, pass: true });
    }
    let faces = neighborhood_complex(&g)?.enumerate_faces(true, cap(output))?;
    let name = format!("N({})", g.name());
    let text = write_face_list(g.universe(), &name, &faces);
    let list: Vec<String> = faces.iter().map(|f| g.universe().format_face(f)).collect();
    let json = json!({"k": k, "complex": name, "faces": list});
    Ok(Report { json, text, pass: true })
}

fn betti_cmd(path: &Path, ring: RingArg, unreduced: bool) -> Result<Report, Error> {
    let list = parse_face_list(&read(path)?)?;
    let ring = match ring {
        RingArg::Gf2 => Ring::Gf2,
        RingArg::Z => Ring::Integers,
    };
    let b = betti_with(list.faces.faces(), ring, !unreduced)?;
    let text = format!(
        "{} Betti numbers of {} over {ring}: {:?}{}\n",
        if unreduced { "unreduced" } else { "reduced" },
        if list.name.is_empty() { "complex" } else { &list.name },
        b.ranks,
        if b.is_torsion_free() { String::new() } else { format!(", torsion {:?}", b.torsion) }
    );
    Ok(Report { json: b.to_json(), text, pass: true })
}

fn verify_cmd(faces: &Path, matching: &Path) -> Result<Report, Error> {
    let list = parse_face_list(&read(faces)?)?;
    let m = parse_matching(&list.universe, &read(matching)?)?;
    let r = verify_matching(&list.faces, &m)?;
    let mut text = format!(
        "{}: {} faces, {} pairs, {} critical\n",
        if r.acyclic { "acyclic" } else { "NOT acyclic" },
        r.total_faces,
        r.pairs,
        r.critical_total()
    );
    for (d, n) in r.critical_counts() {
        text.push_str(&format!("  dim {d}: {n} critical\n"));
    }
    if let Some(cycle) = &r.cycle {
        let shown: Vec<String> = cycle.iter().map(|&f| list.universe.format_face(f)).collect();
        text.push_str(&format!("  cycle: {}\n", shown.join(" | ")));
    }
    Ok(Report { json: r.to_json(Some(&list.universe)), pass: r.acyclic, text })
}

fn collapse_filtration(k: u32, betti: BettiArg, output: &Output) -> Result<Report, Error> {
    let check = match betti {
        BettiArg::Off => BettiCheck::Off,
        BettiArg::Stage => BettiCheck::PerStage,
        BettiArg::Step => BettiCheck::PerStep,
    };
    let c = collapse_s_to_sg_with(k, check, cap(output))?;
    let mut text = format!("N(S) -> N(SG) at k = {k}: {} faces -> {} faces\n", c.initial.len(), c.trace.residual.len());
    let mut stages = Vec::new();
    for s in &c.stages {
        let kind = match s.kind {
            StageKind::RemoveFiber => "remove fiber".to_string(),
            StageKind::Relative { i } => format!("relative stage {i}"),
        };
        text.push_str(&format!(
            "  l = {}, {kind}: {} -> {} faces, {} pairs{}\n",
            s.l,
            s.faces_before,
            s.faces_after,
            s.pairs,
            match s.betti_preserved {
                Some(true) => ", Betti preserved",
                Some(false) => ", Betti CHANGED",
                None => "",
            }
        ));
        stages.push(json!({
            "l": s.l,
            "kind": kind,
            "faces_before": s.faces_before,
            "faces_after": s.faces_after,
            "pairs": s.pairs,
            "betti_preserved": s.betti_preserved,
        }));
    }
    let pass = c.all_betti_preserved() != Some(false);
    let json = json!({
        "k": k,
        "initial_faces": c.initial.len(),
        "residual_faces": c.trace.residual.len(),
        "residual_is_n_sg": true,
        "elementary_collapses": c.trace.steps.len(),
        "betti_preserved": c.all_betti_preserved(),
        "stages": stages,
    });
    Ok(Report { json, text, pass })
}

fn collapse_list(faces: &Path, matching: &Path) -> Result<Report, Error> {
    let list = parse_face_list(&read(faces)?)?;
    let m = parse_matching(&list.universe, &read(matching)?)?;
    let trace = collapse_by_matching(&list.faces, &m)?;
    let name = format!("{}-collapsed", if list.name.is_empty() { "complex" } else { &list.name });
    let text = write_face_list(&list.universe, &name, &trace.residual);
    let steps: Vec<[String; 2]> = trace
        .steps
        .iter()
        .map(|&(d, u)| [list.universe.format_face(d), list.universe.format_face(u)])
        .collect();
    let residual: Vec<String> = trace.residual.iter().map(|f| list.universe.format_face(f)).collect();
    let json = json!({"k": list.universe.k(), "steps": steps, "residual": residual});
    Ok(Report { json, text, pass: true })
}

fn run(command: &Command) -> Result<(Report, &Output), Error> {
    Ok(match command {
        Command::Gen { k, family, complex, output } => (gen(*k, *family, *complex, output)?, output),
        Command::Betti { faces, ring, unreduced, output } => (betti_cmd(faces, *ring, *unreduced)?, output),
        Command::VerifyMatching { faces, matching, output } => (verify_cmd(faces, matching)?, output),
        Command::Collapse { k: Some(k), betti, output, .. } => (collapse_filtration(*k, *betti, output)?, output),
        Command::Collapse { faces: Some(f), matching: Some(m), output, .. } => (collapse_list(f, m)?, output),
        Command::Collapse { .. } => unreachable!("clap enforces --k or --faces with --matching"),
        Command::Certify { k, output } => {
            let options = CertifyOptions::for_k(*k, cap(output));
            let r = certify(*k, options)?;
            (Report { json: r.to_json(), text: r.to_text(), pass: r.pass }, output)
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Domain(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) | Error::EmptyComplex(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let (report, output) = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("mk: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let mut rendered = match output.format {
        Format::Json => serde_json::to_string_pretty(&report.json).expect("JSON values serialize"),
        Format::Text => report.text,
    };
    if !rendered.ends_with('\n') {
        rendered.push('\n');
    }
    match &output.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                eprintln!("mk: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{rendered}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
