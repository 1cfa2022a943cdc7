use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use strand_ainf::ainf_engine::verify::{
    perturbation_invariance_check, verify_ainf_relations, verify_morphism_relations, verify_structure_theorems,
    verify_x_grading,
};
use strand_ainf::ainf_engine::{init_threads, AinfEngine, EngineConfig, Extremal, Mode, Report, TightIndex};
use strand_ainf::arc_diagram::{ArcDiagram, PairOrdering};
use strand_ainf::homology::{classify_hdata, homology_dim, Summand};
use strand_ainf::optrees::{
    classify_tree, local_validity_counts, local_validity_mismatches, predict, verify_predictions, verify_tree_lemmas,
    OperationTree, Shape,
};
use strand_ainf::shorthand::{format_tensor, parse_tensor};
use strand_ainf::strand_core::oracle::{compare_with_rules, derive_local_tables};
use strand_ainf::strand_core::text::{format_element, parse_diagram};
use strand_ainf::strand_core::{Algebra, Element};
use strand_ainf::tensor_class::{
    table2_oracle, table2_reference, table3_oracle, table3_reference, table4_oracle, table4_reference,
};
use strand_ainf::worked_examples::{evaluate, run_catalogue, transcript, transcript_line, Op, GOLDEN};

/// Computations in the strand algebra of an arc diagram and its A-infinity
/// structure on homology.
///
/// An arc diagram is read from a file, or given inline as `fragments:P,Q,...`
/// for disjoint one-pair fragments.
#[derive(Parser)]
#[command(name = "strand-ainf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an arc diagram and print it back.
    Validate { diagram: String },
    /// List the viable H-data with tightness, dimension and homology rank.
    Summands {
        diagram: String,
        #[arg(long)]
        order: Option<String>,
    },
    /// Multiply two diagrams.
    Mul {
        diagram: String,
        a: String,
        b: String,
        #[arg(long)]
        order: Option<String>,
    },
    /// Differential of a diagram.
    Diff {
        diagram: String,
        a: String,
        #[arg(long)]
        order: Option<String>,
    },
    /// Evaluate the higher operations on a tensor
    #[command(subcommand)]
    Ainf(AinfCommand),
    /// Exhaustive checks over all viable class tensors up to a length.
    Verify {
        check: Check,
        diagram: String,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long)]
        order: Option<String>,
        /// Tensors longer than this are not memoized.
        #[arg(long)]
        memo_len: Option<usize>,
    },
    /// Checks of the local tables
    #[command(subcommand)]
    Tables(TablesCommand),
    /// The catalogue of worked examples
    #[command(subcommand)]
    Examples(ExamplesCommand),
    /// Operation-tree analysis
    #[command(subcommand)]
    Trees(TreesCommand),
}

#[derive(Subcommand)]
enum AinfCommand {
    /// Evaluate X, f or U on a shorthand tensor.
    Eval {
        diagram: String,
        #[arg(long)]
        order: Option<String>,
        #[arg(long, value_enum)]
        op: OpArg,
        #[arg(long)]
        input: String,
        /// Compute in full mode rather than modulo the crossed ideal.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Subcommand)]
enum TablesCommand {
    /// Regenerate the local tables from their oracles and compare.
    Check,
}

#[derive(Subcommand)]
enum ExamplesCommand {
    /// Run the catalogue of worked examples and diff against the golden transcript.
    Paper {
        /// Print the transcript instead of diffing it.
        #[arg(long)]
        print: bool,
    },
}

#[derive(Subcommand)]
enum TreesCommand {
    /// Classify every operation tree on a tensor and print the prediction.
    Analyze {
        diagram: String,
        #[arg(long)]
        order: Option<String>,
        #[arg(long)]
        input: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    #[value(name = "X")]
    X,
    #[value(name = "f")]
    F,
    #[value(name = "U")]
    U,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Relations,
    Morphism,
    Theorems,
    Perturbation,
    Trees,
}

fn load_diagram(source: &str) -> Result<ArcDiagram> {
    if let Some(names) = source.strip_prefix("fragments:") {
        let names: Vec<&str> = names.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if names.is_empty() {
            bail!("`fragments:` needs at least one pair name");
        }
        return Ok(ArcDiagram::disjoint_fragments(&names));
    }
    let path = PathBuf::from(source);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    ArcDiagram::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn setup(source: &str, order: Option<&str>) -> Result<(Arc<Algebra>, PairOrdering)> {
    let z = load_diagram(source)?;
    let ord = match order {
        Some(spec) => PairOrdering::parse(&z, spec).context("parsing --order")?,
        None => PairOrdering::default_for(&z),
    };
    Ok((Arc::new(Algebra::new(z)), ord))
}

fn engine(alg: &Arc<Algebra>, ord: &PairOrdering, mode: Mode, solver: Extremal, memo_len: Option<usize>) -> AinfEngine {
    let mut config = EngineConfig {
        mode,
        solver,
        ..EngineConfig::default()
    };
    if let Some(len) = memo_len {
        config.memo_len = len;
    }
    AinfEngine::new(alg.clone(), ord.clone(), config)
}

/// Prints one summary line per report and returns whether all passed.
fn print_reports(reports: &[Report]) -> bool {
    for r in reports {
        println!("{}", r.summary());
        for w in &r.witnesses {
            println!("\twitness\t{w}");
        }
    }
    reports.iter().all(Report::passed)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { diagram } => {
            let z = load_diagram(&diagram)?;
            print!("{z}");
            println!("# {} pairs, {} steps", z.pair_count(), z.step_count());
            Ok(true)
        }
        Command::Summands { diagram, order } => {
            let (alg, ord) = setup(&diagram, order.as_deref())?;
            println!("summand\ttightness\tdim\thomology");
            for hd in alg.all_hdata() {
                println!(
                    "{}\t{:?}\t{}\t{}",
                    format_tensor(&alg, &ord, &[hd]),
                    classify_hdata(&alg, &hd),
                    Summand::new(&alg, &ord, &hd).dim(),
                    homology_dim(&alg, &hd)
                );
            }
            Ok(true)
        }
        Command::Mul { diagram, a, b, order } => {
            let (alg, ord) = setup(&diagram, order.as_deref())?;
            let a = parse_diagram(&alg, &a).context("first factor")?;
            let b = parse_diagram(&alg, &b).context("second factor")?;
            let product = alg.multiply(&a, &b).map_or_else(Element::zero, Element::from_diagram);
            println!("{}", format_element(&alg, &ord, &product));
            Ok(true)
        }
        Command::Diff { diagram, a, order } => {
            let (alg, ord) = setup(&diagram, order.as_deref())?;
            let a = parse_diagram(&alg, &a)?;
            println!("{}", format_element(&alg, &ord, &alg.differential(&a)));
            Ok(true)
        }
        Command::Ainf(AinfCommand::Eval {
            diagram,
            order,
            op,
            input,
            full,
        }) => {
            let (alg, ord) = setup(&diagram, order.as_deref())?;
            let mode = if full { Mode::Full } else { Mode::Quotient };
            let engine = engine(&alg, &ord, mode, Extremal::Least, None);
            let m = parse_tensor(&alg, &input)?;
            let op = match op {
                OpArg::X => Op::X,
                OpArg::F => Op::F,
                OpArg::U => Op::U,
            };
            let (output, _) = evaluate(&engine, op, &m)?;
            println!("{}", transcript_line(&engine, op, &m, &output));
            Ok(true)
        }
        Command::Verify {
            check,
            diagram,
            nmax,
            order,
            memo_len,
        } => {
            let (alg, ord) = setup(&diagram, order.as_deref())?;
            let index = TightIndex::new(&alg);
            let quotient = || engine(&alg, &ord, Mode::Quotient, Extremal::Least, memo_len);
            let reports = match check {
                Check::Relations => {
                    let e = quotient();
                    let mut r = verify_ainf_relations(&e, &index, nmax);
                    r.push(verify_x_grading(&e, &index, nmax));
                    r
                }
                Check::Morphism => {
                    let e = engine(&alg, &ord, Mode::Full, Extremal::Least, memo_len);
                    verify_morphism_relations(&e, &index, nmax)
                }
                Check::Theorems => verify_structure_theorems(&quotient(), &index, nmax),
                Check::Perturbation => {
                    let least = engine(&alg, &ord, Mode::Full, Extremal::Least, memo_len);
                    let greatest = engine(&alg, &ord, Mode::Full, Extremal::Greatest, memo_len);
                    vec![perturbation_invariance_check(&least, &greatest, &quotient(), &index, nmax)]
                }
                Check::Trees => {
                    let mut r = verify_predictions(&quotient(), &index, nmax);
                    r.extend(verify_tree_lemmas(&alg, &index, nmax.min(4)));
                    r
                }
            };
            Ok(print_reports(&reports))
        }
        Command::Tables(TablesCommand::Check) => Ok(check_tables()?),
        Command::Examples(ExamplesCommand::Paper { print }) => {
            let outcomes = run_catalogue()?;
            let text = transcript(&outcomes);
            if print {
                print!("{text}");
                return Ok(true);
            }
            let mut ok = true;
            for o in outcomes.iter().filter(|o| !o.as_expected) {
                println!("unexpected\t{}\t{}", o.example.name, o.line);
                ok = false;
            }
            for (i, (got, want)) in text.lines().zip(GOLDEN.lines()).enumerate() {
                if got != want {
                    println!("line {}\n-{want}\n+{got}", i + 1);
                    ok = false;
                }
            }
            if text.lines().count() != GOLDEN.lines().count() {
                println!("{} lines, golden transcript has {}", text.lines().count(), GOLDEN.lines().count());
                ok = false;
            }
            println!("{} examples\t{}", outcomes.len(), if ok { "ok" } else { "FAIL" });
            Ok(ok)
        }
        Command::Trees(TreesCommand::Analyze { diagram, order, input }) => {
            let (alg, ord) = setup(&diagram, order.as_deref())?;
            let m = parse_tensor(&alg, &input)?;
            let quotient = engine(&alg, &ord, Mode::Quotient, Extremal::Least, None);
            println!("input\t{}", format_tensor(&alg, &ord, &m));
            let prediction = predict(&alg, &m)?;
            let mut line = format!("prediction\t{}", prediction.name());
            if let strand_ainf::optrees::Prediction::NonzeroF(d) = &prediction {
                let _ = write!(line, "\t{}", format_element(&alg, &ord, &Element::from_diagram(*d)));
            }
            println!("{line}");
            for op in [Op::X, Op::F] {
                let (output, _) = evaluate(&quotient, op, &m)?;
                println!("{}\t{output}", op.name());
            }
            for shape in Shape::enumerate(m.len()) {
                let tree = OperationTree::new(&alg, shape.clone(), m.clone())?;
                println!("{shape}\t{}", classify_tree(&alg, &tree)?.report(&alg));
            }
            Ok(true)
        }
    }
}

fn check_tables() -> Result<bool> {
    let mut ok = true;
    let mut line = |name: &str, issues: Vec<String>, detail: String| {
        println!("{name}\t{}\t{detail}", if issues.is_empty() { "ok" } else { "FAIL" });
        for i in &issues {
            println!("\t{i}");
        }
        ok &= issues.is_empty();
    };
    let local = derive_local_tables()?;
    line(
        "local diagrams and products",
        compare_with_rules(&local),
        format!("{} diagrams", local.diagrams.len()),
    );
    let mismatch = |same: bool| if same { Vec::new() } else { vec!["oracle differs from reference".to_string()] };
    let t2 = table2_oracle();
    line("tensor tightness by H-data", mismatch(t2 == table2_reference()), format!("{} cells", t2.len()));
    for (name, seen, allowed) in [
        ("sub-range tightness", table3_oracle(), table3_reference()),
        ("sub-range class tightness", table4_oracle(), table4_reference()),
    ] {
        let issues = seen.difference(&allowed).map(|(a, b)| format!("{a} contains {b}")).collect();
        line(name, issues, format!("{} of {} allowed pairs occur", seen.len(), allowed.len()));
    }
    let rows = local_validity_counts();
    let detail = rows
        .iter()
        .map(|r| format!("{:?}:{}/{}", r.class, r.valid.iter().next().copied().unwrap_or(0), r.shapes))
        .collect::<Vec<_>>()
        .join(" ");
    line("valid local trees", local_validity_mismatches(), detail);
    Ok(ok)
}

fn main() -> ExitCode {
    init_threads();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
