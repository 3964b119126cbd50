//! Command-line front end.
//!
//! Exit codes: 0 when the computation completes with a passing result, 1 when
//! it completes with a failing one, 2 on input errors and resource limits.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::to_i64_vec;
use crate::nilpotent::PcPresentation;
use crate::raag::{magnus_image, normal_form, rtfn_witness, Graph, RaagWord};
use crate::rfrs::{
    obstruction_certificate, parse_subgroup_blocks, restrict_chain, trapped_central_witness, verify_rfrs_chain,
    Filtration, RfrsReport,
};

#[derive(Debug, Parser)]
#[command(name = "nilrfrs", version, about = "Nilpotent groups, RFRS filtrations and graph groups")]
pub struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Center, Hirsch rank and abelianization of a nilpotent group.
    Analyze(GroupArg),
    /// Check the RFRS conditions along a chain of subgroups.
    RfrsVerify {
        #[command(flatten)]
        group: GroupArg,
        /// Chain file: blank-line separated blocks of generator rows.
        #[arg(long)]
        chain: PathBuf,
    },
    /// Certify that a central element survives every admissible chain.
    RfrsObstruct {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        max_index: u64,
    },
    /// Intersect a chain with a subgroup and check the result.
    RfrsRestrict {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        chain: PathBuf,
        /// File with the generator rows of the subgroup.
        #[arg(long)]
        subgroup: PathBuf,
    },
    /// Normal form of a word in a graph group.
    RaagNf {
        #[command(flatten)]
        graph: GraphArg,
        /// Comma-separated letters, e.g. `a,b^-1,c^2`.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Truncated Magnus image of a word.
    RaagMagnus {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        degree: u64,
    },
    /// Check that short nontrivial elements have nontrivial Magnus images.
    RaagRtfn {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        max_len: u64,
    },
}

#[derive(Debug, Args)]
pub struct GroupArg {
    /// Builder expression (`heisenberg`, `ut(4)`, `free_abelian(2)`,
    /// `direct_product(A, B)`) or a presentation file.
    #[arg(long)]
    pub group: String,
}

#[derive(Debug, Args)]
pub struct GraphArg {
    /// Graph file, or one of `edgeless(n)`, `complete(n)`, `path(n)`.
    #[arg(long)]
    pub graph: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub index: i64,
    pub normal: bool,
    pub kernel_contained: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisJson {
    pub generators: usize,
    pub class: usize,
    pub hirsch_rank: usize,
    pub lower_central_ranks: Vec<usize>,
    pub center_rank: usize,
    pub center_basis: Vec<Vec<i64>>,
    pub abelianization: String,
    pub center_to_abelianization_injective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: String,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaagJson {
    pub word: Option<String>,
    pub normal_form: Option<String>,
    pub degree: Option<usize>,
    pub series: Option<Vec<TermJson>>,
    pub words_checked: Option<usize>,
    pub nontrivial_elements: Option<usize>,
    pub counterexample: Option<String>,
}

/// One schema for every command; fields that do not apply are `null`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub steps: Option<Vec<StepJson>>,
    pub overall: bool,
    pub intersection_rank: Option<usize>,
    pub witness: Option<Vec<i64>>,
    pub checked_subgroups: Option<usize>,
    pub analysis: Option<AnalysisJson>,
    pub raag: Option<RaagJson>,
}

impl Report {
    fn new(command: &str, overall: bool) -> Self {
        Self {
            command: command.to_string(),
            steps: None,
            overall,
            intersection_rank: None,
            witness: None,
            checked_subgroups: None,
            analysis: None,
            raag: None,
        }
    }
}

fn int(x: &BigInt) -> Result<i64> {
    Ok(to_i64_vec(std::slice::from_ref(x))?[0])
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

/// A builder expression, or the contents of a presentation file.
pub fn load_group(arg: &str) -> Result<PcPresentation> {
    let path = Path::new(arg);
    if path.is_file() {
        return read(path)?.parse();
    }
    PcPresentation::build_standard(arg)
}

pub fn load_graph(arg: &str) -> Result<Graph> {
    let path = Path::new(arg);
    if path.is_file() {
        return Graph::parse(&read(path)?);
    }
    let named = arg
        .strip_suffix(')')
        .and_then(|s| s.split_once('('))
        .and_then(|(name, n)| Some((name.trim(), n.trim().parse::<usize>().ok()?)));
    match named {
        Some(("edgeless", n)) => Ok(Graph::edgeless(n)),
        Some(("complete", n)) => Ok(Graph::complete(n)),
        Some(("path", n)) => Ok(Graph::path(n)),
        _ => Err(Error::Parse(format!("`{arg}` is neither a graph file nor a known graph"))),
    }
}

fn load_chain(p: &PcPresentation, path: &Path) -> Result<Filtration> {
    Filtration::parse(p.clone(), &read(path)?)
}

fn steps_json(r: &RfrsReport) -> Result<Vec<StepJson>> {
    r.steps
        .iter()
        .map(|s| {
            Ok(StepJson {
                index: int(&s.index)?,
                normal: s.normal,
                kernel_contained: s.kernel_contained,
            })
        })
        .collect()
}

fn steps_text(r: &RfrsReport) -> String {
    let mut text = String::new();
    for (i, s) in r.steps.iter().enumerate() {
        text.push_str(&format!(
            "step {i}: index {}, normal {}, kernel contained {}\n",
            s.index, s.normal, s.kernel_contained
        ));
    }
    text
}

fn analyze(p: &PcPresentation) -> Result<(Report, String)> {
    let center = p.center();
    let ab = p.abelianization().structure();
    let rep = p.center_ab_report();
    let center_basis = center
        .generators()
        .iter()
        .map(|g| to_i64_vec(g.exps()))
        .collect::<Result<Vec<_>>>()?;
    let witness = rep.kernel_witness.as_ref().map(|z| to_i64_vec(z.exps())).transpose()?;
    let analysis = AnalysisJson {
        generators: p.generator_count(),
        class: p.class(),
        hirsch_rank: p.hirsch_rank(),
        lower_central_ranks: p.lower_central_ranks(),
        center_rank: center.hirsch_length(),
        center_basis,
        abelianization: ab.to_string(),
        center_to_abelianization_injective: rep.injective,
    };
    let mut text = format!(
        "generators: {}\nclass: {}\nHirsch rank: {}\ncenter rank: {}\nabelianization: {}\n\
         center-to-abelianization injective: {}\n",
        analysis.generators,
        analysis.class,
        analysis.hirsch_rank,
        analysis.center_rank,
        analysis.abelianization,
        rep.injective
    );
    match &rep.kernel_witness {
        Some(z) => text.push_str(&format!("witness: {z}\n")),
        None => text.push_str("witness: none\n"),
    }
    let mut report = Report::new("analyze", true);
    report.witness = witness;
    report.analysis = Some(analysis);
    Ok((report, text))
}

fn rfrs_verify(p: &PcPresentation, chain: &Path) -> Result<(Report, String)> {
    let f = load_chain(p, chain)?;
    let r = verify_rfrs_chain(&f)?;
    let mut text = steps_text(&r);
    let witness = if r.overall {
        trapped_central_witness(&f)?
    } else {
        None
    };
    let mut report = Report::new("rfrs-verify", r.overall);
    report.steps = Some(steps_json(&r)?);
    report.intersection_rank = Some(r.intersection.hirsch_length());
    if let Some(t) = &witness {
        report.witness = Some(to_i64_vec(t.witness.exps())?);
        let orders: Vec<String> = t.orders.iter().map(ToString::to_string).collect();
        text.push_str(&format!(
            "trapped central witness: {} (abelianization orders {})\n",
            t.witness,
            orders.join(", ")
        ));
    }
    text.push_str(&format!("overall: {}\n", if r.overall { "pass" } else { "fail" }));
    Ok((report, text))
}

fn rfrs_obstruct(p: &PcPresentation, max_index: u64) -> Result<(Report, String)> {
    let c = obstruction_certificate(p, max_index)?;
    let mut report = Report::new("rfrs-obstruct", c.all_pass);
    report.witness = Some(to_i64_vec(c.witness.exps())?);
    report.checked_subgroups = Some(c.checked_subgroups);
    let text = format!(
        "witness: {}\nindex bound: {}\nnormal subgroups checked: {}\nexcluding the witness: {}\n\
         note: {}\nall_pass: {}\n",
        c.witness, c.index_bound, c.checked_subgroups, c.excluding_witness, c.depth_note, c.all_pass
    );
    Ok((report, text))
}

fn rfrs_restrict(p: &PcPresentation, chain: &Path, subgroup: &Path) -> Result<(Report, String)> {
    let f = load_chain(p, chain)?;
    let blocks = parse_subgroup_blocks(p, &read(subgroup)?)?;
    let [h] = &blocks[..] else {
        return Err(Error::Parse("the subgroup file must contain exactly one block".into()));
    };
    let (restricted, ind) = restrict_chain(&f, h)?;
    let r = verify_rfrs_chain(&restricted)?;
    let mut text = format!(
        "subgroup presentation:\n{}restricted chain length: {}\n",
        ind.presentation,
        restricted.chain().len()
    );
    text.push_str(&steps_text(&r));
    text.push_str(&format!("overall: {}\n", if r.overall { "pass" } else { "fail" }));
    let mut report = Report::new("rfrs-restrict", r.overall);
    report.steps = Some(steps_json(&r)?);
    report.intersection_rank = Some(r.intersection.hirsch_length());
    Ok((report, text))
}

fn raag_json() -> RaagJson {
    RaagJson {
        word: None,
        normal_form: None,
        degree: None,
        series: None,
        words_checked: None,
        nontrivial_elements: None,
        counterexample: None,
    }
}

fn monomial_name(m: &[usize]) -> String {
    if m.is_empty() {
        return "1".into();
    }
    RaagWord::new(&m.iter().map(|&v| (v, 1)).collect::<Vec<_>>()).to_string()
}

fn raag_command(command: &Command, graph: &Graph) -> Result<(Report, String)> {
    match command {
        Command::RaagNf { word, .. } => {
            let w = RaagWord::parse(word)?;
            w.check(graph)?;
            let nf = normal_form(graph, &w);
            let mut report = Report::new("raag-nf", true);
            report.raag = Some(RaagJson {
                word: Some(w.to_string()),
                normal_form: Some(nf.to_string()),
                ..raag_json()
            });
            Ok((report, format!("{nf}\n")))
        }
        Command::RaagMagnus { word, degree, .. } => {
            let w = RaagWord::parse(word)?;
            w.check(graph)?;
            let d = *degree as usize;
            let s = magnus_image(graph, &w, d);
            let series: Vec<TermJson> = s
                .terms()
                .map(|(m, c)| TermJson {
                    monomial: monomial_name(m),
                    coefficient: c.to_string(),
                })
                .collect();
            let text: String = series
                .iter()
                .map(|t| format!("{}\t{}\n", t.coefficient, t.monomial))
                .collect();
            let mut report = Report::new("raag-magnus", true);
            report.raag = Some(RaagJson {
                word: Some(w.to_string()),
                degree: Some(d),
                series: Some(series),
                ..raag_json()
            });
            Ok((report, text))
        }
        Command::RaagRtfn { max_len, .. } => {
            let r = rtfn_witness(graph, *max_len as usize)?;
            let mut report = Report::new("raag-rtfn", r.pass);
            report.raag = Some(RaagJson {
                words_checked: Some(r.words_checked),
                nontrivial_elements: Some(r.nontrivial_elements),
                counterexample: r.counterexample.as_ref().map(ToString::to_string),
                ..raag_json()
            });
            let mut text = format!(
                "words checked: {}\nnontrivial elements: {}\n",
                r.words_checked, r.nontrivial_elements
            );
            if let Some(c) = &r.counterexample {
                text.push_str(&format!("trivial image for nontrivial element {c}\n"));
            }
            text.push_str(&format!("overall: {}\n", if r.pass { "pass" } else { "fail" }));
            Ok((report, text))
        }
        _ => unreachable!("graph commands only"),
    }
}

fn execute(cli: &Cli) -> Result<(Report, String)> {
    match &cli.command {
        Command::Analyze(g) => analyze(&load_group(&g.group)?),
        Command::RfrsVerify { group, chain } => rfrs_verify(&load_group(&group.group)?, chain),
        Command::RfrsObstruct { group, max_index } => rfrs_obstruct(&load_group(&group.group)?, *max_index),
        Command::RfrsRestrict {
            group,
            chain,
            subgroup,
        } => rfrs_restrict(&load_group(&group.group)?, chain, subgroup),
        Command::RaagNf { graph, .. } | Command::RaagMagnus { graph, .. } | Command::RaagRtfn { graph, .. } => {
            raag_command(&cli.command, &load_graph(&graph.graph)?)
        }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok((report, text)) => {
            let written = if cli.json {
                serde_json::to_string_pretty(&report)
                    .map_err(std::io::Error::other)
                    .and_then(|s| writeln!(out, "{s}"))
            } else {
                write!(out, "{text}")
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            if report.overall {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

