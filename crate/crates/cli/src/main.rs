//! absideal: membership, multiplications, principal absolute ideals and endomorphisms of
//! block-rigid CRQ-groups of ring type, with JSON input and output.
//!
//! Exit status is 0 on success or a true verdict, 1 on a false verdict and 2 on
//! malformed input. Diagnostics go to standard error; standard output only carries JSON.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use absideal_core::group::{validate, Group};
use absideal_core::json::{self, ConstantsJson, ElementJson, GroupSpecJson, IdealJson, Int};
use absideal_core::mult::{mk_c_case, mk_case1, mk_case2_with, Case2Form, SemanticVerdict};
use absideal_core::verify::{campaign, Campaign, FuzzConfig, Report, DEFAULT_SEED};
use absideal_core::{afi_check, check_24, endo_apply, ideal_member, ideal_of, product, semantic_extendable};
use absideal_core::{AmbientElement, Error, StructureConstants};

#[derive(Parser)]
#[command(
    name = "absideal",
    version,
    about = "Exact computations in block-rigid CRQ-groups of ring type",
    after_help = "Every INPUT is a file path or inline JSON. Element inputs also accept `d`.\n\n\
                  EXAMPLES:\n\
                  \n  absideal validate g.json\
                  \n  absideal member g.json '{\"coords\":{\"tau1\":{\"0\":\"1/9\"}}}'\
                  \n  absideal mult-check g.json u.json\
                  \n  absideal mult-check g.json --construct case2 --type tau1 --paper-literal-case2\
                  \n  absideal fuzz --campaign thm24 --seed 42 --samples 100"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construct {
    /// e₀ × e_t = e_t × e₀ = m e_k, for a type with both summands
    Case1,
    /// diagonal e₀ × e₀ constants on every B-type
    Case2,
    /// e_i × e_i = e_k on a C-index
    CCase,
}

#[derive(clap::Args)]
struct ConstructArgs {
    /// Build constructor constants instead of reading them
    #[arg(long, value_enum)]
    construct: Option<Construct>,
    /// Type the constructor is built for
    #[arg(long = "type", value_name = "NAME", requires = "construct")]
    ty: Option<String>,
    /// C-index `t` (case1) or `i` (c-case); defaults to the first C-index
    #[arg(long, requires = "construct")]
    index: Option<u32>,
    /// Target basis index `k`; defaults to the first index of the type
    #[arg(long, requires = "construct")]
    target: Option<u32>,
    /// Use the uncorrected case-2 coefficients s_τ s_σ⁻¹ m_τ + m_σ² y_σ
    #[arg(long)]
    paper_literal_case2: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a group spec and print n(G)
    Validate { group: String },
    /// Decide x ∈ G and print the class β of x modulo A
    Member { group: String, x: String },
    /// Print the principal absolute ideal ⟨g⟩_AI as (g, ℓ)
    Ideal { group: String, g: String },
    /// Decide x ∈ ⟨g⟩ + L and print the witness k
    IdealMember { group: String, ideal: String, x: String },
    /// Run the syntactic criterion and the semantic extension test on structure constants
    MultCheck {
        group: String,
        /// Structure constants; omit with --construct
        constants: Option<String>,
        #[command(flatten)]
        build: ConstructArgs,
    },
    /// Compute x × y
    MultApply {
        group: String,
        x: String,
        y: String,
        /// Structure constants; omit with --construct
        #[arg(long)]
        constants: Option<String>,
        #[command(flatten)]
        build: ConstructArgs,
    },
    /// Apply an endomorphism to x ∈ G
    EndoApply { group: String, phi: String, x: String },
    /// Decide φ(g) ∈ ⟨g⟩_AI and print the witness k
    AfiCheck { group: String, g: String, phi: String },
    /// Run verification campaigns and print their reports
    Fuzz {
        /// Campaign name, or `all`
        #[arg(long, default_value = "all")]
        campaign: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of generated groups per campaign
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Append failures and discrepancies to this JSON-lines file
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_types: usize,
        #[arg(long, default_value_t = 2)]
        max_c_rank: usize,
        #[arg(long, default_value_t = 12)]
        max_m: u64,
        /// Comma-separated prime pool
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7,11")]
        primes: Vec<u64>,
    },
}

/// A command's result: JSON for standard output and the verdict.
struct Outcome {
    json: String,
    verdict: bool,
}

impl Outcome {
    fn new(value: &impl Serialize, verdict: bool) -> Self {
        Self { json: json::to_string(value), verdict }
    }
}

enum Failure {
    /// The input is malformed.
    Input(Error),
    /// The element the command is about is not in G.
    NotMember,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotMember => Failure::NotMember,
            e => Failure::Input(e),
        }
    }
}

type Run = Result<Outcome, Failure>;

#[derive(Serialize)]
struct ErrorJson {
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    path: String,
    message: String,
}

#[derive(Serialize)]
struct Validated {
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<Int>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<String>,
}

#[derive(Serialize)]
struct Membership {
    member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<Int>,
}

#[derive(Serialize)]
struct IdealMembership {
    member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<Int>,
}

#[derive(Serialize)]
struct MultVerdict {
    syntactic_24: bool,
    semantic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<Int>,
    #[serde(skip_serializing_if = "Option::is_none")]
    syntactic_failure: Option<String>,
    /// Class of d × d modulo A, when the constants extend.
    #[serde(skip_serializing_if = "Option::is_none")]
    dd_beta: Option<Int>,
    #[serde(skip_serializing_if = "Option::is_none")]
    semantic_failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constants: Option<ConstantsJson>,
}

#[derive(Serialize)]
struct Applied {
    product: ElementJson,
    member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<Int>,
}

#[derive(Serialize)]
struct Image {
    image: ElementJson,
    beta: Int,
}

#[derive(Serialize)]
struct Afi {
    afi: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<Int>,
}

#[derive(Serialize)]
struct FuzzOutput<'a> {
    ok: bool,
    reports: &'a [Report],
}

fn read_input(arg: &str) -> Result<String, Error> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::json("$", format!("cannot read {arg}: {e}")))
}

fn load_group(arg: &str) -> Result<Group, Error> {
    json::parse_group(&read_input(arg)?)
}

fn load_element(group: &Group, arg: &str) -> Result<AmbientElement, Error> {
    if arg == "d" {
        return Ok(group.d().clone());
    }
    json::parse_element(group, &read_input(arg)?)
}

fn constructed(group: &Group, b: &ConstructArgs, kind: Construct) -> Result<StructureConstants, Error> {
    let name = b.ty.as_deref().ok_or_else(|| Error::json("--type", "--construct needs --type"))?;
    let ty = group.spec().type_index(name).ok_or_else(|| Error::json("--type", format!("unknown type {name:?}")))?;
    let first_c = || group.c_indices(ty).first().copied().ok_or_else(|| Error::Precondition(format!("{name} has no C-indices")));
    let k = b.target.unwrap_or_else(|| group.indices(ty)[0]);
    if b.paper_literal_case2 && !matches!(kind, Construct::Case2) {
        return Err(Error::json("--paper-literal-case2", "only applies to --construct case2"));
    }
    match kind {
        Construct::Case1 => mk_case1(group, ty, b.index.map_or_else(first_c, Ok)?, k),
        Construct::Case2 => {
            let form = if b.paper_literal_case2 { Case2Form::Literal } else { Case2Form::Corrected };
            mk_case2_with(group, ty, form, &Default::default())
        }
        Construct::CCase => mk_c_case(group, ty, b.index.map_or_else(first_c, Ok)?, k),
    }
}

fn load_constants(group: &Group, arg: Option<&str>, b: &ConstructArgs) -> Result<(StructureConstants, bool), Error> {
    match (arg, b.construct) {
        (Some(_), Some(_)) => Err(Error::json("--construct", "give either constants or --construct, not both")),
        (None, None) => Err(Error::json("$", "structure constants are required")),
        (Some(text), None) => {
            if b.paper_literal_case2 {
                return Err(Error::json("--paper-literal-case2", "only applies to --construct case2"));
            }
            Ok((json::parse_constants(group, &read_input(text)?)?, false))
        }
        (None, Some(kind)) => Ok((constructed(group, b, kind)?, true)),
    }
}

fn validate_cmd(arg: &str) -> Run {
    let spec = json::from_str::<GroupSpecJson>(&read_input(arg)?)?.into_spec()?;
    let report = validate(&spec);
    let out = Validated {
        ok: report.is_ok(),
        n: report.derived.as_ref().filter(|_| report.is_ok()).map(|d| Int(d.n.clone())),
        violations: report.violations.iter().map(|v| v.to_string()).collect(),
    };
    Ok(Outcome::new(&out, report.is_ok()))
}

fn member_cmd(g: &str, x: &str) -> Run {
    let group = load_group(g)?;
    let x = load_element(&group, x)?;
    let cert = group.member_g(&x)?;
    let out = Membership { member: cert.is_some(), beta: cert.map(|c| Int(c.beta.residue().clone())) };
    Ok(Outcome::new(&out, out.member))
}

fn ideal_cmd(g: &str, x: &str) -> Run {
    let group = load_group(g)?;
    let g = load_element(&group, x)?;
    let ideal = ideal_of(&group, &g)?;
    Ok(Outcome::new(&IdealJson::from_ideal(&group, &ideal), true))
}

fn ideal_member_cmd(g: &str, i: &str, x: &str) -> Run {
    let group = load_group(g)?;
    let ideal = json::parse_ideal(&group, &read_input(i)?)?;
    let x = load_element(&group, x)?;
    let k = ideal_member(&group, &ideal, &x)?;
    let out = IdealMembership { member: k.is_some(), k: k.map(Int) };
    Ok(Outcome::new(&out, out.member))
}

fn mult_check_cmd(g: &str, u: Option<&str>, b: &ConstructArgs) -> Run {
    let group = load_group(g)?;
    let (u, built) = load_constants(&group, u, b)?;
    let syntactic = check_24(&group, &u);
    let semantic = semantic_extendable(&group, &u);
    let (dd_beta, semantic_failure) = match &semantic {
        SemanticVerdict::Extendable(c) => (Some(Int(c.dd_beta.residue().clone())), None),
        SemanticVerdict::NotExtendable(f) => (None, Some(format!("{:?}: {:?}", f.product, f.reason))),
    };
    let out = MultVerdict {
        syntactic_24: syntactic.is_ok(),
        semantic: semantic.is_extendable(),
        alpha: syntactic.as_ref().ok().map(|w| Int(w.alpha.residue().clone())),
        syntactic_failure: syntactic.as_ref().err().map(|f| f.to_string()),
        dd_beta,
        semantic_failure,
        constants: built.then(|| ConstantsJson::from_constants(&group, &u)),
    };
    Ok(Outcome::new(&out, out.semantic))
}

fn mult_apply_cmd(g: &str, x: &str, y: &str, u: Option<&str>, b: &ConstructArgs) -> Run {
    let group = load_group(g)?;
    let (u, _) = load_constants(&group, u, b)?;
    let x = load_element(&group, x)?;
    let y = load_element(&group, y)?;
    let p = product(&u, &x, &y);
    let cert = group.member_g(&p)?;
    let out = Applied {
        product: ElementJson::from_element(&group, &p),
        member: cert.is_some(),
        beta: cert.map(|c| Int(c.beta.residue().clone())),
    };
    Ok(Outcome::new(&out, out.member))
}

fn endo_apply_cmd(g: &str, phi: &str, x: &str) -> Run {
    let group = load_group(g)?;
    let phi = json::parse_endomorphism(&group, &read_input(phi)?)?;
    let x = load_element(&group, x)?;
    let image = endo_apply(&group, &phi, &x)?;
    let beta = group.member_g(&image)?.expect("images are certified members").beta;
    let out = Image { image: ElementJson::from_element(&group, &image), beta: Int(beta.residue().clone()) };
    Ok(Outcome::new(&out, true))
}

fn afi_check_cmd(g: &str, x: &str, phi: &str) -> Run {
    let group = load_group(g)?;
    let x = load_element(&group, x)?;
    let phi = json::parse_endomorphism(&group, &read_input(phi)?)?;
    let k = afi_check(&group, &x, &phi)?;
    if k.is_none() {
        eprintln!("alarm: φ(g) is not in ⟨g⟩_AI");
    }
    let out = Afi { afi: k.is_some(), k: k.map(Int) };
    Ok(Outcome::new(&out, out.afi))
}

#[allow(clippy::too_many_arguments)]
fn fuzz_cmd(
    name: &str,
    seed: u64,
    samples: usize,
    corpus: Option<PathBuf>,
    max_types: usize,
    max_c_rank: usize,
    max_m: u64,
    primes: Vec<u64>,
) -> Run {
    let campaigns: Vec<Campaign> = match name {
        "all" => Campaign::ALL.to_vec(),
        _ => vec![Campaign::parse(name).ok_or_else(|| Error::json("--campaign", format!("unknown campaign {name:?}")))?],
    };
    let prime_pool: BTreeSet<u64> = primes.into_iter().collect();
    let cfg = FuzzConfig { seed, max_types, max_c_rank, max_m, prime_pool, samples, corpus };
    cfg.validate().map_err(|e| Error::json("$", e))?;
    let mut reports = Vec::new();
    for c in campaigns {
        let report = campaign::run_and_persist(c, &cfg).map_err(|e| Error::json("--corpus", e.to_string()))?;
        if !report.ok() {
            eprintln!("{}: {} failures", report.campaign, report.failures);
        }
        reports.push(report);
    }
    let ok = reports.iter().all(Report::ok);
    Ok(Outcome::new(&FuzzOutput { ok, reports: &reports }, ok))
}

fn dispatch(command: Command) -> Run {
    match command {
        Command::Validate { group } => validate_cmd(&group),
        Command::Member { group, x } => member_cmd(&group, &x),
        Command::Ideal { group, g } => ideal_cmd(&group, &g),
        Command::IdealMember { group, ideal, x } => ideal_member_cmd(&group, &ideal, &x),
        Command::MultCheck { group, constants, build } => mult_check_cmd(&group, constants.as_deref(), &build),
        Command::MultApply { group, x, y, constants, build } => mult_apply_cmd(&group, &x, &y, constants.as_deref(), &build),
        Command::EndoApply { group, phi, x } => endo_apply_cmd(&group, &phi, &x),
        Command::AfiCheck { group, g, phi } => afi_check_cmd(&group, &g, &phi),
        Command::Fuzz { campaign, seed, samples, corpus, max_types, max_c_rank, max_m, primes } => {
            fuzz_cmd(&campaign, seed, samples, corpus, max_types, max_c_rank, max_m, primes)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(out) => {
            println!("{}", out.json);
            ExitCode::from(if out.verdict { 0 } else { 1 })
        }
        Err(Failure::NotMember) => {
            eprintln!("input element is not in G");
            println!("{}", json::to_string(&Membership { member: false, beta: None }));
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            let (path, message) = match e {
                Error::Json { path, message } => (path, message),
                e => ("$".to_string(), e.to_string()),
            };
            println!("{}", json::to_string(&ErrorJson { error: ErrorBody { path, message } }));
            ExitCode::from(2)
        }
    }
}
