//! Command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::correlate::{Conjugation, Correlator, ProductStateVector};
use crate::dense::DEFAULT_ORACLE_CAP;
use crate::fixtures;
use crate::localdata::{compute_local_orbitals, validate_projectors, LocalProjectorSet, ProjectorFile};
use crate::maporbits::{enumerate_orbits, EnumerateOptions, DEFAULT_CODE_BUDGET};
use crate::oracle::{emit_wreath_generators, verify_instance, verify_suite, OracleInstance};
use crate::perm::GroupSpec;
use crate::report::{render_latex, render_structured, render_text, ReferenceData, RenderOptions};
use crate::wreathring::{build_report, PipelineOptions};

#[derive(Parser, Debug)]
#[command(name = "wreath", version, about = "Centralizer rings and irreducible projectors of wreath products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print group data for the position and local groups.
    Info(Inputs),
    /// Write the generators of the wreath product in group file format.
    BuildGenerators(Inputs),
    /// Compute the centralizer ring basis only.
    Centralizer(Inputs),
    /// Compute the basis and the irreducible projectors.
    Split(Inputs),
    /// Check a small instance densely; without inputs, run the standard suite.
    Verify(Inputs),
    /// Invariant inner products of two sparse vectors.
    Correlate(CorrelateArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Latex,
    Structured,
}

#[derive(Args, Debug, Clone)]
pub struct Inputs {
    /// Position group G(X); a path or `builtin:<name>`.
    #[arg(long)]
    pub space: Option<String>,
    /// Local group F(V); a path or `builtin:<name>`.
    #[arg(long)]
    pub local: Option<String>,
    /// Local projector file; a path or `builtin:<name>`.
    #[arg(long)]
    pub projectors: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the wreath generators to this file.
    #[arg(long)]
    pub emit_generators: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bytes available for the visited-code array and generator emission.
    #[arg(long)]
    pub memory_budget: Option<u64>,
    /// Reference figures to compare against; a path or `builtin:<name>`.
    #[arg(long)]
    pub reference: Option<String>,
    /// Skip the centralizer basis in `split`.
    #[arg(long)]
    pub no_basis: bool,
    /// Print per-phase wall-clock times.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug, Clone)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Bra vector file, lines `coeff ; i1,...,iN`.
    #[arg(long)]
    pub phi: PathBuf,
    /// Ket vector file; defaults to the bra.
    #[arg(long)]
    pub psi: Option<PathBuf>,
    /// Only this projector (1-based).
    #[arg(long)]
    pub orbit: Option<usize>,
    /// Conjugate bra coefficients by sqrt(d) -> -sqrt(d).
    #[arg(long)]
    pub galois: bool,
}

fn read_source(source: &str, kind: &str) -> anyhow::Result<String> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let text = match kind {
            "group" => fixtures::group_text(name)?,
            "projectors" => fixtures::projector_text(name)?,
            _ => fixtures::reference_text(name)?,
        };
        return Ok(text.to_string());
    }
    fs::read_to_string(source).with_context(|| format!("reading {kind} file {source}"))
}

fn load_group(source: &Option<String>, flag: &str) -> anyhow::Result<GroupSpec> {
    let Some(source) = source else {
        bail!("--{flag} is required");
    };
    read_source(source, "group")?.parse().with_context(|| format!("parsing {source}"))
}

fn load_projectors(source: &Option<String>) -> anyhow::Result<Option<ProjectorFile>> {
    source
        .as_ref()
        .map(|s| -> anyhow::Result<ProjectorFile> {
            read_source(s, "projectors")?.parse().with_context(|| format!("parsing {s}"))
        })
        .transpose()
}

fn code_budget(inputs: &Inputs) -> u64 {
    inputs
        .memory_budget
        .map_or(DEFAULT_CODE_BUDGET, |bytes| bytes.saturating_mul(8))
}

fn emit(inputs: &Inputs, space: &GroupSpec, local: &GroupSpec, out: &mut dyn Write) -> anyhow::Result<()> {
    if let Some(path) = &inputs.emit_generators {
        let file = io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
        let n = emit_wreath_generators(file, local, space, inputs.memory_budget.unwrap_or(u64::MAX))?;
        writeln!(out, "Wrote {n} wreath generators to {}", path.display())?;
    }
    Ok(())
}

fn info(inputs: &Inputs, out: &mut dyn Write) -> anyhow::Result<bool> {
    let space = load_group(&inputs.space, "space")?;
    let local = load_group(&inputs.local, "local")?;
    let options = PipelineOptions {
        basis: false,
        projectors: false,
        ..PipelineOptions::default()
    };
    let report = build_report(&space, &local, None, &options)?;
    write!(out, "{}", render_text(&report, &RenderOptions::default()))?;
    emit(inputs, &space, &local, out)?;
    let local_group = local.group();
    let basis = compute_local_orbitals(&local_group);
    if let Some(file) = load_projectors(&inputs.projectors)? {
        let set = LocalProjectorSet::from_file(&file, &basis)?;
        let validation = validate_projectors(&set, &basis, &local_group)?;
        writeln!(out, "\nLocal projector validation:")?;
        write!(out, "{validation}")?;
        return Ok(validation.is_ok());
    }
    Ok(true)
}

fn pipeline(inputs: &Inputs, projectors: bool, out: &mut dyn Write) -> anyhow::Result<bool> {
    let space = load_group(&inputs.space, "space")?;
    let local = load_group(&inputs.local, "local")?;
    let file = if projectors {
        let f = load_projectors(&inputs.projectors)?;
        if f.is_none() {
            bail!("--projectors is required");
        }
        f
    } else {
        None
    };
    let reference = inputs
        .reference
        .as_ref()
        .map(|r| -> anyhow::Result<ReferenceData> { Ok(read_source(r, "reference")?.parse()?) })
        .transpose()?;
    emit(inputs, &space, &local, &mut io::sink())?;
    let options = PipelineOptions {
        threads: inputs.threads,
        seed: inputs.seed,
        budget: code_budget(inputs),
        basis: !(projectors && inputs.no_basis),
        projectors,
        ..PipelineOptions::default()
    };
    let report = build_report(&space, &local, file.as_ref(), &options)?;
    let render = RenderOptions {
        timing: inputs.timing,
        reference: reference.as_ref(),
    };
    match inputs.format {
        Format::Text => write!(out, "{}", render_text(&report, &render))?,
        Format::Latex => write!(out, "{}", render_latex(&report, &render))?,
        Format::Structured => write!(out, "{}", render_structured(&report))?,
    }
    if !inputs.timing {
        let total: f64 = report.timings.iter().map(|(_, s)| s).sum();
        eprintln!("Time: {total:.2} sec");
    }
    Ok(report.checks_passed())
}

fn verify(inputs: &Inputs, out: &mut dyn Write) -> anyhow::Result<bool> {
    let report = if inputs.space.is_none() && inputs.local.is_none() {
        verify_suite()?
    } else {
        let space = load_group(&inputs.space, "space")?;
        let local = load_group(&inputs.local, "local")?;
        let Some(projectors) = load_projectors(&inputs.projectors)? else {
            bail!("--projectors is required");
        };
        let instance = OracleInstance {
            name: format!("{} wr {}", local.name, space.name),
            local,
            space,
            projectors,
        };
        verify_instance(&instance, DEFAULT_ORACLE_CAP)?.0
    };
    write!(out, "{report}")?;
    let ok = report.is_ok();
    writeln!(out, "{}", if ok { "All checks passed" } else { "Verification FAILED" })?;
    Ok(ok)
}

fn correlate(args: &CorrelateArgs, out: &mut dyn Write) -> anyhow::Result<bool> {
    let inputs = &args.inputs;
    let space = load_group(&inputs.space, "space")?;
    let local = load_group(&inputs.local, "local")?;
    let Some(file) = load_projectors(&inputs.projectors)? else {
        bail!("--projectors is required");
    };
    let group = space.group();
    let basis = compute_local_orbitals(&local.group());
    let set = LocalProjectorSet::from_file(&file, &basis)?;
    let table = enumerate_orbits(
        &group,
        set.len() as u32,
        &EnumerateOptions {
            budget: code_budget(inputs),
            member_threshold: 0,
            threads: inputs.threads,
        },
    )?;
    let (n, m) = (space.points, local.points);
    let phi_text = fs::read_to_string(&args.phi).with_context(|| format!("reading {}", args.phi.display()))?;
    let phi = ProductStateVector::parse(&phi_text, n, m)?;
    let psi = match &args.psi {
        Some(p) => ProductStateVector::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?, n, m)?,
        None => phi.clone(),
    };
    let mut correlator = Correlator::new(&group, &table, &set)?;
    if args.galois {
        correlator.conjugation = Conjugation::Galois;
    }
    match args.orbit {
        Some(k) if k == 0 || k > table.len() => bail!("--orbit must be in 1..={}", table.len()),
        Some(k) => {
            let v = correlator.inner_product(&phi, &psi, k - 1)?;
            writeln!(out, "<Phi|B~{k}|Psi> = {v}")?;
        }
        None => {
            let rows = correlator.correlation_table(&phi, &psi)?;
            writeln!(out, "orbit\tdimension\tvalue")?;
            for r in rows.iter().filter(|r| !r.value.is_zero()) {
                writeln!(out, "{}\t{}\t{}", r.orbit, r.dimension, r.value)?;
            }
            let total = rows.iter().try_fold(crate::scalars::QuadExtScalar::zero(), |a, r| a.checked_add(&r.value))?;
            let direct = crate::correlate::direct_inner_product(&phi, &psi, correlator.conjugation)?;
            writeln!(out, "sum = {total}")?;
            writeln!(out, "<Phi|Psi> = {direct}")?;
            if total != direct {
                writeln!(out, "completeness FAILED")?;
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Runs one command, writing the report to `out`; `Ok(false)` means a check failed.
pub fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Info(i) => info(i, out),
        Command::BuildGenerators(i) => {
            let space = load_group(&i.space, "space")?;
            let local = load_group(&i.local, "local")?;
            match &i.emit_generators {
                Some(_) => emit(i, &space, &local, out)?,
                None => {
                    emit_wreath_generators(&mut *out, &local, &space, i.memory_budget.unwrap_or(u64::MAX))?;
                }
            }
            Ok(true)
        }
        Command::Centralizer(i) => pipeline(i, false, out),
        Command::Split(i) => pipeline(i, true, out),
        Command::Verify(i) => verify(i, out),
        Command::Correlate(a) => correlate(a, out),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
