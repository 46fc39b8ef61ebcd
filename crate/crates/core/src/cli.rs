//! Command-line surface: machine-readable verification reports over the
//! structure, algebra, special-subspace, transport and covering machinery.
//!
//! Exit codes are a stable contract:
//! 0 pass, 1 usage error, 2 structure failure, 3 special-table mismatch,
//! 4 counterexample mismatch, 5 covering failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{HoloError, Result};
use crate::liealg::{algebra_basis, exp_element, AlgebraBasis};
use crate::linalg::{nullspace, random_unit, Tolerances};
use crate::report::{to_json_string, SpecialReportJson, SCHEMA};
use crate::special::{expected_minimal_dimension, minimal_special_dimension, Definition};
use crate::structures::{
    build_structures, complex_structure, membership_residual, AlternatingForm, GroupFamily,
    GroupSpec, RelationCheck, StructureTable,
};
use crate::weakcheck::{
    ambient_unitary_algebra, coefficient_probe_residual, example1_check, example2_check,
    forced_supergroup, forced_supergroup_is_proper, structure_coefficients, weak_cover_check,
    CounterexampleReport, Verdict,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_STRUCTURE: i32 = 2;
pub const EXIT_SPECIAL: i32 = 3;
pub const EXIT_COUNTEREXAMPLE: i32 = 4;
pub const EXIT_COVERING: i32 = 5;

const RESIDUAL_PASS: f64 = 1e-8;
const DEFAULT_R_GRID: [f64; 8] = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// The instance set exercised by the aggregate report.
pub fn default_instances() -> Vec<GroupSpec> {
    vec![
        GroupSpec::so(5),
        GroupSpec::so(7),
        GroupSpec::u(2),
        GroupSpec::u(3),
        GroupSpec::su(3),
        GroupSpec::su(4),
        GroupSpec::sp(2),
        GroupSpec::sp(3),
        GroupSpec::sp_u1(2),
        GroupSpec::sp_sp1(2),
        GroupSpec::g2(),
        GroupSpec::spin7(),
        GroupSpec::spin9(),
    ]
}

#[derive(Parser)]
#[command(
    name = "holonomy-forge",
    about = "Verification reports for the transitive sphere groups: invariant structures, \
             special subspaces, parallel-transport counterexamples and covering checks",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the invariant structures of one group and verify every relation.
    Structures(StructuresArgs),
    /// Search for the minimal special dimension and compare with the table.
    Special(SpecialArgs),
    /// Reproduce a transport counterexample over a radius grid.
    Counterexample(CounterexampleArgs),
    /// Run every section and aggregate into one dossier.
    FullReport(FullReportArgs),
}

#[derive(Args)]
struct StructuresArgs {
    /// Group token: so, u, su, sp, spu1, spsp1, g2, spin7, spin9.
    #[arg(long)]
    group: String,
    /// Parameter of the classical families.
    #[arg(long)]
    n: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Test hook: flip one sign of the 3-form coefficient table.
    #[arg(long, hide = true)]
    corrupt_phi: bool,
}

#[derive(Args)]
struct SpecialArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    n: Option<usize>,
    /// Special-subspace definition, 1 or 2.
    #[arg(long)]
    definition: u8,
    /// Random generator frames per generator dimension.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 7043)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the relative singular-value cutoff.
    #[arg(long)]
    tol_rank: Option<f64>,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Which sphere counterexample: 1 (S^6) or 2 (S^7).
    #[arg(long)]
    example: u8,
    /// Radius grid; defaults to 0.2..0.9 in steps of 0.1.
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    #[arg(long, default_value_t = crate::transport::DEFAULT_STEPS)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the transport comparison tolerance.
    #[arg(long)]
    tol_ode: Option<f64>,
}

#[derive(Args)]
struct FullReportArgs {
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 7043)]
    seed: u64,
    #[arg(long, default_value_t = crate::transport::DEFAULT_STEPS)]
    steps: usize,
    /// Radius grid; defaults to 0.2..0.9 in steps of 0.1.
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    tol_ode: Option<f64>,
    /// Test hook: flip one sign of the 3-form coefficient table.
    #[arg(long, hide = true)]
    corrupt_phi: bool,
}

/// Parses the process arguments and runs the selected command, returning the
/// process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let benign = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if benign { EXIT_PASS } else { EXIT_USAGE };
        }
    };
    let outcome = match cli.command {
        Command::Structures(args) => cmd_structures(&args),
        Command::Special(args) => cmd_special(&args),
        Command::Counterexample(args) => cmd_counterexample(&args),
        Command::FullReport(args) => cmd_full_report(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

fn parse_spec(group: &str, n: Option<usize>) -> Result<GroupSpec> {
    let family = GroupFamily::parse(group)?;
    if family.is_exceptional() {
        return GroupSpec::new(family, 0);
    }
    let n = n.ok_or_else(|| {
        HoloError::InvalidGroup(format!("--n is required for the {family} family"))
    })?;
    GroupSpec::new(family, n)
}

fn tolerances(rank: Option<f64>, ode: Option<f64>) -> Result<Tolerances> {
    let mut tols = Tolerances::default();
    if let Some(r) = rank {
        tols.rank_tol = r;
    }
    if let Some(o) = ode {
        tols.ode_tol = o;
    }
    tols.validate()?;
    Ok(tols)
}

fn write_out(path: &Option<PathBuf>, json: &str) -> Result<()> {
    if let Some(path) = path {
        std::fs::write(path, json).map_err(|e| {
            HoloError::ConstructionFailure(format!("cannot write {}: {e}", path.display()))
        })?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// structures
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct StructuresDoc {
    schema: &'static str,
    command: &'static str,
    group: String,
    corrupt_phi: bool,
    checks: Vec<CheckJson>,
    algebra_dim_expected: usize,
    algebra_dim_computed: usize,
    pass: bool,
    table: StructureTable,
}

#[derive(Serialize)]
struct CheckJson {
    name: String,
    kind: crate::structures::RelationKind,
    residual: f64,
    pass: bool,
}

fn check_json(checks: Vec<RelationCheck>) -> (Vec<CheckJson>, bool) {
    let mut all_pass = true;
    let json = checks
        .into_iter()
        .map(|c| {
            let pass = c.residual < RESIDUAL_PASS;
            all_pass &= pass;
            CheckJson {
                name: c.name,
                kind: c.kind,
                residual: c.residual,
                pass,
            }
        })
        .collect();
    (json, all_pass)
}

fn corrupted_phi(form: &AlternatingForm) -> AlternatingForm {
    let mut terms: Vec<(Vec<usize>, f64)> = form
        .terms()
        .iter()
        .map(|(idx, c)| (idx.clone(), *c))
        .collect();
    terms[0].1 = -terms[0].1;
    AlternatingForm::new(form.ambient_dim, form.degree, terms)
}

/// Kernel dimension of the derivation action of `so(n)` on a form: the
/// stabilizer algebra dimension of the form itself.
fn form_stabilizer_dim(form: &AlternatingForm, tols: &Tolerances) -> Result<usize> {
    let d = form.ambient_dim;
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
        .collect();
    let tuples = crate::structures::increasing_tuples(form.degree, d);
    let columns: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| {
            let mut a = nalgebra::DMatrix::zeros(d, d);
            a[(j, i)] = 1.0;
            a[(i, j)] = -1.0;
            let action = form.derivation(&a);
            tuples.iter().map(|t| action.coefficient(t)).collect()
        })
        .collect();
    let rows: Vec<DVector<f64>> = (0..tuples.len())
        .map(|r| DVector::from_fn(pairs.len(), |k, _| columns[k][r]))
        .collect();
    Ok(nullspace(&rows, pairs.len(), tols)?.dim())
}

fn structures_report(spec: &GroupSpec, corrupt_phi: bool, tols: &Tolerances) -> Result<StructuresDoc> {
    let mut pack = build_structures(spec);
    if corrupt_phi && spec.family == GroupFamily::G2 {
        let phi = pack.form("phi").unwrap().clone();
        pack.forms = vec![("phi".to_string(), corrupted_phi(&phi))];
    }
    let (mut checks, mut all_pass) = check_json(pack.relation_checks());

    // Dimension of the algebra determined by the structure data. For the
    // form-defined groups this is computed from the (possibly corrupted)
    // form, so it is sensitive to the test hook.
    let computed = match spec.family {
        GroupFamily::G2 => form_stabilizer_dim(pack.form("phi").unwrap(), tols)?,
        GroupFamily::Spin7 => form_stabilizer_dim(pack.form("theta").unwrap(), tols)?,
        _ => algebra_basis(spec, tols)?.dim(),
    };
    let expected = spec.algebra_dim();
    let dim_pass = computed == expected;
    all_pass &= dim_pass;
    checks.push(CheckJson {
        name: "stabilizer algebra dimension".to_string(),
        kind: crate::structures::RelationKind::SpanRank,
        residual: (computed as f64 - expected as f64).abs(),
        pass: dim_pass,
    });

    Ok(StructuresDoc {
        schema: SCHEMA,
        command: "structures",
        group: spec.to_string(),
        corrupt_phi,
        checks,
        algebra_dim_expected: expected,
        algebra_dim_computed: computed,
        pass: all_pass,
    table: pack.table(),
    })
}

fn cmd_structures(args: &StructuresArgs) -> Result<i32> {
    let spec = parse_spec(&args.group, args.n)?;
    let tols = Tolerances::default();
    let doc = structures_report(&spec, args.corrupt_phi, &tols)?;
    println!(
        "structures {} : {} ({} checks)",
        doc.group,
        if doc.pass { "pass" } else { "FAIL" },
        doc.checks.len()
    );
    write_out(&args.out, &to_json_string(&doc))?;
    Ok(if doc.pass { EXIT_PASS } else { EXIT_STRUCTURE })
}

// ---------------------------------------------------------------------------
// special
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SpecialDoc {
    schema: &'static str,
    command: &'static str,
    group: String,
    definition: u8,
    trials: usize,
    seed: u64,
    expected_dim: usize,
    found_dim: usize,
    pass: bool,
    /// A found dimension strictly below the table would falsify the table.
    critical_below_table: bool,
    generators_tried: usize,
    witnesses: Vec<SpecialReportJson>,
}

fn special_report(
    spec: &GroupSpec,
    definition: Definition,
    trials: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<SpecialDoc> {
    let search = minimal_special_dimension(spec, definition, trials, seed, tols)?;
    let expected = expected_minimal_dimension(spec, definition);
    Ok(SpecialDoc {
        schema: SCHEMA,
        command: "special",
        group: spec.to_string(),
        definition: definition.as_u8(),
        trials,
        seed,
        expected_dim: expected,
        found_dim: search.dim,
        pass: search.dim == expected,
        critical_below_table: search.dim < expected,
        generators_tried: search.generators_tried,
        witnesses: search.witnesses.iter().map(SpecialReportJson::from).collect(),
    })
}

fn cmd_special(args: &SpecialArgs) -> Result<i32> {
    let spec = parse_spec(&args.group, args.n)?;
    let definition = Definition::from_u8(args.definition)?;
    if args.trials == 0 {
        return Err(HoloError::OutOfRange("--trials must be at least 1".into()));
    }
    let tols = tolerances(args.tol_rank, None)?;
    let doc = special_report(&spec, definition, args.trials, args.seed, &tols)?;
    println!(
        "special {} definition {} : found {} expected {} : {}{}",
        doc.group,
        doc.definition,
        doc.found_dim,
        doc.expected_dim,
        if doc.pass { "pass" } else { "FAIL" },
        if doc.critical_below_table {
            " (CRITICAL: below table)"
        } else {
            ""
        }
    );
    write_out(&args.out, &to_json_string(&doc))?;
    Ok(if doc.pass { EXIT_PASS } else { EXIT_SPECIAL })
}

// ---------------------------------------------------------------------------
// counterexample
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CounterexampleDoc {
    schema: &'static str,
    command: &'static str,
    example: u8,
    steps: usize,
    tolerance: f64,
    entries: Vec<CounterexampleEntry>,
    pass: bool,
}

#[derive(Serialize)]
struct CounterexampleEntry {
    #[serde(flatten)]
    report: CounterexampleReport,
    closed_form_agreement: f64,
    agrees: bool,
    /// Whether the verdict matches the closed-form prediction: violated
    /// exactly when the analytic gap exceeds the violation threshold. (The
    /// S^7 gap `r^3 sqrt(1-r^2) (1 - cos(2 pi sqrt(1-r^2)))` drops below the
    /// threshold near the ends of the radius range.)
    verdict_consistent: bool,
}

fn r_grid(values: &[f64]) -> Result<Vec<f64>> {
    let grid: Vec<f64> = if values.is_empty() {
        DEFAULT_R_GRID.to_vec()
    } else {
        values.to_vec()
    };
    for &r in &grid {
        if !(r > 0.0 && r < 1.0) {
            return Err(HoloError::OutOfRange(format!(
                "--r values must lie in (0, 1), got {r}"
            )));
        }
    }
    Ok(grid)
}

fn counterexample_report(
    example: u8,
    grid: &[f64],
    steps: usize,
    tolerance: f64,
) -> Result<CounterexampleDoc> {
    let mut entries = Vec::new();
    let mut pass = true;
    for &r in grid {
        let report = match example {
            1 => example1_check(r, steps)?,
            2 => example2_check(r, steps)?,
            other => {
                return Err(HoloError::OutOfRange(format!(
                    "--example must be 1 or 2, got {other}"
                )))
            }
        };
        let agreement = (report.gap_numeric - report.gap_closed_form).abs();
        let agrees = agreement < tolerance;
        let expect_violation =
            report.gap_closed_form > crate::weakcheck::VIOLATION_THRESHOLD;
        let verdict_consistent = (report.verdict == Verdict::Violated) == expect_violation;
        pass &= agrees && verdict_consistent;
        entries.push(CounterexampleEntry {
            report,
            closed_form_agreement: agreement,
            agrees,
            verdict_consistent,
        });
    }
    Ok(CounterexampleDoc {
        schema: SCHEMA,
        command: "counterexample",
        example,
        steps,
        tolerance,
        entries,
        pass,
    })
}

fn cmd_counterexample(args: &CounterexampleArgs) -> Result<i32> {
    let grid = r_grid(&args.r)?;
    let tols = tolerances(None, args.tol_ode)?;
    let doc = counterexample_report(args.example, &grid, args.steps, tols.ode_tol)?;
    for entry in &doc.entries {
        println!(
            "example {} r = {:.3} : gap {:.7} (closed form {:.7}) : {:?}",
            doc.example,
            entry.report.r,
            entry.report.gap_numeric,
            entry.report.gap_closed_form,
            entry.report.verdict
        );
    }
    println!(
        "counterexample {} : {}",
        doc.example,
        if doc.pass { "pass" } else { "FAIL" }
    );
    write_out(&args.out, &to_json_string(&doc))?;
    Ok(if doc.pass { EXIT_PASS } else { EXIT_COUNTEREXAMPLE })
}

// ---------------------------------------------------------------------------
// full report
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FullReportDoc {
    schema: &'static str,
    command: &'static str,
    seed: u64,
    trials: usize,
    steps: usize,
    sections: Sections,
    pass: bool,
}

#[derive(Serialize)]
struct Sections {
    structures: SectionStructures,
    algebras: SectionAlgebras,
    special_def1: SectionSpecial,
    special_def2: SectionSpecial,
    examples: SectionExamples,
    covering: SectionCovering,
    theorem1_table: SectionTheorem1,
}

#[derive(Serialize)]
struct SectionStructures {
    entries: Vec<StructuresDoc>,
    pass: bool,
}

#[derive(Serialize)]
struct SectionAlgebras {
    entries: Vec<AlgebraEntry>,
    pass: bool,
}

#[derive(Serialize)]
struct AlgebraEntry {
    group: String,
    expected_dim: usize,
    computed_dim: usize,
    bracket_closure_residual: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SectionSpecial {
    entries: Vec<SpecialDoc>,
    pass: bool,
}

#[derive(Serialize)]
struct SectionExamples {
    example1: CounterexampleDoc,
    example2: CounterexampleDoc,
    pass: bool,
}

#[derive(Serialize)]
struct SectionCovering {
    entries: Vec<CoveringEntry>,
    pass: bool,
}

#[derive(Serialize)]
struct CoveringEntry {
    subgroup: String,
    ambient: String,
    trials: usize,
    successes: usize,
    max_residual: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SectionTheorem1 {
    entries: Vec<Theorem1Entry>,
    proper_families: Vec<String>,
    pass: bool,
}

#[derive(Serialize)]
struct Theorem1Entry {
    family: String,
    forced_supergroup: String,
    proper: bool,
}

fn covering_section(seed: u64, tols: &Tolerances) -> Result<SectionCovering> {
    let mut entries = Vec::new();
    let mut all = true;
    for (sub, ambient_name) in [
        (GroupSpec::su(3), "U(3)".to_string()),
        (GroupSpec::sp_u1(2), "U(4)".to_string()),
    ] {
        let ambient = ambient_unitary_algebra(&sub, tols)?;
        let structure = match sub.family {
            GroupFamily::SU => complex_structure(sub.n),
            _ => build_structures(&sub).operator("I").unwrap().clone(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FE);
        let trials = 100;
        let mut successes = 0;
        let mut max_residual: f64 = 0.0;
        for _ in 0..trials {
            let a = random_group_element(&ambient, &mut rng);
            let x = random_unit(&mut rng, sub.ambient_dim());
            let p = crate::linalg::orthonormalize(&[x.clone(), &structure * &x], tols)?;
            let res = weak_cover_check(&sub, &a, &p, tols)?;
            if res.found {
                successes += 1;
            }
            max_residual = max_residual.max(res.residual);
        }
        let pass = successes == trials;
        all &= pass;
        entries.push(CoveringEntry {
            subgroup: sub.to_string(),
            ambient: ambient_name,
            trials,
            successes,
            max_residual,
            pass,
        });
    }
    Ok(SectionCovering { entries, pass: all })
}

pub(crate) fn random_group_element(algebra: &AlgebraBasis, rng: &mut ChaCha8Rng) -> crate::linalg::Operator {
    let coeffs: Vec<f64> = (0..algebra.dim())
        .map(|_| rng.random_range(-0.8..0.8))
        .collect();
    exp_element(&algebra.combination(&coeffs), 1.0).expect("algebra elements are antisymmetric")
}

fn cmd_full_report(args: &FullReportArgs) -> Result<i32> {
    let tols = tolerances(args.tol_rank, args.tol_ode)?;
    if args.trials == 0 {
        return Err(HoloError::OutOfRange("--trials must be at least 1".into()));
    }
    let grid = r_grid(&args.r)?;
    let instances = default_instances();

    // Structures over the distinct structure packs of the instance set.
    let mut structure_entries = Vec::new();
    let mut structures_pass = true;
    for spec in &instances {
        let doc = structures_report(spec, args.corrupt_phi, &tols)?;
        structures_pass &= doc.pass;
        structure_entries.push(doc);
    }

    let mut algebra_entries = Vec::new();
    let mut algebras_pass = true;
    for spec in &instances {
        let alg = algebra_basis(spec, &tols)?;
        let bracket = alg.bracket_closure_residual();
        let pass = alg.dim() == spec.algebra_dim() && bracket < RESIDUAL_PASS;
        algebras_pass &= pass;
        algebra_entries.push(AlgebraEntry {
            group: spec.to_string(),
            expected_dim: spec.algebra_dim(),
            computed_dim: alg.dim(),
            bracket_closure_residual: bracket,
            pass,
        });
    }

    let mut special_sections = Vec::new();
    for definition in [Definition::One, Definition::Two] {
        let mut entries = Vec::new();
        let mut pass = true;
        for spec in &instances {
            let doc = special_report(spec, definition, args.trials, args.seed, &tols)?;
            pass &= doc.pass;
            entries.push(doc);
        }
        special_sections.push(SectionSpecial { entries, pass });
    }
    let special_def2 = special_sections.pop().unwrap();
    let special_def1 = special_sections.pop().unwrap();

    let example1 = counterexample_report(1, &grid, args.steps, tols.ode_tol)?;
    let example2 = counterexample_report(2, &grid, args.steps, tols.ode_tol)?;
    let examples_pass = example1.pass && example2.pass;
    let examples = SectionExamples {
        example1,
        example2,
        pass: examples_pass,
    };

    let covering = covering_section(args.seed, &tols)?;

    let mut theorem1_entries = Vec::new();
    let mut proper_families = Vec::new();
    for family in GroupFamily::ALL {
        let spec = canonical_instance(family);
        let forced = forced_supergroup(&spec);
        let proper = forced_supergroup_is_proper(family);
        if proper {
            proper_families.push(family.token().to_string());
        }
        theorem1_entries.push(Theorem1Entry {
            family: family.token().to_string(),
            forced_supergroup: forced.to_string(),
            proper,
        });
    }
    let theorem1_pass = proper_families == ["su", "spu1"];
    let theorem1_table = SectionTheorem1 {
        entries: theorem1_entries,
        proper_families,
        pass: theorem1_pass,
    };

    let sections = Sections {
        structures: SectionStructures {
            entries: structure_entries,
            pass: structures_pass,
        },
        algebras: SectionAlgebras {
            entries: algebra_entries,
            pass: algebras_pass,
        },
        special_def1,
        special_def2,
        examples,
        covering,
        theorem1_table,
    };
    let pass = sections.structures.pass
        && sections.algebras.pass
        && sections.special_def1.pass
        && sections.special_def2.pass
        && sections.examples.pass
        && sections.covering.pass
        && sections.theorem1_table.pass;
    let doc = FullReportDoc {
        schema: SCHEMA,
        command: "full-report",
        seed: args.seed,
        trials: args.trials,
        steps: args.steps,
        sections,
        pass,
    };

    let line = |name: &str, ok: bool| {
        println!("{name:<16} {}", if ok { "pass" } else { "FAIL" });
    };
    line("structures", doc.sections.structures.pass);
    line("algebras", doc.sections.algebras.pass);
    line("special_def1", doc.sections.special_def1.pass);
    line("special_def2", doc.sections.special_def2.pass);
    line("examples", doc.sections.examples.pass);
    line("covering", doc.sections.covering.pass);
    line("theorem1_table", doc.sections.theorem1_table.pass);
    println!("full-report : {}", if doc.pass { "pass" } else { "FAIL" });
    write_out(&args.out, &to_json_string(&doc))?;

    // The exit code mirrors the first failing section in pipeline order.
    let code = if !doc.sections.structures.pass || !doc.sections.algebras.pass {
        EXIT_STRUCTURE
    } else if !doc.sections.special_def1.pass || !doc.sections.special_def2.pass {
        EXIT_SPECIAL
    } else if !doc.sections.examples.pass {
        EXIT_COUNTEREXAMPLE
    } else if !doc.sections.covering.pass || !doc.sections.theorem1_table.pass {
        EXIT_COVERING
    } else {
        EXIT_PASS
    };
    Ok(code)
}

fn canonical_instance(family: GroupFamily) -> GroupSpec {
    match family {
        GroupFamily::SO => GroupSpec::so(7),
        GroupFamily::U => GroupSpec::u(3),
        GroupFamily::SU => GroupSpec::su(3),
        GroupFamily::Sp => GroupSpec::sp(2),
        GroupFamily::SpU1 => GroupSpec::sp_u1(2),
        GroupFamily::SpSp1 => GroupSpec::sp_sp1(2),
        GroupFamily::G2 => GroupSpec::g2(),
        GroupFamily::Spin7 => GroupSpec::spin7(),
        GroupFamily::Spin9 => GroupSpec::spin9(),
    }
}

/// Rigidity check used by the verification suite: unit-norm structure
/// coefficients with probe independence for random group elements.
pub fn rigidity_trials(
    spec: &GroupSpec,
    count: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<(f64, f64)> {
    let alg = algebra_basis(spec, tols)?;
    let pack = build_structures(spec);
    let span: Vec<_> = pack.operators.iter().map(|(_, m)| m.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.ambient_dim();
    let mut worst_norm_defect: f64 = 0.0;
    let mut worst_probe: f64 = 0.0;
    for _ in 0..count {
        let a = random_group_element(&alg, &mut rng);
        debug_assert!(membership_residual(spec, &a)? < 1e-8);
        let l = &span[rng.random_range(0..span.len())];
        let x = random_unit(&mut rng, d);
        let coeffs = structure_coefficients(spec, &a, &x, l)?;
        worst_norm_defect = worst_norm_defect.max((coeffs.norm_squared() - 1.0).abs());
        let probes: Vec<DVector<f64>> = (0..10).map(|_| random_unit(&mut rng, d)).collect();
        let probe = coefficient_probe_residual(spec, &a, l, &coeffs, &probes)?;
        worst_probe = worst_probe.max(probe);
    }
    Ok((worst_norm_defect, worst_probe))
}
