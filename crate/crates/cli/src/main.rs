use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use orthosym::catalog::{family_params, translation_s_range, ReflectionSubtype, FAMILY_NAMES};
use orthosym::chirality::chirality_invariant;
use orthosym::report::{InputEcho, Report, SweepReport, SweepRow};
use orthosym::tolerance::DEFAULT_MAX_ORDER;
use orthosym::verify::{run_all, run_suite, SUITES};
use orthosym::{parse_element, Error, FamilySpec, FiniteGroup};
use rayon::prelude::*;
use serde::Deserialize;

/// Exit codes.
const EXIT_INPUT: u8 = 1;
const EXIT_TRICHOTOMY: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "orthosym", version, about = "Classify finite subgroups of O(4) given by quaternion pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the group generated by the elements in a TOML file.
    Classify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Overrides `max_order` from the file.
        #[arg(long)]
        max_order: Option<usize>,
        /// Include wall-clock timing in JSON output.
        #[arg(long)]
        timing: bool,
    },
    /// Classify every member of a catalog family over parameter ranges.
    Sweep {
        #[arg(long)]
        family: String,
        /// Comma-separated `key=lo..hi` or `key=v` items; omitted keys use defaults.
        #[arg(long, alias = "params", default_value = "")]
        range: String,
        /// Compare each verdict with the catalog's predicted case.
        #[arg(long)]
        expect_paper: bool,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: usize,
    },
    /// Print the chirality invariant of a single element.
    Invariant {
        element: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the verification suites.
    VerifyPaper {
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpecFile {
    name: String,
    generators: Vec<String>,
    max_order: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify {
            file,
            json,
            max_order,
            timing,
        } => classify(&file, json, max_order, timing),
        Command::Sweep {
            family,
            range,
            expect_paper,
            json,
            max_order,
        } => sweep(&family, &range, expect_paper, json, max_order),
        Command::Invariant { element, json } => invariant(&element, json),
        Command::VerifyPaper { only, json } => verify_paper(only.as_deref(), json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::TrichotomyViolation { .. } | Error::ConjugatorNotFound { .. } => EXIT_TRICHOTOMY,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn classify(path: &Path, json: bool, max_order: Option<usize>, timing: bool) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let spec: GroupSpecFile = toml::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    if spec.generators.is_empty() {
        return Err(input_error("generators must be nonempty"));
    }
    let gens = spec
        .generators
        .iter()
        .map(|s| parse_element(s).map_err(|e| input_error(format!("generator `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let max_order = max_order.or(spec.max_order).unwrap_or(DEFAULT_MAX_ORDER);

    let start = Instant::now();
    let group = FiniteGroup::closure(&gens, max_order)?;
    let classification = group.classify()?;
    let elapsed = start.elapsed();

    let input = InputEcho {
        name: spec.name,
        generators: spec.generators,
        max_order,
    };
    let report = Report::new(input, &group, &classification, Some(elapsed));
    if json {
        let report = if timing { report } else { report.canonical() };
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(0)
}

/// Parse `m=1..4,n=2,subtype=p2gg` into inclusive ranges keyed by name.
fn parse_ranges(text: &str) -> Result<BTreeMap<String, (i64, i64)>, Failure> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| input_error(format!("range item `{item}` is not key=value")))?;
        let (key, value) = (key.trim(), value.trim());
        let bound = |s: &str| -> Result<i64, Failure> {
            let s = s.trim();
            if key == "subtype" {
                if let Some(t) = ReflectionSubtype::from_name(s) {
                    return Ok(t.index());
                }
            }
            s.parse().map_err(|_| input_error(format!("bad value `{s}` for `{key}`")))
        };
        let (lo, hi) = match value.split_once("..") {
            Some((lo, hi)) => (bound(lo)?, bound(hi.strip_prefix('=').unwrap_or(hi))?),
            None => {
                let v = bound(value)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(input_error(format!("empty range for `{key}`")));
        }
        if out.insert(key.to_string(), (lo, hi)).is_some() {
            return Err(input_error(format!("`{key}` given twice")));
        }
    }
    Ok(out)
}

/// Default range of a parameter, given the values already fixed.
fn default_range(key: &str, fixed: &BTreeMap<String, i64>) -> (i64, i64) {
    match key {
        "s" => {
            let r = translation_s_range(fixed["m"], fixed["n"]);
            (*r.start(), *r.end())
        }
        "subtype" => (0, 3),
        "element" => (0, 1),
        "a" => (2, 8),
        "b" => (0, fixed["a"]),
        _ => (1, 8),
    }
}

/// Every valid spec in the ranges, in lexicographic parameter order.
fn enumerate_specs(family: &str, ranges: &BTreeMap<String, (i64, i64)>) -> Result<(Vec<FamilySpec>, usize), Failure> {
    let names = family_params(family).map_err(|_| {
        input_error(format!("unknown family `{family}`; expected one of {}", FAMILY_NAMES.join(", ")))
    })?;
    if let Some(key) = ranges.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(input_error(format!("{family} has no parameter `{key}`; parameters: {}", names.join(", "))));
    }
    let mut specs = Vec::new();
    let mut skipped = 0;
    // depth-first over parameters in declaration order; later defaults may depend on earlier values
    let mut stack = vec![BTreeMap::new()];
    let mut partial: Vec<BTreeMap<String, i64>> = Vec::new();
    while let Some(fixed) = stack.pop() {
        let depth = fixed.len();
        if depth == names.len() {
            partial.push(fixed);
            continue;
        }
        let key = names[depth];
        let (lo, hi) = ranges.get(key).copied().unwrap_or_else(|| default_range(key, &fixed));
        for v in (lo..=hi).rev() {
            let mut next = fixed.clone();
            next.insert(key.to_string(), v);
            stack.push(next);
        }
    }
    for values in partial {
        match FamilySpec::from_params(family, &values) {
            Ok(spec) => specs.push(spec),
            Err(Error::InvalidParameters { .. }) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    Ok((specs, skipped))
}

fn sweep(family: &str, range: &str, expect_paper: bool, json: bool, max_order: usize) -> Result<u8, Failure> {
    let ranges = parse_ranges(range)?;
    let (specs, skipped) = enumerate_specs(family, &ranges)?;
    if specs.is_empty() {
        return Err(input_error(format!("no valid {family} parameters in the given ranges")));
    }
    if skipped > 0 {
        eprintln!("skipped {skipped} parameter tuples that violate the family constraints");
    }
    let mut rows: Vec<SweepRow> = specs.par_iter().map(|s| SweepRow::run(s, max_order)).collect();
    if !expect_paper {
        for row in &mut rows {
            row.expected = None;
            row.matches = None;
        }
    }
    let report = SweepReport::new(rows);
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(if report.summary.errors > 0 {
        EXIT_TRICHOTOMY
    } else if expect_paper && report.summary.mismatches > 0 {
        EXIT_MISMATCH
    } else {
        0
    })
}

fn invariant(element: &str, json: bool) -> Result<u8, Failure> {
    let e = parse_element(element).map_err(|err| input_error(format!("`{element}`: {err}")))?;
    let data = chirality_invariant(&e).map_err(|err| input_error(format!("{e}: {err}")))?;
    if json {
        println!("{}", serde_json::to_string_pretty(&data).expect("invariants serialize"));
    } else {
        println!("element: {element}");
        println!("m: {}", data.m);
        println!("a1: {}", data.a1);
        println!("a2: {}", data.a2);
        println!("isoclinic: {}", data.isoclinic);
        println!("lk_sign: {:+}", data.lk_sign);
        println!("lk_class: {}", data.lk_class);
    }
    Ok(0)
}

fn verify_paper(only: Option<&str>, json: bool) -> Result<u8, Failure> {
    let results = match only {
        None => run_all(),
        Some(name) => vec![run_suite(name)
            .ok_or_else(|| input_error(format!("unknown suite `{name}`; expected one of {}", SUITES.join(", "))))?],
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&results).expect("results serialize"));
    } else {
        for r in &results {
            println!("{}", r.line());
            for c in r.checks.iter().filter(|c| !c.passed) {
                println!("    {}: {}", c.claim, c.detail);
            }
        }
        let passed = results.iter().filter(|r| r.passed).count();
        println!("{passed} of {} suites passed", results.len());
    }
    Ok(if results.iter().all(|r| r.passed) { 0 } else { EXIT_INPUT })
}
