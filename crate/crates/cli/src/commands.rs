//! Subcommand implementations. Each writes human output to `out` and returns
//! the process exit code.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use permscreen_core::classifier::audit_regions;
use permscreen_core::classifier::{ClassifyError, Rule};
use permscreen_core::em_model::VisibilityConfig;
use permscreen_core::locus::LossGrid;
use permscreen_core::material_db::{audit_database, DbError};
use permscreen_core::screening::{screen_material, ScreeningConfig};
use permscreen_core::{
    builtin_database, classify_evidence, classify_observation, default_regions, load_database, ComplexPermittivity,
    LocusConfig, LossBand, MaterialDatabase, Observation, ObservationConfig, Outcome, PermittivityEvidence,
    RegionSet, Verdict,
};
use thiserror::Error;

use crate::cli::{BatchArgs, ClassifyArgs, Cli, Command, ListArgs, PlotArgs, ValidateArgs};
use crate::plot::render_svg;
use crate::report::{
    locus_pairs, EvidenceInput, ReportInputs, RegionSetRef, RunReport, SolverEcho, StageTiming, REPORT_SCHEMA,
};

pub const EXIT_SAFE: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_THREAT: i32 = 3;
pub const EXIT_PAT_DOWN: i32 = 4;

pub const BATCH_HEADER: [&str; 7] = [
    "name",
    "eps_real",
    "eps_imag",
    "back_visible",
    "evidence",
    "verdict",
    "error",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Database { path: String, source: DbError },
    #[error("{path}: {detail}")]
    Regions { path: String, detail: String },
    #[error("{path}: {detail}")]
    Input { path: String, detail: String },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output { .. } => EXIT_FAILURE,
            _ => EXIT_USAGE,
        }
    }
}

pub fn outcome_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Safe => EXIT_SAFE,
        Outcome::Threat => EXIT_THREAT,
        Outcome::PatDown => EXIT_PAT_DOWN,
    }
}

/// Runs a parsed command line. Errors are reported on `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::List(a) => list(&a, out),
        Command::Classify(a) => classify(&a, out),
        Command::Plot(a) => plot(&a, out),
        Command::Batch(a) => batch(&a, out),
        Command::Validate(a) => validate(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn stdout_error(e: io::Error) -> CliError {
    CliError::Output {
        path: "<stdout>".into(),
        source: e,
    }
}

pub fn open_database(path: Option<&Path>) -> Result<MaterialDatabase, CliError> {
    match path {
        None => Ok(builtin_database()),
        Some(p) => load_database(p).map_err(|source| CliError::Database {
            path: display(p),
            source,
        }),
    }
}

pub fn open_regions(path: Option<&Path>) -> Result<RegionSet, CliError> {
    let Some(p) = path else {
        return Ok(default_regions());
    };
    let text = fs::read_to_string(p).map_err(|e| CliError::Regions {
        path: display(p),
        detail: e.to_string(),
    })?;
    RegionSet::from_toml_str(&text).map_err(|e| CliError::Regions {
        path: display(p),
        detail: e.to_string(),
    })
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |source: io::Error| CliError::Output {
        path: display(path),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.flush().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn list(args: &ListArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let db = open_database(args.db.db.as_deref())?;
    let records: Vec<_> = match &args.category {
        Some(c) => db.in_category(c).cloned().collect(),
        None => db.records().to_vec(),
    };
    let width = records.iter().map(|r| r.name.chars().count()).max().unwrap_or(4).max(4);
    let mut text = String::new();
    text.push_str(&format!(
        "{:<width$}  {:>9}  {:>9}  {:>9}  {:<12}  source\n",
        "name", "eps_real", "eps_imag", "tan_delta", "category"
    ));
    for r in &records {
        let p = r.permittivity;
        text.push_str(&format!(
            "{:<width$}  {:>9}  {:>9}  {:>9.4}  {:<12}  {}\n",
            r.name,
            p.real(),
            p.loss(),
            p.loss_tangent(),
            r.category.as_deref().unwrap_or("-"),
            r.source
        ));
    }
    out.write_all(text.as_bytes()).map_err(stdout_error)?;

    if let Some(path) = &args.csv {
        let subset = MaterialDatabase::new(records).map_err(|source| CliError::Database {
            path: display(path),
            source,
        });
        let mut buf = Vec::new();
        match subset {
            Ok(db) => db.write_csv(&mut buf).map_err(|source| CliError::Database {
                path: display(path),
                source,
            })?,
            // an empty selection still produces a header-only file
            Err(_) => {
                buf.extend_from_slice(permscreen_core::material_db::CSV_HEADER.join(",").as_bytes());
                buf.push(b'\n');
            }
        }
        write_atomic(path, &buf)?;
    }
    Ok(EXIT_SAFE)
}

fn format_verdict(v: &Verdict) -> String {
    let regions = if v.touched_regions.is_empty() {
        "-".to_string()
    } else {
        v.touched_regions.join(", ")
    };
    let tags = if v.rationale.tags.is_empty() {
        "-".to_string()
    } else {
        v.rationale.tags.join(", ")
    };
    let rule = match v.rationale.rule {
        Rule::HazardContact => "evidence touches a hazard region",
        Rule::InsideSafe => "evidence lies inside the safe region",
        Rule::Inconclusive => "evidence is not fully inside a safe region",
        Rule::UnresolvableReflectivity => "reflectivity ratio has no permittivity solution",
    };
    let evidence = v.rationale.evidence.map(|e| e.as_str()).unwrap_or("none");
    format!(
        "verdict:  {}\nrule:     {rule}\nevidence: {evidence}\nregions:  {regions}\ntags:     {tags}\n",
        v.outcome.as_str()
    )
}

fn classify(args: &ClassifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut timings = Vec::new();
    let start = Instant::now();
    let regions = open_regions(args.regions.regions.as_deref())?;
    timings.push(StageTiming {
        stage: "load".into(),
        seconds: start.elapsed().as_secs_f64(),
    });

    let band = match args.band {
        Some((min, max)) => LossBand::new(min, max).map_err(|e| CliError::Usage(e.to_string()))?,
        None => LossBand::default(),
    };
    let reference = match args.reference {
        Some((re, im)) => {
            ComplexPermittivity::new(re, im).map_err(|e| CliError::Usage(format!("--reference: {e}")))?
        }
        None => ComplexPermittivity::DRY_SKIN,
    };
    let grid = LossGrid::log_spaced(1e-4, 100.0, args.grid_intervals)
        .map_err(|e| CliError::Usage(format!("--grid-intervals: {e}")))?;
    let config = ObservationConfig {
        locus: LocusConfig {
            loss_grid: grid,
            reference,
        },
        band,
    };

    let start = Instant::now();
    let (input, verdict, locus) = if let Some((re, im)) = args.point {
        let p = ComplexPermittivity::new(re, im).map_err(|e| CliError::Usage(format!("--point: {e}")))?;
        let v = classify_evidence(&PermittivityEvidence::Point { permittivity: p }, &regions)?;
        (EvidenceInput::Point { eps_real: re, eps_imag: im }, v, None)
    } else if let Some(re) = args.real {
        let obs = Observation {
            back_surface_visible: true,
            predicted_real: Some(re),
            skin_relative_ratio: None,
        };
        let o = classify_observation(&obs, &regions, &config)?;
        (EvidenceInput::Real { eps_real: re }, o.verdict, None)
    } else if let Some(r) = args.ratio {
        if !r.is_finite() || r < 0.0 {
            return Err(CliError::Usage(format!("--ratio must be finite and >= 0, got {r}")));
        }
        let ratio = if args.amplitude { r * r } else { r };
        let obs = Observation {
            back_surface_visible: false,
            predicted_real: None,
            skin_relative_ratio: Some(ratio),
        };
        let o = classify_observation(&obs, &regions, &config)?;
        let locus = match &o.evidence {
            Some(PermittivityEvidence::Locus { curve }) => Some(locus_pairs(curve)),
            _ => None,
        };
        (
            EvidenceInput::Ratio {
                ratio,
                amplitude_input: args.amplitude,
            },
            o.verdict,
            locus,
        )
    } else {
        return Err(CliError::Usage("one of --point, --real or --ratio is required".into()));
    };
    timings.push(StageTiming {
        stage: "classify".into(),
        seconds: start.elapsed().as_secs_f64(),
    });

    out.write_all(format_verdict(&verdict).as_bytes()).map_err(stdout_error)?;

    if let Some(path) = &args.out {
        let grid = config.locus.loss_grid.values();
        let report = RunReport {
            schema: REPORT_SCHEMA.into(),
            inputs: ReportInputs {
                evidence: input,
                region_set: RegionSetRef {
                    id: regions.id().to_string(),
                    path: args.regions.regions.as_deref().map(display),
                },
                solver: SolverEcho {
                    reference,
                    loss_grid_min: grid[0],
                    loss_grid_max: grid[grid.len() - 1],
                    loss_grid_len: grid.len(),
                    lossless_band: band,
                },
            },
            verdict: verdict.clone(),
            locus,
            artifacts: vec![display(path)],
            timings: args.timings.then_some(timings),
        };
        write_atomic(path, report.to_json().as_bytes())?;
    }
    Ok(outcome_code(verdict.outcome))
}

fn plot(args: &PlotArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let db = open_database(args.db.db.as_deref())?;
    let regions = open_regions(args.regions.regions.as_deref())?;
    let locus = match &args.locus {
        None => None,
        Some(p) => {
            let input = |detail: String| CliError::Input {
                path: display(p),
                detail,
            };
            let text = fs::read_to_string(p).map_err(|e| input(e.to_string()))?;
            let report = RunReport::from_json(&text).map_err(|e| input(e.to_string()))?;
            Some(report.locus.ok_or_else(|| input("report has no locus".into()))?)
        }
    };
    let svg = render_svg(&db, &regions, locus.as_deref());
    write_atomic(&args.out, svg.as_bytes())?;
    writeln!(
        out,
        "wrote {} ({} materials, {} regions)",
        display(&args.out),
        db.len(),
        regions.regions().len()
    )
    .map_err(stdout_error)?;
    Ok(EXIT_SAFE)
}

fn batch(args: &BatchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !args.thickness.is_finite() || args.thickness <= 0.0 {
        return Err(CliError::Usage(format!(
            "--thickness must be a positive number of millimeters, got {}",
            args.thickness
        )));
    }
    if !args.visibility_db.is_finite() {
        return Err(CliError::Usage("--visibility-db must be finite".into()));
    }
    let db = open_database(args.db.db.as_deref())?;
    let regions = open_regions(args.regions.regions.as_deref())?;
    let config = ScreeningConfig {
        visibility: VisibilityConfig {
            threshold_db: args.visibility_db,
        },
        ..ScreeningConfig::default()
    };

    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Output {
        path: display(&args.out),
        source: e.into(),
    };
    writer.write_record(BATCH_HEADER).map_err(csv_err)?;
    let (mut threat, mut safe, mut pat_down, mut errors) = (0usize, 0usize, 0usize, 0usize);
    for record in db.iter() {
        let p = record.permittivity;
        let (re, im) = (p.real().to_string(), p.loss().to_string());
        let row = match screen_material(record, args.thickness, &regions, &config) {
            Ok(s) => {
                match s.outcome.verdict.outcome {
                    Outcome::Threat => threat += 1,
                    Outcome::Safe => safe += 1,
                    Outcome::PatDown => pat_down += 1,
                }
                let evidence = s.outcome.evidence.as_ref().map(|e| e.kind().as_str()).unwrap_or("none");
                [
                    record.name.clone(),
                    re,
                    im,
                    s.echo.back_surface_visible.to_string(),
                    evidence.to_string(),
                    s.outcome.verdict.outcome.as_str().to_string(),
                    String::new(),
                ]
            }
            Err(e) => {
                errors += 1;
                [
                    record.name.clone(),
                    re,
                    im,
                    String::new(),
                    String::new(),
                    String::new(),
                    e.to_string(),
                ]
            }
        };
        writer.write_record(&row).map_err(csv_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Output {
        path: display(&args.out),
        source: e.into_error(),
    })?;
    write_atomic(&args.out, &bytes)?;
    writeln!(
        out,
        "{} materials: {threat} threat, {safe} safe, {pat_down} pat_down, {errors} errors",
        db.len()
    )
    .map_err(stdout_error)?;
    Ok(EXIT_SAFE)
}

fn validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut problems: Vec<String> = Vec::new();

    if let Some(p) = &args.db.db {
        match fs::File::open(p) {
            Ok(f) => {
                for e in audit_database(f) {
                    problems.push(format!("{}: {e}", display(p)));
                }
            }
            Err(e) => problems.push(format!("{}: {e}", display(p))),
        }
    }
    if let Some(p) = &args.regions.regions {
        match fs::read_to_string(p) {
            Ok(text) => {
                for e in audit_regions(&text) {
                    problems.push(format!("{}: {e}", display(p)));
                }
            }
            Err(e) => problems.push(format!("{}: {e}", display(p))),
        }
    }

    let mut text = String::new();
    for p in &problems {
        text.push_str(p);
        text.push('\n');
    }
    if problems.is_empty() {
        text.push_str("ok\n");
    } else {
        text.push_str(&format!("{} problem(s) found\n", problems.len()));
    }
    out.write_all(text.as_bytes()).map_err(stdout_error)?;
    Ok(if problems.is_empty() { EXIT_SAFE } else { EXIT_FAILURE })
}
