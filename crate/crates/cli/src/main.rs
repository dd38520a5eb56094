//! Command-line front-end: loads JSON fixtures, evaluates forcing values,
//! forms quotients, and runs the verification suites with machine-readable
//! reports. Exit status: 0 all checks pass, 1 semantic failures found,
//! 2 input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use heyting::frame::filters;
use heyting::hmodel::{forcing_value, EvalPath, HStructure};
use heyting::json;
use heyting::logic::{parse_formula_with_params, Context};
use heyting::los;
use heyting::scan::ScanParams;
use heyting::sheaf::SheafStructure;

#[derive(Parser)]
#[command(name = "heyting", version, about = "Exact Heyting-valued model theory on finite frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Formula depth bound for the scan commands
    #[arg(long, global = true, default_value_t = 3)]
    depth: usize,
    /// Maximum number of distinct parameters in scanned formulas
    #[arg(long, global = true, default_value_t = 2)]
    params: usize,
    /// Seed echoed into reports (scans are exhaustive and deterministic)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enable the expensive universal-property checks during validation
    #[arg(long, global = true, default_value_t = false)]
    verify: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a fixture file (frame, model, family, or sheaf document)
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate the forcing value of a closed formula in a model
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Formula text; carrier element names act as constants
        #[arg(long)]
        formula: String,
        /// Evaluation path
        #[arg(long, value_enum, default_value_t = PathChoice::Both)]
        path: PathChoice,
    },
    /// Form the filter quotient and print its global-section structure
    Quotient {
        #[arg(long)]
        model: PathBuf,
        /// `up:<element>` or a comma list of member elements
        #[arg(long)]
        filter: String,
    },
    /// Check bounded genericity of a filter
    CheckGeneric {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        filter: String,
    },
    /// Run the transfer comparison for every bounded formula
    CheckLos {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        filter: String,
        /// Also emit passing rows (the default streams failures only)
        #[arg(long, default_value_t = false)]
        emit_passing: bool,
    },
    /// Verify the maximal-filter characterization conditions
    CheckChar {
        #[arg(long)]
        model: PathBuf,
    },
    /// Build a classical ultraproduct of a finite family and compare
    Ultraproduct {
        #[arg(long)]
        family: PathBuf,
        /// Index name of the principal ultrafilter point
        #[arg(long)]
        at: String,
    },
    /// List all filters of a frame with their classification
    ListFilters {
        #[arg(long)]
        frame: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathChoice {
    Recursion,
    Categorical,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(failures) => {
            if failures == 0 {
                ExitCode::from(0)
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Resolves frame references relative to the referencing file.
fn resolver_for(base: &Path) -> impl Fn(&str) -> Result<serde_json::Value, String> {
    let dir = base.parent().map(Path::to_path_buf).unwrap_or_default();
    move |reference: &str| read_json(&dir.join(reference))
}

fn load_model(path: &Path) -> Result<(HStructure, Option<SheafStructure>), String> {
    let value = read_json(path)?;
    let resolver = resolver_for(path);
    json::parse_model(&value, &resolver).map_err(|e| format!("{}: {e}", path.display()))
}

fn scan_params(common: &Common) -> ScanParams {
    ScanParams { depth: common.depth, max_params: common.params, term_depth: 2 }
}

fn run(cli: &Cli) -> Result<usize, String> {
    let common = &cli.common;
    match &cli.command {
        Command::Validate { input } => validate(input, common),
        Command::Eval { model, formula, path } => eval(model, formula, *path, common),
        Command::Quotient { model, filter } => quotient(model, filter, common),
        Command::CheckGeneric { model, filter } => check_generic(model, filter, common),
        Command::CheckLos { model, filter, emit_passing } => {
            check_los(model, filter, *emit_passing, common)
        }
        Command::CheckChar { model } => check_char(model, common),
        Command::Ultraproduct { family, at } => ultraproduct(family, at, common),
        Command::ListFilters { frame } => list_filters(frame, common),
    }
}

fn validate(input: &Path, common: &Common) -> Result<usize, String> {
    let value = read_json(input)?;
    let obj = value.as_object().ok_or("input must be a JSON object")?;
    if obj.contains_key("sections") && !obj.contains_key("language") {
        // a bare presheaf: functoriality was checked on parse; report the
        // separatedness and gluing scan
        let resolver = resolver_for(input);
        let presheaf =
            json::parse_presheaf(&value, &resolver).map_err(|e| e.to_string())?;
        let sheaf_report = presheaf.sheaf_report();
        let report = serde_json::json!({
            "kind": "presheaf",
            "functorial": true,
            "separated": sheaf_report.separated(),
            "sheaf": sheaf_report.is_sheaf(),
            "valid": true,
        });
        emit(common, &report, &format!("ok: {}", summary_line(&report)));
        return Ok(0);
    }
    if obj.contains_key("sections") || obj.contains_key("delta") {
        let (model, sheaf) = load_model(input)?;
        let carrier = model.carrier();
        let completeness = carrier.completeness();
        let mut report = serde_json::json!({
            "kind": if sheaf.is_some() { "sheaf-structure" } else { "hstructure" },
            "carrier": carrier.len(),
            "separated": completeness.separated,
            "complete": completeness.complete(),
            "valid": true,
        });
        if let Some(s) = &sheaf {
            report["sheaf"] = serde_json::json!(s.presheaf().sheaf_report().is_sheaf());
        }
        if common.verify {
            let guard = heyting::hset::SizeGuard::default();
            let cls = heyting::hset::classifier(model.frame());
            for sigma in heyting::hset::StrictRelation::all(carrier, &guard)
                .map_err(|e| e.to_string())?
            {
                let chi = heyting::hset::characteristic(&cls, &sigma);
                if heyting::hset::sub_from_characteristic(&chi) != sigma {
                    return Err("classifier round trip failed during verification".into());
                }
            }
            report["verified"] = serde_json::json!(true);
        }
        emit(common, &report, &format!("ok: {}", summary_line(&report)));
        Ok(0)
    } else if obj.contains_key("elements") || obj.contains_key("points") {
        let frame = json::parse_frame(&value).map_err(|e| e.to_string())?;
        let report = serde_json::json!({
            "kind": "frame",
            "elements": frame.len(),
            "boolean": frame.is_boolean(),
            "valid": true,
        });
        emit(common, &report, &format!("ok: {}", summary_line(&report)));
        Ok(0)
    } else if obj.contains_key("index") {
        let (index, factors) = json::parse_family(&value).map_err(|e| e.to_string())?;
        let report = serde_json::json!({
            "kind": "family",
            "index": index,
            "sizes": factors.iter().map(|f| f.size()).collect::<Vec<_>>(),
            "valid": true,
        });
        emit(common, &report, &format!("ok: {}", summary_line(&report)));
        Ok(0)
    } else {
        Err("unrecognized fixture kind".into())
    }
}

fn summary_line(report: &serde_json::Value) -> String {
    serde_json::to_string(report).expect("report serializes")
}

fn eval(
    model_path: &Path,
    formula_text: &str,
    path: PathChoice,
    common: &Common,
) -> Result<usize, String> {
    let (model, _) = load_model(model_path)?;
    let formula =
        parse_formula_with_params(formula_text, model.language(), model.carrier().names())
            .map_err(|e| e.to_string())?;
    let ctx = Context::empty();
    let rec = forcing_value(&model, &formula, &ctx, &[], EvalPath::Recursion)
        .map_err(|e| e.to_string())?;
    let mut mismatch = false;
    let value_name = match path {
        PathChoice::Recursion => rec.value_name.clone(),
        PathChoice::Categorical => {
            forcing_value(&model, &formula, &ctx, &[], EvalPath::Categorical)
                .map_err(|e| e.to_string())?
                .value_name
        }
        PathChoice::Both => {
            let cat = forcing_value(&model, &formula, &ctx, &[], EvalPath::Categorical)
                .map_err(|e| e.to_string())?;
            mismatch = cat.value != rec.value;
            rec.value_name.clone()
        }
    };
    let report = serde_json::json!({
        "formula": rec.formula,
        "value": value_name,
        "paths_agree": !mismatch,
        "trace": rec.trace.iter().map(|(f, v)| {
            serde_json::json!({"subformula": f, "value": model.frame().name(*v)})
        }).collect::<Vec<_>>(),
    });
    match common.format {
        Format::Json => println!("{}", serde_json::to_string(&report).unwrap()),
        Format::Text => println!("{value_name}"),
    }
    Ok(usize::from(mismatch))
}

fn quotient(model_path: &Path, filter_text: &str, common: &Common) -> Result<usize, String> {
    let (model, _) = load_model(model_path)?;
    let filter = json::parse_filter(model.frame(), filter_text).map_err(|e| e.to_string())?;
    let q = los::filter_quotient(&model, &filter).map_err(|e| e.to_string())?;
    let frame = model.frame();
    let report = serde_json::json!({
        "filter": format!("up:{}", frame.name(filter.generator())),
        "classes": q.reps.len(),
        "quotient_frame_size": q.quotient_frame.quotient().len(),
        "global_classes": q.gamma.universe(),
        "relations": model.language().relations().map(|(name, arity)| {
            let rows: Vec<Vec<String>> = heyting::util::tuples(q.gamma.size(), arity)
                .into_iter()
                .filter(|t| q.gamma.holds(name, t))
                .map(|t| t.iter().map(|&i| q.gamma.universe()[i].clone()).collect())
                .collect();
            serde_json::json!({"symbol": name, "holds": rows})
        }).collect::<Vec<_>>(),
    });
    emit(common, &report, &format!("quotient: {}", summary_line(&report)));
    Ok(0)
}

fn check_generic(model_path: &Path, filter_text: &str, common: &Common) -> Result<usize, String> {
    let (model, _) = load_model(model_path)?;
    let filter = json::parse_filter(model.frame(), filter_text).map_err(|e| e.to_string())?;
    let report =
        los::is_generic(&model, &filter, scan_params(common)).map_err(|e| e.to_string())?;
    let json_report = serde_json::json!({
        "seed": common.seed,
        "depth": report.depth,
        "generic": report.generic,
        "checked": report.checked,
        "dichotomy_failure": report.dichotomy_failure,
        "atomic_failure": report.atomic_failure,
        "witness_failure": report.witness_failure,
    });
    emit(
        common,
        &json_report,
        &if report.generic {
            format!("generic up to depth {} ({} instances checked)", report.depth, report.checked)
        } else {
            format!("not generic: {}", summary_line(&json_report))
        },
    );
    Ok(usize::from(!report.generic))
}

fn check_los(
    model_path: &Path,
    filter_text: &str,
    emit_passing: bool,
    common: &Common,
) -> Result<usize, String> {
    let (model, _) = load_model(model_path)?;
    let filter = json::parse_filter(model.frame(), filter_text).map_err(|e| e.to_string())?;
    let format = common.format;
    let summary = los::los_check(&model, &filter, scan_params(common), emit_passing, |row| {
        match format {
            Format::Json => println!("{}", serde_json::to_string(row).unwrap()),
            Format::Text => {
                let status =
                    if row.pass && row.corollary_pass != Some(false) { "pass" } else { "FAIL" };
                println!(
                    "{status}: {} [{}] gamma={} value={} in_filter={}",
                    row.formula,
                    row.params.join(","),
                    row.gamma_sat,
                    row.forcing_value,
                    row.in_filter
                );
            }
        }
    })
    .map_err(|e| e.to_string())?;
    let json_summary = serde_json::json!({
        "seed": common.seed,
        "depth": summary.depth,
        "checked": summary.checked,
        "failed": summary.failed,
        "corollary_checked": summary.corollary_checked,
        "corollary_failed": summary.corollary_failed,
        "pass": summary.pass(),
    });
    emit(common, &json_summary, &format!("summary: {}", summary_line(&json_summary)));
    Ok(summary.failed + summary.corollary_failed)
}

fn check_char(model_path: &Path, common: &Common) -> Result<usize, String> {
    let (model, _) = load_model(model_path)?;
    let report =
        los::characterization_check(&model, scan_params(common)).map_err(|e| e.to_string())?;
    let json_report = serde_json::json!({
        "seed": common.seed,
        "variant_max_principle": report.variant.holds(),
        "variant_checked": report.variant.checked,
        "generic_maximal": report.generic_per_maximal.iter().map(|(f, g)| {
            serde_json::json!({"filter": f, "generic": g.generic, "checked": g.checked})
        }).collect::<Vec<_>>(),
        "los_maximal": report.los_per_maximal.iter().map(|(f, s)| {
            serde_json::json!({"filter": f, "pass": s.pass(), "checked": s.checked})
        }).collect::<Vec<_>>(),
        "spectrum_pairs": report.spectrum_pairs,
        "d_covers": report.d_covers,
        "pass": report.all_pass(),
    });
    emit(common, &json_report, &format!("characterization: {}", summary_line(&json_report)));
    Ok(usize::from(!report.all_pass()))
}

fn ultraproduct(family_path: &Path, at: &str, common: &Common) -> Result<usize, String> {
    let value = read_json(family_path)?;
    let (index, factors) = json::parse_family(&value).map_err(|e| e.to_string())?;
    let at_idx = index
        .iter()
        .position(|n| n == at)
        .ok_or_else(|| format!("unknown index point `{at}`"))?;
    let names: Vec<&str> = index.iter().map(String::as_str).collect();
    let report = los::classical_ultraproduct(&names, &factors, at_idx, scan_params(common))
        .map_err(|e| e.to_string())?;
    let json_report = serde_json::json!({
        "seed": common.seed,
        "at": at,
        "universe": report.ultraproduct.universe(),
        "iso_to_factor": report.iso_to_factor,
        "iso_to_section_quotient": report.iso_to_section_quotient,
        "iso_to_gamma": report.iso_to_gamma,
        "checked": report.checked,
        "failures": report.failures.len(),
        "pass": report.pass(),
    });
    emit(common, &json_report, &format!("ultraproduct: {}", summary_line(&json_report)));
    Ok(usize::from(!report.pass()))
}

fn list_filters(frame_path: &Path, _common: &Common) -> Result<usize, String> {
    let value = read_json(frame_path)?;
    let frame = Arc::new(json::parse_frame(&value).map_err(|e| e.to_string())?);
    for f in filters(&frame) {
        let row = serde_json::json!({
            "generator": frame.name(f.generator()),
            "members": f.members().iter().map(|&u| frame.name(u)).collect::<Vec<_>>(),
            "proper": f.proper,
            "maximal": f.maximal,
            "prime": f.prime,
        });
        println!("{}", serde_json::to_string(&row).unwrap());
    }
    Ok(0)
}

fn emit(common: &Common, report: &serde_json::Value, text: &str) {
    match common.format {
        Format::Json => println!("{}", serde_json::to_string(report).unwrap()),
        Format::Text => println!("{text}"),
    }
}
