use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use art_core::simbench::{
    summarize, test_error, write_importance_csv, write_rows_csv, write_summary_csv, Profile,
    Scenario, ScenarioOutput,
};
use art_core::{
    art_iam_fit, read_table_path, variable_importance, ArtConfig, ArtError, ArtModel, Dataset,
    LearnerSpec, Loss, Table, Task,
};
use serde::Serialize;

use crate::config::{self, ArtOverrides, FileConfig};
use crate::model_file::ModelFile;
use crate::{CliError, Common, FitArgs, ImportanceArgs, PredictArgs, SimArgs};

fn overrides(common: &Common) -> Result<ArtOverrides, CliError> {
    Ok(ArtOverrides {
        seed: common.seed,
        lambda: common.lambda,
        splits: common.splits,
        weight_mode: common.weight_mode,
        priors: common
            .priors
            .as_deref()
            .map(config::parse_priors)
            .transpose()?,
    })
}

fn read_csv(path: &Path) -> Result<Table, CliError> {
    read_table_path(path).map_err(|e| match e {
        ArtError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other.into(),
    })
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("cannot write output: {e}"))),
    }
}

/// Parses `squared`, `asymmetric:tau=0.3` or `cross_entropy[:clip=1e-6]`.
pub fn parse_loss(text: &str) -> Result<Loss, CliError> {
    let (name, param) = match text.split_once(':') {
        Some((n, p)) => (n.trim(), Some(p.trim())),
        None => (text.trim(), None),
    };
    let value = |key: &str| -> Result<f64, CliError> {
        let p =
            param.ok_or_else(|| CliError::Config(format!("loss `{name}` needs {key}=<value>")))?;
        p.strip_prefix(key)
            .and_then(|v| v.strip_prefix('='))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| {
                CliError::Config(format!("loss `{name}`: expected {key}=<number>, got `{p}`"))
            })
    };
    let loss = match name {
        "squared" => Loss::Squared,
        "asymmetric" => Loss::AsymmetricSquared { tau: value("tau")? },
        "cross_entropy" if param.is_none() => Loss::cross_entropy(),
        "cross_entropy" => Loss::CrossEntropy {
            clip: value("clip")?,
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown loss `{other}` (expected squared, asymmetric or cross_entropy)"
            )))
        }
    };
    loss.validate()?;
    Ok(loss)
}

struct FitInputs {
    primary: Dataset,
    auxiliaries: Vec<Dataset>,
    aux_paths: Vec<PathBuf>,
    features: Vec<String>,
    response: String,
    learners: Vec<LearnerSpec>,
    loss: Loss,
    config: ArtConfig,
    out: PathBuf,
}

fn fit_inputs(args: &FitArgs) -> Result<FitInputs, CliError> {
    let file = config::load_file(args.common.config.as_deref())?;
    let config = config::art_config(&file, &overrides(&args.common)?)?;
    let primary_path = args
        .primary
        .clone()
        .or_else(|| file.primary.clone())
        .ok_or_else(|| CliError::Config("missing `primary`: pass --primary <csv>".into()))?;
    let aux_paths = if args.auxiliary.is_empty() {
        file.auxiliary.clone()
    } else {
        args.auxiliary.clone()
    };
    let response = args
        .response
        .clone()
        .or_else(|| file.response.clone())
        .unwrap_or_else(|| "y".to_string());
    let task = args.task.or(file.task).unwrap_or(Task::Regression);

    let table = read_csv(&primary_path)?;
    let features = table.feature_names(&response);
    if table.column_index(&response).is_none() {
        return Err(CliError::Data(format!(
            "{}: response column `{response}` not found",
            primary_path.display()
        )));
    }
    if features.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no feature columns besides `{response}`",
            primary_path.display()
        )));
    }
    let primary = table.to_dataset(&response, &features, task)?;
    let auxiliaries = aux_paths
        .iter()
        .map(|path| {
            let t = read_csv(path)?;
            t.to_dataset(&response, &features, task).map_err(|e| {
                CliError::Data(format!(
                    "{}: schema does not match the primary: {e}",
                    path.display()
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let learner_texts = if args.learners.is_empty() {
        file.learners.clone()
    } else {
        args.learners.clone()
    };
    let learners = if learner_texts.is_empty() {
        vec![match task {
            Task::Regression => LearnerSpec::Ols,
            Task::Classification => LearnerSpec::logistic(),
        }]
    } else {
        learner_texts
            .iter()
            .map(|t| config::parse_learner(t, config.seed))
            .collect::<Result<_, _>>()?
    };
    let loss = match args.loss.as_deref() {
        Some(text) => parse_loss(text)?,
        None => file.loss.unwrap_or(match task {
            Task::Regression => Loss::Squared,
            Task::Classification => Loss::cross_entropy(),
        }),
    };
    let out = args
        .common
        .out
        .clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("model.json"));
    Ok(FitInputs {
        primary,
        auxiliaries,
        aux_paths,
        features,
        response,
        learners,
        loss,
        config,
        out,
    })
}

/// One line per candidate with its final weight.
pub fn weight_report(model: &ArtModel, aux_paths: &[PathBuf]) -> String {
    let r = model.learners.len().max(1);
    let mut text = String::new();
    let _ = writeln!(
        text,
        "# lambda = {}, splits used = {}",
        model.lambda,
        model.splits.len()
    );
    let _ = writeln!(text, "candidate\tdataset\tlearner\tweight");
    for (i, (c, w)) in model
        .candidates
        .iter()
        .zip(&model.final_weights)
        .enumerate()
    {
        let m = i / r;
        let dataset = if m == 0 {
            "primary".to_string()
        } else {
            aux_paths
                .get(m - 1)
                .map_or_else(|| format!("aux{m}"), |p| p.display().to_string())
        };
        let _ = writeln!(
            text,
            "{}\t{dataset}\t{}\t{w:.6}",
            c.label,
            model.learners[i % r].name()
        );
    }
    text
}

pub fn fit(args: &FitArgs) -> Result<(), CliError> {
    let inputs = fit_inputs(args)?;
    let model = art_iam_fit(
        &inputs.primary,
        &inputs.auxiliaries,
        &inputs.learners,
        &inputs.loss,
        &inputs.config,
    )?;
    let report = weight_report(&model, &inputs.aux_paths);
    ModelFile::new(inputs.features, inputs.response, inputs.loss, model).save(&inputs.out)?;
    print!("{report}");
    Ok(())
}

pub fn predict(args: &PredictArgs) -> Result<(), CliError> {
    let file = config::load_file(args.common.config.as_deref())?;
    let saved = ModelFile::load(&args.model)?;
    let table = read_csv(&args.data)?;
    let extra: Vec<&String> = table
        .columns
        .iter()
        .filter(|c| **c != saved.response && !saved.feature_names.contains(c))
        .collect();
    if !extra.is_empty() {
        return Err(CliError::Data(format!(
            "{}: columns {extra:?} are not features of the model",
            args.data.display()
        )));
    }
    let x = table.matrix(&saved.feature_names)?;
    let model = &saved.model;
    let mut preds = Vec::with_capacity(x.nrows());
    for i in 0..x.nrows() {
        let row: Vec<f64> = x.row(i).iter().copied().collect();
        preds.push(model.predict(&row)?);
    }

    let mut text = String::new();
    match model.task {
        Task::Regression => {
            text.push_str("prediction\n");
            for p in &preds {
                let _ = writeln!(text, "{p}");
            }
        }
        Task::Classification => {
            text.push_str("probability,label\n");
            for p in &preds {
                let _ = writeln!(text, "{p},{}", u8::from(*p > 0.5));
            }
        }
    }
    let out = args.common.out.clone().or(file.out);
    write_output(out.as_deref(), &text)?;

    if table.column_index(&saved.response).is_some() {
        let data = table.to_dataset(&saved.response, &saved.feature_names, model.task)?;
        let kind = match model.task {
            Task::Regression => "mean squared error",
            Task::Classification => "misclassification rate",
        };
        eprintln!(
            "test error ({kind}) on {} rows: {}",
            data.n_rows(),
            test_error(&preds, &data)
        );
    }
    Ok(())
}

pub fn importance(args: &ImportanceArgs) -> Result<(), CliError> {
    let file = config::load_file(args.common.config.as_deref())?;
    let saved = ModelFile::load(&args.model)?;
    let vi = variable_importance(&saved.model)?;
    let mut text = String::from("feature,importance\n");
    for j in vi.ranking() {
        let _ = writeln!(text, "{},{}", saved.feature_names[j], vi.vi[j]);
    }
    let out = args.common.out.clone().or(file.out);
    write_output(out.as_deref(), &text)
}

#[derive(Serialize)]
struct Manifest<'a> {
    scenario: &'a str,
    seed: u64,
    profile: Profile,
    wall_time_seconds: f64,
    files: Vec<String>,
    spec: &'a Scenario,
}

fn apply_overrides(scenario: &mut Scenario, flags: &ArtOverrides) {
    let patch = |art: &mut ArtConfig| {
        if let Some(l) = flags.lambda {
            art.lambda = Some(l);
        }
        if let Some(s) = flags.splits {
            art.n_splits = s;
        }
        if let Some(w) = flags.weight_mode {
            art.weight_mode = w;
        }
    };
    match scenario {
        Scenario::Sweep { configs } => configs.iter_mut().for_each(|c| patch(&mut c.art)),
        Scenario::Importance { art, .. } => patch(art),
        Scenario::SplitProtocol { config, .. } => patch(&mut config.art),
    }
}

fn resolve_profile(common: &Common, file: &FileConfig) -> Result<Profile, CliError> {
    let text = common
        .profile
        .clone()
        .or_else(|| file.profile.clone())
        .unwrap_or_else(|| "full".to_string());
    Ok(text.parse::<Profile>()?)
}

fn create_csv(dir: &Path, name: &str) -> Result<(fs::File, String), CliError> {
    let path = dir.join(name);
    let f = fs::File::create(&path)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", path.display())))?;
    Ok((f, name.to_string()))
}

pub fn sim(args: &SimArgs) -> Result<(), CliError> {
    let file = config::load_file(args.common.config.as_deref())?;
    let flags = overrides(&args.common)?;
    if flags.priors.is_some() || file.priors.is_some() {
        return Err(CliError::Config(
            "priors cannot be set for sim: the candidate count varies across the sweep".into(),
        ));
    }
    let profile = resolve_profile(&args.common, &file)?;
    let seed = flags.seed.or(file.seed).unwrap_or(0);
    let mut scenario = Scenario::build(&args.name, profile, seed)?;
    apply_overrides(
        &mut scenario,
        &ArtOverrides {
            lambda: flags.lambda.or(file.lambda),
            splits: flags.splits.or(file.splits),
            weight_mode: flags.weight_mode.or(file.weight_mode),
            ..ArtOverrides::default()
        },
    );
    let dir = args
        .common
        .out
        .clone()
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;

    let start = Instant::now();
    let output = scenario.run()?;
    let wall = start.elapsed().as_secs_f64();

    let name = &args.name;
    let mut files = Vec::new();
    match &output {
        ScenarioOutput::Errors(result) => {
            let (f, n) = create_csv(&dir, &format!("{name}_rows.csv"))?;
            write_rows_csv(f, result)?;
            files.push(n);
            let (f, n) = create_csv(&dir, &format!("{name}_summary.csv"))?;
            write_summary_csv(f, &summarize(result))?;
            files.push(n);
        }
        ScenarioOutput::Importance(rows) => {
            let (f, n) = create_csv(&dir, &format!("{name}_importance.csv"))?;
            write_importance_csv(f, rows)?;
            files.push(n);
        }
    }
    let manifest = Manifest {
        scenario: name,
        seed,
        profile,
        wall_time_seconds: wall,
        files: files.clone(),
        spec: &scenario,
    };
    let path = dir.join(format!("{name}_manifest.json"));
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Numerical(format!("cannot serialize manifest: {e}")))?;
    fs::write(&path, text + "\n")
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    eprintln!(
        "{name}: wrote {} in {wall:.1}s to {}",
        files.join(", "),
        dir.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn losses_parse() {
        assert_eq!(parse_loss("squared").unwrap(), Loss::Squared);
        assert_eq!(
            parse_loss("asymmetric:tau=0.3").unwrap(),
            Loss::AsymmetricSquared { tau: 0.3 }
        );
        assert_eq!(parse_loss("cross_entropy").unwrap(), Loss::cross_entropy());
        assert!(parse_loss("asymmetric:tau=2").is_err());
        assert!(parse_loss("asymmetric").is_err());
        assert!(parse_loss("hinge").is_err());
    }
}
