use edutree::error::{EvalError, LearnError};
use edutree::evaluation::{cross_validate, render_confusion, report_summary, EvaluationReport, SummaryFormat};
use edutree::rules::{extract_rules, extract_rules_merged, render_condition, render_consequent, render_rules};
use edutree::tree::{render_tree, Model};
use edutree::{classify, Algorithm, LearnerParams, Prediction};
use serde_json::json;

use crate::output::{emit, STDOUT};
use crate::{chart, input, CompareArgs, Failure, Format, PredictArgs, RulesArgs, Switch, TrainArgs};

fn check_params(params: &LearnerParams) -> Result<(), Failure> {
    params.validate().map_err(|e| Failure::Usage(e.to_string()))
}

fn learn_failure(e: LearnError) -> Failure {
    Failure::Data(e.to_string())
}

fn unsupported(format: Format, command: &str) -> Failure {
    Failure::Usage(format!("format {format:?} is not available for {command}"))
}

fn csv_text(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 fields")
}

pub fn train(args: &TrainArgs) -> Result<(), Failure> {
    let params = args.learner.params();
    check_params(&params)?;
    let ds = input::load(&args.data, None)?;
    let tree = args.algorithm.build(&ds, &params).map_err(learn_failure)?;
    let text = render_tree(&tree, &ds.schema);
    let model = Model {
        algorithm: args.algorithm,
        params,
        schema: ds.schema,
        tree,
    };
    let mut artifacts = vec![(args.output.clone(), model.to_json())];
    if args.output != STDOUT {
        artifacts.push((format!("{}.txt", args.output), text));
    }
    emit(artifacts)
}

pub fn predict(args: &PredictArgs) -> Result<(), Failure> {
    if args.format == Format::Svg {
        return Err(unsupported(args.format, "predict"));
    }
    let text = std::fs::read_to_string(&args.model)
        .map_err(|e| Failure::Data(format!("cannot read '{}': {e}", args.model)))?;
    let model = Model::from_json(&text).map_err(|e| Failure::Data(format!("'{}': {e}", args.model)))?;
    let ds = input::load(&args.data, Some(&model.schema))?;
    let instances = input::conform(&ds, &model.schema)?;
    let predictions = instances
        .iter()
        .map(|inst| classify(&model.tree, inst))
        .collect::<Result<Vec<_>, _>>()
        .map_err(learn_failure)?;
    let labels = model.schema.class_labels();
    let name = |p: &Prediction| p.label().map_or("UNCLASSIFIED".to_string(), |l| labels[l].clone());
    let content = match args.format {
        Format::Text => predictions
            .iter()
            .enumerate()
            .map(|(i, p)| match p {
                Prediction::Class { distribution, .. } => {
                    let dist: Vec<String> = labels
                        .iter()
                        .zip(distribution)
                        .map(|(l, x)| format!("{l}={x:.4}"))
                        .collect();
                    format!("{}\t{}\t{}\n", i + 1, name(p), dist.join(" "))
                }
                Prediction::Unclassified => format!("{}\tUNCLASSIFIED\t-\n", i + 1),
            })
            .collect(),
        Format::Csv => {
            let mut header = vec!["row".to_string(), "prediction".to_string()];
            header.extend(labels.iter().map(|l| format!("p_{l}")));
            let mut rows = vec![header];
            for (i, p) in predictions.iter().enumerate() {
                let mut row = vec![(i + 1).to_string(), name(p)];
                match p {
                    Prediction::Class { distribution, .. } => row.extend(distribution.iter().map(|x| x.to_string())),
                    Prediction::Unclassified => row.extend(labels.iter().map(|_| String::new())),
                }
                rows.push(row);
            }
            csv_text(rows)
        }
        Format::JsonDocument => {
            let items: Vec<_> = predictions
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let distribution = match p {
                        Prediction::Class { distribution, .. } => json!(distribution),
                        Prediction::Unclassified => json!(null),
                    };
                    json!({ "row": i + 1, "prediction": name(p), "distribution": distribution })
                })
                .collect();
            let doc = json!({ "labels": labels, "predictions": items });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json values serialize"))
        }
        Format::Svg => unreachable!("rejected above"),
    };
    emit(vec![(args.output.clone(), content)])
}

pub fn rules(args: &RulesArgs) -> Result<(), Failure> {
    if args.format == Format::Svg {
        return Err(unsupported(args.format, "rules"));
    }
    let params = args.learner.params();
    check_params(&params)?;
    let ds = input::load(&args.data, None)?;
    let tree = args.algorithm.build(&ds, &params).map_err(learn_failure)?;
    let schema = &ds.schema;
    let rules = if args.merge_siblings {
        extract_rules_merged(&tree, schema)
    } else {
        extract_rules(&tree, schema)
    };
    let conditions = |r: &edutree::rules::Rule| -> Vec<String> {
        r.conditions.iter().map(|c| render_condition(c, schema)).collect()
    };
    let content = match args.format {
        Format::Text => render_rules(&rules, schema),
        Format::Csv => {
            let mut rows = vec![vec!["rule".to_string(), "conditions".to_string(), "consequent".to_string()]];
            for (i, r) in rules.rules.iter().enumerate() {
                rows.push(vec![
                    (i + 1).to_string(),
                    conditions(r).join(" AND "),
                    render_consequent(r, schema),
                ]);
            }
            csv_text(rows)
        }
        Format::JsonDocument => {
            let items: Vec<_> = rules
                .rules
                .iter()
                .map(|r| json!({ "conditions": conditions(r), "consequent": render_consequent(r, schema) }))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&items).expect("json values serialize"))
        }
        Format::Svg => unreachable!("rejected above"),
    };
    emit(vec![(args.output.clone(), content)])
}

pub fn compare(args: &CompareArgs) -> Result<(), Failure> {
    let params = args.learner.params();
    check_params(&params)?;
    if args.k < 2 {
        return Err(Failure::Usage(format!("--k must be at least 2, got {}", args.k)));
    }
    let algorithms: Vec<Algorithm> = Algorithm::ALL
        .into_iter()
        .filter(|a| args.algorithms.contains(a))
        .collect();
    let ds = input::load(&args.data, None)?;
    let mut reports: Vec<EvaluationReport> = Vec::new();
    for a in algorithms {
        let mut report = cross_validate(a, &ds, &params, args.k, args.learner.seed).map_err(|e| match e {
            EvalError::FoldCount { .. } => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        })?;
        if args.timing == Switch::Off {
            report.build_time_seconds = None;
        }
        reports.push(report);
    }
    let summary = |f: SummaryFormat| report_summary(&reports, f).map_err(|e| Failure::Data(e.to_string()));
    let content = match args.format {
        Format::Text => {
            let mut text = summary(SummaryFormat::Text)?;
            for r in &reports {
                text.push('\n');
                text.push_str(&render_confusion(r));
            }
            text
        }
        Format::Csv => summary(SummaryFormat::Csv)?,
        Format::JsonDocument => {
            format!("{}\n", serde_json::to_string_pretty(&reports).expect("reports serialize"))
        }
        Format::Svg => chart::render(&reports),
    };
    let mut artifacts = vec![(args.output.clone(), content)];
    if let Some(path) = &args.chart {
        artifacts.push((path.clone(), chart::render(&reports)));
    }
    emit(artifacts)
}
