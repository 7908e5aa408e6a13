use std::path::Path;

use edutree::arff::{parse_arff_with_class, parse_csv, ParseErrors};
use edutree::data::{load_embedded_students, Dataset, Instance, Schema, Value};

use crate::{DataArgs, Failure};

pub const EMBEDDED: &str = "@embedded";

fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("cannot read '{path}': {e}")))
}

fn diagnostics(path: &str, errors: ParseErrors) -> Failure {
    let lines: Vec<String> = errors.0.iter().map(|d| format!("{path}:{d}")).collect();
    Failure::Data(format!("cannot parse '{path}'\n{}", lines.join("\n")))
}

fn is_csv(path: &str) -> bool {
    Path::new(path)
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Loads the data named on the command line. `fallback_schema` is used for
/// CSV input when no `--schema` file is given.
pub fn load(args: &DataArgs, fallback_schema: Option<&Schema>) -> Result<Dataset, Failure> {
    if args.data == EMBEDDED {
        if args.schema.is_some() || args.class.is_some() {
            return Err(Failure::Usage(format!("--schema and --class do not apply to {EMBEDDED}")));
        }
        return Ok(load_embedded_students());
    }
    if is_csv(&args.data) {
        let schema = match (&args.schema, fallback_schema) {
            (Some(path), _) => {
                let header = read(path)?;
                parse_arff_with_class(&header, args.class.as_deref())
                    .map_err(|e| diagnostics(path, e))?
                    .schema
            }
            (None, Some(schema)) => schema.clone(),
            (None, None) => return Err(Failure::Usage("CSV input needs --schema <arff file>".into())),
        };
        let text = read(&args.data)?;
        return parse_csv(&text, &schema).map_err(|e| diagnostics(&args.data, e));
    }
    let text = read(&args.data)?;
    parse_arff_with_class(&text, args.class.as_deref()).map_err(|e| diagnostics(&args.data, e))
}

/// Re-expresses `data` in the model's schema, matching attributes and
/// nominal values by name. The class column may be absent.
pub fn conform(data: &Dataset, model: &Schema) -> Result<Vec<Instance>, Failure> {
    let mismatch = |m: String| Failure::Usage(format!("data does not match the model schema: {m}"));
    let mut sources = Vec::with_capacity(model.len());
    for (i, spec) in model.attributes().iter().enumerate() {
        let source = data.schema.index_of(&spec.name);
        match (source, i == model.class_index()) {
            (None, false) => return Err(mismatch(format!("attribute '{}' is missing", spec.name))),
            (Some(j), _) => {
                let found = data.schema.attribute(j);
                if found.is_nominal() != spec.is_nominal() {
                    return Err(mismatch(format!("attribute '{}' has a different type", spec.name)));
                }
            }
            (None, true) => {}
        }
        sources.push(source);
    }
    let mut out = Vec::with_capacity(data.len());
    for (row, inst) in data.instances.iter().enumerate() {
        let mut values = Vec::with_capacity(model.len());
        for (spec, source) in model.attributes().iter().zip(&sources) {
            let value = match source.map(|j| (j, inst.get(j))) {
                None => Value::Missing,
                Some((j, Value::Nominal(v))) => {
                    let name = data.schema.attribute(j).value_name(v).unwrap_or("?");
                    match spec.value_index(name) {
                        Some(x) => Value::Nominal(x),
                        None => {
                            return Err(mismatch(format!(
                                "row {}: attribute '{}' has value '{name}', which the model does not declare",
                                row + 1,
                                spec.name
                            )))
                        }
                    }
                }
                Some((_, v)) => v,
            };
            values.push(value);
        }
        out.push(Instance::new(values));
    }
    Ok(out)
}
