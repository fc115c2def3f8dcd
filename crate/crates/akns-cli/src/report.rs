//! Report assembly. JSON reports are byte-deterministic: every object is
//! emitted with its keys in sorted order and all numbers ride as canonical
//! strings, so identical inputs always serialize identically.

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// Sort object keys recursively; with sorted maps this is the identity, but
/// it keeps the byte contract independent of serde_json feature unification.
fn sorted(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = serde_json::Map::new();
            for (k, v) in entries {
                out.insert(k, sorted(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

pub fn render(value: Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string(&sorted(value)).expect("report serializes");
            text.push('\n');
            text
        }
        Format::Text => {
            let mut out = String::new();
            flatten("", &sorted(value), &mut out);
            out
        }
    }
}

fn flatten(path: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let sub = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                flatten(&sub, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), v, out);
            }
        }
        Value::Null => out.push_str(&format!("{path}: -\n")),
        Value::String(s) => out.push_str(&format!("{path}: {s}\n")),
        other => out.push_str(&format!("{path}: {other}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_keys_are_sorted() {
        let v = json!({"b": 1, "a": {"d": 2, "c": [true, null]}});
        assert_eq!(
            render(v, Format::Json),
            "{\"a\":{\"c\":[true,null],\"d\":2},\"b\":1}\n"
        );
    }

    #[test]
    fn text_mode_flattens_paths() {
        let v = json!({"verdict": {"passes": true}, "stages": [{"name": "s"}]});
        let text = render(v, Format::Text);
        assert_eq!(text, "stages[0].name: s\nverdict.passes: true\n");
    }
}
