//! Markdown rendering of a JSON report.
//!
//! Top-level keys become `##` sections, nested objects become indented bullet lists, and
//! arrays of scalars (including matrices) are written inline. Key order is the sorted
//! order of the JSON, so the output is as stable as the report.

use std::fmt::Write;

use serde_json::Value;

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("—".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.is_empty() => Some("[]".into()),
        Value::Array(a) => {
            let parts: Option<Vec<String>> = a.iter().map(|x| if x.is_object() { None } else { inline(x) }).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        Value::Object(m) if m.is_empty() => Some("{}".into()),
        Value::Object(_) => None,
    }
}

fn bullets(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match inline(x) {
                    Some(s) => writeln!(out, "{pad}- **{k}**: {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}- **{k}**").unwrap();
                        bullets(out, x, indent + 1);
                    }
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                match inline(x) {
                    Some(s) => writeln!(out, "{pad}- {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}- #{i}").unwrap();
                        bullets(out, x, indent + 1);
                    }
                }
            }
        }
        other => writeln!(out, "{pad}- {}", inline(other).unwrap_or_default()).unwrap(),
    }
}

pub fn markdown(report: &Value) -> String {
    let mut out = String::new();
    let command = report["command"].as_str().unwrap_or("report");
    let title = report["input"]["name"].as_str().map(|n| format!("{command}: {n}")).unwrap_or_else(|| command.to_string());
    writeln!(out, "# solenoid {title}\n").unwrap();
    let Value::Object(m) = report else {
        bullets(&mut out, report, 0);
        return out;
    };
    let scalars: Vec<_> = m.iter().filter_map(|(k, v)| inline(v).map(|s| (k, s))).collect();
    for (k, s) in &scalars {
        writeln!(out, "- **{k}**: {s}").unwrap();
    }
    for (k, v) in m {
        if inline(v).is_none() {
            writeln!(out, "\n## {k}\n").unwrap();
            bullets(&mut out, v, 0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sections_and_inline_matrices() {
        let r = json!({ "command": "compare", "schema": 1, "comparison": { "verdict": "Isomorphic", "m": [[1, 2], [3, 4]] } });
        let md = markdown(&r);
        assert!(md.starts_with("# solenoid compare\n"));
        assert!(md.contains("## comparison"));
        assert!(md.contains("- **m**: [[1, 2], [3, 4]]"));
        assert!(md.contains("- **schema**: 1"));
    }
}
