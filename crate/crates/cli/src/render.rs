use serde_json::{json, Map, Value};

use iwalambda::characters::{AbsChar, LadicChar, VirtualChar};
use iwalambda::defect::LambdaExpr;
use iwalambda::splitting::FieldSpec;

pub const SCHEMA: &str = "iwalambda/1";

/// Stable JSON key for an absolute character.
pub fn char_label(field: &FieldSpec, chi: &AbsChar) -> String {
    if chi.coeffs().iter().all(|&c| c == 0) {
        "one".into()
    } else if field.omega().ok() == Some(chi) {
        "omega".into()
    } else {
        chi.to_string()
    }
}

/// Key for an ℓ-adic character; the orbit of `ω` is always "omega".
pub fn ladic_label(field: &FieldSpec, phi: &LadicChar) -> String {
    match field.omega() {
        Ok(omega) if phi.orbit.contains(omega) => "omega".into(),
        _ => char_label(field, &phi.rep),
    }
}

/// Nonzero multiplicities keyed by character, in representative order.
pub fn char_map(field: &FieldSpec, chars: &[LadicChar], x: &VirtualChar) -> Value {
    let mut out = Map::new();
    match x.ladic_components(chars, field.ell()) {
        Ok(parts) => {
            for (phi, m) in parts {
                out.insert(ladic_label(field, phi), json!(m));
            }
        }
        Err(_) => {
            for (chi, m) in x.terms() {
                out.insert(char_label(field, &chi), json!(m));
            }
        }
    }
    Value::Object(out)
}

pub fn lambda_json(field: &FieldSpec, chars: &[LadicChar], e: &LambdaExpr) -> Value {
    let mut base = Map::new();
    for (b, c) in e.base_terms() {
        base.insert(b.label().into(), json!(c));
    }
    json!({ "base": base, "shift": char_map(field, chars, &e.shift) })
}

pub fn field_json(field: &FieldSpec) -> Value {
    json!({
        "ell": field.ell(),
        "conductor": field.conductor(),
        "subgroup": field.subgroup_gens(),
        "galois_group": field.delta().invariant_factors(),
        "degree": field.degree(),
    })
}

pub struct Report {
    pub command: &'static str,
    pub field: Option<Value>,
    pub input: Value,
    pub result: Value,
    pub oracle_checked: bool,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "field": self.field.clone().unwrap_or(Value::Null),
            "input": self.input,
            "result": self.result,
            "oracle_checked": self.oracle_checked,
        })
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render_table(&self) -> String {
        let mut pairs = Vec::new();
        if let Some(f) = &self.field {
            flatten("field", f, &mut pairs);
        }
        if self.input.as_object().map_or(true, |m| !m.is_empty()) {
            flatten("input", &self.input, &mut pairs);
        }
        let mut out = String::new();
        let mut rows_table = None;
        match &self.result {
            Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                rows_table = Some(column_table(items));
            }
            other => flatten("result", other, &mut pairs),
        }
        pairs.push(("oracle_checked".into(), self.oracle_checked.to_string()));
        let width = pairs.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &pairs {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        if let Some(t) = rows_table {
            out.push('\n');
            out.push_str(&t);
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                flatten(&format!("{prefix}.{k}"), x, out);
            }
        }
        Value::Object(_) => out.push((prefix.into(), "0".into())),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.into(), format!("[{}]", parts.join(", "))));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push((prefix.into(), scalar(other))),
    }
}

fn column_table(items: &[Value]) -> String {
    let headers: Vec<String> = items[0].as_object().unwrap().keys().cloned().collect();
    let rows: Vec<Vec<String>> = items
        .iter()
        .map(|item| {
            headers
                .iter()
                .map(|h| {
                    let mut cell = Vec::new();
                    flatten("", &item[h.as_str()], &mut cell);
                    cell.into_iter().map(|(_, v)| v).collect::<Vec<_>>().join(" ")
                })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = (0..headers.len())
        .map(|j| {
            rows.iter()
                .map(|r| r[j].chars().count())
                .chain([headers[j].chars().count()])
                .max()
                .unwrap()
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> =
            cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&headers);
    for r in &rows {
        out.push_str(&line(r));
    }
    out
}
