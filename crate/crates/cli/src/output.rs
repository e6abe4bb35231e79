use std::fmt::Write;

use nalgebra::DMatrix;

/// Output tree; object keys keep insertion order.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    List(Vec<Value>),
    Obj(Vec<(String, Value)>),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

impl From<&[f64]> for Value {
    fn from(v: &[f64]) -> Self {
        Value::List(v.iter().map(|x| Value::Num(*x)).collect())
    }
}

impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        v.as_slice().into()
    }
}

impl From<&DMatrix<f64>> for Value {
    fn from(m: &DMatrix<f64>) -> Self {
        Value::List(
            m.row_iter()
                .map(|r| r.iter().copied().collect::<Vec<f64>>().into())
                .collect(),
        )
    }
}

#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), v.into()));
        self
    }

    pub fn into_value(self) -> Value {
        Value::Obj(self.fields)
    }

    pub fn render(&self, json: bool) -> String {
        let v = Value::Obj(self.fields.clone());
        let mut out = String::new();
        if json {
            write_json(&mut out, &v);
        } else {
            write_text(&mut out, &v, 0);
        }
        out.push('\n');
        out
    }
}

/// 17 significant digits.
fn num_json(v: f64) -> String {
    // no negative zero
    let v = v + 0.0;
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

fn write_json(out: &mut String, v: &Value) {
    match v {
        Value::Num(x) => out.push_str(&num_json(*x)),
        Value::Int(i) => write!(out, "{i}").unwrap(),
        Value::Bool(b) => write!(out, "{b}").unwrap(),
        Value::Str(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::List(items) => {
            out.push('[');
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(out, it);
            }
            out.push(']');
        }
        Value::Obj(fields) => {
            out.push('{');
            for (i, (k, it)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("string"));
                out.push(':');
                write_json(out, it);
            }
            out.push('}');
        }
    }
}

fn num_text(x: f64) -> String {
    let x = x + 0.0;
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e7).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn inline(v: &Value) -> Option<String> {
    Some(match v {
        Value::Num(x) => num_text(*x),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => s.clone(),
        Value::List(items) => {
            let parts = items.iter().map(inline).collect::<Option<Vec<_>>>()?;
            format!("[{}]", parts.join(", "))
        }
        Value::Obj(_) => return None,
    })
}

fn write_text(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Obj(fields) => {
            for (i, (k, it)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                match inline(it) {
                    Some(s) => write!(out, "{pad}{k}: {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}{k}:").unwrap();
                        write_text(out, it, indent + 1);
                    }
                }
            }
        }
        Value::List(items) => {
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                match inline(it) {
                    Some(s) => write!(out, "{pad}- {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}-").unwrap();
                        write_text(out, it, indent + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}", inline(other).expect("scalar"))),
    }
}
