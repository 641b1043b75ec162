//! Report values and their JSON / CSV encodings.

use std::io::Write;
use std::str::FromStr;

use anyhow::Result;
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Builds report values with floats printed to a fixed number of significant digits.
#[derive(Clone, Copy, Debug)]
pub struct Emitter {
    pub precision: usize,
}

impl Emitter {
    pub fn float(&self, x: f64) -> Value {
        if !x.is_finite() {
            return Value::String(x.to_string());
        }
        Value::Number(Number::from_str(&format_sig(x, self.precision)).expect("valid JSON number"))
    }

    pub fn floats(&self, xs: &[f64]) -> Value {
        Value::Array(xs.iter().map(|&x| self.float(x)).collect())
    }
}

pub fn big_uint(x: &BigUint) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer text"))
}

/// `p/q` text, always with a denominator.
pub fn rational(r: &BigRational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

/// `x` to `digits` significant digits, trailing zeros dropped; plain decimal
/// notation for moderate exponents, scientific otherwise. At 17 digits the
/// shortest round-trip representation is used.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = if digits >= 17 { format!("{x:e}") } else { format!("{:.*e}", digits - 1, x) };
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits_only: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits_only = digits_only.trim_end_matches('0');
    let digits_only = if digits_only.is_empty() { "0" } else { digits_only };

    if (-5..=16).contains(&exp) {
        let point = exp + 1;
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits_only)
        } else if point as usize >= digits_only.len() {
            format!("{}{}.0", digits_only, "0".repeat(point as usize - digits_only.len()))
        } else {
            let (int, frac) = digits_only.split_at(point as usize);
            format!("{int}.{frac}")
        };
        format!("{sign}{body}")
    } else {
        let (first, rest) = digits_only.split_at(1);
        let rest = if rest.is_empty() { "0" } else { rest };
        format!("{sign}{first}.{rest}e{exp}")
    }
}

pub fn write_report(out: &mut impl Write, report: &Value, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", report, &mut rows);
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["key", "value"])?;
            for (k, v) in rows {
                w.write_record([k, v])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, rows)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, rows)),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

/// Small builder for ordered JSON objects.
#[derive(Default)]
pub struct Obj(Map<String, Value>);

impl Obj {
    pub fn new() -> Self {
        Obj::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn build(self) -> Value {
        Value::Object(self.0)
    }
}

impl From<Obj> for Value {
    fn from(o: Obj) -> Value {
        o.build()
    }
}
