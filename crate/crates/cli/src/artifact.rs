//! Deterministic artifact writing: JSON with floats at 17 significant digits
//! and fixed key order, so identical runs produce identical bytes, plus the
//! CSV trajectory/path formats.

use std::fmt::Write as _;

/// JSON value with deterministic serialization.
pub enum JVal {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
    Arr(Vec<JVal>),
    Obj(Vec<(&'static str, JVal)>),
}

impl JVal {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            JVal::Num(v) => {
                let _ = write!(out, "{}", fmt_f64(*v));
            }
            JVal::Int(v) => {
                let _ = write!(out, "{v}");
            }
            JVal::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            JVal::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            JVal::Null => out.push_str("null"),
            JVal::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            JVal::Obj(fields) => {
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "\"{k}\":");
                    v.write(out);
                }
                out.push('}');
            }
        }
    }
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "null".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "1e999".into() } else { "-1e999".into() };
    }
    format!("{v:.16e}")
}

pub fn subset_to_jval(x: &subsetspace::FiniteSubset) -> JVal {
    JVal::Arr(
        x.points()
            .iter()
            .map(|p| JVal::Arr(p.coords().iter().map(|c| JVal::Num(*c)).collect()))
            .collect(),
    )
}

pub fn pairs_to_jval(pairs: &[(usize, usize)]) -> JVal {
    JVal::Arr(
        pairs
            .iter()
            .map(|&(i, j)| JVal::Arr(vec![JVal::Int(i as i64), JVal::Int(j as i64)]))
            .collect(),
    )
}

/// Fixed-width trajectory CSV: time column, then every configuration
/// coordinate in point-major order.
pub fn trajectory_csv(trajectory: &[(f64, Vec<subsetspace::Point>)]) -> String {
    let mut out = String::new();
    if let Some((_, first)) = trajectory.first() {
        out.push_str("time");
        for (i, p) in first.iter().enumerate() {
            for k in 0..p.coords().len() {
                let _ = write!(out, ",point_{i}_coord_{k}");
            }
        }
        out.push('\n');
    }
    for (t, cfg) in trajectory {
        out.push_str(&fmt_f64(*t));
        for p in cfg {
            for c in p.coords() {
                let _ = write!(out, ",{}", fmt_f64(*c));
            }
        }
        out.push('\n');
    }
    out
}

/// Variable-width path CSV: t then the flattened coordinates of the sample
/// at t; the width can drop when component segments coincide.
pub fn path_csv(path: &subsetspace::SubsetPath, grid: usize) -> subsetspace::Result<String> {
    let mut out = String::new();
    for k in 0..grid {
        let t = k as f64 / (grid - 1) as f64;
        let sample = path.sample(t)?;
        out.push_str(&fmt_f64(t));
        for p in sample.points() {
            for c in p.coords() {
                let _ = write!(out, ",{}", fmt_f64(*c));
            }
        }
        out.push('\n');
    }
    Ok(out)
}
