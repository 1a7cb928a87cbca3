//! JSON data interchange: serde-based input schemas (curves, cycles,
//! paths) and a deterministic hand-rolled emitter. Every complex number is
//! a two-element [re, im] array; all floats render with 17 significant
//! digits so output is byte-identical across runs and round-trip safe.

use num_complex::Complex64;
use serde::Deserialize;

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::path::{Leg, ModuliPath, Space};
use crate::periods::Cycle;

type C64 = Complex64;

fn cx(v: [f64; 2]) -> C64 {
    Complex64::new(v[0], v[1])
}

#[derive(Debug, Clone, Deserialize)]
pub struct CurveIn {
    pub a: [[f64; 2]; 3],
    pub h1: [f64; 2],
    pub h2: [f64; 2],
}

impl CurveIn {
    pub fn to_curve(&self) -> Result<CurveSpec<C64>> {
        let curve = CurveSpec {
            a: [cx(self.a[0]), cx(self.a[1]), cx(self.a[2])],
            h1: cx(self.h1),
            h2: cx(self.h2),
        };
        for z in curve.a.iter().chain([&curve.h1, &curve.h2]) {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidInput("curve contains non-finite values".into()));
            }
        }
        Ok(curve)
    }
}

fn default_winding() -> i32 {
    1
}

fn default_sheet() -> i8 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CycleIn {
    BranchPair {
        /// 1-based indices into the branch-point ordering (ρ₁,ρ₂,ρ₃,a₁,a₂,a₃).
        pair: [usize; 2],
        #[serde(default = "default_winding")]
        winding: i32,
        #[serde(default = "default_sheet")]
        sheet: i8,
    },
    BigLoop {
        radius: f64,
        #[serde(default = "default_sheet")]
        sheet: i8,
    },
}

impl CycleIn {
    pub fn to_cycle(&self) -> Result<Cycle<f64>> {
        match self {
            CycleIn::BranchPair {
                pair,
                winding,
                sheet,
            } => {
                let [i, j] = *pair;
                if !(1..=6).contains(&i) || !(1..=6).contains(&j) || i == j {
                    return Err(Error::InvalidInput(format!(
                        "branch pair must be two distinct 1-based indices in 1..6, got [{i},{j}]"
                    )));
                }
                if winding.unsigned_abs() > 1000 {
                    return Err(Error::InvalidInput("winding out of range".into()));
                }
                check_sheet(*sheet)?;
                Ok(Cycle::BranchPair {
                    i: i - 1,
                    j: j - 1,
                    winding: *winding,
                    sheet: *sheet,
                })
            }
            CycleIn::BigLoop { radius, sheet } => {
                if !radius.is_finite() || *radius <= 0.0 {
                    return Err(Error::InvalidInput("big-loop radius must be positive".into()));
                }
                check_sheet(*sheet)?;
                Ok(Cycle::BigLoop {
                    radius: *radius,
                    sheet: *sheet,
                })
            }
        }
    }
}

fn check_sheet(sheet: i8) -> Result<()> {
    if sheet == 1 || sheet == -1 {
        Ok(())
    } else {
        Err(Error::InvalidInput("sheet must be +1 or -1".into()))
    }
}

fn default_turns() -> i32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentIn {
    Line {
        from: Vec<[f64; 2]>,
        to: Vec<[f64; 2]>,
    },
    Circle {
        center: Vec<[f64; 2]>,
        radius: f64,
        #[serde(default = "default_turns")]
        turns: i32,
        #[serde(default)]
        component: usize,
    },
    Arc {
        center: Vec<[f64; 2]>,
        radius: f64,
        theta0: f64,
        theta1: f64,
        #[serde(default)]
        component: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathIn {
    pub space: String,
    pub segments: Vec<SegmentIn>,
    #[serde(default)]
    pub closed: bool,
}

impl PathIn {
    pub fn to_path(&self) -> Result<ModuliPath<f64>> {
        let space = match self.space.as_str() {
            "h" => Space::H,
            "e" => Space::E,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown path space {other:?}, expected \"h\" or \"e\""
                )))
            }
        };
        let dim = space.dim();
        let mut legs = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            let leg = match seg {
                SegmentIn::Line { from, to } => {
                    check_dim(from.len(), dim)?;
                    check_dim(to.len(), dim)?;
                    Leg::Line {
                        from: from.iter().map(|v| cx(*v)).collect(),
                        to: to.iter().map(|v| cx(*v)).collect(),
                    }
                }
                SegmentIn::Circle {
                    center,
                    radius,
                    turns,
                    component,
                } => {
                    check_dim(center.len(), dim)?;
                    check_component(*component, dim)?;
                    if *turns == 0 {
                        return Err(Error::InvalidInput("circle needs a nonzero turn count".into()));
                    }
                    Leg::Arc {
                        center: center.iter().map(|v| cx(*v)).collect(),
                        radius: *radius,
                        theta0: 0.0,
                        theta1: 2.0 * std::f64::consts::PI * f64::from(*turns),
                        component: *component,
                    }
                }
                SegmentIn::Arc {
                    center,
                    radius,
                    theta0,
                    theta1,
                    component,
                } => {
                    check_dim(center.len(), dim)?;
                    check_component(*component, dim)?;
                    Leg::Arc {
                        center: center.iter().map(|v| cx(*v)).collect(),
                        radius: *radius,
                        theta0: *theta0,
                        theta1: *theta1,
                        component: *component,
                    }
                }
            };
            legs.push(leg);
        }
        ModuliPath::new(space, legs, self.closed)
    }
}

fn check_dim(got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "segment point has {got} coordinates, the space needs {want}"
        )))
    }
}

fn check_component(component: usize, dim: usize) -> Result<()> {
    if component < dim {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "segment component {component} out of range for a {dim}-dimensional space"
        )))
    }
}

/// Top-level input document: a curve plus whatever the command needs.
/// A bare curve object is accepted wherever only the curve is used.
#[derive(Debug, Clone, Deserialize)]
pub struct InputDoc {
    pub curve: CurveIn,
    #[serde(default)]
    pub cycle: Option<CycleIn>,
    #[serde(default)]
    pub cycles: Option<Vec<CycleIn>>,
    #[serde(default)]
    pub path: Option<PathIn>,
    #[serde(default, rename = "loop")]
    pub loop_path: Option<PathIn>,
}

/// Parse an input document; a bare curve object is promoted to a document
/// with only the curve set.
pub fn parse_input(text: &str) -> Result<InputDoc> {
    let wrapped: std::result::Result<InputDoc, _> = serde_json::from_str(text);
    match wrapped {
        Ok(doc) => Ok(doc),
        Err(outer) => {
            let bare: std::result::Result<CurveIn, _> = serde_json::from_str(text);
            match bare {
                Ok(curve) => Ok(InputDoc {
                    curve,
                    cycle: None,
                    cycles: None,
                    path: None,
                    loop_path: None,
                }),
                Err(_) => Err(Error::InvalidInput(format!("malformed input JSON: {outer}"))),
            }
        }
    }
}

/// Deterministic JSON value; object keys keep insertion order.
#[derive(Debug, Clone)]
pub enum JVal {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<JVal>),
    Obj(Vec<(String, JVal)>),
}

impl JVal {
    pub fn complex(z: C64) -> JVal {
        JVal::Arr(vec![JVal::Num(z.re), JVal::Num(z.im)])
    }

    pub fn obj(entries: Vec<(&str, JVal)>) -> JVal {
        JVal::Obj(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

/// 17-significant-digit float rendering used for every numeric field.
pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        return "\"nan\"".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "\"inf\"".into() } else { "\"-inf\"".into() };
    }
    format!("{x:.16e}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn render_into(v: &JVal, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let pad_in = "  ".repeat(indent + 1);
    match v {
        JVal::Null => out.push_str("null"),
        JVal::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        JVal::Int(i) => out.push_str(&i.to_string()),
        JVal::Num(x) => out.push_str(&fmt_f(*x)),
        JVal::Str(s) => out.push_str(&escape(s)),
        JVal::Arr(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items
                .iter()
                .all(|i| matches!(i, JVal::Num(_) | JVal::Int(_) | JVal::Bool(_) | JVal::Null));
            if flat {
                out.push('[');
                for (n, item) in items.iter().enumerate() {
                    if n > 0 {
                        out.push_str(", ");
                    }
                    render_into(item, 0, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (n, item) in items.iter().enumerate() {
                    out.push_str(&pad_in);
                    render_into(item, indent + 1, out);
                    if n + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad);
                out.push(']');
            }
        }
        JVal::Obj(entries) => {
            if entries.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (n, (k, val)) in entries.iter().enumerate() {
                out.push_str(&pad_in);
                out.push_str(&escape(k));
                out.push_str(": ");
                render_into(val, indent + 1, out);
                if n + 1 < entries.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push('}');
        }
    }
}

/// Render a document with a trailing newline.
pub fn render(v: &JVal) -> String {
    let mut out = String::new();
    render_into(v, 0, &mut out);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bare_curve_and_wrapped_document() {
        let bare = r#"{"a":[[4,0],[5,0],[6,0]],"h1":[-7,0],"h2":[6,0]}"#;
        let doc = parse_input(bare).unwrap();
        let curve = doc.curve.to_curve().unwrap();
        assert_eq!(curve.h1, Complex64::new(-7.0, 0.0));
        let wrapped = r#"{"curve":{"a":[[4,0],[5,0],[6,0]],"h1":[-7,0],"h2":[6,0]},
            "cycle":{"kind":"branch_pair","pair":[1,2]}}"#;
        let doc = parse_input(wrapped).unwrap();
        let cycle = doc.cycle.unwrap().to_cycle().unwrap();
        assert_eq!(
            cycle,
            Cycle::BranchPair {
                i: 0,
                j: 1,
                winding: 1,
                sheet: 1
            }
        );
    }

    #[test]
    fn rejects_bad_cycle_and_bad_path() {
        let c = CycleIn::BranchPair {
            pair: [1, 1],
            winding: 1,
            sheet: 1,
        };
        assert!(c.to_cycle().is_err());
        let c = CycleIn::BranchPair {
            pair: [0, 2],
            winding: 1,
            sheet: 1,
        };
        assert!(c.to_cycle().is_err());
        let p: PathIn = serde_json::from_str(
            r#"{"space":"q","segments":[{"kind":"line","from":[[0,0],[0,0]],"to":[[1,0],[0,0]]}]}"#,
        )
        .unwrap();
        assert!(p.to_path().is_err());
    }

    #[test]
    fn path_document_round_trip() {
        let text = r#"{"space":"h","segments":[
            {"kind":"line","from":[[-7,0],[6,0]],"to":[[-6.5,0],[6,0]]},
            {"kind":"circle","center":[[-6.7,0],[6,0]],"radius":0.2,"turns":1}
        ],"closed":false}"#;
        let p: PathIn = serde_json::from_str(text).unwrap();
        let path = p.to_path().unwrap();
        assert_eq!(path.leg_count(), 2);
    }

    #[test]
    fn deterministic_rendering() {
        let v = JVal::obj(vec![
            ("J", JVal::Arr(vec![JVal::complex(Complex64::new(0.25, -1.5))])),
            ("err", JVal::Num(1e-12)),
            ("nodes", JVal::Int(4096)),
        ]);
        let a = render(&v);
        let b = render(&v);
        assert_eq!(a, b);
        assert!(a.contains("2.5000000000000000e-1"));
    }
}
