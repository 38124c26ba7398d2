//! CSV and manifest emission. Every float is printed with 17 significant
//! digits so the text round-trips to the same bits; given the same config
//! and platform, repeated runs produce byte-identical CSV files. The
//! manifest additionally records wall-clock time, which is exempt from
//! that guarantee.

use anyhow::Result;
use btsim_core::dynamics::State;
use btsim_core::entropy::DiagnosticsRecord;
use btsim_core::Grid1D;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// 17 significant digits: the shortest count that is exact for every
/// f64. Non-finite values print as `nan`/`inf` (CSV only; JSON maps them
/// to null).
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

/// Streaming `t,x,u1..un` writer; one row per (output time, cell).
pub struct StatesCsv {
    w: BufWriter<File>,
}

impl StatesCsv {
    pub fn create(path: &Path, n: usize) -> Result<Self> {
        let mut w = BufWriter::new(File::create(path)?);
        let mut header = String::from("t,x");
        for i in 1..=n {
            write!(header, ",u{i}").unwrap();
        }
        writeln!(w, "{header}")?;
        Ok(StatesCsv { w })
    }

    pub fn append(&mut self, grid: &Grid1D, state: &State) -> Result<()> {
        for k in 0..grid.m() {
            let mut row = String::new();
            write!(row, "{},{}", fmt_float(state.t), fmt_float(grid.center(k))).unwrap();
            for species in &state.u {
                write!(row, ",{}", fmt_float(species[k])).unwrap();
            }
            writeln!(self.w, "{row}")?;
        }
        Ok(())
    }

    /// Pushes buffered rows to the OS so partial output survives an abort.
    pub fn flush(&mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

/// Streaming diagnostics writer:
/// `t,mass_1..n,linf_1..n,H1,H1_rel,H2,D_fisher,D_rao,D_react,RHS`.
pub struct DiagnosticsCsv {
    w: BufWriter<File>,
}

impl DiagnosticsCsv {
    pub fn create(path: &Path, n: usize) -> Result<Self> {
        let mut w = BufWriter::new(File::create(path)?);
        let mut header = String::from("t");
        for i in 1..=n {
            write!(header, ",mass_{i}").unwrap();
        }
        for i in 1..=n {
            write!(header, ",linf_{i}").unwrap();
        }
        header.push_str(",H1,H1_rel,H2,D_fisher,D_rao,D_react,RHS");
        writeln!(w, "{header}")?;
        Ok(DiagnosticsCsv { w })
    }

    pub fn append(&mut self, rec: &DiagnosticsRecord) -> Result<()> {
        let mut row = fmt_float(rec.t);
        for &m in &rec.mass {
            write!(row, ",{}", fmt_float(m)).unwrap();
        }
        for &l in &rec.linf {
            write!(row, ",{}", fmt_float(l)).unwrap();
        }
        write!(
            row,
            ",{},{},{},{},{},{},{}",
            fmt_float(rec.h1),
            fmt_float(rec.h1_rel.unwrap_or(f64::NAN)),
            fmt_float(rec.h2),
            fmt_float(rec.dissipation.fisher),
            fmt_float(rec.dissipation.rao),
            fmt_float(rec.dissipation.reaction),
            fmt_float(rec.dissipation.rhs),
        )
        .unwrap();
        writeln!(self.w, "{row}")?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

pub fn write_states_csv(path: &Path, grid: &Grid1D, n: usize, states: &[State]) -> Result<()> {
    let mut csv = StatesCsv::create(path, n)?;
    for s in states {
        csv.append(grid, s)?;
    }
    csv.flush()
}

pub fn write_diagnostics_csv(path: &Path, n: usize, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut csv = DiagnosticsCsv::create(path, n)?;
    for r in records {
        csv.append(r)?;
    }
    csv.flush()
}

/// Two-column convenience CSV for experiment summaries (sweep errors,
/// entropy traces).
pub fn write_series_csv(path: &Path, headers: (&str, &str), rows: &[(f64, f64)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{},{}", headers.0, headers.1)?;
    for &(a, b) in rows {
        writeln!(w, "{},{}", fmt_float(a), fmt_float(b))?;
    }
    w.flush()?;
    Ok(())
}

/// One pass/fail check, printed on stdout and echoed into the manifest.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: &'static str,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
}

impl Verdict {
    pub fn line(&self) -> String {
        format!(
            "{} {} measured={} bound={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            fmt_float(self.measured),
            fmt_float(self.bound),
        )
    }
}

/// Minimal JSON document; objects keep their keys sorted (BTreeMap) so
/// serialization is deterministic.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(u64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(BTreeMap<String, Json>),
}

fn escape_into(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
}

impl Json {
    fn write_into(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => write!(out, "{i}").unwrap(),
            Json::Num(x) => {
                if x.is_finite() {
                    write!(out, "{x:.16e}").unwrap();
                } else {
                    out.push_str("null");
                }
            }
            Json::Str(s) => escape_into(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    item.write_into(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            Json::Obj(map) => {
                if map.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (k, (key, value)) in map.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    escape_into(out, key);
                    out.push_str(": ");
                    value.write_into(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }

    pub fn to_string_pretty(&self) -> String {
        let mut out = String::new();
        self.write_into(&mut out, 0);
        out.push('\n');
        out
    }
}

pub struct Manifest {
    pub command: &'static str,
    pub config_echo: Vec<(String, String)>,
    pub steps: u64,
    pub wall_clock_seconds: f64,
    pub final_diagnostics: Option<DiagnosticsRecord>,
    pub verdicts: Vec<Verdict>,
}

fn record_to_json(rec: &DiagnosticsRecord) -> Json {
    let mut obj = BTreeMap::new();
    obj.insert("t".into(), Json::Num(rec.t));
    obj.insert(
        "mass".into(),
        Json::Arr(rec.mass.iter().map(|&x| Json::Num(x)).collect()),
    );
    obj.insert(
        "linf".into(),
        Json::Arr(rec.linf.iter().map(|&x| Json::Num(x)).collect()),
    );
    obj.insert("H1".into(), Json::Num(rec.h1));
    obj.insert(
        "H1_rel".into(),
        rec.h1_rel.map_or(Json::Null, Json::Num),
    );
    obj.insert("H2".into(), Json::Num(rec.h2));
    obj.insert("D_fisher".into(), Json::Num(rec.dissipation.fisher));
    obj.insert("D_rao".into(), Json::Num(rec.dissipation.rao));
    obj.insert("D_react".into(), Json::Num(rec.dissipation.reaction));
    obj.insert("RHS".into(), Json::Num(rec.dissipation.rhs));
    Json::Obj(obj)
}

impl Manifest {
    pub fn to_json(&self) -> Json {
        let mut root = BTreeMap::new();
        root.insert("artifact_version".into(), Json::Int(1));
        root.insert("command".into(), Json::Str(self.command.into()));
        let config: BTreeMap<String, Json> = self
            .config_echo
            .iter()
            .map(|(k, v)| (k.clone(), Json::Str(v.clone())))
            .collect();
        root.insert("config".into(), Json::Obj(config));
        root.insert("steps".into(), Json::Int(self.steps));
        root.insert(
            "wall_clock_seconds".into(),
            Json::Num(self.wall_clock_seconds),
        );
        root.insert(
            "final_diagnostics".into(),
            self.final_diagnostics
                .as_ref()
                .map_or(Json::Null, record_to_json),
        );
        let verdicts = self
            .verdicts
            .iter()
            .map(|v| {
                let mut obj = BTreeMap::new();
                obj.insert("name".into(), Json::Str(v.name.into()));
                obj.insert("pass".into(), Json::Bool(v.pass));
                obj.insert("measured".into(), Json::Num(v.measured));
                obj.insert("bound".into(), Json::Num(v.bound));
                Json::Obj(obj)
            })
            .collect();
        root.insert("verdicts".into(), Json::Arr(verdicts));
        Json::Obj(root)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json().to_string_pretty())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for &x in &[
            0.0,
            -0.0,
            1.0,
            core::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            5e-324,
            f64::MAX,
            f64::MIN_POSITIVE,
            -7.123456789012345e-101,
        ] {
            let back: f64 = fmt_float(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(fmt_float(f64::NAN), "nan");
    }

    #[test]
    fn empty_trajectory_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("states.csv");
        let grid = Grid1D::new(0.0, 1.0, 2).unwrap();
        write_states_csv(&path, &grid, 2, &[]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "t,x,u1,u2\n");
    }

    #[test]
    fn one_time_two_cells_gives_three_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("states.csv");
        let grid = Grid1D::new(0.0, 1.0, 2).unwrap();
        let state = State::new(0.5, vec![vec![1.0, 2.0]]).unwrap();
        write_states_csv(&path, &grid, 1, &[state]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "t,x,u1");
        let fields: Vec<f64> = lines[2].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields, vec![0.5, 0.75, 2.0]);
    }

    #[test]
    fn json_keys_come_out_sorted_and_escaped() {
        let mut obj = BTreeMap::new();
        obj.insert("zeta".to_string(), Json::Int(1));
        obj.insert("alpha".to_string(), Json::Str("a\"b\n".into()));
        obj.insert("nan".to_string(), Json::Num(f64::NAN));
        let text = Json::Obj(obj).to_string_pretty();
        let alpha = text.find("alpha").unwrap();
        let nan = text.find("\"nan\"").unwrap();
        let zeta = text.find("zeta").unwrap();
        assert!(alpha < nan && nan < zeta, "{text}");
        assert!(text.contains("\\\"b\\n"), "{text}");
        assert!(text.contains("\"nan\": null"), "{text}");
    }
}
