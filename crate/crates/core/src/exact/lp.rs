//! CPLEX LP text format: writer for a [`MilpModel`] and a small parser.
//!
//! The cost row is the objective; the emission row is written as the
//! constraint [`EMISSION_ROW`] with an upper bound (the epsilon level, or
//! `1e30` when unconstrained). The parser moves that row back to the second
//! objective.

use std::collections::{HashMap, HashSet};
use std::io::{self, Write};

use super::model::{MilpModel, Sense, Terms, VarKind};
use super::ExactError;

pub const EMISSION_ROW: &str = "z2_cap";
/// Right-hand side standing in for "no emission cap".
pub const NO_CAP: f64 = 1e30;
const LINE_WIDTH: usize = 200;

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "+inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

struct Wrapped<'a, W: Write> {
    out: &'a mut W,
    line: usize,
}

impl<W: Write> Wrapped<'_, W> {
    fn token(&mut self, text: &str) -> io::Result<()> {
        if self.line > 0 && self.line + text.len() + 1 > LINE_WIDTH {
            writeln!(self.out)?;
            self.line = 0;
        }
        write!(self.out, " {text}")?;
        self.line += text.len() + 1;
        Ok(())
    }

    fn end(&mut self) -> io::Result<()> {
        writeln!(self.out)?;
        self.line = 0;
        Ok(())
    }
}

fn write_row<W: Write>(w: &mut Wrapped<'_, W>, model: &MilpModel, label: &str, terms: &Terms) -> io::Result<()> {
    w.token(&format!("{label}:"))?;
    if terms.is_empty() {
        // The format needs at least one term; any variable with a zero coefficient will do.
        let name = model.variables.first().map_or("zero", |v| v.name.as_str());
        return w.token(&format!("0 {name}"));
    }
    for (j, &(v, c)) in terms.iter().enumerate() {
        let sign = if c < 0.0 { "-" } else { "+" };
        let coef = format_number(c.abs());
        let name = &model.variables[v].name;
        let text = if j == 0 && c >= 0.0 {
            format!("{coef} {name}")
        } else {
            format!("{sign} {coef} {name}")
        };
        w.token(&text)?;
    }
    Ok(())
}

/// Writes the model. `emission_cap` bounds the emission row (`None` for no cap).
pub fn write_lp<W: Write>(model: &MilpModel, out: &mut W, emission_cap: Option<f64>) -> io::Result<()> {
    writeln!(out, "\\ {} variables, {} constraints", model.variables.len(), model.constraints.len())?;
    writeln!(out, "Minimize")?;
    let mut w = Wrapped { out, line: 0 };
    write_row(&mut w, model, "z1", &model.objectives[0])?;
    w.end()?;
    writeln!(w.out, "Subject To")?;
    write_row(&mut w, model, EMISSION_ROW, &model.objectives[1])?;
    w.token(&format!("<= {}", format_number(emission_cap.unwrap_or(NO_CAP))))?;
    w.end()?;
    for c in &model.constraints {
        write_row(&mut w, model, &c.name, &c.terms)?;
        w.token(&format!("{} {}", c.sense, format_number(c.rhs)))?;
        w.end()?;
    }
    writeln!(w.out, "Bounds")?;
    for v in model.variables.iter().filter(|v| v.kind != VarKind::Binary) {
        if v.lb == v.ub {
            writeln!(w.out, " {} = {}", v.name, format_number(v.lb))?;
        } else if v.lb == f64::NEG_INFINITY && v.ub == f64::INFINITY {
            writeln!(w.out, " {} free", v.name)?;
        } else {
            writeln!(w.out, " {} <= {} <= {}", format_number(v.lb), v.name, format_number(v.ub))?;
        }
    }
    for (header, kind) in [("Generals", VarKind::Integer), ("Binaries", VarKind::Binary)] {
        let names: Vec<&str> = model
            .variables
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.name.as_str())
            .collect();
        if names.is_empty() {
            continue;
        }
        writeln!(w.out, "{header}")?;
        for name in names {
            w.token(name)?;
        }
        w.end()?;
    }
    writeln!(w.out, "End")?;
    Ok(())
}

/// Writes the model to `path`.
pub fn export_lp(model: &MilpModel, path: &std::path::Path, emission_cap: Option<f64>) -> Result<(), ExactError> {
    let mut file = io::BufWriter::new(std::fs::File::create(path)?);
    write_lp(model, &mut file, emission_cap)?;
    file.flush()?;
    Ok(())
}

pub fn to_lp_string(model: &MilpModel, emission_cap: Option<f64>) -> String {
    let mut buf = Vec::new();
    write_lp(model, &mut buf, emission_cap).expect("writing to memory");
    String::from_utf8(buf).expect("LP text is UTF-8")
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Colon,
    Cmp(Sense),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Generals,
    Binaries,
    End,
}

fn header(line: &str) -> Option<Section> {
    let l = line.trim().to_ascii_lowercase();
    Some(match l.as_str() {
        "minimize" | "minimise" | "min" => Section::Objective,
        "subject to" | "such that" | "st" | "s.t." => Section::Constraints,
        "bounds" | "bound" => Section::Bounds,
        "generals" | "general" | "gen" => Section::Generals,
        "binaries" | "binary" | "bin" => Section::Binaries,
        "end" => Section::End,
        _ => return None,
    })
}

fn perr(line: usize, msg: impl Into<String>) -> ExactError {
    ExactError::LpParse { line, msg: msg.into() }
}

fn tokenize(text: &str, line: usize, out: &mut Vec<(Tok, usize)>) -> Result<(), ExactError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '+' => {
                out.push((Tok::Plus, line));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, line));
                i += 1;
            }
            ':' => {
                out.push((Tok::Colon, line));
                i += 1;
            }
            '<' | '>' | '=' => {
                let mut op = String::new();
                while i < chars.len() && matches!(chars[i], '<' | '>' | '=') {
                    op.push(chars[i]);
                    i += 1;
                }
                let sense = match op.as_str() {
                    "<" | "<=" | "=<" => Sense::Le,
                    ">" | ">=" | "=>" => Sense::Ge,
                    "=" => Sense::Eq,
                    _ => return Err(perr(line, format!("bad operator {op}"))),
                };
                out.push((Tok::Cmp(sense), line));
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() {
                    let d = chars[i];
                    let exp_sign = matches!(d, '+' | '-') && i > start && matches!(chars[i - 1], 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v: f64 = s.parse().map_err(|_| perr(line, format!("bad number {s}")))?;
                out.push((Tok::Num(v), line));
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !matches!(chars[i], '+' | '-' | ':' | '<' | '>' | '=') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let lower = s.to_ascii_lowercase();
                if lower == "inf" || lower == "infinity" {
                    out.push((Tok::Num(f64::INFINITY), line));
                } else {
                    out.push((Tok::Name(s), line));
                }
            }
        }
    }
    Ok(())
}

#[derive(Default)]
struct Builder {
    order: Vec<String>,
    index: HashMap<String, usize>,
    bounds: HashMap<usize, (f64, f64)>,
    generals: HashSet<usize>,
    binaries: HashSet<usize>,
}

impl Builder {
    fn id(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.order.len();
        self.order.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos.min(self.toks.len().saturating_sub(1))).map_or(0, |t| t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    /// Optional `name:` label.
    fn label(&mut self) -> Option<String> {
        if let (Some(Tok::Name(n)), Some((Tok::Colon, _))) = (self.peek(), self.toks.get(self.pos + 1)) {
            let n = n.clone();
            self.pos += 2;
            return Some(n);
        }
        None
    }

    /// Linear expression up to a comparison or the end of input.
    fn expr(&mut self, b: &mut Builder) -> Result<Terms, ExactError> {
        let mut terms = Vec::new();
        loop {
            let mut sign = 1.0;
            let mut any = false;
            while let Some(Tok::Plus | Tok::Minus) = self.peek() {
                if self.next() == Some(Tok::Minus) {
                    sign = -sign;
                }
                any = true;
            }
            let coef = if let Some(Tok::Num(v)) = self.peek() {
                let v = *v;
                self.pos += 1;
                Some(v)
            } else {
                None
            };
            match self.peek() {
                Some(Tok::Name(n)) => {
                    let n = n.clone();
                    self.pos += 1;
                    terms.push((b.id(&n), sign * coef.unwrap_or(1.0)));
                }
                _ if coef.is_some() || any => {
                    return Err(perr(self.line(), "term without a variable"));
                }
                _ => return Ok(terms),
            }
            if matches!(self.peek(), Some(Tok::Plus | Tok::Minus)) {
                continue;
            }
            return Ok(terms);
        }
    }

    fn signed_number(&mut self) -> Result<f64, ExactError> {
        let mut sign = 1.0;
        while let Some(Tok::Plus | Tok::Minus) = self.peek() {
            if self.next() == Some(Tok::Minus) {
                sign = -sign;
            }
        }
        match self.next() {
            Some(Tok::Num(v)) => Ok(sign * v),
            _ => Err(perr(self.line(), "expected a number")),
        }
    }
}

fn parse_bound(toks: &[(Tok, usize)], line: usize, b: &mut Builder) -> Result<(), ExactError> {
    let mut c = Cursor { toks, pos: 0 };
    let number_first = matches!(c.peek(), Some(Tok::Num(_) | Tok::Plus | Tok::Minus));
    if number_first {
        let lo = c.signed_number()?;
        let s1 = match c.next() {
            Some(Tok::Cmp(s)) => s,
            _ => return Err(perr(line, "expected a comparison")),
        };
        let name = match c.next() {
            Some(Tok::Name(n)) => n,
            _ => return Err(perr(line, "expected a variable")),
        };
        let v = b.id(&name);
        let entry = b.bounds.entry(v).or_insert((0.0, f64::INFINITY));
        match s1 {
            Sense::Le => entry.0 = lo,
            Sense::Ge => entry.1 = lo,
            Sense::Eq => *entry = (lo, lo),
        }
        if let Some(Tok::Cmp(s2)) = c.next() {
            let hi = c.signed_number()?;
            match s2 {
                Sense::Le => entry.1 = hi,
                Sense::Ge => entry.0 = hi,
                Sense::Eq => *entry = (hi, hi),
            }
        }
    } else {
        let name = match c.next() {
            Some(Tok::Name(n)) => n,
            _ => return Err(perr(line, "expected a variable")),
        };
        let v = b.id(&name);
        match c.next() {
            Some(Tok::Name(f)) if f.eq_ignore_ascii_case("free") => {
                b.bounds.insert(v, (f64::NEG_INFINITY, f64::INFINITY));
            }
            Some(Tok::Cmp(s)) => {
                let x = c.signed_number()?;
                let entry = b.bounds.entry(v).or_insert((0.0, f64::INFINITY));
                match s {
                    Sense::Le => entry.1 = x,
                    Sense::Ge => entry.0 = x,
                    Sense::Eq => *entry = (x, x),
                }
            }
            _ => return Err(perr(line, "malformed bound")),
        }
    }
    if c.pos < toks.len() {
        return Err(perr(line, "trailing tokens in bound"));
    }
    Ok(())
}

/// Parses LP text into a model. Variables are numbered by first appearance.
pub fn parse_lp(text: &str) -> Result<MilpModel, ExactError> {
    let mut section = Section::Preamble;
    let mut objective_toks = Vec::new();
    let mut row_toks = Vec::new();
    let mut bound_lines = Vec::new();
    let mut typed: Vec<(String, bool)> = Vec::new();
    let mut b = Builder::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('\\').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if let Some(s) = header(content) {
            section = s;
            continue;
        }
        match section {
            Section::Preamble => return Err(perr(line, "content before the objective section")),
            Section::End => return Err(perr(line, "content after End")),
            Section::Objective => tokenize(content, line, &mut objective_toks)?,
            Section::Constraints => tokenize(content, line, &mut row_toks)?,
            Section::Bounds => {
                let mut toks = Vec::new();
                tokenize(content, line, &mut toks)?;
                bound_lines.push((toks, line));
            }
            Section::Generals | Section::Binaries => {
                for name in content.split_whitespace() {
                    typed.push((name.to_string(), section == Section::Binaries));
                }
            }
        }
    }
    if section != Section::End {
        return Err(perr(text.lines().count(), "missing End"));
    }

    let mut c = Cursor {
        toks: &objective_toks,
        pos: 0,
    };
    c.label();
    let z1 = c.expr(&mut b)?;
    if c.pos < objective_toks.len() {
        return Err(perr(c.line(), "unexpected token in objective"));
    }

    let mut rows = Vec::new();
    let mut c = Cursor { toks: &row_toks, pos: 0 };
    while c.pos < row_toks.len() {
        let name = c.label().unwrap_or_else(|| format!("R{}", rows.len() + 1));
        let terms = c.expr(&mut b)?;
        let sense = match c.next() {
            Some(Tok::Cmp(s)) => s,
            _ => return Err(perr(c.line(), "expected a comparison")),
        };
        let rhs = c.signed_number()?;
        rows.push((name, terms, sense, rhs));
    }

    for (toks, line) in &bound_lines {
        parse_bound(toks, *line, &mut b)?;
    }
    for (name, binary) in typed {
        let v = b.id(&name);
        if binary {
            b.binaries.insert(v);
        } else {
            b.generals.insert(v);
        }
    }

    let mut model = MilpModel::new();
    for (i, name) in b.order.iter().enumerate() {
        let kind = if b.binaries.contains(&i) {
            VarKind::Binary
        } else if b.generals.contains(&i) {
            VarKind::Integer
        } else {
            VarKind::Continuous
        };
        let (lb, ub) = b.bounds.get(&i).copied().unwrap_or((0.0, f64::INFINITY));
        model.add_var(name.clone(), kind, lb, ub).map_err(|e| perr(0, e.to_string()))?;
    }
    model.set_objective(0, z1);
    for (name, terms, sense, rhs) in rows {
        if name == EMISSION_ROW {
            model.set_objective(1, terms);
        } else {
            model.add_constraint(name, terms, sense, rhs);
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> MilpModel {
        let mut m = MilpModel::new();
        let x = m.add_var("x_0", VarKind::Binary, 0.0, 1.0).unwrap();
        let n = m.add_var("n_0", VarKind::Integer, 0.0, 4.0).unwrap();
        let q = m.add_var("q_0", VarKind::Continuous, 0.0, 1234.5).unwrap();
        let f = m.add_var("free_0", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        m.add_constraint("link", [(n, 1.0), (x, -4.0)], Sense::Le, 0.0);
        m.add_constraint("qty", [(q, 1.0), (n, -1e-7), (f, 2.5e20)], Sense::Ge, -3.25);
        m.add_constraint("fix", [(f, 1.0)], Sense::Eq, 0.1);
        m.set_objective(0, [(x, 800.0), (q, 0.1 + 0.2)]);
        m.set_objective(1, [(n, 3.0)]);
        m
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -2.5, 0.1 + 0.2, 1e30, 1e-7, 6.02e23, f64::MIN_POSITIVE, 123456.789] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_number(1e30), "1e30");
        assert_eq!(format_number(42.0), "42");
    }

    #[test]
    fn sections_in_order() {
        let text = to_lp_string(&small(), None);
        let pos = |h: &str| text.find(&format!("\n{h}\n")).unwrap_or_else(|| panic!("{h}"));
        let order = ["Minimize", "Subject To", "Bounds", "Generals", "Binaries", "End"].map(pos);
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("z2_cap: 3 n_0 <= 1e30"));
        assert!(text.contains(" free_0 free"));
        assert!(text.contains(" 0 <= n_0 <= 4"));
    }

    #[test]
    fn parse_round_trip() {
        let m = small();
        let back = parse_lp(&to_lp_string(&m, None)).unwrap();
        assert_eq!(canonical(&back), canonical(&m));
    }

    type Named = Vec<(String, f64)>;

    /// Name-keyed view of a model, independent of variable numbering.
    fn canonical(m: &MilpModel) -> (Vec<super::super::model::Variable>, Vec<(String, Named, Sense, f64)>, [Named; 2]) {
        let named = |t: &Terms| -> Named { t.iter().map(|&(v, c)| (m.variables[v].name.clone(), c)).collect() };
        let mut vars = m.variables.clone();
        vars.sort_by(|a, b| a.name.cmp(&b.name));
        let rows = m.constraints.iter().map(|c| (c.name.clone(), named(&c.terms), c.sense, c.rhs)).collect();
        (vars, rows, [named(&m.objectives[0]), named(&m.objectives[1])])
    }

    #[test]
    fn long_rows_wrap() {
        let mut m = MilpModel::new();
        let vs: Vec<usize> = (0..200)
            .map(|i| m.add_var(format!("a_long_variable_name_{i}"), VarKind::Continuous, 0.0, 1.0).unwrap())
            .collect();
        m.add_constraint("wide", vs.iter().map(|&v| (v, 1.5)), Sense::Le, 10.0);
        let text = to_lp_string(&m, Some(5.0));
        assert!(text.lines().all(|l| l.len() <= LINE_WIDTH));
        let back = parse_lp(&text).unwrap();
        assert_eq!(canonical(&back), canonical(&m));
    }

    #[test]
    fn empty_model_is_valid() {
        let text = to_lp_string(&MilpModel::new(), None);
        assert!(text.contains("Minimize") && text.trim_end().ends_with("End"));
        let back = parse_lp(&text).unwrap();
        assert!(back.constraints.is_empty());
    }

    #[test]
    fn full_model_round_trip() {
        use crate::exact::milp::{build_milp, DEFAULT_SUBSET_CAP};
        use crate::instance::{Instance, SizeSpec};
        let inst = Instance::generate(SizeSpec::new(2, 3, 2, 2), 9).unwrap();
        let m = build_milp(&inst, DEFAULT_SUBSET_CAP, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.lp");
        export_lp(&m, &path, None).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.lines().all(|l| l.len() <= LINE_WIDTH));
        let back = parse_lp(&text).unwrap();
        assert_eq!(canonical(&back), canonical(&m));
        assert!(export_lp(&m, &dir.path().join("missing").join("x.lp"), None).is_err());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = parse_lp("Minimize\n obj: x\nSubject To\n c: x <= \nEnd\n").unwrap_err();
        assert!(matches!(err, ExactError::LpParse { .. }), "{err}");
        assert!(parse_lp("garbage\n").is_err());
        assert!(parse_lp("Minimize\n obj: 2 x\nSubject To\n").is_err());
        assert!(parse_lp("Minimize\n obj: 3 + x\nEnd\n").is_err());
    }

    #[test]
    fn implicit_coefficients_and_defaults() {
        let m = parse_lp("Minimize\n obj: x - y\nSubject To\n c1: x + y >= 1\nBounds\n y <= 5\nEnd\n").unwrap();
        assert_eq!(m.variables[0].ub, f64::INFINITY);
        assert_eq!(m.variables[1].ub, 5.0);
        assert_eq!(m.objectives[0], vec![(0, 1.0), (1, -1.0)]);
        assert_eq!(m.constraints[0].rhs, 1.0);
    }
}
