use std::fmt::Write as _;
use std::path::Path;

use conley_core::algebra::ring::{Ring, RingElem};
use conley_core::flow::decomposition::validate_regime;
use conley_core::homology::complex::{homology_novikov, homology_z, BoundaryReport, PChainComplex};
use conley_core::homology::matrix::RingMatrix;
use conley_core::novikov_pipeline::{
    build_morse_complex, build_novikov_complex, check_unrolled, compare_tower_limit, to_decomposition,
    truncation_tower, CircleMorseData,
};
use conley_core::pconnection::assembly::{assemble_ndelta, project_classical, PConnectionMatrix};
use conley_core::schema::{self, decode_reference, encode_pconnection, encode_series, parse_document, Document};
use conley_core::{Error, Result};
use serde_json::{json, Value};

use crate::{Command, Format, RunArgs};

pub struct Outcome {
    pub status: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Text and JSON views of one command's result.
struct Section {
    lines: Vec<String>,
    json: Value,
    status: u8,
}

impl Section {
    fn new(json: Value) -> Self {
        Section { lines: Vec::new(), json, status: 0 }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn fail(&mut self) {
        self.status = self.status.max(1);
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Schema(_) => 2,
        Error::InsufficientPrecision(_) => 3,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        2 => "parse",
        3 => "precision",
        _ => "semantic",
    }
}

fn error_json(e: &Error) -> Value {
    json!({"error": {"kind": error_kind(e), "message": e.to_string()}})
}

pub fn run(command: Command, args: &RunArgs) -> Outcome {
    let result = load(&args.input).and_then(|doc| match command {
        Command::Validate => validate(&doc, args),
        Command::Assemble => assemble(&doc, args),
        Command::Project => project(&doc, args),
        Command::Homology => homology(&doc, args),
        Command::Tower => tower(&doc, args),
        Command::Report => Ok(report(&doc, args)),
    });
    match result {
        Ok(section) => {
            let stdout = match args.format {
                Format::Human => section.lines.iter().fold(String::new(), |mut s, l| {
                    let _ = writeln!(s, "{l}");
                    s
                }),
                Format::Json => pretty(&section.json),
            };
            Outcome { status: section.status, stdout, stderr: String::new() }
        }
        Err(e) => match args.format {
            Format::Human => Outcome { status: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
            Format::Json => Outcome { status: exit_code(&e), stdout: pretty(&error_json(&e)), stderr: String::new() },
        },
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Document> {
    parse_document(&read(path)?).map_err(|e| match e {
        Error::Schema(m) => Error::Schema(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn wrong_input(command: &str, doc: &Document) -> Error {
    Error::Schema(format!("`{command}` does not accept a {} document", doc.type_name()))
}

fn ndelta(doc: &Document, precision: usize, command: &str) -> Result<PConnectionMatrix> {
    match doc {
        Document::Decomposition(d) => assemble_ndelta(&d.decomposition, precision),
        Document::CircleMorse(c) => assemble_ndelta(&to_decomposition(c)?, precision),
        Document::PConnection(m) => Ok(m.clone()),
        other => Err(wrong_input(command, other)),
    }
}

fn entry_lines(m: &PConnectionMatrix) -> Vec<String> {
    m.nonzero_entries()
        .into_iter()
        .map(|(_, _, row, col, v)| format!("({col} → {row}): {}", m.ring().display(&v)))
        .collect()
}

fn matrix_lines(m: &RingMatrix) -> Vec<String> {
    let mut entries: Vec<(usize, usize, &RingElem)> = m.entries().collect();
    entries.sort_by_key(|&(i, j, _)| (j, i));
    entries.into_iter().map(|(i, j, v)| format!("({} → {}): {}", m.cols()[j], m.rows()[i], m.ring().display(v))).collect()
}

fn square_lines(report: &BoundaryReport, name: &str) -> Vec<String> {
    let offenders: Vec<_> = report.offenders().collect();
    match offenders.first() {
        None => vec![format!("{name} ∘ {name} = 0")],
        Some((_, o)) => vec![format!(
            "{name} ∘ {name} ≠ 0: entry ({}, {}) is {}{}",
            o.row,
            o.col,
            o.value,
            match offenders.len() {
                1 => String::new(),
                n => format!(" and {} more entries are nonzero", n - 1),
            }
        )],
    }
}

fn validate(doc: &Document, args: &RunArgs) -> Result<Section> {
    let mut s = Section::new(json!({}));
    match doc {
        Document::Decomposition(d) => {
            let dec = &d.decomposition;
            let report = validate_regime(dec)?;
            let name = d.name.as_deref().unwrap_or("unnamed");
            s.line(format!(
                "decomposition '{name}': group {}, regime {}, {} Morse sets, {} orbit records",
                report.group,
                report.regime,
                dec.sets().len(),
                dec.orbits().len()
            ));
            let p = dec.poset();
            let mut order: Vec<String> =
                p.relations().into_iter().map(|(a, b)| format!("{} < {}", p.elements()[a], p.elements()[b])).collect();
            order.sort();
            if !order.is_empty() {
                s.line(format!("order: {}", order.join(", ")));
            }
            for pair in &report.pairs {
                let buckets: Vec<String> =
                    pair.buckets.iter().map(|b| format!("{}: {}", b.label, b.signed_count)).collect();
                let mut l = format!("pair ({} → {}): {}", pair.pair.0, pair.pair.1, buckets.join(", "));
                if let Some(m) = &pair.min_label {
                    let _ = write!(l, "; least label {m}");
                }
                s.line(l);
            }
            for a in &report.advisories {
                s.line(format!("advisory: {a}"));
            }
            for v in &report.violations {
                s.line(format!("violation: {v}"));
            }
            if !report.ok() {
                s.fail();
            }
            s.json = json!({"type": "decomposition", "valid": report.ok(), "report": report});
        }
        Document::CircleMorse(c) => {
            build_novikov_complex(c, args.precision as usize)?;
            s.line(format!(
                "circle-valued Morse data: {} critical points, {} incidence records",
                c.points().len(),
                c.incidences().len()
            ));
            s.line("∂ ∘ ∂ = 0");
            s.json = json!({"type": "circle_morse", "valid": true});
        }
        Document::Morse(m) => {
            build_morse_complex(m)?;
            s.line(format!("Morse data: {} critical points, {} counts", m.points.len(), m.counts.len()));
            s.line("∂ ∘ ∂ = 0");
            s.json = json!({"type": "morse", "valid": true});
        }
        Document::PConnection(m) => {
            let report = m.complex().verify_boundary_squared();
            s.lines.extend(square_lines(&report, "N∆"));
            s.json = json!({"type": "pconnection", "valid": true, "boundary_squared": report});
        }
        Document::Matrix(m) => {
            s.line(format!("matrix over {}: {} × {}", m.ring().name(), m.nrows(), m.ncols()));
            s.json = json!({"type": "matrix", "valid": true});
        }
    }
    s.line(if s.status == 0 { "valid" } else { "invalid" });
    Ok(s)
}

fn assemble(doc: &Document, args: &RunArgs) -> Result<Section> {
    let m = ndelta(doc, args.precision as usize, "assemble")?;
    let artifact = encode_pconnection(&m);
    let mut s = Section::new(artifact.clone());
    if m.is_zero() {
        s.line("N∆ = 0");
    } else {
        s.line(format!("N∆ over {}:", m.ring().name()));
        s.lines.extend(entry_lines(&m));
    }
    s.lines.extend(square_lines(&m.complex().verify_boundary_squared(), "N∆"));
    if let Some(path) = &args.output {
        std::fs::write(path, pretty(&artifact))
            .map_err(|e| Error::Schema(format!("cannot write {}: {e}", path.display())))?;
        s.line(format!("wrote {}", path.display()));
    }
    Ok(s)
}

fn reference(doc: &Document, m: &PConnectionMatrix, args: &RunArgs) -> Result<Option<RingMatrix>> {
    let ids: Vec<String> = m.module().degrees().flat_map(|k| m.module().generators(k).to_vec()).collect();
    match &args.reference {
        Some(path) => {
            let text = read(path)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| {
                Error::Schema(format!("{}: invalid JSON: {e}", path.display()))
            })?;
            Ok(Some(decode_reference(&v, &ids, "$").map_err(|e| match e {
                Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
                other => other,
            })?))
        }
        None => Ok(match doc {
            Document::Decomposition(d) => d.reference.clone(),
            _ => None,
        }),
    }
}

fn project(doc: &Document, args: &RunArgs) -> Result<Section> {
    let m = ndelta(doc, args.precision as usize, "project")?;
    let reference = reference(doc, &m, args)?;
    let p = project_classical(&m, reference.as_ref())?;
    let mut s = Section::new(json!({
        "classical": schema::encode_matrix(&p.delta),
        "square_commutes": p.square_commutes,
        "matches_reference": p.matches_reference,
    }));
    if p.delta.is_zero() {
        s.line("ΠN∆ = 0");
    } else {
        s.line("ΠN∆ over Z:");
        s.lines.extend(matrix_lines(&p.delta));
    }
    s.line(if p.square_commutes { "Π(N∆²) = (ΠN∆)²" } else { "Π(N∆²) ≠ (ΠN∆)²" });
    match p.matches_reference {
        Some(true) => s.line("matches reference"),
        Some(false) => {
            s.line("differs from reference");
            s.fail();
        }
        None => s.line("no reference supplied"),
    }
    Ok(s)
}

fn complex_of(doc: &Document, precision: usize) -> Result<PChainComplex> {
    match doc {
        Document::CircleMorse(c) => build_novikov_complex(c, precision),
        Document::Morse(m) => build_morse_complex(m),
        _ => Ok(ndelta(doc, precision, "homology")?.complex()),
    }
}

fn homology_applies(doc: &Document, precision: usize) -> bool {
    match doc {
        Document::CircleMorse(_) | Document::Morse(_) => true,
        Document::Matrix(_) => false,
        _ => ndelta(doc, precision, "homology").is_ok_and(|m| !matches!(m.ring(), Ring::GroupRing(_))),
    }
}

fn homology(doc: &Document, args: &RunArgs) -> Result<Section> {
    let c = complex_of(doc, args.precision as usize)?;
    match c.ring() {
        Ring::Novikov { variable, .. } => {
            let h = homology_novikov(&c)?;
            let degrees: Vec<Value> = h
                .degrees
                .iter()
                .map(|(k, g)| {
                    json!({"degree": k, "rank": g.rank, "divisors": g.divisors.iter().map(encode_series).collect::<Vec<_>>()})
                })
                .collect();
            let mut s = Section::new(json!({
                "ring": c.ring().name(), "precision": h.precision, "zero": h.is_zero(), "degrees": degrees,
            }));
            if h.is_zero() {
                s.line(format!("H_k = 0 for all k (precision {})", h.precision));
            } else {
                let ring = c.ring().name();
                for (k, g) in &h.degrees {
                    let mut parts = Vec::new();
                    match g.rank {
                        0 => {}
                        1 => parts.push(ring.clone()),
                        r => parts.push(format!("{ring}^{r}")),
                    }
                    for d in &g.divisors {
                        parts.push(format!("{ring}/({})", d.display_with(variable)));
                    }
                    let body = if parts.is_empty() { "0".to_string() } else { parts.join(" ⊕ ") };
                    s.line(format!("H_{k} = {body}"));
                }
                s.line(format!("(precision {})", h.precision));
            }
            Ok(s)
        }
        Ring::Integer => {
            let h = homology_z(&c)?;
            let degrees: Vec<Value> = h
                .iter()
                .map(|(k, g)| {
                    json!({"degree": k, "betti": g.betti, "torsion": g.torsion.iter().map(schema::encode_int).collect::<Vec<_>>()})
                })
                .collect();
            let mut s = Section::new(json!({"ring": "Z", "degrees": degrees}));
            for (k, g) in &h {
                let mut parts = Vec::new();
                match g.betti {
                    0 => {}
                    1 => parts.push("Z".to_string()),
                    r => parts.push(format!("Z^{r}")),
                }
                for t in &g.torsion {
                    parts.push(format!("Z/{t}"));
                }
                let body = if parts.is_empty() { "0".to_string() } else { parts.join(" ⊕ ") };
                s.line(format!("H_{k} = {body}"));
            }
            if h.is_empty() {
                s.line("H_k = 0 for all k");
            }
            Ok(s)
        }
        Ring::GroupRing(g) => Err(Error::UnsupportedRegime(format!(
            "homology is computed over Z and Z((t)) only, not over Z[{}]",
            g.kind().name()
        ))),
    }
}

fn circle_data(doc: &Document) -> Result<CircleMorseData> {
    match doc {
        Document::CircleMorse(c) => Ok(c.clone()),
        Document::Decomposition(d) => CircleMorseData::from_decomposition(&d.decomposition),
        other => Err(wrong_input("tower", other)),
    }
}

fn tower(doc: &Document, args: &RunArgs) -> Result<Section> {
    let data = circle_data(doc)?;
    let top = args.levels;
    let t = truncation_tower(&data, top);
    let complex = build_novikov_complex(&data, args.precision as usize)?;
    let cmp = compare_tower_limit(&t, &complex)?;
    let mut s = Section::new(Value::Null);
    let mut levels = Vec::new();
    for lvl in &t.levels {
        s.line(format!("level {} over Z[t]/(t^{}):", lvl.level, lvl.level + 1));
        let mut entries = Vec::new();
        for (k, m) in &lvl.boundary {
            let mut cells: Vec<(usize, usize)> = m.entries().map(|(r, c, _)| (r, c)).collect();
            cells.sort_by_key(|&(r, c)| (c, r));
            for (r, c) in cells {
                let text = m.render_entry(r, c, "t");
                s.line(format!("  ({} → {}): {text}", m.cols[c], m.rows[r]));
                entries.push(json!({"degree": k, "row": m.rows[r], "col": m.cols[c], "value": text}));
            }
        }
        if entries.is_empty() {
            s.line("  0");
        }
        levels.push(json!({"level": lvl.level, "entries": entries}));
    }
    let coherent = t.coherent().is_none();
    s.line(if coherent { "projections commute at every level" } else { "projections do not commute" });
    match t.stabilization {
        Some(star) => s.line(format!("stabilization ℓ*={star}")),
        None => s.line(format!(
            "stabilization not reached: level {top} does not exceed the highest record level {}",
            data.max_level().unwrap_or(0)
        )),
    }
    if cmp.passed() {
        s.line(format!("limit check passed at levels 0..={top}"));
    } else {
        for m in &cmp.mismatches {
            s.line(format!("limit check failed at level {}: entry ({}, {}) in degree {}", m.level, m.row, m.col, m.degree));
        }
        s.fail();
    }
    let mut unrolled = true;
    for l in 0..=top {
        unrolled &= check_unrolled(&data, &t, l)?;
    }
    s.line(if unrolled { "unrolled W(ℓ) complexes agree" } else { "unrolled W(ℓ) complexes disagree" });
    if !coherent || !unrolled {
        s.fail();
    }
    s.json = json!({
        "levels": levels, "coherent": coherent, "stabilization": t.stabilization,
        "limit_check": cmp, "unrolled_check": unrolled,
    });
    Ok(s)
}

type Step = fn(&Document, &RunArgs) -> Result<Section>;

fn report(doc: &Document, args: &RunArgs) -> Section {
    let precision = args.precision as usize;
    let mut out = Section::new(json!({}));
    let mut steps: Vec<(&str, Step)> = vec![("validate", validate)];
    if !matches!(doc, Document::Morse(_) | Document::Matrix(_)) {
        steps.push(("assemble", assemble));
        steps.push(("project", project));
    }
    if homology_applies(doc, precision) {
        steps.push(("homology", homology));
    }
    if circle_data(doc).is_ok() {
        steps.push(("tower", tower));
    }
    let mut args = args.clone();
    args.output = None;
    for (name, step) in steps {
        out.line(format!("== {name} =="));
        match step(doc, &args) {
            Ok(s) => {
                out.lines.extend(s.lines);
                out.status = out.status.max(s.status);
                out.json[name] = s.json;
            }
            Err(e) => {
                out.line(format!("error: {e}"));
                out.status = out.status.max(exit_code(&e));
                out.json[name] = error_json(&e);
            }
        }
    }
    out
}
