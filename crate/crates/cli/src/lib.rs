//! Command implementations for the `polybern` binary. Every command returns
//! the full text for stdout plus an exit code, so the binary stays a thin
//! wrapper and the rendering can be tested without spawning a process.

use std::fmt;

use clap::ValueEnum;
use polybern_core::{
    Engine, Error as CoreError, IdentityId, IndexVector, PowerExpansion, RangeSpec, Rational,
    VerificationReport,
};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Plain,
    Json,
    Csv,
    Markdown,
}

/// Rendered command output. `code` is 0 or 1; usage problems are reported
/// through [`UsageError`] instead.
#[derive(Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

/// Bad input from the command line. The binary maps this to exit status 2.
#[derive(Debug, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<CoreError> for UsageError {
    fn from(e: CoreError) -> Self {
        UsageError(e.to_string())
    }
}

pub type CmdResult = Result<Output, UsageError>;

/// A header row plus data rows, rendered in any of the output formats.
struct Grid {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Grid {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Grid {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn widths(&self) -> Vec<usize> {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        widths
    }

    /// First column left-aligned, the rest right-aligned.
    fn plain(&self) -> String {
        let widths = self.widths();
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| {
                    if c == 0 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        for row in &self.rows {
            out += &line(row);
        }
        out
    }

    fn csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(&self.header)
            .expect("writing to memory");
        for row in &self.rows {
            writer.write_record(row).expect("writing to memory");
        }
        String::from_utf8(writer.into_inner().expect("flush to memory"))
            .expect("csv output is utf-8")
    }

    fn markdown(&self) -> String {
        let widths: Vec<usize> = self.widths().into_iter().map(|w| w.max(3)).collect();
        let escape = |s: &String| s.replace('|', "\\|");
        let mut out = String::new();
        let header: Vec<String> = self
            .header
            .iter()
            .zip(&widths)
            .map(|(h, &w)| format!("{:<w$}", escape(h)))
            .collect();
        out += &format!("| {} |\n", header.join(" | "));
        let rule: Vec<String> = widths
            .iter()
            .enumerate()
            .map(|(c, &w)| {
                let dashes = "-".repeat(w - 1);
                if c == 0 {
                    format!(":{dashes}")
                } else {
                    format!("{dashes}:")
                }
            })
            .collect();
        out += &format!("| {} |\n", rule.join(" | "));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| {
                    if c == 0 {
                        format!("{:<w$}", escape(cell))
                    } else {
                        format!("{:>w$}", escape(cell))
                    }
                })
                .collect();
            out += &format!("| {} |\n", cells.join(" | "));
        }
        out
    }

    fn render(&self, format: Format, json: impl FnOnce() -> Value) -> String {
        match format {
            Format::Plain => self.plain(),
            Format::Csv => self.csv(),
            Format::Markdown => self.markdown(),
            Format::Json => to_json(&json()),
        }
    }
}

fn to_json(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json values always serialize") + "\n"
}

pub fn cmd_value(n: u32, k: i64, format: Format) -> CmdResult {
    let value = Engine::global().pb(n, k);
    let text = match format {
        Format::Plain => format!("{value}\n"),
        _ => {
            let mut grid = Grid::new(["n", "k", "value"]);
            grid.push(vec![n.to_string(), k.to_string(), value.to_string()]);
            grid.render(format, || json!({ "n": n, "k": k, "value": value }))
        }
    };
    Ok(Output::ok(text))
}

/// Parses `"k1,k2,..."`, with optional surrounding parentheses.
pub fn parse_indices(s: &str) -> Result<IndexVector, UsageError> {
    if s.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .trim()
        .is_empty()
    {
        return Err(UsageError("index list is empty".into()));
    }
    s.parse::<IndexVector>()
        .map_err(|e| UsageError(format!("bad index list `{s}`: {e}")))
}

/// Parses `"k1,k2,..."` as nonnegative magnitudes.
pub fn parse_magnitudes(s: &str) -> Result<Vec<u32>, UsageError> {
    if s.trim().is_empty() {
        return Err(UsageError("magnitude list is empty".into()));
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| UsageError(format!("`{}` is not a nonnegative integer", part.trim())))
        })
        .collect()
}

pub fn cmd_multi(indices: &str, n: u32, format: Format) -> CmdResult {
    let indices = parse_indices(indices)?;
    let (value, route) = Engine::global().mpb_with_route(n, &indices);
    let text = match format {
        Format::Plain => format!("{value}\n"),
        _ => {
            let mut grid = Grid::new(["indices", "n", "value", "route"]);
            grid.push(vec![
                indices.to_string(),
                n.to_string(),
                value.to_string(),
                route.to_string(),
            ]);
            grid.render(
                format,
                || json!({ "indices": indices.entries(), "n": n, "value": value, "route": route }),
            )
        }
    };
    Ok(Output::ok(text))
}

fn expansion_grid(expansion: &PowerExpansion) -> Grid {
    let mut grid = Grid::new(["l", "base", "coefficient"]);
    for (&l, c) in &expansion.terms {
        grid.push(vec![
            l.to_string(),
            (l + expansion.base_offset).to_string(),
            c.to_string(),
        ]);
    }
    grid
}

fn expansion_json(expansion: &PowerExpansion) -> Value {
    let terms: Vec<Value> = expansion
        .terms
        .iter()
        .map(|(&l, c)| json!({ "l": l, "base": l + expansion.base_offset, "coefficient": c.to_string() }))
        .collect();
    json!({ "expansion": expansion.to_string(), "terms": terms })
}

pub fn cmd_alpha(magnitudes: &str, format: Format) -> CmdResult {
    let magnitudes = parse_magnitudes(magnitudes)?;
    if magnitudes.iter().all(|&k| k == 0) {
        return Err(UsageError(format!(
            "all-zero index vector: B_n is simply {}^n and has no alpha expansion",
            magnitudes.len() + 1
        )));
    }
    let alpha = Engine::global().alpha_coefficients(&magnitudes)?;
    let expansion = alpha.expansion();
    let indices = IndexVector::from_magnitudes(&magnitudes)?;
    let text = match format {
        Format::Plain => format!("{expansion}\n"),
        Format::Json => {
            let mut doc = expansion_json(&expansion);
            doc["indices"] = json!(indices.entries());
            to_json(&doc)
        }
        _ => expansion_grid(&expansion).render(format, || unreachable!()),
    };
    Ok(Output::ok(text))
}

/// Expansions listed in the first table, grouped by length. `(-1,-1)` is
/// included in its natural place in the length-2 block.
pub const TABLE1_MAGNITUDES: [&[u32]; 31] = [
    &[1],
    &[2],
    &[3],
    &[0, 1],
    &[1, 0],
    &[0, 2],
    &[2, 0],
    &[1, 1],
    &[0, 3],
    &[1, 2],
    &[2, 1],
    &[3, 0],
    &[0, 0, 1],
    &[0, 1, 0],
    &[1, 0, 0],
    &[0, 0, 2],
    &[0, 2, 0],
    &[2, 0, 0],
    &[0, 1, 1],
    &[1, 0, 1],
    &[1, 1, 0],
    &[0, 0, 3],
    &[0, 3, 0],
    &[3, 0, 0],
    &[0, 1, 2],
    &[0, 2, 1],
    &[1, 0, 2],
    &[1, 2, 0],
    &[2, 0, 1],
    &[2, 1, 0],
    &[1, 1, 1],
];

/// Row indices of the single-index table, top to bottom.
pub const TABLE2_K: std::ops::RangeInclusive<i64> = -5..=5;

/// Row indices of the two-index table, top to bottom.
pub const TABLE3_INDICES: [[i64; 2]; 7] =
    [[1, 1], [1, 0], [0, 1], [0, 0], [0, -1], [-1, 0], [-1, -1]];

/// Columns `n = 0..=TABLE_MAX_N` of the value tables.
pub const TABLE_MAX_N: u32 = 7;

fn n_header(first: &str) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain((0..=TABLE_MAX_N).map(|n| format!("n={n}")))
        .collect()
}

fn table1(format: Format) -> String {
    let engine = Engine::global();
    let rows: Vec<(usize, IndexVector, PowerExpansion)> = TABLE1_MAGNITUDES
        .iter()
        .map(|mags| {
            let indices = IndexVector::from_magnitudes(mags).expect("table entries are nonempty");
            let expansion = engine
                .alpha_coefficients(mags)
                .expect("table entries are not all zero")
                .expansion();
            (mags.len(), indices, expansion)
        })
        .collect();
    match format {
        Format::Plain => {
            let mut out = String::new();
            let mut current = 0;
            for (r, indices, expansion) in &rows {
                if *r != current {
                    if current != 0 {
                        out.push('\n');
                    }
                    out += &format!("r = {r}\n");
                    current = *r;
                }
                out += &format!("B_n^{indices} = {expansion}\n");
            }
            out
        }
        Format::Json => {
            let doc: Vec<Value> = rows
                .iter()
                .map(|(r, indices, expansion)| {
                    let mut entry = expansion_json(expansion);
                    entry["r"] = json!(r);
                    entry["indices"] = json!(indices.entries());
                    entry
                })
                .collect();
            to_json(&Value::Array(doc))
        }
        _ => {
            let mut grid = Grid::new(["r", "indices", "expansion"]);
            for (r, indices, expansion) in &rows {
                grid.push(vec![
                    r.to_string(),
                    indices.to_string(),
                    expansion.to_string(),
                ]);
            }
            grid.render(format, || unreachable!())
        }
    }
}

fn value_table(format: Format, label: &str, rows: Vec<(String, Value, Vec<Rational>)>) -> String {
    let mut grid = Grid::new(n_header(label));
    for (name, _, values) in &rows {
        grid.push(
            std::iter::once(name.clone())
                .chain(values.iter().map(ToString::to_string))
                .collect(),
        );
    }
    grid.render(format, || {
        let doc: Vec<Value> = rows
            .iter()
            .map(|(_, key, values)| json!({ label: key, "values": values }))
            .collect();
        Value::Array(doc)
    })
}

pub fn cmd_table(which: u32, format: Format) -> CmdResult {
    let engine = Engine::global();
    let text = match which {
        1 => table1(format),
        2 => {
            let rows = TABLE2_K
                .map(|k| {
                    (
                        k.to_string(),
                        json!(k),
                        (0..=TABLE_MAX_N).map(|n| engine.pb(n, k)).collect(),
                    )
                })
                .collect();
            value_table(format, "k", rows)
        }
        3 => {
            let rows = TABLE3_INDICES
                .iter()
                .map(|pair| {
                    let indices = IndexVector::new(pair.to_vec()).expect("nonempty");
                    let values = (0..=TABLE_MAX_N).map(|n| engine.mpb(n, &indices)).collect();
                    (indices.to_string(), json!(pair), values)
                })
                .collect();
            value_table(format, "indices", rows)
        }
        other => {
            return Err(UsageError(format!(
                "unknown table `{other}`; expected 1, 2 or 3"
            )))
        }
    };
    Ok(Output::ok(text))
}

/// Optional overrides for the default verification range.
#[derive(Clone, Debug, Default)]
pub struct RangeOverrides {
    pub max_n: Option<u32>,
    pub max_k: Option<u32>,
    pub max_r: Option<u32>,
    pub max_m: Option<u32>,
    pub max_i: Option<u32>,
    pub cap: Option<u32>,
}

impl RangeOverrides {
    pub fn apply(&self) -> RangeSpec {
        let mut range = RangeSpec::default();
        let fields = [
            (&mut range.max_n, self.max_n),
            (&mut range.max_k, self.max_k),
            (&mut range.max_r, self.max_r),
            (&mut range.max_m, self.max_m),
            (&mut range.max_i, self.max_i),
            (&mut range.cap, self.cap),
        ];
        for (slot, value) in fields {
            if let Some(v) = value {
                *slot = v;
            }
        }
        range
    }
}

fn kind(id: IdentityId) -> &'static str {
    if id.is_conjecture() {
        "conjecture"
    } else {
        "theorem"
    }
}

/// Exit status for a batch of reports: 1 if a theorem failed, or if a
/// conjecture failed and `strict` is set.
pub fn exit_code(reports: &[VerificationReport], strict: bool) -> u8 {
    let failed = reports
        .iter()
        .any(|r| !r.passed && (strict || !r.identity.is_conjecture()));
    u8::from(failed)
}

const SHOWN_COUNTEREXAMPLES: usize = 10;

fn render_reports(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Plain => {
            let mut out = String::new();
            for report in reports {
                let status = if report.passed { "PASS" } else { "FAIL" };
                out += &format!(
                    "{status} {} ({}) cases={}\n",
                    report.identity,
                    kind(report.identity),
                    report.cases
                );
                for cx in report.counterexamples.iter().take(SHOWN_COUNTEREXAMPLES) {
                    let params: Vec<String> = cx
                        .params
                        .iter()
                        .map(|(k, v)| {
                            format!("{k}={}", serde_json::to_value(v).expect("params serialize"))
                        })
                        .collect();
                    out += &format!(
                        "  {}: lhs={} rhs={}\n",
                        params.join(" ").replace('"', ""),
                        cx.lhs,
                        cx.rhs
                    );
                }
                if report.counterexamples.len() > SHOWN_COUNTEREXAMPLES {
                    out += &format!(
                        "  ... {} more\n",
                        report.counterexamples.len() - SHOWN_COUNTEREXAMPLES
                    );
                }
            }
            out
        }
        Format::Json => serde_json::to_string_pretty(reports).expect("reports serialize") + "\n",
        _ => {
            let mut grid = Grid::new(["identity", "kind", "cases", "passed", "counterexamples"]);
            for r in reports {
                grid.push(vec![
                    r.identity.to_string(),
                    kind(r.identity).to_string(),
                    r.cases.to_string(),
                    r.passed.to_string(),
                    r.counterexamples.len().to_string(),
                ]);
            }
            grid.render(format, || unreachable!())
        }
    }
}

/// `ids` holds identity ids, or the single word `all`. Explicit ids must fit
/// the range as given; `all` raises each identity's range to its minimum.
pub fn cmd_verify(
    ids: &[String],
    overrides: &RangeOverrides,
    strict: bool,
    format: Format,
) -> CmdResult {
    if ids.is_empty() {
        return Err(UsageError(
            "no identity ids given; pass ids or `all`".into(),
        ));
    }
    let range = overrides.apply();
    let engine = Engine::global();
    let reports = if ids.iter().any(|id| id == "all") {
        if ids.len() > 1 {
            return Err(UsageError("`all` cannot be combined with other ids".into()));
        }
        engine.verify_all(&range)
    } else {
        let parsed = ids
            .iter()
            .map(|s| s.parse::<IdentityId>())
            .collect::<Result<Vec<_>, _>>()?;
        for &id in &parsed {
            range.check_for(id)?;
        }
        parsed
            .iter()
            .map(|&id| engine.verify(id, &range))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(Output {
        text: render_reports(&reports, format),
        code: exit_code(&reports, strict),
    })
}

fn join_ints<T: ToString>(values: &[T], sep: &str) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

pub fn cmd_conjecture(
    max_k: u32,
    max_r: u32,
    max_n: u32,
    strict: bool,
    format: Format,
) -> CmdResult {
    if max_r == 0 || max_k <= max_r {
        return Err(UsageError(format!(
            "need 1 <= max_r < max_k, got max_k={max_k} max_r={max_r}"
        )));
    }
    let engine = Engine::global();
    let report = engine.check_triangle_conjecture(max_k, max_r, max_n)?;
    let failed_at = |k: u32, r: u32| {
        report.counterexamples.iter().any(|cx| {
            cx.params.get("k") == Some(&i64::from(k).into())
                && cx.params.get("r") == Some(&i64::from(r).into())
        })
    };

    let mut triangles = Vec::new();
    let mut grid = Grid::new(["k", "r", "triangle_row", "coefficients", "holds"]);
    let mut cases = Vec::new();
    for r in 1..=max_r {
        let triangle = engine.conjecture_triangle(r, max_k - r - 1)?;
        for k in r + 1..=max_k {
            let coeffs = engine.conjecture_coefficients(k, r)?;
            let all: Vec<_> = coeffs.zeros.iter().chain(&coeffs.trailing).collect();
            let row = &triangle.rows[(k - r - 1) as usize];
            let holds = !failed_at(k, r);
            grid.push(vec![
                k.to_string(),
                r.to_string(),
                join_ints(row, " "),
                format!("({})", join_ints(&all, ", ")),
                holds.to_string(),
            ]);
            cases.push(json!({
                "k": k,
                "r": r,
                "triangle_row": row.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "coefficients": all.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "holds": holds,
            }));
        }
        triangles.push(triangle);
    }

    let text = match format {
        Format::Plain => {
            let mut out = String::new();
            for t in &triangles {
                out += &format!("triangle r={}\n", t.r);
                for (j, row) in t.rows.iter().enumerate() {
                    out += &format!("  j={j}: {}\n", join_ints(row, " "));
                }
            }
            out.push('\n');
            out += &grid.plain();
            let status = if report.passed { "holds" } else { "FAILS" };
            out += &format!("\nconjecture {status} for 1 <= r < k <= {max_k}, r <= {max_r}, n <= {max_n} ({} cases)\n", report.cases);
            out
        }
        Format::Json => {
            let triangles: Vec<Value> = triangles
                .iter()
                .map(|t| {
                    let rows: Vec<Vec<String>> = t
                        .rows
                        .iter()
                        .map(|row| row.iter().map(ToString::to_string).collect())
                        .collect();
                    json!({ "r": t.r, "rows": rows })
                })
                .collect();
            to_json(&json!({
                "max_k": max_k,
                "max_r": max_r,
                "max_n": max_n,
                "triangles": triangles,
                "cases": cases,
                "report": report,
            }))
        }
        _ => grid.render(format, || unreachable!()),
    };
    let code = u8::from(strict && !report.passed);
    Ok(Output { text, code })
}
