//! TOML input files: a p/q series pair, a single series, simple-pole data
//! {phi, psi}, or a second-order potential. Bad coefficients are reported
//! with line and column.

use std::fmt;

use serde::Deserialize;
use toml::Spanned;

use akns::algebra::GaussRat;
use akns::gapcheck::PotentialPoleData;
use akns::poles::PoleData;
use akns::series::Laurent;

#[derive(Debug)]
pub struct InputError {
    pub message: String,
    /// 1-based position in the source, when known.
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl InputError {
    fn plain(message: impl Into<String>) -> Self {
        InputError {
            message: message.into(),
            line: None,
            column: None,
        }
    }

    fn at_offset(source: &str, offset: usize, message: impl Into<String>) -> Self {
        let (line, column) = line_col(source, offset);
        InputError {
            message: message.into(),
            line: Some(line),
            column: Some(column),
        }
    }
}

fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let clamped = offset.min(source.len());
    let before = &source[..clamped];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map(|p| clamped - p)
        .unwrap_or(clamped + 1);
    (line, column)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesFile {
    min_order: i64,
    coeffs: Vec<Spanned<String>>,
    #[allow(dead_code)]
    var: Option<String>,
    #[allow(dead_code)]
    center: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    p: SeriesFile,
    q: SeriesFile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoleFile {
    phi: Vec<Spanned<String>>,
    psi: Vec<Spanned<String>>,
}

/// What a file turned out to contain.
#[derive(Debug)]
pub enum Input {
    Pair(Laurent<GaussRat>, Laurent<GaussRat>),
    Pole(PoleData),
    Potential(PotentialPoleData),
    Series,
}

fn coeffs_of(
    source: &str,
    raw: &[Spanned<String>],
    what: &str,
) -> Result<Vec<GaussRat>, InputError> {
    if raw.is_empty() {
        return Err(InputError::plain(format!(
            "{what}: empty coefficient list; simple pole required"
        )));
    }
    raw.iter()
        .map(|s| {
            s.get_ref().parse::<GaussRat>().map_err(|e| {
                InputError::at_offset(source, s.span().start, format!("{what}: {e}"))
            })
        })
        .collect()
}

fn series_of(source: &str, file: &SeriesFile, what: &str) -> Result<Laurent<GaussRat>, InputError> {
    let coeffs = coeffs_of(source, &file.coeffs, what)?;
    Ok(Laurent::from_parts(file.min_order, coeffs))
}

pub fn parse_input(source: &str) -> Result<Input, InputError> {
    let table: toml::Table = source
        .parse()
        .map_err(|e: toml::de::Error| match e.span() {
            Some(span) => InputError::at_offset(source, span.start, e.message().to_string()),
            None => InputError::plain(e.message().to_string()),
        })?;

    let structural = |e: toml::de::Error| match e.span() {
        Some(span) => InputError::at_offset(source, span.start, e.message().to_string()),
        None => InputError::plain(e.message().to_string()),
    };

    if table.contains_key("phi") || table.contains_key("psi") {
        let file: PoleFile = toml::from_str(source).map_err(structural)?;
        let phi = coeffs_of(source, &file.phi, "phi")?;
        let psi = coeffs_of(source, &file.psi, "psi")?;
        let data = PoleData::new(phi, psi).map_err(|e| InputError::plain(e.to_string()))?;
        return Ok(Input::Pole(data));
    }
    if table.contains_key("p") || table.contains_key("q") {
        let file: PairFile = toml::from_str(source).map_err(structural)?;
        let p = series_of(source, &file.p, "p")?;
        let q = series_of(source, &file.q, "q")?;
        return Ok(Input::Pair(p, q));
    }
    let file: SeriesFile = toml::from_str(source).map_err(structural)?;
    let series = series_of(source, &file, "series")?;
    if file.min_order == -2 {
        let u = PotentialPoleData::from_series(&series)
            .map_err(|e| InputError::plain(e.to_string()))?;
        return Ok(Input::Potential(u));
    }
    Ok(Input::Series)
}

impl Input {
    /// View as a (p, q) pair when the shapes allow it.
    pub fn into_pair(self) -> Result<(Laurent<GaussRat>, Laurent<GaussRat>), InputError> {
        match self {
            Input::Pair(p, q) => Ok((p, q)),
            Input::Pole(d) => {
                let (p, q) = d.to_series();
                Ok((p, q))
            }
            Input::Series | Input::Potential(_) => Err(InputError::plain(
                "this command needs a p/q pair (tables [p] and [q]) or pole data {phi, psi}",
            )),
        }
    }

    pub fn into_pole(self) -> Result<PoleData, InputError> {
        match self {
            Input::Pole(d) => Ok(d),
            Input::Pair(p, q) => {
                PoleData::from_series(&p, &q).map_err(|e| InputError::plain(e.to_string()))
            }
            Input::Series | Input::Potential(_) => Err(InputError::plain(
                "this command needs pole data {phi, psi} or a p/q pair",
            )),
        }
    }

    pub fn into_potential(self) -> Result<PotentialPoleData, InputError> {
        match self {
            Input::Potential(u) => Ok(u),
            _ => Err(InputError::plain(
                "this command needs a potential series with min_order = -2",
            )),
        }
    }
}

/// `--constants 0,-1/4` style lists.
pub fn parse_constants(text: &str) -> Result<Vec<GaussRat>, InputError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<GaussRat>()
                .map_err(|e| InputError::plain(format!("constant {piece:?}: {e}")))
        })
        .collect()
}

/// Render a pair in the input format (used by `example` so its output can
/// be piped straight back in).
pub fn render_pair(p: &Laurent<GaussRat>, q: &Laurent<GaussRat>) -> String {
    let mut out = String::new();
    for (name, s) in [("p", p), ("q", q)] {
        out.push_str(&format!("[{name}]\n"));
        let min = s.min_order().unwrap_or(0).min(0);
        out.push_str(&format!("min_order = {min}\n"));
        out.push_str("coeffs = [");
        for (i, k) in (min..=s.cutoff()).enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{:?}", s.coeff(k).to_string()));
        }
        out.push_str("]\n");
        out.push_str("var = \"x\"\ncenter = \"0\"\n");
        if name == "p" {
            out.push('\n');
        }
    }
    out
}
