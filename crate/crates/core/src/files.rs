//! On-disk formats: sequence files, classification reports and trajectory
//! tables.
//!
//! A sequence file is TOML with a version tag and either a family spec
//!
//! ```toml
//! format = "cauchy-sequence/1"
//!
//! [family]
//! kind = "power_law"      # power_law | geometric | constant
//! c = 1.0                 # amplitude, >= 0
//! p = 2.0                 # power_law only: chi_n = c * n^-p
//! # r = 0.5               # geometric only: chi_n = c * r^(n-1), 0 < r < 1
//! embedding = "location"  # location | scale
//! ```
//!
//! or explicit rows `[loc_z, scale_z, loc_w, scale_w]` with a mandatory
//! tail declaration:
//!
//! ```toml
//! format = "cauchy-sequence/1"
//! tail = "equal_after_n"  # or "family_continues" for an observed prefix
//! monotone_unbounded = false
//! rows = [
//!   [0.0, 2.0, 0.0, 1.0],
//!   [3.0, 4.0, 1.0, 2.0],
//! ]
//! ```

use std::fmt::{self, Write as _};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::dichotomy::{DichotomyReport, Embedding, Generator, ParamSequencePair, TailDeclaration};
use crate::halfplane::UHPoint;
use crate::montecarlo::TrajectoryBatch;

pub const SEQUENCE_FORMAT: &str = "cauchy-sequence/1";
pub const REPORT_SCHEMA: &str = "cauchy-dichotomy-report/1";
pub const TRAJECTORY_HEADER: &str = "trial,checkpoint,log_ratio_sum";

/// Formats a double with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A sequence-file problem, located by line when possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

fn line_of(text: &str, span: Option<Range<usize>>) -> Option<usize> {
    span.map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    PowerLaw,
    Geometric,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub c: f64,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub embedding: Embedding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "body", rename_all = "snake_case")]
pub enum SequenceFile {
    Family(FamilySpec),
    Rows {
        tail: TailDeclaration,
        monotone_unbounded: bool,
        rows: Vec<[f64; 4]>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: FamilyKind,
    c: f64,
    p: Option<f64>,
    r: Option<f64>,
    #[serde(default)]
    embedding: Embedding,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    format: Option<toml::Spanned<String>>,
    family: Option<toml::Spanned<RawFamily>>,
    tail: Option<TailDeclaration>,
    monotone_unbounded: Option<bool>,
    rows: Option<Vec<toml::Spanned<Vec<f64>>>>,
}

impl SequenceFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| ParseError {
            line: line_of(text, e.span()),
            message: e.message().to_string(),
        })?;
        let err = |span: Option<Range<usize>>, message: String| ParseError {
            line: line_of(text, span),
            message,
        };

        match &raw.format {
            None => return Err(err(None, format!("missing `format = \"{SEQUENCE_FORMAT}\"`"))),
            Some(f) if f.get_ref() != SEQUENCE_FORMAT => {
                return Err(err(
                    Some(f.span()),
                    format!("unsupported format `{}`, expected `{SEQUENCE_FORMAT}`", f.get_ref()),
                ))
            }
            Some(_) => {}
        }

        let file = match (raw.family, raw.rows) {
            (Some(_), Some(_)) => return Err(err(None, "give either [family] or rows, not both".into())),
            (None, None) => return Err(err(None, "missing [family] table or rows".into())),
            (Some(fam), None) => {
                if raw.tail.is_some() || raw.monotone_unbounded.is_some() {
                    return Err(err(
                        Some(fam.span()),
                        "`tail` and `monotone_unbounded` apply to rows only".into(),
                    ));
                }
                let span = fam.span();
                let fam = fam.into_inner();
                let spec = FamilySpec {
                    kind: fam.kind,
                    c: fam.c,
                    p: fam.p,
                    r: fam.r,
                    embedding: fam.embedding,
                };
                spec.to_sequence().map_err(|m| err(Some(span), m))?;
                SequenceFile::Family(spec)
            }
            (None, Some(rows)) => {
                let tail = raw.tail.ok_or_else(|| {
                    err(
                        rows.first().map(|r| r.span()),
                        "rows need an explicit `tail` (\"equal_after_n\" or \"family_continues\")".into(),
                    )
                })?;
                let mut out = Vec::with_capacity(rows.len());
                for row in rows {
                    let span = row.span();
                    let v = row.into_inner();
                    let cells: [f64; 4] = v.as_slice().try_into().map_err(|_| {
                        err(
                            Some(span.clone()),
                            format!("row needs 4 numbers [loc_z, scale_z, loc_w, scale_w], got {}", v.len()),
                        )
                    })?;
                    row_points(cells).map_err(|m| err(Some(span.clone()), m))?;
                    out.push(cells);
                }
                SequenceFile::Rows {
                    tail,
                    monotone_unbounded: raw.monotone_unbounded.unwrap_or(false),
                    rows: out,
                }
            }
        };
        Ok(file)
    }

    /// Renders the file in the same grammar [`SequenceFile::parse`] reads.
    pub fn to_text(&self) -> String {
        let mut s = format!("format = \"{SEQUENCE_FORMAT}\"\n");
        match self {
            SequenceFile::Family(f) => {
                let kind = match f.kind {
                    FamilyKind::PowerLaw => "power_law",
                    FamilyKind::Geometric => "geometric",
                    FamilyKind::Constant => "constant",
                };
                let _ = write!(s, "\n[family]\nkind = \"{kind}\"\nc = {:?}\n", f.c);
                if let Some(p) = f.p {
                    let _ = writeln!(s, "p = {p:?}");
                }
                if let Some(r) = f.r {
                    let _ = writeln!(s, "r = {r:?}");
                }
                let emb = match f.embedding {
                    Embedding::Location => "location",
                    Embedding::Scale => "scale",
                };
                let _ = writeln!(s, "embedding = \"{emb}\"");
            }
            SequenceFile::Rows {
                tail,
                monotone_unbounded,
                rows,
            } => {
                let tail = match tail {
                    TailDeclaration::EqualAfterN => "equal_after_n",
                    TailDeclaration::FamilyContinues => "family_continues",
                };
                let _ = write!(
                    s,
                    "tail = \"{tail}\"\nmonotone_unbounded = {monotone_unbounded}\nrows = [\n"
                );
                for r in rows {
                    let _ = writeln!(s, "  [{:?}, {:?}, {:?}, {:?}],", r[0], r[1], r[2], r[3]);
                }
                s.push_str("]\n");
            }
        }
        s
    }

    pub fn embedding(&self) -> Embedding {
        match self {
            SequenceFile::Family(f) => f.embedding,
            SequenceFile::Rows { .. } => Embedding::Location,
        }
    }

    /// Replaces the embedding of a family file; rows are left untouched.
    pub fn with_embedding(mut self, embedding: Embedding) -> Self {
        if let SequenceFile::Family(f) = &mut self {
            f.embedding = embedding;
        }
        self
    }

    pub fn to_sequence(&self) -> Result<ParamSequencePair, String> {
        match self {
            SequenceFile::Family(f) => f.to_sequence(),
            SequenceFile::Rows {
                tail,
                monotone_unbounded,
                rows,
            } => {
                let pairs = rows.iter().map(|r| row_points(*r)).collect::<Result<Vec<_>, _>>()?;
                Ok(match tail {
                    TailDeclaration::EqualAfterN => ParamSequencePair::ExplicitFinite { pairs },
                    TailDeclaration::FamilyContinues => ParamSequencePair::GeneratorCallback(
                        Generator::from_prefix(pairs).monotone_unbounded(*monotone_unbounded),
                    ),
                })
            }
        }
    }
}

fn row_points(r: [f64; 4]) -> Result<(UHPoint, UHPoint), String> {
    let z = UHPoint::new(r[0], r[1]).map_err(|e| format!("z: {e}"))?;
    let w = UHPoint::new(r[2], r[3]).map_err(|e| format!("w: {e}"))?;
    Ok((z, w))
}

impl FamilySpec {
    pub fn to_sequence(&self) -> Result<ParamSequencePair, String> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("{name} is required for this family"));
        let forbid = |v: Option<f64>, name: &str| match v {
            Some(_) => Err(format!("{name} does not apply to this family")),
            None => Ok(()),
        };
        let seq = match self.kind {
            FamilyKind::PowerLaw => {
                forbid(self.r, "r")?;
                ParamSequencePair::power_law(self.c, need(self.p, "p")?)
            }
            FamilyKind::Geometric => {
                forbid(self.p, "p")?;
                ParamSequencePair::geometric(self.c, need(self.r, "r")?)
            }
            FamilyKind::Constant => {
                forbid(self.p, "p")?;
                forbid(self.r, "r")?;
                ParamSequencePair::constant(self.c)
            }
        };
        seq.map_err(|e| e.to_string())
    }
}

/// Self-describing classification record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub n_max: usize,
    pub sequence: SequenceFile,
    pub report: DichotomyReport,
}

impl ReportDocument {
    pub fn new(sequence: SequenceFile, n_max: usize, report: DichotomyReport) -> Self {
        ReportDocument {
            schema: REPORT_SCHEMA.to_string(),
            n_max,
            sequence,
            report,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let doc: ReportDocument = serde_json::from_str(text).map_err(|e| ParseError {
            line: Some(e.line()),
            message: e.to_string(),
        })?;
        if doc.schema != REPORT_SCHEMA {
            return Err(ParseError {
                line: None,
                message: format!("unsupported schema `{}`", doc.schema),
            });
        }
        Ok(doc)
    }
}

/// Trajectory table: one CSV row per (trial, checkpoint), then a `#`-prefixed
/// summary block.
pub fn trajectory_csv(batch: &TrajectoryBatch) -> String {
    let mut s = String::with_capacity(32 * batch.trials() * batch.checkpoints.len() + 1024);
    s.push_str(TRAJECTORY_HEADER);
    s.push('\n');
    for (trial, path) in batch.log_ratio_paths.iter().enumerate() {
        for (n, v) in batch.checkpoints.iter().zip(path) {
            let _ = writeln!(s, "{trial},{n},{}", fmt17(*v));
        }
    }
    let _ = writeln!(
        s,
        "# summary seed={} trials={} horizon={}",
        batch.master_seed,
        batch.trials(),
        batch.horizon
    );
    let _ = writeln!(s, "# max_abs_increment={}", fmt17(batch.max_abs_increment));
    let _ = writeln!(
        s,
        "# checkpoint,median,mean,fraction_above_{},mean_exp,se_exp,trimmed_mean_exp,mean_exp_neg,se_exp_neg",
        batch.threshold
    );
    for c in &batch.summary {
        let _ = writeln!(
            s,
            "# {},{},{},{},{},{},{},{},{}",
            c.n,
            fmt17(c.median),
            fmt17(c.mean),
            fmt17(c.fraction_above),
            fmt17(c.mean_exp),
            fmt17(c.se_exp),
            fmt17(c.trimmed_mean_exp),
            fmt17(c.mean_exp_neg),
            fmt17(c.se_exp_neg),
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dichotomy::SequenceKind;

    #[test]
    fn parses_family() {
        let f = SequenceFile::parse("format = \"cauchy-sequence/1\"\n[family]\nkind = \"power_law\"\nc = 1\np = 2\n")
            .unwrap();
        assert_eq!(f.embedding(), Embedding::Location);
        assert_eq!(f.to_sequence().unwrap().kind(), SequenceKind::PowerLaw);
    }

    #[test]
    fn parses_rows() {
        let text = "format = \"cauchy-sequence/1\"\ntail = \"equal_after_n\"\nrows = [\n  [0, 2, 0, 1],\n  [3.0, 4.0, 1.0, 2.0],\n]\n";
        let f = SequenceFile::parse(text).unwrap();
        let seq = f.to_sequence().unwrap();
        assert_eq!(seq.chi_term(1), Some(0.5));
        assert_eq!(seq.chi_term(3), Some(0.0));
    }

    #[test]
    fn row_errors_carry_line_numbers() {
        let text = "format = \"cauchy-sequence/1\"\ntail = \"equal_after_n\"\nrows = [\n  [0, 2, 0, 1],\n  [0, -2, 0, 1],\n]\n";
        let e = SequenceFile::parse(text).unwrap_err();
        assert_eq!(e.line, Some(5), "{e}");
        let text = "format = \"cauchy-sequence/1\"\ntail = \"equal_after_n\"\nrows = [\n  [0, 2, 0],\n]\n";
        assert_eq!(SequenceFile::parse(text).unwrap_err().line, Some(4));
    }

    #[test]
    fn rejects_malformed() {
        let cases = [
            "",
            "format = \"cauchy-sequence/2\"\n[family]\nkind = \"constant\"\nc = 1\n",
            "format = \"cauchy-sequence/1\"\n[family]\nkind = \"constant\"\nc = 1\np = 3\n",
            "format = \"cauchy-sequence/1\"\n[family]\nkind = \"geometric\"\nc = 1\nr = 1.5\n",
            "format = \"cauchy-sequence/1\"\n[family]\nkind = \"power_law\"\nc = 1\n",
            "format = \"cauchy-sequence/1\"\nrows = [[0, 1, 0, 1]]\n",
            "format = \"cauchy-sequence/1\"\n[family]\nkind = \"sine\"\nc = 1\n",
            "format = \"cauchy-sequence/1\"\nbogus = 3\n",
            "format = \"cauchy-sequence/1\"\n[family\n",
        ];
        for text in cases {
            assert!(SequenceFile::parse(text).is_err(), "{text}");
        }
        let e = SequenceFile::parse("format = \"cauchy-sequence/1\"\n\n[family\n").unwrap_err();
        assert_eq!(e.line, Some(3), "{e}");
    }

    #[test]
    fn fmt17_round_trips() {
        for x in [0.0, 0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
    }
}
