//! Command line front end: JSON documents in, JSON documents out.
//!
//! Exit status is 0 on success, 1 on a domain error and 2 on malformed input
//! or usage. Errors are reported as `error` documents on standard output
//! naming the violated precondition.

pub mod document;
pub mod suites;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Read;

use clap::{Args, Parser, Subcommand};

use crate::calculus::{
    derive, dyadic_layers, half_max_approx, integrate, join_points, shrink_wellordered,
    truncate_order,
};
use crate::complexes::{barycentric_subdivision, join_complexes, nerve_of_sample, realize, restrict_nerve};
use crate::error::Error;
use crate::sampling::{cech_pipeline, distance_pou};
use crate::weights::{format_rational, parse_rational, ProbVector, VertexLabel};

pub use document::{Document, DocumentError, Payload};

#[derive(Debug, Parser)]
#[command(name = "pou", version, about = "Exact calculus of partitions of unity")]
struct Cli {
    /// Reserved. Arithmetic is exact and there is no tolerance knob.
    #[arg(long, global = true, hide = true)]
    precision: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Input document, or "-" for standard input.
    #[arg(default_value = "-")]
    input: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derivative of a prob_vector.
    Derive(Input),
    /// Integral of a derived_vector.
    Integrate(Input),
    /// Convex combination alpha*left + (1-alpha)*right of two prob_vectors.
    Join {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
    },
    /// Order truncation of a prob_vector.
    Truncate {
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Well-ordered shrinking; the ordering defaults to label order.
    Shrink {
        /// Comma separated labels, least first.
        #[arg(long, value_delimiter = ',')]
        ordering: Option<Vec<String>>,
        #[command(flatten)]
        input: Input,
    },
    /// Half-max approximation of a prob_vector.
    Approx(Input),
    /// Dyadic layers of a prob_vector; the last element is the residual.
    Layers {
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Iterated barycentric subdivision of a complex.
    Subdivide {
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Join of two complexes on disjoint alphabets.
    ComplexJoin { left: String, right: String },
    /// Nerve of a point_list.
    Nerve(Input),
    /// Restrict a point_list to the nerve of a subset of its points.
    Restrict {
        /// Comma separated point indices.
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<usize>,
        #[command(flatten)]
        input: Input,
    },
    /// Distance partition of unity of a cover of a sample.
    CoverPou { sample: String, cover: String },
    /// Ball cover, distance partition and nerve of a sample.
    Cech {
        #[arg(long)]
        radius: String,
        #[command(flatten)]
        input: Input,
    },
    /// Affine realization of a prob_vector under vertex coordinates.
    Realize {
        /// A realization document.
        #[arg(long)]
        coords: String,
        #[command(flatten)]
        input: Input,
    },
    /// Run a bundled property suite.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

/// Exit status and the text written to standard output and standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Malformed(String),
    Domain(Error),
    /// A check suite ran and reported failures.
    Report(Document),
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Malformed(m) => Failure::Malformed(m),
            DocumentError::Domain(e) => Failure::Domain(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn error_document(precondition: &str, message: String) -> String {
    Document::new(Payload::Error {
        precondition: precondition.to_string(),
        message,
    })
    .emit()
}

/// Runs one command line. `stdin` backs every input given as `-`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            } else {
                Outcome {
                    code: 2,
                    stdout: error_document("usage", e.kind().to_string()),
                    stderr: text,
                }
            };
        }
    };
    let mut stdin = Some(stdin);
    match execute(cli, &mut stdin) {
        Ok(doc) => Outcome { code: 0, stdout: doc.emit(), stderr: String::new() },
        Err(Failure::Report(doc)) => Outcome { code: 1, stdout: doc.emit(), stderr: String::new() },
        Err(Failure::Domain(e)) => Outcome {
            code: 1,
            stdout: error_document(e.precondition(), e.to_string()),
            stderr: format!("error: {e}\n"),
        },
        Err(Failure::Malformed(m)) => Outcome {
            code: 2,
            stdout: error_document("well_formed_input", m.clone()),
            stderr: format!("error: {m}\n"),
        },
        Err(Failure::Usage(m)) => Outcome {
            code: 2,
            stdout: error_document("usage", m.clone()),
            stderr: format!("error: {m}\n"),
        },
    }
}

fn read_document(path: &str, stdin: &mut Option<&mut dyn Read>) -> Result<Document, Failure> {
    let text = if path == "-" {
        let reader = stdin
            .take()
            .ok_or_else(|| Failure::Usage("standard input can only be read once".into()))?;
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Failure::Malformed(format!("reading standard input: {e}")))?;
        text
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("reading {path}: {e}")))?
    };
    Ok(Document::parse(&text)?)
}

fn wrong_kind(path: &str, expected: &str, doc: &Document) -> Failure {
    Failure::Malformed(format!("{path}: expected a {expected} document, got {}", doc.kind()))
}

macro_rules! expect_kind {
    ($path:expr, $stdin:expr, $variant:ident, $name:expr) => {{
        let doc = read_document($path, $stdin)?;
        match doc.payload {
            Payload::$variant(value) => value,
            _ => return Err(wrong_kind($path, $name, &doc)),
        }
    }};
}

fn read_prob(path: &str, stdin: &mut Option<&mut dyn Read>) -> Result<ProbVector, Failure> {
    Ok(expect_kind!(path, stdin, ProbVector, "prob_vector"))
}

fn rational_flag(name: &str, text: &str) -> Result<crate::weights::Rational, Failure> {
    parse_rational(text).ok_or_else(|| Failure::Malformed(format!("--{name}: invalid rational {text:?}")))
}

fn execute(cli: Cli, stdin: &mut Option<&mut dyn Read>) -> Result<Document, Failure> {
    if cli.precision.is_some() {
        return Err(Failure::Usage(
            "--precision is reserved: all arithmetic is exact".into(),
        ));
    }
    let doc = match cli.command {
        Command::Derive(Input { input }) => {
            let x = read_prob(&input, stdin)?;
            Document::new(Payload::DerivedVector(derive(&x)))
        }
        Command::Integrate(Input { input }) => {
            let d = expect_kind!(&input, stdin, DerivedVector, "derived_vector");
            Document::new(Payload::ProbVector(integrate(&d)?))
        }
        Command::Join { alpha, left, right } => {
            let alpha = rational_flag("alpha", &alpha)?;
            let f = left.as_deref().map(|p| read_prob(p, stdin)).transpose()?;
            let g = right.as_deref().map(|p| read_prob(p, stdin)).transpose()?;
            let h = join_points(f.as_ref(), g.as_ref(), &alpha)?;
            Document::new(Payload::ProbVector(h)).with("alpha", format_rational(&alpha))
        }
        Command::Truncate { order, input } => {
            let x = read_prob(&input.input, stdin)?;
            Document::new(Payload::ProbVector(truncate_order(&x, order)?))
                .with("order", order.to_string())
        }
        Command::Shrink { ordering, input } => {
            let x = read_prob(&input.input, stdin)?;
            let ordering = match ordering {
                Some(names) => names
                    .into_iter()
                    .map(VertexLabel::new)
                    .collect::<Result<Vec<_>, _>>()?,
                None => x.support().cloned().collect(),
            };
            let shown = ordering.iter().map(VertexLabel::as_str).collect::<Vec<_>>().join(",");
            Document::new(Payload::WeightVector(shrink_wellordered(&x, &ordering)?))
                .with("ordering", shown)
        }
        Command::Approx(Input { input }) => {
            let x = read_prob(&input, stdin)?;
            Document::new(Payload::ProbVector(half_max_approx(&x)))
        }
        Command::Layers { depth, input } => {
            if depth == 0 {
                return Err(Failure::Usage("--depth must be at least 1".into()));
            }
            let x = read_prob(&input.input, stdin)?;
            Document::new(Payload::WeightList(dyadic_layers(&x, depth)))
                .with("depth", depth.to_string())
        }
        Command::Subdivide { iterations, input } => {
            let mut k = expect_kind!(&input.input, stdin, Complex, "complex");
            for _ in 0..iterations {
                k = barycentric_subdivision(&k)?;
            }
            Document::new(Payload::Complex(k)).with("iterations", iterations.to_string())
        }
        Command::ComplexJoin { left, right } => {
            let k = expect_kind!(&left, stdin, Complex, "complex");
            let l = expect_kind!(&right, stdin, Complex, "complex");
            Document::new(Payload::Complex(join_complexes(&k, &l)?))
        }
        Command::Nerve(Input { input }) => {
            let points = expect_kind!(&input, stdin, PointList, "point_list");
            Document::new(Payload::Complex(nerve_of_sample(&points)?))
        }
        Command::Restrict { subset, input } => {
            let points = expect_kind!(&input.input, stdin, PointList, "point_list");
            let subset: BTreeSet<usize> = subset.into_iter().collect();
            Document::new(Payload::Restriction(restrict_nerve(&points, &subset)?))
        }
        Command::CoverPou { sample, cover } => {
            let s = expect_kind!(&sample, stdin, Sample, "sample");
            let c = expect_kind!(&cover, stdin, Cover, "cover");
            let points = distance_pou(&s, &c)?;
            surrogate_metadata(Document::new(Payload::PointList(points)), &s)
        }
        Command::Cech { radius, input } => {
            let radius = rational_flag("radius", &radius)?;
            let s = expect_kind!(&input.input, stdin, Sample, "sample");
            let out = cech_pipeline(&s, &radius)?;
            surrogate_metadata(Document::new(Payload::Pipeline(out)), &s)
                .with("radius", format_rational(&radius))
        }
        Command::Realize { coords, input } => {
            let g = expect_kind!(&coords, stdin, Realization, "realization");
            let x = read_prob(&input.input, stdin)?;
            Document::new(Payload::Coordinates(realize(&x, &g)?))
        }
        Command::Check { suite, seed, cases } => {
            let report = suites::run(&suite, seed, cases).ok_or_else(|| {
                Failure::Usage(format!(
                    "unknown suite {suite:?}; expected one of {} or all",
                    suites::SUITES.join(", ")
                ))
            })?;
            let failed = report.failed();
            let doc = Document::new(Payload::Report(report))
                .with("seed", seed.to_string())
                .with("cases", cases.to_string());
            if failed > 0 {
                return Err(Failure::Report(doc));
            }
            doc
        }
    };
    Ok(doc)
}

fn surrogate_metadata(doc: Document, sample: &crate::sampling::MetricSample) -> Document {
    doc.with("all_covered_rule", "1 + diameter")
        .with("all_covered_clearance", format_rational(&sample.surrogate_clearance()))
}
