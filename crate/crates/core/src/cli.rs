//! The `multinv` command line: one subcommand per invocation, JSON in and
//! out, exit code 0 on success, 1 when a checked property fails, 2 on bad
//! input and 3 when the solver does not converge.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::convexity::{
    certify_group, solve_edge_convexity, verify_edge_convexity, CertificationMethod, EdgeConvexityCertificate,
    EdgeSolveOutcome,
};
use crate::coset::{
    build_coset_graph, edgevertex_certificate, planes_from_cuts, project_cuts_to_planes, recipe_with_fallback,
    solve_vertex_convexity, verify_vertex_convexity, CosetGraphRecord, PolytopeKind, Recipe, ReflectingPlane,
    VertexConvexityCertificate, VertexSolveOutcome,
};
use crate::coxeter::{enumerate_group, CDDiagram, CoxeterGroup};
use crate::cuts::{
    check_geodesic_lemma, enumerate_cayley_cuts, enumerate_cuts, is_edge_reflecting, mirror_witness,
    recognize_coxeter, unseparated_pair, Recognition,
};
use crate::error::{Error, Result};
use crate::feasibility::{SolverOptions, Tolerances, VerificationReport, DEFAULT_MAX_SWEEPS};
use crate::invariants::{evaluate, half_graph_norm, principal_root, StateTensor, C64};
use crate::locc::{monte_carlo_test, MonteCarloConfig};
use crate::psigraph::{
    enumerate_psigraphs, from_cayley, property_p_hypercube, transitivity_battery, CayleyPsiGraph, EnumerationCaps,
    PsiGraph,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Monotonicity gaps below this count as a violation.
pub const GAP_TOLERANCE: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "multinv", version, about = "Multi-invariants, reflecting cuts and convexity certificates")]
pub struct Cli {
    /// Worker threads for parallel subcommands (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cayley psi-graph of a Coxeter group.
    Cayley {
        #[arg(long)]
        diagram: String,
    },
    /// Check one structural property of a psi-graph.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        /// Restrict edge-reflecting to one color.
        #[arg(long)]
        color: Option<String>,
        /// Seed for the sampled geodesics.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Edge-convexity certificates for a Coxeter group or a psi-graph.
    Certify {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Only this color (psi-graph input).
        #[arg(long)]
        color: Option<String>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Verify an edge certificate against a psi-graph, or a vertex
    /// certificate against a coset graph.
    Verify {
        #[arg(long, required_unless_present = "diagram")]
        graph: Option<PathBuf>,
        #[arg(long, requires = "subgroup")]
        diagram: Option<String>,
        #[arg(long)]
        subgroup: Option<String>,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Coset graph of a parabolic subgroup with its reflecting planes.
    Coset {
        #[arg(long)]
        diagram: String,
        /// Generators of the subgroup: comma-separated labels or indices.
        #[arg(long)]
        subgroup: String,
    },
    /// Vertex-convexity certificate on a coset graph, or from edge
    /// certificates of a psi-graph.
    CertifyVertex {
        #[arg(long, requires = "subgroup", conflicts_with_all = ["graph", "edge_certs"])]
        diagram: Option<String>,
        #[arg(long)]
        subgroup: Option<String>,
        #[arg(long, value_enum, default_value_t = RecipeChoice::Auto)]
        recipe: RecipeChoice,
        #[arg(long, requires = "edge_certs")]
        graph: Option<PathBuf>,
        #[arg(long)]
        edge_certs: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Evaluate the multi-invariant of a psi-graph on a state.
    Eval {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, conflicts_with = "dims")]
        state: Option<PathBuf>,
        /// Draw a random state with these party dimensions.
        #[arg(long, value_delimiter = ',', requires = "seed")]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also report the half-graph norm of every reflecting cut.
        #[arg(long)]
        half_graph: bool,
    },
    /// Monte-Carlo test of monotonicity under random local operations.
    LoccTest {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        min_ops: usize,
        #[arg(long, default_value_t = 4)]
        max_ops: usize,
    },
    /// All psi-graphs with given n and q up to isomorphism.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        /// Include disconnected graphs.
        #[arg(long)]
        all: bool,
        /// Attach transitivity, reflection and Coxeter classification.
        #[arg(long)]
        classify: bool,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct Source {
    #[arg(long)]
    pub diagram: Option<String>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
    /// Unit-sum tolerance for the solver.
    #[arg(long, default_value_t = crate::feasibility::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

impl SolverArgs {
    fn options(self) -> SolverOptions {
        SolverOptions {
            max_sweeps: self.max_sweeps,
            tolerances: Tolerances {
                sum: self.tolerance,
                psd: Tolerances::default().psd,
            },
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    EdgeReflecting,
    Mirror,
    Transitivity,
    PropertyP,
    Geodesic,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Construct,
    Solve,
    Auto,
}

impl From<Method> for CertificationMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Construct => CertificationMethod::Construct,
            Method::Solve => CertificationMethod::Solve,
            Method::Auto => CertificationMethod::Auto,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecipeChoice {
    /// The recipe matching the coset graph's tag, else the solver.
    Auto,
    Simplex,
    Hypercube,
    Orthoplex,
    Demihypercube,
    Solve,
}

/// JSON writer that prints every float with 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` as JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_group(diagram: &str) -> Result<CoxeterGroup> {
    enumerate_group(&CDDiagram::parse(diagram)?)
}

/// Comma-separated node labels or indices.
pub fn parse_nodes(d: &CDDiagram, spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|tok| {
            d.node_index(tok)
                .or_else(|| tok.parse::<usize>().ok().filter(|&i| i < d.rank()))
                .ok_or_else(|| Error::InvalidSubgroup(format!("unknown node {tok:?}")))
        })
        .collect()
}

/// Result of one subcommand: the JSON document and the exit code.
struct Outcome {
    json: String,
    code: i32,
}

impl Outcome {
    fn new<T: Serialize>(value: &T, code: i32) -> Result<Self> {
        Ok(Self {
            json: to_json(value)?,
            code,
        })
    }
}

fn pass_code(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_PROPERTY_FAILED
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        Error::CertificateRejected(_) | Error::NotCoxeter(_) => EXIT_PROPERTY_FAILED,
        _ => EXIT_INPUT,
    }
}

#[derive(Serialize)]
struct ComplexValue {
    re: f64,
    im: f64,
}

impl From<C64> for ComplexValue {
    fn from(c: C64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

fn check(graph: &Path, property: Property, color: Option<&str>, seed: u64) -> Result<Outcome> {
    let z: PsiGraph = read_json(graph)?;
    match property {
        Property::EdgeReflecting => {
            let c = color.map(|c| z.color_index(c)).transpose()?;
            let cuts = enumerate_cuts(&z)?;
            let holds = is_edge_reflecting(&z, c)?;
            let witness = if holds {
                None
            } else {
                let colors: Vec<usize> = c.map_or_else(|| (0..z.q()).collect(), |c| vec![c]);
                colors.into_iter().find_map(|c| {
                    unseparated_pair(&z, &cuts, c).map(|(a, b)| serde_json::json!({
                        "color": z.colors()[c],
                        "edges": [a.white, b.white],
                    }))
                })
            };
            Outcome::new(
                &serde_json::json!({"edge_reflecting": holds, "cut_count": cuts.len(), "unseparated": witness}),
                pass_code(holds),
            )
        }
        Property::Mirror => {
            let cuts = enumerate_cuts(&z)?;
            let witness = mirror_witness(&z, &cuts);
            let recognition = if z.is_connected() {
                Some(recognize_coxeter(&z)?)
            } else {
                None
            };
            let holds = witness.is_none();
            Outcome::new(
                &serde_json::json!({
                    "mirror": holds,
                    "edge_in_no_cut": witness.map(|e| serde_json::json!([z.colors()[e.color], e.white])),
                    "recognition": recognition,
                }),
                pass_code(holds),
            )
        }
        Property::Transitivity => {
            let report = transitivity_battery(&z)?;
            Outcome::new(
                &serde_json::json!({"transitivity": report, "all_agree": report.all_agree(), "all_true": report.all_true()}),
                pass_code(report.all_true()),
            )
        }
        Property::PropertyP => {
            let holds = property_p_hypercube(&z)?;
            Outcome::new(&serde_json::json!({"property_p": holds}), pass_code(holds))
        }
        Property::Geodesic => {
            let report = check_geodesic_lemma(&z, seed)?;
            let code = pass_code(report.holds);
            Outcome::new(&serde_json::json!({"geodesic": report, "seed": seed}), code)
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
enum GraphColorResult {
    Certified {
        color: String,
        sweeps: usize,
        certificate: EdgeConvexityCertificate,
        report: VerificationReport,
    },
    Infeasible {
        color: String,
        unseparated: (usize, usize),
    },
    NotConverged {
        color: String,
        sweeps: usize,
        sum_residual: f64,
        best: EdgeConvexityCertificate,
    },
}

fn certify(source: &Source, method: Method, color: Option<&str>, options: SolverOptions) -> Result<Outcome> {
    if let Some(d) = &source.diagram {
        let g = parse_group(d)?;
        let cert = certify_group(&g, method.into(), &options)?;
        let code = pass_code(cert.all_verified());
        return Outcome::new(&cert, code);
    }
    let path = source.graph.as_ref().expect("clap requires a source");
    if method == Method::Construct {
        return Err(Error::InvalidState(
            "construct needs a Coxeter diagram; use --diagram or --method solve".into(),
        ));
    }
    let z: PsiGraph = read_json(path)?;
    let cuts = enumerate_cuts(&z)?;
    let colors: Vec<usize> = match color {
        Some(c) => vec![z.color_index(c)?],
        None => (0..z.q()).collect(),
    };
    let mut code = EXIT_OK;
    let mut results = Vec::new();
    for c in colors {
        let label = z.colors()[c].clone();
        match solve_edge_convexity(&z, &cuts, c, &options) {
            EdgeSolveOutcome::Certified { certificate, sweeps } => {
                let report = verify_edge_convexity(&z, &cuts, &certificate)?;
                if !report.passed {
                    code = code.max(EXIT_PROPERTY_FAILED);
                }
                results.push(GraphColorResult::Certified {
                    color: label,
                    sweeps,
                    certificate,
                    report,
                });
            }
            EdgeSolveOutcome::Infeasible { pair } => {
                code = code.max(EXIT_PROPERTY_FAILED);
                results.push(GraphColorResult::Infeasible {
                    color: label,
                    unseparated: (pair.0.white, pair.1.white),
                });
            }
            EdgeSolveOutcome::NotConverged {
                best,
                sum_residual,
                sweeps,
            } => {
                code = EXIT_NOT_CONVERGED;
                results.push(GraphColorResult::NotConverged {
                    color: label,
                    sweeps,
                    sum_residual,
                    best,
                });
            }
        }
    }
    Outcome::new(&serde_json::json!({ "cut_count": cuts.len(), "colors": results }), code)
}

/// Accepts a single certificate, a list of them, or the output of
/// `certify`.
fn edge_certificates(v: Value) -> Result<Vec<EdgeConvexityCertificate>> {
    if let Some(colors) = v.get("colors").and_then(Value::as_array) {
        return colors
            .iter()
            .filter_map(|c| c.get("certificate"))
            .map(|c| Ok(serde_json::from_value(c.clone())?))
            .collect();
    }
    if v.is_array() {
        return Ok(serde_json::from_value(v)?);
    }
    Ok(vec![serde_json::from_value(v)?])
}

struct CosetContext {
    cay: CayleyPsiGraph,
    graph: crate::coset::CosetGraph,
    planes: Vec<ReflectingPlane>,
}

fn coset_context(diagram: &str, subgroup: &str) -> Result<CosetContext> {
    let g = parse_group(diagram)?;
    let nodes = parse_nodes(g.diagram(), subgroup)?;
    let cay = CayleyPsiGraph::new(g);
    let cuts = enumerate_cayley_cuts(&cay);
    let graph = build_coset_graph(&cay.group, &nodes)?;
    let planes = project_cuts_to_planes(&cay, &cuts, &graph);
    Ok(CosetContext { cay, graph, planes })
}

fn verify(graph: Option<&Path>, diagram: Option<&str>, subgroup: Option<&str>, cert: &Path) -> Result<Outcome> {
    let doc: Value = read_json(cert)?;
    if let Some(path) = graph {
        let z: PsiGraph = read_json(path)?;
        let cuts = enumerate_cuts(&z)?;
        let certs = edge_certificates(doc)?;
        let mut reports = Vec::new();
        for c in &certs {
            reports.push(serde_json::json!({"color": c.color, "report": verify_edge_convexity(&z, &cuts, c)?}));
        }
        let pass = reports.iter().all(|r| r["report"]["passed"] == Value::Bool(true));
        return Outcome::new(&serde_json::json!({"passed": pass, "certificates": reports}), pass_code(pass));
    }
    let ctx = coset_context(diagram.expect("clap requires a diagram"), subgroup.expect("clap requires a subgroup"))?;
    let inner = doc
        .get("certificate")
        .or_else(|| doc.get("audit").and_then(|a| a.get("certificate")))
        .filter(|c| !c.is_null())
        .cloned();
    let vc: VertexConvexityCertificate = serde_json::from_value(inner.unwrap_or(doc))?;
    let report = verify_vertex_convexity(ctx.graph.vertex_count(), &ctx.planes, &vc)?;
    let pass = report.passed;
    Outcome::new(&serde_json::json!({"passed": pass, "report": report}), pass_code(pass))
}

#[derive(Serialize)]
struct CosetOutput {
    coset_graph: CosetGraphRecord,
    planes: Vec<ReflectingPlane>,
}

fn coset(diagram: &str, subgroup: &str) -> Result<Outcome> {
    let ctx = coset_context(diagram, subgroup)?;
    Outcome::new(
        &CosetOutput {
            coset_graph: ctx.graph.to_record(&ctx.cay.group),
            planes: ctx.planes,
        },
        EXIT_OK,
    )
}

#[derive(Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
enum VertexOutput {
    Certified {
        certificate: VertexConvexityCertificate,
        report: VerificationReport,
        sweeps: Option<usize>,
    },
    Infeasible {
        unseparated: (usize, usize),
    },
    NotConverged {
        sum_residual: f64,
        sweeps: usize,
        best: VertexConvexityCertificate,
    },
}

fn certify_vertex_on_coset(diagram: &str, subgroup: &str, choice: RecipeChoice, options: SolverOptions) -> Result<Outcome> {
    let ctx = coset_context(diagram, subgroup)?;
    let n = ctx.graph.vertex_count();
    let recipe = match choice {
        RecipeChoice::Simplex => Some(Recipe::Simplex),
        RecipeChoice::Hypercube => Some(Recipe::Hypercube),
        RecipeChoice::Orthoplex => Some(Recipe::Orthoplex),
        RecipeChoice::Demihypercube => Some(Recipe::Demihypercube),
        RecipeChoice::Solve => None,
        RecipeChoice::Auto => ctx.graph.tag.map(|t| {
            let kind = [
                PolytopeKind::Simplex,
                PolytopeKind::Orthoplex,
                PolytopeKind::Demihypercube,
                PolytopeKind::Hypercube,
            ]
            .into_iter()
            .find(|&k| t.is_a(k))
            .expect("every tag is in its own family");
            Recipe::for_kind(kind)
        }),
    };
    if let Some(recipe) = recipe {
        let audit = recipe_with_fallback(&ctx.graph, &ctx.planes, recipe, &options)?;
        let code = if audit.certificate.is_some() {
            EXIT_OK
        } else if audit.fallback_sweeps.is_some() {
            EXIT_NOT_CONVERGED
        } else {
            EXIT_PROPERTY_FAILED
        };
        let report = audit
            .certificate
            .as_ref()
            .map(|c| verify_vertex_convexity(n, &ctx.planes, c))
            .transpose()?;
        return Outcome::new(
            &serde_json::json!({
                "coset_graph": ctx.graph.to_record(&ctx.cay.group),
                "audit": audit,
                "report": report,
            }),
            code,
        );
    }
    let (out, code) = match solve_vertex_convexity(n, &ctx.planes, &options) {
        VertexSolveOutcome::Certified { certificate, sweeps } => {
            let report = verify_vertex_convexity(n, &ctx.planes, &certificate)?;
            let code = pass_code(report.passed);
            (
                VertexOutput::Certified {
                    certificate,
                    report,
                    sweeps: Some(sweeps),
                },
                code,
            )
        }
        VertexSolveOutcome::Infeasible { pair } => (VertexOutput::Infeasible { unseparated: pair }, EXIT_PROPERTY_FAILED),
        VertexSolveOutcome::NotConverged {
            best,
            sum_residual,
            sweeps,
        } => (
            VertexOutput::NotConverged {
                sum_residual,
                sweeps,
                best,
            },
            EXIT_NOT_CONVERGED,
        ),
    };
    Outcome::new(&out, code)
}

fn certify_vertex_from_edges(graph: &Path, edge_certs: &Path) -> Result<Outcome> {
    let z: PsiGraph = read_json(graph)?;
    let cuts = enumerate_cuts(&z)?;
    let certs = edge_certificates(read_json(edge_certs)?)?;
    let certificate = edgevertex_certificate(&z, &cuts, &certs)?;
    let planes = planes_from_cuts(&z, &cuts);
    let report = verify_vertex_convexity(z.vertex_count(), &planes, &certificate)?;
    let code = pass_code(report.passed);
    Outcome::new(
        &VertexOutput::Certified {
            certificate,
            report,
            sweeps: None,
        },
        code,
    )
}

fn eval(graph: &Path, state: Option<&Path>, dims: Option<&[usize]>, seed: Option<u64>, half: bool) -> Result<Outcome> {
    let z: PsiGraph = read_json(graph)?;
    let psi: StateTensor = match (state, dims) {
        (Some(p), _) => read_json(p)?,
        (None, Some(d)) => StateTensor::random(d, &mut ChaCha8Rng::seed_from_u64(seed.unwrap_or_default()))?,
        (None, None) => return Err(Error::InvalidState("give --state or --dims with --seed".into())),
    };
    if !psi.is_normalized() {
        log::warn!("state is not normalized (squared norm {})", psi.norm_sqr());
    }
    let value = evaluate(&z, &psi)?;
    let root = principal_root(value, z.n());
    let half_graph = if half {
        let cuts = enumerate_cuts(&z)?;
        Some(cuts.iter().map(|c| half_graph_norm(&z, c, &psi)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    Outcome::new(
        &serde_json::json!({
            "n": z.n(),
            "dims": psi.dims(),
            "seed": seed,
            "z": ComplexValue::from(value),
            "z_hat": ComplexValue::from(root),
            "nu": 1.0 - root.re,
            "half_graph_norms": half_graph,
        }),
        EXIT_OK,
    )
}

fn locc_test(graph: &Path, config: MonteCarloConfig) -> Result<Outcome> {
    let z: PsiGraph = read_json(graph)?;
    let report = monte_carlo_test(&z, &config)?;
    let code = pass_code(report.min_gap >= -GAP_TOLERANCE);
    Outcome::new(&report, code)
}

#[derive(Serialize)]
struct Classified {
    graph: PsiGraph,
    transitivity: crate::psigraph::TransitivityReport,
    edge_reflecting: bool,
    mirror: bool,
    recognition: Recognition,
}

fn enumerate(n: usize, q: usize, all: bool, classify: bool) -> Result<Outcome> {
    use rayon::prelude::*;
    let graphs = enumerate_psigraphs(n, q, !all, EnumerationCaps::default())?;
    if !classify {
        return Outcome::new(&serde_json::json!({"n": n, "q": q, "count": graphs.len(), "graphs": graphs}), EXIT_OK);
    }
    let classified: Vec<Classified> = graphs
        .into_par_iter()
        .map(|z| {
            let cuts = enumerate_cuts(&z)?;
            Ok(Classified {
                transitivity: transitivity_battery(&z)?,
                edge_reflecting: crate::cuts::edge_reflecting_with(&z, &cuts, None),
                mirror: mirror_witness(&z, &cuts).is_none(),
                recognition: recognize_coxeter(&z)?,
                graph: z,
            })
        })
        .collect::<Result<_>>()?;
    Outcome::new(
        &serde_json::json!({"n": n, "q": q, "count": classified.len(), "graphs": classified}),
        EXIT_OK,
    )
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Cayley { diagram } => Outcome::new(&from_cayley(&parse_group(diagram)?), EXIT_OK),
        Command::Check {
            graph,
            property,
            color,
            seed,
        } => check(graph, *property, color.as_deref(), *seed),
        Command::Certify {
            source,
            method,
            color,
            solver,
        } => certify(source, *method, color.as_deref(), solver.options()),
        Command::Verify {
            graph,
            diagram,
            subgroup,
            cert,
        } => verify(graph.as_deref(), diagram.as_deref(), subgroup.as_deref(), cert),
        Command::Coset { diagram, subgroup } => coset(diagram, subgroup),
        Command::CertifyVertex {
            diagram,
            subgroup,
            recipe,
            graph,
            edge_certs,
            solver,
        } => match (diagram, subgroup, graph, edge_certs) {
            (Some(d), Some(s), _, _) => certify_vertex_on_coset(d, s, *recipe, solver.options()),
            (_, _, Some(g), Some(e)) => certify_vertex_from_edges(g, e),
            _ => Err(Error::InvalidState(
                "give --diagram with --subgroup, or --graph with --edge-certs".into(),
            )),
        },
        Command::Eval {
            graph,
            state,
            dims,
            seed,
            half_graph,
        } => eval(graph, state.as_deref(), dims.as_deref(), *seed, *half_graph),
        Command::LoccTest {
            graph,
            dims,
            trials,
            seed,
            min_ops,
            max_ops,
        } => locc_test(
            graph,
            MonteCarloConfig {
                dims: dims.clone(),
                trials: *trials,
                min_operators: *min_ops,
                max_operators: *max_ops,
                seed: *seed,
            },
        ),
        Command::Enumerate { n, q, all, classify } => enumerate(*n, *q, *all, *classify),
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose);
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.json),
        None => std::io::stdout().write_all(outcome.json.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_significant_digits() {
        let s = to_json(&serde_json::json!({"x": 0.1, "y": [1.0, -2.5e-300], "n": 3})).unwrap();
        assert_eq!(s.trim(), r#"{"n":3,"x":1.0000000000000001e-1,"y":[1.0000000000000000e0,-2.5000000000000000e-300]}"#);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn node_lists_accept_labels_and_indices() {
        let d = CDDiagram::parse("B3").unwrap();
        assert_eq!(parse_nodes(&d, "g0,g1").unwrap(), vec![0, 1]);
        assert_eq!(parse_nodes(&d, "1, 2").unwrap(), vec![1, 2]);
        assert!(parse_nodes(&d, "g7").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::NotConverged { residual: 1.0, sweeps: 3 }), EXIT_NOT_CONVERGED);
        assert_eq!(exit_code(&Error::InvalidDiagram("x".into())), EXIT_INPUT);
        assert_eq!(exit_code(&Error::CertificateRejected("x".into())), EXIT_PROPERTY_FAILED);
        assert_eq!(run(["multinv", "cayley"]), EXIT_INPUT);
        assert_eq!(run(["multinv", "cayley", "--diagram", "Q9"]), EXIT_INPUT);
    }
}
