//! Command-line driver: builds graphs, evaluates inverse entries and
//! probabilities, periodic free energies, closed-form tables, and runs the
//! verification suites.

mod output;
mod source;

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fisher_dimer::fisher::{EdgeClass, FisherGraph, VertexType};
use fisher_dimer::geometry::{GraphDocument, IsoradialGraph};
use fisher_dimer::gibbs::cylinder_probability;
use fisher_dimer::inverse::Method;
use fisher_dimer::spectral::PeriodicCell;
use fisher_dimer::verify::{self, Check, Report};
use fisher_dimer::weights::{self, EdgeKind};
use fisher_dimer::{CriticalModel, Error, LocalInverse};
use serde_json::json;

use output::{emit, num, Format, Table};
use source::{load_cell, parse_angles, parse_complex, GraphSource};

/// Invalid command-line configuration; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

#[derive(Parser, Debug)]
#[command(name = "fisher-dimer", version, about = "Critical Ising model on isoradial graphs via Fisher dimers")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "FISHER_DIMER_THREADS")]
    threads: Option<usize>,

    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    /// `z2`, `triangular`, `honeycomb`, `square:theta=<t>`,
    /// `quasiperiodic:<seed>`, or a JSON graph file.
    #[arg(long, default_value = "z2")]
    graph: GraphSource,

    /// Graph radius of the patch cut from a built-in family.
    #[arg(long, default_value_t = 6)]
    radius: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph, check it, and summarize its Fisher decoration.
    Build {
        #[command(flatten)]
        graph: GraphArgs,
        /// Also write the graph document (JSON) to this file.
        #[arg(long)]
        document: Option<PathBuf>,
    },
    /// Entries of the inverse Kasteleyn matrix as CSV rows.
    Inverse {
        #[command(flatten)]
        graph: GraphArgs,
        /// Pair of Fisher vertex names `x,y` (repeatable).
        #[arg(long = "pair")]
        pairs: Vec<String>,
        /// Fisher vertex name, primal vertex id, or `centre`: every Fisher
        /// vertex of it is paired with all Fisher vertices within `--reach`.
        #[arg(long)]
        from: Option<String>,
        #[arg(long, default_value_t = 1)]
        reach: usize,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Edge probabilities from Pfaffians of inverse entries.
    Prob {
        #[command(flatten)]
        graph: GraphArgs,
        /// `wz`, `wznext`, `wv`, `zv`, `vv` at the centre vertex, or an
        /// explicit Fisher edge `x,y` (repeatable).
        #[arg(long = "edge", required = true)]
        edges: Vec<String>,
        /// Star index (1-based) used by the edge shorthands.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Report the probability that all edges are present together.
        #[arg(long)]
        joint: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Free energies and entropy of a periodic cell.
    FreeEnergy {
        /// `builtin:z2|triangular|honeycomb`, `square:theta=<t>`, or a
        /// periodic JSON graph file.
        #[arg(long, default_value = "builtin:z2")]
        cell: String,
        #[arg(long, value_enum, default_value = "both")]
        method: FreeEnergyMethod,
        /// Torus grid size for the integral (power of two, at least 64).
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
    /// Kasteleyn and Laplacian characteristic polynomials of a cell.
    Charpoly {
        #[arg(long, default_value = "builtin:z2")]
        cell: String,
        /// Evaluation point `re,im` or `unit:<angle>`; needs `--w`.
        #[arg(long, requires = "w")]
        z: Option<String>,
        #[arg(long, requires = "z")]
        w: Option<String>,
        /// Random sample points when no point is given.
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Closed-form quantities tabulated over half-angles.
    Table {
        /// Comma-separated half-angles, e.g. `pi/12,pi/6,0.7`.
        #[arg(long, default_value = "pi/12,pi/6,pi/4,pi/3,5pi/12")]
        theta: String,
        /// Comma-separated subset of P_wz, P_wznext, P_wv, P_vv, spin_pp,
        /// J, nu, f_summand.
        #[arg(long, default_value = "P_wz,P_wznext,P_wv,P_vv,spin_pp,J,nu,f_summand")]
        quantity: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run verification suites; exits with 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name (repeatable); `all` runs every suite.
    #[arg(long = "suite", value_enum, default_values_t = [Suite::All])]
    suites: Vec<Suite>,
    /// Run graph suites on this graph instead of the default pair.
    #[arg(long)]
    graph: Option<GraphSource>,
    #[arg(long, default_value_t = 8)]
    radius: usize,
    /// Graph distance between x and y in the KK⁻¹ suite.
    #[arg(long, default_value_t = 6)]
    reach: usize,
    /// Run periodic suites on this cell instead of the three built-ins.
    #[arg(long)]
    cell: Option<String>,
    /// Grid for the Fourier inverse (power of two).
    #[arg(long, default_value_t = 1024)]
    fourier_grid: usize,
    /// Grid for the free-energy integral (power of two).
    #[arg(long, default_value_t = 512)]
    energy_grid: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Override every absolute error budget.
    #[arg(long, env = "FISHER_DIMER_TOL")]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    KkIdentity,
    KernelIdentity,
    IntermediateTables,
    ClosedForms,
    ResidueVsKeyhole,
    FourierVsLocal,
    FreeEnergy,
    IsingDimerIdentity,
    PolynomialRatio,
    Asymptotics,
    Locality,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Residue,
    Ray,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FreeEnergyMethod {
    Closed,
    Integral,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Returns whether every verification passed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError::new("thread count must be positive").into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let out = cli.output.as_deref();
    match cli.command {
        Command::Build { graph, document } => build(&graph, document.as_deref(), out).map(|_| true),
        Command::Inverse { graph, pairs, from, reach, method, format } => {
            inverse(&graph, &pairs, from.as_deref(), reach, method, format, out).map(|_| true)
        }
        Command::Prob { graph, edges, k, joint, format } => prob(&graph, &edges, k, joint, format, out).map(|_| true),
        Command::FreeEnergy { cell, method, grid } => free_energy(&cell, method, grid, out).map(|_| true),
        Command::Charpoly { cell, z, w, samples, seed, format } => {
            charpoly(&cell, z.as_deref().zip(w.as_deref()), samples, seed, format, out).map(|_| true)
        }
        Command::Table { theta, quantity, format } => table(&theta, &quantity, format, out).map(|_| true),
        Command::Verify(args) => verify_suites(&args, out),
    }
}

fn check_grid(n: usize, what: &str) -> Result<(), ConfigError> {
    if n < 64 || !n.is_power_of_two() {
        return Err(ConfigError::new(format!("{what} must be a power of two no smaller than 64, got {n}")));
    }
    Ok(())
}

fn model_of(args: &GraphArgs) -> anyhow::Result<CriticalModel> {
    Ok(CriticalModel::new(args.graph.build(args.radius)?)?)
}

/// The interior vertex farthest from the boundary (smallest index on ties).
fn centre(g: &IsoradialGraph) -> anyhow::Result<usize> {
    let depth = g.boundary_distances();
    (0..g.vertex_count())
        .filter(|&v| g.is_interior(v))
        .max_by(|&a, &b| depth[a].cmp(&depth[b]).then(b.cmp(&a)))
        .ok_or_else(|| ConfigError::new("graph has no interior vertex").into())
}

fn fisher_vertex(f: &FisherGraph, name: &str) -> anyhow::Result<usize> {
    f.parse_name(name.trim()).map_err(|e| ConfigError::new(e.to_string()).into())
}

fn build(args: &GraphArgs, document: Option<&std::path::Path>, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    let graph = args.graph.build(args.radius)?;
    if let Some(path) = document {
        emit(&(GraphDocument::from_graph(&graph).to_json() + "\n"), Some(path))?;
    }
    let model = CriticalModel::new(graph)?;
    let g = &model.graph;
    let summary = json!({
        "vertices": g.vertex_count(),
        "edges": g.edges.len(),
        "faces": g.faces.len(),
        "interior_vertices": (0..g.vertex_count()).filter(|&v| g.is_interior(v)).count(),
        "centre": g.vertex_id(centre(g)?),
        "fisher_vertices": model.fisher.vertex_count(),
        "fisher_edges": model.fisher.edges.len(),
        "kasteleyn_orientation": model.orientation.verify(&model.fisher).is_ok(),
        "angle_closure_residue": model.angles.closure_residue(&model.fisher, &model.orientation)?,
    });
    emit(&(serde_json::to_string_pretty(&summary)? + "\n"), out)
}

fn inverse(
    args: &GraphArgs,
    pairs: &[String],
    from: Option<&str>,
    reach: usize,
    method: MethodArg,
    format: Format,
    out: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    let model = model_of(args)?;
    let f = &model.fisher;
    let mut queries = Vec::new();
    for p in pairs {
        let (x, y) = p.split_once(',').ok_or_else(|| ConfigError::new(format!("pair `{p}` is not of the form x,y")))?;
        queries.push((fisher_vertex(f, x)?, fisher_vertex(f, y)?));
    }
    if let Some(from) = from {
        let g = &model.graph;
        let sources: Vec<usize> = if from == "centre" || from == "center" {
            let c = centre(g)?;
            (0..f.vertex_count()).filter(|&u| f.vertices[u].g == c).collect()
        } else if let Ok(v) = g.vertex_index(from) {
            (0..f.vertex_count()).filter(|&u| f.vertices[u].g == v).collect()
        } else {
            vec![fisher_vertex(f, from)?]
        };
        for x in sources {
            let dist = g.distances_from(f.vertices[x].g);
            queries.extend((0..f.vertex_count()).filter(|&y| dist[f.vertices[y].g].is_some_and(|d| d <= reach)).map(|y| (x, y)));
        }
    }
    if queries.is_empty() {
        return Err(ConfigError::new("nothing to evaluate: give --pair or --from").into());
    }
    let method = match method {
        MethodArg::Auto => Method::Auto,
        MethodArg::Residue => Method::Residue,
        MethodArg::Ray => Method::Ray,
    };
    let inv = LocalInverse::with_method(&model, method);
    let mut t = Table::new(vec!["x", "y", "integral", "constant", "value", "imag", "case", "poles", "method"]);
    for (&(x, y), e) in queries.iter().zip(inv.entries(&queries)) {
        let e = e?;
        t.push(vec![
            f.name(x),
            f.name(y),
            num(e.integral),
            num(e.constant),
            num(e.value),
            num(e.imag),
            e.case.map(|c| c.to_string()).unwrap_or_default(),
            e.residues.len().to_string(),
            e.method.as_str().to_string(),
        ]);
    }
    emit(&t.render(format)?, out)
}

/// Closed-form class and half-angle of a Fisher edge.
fn classify(f: &FisherGraph, x: usize, y: usize) -> Option<(EdgeKind, f64)> {
    let e = f.edge_between(x, y)?;
    let (a, b) = (f.vertices[x], f.vertices[y]);
    let theta = f.stars[a.g][a.k].theta;
    let kind = match f.edges[e].class {
        EdgeClass::Inter => EdgeKind::Vv,
        EdgeClass::Ring => EdgeKind::WzNext,
        EdgeClass::Triangle if a.ty == VertexType::V || b.ty == VertexType::V => EdgeKind::WvOrZv,
        EdgeClass::Triangle => EdgeKind::Wz,
    };
    Some((kind, theta))
}

fn shorthand_edge(f: &FisherGraph, c: usize, k: usize, kind: &str) -> anyhow::Result<(usize, usize)> {
    let d = f.degree(c);
    if k == 0 || k > d {
        return Err(ConfigError::new(format!("--k must lie in 1..={d}")).into());
    }
    let k = k - 1;
    let at = |t| f.index(c, k, t);
    Ok(match kind.to_ascii_lowercase().as_str() {
        "wz" => (at(VertexType::W), at(VertexType::Z)),
        "wznext" => (at(VertexType::W), f.index(c, (k + 1) % d, VertexType::Z)),
        "wv" => (at(VertexType::W), at(VertexType::V)),
        "zv" => (at(VertexType::Z), at(VertexType::V)),
        "vv" => {
            let v = at(VertexType::V);
            let e = f.inter_edge(c, k).ok_or_else(|| ConfigError::new("centre vertex has no edge there"))?;
            (v, f.other_end(e, v))
        }
        other => return Err(ConfigError::new(format!("unknown edge `{other}`")).into()),
    })
}

fn prob(args: &GraphArgs, edges: &[String], k: usize, joint: bool, format: Format, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    let model = model_of(args)?;
    let f = &model.fisher;
    let c = centre(&model.graph)?;
    let mut resolved = Vec::new();
    for spec in edges {
        let pair = match spec.split_once(',') {
            Some((x, y)) => (fisher_vertex(f, x)?, fisher_vertex(f, y)?),
            None => shorthand_edge(f, c, k, spec)?,
        };
        resolved.push((spec.clone(), pair));
    }
    let inv = LocalInverse::new(&model);
    let mut t = Table::new(vec!["edge", "x", "y", "theta", "probability", "valid", "closed_form"]);
    let groups: Vec<Vec<(String, (usize, usize))>> = if joint { vec![resolved] } else { resolved.into_iter().map(|r| vec![r]).collect() };
    for group in groups {
        let set: Vec<(usize, usize)> = group.iter().map(|(_, p)| *p).collect();
        let p = cylinder_probability(&inv, &set)?;
        let names = |sel: fn(&(usize, usize)) -> usize| set.iter().map(|e| f.name(sel(e))).collect::<Vec<_>>().join(" ");
        let (theta, closed) = match (set.as_slice(), classify(f, set[0].0, set[0].1)) {
            ([_], Some((kind, theta))) => (num(theta), num(weights::edge_probability_closed_form(kind, theta)?)),
            _ => (String::new(), String::new()),
        };
        t.push(vec![
            group.iter().map(|(s, _)| s.as_str()).collect::<Vec<_>>().join(" "),
            names(|e| e.0),
            names(|e| e.1),
            theta,
            num(p.value),
            p.valid.to_string(),
            closed,
        ]);
    }
    emit(&t.render(format)?, out)
}

fn free_energy(cell_spec: &str, method: FreeEnergyMethod, grid: usize, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    if method != FreeEnergyMethod::Closed {
        check_grid(grid, "--grid")?;
    }
    let cell = load_cell(cell_spec)?;
    let mut doc = json!({
        "cell": cell.lattice.name,
        "fisher_vertices": cell.order(),
        "primal_vertices": cell.primal_vertex_count(),
        "edges": cell.thetas.len(),
        "thetas": cell.thetas,
    });
    if method != FreeEnergyMethod::Integral {
        let fd = cell.free_energy_dimer()?;
        doc["f_D"] = json!(fd);
        doc["f_I"] = json!(cell.free_energy_ising()?);
        doc["log_sinh_sum"] = json!(cell.log_sinh_coupling_sum()?);
        doc["s_D"] = json!(cell.entropy_dimer()?);
        doc["s_D_closed_form"] = json!(cell.entropy_closed_form()?);
        doc["ratio_constant"] = json!(cell.ratio_constant());
    }
    if method != FreeEnergyMethod::Closed {
        let integral = cell.free_energy_integral(grid)?;
        doc["f_D_integral"] = json!({ "value": integral.value, "estimate": integral.estimate, "grid": grid });
        if let Some(fd) = doc["f_D"].as_f64() {
            doc["difference"] = json!((fd - integral.value).abs());
        }
    }
    emit(&(serde_json::to_string_pretty(&doc)? + "\n"), out)
}

fn charpoly(
    cell_spec: &str,
    point: Option<(&str, &str)>,
    samples: usize,
    seed: u64,
    format: Format,
    out: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    use rand::{Rng, SeedableRng};
    let cell: PeriodicCell = load_cell(cell_spec)?;
    let points = match point {
        Some((z, w)) => vec![(parse_complex(z)?, parse_complex(w)?)],
        None => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut draw = || num_complex::Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-3.0..3.0));
            (0..samples).map(|_| (draw(), draw())).collect()
        }
    };
    let predicted = cell.ratio_constant();
    let mut t = Table::new(vec!["z_re", "z_im", "w_re", "w_im", "P_re", "P_im", "P_laplacian_re", "P_laplacian_im", "ratio", "predicted"]);
    for (z, w) in points {
        let p = cell.char_poly(z, w);
        let l = cell.laplacian_char_poly(z, w);
        let ratio = p / l;
        t.push(vec![num(z.re), num(z.im), num(w.re), num(w.im), num(p.re), num(p.im), num(l.re), num(l.im), num(ratio.re), num(predicted)]);
    }
    emit(&t.render(format)?, out)
}

/// Quantity names accepted by `table`.
const QUANTITIES: [&str; 8] = ["P_wz", "P_wznext", "P_wv", "P_vv", "spin_pp", "J", "nu", "f_summand"];

fn quantity(name: &str, theta: f64) -> fisher_dimer::Result<f64> {
    match name {
        "P_wz" => weights::edge_probability_closed_form(EdgeKind::Wz, theta),
        "P_wznext" => weights::edge_probability_closed_form(EdgeKind::WzNext, theta),
        "P_wv" => weights::edge_probability_closed_form(EdgeKind::WvOrZv, theta),
        "P_vv" => weights::edge_probability_closed_form(EdgeKind::Vv, theta),
        "spin_pp" => weights::spin_same_sign_probability(FRAC_PI_2 - theta),
        "J" => weights::critical_coupling(theta),
        "nu" => weights::critical_dimer_weight(theta),
        "f_summand" => weights::free_energy_summand(theta),
        other => Err(Error::UnknownQuantity(other.to_string())),
    }
}

fn canonical_quantity(name: &str) -> Result<&'static str, ConfigError> {
    let key = name.trim().replace('-', "_").replace('ν', "nu");
    QUANTITIES
        .iter()
        .find(|q| q.eq_ignore_ascii_case(&key))
        .copied()
        .ok_or_else(|| ConfigError::new(Error::UnknownQuantity(name.trim().to_string()).to_string()))
}

fn table(thetas: &str, quantities: &str, format: Format, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    let thetas = parse_angles(thetas)?;
    let names = quantities.split(',').filter(|q| !q.trim().is_empty()).map(canonical_quantity).collect::<Result<Vec<_>, _>>()?;
    let mut header = vec!["theta"];
    header.extend(&names);
    let mut t = Table::new(header);
    for theta in thetas {
        let mut row = vec![num(theta)];
        for q in &names {
            // Quantities undefined at this angle (J at π/2, say) print as NaN.
            row.push(match quantity(q, theta) {
                Ok(v) => num(v),
                Err(e @ Error::OutOfRange { .. }) => {
                    eprintln!("warning: {q} at theta {theta}: {e}");
                    num(f64::NAN)
                }
                Err(e) => return Err(e.into()),
            });
        }
        t.push(row);
    }
    emit(&t.render(format)?, out)
}

fn verify_suites(args: &VerifyArgs, out: Option<&std::path::Path>) -> anyhow::Result<bool> {
    check_grid(args.fourier_grid, "--fourier-grid")?;
    check_grid(args.energy_grid, "--energy-grid")?;
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            return Err(ConfigError::new(format!("tolerance must be positive, got {tol}")).into());
        }
    }
    let wants = |s: Suite| args.suites.contains(&Suite::All) || args.suites.contains(&s);
    let graph_suites = [Suite::KkIdentity, Suite::KernelIdentity, Suite::IntermediateTables, Suite::ResidueVsKeyhole];
    let cell_suites = [Suite::FourierVsLocal, Suite::FreeEnergy, Suite::IsingDimerIdentity, Suite::PolynomialRatio];
    let mut report = Report::default();

    if graph_suites.iter().any(|&s| wants(s)) {
        let sources = match &args.graph {
            Some(g) => vec![g.clone()],
            None => vec![GraphSource::Lattice("z2".into()), GraphSource::Quasiperiodic(7)],
        };
        for src in sources {
            let model = CriticalModel::new(src.build(args.radius)?)?;
            let tag = |name: &str| format!("{name}[{}]", label(&src));
            let mut run = |s: Suite, name: &str, f: &dyn Fn() -> fisher_dimer::Result<Check>| {
                if wants(s) {
                    report.push(
                        &tag(name),
                        f().map(|mut c| {
                            c.name = tag(&c.name);
                            c
                        }),
                    );
                }
            };
            run(Suite::KkIdentity, "kk-identity", &|| verify::kk_identity(&model, args.reach));
            run(Suite::KernelIdentity, "kernel-identity", &|| verify::kernel_identity(&model, 20, args.seed));
            run(Suite::IntermediateTables, "intermediate-tables", &|| verify::intermediate_tables(&model, 3));
            run(Suite::ResidueVsKeyhole, "residue-vs-keyhole", &|| verify::residue_vs_keyhole(&model, 50, 4096, args.seed));
        }
    }
    if wants(Suite::ClosedForms) {
        let thetas = parse_angles("pi/12,pi/6,pi/4,pi/3,5pi/12")?;
        report.push("closed-forms", verify::closed_forms(&thetas));
    }
    if cell_suites.iter().any(|&s| wants(s)) {
        let specs = match &args.cell {
            Some(c) => vec![c.clone()],
            None => ["builtin:z2", "builtin:triangular", "builtin:honeycomb"].map(String::from).to_vec(),
        };
        for spec in specs {
            let cell = load_cell(&spec)?;
            if wants(Suite::FreeEnergy) {
                report.push("free-energy", verify::free_energy(&cell, args.energy_grid));
            }
            if wants(Suite::IsingDimerIdentity) {
                report.push("ising-dimer-identity", verify::ising_dimer_identity(&cell));
            }
            if wants(Suite::PolynomialRatio) {
                report.push("polynomial-ratio", verify::polynomial_ratio(&cell, 100, args.seed));
            }
            if wants(Suite::FourierVsLocal) {
                report.push("fourier-vs-local", verify::fourier_vs_local(&cell, 20, args.fourier_grid, args.seed));
            }
        }
    }
    if wants(Suite::Asymptotics) {
        report.push("asymptotics", verify::asymptotics());
    }
    if wants(Suite::Locality) {
        report.push("locality", verify::locality(args.seed));
    }
    if wants(Suite::BruteForce) {
        report.push("brute-force", verify::brute_force());
    }
    if let Some(tol) = args.tol {
        // Normalized scores (budget 1) are left alone.
        for c in report.checks.iter_mut().filter(|c| c.budget < 1.0 && c.budget > 0.0) {
            c.budget = tol;
            c.passed = c.deviation.is_finite() && c.deviation < tol;
        }
    }
    let text = match args.format {
        ReportFormat::Text => {
            let mut s: String = report.checks.iter().map(|c| format!("{c}\n")).collect();
            s += if report.passed() { "overall: PASS\n" } else { "overall: FAIL\n" };
            s
        }
        ReportFormat::Json => serde_json::to_string_pretty(&json!({ "passed": report.passed(), "checks": report.checks }))? + "\n",
    };
    emit(&text, out)?;
    Ok(report.passed())
}

fn label(src: &GraphSource) -> String {
    match src {
        GraphSource::Lattice(n) => n.clone(),
        GraphSource::Square(t) => format!("square:{t}"),
        GraphSource::Quasiperiodic(s) => format!("quasiperiodic:{s}"),
        GraphSource::File(p) => p.clone(),
    }
}
