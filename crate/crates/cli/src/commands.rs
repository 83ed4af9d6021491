use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ggmgen::graph::{erdos_renyi, max_cardinality_search, triangulate as triangulate_graph};
use ggmgen::io::{
    format_graph, format_histogram_csv, format_scatter_csv, format_stacked, format_values_csv, parse_stacked,
    read_graph, read_matrix, summarize_entries, write_graph, write_matrix,
};
use ggmgen::{Error, Method, Result, SamplerConfig, SymmetricMatrix, UndirectedGraph};
use sha2::{Digest, Sha256};

use crate::{Experiment, SampleArgs};

/// Flat `key=value` record written next to every batch.
struct Metadata(Vec<(String, String)>);

impl Metadata {
    fn new(command: &str) -> Self {
        let mut m = Metadata(Vec::new());
        m.push("command", command);
        m.push("version", env!("CARGO_PKG_VERSION"));
        m
    }

    fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn graph(&mut self, g: &UndirectedGraph) {
        self.push("p", g.p());
        self.push("edges", g.num_edges());
        self.push("graph_sha256", graph_hash(g));
    }

    fn config(&mut self, cfg: &SamplerConfig) {
        self.push("seed", cfg.seed);
        self.push("sigma_eps", cfg.sigma_eps);
        self.push("burn_in", cfg.burn_in);
        self.push("perturb_law", cfg.perturb_law);
        self.push("entry_law", cfg.entry_law);
        self.push("residual_tol", format!("{:e}", cfg.residual_tol));
        self.push("max_resample", cfg.max_resample);
    }

    fn write(&self, dir: &Path) -> Result<()> {
        let text: String = self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        fs::write(dir.join("metadata.txt"), text)?;
        Ok(())
    }
}

fn graph_hash(g: &UndirectedGraph) -> String {
    Sha256::digest(format_graph(g).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn graph_gen(p: usize, d: f64, seed: u64, out: Option<&Path>) -> Result<ExitCode> {
    let g = erdos_renyi(p, d, seed)?;
    match out {
        Some(path) => write_graph(path, &g)?,
        None => print!("{}", format_graph(&g)),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn triangulate(graph: &Path, out: &Path, order_out: Option<&Path>) -> Result<ExitCode> {
    let g = read_graph(graph)?;
    let t = triangulate_graph(&g);
    write_graph(out, &t.graph)?;
    if let Some(path) = order_out {
        let labels: Vec<String> = t.order.as_slice().iter().map(|v| (v + 1).to_string()).collect();
        fs::write(path, labels.join(" ") + "\n")?;
    }
    println!("fill_edges={}", t.fill.len());
    Ok(ExitCode::SUCCESS)
}

pub fn check_chordal(graph: &Path) -> Result<ExitCode> {
    let g = read_graph(graph)?;
    if max_cardinality_search(&g).1 {
        println!("chordal");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("not-chordal");
        Ok(ExitCode::from(1))
    }
}

fn parse_er(values: &[String]) -> Result<(usize, f64)> {
    let [p, d] = values else {
        return Err(Error::InvalidParameter("--er takes two values: P D".into()));
    };
    let p = p
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("--er: invalid vertex count {p:?}")))?;
    let d = d
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("--er: invalid edge probability {d:?}")))?;
    Ok((p, d))
}

pub fn sample(args: &SampleArgs) -> Result<ExitCode> {
    let method: Method = args.method.parse()?;
    let g = match (&args.graph, &args.er) {
        (Some(path), _) => read_graph(path)?,
        (None, Some(er)) => {
            let (p, d) = parse_er(er)?;
            erdos_renyi(p, d, args.seed)?
        }
        (None, None) => return Err(Error::InvalidParameter("one of --graph or --er is required".into())),
    };
    let mut cfg = SamplerConfig::with_seed(args.seed);
    if let Some(s) = args.sigma_eps {
        cfg.sigma_eps = s;
    }
    if let Some(b) = args.burn_in {
        cfg.burn_in = b;
    }
    if args.n == 0 {
        return Err(Error::InvalidParameter("--n must be positive".into()));
    }

    let batch = method.sample_batch(&g, &cfg, args.correlation, args.n)?;

    fs::create_dir_all(&args.out)?;
    let mut meta = Metadata::new("sample");
    meta.push("method", method);
    meta.push("n", args.n);
    meta.push("correlation", args.correlation);
    meta.push("stacked", args.stacked);
    match &args.er {
        Some(er) => meta.push("graph_source", format!("er {}", er.join(" "))),
        None => meta.push("graph_source", "file"),
    }
    meta.graph(&g);
    meta.config(&cfg);

    write_graph(args.out.join("graph.txt"), &g)?;
    if args.stacked {
        fs::write(args.out.join("matrices.csv"), format_stacked(&batch))?;
    } else {
        let width = args.n.to_string().len();
        for (k, m) in batch.iter().enumerate() {
            write_matrix(args.out.join(format!("matrix_{:0width$}.csv", k + 1)), m)?;
        }
    }
    meta.write(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn read_batch(input: &Path) -> Result<Vec<SymmetricMatrix>> {
    if !input.is_dir() {
        return parse_stacked(&fs::read_to_string(input)?);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(input)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|f| {
        f.extension().is_some_and(|e| e == "csv")
            && f.file_name().is_some_and(|n| n.to_string_lossy().starts_with("matrix_"))
    });
    files.sort();
    if files.is_empty() {
        if input.join("matrices.csv").is_file() {
            return parse_stacked(&fs::read_to_string(input.join("matrices.csv"))?);
        }
        return Err(Error::InvalidParameter(format!("no matrix files in {}", input.display())));
    }
    files.iter().map(read_matrix).collect()
}

pub fn stats(input: &Path, graph: Option<&Path>, out: &Path) -> Result<ExitCode> {
    let batch = read_batch(input)?;
    let p = batch.first().map_or(0, SymmetricMatrix::dim);
    let positions: Vec<(usize, usize)> = match graph {
        Some(path) => {
            let g = read_graph(path)?;
            if g.p() != p {
                return Err(Error::DimensionMismatch {
                    expected: g.p(),
                    found: p,
                });
            }
            g.edges().collect()
        }
        None => (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).collect(),
    };
    let summary = summarize_entries(&batch, &positions, None)?;

    fs::create_dir_all(out)?;
    fs::write(out.join("values.csv"), format_values_csv(&summary))?;
    fs::write(out.join("histogram.csv"), format_histogram_csv(&summary))?;
    println!("samples={} positions={}", batch.len(), positions.len());
    Ok(ExitCode::SUCCESS)
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::Elliptope3 => "elliptope3",
            Experiment::Margdens => "margdens",
            Experiment::MargdensChordal => "margdens-chordal",
            Experiment::Chain50 => "chain50",
        }
    }

    fn setup(self, seed: u64) -> Result<(UndirectedGraph, [Method; 3])> {
        Ok(match self {
            Experiment::Elliptope3 => (
                UndirectedGraph::chain(3),
                [Method::DiagDom, Method::Port, Method::Uniform],
            ),
            Experiment::Margdens => (erdos_renyi(50, 0.05, seed)?, [Method::DiagDom, Method::Port, Method::PortChol]),
            Experiment::MargdensChordal => (
                triangulate_graph(&erdos_renyi(50, 0.05, seed)?).graph,
                [Method::DiagDom, Method::Port, Method::Uniform],
            ),
            Experiment::Chain50 => (
                UndirectedGraph::chain(50),
                [Method::DiagDom, Method::Port, Method::Uniform],
            ),
        })
    }
}

pub fn experiment(name: Experiment, n: usize, seed: u64, out: &Path) -> Result<ExitCode> {
    if n == 0 {
        return Err(Error::InvalidParameter("--n must be positive".into()));
    }
    let (g, methods) = name.setup(seed)?;
    let cfg = SamplerConfig::with_seed(seed);
    let positions: Vec<(usize, usize)> = g.edges().collect();
    let scatter = (name == Experiment::Elliptope3).then_some(((0, 1), (1, 2)));

    let summaries = methods
        .iter()
        .map(|m| summarize_entries(&m.sample_batch(&g, &cfg, true, n)?, &positions, scatter))
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(out)?;
    write_graph(out.join("graph.txt"), &g)?;
    for (method, summary) in methods.iter().zip(&summaries) {
        fs::write(out.join(format!("{method}_values.csv")), format_values_csv(summary))?;
        fs::write(out.join(format!("{method}_histogram.csv")), format_histogram_csv(summary))?;
        if scatter.is_some() {
            fs::write(out.join(format!("{method}_scatter.csv")), format_scatter_csv(summary))?;
        }
    }
    let mut meta = Metadata::new("experiment");
    meta.push("experiment", name.name());
    meta.push("methods", methods.map(Method::name).join(","));
    meta.push("n", n);
    meta.push("correlation", true);
    meta.graph(&g);
    meta.config(&cfg);
    meta.write(out)?;
    println!("{}: {} methods, {} entries, n={n}", name.name(), methods.len(), positions.len());
    Ok(ExitCode::SUCCESS)
}
