//! `spatialnet` command-line front end. Each subcommand runs one stage of
//! the pipeline and communicates with the others through text files.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use spatialnet_core::builders::{
    build_orientation_line_network, build_pixel_similarity_network, estimate_gradient,
    select_edge_pixels, LineMode, SimilarityParams,
};
use spatialnet_core::edgelist::{read_edge_list, write_edge_list, write_positions};
use spatialnet_core::image::{read_image, write_pgm};
use spatialnet_core::measurements::{degree_distribution, node_features, write_features_csv};
use spatialnet_core::saliency::{
    detect_saliency, write_occupancy_csv, SaliencyParams, SolverOptions,
};
use spatialnet_core::segmentation::{
    modularity, segment_image, CommunityMethod, LabelImage, SegmentParams,
};
use spatialnet_core::texture::{
    classify_nearest_centroid, labelled_region_features, patch_features, read_centroids_csv,
    write_centroids_csv, write_features_csv as write_region_csv, RegionFeature,
};
use spatialnet_core::topo_sim::{
    generate_topology, near_square, parse_config, run_sweep, write_sweep_csv, TopologyModel,
    TopologySpec,
};
use spatialnet_core::{GrayImage, SpatialGraph};

#[derive(Debug, Parser)]
#[command(
    name = "spatialnet",
    version,
    about = "Spatial complex networks for image analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a network from an image and write it as an edge list.
    Build(BuildArgs),
    /// Per-node measurements of an edge-list graph.
    Measure(MeasureArgs),
    /// Random-walk saliency map of an image.
    Saliency(SaliencyArgs),
    /// Segment an image by community detection on its similarity network.
    Segment(SegmentArgs),
    /// Texture descriptors of an image or of its labelled regions.
    Texture(TextureArgs),
    /// Generate a processor interconnection topology.
    GenTopo(GenTopoArgs),
    /// Simulate frame-stream processing over generated topologies.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NetworkKind {
    /// Pixel-similarity network over all pixels.
    Similarity,
    /// Orientation-line network over edge pixels.
    Lines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Tangent,
    Normal,
}

impl From<Mode> for LineMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Tangent => LineMode::Tangent,
            Mode::Normal => LineMode::Normal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Greedy,
    LabelPropagation,
}

impl From<Method> for CommunityMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Greedy => CommunityMethod::GreedyModularity,
            Method::LabelPropagation => CommunityMethod::LabelPropagation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Random,
    SmallWorld,
    ScaleFree,
    Lattice,
}

#[derive(Debug, Clone, Args)]
pub struct SimilarityArgs {
    /// Minimum edge weight 1/(1+d), in (0, 1].
    #[arg(short = 'T', long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Neighborhood radius in pixels.
    #[arg(short = 'r', long, default_value_t = 3.0)]
    pub radius: f64,
}

impl SimilarityArgs {
    fn params(&self) -> SimilarityParams {
        SimilarityParams::new(self.threshold, self.radius)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    /// Input PGM/PPM image.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output edge list.
    #[arg(long)]
    pub out: PathBuf,
    /// Node positions CSV (id,x,y).
    #[arg(long)]
    pub positions: Option<PathBuf>,
    /// Network construction.
    #[arg(long, value_enum, default_value_t = NetworkKind::Similarity)]
    pub network: NetworkKind,
    #[command(flatten)]
    pub similarity: SimilarityArgs,
    /// Edge-pixel contrast fraction (lines network).
    #[arg(short = 'c', long, default_value_t = 0.25)]
    pub contrast: f64,
    /// Line direction (lines network).
    #[arg(long, value_enum, default_value_t = Mode::Tangent)]
    pub mode: Mode,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    /// Input edge list.
    #[arg(long)]
    pub graph: PathBuf,
    /// Optional positions CSV for the graph.
    #[arg(long)]
    pub positions: Option<PathBuf>,
    /// Node features CSV (node,degree,strength,clustering,hdeg2,hdeg3).
    #[arg(long)]
    pub out: PathBuf,
    /// Degree histogram CSV (degree,count).
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SaliencyArgs {
    /// Input PGM/PPM image.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Saliency map PGM.
    #[arg(long)]
    pub out: PathBuf,
    /// Raw occupancy CSV (node,x,y,q,occupancy_ratio).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Edge-pixel contrast fraction of the maximum gradient magnitude.
    #[arg(short = 'c', long, default_value_t = 0.25)]
    pub contrast: f64,
    /// Line direction through each edge pixel.
    #[arg(long, value_enum, default_value_t = Mode::Tangent)]
    pub mode: Mode,
    /// L1 convergence tolerance of the power iteration.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Iteration cap; exceeding it is a convergence error.
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Prior saliency indices, CSV x,y,s; unlisted pixels get 1.
    #[arg(long)]
    pub indices: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    /// Input PGM/PPM image.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Label preview PGM.
    #[arg(long)]
    pub out: PathBuf,
    /// Label CSV (x,y,label).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub similarity: SimilarityArgs,
    /// Community detection algorithm.
    #[arg(long, value_enum, default_value_t = Method::Greedy)]
    pub method: Method,
    /// Seed for label propagation.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Merge communities smaller than this many pixels.
    #[arg(long)]
    pub min_size: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TextureArgs {
    /// Input PGM/PPM image.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Region features CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Label CSV from `segment`; without it the whole image is region 0.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Write the features as centroids with this label instead.
    #[arg(long)]
    pub centroid_label: Option<String>,
    /// Centroid CSV to classify the regions against.
    #[arg(long, requires = "classes")]
    pub centroids: Option<PathBuf>,
    /// Classification output CSV (region,label).
    #[arg(long, requires = "centroids")]
    pub classes: Option<PathBuf>,
    #[command(flatten)]
    pub similarity: SimilarityArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenTopoArgs {
    /// Topology model.
    #[arg(long, value_enum)]
    pub model: Model,
    /// Number of nodes.
    #[arg(short = 'n', long)]
    pub nodes: usize,
    /// Edge probability (random).
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    /// Ring degree, even (small-world).
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Rewiring probability (small-world).
    #[arg(long, default_value_t = 0.1)]
    pub p_rew: f64,
    /// Links per new node (scale-free).
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Grid rows (lattice); cols = nodes / rows.
    #[arg(long)]
    pub rows: Option<usize>,
    /// Generator seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output edge list.
    #[arg(long)]
    pub out: PathBuf,
    /// Node positions CSV (id,x,y; lattice only).
    #[arg(long)]
    pub positions: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Sweep configuration (key = value lines).
    #[arg(long)]
    pub config: PathBuf,
    /// Results CSV (model,N,seed,makespan,speedup,avg_path_len).
    #[arg(long)]
    pub out: PathBuf,
    /// Regenerate disconnected topologies with seed+1 (up to 100 attempts).
    #[arg(long)]
    pub retry: bool,
    /// Dispatch from this node instead of the highest-degree one.
    #[arg(long)]
    pub master: Option<usize>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_image(path: &Path) -> Result<GrayImage> {
    read_image(path).with_context(|| format!("{}", path.display()))
}

fn load_graph(path: &Path, positions: Option<&Path>) -> Result<SpatialGraph> {
    let edges = BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    );
    let pos = match positions {
        Some(p) => Some(BufReader::new(
            File::open(p).with_context(|| format!("cannot open {}", p.display()))?,
        )),
        None => None,
    };
    read_edge_list(edges, pos).with_context(|| format!("{}", path.display()))
}

fn save_graph(g: &SpatialGraph, out: &Path, positions: Option<&Path>) -> Result<()> {
    let mut w = create(out)?;
    write_edge_list(g, &mut w)?;
    w.flush()?;
    if let Some(p) = positions {
        let mut w = create(p)?;
        write_positions(g, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// Reads `x,y,s` rows into a dense per-pixel prior (default 1).
fn read_indices(path: &Path, width: usize, height: usize) -> Result<Vec<f64>> {
    let text = read_text(path)?;
    let mut prior = vec![1.0; width * height];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('x')) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [x, y, s] => x
                .parse::<usize>()
                .ok()
                .zip(y.parse::<usize>().ok())
                .zip(s.parse::<f64>().ok()),
            _ => None,
        };
        let ((x, y), s) =
            parsed.with_context(|| format!("{}:{}: expected x,y,s", path.display(), i + 1))?;
        if x >= width || y >= height {
            bail!(
                "{}:{}: pixel ({x}, {y}) outside the {width}x{height} image",
                path.display(),
                i + 1
            );
        }
        prior[y * width + x] = s;
    }
    Ok(prior)
}

fn build(a: &BuildArgs) -> Result<()> {
    let img = load_image(&a.input)?;
    let g = match a.network {
        NetworkKind::Similarity => build_pixel_similarity_network(&img, &a.similarity.params())?,
        NetworkKind::Lines => {
            let edges = select_edge_pixels(&estimate_gradient(&img)?, a.contrast)?;
            build_orientation_line_network(&edges, a.mode.into())?
        }
    };
    save_graph(&g, &a.out, a.positions.as_deref())
}

fn measure(a: &MeasureArgs) -> Result<()> {
    let g = load_graph(&a.graph, a.positions.as_deref())?;
    let features = node_features(&g)?;
    let mut w = create(&a.out)?;
    write_features_csv(&features, &mut w)?;
    w.flush()?;
    if let Some(h) = &a.histogram {
        let mut w = create(h)?;
        degree_distribution(&g).write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn saliency(a: &SaliencyArgs) -> Result<()> {
    let img = load_image(&a.input)?;
    let params = SaliencyParams {
        contrast: a.contrast,
        mode: a.mode.into(),
        solver: SolverOptions {
            tol: a.tol,
            max_iter: a.max_iter,
        },
    };
    let prior = match &a.indices {
        Some(p) => read_indices(p, img.width(), img.height())?,
        None => vec![1.0; img.width() * img.height()],
    };
    let out = detect_saliency(&img, &params, |x, y| prior[y * img.width() + x])?;
    let mut w = create(&a.out)?;
    write_pgm(&out.map, &mut w)?;
    w.flush()?;
    if let Some(csv) = &a.csv {
        let mut w = create(csv)?;
        write_occupancy_csv(&out.edges, &out.occupancy, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn segment(a: &SegmentArgs) -> Result<()> {
    let img = load_image(&a.input)?;
    let params = SegmentParams {
        similarity: a.similarity.params(),
        method: a.method.into(),
        seed: a.seed,
        min_size: a.min_size,
    };
    let seg = segment_image(&img, &params)?;
    let mut w = create(&a.out)?;
    write_pgm(&seg.labels.to_preview(), &mut w)?;
    w.flush()?;
    if let Some(csv) = &a.csv {
        let mut w = create(csv)?;
        seg.labels.write_csv(&mut w)?;
        w.flush()?;
    }
    let q = if seg.network.edge_count() > 0 {
        modularity(&seg.network, &seg.partition)?
    } else {
        0.0
    };
    println!(
        "communities {} modularity {}",
        seg.partition.community_count(),
        q
    );
    Ok(())
}

fn texture(a: &TextureArgs) -> Result<()> {
    let img = load_image(&a.input)?;
    let params = a.similarity.params();
    let rows: Vec<(usize, RegionFeature)> = match &a.labels {
        Some(path) => {
            let labels = LabelImage::read_csv(&read_text(path)?, img.width(), img.height())
                .with_context(|| format!("{}", path.display()))?;
            labelled_region_features(&img, &labels, &params)?
        }
        None => vec![(0, patch_features(&img, &params)?)],
    };
    let mut w = create(&a.out)?;
    match &a.centroid_label {
        Some(label) => {
            let cs: Vec<(String, RegionFeature)> =
                rows.iter().map(|(_, f)| (label.clone(), *f)).collect();
            write_centroids_csv(&cs, &mut w)?;
        }
        None => write_region_csv(&rows, &mut w)?,
    }
    w.flush()?;
    if let (Some(cpath), Some(out)) = (&a.centroids, &a.classes) {
        let centroids = read_centroids_csv(&read_text(cpath)?)
            .with_context(|| format!("{}", cpath.display()))?;
        let mut w = create(out)?;
        writeln!(w, "region,label")?;
        for (region, f) in &rows {
            writeln!(w, "{region},{}", classify_nearest_centroid(f, &centroids)?)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn gen_topo(a: &GenTopoArgs) -> Result<()> {
    let model = match a.model {
        Model::Random => TopologyModel::Random { p: a.p },
        Model::SmallWorld => TopologyModel::SmallWorld {
            k: a.k,
            p_rew: a.p_rew,
        },
        Model::ScaleFree => TopologyModel::ScaleFree { m: a.m },
        Model::Lattice => {
            let (rows, cols) = match a.rows {
                Some(r) => (r, a.nodes.checked_div(r).unwrap_or(0)),
                None => near_square(a.nodes),
            };
            TopologyModel::Lattice { rows, cols }
        }
    };
    let g = generate_topology(&TopologySpec::new(model, a.nodes, a.seed))?;
    save_graph(&g, &a.out, a.positions.as_deref())
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let mut cfg =
        parse_config(&read_text(&a.config)?).with_context(|| format!("{}", a.config.display()))?;
    cfg.retry |= a.retry;
    if a.master.is_some() {
        cfg.master = a.master;
    }
    let rows = run_sweep(&cfg)?;
    let mut w = create(&a.out)?;
    write_sweep_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Build(a) => build(a),
        Command::Measure(a) => measure(a),
        Command::Saliency(a) => saliency(a),
        Command::Segment(a) => segment(a),
        Command::Texture(a) => texture(a),
        Command::GenTopo(a) => gen_topo(a),
        Command::Simulate(a) => simulate(a),
    }
}

/// Collapses an error chain into one line.
pub fn diagnostic(err: &anyhow::Error) -> String {
    format!("{err:#}").replace('\n', " ")
}
