use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use larg_lab::anchoring::{generate_grid, good_enumeration, validate_enumeration, Anchorable};
use larg_lab::dense_set::{rescale_to_idf, PointSet, Window};
use larg_lab::experiments::{
    box_isomorphism_demo, run_decay_experiment, write_rows, ExperimentConfig, SamplerKind,
    SamplerSpec,
};
use larg_lab::io::{pair_to_vec, read_json, CoordPair, EnumerationFile, PointSetFile, ShapeSpec};
use larg_lab::larg::sample_larg;
use larg_lab::stepiso::{
    is_isometry, is_step_isometry, respects_line_report, Interleaving1D, MapKind, PointMap,
};
use larg_lab::{Coord, Error, Line, Metric, NormShape, Polygon, Rational, Result, Scalar, Sqrt2, Vec2};

#[derive(Parser)]
#[command(name = "larg-lab", version, about = "Random geometric graphs over norm-derived planar metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a point set in a window.
    Sample(SampleArgs),
    /// Sample a LARG graph over a point set.
    Graph(GraphArgs),
    /// Check a map for step-isometry, isometry or line respect.
    Stepiso(StepisoArgs),
    /// Emit line-grid offsets as CSV.
    Grid(GridArgs),
    /// Compute and validate a good enumeration.
    Enumerate(EnumerateArgs),
    /// Monte Carlo experiments.
    Experiment {
        #[command(subcommand)]
        kind: ExperimentKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Rational,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArith {
    Rational,
    Float,
    Sqrt2,
}

#[derive(Args)]
struct SampleArgs {
    /// `x_min,y_min,x_max,y_max`, or a single side length for `[0, side]^2`.
    #[arg(long, default_value = "1")]
    window: String,
    #[arg(long)]
    intensity: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "poisson")]
    sampler: SamplerArg,
    #[arg(long, value_enum, default_value = "rational")]
    mode: ModeArg,
    /// Generator `ax,ay` whose projections must be integer-distance-free
    /// (repeatable); the sample is rescaled until all are.
    #[arg(long = "idf-generators", num_args = 1..)]
    idf_generators: Vec<String>,
    #[arg(long, default_value_t = 64)]
    idf_trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Poisson,
    Product,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    shape: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Arithmetic for distance thresholds; defaults to the point file's mode.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    /// The 1D map on the x-coordinates of the points.
    Explicit1d,
    /// Interleaving map in the box shape's dual coordinates.
    BoxProduct,
    /// Explicit `{domain, images}` JSON given by `--map-file`.
    File,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Step,
    Iso,
    Line,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterleavingArg {
    /// Knots (0,0), (1/2,1/3), (1,1).
    Paper,
    Identity,
}

#[derive(Args)]
struct StepisoArgs {
    #[arg(long, value_enum)]
    map: MapArg,
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    shape: Option<PathBuf>,
    #[arg(long)]
    map_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "step")]
    check: CheckArg,
    #[arg(long, value_enum, default_value = "paper")]
    g: InterleavingArg,
    /// Line `ax,ay,r` meaning `a . x = r`, for `--check line`.
    #[arg(long)]
    line: Option<String>,
    /// Image line; defaults to `--line`.
    #[arg(long)]
    line_image: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Point set whose points the level-0 lines pass through.
    #[arg(long)]
    base: PathBuf,
    #[arg(long)]
    shape: PathBuf,
    #[arg(long)]
    depth: usize,
    /// Integer shifts `|z| <= W` of each base line.
    #[arg(long, default_value_t = 1)]
    window: u32,
    /// Only emit offsets for generator `ax,ay`.
    #[arg(long)]
    emit_offsets: Option<String>,
    #[arg(long, value_enum, default_value = "rational")]
    arith: GridArith,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    shape: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// Partial-isomorphism fraction per prefix size (non-box shapes).
    Decay(ExperimentArgs),
    /// Back-and-forth isomorphism search for box shapes.
    BoxDemo(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV output; falls back to `output.csv` in the config, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report for box-demo; falls back to `output.report`, then stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn parse_coords(s: &str, expected: usize) -> Result<Vec<Coord>> {
    let parts: Vec<Coord> = s
        .split(',')
        .map(|t| Coord::Exact(t.trim().to_string()))
        .collect();
    if parts.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} comma-separated numbers, got {s:?}"
        )));
    }
    Ok(parts)
}

fn parse_vec<S: Scalar>(s: &str) -> Result<Vec2<S>> {
    let c = parse_coords(s, 2)?;
    pair_to_vec(&[c[0].clone(), c[1].clone()])
}

fn parse_window(s: &str) -> Result<Window> {
    let nums: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad window {s:?}")))
        })
        .collect::<Result<_>>()?;
    match nums[..] {
        [side] => Window::square(side),
        [a, b, c, d] => Window::new(a, b, c, d),
        _ => Err(Error::Parse(format!(
            "window must be `side` or `x_min,y_min,x_max,y_max`, got {s:?}"
        ))),
    }
}

fn file_mode(points: &PointSetFile, requested: Option<ModeArg>) -> ModeArg {
    requested.unwrap_or(match points.mode {
        larg_lab::io::Mode::Rational => ModeArg::Rational,
        larg_lab::io::Mode::Float => ModeArg::Float,
    })
}

fn sample(args: SampleArgs) -> Result<()> {
    let spec = SamplerSpec {
        kind: match args.sampler {
            SamplerArg::Poisson => SamplerKind::Poisson,
            SamplerArg::Product => SamplerKind::Product,
        },
        window: parse_window(&args.window)?,
        intensity: args.intensity,
    };
    fn run<S: Scalar>(spec: &SamplerSpec, args: &SampleArgs) -> Result<PointSetFile> {
        let ps: PointSet<S> = spec.sample(args.seed)?;
        let ps = if args.idf_generators.is_empty() {
            ps
        } else {
            let gens = args
                .idf_generators
                .iter()
                .map(|s| parse_vec(s))
                .collect::<Result<Vec<_>>>()?;
            rescale_to_idf(&ps, &gens, args.idf_trials, args.seed)?.1
        };
        Ok(PointSetFile::from_point_set(&ps))
    }
    let file = match args.mode {
        ModeArg::Rational => run::<Rational>(&spec, &args)?,
        ModeArg::Float => run::<f64>(&spec, &args)?,
    };
    emit_json(args.out.as_deref(), &file)
}

fn graph(args: GraphArgs) -> Result<()> {
    let file: PointSetFile = read_json(&args.points)?;
    let shape: ShapeSpec = read_json(&args.shape)?;
    let g = match (file_mode(&file, args.mode), &shape) {
        (ModeArg::Rational, ShapeSpec::Polygonal { .. }) => sample_larg(
            &file.to_point_set::<Rational>()?,
            &shape.polygon::<Rational>()?,
            args.delta,
            args.p,
            args.seed,
        )?,
        _ => sample_larg(
            &file.to_point_set::<f64>()?,
            &shape.norm_shape()?,
            args.delta,
            args.p,
            args.seed,
        )?,
    };
    let mut w = sink(args.out.as_deref())?;
    g.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct MapFile {
    domain: Vec<CoordPair>,
    images: Vec<CoordPair>,
}

#[derive(Serialize)]
struct LineVerdict {
    respected: bool,
    below_violations: Vec<usize>,
    above_violations: Vec<usize>,
}

fn parse_line<S: Scalar>(s: &str) -> Result<Line<S>> {
    let c = parse_coords(s, 3)?;
    let a = pair_to_vec(&[c[0].clone(), c[1].clone()])?;
    Line::new(a, S::from_coord(&c[2])?)
}

fn stepiso_with<S: Scalar, M: Metric<S>>(
    args: &StepisoArgs,
    points: Option<&PointSetFile>,
    metric: &M,
    box_shape: Option<&Polygon<S>>,
) -> Result<()> {
    let need_points = || {
        points
            .ok_or_else(|| Error::InvalidParameter("--points is required for this map".into()))?
            .to_point_set::<S>()
    };
    let g = || match args.g {
        InterleavingArg::Paper => Interleaving1D::<S>::paper(),
        InterleavingArg::Identity => Interleaving1D::identity(),
    };
    let map = match args.map {
        MapArg::Explicit1d => {
            let ps = need_points()?;
            let xs: Vec<S> = ps.points.iter().map(|p| p.x.clone()).collect();
            PointMap::explicit_1d(&xs)?
        }
        MapArg::BoxProduct => {
            let shape = box_shape.ok_or(Error::NotBox)?;
            PointMap::box_product(&need_points()?, shape, &g(), &g())?
        }
        MapArg::File => {
            let path = args
                .map_file
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("--map-file is required".into()))?;
            let f: MapFile = read_json(path)?;
            let conv = |v: &[CoordPair]| v.iter().map(pair_to_vec).collect::<Result<Vec<_>>>();
            PointMap::new(conv(&f.domain)?, conv(&f.images)?, MapKind::Arbitrary)?
        }
    };
    let out = args.out.as_deref();
    match args.check {
        CheckArg::Step => emit_json(out, &is_step_isometry(&map, metric)?),
        CheckArg::Iso => emit_json(out, &is_isometry(&map, metric, args.tol)),
        CheckArg::Line => {
            let spec = args
                .line
                .as_deref()
                .ok_or_else(|| Error::InvalidParameter("--line is required".into()))?;
            let ell = parse_line::<S>(spec)?;
            let image = parse_line::<S>(args.line_image.as_deref().unwrap_or(spec))?;
            let r = respects_line_report(&map, &ell, &image)?;
            emit_json(
                out,
                &LineVerdict {
                    respected: r.respected(),
                    below_violations: r.below_violations,
                    above_violations: r.above_violations,
                },
            )
        }
    }
}

fn stepiso(args: StepisoArgs) -> Result<()> {
    let points: Option<PointSetFile> = args.points.as_ref().map(read_json).transpose()?;
    let shape: ShapeSpec = match &args.shape {
        Some(p) => read_json(p)?,
        None => ShapeSpec::from_polygon(&Polygon::<Rational>::linf()),
    };
    let mode = args.mode.unwrap_or(match &points {
        Some(f) => file_mode(f, None),
        None => ModeArg::Rational,
    });
    match (mode, &shape) {
        (ModeArg::Rational, ShapeSpec::Polygonal { .. }) => {
            let poly = shape.polygon::<Rational>()?;
            let boxed = poly.is_box().then_some(&poly);
            stepiso_with(&args, points.as_ref(), &poly, boxed)
        }
        _ => {
            let norm = shape.norm_shape()?;
            let boxed = norm.as_polygon().filter(|p| p.is_box());
            stepiso_with(&args, points.as_ref(), &norm, boxed)
        }
    }
}

fn grid(args: GridArgs) -> Result<()> {
    let file: PointSetFile = read_json(&args.base)?;
    let shape: ShapeSpec = read_json(&args.shape)?;
    fn run<S: Scalar>(args: &GridArgs, file: &PointSetFile, shape: &ShapeSpec) -> Result<()> {
        let base = file.to_point_set::<S>()?;
        let gens = shape.polygon::<S>()?.generators().to_vec();
        let family = generate_grid(&base.points, &gens, args.depth, args.window)?;
        let only = args.emit_offsets.as_deref().map(parse_vec::<S>).transpose()?;
        let selected: Vec<usize> = match &only {
            Some(a) => vec![family.generator_index(a).ok_or(Error::NotAGenerator)?],
            None => (0..family.generators.len()).collect(),
        };
        let mut w = csv::Writer::from_writer(sink(args.out.as_deref())?);
        w.write_record(["level", "ax", "ay", "offset"])
            .map_err(|e| Error::Parse(e.to_string()))?;
        let text = |c: Coord| match c {
            Coord::Float(v) => v.to_string(),
            Coord::Exact(s) => s,
        };
        for level in 0..=family.depth() {
            for &g in &selected {
                let a = &family.generators[g];
                for off in family.offsets(level, g) {
                    w.write_record([
                        level.to_string(),
                        text(a.x.to_coord()),
                        text(a.y.to_coord()),
                        text(off.to_coord()),
                    ])
                    .map_err(|e| Error::Parse(e.to_string()))?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
    match args.arith {
        GridArith::Rational => run::<Rational>(&args, &file, &shape),
        GridArith::Float => run::<f64>(&args, &file, &shape),
        GridArith::Sqrt2 => run::<Sqrt2>(&args, &file, &shape),
    }
}

fn enumerate(args: EnumerateArgs) -> Result<()> {
    let file: PointSetFile = read_json(&args.points)?;
    let shape: ShapeSpec = read_json(&args.shape)?;
    fn run<S: Scalar, M: Anchorable<S>>(ps: &PointSet<S>, metric: &M) -> Result<EnumerationFile> {
        let e = good_enumeration(ps, metric)?;
        validate_enumeration(&e, ps, metric)?;
        Ok(EnumerationFile::from_enumeration(&e))
    }
    let out = match (file_mode(&file, args.mode), &shape) {
        (ModeArg::Rational, ShapeSpec::Polygonal { .. }) => {
            run(&file.to_point_set::<Rational>()?, &shape.polygon::<Rational>()?)?
        }
        _ => run::<f64, NormShape>(&file.to_point_set()?, &shape.norm_shape()?)?,
    };
    emit_json(args.out.as_deref(), &out)
}

fn experiment(kind: ExperimentKind) -> Result<()> {
    let (args, decay) = match kind {
        ExperimentKind::Decay(a) => (a, true),
        ExperimentKind::BoxDemo(a) => (a, false),
    };
    let cfg: ExperimentConfig = serde_json::from_reader(BufReader::new(File::open(&args.config)?))?;
    let csv_path = args.out.or_else(|| cfg.output.csv.clone().map(PathBuf::from));
    if decay {
        let rows = run_decay_experiment(&cfg)?;
        let mut w = sink(csv_path.as_deref())?;
        write_rows(&mut w, &rows)?;
        return Ok(());
    }
    let report = box_isomorphism_demo(&cfg)?;
    let rows: Vec<_> = report.box_rows.iter().map(|r| r.as_csv_row()).collect();
    let report_path = args.report.or_else(|| cfg.output.report.clone().map(PathBuf::from));
    match (&csv_path, &report_path) {
        (None, None) => {
            // both to stdout: CSV first, then the report
            write_rows(io::stdout().lock(), &rows)?;
            emit_json(None, &report)
        }
        _ => {
            write_rows(sink(csv_path.as_deref())?, &rows)?;
            emit_json(report_path.as_deref(), &report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => sample(a),
        Command::Graph(a) => graph(a),
        Command::Stepiso(a) => stepiso(a),
        Command::Grid(a) => grid(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Experiment { kind } => experiment(kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("larg-lab: {e}");
            ExitCode::FAILURE
        }
    }
}
