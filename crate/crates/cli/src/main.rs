//! `polar-walsh` command-line front end.
//!
//! Exit status: 0 on success, 2 for usage and flag errors, 1 for data errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polar_walsh::convert::{cartesian_to_polar, polar_to_cartesian, render_polar, CartesianImage};
use polar_walsh::filter::{remove_banding, spectrum_report, FilterRequest};
use polar_walsh::geometry::{render_basis, MeasureKind, PolarGrid};
use polar_walsh::imgio::{
    decode_pgm, encode_pgm, read_pgm, read_polar, write_pgm, write_polar, PgmMode,
};
use polar_walsh::matrix::Matrix;
use polar_walsh::metrics::{Mask, QualityReport};
use polar_walsh::noise::{add_noise, gen_banding_polar, render_airy, NoiseSpec};
use polar_walsh::transform::{
    fwht_natural, hybrid_wht, wht2d, wht2d_classical, HybridConfig, MeasurementModel,
    TransformOrder,
};

#[derive(Parser, Debug)]
#[command(
    name = "polar-walsh",
    version,
    about = "Polar Walsh-Hadamard image processing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// 1D transform of a vector, or 2D transform of a PGM image.
    Transform(TransformArgs),
    /// Render a polar Walsh basis function as a PGM.
    Basis(BasisArgs),
    /// Convert a PGM to a polar (PWP1) file.
    ToPolar(ToPolarArgs),
    /// Render a polar (PWP1) file back onto a Cartesian raster.
    ToCartesian(ToCartesianArgs),
    /// Generate a banding or Airy noise image.
    GenNoise(GenNoiseArgs),
    /// Add a noise image to an image.
    AddNoise(AddNoiseArgs),
    /// Remove circular and/or azimuthal banding.
    Denoise(DenoiseArgs),
    /// Summarize the polar sequency spectrum of a PGM.
    Spectrum(SpectrumArgs),
    /// Compare two PGM images.
    Metrics(MetricsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Measure {
    Area,
    Radial,
}

impl From<Measure> for MeasureKind {
    fn from(m: Measure) -> Self {
        match m {
            Measure::Area => MeasureKind::UniformArea,
            Measure::Radial => MeasureKind::UniformRadial,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Order {
    Natural,
    Sequency,
}

impl From<Order> for TransformOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Natural => TransformOrder::Natural,
            Order::Sequency => TransformOrder::Sequency,
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct GridArgs {
    /// Number of rings.
    #[arg(long, default_value_t = 256)]
    n1: usize,
    /// Number of angular sectors.
    #[arg(long, default_value_t = 512)]
    n2: usize,
    #[arg(long, value_enum, default_value_t = Measure::Area)]
    measure: Measure,
}

impl GridArgs {
    fn check(&self) -> Result<(), Failure> {
        usage(PolarGrid::new(self.n1, self.n2, 1.0, self.measure.into()))?;
        Ok(())
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct HybridArgs {
    /// Simulate finite sampling with this many shots (exact probabilities
    /// when omitted).
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    epsilon: f64,
}

impl HybridArgs {
    fn config(&self) -> Result<HybridConfig, Failure> {
        let model = match self.shots {
            Some(shots) => MeasurementModel::Shots {
                shots,
                seed: self.seed,
            },
            None => MeasurementModel::Exact,
        };
        let cfg = HybridConfig {
            epsilon: self.epsilon,
            model,
        };
        usage(cfg.validate())?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct TransformArgs {
    /// Vector file (whitespace-separated decimals) or PGM; stdin when
    /// omitted or `-`.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Order::Sequency)]
    order: Order,
    #[command(flatten)]
    hybrid: HybridArgs,
}

#[derive(Args, Debug)]
struct BasisArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Radial sequency index.
    #[arg(long)]
    j: usize,
    /// Angular sequency index.
    #[arg(long)]
    p: usize,
    #[arg(long, value_enum, default_value_t = Order::Sequency)]
    order: Order,
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Output PGM; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write ASCII (P2) instead of binary (P5).
    #[arg(long)]
    ascii: bool,
}

#[derive(Args, Debug)]
struct ToPolarArgs {
    input: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct ToCartesianArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long)]
    ascii: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum NoiseKind {
    Circular,
    Azimuthal,
    Airy,
}

#[derive(Args, Debug)]
struct GenNoiseArgs {
    #[arg(value_enum)]
    kind: NoiseKind,
    output: PathBuf,
    #[arg(long, default_value_t = 512)]
    rows: usize,
    #[arg(long, default_value_t = 512)]
    cols: usize,
    #[command(flatten)]
    grid: GridArgs,
    /// Band period in rings or sectors.
    #[arg(long, default_value_t = 8)]
    period: usize,
    /// Band value.
    #[arg(long, default_value_t = 40.0)]
    amplitude: f64,
    /// Airy argument at the disk edge.
    #[arg(long, default_value_t = 10.0)]
    ka: f64,
    #[arg(long, default_value_t = 1.0)]
    i0: f64,
    /// Airy contrast exponent; values above 1 lift the outer rings.
    #[arg(long, default_value_t = 1.0)]
    enhance: f64,
    #[arg(long)]
    ascii: bool,
}

#[derive(Args, Debug)]
struct AddNoiseArgs {
    image: PathBuf,
    noise: PathBuf,
    output: PathBuf,
    /// Clip the sum to [0, 255] before writing.
    #[arg(long)]
    clamp: bool,
    #[arg(long)]
    ascii: bool,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    input: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// Remove circular bands.
    #[arg(long)]
    cflag: bool,
    /// Remove azimuthal bands.
    #[arg(long)]
    aflag: bool,
    #[command(flatten)]
    hybrid: HybridArgs,
    #[arg(long)]
    ascii: bool,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    input: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    hybrid: HybridArgs,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    reference: PathBuf,
    test: PathBuf,
    #[arg(long, default_value = "255", value_parser = ["255", "512"])]
    peak: String,
    /// Restrict MSE and PSNR to the centred disk.
    #[arg(long)]
    disk: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<polar_walsh::Error> for Failure {
    fn from(e: polar_walsh::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn usage<T>(r: polar_walsh::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

fn pgm_mode(ascii: bool) -> PgmMode {
    if ascii {
        PgmMode::P2
    } else {
        PgmMode::P5
    }
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn load_pgm(path: &Path) -> Result<CartesianImage, Failure> {
    read_pgm(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn parse_vector(bytes: &[u8]) -> Result<Vec<f64>, Failure> {
    let text = std::str::from_utf8(bytes).map_err(|_| Failure::Data("input is not text".into()))?;
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Failure::Data(format!("not a number: {t:?}")))
        })
        .collect()
}

fn format_row(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn format_matrix(m: &Matrix) -> String {
    (0..m.rows()).map(|i| format_row(m.row(i)) + "\n").collect()
}

fn transform(args: &TransformArgs) -> Result<String, Failure> {
    let cfg = args.hybrid.config()?;
    if args.order == Order::Natural && args.hybrid.shots.is_some() {
        return Err(Failure::Usage("--shots requires --order sequency".into()));
    }
    let bytes = read_input(args.input.as_deref())?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        let img = decode_pgm(&bytes)?;
        let out = match args.order {
            Order::Natural => wht2d_classical(img.pixels(), TransformOrder::Natural)?,
            Order::Sequency => wht2d(img.pixels(), &cfg)?,
        };
        return Ok(format_matrix(&out));
    }
    let v = parse_vector(&bytes)?;
    let out = match args.order {
        Order::Natural => fwht_natural(&v)?,
        Order::Sequency => hybrid_wht(&v, &cfg)?,
    };
    Ok(format_row(&out) + "\n")
}

fn basis(args: &BasisArgs) -> Result<(), Failure> {
    let grid = usage(PolarGrid::new(
        args.grid.n1,
        args.grid.n2,
        1.0,
        args.grid.measure.into(),
    ))?;
    let img = usage(render_basis(
        &grid,
        args.j,
        args.p,
        args.order.into(),
        args.size,
    ))?;
    let bytes = encode_pgm(&img, pgm_mode(args.ascii))?;
    match &args.output {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn to_polar(args: &ToPolarArgs) -> Result<(), Failure> {
    args.grid.check()?;
    let img = load_pgm(&args.input)?;
    let polar = cartesian_to_polar(&img, args.grid.n1, args.grid.n2, args.grid.measure.into())?;
    write_polar(&polar, &args.output)?;
    Ok(())
}

fn to_cartesian(args: &ToCartesianArgs) -> Result<(), Failure> {
    if args.rows < 2 || args.cols < 2 {
        return Err(Failure::Usage(
            "--rows and --cols must be at least 2".into(),
        ));
    }
    let polar = read_polar(&args.input)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.input.display())))?;
    let img = polar_to_cartesian(&polar, args.rows, args.cols)?;
    write_pgm(&img, &args.output, pgm_mode(args.ascii))?;
    Ok(())
}

fn gen_noise(args: &GenNoiseArgs) -> Result<(), Failure> {
    let (rows, cols) = (args.rows, args.cols);
    if rows < 2 || cols < 2 {
        return Err(Failure::Usage(
            "--rows and --cols must be at least 2".into(),
        ));
    }
    let img = match args.kind {
        NoiseKind::Airy => {
            if rows != cols {
                return Err(Failure::Usage(
                    "airy noise needs --rows equal to --cols".into(),
                ));
            }
            usage(render_airy(rows, args.ka, args.i0, args.enhance))?
        }
        NoiseKind::Circular | NoiseKind::Azimuthal => {
            args.grid.check()?;
            let measure = args.grid.measure.into();
            let r_max = (rows.min(cols) / 2) as f64;
            let grid = usage(PolarGrid::new(args.grid.n1, args.grid.n2, r_max, measure))?;
            let spec = if args.kind == NoiseKind::Circular {
                NoiseSpec::CircularBands {
                    period: args.period,
                    amplitude: args.amplitude,
                    measure,
                }
            } else {
                NoiseSpec::AzimuthalBands {
                    period: args.period,
                    amplitude: args.amplitude,
                }
            };
            let bands = usage(gen_banding_polar(&grid, &spec))?;
            render_polar(&bands, rows, cols, 0.0)?
        }
    };
    write_pgm(&img, &args.output, pgm_mode(args.ascii))?;
    Ok(())
}

fn add_noise_cmd(args: &AddNoiseArgs) -> Result<(), Failure> {
    let img = load_pgm(&args.image)?;
    let noise = load_pgm(&args.noise)?;
    let sum = add_noise(&img, &noise, args.clamp)?;
    write_pgm(&sum, &args.output, pgm_mode(args.ascii))?;
    Ok(())
}

fn filter_request(
    grid: &GridArgs,
    cflag: bool,
    aflag: bool,
    hybrid: HybridConfig,
) -> FilterRequest {
    FilterRequest {
        n1: grid.n1,
        n2: grid.n2,
        measure: grid.measure.into(),
        cflag,
        aflag,
        hybrid,
    }
}

fn denoise(args: &DenoiseArgs) -> Result<(), Failure> {
    args.grid.check()?;
    let cfg = args.hybrid.config()?;
    let img = load_pgm(&args.input)?;
    let req = filter_request(&args.grid, args.cflag, args.aflag, cfg);
    let out = remove_banding(&img, &req)?;
    write_pgm(&out, &args.output, pgm_mode(args.ascii))?;
    Ok(())
}

fn spectrum(args: &SpectrumArgs) -> Result<String, Failure> {
    args.grid.check()?;
    let cfg = args.hybrid.config()?;
    let img = load_pgm(&args.input)?;
    let report = spectrum_report(&img, &filter_request(&args.grid, false, false, cfg))?;
    Ok(report.summary())
}

fn metrics(args: &MetricsArgs) -> Result<String, Failure> {
    let peak: f64 = args
        .peak
        .parse()
        .map_err(|_| Failure::Usage("bad --peak".into()))?;
    let a = load_pgm(&args.reference)?;
    let b = load_pgm(&args.test)?;
    let mask = args.disk.then(|| Mask::disk(a.rows(), a.cols()));
    let report = QualityReport::compute(&a, &b, peak, mask.as_ref())?;
    Ok(report.to_string())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let text = match &cli.command {
        Command::Transform(a) => Some(transform(a)?),
        Command::Basis(a) => {
            basis(a)?;
            None
        }
        Command::ToPolar(a) => {
            to_polar(a)?;
            None
        }
        Command::ToCartesian(a) => {
            to_cartesian(a)?;
            None
        }
        Command::GenNoise(a) => {
            gen_noise(a)?;
            None
        }
        Command::AddNoise(a) => {
            add_noise_cmd(a)?;
            None
        }
        Command::Denoise(a) => {
            denoise(a)?;
            None
        }
        Command::Spectrum(a) => Some(spectrum(a)?),
        Command::Metrics(a) => Some(metrics(a)?),
    };
    if let Some(text) = text {
        io::stdout().lock().write_all(text.as_bytes())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Prints help/version to stdout with status 0, errors to stderr with 2.
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("polar-walsh: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("polar-walsh: {msg}");
            ExitCode::from(1)
        }
    }
}
