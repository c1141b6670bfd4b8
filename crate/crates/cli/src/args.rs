//! Command-line and config-file options.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use slsem::analysis::BoundaryModel;
use slsem::basis::NodeKind;
use slsem::operator::{CflReference, FluxWeight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Simulate,
    Convergence,
    Mea,
    Dispersion,
    Vn,
    Spectrum,
    Stencil,
}

impl Command {
    pub fn default_stem(self) -> &'static str {
        match self {
            Command::Simulate => "solution",
            Command::Convergence => "convergence",
            Command::Mea => "mea",
            Command::Dispersion => "dispersion",
            Command::Vn => "vn",
            Command::Spectrum => "spectrum",
            Command::Stencil => "stencil",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Me,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Range {
    /// lo, lo+step, … up to hi (inclusive within rounding).
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "slsem",
    version,
    about = "Semi-Lagrangian spectral element advection: simulations and analyses",
    args_override_self = true
)]
pub struct Cli {
    pub command: Command,

    /// Polynomial degree P.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true, value_parser = parse_degree)]
    pub p: usize,

    /// chebyshev, uniform or alpha:<value>.
    #[arg(long, default_value = "chebyshev", value_parser = parse_nodes)]
    pub nodes: NodeKind,

    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(usize))]
    pub elements: usize,

    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true, value_parser = parse_positive)]
    pub cfl: f64,

    #[arg(long, default_value = "min_spacing", value_parser = parse_cfl_ref)]
    pub cfl_ref: CflReference,

    /// upwind or a number.
    #[arg(long, default_value = "upwind", allow_negative_numbers = true, value_parser = parse_omega)]
    pub omega: FluxWeight,

    #[arg(long, default_value_t = 1.0, value_parser = parse_nonnegative)]
    pub t_end: f64,

    /// Modified-equation / series truncation order.
    #[arg(long, default_value_t = 13, value_parser = parse_terms)]
    pub terms: usize,

    /// Element counts for the convergence study, comma separated.
    #[arg(long, default_value = "10,20,30,40,50", value_parser = parse_k_list)]
    pub k_list: KList,

    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,

    /// Wavenumber samples (default 2048 for dispersion, 4096 for vn).
    #[arg(long)]
    pub theta_points: Option<usize>,

    #[arg(long, default_value_t = std::f64::consts::PI, value_parser = parse_positive)]
    pub theta_max: f64,

    /// Bisection bracket lo:hi for the stability limit.
    #[arg(long, value_parser = parse_bracket)]
    pub bracket: Option<(f64, f64)>,

    /// Courant sweep lo:hi:step.
    #[arg(long, value_parser = parse_range)]
    pub cfl_range: Option<Range>,

    /// ω sweep lo:hi:step for spectrum (fixed --cfl).
    #[arg(long, allow_negative_numbers = true, value_parser = parse_range)]
    pub omega_range: Option<Range>,

    #[arg(long, default_value = "periodic", value_parser = parse_bc)]
    pub bc: BoundaryModel,

    /// Element width for the analysis commands.
    #[arg(long, default_value_t = 0.1, value_parser = parse_positive)]
    pub dx: f64,

    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    /// File of `key = value` lines; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KList(pub Vec<usize>);

impl Cli {
    pub fn output_path(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| {
            let ext = match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            PathBuf::from(format!("{}.{ext}", self.command.default_stem()))
        })
    }
}

/// Config-file options become flags placed before the command-line ones, so
/// the command line overrides them.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let path = find_config(&argv);
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("config {}: {e}", path.display()))?;
    let mut injected = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config {} line {}: expected `key = value`", path.display(), n + 1))?;
        let key = key.trim().replace('_', "-");
        if key == "config" {
            return Err(format!("config {} line {}: nested config", path.display(), n + 1));
        }
        // `cfl_ref = min_spacing` keeps its underscore in the value.
        injected.push(OsString::from(format!("--{key}={}", value.trim())));
    }
    let mut out = Vec::with_capacity(argv.len() + injected.len());
    let mut it = argv.into_iter();
    out.extend(it.next());
    out.extend(injected);
    out.extend(it);
    Ok(out)
}

fn find_config(argv: &[OsString]) -> Option<PathBuf> {
    let mut found = None;
    let mut it = argv.iter().skip(1);
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            found = it.next().map(PathBuf::from);
        } else if let Some(v) = s.strip_prefix("--config=") {
            found = Some(PathBuf::from(v));
        }
    }
    found
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn parse_nonnegative(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {v}"))
    }
}

fn parse_degree(s: &str) -> Result<usize, String> {
    let v: i64 = s.trim().parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if v < 0 {
        return Err(format!("degree must be non-negative, got {v}"));
    }
    if v as usize > slsem::basis::MAX_DEGREE {
        return Err(format!("degree must be at most {}, got {v}", slsem::basis::MAX_DEGREE));
    }
    Ok(v as usize)
}

fn parse_terms(s: &str) -> Result<usize, String> {
    let v: usize = s.trim().parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v < 2 {
        return Err(format!("need at least 2 terms, got {v}"));
    }
    Ok(v)
}

pub fn parse_nodes(s: &str) -> Result<NodeKind, String> {
    match s.trim() {
        "chebyshev" => Ok(NodeKind::Chebyshev),
        "uniform" => Ok(NodeKind::Uniform),
        other => match other.strip_prefix("alpha:") {
            Some(a) => {
                let a = parse_f64(a)?;
                if a > 0.0 && a < 0.5 {
                    Ok(NodeKind::SymmetricAlpha(a))
                } else {
                    Err(format!("alpha must lie in (0, 0.5), got {a}"))
                }
            }
            None => Err(format!("unknown node family `{other}` (chebyshev, uniform, alpha:<value>)")),
        },
    }
}

fn parse_cfl_ref(s: &str) -> Result<CflReference, String> {
    match s.trim() {
        "min_spacing" => Ok(CflReference::MinSpacing),
        "element" => Ok(CflReference::Element),
        other => Err(format!("unknown cfl reference `{other}` (min_spacing, element)")),
    }
}

fn parse_omega(s: &str) -> Result<FluxWeight, String> {
    match s.trim() {
        "upwind" => Ok(FluxWeight::Upwind),
        other => parse_f64(other).map(FluxWeight::LaxFriedrichs),
    }
}

fn parse_bc(s: &str) -> Result<BoundaryModel, String> {
    match s.trim() {
        "periodic" => Ok(BoundaryModel::Periodic),
        "zero_neighbor" => Ok(BoundaryModel::ZeroNeighbor),
        other => Err(format!("unknown boundary model `{other}` (periodic, zero_neighbor)")),
    }
}

fn parse_k_list(s: &str) -> Result<KList, String> {
    let ks = s
        .split(',')
        .map(|k| match k.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(format!("`{k}` is not a positive element count")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if ks.len() < 2 {
        return Err("need at least two element counts".into());
    }
    Ok(KList(ks))
}

fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("`{s}` is not lo:hi"))?;
    let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(format!("bracket needs lo < hi, got {lo}:{hi}"))
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(format!("`{s}` is not lo:hi:step"));
    };
    let r = Range { lo: parse_f64(lo)?, hi: parse_f64(hi)?, step: parse_f64(step)? };
    if !(r.step > 0.0 && r.hi >= r.lo) {
        return Err(format!("range needs step > 0 and hi >= lo, got {s}"));
    }
    if r.values().len() > 100_000 {
        return Err(format!("range {s} has too many points"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_families() {
        assert_eq!(parse_nodes("alpha:0.25"), Ok(NodeKind::SymmetricAlpha(0.25)));
        assert!(parse_nodes("alpha:0.7").is_err());
        assert!(parse_nodes("lobatto").is_err());
    }

    #[test]
    fn ranges() {
        let r = parse_range("0.1:0.5:0.1").unwrap();
        assert_eq!(r.values().len(), 5);
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("0:1").is_err());
    }

    #[test]
    fn degrees() {
        assert_eq!(parse_degree("3"), Ok(3));
        assert!(parse_degree("-1").is_err());
        assert!(parse_degree("16").is_err());
    }

    #[test]
    fn command_line_overrides_config() {
        let dir = std::env::temp_dir().join(format!("slsem-args-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("run.cfg");
        std::fs::write(&cfg, "# comment\np = 3\ncfl_ref = element\ncfl = 0.4\n").unwrap();
        let argv: Vec<OsString> = ["slsem", "mea", "--cfl", "0.2", "--config"]
            .iter()
            .map(OsString::from)
            .chain([cfg.clone().into_os_string()])
            .collect();
        let cli = Cli::try_parse_from(expand_config(argv).unwrap()).unwrap();
        assert_eq!(cli.p, 3);
        assert_eq!(cli.cfl, 0.2);
        assert_eq!(cli.cfl_ref, CflReference::Element);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
