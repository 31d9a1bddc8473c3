use std::fmt;

use clap::Args;
use lightpath::arena::FillPolicy;
use lightpath::contract::{InitializableArray, ParamError};
use lightpath::lightpath::{Fault, HistWord, LightPathArray, PartialLightPathArray};
use lightpath::methods::{build, tree_params, Method, Params};
use lightpath::word::Word;

/// Failure modes of a command, mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameters (exit 2).
    Usage(String),
    /// A divergence, violation or fault (exit 1).
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Method selection shared by the subcommands.
#[derive(Args, Clone, Debug)]
pub struct MethodArgs {
    /// Universe size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Tree height parameter of the light-path methods.
    #[arg(long)]
    pub t: Option<u32>,
    /// Height of the navarro hybrid.
    #[arg(long)]
    pub h: Option<usize>,
    /// Entry width in bits (tries and packed arrays).
    #[arg(long)]
    pub b: Option<u32>,
    /// Machine word width.
    #[arg(long, default_value_t = 64, value_parser = parse_width)]
    pub w: u32,
}

impl MethodArgs {
    pub fn n(&self) -> CliResult<usize> {
        match self.n {
            Some(0) => Err(CliError::Usage("--n must be at least 1".into())),
            Some(n) => Ok(n),
            None => Err(CliError::Usage("--n is required".into())),
        }
    }

    pub fn params(&self) -> Params {
        Params { t: self.t, h: self.h, b: self.b }
    }
}

fn parse_width(s: &str) -> Result<u32, String> {
    match s {
        "8" | "16" | "32" | "64" => Ok(s.parse().unwrap()),
        _ => Err(format!("word width must be 8, 16, 32 or 64, not {s}")),
    }
}

pub fn parse_fault(s: &str) -> CliResult<Fault> {
    match s {
        "skip-case5-move" => Ok(Fault::SkipCase5Move),
        _ => Err(CliError::Usage(format!("unknown fault {s:?}"))),
    }
}

/// Builds a method, optionally with a test-only mutation (single trees only).
pub fn make<W: Word + HistWord>(
    method: Method,
    n: usize,
    params: Params,
    fill: FillPolicy,
    fault: Option<Fault>,
) -> CliResult<Box<dyn InitializableArray<W>>> {
    let Some(fault) = fault else {
        return Ok(build::<W>(method, n, params, fill)?);
    };
    match method {
        Method::Core => {
            let (d, t) = tree_params(n as u64, params.t, W::BITS, true)?;
            let mut a = LightPathArray::<W>::new(d, t, fill)?;
            a.inject_fault(fault);
            Ok(Box::new(a))
        }
        Method::Partial => {
            let (d, t) = tree_params(n as u64, params.t, W::BITS, false)?;
            let mut a = PartialLightPathArray::<W>::new(n, d, t, fill)?;
            a.inject_fault(fault);
            Ok(Box::new(a))
        }
        _ => Err(CliError::Usage(format!("faults apply to lightpath-core and lightpath-partial, not {method}"))),
    }
}

pub fn parse_list<T: std::str::FromStr<Err = String>>(s: &str) -> CliResult<Vec<T>> {
    s.split(',').map(|x| x.trim().parse().map_err(CliError::Usage)).collect()
}

/// Calls `$f::<W>(args...)` with `W` chosen by the word width `$w`.
#[macro_export]
macro_rules! with_word {
    ($w:expr, $f:ident ( $($arg:expr),* $(,)? )) => {
        match $w {
            8 => $f::<u8>($($arg),*),
            16 => $f::<u16>($($arg),*),
            32 => $f::<u32>($($arg),*),
            _ => $f::<u64>($($arg),*),
        }
    };
}

/// Nearest-rank percentiles of a sample.
#[derive(Clone, Copy, Debug, Default, serde::Serialize)]
pub struct Percentiles {
    pub count: usize,
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

impl Percentiles {
    pub fn of(mut v: Vec<u64>) -> Self {
        if v.is_empty() {
            return Percentiles::default();
        }
        v.sort_unstable();
        let at = |q: f64| v[((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Percentiles { count: v.len(), p50: at(0.5), p90: at(0.9), p99: at(0.99), max: *v.last().unwrap() }
    }
}
