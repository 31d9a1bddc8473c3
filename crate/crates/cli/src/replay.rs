//! `validate` and `dump`: replaying an ops file against one structure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clap::Args;
use lightpath::arena::FillPolicy;
use lightpath::clearable::ClearableArray;
use lightpath::contract::InitializableArray;
use lightpath::lightpath::{Forest, HistWord, LightPathArray, PartialLightPathArray};
use lightpath::methods::{tree_params, Method, Params};
use lightpath::oracle::{check_equivalence, parse_ops, Divergence, FailureReport, Op, ValidateEvery};
use lightpath::word::Word;

use crate::common::{make, parse_fault, CliError, CliResult, MethodArgs};

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long, default_value = "lightpath")]
    pub method: Method,
    #[command(flatten)]
    pub m: MethodArgs,
    #[arg(long, default_value = "rand")]
    pub fill: FillPolicy,
    /// One op per line: `W <index> <value>` or `R <index> [<expected>]`.
    #[arg(long, conflicts_with = "artifact", required_unless_present = "artifact")]
    pub ops_file: Option<PathBuf>,
    /// A failure report from `fuzz`; its method and parameters replace the flags.
    #[arg(long)]
    pub artifact: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DumpArgs {
    /// One of lightpath, forest, lightpath-core, lightpath-partial.
    #[arg(long, default_value = "lightpath")]
    pub method: Method,
    #[command(flatten)]
    pub m: MethodArgs,
    #[arg(long, default_value = "rand")]
    pub fill: FillPolicy,
    #[arg(long)]
    pub ops_file: PathBuf,
}

fn read_file(p: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

pub fn validate(args: &ValidateArgs) -> CliResult<String> {
    match &args.artifact {
        Some(p) => {
            let report: FailureReport = serde_json::from_str(read_file(p)?.trim())
                .map_err(|e| CliError::Usage(format!("bad failure report: {e}")))?;
            crate::with_word!(report.w, replay_artifact(&report))
        }
        None => crate::with_word!(args.m.w, validate_ops(args)),
    }
}

/// Replays `ops`, validating after every write. Returns the first
/// divergence; out-of-range indices and arena faults become errors.
fn replay<W: Word>(a: &mut dyn InitializableArray<W>, ops: &[Op<W>]) -> CliResult<Option<Divergence>> {
    let n = a.len();
    let mut oracle: Vec<W> = (0..n).map(|l| a.initial_value(l)).collect();
    let mut shadow: Vec<Option<W>> = vec![None; n];
    for (i, op) in ops.iter().enumerate() {
        let l = op.index();
        let step = catch_unwind(AssertUnwindSafe(|| match *op {
            Op::Write(l, x) => {
                a.write(l, x);
                None
            }
            Op::Read(l, _) => Some(a.read(l)),
        }));
        let got = match step {
            Err(e) => return Err(CliError::Failed(format!("op {i} ({op}): {}", panic_message(e)))),
            Ok(_) if l >= n => {
                return Err(CliError::Failed(format!("op {i} ({op}): index {l} out of range for n = {n}, no fault raised")))
            }
            Ok(g) => g,
        };
        match (*op, got) {
            (Op::Write(l, x), _) => {
                oracle[l] = x;
                shadow[l] = Some(x);
                if let Err(v) = a.validate(&shadow) {
                    return Ok(Some(Divergence::Invariant { op_index: i, invariant: v.invariant.to_string(), detail: v.detail }));
                }
            }
            (Op::Read(l, expected), Some(g)) => {
                let want = expected.unwrap_or(oracle[l]);
                if g != want {
                    return Ok(Some(Divergence::Value { op_index: i, expected: want.to_u64(), got: g.to_u64() }));
                }
            }
            (Op::Read(..), None) => unreachable!(),
        }
    }
    Ok(None)
}

fn validate_ops<W: Word + HistWord>(args: &ValidateArgs) -> CliResult<String> {
    let text = read_file(args.ops_file.as_ref().expect("clap requires it"))?;
    let ops = parse_ops::<W>(&text).map_err(CliError::Usage)?;
    let hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let result = make::<W>(args.method, args.m.n()?, args.m.params(), args.fill, None).and_then(|mut a| replay(&mut *a, &ops));
    std::panic::set_hook(hook);
    match result? {
        None => Ok(format!("ok: {} ops, structure valid after every write\n", ops.len())),
        Some(d) => Err(CliError::Failed(d.to_string())),
    }
}

fn replay_artifact<W: Word + HistWord>(r: &FailureReport) -> CliResult<String> {
    let method: Method = r.method.parse().map_err(CliError::Usage)?;
    let fill: FillPolicy = r.fill.parse().map_err(CliError::Usage)?;
    let fault = r.fault.as_deref().map(parse_fault).transpose()?;
    let ops = parse_ops::<W>(&r.ops.join("\n")).map_err(CliError::Usage)?;
    let mut a = make::<W>(method, r.n, Params { t: r.t, h: r.h, b: r.b }, fill, fault)?;
    // The recorded ops end at the failing one, so validating once at the end
    // finds the recorded divergence whatever cadence the fuzz run used.
    match check_equivalence(&mut *a, &ops, ValidateEvery::Writes(usize::MAX)) {
        Ok(_) => Ok(format!("artifact did not reproduce: {} ops replay cleanly\n", ops.len())),
        Err(d) if d == r.divergence => Err(CliError::Failed(format!("reproduced recorded divergence: {d}"))),
        Err(d) => Err(CliError::Failed(format!("different divergence: {d} (recorded: {})", r.divergence))),
    }
}

pub fn dump(args: &DumpArgs) -> CliResult<String> {
    crate::with_word!(args.m.w, dump_ops(args))
}

fn dump_ops<W: Word + HistWord>(args: &DumpArgs) -> CliResult<String> {
    let ops = parse_ops::<W>(&read_file(&args.ops_file)?).map_err(CliError::Usage)?;
    let n = args.m.n()?;
    if let Some(op) = ops.iter().find(|o| o.index() >= n) {
        return Err(CliError::Usage(format!("op {op} is out of range for n = {n}")));
    }
    let t = args.m.t;
    let apply = |a: &mut dyn InitializableArray<W>| {
        for op in &ops {
            if let Op::Write(l, x) = *op {
                a.write(l, x);
            }
        }
    };
    let items = match args.method {
        Method::Clearable => {
            let mut a = ClearableArray::<W>::new(n, t.unwrap_or(lightpath::methods::DEFAULT_T), args.fill)?;
            apply(&mut a);
            a.iter_written_blocks().0
        }
        Method::Forest => {
            let mut a = Forest::<W>::new(n, t.unwrap_or(lightpath::methods::DEFAULT_T), args.fill)?;
            apply(&mut a);
            a.iter_written_blocks().0
        }
        Method::Core => {
            let (d, t) = tree_params(n as u64, t, W::BITS, true)?;
            let mut a = LightPathArray::<W>::new(d, t, args.fill)?;
            apply(&mut a);
            a.iter_written().0
        }
        Method::Partial => {
            let (d, t) = tree_params(n as u64, t, W::BITS, false)?;
            let mut a = PartialLightPathArray::<W>::new(n, d, t, args.fill)?;
            apply(&mut a);
            a.iter_written().0
        }
        m => return Err(CliError::Usage(format!("dump supports lightpath, forest, lightpath-core and lightpath-partial, not {m}"))),
    };
    Ok(items.iter().map(|i| format!("{i}\n")).collect())
}
