//! The reference array and the harness that replays operation sequences
//! against it.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Zipf};
use serde::{Deserialize, Serialize};

use crate::arena::{Arena, FillPolicy, ProbeCounts};
use crate::contract::{InitializableArray, ParamError, Violation};
use crate::word::Word;

/// A plain array that zeroes all its cells at initialization.
#[derive(Debug)]
pub struct PlainArray<W: Word> {
    arena: Arena<W>,
}

impl<W: Word> PlainArray<W> {
    pub fn new(n: usize, fill: FillPolicy) -> Result<Self, ParamError> {
        if n == 0 {
            return Err(ParamError::EmptyUniverse);
        }
        let mut arena = Arena::new(n, fill);
        for i in 0..n {
            arena.store(i, W::zero());
        }
        Ok(PlainArray { arena })
    }
}

impl<W: Word> InitializableArray<W> for PlainArray<W> {
    fn name(&self) -> String {
        "oracle".into()
    }

    fn len(&self) -> usize {
        self.arena.len()
    }

    fn read(&self, index: usize) -> W {
        self.arena.load(index)
    }

    fn write(&mut self, index: usize, value: W) {
        self.arena.store(index, value)
    }

    fn space_bits(&self) -> u64 {
        self.arena.len() as u64 * W::BITS as u64
    }

    fn probes(&self) -> ProbeCounts {
        self.arena.snapshot_counters()
    }
}

/// One client operation. A read may carry the value it is expected to return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op<W> {
    Write(usize, W),
    Read(usize, Option<W>),
}

impl<W: Word> Op<W> {
    pub fn index(&self) -> usize {
        match *self {
            Op::Write(l, _) | Op::Read(l, _) => l,
        }
    }
}

impl<W: Word> fmt::Display for Op<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Write(l, x) => write!(f, "W {l} {x}"),
            Op::Read(l, None) => write!(f, "R {l}"),
            Op::Read(l, Some(x)) => write!(f, "R {l} {x}"),
        }
    }
}

impl<W: Word> FromStr for Op<W> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |t: &str| t.parse::<u64>().map_err(|e| format!("bad number {t:?}: {e}"));
        let word = |t: &str| -> Result<W, String> {
            let v = num(t)?;
            if W::BITS < 64 && v >> W::BITS != 0 {
                return Err(format!("value {v} does not fit {} bits", W::BITS));
            }
            Ok(W::truncate(v))
        };
        match parts.as_slice() {
            ["W", l, x] => Ok(Op::Write(num(l)? as usize, word(x)?)),
            ["R", l] => Ok(Op::Read(num(l)? as usize, None)),
            ["R", l, x] => Ok(Op::Read(num(l)? as usize, Some(word(x)?))),
            _ => Err(format!("cannot parse op {s:?}")),
        }
    }
}

/// Parses one op per line; blank lines and `#` comments are skipped.
pub fn parse_ops<W: Word>(text: &str) -> Result<Vec<Op<W>>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| l.parse().map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

pub fn format_ops<W: Word>(ops: &[Op<W>]) -> String {
    ops.iter().map(|o| format!("{o}\n")).collect()
}

/// Index distributions of the op generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Distribution {
    Uniform,
    /// Zipf with exponent 1.1 over the indices.
    Zipf,
    /// Structured write orders: leftmost-first, rightmost-first,
    /// middle-out and strided runs, interleaved with reads.
    Crafted,
    /// Each index written at most once, then mostly reads.
    ReadHeavy,
}

impl Distribution {
    pub const MAIN: [Distribution; 3] = [Distribution::Uniform, Distribution::Zipf, Distribution::Crafted];
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform => "uniform",
            Distribution::Zipf => "zipf",
            Distribution::Crafted => "crafted",
            Distribution::ReadHeavy => "read-heavy",
        })
    }
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "zipf" => Ok(Distribution::Zipf),
            "crafted" => Ok(Distribution::Crafted),
            "read-heavy" => Ok(Distribution::ReadHeavy),
            _ => Err(format!("unknown distribution {s:?}")),
        }
    }
}

/// `count` ops over `0..n`, half writes on average, deterministic in `seed`.
pub fn generate_ops<W: Word>(n: usize, count: usize, dist: Distribution, seed: u64) -> Vec<Op<W>> {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let value = |rng: &mut ChaCha8Rng| W::truncate(rng.random::<u64>());
    let mut ops = Vec::with_capacity(count);
    match dist {
        Distribution::Uniform => {
            while ops.len() < count {
                let l = rng.random_range(0..n);
                ops.push(if rng.random_bool(0.5) { Op::Write(l, value(&mut rng)) } else { Op::Read(l, None) });
            }
        }
        Distribution::Zipf => {
            let z = Zipf::new(n as f64, 1.1).expect("valid zipf parameters");
            while ops.len() < count {
                let l = (z.sample(&mut rng) as usize).clamp(1, n) - 1;
                ops.push(if rng.random_bool(0.5) { Op::Write(l, value(&mut rng)) } else { Op::Read(l, None) });
            }
        }
        Distribution::Crafted => {
            while ops.len() < count {
                let run = crafted_run(n, &mut rng);
                for l in run {
                    if ops.len() >= count {
                        break;
                    }
                    ops.push(Op::Write(l, value(&mut rng)));
                    if rng.random_bool(0.3) && ops.len() < count {
                        ops.push(Op::Read(rng.random_range(0..n), None));
                    }
                }
            }
        }
        Distribution::ReadHeavy => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let writes = (count / 5).min(n);
            for &l in &order[..writes] {
                ops.push(Op::Write(l, value(&mut rng)));
            }
            while ops.len() < count {
                ops.push(Op::Read(rng.random_range(0..n), None));
            }
        }
    }
    ops
}

/// Keeps the low `b` bits of every value, for methods with narrower entries.
pub fn mask_values<W: Word>(ops: &mut [Op<W>], b: u32) {
    let m = W::low_ones(b);
    for op in ops {
        match op {
            Op::Write(_, x) | Op::Read(_, Some(x)) => *x = *x & m,
            Op::Read(_, None) => {}
        }
    }
}

/// One structured run of write indices.
fn crafted_run(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let len = rng.random_range(1..=n.min(256));
    let start = rng.random_range(0..n);
    let stride = [1usize, 1, 2, 3, 4, 8, 16][rng.random_range(0..7)];
    match rng.random_range(0..4) {
        // leftmost-first
        0 => (0..len).map(|i| (start + i * stride) % n).collect(),
        // rightmost-first
        1 => (0..len).map(|i| (start + n - (i * stride) % n) % n).collect(),
        // middle-out
        2 => (0..len)
            .map(|i| {
                let off = (i + 1) / 2 * stride;
                if i % 2 == 0 {
                    (start + off) % n
                } else {
                    (start + n - off % n) % n
                }
            })
            .collect(),
        // a block in random order
        _ => {
            let mut v: Vec<usize> = (0..len).map(|i| (start + i) % n).collect();
            v.shuffle(rng);
            v
        }
    }
}

/// Where a replay went wrong.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Divergence {
    Value { op_index: usize, expected: u64, got: u64 },
    Invariant { op_index: usize, invariant: String, detail: String },
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Value { op_index, expected, got } => {
                write!(f, "op {op_index}: expected {expected}, got {got}")
            }
            Divergence::Invariant { op_index, invariant, detail } => {
                write!(f, "op {op_index}: invariant {invariant} violated: {detail}")
            }
        }
    }
}

/// A failure report, written as one JSON line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    /// Method name as accepted by [`crate::methods::Method`]'s parser.
    pub method: String,
    pub n: usize,
    pub w: u32,
    pub t: Option<u32>,
    pub h: Option<usize>,
    pub b: Option<u32>,
    pub fill: String,
    pub seed: Option<u64>,
    /// Test-only mutation the method was built with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
    pub divergence: Divergence,
    /// The ops up to and including the failing one.
    pub ops: Vec<String>,
}

impl FailureReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Outcome of a successful replay.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats<W> {
    /// Every value returned by a read, in order.
    pub reads: Vec<W>,
    pub max_read_probes: u64,
    pub max_write_probes: u64,
}

/// When to call the method's validator during a replay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidateEvery {
    Never,
    /// After every `k`-th write and at the end.
    Writes(usize),
}

/// Replays `ops` against `method` and the oracle in lockstep.
pub fn check_equivalence<W: Word>(
    method: &mut dyn InitializableArray<W>,
    ops: &[Op<W>],
    validate: ValidateEvery,
) -> Result<RunStats<W>, Divergence> {
    let n = method.len();
    let mut oracle: Vec<W> = (0..n).map(|l| method.initial_value(l)).collect();
    let mut shadow: Vec<Option<W>> = vec![None; n];
    let mut stats = RunStats { reads: Vec::new(), max_read_probes: 0, max_write_probes: 0 };
    let mut writes = 0usize;
    let check = |method: &dyn InitializableArray<W>, shadow: &[Option<W>], i: usize| {
        method.validate(shadow).map_err(|v: Violation| Divergence::Invariant {
            op_index: i,
            invariant: v.invariant.to_string(),
            detail: v.detail,
        })
    };
    for (i, op) in ops.iter().enumerate() {
        let before = method.probes();
        match *op {
            Op::Write(l, x) => {
                method.write(l, x);
                let p = method.probes() - before;
                stats.max_write_probes = stats.max_write_probes.max(p.reads + p.writes);
                oracle[l] = x;
                shadow[l] = Some(x);
                writes += 1;
                if let ValidateEvery::Writes(k) = validate {
                    if writes % k.max(1) == 0 {
                        check(&*method, &shadow, i)?;
                    }
                }
            }
            Op::Read(l, expected) => {
                let got = method.read(l);
                let p = method.probes() - before;
                stats.max_read_probes = stats.max_read_probes.max(p.reads + p.writes);
                let want = expected.unwrap_or(oracle[l]);
                if got != want {
                    return Err(Divergence::Value { op_index: i, expected: want.to_u64(), got: got.to_u64() });
                }
                stats.reads.push(got);
            }
        }
    }
    if validate != ValidateEvery::Never {
        check(&*method, &shadow, ops.len().saturating_sub(1))?;
    }
    Ok(stats)
}
