//! Subcommand arguments and runners. Every numeric input is an exact
//! rational string and is echoed verbatim into the report.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::{Args, ValueEnum};
use kitai_core::funcalg::{parse_exppoly, Direction};
use kitai_core::numeric::{rational, Ball, Rational};
use kitai_core::report::{Check, Status};
use kitai_core::shiftspace::{weight_condition_check, Space, TailedVector, WeightSeq, WeightThresholds, WeightVerdict};
use kitai_core::transfer::{
    lemma_seq_bijection, prop1_domain, prop1_permutation, theorem1_pipeline, BasisSeed,
};
use kitai_core::witness::{
    atzmon_check, cross_validate, forward_witness, inverse_witness, laguerre_decay_study, laguerre_identity_check,
    orbit_norms, parse_grid, qn_two_sided_check, OrbitVerdict,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

/// What a subcommand hands back to the report writer.
pub struct Outcome {
    pub inputs: Map<String, Value>,
    pub thresholds: Map<String, Value>,
    pub seed: Option<u64>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub table: Vec<(u64, Ball)>,
}

impl Outcome {
    fn new(args: &impl Serialize, results: Value) -> Result<Self> {
        Ok(Outcome {
            inputs: echo(args)?,
            thresholds: Map::new(),
            seed: None,
            results,
            checks: Vec::new(),
            table: Vec::new(),
        })
    }

    fn threshold(mut self, key: &str, v: &str) -> Self {
        self.thresholds.insert(key.into(), Value::String(v.into()));
        self
    }

    fn check(mut self, name: &str, status: Status, detail: impl Into<String>) -> Self {
        self.checks.push(Check::new(name, status, detail));
        self
    }

    fn table(mut self, n: &[u64], v: &[Ball]) -> Self {
        self.table = n.iter().copied().zip(v.iter().cloned()).collect();
        self
    }
}

fn echo(args: &impl Serialize) -> Result<Map<String, Value>> {
    let Value::Object(m) = serde_json::to_value(args)? else {
        bail!("arguments do not serialize to an object");
    };
    Ok(m.into_iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, v)| {
            let v = match v {
                Value::Number(n) => Value::String(n.to_string()),
                other => other,
            };
            (k, v)
        })
        .collect())
}

fn q(s: &str) -> Result<Rational> {
    Ok(rational::parse(s)?)
}

fn count(name: &str, s: &str) -> Result<u64> {
    s.trim().parse().map_err(|_| anyhow!("{name}: expected a non-negative integer, got {s:?}"))
}

fn results(v: impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Forward,
    Inverse,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Self {
        match d {
            Dir::Forward => Direction::Forward,
            Dir::Inverse => Direction::Inverse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceArg {
    L1,
    L2,
}

#[derive(Debug, Args, Serialize)]
pub struct LaguerreArgs {
    #[arg(long, default_value = "1")]
    pub c: String,
    /// Identity checked for every n up to this.
    #[arg(long, default_value = "60")]
    pub n_max: String,
    #[arg(long, default_value = "1/4")]
    pub a: String,
    #[arg(long, default_value = "1")]
    pub b: String,
    #[arg(long, default_value = "geom:1:1024")]
    pub grid: String,
}

pub fn laguerre(args: &LaguerreArgs, prec: u32) -> Result<Outcome> {
    let c = q(&args.c)?;
    let identity = laguerre_identity_check(&c, count("n-max", &args.n_max)?)?;
    let grid = parse_grid(&args.grid)?;
    let study = laguerre_decay_study(&c, &q(&args.a)?, &q(&args.b)?, &grid, prec)?;
    let decrease = match (study.l2_norms.first(), study.l2_norms.last()) {
        (Some(first), Some(last)) if grid.len() > 1 => Status::from_option(last.cmp_certified(first).map(|o| o.is_lt())),
        _ => Status::Pass,
    };
    let id_status = identity.status;
    let bounded = study.bounded_0b;
    let out = Outcome::new(args, json!({ "identity": results(&identity)?, "decay": results(&study)? }))?
        .table(&grid, &study.l2_norms)
        .check("laguerre identity", id_status, format!("(I - cV)^n 1 = L_n(ct) for n <= {}", args.n_max))
        .check("l2 decrease", decrease, "||L_n(ct)|| smaller at the last grid point than at the first")
        .check("bounded on [0, b]", bounded, "sup |L_n(ct)| <= e^(cb/2)");
    Ok(out)
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    #[arg(long, default_value = "1")]
    pub f: String,
    #[arg(long, default_value = "1")]
    pub lambda: String,
    #[arg(long, default_value = "10,100,1000")]
    pub grid: String,
    #[arg(long, value_enum, default_value = "forward")]
    pub direction: Dir,
}

pub fn witness(args: &WitnessArgs, prec: u32) -> Result<Outcome> {
    let f = parse_exppoly(&args.f)?;
    let lambda = q(&args.lambda)?;
    let grid = parse_grid(&args.grid)?;
    let cert = match args.direction {
        Dir::Forward => forward_witness(&f, &lambda, &grid, prec)?,
        Dir::Inverse => inverse_witness(&f, &lambda, &grid, prec)?,
    };
    let st = cert.decreasing;
    Ok(Outcome::new(args, results(&cert)?)?
        .table(&grid, &cert.bounds)
        .check("certified decrease", st, "B_n strictly decreasing over the grid"))
}

#[derive(Debug, Args, Serialize)]
pub struct XvalArgs {
    /// A polynomial in t.
    #[arg(long, default_value = "1")]
    pub f: String,
    #[arg(long, default_value = "1")]
    pub lambda: String,
    /// Powers to compare, as a grid spec.
    #[arg(long, default_value = "range:0:12")]
    pub n: String,
    /// Number of sequence coordinates compared.
    #[arg(long, default_value = "64")]
    pub truncation: String,
}

pub fn xval(args: &XvalArgs, prec: u32) -> Result<Outcome> {
    let f = parse_exppoly(&args.f)?
        .as_poly()
        .ok_or_else(|| kitai_core::Error::Unsupported("xval needs a polynomial f".into()))?;
    let lambda = q(&args.lambda)?;
    let trunc = count("truncation", &args.truncation)? as usize;
    let ns = parse_grid(&args.n)?;
    let runs = ns
        .iter()
        .map(|&n| cross_validate(&f, &lambda, n, trunc, prec))
        .collect::<kitai_core::Result<Vec<_>>>()?;
    let exact = runs.iter().all(|r| r.exact_agreement && r.tails_consistent);
    let norms: Vec<Ball> = runs.iter().map(|r| r.route_a_norm.clone()).collect();
    Ok(Outcome::new(args, results(&runs)?)?
        .table(&ns, &norms)
        .check("exact agreement", Status::from_bool(exact), format!("coordinates 0..={trunc} agree exactly")))
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    #[arg(long, default_value = "harmonic")]
    pub w: String,
    #[arg(long, default_value = "1")]
    pub lambda: String,
    /// `eK` or a comma-separated list of rationals.
    #[arg(long, default_value = "e1")]
    pub x: String,
    #[arg(long, default_value = "geom:1:1024")]
    pub grid: String,
    #[arg(long, value_enum, default_value = "forward")]
    pub direction: Dir,
    #[arg(long, value_enum, default_value = "l1")]
    pub space: SpaceArg,
    /// Assert this verdict.
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Decays,
    Grows,
    Flat,
}

fn space(s: SpaceArg) -> Space {
    match s {
        SpaceArg::L1 => Space::L1,
        SpaceArg::L2 => Space::L2,
    }
}

pub fn orbit(args: &OrbitArgs, prec: u32) -> Result<Outcome> {
    let w = WeightSeq::parse(&args.w)?;
    let x = TailedVector::parse(space(args.space), &args.x)?;
    let grid = parse_grid(&args.grid)?;
    let r = orbit_norms(&w, &q(&args.lambda)?, &x, &grid, args.direction.into(), prec)?;
    let verdict = r.verdict;
    let decided = Status::from_bool(verdict != OrbitVerdict::Undecided);
    let mut out = Outcome::new(args, results(&r)?)?
        .table(&grid, &r.norms)
        .check("verdict decided", decided, format!("{verdict:?}").to_lowercase());
    if let Some(e) = args.expect {
        let want = match e {
            Expect::Decays => OrbitVerdict::Decays,
            Expect::Grows => OrbitVerdict::Grows,
            Expect::Flat => OrbitVerdict::Flat,
        };
        out = out.check("expected verdict", Status::from_bool(verdict == want), format!("{e:?}").to_lowercase());
    }
    Ok(out)
}

#[derive(Debug, Args, Serialize)]
pub struct WeightsArgs {
    #[arg(long)]
    pub w: String,
    #[arg(long, default_value = "500")]
    pub n: String,
    #[arg(long, default_value = "1/100")]
    pub satisfied_above: String,
    #[arg(long, default_value = "1/100")]
    pub violated_below: String,
    /// Assert this verdict.
    #[arg(long)]
    pub expect: Option<String>,
}

pub fn weights(args: &WeightsArgs, prec: u32) -> Result<Outcome> {
    let w = WeightSeq::parse(&args.w)?;
    let n = count("n", &args.n)? as usize;
    let th = WeightThresholds {
        satisfied_above: q(&args.satisfied_above)?,
        violated_below: q(&args.violated_below)?,
    };
    let r = weight_condition_check(&w, n, &th, prec)?;
    let verdict = serde_json::to_value(r.verdict)?.as_str().unwrap_or_default().to_string();
    let ns: Vec<u64> = (1..=n as u64).collect();
    let conclusive = if r.verdict == WeightVerdict::Inconclusive {
        Status::Undecided
    } else {
        Status::Pass
    };
    let mut out = Outcome::new(args, results(&r)?)?
        .table(&ns, &r.c)
        .threshold("satisfied_above", &args.satisfied_above)
        .threshold("violated_below", &args.violated_below)
        .check("verdict conclusive", conclusive, verdict.clone());
    if let Some(e) = &args.expect {
        if !["satisfied", "violated", "inconclusive"].contains(&e.as_str()) {
            bail!("--expect must be satisfied, violated or inconclusive, got {e:?}");
        }
        out = out.check("expected verdict", Status::from_bool(*e == verdict), format!("expected {e}"));
    }
    Ok(out)
}

#[derive(Debug, Args, Serialize)]
pub struct AtzmonArgs {
    #[arg(long, default_value = "power:2")]
    pub w: String,
    #[arg(long, default_value = "e1")]
    pub x: String,
    #[arg(long, default_value = "geom:1:4096")]
    pub grid: String,
    /// Allowed distance of the fitted exponent from k* - 1.
    #[arg(long, default_value = "1/20")]
    pub tol: String,
}

pub fn atzmon(args: &AtzmonArgs, prec: u32) -> Result<Outcome> {
    let w = WeightSeq::parse(&args.w)?;
    let x = TailedVector::parse(Space::L1, &args.x)?;
    let grid = parse_grid(&args.grid)?;
    let r = atzmon_check(&w, &x, &grid, &q(&args.tol)?, prec)?;
    let st = r.status;
    let detail = format!("k* = {}, target exponent {}", r.k_star, r.target_exponent);
    Ok(Outcome::new(args, results(&r)?)?
        .table(&grid, &r.orbit.norms)
        .threshold("tol", &args.tol)
        .check("exponent", st, detail))
}

#[derive(Debug, Args, Serialize)]
pub struct QnArgs {
    #[arg(long, default_value = "1")]
    pub f: String,
    #[arg(long, default_value = "1")]
    pub c: String,
    #[arg(long, default_value = "range:1:200")]
    pub grid: String,
    /// Relative smallness level.
    #[arg(long, default_value = "1/1000")]
    pub threshold: String,
}

pub fn qn(args: &QnArgs, prec: u32) -> Result<Outcome> {
    let f = parse_exppoly(&args.f)?;
    let grid = parse_grid(&args.grid)?;
    let r = qn_two_sided_check(&f, &q(&args.c)?, &grid, &q(&args.threshold)?, prec)?;
    let st = r.status;
    Ok(Outcome::new(args, results(&r)?)?
        .table(&grid, &r.forward)
        .threshold("threshold", &args.threshold)
        .check("never both small", st, "empirical, per vector"))
}

#[derive(Debug, Args, Serialize)]
pub struct TransferArgs {
    #[arg(long, default_value = "32")]
    pub dim: String,
    #[arg(long, default_value = "0")]
    pub seed: String,
    /// Use the identity basis instead of a seeded one.
    #[arg(long)]
    pub identity: bool,
    /// Directory for `J`, `T0`, `T1`, `T2`, `T` as CSV.
    #[arg(long)]
    pub matrices: Option<PathBuf>,
}

pub fn transfer(args: &TransferArgs, prec: u32) -> Result<Outcome> {
    let dim = count("dim", &args.dim)? as usize;
    let seed = count("seed", &args.seed)?;
    let basis = if args.identity { BasisSeed::Identity } else { BasisSeed::Seeded(seed) };
    let r = theorem1_pipeline(dim, basis, prec)?;
    if let Some(dir) = &args.matrices {
        r.matrices.dump_csv(dir)?;
    }
    let mut out = Outcome::new(args, results(&r)?)?
        .table(&r.forward.n_values, &r.forward.bounds)
        .threshold("orthonormality", "1e-20")
        .threshold("intertwining", "1e-9");
    out.seed = basis.seed();
    out.checks = r.checks;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PermuteMode {
    Seq,
    Prop1,
}

#[derive(Debug, Args, Serialize)]
pub struct PermuteArgs {
    #[arg(long, value_enum, default_value = "seq")]
    pub mode: PermuteMode,
    /// Prefix length.
    #[arg(long, default_value = "1000")]
    pub n: String,
    /// `zero`, `parity` (n mod 2), `harmonic` (1/(n+1)) or `odd` (n on odd n).
    #[arg(long, default_value = "parity")]
    pub a: String,
    #[arg(long, default_value = "1")]
    pub c: String,
    /// `linear:OFFSET:SLOPE`, meaning `b_n = OFFSET + floor(SLOPE n)`.
    #[arg(long, default_value = "linear:3:1")]
    pub b: String,
    /// Probed part of the domain; defaults to 8 n.
    #[arg(long)]
    pub domain: Option<String>,
    /// Block gaps `n_(k+1) - n_k`, cycled (prop1 mode).
    #[arg(long, default_value = "2,3")]
    pub gaps: String,
}

fn a_rule(name: &str) -> Result<fn(u64) -> Rational> {
    Ok(match name {
        "zero" => |_| Rational::from_integer(0.into()),
        "parity" => |n| Rational::from_integer(((n % 2) as i64).into()),
        "harmonic" => |n| Rational::new(1.into(), (n as i64 + 1).into()),
        "odd" => |n| Rational::from_integer((if n % 2 == 1 { n as i64 } else { 0 }).into()),
        _ => return Err(kitai_core::Error::Parse(format!("unknown sequence rule {name:?}")).into()),
    })
}

fn b_rule(spec: &str) -> Result<(Rational, Rational)> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["linear", off, slope] => Ok((q(off)?, q(slope)?)),
        _ => Err(kitai_core::Error::Parse(format!("bad b spec {spec:?}, expected linear:OFFSET:SLOPE")).into()),
    }
}

pub fn permute(args: &PermuteArgs) -> Result<Outcome> {
    let n = count("n", &args.n)? as usize;
    let plan = match args.mode {
        PermuteMode::Seq => {
            let a = a_rule(&args.a)?;
            let (off, slope) = b_rule(&args.b)?;
            let b = move |k: u64| &off + (&slope * Rational::from_integer((k as i64).into())).floor();
            let len = match &args.domain {
                Some(d) => count("domain", d)?,
                None => 8 * n as u64,
            };
            let domain: Vec<u64> = (0..len).collect();
            lemma_seq_bijection(&domain, &a, &q(&args.c)?, &b, n)?
        }
        PermuteMode::Prop1 => {
            let gaps = args
                .gaps
                .split(',')
                .map(|g| count("gaps", g))
                .collect::<Result<Vec<_>>>()?;
            let mut n_k = vec![0u64];
            let mut i = 0;
            while (*n_k.last().expect("n_0") as usize) < n {
                n_k.push(n_k.last().expect("n_0") + gaps[i % gaps.len()]);
                i += 1;
            }
            let phi = prop1_domain(&n_k);
            prop1_permutation(&n_k, &phi, n)?
        }
    };
    let detail = format!(
        "injective {}, dominance {}, bijective on range {}",
        plan.injective, plan.dominance, plan.bijective_on_range
    );
    let st = Status::from_bool(plan.valid());
    Ok(Outcome::new(args, results(&plan)?)?.check("permutation", st, detail))
}
