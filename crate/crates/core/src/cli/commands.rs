use std::path::Path;

use super::output::{float, Csv, Summary};
use super::{Command, OperatorSource};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::polycore::OperatorDescriptor;
use crate::synthesis::{expand_g_in_a, verify_exactness, PotentialTriple, SynthesisOptions};
use crate::torus::{gen_afree, lp_norm, read_afld, sobolev_norm, write_afld, write_atomic, GridSpec, PotentialSolver};
use crate::variational::{
    jensen_batch, kaq_probe, semicontinuity_experiment, ConvexSet, Direction, DptGenerator, Encoding,
    FunctionalDescriptor, ProbeConfig,
};

pub(super) fn execute(cmd: Command) -> Result<Summary> {
    match cmd {
        Command::Synth { source, out, report } => synth(&source, &out, report.as_deref()),
        Command::Verify { source, samples, seed } => verify(&source, samples, seed),
        Command::Solve {
            source,
            field,
            out,
            tol,
        } => solve(&source, &field, &out, tol),
        Command::Genfree {
            source,
            grid,
            band,
            seed,
            out,
        } => genfree(&source, &grid, band, seed, &out),
        Command::Norm { field, p, sobolev } => norm(&field, p, sobolev),
        Command::Jensen {
            dim,
            trials,
            grid,
            band,
            seed,
            shift,
            report,
        } => jensen(dim, trials, grid, band, seed, shift, report.as_deref()),
        Command::Lsc {
            source,
            functional,
            base,
            nlist,
            mode,
            report,
        } => lsc(&source, &functional, &base, &nlist, mode.as_deref(), report.as_deref()),
        Command::Probe {
            source,
            functional,
            zeta,
            trials,
            seed,
            grid,
            band,
            report,
        } => probe(&source, &functional, &zeta, trials, seed, grid, band, report.as_deref()),
        Command::Fixtures { out_dir, triples } => write_fixtures(&out_dir, &triples),
    }
}

fn operator(source: &OperatorSource) -> Result<OperatorDescriptor> {
    match (&source.operator, &source.fixture, &source.triple) {
        (Some(path), _, _) => OperatorDescriptor::read(path),
        (_, Some(name), _) => {
            fixtures::by_name(name).ok_or_else(|| Error::InvalidArgument(format!("unknown fixture {name:?}")))
        }
        (_, _, Some(path)) => Ok(PotentialTriple::from_json(&std::fs::read_to_string(path)?)?.a().clone()),
        _ => Err(Error::InvalidArgument(
            "one of --operator, --fixture or --triple is required".into(),
        )),
    }
}

fn triple(source: &OperatorSource) -> Result<PotentialTriple> {
    match &source.triple {
        Some(path) => PotentialTriple::from_json(&std::fs::read_to_string(path)?),
        None => PotentialTriple::synthesize(&operator(source)?, &SynthesisOptions::default()),
    }
}

fn source_label(source: &OperatorSource) -> String {
    match (&source.operator, &source.fixture, &source.triple) {
        (Some(p), _, _) | (_, _, Some(p)) => p.display().to_string(),
        (_, Some(name), _) => name.clone(),
        _ => String::new(),
    }
}

fn parse_grid(text: &str, d: usize) -> Result<GridSpec> {
    let dims = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad grid size {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    match dims.len() {
        1 => GridSpec::cubic(d, dims[0]),
        n if n == d => GridSpec::new(&dims),
        n => Err(Error::DimensionMismatch(format!("{n} grid sizes for a {d}-d operator"))),
    }
}

fn check_ok(status: bool) -> &'static str {
    if status {
        "ok"
    } else {
        "fail"
    }
}

fn synth(source: &OperatorSource, out: &Path, report: Option<&Path>) -> Result<Summary> {
    let t = triple(source)?;
    write_atomic(out, t.to_json().as_bytes())?;
    if let Some(path) = report {
        write_atomic(path, t.report().as_bytes())?;
    }
    let mut s = Summary::new("ok", "synth");
    s.push("source", source_label(source))
        .push("d", t.d())
        .push("N", t.n())
        .push("k", t.k())
        .push("l", t.l_order())
        .push("g", t.g_order())
        .push("rank_index_a", t.char_a().rank_index())
        .push("rank_index_l", t.char_l().rank_index())
        .push("out", out.display());
    Ok(s)
}

fn verify(source: &OperatorSource, samples: usize, seed: u64) -> Result<Summary> {
    let t = triple(source)?;
    let exact = verify_exactness(&t, samples, seed);
    let expansion = expand_g_in_a(&t, samples, seed);
    let passed = exact.passed() && expansion.passed();
    let mut s = Summary::new(check_ok(passed), "verify");
    s.push("al_zero", exact.al_zero)
        .push("lg_zero", exact.lg_zero)
        .push("rank_failures", exact.rank_failures.len())
        .push("g_expansion_l", expansion.g_matches_l_expansion)
        .push("g_expansion_a", expansion.g_matches_a_expansion)
        .push("gram_identity", expansion.gram_identity_holds)
        .push("samples", samples)
        .push("seed", seed);
    if let Some(w) = &exact.al_witness {
        s.push("al_witness", format!("{w:?}").replace(' ', ""));
    }
    Ok(s)
}

fn solve(source: &OperatorSource, field: &Path, out: &Path, tol: f64) -> Result<Summary> {
    let t = triple(source)?;
    let u = read_afld(field)?;
    let solver = PotentialSolver::new(&t, u.grid())?;
    let phi = solver.solve(&u, tol)?;
    write_afld(out, &phi)?;
    let mut s = Summary::new("ok", "solve");
    s.push("dims", format!("{:?}", u.grid().dims()).replace(' ', ""))
        .push_float("a_residual", solver.a_residual(&u)?)
        .push_float("max_abs_phi", phi.max_abs())
        .push("out", out.display());
    Ok(s)
}

fn genfree(source: &OperatorSource, grid: &str, band: usize, seed: u64, out: &Path) -> Result<Summary> {
    let t = triple(source)?;
    let grid = parse_grid(grid, t.d())?;
    let u = gen_afree(&t, &grid, band, seed)?;
    write_afld(out, &u)?;
    let mut s = Summary::new("ok", "genfree");
    s.push("dims", format!("{:?}", grid.dims()).replace(' ', ""))
        .push("N", u.n())
        .push("band", band)
        .push("seed", seed)
        .push_float("max_abs", u.max_abs())
        .push("out", out.display());
    Ok(s)
}

fn norm(field: &Path, p: f64, sobolev: u32) -> Result<Summary> {
    let f = read_afld(field)?;
    let mut s = Summary::new("ok", "norm");
    s.push("p", p)
        .push("sobolev", sobolev)
        .push_float("lp", lp_norm(&f, p)?)
        .push_float("wlp", sobolev_norm(&f, sobolev, p)?);
    Ok(s)
}

fn jensen(
    dim: usize,
    trials: usize,
    grid: usize,
    band: usize,
    seed: u64,
    shift: f64,
    report: Option<&Path>,
) -> Result<Summary> {
    let gen = DptGenerator::new(dim)?;
    let grid = GridSpec::cubic(dim, grid)?;
    let batch = jensen_batch(&gen, &grid, band, shift, trials, seed)?;
    let mut csv = Csv::new(&["trial", "seed", "lhs", "rhs", "gap", "satisfied"]);
    let mut worst = f64::NEG_INFINITY;
    for t in &batch.trials {
        worst = worst.max(t.lhs - t.rhs);
        csv.row(&[
            t.trial.to_string(),
            t.seed.to_string(),
            float(t.lhs),
            float(t.rhs),
            float(t.lhs - t.rhs),
            t.satisfied.to_string(),
        ]);
    }
    if let Some(path) = report {
        csv.write(path)?;
    }
    let mut s = Summary::new(check_ok(batch.violations == 0), "jensen");
    s.push("dim", dim)
        .push("trials", trials)
        .push("violations", batch.violations)
        .push_float("max_gap", worst);
    Ok(s)
}

/// Matrix encoding implied by F, or by 𝒜 mapping matrices to their row-wise image.
fn field_encoding(f: FunctionalDescriptor, a: &OperatorDescriptor, n: usize) -> Result<Encoding> {
    match f {
        FunctionalDescriptor::DetPower { dm } | FunctionalDescriptor::NegDetPower { dm } => Encoding::matrix(dm, n),
        _ => Ok(Encoding::matrix(a.target_dim(), n).unwrap_or(Encoding::Vector)),
    }
}

fn lsc(
    source: &OperatorSource,
    functional: &str,
    base: &Path,
    nlist: &[usize],
    mode: Option<&str>,
    report: Option<&Path>,
) -> Result<Summary> {
    let a = operator(source)?;
    let f: FunctionalDescriptor = functional.parse()?;
    let u = read_afld(base)?;
    let enc = field_encoding(f, &a, u.n())?;
    let mode = match mode {
        Some(m) => m.parse()?,
        None => Direction::expected_for(f),
    };
    let r = semicontinuity_experiment(f, &a, &u, enc, mode, nlist)?;
    let mut csv = Csv::new(&["n", "integral", "weak_limit", "satisfied"]);
    for row in &r.rows {
        csv.row(&[
            row.n.to_string(),
            float(row.integral),
            float(r.weak_limit),
            row.satisfied.to_string(),
        ]);
    }
    if let Some(path) = report {
        csv.write(path)?;
    }
    let mut s = Summary::new(check_ok(r.satisfied), "lsc");
    s.push("functional", &r.functional)
        .push("mode", r.mode)
        .push("r", r.growth_exponent)
        .push_float("weak_limit", r.weak_limit)
        .push_float("spread", r.spread);
    Ok(s)
}

#[allow(clippy::too_many_arguments)]
fn probe(
    source: &OperatorSource,
    functional: &str,
    zeta: &str,
    trials: usize,
    seed: u64,
    grid: usize,
    band: usize,
    report: Option<&Path>,
) -> Result<Summary> {
    let source = if source.operator.is_none() && source.fixture.is_none() && source.triple.is_none() {
        OperatorSource {
            fixture: Some("symdiv2".into()),
            ..source.clone()
        }
    } else {
        source.clone()
    };
    let t = triple(&source)?;
    let f: FunctionalDescriptor = functional.parse()?;
    let enc = field_encoding(f, t.a(), t.n())?;
    if enc == Encoding::Vector {
        return Err(Error::InvalidArgument(format!(
            "the PSD constraint needs matrix-valued fields; {} components do not encode one",
            t.n()
        )));
    }
    let k = ConvexSet::psd_identity(enc)?;
    let zeta = if zeta == "id" {
        enc.identity(0)
    } else {
        zeta.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad component {s:?} of zeta")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let mut cfg = ProbeConfig::new(GridSpec::cubic(t.d(), grid)?, trials, seed);
    cfg.band = band;
    let r = kaq_probe(f, &k, &t, &zeta, enc, &cfg)?;
    let mut csv = Csv::new(&["trial", "seed", "amplitude", "f_zeta", "average", "violated"]);
    for tr in &r.trials {
        csv.row(&[
            tr.trial.to_string(),
            tr.seed.to_string(),
            float(tr.amplitude),
            float(tr.f_zeta),
            float(tr.average),
            tr.violated.to_string(),
        ]);
    }
    if let Some(path) = report {
        csv.write(path)?;
    }
    let mut s = Summary::new(check_ok(r.violations == 0), "probe");
    s.push("functional", &r.functional)
        .push("trials", trials)
        .push("violations", r.violations);
    Ok(s)
}

fn write_fixtures(dir: &Path, triples: &[String]) -> Result<Summary> {
    std::fs::create_dir_all(dir)?;
    let all = fixtures::all();
    for (name, op) in &all {
        let mut text = op.to_json();
        text.push('\n');
        write_atomic(&dir.join(format!("{name}.json")), text.as_bytes())?;
    }
    for name in triples {
        let op = fixtures::by_name(name).ok_or_else(|| Error::InvalidArgument(format!("unknown fixture {name:?}")))?;
        let t = PotentialTriple::synthesize(&op, &SynthesisOptions::default())?;
        write_atomic(&dir.join(format!("{name}.triple.json")), t.to_json().as_bytes())?;
    }
    let mut s = Summary::new("ok", "fixtures");
    s.push("operators", all.len())
        .push("triples", triples.len())
        .push("out_dir", dir.display());
    Ok(s)
}
