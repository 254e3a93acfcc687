//! Command-line front end. `stabforge <command> ...`; every command prints
//! one rendering to stdout and can write a JSON artifact with `--output`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::degeneration::{
    elliptic_stab_rank1, floor_tessellations, legendre_dual_tessellation, nodal_floors, nodal_limit, theta_check, FloorPlan,
    InertiaData, PeriodicConvexFunction, Tessellation,
};
use crate::envelope::{compute_stab, verify_stab, StabMatrix};
use crate::error::{Error, Result};
use crate::exact_algebra::{fmt_q, parse_q, Q};
use crate::gkm_model::{resonant_locus, GKMModel};
use crate::lattice_geometry::Chamber;

pub const DEFAULT_TRUNCATION: i64 = 20;
pub const MAX_SLOPE_DENOMINATOR: i64 = 1_000_000;
pub const TRUNC_ENV: &str = "STABFORGE_TRUNC";

#[derive(Parser, Debug, Clone)]
#[command(name = "stabforge", version, about = "Stable envelopes, periodic tessellations and theta checks")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Compute the stable envelope matrix of a model.
    Stab(StabArgs),
    /// Re-check a stable envelope matrix written by `stab --output`.
    Verify(VerifyArgs),
    /// List the resonant values of the Kahler parameter.
    Resonance(ResonanceArgs),
    /// Legendre-dual tessellation of a periodic convex function.
    Tessellate(TessellateArgs),
    /// Strata and floors of the nodal degeneration.
    Floors(FloorsArgs),
    /// Truncated theta series and their functional equations.
    ThetaCheck(ThetaArgs),
    /// Elliptic envelope of T*P^1 and its q -> 0 limit.
    NodalLimit(NodalArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct ModelArgs {
    /// Builtin generator: tstar-pn, p2, point, tstar-p1xp1, tstar-p1xp2.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Size parameter for tstar-pn.
    #[arg(long)]
    pub n: Option<usize>,
    /// Model JSON file.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// Rendering printed to stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the JSON artifact to this path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct StabArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Cocharacter `3,2,1` or permutation `perm:1,3,2` of the A-coordinates.
    #[arg(long)]
    pub chamber: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub slope: Option<String>,
    /// Refinement of the order on fixed points, by name, smallest first.
    #[arg(long)]
    pub order: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// JSON written by `stab --output`.
    #[arg(long)]
    pub stab: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ResonanceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub chamber: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TessellateArgs {
    /// Weights of the function, e.g. `2x,y,x-y`.
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
    /// Fractional shift, one rational per coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<String>,
    /// Tessellate the floors of a model instead.
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub slope: Option<String>,
    /// Write the SVG figure to this path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FloorsArgs {
    /// Inertia data JSON file.
    #[arg(long)]
    pub inertia: Option<PathBuf>,
    /// Builtin inertia data: mu2 or free.
    #[arg(long)]
    pub example: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ThetaArgs {
    /// Truncation order; falls back to STABFORGE_TRUNC, then 20.
    #[arg(long)]
    pub trunc: Option<i64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct NodalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub slope: Option<String>,
    /// Value of the Kahler parameter at q = 0, a monomial in h and z.
    #[arg(long)]
    pub zeta: Option<String>,
    #[arg(long)]
    pub trunc: Option<i64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// What a command produced: the stdout rendering and whether its checks passed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub success: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, success: true }
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    match &config.command {
        Command::Stab(a) => run_stab(a),
        Command::Verify(a) => run_verify(a),
        Command::Resonance(a) => run_resonance(a),
        Command::Tessellate(a) => run_tessellate(a),
        Command::Floors(a) => run_floors(a),
        Command::ThetaCheck(a) => run_theta(a),
        Command::NodalLimit(a) => run_nodal(a),
    }
}

impl ModelArgs {
    fn given(&self) -> bool {
        self.builtin.is_some() || self.model.is_some()
    }

    pub fn load(&self) -> Result<GKMModel> {
        match (&self.builtin, &self.model) {
            (Some(b), None) => GKMModel::builtin(b, self.n),
            (None, Some(p)) => GKMModel::from_json_str(&read(p)?),
            (None, None) => Err(Error::Invalid("one of --builtin or --model is required".into())),
            (Some(_), Some(_)) => Err(Error::Invalid("--builtin and --model are mutually exclusive".into())),
        }
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", p.display())))
}

fn write(p: &Path, s: &str) -> Result<()> {
    std::fs::write(p, s).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", p.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

impl OutputArgs {
    fn emit(&self, json: &Value, text: impl FnOnce() -> String, csv: Option<String>) -> Result<String> {
        if let Some(p) = &self.output {
            write(p, &pretty(json))?;
        }
        match self.format {
            Format::Text => Ok(text()),
            Format::Json => Ok(pretty(json)),
            Format::Csv => csv.ok_or_else(|| Error::Unsupported("csv output for this command".into())),
            Format::Svg => Err(Error::Unsupported("svg output is only available for tessellate".into())),
        }
    }
}

/// Slope with a bounded denominator.
pub fn parse_slope(s: &str) -> Result<Q> {
    let q = parse_q(s)?;
    if *q.denom() > MAX_SLOPE_DENOMINATOR {
        return Err(Error::Invalid(format!("slope denominator {} exceeds {MAX_SLOPE_DENOMINATOR}", q.denom())));
    }
    Ok(q)
}

fn opt_slope(s: &Option<String>) -> Result<Option<Q>> {
    s.as_deref().map(parse_slope).transpose()
}

/// `3,2,1` is a cocharacter; `perm:2,1,3` lists the coordinates (1-based)
/// from the one tending to zero fastest.
pub fn parse_chamber(src: Option<&str>, rank: usize) -> Result<Chamber> {
    let Some(src) = src else { return Ok(Chamber::standard(rank)) };
    let ints = |s: &str| -> Result<Vec<i64>> {
        s.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad chamber entry '{t}'")))).collect()
    };
    let c = if let Some(p) = src.strip_prefix("perm:") {
        let v = ints(p)?;
        let mut seen = v.clone();
        seen.sort();
        if seen != (1..=rank as i64).collect::<Vec<_>>() {
            return Err(Error::Invalid(format!("'{p}' is not a permutation of 1..{rank}")));
        }
        Chamber::from_permutation(&v.iter().map(|k| (*k - 1) as usize).collect::<Vec<_>>())
    } else {
        Chamber::new(ints(src)?)
    };
    if c.sigma.len() != rank {
        return Err(Error::Invalid(format!("chamber has {} entries, the torus A has rank {rank}", c.sigma.len())));
    }
    Ok(c)
}

/// `--trunc`, then `STABFORGE_TRUNC`, then 20.
pub fn truncation(flag: Option<i64>) -> Result<i64> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(TRUNC_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| Error::Invalid(format!("{TRUNC_ENV}={s} is not an integer"))),
        Err(_) => Ok(DEFAULT_TRUNCATION),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

fn stab_csv(s: &StabMatrix) -> String {
    let names = s.names();
    let mut out = csv_line(&std::iter::once("point".to_string()).chain(names.iter().cloned()).collect::<Vec<_>>());
    for (name, row) in names.iter().zip(&s.entries) {
        out.push_str(&csv_line(&std::iter::once(name.clone()).chain(row.iter().map(|e| e.to_string())).collect::<Vec<_>>()));
    }
    out
}

fn run_stab(a: &StabArgs) -> Result<Outcome> {
    let model = a.model.load()?;
    let c = parse_chamber(a.chamber.as_deref(), model.a_rank())?;
    let order = match &a.order {
        None => None,
        Some(o) => Some(
            o.split(',')
                .map(|n| model.index(n.trim()).ok_or_else(|| Error::Invalid(format!("unknown fixed point '{}'", n.trim()))))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let s = compute_stab(&model, &c, opt_slope(&a.slope)?, order)?;
    let out = a.out.emit(&s.to_json(), || s.to_text(), Some(stab_csv(&s)))?;
    Ok(Outcome::ok(out))
}

fn run_verify(a: &VerifyArgs) -> Result<Outcome> {
    let v: Value = serde_json::from_str(&read(&a.stab)?).map_err(|e| Error::Parse(e.to_string()))?;
    let s = StabMatrix::from_json(&v)?;
    let report = verify_stab(&s, &s.model, &s.chamber, s.slope);
    let out = a.out.emit(&report.to_json(), || report.to_text(), None)?;
    Ok(Outcome { stdout: out, success: report.pass() })
}

fn run_resonance(a: &ResonanceArgs) -> Result<Outcome> {
    let model = a.model.load()?;
    let c = parse_chamber(a.chamber.as_deref(), model.a_rank())?;
    let locus: Vec<String> = resonant_locus(&model, &c)?.iter().map(|z| model.ring.fmt_monomial(z)).collect();
    let json = json!({"schema": 1, "kind": "resonance", "chamber": c.sigma, "locus": locus});
    let list = serde_json::to_string(&locus).expect("serializable");
    let out = a.out.emit(&json, || format!("{list}\n"), Some(csv_line(&locus)))?;
    Ok(Outcome::ok(out))
}

fn tessellation_csv(ts: &[Tessellation]) -> String {
    let mut out = csv_line(&["floor", "tile_dim", "volume", "stratum_dim", "stratum_point", "vertices"].map(String::from));
    for (k, t) in ts.iter().enumerate() {
        for tile in &t.tiles {
            let pt = |p: &[Q]| format!("({})", p.iter().map(fmt_q).collect::<Vec<_>>().join(" "));
            out.push_str(&csv_line(&[
                k.to_string(),
                tile.dim.to_string(),
                fmt_q(&tile.volume),
                tile.stratum.dim.to_string(),
                pt(&tile.stratum.point),
                tile.vertices.iter().map(|v| pt(v)).collect::<Vec<_>>().join(" "),
            ]));
        }
    }
    out
}

fn run_tessellate(a: &TessellateArgs) -> Result<Outcome> {
    let ts: Vec<Tessellation> = match (&a.weights, a.model.given()) {
        (Some(w), false) => {
            let mut f = PeriodicConvexFunction::parse(w)?;
            if let Some(s) = &a.shift {
                let shift = s.split(',').map(|x| parse_q(x.trim())).collect::<Result<Vec<Q>>>()?;
                f = f.with_shift(shift)?;
            }
            vec![legendre_dual_tessellation(&f)?]
        }
        (None, true) => floor_tessellations(&a.model.load()?, opt_slope(&a.slope)?)?,
        (Some(_), true) => return Err(Error::Invalid("--weights and a model are mutually exclusive".into())),
        (None, false) => return Err(Error::Invalid("one of --weights, --builtin or --model is required".into())),
    };
    let json = if ts.len() == 1 {
        ts[0].to_json()
    } else {
        json!({"schema": 1, "kind": "floor_tessellations", "floors": ts.iter().map(|t| t.to_json()).collect::<Vec<_>>()})
    };
    if let Some(p) = &a.svg {
        write(p, &ts[0].to_svg()?)?;
    }
    if a.out.format == Format::Svg {
        if let Some(p) = &a.out.output {
            write(p, &pretty(&json))?;
        }
        return Ok(Outcome::ok(ts[0].to_svg()?));
    }
    let text = || ts.iter().map(|t| t.to_text()).collect::<Vec<_>>().join("\n");
    let out = a.out.emit(&json, text, Some(tessellation_csv(&ts)))?;
    Ok(Outcome::ok(out))
}

fn floors_csv(p: &FloorPlan) -> String {
    let d = &p.inertia;
    let mut out = csv_line(&["stratum", "subgroup", "point", "component", "dim", "same_as"].map(String::from));
    for (k, st) in p.strata.iter().enumerate() {
        out.push_str(&csv_line(&[
            k.to_string(),
            d.subgroups[st.subgroup].name.clone(),
            p.cells[st.cell].point.iter().map(fmt_q).collect::<Vec<_>>().join(" "),
            st.atoms.iter().map(|a| d.atoms[*a].clone()).collect::<Vec<_>>().join(" "),
            st.dim.to_string(),
            if st.reduced == k { String::new() } else { st.reduced.to_string() },
        ]));
    }
    out
}

fn run_floors(a: &FloorsArgs) -> Result<Outcome> {
    let sources = [a.inertia.is_some(), a.example.is_some(), a.model.given()].iter().filter(|x| **x).count();
    if sources != 1 {
        return Err(Error::Invalid("exactly one of --inertia, --example, --builtin or --model is required".into()));
    }
    let data = if let Some(p) = &a.inertia {
        InertiaData::from_json_str(&read(p)?)?
    } else if let Some(e) = &a.example {
        match e.as_str() {
            "mu2" => InertiaData::example_mu2(),
            "free" => InertiaData::example_free(),
            _ => return Err(Error::Invalid(format!("unknown example '{e}'; expected mu2 or free"))),
        }
    } else {
        InertiaData::from_model(&a.model.load()?)?
    };
    let plan = nodal_floors(&data)?;
    let out = a.out.emit(&plan.to_json(), || plan.to_text(), Some(floors_csv(&plan)))?;
    Ok(Outcome { stdout: out, success: plan.cocycle_failures.is_empty() })
}

fn run_theta(a: &ThetaArgs) -> Result<Outcome> {
    let c = theta_check(truncation(a.trunc)?)?;
    let out = a.out.emit(&c.to_json(), || c.to_text(), None)?;
    Ok(Outcome { stdout: out, success: c.pass() })
}

fn run_nodal(a: &NodalArgs) -> Result<Outcome> {
    let model = if a.model.given() { a.model.load()? } else { GKMModel::tstar_pn(2)? };
    let e = elliptic_stab_rank1(&model, opt_slope(&a.slope)?, a.zeta.as_deref(), truncation(a.trunc)?)?;
    let lim = nodal_limit(&e)?;
    let json = json!({"schema": 1, "kind": "nodal_limit_run", "elliptic": e.to_json(), "limit": lim.to_json()});
    let text = || {
        let mut s = String::new();
        let _ = writeln!(s, "elliptic envelope mod q^{}, nu = {}, zeta = {}", e.n, fmt_q(&e.nu), e.ring.fmt_monomial(&e.zeta));
        s.push_str(&lim.to_text());
        s
    };
    let out = a.out.emit(&json, text, None)?;
    Ok(Outcome { stdout: out, success: lim.agrees() })
}
