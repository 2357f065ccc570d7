use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use freudlab::confinement::{numeric_shadow, run_confinement, Scenario};
use freudlab::dpainleve::{catalog, derived_at, iterate_family, PainleveMap};
use freudlab::lab::{self, Figure, Metadata};
use freudlab::mpnum::{format_sci, parse_rational, rel_diff, ExactReal, Precision};
use freudlab::oracle::first_divergence;
use freudlab::weights::WeightFamily;
use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::args::{Cli, Command, FamilyArgs};
use crate::config::{pick, Config, Scalar};
use crate::error::CliError;
use crate::render::{Format, Payload};

pub const DIGITS_ENV: &str = "FREUDLAB_DIGITS";

struct Context {
    digits_flag: Option<u32>,
    config: Config,
    env_digits: Option<u32>,
}

impl Context {
    fn digits(&self, default: u32) -> u32 {
        self.digits_flag.or(self.config.digits).or(self.env_digits).unwrap_or(default)
    }

    fn precision(&self, default: u32) -> Result<Precision, CliError> {
        Ok(Precision::new(self.digits(default))?)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn rational(flag: &Option<String>, config: &Option<Scalar>, default: &str) -> Result<Rational, CliError> {
    Ok(parse_rational(&pick(flag, config).unwrap_or_else(|| default.to_string()))?)
}

fn family(args: &FamilyArgs, cfg: &Config) -> Result<WeightFamily, CliError> {
    let tag = args
        .family
        .clone()
        .or_else(|| cfg.family.clone())
        .ok_or_else(|| usage("--family is required"))?;
    let rho = || rational(&args.rho, &cfg.rho, "0");
    let a = || rational(&args.a, &cfg.a, "1");
    let q = || rational(&args.q, &cfg.q, "1/2");
    let f = match tag.as_str() {
        "hermite" => WeightFamily::generalized_hermite(rho()?),
        "freud4" => WeightFamily::freud_quartic(rho()?, rational(&args.lambda, &cfg.lambda, "0")?),
        "freud6" => WeightFamily::freud_sextic(rho()?),
        "circle" => WeightFamily::exp_cos_circle(rational(&args.lambda, &cfg.lambda, "1")?),
        "charlier" => WeightFamily::charlier(a()?),
        "gcharlier" => WeightFamily::generalized_charlier(a()?),
        "qhermite" => WeightFamily::q_hermite(q()?),
        "qfreud" => WeightFamily::q_freud(q()?),
        "qfreud-gen" => WeightFamily::q_freud_general(q()?, rational(&args.c, &cfg.c, "-1/2")?),
        other => {
            return Err(usage(format!(
                "unknown family `{other}` (hermite, freud4, freud6, circle, charlier, gcharlier, qhermite, qfreud, qfreud-gen)"
            )))
        }
    };
    Ok(f?)
}

fn fmt_opt(v: Option<&Float>, digits: u32) -> String {
    v.map(|x| format_sci(x, digits)).unwrap_or_default()
}

fn index_text(v: Option<i64>) -> String {
    v.map_or_else(|| "none".to_string(), |i| i.to_string())
}

fn metadata_value(m: &Metadata) -> Result<Value, CliError> {
    serde_json::to_value(m).map_err(|e| CliError::Io(io::Error::other(e)))
}

fn figure_payload(command: &str, fig: &Figure) -> Result<Payload, CliError> {
    let digits = fig.metadata.digits;
    let mut columns = vec!["n", "value", "derived_a2", "derived_b", "flag"];
    if let Some(label) = fig.extra_label {
        columns.push(label);
    }
    let mut payload = Payload::new(command, metadata_value(&fig.metadata)?, &columns);
    for r in &fig.rows {
        let mut row = vec![
            r.n.to_string(),
            format_sci(&r.value, digits),
            fmt_opt(r.derived_a2.as_ref(), digits),
            fmt_opt(r.derived_b.as_ref(), digits),
            r.flag.to_string(),
        ];
        if fig.extra_label.is_some() {
            row.push(fmt_opt(r.extra.as_ref(), digits));
        }
        payload.rows.push(row);
    }
    if fig.trace.is_some() {
        payload.note("divergence_index", index_text(fig.divergence_index));
    }
    Ok(payload)
}

fn n_or(flag: Option<i64>, cfg: &Config, default: i64) -> i64 {
    flag.or(cfg.n).unwrap_or(default)
}

fn compare(ctx: &Context, fam: &WeightFamily, n: i64, threshold: f64) -> Result<Payload, CliError> {
    let p = ctx.precision(30)?;
    let trace = iterate_family(fam, n, p)?;
    let oracle = lab::reference(fam, n, p.digits())?;
    let divergence = first_divergence(fam, &trace, &oracle, threshold)?;
    let metadata = metadata_value(&Metadata::new("compare", fam, p.digits(), n))?;
    let mut payload = Payload::new("compare", metadata, &["n", "iterate", "oracle", "rel_diff"]);
    let start = if matches!(fam, WeightFamily::ExpCosCircle { .. }) { 0 } else { 1 };
    for k in start..=trace.last_index() {
        let derived = derived_at(fam, &trace, k).0;
        let reference = oracle.a2_analog(k as usize);
        let diff = match (&derived, reference) {
            (Some(d), Some(r)) if d.is_finite() => format_sci(&rel_diff(d, r), 6),
            _ => String::new(),
        };
        payload
            .rows
            .push(vec![k.to_string(), fmt_opt(derived.as_ref(), p.digits()), fmt_opt(reference, p.digits()), diff]);
    }
    payload.note("threshold", threshold);
    payload.note("first_divergence", index_text(divergence));
    Ok(payload)
}

#[allow(clippy::too_many_arguments)]
fn confine(
    ctx: &Context,
    map: Option<String>,
    n0: Option<i64>,
    seed: Option<String>,
    params: [&Option<String>; 7],
    shadow: bool,
) -> Result<Payload, CliError> {
    let cfg = &ctx.config;
    let [alpha, beta, gamma, delta, a, q, c] = params;
    let tag = map.or_else(|| cfg.map.clone()).unwrap_or_else(|| "dp1".to_string());
    let exact = |flag: &Option<String>, conf: &Option<Scalar>, default: &str| -> Result<ExactReal, CliError> {
        Ok(ExactReal::rational(rational(flag, conf, default)?))
    };
    let pm = match tag.as_str() {
        "dp1" => PainleveMap::dp1(
            exact(alpha, &cfg.alpha, "1")?,
            exact(beta, &cfg.beta, "0")?,
            exact(gamma, &cfg.gamma, "0")?,
            exact(delta, &cfg.delta, "0")?,
        ),
        "dp2" => {
            let alpha = match pick(alpha, &cfg.alpha) {
                Some(v) => ExactReal::rational(parse_rational(&v)?),
                None => ExactReal::sqrt(&rational(a, &cfg.a, "1")?)?.recip()?,
            };
            PainleveMap::dp2(alpha, exact(beta, &cfg.beta, "0")?, exact(gamma, &cfg.gamma, "0")?)
        }
        "qp1" => PainleveMap::qp1(rational(q, &cfg.q, "1/2")?)?,
        "qp1-gen" => PainleveMap::qp1_general(rational(q, &cfg.q, "1/2")?, rational(c, &cfg.c, "-1/2")?)?,
        other => return Err(usage(format!("unknown map `{other}` (dp1, dp2, qp1, qp1-gen)"))),
    };
    let n0 = n0.or(cfg.n0).unwrap_or(5);
    let scenario = match seed.or_else(|| cfg.seed.clone()) {
        Some(s) => s.parse::<Scenario>()?,
        None => Scenario::for_map(&pm)[0],
    };
    let report = run_confinement(&pm, n0, scenario)?;
    let metadata = json!({
        "experiment": "confine",
        "map": pm.to_string(),
        "n0": n0,
        "seed": scenario.to_string(),
    });
    let mut payload = Payload::new("confine", metadata, &["index", "power", "coefficient"]);
    for ((index, power), coef) in &report.coefficients {
        payload.rows.push(vec![index.to_string(), power.to_string(), coef.to_string()]);
    }
    let span: Vec<String> = report.singular_span.iter().map(i64::to_string).collect();
    payload.note("singular_span", span.join(" "));
    payload.note("regular_index", index_text(report.regular_index));
    payload.note("confined", report.confined);
    payload.note("memory_check", report.memory_check);
    if let Some(alt) = report.alternation {
        payload.note("alternation", alt);
    }
    payload.note("terms", report.terms_used);
    if shadow {
        let p = ctx.precision(60)?;
        let eps = p.float(Rational::from((1, 100_000_000)));
        let s = numeric_shadow(&pm, &report, &Rational::from((7, 10)), &eps, p)?;
        payload.note("shadow_max_rel_err", format_sci(&s.max_rel_err, 6));
    }
    payload.report = Some(report.to_string());
    Ok(payload)
}

fn figures(ctx: &Context, which: Option<u8>, n: Option<i64>, a: &Option<String>, q: &Option<String>) -> Result<Payload, CliError> {
    let cfg = &ctx.config;
    let fig = match which.or(cfg.which).unwrap_or(1) {
        1 => lab::figure1(ctx.precision(30)?, n_or(n, cfg, 100))?,
        2 => lab::figure2(&rational(a, &cfg.a, "1")?, ctx.precision(30)?, n_or(n, cfg, 80))?,
        3 => lab::figure3(&rational(q, &cfg.q, "9/10")?, ctx.precision(50)?, n_or(n, cfg, 200))?,
        w => return Err(usage(format!("--which must be 1, 2 or 3, got {w}"))),
    };
    figure_payload("figures", &fig)
}

fn asymptotics(ctx: &Context, fam: &WeightFamily, n: i64) -> Result<Payload, CliError> {
    let p = ctx.precision(30)?;
    let table = lab::asymptotics(fam, n, p)?;
    let mut payload = Payload::new("asymptotics", metadata_value(&table.metadata)?, &["n", "scaled", "deviation"]);
    for r in &table.rows {
        payload
            .rows
            .push(vec![r.n.to_string(), format_sci(&r.scaled, p.digits()), format_sci(&r.deviation, 6)]);
    }
    payload.note("quantity", &table.quantity);
    payload.note("limit", format_sci(&table.limit, p.digits()));
    Ok(payload)
}

fn catalog_payload() -> Payload {
    let entries = catalog();
    let mut payload = Payload::new(
        "catalog",
        json!({ "experiment": "catalog", "entries": entries.len() }),
        &["id", "name", "group", "iterable", "params", "equation"],
    );
    for e in entries {
        payload.rows.push(vec![
            e.id.to_string(),
            e.name.to_string(),
            e.group.label().to_string(),
            if e.iterable { "iterable" } else { "data-only" }.to_string(),
            e.params.join(" "),
            e.equation.to_string(),
        ]);
    }
    payload
}

fn frontier(fam: &WeightFamily, n: i64, precisions: Vec<u32>) -> Result<Payload, CliError> {
    let points = lab::precision_frontier(fam, &precisions, n)?;
    let top = precisions.iter().copied().max().unwrap_or(0);
    let metadata = Metadata::new("frontier", fam, top, n);
    let mut payload = Payload::new("frontier", metadata_value(&metadata)?, &["digits", "divergence_index"]);
    for p in points {
        payload.rows.push(vec![p.digits.to_string(), index_text(p.divergence_index)]);
    }
    Ok(payload)
}

fn build(ctx: &Context, command: Command) -> Result<Payload, CliError> {
    let cfg = &ctx.config;
    match command {
        Command::Compute { family: f, n } => {
            let fam = family(&f, cfg)?;
            let fig = lab::compute(&fam, n_or(n, cfg, 20), ctx.precision(30)?)?;
            figure_payload("compute", &fig)
        }
        Command::Oracle { family: f, n } => {
            let fam = family(&f, cfg)?;
            let fig = lab::oracle_table(&fam, n_or(n, cfg, 20), ctx.digits(30))?;
            figure_payload("oracle", &fig)
        }
        Command::Compare { family: f, n, threshold } => {
            let fam = family(&f, cfg)?;
            let threshold = threshold.or(cfg.threshold).unwrap_or(lab::ORACLE_DEVIATION);
            compare(ctx, &fam, n_or(n, cfg, 50), threshold)
        }
        Command::Confine {
            map,
            n0,
            seed,
            alpha,
            beta,
            gamma,
            delta,
            a,
            q,
            c,
            shadow,
        } => confine(ctx, map, n0, seed, [&alpha, &beta, &gamma, &delta, &a, &q, &c], shadow),
        Command::Figures { which, n, a, q } => figures(ctx, which, n, &a, &q),
        Command::Asymptotics { family: f, n } => {
            let fam = family(&f, cfg)?;
            asymptotics(ctx, &fam, n_or(n, cfg, 100))
        }
        Command::Catalog => Ok(catalog_payload()),
        Command::Frontier { family: f, n, precisions } => {
            let fam = family(&f, cfg)?;
            let precisions = precisions
                .or_else(|| cfg.precisions.clone())
                .unwrap_or_else(|| vec![20, 30, 40, 60]);
            frontier(&fam, n_or(n, cfg, 100), precisions)
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let env_digits = match std::env::var(DIGITS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<u32>()
                .map_err(|_| usage(format!("{DIGITS_ENV} must be a positive integer, got `{v}`")))?,
        ),
        Err(_) => None,
    };
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else if cli.text {
        Format::Text
    } else {
        match &config.format {
            Some(f) => Format::parse(f)?,
            None => Format::Csv,
        }
    };
    let output = cli.output.clone().or_else(|| config.output.as_ref().map(PathBuf::from));
    let ctx = Context {
        digits_flag: cli.digits,
        config,
        env_digits,
    };
    let payload = build(&ctx, cli.command)?;
    let mut stderr = io::stderr();
    match output {
        Some(path) => {
            let mut out = BufWriter::new(File::create(&path)?);
            payload.write(format, &mut out, &mut stderr)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            payload.write(format, &mut out, &mut stderr)?;
            out.flush()?;
        }
    }
    Ok(())
}
