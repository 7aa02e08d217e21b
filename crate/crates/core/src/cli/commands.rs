use clap::{value_parser, Arg, ArgAction, ArgMatches};
use num_bigint::BigInt;
use num_rational::BigRational;

use super::{CliError, Command, CommandRegistry, Context, Report};
use crate::covers::{exceptional_poincare, frobenius_class_census, Cover, ScanConfig};
use crate::dichotomy::{classify_growth, felgner_test, GrowthClass};
use crate::eval::modes;
use crate::formula::{parse, parse_poly, Formula};
use crate::gf::FieldSpec;
use crate::series::{
    fit_rational_with_margin, format_rational, is_integer_combination, power_sum_form, verify_log_derivative,
    zeta_report, SeriesFit, DEFAULT_MARGIN,
};
use crate::twisted::{twisted_rationality_probe, AffineSystem, FrobeniusVector};

pub(super) fn register_all(r: &mut CommandRegistry) {
    r.register(Box::new(Decide));
    r.register(Box::new(Count));
    r.register(Box::new(Series));
    r.register(Box::new(Fit));
    r.register(Box::new(Zeta));
    r.register(Box::new(Dichotomy));
    r.register(Box::new(Felgner));
    r.register(Box::new(FrobClass));
    r.register(Box::new(Exceptional));
    r.register(Box::new(Twisted));
}

fn formula_args() -> Vec<Arg> {
    vec![
        Arg::new("formula").long("formula").help("Formula text"),
        Arg::new("formula-file")
            .long("formula-file")
            .conflicts_with("formula")
            .help("File containing the formula"),
    ]
}

fn field_arg() -> Arg {
    Arg::new("field").long("field").required(true).help("Ambient field, e.g. 5^2 or 25")
}

fn base_args() -> Vec<Arg> {
    vec![
        Arg::new("q").long("q").help("Base field F_q, e.g. 3, 9 or 3^2"),
        Arg::new("p")
            .long("p")
            .conflicts_with("q")
            .value_parser(value_parser!(u64))
            .help("Prime base field F_p (alternative to --q)"),
    ]
}

fn max_m_arg(default: &'static str) -> Arg {
    Arg::new("max-m")
        .long("max-m")
        .value_parser(value_parser!(u32).range(1..))
        .default_value(default)
        .help("Largest coefficient index")
}

fn mode_arg() -> Arg {
    Arg::new("mode")
        .long("mode")
        .default_value("lifted")
        .help(format!("Coefficient mode: {}", modes().names().join("|")))
}

fn seq_arg() -> Arg {
    Arg::new("seq").long("seq").help("Comma-separated integer sequence a_1,a_2,..")
}

fn poly_arg() -> Arg {
    Arg::new("poly")
        .long("poly")
        .alias("formula")
        .required(true)
        .help("Cover polynomial f(x, y), e.g. \"y^3 - x\"")
}

fn read_source(args: &ArgMatches, inline: &str, file: &str) -> Result<Option<String>, CliError> {
    if let Some(t) = args.get_one::<String>(inline) {
        return Ok(Some(t.clone()));
    }
    match args.get_one::<String>(file) {
        Some(path) => std::fs::read_to_string(path)
            .map(Some)
            .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}"))),
        None => Ok(None),
    }
}

fn load_formula(args: &ArgMatches, report: &mut Report) -> Result<Formula, CliError> {
    let text = read_source(args, "formula", "formula-file")?
        .ok_or_else(|| CliError::usage("one of --formula or --formula-file is required"))?;
    let f = parse(&text).map_err(CliError::usage)?;
    report.input("formula", &f);
    Ok(f)
}

fn field_spec(args: &ArgMatches, report: &mut Report) -> Result<FieldSpec, CliError> {
    let spec: FieldSpec = args.get_one::<String>("field").unwrap().parse().map_err(CliError::usage)?;
    report.input("field", spec);
    Ok(spec)
}

fn base_spec(args: &ArgMatches, report: &mut Report) -> Result<FieldSpec, CliError> {
    let spec = if let Some(q) = args.get_one::<String>("q") {
        q.parse::<FieldSpec>().map_err(CliError::usage)?
    } else if let Some(&p) = args.get_one::<u64>("p") {
        FieldSpec::new(p, 1).map_err(CliError::usage)?
    } else {
        return Err(CliError::usage("one of --q or --p is required"));
    };
    report.input("q", spec);
    Ok(spec)
}

fn max_m(args: &ArgMatches, report: &mut Report) -> u32 {
    let m = *args.get_one::<u32>("max-m").unwrap();
    report.input("max_m", m);
    m
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| CliError::Usage(format!("bad {what} entry `{}`", t.trim()))))
        .collect()
}

fn seq_input(args: &ArgMatches, report: &mut Report) -> Result<Option<Vec<BigInt>>, CliError> {
    match args.get_one::<String>("seq") {
        Some(s) => {
            let v: Vec<BigInt> = parse_list(s, "sequence")?;
            report.input("seq", join(&v));
            Ok(Some(v))
        }
        None => Ok(None),
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn q_size(q: FieldSpec) -> Option<u64> {
    q.size().and_then(|s| u64::try_from(s).ok())
}

/// Coefficients of a formula over extensions of the base, by the selected mode.
fn formula_sequence(args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(FieldSpec, Vec<BigInt>), CliError> {
    let formula = load_formula(args, report)?;
    let q = base_spec(args, report)?;
    let m = max_m(args, report);
    let name = args.get_one::<String>("mode").unwrap();
    let mode = modes()
        .get(name)
        .ok_or_else(|| CliError::Usage(format!("unknown mode `{name}` (expected {})", modes().names().join(" or "))))?;
    report.input("mode", mode.name());
    let seq = ctx.evaluator.poincare_coefficients(&formula, q, m, mode.as_ref())?;
    Ok((q, seq.coefficients))
}

fn coefficient_table(report: &mut Report, name: &str, index: &str, values: &[BigInt]) {
    let rows = values.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), v.to_string()]).collect();
    report.table(name, &[index, "coefficient"], rows);
}

fn fit_results(report: &mut Report, fit: &SeriesFit, q: Option<u64>) {
    report
        .result("recurrence_order", fit.recurrence_order)
        .result("spare_coefficients", fit.spare())
        .result("margin", fit.margin);
    match &fit.result {
        Some(r) => {
            report.result("fit", r).result("total_degree", r.total_degree());
            if let Some(form) = q.and_then(|q| power_sum_form(r, q)) {
                let terms: Vec<String> =
                    form.iter().map(|(a, w)| format!("{}*q^({a}m)", format_rational(w))).collect();
                report
                    .result("power_sum", if terms.is_empty() { "0".into() } else { terms.join(" + ") })
                    .result("integer_combination", is_integer_combination(&form));
            }
        }
        None => {
            report.result("fit", "NO_FIT");
        }
    }
}

fn growth_results(report: &mut Report, g: &GrowthClass, prefix: &str) {
    report
        .result(&format!("{prefix}kind"), g.kind)
        .result(&format!("{prefix}r"), g.r)
        .result(&format!("{prefix}mu"), format_rational(&g.mu))
        .result(&format!("{prefix}c"), format_rational(&g.c));
}

struct Decide;

impl Command for Decide {
    fn name(&self) -> &'static str {
        "decide"
    }

    fn about(&self) -> &'static str {
        "Truth value of a closed formula over a finite field"
    }

    fn args(&self) -> Vec<Arg> {
        let mut a = formula_args();
        a.push(field_arg());
        a
    }

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let spec = field_spec(args, report)?;
        let formula = load_formula(args, report)?;
        let field = spec.field().map_err(CliError::usage)?;
        report.result("value", ctx.evaluator.decide(&formula, &field)?);
        Ok(())
    }
}

struct Count;

impl Command for Count {
    fn name(&self) -> &'static str {
        "count"
    }

    fn about(&self) -> &'static str {
        "Number of free assignments satisfying a formula"
    }

    fn args(&self) -> Vec<Arg> {
        let mut a = formula_args();
        a.push(field_arg());
        a
    }

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let spec = field_spec(args, report)?;
        let formula = load_formula(args, report)?;
        let field = spec.field().map_err(CliError::usage)?;
        report
            .result("count", ctx.evaluator.count_satisfying(&formula, &field)?)
            .result("free_variables", formula.free_variables().join(","));
        Ok(())
    }
}

struct Series;

impl Command for Series {
    fn name(&self) -> &'static str {
        "series"
    }

    fn about(&self) -> &'static str {
        "Poincare coefficients over F_{q^m}, m = 1..M, with a rational fit"
    }

    fn args(&self) -> Vec<Arg> {
        let mut a = formula_args();
        a.extend(base_args());
        a.push(max_m_arg("6"));
        a.push(mode_arg());
        a
    }

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let (q, seq) = formula_sequence(args, ctx, report)?;
        coefficient_table(report, "coefficients", "m", &seq);
        let fit = fit_rational_with_margin(&seq, DEFAULT_MARGIN).map_err(CliError::usage)?;
        fit_results(report, &fit, q_size(q));
        Ok(())
    }
}

struct Fit;

impl Command for Fit {
    fn name(&self) -> &'static str {
        "fit"
    }

    fn about(&self) -> &'static str {
        "Fit a rational generating function to an integer sequence"
    }

    fn args(&self) -> Vec<Arg> {
        vec![
            seq_arg().required(true),
            Arg::new("q").long("q").help("Base for the power-sum decomposition, e.g. 3 or 3^2"),
            Arg::new("margin")
                .long("margin")
                .value_parser(value_parser!(usize))
                .default_value("2")
                .help("Confirming coefficients required beyond the recurrence window"),
        ]
    }

    fn run(&self, args: &ArgMatches, _ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let seq = seq_input(args, report)?.expect("required");
        let margin = *args.get_one::<usize>("margin").unwrap();
        report.input("margin", margin);
        let q = match args.get_one::<String>("q") {
            Some(q) => {
                let spec: FieldSpec = q.parse().map_err(CliError::usage)?;
                report.input("q", spec);
                q_size(spec)
            }
            None => None,
        };
        let fit = fit_rational_with_margin(&seq, margin).map_err(CliError::usage)?;
        fit_results(report, &fit, q);
        Ok(())
    }
}

struct Zeta;

impl Command for Zeta {
    fn name(&self) -> &'static str {
        "zeta"
    }

    fn about(&self) -> &'static str {
        "Zeta series exp(sum P_m t^m / m) from Poincare coefficients"
    }

    fn args(&self) -> Vec<Arg> {
        let mut a = formula_args();
        a.extend(base_args());
        a.push(max_m_arg("6"));
        a.push(mode_arg());
        a.push(seq_arg().conflicts_with_all(["formula", "formula-file"]));
        a
    }

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let seq = match seq_input(args, report)? {
            Some(s) => s,
            None => formula_sequence(args, ctx, report)?.1,
        };
        let p: Vec<BigRational> = seq.iter().cloned().map(BigRational::from_integer).collect();
        let order = p.len();
        let z = zeta_report(&p, order, DEFAULT_MARGIN).map_err(CliError::usage)?;
        let ok = verify_log_derivative(&z.series, &p, order).map_err(CliError::usage)?;
        let rows = z.series.iter().enumerate().map(|(n, c)| vec![n.to_string(), format_rational(c)]).collect();
        report.table("zeta", &["n", "z_n"], rows);
        report
            .result("order", order)
            .result("integral", z.integral)
            .result("log_derivative_identity", ok)
            .result("rational", z.rational.map_or_else(|| "NO_FIT".to_string(), |r| r.to_string()));
        Ok(())
    }
}

struct Dichotomy;

impl Command for Dichotomy {
    fn name(&self) -> &'static str {
        "dichotomy"
    }

    fn about(&self) -> &'static str {
        "Classify growth of a count sequence as zero, bounded, or mu q^(rm)"
    }

    fn args(&self) -> Vec<Arg> {
        let mut a = formula_args();
        a.extend(base_args());
        a.push(max_m_arg("8"));
        a.push(mode_arg());
        a.push(seq_arg().conflicts_with_all(["formula", "formula-file"]));
        a
    }

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let (q, seq) = match seq_input(args, report)? {
            Some(s) => (base_spec(args, report)?, s),
            None => formula_sequence(args, ctx, report)?,
        };
        let q = q_size(q).ok_or_else(|| CliError::usage("base field too large"))?;
        let samples: Vec<(u32, BigInt)> = seq.iter().enumerate().map(|(i, b)| (i as u32 + 1, b.clone())).collect();
        let g = classify_growth(&samples, q)?;
        growth_results(report, &g, "");
        let rows = samples
            .iter()
            .enumerate()
            .map(|(i, (m, b))| {
                let res = g.residuals.get(i).map_or_else(|| "-".to_string(), |(_, r)| format_rational(r));
                vec![m.to_string(), b.to_string(), res]
            })
            .collect();
        report.table("samples", &["m", "count", "residual"], rows);
        Ok(())
    }
}

struct Felgner;

impl Command for Felgner {
    fn name(&self) -> &'static str {
        "felgner"
    }

    fn about(&self) -> &'static str {
        "Compare counts over F_{p^2} with p at sample primes"
    }

    fn args(&self) -> Vec<Arg> {
        let mut a = formula_args();
        a.push(Arg::new("primes").long("primes").default_value("3,5,7,11,13").help("Sample primes"));
        a
    }

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let primes: Vec<u64> = parse_list(args.get_one::<String>("primes").unwrap(), "prime")?;
        report.input("primes", join(&primes));
        let formula = load_formula(args, report)?;
        let v = felgner_test(&formula, &primes, &ctx.evaluator)?;
        let rows = v
            .rows
            .iter()
            .map(|r| vec![r.p.to_string(), r.count.to_string(), r.target.to_string(), r.gap.to_string()])
            .collect();
        report.table("primes", &["p", "count", "target", "gap"], rows);
        report.result("conclusion", v.conclusion);
        match &v.advisory {
            Some(g) => growth_results(report, g, "advisory_"),
            None => {
                report.result("advisory_kind", "none");
            }
        }
        Ok(())
    }
}

fn load_cover(args: &ArgMatches, report: &mut Report) -> Result<Cover, CliError> {
    let poly = parse_poly(args.get_one::<String>("poly").unwrap()).map_err(CliError::usage)?;
    report.input("poly", &poly);
    Ok(Cover::new(poly)?)
}

struct FrobClass;

impl Command for FrobClass {
    fn name(&self) -> &'static str {
        "frobclass"
    }

    fn about(&self) -> &'static str {
        "Census of fiber cycle types of a plane cover f(x, y) = 0"
    }

    fn args(&self) -> Vec<Arg> {
        vec![field_arg(), poly_arg()]
    }

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let spec = field_spec(args, report)?;
        let cover = load_cover(args, report)?;
        let size = spec.size().filter(|&s| s <= ctx.budget).ok_or_else(|| {
            CliError::Budget(format!("refusing: {spec} has more elements than the budget of {}", ctx.budget))
        })?;
        let field = spec.field().map_err(CliError::usage)?;
        let census = frobenius_class_census(&cover, &field)?;
        let rows = census.classes.iter().map(|(t, n)| vec![t.to_string(), n.to_string()]).collect();
        report.table("census", &["cycle_type", "count"], rows);
        report.result("ramified", census.ramified).result("total", size);
        Ok(())
    }
}

struct Exceptional;

impl Command for Exceptional {
    fn name(&self) -> &'static str {
        "exceptional"
    }

    fn about(&self) -> &'static str {
        "Exceptionality pattern and fiber-point coefficients of a cover over F_{q^m}"
    }

    fn args(&self) -> Vec<Arg> {
        let mut a = base_args();
        a.push(poly_arg());
        a.push(max_m_arg("6"));
        a.push(
            Arg::new("projective")
                .long("projective")
                .action(ArgAction::SetTrue)
                .help("Count the point at infinity of the x-line"),
        );
        a
    }

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let q = base_spec(args, report)?;
        let cover = load_cover(args, report)?;
        let m = max_m(args, report);
        let projective = args.get_flag("projective");
        report.input("projective", projective);
        let config = ScanConfig { projective, ..ctx.scan };
        let ep = exceptional_poincare(&cover, q, m, &config)?;
        let rows = ep
            .checks
            .iter()
            .map(|c| {
                vec![
                    c.m.to_string(),
                    c.flagged.to_string(),
                    c.coefficient.to_string(),
                    c.expected.as_ref().map_or_else(|| "-".into(), BigInt::to_string),
                    c.matches().map_or_else(|| "-".into(), |b| b.to_string()),
                ]
            })
            .collect();
        report.table("pattern", &["m", "flag", "coefficient", "expected", "match"], rows);
        let s = &ep.scan;
        let mismatches = ep.mismatches();
        report
            .result("degenerate", s.degenerate)
            .result("detected_period", s.detected_period.map_or_else(|| "none".into(), |p| p.to_string()))
            .result("exceptional", s.exceptional)
            .result("extension_flags", join(&s.extension_flags))
            .result("period_confirmed", s.period_confirmed.map_or_else(|| "not_run".into(), |b| b.to_string()))
            .result("closed_form_mismatches", if mismatches.is_empty() { "none".into() } else { join(&mismatches) });
        Ok(())
    }
}

struct Twisted;

impl Command for Twisted {
    fn name(&self) -> &'static str {
        "twisted"
    }

    fn about(&self) -> &'static str {
        "Points of an affine system fixed by a Frobenius vector, over F_{q^s}, s = 1..S"
    }

    fn args(&self) -> Vec<Arg> {
        let mut a = base_args();
        a.push(Arg::new("dvec").long("dvec").help("Frobenius vector d_1,..,d_m (default all 1)"));
        a.push(Arg::new("system-file").long("system-file").help("One equation per line, optional `vars` line"));
        a.push(
            Arg::new("formula")
                .long("formula")
                .conflicts_with("system-file")
                .help("Quantifier-free conjunction of equations"),
        );
        a.push(max_m_arg("1"));
        a
    }

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
        let q = base_spec(args, report)?;
        let system = if let Some(path) = args.get_one::<String>("system-file") {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
            AffineSystem::parse(&text)?
        } else if let Some(text) = args.get_one::<String>("formula") {
            AffineSystem::from_formula(&parse(text).map_err(CliError::usage)?)?
        } else {
            return Err(CliError::usage("one of --system-file or --formula is required"));
        };
        report.input("system", system.to_string().trim_end().replace('\n', "; "));
        let d = match args.get_one::<String>("dvec") {
            Some(s) => s.parse::<FrobeniusVector>()?,
            None => FrobeniusVector::untwisted(system.vars().len().max(1)),
        };
        report.input("dvec", &d);
        let smax = max_m(args, report);
        let probe = twisted_rationality_probe(&system, q, &d, smax, &ctx.evaluator)?;
        coefficient_table(report, "coefficients", "s", &probe.sequence.coefficients);
        report.result("count", &probe.sequence.coefficients[0]);
        fit_results(report, &probe.fit, q_size(q));
        Ok(())
    }
}
