use galstrat::cli::{run, Format, Outcome, Report, EXIT_BUDGET, EXIT_OK, EXIT_USAGE};

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("galstrat").chain(args.iter().copied()))
}

fn structured(args: &[&str]) -> Report {
    let mut argv = args.to_vec();
    argv.extend(["--format", "structured"]);
    let out = cli(&argv);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    Report::parse_structured(&out.stdout).unwrap()
}

#[test]
fn decide_reports_truth_value() {
    let r = structured(&["decide", "--field", "5^1", "--formula", "E y . y^2 = 2"]);
    assert_eq!(r.results["value"], "false");
    let r = structured(&["decide", "--field", "25", "--formula", "E y : ext 2 . y^2 = 2"]);
    assert_eq!(r.results["value"], "true");
    assert_eq!(r.schema, "galstrat-report/1");
    assert_eq!(r.command, "decide");
}

#[test]
fn count_matches_square_classes() {
    let r = structured(&["count", "--field", "7", "--formula", "E y . y^2 = x"]);
    assert_eq!(r.results["count"], "4");
}

#[test]
fn series_fits_square_sequence() {
    let r = structured(&["series", "--q", "3", "--max-m", "6", "--formula", "E y . y^2 = x"]);
    assert_eq!(r.results["fit"], "(2*t - 3*t^2)/(1 - 4*t + 3*t^2)");
    assert_eq!(r.results["total_degree"], "4");
}

#[test]
fn fit_without_enough_spare_terms() {
    let r = structured(&["fit", "--seq", "4,10,28,82,244"]);
    assert_eq!(r.results["fit"], "NO_FIT");
    let r = structured(&["fit", "--seq", "4,10,28,82,244", "--margin", "1"]);
    assert_eq!(r.results["fit"], "(4*t - 6*t^2)/(1 - 4*t + 3*t^2)");
}

#[test]
fn text_output_is_aligned_and_sorted() {
    let out = cli(&["count", "--field", "3", "--formula", "x = x"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("command"));
    assert!(out.stdout.contains("result.count"));
    assert!(!out.stdout.contains("timing_ms"));
}

#[test]
fn timing_only_on_request() {
    let r = structured(&["count", "--field", "3", "--formula", "x = x", "--timing"]);
    assert!(r.timing_ms.is_some());
}

#[test]
fn budget_refusal_exits_three() {
    let out = cli(&["count", "--field", "3^8", "--formula", "free x, y : ext 8 . x = y", "--budget", "1000"]);
    assert_eq!(out.code, EXIT_BUDGET);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("budget"), "{}", out.stderr);
}

#[test]
fn usage_errors_exit_two() {
    for argv in [
        vec!["nonsense"],
        vec!["decide", "--field", "6", "--formula", "x = x"],
        vec!["decide", "--field", "5", "--formula", "E y . y^2 ="],
        vec!["count", "--field", "5"],
        vec!["fit", "--seq", "1,2,x"],
    ] {
        let out = cli(&argv);
        assert_eq!(out.code, EXIT_USAGE, "{argv:?}: {}", out.stderr);
    }
}

#[test]
fn help_exits_zero() {
    let out = cli(&["--help"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("felgner"));
}

#[test]
fn structured_round_trips() {
    let out = cli(&["exceptional", "--q", "2", "--max-m", "4", "--poly", "y^3 - x", "--format", "structured"]);
    let r = Report::parse_structured(&out.stdout).unwrap();
    assert_eq!(r.emit(Format::Structured), out.stdout);
}
