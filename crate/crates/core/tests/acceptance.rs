//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process fails when a criterion that is expected to hold does not, or when
//! the known sunflower-reduction gap changes shape.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use tensor_extremal::containment::avoids;
use tensor_extremal::extremal::{alpha, f_exact, latin_count, SearchOptions};
use tensor_extremal::pattern::make_identity;
use tensor_extremal::shadow::turan_binomial;
use tensor_extremal::verify::{self, Ctx, Kind, PropertyOutcome, SuiteConfig};

type Group = fn(&Ctx) -> tensor_extremal::Result<Vec<PropertyOutcome>>;

struct Criterion {
    id: u8,
    title: &'static str,
    limit: Option<Duration>,
    groups: &'static [Group],
    spot: fn() -> Result<String, String>,
}

fn staircase_spot() -> Result<String, String> {
    let id = make_identity(2, 2).map_err(|e| e.to_string())?;
    let opts = SearchOptions { budget: u64::MAX, ..SearchOptions::default() };
    let mut values = Vec::new();
    for n in 1..=5 {
        let r = f_exact(n, &id, 2, &opts).map_err(|e| e.to_string())?;
        let w = r.witness.ok_or("no witness")?;
        if r.value != 2 * n - 1 || w.ones_count() != r.value || !avoids(&w, &id).map_err(|e| e.to_string())? {
            return Err(format!("n = {n}: f = {}", r.value));
        }
        values.push(r.value.to_string());
    }
    Ok(format!("f = {}", values.join(", ")))
}

fn shadow_spot() -> Result<String, String> {
    // K_{2,2,2} has 12 edges and 8 triangles.
    let pairs = turan_binomial(6, 2, 3);
    let triangles = turan_binomial(6, 3, 3);
    if pairs != 12u32.into() || triangles != 8u32.into() {
        return Err(format!("binom(6,2)_3 = {pairs}, binom(6,3)_3 = {triangles}"));
    }
    Ok("binom(6,2)_3 = 12, binom(6,3)_3 = 8".into())
}

fn latin_spot() -> Result<String, String> {
    let counts: Vec<u64> = (1..=4)
        .map(|n| latin_count(n, 3, false))
        .collect::<tensor_extremal::Result<_>>()
        .map_err(|e| e.to_string())?;
    if counts != [1, 2, 12, 576] {
        return Err(format!("counts {counts:?}"));
    }
    Ok("counts 1, 2, 12, 576".into())
}

fn alpha_spot() -> Result<String, String> {
    let a = |t, k| alpha(t, k).map_err(|e| e.to_string());
    let (a22, a23) = (a(2, 2)?, a(2, 3)?);
    if a22 != BigRational::from_integer(192.into()) || a23 != BigRational::from_integer(13608.into()) {
        return Err(format!("alpha(2,2) = {a22}, alpha(2,3) = {a23}"));
    }
    Ok(format!("alpha(2,2) = {a22}, alpha(2,3) = {a23}, alpha(3,2) = {}", a(3, 2)?))
}

fn none() -> Result<String, String> {
    Ok(String::new())
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "containment oracle equivalence",
        limit: Some(Duration::from_secs(300)),
        groups: &[verify::containment_equivalence],
        spot: none,
    },
    Criterion {
        id: 2,
        title: "extremal staircase",
        limit: Some(Duration::from_secs(120)),
        groups: &[verify::staircase],
        spot: staircase_spot,
    },
    Criterion {
        id: 3,
        title: "Klazar doubling",
        limit: None,
        groups: &[verify::klazar_properties],
        spot: none,
    },
    Criterion {
        id: 4,
        title: "shadow machinery",
        limit: Some(Duration::from_secs(600)),
        groups: &[verify::shadow_properties],
        spot: shadow_spot,
    },
    Criterion {
        id: 5,
        title: "division counting",
        limit: None,
        groups: &[verify::division_properties],
        spot: none,
    },
    Criterion {
        id: 6,
        title: "pigeonhole shared division",
        limit: None,
        groups: &[verify::pigeonhole_property],
        spot: none,
    },
    Criterion {
        id: 7,
        title: "Latin enumeration",
        limit: Some(Duration::from_secs(300)),
        groups: &[verify::latin_properties],
        spot: latin_spot,
    },
    Criterion {
        id: 8,
        title: "constants",
        limit: None,
        groups: &[verify::constant_properties],
        spot: alpha_spot,
    },
];

fn summarize(outcomes: &[PropertyOutcome], id: u8) -> (bool, String) {
    let mine: Vec<&PropertyOutcome> = outcomes.iter().filter(|o| o.criterion == Some(id)).collect();
    let props: Vec<&&PropertyOutcome> = mine.iter().filter(|o| o.kind == Kind::Property).collect();
    let ok = !props.is_empty() && props.iter().all(|o| o.passed && o.checked > 0);
    let mut parts: Vec<String> = mine
        .iter()
        .map(|o| {
            let verdict = match (o.kind, o.passed) {
                (Kind::Report, _) => "report".to_string(),
                (_, true) => "0 violations".to_string(),
                (_, false) => format!("VIOLATED: {}", o.counterexample.as_ref().map_or("", |c| c.note.as_str())),
            };
            format!("{} [{} checked, {verdict}]", o.name, o.checked)
        })
        .collect();
    if let Some(r) = mine.iter().find(|o| o.kind == Kind::Report) {
        parts.push(r.detail.clone());
    }
    (ok, parts.join("; "))
}

fn main() -> ExitCode {
    let ctx = Ctx::new(SuiteConfig::default()).expect("thread pool");
    let mut unexpected = Vec::new();
    let line = |pass: bool, id: u8, title: &str, detail: &str| {
        println!("{} criterion {id} ({title}): {detail}", if pass { "PASS" } else { "FAIL" });
    };

    for c in CRITERIA {
        let start = Instant::now();
        let mut outcomes = Vec::new();
        let mut error = None;
        for g in c.groups {
            match g(&ctx) {
                Ok(o) => outcomes.extend(o),
                Err(e) => error = Some(e.to_string()),
            }
        }
        let spot = (c.spot)();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = summarize(&outcomes, c.id);
        if let Some(e) = error {
            pass = false;
            detail = format!("error: {e}; {detail}");
        }
        match spot {
            Ok(s) if !s.is_empty() => detail = format!("{detail}; {s}"),
            Ok(_) => {}
            Err(s) => {
                pass = false;
                detail = format!("{detail}; spot check failed: {s}");
            }
        }
        let within = c.limit.is_none_or(|l| elapsed <= l);
        pass &= within;
        let limit = c.limit.map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
        line(pass, c.id, c.title, &format!("{detail} ({:.1} s{limit})", elapsed.as_secs_f64()));
        if !pass {
            unexpected.push(c.id);
        }
    }

    // Criterion 9: the plain inequality is checked literally. It fails on
    // patterns that span more than one index along the sliced axis; the
    // process only fails if that description stops being accurate.
    let start = Instant::now();
    match verify::sunflower_reduction_sweep(&ctx) {
        Ok(cases) => {
            let total = cases.len();
            let violations: Vec<_> = cases.iter().filter(|c| !c.report.holds).collect();
            let thin = cases.iter().filter(|c| c.report.core_extent == 1).count();
            let thin_hold = cases.iter().filter(|c| c.report.core_extent == 1 && c.report.holds).count();
            let corrected = cases.iter().filter(|c| c.report.boundary_holds).count();
            let exact = cases.iter().all(|c| c.report.exact);
            let smallest = violations.first().map_or(String::new(), |c| {
                format!(
                    "; e.g. pattern {} on axis {}: f_3(2,P) = {} > {} = 2 f_2(2,P')",
                    c.pattern.tensor().to_json_string(),
                    c.axis,
                    c.report.lhs,
                    c.report.rhs
                )
            });
            line(
                violations.is_empty() && exact,
                9,
                "sunflower reduction",
                &format!(
                    "f_t(n,P) <= n f_(t-1)(n,P') violated on {} of {total} instances{smallest}; \
                     holds on {thin_hold} of {thin} with extent 1 along the sliced axis; \
                     boundary-corrected bound holds on {corrected} of {total} ({:.1} s)",
                    violations.len(),
                    start.elapsed().as_secs_f64()
                ),
            );
            let characterized = exact
                && total > 0
                && thin > 0
                && thin_hold == thin
                && corrected == total
                && violations.iter().all(|c| c.report.core_extent > 1);
            if !characterized {
                println!("criterion 9: violations no longer match the extent > 1 characterization");
                unexpected.push(9);
            }
        }
        Err(e) => {
            line(false, 9, "sunflower reduction", &format!("error: {e}"));
            unexpected.push(9);
        }
    }

    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected results for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
