//! End-to-end acceptance: ten numbered criteria, each printing one pass/fail
//! line. Criteria run sequentially inside a single test so their wall-clock
//! budgets are measured without interference.

use dunkl_cli::{run_suite, write_json_report, CaseRecord, Suite, SuiteConfig, SuiteReport};
use dunkl_core::hilbert::{conjugate_identity_defect, hilbert_multiplier};
use dunkl_core::quadrature::WeightedGrid;
use dunkl_core::{DunklParameter, SampledFunction};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

const LAMBDAS: [f64; 4] = [0.25, 0.5, 1.0, 3.0];

fn config(suite: Suite, lambdas: &[f64], ps: &[f64], grid_n: usize) -> SuiteConfig {
    SuiteConfig {
        suite,
        lambda_list: lambdas.to_vec(),
        p_list: ps.to_vec(),
        grid_n,
        domain: 40.0,
        y_levels: 64,
        seed: 7,
        out: PathBuf::from("unused.json"),
        csv_out: None,
        timings: false,
    }
}

fn run(suite: Suite, lambdas: &[f64], ps: &[f64], grid_n: usize) -> SuiteReport {
    run_suite(&config(suite, lambdas, ps, grid_n)).expect("suite execution failed")
}

struct Outcome {
    line: String,
    ok: bool,
}

/// Evaluates one criterion over the selected cases and its runtime budget.
fn criterion<'a>(
    id: &str,
    cases: impl Iterator<Item = &'a CaseRecord>,
    elapsed: f64,
    budget: f64,
) -> Outcome {
    let mut total = 0usize;
    let mut failed: Vec<String> = Vec::new();
    for c in cases {
        total += 1;
        if !c.pass {
            failed.push(format!("{}/{} lambda={}", c.suite, c.case_id, c.lambda));
        }
    }
    let in_budget = elapsed < budget;
    let ok = failed.is_empty() && in_budget && total > 0;
    let mut line = format!(
        "criterion {id}: {} ({total} cases, {:.1}s / {budget:.0}s budget)",
        if ok { "PASS" } else { "FAIL" },
        elapsed
    );
    if !failed.is_empty() {
        line.push_str(&format!(" failing: {}", failed.join(", ")));
    }
    if !in_budget {
        line.push_str(" over budget");
    }
    Outcome { line, ok }
}

#[test]
fn acceptance_criteria() {
    let mut outcomes: Vec<Outcome> = Vec::new();

    // 1. Plancherel norm defects and transform round trips on Gaussians and
    // Poisson profiles, four lambdas, both defects <= 1e-6.
    let t = Instant::now();
    let r_pl = run(Suite::Plancherel, &LAMBDAS, &[0.9], 1536);
    let r_inv = run(Suite::Inversion, &LAMBDAS, &[0.9], 1536);
    outcomes.push(criterion(
        "01 plancherel_inversion",
        r_pl.cases.iter().chain(&r_inv.cases),
        t.elapsed().as_secs_f64(),
        60.0,
    ));

    // 2 + 3. One poisson run covers the kernel-vs-spectral identities (2)
    // and the semigroup/contraction properties (3); the shared wall clock is
    // charged to both.
    let t = Instant::now();
    let r_po = run(Suite::Poisson, &LAMBDAS, &[0.9], 2048);
    let po_elapsed = t.elapsed().as_secs_f64();
    outcomes.push(criterion(
        "02 poisson_multipliers",
        r_po.cases.iter().filter(|c| c.case_id.starts_with("kernel_vs_spectral")),
        po_elapsed,
        120.0,
    ));
    outcomes.push(criterion(
        "03 semigroup_contraction",
        r_po.cases.iter().filter(|c| {
            c.case_id.starts_with("semigroup") || c.case_id.starts_with("contraction")
        }),
        po_elapsed,
        120.0,
    ));

    // 4. Harmonicity and Cauchy-Riemann finite-difference residuals.
    let t = Instant::now();
    let r_cr = run(Suite::CauchyRiemann, &LAMBDAS, &[0.9], 2048);
    outcomes.push(criterion(
        "04 harmonicity_cauchy_riemann",
        r_cr.cases.iter(),
        t.elapsed().as_secs_f64(),
        180.0,
    ));

    // 5. Three-route agreement, involution, isometry.
    let t = Instant::now();
    let r_hr = run(Suite::HilbertRoutes, &LAMBDAS, &[0.9], 2048);
    outcomes.push(criterion(
        "05 hilbert_three_routes",
        r_hr.cases.iter().filter(|c| !c.case_id.starts_with("conjugate_identity")),
        t.elapsed().as_secs_f64(),
        180.0,
    ));

    // 6. Conjugate identity Q(Hf) + Pf = 0 on half-plane points, measured
    // standalone so its budget is its own.
    let t = Instant::now();
    let mut worst6 = 0.0_f64;
    for l in LAMBDAS {
        let p = DunklParameter::new(l).unwrap();
        let g = Arc::new(WeightedGrid::new(&p, 40.0, 2048).unwrap());
        let f = SampledFunction::from_fn(g, |x| (-0.5 * x * x).exp() * (1.0 + 0.4 * x));
        let hf = hilbert_multiplier(&p, &f).unwrap();
        let d =
            conjugate_identity_defect(&p, &f, &hf, &[(0.6, 0.3), (-1.2, 0.8), (2.0, 0.1)])
                .unwrap();
        worst6 = worst6.max(d);
    }
    let e6 = t.elapsed().as_secs_f64();
    let ok6 = worst6 <= 1e-4 && e6 < 60.0;
    outcomes.push(Outcome {
        line: format!(
            "criterion 06 conjugate_identity: {} (max defect {worst6:.2e}, {e6:.1}s / 60s budget)",
            if ok6 { "PASS" } else { "FAIL" }
        ),
        ok: ok6,
    });

    // 7. Kernel-bound constant: per-b bound, quadrature stability, and the
    // stated cross-lambda monotonic decrease of the fitted constant.
    let t = Instant::now();
    let r_ea = run(Suite::EstimateA, &[0.25, 0.5, 1.0, 2.0, 4.0], &[0.9], 2048);
    outcomes.push(criterion(
        "07 kernel_bound_constant",
        r_ea.cases.iter(),
        t.elapsed().as_secs_f64(),
        60.0,
    ));

    // 8. Atom quasinorm family bounded and refinement-stable.
    let t = Instant::now();
    let r_at = run(Suite::Atoms, &[0.5, 1.0], &[0.9], 2048);
    outcomes.push(criterion(
        "08 atom_quasinorms",
        r_at.cases.iter(),
        t.elapsed().as_secs_f64(),
        300.0,
    ));

    // 9. Transformed-atom ratio sweep finite and stable.
    let t = Instant::now();
    let r_ha = run(Suite::HilbertAtoms, &[0.5, 1.0], &[0.9, 1.0], 2048);
    outcomes.push(criterion(
        "09 transformed_atom_ratios",
        r_ha.cases.iter(),
        t.elapsed().as_secs_f64(),
        300.0,
    ));

    // 10. Byte-identical reports for identical config and seed, on a suite
    // that exercises the seeded sweep.
    let dir = std::env::temp_dir();
    let (p1, p2) = (dir.join("acc_rep_1.json"), dir.join("acc_rep_2.json"));
    let cfg10 = config(Suite::Atoms, &[0.5], &[0.9], 1024);
    write_json_report(&run_suite(&cfg10).unwrap(), &p1).unwrap();
    write_json_report(&run_suite(&cfg10).unwrap(), &p2).unwrap();
    let (b1, b2) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    let ok10 = !b1.is_empty() && b1 == b2;
    outcomes.push(Outcome {
        line: format!(
            "criterion 10 deterministic_reports: {} ({} bytes)",
            if ok10 { "PASS" } else { "FAIL" },
            b1.len()
        ),
        ok: ok10,
    });

    for o in &outcomes {
        println!("{}", o.line);
    }
    let failing: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.ok)
        .map(|o| o.line.as_str())
        .collect();
    assert!(
        failing.is_empty(),
        "failed acceptance criteria:\n{}",
        failing.join("\n")
    );
}
