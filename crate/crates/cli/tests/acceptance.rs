//! Acceptance criteria at full scale. Each test prints one PASS/FAIL line
//! for its criterion (run with `--nocapture` to see them), preceded by the
//! individual checks.

use std::time::{Duration, Instant};

use fracheat::validate::{Scale, CRITERIA};

fn criterion(id: u32, limit: Option<Duration>) {
    let c = CRITERIA.iter().find(|c| c.id == id).expect("criterion id");
    let start = Instant::now();
    let rows = (c.run)(Scale::Full);
    let elapsed = start.elapsed();
    for r in &rows {
        println!("    {}", r.human());
    }
    let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let ok = !rows.is_empty() && failed.is_empty() && in_time;
    let budget = limit.map_or(String::new(), |l| format!(", limit {}s", l.as_secs()));
    println!(
        "{} criterion {id}: {} ({} checks, {:.1}s{budget})",
        if ok { "PASS" } else { "FAIL" },
        c.title,
        rows.len(),
        elapsed.as_secs_f64()
    );
    assert!(failed.is_empty(), "criterion {id}: {} of {} checks failed", failed.len(), rows.len());
    assert!(in_time, "criterion {id}: {:.1}s exceeds the time limit", elapsed.as_secs_f64());
}

#[test]
fn criterion_01_half_order_collapse() {
    criterion(1, None);
}

#[test]
fn criterion_02_time_moments() {
    criterion(2, Some(Duration::from_secs(60)));
}

#[test]
fn criterion_03_cross_route_agreement() {
    criterion(3, None);
}

#[test]
fn criterion_04_wright_closed_form() {
    criterion(4, None);
}

#[test]
fn criterion_05_laplace_relation() {
    criterion(5, None);
}

#[test]
fn criterion_06_solution_moments() {
    criterion(6, None);
}

#[test]
fn criterion_07_root_invariants() {
    criterion(7, None);
}

#[test]
fn criterion_08_monte_carlo() {
    criterion(8, Some(Duration::from_secs(120)));
}

#[test]
fn criterion_09_caputo_convergence() {
    criterion(9, None);
}

#[test]
fn criterion_10_gaussian_subordination() {
    criterion(10, None);
}
