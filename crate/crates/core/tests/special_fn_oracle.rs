//! Special functions against high-precision reference values in `fixtures/`.

use fracpois::special_fn::{bessel_i, ml3, MLSpec};

fn rows(name: &str) -> Vec<Vec<f64>> {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|c| c.trim().parse().unwrap()).collect())
        .collect()
}

fn check_table(name: &str, min_rows: usize, tol: f64) {
    let mut failures = Vec::new();
    let table = rows(name);
    assert!(table.len() >= min_rows);
    for row in &table {
        let (alpha, beta, gamma, z, want) = (row[0], row[1], row[2], row[3], row[4]);
        match ml3(&MLSpec::new(alpha, beta, gamma), z) {
            Ok(got) => {
                let rel = ((got - want) / want).abs();
                if rel > tol {
                    failures.push(format!("E^{gamma}_{{{alpha},{beta}}}({z}) = {got:e}, want {want:e}, rel {rel:.1e}"));
                }
            }
            Err(e) => failures.push(format!("E^{gamma}_{{{alpha},{beta}}}({z}): {e}")),
        }
    }
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn mittag_leffler_matches_reference() {
    check_table("ml3_reference.csv", 200, 1e-12);
}

#[test]
fn mittag_leffler_large_gamma_matches_reference() {
    check_table("ml3_large_gamma.csv", 100, 1e-12);
}

#[test]
fn bessel_matches_reference() {
    for row in rows("bessel_reference.csv") {
        let (order, z, want) = (row[0] as u32, row[1], row[2]);
        let got = bessel_i(order, z).unwrap();
        assert!(((got - want) / want).abs() < 1e-13, "I_{order}({z}) = {got:e}, want {want:e}");
    }
}
