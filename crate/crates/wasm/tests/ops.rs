use nf_wasm::{champernowne, construct, digit_trace, point_discrepancy};

#[test]
fn midpoints_of_n_cells() {
    // Points (2i+1)/(2N): star discrepancy 1/(2N), extreme 1/N.
    let out = point_discrepancy("1/8, 3/8, 5/8, 7/8").unwrap();
    assert!(out.contains("star discrepancy = 1/8"), "{}", out);
    assert!(out.contains("extreme discrepancy = 1/4"), "{}", out);
}

#[test]
fn single_point_at_zero() {
    let out = point_discrepancy("0").unwrap();
    assert!(out.contains("star discrepancy = 1 "), "{}", out);
}

#[test]
fn bad_points_are_rejected() {
    assert!(point_discrepancy("").is_err());
    assert!(point_discrepancy("1/0").is_err());
    assert!(point_discrepancy("3/2").is_err());
    assert!(point_discrepancy("x").is_err());
}

#[test]
fn champernowne_prefix() {
    assert_eq!(champernowne(15), "123456789101112");
}

#[test]
fn trace_rows_cover_each_base() {
    let csv = digit_trace(&champernowne(2000), 10, "10,2").unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,base,star,extreme,simple"));
    let rows: Vec<_> = lines.collect();
    assert!(rows.iter().any(|r| r.split(',').nth(1) == Some("10")));
    assert!(rows.iter().any(|r| r.split(',').nth(1) == Some("2")));
    assert!(digit_trace("12a", 10, "10").is_err());
    assert!(digit_trace("", 10, "10").is_err());
}

#[test]
fn small_runs() {
    let out = construct("thm5", "2", "3", 6, 32, 1, 10).unwrap();
    assert!(out.starts_with("6 stages"), "{}", out);
    assert!(out.contains("digits in base 10"), "{}", out);
    let out = construct("thm4", "", "3", 4, 32, 1, 3).unwrap();
    assert!(out.starts_with("4 stages"), "{}", out);
    assert!(construct("thm9", "2", "3", 2, 32, 1, 10).is_err());
    assert!(construct("thm5", "2", "3", 100, 32, 1, 10).is_err());
}
