//! End-to-end acceptance checks: pinned reference tables for the study
//! weights m = 1 + 1/(x+1), n = 1 + cos²(2x) on [0, 1], plus structural
//! properties of the solver. Each test prints one PASS/FAIL line.

use fucik::{
    asymptotic_eigenvalue, bracketing_defect, const_eigenvalue, count, eigenvalue,
    linear_eigenvalue, remainder_rate, terminal_angle, weyl_integral, Problem, Sign,
    ToleranceConfig, WeightExpr,
};

const M_TEXT: &str = "1 + 1/(x+1)";
const N_TEXT: &str = "1 + cos(2*x)^2";

fn study_problem() -> Problem {
    let m = WeightExpr::parse(M_TEXT).unwrap();
    let n = WeightExpr::parse(N_TEXT).unwrap();
    Problem::new(1.0, m, n).unwrap()
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn rel(value: f64, reference: f64) -> f64 {
    ((value - reference) / reference).abs()
}

fn finish(name: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("{name}: PASS");
    } else {
        let detail = failures.join("; ");
        println!("{name}: FAIL - {detail}");
        panic!("{name}: FAIL - {detail}");
    }
}

#[test]
fn criterion_1_constant_weight_exactness() {
    let mut failures = Vec::new();
    let mut cfg = tol();
    cfg.bisection_eps = 1e-9;
    for m0 in [0.5, 1.0, 2.0] {
        for n0 in [0.5, 1.0, 2.0] {
            let m = WeightExpr::parse(&format!("{m0}")).unwrap();
            let n = WeightExpr::parse(&format!("{n0}")).unwrap();
            let p = Problem::new(1.0, m, n).unwrap();
            for t in [0.1, 1.0, 10.0] {
                for k in 1..=12 {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let exact = const_eigenvalue(m0, n0, 1.0, k, t, sign);
                        match eigenvalue(&p, k, t, sign, &cfg) {
                            Ok(h) => {
                                let e = rel(h.lambda, exact);
                                if e >= 1e-6 {
                                    failures.push(format!(
                                        "m0={m0} n0={n0} t={t} k={k} {sign}: rel {e:.2e}"
                                    ));
                                }
                            }
                            Err(err) => {
                                failures.push(format!("m0={m0} n0={n0} t={t} k={k} {sign}: {err}"))
                            }
                        }
                    }
                }
            }
        }
    }
    finish("criterion 1 (constant-weight exactness)", failures);
}

#[test]
fn criterion_2_fourth_curve_ray_table() {
    // (t, alpha, beta) reference rows for the fourth Plus curve
    let rows: [(f64, f64, f64); 11] = [
        (1e5, 23.577, 2357747.078),
        (1e4, 23.939, 239291.613),
        (1e3, 25.110, 25110.064),
        (1e2, 28.994, 2899.356),
        (10.0, 43.172, 431.716),
        (1.0, 106.483, 106.483),
        (0.1, 486.812, 48.649),
        (0.01, 3476.799, 34.768),
        (1e-3, 30800.052, 30.800),
        (1e-4, 295937.669, 29.594),
        (1e-5, 2921329.105, 29.213),
    ];
    let p = study_problem();
    let cfg = tol();
    let mut failures = Vec::new();
    for (t, alpha_ref, beta_ref) in rows {
        match eigenvalue(&p, 4, t, Sign::Plus, &cfg) {
            Ok(h) => {
                let ea = rel(h.alpha, alpha_ref);
                let eb = rel(h.beta, beta_ref);
                if ea >= 5e-3 || eb >= 5e-3 {
                    failures.push(format!(
                        "t={t}: alpha {:.4} vs {alpha_ref} ({ea:.2e}), beta {:.4} vs {beta_ref} ({eb:.2e})",
                        h.alpha, h.beta
                    ));
                }
            }
            Err(e) => failures.push(format!("t={t}: {e}")),
        }
    }
    finish(
        "criterion 2 (fourth-curve ray table, 11 rows at 0.5%)",
        failures,
    );
}

#[test]
fn criterion_3_asymptotic_limits() {
    let p = study_problem();
    let mut cfg = tol();
    cfg.bisection_eps = 1e-6;
    let mut failures = Vec::new();

    match eigenvalue(&p, 4, 1e5, Sign::Plus, &cfg) {
        Ok(h) => {
            let e = rel(h.alpha, 23.577);
            if e >= 0.01 {
                failures.push(format!(
                    "alpha at t=1e5: {:.4} vs 23.577 ({e:.2e})",
                    h.alpha
                ));
            }
        }
        Err(e) => failures.push(format!("t=1e5 solve: {e}")),
    }

    let m = WeightExpr::parse(M_TEXT).unwrap();
    let n = WeightExpr::parse(N_TEXT).unwrap();
    for (w, reference, label) in [(m, 23.44031, "mu2(m)"), (n, 29.08, "mu2(n)")] {
        match linear_eigenvalue(&w, 1.0, 2, &cfg) {
            Ok(v) => {
                let e = rel(v, reference);
                if e >= 1e-3 {
                    failures.push(format!("{label}: {v:.5} vs {reference} ({e:.2e})"));
                }
            }
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    finish(
        "criterion 3 (asymptotic limits at t=1e5 and mu2 targets)",
        failures,
    );
}

#[test]
fn criterion_4_high_k_table_at_t30() {
    let ks = [10u32, 50, 100, 200];
    let numeric_refs = [212.299, 5300.702, 21132.488, 84529.952];
    let asymptotic_refs = [211.144, 5285.967, 21145.257, 84503.308];
    let p = study_problem();
    let cfg = tol();
    let mut failures = Vec::new();
    let mut remainders = Vec::new();
    for i in 0..ks.len() {
        let num = match eigenvalue(&p, ks[i], 30.0, Sign::Plus, &cfg) {
            Ok(h) => h.lambda,
            Err(e) => {
                failures.push(format!("k={}: {e}", ks[i]));
                continue;
            }
        };
        let asym = asymptotic_eigenvalue(&p, ks[i], 30.0).unwrap();
        let en = rel(num, numeric_refs[i]);
        if en >= 5e-3 {
            failures.push(format!(
                "k={} numeric: {num:.4} vs {} ({en:.2e})",
                ks[i], numeric_refs[i]
            ));
        }
        let ea = rel(asym, asymptotic_refs[i]);
        if ea >= 1e-3 {
            failures.push(format!(
                "k={} asymptotic: {asym:.4} vs {} ({ea:.2e})",
                ks[i], asymptotic_refs[i]
            ));
        }
        remainders.push((1.0 - asym / num).abs());
    }
    if remainders.len() == 4 {
        if !remainders.windows(2).all(|w| w[1] < w[0]) {
            failures.push(format!("remainders not decreasing: {remainders:?}"));
        }
        let (first, last) = (remainders[0], remainders[3]);
        if !(0.0025..=0.01).contains(&first) {
            failures.push(format!("first remainder {first:.5} not within 2x of 0.005"));
        }
        if !(0.00015..=0.0006).contains(&last) {
            failures.push(format!("last remainder {last:.6} not within 2x of 0.0003"));
        }
    }
    finish("criterion 4 (k=10..200 table at t=30)", failures);
}

#[test]
fn criterion_5_k28_table_across_rays() {
    let ts = [0.1, 0.5, 1.0, 5.0, 10.0, 1000.0, 1e5];
    let numeric_refs = [
        23294.798, 7588.970, 5124.467, 2577.485, 2099.903, 1231.067, 1156.209,
    ];
    let asymptotic_refs = [
        23202.100, 7550.103, 5094.391, 2565.027, 2090.991, 1226.496, 1152.512,
    ];
    let p = study_problem();
    let cfg = tol();
    let mut failures = Vec::new();
    for i in 0..ts.len() {
        let num = match eigenvalue(&p, 28, ts[i], Sign::Plus, &cfg) {
            Ok(h) => h.lambda,
            Err(e) => {
                failures.push(format!("t={}: {e}", ts[i]));
                continue;
            }
        };
        let asym = asymptotic_eigenvalue(&p, 28, ts[i]).unwrap();
        let en = rel(num, numeric_refs[i]);
        if en >= 5e-3 {
            failures.push(format!(
                "t={} numeric: {num:.4} vs {} ({en:.2e})",
                ts[i], numeric_refs[i]
            ));
        }
        let ea = rel(asym, asymptotic_refs[i]);
        if ea >= 1e-3 {
            failures.push(format!(
                "t={} asymptotic: {asym:.4} vs {} ({ea:.2e})",
                ts[i], asymptotic_refs[i]
            ));
        }
        let r = (1.0 - asym / num).abs();
        if !(0.002..=0.008).contains(&r) {
            failures.push(format!(
                "t={} remainder {r:.6} outside [0.002, 0.008]",
                ts[i]
            ));
        }
    }
    finish("criterion 5 (k=28 table across rays)", failures);
}

#[test]
fn criterion_6_weyl_counting_at_scale() {
    let p = study_problem();
    let cfg = tol();
    let lambda = 1e5;
    let mut failures = Vec::new();
    for t in [1.0, 30.0] {
        let c = count(&p, lambda, t, &cfg).unwrap();
        let i = weyl_integral(&p, t, 1e-12).unwrap().integral;
        let ratio = c.total as f64 * std::f64::consts::PI / (4.0 * lambda.sqrt() * i);
        let dev = (ratio - 1.0).abs();
        if dev >= 0.02 {
            failures.push(format!("t={t}: count {} ratio deviates {dev:.4}", c.total));
        }
    }
    finish("criterion 6 (Weyl counting at lambda=1e5)", failures);
}

#[test]
fn criterion_7_bracketing_defect_bounds() {
    let p = study_problem();
    let cfg = tol();
    let mut failures = Vec::new();
    for c in [0.3, 0.5, 0.7] {
        for t in [0.5, 1.0, 30.0] {
            for i in 0..40 {
                let lambda = 10f64.powf(4.0 * i as f64 / 39.0);
                match bracketing_defect(&p, lambda, t, c, &cfg) {
                    Ok(d) => {
                        if !(-9..=11).contains(&d) {
                            failures.push(format!("c={c} t={t} lambda={lambda:.3}: defect {d}"));
                        }
                    }
                    Err(e) => failures.push(format!("c={c} t={t} lambda={lambda:.3}: {e}")),
                }
            }
        }
    }
    finish("criterion 7 (bracketing defect in [-9, 11])", failures);
}

#[test]
fn criterion_8_property_suite() {
    let p = study_problem();
    let mut failures = Vec::new();
    let mut cfg = tol();
    cfg.bisection_eps = 1e-8;

    // swap symmetry: t·λ_{k,t}^+(m,n) = λ_{k,1/t}^-(n,m)
    let swapped = Problem::new(
        1.0,
        WeightExpr::parse(N_TEXT).unwrap(),
        WeightExpr::parse(M_TEXT).unwrap(),
    )
    .unwrap();
    for k in 1..=8 {
        for t in [0.3, 2.0] {
            let lhs = t * eigenvalue(&p, k, t, Sign::Plus, &cfg).unwrap().lambda;
            let rhs = eigenvalue(&swapped, k, 1.0 / t, Sign::Minus, &cfg)
                .unwrap()
                .lambda;
            let e = rel(lhs, rhs);
            if e >= 1e-5 {
                failures.push(format!("swap k={k} t={t}: {lhs:.6} vs {rhs:.6} ({e:.2e})"));
            }
        }
    }

    // weight monotonicity: pointwise larger weights lower every eigenvalue
    let bigger = Problem::new(
        1.0,
        WeightExpr::parse(&format!("({M_TEXT}) + 0.5")).unwrap(),
        WeightExpr::parse(&format!("({N_TEXT}) + 0.5")).unwrap(),
    )
    .unwrap();
    for k in [2u32, 6] {
        let base = eigenvalue(&p, k, 2.0, Sign::Plus, &cfg).unwrap().lambda;
        let lower = eigenvalue(&bigger, k, 2.0, Sign::Plus, &cfg)
            .unwrap()
            .lambda;
        if lower >= base {
            failures.push(format!("monotonicity k={k}: {lower:.4} !< {base:.4}"));
        }
    }

    // harmonic-mean comparison: λ_{k,t}^± ≤ k-th eigenvalue of weight mnt/(m+nt)
    for t in [0.5, 1.0, 2.0] {
        let w = WeightExpr::parse(&format!(
            "(({M_TEXT})*({N_TEXT})*{t}) / (({M_TEXT}) + ({N_TEXT})*{t})"
        ))
        .unwrap();
        for k in [1u32, 4, 8] {
            let cap = linear_eigenvalue(&w, 1.0, k, &cfg).unwrap();
            for sign in [Sign::Plus, Sign::Minus] {
                let lam = eigenvalue(&p, k, t, sign, &cfg).unwrap().lambda;
                if lam > cap * (1.0 + 1e-6) {
                    failures.push(format!("bound k={k} t={t} {sign}: {lam:.4} > {cap:.4}"));
                }
            }
        }
    }

    // terminal angle strictly increasing in λ
    let mut prev = f64::NEG_INFINITY;
    for i in 0..12 {
        let lambda = 10.0 * (1e3f64).powf(i as f64 / 11.0);
        let a = terminal_angle(&p, lambda, 3.0, Sign::Plus, &cfg).unwrap();
        if a <= prev {
            failures.push(format!(
                "terminal angle not increasing at lambda={lambda:.2}"
            ));
        }
        prev = a;
    }

    // symbolic derivative vs central differences
    for text in [
        M_TEXT,
        N_TEXT,
        "x^2.5 + exp(-x)",
        "sqrt(x + 0.5)*log(x + 2)",
    ] {
        let w = WeightExpr::parse(text).unwrap();
        for i in 1..=20 {
            let x = 0.045 * i as f64;
            let h = 1e-6;
            let fd = (w.eval_raw(x + h) - w.eval_raw(x - h)) / (2.0 * h);
            let sym = w.eval_derivative_raw(x);
            if ((fd - sym) / (1.0 + sym.abs())).abs() >= 1e-6 {
                failures.push(format!("derivative of {text} at x={x}: {sym} vs fd {fd}"));
            }
        }
    }

    // homogeneity: scaling both weights by c divides λ by c
    let scaled = Problem::new(
        1.0,
        WeightExpr::parse(&format!("2.7*({M_TEXT})")).unwrap(),
        WeightExpr::parse(&format!("2.7*({N_TEXT})")).unwrap(),
    )
    .unwrap();
    let mut tight = cfg;
    tight.bisection_eps = 1e-9;
    for (k, sign) in [(3u32, Sign::Plus), (5, Sign::Minus)] {
        let base = eigenvalue(&p, k, 2.0, sign, &tight).unwrap().lambda;
        let sc = eigenvalue(&scaled, k, 2.0, sign, &tight).unwrap().lambda;
        let e = rel(sc, base / 2.7);
        if e >= 1e-6 {
            failures.push(format!(
                "homogeneity k={k} {sign}: {sc:.8} vs {:.8}",
                base / 2.7
            ));
        }
    }

    finish("criterion 8 (property suite)", failures);
}

#[test]
fn criterion_9_remainder_decay() {
    let p = study_problem();
    let cfg = tol();
    let mut failures = Vec::new();

    let r = remainder_rate(&p, 30.0, &[10, 50, 100, 200], &cfg).unwrap();
    let rs: Vec<f64> = r.points.iter().map(|&(_, v)| v).collect();
    if !rs.windows(2).all(|w| w[1] < w[0]) {
        failures.push(format!("remainders not strictly decreasing: {rs:?}"));
    }

    let c = Problem::new(
        1.0,
        WeightExpr::parse("1.7").unwrap(),
        WeightExpr::parse("0.6").unwrap(),
    )
    .unwrap();
    let mut tight = cfg;
    tight.bisection_eps = 1e-9;
    let rc = remainder_rate(&c, 2.5, &[2, 4, 6, 8], &tight).unwrap();
    if rc.slope.is_some() {
        failures.push(format!(
            "constant even-k remainders not flagged exact: {:?}",
            rc.points
        ));
    }
    for &(k, v) in &rc.points {
        if v >= 1e-7 {
            failures.push(format!(
                "constant even k={k}: remainder {v:.2e} above solver tolerance"
            ));
        }
    }

    finish("criterion 9 (remainder decay)", failures);
}
