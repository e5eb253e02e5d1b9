//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::LN_2;
use std::process::{Command, ExitCode};
use std::time::Instant;

use sphdyn::ergodic::{birkhoff_from_mu, chi_average, DEFAULT_BURN_IN};
use sphdyn::knorm::{area_identity, k_norm_adaptive};
use sphdyn::lab::{
    inequality_chain_report, k_infinity_bracket, ratios_bounded, theorem1_growth_table, BracketOptions, ChainOptions,
    GrowthOptions, DEFAULT_SEEDS,
};
use sphdyn::periodic::{chi_max_lower, k_attaining_cycle_check};
use sphdyn::sphere::chordal_distance;
use sphdyn::zoo::{lattes4, power_map, theorem1_map, FamilyLabel};
use sphdyn::{Complex64, RationalMap, SpherePoint};

type Check = Result<String, String>;

fn build(label: &FamilyLabel) -> RationalMap {
    label.build().expect("zoo map")
}

fn family_zoo() -> Vec<FamilyLabel> {
    let mut v: Vec<FamilyLabel> = (2..=6).map(|d| FamilyLabel::Power { d }).collect();
    v.extend((2..=3).map(|d| FamilyLabel::Chebyshev { d }));
    v.push(FamilyLabel::Lattes4);
    v.extend((1..=3).map(|n| FamilyLabel::Theorem1 { n }));
    v
}

fn standard_zoo() -> Vec<FamilyLabel> {
    let mut v = family_zoo();
    v.extend((0..20).map(|i| FamilyLabel::Random { d: 2 + i as usize % 3, seed: i }));
    v
}

fn k_of(f: &RationalMap) -> f64 {
    k_norm_adaptive(f, DEFAULT_SEEDS).expect("k_norm").value
}

/// `K` over 100 random maps of each degree 2–6 plus every family map.
fn floor_population() -> Vec<(String, usize, f64)> {
    let mut labels: Vec<FamilyLabel> = (2..=6)
        .flat_map(|d| (0..100).map(move |seed| FamilyLabel::Random { d, seed }))
        .collect();
    labels.extend(family_zoo());
    labels.push(FamilyLabel::Theorem1 { n: 4 });
    labels
        .iter()
        .map(|l| {
            let f = build(l);
            (l.to_string(), f.degree(), k_of(&f))
        })
        .collect()
}

fn floor_sqrt_d(pop: &[(String, usize, f64)]) -> Check {
    let bad: Vec<_> = pop.iter().filter(|(_, d, k)| *k < (*d as f64).sqrt() - 1e-9).collect();
    let margin = pop.iter().map(|(_, d, k)| k - (*d as f64).sqrt()).fold(f64::INFINITY, f64::min);
    if bad.is_empty() {
        Ok(format!("{} maps, min K - sqrt(d) = {margin:.3e}", pop.len()))
    } else {
        Err(format!("violations: {bad:?}"))
    }
}

fn floor_two(pop: &[(String, usize, f64)]) -> Check {
    let bad: Vec<_> = pop.iter().filter(|(_, d, k)| *d >= 2 && *k < 2.0 - 1e-9).collect();
    let margin = pop.iter().map(|(_, _, k)| k - 2.0).fold(f64::INFINITY, f64::min);
    if bad.is_empty() {
        Ok(format!("{} maps, min K - 2 = {margin:.3e}", pop.len()))
    } else {
        Err(format!("violations: {bad:?}"))
    }
}

fn area() -> Check {
    let mut labels = vec![FamilyLabel::Power { d: 2 }, FamilyLabel::Power { d: 3 }, FamilyLabel::Lattes4];
    labels.extend((0..10).map(|i| FamilyLabel::Random { d: 2 + i as usize % 4, seed: 500 + i }));
    let mut worst: f64 = 0.0;
    for l in &labels {
        let a = area_identity(&build(l), 1_000_000).map_err(|e| e.to_string())?;
        if a.rel_err > 1e-3 {
            return Err(format!("{l}: integral {} expected {}", a.integral, a.expected));
        }
        worst = worst.max(a.rel_err);
    }
    Ok(format!("{} maps, worst relative error {worst:.2e}", labels.len()))
}

/// Dense scan of `d r^{d-1} (1 + r²) / (1 + r^{2d})` over `(0, 4]`.
fn power_oracle(d: usize) -> f64 {
    (1..=400_000)
        .map(|i| {
            let r = i as f64 * 1e-5;
            d as f64 * r.powi(d as i32 - 1) * (1.0 + r * r) / (1.0 + r.powi(2 * d as i32))
        })
        .fold(0.0, f64::max)
}

fn exact_k() -> Check {
    let mut worst: f64 = 0.0;
    for d in 2..=6 {
        let k = k_of(&power_map(d).unwrap());
        let oracle = power_oracle(d);
        let rel = (k - oracle).abs() / oracle;
        if rel > 1e-6 {
            return Err(format!("d={d}: K {k} oracle {oracle}"));
        }
        worst = worst.max(rel);
    }
    let id = k_of(&RationalMap::identity());
    if id != 1.0 {
        return Err(format!("K(identity) = {id}"));
    }
    Ok(format!("worst relative error {worst:.2e}, K(identity) = 1"))
}

fn tanh_oracle(n: usize, zeta: Complex64) -> Complex64 {
    (-(n as i64)..=n as i64)
        .map(|k| {
            let x = zeta * n as f64 + 2.0 * k as f64;
            let (e, ei) = (x.exp(), (-x).exp());
            (e - ei) / (e + ei)
        })
        .product()
}

fn theorem1_family() -> Check {
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let f = theorem1_map(n).unwrap();
        for j in 0..50 {
            let zeta = Complex64::new(-0.6 + 1.2 * j as f64 / 49.0, 0.37 * (j as f64).sin());
            let got = f.apply(&SpherePoint::from_complex((zeta * 2.0).exp()));
            let dist = chordal_distance(&got, &SpherePoint::from_complex(tanh_oracle(n, zeta)));
            if dist > 1e-8 {
                return Err(format!("n={n} point {j}: chordal distance {dist:.2e}"));
            }
            worst = worst.max(dist);
        }
    }
    let rows = theorem1_growth_table(4, &GrowthOptions::default()).map_err(|e| e.to_string())?;
    let ratios: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.ratio)).collect();
    if !ratios_bounded(&rows, 2.0) {
        return Err(format!("ratios {ratios:?} not within a factor 2 of their median"));
    }
    Ok(format!("oracle distance {worst:.1e}, K/sqrt(deg) = [{}]", ratios.join(", ")))
}

fn lattes_multiplier() -> Check {
    let f = lattes4();
    let lambda = f.multiplier_at_fixed_point(&SpherePoint::INFINITY);
    if (lambda - Complex64::new(4.0, 0.0)).norm() > 1e-8 {
        return Err(format!("multiplier at infinity {lambda}"));
    }
    let chi = chi_max_lower(&f, 1).map_err(|e| e.to_string())?;
    if chi < 4f64.ln() - 1e-8 {
        return Err(format!("chi_max_lower {chi}"));
    }
    Ok(format!("lambda = {lambda}, chi_max_lower(1) = {chi:.12}"))
}

fn lattes_average() -> Check {
    let est = chi_average(&lattes4(), 4000, DEFAULT_BURN_IN, 1).map_err(|e| e.to_string())?;
    let tol = (3.0 * est.stderr).max(0.02);
    let dev = (est.value - LN_2).abs();
    let msg = format!("chi_a = {:.5} +- {:.5}, |chi_a - log 2| = {dev:.5}, tol {tol:.4}", est.value, est.stderr);
    if dev <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn chain() -> Check {
    let zoo = standard_zoo();
    let opts = ChainOptions::default();
    let mut gaps = 0;
    for l in &zoo {
        let r = inequality_chain_report(&build(l), &l.to_string(), &opts).map_err(|e| format!("{l}: {e}"))?;
        if !r.chain_ok {
            return Err(format!("{l}: chain broken: {}", serde_json::to_string(&r).unwrap()));
        }
        gaps += r.strict_gap as usize;
    }
    Ok(format!("{} maps chain_ok, {gaps} with a strict chi_a < chi_m gap", zoo.len()))
}

fn subadditivity() -> Check {
    let mut labels = vec![
        FamilyLabel::Power { d: 2 },
        FamilyLabel::Power { d: 3 },
        FamilyLabel::Chebyshev { d: 2 },
        FamilyLabel::Chebyshev { d: 3 },
        FamilyLabel::Lattes4,
        FamilyLabel::Theorem1 { n: 1 },
    ];
    labels.extend((0..4).map(|i| FamilyLabel::Random { d: 2 + i as usize % 3, seed: i }));
    let mut pairs = 0;
    for l in &labels {
        let b = k_infinity_bracket(&build(l), 6, 1, &BracketOptions::default()).map_err(|e| e.to_string())?;
        for m in 1..=5 {
            for n in 1..=6 - m {
                if b.a(m + n) > b.a(m) + b.a(n) + 1e-6 {
                    return Err(format!("{l}: a_{} = {} > a_{m} + a_{n} = {}", m + n, b.a(m + n), b.a(m) + b.a(n)));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{} maps, {pairs} pairs", labels.len()))
}

fn sandwich() -> Check {
    let mut notes = Vec::new();
    for d in [2usize, 3] {
        let f = power_map(d).unwrap();
        let m_max = sphdyn::lab::default_m_max(d).unwrap();
        let b = k_infinity_bracket(&f, 5, m_max, &BracketOptions::default()).map_err(|e| e.to_string())?;
        if b.gap() > 1e-4 || (b.lower - (d as f64).ln()).abs() > 1e-8 {
            return Err(format!("z^{d}: lower {} upper {}", b.lower, b.upper));
        }
        notes.push(format!("z^{d} gap {:.1e}", b.gap()));
    }
    let b = k_infinity_bracket(&lattes4(), 4, 1, &BracketOptions::default()).map_err(|e| e.to_string())?;
    let log4 = 4f64.ln();
    if (b.lower - log4).abs() > 1e-8 || b.upper > log4 + 0.15 {
        return Err(format!("lattes4: lower {} upper {}", b.lower, b.upper));
    }
    notes.push(format!("lattes4 upper - log 4 = {:.2e}", b.upper - log4));
    Ok(notes.join(", "))
}

fn attaining_cycle() -> Check {
    for d in 2..=6 {
        let f = power_map(d).unwrap();
        let k = k_norm_adaptive(&f, DEFAULT_SEEDS).map_err(|e| e.to_string())?;
        let check = k_attaining_cycle_check(&f, &k, 1, 1e-6).map_err(|e| e.to_string())?;
        if !check.found {
            return Err(format!("z^{d}: no attaining fixed point"));
        }
        let b = k_infinity_bracket(&f, 5, 1, &BracketOptions::default()).map_err(|e| e.to_string())?;
        if b.gap() >= 1e-4 {
            return Err(format!("z^{d}: gap {}", b.gap()));
        }
    }
    Ok("z^2 .. z^6: attaining fixed point found, bracket closed".into())
}

fn cross_estimators() -> Check {
    let labels = [
        FamilyLabel::Power { d: 2 },
        FamilyLabel::Chebyshev { d: 3 },
        FamilyLabel::Lattes4,
        FamilyLabel::Theorem1 { n: 1 },
        FamilyLabel::Random { d: 3, seed: 7 },
    ];
    let mut notes = Vec::new();
    for l in &labels {
        let f = build(l);
        let ens = chi_average(&f, 4000, DEFAULT_BURN_IN, 3).map_err(|e| e.to_string())?;
        let fwd = birkhoff_from_mu(&f, 20_000, DEFAULT_BURN_IN, 3).map_err(|e| e.to_string())?;
        let diff = (ens.value - fwd.value).abs();
        let sigma = ens.stderr.hypot(fwd.stderr);
        if !ens.agrees_with(&fwd, 3.0) {
            return Err(format!("{l}: ensemble {} +- {}, forward {} +- {}", ens.value, ens.stderr, fwd.value, fwd.stderr));
        }
        notes.push(format!("{l} {diff:.1e}/{sigma:.1e}"));
    }
    Ok(format!("|difference|/combined stderr: {}", notes.join(", ")))
}

fn cli_determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("sphdyn-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let runs: [&[&str]; 4] = [
        &["knorm", "--family", "random:d=4:seed=2"],
        &["chiavg", "--family", "lattes4", "--paths", "1000", "--seed", "5"],
        &["chain-report", "--family", "chebyshev:d=2", "--paths", "1000"],
        &["theorem1", "--n-max", "2", "--format", "csv"],
    ];
    let out = dir.join("out");
    let out_s = out.to_str().unwrap().to_owned();
    let mut result = Ok(format!("{} commands reproduced byte for byte", runs.len()));
    for args in runs {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let status = Command::new(env!("CARGO_BIN_EXE_sphdyn"))
                .args(args)
                .args(["--output", &out_s])
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{args:?} exited with {status}"));
            }
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            result = Err(format!("{args:?} differs between runs"));
            break;
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    result
}

fn main() -> ExitCode {
    let start = Instant::now();
    let pop = floor_population();
    println!("K computed for {} maps ({:.1}s)", pop.len(), start.elapsed().as_secs_f64());
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("K >= sqrt(d) on random maps and the zoo", Box::new(|| floor_sqrt_d(&pop))),
        ("K >= 2 on the same population", Box::new(|| floor_two(&pop))),
        ("area identity at grid 1e6", Box::new(area)),
        ("exact K(z^d) and K(identity)", Box::new(exact_k)),
        ("tanh-product family and bounded K/sqrt(deg)", Box::new(theorem1_family)),
        ("Lattes multiplier 4 at infinity", Box::new(lattes_multiplier)),
        ("Lattes average exponent log 2", Box::new(lattes_average)),
        ("inequality chain on the standard zoo", Box::new(chain)),
        ("subadditivity of log K(f^n)", Box::new(subadditivity)),
        ("k_inf bracket for z^2, z^3, Lattes", Box::new(sandwich)),
        ("K-attaining fixed point of z^d", Box::new(attaining_cycle)),
        ("ensemble vs forward-orbit exponent", Box::new(cross_estimators)),
        ("CLI determinism", Box::new(cli_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match check() {
            Ok(s) => ("PASS", s),
            Err(s) => {
                failed += 1;
                ("FAIL", s)
            }
        };
        println!("{tag} [{:>2}] {name}: {detail} ({:.1}s)", i + 1, t.elapsed().as_secs_f64());
    }
    println!(
        "{} of {} criteria passed in {:.0}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
