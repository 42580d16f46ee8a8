use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use crexlab::config::preset;
use crexlab::csv_io::{write_rows, NumberFormat};
use crexlab::simulation::{
    calibrate_parameter, run_cell, run_grid, with_threads, BiasConvention, Cell, EstimatorGrid, SimulationConfig,
    SimulationRow, WGrid, DEFAULT_SEED,
};
use crexlab_core::{
    asymptotic_variance_minrssu, asymptotic_variance_srs, crex, crex_minrssu_design, crex_srs_design,
    cumulative_extropy, d_designs, d_min_vs_parent, draw_minrssu, draw_srs, lstat, Discrimination, EstimatorSpec,
    OrderStatistics, ParametricDistribution,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn dist(spec: &str) -> ParametricDistribution {
    spec.parse().unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Survival function and integration range written out independently of the library.
enum Family {
    Uniform,
    Exponential(f64),
    Finite(u32, u32),
}

impl Family {
    fn spec(&self) -> String {
        match self {
            Family::Uniform => "unif:a=0,b=1".into(),
            Family::Exponential(rate) => format!("exp:rate={rate}"),
            Family::Finite(a, b) => format!("finite:a={a},b={b}"),
        }
    }

    fn survival(&self, x: f64) -> f64 {
        match *self {
            Family::Uniform => 1.0 - x,
            Family::Exponential(rate) => (-rate * x).exp(),
            Family::Finite(a, b) => (1.0 - f64::from(a) * x).max(0.0).powi(b as i32),
        }
    }

    fn upper(&self) -> f64 {
        match *self {
            Family::Uniform => 1.0,
            Family::Exponential(rate) => 60.0 / rate,
            Family::Finite(a, _) => 1.0 / f64::from(a),
        }
    }

    /// `∫ F̄^k` in closed form.
    fn power_integral(&self, k: u32) -> f64 {
        let k = f64::from(k);
        match *self {
            Family::Uniform => 1.0 / (k + 1.0),
            Family::Exponential(rate) => 1.0 / (k * rate),
            Family::Finite(a, b) => 1.0 / (f64::from(a) * (k * f64::from(b) + 1.0)),
        }
    }

    /// `∫ F̄^k` as an exact fraction.
    fn power_fraction(&self, k: u32) -> Fraction {
        match *self {
            Family::Uniform => Fraction::new(1, u128::from(k) + 1),
            Family::Exponential(rate) => {
                let (p, q) = if rate.fract() == 0.0 {
                    (rate as u128, 1)
                } else {
                    ((2.0 * rate) as u128, 2)
                };
                Fraction::new(q, u128::from(k) * p)
            }
            Family::Finite(a, b) => Fraction::new(1, u128::from(a) * (u128::from(k) * u128::from(b) + 1)),
        }
    }

    fn simpson_power(&self, k: u32) -> f64 {
        let panels = 200_000usize;
        let hi = self.upper();
        let h = hi / panels as f64;
        let f = |x: f64| self.survival(x).powi(k as i32);
        let mut s = f(0.0) + f(hi);
        for j in 1..panels {
            s += if j % 2 == 1 { 4.0 } else { 2.0 } * f(j as f64 * h);
        }
        s * h / 3.0
    }
}

fn families() -> Vec<Family> {
    vec![
        Family::Uniform,
        Family::Exponential(0.5),
        Family::Exponential(1.0),
        Family::Exponential(2.0),
        Family::Finite(1, 1),
        Family::Finite(2, 3),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Fraction {
    num: u128,
    den: u128,
}

impl Fraction {
    fn new(num: u128, den: u128) -> Self {
        fn gcd(a: u128, b: u128) -> u128 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    fn mul(self, o: Self) -> Self {
        Self::new(self.num * o.num, self.den * o.den)
    }

    fn le(self, o: Self) -> bool {
        self.num * o.den <= o.num * self.den
    }
}

fn criterion_1() -> Outcome {
    let mut worst_closed = 0.0f64;
    let mut worst_quad = 0.0f64;
    for fam in families() {
        let d = dist(&fam.spec());
        let simpson: Vec<f64> = (1..=10).map(|k| fam.simpson_power(k)).collect();
        for m in 1..=5u32 {
            let closed_mr = -0.5 * (1..=m).map(|i| fam.power_integral(2 * i)).product::<f64>();
            let closed_srs = -0.5 * fam.power_integral(2).powi(m as i32);
            let quad_mr = -0.5 * (1..=m).map(|i| simpson[2 * i as usize - 1]).product::<f64>();
            let quad_srs = -0.5 * simpson[1].powi(m as i32);
            let mr = crex_minrssu_design(&d, m).map_err(|e| e.to_string())?.value;
            let srs = crex_srs_design(&d, m).map_err(|e| e.to_string())?.value;
            let dc = (mr - closed_mr).abs().max((srs - closed_srs).abs());
            let dq = (mr - quad_mr).abs().max((srs - quad_srs).abs());
            ensure(dc <= 1e-9, || format!("{} m={m}: closed-form gap {dc:e}", fam.spec()))?;
            ensure(dq <= 1e-8, || format!("{} m={m}: quadrature gap {dq:e}", fam.spec()))?;
            worst_closed = worst_closed.max(dc);
            worst_quad = worst_quad.max(dq);
        }
    }
    Ok(format!(
        "max |closed-form gap| {worst_closed:.1e} <= 1e-9, max |quadrature gap| {worst_quad:.1e} <= 1e-8"
    ))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for fam in families() {
        let d = dist(&fam.spec());
        for m in 1..=5u32 {
            let minrssu = (1..=m).fold(Fraction::new(1, 1), |acc, i| acc.mul(fam.power_fraction(2 * i)));
            let srs = (0..m).fold(Fraction::new(1, 1), |acc, _| acc.mul(fam.power_fraction(2)));
            ensure(minrssu.le(srs), || {
                format!("{} m={m}: exact products out of order", fam.spec())
            })?;
            let mr = crex_minrssu_design(&d, m).map_err(|e| e.to_string())?.value;
            let s = crex_srs_design(&d, m).map_err(|e| e.to_string())?.value;
            ensure(mr >= s, || format!("{} m={m}: {mr} < {s}", fam.spec()))?;
            checked += 1;
        }
    }
    let u = dist("unif");
    let (a, b) = (
        crex_minrssu_design(&u, 2).unwrap().value,
        crex_srs_design(&u, 2).unwrap().value,
    );
    ensure(a == -1.0 / 30.0 && b == -1.0 / 18.0, || {
        format!("uniform m=2: {a} vs {b}")
    })?;
    Ok(format!(
        "minrssu design >= srs design in {checked}/{checked} cases, exact rationals; uniform m=2: -1/30 >= -1/18"
    ))
}

fn criterion_3() -> Outcome {
    let u = dist("unif");
    let mut worst = 0.0f64;
    for m in 1..=6u32 {
        let a = crex_minrssu_design(&u, m).map_err(|e| e.to_string())?.value;
        let b = crex_minrssu_design(&u, m + 1).map_err(|e| e.to_string())?.value;
        let gap = (b / a - 1.0 / f64::from(2 * m + 3)).abs();
        ensure(gap <= 1e-12, || format!("m={m}: ratio gap {gap:e}"))?;
        worst = worst.max(gap);
    }
    Ok(format!(
        "uniform ratio xi(m+1)/xi(m) = 1/(2m+3) for m=1..6, max gap {worst:.1e} <= 1e-12"
    ))
}

fn criterion_4() -> Outcome {
    let u = dist("unif");
    let mut worst = [0.0f64; 3];
    for i in 1..=10u32 {
        let closed = f64::from(i - 1) / (2.0 * f64::from(2 * i + 1) * f64::from(i + 2));
        let v = d_min_vs_parent(&u, i).map_err(|e| e.to_string())?.value;
        worst[0] = worst[0].max((v - closed).abs());
    }
    for m in 1..=6u32 {
        let a: f64 = (1..=m).map(|i| 1.0 / f64::from(2 * i + 1)).product();
        let b: f64 = (1..=m).map(|i| 1.0 / f64::from(i + 2)).product();
        let v = d_designs(&u, m).map_err(|e| e.to_string())?.value;
        worst[1] = worst[1].max((v - (-0.5 * (a - b))).abs());
    }
    let disc = Discrimination::default();
    for spec in [
        "unif:a=0,b=1", "exp:rate=1", "exp:rate=2", "finite:a=2,b=3", "powerbeta:alpha=2",
    ] {
        let d = dist(spec);
        for i in 1..=6u32 {
            let by_means = disc.min_vs_parent(&d, i).map_err(|e| e.to_string())?.value;
            let integral = disc.min_vs_parent_integral(&d, i).map_err(|e| e.to_string())?.value;
            worst[2] = worst[2].max((by_means - integral).abs());
        }
    }
    ensure(worst[0] <= 1e-12, || {
        format!("min-vs-parent closed form gap {:e}", worst[0])
    })?;
    ensure(worst[1] <= 1e-10, || format!("design product form gap {:e}", worst[1]))?;
    ensure(worst[2] <= 1e-8, || {
        format!("integral vs mean-difference gap {:e}", worst[2])
    })?;
    Ok(format!(
        "uniform i=1..10 gap {:.1e} <= 1e-12, designs m=1..6 gap {:.1e} <= 1e-10, integral vs means {:.1e} <= 1e-8",
        worst[0], worst[1], worst[2]
    ))
}

fn criterion_5() -> Outcome {
    let rows: Vec<SimulationRow> = [100, 1_000, 10_000]
        .into_iter()
        .map(|n| {
            let cell = Cell {
                distribution: dist("exp:rate=1"),
                m: 1,
                l: n,
                estimator: EstimatorSpec::VN,
            };
            run_cell(&cell, 200, DEFAULT_SEED, BiasConvention::EstimateMinusTruth).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let mean = rows[2].bias + rows[2].true_value;
    ensure((mean + 0.25).abs() <= 0.01, || format!("mean at n=1e4 is {mean}"))?;
    let biases: Vec<f64> = rows.iter().map(|r| r.bias.abs()).collect();
    let rmses: Vec<f64> = rows.iter().map(|r| r.rmse).collect();
    ensure(rmses.windows(2).all(|w| w[1] < w[0]), || {
        format!("rmse not decreasing: {rmses:?}")
    })?;
    ensure(biases.windows(2).all(|w| w[1] < w[0]), || {
        format!("|bias| not decreasing: {biases:?}")
    })?;
    Ok(format!(
        "mean vn at n=1e4 = {mean:.5} (|gap| {:.1e} <= 0.01); rmse {:.2e} > {:.2e} > {:.2e}; |bias| {:.1e} > {:.1e} > {:.1e}",
        (mean + 0.25).abs(),
        rmses[0],
        rmses[1],
        rmses[2],
        biases[0],
        biases[1],
        biases[2]
    ))
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

fn rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(rep);
    r
}

fn criterion_6() -> Outcome {
    use rayon::prelude::*;
    let u = dist("unif");
    let n = 1000usize;
    let root_n = (n as f64).sqrt();
    let srs: Vec<f64> = (0..2000u64)
        .into_par_iter()
        .map(|rep| {
            let os = OrderStatistics::from_unsorted(draw_srs(&u, n, &mut rng(6, rep))).unwrap();
            root_n * (lstat(&os).unwrap() + 1.0 / 6.0)
        })
        .collect();
    let (m, l) = (2usize, n / 2);
    let minrssu: Vec<f64> = (0..2000u64)
        .into_par_iter()
        .map(|rep| {
            let s = draw_minrssu(&u, m, l, &mut rng(7, rep)).unwrap();
            root_n * lstat(&s.pooled_order_statistics()).unwrap()
        })
        .collect();
    let sigma_srs = asymptotic_variance_srs(&u).map_err(|e| e.to_string())?.value;
    let sigma_mr = asymptotic_variance_minrssu(&u, m).map_err(|e| e.to_string())?.value;
    let v_srs = sample_variance(&srs);
    let v_mr = sample_variance(&minrssu);
    let r_srs = v_srs / sigma_srs - 1.0;
    let r_mr = v_mr / sigma_mr - 1.0;
    ensure((sigma_srs - 1.0 / 45.0).abs() < 1e-12, || {
        format!("srs sigma^2 {sigma_srs}")
    })?;
    ensure(r_srs.abs() <= 0.1, || format!("srs variance {v_srs} vs {sigma_srs}"))?;
    ensure(r_mr.abs() <= 0.1, || format!("minrssu variance {v_mr} vs {sigma_mr}"))?;
    Ok(format!(
        "srs: {v_srs:.5} vs 1/45 ({:+.1}%); minrssu m=2: {v_mr:.5} vs {sigma_mr:.5} ({:+.1}%); both within 10%",
        100.0 * r_srs,
        100.0 * r_mr
    ))
}

fn criterion_7() -> Outcome {
    let pairs = [
        (Family::Exponential(2.0), Family::Exponential(1.0)),
        (Family::Uniform, Family::Uniform),
    ];
    for (k, (smaller, larger)) in pairs.iter().enumerate() {
        let larger_spec = if k == 1 {
            "unif:a=0,b=2".to_string()
        } else {
            larger.spec()
        };
        let larger_scale = if k == 1 { 2u128 } else { 1 };
        for m in 2..=5u32 {
            let x = (1..=m).fold(Fraction::new(1, 1), |acc, i| acc.mul(smaller.power_fraction(2 * i)));
            let y = (1..=m).fold(Fraction::new(1, 1), |acc, i| {
                acc.mul(larger.power_fraction(2 * i))
                    .mul(Fraction::new(larger_scale, 1))
            });
            ensure(x.le(y), || {
                format!("{} vs {larger_spec} m={m}: exact order fails", smaller.spec())
            })?;
            let xv = crex_minrssu_design(&dist(&smaller.spec()), m)
                .map_err(|e| e.to_string())?
                .value;
            let yv = crex_minrssu_design(&dist(&larger_spec), m)
                .map_err(|e| e.to_string())?
                .value;
            ensure(xv >= yv, || {
                format!("{} vs {larger_spec} m={m}: {xv} < {yv}", smaller.spec())
            })?;
        }
    }
    Ok("exp(2) >= exp(1) and unif(0,1) >= unif(0,2) in minrssu design crex for m=2..5, exact".into())
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    let mut literal_fails = 0;
    for a in [0.5, 2.0, 3.0] {
        let pairs = [
            (
                dist("exp:rate=1"),
                ParametricDistribution::exponential(1.0 / a).unwrap(),
            ),
            (dist("unif:a=0,b=1"), ParametricDistribution::uniform(0.0, a).unwrap()),
            (
                dist("finite:a=2,b=3"),
                ParametricDistribution::finite_range(2.0 / a, 3.0).unwrap(),
            ),
        ];
        for (x, y) in pairs {
            let single = crex(&y).unwrap().value - a * crex(&x).unwrap().value;
            worst = worst.max(single.abs());
            for m in 1..=5u32 {
                let dx = crex_minrssu_design(&x, m).unwrap().value;
                let dy = crex_minrssu_design(&y, m).unwrap().value;
                worst = worst.max((dy - a.powi(m as i32) * dx).abs());
                let sx = crex_srs_design(&x, m).unwrap().value;
                let sy = crex_srs_design(&y, m).unwrap().value;
                worst = worst.max((sy - a.powi(m as i32) * sx).abs());
                if m > 1 && (dy - a * dx).abs() > 1e-10 {
                    literal_fails += 1;
                }
            }
        }
    }
    ensure(worst <= 1e-10, || format!("scale covariance gap {worst:e}"))?;
    let u = dist("unif");
    let sym = (crex(&u).unwrap().value - cumulative_extropy(&u).unwrap()).abs();
    ensure(sym <= 1e-8, || format!("symmetry gap {sym:e}"))?;
    Ok(format!(
        "crex(aX) = a crex(X), designs scale by a^m, max gap {worst:.1e} <= 1e-10 \
         (plain factor a fails for {literal_fails}/36 design cases with m>1); unif crex - cumulative extropy {sym:.1e} <= 1e-8"
    ))
}

fn twelve_cell_grid() -> SimulationConfig {
    SimulationConfig {
        distributions: vec![dist("exp:rate=1"), dist("unif:a=0,b=1"), dist("powerbeta:alpha=2")],
        m: vec![2, 3],
        l: vec![2],
        estimators: vec![
            EstimatorGrid::new("rmn", WGrid::List(vec![0])),
            EstimatorGrid::new("lstat", WGrid::None),
        ],
        replications: 500,
        seed: DEFAULT_SEED,
        convention: BiasConvention::EstimateMinusTruth,
    }
}

fn grid_csv(cfg: &SimulationConfig) -> Result<Vec<u8>, String> {
    let outcome = run_grid(cfg).map_err(|e| e.to_string())?;
    ensure(outcome.failures.is_empty(), || {
        format!("{} cells failed", outcome.failures.len())
    })?;
    let mut buf = Vec::new();
    write_rows(&mut buf, &outcome.rows, NumberFormat::Raw, &[]).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn criterion_9() -> Outcome {
    let cfg = twelve_cell_grid();
    let reference = grid_csv(&cfg)?;
    let rows = reference.iter().filter(|&&b| b == b'\n').count() - 1;
    ensure(rows == 12, || format!("{rows} rows"))?;
    ensure(grid_csv(&cfg)? == reference, || "rerun differs".into())?;
    for threads in [1, 2, 4, 7] {
        ensure(with_threads(Some(threads), || grid_csv(&cfg))? == reference, || {
            format!("{threads} threads differ")
        })?;
    }
    Ok(format!(
        "12-cell grid at 500 reps: {} identical CSV bytes across rerun and 1/2/4/7 threads",
        reference.len()
    ))
}

fn criterion_10() -> Outcome {
    let mut tuned = (0, 0);
    let mut rmse_drop = (0, 0);
    let mut failed_cells = 0;
    let mut worst_margin = f64::INFINITY;
    for name in ["exp", "unif", "beta"] {
        let cfg = preset(name).unwrap();
        ensure(cfg.replications == 5000, || {
            format!("{name}: {} reps", cfg.replications)
        })?;
        let outcome = run_grid(&cfg).map_err(|e| e.to_string())?;
        failed_cells += outcome.failures.len();

        let mut best_rmn: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut rn: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut by_l: BTreeMap<(String, usize, Option<i64>), BTreeMap<usize, f64>> = BTreeMap::new();
        for r in &outcome.rows {
            match r.estimator.as_str() {
                "rmn" => {
                    let e = best_rmn.entry((r.m, r.l)).or_insert(f64::INFINITY);
                    *e = e.min(r.bias.abs());
                }
                "rn" => {
                    rn.insert((r.m, r.l), r.bias.abs());
                }
                _ => {}
            }
            by_l.entry((r.estimator.clone(), r.m, r.w))
                .or_default()
                .insert(r.l, r.rmse);
        }
        for (key, best) in &best_rmn {
            let plain = rn[key];
            tuned.1 += 1;
            if *best <= plain {
                tuned.0 += 1;
            }
            worst_margin = worst_margin.min(plain - best);
        }
        for rmse in by_l.values() {
            if let (Some(a), Some(b)) = (rmse.get(&2), rmse.get(&3)) {
                rmse_drop.1 += 1;
                if b < a {
                    rmse_drop.0 += 1;
                }
            }
        }
    }
    ensure(tuned.0 == tuned.1, || {
        format!("tuned rmn beats rn in only {}/{} cells", tuned.0, tuned.1)
    })?;
    let share = rmse_drop.0 as f64 / rmse_drop.1 as f64;
    ensure(share >= 0.8, || {
        format!("rmse falls from l=2 to l=3 in only {}/{}", rmse_drop.0, rmse_drop.1)
    })?;

    let cell = Cell {
        distribution: dist("exp:rate=1"),
        m: 2,
        l: 2,
        estimator: EstimatorSpec::rmn(-2),
    };
    let grid: Vec<f64> = (10..=200).map(|k| f64::from(k) / 100.0).collect();
    let cal =
        calibrate_parameter(&cell, "rate", &grid, (0.321, 0.407), 1000, DEFAULT_SEED).map_err(|e| e.to_string())?;
    println!(
        "      calibration exp m=2 l=2 rmn w=-2 -> target (0.321, 0.407): best rate {} under {}, bias {:.4}, rmse {:.4}, residual {:.2e}",
        cal.best.parameter,
        cal.best.convention.as_str(),
        cal.best.bias,
        cal.best.rmse,
        cal.best.residual
    );
    Ok(format!(
        "tuned |bias(rmn)| <= |bias(rn)| in {}/{} cells (min margin {worst_margin:.2e}); rmse falls l=2->3 in {}/{} \
         ({:.0}% >= 80%); {failed_cells} cells rejected for n+psi <= 0; best-fit rate {} (residual {:.2e})",
        tuned.0,
        tuned.1,
        rmse_drop.0,
        rmse_drop.1,
        100.0 * share,
        cal.best.parameter,
        cal.best.residual
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "closed-form and quadrature agreement",
            criterion_1,
            Duration::from_secs(10),
        ),
        ("design direction audit", criterion_2, Duration::from_secs(10)),
        ("uniform design ratio", criterion_3, Duration::from_secs(10)),
        ("discrimination exactness", criterion_4, Duration::from_secs(10)),
        ("estimator consistency", criterion_5, Duration::from_secs(60)),
        ("asymptotic normality variance", criterion_6, Duration::from_secs(300)),
        ("stochastic order fixtures", criterion_7, Duration::from_secs(10)),
        ("affine and symmetry rules", criterion_8, Duration::from_secs(10)),
        (
            "determinism and parallel equivalence",
            criterion_9,
            Duration::from_secs(30),
        ),
        ("qualitative table patterns", criterion_10, Duration::from_secs(900)),
    ];
    let mut failures = 0;
    for (k, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= limit {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.1?} > {limit:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!(
                "PASS  {:>2}. {name}: {detail} [{:.2}s < {}s]",
                k + 1,
                elapsed.as_secs_f64(),
                limit.as_secs()
            ),
            Err(why) => {
                failures += 1;
                println!("FAIL  {:>2}. {name}: {why} [{:.2}s]", k + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
