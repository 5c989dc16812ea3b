//! Randomized self-test battery behind `apcsf check`.
//!
//! Every suite draws its states from a seeded generator, so a run is
//! reproducible from the printed seed.

use std::f64::consts::{FRAC_PI_2, PI};

use apcsf::analysis::{area_loss_study, StepPlan, TauRule, PERIMETER_SLACK_REL};
use apcsf::init::{interpolate, uniform_grid, InitialCurve};
use apcsf::sampling::{random_block_system, random_convex_polygon, random_star_polygon};
use apcsf::semidiscrete;
use apcsf::{fulldiscrete, weakform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub const SUITE_NAMES: [&str; 8] = [
    "trig-lemma",
    "lumped-weak-equivalence",
    "perimeter-monotone",
    "convexity",
    "solver-oracle",
    "rate-formulas",
    "regular-polygon",
    "area-scaling",
];

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = match name {
        "trig-lemma" => trig_lemma(&mut rng),
        "lumped-weak-equivalence" => lumped_weak_equivalence(&mut rng),
        "perimeter-monotone" => perimeter_monotone(&mut rng),
        "convexity" => convexity(&mut rng),
        "solver-oracle" => solver_oracle(&mut rng),
        "rate-formulas" => rate_formulas(&mut rng),
        "regular-polygon" => regular_polygon_rate(),
        "area-scaling" => area_scaling(),
        _ => return None,
    };
    Some(result)
}

fn verdict(name: &'static str, pass: bool, detail: String) -> SuiteResult {
    SuiteResult { name, pass, detail }
}

fn trig_lemma(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut min_value = f64::INFINITY;
    let mut boundary_ok = true;
    for n in 1..=20usize {
        for _ in 0..100_000 {
            let betas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=FRAC_PI_2)).collect();
            min_value = min_value.min(semidiscrete::trig_inequality(&betas).unwrap());
        }
        let mut betas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=FRAC_PI_2)).collect();
        let shorter = semidiscrete::trig_inequality(&betas).unwrap();
        betas.push(0.0);
        boundary_ok &= semidiscrete::trig_inequality(&betas).unwrap() == shorter;
    }
    verdict(
        "trig-lemma",
        min_value >= -1e-12 && boundary_ok,
        format!("min value {min_value:.2e}, boundary identity exact: {boundary_ok}"),
    )
}

fn lumped_weak_equivalence(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let n = rng.gen_range(4..=64);
        let poly = if trial % 3 == 0 {
            random_convex_polygon(rng, n)
        } else {
            random_star_polygon(rng, n)
        };
        let grid = uniform_grid(n).unwrap();
        let field = semidiscrete::rhs(&poly).unwrap();
        let res = weakform::assemble_residual(&poly, &field.velocity, &grid).unwrap();
        worst = worst.max(res.relative());
    }
    verdict(
        "lumped-weak-equivalence",
        worst <= 1e-12,
        format!("worst relative residual {worst:.2e}"),
    )
}

fn perimeter_monotone(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut worst_rate = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let n = rng.gen_range(4..48);
        let poly = random_convex_polygon(rng, n);
        worst_rate = worst_rate.max(semidiscrete::perimeter_rate(&poly).unwrap());
    }

    let grid = uniform_grid(64).unwrap();
    let poly = interpolate(&InitialCurve::ellipse(2.0, 1.0).unwrap(), &grid).unwrap();
    let semi =
        semidiscrete::evolve(&poly, 0.25, semidiscrete::default_time_step(&poly), 1).unwrap();
    let plan = StepPlan::resolve(TauRule::Auto, 64, 0.25).unwrap();
    let full = fulldiscrete::evolve_full(&poly, plan.t_end, plan.coarse_tau, 1).unwrap();
    let mut monotone = true;
    for traj in [&semi, &full] {
        let l0 = traj.diagnostics[0].perimeter;
        for w in traj.diagnostics.windows(2) {
            monotone &= w[1].perimeter <= w[0].perimeter + PERIMETER_SLACK_REL * l0;
        }
    }
    verdict(
        "perimeter-monotone",
        worst_rate <= 1e-12 && monotone,
        format!("worst convex perimeter rate {worst_rate:.2e}, ellipse runs monotone: {monotone}"),
    )
}

fn convexity(rng: &mut ChaCha8Rng) -> SuiteResult {
    // fan-area sign test against the all-extended-fans characterization
    let mut agree = true;
    for trial in 0..1000 {
        let n = rng.gen_range(4..16);
        let poly = if trial % 2 == 0 {
            random_convex_polygon(rng, n)
        } else {
            random_star_polygon(rng, n)
        };
        let convex = poly.convexity().is_convex();
        let mut extended = true;
        'outer: for j in 0..n {
            for k in 0..n {
                if k == j || k == (j + n - 1) % n {
                    continue;
                }
                if poly.extended_fan_area(j, k).unwrap() <= 0.0 {
                    extended = false;
                    break 'outer;
                }
            }
        }
        agree &= convex == extended;
    }

    // coarse long run keeps every fan triangle positive
    let grid = uniform_grid(15).unwrap();
    let poly = interpolate(&InitialCurve::ellipse(2.0, 1.0).unwrap(), &grid).unwrap();
    let plan = StepPlan::resolve(TauRule::Auto, 15, 3.0).unwrap();
    let traj = fulldiscrete::evolve_full(&poly, plan.t_end, plan.coarse_tau, 1).unwrap();
    let min_fan = traj.diagnostics.iter().map(|d| d.min_fan_area).fold(f64::INFINITY, f64::min);
    verdict(
        "convexity",
        agree && min_fan > 0.0,
        format!("characterizations agree: {agree}, min fan area over run {min_fan:.3e}"),
    )
}

fn solver_oracle(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut worst_diff = 0.0f64;
    let mut worst_residual = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(4..=64);
        let sys = random_block_system(rng, n);
        let banded = sys.solve_banded().unwrap();
        let dense = sys.solve_dense().unwrap();
        let scale = dense.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for (a, b) in banded.iter().zip(&dense) {
            worst_diff = worst_diff.max((*a - *b).norm() / scale);
        }
        let bscale = sys.rhs.iter().map(|v| v.norm()).fold(f64::MIN_POSITIVE, f64::max);
        for (r, b) in sys.apply(&banded).iter().zip(&sys.rhs) {
            worst_residual = worst_residual.max((*r - *b).norm() / bscale);
        }
    }
    verdict(
        "solver-oracle",
        worst_diff <= 1e-10 && worst_residual <= 1e-12,
        format!("worst dense deviation {worst_diff:.2e}, worst residual {worst_residual:.2e}"),
    )
}

fn rate_formulas(rng: &mut ChaCha8Rng) -> SuiteResult {
    let delta = 1e-5;
    let mut worst_forms = 0.0f64;
    let mut worst_fd = 0.0f64;
    let mut worst_chain = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(4..24);
        let poly = random_convex_polygon(rng, n);
        let rates = semidiscrete::edge_rate(&poly).unwrap();
        let fans = semidiscrete::fan_area_rate(&poly).unwrap();
        let field = semidiscrete::rhs(&poly).unwrap();
        let edge_scale =
            rates.from_tangents.iter().map(|r| r.abs()).fold(f64::MIN_POSITIVE, f64::max);
        let fan_scale = fans.iter().map(|r| r.abs()).fold(f64::MIN_POSITIVE, f64::max);

        let fwd = semidiscrete::step_rk4(&poly, delta).unwrap();
        let bwd = semidiscrete::step_rk4(&poly, -delta).unwrap();
        let qf = fwd.geometric_state().unwrap().edge_lengths;
        let qb = bwd.geometric_state().unwrap().edge_lengths;
        let sf = fwd.fan_areas();
        let sb = bwd.fan_areas();
        let v = poly.vertices();
        for j in 0..n {
            worst_forms = worst_forms
                .max((rates.from_tangents[j] - rates.from_velocity[j]).abs() / edge_scale);
            let fd_q = (qf[j] - qb[j]) / (2.0 * delta);
            worst_fd = worst_fd.max((fd_q - rates.from_tangents[j]).abs() / edge_scale);
            let fd_s = (sf[j] - sb[j]) / (2.0 * delta);
            worst_fd = worst_fd.max((fd_s - fans[j]).abs() / fan_scale);
            let jp = (j + 1) % n;
            let jm = (j + n - 1) % n;
            let chain = 0.5 * (field.velocity[jp] - field.velocity[j]).dot((v[j] - v[jm]).perp())
                + 0.5 * (v[jp] - v[j]).dot((field.velocity[j] - field.velocity[jm]).perp());
            worst_chain = worst_chain.max((chain - fans[j]).abs() / fan_scale);
        }
    }
    verdict(
        "rate-formulas",
        worst_forms <= 1e-12 && worst_fd <= 1e-5 && worst_chain <= 1e-12,
        format!(
            "form agreement {worst_forms:.2e}, FD deviation {worst_fd:.2e}, \
             product-rule deviation {worst_chain:.2e}"
        ),
    )
}

fn regular_polygon_rate() -> SuiteResult {
    let square = apcsf::geometry::regular_polygon(4, 1.0).unwrap();
    let field = semidiscrete::rhs(&square).unwrap();
    let want = 1.0 - PI / 4.0;
    let mut worst = 0.0f64;
    for (j, vel) in field.velocity.iter().enumerate() {
        let radial = square.vertices()[j] * (1.0 / square.vertices()[j].norm());
        worst = worst.max((-vel.dot(radial) - want).abs());
        worst = worst.max(vel.dot(radial.perp()).abs());
    }
    let rate = |n: usize| {
        let poly = apcsf::geometry::regular_polygon(n, 1.0).unwrap();
        let f = semidiscrete::rhs(&poly).unwrap();
        f.velocity.iter().map(|v| v.norm()).fold(0.0, f64::max)
    };
    let rates: Vec<f64> = [8usize, 16, 32, 64].iter().map(|&n| rate(n)).collect();
    let ratios_ok = rates.windows(2).all(|w| (w[0] / w[1] - 4.0).abs() <= 0.6);
    verdict(
        "regular-polygon",
        worst <= 1e-12 && ratios_ok,
        format!("square deviation {worst:.2e}, quadratic decay: {ratios_ok}"),
    )
}

fn area_scaling() -> SuiteResult {
    let curve = InitialCurve::ellipse(2.0, 1.0).unwrap();
    let study = area_loss_study(&curve, &[16, 32, 64, 128], 0.25, TauRule::Auto).unwrap();
    let slope = study.slope().unwrap_or(f64::NAN);
    let ratios = study.ratios();
    let pass = (1.7..=2.3).contains(&slope) && ratios.iter().all(|r| (2.2..=7.2).contains(r));
    verdict("area-scaling", pass, format!("slope {slope:.2}, drift ratios {ratios:.2?}"))
}
