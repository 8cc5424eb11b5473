//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use cat_tomo::circuit::{conditional_project, entangle_kerr, ghz_correlations, polarization_fidelity, PolarizationOutcome};
use cat_tomo::experiment::{find_minimum, monte_carlo_study, MinimumReport, NoiseSpec, SearchMode, SearchRegion, TomographySetup};
use cat_tomo::grid::{self, AxisSpec};
use cat_tomo::quadrature::{build_table, default_phases, quadrature_distribution};
use cat_tomo::tomography::{default_cutoff, fbp_kernel, fbp_kernel_by_quadrature};
use cat_tomo::wigner::{wigner_displaced_parity, Convention, Superposition, WignerFunction};
use cat_tomo::{make_cat, make_ghz, BellState, CatNormalization, CatSpec, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_607;

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn sqrt5_cat(theta: f64) -> CatSpec {
    CatSpec::even(5f64.sqrt(), theta).unwrap()
}

fn around(u: f64, half: f64) -> SearchRegion {
    SearchRegion { re: (u - half, u + half), im: (-0.3, 0.3), step: 0.01 }
}

fn criterion_1() -> Result<Outcome> {
    let mut out = Outcome::new();
    let nominal = |theta: f64| sqrt5_cat(theta).with_normalization(CatNormalization::Nominal).superposition();
    #[allow(clippy::type_complexity)]
    let cases: [(&str, Superposition, SearchRegion, SearchMode, (f64, f64)); 4] = [
        ("θ=π/2", nominal(PI / 2.0), around(0.5, 0.45), SearchMode::Global, (0.3346, -3.16)),
        ("θ=63° (1.11 rad)", nominal(1.11), around(0.9, 0.3), SearchMode::Global, (0.8954, -3.916)),
        (
            "θ=63° local",
            nominal(1.11),
            around(0.157, 0.1),
            SearchMode::LocalNear { point: (0.157, 0.0), radius: 0.1 },
            (0.157, -0.890),
        ),
        ("θ=0.2", nominal(0.2), around(2.7, 0.3), SearchMode::Global, (2.687, -0.679)),
    ];
    let mut factors = Vec::new();
    for (name, sup, region, mode, (u, w)) in &cases {
        let phys = find_minimum(sup, region, *mode, Convention::Phys)?;
        let factor = w / phys.value;
        factors.push(factor);
        let paper = phys.value * Convention::Paper.scale();
        let loc_err = ((phys.location.0 - u).powi(2) + phys.location.1.powi(2)).sqrt();
        out.check(
            loc_err <= 5e-4 && rel(paper, *w) <= 0.01,
            format!(
                "{name}: W[{:.4}, {:.4}] = {paper:.4} vs W[{u}, 0] = {w} (Δloc {loc_err:.1e}, Δval {:.2}%)",
                phys.location.0,
                phys.location.1,
                100.0 * rel(paper, *w)
            ),
        );
    }
    let spread = factors.iter().map(|f| rel(*f, 2.0 * PI)).fold(0.0, f64::max);
    out.check(
        spread <= 0.02,
        format!("paper/phys factors {factors:.4?} within {:.2}% of 2π (limit 2%)", 100.0 * spread),
    );
    Ok(out)
}

fn oracle_minimum(cat: &CatSpec, region: &SearchRegion) -> Result<MinimumReport> {
    find_minimum(&cat.superposition(), region, SearchMode::Global, Convention::Phys)
}

/// Clean 11-phase tomography of `cat`, minimum searched near the oracle's.
fn tomography_check(out: &mut Outcome, name: &str, cat: &CatSpec, oracle: &MinimumReport, tol: f64) -> Result<()> {
    let setup = TomographySetup::for_cat(cat);
    let filtered = setup.reconstructor()?.filter(&setup.clean_table(cat)?)?;
    let region = SearchRegion { step: 0.01, ..around(oracle.location.0, 0.15) };
    let mode = SearchMode::LocalNear { point: oracle.location, radius: 0.15 };
    let rec = find_minimum(&filtered, &region, mode, Convention::Paper)?;
    let expected = oracle.value * Convention::Paper.scale();
    out.check(
        rel(rec.value, expected) <= tol,
        format!(
            "{name}: reconstructed W[{:.4}, {:.4}] = {:.4} vs oracle {expected:.4} ({:.2}%, limit {:.0}%)",
            rec.location.0,
            rec.location.1,
            rec.value,
            100.0 * rel(rec.value, expected),
            100.0 * tol
        ),
    );
    Ok(())
}

fn criterion_2() -> Result<Outcome> {
    let mut out = Outcome::new();
    for (name, theta, region) in [("θ=π/2", PI / 2.0, around(0.5, 0.45)), ("θ=1.11", 1.11, around(0.9, 0.3))] {
        let cat = sqrt5_cat(theta);
        let oracle = oracle_minimum(&cat, &region)?;
        tomography_check(&mut out, name, &cat, &oracle, 0.03)?;
    }
    Ok(out)
}

fn criterion_3() -> Result<Outcome> {
    let mut out = Outcome::new();
    let runs = 50;
    let mut sd25 = 0.0;
    for (name, theta, region, paper_mean, paper_sd) in [
        ("θ=π/2", PI / 2.0, around(0.5, 0.45), -3.08, 0.29),
        ("θ=1.11", 1.11, around(0.9, 0.3), -3.83, 0.48),
    ] {
        let cat = sqrt5_cat(theta);
        let probe = oracle_minimum(&cat, &region)?.location;
        let noise = NoiseSpec::new(0.25, runs, SEED)?;
        let rep = monte_carlo_study(&cat, &noise, &TomographySetup::for_cat(&cat), probe, Convention::Paper)?;
        let m = rep.minimum;
        let combined = (m.stddev.powi(2) + paper_sd * paper_sd).sqrt();
        out.check(
            (m.mean - paper_mean).abs() <= 2.0 * combined,
            format!(
                "{name} 25%: {:.3} ± {:.3} over {runs} runs vs {paper_mean} ± {paper_sd} (|Δ| {:.3}, 2σ {:.3})",
                m.mean,
                m.stddev,
                (m.mean - paper_mean).abs(),
                2.0 * combined
            ),
        );
        if theta == PI / 2.0 {
            sd25 = m.stddev;
        }
    }
    let cat = sqrt5_cat(PI / 2.0);
    let probe = oracle_minimum(&cat, &around(0.5, 0.45))?.location;
    let noise = NoiseSpec::new(0.5, runs, SEED)?;
    let m = monte_carlo_study(&cat, &noise, &TomographySetup::for_cat(&cat), probe, Convention::Paper)?.minimum;
    let ratio = m.stddev / sd25;
    out.check(
        (1.4..=2.8).contains(&ratio),
        format!("θ=π/2 50%: {:.3} ± {:.3}; stddev ratio 50%/25% = {ratio:.3} (limits 1.4..2.8)", m.mean, m.stddev),
    );
    Ok(out)
}

fn criterion_4() -> Result<Outcome> {
    let mut out = Outcome::new();
    let cat = sqrt5_cat(PI / 2.0);
    let probe = oracle_minimum(&cat, &around(0.5, 0.45))?.location;
    let noise = NoiseSpec::new(0.5, 200, SEED ^ 0x5eed)?;
    let rep = monte_carlo_study(&cat, &noise, &TomographySetup::for_cat(&cat), probe, Convention::Paper)?;
    let negative = rep.samples.iter().filter(|w| **w < 0.0).count();
    let fraction = negative as f64 / rep.samples.len() as f64;
    out.check(
        fraction >= 0.95,
        format!("θ=π/2 50%: {negative}/200 runs negative ({:.1}%, limit 95%); max {:.3}", 100.0 * fraction,
            rep.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    );
    Ok(out)
}

/// Independent minimum: fine brute-force scan followed by alternating
/// golden-section line searches.
fn brute_force_minimum(f: &dyn WignerFunction, region: &SearchRegion) -> Result<(f64, f64, f64)> {
    let us = grid::linspace(region.re.0, region.re.1, ((region.re.1 - region.re.0) / 0.002).round() as usize + 1);
    let vs = grid::linspace(region.im.0, region.im.1, ((region.im.1 - region.im.0) / 0.002).round() as usize + 1);
    let mut best = (0.0, 0.0, f64::INFINITY);
    for u in &us {
        for v in &vs {
            let w = f.wigner(C64::new(*u, *v))?;
            if w < best.2 {
                best = (*u, *v, w);
            }
        }
    }
    let golden = |g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64| {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if g(c) < g(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    };
    let (mut u, mut v) = (best.0, best.1);
    for _ in 0..4 {
        u = golden(&|s| f.wigner(C64::new(s, v)).unwrap(), u - 0.004, u + 0.004);
        v = golden(&|s| f.wigner(C64::new(u, s)).unwrap(), v - 0.004, v + 0.004);
    }
    Ok((u, v, f.wigner(C64::new(u, v))?))
}

fn criterion_5() -> Result<Outcome> {
    let mut out = Outcome::new();
    let r = 10f64.sqrt();
    for (name, theta) in [("n̄=10 θ=π/2", PI / 2.0), ("n̄=10 θ=1.11", 1.11)] {
        let cat = CatSpec::even(r, theta)?;
        let centre = r * theta.cos();
        let region = SearchRegion { re: (centre + 0.01, centre + 0.7), im: (-0.3, 0.3), step: 0.01 };
        let found = oracle_minimum(&cat, &region)?;
        let (u, v, w) = brute_force_minimum(&cat.superposition(), &region)?;
        let loc_err = ((found.location.0 - u).powi(2) + (found.location.1 - v).powi(2)).sqrt();
        out.check(
            loc_err <= 5e-4 && rel(found.value, w) <= 0.01,
            format!(
                "{name}: W[{:.4}, {:.4}] = {:.4} vs independent W[{u:.4}, {v:.4}] = {:.4} (paper conv.)",
                found.location.0,
                found.location.1,
                found.value * Convention::Paper.scale(),
                w * Convention::Paper.scale()
            ),
        );
        tomography_check(&mut out, name, &cat, &found, 0.03)?;
    }
    Ok(out)
}

fn criterion_6() -> Result<Outcome> {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = rng.random_range(0.5..10f64.sqrt());
        let theta = rng.random_range(0.05..PI / 2.0);
        let cat = CatSpec::even(r, theta)?;
        let alpha = C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let closed = cat.superposition().wigner(alpha)?;
        let parity = wigner_displaced_parity(&make_cat(&cat, 60)?, alpha)?;
        worst = worst.max((closed - parity).abs());
    }
    out.check(worst <= 1e-6, format!("closed form vs displaced parity on 100 random points: max |Δ| = {worst:.2e} (limit 1e-6)"));

    let kc = default_cutoff(5.0);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let xi = rng.random_range(-6.0..6.0);
        worst = worst.max((fbp_kernel(xi, kc) - fbp_kernel_by_quadrature(xi, kc, 200_000)).abs());
    }
    out.check(worst <= 1e-8, format!("filter kernel vs numeric integral at 20 points: max |Δ| = {worst:.2e} (limit 1e-8)"));
    Ok(out)
}

fn criterion_7() -> Result<Outcome> {
    let mut out = Outcome::new();
    let x = AxisSpec::symmetric(6.0, 0.01)?.points()?;
    let mut worst_row: f64 = 0.0;
    let mut worst_w: f64 = 0.0;
    let axis = AxisSpec::symmetric(6.0, 0.02)?.points()?;
    for theta in [PI / 2.0, 1.11, 0.2] {
        let cat = sqrt5_cat(theta);
        let table = build_table(&make_cat(&cat, 50)?, &default_phases(11), &x)?;
        for i in table.row_integrals() {
            worst_row = worst_row.max((i - 1.0).abs());
        }
        let g = cat_tomo::wigner::evaluate_grid(&cat.superposition(), &axis, &axis, Convention::Phys)?;
        worst_w = worst_w.max((g.integral() - 1.0).abs());
    }
    out.check(worst_row <= 1e-6, format!("per-phase ∫p dx = 1: max |Δ| = {worst_row:.2e} (limit 1e-6)"));
    out.check(worst_w <= 1e-4, format!("∫∫W = 1: max |Δ| = {worst_w:.2e} (limit 1e-4)"));

    let cat = sqrt5_cat(PI / 2.0);
    let state = make_cat(&cat, 50)?;
    let sup = cat.superposition();
    let t = grid::linspace(-8.0, 8.0, 1601);
    let xs = grid::linspace(-3.0, 3.0, 13);
    let mut worst: f64 = 0.0;
    for phi in [0.0, 0.4, 0.9, 1.3, 2.2] {
        let p = quadrature_distribution(&state, phi, &xs)?;
        for (k, x) in xs.iter().enumerate() {
            let line = t
                .iter()
                .map(|t| sup.wigner(C64::new(x * phi.cos() - t * phi.sin(), x * phi.sin() + t * phi.cos())))
                .collect::<Result<Vec<f64>>>()?;
            worst = worst.max((grid::trapezoid(&t, &line) - p[k]).abs());
        }
    }
    out.check(worst <= 1e-4, format!("Wigner marginals vs p(x, φ): max |Δ| = {worst:.2e} (limit 1e-4)"));

    let mut worst: f64 = 0.0;
    for i in 0..24 {
        let beta = C64::from_polar(0.3 + 0.12 * i as f64, 0.7 * i as f64);
        let delta = 0.27 * i as f64;
        let hybrid = entangle_kerr(beta, delta, 60)?;
        let p = |o| conditional_project(&hybrid, o).map(|r| r.1).unwrap_or(0.0);
        worst = worst.max((p(PolarizationOutcome::Plus45) + p(PolarizationOutcome::Minus45) - 1.0).abs());
    }
    out.check(worst <= 1e-10, format!("conditional outcome probabilities sum to 1: max |Δ| = {worst:.2e} (limit 1e-10)"));
    Ok(out)
}

fn criterion_8() -> Result<Outcome> {
    let mut out = Outcome::new();
    for bell in BellState::ALL {
        let ghz = make_ghz(bell);
        let fid = polarization_fidelity(&ghz, &bell.ghz_target())?;
        let rows = ghz_correlations(&ghz)?;
        let worst = rows.iter().map(|r| 1.0 - r.predictability()).fold(0.0, f64::max);
        out.check(
            fid >= 1.0 - 1e-12 && worst <= 1e-12,
            format!("{}: fidelity {fid:.15}, worst conditional probability deficit {worst:.1e}", bell.name()),
        );
    }
    Ok(out)
}

fn main() -> ExitCode {
    #[allow(clippy::type_complexity)]
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("cat minima (oracle)", criterion_1),
        ("tomographic accuracy (clean)", criterion_2),
        ("noise studies", criterion_3),
        ("negativity survives noise", criterion_4),
        ("n̄ = 10 case", criterion_5),
        ("oracle equivalence", criterion_6),
        ("physics invariants", criterion_7),
        ("GHZ algebra", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome { pass: false, lines: vec![format!("FAIL error: {e}")] });
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict}  {name}  [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
        for line in &outcome.lines {
            println!("    {line}");
        }
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
