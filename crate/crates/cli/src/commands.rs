use std::f64::consts::{FRAC_1_PI, PI};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use cat_tomo::circuit::{ghz_correlations, polarization_fidelity, PolBasis};
use cat_tomo::experiment::{find_minimum, monte_carlo_study, MinimumReport, SearchMode, SearchRegion};
use cat_tomo::fock;
use cat_tomo::quadrature::{build_table, default_phases, QuadratureTable};
use cat_tomo::tomography::{default_cutoff, fbp_kernel, fbp_kernel_by_quadrature, Reconstructor};
use cat_tomo::wigner::{evaluate_grid, wigner_displaced_parity, Convention, WignerFunction};
use cat_tomo::{make_cat, make_ghz, BellState, CatNormalization, CatSpec, C64};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{self, LocalComparison, NoiseStudyReport, ReconstructReport, TableSource};

pub struct Context {
    pub config: Option<ExperimentConfig>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub convention: Option<Convention>,
}

impl Context {
    fn config(&self, command: &str) -> Result<&ExperimentConfig, CliError> {
        self.config
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("`{command}` needs --config <path>")))
    }

    fn convention(&self) -> Convention {
        self.convention
            .or_else(|| self.config.as_ref().and_then(|c| c.convention))
            .unwrap_or(Convention::Paper)
    }

    fn output(&self, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        std::fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        let path = self.out.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        Ok((path, BufWriter::new(file)))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let (path, mut w) = self.output(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Failed(e.to_string()))?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

fn describe(m: &MinimumReport) -> String {
    let tidy = |v: f64| if v.abs() < 5e-5 { 0.0 } else { v };
    format!("W[{:.4}, {:.4}] = {:.4}", tidy(m.location.0), tidy(m.location.1), m.value)
}

pub fn cat_state(ctx: &Context) -> Result<(), CliError> {
    let config = ctx.config("cat-state")?;
    let spec = config.cat_spec()?;
    let n_max = config.setup().n_max;
    let state = make_cat(&spec, n_max)?;
    println!(
        "# cat r={:.6} theta={:.6} sign={:?} normalization={:?} n_max={n_max}",
        spec.r, spec.theta, spec.sign, spec.normalization
    );
    println!("n,re,im,probability");
    for (n, c) in state.amplitudes().iter().enumerate() {
        println!("{n},{:e},{:e},{:e}", c.re, c.im, c.norm_sqr());
    }
    println!(
        "# norm^2 = {:.12}  mean photon number = {:.12}",
        state.norm_sqr(),
        fock::mean_photon_number(&state)
    );
    Ok(())
}

pub fn ghz(ctx: &Context, bell: Option<BellState>) -> Result<(), CliError> {
    let bell = bell
        .or_else(|| ctx.config.as_ref().and_then(|c| c.ghz.map(|g| g.bell)))
        .unwrap_or(BellState::PhiPlus);
    let state = make_ghz(bell);
    let fidelity = polarization_fidelity(&state, &bell.ghz_target())?;
    println!("input: {}", bell.name());
    println!(
        "state: {}",
        state.ket_string(&[PolBasis::Rectilinear, PolBasis::Rectilinear, PolBasis::Diagonal])
    );
    println!("fidelity with expected GHZ state: {fidelity:.15}");
    println!("photons 1,2  probability  P(45|1,2)  P(135|1,2)");
    let rows = ghz_correlations(&state)?;
    for row in &rows {
        println!(
            "{:?},{:?}         {:.6}     {:.6}   {:.6}",
            row.outcome[0], row.outcome[1], row.probability, row.p45, row.p135
        );
    }
    let deficit = rows.iter().map(|r| 1.0 - r.predictability()).fold(0.0, f64::max);
    let perfect = deficit <= 1e-12 && fidelity >= 1.0 - 1e-12;
    println!("correlations: {} (max deficit {deficit:.1e})", if perfect { "perfect" } else { "imperfect" });
    if perfect {
        Ok(())
    } else {
        Err(CliError::Failed(format!("ghz: {} does not give a GHZ state", bell.name())))
    }
}

fn simulated_table(config: &ExperimentConfig) -> Result<QuadratureTable, CliError> {
    let setup = config.setup();
    let state = make_cat(&config.cat_spec()?, setup.n_max)?;
    Ok(build_table(&state, &default_phases(setup.phase_count), &setup.x_axis.points()?)?)
}

pub fn quadrature(ctx: &Context) -> Result<(), CliError> {
    let table = simulated_table(ctx.config("quadrature")?)?;
    let (path, w) = ctx.output("quadrature.csv")?;
    table.write_csv(w)?;
    println!("wrote {} phases x {} points to {}", table.phases.len(), table.x_grid.len(), path.display());
    Ok(())
}

fn oracle_minimum(config: &ExperimentConfig, mode: SearchMode, convention: Convention) -> Result<MinimumReport, CliError> {
    let sup = config.cat_spec()?.superposition();
    Ok(find_minimum(&sup, &config.search_region(), mode, convention)?)
}

pub fn wigner_oracle(ctx: &Context) -> Result<(), CliError> {
    let config = ctx.config("wigner-oracle")?;
    let convention = ctx.convention();
    let (re, im) = config.wigner_axes()?;
    let grid = evaluate_grid(&config.cat_spec()?.superposition(), &re, &im, convention)?;
    let (path, w) = ctx.output("wigner_oracle.csv")?;
    grid.write_csv(w)?;
    println!("wrote {} x {} grid ({convention:?} convention) to {}", re.len(), im.len(), path.display());
    println!("minimum: {}", describe(&oracle_minimum(config, SearchMode::Global, convention)?));
    for mode in config.local_modes() {
        println!("local minimum: {}", describe(&oracle_minimum(config, mode, convention)?));
    }
    Ok(())
}

pub fn reconstruct(ctx: &Context, table_path: Option<&Path>) -> Result<(), CliError> {
    let config = ctx.config("reconstruct")?;
    let convention = ctx.convention();
    let (table, source) = match table_path {
        Some(p) => {
            let file = File::open(p).map_err(|e| CliError::io(p, e))?;
            (QuadratureTable::read_csv(std::io::BufReader::new(file))?, TableSource::File)
        }
        None => (simulated_table(config)?, TableSource::Simulated),
    };
    let rec = Reconstructor::new(config.setup().recon, &table.x_grid)?;
    let filtered = rec.filter(&table)?;

    let oracle = oracle_minimum(config, SearchMode::Global, convention)?;
    let reconstructed = find_minimum(&filtered, &config.search_region(), SearchMode::Global, convention)?;
    let mut local = Vec::new();
    for mode in config.local_modes() {
        let SearchMode::LocalNear { point, radius } = mode else { continue };
        let o = oracle_minimum(config, mode, convention)?;
        let r = find_minimum(&filtered, &config.search_region(), mode, convention)?;
        local.push(LocalComparison {
            point: [point.0, point.1],
            radius,
            relative_error: report::relative_error(r.value, o.value),
            oracle: o,
            reconstructed: r,
        });
    }

    let (re, im) = config.wigner_axes()?;
    let grid = evaluate_grid(&filtered, &re, &im, convention)?;
    let (csv_path, w) = ctx.output("reconstruction.csv")?;
    grid.write_csv(w)?;

    let report = ReconstructReport {
        schema: report::SCHEMA.into(),
        command: "reconstruct".into(),
        experiment: config.name.clone(),
        convention,
        source,
        config: config.clone(),
        calibration_constant: rec.scale(),
        relative_error: report::relative_error(reconstructed.value, oracle.value),
        oracle,
        reconstructed,
        local,
    };
    let json_path = ctx.write_json("reconstruct.json", &report)?;
    println!(
        "{}: reconstructed {} vs exact {} ({:.2}%)",
        config.name,
        describe(&report.reconstructed),
        describe(&report.oracle),
        100.0 * report.relative_error
    );
    for l in &report.local {
        println!(
            "  local: reconstructed {} vs exact {} ({:.2}%)",
            describe(&l.reconstructed),
            describe(&l.oracle),
            100.0 * l.relative_error
        );
    }
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

pub fn noise_study(ctx: &Context) -> Result<(), CliError> {
    let mut config = ctx.config("noise-study")?.clone();
    let convention = ctx.convention();
    if let (Some(seed), Some(noise)) = (ctx.seed, config.noise.as_mut()) {
        noise.seed = seed;
    }
    let noise = config.noise_spec()?;
    let cat = config.cat_spec()?;
    let probe = match config.noise.and_then(|n| n.probe) {
        Some(p) => (p[0], p[1]),
        None => oracle_minimum(&config, SearchMode::Global, convention)?.location,
    };
    let oracle_value = cat.superposition().wigner(C64::new(probe.0, probe.1))? * convention.scale();
    let study = monte_carlo_study(&cat, &noise, &config.setup(), probe, convention)?;
    let report = NoiseStudyReport {
        schema: report::SCHEMA.into(),
        command: "noise-study".into(),
        experiment: config.name.clone(),
        convention,
        config: config.clone(),
        probe: [probe.0, probe.1],
        oracle_value,
        clean_value: study.clean_value,
        noise,
        minimum: study.minimum,
        samples: study.samples,
    };
    let path = ctx.write_json("noise-study.json", &report)?;
    println!(
        "{}: {} ± {:.3} over {} runs at ±{:.0}% (clean {:.4}, exact {:.4})",
        config.name,
        describe(&report.minimum),
        report.minimum.stddev,
        noise.runs,
        100.0 * noise.magnitude,
        report.clean_value,
        report.oracle_value
    );
    println!("wrote {}", path.display());
    Ok(())
}

/// Reference minima (convention factor 2π) used for the calibration check.
#[allow(clippy::type_complexity)]
const REFERENCE_MINIMA: [(&str, f64, (f64, f64), f64, Option<f64>); 4] = [
    ("theta=pi/2", PI / 2.0, (0.3346, 0.0), -3.16, None),
    ("theta=1.11", 1.11, (0.8954, 0.0), -3.916, None),
    ("theta=1.11 local", 1.11, (0.157, 0.0), -0.890, Some(0.1)),
    ("theta=0.2", 0.2, (2.687, 0.0), -0.679, None),
];

/// Weyl sequence in [0, 1): deterministic, well spread points.
fn weyl(k: u64, offset: u64, irrational: f64) -> f64 {
    ((k + offset) as f64 * irrational).fract()
}

pub fn verify(ctx: &Context) -> Result<(), CliError> {
    let offset = ctx.seed.unwrap_or(0) % 1_000_003;
    let mut failures = 0;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        failures += usize::from(!ok);
    };

    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let r = 0.5 + (10f64.sqrt() - 0.5) * weyl(k, offset, 0.618_033_988_749_894_9);
        let theta = 0.05 + (PI / 2.0 - 0.05) * weyl(k, offset, 0.414_213_562_373_095_1);
        let alpha = C64::new(
            6.0 * weyl(k, offset, 0.732_050_807_568_877_3) - 3.0,
            6.0 * weyl(k, offset, 0.236_067_977_499_789_7) - 3.0,
        );
        let cat = CatSpec::even(r, theta)?;
        let closed = cat.superposition().wigner(alpha)?;
        let parity = wigner_displaced_parity(&make_cat(&cat, 60)?, alpha)?;
        worst = worst.max((closed - parity).abs());
    }
    report("oracle equivalence", worst <= 1e-6, format!("closed form vs displaced parity, 100 points, max |diff| {worst:.2e}"));

    let kc = default_cutoff(5.0);
    let worst = (0..20)
        .map(|k| {
            let xi = 12.0 * weyl(k, offset, FRAC_1_PI) - 6.0;
            (fbp_kernel(xi, kc) - fbp_kernel_by_quadrature(xi, kc, 200_000)).abs()
        })
        .fold(0.0, f64::max);
    report("filter kernel", worst <= 1e-8, format!("closed form vs numeric integral, 20 points, max |diff| {worst:.2e}"));

    let x = cat_tomo::quadrature::default_x_axis(5.0).points()?;
    let rec = Reconstructor::new(cat_tomo::ReconstructionConfig::for_mean_photons(5.0), &x)?;
    let expected = 1.0 / (4.0 * PI * PI);
    let dev = report::relative_error(rec.scale(), expected);
    report(
        "vacuum calibration",
        dev <= 1e-6,
        format!("back-projection constant {:.9} vs 1/(4 pi^2) = {expected:.9}", rec.scale()),
    );

    let mut factors = Vec::new();
    for (name, theta, point, value, radius) in REFERENCE_MINIMA {
        let cat = CatSpec::even(5f64.sqrt(), theta)?.with_normalization(CatNormalization::Nominal);
        let region = SearchRegion { re: (point.0 - 0.3, point.0 + 0.3), im: (-0.3, 0.3), step: 0.01 };
        let mode = match radius {
            Some(radius) => SearchMode::LocalNear { point, radius },
            None => SearchMode::Global,
        };
        let m = find_minimum(&cat.superposition(), &region, mode, Convention::Phys)?;
        let factor = value / m.value;
        println!("     {name}: {} (phys) -> factor {factor:.4}", describe(&m));
        factors.push(factor);
    }
    let spread = factors.iter().map(|f| report::relative_error(*f, 2.0 * PI)).fold(0.0, f64::max);
    report(
        "2pi convention",
        spread <= 0.02,
        format!("all reference factors within {:.2}% of 2 pi (limit 2%)", 100.0 * spread),
    );

    if failures == 0 {
        println!("verify: all checks passed");
        Ok(())
    } else {
        Err(CliError::Failed(format!("verify: {failures} check(s) failed")))
    }
}
