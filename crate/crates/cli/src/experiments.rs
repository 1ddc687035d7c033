//! One function per subcommand: build the grid, run the core experiment,
//! write the output files.

use switchdyn::analysis::{
    self, cv_sweep_table, fit_high_frequency, fit_power_law, format_float, lin_spaced, log_spaced,
    SweepResult,
};
use switchdyn::bistable::{self, DoubleWellConfig};
use switchdyn::dde::{beta_sweep, DdeConfig, InitialHistory};
use switchdyn::switching::Family;
use switchdyn::telegraph::constant_d_sweep;

use crate::output::{plot_data, FitTable, Manifest, OutDir};
use crate::{BistableArgs, CliError, ConstantSweepArgs, CvSweepArgs, DdeSweepArgs, DistSweepArgs};

fn parse_family(name: &str, allowed: &[Family]) -> Result<Vec<Family>, CliError> {
    if name == "all" {
        return Ok(allowed.to_vec());
    }
    allowed
        .iter()
        .find(|f| f.name() == name)
        .map(|f| vec![*f])
        .ok_or_else(|| {
            let names: Vec<&str> = allowed.iter().map(|f| f.name()).collect();
            CliError::Usage(format!(
                "unknown family `{name}`; expected one of {} or `all`",
                names.join(", ")
            ))
        })
}

fn check_grid(fmin: f64, fmax: f64, points: usize) -> Result<(), CliError> {
    if !(fmin > 0.0 && fmax > fmin) {
        return Err(CliError::Usage(format!(
            "need 0 < fmin < fmax, got fmin={fmin} fmax={fmax}"
        )));
    }
    if points < 3 {
        return Err(CliError::Usage(format!(
            "need at least 3 grid points, got {points}"
        )));
    }
    Ok(())
}

/// Log-log plot rows `(log10 f, log10 K)` for rows with positive `K`.
fn log_log_rows(sweep: &SweepResult, f_col: &str, k_col: &str) -> Vec<Vec<f64>> {
    sweep
        .points(f_col, k_col)
        .into_iter()
        .filter(|(f, k)| *f > 0.0 && *k > 0.0)
        .map(|(f, k)| vec![f.log10(), k.log10()])
        .collect()
}

pub fn constant_sweep(args: &ConstantSweepArgs) -> Result<(), CliError> {
    check_grid(args.fmin, args.fmax, args.points)?;
    let dir = OutDir::create(&args.common.resolve_out_dir("constant-sweep"))?;
    let frequencies = log_spaced(args.fmin, args.fmax, args.points);
    let sweep = constant_d_sweep(&frequencies, args.events)?;
    dir.write_csv("data.csv", &sweep)?;

    // A grid living entirely below the fit window still produces data,
    // just no fit row.
    let mut fits = FitTable::new();
    if let Ok(fit) = fit_high_frequency(&sweep.points("f_d", "K_simulated")) {
        fits.push("k_simulated_vs_f", &fit);
    }
    dir.write("fit.csv", &fits.render())?;

    dir.write(
        "plot.dat",
        &plot_data(log_log_rows(&sweep, "f_d", "K_simulated")),
    )?;

    let mut manifest = Manifest::new("constant-sweep", args.common.seed);
    manifest.set_float("fmin", args.fmin);
    manifest.set_float("fmax", args.fmax);
    manifest.set("points", args.points.to_string());
    manifest.set("events", args.events.to_string());
    dir.write("manifest.txt", &manifest.render())?;
    Ok(())
}

pub fn dde_sweep(args: &DdeSweepArgs) -> Result<(), CliError> {
    check_grid(args.beta_min, args.beta_max, args.points)?;
    let dir = OutDir::create(&args.common.resolve_out_dir("dde-sweep"))?;
    let betas = log_spaced(args.beta_min, args.beta_max, args.points);
    let template = DdeConfig {
        beta: args.beta_min,
        gamma: 1.0,
        step: args.step,
        horizon: args.horizon,
        history: InitialHistory::Constant(args.phi),
        burn_in_time: args.burn_in,
    };
    let sweep = beta_sweep(&betas, &template)?;
    dir.write_csv("data.csv", &sweep)?;

    let mut fits = FitTable::new();
    fits.push("fd_vs_beta", &fit_power_law(&sweep.points("beta", "f_d"))?);
    fits.push("k_vs_fd", &fit_power_law(&sweep.points("f_d", "K"))?);
    dir.write("fit.csv", &fits.render())?;

    // Raw three-column plot rows (beta, f_d, K).
    dir.write("plot.dat", &plot_data(sweep.rows().iter().cloned()))?;

    let mut manifest = Manifest::new("dde-sweep", args.common.seed);
    manifest.set_float("beta_min", args.beta_min);
    manifest.set_float("beta_max", args.beta_max);
    manifest.set("points", args.points.to_string());
    manifest.set_float("step", args.step);
    manifest.set_float("horizon", args.horizon);
    manifest.set_float("burn_in", args.burn_in);
    manifest.set_float("phi", args.phi);
    dir.write("manifest.txt", &manifest.render())?;
    Ok(())
}

pub fn dist_sweep(args: &DistSweepArgs) -> Result<(), CliError> {
    let families = parse_family(
        &args.family,
        &[
            Family::Exponential,
            Family::Gamma,
            Family::Beta,
            Family::LogNormal,
        ],
    )?;
    if args.points < 3 {
        return Err(CliError::Usage(format!(
            "need at least 3 grid points, got {}",
            args.points
        )));
    }
    let dir = OutDir::create(&args.common.resolve_out_dir("dist-sweep"))?;
    let mut fits = FitTable::new();
    for family in &families {
        let sweep =
            analysis::distribution_sweep(*family, args.points, args.events, args.common.seed)?;
        dir.write_csv(&format!("{}.csv", family.name()), &sweep)?;
        dir.write(
            &format!("plot_{}.dat", family.name()),
            &plot_data(log_log_rows(&sweep, "f_d", "K_F")),
        )?;
        if let Ok(fit) = fit_high_frequency(&sweep.points("f_d", "K_F")) {
            fits.push(family.name(), &fit);
        }
    }
    dir.write("fit.csv", &fits.render())?;

    let mut manifest = Manifest::new("dist-sweep", args.common.seed);
    manifest.set("family", args.family.clone());
    manifest.set("points", args.points.to_string());
    manifest.set("events", args.events.to_string());
    dir.write("manifest.txt", &manifest.render())?;
    Ok(())
}

pub fn cv_sweep(args: &CvSweepArgs) -> Result<(), CliError> {
    let families = parse_family(
        &args.family,
        &[Family::Gamma, Family::Beta, Family::LogNormal],
    )?;
    check_grid(args.fmin, args.fmax, args.points)?;
    if args.cvs.is_empty() {
        return Err(CliError::Usage("need at least one cv value".into()));
    }
    let dir = OutDir::create(&args.common.resolve_out_dir("cv-sweep"))?;
    let frequencies = log_spaced(args.fmin, args.fmax, args.points);
    let mut fits = FitTable::with_cv_column();
    for family in &families {
        let entries = analysis::cv_sweep(
            *family,
            &args.cvs,
            &frequencies,
            args.events,
            args.common.seed,
        )?;
        let table = cv_sweep_table(*family, &entries, args.common.seed);
        dir.write_csv(&format!("{}.csv", family.name()), &table)?;
        let plot_rows: Vec<Vec<f64>> = entries
            .iter()
            .flat_map(|e| {
                e.feasible_points()
                    .into_iter()
                    .map(move |(f, k)| vec![e.cv, f.log10(), k.log10()])
            })
            .collect();
        dir.write(
            &format!("plot_{}.dat", family.name()),
            &plot_data(plot_rows),
        )?;
        for entry in &entries {
            fits.push_cv(family.name(), entry.cv, entry.fit.as_ref());
        }
    }
    dir.write("fit.csv", &fits.render())?;

    let mut manifest = Manifest::new("cv-sweep", args.common.seed);
    manifest.set("family", args.family.clone());
    manifest.set(
        "cvs",
        args.cvs
            .iter()
            .map(|c| format_float(*c))
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.set_float("fmin", args.fmin);
    manifest.set_float("fmax", args.fmax);
    manifest.set("points", args.points.to_string());
    manifest.set("events", args.events.to_string());
    dir.write("manifest.txt", &manifest.render())?;
    Ok(())
}

pub fn bistable(args: &BistableArgs) -> Result<(), CliError> {
    let dir = OutDir::create(&args.common.resolve_out_dir("bistable"))?;
    let template = DoubleWellConfig {
        horizon: args.horizon,
        step: args.step,
        n_realizations: args.realizations,
        ..DoubleWellConfig::new(0.0, args.common.seed)
    };

    let mus = match args.mu {
        Some(mu) => vec![mu],
        None => {
            if args.points < 2 {
                return Err(CliError::Usage(format!(
                    "need at least 2 grid points, got {}",
                    args.points
                )));
            }
            if args.mu_min.partial_cmp(&args.mu_max) != Some(std::cmp::Ordering::Less) {
                return Err(CliError::Usage(format!(
                    "need mu_min < mu_max, got {} and {}",
                    args.mu_min, args.mu_max
                )));
            }
            lin_spaced(args.mu_min, args.mu_max, args.points)
        }
    };
    let sweep = bistable::mu_sweep(&mus, &template)?;
    dir.write_csv("data.csv", &sweep)?;

    // Occupancy densities at up to three representative grid points: the
    // two ends and the first point past the stability threshold.
    let mu_star = bistable::stability_threshold(&sweep, args.horizon);
    let mut density_indices = vec![0usize];
    if let Some(star) = mu_star {
        if let Some(idx) = mus.iter().position(|m| *m > star) {
            density_indices.push(idx);
        }
    }
    density_indices.push(mus.len() - 1);
    density_indices.dedup();
    for idx in density_indices {
        let config = DoubleWellConfig {
            mu: mus[idx],
            seed: switchdyn::seeds::derive_seed(template.seed, idx as u64),
            ..template.clone()
        };
        let hist = bistable::trajectory_density(&config, args.bins)?;
        let rows: Vec<Vec<f64>> = (0..hist.density.len())
            .map(|i| vec![hist.center(i), hist.density[i]])
            .collect();
        dir.write(&format!("density_{idx:03}.dat"), &plot_data(rows))?;
    }

    let mut manifest = Manifest::new("bistable", args.common.seed);
    match args.mu {
        Some(mu) => manifest.set_float("mu", mu),
        None => {
            manifest.set_float("mu_min", args.mu_min);
            manifest.set_float("mu_max", args.mu_max);
            manifest.set("points", args.points.to_string());
        }
    }
    manifest.set_float("horizon", args.horizon);
    manifest.set_float("step", args.step);
    manifest.set("realizations", args.realizations.to_string());
    manifest.set("bins", args.bins.to_string());
    match mu_star {
        Some(star) => manifest.set_float("derived_mu_star", star),
        None => manifest.set("derived_mu_star", "none"),
    }
    dir.write("manifest.txt", &manifest.render())?;
    Ok(())
}
