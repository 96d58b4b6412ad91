//! Subcommand bodies. Each writes its result to `out` and notes to `log`.

use std::fs::File;
use std::io::{BufWriter, Write};

use ccr::heisenberg::{generator, taylor_flow, VelocityLaw};
use ccr::opalg::OpExpr;
use ccr::pathint::{convergence_study, Reference, LEAK_LIMIT};
use ccr::propagator::{evolve_exact, gaussian_kernel};
use ccr::wavefunction::WaveFunction;
use num_complex::Complex64;

use crate::config::RunConfig;
use crate::csv::{complex_fields, fmt_f64, CsvWriter};
use crate::parse::parse_expression;
use crate::CliError;

pub fn normord(text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let e = parse_expression(text)?;
    writeln!(out, "{}", e.normal_order())?;
    Ok(())
}

pub fn comm(a: &str, b: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let a = parse_expression(a)?;
    let b = parse_expression(b)?;
    writeln!(out, "{}", a.commutator(&b))?;
    Ok(())
}

/// Taylor coefficients of `X(t)` and `P(t)`, one `k: expr` line each.
pub fn series(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let g = generator(&cfg.force_law(), &VelocityLaw::newtonian());
    writeln!(out, "G: {g}")?;
    for (name, o) in [("X", OpExpr::x()), ("P", OpExpr::p())] {
        writeln!(out, "{name}(t):")?;
        write!(out, "{}", taylor_flow(&o, &g, cfg.order))?;
    }
    Ok(())
}

fn closed_form(cfg: &RunConfig, what: &str) -> Result<ccr::propagator::AffineFlowExact, CliError> {
    cfg.exact_flow()
        .ok_or_else(|| CliError::Usage(format!("{what} needs --model free, harmonic or linear")))
}

/// Either the six kernel coefficients or `U(x_b, x_a)` over the grid.
pub fn kernel(cfg: &RunConfig, coefficients: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let flow = closed_form(cfg, "kernel")?;
    let k = gaussian_kernel(&flow, cfg.t)?;
    if coefficients {
        let mut w = CsvWriter::new(out, &["name", "re", "im"])?;
        for (name, z) in ["a", "b", "c", "d", "e", "A"].iter().zip(k.coefficients()) {
            let [re, im] = complex_fields(z);
            w.fields(&[name.to_string(), re, im])?;
        }
        return Ok(w.flush()?);
    }
    let grid = cfg.grid();
    let mut w = CsvWriter::new(out, &["x_b", "x_a", "re", "im"])?;
    for i in 0..grid.n {
        for j in 0..grid.n {
            let z = k.eval(grid.x(i), grid.x(j));
            w.floats(&[grid.x(i), grid.x(j), z.re, z.im])?;
        }
    }
    Ok(w.flush()?)
}

fn initial_state(cfg: &RunConfig) -> WaveFunction {
    WaveFunction::gaussian(cfg.grid(), cfg.x0, cfg.p0, cfg.sigma)
}

fn write_wave(psi: &WaveFunction, out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = CsvWriter::new(out, &["x", "re", "im"])?;
    for (i, z) in psi.samples().iter().enumerate() {
        w.floats(&[psi.grid().x(i), z.re, z.im])?;
    }
    Ok(w.flush()?)
}

fn summarize(psi: &WaveFunction, log: &mut dyn Write) -> Result<(), CliError> {
    writeln!(
        log,
        "norm {} <x> {} <p> {} width {}",
        fmt_f64(psi.norm()),
        fmt_f64(psi.mean_x()),
        fmt_f64(psi.mean_p()),
        fmt_f64(psi.width())
    )?;
    if !psi.is_boundary_clean() {
        writeln!(log, "warning: edge fraction {:.3e} (grid too narrow)", psi.boundary_mass_fraction())?;
    }
    Ok(())
}

/// Gaussian packet evolved by the closed-form kernel.
pub fn evolve(cfg: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    let flow = closed_form(cfg, "evolve")?;
    let k = gaussian_kernel(&flow, cfg.t)?;
    let psi0 = initial_state(cfg);
    if !psi0.is_boundary_clean() {
        writeln!(log, "warning: initial packet reaches the grid edges")?;
    }
    let phase = Complex64::from_polar(1.0, flow.reference_phase(cfg.t));
    let psi = evolve_exact(&k, &psi0)?.scaled(phase);
    summarize(&psi, log)?;
    write_wave(&psi, out)
}

/// Convergence report to `out`; the finest run's wave function goes to
/// `cfg.output` when set.
pub fn pathint(cfg: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    let psi0 = initial_state(cfg);
    let reference = cfg.exact_flow().map_or(Reference::SelfConvergence, Reference::ClosedForm);
    let law = cfg.force_law();
    let report = convergence_study(&law.force, &cfg.params(), cfg.mass, &psi0, cfg.t, &cfg.steps, reference)?;
    let mut w = CsvWriter::new(out, &["reference", "steps", "dt", "error", "ratio", "edge_fraction"])?;
    for row in &report.rows {
        w.fields(&[
            report.reference.to_string(),
            row.steps.to_string(),
            fmt_f64(row.dt),
            fmt_f64(row.error),
            row.ratio.map(fmt_f64).unwrap_or_default(),
            fmt_f64(row.edge_fraction),
        ])?;
    }
    w.flush()?;
    match report.asymptotic_from() {
        Some(n) => writeln!(log, "second-order regime from N = {n}")?,
        None => writeln!(log, "no second-order regime among the listed N")?,
    }
    if report.leaked() {
        writeln!(log, "warning: edge fraction above {LEAK_LIMIT:e}; widen the grid")?;
    }
    summarize(&report.finest, log)?;
    if let Some(path) = &cfg.output {
        let file = File::create(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        write_wave(&report.finest, &mut BufWriter::new(file))?;
    }
    Ok(())
}
