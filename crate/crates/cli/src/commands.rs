//! One function per subcommand, each returning an in-memory [`Document`].

use decoherence::{
    fermi_golden_rule_holds, gibbs_state, qubit_resonances, time_series, timescales, xi, Provenance, TimeSeries64,
};
use decoherence_oracle::{
    build_hamiltonian, discretize, fit_decay_rate_checked, thermal_bath_state, Channel, DephasingModel,
    ExactPropagator, ModeTruncation, TruncatedFockSpace, ANALYTIC_FIELD_FACTOR,
};
use rayon::prelude::*;

use crate::config::{RunConfig, SystemConfig};
use crate::error::{CliError, Result};
use crate::output::{Cell, Document, Table};

const LEADING: &str = "leading-order";
const ORACLE: &str = "oracle";

/// A command's document plus human-readable diagnostics for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub document: Document,
    pub diagnostics: Vec<String>,
}

impl Output {
    fn quiet(document: Document) -> Self {
        Self { document, diagnostics: Vec::new() }
    }
}

pub const RESONANCE_COLUMNS: [&str; 20] = [
    "lambda",
    "beta",
    "Delta",
    "a",
    "b",
    "abs_c",
    "re_eps0",
    "im_eps0",
    "re_eps_delta",
    "im_eps_delta",
    "re_eps_minus_delta",
    "im_eps_minus_delta",
    "R",
    "D",
    "xi0",
    "xi_delta",
    "tau_T",
    "tau_D",
    "gamma",
    "fgr",
];

pub const SERIES_COLUMNS: [&str; 6] = ["t", "rho11", "rho22", "re_rho12", "im_rho12", "abs_rho12"];

fn resonance_record(cfg: &RunConfig) -> Result<Vec<Cell>> {
    let (ff, res, q) = (cfg.form_factor()?, cfg.reservoir()?, cfg.qubit()?);
    let rs = qubit_resonances(&q, &ff, &res, cfg.lambda)?;
    let ts = timescales(&rs);
    let co = rs.coefficients().copied().expect("second-order sets carry their coefficients");
    let fgr = fermi_golden_rule_holds(&q, &ff, &res)?;
    let nums = [
        cfg.lambda,
        cfg.beta,
        q.delta(),
        q.a(),
        q.b(),
        q.c().norm(),
        rs.eps0().re,
        rs.eps0().im,
        rs.eps_delta().re,
        rs.eps_delta().im,
        rs.eps_minus_delta().re,
        rs.eps_minus_delta().im,
        co.r,
        co.d,
        co.xi_zero,
        co.xi_delta,
        ts.tau_t,
        ts.tau_d,
        ts.gamma,
    ];
    let mut row: Vec<Cell> = nums.into_iter().map(Cell::Num).collect();
    row.push(Cell::Bool(fgr));
    Ok(row)
}

pub fn cmd_resonances(cfg: &RunConfig) -> Result<Output> {
    let mut table = Table::new("resonances", &RESONANCE_COLUMNS);
    table.push(resonance_record(cfg)?);
    Ok(Output::quiet(Document::new("resonances", vec![LEADING], vec![table])))
}

fn series_rows(table: &mut Table, series: &TimeSeries64) {
    for (t, rho) in series.iter() {
        let r12 = rho.rho12();
        table.push(vec![
            t.into(),
            rho.rho11().re.into(),
            rho.rho22().re.into(),
            r12.re.into(),
            r12.im.into(),
            r12.norm().into(),
        ]);
    }
}

fn leading_series(cfg: &RunConfig) -> Result<TimeSeries64> {
    let (ff, res, q) = (cfg.form_factor()?, cfg.reservoir()?, cfg.qubit()?);
    let rs = qubit_resonances(&q, &ff, &res, cfg.lambda)?;
    Ok(time_series(&cfg.initial_state, &rs, q.delta(), cfg.beta, &cfg.time.points())?)
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Output> {
    let series = leading_series(cfg)?;
    let mut table = Table::new("trajectory", &SERIES_COLUMNS);
    series_rows(&mut table, &series);
    Ok(Output::quiet(Document::new("evolve", vec![series.provenance().as_str()], vec![table])))
}

pub fn cmd_oracle(cfg: &RunConfig, compare: bool) -> Result<Output> {
    let (ff, q) = (cfg.form_factor()?, cfg.qubit()?);
    let oc = &cfg.oracle;
    let fock = TruncatedFockSpace::with_budget(oc.modes, oc.n_max, oc.budget)?;
    let bath = discretize(&ff, oc.modes, oc.omega_max)?;
    let t_rec = bath.recurrence_time();
    let grid = cfg.time.points();
    let fit_window = compare.then(|| oc.fit_window.unwrap_or((grid[0], cfg.time.t_end.min(0.5 * t_rec))));
    if let Some((_, t2)) = fit_window {
        if t2 > 0.5 * t_rec {
            return Err(decoherence_oracle::OracleError::RecurrenceWindow { t_end: t2, recurrence_time: t_rec }.into());
        }
    }

    let mut diagnostics = vec![format!(
        "oracle: M = {}, n_max = {}, dimension {}, recurrence time {:.6}",
        oc.modes,
        oc.n_max,
        fock.dim(),
        t_rec
    )];
    if cfg.time.t_end > 0.5 * t_rec {
        diagnostics.push(format!("warning: t_end = {} exceeds half the recurrence time {t_rec:.6}", cfg.time.t_end));
    }
    let thermal = thermal_bath_state(&bath, &fock, cfg.beta)?;
    for w in thermal.warnings() {
        diagnostics.push(format!(
            "warning: mode {} (omega = {:.6}) discards thermal weight {:.3e} above n_max",
            w.mode, w.omega, w.discarded_weight
        ));
    }
    let h = build_hamiltonian(&q, &bath, &fock, cfg.lambda)?;
    let prop = ExactPropagator::new(&h)?;
    let rho0 = cfg.initial_state.density_matrix()?;
    let series = prop.reduced_trajectory(&rho0, &thermal, &grid)?;

    if !compare {
        let mut table = Table::new("trajectory", &SERIES_COLUMNS);
        series_rows(&mut table, &series);
        return Ok(Output { document: Document::new("oracle", vec![ORACLE], vec![table]), diagnostics });
    }

    let leading = leading_series(cfg)?;
    let dephasing = if q.c_norm_sqr() == 0.0 {
        Some(DephasingModel::new(&q, &bath, cfg.beta, cfg.lambda, ModeTruncation::Fock(oc.n_max))?)
    } else {
        None
    };
    let mut columns: Vec<&str> = SERIES_COLUMNS.to_vec();
    columns.extend(["lo_rho11", "lo_rho22", "lo_re_rho12", "lo_im_rho12", "lo_abs_rho12"]);
    if dephasing.is_some() {
        columns.extend(["exact_re_rho12", "exact_im_rho12", "exact_abs_rho12"]);
    }
    let mut traj = Table::new("trajectory", &columns);
    for ((t, rho), lo) in series.iter().zip(leading.states()) {
        let (r12, l12) = (rho.rho12(), lo.rho12());
        let mut row: Vec<Cell> = [
            t,
            rho.rho11().re,
            rho.rho22().re,
            r12.re,
            r12.im,
            r12.norm(),
            lo.rho11().re,
            lo.rho22().re,
            l12.re,
            l12.im,
            l12.norm(),
        ]
        .into_iter()
        .map(Cell::Num)
        .collect();
        if let Some(model) = &dephasing {
            let e12 = model.state(&rho0, t).rho12();
            row.extend([Cell::Num(e12.re), Cell::Num(e12.im), Cell::Num(e12.norm())]);
        }
        traj.push(row);
    }

    let (t1, t2) = fit_window.expect("compare mode always has a window");
    let rs = qubit_resonances(&q, &ff, &cfg.reservoir()?, cfg.lambda)?;
    let mut fits = Table::new(
        "fits",
        &["channel", "t1", "t2", "fitted_rate", "calibrated_rate", "leading_order_rate", "relative_deviation"],
    );
    let mut channels = vec![("coherence", Channel::Coherence, rs.eps_delta().im)];
    if q.c_norm_sqr() != 0.0 {
        let gibbs11 = gibbs_state(q.delta(), cfg.beta)?.rho11().re;
        channels.push(("population", Channel::Population { gibbs11 }, rs.eps0().im));
    }
    for (name, channel, predicted) in channels {
        let fitted = match fit_decay_rate_checked(&series, channel, t1, t2, t_rec) {
            Ok(fit) => fit.rate,
            Err(e) => {
                diagnostics.push(format!("warning: {name} fit failed: {e}"));
                f64::NAN
            }
        };
        let calibrated = fitted * ANALYTIC_FIELD_FACTOR;
        fits.push(vec![
            name.into(),
            t1.into(),
            t2.into(),
            fitted.into(),
            calibrated.into(),
            predicted.into(),
            ((calibrated - predicted) / predicted).into(),
        ]);
    }
    Ok(Output {
        document: Document::new("oracle", vec![ORACLE, Provenance::LeadingOrder.as_str()], vec![traj, fits]),
        diagnostics,
    })
}

/// Resonance records over the configured sweep, in input order.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Output> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::validation("sweep", "section is required"))?;
    let rows: Vec<Vec<Cell>> = sweep
        .values
        .par_iter()
        .map(|&v| resonance_record(&cfg.with_parameter(sweep.parameter, v)?))
        .collect::<Result<_>>()?;
    let mut table = Table::new("sweep", &RESONANCE_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Output::quiet(Document::new("sweep", vec![LEADING], vec![table])))
}

pub fn cmd_xi(cfg: &RunConfig) -> Result<Output> {
    let (ff, res) = (cfg.form_factor()?, cfg.reservoir()?);
    let mut table = Table::new("xi", &["eta", "xi"]);
    for eta in cfg.xi.points() {
        table.push(vec![eta.into(), xi(&ff, &res, eta)?.into()]);
    }
    Ok(Output::quiet(Document::new("xi", vec![LEADING], vec![table])))
}

pub fn cmd_spinboson(cfg: &RunConfig) -> Result<Output> {
    let SystemConfig::SpinBoson { epsilon, delta0, hbar } = cfg.system else {
        return Err(CliError::validation("spin_boson", "section is required by the spinboson command"));
    };
    let q = cfg.qubit()?;
    let mut table = Table::new("spinboson", &["epsilon", "Delta0", "hbar", "Delta", "a", "b", "c"]);
    table.push(
        [epsilon, delta0, hbar, q.delta(), q.a(), q.b(), q.c().norm()].into_iter().map(Cell::Num).collect(),
    );
    Ok(Output::quiet(Document::new("spinboson", vec![LEADING], vec![table])))
}
