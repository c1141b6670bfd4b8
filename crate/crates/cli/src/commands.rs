//! One function per subcommand; each returns the artifact and a summary line.

use slsem::analysis::{
    dispersion_curve, modified_equation, spectrum_sweep, spectrum_sweep_omega, vn_stability_limit, vn_table,
    zero_diffusion_omega, DispersionMode, SpectrumReport, SweepVariable, VnScan, STABILITY_SLACK,
};
use slsem::basis::{make_nodes, NodeSet};
use slsem::operator::{assemble, center_stencil, CflReference, Discretization, ElementOperators};
use slsem::solver::{convergence_study, exact_sine, run, RunConfig};
use slsem::Error;

use crate::args::{Cli, Command, ModeArg, Range};
use crate::artifact::{Artifact, Cell};

pub type Outcome = Result<(Artifact, String), slsem::Error>;

const DEFAULT_VN_POINTS: usize = 4096;
const DEFAULT_DISPERSION_POINTS: usize = 2048;
const DEFAULT_VN_RANGE: Range = Range { lo: 0.02, hi: 4.0, step: 0.02 };
const DEFAULT_SPECTRUM_RANGE: Range = Range { lo: 0.05, hi: 3.0, step: 0.05 };

pub fn dispatch(cli: &Cli) -> Outcome {
    match cli.command {
        Command::Simulate => simulate(cli),
        Command::Convergence => convergence(cli),
        Command::Mea => mea(cli),
        Command::Dispersion => dispersion(cli),
        Command::Vn => vn(cli),
        Command::Spectrum => spectrum(cli),
        Command::Stencil => stencil(cli),
    }
}

fn cfl_ref_name(r: CflReference) -> &'static str {
    match r {
        CflReference::MinSpacing => "min_spacing",
        CflReference::Element => "element",
    }
}

fn echo_common(a: &mut Artifact, cli: &Cli, nodes: &NodeSet) {
    a.meta("command", format!("{:?}", cli.command).to_lowercase())
        .meta("p", cli.p)
        .meta("nodes", cli.nodes.to_string())
        .meta("d_min", nodes.min_spacing)
        .meta("cfl_ref", cfl_ref_name(cli.cfl_ref))
        .meta("omega", cli.omega.to_string());
}

fn element(cli: &Cli) -> Result<(NodeSet, Discretization, ElementOperators), slsem::Error> {
    let nodes = make_nodes(cli.p, cli.nodes)?;
    let disc = Discretization::new(&nodes, 1.0, cli.dx, cli.cfl, cli.cfl_ref, cli.omega)?;
    let ops = assemble(&nodes, &disc)?;
    Ok((nodes, disc, ops))
}

fn echo_discretization(a: &mut Artifact, disc: &Discretization) {
    a.meta("cfl", disc.cfl)
        .meta("omega_resolved", disc.omega_effective())
        .meta("a", disc.a)
        .meta("dx", disc.dx)
        .meta("dt", disc.dt)
        .meta("nu", disc.nu());
}

fn run_config(cli: &Cli) -> RunConfig {
    RunConfig {
        degree: cli.p,
        kind: cli.nodes,
        elements: cli.elements,
        cfl: cli.cfl,
        cfl_ref: cli.cfl_ref,
        flux: cli.omega,
        t_end: cli.t_end,
        a: 1.0,
    }
}

fn simulate(cli: &Cli) -> Outcome {
    let nodes = make_nodes(cli.p, cli.nodes)?;
    let report = run(&run_config(cli))?;
    let mut a = Artifact::new(&["x", "t", "q", "q_exact"]);
    echo_common(&mut a, cli, &nodes);
    a.meta("elements", cli.elements)
        .meta("cfl", cli.cfl)
        .meta("omega_resolved", report.omega_resolved)
        .meta("a", report.config.a)
        .meta("dx", report.mesh.dx)
        .meta("dt", report.dt)
        .meta("nu", report.nu)
        .meta("t_end", cli.t_end)
        .meta("steps", report.steps)
        .meta("cond_vstar", report.cond_vstar);
    let t = report.final_state.t;
    for (k, qk) in report.final_state.q.iter().enumerate() {
        for (m, q) in qk.iter().enumerate() {
            let x = report.mesh.node_x(k, m);
            a.row(vec![x.into(), t.into(), (*q).into(), exact_sine(x, t, report.config.a).into()]);
        }
    }
    let ratio = report.final_norm / report.initial_norm;
    a.summary("l2_error", report.l2_error)
        .summary("nodal_rms_error", report.nodal_rms_error)
        .summary("initial_norm", report.initial_norm)
        .summary("final_norm", report.final_norm)
        .summary("norm_ratio", ratio)
        .summary("initial_mass", report.initial_mass)
        .summary("mass", report.mass)
        .summary("norm_history", Cell::Series(report.norm_history.clone()));
    let line = format!(
        "simulate: l2_error={:.6e} steps={} norm_ratio={:.6} omega={:.6}",
        report.l2_error, report.steps, ratio, report.omega_resolved
    );
    Ok((a, line))
}

fn convergence(cli: &Cli) -> Outcome {
    let nodes = make_nodes(cli.p, cli.nodes)?;
    let table = convergence_study(&run_config(cli), &cli.k_list.0)?;
    let mut a = Artifact::new(&["K", "P", "l2_error", "nodal_rms", "est_order"]);
    echo_common(&mut a, cli, &nodes);
    a.meta("cfl", cli.cfl).meta("t_end", cli.t_end);
    let mut prev: Option<(usize, f64)> = None;
    for r in &table.rows {
        let local = prev
            .map_or(Cell::Empty, |(k0, e0)| Cell::Num((e0 / r.l2_error).ln() / (r.elements as f64 / k0 as f64).ln()));
        a.row(vec![r.elements.into(), r.degree.into(), r.l2_error.into(), r.nodal_rms_error.into(), local]);
        prev = Some((r.elements, r.l2_error));
    }
    a.summary("order", table.order);
    Ok((a, format!("convergence: order={:.4} over K={:?}", table.order, cli.k_list.0)))
}

fn mea(cli: &Cli) -> Outcome {
    let (nodes, disc, ops) = element(cli)?;
    let me = modified_equation(&center_stencil(&ops), &disc, cli.terms)?;
    let mut a = Artifact::new(&["m", "a_m", "b_m"]);
    echo_common(&mut a, cli, &nodes);
    echo_discretization(&mut a, &disc);
    a.meta("terms", cli.terms).meta("consistent", me.consistent);
    for m in 1..=cli.terms {
        a.row(vec![m.into(), me.a[m].into(), me.b[m].into()]);
    }
    // Not every configuration has an ω that cancels a_2.
    let zero = match zero_diffusion_omega(cli.p, cli.nodes, cli.cfl, cli.cfl_ref) {
        Ok(w) => Some(w),
        Err(Error::InvalidDegree(_) | Error::DegenerateDependence(_)) => None,
        Err(e) => return Err(e),
    };
    a.summary("diffusion", me.diffusion()).summary("dispersion", me.dispersion()).summary("zero_diffusion_omega", zero);
    let line = format!(
        "mea: a_1={:.6e} a_2={:.6e} a_3={:.6e} consistent={}",
        me.a[1],
        me.diffusion(),
        me.dispersion(),
        me.consistent
    );
    Ok((a, line))
}

fn dispersion(cli: &Cli) -> Outcome {
    let (nodes, disc, ops) = element(cli)?;
    let st = center_stencil(&ops);
    let n = cli.theta_points.unwrap_or(DEFAULT_DISPERSION_POINTS).max(1);
    let thetas: Vec<f64> = (1..=n).map(|j| cli.theta_max * j as f64 / n as f64).collect();
    let modes: Vec<DispersionMode> = match cli.mode {
        ModeArg::Exact => vec![DispersionMode::ExactSymbol],
        ModeArg::Me => vec![DispersionMode::MeTruncated(cli.terms)],
        ModeArg::Both => vec![DispersionMode::ExactSymbol, DispersionMode::MeTruncated(cli.terms)],
    };
    let mut a = Artifact::new(&["theta", "re_kstar_dx", "im_kstar_dx", "mode", "terms"]);
    echo_common(&mut a, cli, &nodes);
    echo_discretization(&mut a, &disc);
    let mut worst_im = f64::NEG_INFINITY;
    for mode in modes {
        let (label, terms) = match mode {
            DispersionMode::ExactSymbol => ("exact_symbol", Cell::Empty),
            DispersionMode::MeTruncated(m) => ("me_truncated", Cell::from(m)),
        };
        for s in dispersion_curve(&st, &disc, &thetas, mode)? {
            if mode == DispersionMode::ExactSymbol {
                worst_im = worst_im.max(s.im_kstar_dx);
            }
            a.row(vec![s.theta.into(), s.re_kstar_dx.into(), s.im_kstar_dx.into(), label.into(), terms.clone()]);
        }
    }
    let worst = (worst_im > f64::NEG_INFINITY).then_some(worst_im);
    a.summary("max_im_kstar_dx", worst);
    Ok((
        a,
        format!(
            "dispersion: {} samples, max im(k*dx)={}",
            thetas.len(),
            worst.map_or("n/a".into(), |w| format!("{w:.3e}"))
        ),
    ))
}

fn vn(cli: &Cli) -> Outcome {
    let nodes = make_nodes(cli.p, cli.nodes)?;
    let scan = VnScan { theta_max: cli.theta_max, points: cli.theta_points.unwrap_or(DEFAULT_VN_POINTS) };
    let cfls = cli.cfl_range.unwrap_or(DEFAULT_VN_RANGE).values();
    let table = vn_table(&nodes, cli.omega, cli.cfl_ref, &cfls, &scan)?;
    let mut a = Artifact::new(&["cfl", "max_abs_g"]);
    echo_common(&mut a, cli, &nodes);
    a.meta("theta_max", scan.theta_max).meta("theta_points", scan.points);
    for (c, g) in cfls.iter().zip(&table) {
        a.row(vec![(*c).into(), (*g).into()]);
    }
    let is_stable = |g: f64| g <= 1.0 + STABILITY_SLACK;
    let bracket = cli.bracket.or_else(|| {
        let first_unstable = table.iter().position(|&g| !is_stable(g))?;
        (first_unstable > 0).then(|| (cfls[first_unstable - 1], cfls[first_unstable]))
    });
    let limit = match bracket {
        Some(b) => Some(vn_stability_limit(&nodes, cli.omega, cli.cfl_ref, b, &scan)?),
        None => None,
    };
    if let Some((lo, hi)) = bracket {
        a.meta("bracket", format!("{lo}:{hi}"));
    }
    a.summary("limit", limit);
    let line = match limit {
        Some(l) => format!("vn: limit={l:.6} ({})", cfl_ref_name(cli.cfl_ref)),
        None => "vn: limit=none in the scanned range".to_string(),
    };
    Ok((a, line))
}

fn spectrum(cli: &Cli) -> Outcome {
    let nodes = make_nodes(cli.p, cli.nodes)?;
    let report: SpectrumReport = match cli.omega_range {
        Some(r) => spectrum_sweep_omega(&nodes, cli.dx, cli.cfl, cli.cfl_ref, cli.bc, &r.values())?,
        None => {
            let cfls = cli.cfl_range.unwrap_or(DEFAULT_SPECTRUM_RANGE).values();
            spectrum_sweep(&nodes, cli.dx, cli.omega, cli.bc, &cfls, cli.cfl_ref)?
        }
    };
    let var = match report.variable {
        SweepVariable::Cfl => "cfl",
        SweepVariable::Omega => "omega",
    };
    let mut a = Artifact::new(&[var, "index", "re_lambda", "im_lambda"]);
    echo_common(&mut a, cli, &nodes);
    a.meta(
        "bc",
        match report.bc {
            slsem::analysis::BoundaryModel::Periodic => "periodic",
            slsem::analysis::BoundaryModel::ZeroNeighbor => "zero_neighbor",
        },
    )
    .meta("dx", cli.dx);
    if report.variable == SweepVariable::Omega {
        a.meta("cfl", cli.cfl);
    }
    for (v, lams) in report.values.iter().zip(&report.eigenvalues) {
        for (i, l) in lams.iter().enumerate() {
            a.row(vec![(*v).into(), i.into(), l.re.into(), l.im.into()]);
        }
    }
    let radius = report.max_abs.iter().copied().fold(0.0, f64::max);
    a.summary("merge_point", report.merge_point).summary("max_abs_lambda", radius);
    let line = format!(
        "spectrum: merge_point={} max|lambda|={radius:.6}",
        report.merge_point.map_or("none".into(), |m| format!("{m}"))
    );
    Ok((a, line))
}

fn stencil(cli: &Cli) -> Outcome {
    let (nodes, disc, ops) = element(cli)?;
    let st = center_stencil(&ops);
    let mut a = Artifact::new(&["delta", "c"]);
    echo_common(&mut a, cli, &nodes);
    echo_discretization(&mut a, &disc);
    for e in &st.entries {
        a.row(vec![e.delta.into(), e.weight.into()]);
    }
    a.summary("weight_sum", st.weight_sum()).summary("first_moment", st.moment(1));
    Ok((a, format!("stencil: {} entries, sum={:.15}", st.entries.len(), st.weight_sum())))
}
