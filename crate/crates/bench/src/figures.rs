//! Sweep driver producing the figure data series.

use std::collections::HashMap;

use dicke_qfi::capacity::check_full;
use dicke_qfi::noise::{apply_noise, NoiseKind, NoiseSpec};
use dicke_qfi::operators::{
    build_hamiltonian, Basis, Direction, HamiltonianKind, HamiltonianSpec, HermitianOperator,
};
use dicke_qfi::optimize::{
    best_near_optimal, optimal_qfi, optimize_axis, optimize_axis_mixed, qfi_linear_covariance,
    separable_bound, AxisSearchConfig,
};
use dicke_qfi::qfi::{qfi_mixed, qfi_pure_symmetric, sensitivity};
use dicke_qfi::states::{
    build_probe, density_from_pure, embed_full, unrotate_sym, ProbeKind, ProbeSpec, SymVector,
};
use rayon::prelude::*;

use crate::config::{hamiltonian_name, AxisPolicy, ProbeChoice, RunConfig};
use crate::error::BenchResult;
use crate::output::ResultRow;

/// A probe prepared for one generator, with the axis it is encoded along.
#[derive(Clone, Debug)]
pub struct ResolvedProbe {
    pub choice: ProbeChoice,
    pub state: SymVector,
    pub axis: Direction,
    pub noiseless_qfi: f64,
    /// Dicke pair actually used, when the probe is one.
    pub pair: Option<(usize, usize)>,
}

fn is_unit_linear(spec: &HamiltonianSpec) -> bool {
    spec.kind == HamiltonianKind::Linear && spec.mu == 1.0
}

/// Builds the probe and picks its noiseless optimal axis. `None` when the family
/// does not exist at this `N` (balanced Dicke for odd `N`).
pub fn resolve_probe(
    choice: ProbeChoice,
    spec: &HamiltonianSpec,
    axis_cfg: &AxisSearchConfig,
) -> BenchResult<Option<ResolvedProbe>> {
    let n = spec.n_qubits;
    let build = |kind: ProbeKind| build_probe(&ProbeSpec::new(kind, n));
    let (state, pair) = match choice {
        ProbeChoice::NearOptimal => {
            let best = best_near_optimal(n, spec, axis_cfg)?.best;
            let state = build(ProbeKind::DickeSuperposition(best.l, best.l_prime))?;
            let qfi = qfi_pure_symmetric(&state, &spec.with_axis(best.axis))?.value;
            return Ok(Some(ResolvedProbe {
                choice,
                state,
                axis: best.axis,
                noiseless_qfi: qfi,
                pair: Some((best.l, best.l_prime)),
            }));
        }
        ProbeChoice::Optimal => {
            let state = build(ProbeKind::OptimalFor(*spec))?;
            let qfi = qfi_pure_symmetric(&state, spec)?.value;
            return Ok(Some(ResolvedProbe {
                choice,
                state,
                axis: spec.axis,
                noiseless_qfi: qfi,
                pair: None,
            }));
        }
        ProbeChoice::BalancedDicke if n % 2 == 1 => return Ok(None),
        ProbeChoice::BalancedDicke => (build(ProbeKind::BalancedDicke)?, None),
        ProbeChoice::Ghz => (build(ProbeKind::Ghz)?, Some((0, n))),
        ProbeChoice::WWbar => (build(ProbeKind::WWbar)?, Some((1, n - 1))),
        ProbeChoice::Dicke(l) => (build(ProbeKind::Dicke(l))?, None),
        ProbeChoice::Pair(a, b) => (build(ProbeKind::DickeSuperposition(a, b))?, Some((a, b))),
    };
    let axis = if is_unit_linear(spec) {
        qfi_linear_covariance(&state)?.0
    } else {
        optimize_axis(&state, spec, axis_cfg)?.axis
    };
    let noiseless_qfi = qfi_pure_symmetric(&state, &spec.with_axis(axis))?.value;
    Ok(Some(ResolvedProbe {
        choice,
        state,
        axis,
        noiseless_qfi,
        pair,
    }))
}

/// `(1/sqrt(F_sep), 1/sqrt(F_opt))` for nonlinear generators.
pub fn nonlinear_references(spec: &HamiltonianSpec) -> BenchResult<Option<(f64, f64)>> {
    if matches!(
        spec.kind,
        HamiltonianKind::Linear | HamiltonianKind::Power(1)
    ) {
        return Ok(None);
    }
    let sep = separable_bound(spec, &Default::default())?.qfi;
    Ok(Some((sensitivity(sep), sensitivity(optimal_qfi(spec)))))
}

/// Maps `local`, expressed in the frame whose `+z` is `frame`, back to lab coordinates.
fn to_lab(frame: Direction, local: Direction) -> BenchResult<Direction> {
    let [x, y, z] = local.unit_vector();
    let (st, ct) = frame.polar.sin_cos();
    let (sp, cp) = frame.azimuth.sin_cos();
    let (x, z) = (x * ct + z * st, -x * st + z * ct);
    Ok(Direction::from_vector([
        x * cp - y * sp,
        x * sp + y * cp,
        z,
    ])?)
}

/// QFI of the probe after noise, with the axis used.
///
/// Channels act in the eigenbasis of the encoding axis: the probe is carried into
/// the frame where that axis is `+z`, so `generator` must be the full-basis
/// generator along `+z`.
pub fn noisy_qfi(
    probe: &ResolvedProbe,
    spec: &HamiltonianSpec,
    generator: Option<&HermitianOperator>,
    noise: NoiseKind,
    p: f64,
    policy: AxisPolicy,
    axis_cfg: &AxisSearchConfig,
) -> BenchResult<(Direction, f64)> {
    let n = spec.n_qubits;
    check_full(n)?;
    let framed = unrotate_sym(&probe.state, probe.axis)?;
    let rho = density_from_pure(&embed_full(&framed)?)?;
    let noisy = apply_noise(&rho, &NoiseSpec::new(noise, p)?)?;
    match policy {
        AxisPolicy::Fixed => {
            let owned;
            let h = match generator {
                Some(h) => h,
                None => {
                    owned = frame_generator(spec)?;
                    &owned
                }
            };
            Ok((probe.axis, qfi_mixed(&noisy, h)?.value))
        }
        AxisPolicy::Reopt => {
            let opt = optimize_axis_mixed(&noisy, spec, axis_cfg)?;
            Ok((to_lab(probe.axis, opt.axis)?, opt.qfi.value))
        }
    }
}

/// Full-basis generator along `+z`.
pub fn frame_generator(spec: &HamiltonianSpec) -> BenchResult<HermitianOperator> {
    Ok(build_hamiltonian(
        &spec.with_axis(Direction::Z).with_basis(Basis::Full),
    )?)
}

struct Group {
    probe: ResolvedProbe,
    spec: HamiltonianSpec,
    noise: Option<NoiseKind>,
    generator: Option<HermitianOperator>,
    refs: Option<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct FigureRun {
    pub rows: Vec<ResultRow>,
    /// Human-readable remarks, e.g. which Dicke pair was selected.
    pub notes: Vec<String>,
}

pub fn run_figure(cfg: &RunConfig) -> BenchResult<FigureRun> {
    cfg.validate()?;
    let axis_cfg = AxisSearchConfig::default();
    let grid = cfg.p_grid.points()?;

    // Resolve every (generator, probe, N) once.
    let mut keys = Vec::new();
    for &kind in &cfg.hamiltonians {
        for &choice in &cfg.probes {
            for &n in &cfg.n_qubits {
                keys.push((kind, choice, n));
            }
        }
    }
    let resolved: Vec<Option<ResolvedProbe>> = keys
        .par_iter()
        .map(|&(kind, choice, n)| resolve_probe(choice, &HamiltonianSpec::new(kind, n), &axis_cfg))
        .collect::<BenchResult<_>>()?;

    let mut ref_cache: HashMap<(String, usize), Option<(f64, f64)>> = HashMap::new();
    let mut notes = Vec::new();
    let mut groups = Vec::new();
    for (&(kind, choice, n), probe) in keys.iter().zip(resolved) {
        let Some(probe) = probe else {
            notes.push(format!("{choice} skipped at N={n}"));
            continue;
        };
        let spec = HamiltonianSpec::new(kind, n);
        if let (ProbeChoice::NearOptimal, Some((a, b))) = (choice, probe.pair) {
            notes.push(format!("{choice} {} N={n}: pair ({a},{b})", spec.label()));
        }
        let key = (spec.label(), n);
        let refs = match ref_cache.get(&key) {
            Some(r) => *r,
            None => {
                let r = nonlinear_references(&spec)?;
                ref_cache.insert(key, r);
                r
            }
        };
        for &noise in &cfg.noise {
            groups.push(Group {
                probe: probe.clone(),
                spec,
                noise,
                generator: None,
                refs,
            });
        }
    }

    // Fixed-axis generators are shared by every p of a group.
    if cfg.axis_policy == AxisPolicy::Fixed {
        groups
            .par_iter_mut()
            .filter(|g| g.noise.is_some())
            .try_for_each(|g| -> BenchResult<()> {
                check_full(g.spec.n_qubits)?;
                g.generator = Some(frame_generator(&g.spec)?);
                Ok(())
            })?;
    }

    let mut tasks = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        match g.noise {
            None => tasks.push((gi, 0.0)),
            Some(_) => tasks.extend(grid.iter().map(|&p| (gi, p))),
        }
    }
    let rows = tasks
        .par_iter()
        .map(|&(gi, p)| -> BenchResult<ResultRow> {
            let g = &groups[gi];
            let (axis, fq) = match g.noise {
                None => (g.probe.axis, g.probe.noiseless_qfi),
                Some(kind) => noisy_qfi(
                    &g.probe,
                    &g.spec,
                    g.generator.as_ref(),
                    kind,
                    p,
                    cfg.axis_policy,
                    &axis_cfg,
                )?,
            };
            let n = g.spec.n_qubits as f64;
            let dtheta = sensitivity(fq);
            Ok(ResultRow {
                probe: g.probe.choice.to_string(),
                hamiltonian: hamiltonian_name(g.spec.kind),
                n_qubits: g.spec.n_qubits,
                noise: g.noise.map_or("none", NoiseKind::label).to_string(),
                p,
                axis_theta: axis.polar,
                axis_phi: axis.azimuth,
                fq,
                dtheta: dtheta.is_finite().then_some(dtheta),
                ref_snl: 1.0 / n.sqrt(),
                ref_hl: 1.0 / n,
                ref_nlsnl: g.refs.map(|r| r.0),
                ref_nlhl: g.refs.map(|r| r.1),
            })
        })
        .collect::<BenchResult<Vec<_>>>()?;
    Ok(FigureRun { rows, notes })
}

/// Runs `f` on a pool with the given thread count, or the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PGrid;

    #[test]
    fn fig1_at_eight() {
        let mut cfg = RunConfig::preset("fig1").unwrap();
        cfg.n_qubits = vec![7, 8];
        let run = run_figure(&cfg).unwrap();
        let at = |probe: &str, n: usize| {
            run.rows
                .iter()
                .find(|r| r.probe == probe && r.n_qubits == n)
                .map(|r| r.fq)
        };
        assert!((at("near_optimal", 8).unwrap() - 58.0).abs() < 1e-9);
        assert!((at("wwbar", 8).unwrap() - 36.0).abs() < 1e-9);
        assert!((at("balanced_dicke", 8).unwrap() - 40.0).abs() < 1e-9);
        assert!((at("ghz", 8).unwrap() - 64.0).abs() < 1e-9);
        assert!(at("balanced_dicke", 7).is_none());
        assert_eq!(run.rows.len(), 7);
    }

    #[test]
    fn depolarized_endpoint_is_useless() {
        let mut cfg = RunConfig::preset("fig5").unwrap();
        cfg.p_grid = PGrid {
            start: 0.0,
            stop: 1.0,
            step: 0.5,
        };
        let run = run_figure(&cfg).unwrap();
        assert_eq!(run.rows.len(), 6);
        for r in &run.rows {
            assert!(r.ref_nlsnl.is_some() && r.ref_nlhl.is_some());
            if r.p == 1.0 {
                assert!(r.fq < 1e-12);
                assert!(r.dtheta.is_none());
            }
        }
        let opt0 = run
            .rows
            .iter()
            .find(|r| r.probe == "optimal" && r.p == 0.0)
            .unwrap();
        assert!((opt0.fq - 256.0).abs() < 1e-8);
    }

    #[test]
    fn lab_frame_mapping() {
        let frame = Direction::new(0.7, 2.1);
        let back = to_lab(frame, Direction::Z).unwrap();
        assert!((back.polar - frame.polar).abs() < 1e-12);
        assert!((back.azimuth - frame.azimuth).abs() < 1e-12);
        // A quarter turn about the frame's y axis stays orthogonal to it.
        let side = to_lab(frame, Direction::X).unwrap().unit_vector();
        let n = frame.unit_vector();
        assert!((side[0] * n[0] + side[1] * n[1] + side[2] * n[2]).abs() < 1e-12);
    }

    #[test]
    fn tilted_probe_relaxes_to_zero() {
        let spec = HamiltonianSpec::linear(4);
        let probe = resolve_probe(ProbeChoice::Pair(1, 3), &spec, &AxisSearchConfig::default())
            .unwrap()
            .unwrap();
        assert!(probe.axis.polar > 0.1);
        let cfg = AxisSearchConfig::default();
        for (policy, p, want) in [
            (AxisPolicy::Fixed, 0.0, probe.noiseless_qfi),
            (AxisPolicy::Reopt, 0.0, probe.noiseless_qfi),
            (AxisPolicy::Fixed, 1.0, 0.0),
        ] {
            let (_, f) = noisy_qfi(
                &probe,
                &spec,
                None,
                NoiseKind::AmplitudeDamping,
                p,
                policy,
                &cfg,
            )
            .unwrap();
            assert!((f - want).abs() < 1e-8, "{policy:?} p={p}: {f} vs {want}");
        }
    }
}
