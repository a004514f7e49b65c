//! Dispatch of one configured cell to the library.

use oplab_core::aluthge::{
    default_probe, divergence_certificate_shift, iterate_dense, iterate_shift, DEFAULT_LAMBDA, DEFAULT_STOP_TOL,
    MAX_DENSE_ITERS,
};
use oplab_core::dynamics::{
    build_pseudo_orbit_from_bounded, homoclinic_scaling_check, invariance_check, shadow, telescoping_residual,
    DenseOperator, DenseSplitting, OrbitAnalysis, ShiftSplitting, StateVector, PSEUDO_ORBIT_LIMIT,
};
use oplab_core::linalg::random::rng;
use oplab_core::linalg::{classify_matrix, multiset_distance, operator_norm, schur_decompose};
use oplab_core::shift::{classify, is_hyponormal, spectrum_annulus, ShiftOperator, WeightSequence};
use oplab_core::{Complex64, ComplexMatrix, RECONSTRUCTION_TOL, SPECTRAL_TOL};

use crate::config::{ExperimentConfig, Kind, Operator, VectorSpec};
use crate::error::{CliError, OpContext};
use crate::presets;
use crate::table::ResultTable;

const DEFAULT_HORIZON: usize = 64;
const DEFAULT_SHIFT_ITERS: usize = 64;
const DEFAULT_DELTA: f64 = 1e-3;
const DEFAULT_STEPS: usize = 500;
const TELESCOPING_TOL: f64 = 1e-8;

/// Runs one validated cell. `at` is the cell's path in the config, used in errors.
pub fn run_cell(cell: &ExperimentConfig, at: &str) -> Result<ResultTable, CliError> {
    let kind = cell.kind.expect("kind is filled before dispatch");
    let label = cell.label.clone().unwrap_or_default();
    if kind == Kind::Preset {
        let name = cell.preset.as_deref().expect("validated");
        let mut t = presets::run(name, cell.seed)?;
        if !label.is_empty() {
            t.label = label;
        }
        return Ok(t);
    }
    let op = cell.resolve_operator(at)?;
    let mut t = match (kind, &op) {
        (Kind::Classify, Operator::Shift(w)) => classify_shift(w),
        (Kind::Classify, Operator::Dense(a)) => classify_dense(a, cell),
        (Kind::Aluthge, Operator::Shift(w)) => aluthge_shift(w, cell),
        (Kind::Aluthge, Operator::Dense(a)) => aluthge_dense(a, cell),
        (Kind::Orbit, Operator::Shift(w)) => orbit_shift(w, cell, at),
        (Kind::Orbit, Operator::Dense(a)) => orbit_dense(a, cell, at),
        (Kind::Shadow, Operator::Shift(w)) => shadow_shift(w, cell, at),
        (Kind::Shadow, Operator::Dense(a)) => shadow_dense(a, cell),
        (Kind::Spectrum, Operator::Shift(w)) => spectrum_shift(w),
        (Kind::Spectrum, Operator::Dense(a)) => spectrum_dense(a),
        (Kind::Certificate, Operator::Shift(w)) => certificate(w, cell),
        (Kind::Certificate, Operator::Dense(_)) => Err(CliError::ConfigInvalid {
            path: format!("{at}.operator"),
            message: "divergence certificates need a weighted shift".into(),
        }),
        (Kind::Preset, _) => unreachable!("handled above"),
    }?;
    t.label = label;
    Ok(t)
}

fn lambda(cell: &ExperimentConfig) -> f64 {
    cell.params.lambda.unwrap_or(DEFAULT_LAMBDA)
}

pub(crate) fn classify_shift(w: &WeightSequence) -> Result<ResultTable, CliError> {
    let c = classify(w);
    let mut t = ResultTable::new(
        "classify",
        "",
        &[
            "verdict", "innerRadius", "outerRadius", "splitPoint", "rateM", "rateN", "powerM", "powerN",
            "boundConstant", "shadowingConstant", "hyponormal",
        ],
    );
    let s = c.splitting.as_ref();
    t.push(vec![
        format!("{:?}", c.verdict).into(),
        c.annulus.inner.into(),
        c.annulus.outer.into(),
        c.split_point.into(),
        s.map(|s| s.rate_m).into(),
        s.map(|s| s.rate_n).into(),
        s.map(|s| s.power_m as i64).into(),
        s.map(|s| s.power_n as i64).into(),
        s.map(|s| s.bound_constant).into(),
        s.map(|s| s.shadowing_constant()).into(),
        is_hyponormal(w).into(),
    ]);
    t.check(
        "annulus-consistent",
        c.verdict.is_hyperbolic() != c.annulus.meets_unit_circle(),
        format!("annulus [{}, {}]", c.annulus.inner, c.annulus.outer),
    );
    t.check(
        "split-certified",
        c.verdict.is_generalized_hyperbolic() == s.is_some_and(|s| s.rate_m < 1.0 && s.rate_n < 1.0),
        format!("{:?}", c.verdict),
    );
    t.document(&c);
    Ok(t)
}

fn classify_dense(a: &ComplexMatrix, cell: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let tol = cell.params.tol.unwrap_or(SPECTRAL_TOL);
    let c = classify_matrix(a, tol).op("classify")?;
    let mut t = ResultTable::new("classify", "", &["verdict", "dim", "stableDim", "circleGap", "spectralRadius"]);
    let radius = c.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    t.push(vec![
        format!("{:?}", c.verdict).into(),
        a.dim().into(),
        c.stable_dim.into(),
        c.circle_gap.into(),
        radius.into(),
    ]);
    t.check(
        "verdict-consistent",
        c.verdict.is_hyperbolic() == (c.circle_gap >= tol),
        format!("circle gap {:e}, tol {tol:e}", c.circle_gap),
    );
    t.document(&c);
    Ok(t)
}

const TRACE_COLUMNS: [&str; 5] = ["k", "stepGap", "commutatorDefect", "innerRadius", "outerRadius"];

fn aluthge_shift(w: &WeightSequence, cell: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let iters = cell.params.max_iters.unwrap_or(DEFAULT_SHIFT_ITERS);
    let tr = iterate_shift(w, lambda(cell), iters).op("aluthge")?;
    let mut t = ResultTable::new("aluthge", "", &TRACE_COLUMNS);
    for (k, a) in tr.spectra.iter().enumerate() {
        t.push(vec![
            k.into(),
            tr.step_gaps.get(k).copied().into(),
            tr.commutator_defects[k].into(),
            a.inner.into(),
            a.outer.into(),
        ]);
    }
    let preserved = tr.spectra.iter().all(|a| *a == tr.spectra[0])
        && tr
            .iterates
            .iter()
            .all(|v| v.left_tail() == w.left_tail() && v.right_tail() == w.right_tail());
    t.check("tails-preserved", preserved, format!("{} iterates", tr.iterates.len()));
    t.document(&serde_json::json!({
        "lambda": tr.lambda,
        "stop": tr.stop,
        "last": tr.last(),
    }));
    Ok(t)
}

fn aluthge_dense(a: &ComplexMatrix, cell: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let iters = cell.params.max_iters.unwrap_or(MAX_DENSE_ITERS);
    let stop = cell.params.stop_tol.unwrap_or(DEFAULT_STOP_TOL);
    let tol = cell.params.tol.unwrap_or(1e-6);
    let tr = iterate_dense(a, lambda(cell), iters, stop).op("aluthge")?;
    let mut t = ResultTable::new("aluthge", "", &TRACE_COLUMNS);
    let mut worst: f64 = 0.0;
    for (k, spec) in tr.spectra.iter().enumerate() {
        let moduli = spec.iter().map(|z| z.norm());
        let inner = moduli.clone().fold(f64::INFINITY, f64::min);
        let outer = moduli.fold(0.0, f64::max);
        if k > 0 {
            worst = worst.max(multiset_distance(&tr.spectra[k - 1], spec));
        }
        t.push(vec![
            k.into(),
            tr.step_gaps.get(k).copied().into(),
            tr.commutator_defects[k].into(),
            inner.into(),
            outer.into(),
        ]);
    }
    t.check(
        "spectrum-preserved",
        worst < tol,
        format!("max per-step multiset distance {worst:e}, tol {tol:e}"),
    );
    t.document(&serde_json::json!({
        "lambda": tr.lambda,
        "stop": tr.stop,
        "finalDefect": tr.final_defect(),
        "last": tr.last(),
    }));
    Ok(t)
}

fn orbit_shift(w: &WeightSequence, cell: &ExperimentConfig, at: &str) -> Result<ResultTable, CliError> {
    let op = ShiftOperator::new(w.clone());
    let x = cell
        .params
        .vector
        .clone()
        .unwrap_or(VectorSpec::Basis(0))
        .lattice(at)?;
    let horizon = cell.params.horizon.unwrap_or(DEFAULT_HORIZON);
    let r = cell.params.r.unwrap_or(1.0);
    let seg = op.orbit_norms(&x, horizon).op("orbit")?;
    let rep = op.is_r_homoclinic(&x, r, horizon).op("orbit")?;
    let mut t = orbit_table(&seg.norms, &seg.log_norms, horizon);
    t.check("exact-decision", rep.exact, format!("witness {:?}", rep.witness_index));
    if rep.is_r_homoclinic_at_horizon && !x.is_zero() {
        let scaled = homoclinic_scaling_check(&op, &x, 1.0, r, horizon).op("orbit")?;
        t.check("scaling", scaled, format!("r = {r} rescaled to 1"));
        let inv = invariance_check(&op, &x, r, horizon).op("orbit")?;
        t.check("invariance", inv, "T x and T^-1 x stay r-homoclinic");
    }
    t.document(&rep);
    Ok(t)
}

fn orbit_dense(a: &ComplexMatrix, cell: &ExperimentConfig, at: &str) -> Result<ResultTable, CliError> {
    let op = DenseOperator::new(a.clone()).op("orbit")?;
    let x = cell
        .params
        .vector
        .clone()
        .unwrap_or(VectorSpec::Basis(0))
        .dense(a.dim(), at)?;
    let horizon = cell.params.horizon.unwrap_or(DEFAULT_HORIZON);
    let r = cell.params.r.unwrap_or(1.0);
    let seg = op.orbit_norms(&x, horizon).op("orbit")?;
    let rep = op.is_r_homoclinic(&x, r, horizon).op("orbit")?;
    let mut t = orbit_table(&seg.norms, &seg.log_norms, horizon);
    t.check(
        "finite-log-norms",
        seg.log_norms.iter().all(|l| !l.is_nan()),
        format!("{} points", seg.log_norms.len()),
    );
    t.document(&rep);
    Ok(t)
}

fn orbit_table(norms: &[f64], log_norms: &[f64], horizon: usize) -> ResultTable {
    let mut t = ResultTable::new("orbit", "", &["n", "norm", "logNorm"]);
    for (i, (n, l)) in norms.iter().zip(log_norms).enumerate() {
        t.push(vec![(i as i64 - horizon as i64).into(), (*n).into(), (*l).into()]);
    }
    t
}

fn shadow_shift(w: &WeightSequence, cell: &ExperimentConfig, at: &str) -> Result<ResultTable, CliError> {
    let sys = ShiftSplitting::new(w).op("shadow")?;
    let x = cell
        .params
        .vector
        .clone()
        .unwrap_or(VectorSpec::Basis(w.core_end()))
        .lattice(at)?;
    let delta = cell.params.delta.unwrap_or(DEFAULT_DELTA);
    let sup = sys.op.ec_membership(&x, f64::INFINITY, 1000).op("shadow")?.sup_norm;
    let horizon = cell
        .params
        .horizon
        .unwrap_or_else(|| ((40.0 * sup / delta).ceil() as usize).clamp(DEFAULT_HORIZON, PSEUDO_ORBIT_LIMIT));
    let po = build_pseudo_orbit_from_bounded(&sys.op, &x, delta, horizon).op("shadow")?;
    let res = shadow(&sys, &po).op("shadow")?;
    let residual = telescoping_residual(&sys, &po, &res);
    let rep = sys.op.is_r_homoclinic(&res.shadow_point, 1.0, 1000).op("shadow")?;
    let distance = res.shadow_point.difference(&x).norm();
    let mut t = shadow_table(&res.per_step_errors, res.start);
    t.check("within-bound", res.within_bound(), format!("eps {:e} <= K delta {:e}", res.epsilon, res.bound));
    t.check("telescoping", residual < TELESCOPING_TOL, format!("residual {residual:e}"));
    t.check("shadow-homoclinic", rep.homoclinic == Some(true), format!("|y - x| = {distance:e}"));
    t.document(&serde_json::json!({
        "delta": delta,
        "horizon": horizon,
        "maxDefect": po.max_defect,
        "epsilon": res.epsilon,
        "shadowingConstant": res.shadowing_constant,
        "bound": res.bound,
        "shadowPoint": res.shadow_point,
        "distanceToCenter": distance,
        "telescopingResidual": residual,
    }));
    Ok(t)
}

fn shadow_dense(a: &ComplexMatrix, cell: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let seed = cell.seed.expect("validated");
    let sys = DenseSplitting::new(a, cell.params.tol.unwrap_or(SPECTRAL_TOL)).op("shadow")?;
    let delta = cell.params.delta.unwrap_or(DEFAULT_DELTA);
    let steps = cell.params.steps.unwrap_or(DEFAULT_STEPS);
    let po = sys.noisy_pseudo_orbit(&mut rng(seed), steps, delta).op("shadow")?;
    let res = shadow(&sys, &po).op("shadow")?;
    let residual = telescoping_residual(&sys, &po, &res);
    let k = res.shadowing_constant;
    let mut t = shadow_table(&res.per_step_errors, res.start);
    t.check(
        "epsilon-le-k-delta",
        res.epsilon <= k * delta,
        format!("eps {:e}, K {k}, delta {delta:e}", res.epsilon),
    );
    t.check("telescoping", residual < TELESCOPING_TOL, format!("residual {residual:e}"));
    t.document(&serde_json::json!({
        "delta": delta,
        "steps": steps,
        "maxDefect": po.max_defect,
        "epsilon": res.epsilon,
        "shadowingConstant": k,
        "shadowPoint": res.shadow_point,
        "telescopingResidual": residual,
    }));
    Ok(t)
}

fn shadow_table(errors: &[f64], start: i64) -> ResultTable {
    let mut t = ResultTable::new("shadow", "", &["n", "error"]);
    for (i, e) in errors.iter().enumerate() {
        t.push(vec![(start + i as i64).into(), (*e).into()]);
    }
    t
}

fn spectrum_shift(w: &WeightSequence) -> Result<ResultTable, CliError> {
    let a = spectrum_annulus(w);
    let mut t = ResultTable::new("spectrum", "", &["innerRadius", "outerRadius", "meetsUnitCircle"]);
    t.push(vec![a.inner.into(), a.outer.into(), a.meets_unit_circle().into()]);
    t.check(
        "radii-are-tails",
        a.inner == w.left_tail().min(w.right_tail()) && a.outer == w.left_tail().max(w.right_tail()),
        format!("tails {} | {}", w.left_tail(), w.right_tail()),
    );
    t.document(&a);
    Ok(t)
}

fn spectrum_dense(a: &ComplexMatrix) -> Result<ResultTable, CliError> {
    let s = schur_decompose(a, RECONSTRUCTION_TOL).op("spectrum")?;
    let scale = operator_norm(a, 1e-12).op("spectrum")?.max(f64::MIN_POSITIVE);
    let residual = s.reconstruct().max_abs_diff(a) / scale;
    let mut t = ResultTable::new("spectrum", "", &["index", "re", "im", "modulus"]);
    for (i, z) in s.eigenvalues.iter().enumerate() {
        t.push(vec![i.into(), z.re.into(), z.im.into(), z.norm().into()]);
    }
    t.check(
        "schur-reconstruction",
        residual < RECONSTRUCTION_TOL,
        format!("relative residual {residual:e}"),
    );
    let eigenvalues: Vec<Complex64> = s.eigenvalues.clone();
    t.document(&serde_json::json!({ "eigenvalues": eigenvalues, "upper": s.upper }));
    Ok(t)
}

fn certificate(w: &WeightSequence, cell: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let l = lambda(cell);
    let k_small = cell.params.k_small.unwrap_or(16);
    let (default_large, default_n) = default_probe(w, l, k_small);
    let k_large = cell.params.k_large.unwrap_or(default_large);
    let n = cell.params.n.unwrap_or(default_n);
    let c = divergence_certificate_shift(w, l, k_small, k_large, n).op("certificate")?;
    let mut t = certificate_table(&c);
    t.check("methods-agree", c.methods_agree, format!("gap {:e} vs {:e}", c.gap, c.gap_closed_form));
    t.check(
        "distance-dominates-gap",
        c.iterate_distance >= c.gap,
        format!("iterate distance {:e}", c.iterate_distance),
    );
    t.document(&c);
    Ok(t)
}

pub(crate) fn certificate_table(c: &oplab_core::aluthge::DivergenceCertificate) -> ResultTable {
    let mut t = ResultTable::new(
        "certificate",
        "",
        &[
            "lambda", "kSmall", "kLarge", "probeIndex", "alphaSmall", "alphaLarge", "gap", "gapClosedForm",
            "iterateDistance", "tailLowerBound",
        ],
    );
    t.push(vec![
        c.lambda.into(),
        c.k_small.into(),
        c.k_large.into(),
        c.probe_index.into(),
        c.alpha_small.into(),
        c.alpha_large.into(),
        c.gap.into(),
        c.gap_closed_form.into(),
        c.iterate_distance.into(),
        c.tail_lower_bound.into(),
    ]);
    t
}

