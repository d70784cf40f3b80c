//! Acceptance checks, one PASS/FAIL line each with the measured value and its tolerance.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerocurve::canonical::{
    consistency_residual, det3, generic_flow, kernel_contraction, obstruction_check, row_times,
    schrodinger_to_hamiltonian, top_coefficient_forcing, CsBMatrix, SymbolicHamiltonian,
};
use zerocurve::config::Tolerances;
use zerocurve::diffpoly::{q, DiffPoly};
use zerocurve::kdv::{build_hierarchy, soliton_parameters, zero_curvature_residual};
use zerocurve::numlab::{
    bound_states, cocycle_residual, joint_cocycle_residual, kdv_evolve, lft_apply, minus_j_h,
    suggested_steps, transfer_canonical, transfer_schrodinger, ExtComplex, GridFunction,
    HamiltonianGrid, JointFlow, NumError, Scheme, TransferMatrix,
};

struct Line {
    id: u32,
    name: &'static str,
    measured: String,
    tolerance: String,
    pass: bool,
}

fn line(id: u32, name: &'static str, measured: impl Into<String>, tolerance: impl Into<String>, pass: bool) -> Line {
    Line { id, name, measured: measured.into(), tolerance: tolerance.into(), pass }
}

fn failed(id: u32, name: &'static str, err: impl std::fmt::Display) -> Line {
    line(id, name, format!("error: {err}"), "-", false)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn run_cli(args: &[&str]) -> (serde_json::Value, i32, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_zerocurve"))
        .args(args)
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (json, out.status.code().unwrap_or(-1), elapsed)
}

fn hierarchy_reproduction() -> Line {
    let name = "hierarchy n=1 reproduces the KdV equation";
    let (json, code, elapsed) = run_cli(&["hierarchy", "gen", "--n", "1", "--const", "C1=1", "--const", "Cstar=0"]);
    let text = json["results"]["flow_rhs"].as_str().unwrap_or("").to_string();
    let expected = DiffPoly::parse("-1/4*V_xxx + 3/2*V*V_x").unwrap();
    let same = DiffPoly::parse(&text).map(|p| p == expected).unwrap_or(false);
    let pass = code == 0 && same && text == "-1/4*V_xxx + 3/2*V*V_x" && elapsed < Duration::from_secs(1);
    line(1, name, format!("V_t = {text} in {elapsed:.2?}"), "exact, < 1 s", pass)
}

fn degree_zero_shift() -> Line {
    let name = "hierarchy n=0 is the shift V_t = V_x";
    let (json, code, _) = run_cli(&["hierarchy", "gen", "--n", "0", "--const", "C0=1"]);
    let text = json["results"]["flow_rhs"].as_str().unwrap_or("").to_string();
    line(2, name, format!("V_t = {text}"), "exact", code == 0 && text == "V_x")
}

fn zero_curvature_members() -> Line {
    let name = "zero-curvature residual vanishes for n = 0..3";
    let start = Instant::now();
    let mut nonzero = Vec::new();
    let mut n3 = Duration::ZERO;
    for n in 0..=3 {
        let t = Instant::now();
        let member = match build_hierarchy(n, &BTreeMap::new()) {
            Ok(m) => m,
            Err(e) => return failed(3, name, e),
        };
        match zero_curvature_residual(&member.b_matrix(), &member.flow()) {
            Ok(r) if r.is_zero() => {}
            Ok(_) => nonzero.push(n),
            Err(e) => return failed(3, name, e),
        }
        if n == 3 {
            n3 = t.elapsed();
        }
    }
    line(
        3,
        name,
        format!("nonzero members {nonzero:?}; n=3 in {n3:.2?}, total {:.2?}", start.elapsed()),
        "exact, n=3 < 30 s",
        nonzero.is_empty() && n3 < Duration::from_secs(30),
    )
}

fn kernel_replay() -> Line {
    let name = "left-kernel contraction equals the consistency condition";
    let ham = SymbolicHamiltonian::generic();
    let matrix = ham.coefficient_matrix();
    let annihilates = row_times(&ham.left_kernel(), &matrix).iter().all(DiffPoly::is_zero);
    let singular = det3(&matrix).is_zero();
    let mut identity = true;
    for n in 0..=3 {
        let b = CsBMatrix::generic(n);
        let flow = generic_flow();
        match (kernel_contraction(&b, &ham, &flow), consistency_residual(&b, &ham, &flow)) {
            (Ok(k), Ok(c)) => identity &= k == c,
            (Err(e), _) | (_, Err(e)) => return failed(4, name, e),
        }
    }
    line(
        4,
        name,
        format!("contraction identity {identity} (generic B, degrees 0..3); kernel annihilates {annihilates}; det {singular}"),
        "exact",
        identity && annihilates && singular,
    )
}

fn sample_hamiltonians() -> Vec<(&'static str, fn(f64) -> [f64; 3])> {
    vec![
        ("f=1+x^2", |x| [1.0 + x * x, 0.0, 1.0]),
        ("f=2+sin x, g=0.3cos x", |x| [2.0 + x.sin(), 0.3 * x.cos(), 1.0 + 0.5 * x * x]),
        ("f=exp(x/2), g=0.2x", |x| [(0.5 * x).exp(), 0.2 * x, 1.0 + x * x]),
    ]
}

fn obstruction_replay(tol: &Tolerances) -> Line {
    let name = "top-coefficient forcing gives the K equation; K = Δ^(-1/2) on grids";
    let mut symbolic = true;
    for n in 2..=4 {
        match top_coefficient_forcing(n) {
            Ok(t) => symbolic &= t.identities_hold() && t.k_equation_matches(),
            Err(e) => return failed(5, name, e),
        }
    }
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::new();
    for (_, h) in sample_hamiltonians() {
        let residual = |dx: f64| -> Result<f64, String> {
            let grid = HamiltonianGrid::on_interval(-2.0, 2.0, dx, h).map_err(|e| e.to_string())?;
            Ok(obstruction_check(&grid, 2, tol.obstruction).map_err(|e| e.to_string())?.max_residual)
        };
        match (residual(1e-3), residual(5e-4)) {
            (Ok(coarse), Ok(fine)) => {
                worst = worst.max(coarse);
                ratios.push(coarse / fine);
            }
            (Err(e), _) | (_, Err(e)) => return failed(5, name, e),
        }
    }
    let ratio_ok = ratios.iter().all(|r| (3.0..=5.0).contains(r));
    let ratios: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    line(
        5,
        name,
        format!("symbolic {symbolic}; max residual {worst:.3e} at dx=1e-3; halving ratios [{}]", ratios.join(", ")),
        format!("exact; < {:e}; ratio in [3, 5]", tol.obstruction),
        symbolic && worst < tol.obstruction && ratio_ok,
    )
}

fn remark_check(tol: &Tolerances) -> Line {
    let name = "det(H^V_xx) = 4V for V = 0, 1, -2 sech^2";
    let zero = GridFunction::on_interval(-10.0, 10.0, 1e-3, |_| 0.0).unwrap();
    let exact_zero = match schrodinger_to_hamiltonian(&zero) {
        Ok(c) => c.det_xx[1..c.det_xx.len() - 1].iter().all(|d| *d == 0.0),
        Err(e) => return failed(6, name, e),
    };
    let mut worst: f64 = 0.0;
    for f in [(|_: f64| 1.0) as fn(f64) -> f64, |x: f64| -2.0 / x.cosh().powi(2)] {
        let v = GridFunction::on_interval(-10.0, 10.0, 1e-3, f).unwrap();
        match schrodinger_to_hamiltonian(&v) {
            Ok(c) => worst = worst.max(c.det_residual),
            Err(e) => return failed(6, name, e),
        }
    }
    line(
        6,
        name,
        format!("V=0 exactly zero: {exact_zero}; sup-norm {worst:.3e}"),
        format!("exact; < {:e}", tol.convert),
        exact_zero && worst < tol.convert,
    )
}

fn random_potential(rng: &mut ChaCha8Rng) -> GridFunction {
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-4.0..4.0), rng.gen_range(0.3..2.0)))
        .collect();
    GridFunction::on_interval(-5.0, 5.0, 0.01, |x| {
        bumps.iter().map(|(a, c, s)| a * (-(x - c) * (x - c) / s).exp()).sum()
    })
    .unwrap()
}

fn random_hamiltonian(rng: &mut ChaCha8Rng) -> HamiltonianGrid {
    let (a, b, c, p) = (rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0), rng.gen_range(0.0..3.0));
    HamiltonianGrid::on_interval(-5.0, 5.0, 0.01, |x| {
        [1.0 + 0.5 * (a * x + p).sin().powi(2), 0.3 * (b * x).sin(), 1.0 + 0.5 * (c * x).cos().powi(2)]
    })
    .unwrap()
}

fn transfer_properties(tol: &Tolerances) -> Line {
    let name = "transfer matrices: unit determinant and closed forms";
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut det_err: f64 = 0.0;
    for _ in 0..100 {
        let v = random_potential(&mut rng);
        let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0));
        match transfer_schrodinger(&v, z, rng.gen_range(-5.0..5.0)) {
            Ok(t) => det_err = det_err.max((t.det() - 1.0).norm()),
            Err(e) => return failed(7, name, e),
        }
        let h = random_hamiltonian(&mut rng);
        let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0));
        match transfer_canonical(&h, z, rng.gen_range(-5.0..5.0)) {
            Ok(t) => det_err = det_err.max((t.det() - 1.0).norm()),
            Err(e) => return failed(7, name, e),
        }
    }

    let free = GridFunction::on_interval(-5.0, 5.0, 0.01, |_| 0.0).unwrap();
    let identity = HamiltonianGrid::on_interval(-5.0, 5.0, 0.01, |_| [1.0, 0.0, 1.0]).unwrap();
    let mut closed: f64 = 0.0;
    let pi = std::f64::consts::PI;
    let rotation = transfer_schrodinger(&free, c(1.0, 0.0), pi).map(|t| t.distance(&TransferMatrix::real(-1.0, 0.0, 0.0, -1.0)));
    match rotation {
        Ok(d) => closed = closed.max(d),
        Err(e) => return failed(7, name, e),
    }
    for _ in 0..20 {
        let z = c(rng.gen_range(0.2..1.5), rng.gen_range(-0.3..0.3));
        let w = rng.gen_range(-4.0..4.0);
        let k = z.sqrt();
        let (cs, sn) = ((k * w).cos(), (k * w).sin());
        let exact = TransferMatrix::new(cs, sn / k, -k * sn, cs);
        match transfer_schrodinger(&free, z, w) {
            Ok(t) => closed = closed.max(t.distance(&exact)),
            Err(e) => return failed(7, name, e),
        }
        let (cs, sn) = ((z * w).cos(), (z * w).sin());
        let exact = TransferMatrix::new(cs, sn, -sn, cs);
        match transfer_canonical(&identity, z, w) {
            Ok(t) => closed = closed.max(t.distance(&exact)),
            Err(e) => return failed(7, name, e),
        }
    }
    line(
        7,
        name,
        format!("max |det - 1| {det_err:.3e} over 200 cases; closed-form distance {closed:.3e}"),
        format!("< {:e}; < {:e}", tol.det, tol.closed_form),
        det_err < tol.det && closed < tol.closed_form,
    )
}

fn varying_h(x: f64) -> [f64; 3] {
    [1.0 + 0.5 * x.sin().powi(2), 0.2 * (0.7 * x).sin(), 1.2 + 0.3 * x.cos()]
}

fn shift_flow(speed: f64, epsilon: f64) -> JointFlow<impl Fn(f64, f64) -> Result<[f64; 3], NumError>, impl Fn(f64, f64) -> Result<TransferMatrix, NumError>> {
    let z = c(0.7, 0.4);
    JointFlow::new(
        z,
        move |x, t| Ok(varying_h(x + speed * t)),
        move |x, t| {
            let b = minus_j_h(varying_h(x + speed * t)).scale(z * speed);
            let p = TransferMatrix::real(0.0, x.sin(), x.cos(), 0.0);
            Ok(b + p * epsilon)
        },
        1e-3,
    )
}

fn cocycle_suites(tol: &Tolerances) -> Line {
    let name = "time and joint cocycles; perturbations break them";
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_time: f64 = 0.0;
    for _ in 0..50 {
        let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = TransferMatrix::new(a, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), -a);
        match cocycle_residual(|_| Ok(b), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), 1e-2) {
            Ok(r) => worst_time = worst_time.max(r),
            Err(e) => return failed(8, name, e),
        }
    }

    let mut pair = || {
        ((rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0)), (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0)))
    };
    let mut worst_joint: f64 = 0.0;
    let static_shift = JointFlow::new(c(0.9, 0.2), |x, _| Ok(varying_h(x)), |_, _| Ok(TransferMatrix::zero()), 1e-3);
    let h0 = [1.5, 0.4, 0.8];
    let z = c(0.6, 0.5);
    let degree_one = JointFlow::new(z, move |_, _| Ok(h0), move |_, _| Ok(minus_j_h(h0).scale(c(0.3, 0.0) + z * 1.7)), 1e-3);
    let moving = shift_flow(0.8, 0.0);
    for _ in 0..10 {
        let ((x1, _), (x2, _)) = pair();
        let (g, h) = pair();
        let (g2, h2) = pair();
        for r in [
            joint_cocycle_residual(&static_shift, (x1, 0.0), (x2, 0.0)),
            joint_cocycle_residual(&degree_one, g, h),
            joint_cocycle_residual(&moving, g2, h2),
        ] {
            match r {
                Ok(r) => worst_joint = worst_joint.max(r),
                Err(e) => return failed(8, name, e),
            }
        }
    }

    let mut perturbed = Vec::new();
    for eps in [1e-3, 1e-2, 1e-1] {
        match joint_cocycle_residual(&shift_flow(0.8, eps), (0.4, 0.3), (-0.2, 0.5)) {
            Ok(r) => perturbed.push(r),
            Err(e) => return failed(8, name, e),
        }
    }
    let monotone = perturbed.windows(2).all(|w| w[0] < w[1]) && perturbed[0] > tol.cocycle;
    line(
        8,
        name,
        format!(
            "time {worst_time:.3e}; joint {worst_joint:.3e}; perturbed [{:.2e}, {:.2e}, {:.2e}]",
            perturbed[0], perturbed[1], perturbed[2]
        ),
        format!("< {:e}; < {:e}; increasing", tol.cocycle, tol.cocycle),
        worst_time < tol.cocycle && worst_joint < tol.cocycle && monotone,
    )
}

fn isospectrality(tol: &Tolerances) -> Line {
    let name = "soliton bound state survives the KdV evolution";
    let start = Instant::now();
    let Some((amp, _speed)) = soliton_parameters(&q(1, 1)) else {
        return failed(9, name, "no soliton parameters for b = 1");
    };
    let amp = amp.to_f64().unwrap_or(f64::NAN);
    let v0 = GridFunction::on_interval(-20.0, 20.0, 0.01, |x| amp / x.cosh().powi(2)).unwrap();
    let t = 0.5;
    let outcome = (|| -> Result<(f64, f64), NumError> {
        let before = bound_states(&v0, 1)?;
        let evolved = kdv_evolve(&v0, t, suggested_steps(&v0, t, Scheme::IntegratingFactor))?;
        let after = bound_states(&evolved, 1)?;
        match (before.eigenvalues.first(), after.eigenvalues.first()) {
            (Some(a), Some(b)) if before.eigenvalues.len() == 1 && after.eigenvalues.len() == 1 => Ok((*a, *b)),
            _ => Err(NumError::InvalidGrid("expected exactly one bound state".into())),
        }
    })();
    match outcome {
        Ok((before, after)) => {
            let drift = (after - before).abs() / before.abs();
            let elapsed = start.elapsed();
            line(
                9,
                name,
                format!("E = {before:.9} -> {after:.9}, relative drift {drift:.3e}, {elapsed:.2?}"),
                format!("< {:e}, < 120 s", tol.isospectral),
                drift < tol.isospectral && elapsed < Duration::from_secs(120),
            )
        }
        Err(e) => failed(9, name, e),
    }
}

fn random_sl2(rng: &mut ChaCha8Rng) -> TransferMatrix {
    loop {
        let mut e = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let m = TransferMatrix::new(e(), e(), e(), e());
        let det = m.det();
        if det.norm() > 0.1 {
            return m.scale(det.sqrt().inv());
        }
    }
}

fn lft_action(tol: &Tolerances) -> Line {
    let name = "Möbius action composes";
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let (t1, t2) = (random_sl2(&mut rng), random_sl2(&mut rng));
        let z = if k % 50 == 0 {
            ExtComplex::Infinity
        } else {
            ExtComplex::Finite(c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
        };
        let lhs = lft_apply(&(t1 * t2), z);
        let rhs = lft_apply(&t1, lft_apply(&t2, z));
        worst = worst.max(lhs.chordal_distance(rhs));
    }
    line(10, name, format!("max chordal distance {worst:.3e} over 1000 pairs"), format!("< {:e}", tol.lft), worst < tol.lft)
}

fn main() -> ExitCode {
    let tol = match Tolerances::default().with_env_scale() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let checks: Vec<Box<dyn Fn(&Tolerances) -> Line>> = vec![
        Box::new(|_| hierarchy_reproduction()),
        Box::new(|_| degree_zero_shift()),
        Box::new(|_| zero_curvature_members()),
        Box::new(|_| kernel_replay()),
        Box::new(obstruction_replay),
        Box::new(remark_check),
        Box::new(transfer_properties),
        Box::new(cocycle_suites),
        Box::new(isospectrality),
        Box::new(lft_action),
    ];
    let mut failures = 0;
    for check in &checks {
        let l = check(&tol);
        if !l.pass {
            failures += 1;
        }
        println!(
            "{} [{:2}] {}: {} (tolerance {})",
            if l.pass { "PASS" } else { "FAIL" },
            l.id,
            l.name,
            l.measured,
            l.tolerance
        );
    }
    println!("{} of {} criteria passed", checks.len() - failures, checks.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
