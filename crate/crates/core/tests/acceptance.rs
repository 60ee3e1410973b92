//! Acceptance suite: one line per criterion on stdout, then a hard assert.

use std::io::Write;
use std::time::Instant;

use mbverify::catalog::residue::cross_check_residue;
use mbverify::catalog::{build_identity, build_sampled, sample_params, verify, IdentityCase, IdentityId, VerifyOptions};
use mbverify::cli::{run_sweep, ParamSource, RunConfig};
use mbverify::contour::{default_contour, validate, ContourSpec, DEFAULT_MARGIN};
use mbverify::halfplane::{verify_chain_rule, verify_transition_element, HalfPlanePoint};
use mbverify::quadrature::qmc::student_t_975;
use mbverify::quadrature::{Method, QuadratureConfig};
use mbverify::report::{Status, VerificationReport};
use mbverify::Complex64;

mod tol {
    pub const BARNES1: f64 = 1e-8;
    pub const BARNES1_SECONDS: f64 = 1.0;
    pub const RESIDUE: f64 = 1e-8;
    pub const G1_N2: f64 = 1e-6;
    pub const G1_N2_SECONDS: f64 = 60.0;
    pub const G1_N3: f64 = 1e-3;
    pub const G1_N3_SIGMAS: f64 = 3.0;
    pub const G1_N3_SECONDS: f64 = 600.0;
    pub const G2_N1: f64 = 1e-8;
    pub const G2_N2: f64 = 1e-5;
    pub const G3_N1: f64 = 1e-8;
    pub const G3_N2: f64 = 1e-6;
    pub const IW_N1: f64 = 1e-7;
    pub const IW_N2: f64 = 1e-5;
    pub const G2A_N1: f64 = 1e-8;
    pub const S_N1: f64 = 1e-8;
    pub const S3_N2: f64 = 1e-5;
    pub const S5_N1: f64 = 1e-7;
    pub const S2_N2: f64 = 1e-6;
    pub const S2_CONSTANT: f64 = 1e-6;
    pub const SHIFT: f64 = 0.2;
    pub const HALFPLANE: f64 = 1e-5;
}

struct Outcome {
    ok: bool,
    detail: String,
}

struct Check {
    ok: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            self.notes.push(what());
        }
    }

    fn finish(self, summary: String) -> Outcome {
        let detail = if self.notes.is_empty() {
            summary
        } else {
            format!("{summary}; {}", self.notes.join("; "))
        };
        Outcome { ok: self.ok, detail }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn opts(rel_tol: f64) -> VerifyOptions {
    VerifyOptions::with_rel_tol(rel_tol)
}

fn dev(r: &VerificationReport) -> f64 {
    r.rel_deviation.unwrap_or(f64::INFINITY)
}

/// Verify `seeds` draws; each must pass and deviate less than `bound`.
fn draws(check: &mut Check, id: IdentityId, n: usize, seeds: std::ops::Range<u64>, rel_tol: f64, bound: f64, seconds: f64) -> f64 {
    let mut worst = 0.0f64;
    for seed in seeds {
        let case = build_sampled(id, n, seed).unwrap();
        let t = Instant::now();
        let r = verify(&case, &opts(rel_tol)).unwrap();
        let elapsed = t.elapsed().as_secs_f64();
        worst = worst.max(dev(&r));
        check.require(r.status == Status::Pass && dev(&r) < bound, || {
            format!("{id} N={n} seed {seed}: {}", r.summary())
        });
        check.require(elapsed < seconds, || format!("{id} N={n} seed {seed}: {elapsed:.1} s"));
    }
    worst
}

fn criterion_1() -> Outcome {
    let mut check = Check::new();
    let worst = draws(&mut check, IdentityId::Barnes1, 1, 0..20, 1e-10, tol::BARNES1, tol::BARNES1_SECONDS);
    let mut residue_worst = 0.0f64;
    for seed in 0..5 {
        let case = build_sampled(IdentityId::Barnes1, 1, seed).unwrap();
        let r = verify(&case, &opts(1e-10)).unwrap();
        let quad = r.lhs.as_ref().unwrap().value();
        let rhs = r.rhs.value();
        match cross_check_residue(&case) {
            Ok(res) => {
                let d = [
                    ((res.value - rhs) / rhs).norm(),
                    ((res.value - quad) / quad).norm(),
                    ((quad - rhs) / rhs).norm(),
                ]
                .into_iter()
                .fold(0.0f64, f64::max);
                residue_worst = residue_worst.max(d);
                check.require(d < tol::RESIDUE, || format!("residue seed {seed}: {d:e}"));
            }
            Err(e) => check.require(false, || format!("residue seed {seed}: {e}")),
        }
    }
    check.finish(format!("20 draws worst {worst:.2e}; residue 3-way worst {residue_worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let mut check = Check::new();
    let worst2 = draws(&mut check, IdentityId::G1, 2, 0..10, 1e-8, tol::G1_N2, tol::G1_N2_SECONDS);
    let t_factor = student_t_975(15);
    let mut worst3 = 0.0f64;
    let mut worst_sigmas = 0.0f64;
    for seed in 0..3 {
        let case = build_sampled(IdentityId::G1, 3, seed).unwrap();
        let mut o = opts(tol::G1_N3);
        o.quadrature = o.quadrature.with_method(Method::Qmc);
        let t = Instant::now();
        let r = verify(&case, &o).unwrap();
        let elapsed = t.elapsed().as_secs_f64();
        let d = dev(&r);
        // The reported error is a 95% Student-t half width over 16 shifts.
        let se = r.lhs.as_ref().map_or(f64::INFINITY, |l| l.rel_error / t_factor);
        worst3 = worst3.max(d);
        worst_sigmas = worst_sigmas.max(d / se);
        check.require(r.status == Status::Pass && d < tol::G1_N3, || format!("N=3 seed {seed}: {}", r.summary()));
        check.require(d <= tol::G1_N3_SIGMAS * se, || format!("N=3 seed {seed}: {d:.2e} is {:.1} standard errors", d / se));
        check.require(elapsed < tol::G1_N3_SECONDS, || format!("N=3 seed {seed}: {elapsed:.1} s"));
    }
    check.finish(format!(
        "N=2 worst {worst2:.2e}; N=3 qmc worst {worst3:.2e} ({worst_sigmas:.2} standard errors)"
    ))
}

fn criterion_3() -> Outcome {
    let mut check = Check::new();
    let worst1 = draws(&mut check, IdentityId::G2, 1, 0..10, 1e-10, tol::G2_N1, f64::INFINITY);
    let mut worst2 = 0.0f64;
    let mut worst_cross = 0.0f64;
    for seed in 0..5 {
        let case = build_sampled(IdentityId::G2, 2, seed).unwrap();
        let mut tensor = opts(1e-7);
        tensor.quadrature = tensor.quadrature.with_method(Method::Tensor);
        let rt = verify(&case, &tensor).unwrap();
        worst2 = worst2.max(dev(&rt));
        check.require(rt.status == Status::Pass && dev(&rt) < tol::G2_N2, || format!("seed {seed}: {}", rt.summary()));
        let mut qmc = opts(1e-3);
        qmc.quadrature = qmc.quadrature.with_method(Method::Qmc);
        let rq = verify(&case, &qmc).unwrap();
        let (lt, lq) = (rt.lhs.unwrap(), rq.lhs.unwrap());
        let d = ((lq.value() - lt.value()) / lt.value()).norm();
        worst_cross = worst_cross.max(d / (lt.rel_error + lq.rel_error));
        check.require(d <= lt.rel_error + lq.rel_error, || {
            format!("seed {seed}: qmc vs tensor {d:.2e} > {:.2e}", lt.rel_error + lq.rel_error)
        });
    }
    check.finish(format!(
        "N=1 worst {worst1:.2e}; N=2 tensor worst {worst2:.2e}; qmc/tensor gap at most {worst_cross:.2} of combined error"
    ))
}

fn params(pairs: &[(&str, Vec<Complex64>)]) -> mbverify::catalog::ParamMap {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn criterion_4() -> Outcome {
    let mut check = Check::new();
    let mut worst1 = 0.0f64;
    for seed in 0..10 {
        let g3 = build_sampled(IdentityId::G3, 1, seed).unwrap();
        let b = g3.params["beta"][0];
        let g1 = build_identity(
            IdentityId::G1,
            1,
            params(&[("alpha", g3.params["alpha"].clone()), ("beta", vec![b, -b])]),
        )
        .unwrap();
        check.require(
            g3.lhs.same_factors(&g1.lhs, 0.0)
                && g3.lhs.symmetry_divisor == g1.lhs.symmetry_divisor
                && g3.lhs.log_prefactor == g1.lhs.log_prefactor,
            || format!("seed {seed}: g3 N=1 integrand differs from g1"),
        );
        let r = verify(&g3, &opts(1e-10)).unwrap();
        worst1 = worst1.max(dev(&r));
        check.require(r.status == Status::Pass && dev(&r) < tol::G3_N1, || format!("N=1 seed {seed}: {}", r.summary()));
    }
    let worst2 = draws(&mut check, IdentityId::G3, 2, 0..5, 1e-8, tol::G3_N2, f64::INFINITY);
    check.finish(format!("structural match 10/10 checked; N=1 worst {worst1:.2e}; N=2 worst {worst2:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut check = Check::new();
    let mut worst = [0.0f64; 2];
    for (k, n) in [1usize, 2].into_iter().enumerate() {
        let bound = if n == 1 { tol::IW_N1 } else { tol::IW_N2 };
        for zeta in [0.5, 1.0, 2.0] {
            for seed in 0..2 {
                let mut p = sample_params(IdentityId::Iw, n, seed).unwrap();
                p.insert("zeta".into(), vec![c(zeta, 0.0)]);
                let case = build_identity(IdentityId::Iw, n, p).unwrap();
                let r = verify(&case, &opts(if n == 1 { 1e-10 } else { 1e-8 })).unwrap();
                worst[k] = worst[k].max(dev(&r));
                check.require(r.status == Status::Pass && dev(&r) < bound, || {
                    format!("N={n} zeta={zeta} seed {seed}: {}", r.summary())
                });
            }
        }
    }
    check.finish(format!("N=1 worst {:.2e}; N=2 worst {:.2e}", worst[0], worst[1]))
}

fn criterion_6() -> Outcome {
    let mut check = Check::new();
    let worst = draws(&mut check, IdentityId::G2a, 1, 0..10, 1e-10, tol::G2A_N1, f64::INFINITY);
    check.finish(format!("10 draws worst {worst:.2e}"))
}

fn criterion_7() -> Outcome {
    let mut check = Check::new();
    let mut parts = Vec::new();
    for id in [IdentityId::S1, IdentityId::S3, IdentityId::S4] {
        let w = draws(&mut check, id, 1, 0..10, 1e-10, tol::S_N1, f64::INFINITY);
        parts.push(format!("{id} {w:.1e}"));
    }
    let w = draws(&mut check, IdentityId::S3, 2, 0..3, 1e-7, tol::S3_N2, f64::INFINITY);
    parts.push(format!("s3 N=2 {w:.1e}"));
    let w = draws(&mut check, IdentityId::S5, 1, 0..3, 1e-8, tol::S5_N1, f64::INFINITY);
    parts.push(format!("s5 {w:.1e}"));
    let case = build_sampled(IdentityId::S2, 2, 0).unwrap();
    let r = verify(&case, &opts(1e-8)).unwrap();
    check.require(r.status == Status::Pass && dev(&r) < tol::S2_N2, || format!("s2: {}", r.summary()));
    let fitted = r.fitted_normalization.unwrap_or([f64::NAN, f64::NAN]);
    let off = (c(fitted[0], fitted[1]) - 1.0).norm();
    check.require(off < tol::S2_CONSTANT, || format!("s2 fitted constant {fitted:?}"));
    parts.push(format!("s2 N=2 {:.1e} constant ({:.12}, {:.1e})", dev(&r), fitted[0], fitted[1]));
    check.finish(parts.join("; "))
}

fn shifted_pair(case: &IdentityCase, rel_tol: f64) -> Option<(f64, f64)> {
    let base = default_contour(&case.lhs, DEFAULT_MARGIN).ok()?;
    let moved = ContourSpec::new(base.offsets.iter().map(|o| o + tol::SHIFT).collect(), DEFAULT_MARGIN);
    if !validate(&case.lhs, &moved).ok()?.passed() {
        return None;
    }
    let mut a = opts(rel_tol);
    a.contour = Some(base);
    let mut b = opts(rel_tol);
    b.contour = Some(moved);
    let ra = verify(case, &a).unwrap();
    let rb = verify(case, &b).unwrap();
    let (la, lb) = (ra.lhs.unwrap(), rb.lhs.unwrap());
    let d = ((la.value() - lb.value()) / lb.value()).norm();
    Some((d, la.rel_error + lb.rel_error))
}

fn criterion_8() -> Outcome {
    let mut check = Check::new();
    let mut done = 0;
    let mut worst_ratio = 0.0f64;
    for (id, n, rel_tol) in [(IdentityId::Barnes1, 1, 1e-10), (IdentityId::G1, 2, 1e-8)] {
        let mut count = 0;
        let mut seed = 0;
        while count < 5 && seed < 200 {
            let case = build_sampled(id, n, seed).unwrap();
            if let Some((d, err)) = shifted_pair(&case, rel_tol) {
                worst_ratio = worst_ratio.max(d / err);
                check.require(d <= err, || format!("{id} seed {seed}: {d:.2e} > {err:.2e}"));
                count += 1;
            }
            seed += 1;
        }
        check.require(count == 5, || format!("{id}: only {count} draws admit the shift"));
        done += count;
    }
    check.finish(format!("{done} cases shifted by +{}; change at most {worst_ratio:.2} of combined error", tol::SHIFT))
}

fn point(re: f64, im: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(re, im).unwrap()
}

fn criterion_9() -> Outcome {
    let mut check = Check::new();
    let cfg = QuadratureConfig::default().with_rel_tol(1e-8);
    let chain = [
        (1.0, c(1.5, 0.0), c(1.5, 0.0), point(0.0, 1.0), point(0.0, 1.0)),
        (1.0, c(2.0, 0.0), c(1.7, 0.0), point(0.4, 0.8), point(-0.3, 1.2)),
        (1.25, c(1.9, 0.0), c(1.8, 0.0), point(0.3, 0.9), point(-0.2, 1.4)),
        (0.8, c(1.1, 0.3), c(0.9, -0.2), point(-0.5, 0.6), point(0.6, 1.1)),
        (1.5, c(1.7, -0.4), c(2.1, 0.5), point(1.0, 2.0), point(0.1, 0.5)),
    ];
    let mut worst_chain = 0.0f64;
    for (k, &(s, a, b, z, w)) in chain.iter().enumerate() {
        let r = verify_chain_rule(s, a, b, z, w, &cfg).unwrap();
        worst_chain = worst_chain.max(dev(&r));
        check.require(r.status == Status::Pass && dev(&r) < tol::HALFPLANE, || format!("chain set {k}: {}", r.summary()));
    }
    let transition = [(1.0, 0.0, 1.0), (1.0, 0.4, 2.0), (1.5, -0.3, 0.7), (0.8, 0.2, 1.3), (2.0, 1.0, 0.5)];
    let mut worst_tr = 0.0f64;
    for (k, &(s, nu, p)) in transition.iter().enumerate() {
        let r = verify_transition_element(s, nu, p, &cfg).unwrap();
        worst_tr = worst_tr.max(dev(&r));
        check.require(r.status == Status::Pass && dev(&r) < tol::HALFPLANE, || format!("transition set {k}: {}", r.summary()));
    }
    let mut worst_shift = 0.0f64;
    for &(s, a, b, z, w) in &chain[..3] {
        for t in [-1.3, 0.7] {
            let x = verify_chain_rule(s, a, b, z, w, &cfg).unwrap().lhs.unwrap();
            let y = verify_chain_rule(s, a, b, z.translate(t), w.translate(t), &cfg).unwrap().lhs.unwrap();
            let d = (x.value() / y.value() - 1.0).norm();
            worst_shift = worst_shift.max(d / (x.rel_error + y.rel_error));
            check.require(d <= x.rel_error + y.rel_error, || format!("translation by {t}: {d:.2e}"));
        }
    }
    check.finish(format!(
        "chain worst {worst_chain:.2e}; transition worst {worst_tr:.2e}; translation at most {worst_shift:.2} of error"
    ))
}

fn criterion_10() -> Outcome {
    let mut check = Check::new();
    let samples = [(IdentityId::G1, 2, 7), (IdentityId::Barnes1, 1, 3), (IdentityId::S2, 2, 1)];
    for (id, n, seed) in samples {
        let case = build_sampled(id, n, seed).unwrap();
        let a = verify(&case, &opts(1e-6)).unwrap().stable_json();
        let b = verify(&build_sampled(id, n, seed).unwrap(), &opts(1e-6)).unwrap().stable_json();
        check.require(a == b, || format!("{id} seed {seed}: repeated runs differ"));
    }
    let sweep = RunConfig {
        command: "sweep".into(),
        identity: "g1".into(),
        n: 2,
        source: ParamSource::Sweep { seed: 11, trials: 4 },
        method: Method::Auto,
        rel_tol: 1e-6,
        qmc_points: 1 << 12,
        offsets: None,
        margin: DEFAULT_MARGIN,
    };
    let mut qmc = sweep.clone();
    qmc.method = Method::Qmc;
    qmc.n = 3;
    qmc.rel_tol = 1e-2;
    for cfg in [sweep, qmc] {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let mut rep = pool.install(|| run_sweep(&cfg)).unwrap();
            for e in &mut rep.entries {
                e.report.runtime_s = 0.0;
            }
            serde_json::to_string(&rep).unwrap()
        };
        let single = run(1);
        let multi = run(4);
        check.require(single == multi, || format!("{:?} sweep differs between 1 and 4 workers", cfg.method));
    }
    check.finish("repeated runs identical; 1 vs 4 workers bit-identical".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("barnes1 first lemma, residue oracle", criterion_1),
        ("g1 at N=2 tensor, N=3 qmc", criterion_2),
        ("g2 at N=1, N=2 with qmc cross-check", criterion_3),
        ("g3 reduces to g1 at N=1, N=2 draws", criterion_4),
        ("iw for zeta in {0.5, 1, 2}", criterion_5),
        ("g2a at N=1", criterion_6),
        ("s1..s5 suite", criterion_7),
        ("contour shift invariance", criterion_8),
        ("half-plane chain rule and transition element", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    writeln!(out).unwrap();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let line = format!(
            "[{}] criterion {:>2}: {name} ({:.1} s): {}",
            if o.ok { "PASS" } else { "FAIL" },
            k + 1,
            t.elapsed().as_secs_f64(),
            o.detail
        );
        writeln!(out, "{line}").unwrap();
        out.flush().unwrap();
        if !o.ok {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
