//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pinvkit_core::circulant::{
    block_pattern_pinv, circ_materialize, circ_pinv_spectral, lemma_alternating_inverse, two_term_pinv,
    zero_sum_shift_pinv, Circulant, TwoTermPath,
};
use pinvkit_core::graphdist::{
    gen_zero_sum_tree, tree_build, tree_pinv, tree_u_and_reconstruction, wheel_build, wheel_pinv, wheel_properties,
    wheel_z_identities,
};
use pinvkit_core::random::{random_matrix, random_repeated_columns, seeded_rng, uniform};
use pinvkit_core::sumdecomp::{
    check_orthogonality, fill_fishkind_pinv, gen_rank_additive_pair, gen_shared_subspace_triple,
    gen_svd_block_family, pinv_sum, OperatorFamily,
};
use pinvkit_core::verify::full_report;
use pinvkit_core::{penrose_residuals, pinv_oracle, Matrix, Tolerance, C64};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_s), || {
        format!("runtime {:.2}s exceeds {limit_s}s", elapsed.as_secs_f64())
    })
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn oracle_self_consistency() -> Outcome {
    let start = Instant::now();
    let tol = Tolerance::default();
    let mut rng = seeded_rng(1001);
    let mut worst = 0.0f64;
    let mut deficient = 0;
    for case in 0..200 {
        let rows = rng.random_range(1..=32);
        let cols = rng.random_range(1..=32);
        let min = rows.min(cols);
        let a = match case % 4 {
            0 => random_matrix(&mut rng, rows, cols),
            1 if min > 1 => {
                let r = rng.random_range(1..min);
                deficient += 1;
                &random_matrix(&mut rng, rows, r) * &random_matrix(&mut rng, r, cols)
            }
            2 if cols > 1 => {
                deficient += 1;
                let rank = rng.random_range(1..cols).min(rows);
                random_repeated_columns(&mut rng, rows, cols, rank)
            }
            3 if case == 3 => {
                deficient += 1;
                Matrix::zeros(rows, cols)
            }
            _ => random_matrix(&mut rng, rows, cols),
        };
        let scaled = tol.scaled_for(&a);
        let x = pinv_oracle(&a, &tol).map_err(|e| format!("case {case}: {e}"))?;
        let report = full_report(&a, &x, &scaled).map_err(|e| format!("case {case}: {e}"))?;
        let rel = report.max_residual() / scaled.residual_abs;
        worst = worst.max(rel);
        ensure(report.all_pass(), || {
            format!("case {case} ({rows}x{cols}) fails: max residual {:.3e}", report.max_residual())
        })?;
    }
    let elapsed = start.elapsed();
    within(elapsed, 30)?;
    Ok(format!(
        "200 matrices ({deficient} rank-deficient), worst residual {:.2e} of bound, {:.2}s",
        worst,
        elapsed.as_secs_f64()
    ))
}

fn sum_theorem() -> Outcome {
    let tol = Tolerance::default();
    let mut rng = seeded_rng(2002);
    let mut worst = 0.0f64;
    for case in 0..50u64 {
        let k = rng.random_range(2..=3);
        let rows = rng.random_range(k..=8);
        let cols = rng.random_range(k..=6);
        let budget = rows.min(cols);
        let mut ranks = vec![1; k];
        let mut spare = rng.random_range(0..=budget - k);
        while spare > 0 {
            ranks[rng.random_range(0..k)] += 1;
            spare -= 1;
        }
        let fam = gen_svd_block_family(3000 + case, rows, cols, &ranks).map_err(|e| e.to_string())?;
        let sum_oracle = pinv_oracle(&fam.sum(), &tol).map_err(|e| e.to_string())?;
        let terms: Vec<Matrix> = fam.members().iter().map(|a| pinv_oracle(a, &tol)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let sum_of = Matrix::sum_all(&terms).expect("nonempty");
        let gap = sum_oracle.distance(&sum_of);
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("family {case}: gap {gap:.3e}"))?;
        let via_api = pinv_sum(&fam, &tol).map_err(|e| format!("family {case}: {e}"))?;
        ensure(via_api.pinv.distance(&sum_of) <= 1e-12, || format!("family {case}: pinv_sum differs"))?;
        for (k0, a) in fam.members().iter().enumerate() {
            let r = penrose_residuals(a, &sum_of, &tol.scaled_for(a)).map_err(|e| e.to_string())?;
            ensure(r.is_134_inverse(), || format!("family {case}: not a {{1,3,4}}-inverse of member {k0}"))?;
        }
    }
    Ok(format!("50 families, worst gap {worst:.2e}"))
}

fn non_necessity() -> Outcome {
    let tol = Tolerance::default();
    let mut worst = 0.0f64;
    let alphas = [c(1.0), c(-2.5), C64::new(0.6, 0.8), C64::new(-1.0, 3.0)];
    for (case, &alpha) in alphas.iter().cycle().take(12).enumerate() {
        let (rows, cols, rank) = [(4, 4, 2), (6, 5, 3), (8, 6, 6)][case % 3];
        let triple = gen_shared_subspace_triple(4000 + case as u64, rows, cols, rank, alpha).map_err(|e| e.to_string())?;
        let fam = OperatorFamily::new(triple.to_vec()).map_err(|e| e.to_string())?;
        let lhs = pinv_oracle(&fam.sum(), &tol).map_err(|e| e.to_string())?;
        let parts: Vec<Matrix> = triple.iter().map(|a| pinv_oracle(a, &tol)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let rhs = Matrix::sum_all(&parts).expect("nonempty");
        let gap = lhs.distance(&rhs);
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("case {case}: gap {gap:.3e}"))?;
        let cert = check_orthogonality(&fam, &tol);
        ensure(!cert.holds, || format!("case {case}: orthogonality unexpectedly holds"))?;
    }
    Ok(format!("12 shared-subspace triples, worst gap {worst:.2e}, orthogonality rejected in all"))
}

struct CircCheck {
    tol: Tolerance,
    worst: f64,
    count: usize,
}

impl CircCheck {
    fn compare(&mut self, label: &str, gen: &[C64], closed: &Circulant) -> Result<(), String> {
        let spectral = circ_pinv_spectral(gen, &self.tol).map_err(|e| format!("{label}: {e}"))?;
        let oracle = pinv_oracle(&circ_materialize(gen), &self.tol).map_err(|e| format!("{label}: {e}"))?;
        let d_spec = closed.max_abs_diff(&spectral);
        let d_orc = closed.materialize().max_abs_diff(&oracle);
        self.worst = self.worst.max(d_spec).max(d_orc);
        self.count += 1;
        ensure(d_spec <= 1e-9 && d_orc <= 1e-9, || {
            format!("{label}: closed form vs spectral {d_spec:.3e}, vs oracle {d_orc:.3e}")
        })
    }
}

fn two_term_generator(alpha: C64, beta: C64, k_pos: usize, n: usize) -> Vec<C64> {
    let mut g = vec![c(0.0); n];
    g[k_pos - 1] = alpha;
    g[k_pos % n] = beta;
    g
}

fn circulant_sweep() -> Outcome {
    let tol = Tolerance::default();
    let mut chk = CircCheck { tol, worst: 0.0, count: 0 };
    let mut rng = seeded_rng(5005);
    for n in 3..=64usize {
        for &alpha in &[c(1.3), C64::new(-0.4, 0.9)] {
            for k_pos in [1, n / 2 + 1, n] {
                let cases: Vec<(C64, TwoTermPath)> = if n % 2 == 0 {
                    vec![(alpha, TwoTermPath::AlternatingNull), (-alpha, TwoTermPath::ConstantNull)]
                } else {
                    vec![(-alpha, TwoTermPath::ConstantNull)]
                };
                for (beta, want_path) in cases {
                    let label = format!("two-term n={n} k={k_pos} α={alpha} β={beta}");
                    let r = two_term_pinv(alpha, beta, k_pos, n, &tol).map_err(|e| format!("{label}: {e}"))?;
                    ensure(r.path == want_path, || format!("{label}: path {:?}", r.path))?;
                    chk.compare(&label, &two_term_generator(alpha, beta, k_pos, n), &r.pinv)?;
                }
            }
        }

        let g: Vec<C64> = (0..n).map(|_| C64::new(uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0))).collect();
        let mean = g.iter().sum::<C64>() / n as f64;
        let centered: Vec<C64> = g.iter().map(|x| x - mean).collect();
        let shifted: Vec<C64> = centered.iter().map(|x| x + c(0.75)).collect();
        let label = format!("mean-removal n={n}");
        let r = zero_sum_shift_pinv(&shifted, None, &tol).map_err(|e| format!("{label}: {e}"))?;
        chk.compare(&label, &shifted, &r)?;
        let label = format!("constant-shift n={n}");
        let r = zero_sum_shift_pinv(&centered, Some(C64::new(0.5, -0.25)), &tol).map_err(|e| format!("{label}: {e}"))?;
        chk.compare(&label, &centered, &r)?;

        for k in 1..n {
            if n % (k + 1) != 0 {
                continue;
            }
            let q = n / (k + 1);
            for (alpha, beta) in [(c(1.5), c(-0.7)), (c(0.0), C64::new(2.0, 1.0)), (c(-3.0), c(0.0))] {
                let label = format!("block n={n} k={k} q={q} α={alpha} β={beta}");
                let r = block_pattern_pinv(alpha, beta, k, q).map_err(|e| format!("{label}: {e}"))?;
                chk.compare(&label, r.matrix.gen(), &r.pinv)?;
            }
        }
    }

    let lemma = lemma_alternating_inverse(4).map_err(|e| e.to_string())?;
    let expect = Circulant::from_real(&[7.0 / 16.0, -3.0 / 16.0, -1.0 / 16.0, 5.0 / 16.0]).map_err(|e| e.to_string())?;
    let base = [c(2.0), c(0.0), c(1.0), c(-1.0)];
    let spectral = circ_pinv_spectral(&base, &tol).map_err(|e| e.to_string())?;
    let ident = (&circ_materialize(&base) * &lemma.materialize()).max_abs_diff(&Matrix::identity(4));
    let chain = lemma.max_abs_diff(&expect).max(spectral.max_abs_diff(&expect)).max(ident);
    ensure(chain <= 1e-12, || format!("n=4 chain off by {chain:.3e}"))?;

    Ok(format!(
        "{} closed-form instances over n=3..64, worst entry gap {:.2e}; n=4 chain {:.1e}",
        chk.count, chk.worst, chain
    ))
}

fn wheel_identities() -> Outcome {
    let start = Instant::now();
    let tol = Tolerance::default();
    for n in (5..=101).step_by(2) {
        let r = wheel_z_identities(n).map_err(|e| e.to_string())?;
        for name in ["column_sums", "circulant_product"] {
            ensure(r.holds(name) == Some(true), || format!("n={n}: {name} fails"))?;
        }
        ensure(r.all_hold(), || format!("n={n}: {r:?}"))?;
    }
    let mut worst = 0.0f64;
    for n in (5..=25).step_by(2) {
        let w = wheel_build(n, &tol).map_err(|e| format!("n={n}: {e}"))?;
        let p = wheel_pinv(&w, &tol).map_err(|e| format!("n={n}: {e}"))?;
        let oracle = pinv_oracle(&w.d, &tol).map_err(|e| e.to_string())?;
        let gap = p.pinv.max_abs_diff(&oracle);
        let proj = &Matrix::identity(n) - &Matrix::outer_real(&w.a, &w.a).scale_real(1.0 / (n - 1) as f64);
        let pgap = (&w.d * &p.pinv).max_abs_diff(&proj);
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("n={n}: closed form vs oracle {gap:.3e}"))?;
        ensure(pgap <= 1e-9, || format!("n={n}: D·D† vs projector {pgap:.3e}"))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, 20)?;
    Ok(format!(
        "exact identities for odd n=5..101; D† vs oracle worst {worst:.2e} for n=5..25; {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn tree_suite() -> Outcome {
    let tol = Tolerance::default().with_residual(1e-8);
    let mut rng = seeded_rng(6006);
    let (mut w_pen, mut w_alpha, mut w_rec, mut w_dl) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for case in 0..100 {
        let n = rng.random_range(3..=20);
        let tree = gen_zero_sum_tree(&mut rng, n).map_err(|e| e.to_string())?;
        let tm = tree_build(&tree).map_err(|e| format!("tree {case}: {e}"))?;
        let dl = tm.dl_identity_residual();
        w_dl = w_dl.max(dl);
        ensure(dl <= 1e-10, || format!("tree {case}: DL identity off by {dl:.3e}"))?;

        let a = tree_pinv(&tree, &tm, None, &tol).map_err(|e| format!("tree {case}: {e}"))?;
        let b = tree_pinv(&tree, &tm, Some(a.alpha * 3.7 + 1.0), &tol).map_err(|e| format!("tree {case}: {e}"))?;
        let pen = penrose_residuals(&tm.d, &a.pinv, &tol).map_err(|e| e.to_string())?;
        w_pen = w_pen.max(pen.max_residual());
        ensure(pen.all_pass(), || format!("tree {case} (n={n}): Penrose max {:.3e}", pen.max_residual()))?;
        let alpha_gap = a.pinv.distance(&b.pinv);
        w_alpha = w_alpha.max(alpha_gap);
        ensure(alpha_gap <= 1e-8, || format!("tree {case}: α gap {alpha_gap:.3e}"))?;

        let u = tree_u_and_reconstruction(&tree, &tm, &tol).map_err(|e| format!("tree {case}: {e}"))?;
        let rec = u.reconstruction.distance(&a.pinv);
        w_rec = w_rec.max(rec);
        ensure(rec <= 1e-8, || format!("tree {case}: reconstruction gap {rec:.3e}"))?;
    }
    Ok(format!(
        "100 trees: Penrose {w_pen:.2e}, α-gap {w_alpha:.2e}, reconstruction {w_rec:.2e}, DL {w_dl:.2e}"
    ))
}

fn wheel_props() -> Outcome {
    let tol = Tolerance::default();
    let mut worst_eig = 0.0f64;
    let mut worst_min = 0.0f64;
    for n in (5..=25).step_by(2) {
        let w = wheel_build(n, &tol).map_err(|e| e.to_string())?;
        let p = wheel_properties(&w, &tol).map_err(|e| format!("n={n}: {e}"))?;
        worst_eig = worst_eig.max(p.eigenvector_residual);
        worst_min = worst_min.min(p.laplacian_min_eig / p.laplacian_norm);
        ensure(p.eigenvector_residual <= 1e-10, || format!("n={n}: eigenvector {:.3e}", p.eigenvector_residual))?;
        ensure(p.laplacian_e_residual <= 1e-9 * p.laplacian_norm.max(1.0), || {
            format!("n={n}: L̃e = {:.3e}", p.laplacian_e_residual)
        })?;
        ensure(p.laplacian_rank == n - 2, || format!("n={n}: rank L̃ = {}", p.laplacian_rank))?;
        ensure(p.laplacian_min_eig >= -1e-9 * p.laplacian_norm, || {
            format!("n={n}: min eigenvalue {:.3e}", p.laplacian_min_eig)
        })?;
        ensure(p.holds, || format!("n={n}: property report {p:?}"))?;
    }
    Ok(format!("n=5..25: eigenvector {worst_eig:.2e}, min eigenvalue / ‖L̃‖ {worst_min:.2e}"))
}

fn fill_fishkind() -> Outcome {
    let tol = Tolerance::default();
    let mut rng = seeded_rng(8008);
    let mut worst = 0.0f64;
    for case in 0..30 {
        let n = rng.random_range(2..=8);
        let r1 = rng.random_range(1..n);
        let r2 = rng.random_range(1..=n - r1);
        let (a1, a2) = gen_rank_additive_pair(&mut rng, n, r1, r2, &tol).map_err(|e| e.to_string())?;
        let x = fill_fishkind_pinv(&a1, &a2, &tol).map_err(|e| format!("pair {case}: {e}"))?;
        let want = pinv_oracle(&(&a1 + &a2), &tol).map_err(|e| e.to_string())?;
        let gap = x.distance(&want);
        worst = worst.max(gap);
        ensure(gap <= 1e-8, || format!("pair {case} (n={n}, ranks {r1}+{r2}): gap {gap:.3e}"))?;
    }
    Ok(format!("30 pairs, worst gap {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle self-consistency", oracle_self_consistency),
        ("sum theorem", sum_theorem),
        ("non-necessity of orthogonality", non_necessity),
        ("circulant sweep", circulant_sweep),
        ("wheel exact identities", wheel_identities),
        ("tree suite", tree_suite),
        ("wheel properties", wheel_props),
        ("rank-additive pairs", fill_fishkind),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.2}s",
        criteria.len() - failed,
        criteria.len(),
        total.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
