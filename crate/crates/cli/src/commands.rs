use std::path::{Path, PathBuf};

use pinvkit_core::circulant::{
    block_pattern_pinv, circ_materialize, circ_pinv_spectral, circ_spectrum, two_term_pinv, zero_sum_shift_pinv,
};
use pinvkit_core::graphdist::{
    gen_zero_sum_tree, tree_build, tree_pinv, tree_u_and_reconstruction, wheel_build, wheel_pinv, wheel_properties,
    wheel_z_identities,
};
use pinvkit_core::io::{
    circulant_from_json, circulant_to_json, format_complex, matrix_from_str, matrix_to_json, parse_generator,
    tree_from_csv, tree_to_csv,
};
use pinvkit_core::random::{random_matrix, seeded_rng};
use pinvkit_core::sumdecomp::{
    check_orthogonality, check_rank_additivity, completion_pinv_pair, gen_rank_additive_pair, gen_svd_block_family,
    pinv_sum, rank_completion_pinv, Completion, PairMode,
};
use pinvkit_core::verify::full_report;
use pinvkit_core::{penrose_residuals, pinv_normal_equations, pinv_oracle, svd, Matrix, Tolerance, C64};
use serde_json::{json, Value};

use crate::files::{read_text, write_atomic};
use crate::report::RunReport;
use crate::{CircMethod, Cli, CliError, Command, GenKind, PinvMethod};

/// A finished command: its report plus the serialized result, if any.
pub struct Outcome {
    pub report: RunReport,
    pub product: Option<String>,
}

pub fn dispatch(cli: &Cli, tol: &Tolerance) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Pinv { input, method, aux } => pinv(input, *method, aux.as_deref(), tol),
        Command::Circ {
            gen,
            input,
            method,
            alpha,
            beta,
            k,
            q,
            n,
            materialize,
        } => {
            let args = CircArgs {
                alpha: *alpha,
                beta: *beta,
                k: *k,
                q: *q,
                n: *n,
            };
            circ(gen.as_deref(), input.as_deref(), *method, &args, *materialize, tol)
        }
        Command::Tree { input, alpha } => tree(input, *alpha, tol),
        Command::Wheel { n } => wheel(*n, tol),
        Command::Verify { input, aux } => verify(input, aux, tol),
        Command::Gen {
            kind,
            seed,
            k,
            rows,
            cols,
            n,
            ranks,
            rank,
        } => {
            let dir = cli
                .output
                .as_ref()
                .ok_or_else(|| CliError::Parse("gen needs --output DIR".into()))?;
            let args = GenArgs {
                seed: *seed,
                k: *k,
                rows: *rows,
                cols: *cols,
                n: *n,
                ranks: ranks.clone(),
                rank: *rank,
            };
            gen(*kind, dir, &args, tol)
        }
    }
}

fn load_matrix(path: &Path, report: &mut RunReport) -> Result<Matrix, CliError> {
    let text = read_text(path, &mut report.inputs)?;
    Ok(matrix_from_str(&text)?)
}

fn pinv(input: &Path, method: PinvMethod, aux: Option<&Path>, tol: &Tolerance) -> Result<Outcome, CliError> {
    let mut report = RunReport::new("pinv", method_name(method));
    let a = load_matrix(input, &mut report)?;
    let x = match method {
        PinvMethod::Svd => pinv_oracle(&a, tol)?,
        PinvMethod::Normal => pinv_normal_equations(&a, tol)?,
        PinvMethod::RankCompletion => {
            let r = rank_completion_pinv(&a, &Completion::Auto, tol)?;
            report.detail("path", json!(format!("{:?}", r.path)));
            r.pinv
        }
        PinvMethod::Pair => {
            let aux = aux.ok_or_else(|| CliError::Precondition("--method pair needs --aux B".into()))?;
            let b = load_matrix(aux, &mut report)?;
            completion_pinv_pair(&a, &b, PairMode::Gram, tol)?.pinv
        }
    };
    report.rank = Some(svd(&a, tol)?.rank);
    report.verify(penrose_residuals(&a, &x, &tol.scaled_for(&a))?);
    Ok(Outcome {
        report,
        product: Some(matrix_to_json(&x)),
    })
}

fn method_name(m: PinvMethod) -> &'static str {
    match m {
        PinvMethod::Svd => "svd",
        PinvMethod::Normal => "normal",
        PinvMethod::RankCompletion => "rank-completion",
        PinvMethod::Pair => "pair",
    }
}

struct CircArgs {
    alpha: Option<C64>,
    beta: Option<C64>,
    k: Option<usize>,
    q: Option<usize>,
    n: Option<usize>,
}

fn need<T: Copy>(v: Option<T>, what: &str, method: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Precondition(format!("--method {method} needs --{what}")))
}

/// Reads `α` and `β` off a generator with exactly two cyclically adjacent
/// nonzeros; returns `(α, β, one-based position of α)`.
fn two_term_shape(gen: &[C64]) -> Result<(C64, C64, usize), CliError> {
    let n = gen.len();
    let zero = C64::new(0.0, 0.0);
    let nonzero = gen.iter().filter(|z| **z != zero).count();
    let start = (0..n).find(|&p| gen[p] != zero && gen[(p + 1) % n] != zero);
    match start {
        Some(p) if nonzero == 2 && n >= 2 => Ok((gen[p], gen[(p + 1) % n], p + 1)),
        _ => Err(CliError::Precondition(
            "two-term generator must have exactly two cyclically adjacent nonzeros".into(),
        )),
    }
}

fn circ(
    gen: Option<&str>,
    input: Option<&Path>,
    method: CircMethod,
    args: &CircArgs,
    materialize: bool,
    tol: &Tolerance,
) -> Result<Outcome, CliError> {
    let name = match method {
        CircMethod::Spectral => "spectral",
        CircMethod::TwoTerm => "two-term",
        CircMethod::ZeroSum => "zero-sum",
        CircMethod::Block => "block",
    };
    let mut report = RunReport::new("circ", name);
    let given: Option<Vec<C64>> = match (gen, input) {
        (Some(_), Some(_)) => return Err(CliError::Parse("give --gen or --input, not both".into())),
        (Some(s), None) => Some(parse_generator(s)?),
        (None, Some(path)) => {
            let text = read_text(path, &mut report.inputs)?;
            if text.trim_start().starts_with('{') {
                Some(circulant_from_json(&text)?.into_gen())
            } else {
                Some(parse_generator(text.trim())?)
            }
        }
        (None, None) => None,
    };
    let require_gen = |g: &Option<Vec<C64>>| -> Result<Vec<C64>, CliError> {
        g.clone()
            .ok_or_else(|| CliError::Parse(format!("--method {name} needs --gen or --input")))
    };

    let (c, x) = match method {
        CircMethod::Spectral => {
            let c = require_gen(&given)?;
            let x = circ_pinv_spectral(&c, tol)?.into_gen();
            (c, x)
        }
        CircMethod::TwoTerm => {
            let (alpha, beta, k, n) = match &given {
                Some(c) => {
                    let (a, b, k) = two_term_shape(c)?;
                    (a, b, k, c.len())
                }
                None => (
                    need(args.alpha, "alpha", name)?,
                    need(args.beta, "beta", name)?,
                    need(args.k, "k", name)?,
                    need(args.n, "n", name)?,
                ),
            };
            let r = two_term_pinv(alpha, beta, k, n, tol)?;
            report.detail("path", json!(format!("{:?}", r.path)));
            report.detail("alpha", json!(format_complex(alpha)));
            report.detail("beta", json!(format_complex(beta)));
            report.detail("k", json!(k));
            let mut c = vec![C64::new(0.0, 0.0); n];
            c[(k - 1) % n] = alpha;
            c[k % n] = beta;
            (c, r.pinv.into_gen())
        }
        CircMethod::ZeroSum => {
            let c = require_gen(&given)?;
            let x = zero_sum_shift_pinv(&c, args.alpha, tol)?.into_gen();
            (c, x)
        }
        CircMethod::Block => {
            if given.is_some() {
                return Err(CliError::Parse("--method block is built from --alpha --beta --k --q".into()));
            }
            let r = block_pattern_pinv(
                need(args.alpha, "alpha", name)?,
                need(args.beta, "beta", name)?,
                need(args.k, "k", name)?,
                need(args.q, "q", name)?,
            )?;
            (r.matrix.into_gen(), r.pinv.into_gen())
        }
    };

    let a = circ_materialize(&c);
    let xm = circ_materialize(&x);
    let spectrum = circ_spectrum(&c, tol);
    report.rank = Some(spectrum.support.len());
    report.detail("n", json!(c.len()));
    report.detail("support", json!(spectrum.support));
    report.detail("generator", json!(c.iter().map(|z| format_complex(*z)).collect::<Vec<_>>()));
    report.verify(penrose_residuals(&a, &xm, &tol.scaled_for(&a))?);
    let product = if materialize { matrix_to_json(&xm) } else { circulant_to_json(&x) };
    Ok(Outcome {
        report,
        product: Some(product),
    })
}

fn reals(v: &[f64]) -> Value {
    json!(v)
}

fn tree(input: &Path, alpha: Option<f64>, tol: &Tolerance) -> Result<Outcome, CliError> {
    let mut report = RunReport::new("tree", if alpha.is_some() { "given-alpha" } else { "auto-alpha" });
    let text = read_text(input, &mut report.inputs)?;
    let t = tree_from_csv(&text)?;
    let tm = tree_build(&t)?;
    let r = tree_pinv(&t, &tm, alpha, tol)?;
    let u = tree_u_and_reconstruction(&t, &tm, tol)?;
    report.rank = Some(svd(&tm.d, tol)?.rank);
    report.detail("n", json!(t.n()));
    report.detail("alpha", json!(r.alpha));
    report.detail("tau", reals(&tm.tau));
    report.detail("tau_l_tau", json!(tm.tau_l_tau()));
    report.detail("dl_identity_residual", json!(tm.dl_identity_residual()));
    report.detail("path_gap", json!(r.path_gap));
    report.detail("u_hat", reals(&u.u_hat));
    report.detail("reconstruction_gap", json!(u.reconstruction_gap));
    report.detail("u", reals(&u.u));
    report.detail("u_reconstruction_gap", json!(u.u_reconstruction_gap));
    report.verify(penrose_residuals(&tm.d, &r.pinv, &tol.scaled_for(&tm.d))?);
    Ok(Outcome {
        report,
        product: Some(matrix_to_json(&r.pinv)),
    })
}

fn wheel(n: usize, tol: &Tolerance) -> Result<Outcome, CliError> {
    let mut report = RunReport::new("wheel", "closed-form");
    let w = wheel_build(n, tol)?;
    let p = wheel_pinv(&w, tol)?;
    let ids = wheel_z_identities(n)?;
    let props = wheel_properties(&w, tol)?;
    report.rank = Some(n - 1);
    let as_i64 = |v: &[i128]| -> Vec<i64> { v.iter().map(|&x| x as i64).collect() };
    report.detail("z24", json!(as_i64(&w.z24)));
    report.detail("inverse_residual", json!(p.inverse_residual));
    report.detail(
        "z_identities",
        serde_json::to_value(&ids).map_err(|e| CliError::Residual(e.to_string()))?,
    );
    report.detail(
        "properties",
        serde_json::to_value(&props).map_err(|e| CliError::Residual(e.to_string()))?,
    );
    report.verify(penrose_residuals(&w.d, &p.pinv, &tol.scaled_for(&w.d))?);
    report.pass &= ids.all_hold() && props.holds;
    Ok(Outcome {
        report,
        product: Some(matrix_to_json(&p.pinv)),
    })
}

fn verify(input: &Path, aux: &Path, tol: &Tolerance) -> Result<Outcome, CliError> {
    let mut report = RunReport::new("verify", "penrose+characterization");
    let a = load_matrix(input, &mut report)?;
    let x = load_matrix(aux, &mut report)?;
    report.rank = Some(svd(&a, tol)?.rank);
    let r = full_report(&a, &x, &tol.scaled_for(&a))?;
    report.detail("is_134_inverse", json!(r.is_134_inverse()));
    report.verify(r);
    Ok(Outcome { report, product: None })
}

struct GenArgs {
    seed: u64,
    k: Option<usize>,
    rows: Option<usize>,
    cols: Option<usize>,
    n: Option<usize>,
    ranks: Vec<usize>,
    rank: Option<usize>,
}

fn gen(kind: GenKind, dir: &Path, args: &GenArgs, tol: &Tolerance) -> Result<Outcome, CliError> {
    let name = match kind {
        GenKind::SumFamily => "sum-family",
        GenKind::ZeroSumTree => "zero-sum-tree",
        GenKind::RankAdditivePair => "rank-additive-pair",
        GenKind::RandomMatrix => "random-matrix",
    };
    let mut report = RunReport::new("gen", name);
    report.detail("seed", json!(args.seed));
    let path = |file: &str| -> PathBuf { dir.join(file) };
    match kind {
        GenKind::SumFamily => {
            let rows = args.rows.unwrap_or(6);
            let cols = args.cols.unwrap_or(5);
            let ranks = if args.ranks.is_empty() {
                let k = args.k.unwrap_or(2).max(1);
                vec![(rows.min(cols) / k).max(1); k]
            } else {
                if args.k.is_some_and(|k| k != args.ranks.len()) {
                    return Err(CliError::Parse("--k disagrees with the length of --ranks".into()));
                }
                args.ranks.clone()
            };
            let fam = gen_svd_block_family(args.seed, rows, cols, &ranks)?;
            let cert = check_orthogonality(&fam, tol);
            let terms = pinv_sum(&fam, tol)?;
            let sum = fam.sum();
            report.rank = Some(svd(&sum, tol)?.rank);
            report.verify(penrose_residuals(&sum, &terms.pinv, &tol.scaled_for(&sum))?);
            report.pass &= cert.holds;
            report.detail("ranks", json!(ranks));
            report.detail(
                "certificate",
                serde_json::to_value(&cert).map_err(|e| CliError::Residual(e.to_string()))?,
            );
            for (j, a) in fam.members().iter().enumerate() {
                write_atomic(&path(&format!("A{}.json", j + 1)), &matrix_to_json(a), &mut report.outputs)?;
            }
        }
        GenKind::ZeroSumTree => {
            let n = args.n.unwrap_or(8);
            let t = gen_zero_sum_tree(&mut seeded_rng(args.seed), n)?;
            let tm = tree_build(&t)?;
            let r = tree_pinv(&t, &tm, None, tol)?;
            report.rank = Some(svd(&tm.d, tol)?.rank);
            report.verify(r.report);
            report.detail("n", json!(n));
            report.detail("weight_sum", json!(t.weight_sum()));
            write_atomic(&path("tree.csv"), &tree_to_csv(&t), &mut report.outputs)?;
        }
        GenKind::RankAdditivePair => {
            let n = args.n.unwrap_or(6);
            let (r1, r2) = match args.ranks.as_slice() {
                [] => ((n / 3).max(1), (n / 3).max(1)),
                [a, b] => (*a, *b),
                _ => return Err(CliError::Parse("rank-additive-pair takes --ranks r1,r2".into())),
            };
            let (a1, a2) = gen_rank_additive_pair(&mut seeded_rng(args.seed), n, r1, r2, tol)?;
            check_rank_additivity(&a1, &a2, tol)?;
            let sum = &a1 + &a2;
            report.rank = Some(svd(&sum, tol)?.rank);
            report.detail("ranks", json!([r1, r2]));
            write_atomic(&path("A1.json"), &matrix_to_json(&a1), &mut report.outputs)?;
            write_atomic(&path("A2.json"), &matrix_to_json(&a2), &mut report.outputs)?;
        }
        GenKind::RandomMatrix => {
            let rows = args.rows.unwrap_or(4);
            let cols = args.cols.unwrap_or(4);
            let mut rng = seeded_rng(args.seed);
            let a = match args.rank {
                Some(r) if r == 0 || r > rows.min(cols) => {
                    return Err(CliError::Precondition(format!("--rank must lie in 1..={}", rows.min(cols))))
                }
                Some(r) => &random_matrix(&mut rng, rows, r) * &random_matrix(&mut rng, r, cols),
                None => random_matrix(&mut rng, rows, cols),
            };
            report.rank = Some(svd(&a, tol)?.rank);
            write_atomic(&path("A.json"), &matrix_to_json(&a), &mut report.outputs)?;
        }
    }
    Ok(Outcome { report, product: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn two_term_shape_wraps_around() {
        assert_eq!(two_term_shape(&[c(1.0), c(0.0), c(2.0)]).unwrap(), (c(2.0), c(1.0), 3));
        assert_eq!(two_term_shape(&[c(0.0), c(3.0), c(4.0), c(0.0)]).unwrap(), (c(3.0), c(4.0), 2));
        assert!(two_term_shape(&[c(1.0), c(0.0), c(1.0), c(0.0)]).is_err());
        assert!(two_term_shape(&[c(1.0), c(1.0), c(1.0)]).is_err());
    }
}
