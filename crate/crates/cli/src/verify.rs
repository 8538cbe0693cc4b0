//! `verify`: every consistency check for one measure pair, one block index at
//! a time. Blocks run in parallel; checks are sorted before they are printed.

use blockortho::analysis::{
    p_integral_grid, verify_hankel_integral, verify_p_integral, verify_p_symmetrized,
    verify_z_integral, z_integral_grid, zero_report, IntegralCheck,
};
use blockortho::block::{
    build_sbo, relative_inner, sbo_determinant_oracle, sbo_parity_build, SboBasis,
};
use blockortho::measures::moments;
use blockortho::projectors::{projectors_from_q, projectors_from_second};
use blockortho::standard::{build_by_recurrence, build_standard, Normalization};
use blockortho::tolerances::{FLOAT_ORACLE, FLOAT_RESIDUAL};
use blockortho::{Error, Matrix, Polynomial, Rational, Scalar};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::VerifyArgs;
use crate::commands::{pretty, Output};
use crate::config::{resolve_measures, Backend, CliError, CliResult, MeasurePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    pub status: Status,
    /// Worst relative error seen.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn measured(check: &str, i: Option<usize>, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            i,
            status: if residual <= tolerance { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            tolerance: Some(tolerance),
            detail: None,
        }
    }

    fn flag(check: &str, i: Option<usize>, ok: bool, detail: Option<String>) -> Self {
        Self {
            check: check.into(),
            i,
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            tolerance: None,
            detail,
        }
    }

    fn from_error(check: &str, i: Option<usize>, e: &Error) -> Self {
        let status = match e {
            Error::Conditioning { .. } => Status::Skipped,
            _ => Status::Fail,
        };
        Self {
            check: check.into(),
            i,
            status,
            residual: None,
            tolerance: None,
            detail: Some(format!("{}: {e}", e.kind())),
        }
    }

    fn with_detail(mut self, d: String) -> Self {
        self.detail = Some(d);
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Toggles {
    pub integrals: bool,
    pub zeros: bool,
    pub projectors: bool,
}

pub fn verify(args: &VerifyArgs) -> CliResult<Output> {
    let backend = Backend::from(args.backend);
    let pair = resolve_measures(&args.measures, backend)?;
    if args.n == 0 {
        return Err(CliError::Usage("--N must be positive".into()));
    }
    let blocks: Vec<usize> = match args.i {
        Some(i) if i >= args.n => {
            return Err(CliError::Usage(format!("--i {i} must be below --N {}", args.n)))
        }
        Some(i) => vec![i],
        None => (0..args.n).collect(),
    };
    let toggles = Toggles {
        integrals: !args.no_integrals,
        zeros: !args.no_zeros,
        projectors: !args.no_projectors,
    };
    let checks = match backend {
        Backend::Exact => run_checks::<Rational>(&pair, args.n, &blocks, toggles),
        Backend::Float => run_checks::<f64>(&pair, args.n, &blocks, toggles),
    };
    let pass = checks.iter().all(|c| c.status != Status::Fail);
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| c.status == Status::Fail)
        .map(|c| match c.i {
            Some(i) => format!("{} (i = {i})", c.check),
            None => c.check.clone(),
        })
        .collect();
    let v = json!({
        "N": args.n,
        "backend": backend.as_str(),
        "measures": pair.to_json(),
        "pass": pass,
        "failed": failed,
        "checks": checks,
    });
    Ok(Output {
        text: pretty(&v),
        failures: failed,
    })
}

/// Pure in its inputs: the same pair and sizes give the same checks in the
/// same order regardless of scheduling.
pub fn run_checks<T: Scalar>(
    pair: &MeasurePair,
    n_total: usize,
    blocks: &[usize],
    toggles: Toggles,
) -> Vec<Check> {
    let mut checks = standard_checks::<T>(pair, n_total);
    let per_block: Vec<Vec<Check>> = blocks
        .par_iter()
        .map(|&i| block_checks::<T>(pair, n_total, i, toggles))
        .collect();
    checks.extend(per_block.into_iter().flatten());
    checks.sort_by(|a, b| (a.i, &a.check).cmp(&(b.i, &b.check)));
    checks
}

fn tol<T: Scalar>(float_tol: f64) -> f64 {
    if T::is_exact() {
        0.0
    } else {
        float_tol
    }
}

/// `max_k |a_k - b_k| / max_k |b_k|`, zero when both vanish.
fn poly_rel<T: Scalar>(a: &Polynomial<T>, b: &Polynomial<T>) -> f64 {
    if a == b {
        return 0.0;
    }
    let len = a.coeffs().len().max(b.coeffs().len());
    let (pa, pb) = (a.padded(len), b.padded(len));
    let scale = pb.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
    let err = pa
        .iter()
        .zip(&pb)
        .map(|(x, y)| (x.clone() - y.clone()).to_f64().abs())
        .fold(0.0, f64::max);
    if err == 0.0 && !T::is_exact() {
        0.0
    } else {
        err.max(f64::MIN_POSITIVE) / scale.max(f64::MIN_POSITIVE)
    }
}

fn scalar_rel<T: Scalar>(a: &T, b: &T) -> f64 {
    if a == b {
        return 0.0;
    }
    let err = (a.clone() - b.clone()).to_f64().abs().max(f64::MIN_POSITIVE);
    err / b.to_f64().abs().max(f64::MIN_POSITIVE)
}

fn matrix_rel<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> f64 {
    if a == b {
        return 0.0;
    }
    a.sub(b).max_abs().max(f64::MIN_POSITIVE) / b.max_abs().max(1.0)
}

/// A defect of `M M - M`, judged against the size of `M M`.
fn square_defect<T: Scalar>(defect: &Matrix<T>, m: &Matrix<T>, zero: &Matrix<T>) -> f64 {
    matrix_rel(defect, zero) / m.max_abs().powi(2).max(1.0)
}

fn standard_checks<T: Scalar>(pair: &MeasurePair, n_total: usize) -> Vec<Check> {
    let mut out = Vec::new();
    for (label, m) in [("first", &pair.first), ("second", &pair.second)] {
        let name = format!("standard_orthogonality_{label}");
        match build_standard::<T>(m, n_total, Normalization::Monic) {
            Ok(s) => {
                out.push(match s.orthogonality_residual() {
                    Ok(r) => Check::measured(&name, None, r, tol::<T>(FLOAT_RESIDUAL)),
                    Err(e) => Check::from_error(&name, None, &e),
                });
                let rname = format!("three_term_rebuild_{label}");
                out.push(match build_by_recurrence::<T>(m, n_total) {
                    Ok(rebuilt) => {
                        let worst = rebuilt
                            .iter()
                            .enumerate()
                            .map(|(k, p)| poly_rel(p, &s.monic(k)))
                            .fold(0.0, f64::max);
                        Check::measured(&rname, None, worst, tol::<T>(FLOAT_ORACLE))
                    }
                    Err(e) => Check::from_error(&rname, None, &e),
                });
            }
            Err(e) => out.push(Check::from_error(&name, None, &e)),
        }
    }
    out
}

fn block_checks<T: Scalar>(pair: &MeasurePair, n_total: usize, i: usize, t: Toggles) -> Vec<Check> {
    let sbo = match build_sbo::<T>(&pair.first, &pair.second, i, n_total, Normalization::Monic) {
        Ok(s) => s,
        Err(e) => return vec![Check::from_error("build", Some(i), &e)],
    };
    let at = Some(i);
    let mut out = vec![Check::flag("build", at, true, None)];
    out.push(constraint_check(pair, &sbo));
    out.push(match sbo.orthogonality_residual() {
        Ok(r) => Check::measured("block_orthogonality", at, r, tol::<T>(FLOAT_RESIDUAL)),
        Err(e) => Check::from_error("block_orthogonality", at, &e),
    });
    out.push(oracle_check(&sbo));
    out.push(boundary_check(pair, &sbo));
    if pair.first.symmetric() && pair.second.symmetric() {
        out.push(parity_check(pair, &sbo));
    }
    if t.projectors {
        out.push(projector_check(pair, &sbo));
    }
    if t.integrals {
        out.push(integral_check(&sbo));
    }
    if t.zeros {
        out.push(zero_check(&sbo));
    }
    out
}

/// `(x^m, P_{i;n})_1` for `m < i`, under the analytic measure when a moment
/// file replaced it.
fn constraint_check<T: Scalar>(pair: &MeasurePair, sbo: &SboBasis<T>) -> Check {
    let name = "constraint_orthogonality";
    let at = Some(sbo.i);
    let mom = match &pair.reference {
        Some(r) => match moments::<T>(r, 2 * (sbo.n_total - 1)) {
            Ok(m) => m,
            Err(e) => return Check::from_error(name, at, &e),
        },
        None => sbo.q_basis.moments.clone(),
    };
    let mut worst: f64 = 0.0;
    for m in 0..sbo.i {
        let xm = Polynomial::monomial(m);
        for p in &sbo.polys {
            match relative_inner(&mom, &xm, p) {
                Ok(r) => worst = worst.max(r),
                Err(e) => return Check::from_error(name, at, &e),
            }
        }
    }
    Check::measured(name, at, worst, tol::<T>(FLOAT_RESIDUAL))
}

fn oracle_check<T: Scalar>(sbo: &SboBasis<T>) -> Check {
    let name = "determinant_oracle";
    let at = Some(sbo.i);
    let mut worst: f64 = 0.0;
    for n in sbo.i..sbo.n_total {
        let o = match sbo_determinant_oracle(&sbo.q_basis, &sbo.gamma, sbo.i, n) {
            Ok(o) => o,
            Err(e) => return Check::from_error(name, at, &e),
        };
        let c = n - sbo.i;
        worst = worst
            .max(poly_rel(&sbo.p_hat[c], &o.p_hat))
            .max(scalar_rel(&sbo.h_hat[c], &o.h_hat))
            .max(scalar_rel(&sbo.z[c + 1], &o.z));
        for (r, (a, b)) in o.a_hat.iter().zip(&o.b_hat).enumerate() {
            worst = worst
                .max(scalar_rel(&sbo.a_hat[(r, c)], a))
                .max(scalar_rel(&sbo.b_hat[(r, c)], b));
        }
    }
    Check::measured(name, at, worst, tol::<T>(FLOAT_ORACLE))
}

/// `Phat_{i;i} = Qhat_i`, `Phat_{0;n}` is the second measure's monic
/// polynomial, and for symmetric pairs `Phat_{i-1;n} = Phat_{i;n}` when
/// `i + n` is even and `Phat_{1;n}` matches the second measure for odd `n`.
fn boundary_check<T: Scalar>(pair: &MeasurePair, sbo: &SboBasis<T>) -> Check {
    let name = "boundary_identities";
    let at = Some(sbo.i);
    let i = sbo.i;
    let mut worst = poly_rel(&sbo.p_hat[0], &sbo.q_basis.monic(i));
    let symmetric = pair.first.symmetric() && pair.second.symmetric();
    if i <= 1 {
        let q2 = match build_standard::<T>(&pair.second, sbo.n_total, Normalization::Monic) {
            Ok(s) => s,
            Err(e) => return Check::from_error(name, at, &e),
        };
        for n in i..sbo.n_total {
            if i == 0 || (symmetric && n % 2 == 1) {
                worst = worst.max(poly_rel(&sbo.p_hat[n - i], &q2.monic(n)));
            }
        }
    }
    if symmetric && i >= 1 {
        let prev = match build_sbo::<T>(&pair.first, &pair.second, i - 1, sbo.n_total, Normalization::Monic) {
            Ok(s) => s,
            Err(e) => return Check::from_error(name, at, &e),
        };
        for n in (i..sbo.n_total).filter(|n| (i + n).is_multiple_of(2)) {
            worst = worst.max(poly_rel(&prev.p_hat[n - i + 1], &sbo.p_hat[n - i]));
        }
    }
    Check::measured(name, at, worst, tol::<T>(FLOAT_ORACLE))
}

fn parity_check<T: Scalar>(pair: &MeasurePair, sbo: &SboBasis<T>) -> Check {
    let name = "parity_split";
    let at = Some(sbo.i);
    match sbo_parity_build::<T>(&pair.first, &pair.second, sbo.i, sbo.n_total) {
        Ok(split) => {
            let mut worst: f64 = 0.0;
            for (a, b) in split.p_hat.iter().zip(&sbo.p_hat) {
                worst = worst.max(poly_rel(a, b));
            }
            for (a, b) in split.z.iter().zip(&sbo.z) {
                worst = worst.max(scalar_rel(a, b));
            }
            Check::measured(name, at, worst, tol::<T>(FLOAT_ORACLE))
        }
        Err(e) => Check::from_error(name, at, &e),
    }
}

fn projector_check<T: Scalar>(pair: &MeasurePair, sbo: &SboBasis<T>) -> Check {
    let name = "projectors";
    let at = Some(sbo.i);
    let n = sbo.n_total;
    let routes = projectors_from_q(&sbo.q_basis, sbo.i).and_then(|q| {
        projectors_from_second::<T>(&pair.first, &pair.second, sbo.i, n).map(|s| (q, s))
    });
    match routes {
        Ok(((p, c), (p2, c2))) => {
            let zero = Matrix::zeros(n, n);
            let worst = [
                matrix_rel(&p.entries, &p2.entries),
                matrix_rel(&c.entries, &c2.entries),
                square_defect(&p.idempotence_defect(), &p.entries, &zero),
                square_defect(&c.idempotence_defect(), &c.entries, &zero),
                matrix_rel(&p.entries.add(&c.entries), &Matrix::identity(n)),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            Check::measured(name, at, worst, tol::<T>(FLOAT_ORACLE))
        }
        Err(e) => Check::from_error(name, at, &e),
    }
}

/// Integral representations for every degree inside the quadrature caps.
fn integral_check<T: Scalar>(sbo: &SboBasis<T>) -> Check {
    let name = "integral_representations";
    let at = Some(sbo.i);
    let mut results: Vec<IntegralCheck> = Vec::new();
    let mut push = |r: blockortho::Result<Vec<IntegralCheck>>| -> Result<(), Error> {
        match r {
            Ok(v) => {
                results.extend(v);
                Ok(())
            }
            Err(Error::DimensionCap { .. }) => Ok(()),
            Err(e) => Err(e),
        }
    };
    for n in sbo.i..sbo.n_total {
        let z = z_integral_grid(sbo, n).and_then(|g| {
            let mut v = vec![verify_z_integral(sbo, n, &g)?];
            if sbo.i == 0 {
                v.extend(verify_hankel_integral(sbo, n, &g)?);
            }
            Ok(v)
        });
        if let Err(e) = push(z) {
            return Check::from_error(name, at, &e);
        }
        if n == 0 {
            continue;
        }
        let p = p_integral_grid(sbo, n).and_then(|g| {
            let mut v = vec![verify_p_integral(sbo, n, &g)?];
            if sbo.i == 0 {
                let sym = blockortho::quadrature::QuadratureGrid::new(
                    vec![blockortho::quadrature::gauss_rule(&sbo.measure2, n)?; n],
                    "symmetrized",
                );
                v.push(verify_p_symmetrized(sbo, n, &sym)?);
            }
            Ok(v)
        });
        if let Err(e) = push(p) {
            return Check::from_error(name, at, &e);
        }
    }
    if results.is_empty() {
        return Check {
            check: name.into(),
            i: at,
            status: Status::Skipped,
            residual: None,
            tolerance: None,
            detail: Some("outside the quadrature dimension caps".into()),
        };
    }
    let worst = results.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let failing: Vec<String> = results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}({},{})", r.check, r.i, r.n))
        .collect();
    let c = Check::measured(name, at, worst, FLOAT_RESIDUAL);
    let detail = format!("{} integrals", results.len());
    if failing.is_empty() {
        c.with_detail(detail)
    } else {
        c.with_detail(format!("{detail}; failing: {}", failing.join(" ")))
    }
}

fn zero_check<T: Scalar>(sbo: &SboBasis<T>) -> Check {
    let name = "zeros";
    let at = Some(sbo.i);
    let mut bad = Vec::new();
    for n in sbo.i..sbo.n_total {
        match zero_report(sbo, n) {
            Ok(r) if r.satisfies_theorem => {}
            Ok(r) => bad.push(format!("P_{{{};{n}}} has {} sign changes", sbo.i, r.count)),
            Err(e) => return Check::from_error(name, at, &e),
        }
    }
    let ok = bad.is_empty();
    Check::flag(name, at, ok, (!ok).then(|| bad.join("; ")))
}
