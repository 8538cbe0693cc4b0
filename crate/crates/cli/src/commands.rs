use std::fs;

use blockortho::analysis::zero_report;
use blockortho::block::build_sbo;
use blockortho::measures::moments;
use blockortho::multiblock::{gamma_three_subspace, gamma_three_subspace_even12};
use blockortho::projectors::{projectors_from_q, projectors_from_second, ProjectorMatrix};
use blockortho::scalar::parse_rational;
use blockortho::standard::{build_standard, Normalization};
use blockortho::{Matrix, Measure, Rational, Scalar};
use serde_json::{json, Map, Value};

use crate::args::{MomentsArgs, ProjectorArgs, Route, RootsArgs, TableArgs, ThreeSubspaceArgs};
use crate::config::{resolve_measures, Backend, CliError, CliResult, MeasurePair};

/// What a command prints on stdout, and whether its checks held.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    /// Names of the checks that failed; empty on success.
    pub failures: Vec<String>,
}

impl Output {
    fn ok(v: &Value) -> Self {
        Self {
            text: pretty(v),
            failures: Vec::new(),
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn check_indices(i: usize, n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("--N must be positive".into()));
    }
    if i >= n {
        return Err(CliError::Usage(format!("--i {i} must be below --N {n}")));
    }
    Ok(())
}

pub fn table(args: &TableArgs) -> CliResult<Output> {
    let backend = Backend::from(args.backend);
    let pair = resolve_measures(&args.measures, backend)?;
    let norm = Normalization::parse(&args.normalization)?;
    let blocks: Vec<usize> = match args.i {
        Some(i) => {
            check_indices(i, args.n)?;
            vec![i]
        }
        None => {
            check_indices(0, args.n)?;
            (0..args.n).collect()
        }
    };
    let text = match backend {
        Backend::Exact => table_with::<Rational>(args, &pair, norm, &blocks)?,
        Backend::Float => table_with::<f64>(args, &pair, norm, &blocks)?,
    };
    match &args.output {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(Output::ok(&json!({"written": path.display().to_string()})))
        }
        None => Ok(Output { text, failures: Vec::new() }),
    }
}

fn table_with<T: Scalar>(
    args: &TableArgs,
    pair: &MeasurePair,
    norm: Normalization,
    blocks: &[usize],
) -> CliResult<String> {
    let n_total = args.n;
    let mut out = Vec::new();
    for &i in blocks {
        out.push(build_sbo::<T>(&pair.first, &pair.second, i, n_total, norm)?);
    }
    if args.csv {
        let mut s = String::from("i,n,H");
        for d in 0..n_total {
            s.push_str(&format!(",c{d}"));
        }
        s.push('\n');
        for sbo in &out {
            for (k, p) in sbo.polys.iter().enumerate() {
                let mut row = vec![sbo.i.to_string(), (sbo.i + k).to_string(), sbo.h[k].to_string()];
                row.extend(p.padded(n_total).iter().map(|c| c.to_string()));
                s.push_str(&row.join(","));
                s.push('\n');
            }
        }
        return Ok(s);
    }
    let blocks: Vec<Value> = out
        .iter()
        .map(|sbo| {
            let polys: Map<String, Value> = sbo
                .polys
                .iter()
                .enumerate()
                .map(|(k, p)| (format!("P_{}_{}", sbo.i, sbo.i + k), p.to_json()))
                .collect();
            json!({
                "i": sbo.i,
                "polys": polys,
                "H": sbo.h.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                "Z": sbo.z.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(pretty(&json!({
        "N": n_total,
        "backend": Backend::from(args.backend).as_str(),
        "normalization": norm.as_str(),
        "measures": pair.to_json(),
        "blocks": blocks,
    })))
}

pub fn roots(args: &RootsArgs) -> CliResult<Output> {
    let backend = Backend::from(args.backend);
    let pair = resolve_measures(&args.measures, backend)?;
    check_indices(args.i, args.n)?;
    if let Some(d) = args.degree {
        if d < args.i || d >= args.n {
            return Err(CliError::Usage(format!("--n {d} outside {}..{}", args.i, args.n)));
        }
    }
    match backend {
        Backend::Exact => roots_with::<Rational>(args, &pair),
        Backend::Float => roots_with::<f64>(args, &pair),
    }
}

fn roots_with<T: Scalar>(args: &RootsArgs, pair: &MeasurePair) -> CliResult<Output> {
    let sbo = build_sbo::<T>(&pair.first, &pair.second, args.i, args.n, Normalization::Monic)?;
    let degrees: Vec<usize> = match args.degree {
        Some(d) => vec![d],
        None => (args.i..args.n).collect(),
    };
    let reports = degrees
        .iter()
        .map(|&n| zero_report(&sbo, n))
        .collect::<blockortho::Result<Vec<_>>>()?;
    let pass = reports.iter().all(|r| r.satisfies_theorem);
    let v = json!({
        "i": args.i,
        "N": args.n,
        "domain": pair.first.domain().to_json(),
        "reports": reports,
        "pass": pass,
    });
    let failures = reports
        .iter()
        .filter(|r| !r.satisfies_theorem)
        .map(|r| format!("zeros(P_{{{};{}}})", r.i, r.n))
        .collect();
    Ok(Output {
        text: pretty(&v),
        failures,
    })
}

pub fn projector(args: &ProjectorArgs) -> CliResult<Output> {
    let backend = Backend::from(args.backend);
    let pair = resolve_measures(&args.measures, backend)?;
    if args.n == 0 || args.i > args.n {
        return Err(CliError::Usage(format!("need 0 <= i <= N, N > 0; got i = {}, N = {}", args.i, args.n)));
    }
    match backend {
        Backend::Exact => projector_with::<Rational>(args, &pair),
        Backend::Float => projector_with::<f64>(args, &pair),
    }
}

fn defect<T: Scalar>(m: &Matrix<T>) -> f64 {
    m.max_abs()
}

fn close<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> bool {
    let d = defect(&a.sub(b));
    if T::is_exact() {
        d == 0.0
    } else {
        d <= blockortho::tolerances::FLOAT_ORACLE * b.max_abs().max(1.0)
    }
}

fn projector_with<T: Scalar>(args: &ProjectorArgs, pair: &MeasurePair) -> CliResult<Output> {
    let q_route = || -> CliResult<(ProjectorMatrix<T>, ProjectorMatrix<T>)> {
        let s = build_standard::<T>(&pair.first, args.n, Normalization::Monic)?;
        Ok(projectors_from_q(&s, args.i)?)
    };
    let second_route = || -> CliResult<(ProjectorMatrix<T>, ProjectorMatrix<T>)> {
        Ok(projectors_from_second::<T>(&pair.first, &pair.second, args.i, args.n)?)
    };
    let idempotent = |p: &ProjectorMatrix<T>| close(&p.idempotence_defect(), &Matrix::zeros(p.dim(), p.dim()));
    let (onto, comp, agree) = match args.route {
        Route::Q => {
            let (p, c) = q_route()?;
            (p, c, None)
        }
        Route::Second => {
            let (p, c) = second_route()?;
            (p, c, None)
        }
        Route::Both => {
            let (p, c) = q_route()?;
            let (p2, c2) = second_route()?;
            let agree = close(&p.entries, &p2.entries) && close(&c.entries, &c2.entries);
            (p, c, Some(agree))
        }
    };
    let idem = idempotent(&onto) && idempotent(&comp);
    let sum_is_identity = close(&onto.entries.add(&comp.entries), &Matrix::identity(args.n));
    let pass = idem && sum_is_identity && agree.unwrap_or(true);
    let mut v = json!({
        "i": args.i,
        "N": args.n,
        "onto": onto.to_json(),
        "complement": comp.to_json(),
        "idempotent": idem,
        "complementary": sum_is_identity,
        "pass": pass,
    });
    if let Some(a) = agree {
        v["routes_agree"] = a.into();
    }
    let failures = [("idempotence", idem), ("complementarity", sum_is_identity), ("route_equivalence", agree.unwrap_or(true))]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name.to_string())
        .collect();
    Ok(Output {
        text: pretty(&v),
        failures,
    })
}

pub fn three_subspace(args: &ThreeSubspaceArgs) -> CliResult<Output> {
    let z23 = parse_rational(&args.z23)?;
    let z13 = parse_rational(&args.z13)?;
    let (sol, params) = if args.symmetric12 {
        let g = Measure::gaussian(Rational::from_integer(1.into()))?;
        let sol = gamma_three_subspace_even12(g, &z23, &z13)?;
        (sol, json!({"inner_12": "gaussian", "z23": args.z23, "z13": args.z13}))
    } else {
        let raw = args
            .z12
            .as_deref()
            .ok_or_else(|| CliError::Usage("--z12 is required without --symmetric12".into()))?;
        let z12 = parse_rational(raw)?;
        let sol = gamma_three_subspace(&z12, &z23, &z13)?;
        (sol, json!({"z12": raw, "z23": args.z23, "z13": args.z13}))
    };
    let mut v = sol.to_json();
    v["parameters"] = params;
    Ok(Output::ok(&v))
}

pub fn moments_cmd(args: &MomentsArgs) -> CliResult<Output> {
    let backend = Backend::from(args.backend);
    let pair = resolve_measures(&args.measures, backend)?;
    let seq = |m: &Measure| -> CliResult<Value> {
        let mom = match backend {
            Backend::Exact => moments::<Rational>(m, args.order)?.to_json(),
            Backend::Float => moments::<f64>(m, args.order)?.to_json(),
        };
        Ok(json!({"measure": m.to_json(), "moments": mom}))
    };
    let v = json!({"order": args.order, "measures": [seq(&pair.first)?, seq(&pair.second)?]});
    Ok(Output::ok(&v))
}
