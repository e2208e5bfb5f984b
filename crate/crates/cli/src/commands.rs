use cforge_core::commdecomp::{
    blackadar_witness, fack_engine, hereditary_peel, rosenblum_solve, two_commutator, verify_witness, Base,
    BoundCheck, Comparison, DampedDecomposer, DecompError, ExactDecomposer, FackOptions, FackTower, RosenblumProblem, RECON_TOL,
};
use cforge_core::cucompare::{
    almost_divisible_check, almost_unperforated_check, cuntz_class, epsilon_delta_witness, strict_comparison_check,
    CuntzVector, EpsilonDelta, RankOrder, TraceWeight,
};
use cforge_core::dhsdet::{
    dist_to_integer, exp_product_determinant, exp_product_path, kernel_membership, path_determinant,
    regroup_commutators, suzuki_defect, PathOfInvertibles,
};
use cforge_core::matcore::{opnorm, AlgebraShape, MatC};
use cforge_core::nildecomp::{
    bridge_split_at, nil_decompose, DelegatedStrategy, NilIfPossible, Partition4, ReportOnly, DEFAULT_S1, DEFAULT_S2,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{gen, to_value, Body, CliError, Command, RunConfig};

/// Relative tolerance for exact algebraic identities.
const IDENTITY_TOL: f64 = 1e-12;
/// Square-zero tolerance on `‖x²‖/‖x‖²`.
const SQUARE_TOL: f64 = 1e-10;
/// Integrality tolerance for closed-loop determinants.
const DET_TOL: f64 = 1e-9;
/// Bound on both resolvent norms along the Sylvester contour.
const RESOLVENT_BOUND: f64 = 2.0;

pub(crate) fn dispatch(config: &RunConfig, input: Option<Value>) -> Result<Body, CliError> {
    if config.command == Command::Gen {
        return gen::generate(config);
    }
    let mut input = input.ok_or_else(|| CliError::input("missing input"))?;
    // accept the output of `gen` as is
    if let Some(inner) = input.get_mut("instance") {
        input = inner.take();
    }
    match config.command {
        Command::Decompose2 => decompose2(config, parse(input)?),
        Command::Peel => peel(config, parse(input)?),
        Command::Fack => fack(config, parse(input)?),
        Command::Nilify => nilify(config, parse(input)?),
        Command::Bridge => bridge(config, parse(input)?),
        Command::Rosenblum => rosenblum(config, parse(input)?),
        Command::Det => det(config, parse(input)?),
        Command::Regroup => regroup(config, parse(input)?),
        Command::Suzuki => suzuki(config, parse(input)?),
        Command::Kernel => kernel(config, parse(input)?),
        Command::Compare => compare(config, parse(input)?),
        Command::Gen => unreachable!(),
    }
}

fn parse<T: DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::input(format!("bad input: {e}")))
}

#[derive(Deserialize)]
struct Decompose2In {
    h: MatC,
    /// Block size `m` when `h ∈ M_n(M_m)`.
    #[serde(default)]
    block: Option<usize>,
}

fn decompose2(config: &RunConfig, inp: Decompose2In) -> Result<Body, CliError> {
    let base = match inp.block {
        None | Some(1) => Base::Scalar,
        Some(m) => Base::Matrix(m),
    };
    let cert = two_commutator(&inp.h, base, config.tol)?;
    Ok(Body {
        checks: cert.bound_checks.clone(),
        reconstruction_residual: Some(cert.reconstruction_residual),
        report: to_value(&cert),
    })
}

#[derive(Deserialize)]
struct PeelIn {
    a: MatC,
    b: MatC,
    h: MatC,
    #[serde(default)]
    n: Option<usize>,
}

fn peel(config: &RunConfig, inp: PeelIn) -> Result<Body, CliError> {
    let n = config.n.or(inp.n).unwrap_or(1);
    let x = match blackadar_witness(&inp.a, &inp.b, n)? {
        Comparison::Witness(x) => x,
        Comparison::NotComparable { rank_a, capacity } => {
            return Err(DecompError::NotComparable { rank_a, capacity }.into())
        }
    };
    let witness_deviation = verify_witness(&inp.a, &inp.b, n, &x)?;
    let out = hereditary_peel(&inp.a, &inp.b, n, &inp.h, config.tol)?;
    let mut rest = &inp.h - &out.tail;
    for (z, w) in &out.pairs {
        rest -= MatC::commutator(z, w);
    }
    let hn = opnorm(&inp.h);
    let recon = opnorm(&rest);
    let mut checks = out.bound_checks.clone();
    checks.push(BoundCheck::upper("peel: witness", RECON_TOL, witness_deviation));
    checks.push(BoundCheck::upper("reconstruction", RECON_TOL * hn.max(1.0), recon));
    Ok(Body {
        report: json!({
            "n": n,
            "witness": to_value(&x),
            "witness_deviation": witness_deviation,
            "pairs": to_value(&out.pairs),
            "tail": to_value(&out.tail),
        }),
        checks,
        reconstruction_residual: Some(recon),
    })
}

#[derive(Deserialize)]
struct FackIn {
    h: MatC,
    tower: FackTower,
    /// Stage decomposer residual factor; 0 selects the exact decomposer.
    #[serde(default)]
    lambda: Option<f64>,
}

fn fack(config: &RunConfig, inp: FackIn) -> Result<Body, CliError> {
    let tower_deviation = inp.tower.verify(config.tol.max(1e-9))?;
    let opts = FackOptions {
        tol: config.tol,
        target_residual: None,
    };
    let report = match inp.lambda {
        Some(l) if l > 0.0 => fack_engine(&inp.h, &inp.tower, &DampedDecomposer { lambda: l }, opts)?,
        _ => fack_engine(&inp.h, &inp.tower, &ExactDecomposer, opts)?,
    };
    let mut checks = report.certificate.bound_checks.clone();
    checks.push(BoundCheck::upper("tower: witnesses", 1e-8, tower_deviation));
    Ok(Body {
        reconstruction_residual: Some(report.certificate.reconstruction_residual),
        checks,
        report: to_value(&report),
    })
}

#[derive(Deserialize)]
struct NilIn {
    a: MatC,
    b: MatC,
    #[serde(default)]
    s1: Option<f64>,
    #[serde(default)]
    s2: Option<f64>,
}

fn partition_for(config: &RunConfig, a: &MatC, s1: Option<f64>, s2: Option<f64>) -> Result<Partition4, CliError> {
    let size = a.dim();
    if let Some(g) = config.grid {
        if g != size {
            return Err(CliError::input(format!("--grid {g} does not match the input dimension {size}")));
        }
    }
    Ok(Partition4::uniform(size, s1.unwrap_or(DEFAULT_S1), s2.unwrap_or(DEFAULT_S2))?)
}

fn nilify(config: &RunConfig, inp: NilIn) -> Result<Body, CliError> {
    let p = partition_for(config, &inp.a, inp.s1, inp.s2)?;
    let strategy: &dyn DelegatedStrategy = if config.report_only { &ReportOnly } else { &NilIfPossible };
    let rep = nil_decompose(&inp.a, &inp.b, &p, strategy, config.tol)?;
    let scale = opnorm(&inp.a) * opnorm(&inp.b);
    let checks = vec![
        BoundCheck::upper("expansion identity", IDENTITY_TOL * scale.max(1.0), rep.expansion_residual),
        BoundCheck::upper("piece conservation", RECON_TOL * scale.max(1.0), rep.conservation_residual),
        BoundCheck::upper("pieces square to zero", SQUARE_TOL, rep.max_square_residual),
    ];
    Ok(Body {
        reconstruction_residual: Some(rep.conservation_residual),
        checks,
        report: to_value(&rep),
    })
}

#[derive(Deserialize)]
struct BridgeIn {
    a: MatC,
    b: MatC,
    #[serde(default)]
    indices: Option<[usize; 4]>,
    #[serde(default)]
    s1: Option<f64>,
    #[serde(default)]
    s2: Option<f64>,
}

fn bridge(config: &RunConfig, inp: BridgeIn) -> Result<Body, CliError> {
    let p = partition_for(config, &inp.a, inp.s1, inp.s2)?;
    let split = bridge_split_at(&inp.a, &inp.b, &p, inp.indices.unwrap_or([1, 4, 3, 2]))?;
    let pieces = split.nil_pieces(config.tol)?;
    let scale = opnorm(&inp.a) * opnorm(&inp.b);
    let worst_arg = split.argument_square_residuals.iter().fold(0.0f64, |m, &x| m.max(x));
    let checks = vec![
        BoundCheck::upper("bridge identity", IDENTITY_TOL * scale.max(1.0), split.identity_residual),
        BoundCheck::upper("bridge arguments square to zero", SQUARE_TOL, worst_arg),
    ];
    Ok(Body {
        reconstruction_residual: Some(split.identity_residual),
        checks,
        report: json!({ "split": to_value(&split), "pieces": to_value(&pieces) }),
    })
}

fn rosenblum(config: &RunConfig, p: RosenblumProblem) -> Result<Body, CliError> {
    let sol = rosenblum_solve(&p, config.tol)?;
    let lhs = &(&p.d_left * &sol.b) - &(&sol.b * &p.d_right);
    let residual = opnorm(&(&lhs - &p.rhs));
    let rn = opnorm(&p.rhs);
    let checks = vec![
        BoundCheck::upper("sylvester residual", RECON_TOL * rn.max(1.0), residual),
        BoundCheck::upper("left resolvent norm", RESOLVENT_BOUND, sol.max_resolvent_left),
        BoundCheck::upper("right resolvent norm", RESOLVENT_BOUND, sol.max_resolvent_right),
    ];
    Ok(Body {
        reconstruction_residual: Some(residual),
        checks,
        report: to_value(&sol),
    })
}

#[derive(Deserialize)]
struct DetIn {
    #[serde(default)]
    path: Option<PathOfInvertibles>,
    #[serde(default)]
    h_list: Option<Vec<MatC>>,
    #[serde(default)]
    samples: Option<usize>,
}

fn det(config: &RunConfig, inp: DetIn) -> Result<Body, CliError> {
    let path = match (&inp.path, &inp.h_list) {
        (Some(p), _) => p.clone(),
        (None, Some(h)) => exp_product_path(h, config.grid.or(inp.samples).unwrap_or(64))?,
        (None, None) => return Err(CliError::input("det needs \"path\" or \"h_list\"")),
    };
    let rep = path_determinant(&path, config.tol)?;
    let mut checks = Vec::new();
    if path.closed {
        checks.push(BoundCheck::upper("closed loop integrality", DET_TOL, dist_to_integer(rep.value.raw.re)));
        checks.push(BoundCheck::upper("closed loop imaginary part", DET_TOL, rep.value.raw.im.abs()));
    }
    let mut exp_value = None;
    if let Some(h) = &inp.h_list {
        let v = exp_product_determinant(h, config.tol)?;
        checks.push(BoundCheck::upper(
            "exp-product rule mod Z",
            DET_TOL,
            dist_to_integer(v.raw.re - rep.value.raw.re),
        ));
        exp_value = Some(v);
    }
    Ok(Body {
        reconstruction_residual: None,
        checks,
        report: json!({ "path": to_value(&rep), "exp_product": to_value(&exp_value) }),
    })
}

#[derive(Deserialize)]
struct RegroupIn {
    factors: Vec<MatC>,
    #[serde(rename = "N", default)]
    big_n: Option<usize>,
}

fn regroup(config: &RunConfig, inp: RegroupIn) -> Result<Body, CliError> {
    let n = config.big_n.or(inp.big_n).unwrap_or(2);
    let out = regroup_commutators(&inp.factors, n)?;
    let checks = vec![BoundCheck::upper("regroup identity", 1e-10, out.identity_residual)];
    Ok(Body {
        reconstruction_residual: Some(out.identity_residual),
        checks,
        report: to_value(&out),
    })
}

#[derive(Deserialize)]
struct SuzukiIn {
    a_list: Vec<MatC>,
    #[serde(rename = "N", default)]
    big_n: Option<usize>,
}

fn suzuki(config: &RunConfig, inp: SuzukiIn) -> Result<Body, CliError> {
    let n = config.big_n.or(inp.big_n).unwrap_or(16);
    let (c, stats) = suzuki_defect(&inp.a_list, n)?;
    let checks = vec![BoundCheck::upper("defect trace", 1e-10 * stats.input_scale, stats.trace_abs)];
    Ok(Body {
        reconstruction_residual: None,
        checks,
        report: json!({ "c": to_value(&c), "stats": to_value(&stats) }),
    })
}

#[derive(Deserialize)]
struct KernelIn {
    u: MatC,
}

fn kernel(config: &RunConfig, inp: KernelIn) -> Result<Body, CliError> {
    let cert = kernel_membership(&inp.u, config.tol)?;
    let mut checks = Vec::new();
    if let (Some(r), Some(uf), Some(vf)) = (cert.reconstruction_residual, &cert.u_factor, &cert.v_factor) {
        checks.push(BoundCheck::upper("single commutator", 1e-10, r));
        let n = inp.u.dim();
        for (name, f) in [("U unitary", uf), ("V unitary", vf)] {
            let dev = opnorm(&(&(&f.adjoint() * f) - &MatC::identity(n)));
            checks.push(BoundCheck::upper(name, 1e-10, dev));
        }
    }
    Ok(Body {
        reconstruction_residual: cert.reconstruction_residual,
        checks,
        report: to_value(&cert),
    })
}

#[derive(Deserialize)]
struct CompareIn {
    shape: AlgebraShape,
    #[serde(default)]
    traces: Vec<TraceWeight>,
    #[serde(default)]
    a: Option<MatC>,
    #[serde(default)]
    b: Option<MatC>,
    #[serde(default)]
    vectors: Option<Vec<CuntzVector>>,
}

fn compare(config: &RunConfig, inp: CompareIn) -> Result<Body, CliError> {
    inp.shape.validate()?;
    let blocks = inp.shape.block_count();
    let traces = if inp.traces.is_empty() {
        TraceWeight::extreme_points(blocks)
    } else {
        inp.traces.clone()
    };
    let gamma = config.gamma.unwrap_or(0.25);
    let eps = config.eps.unwrap_or(0.25);
    let mut checks = Vec::new();
    let mut report = serde_json::Map::new();
    report.insert("gamma".into(), Value::from(gamma));
    report.insert("eps".into(), Value::from(eps));
    report.insert("traces".into(), to_value(&traces));
    match (&inp.a, &inp.b) {
        (Some(a), Some(b)) => {
            let sc = strict_comparison_check(a, b, &inp.shape, gamma, &traces)?;
            report.insert("class_a".into(), to_value(&cuntz_class(a, &inp.shape)?));
            report.insert("class_b".into(), to_value(&cuntz_class(b, &inp.shape)?));
            report.insert("strict_comparison".into(), to_value(&sc));
            checks.push(BoundCheck {
                name: "premise implies conclusion".into(),
                claimed: 1.0,
                measured: if sc.premise_holds && !sc.conclusion_holds { 0.0 } else { 1.0 },
                pass: !sc.premise_holds || sc.conclusion_holds,
            });
            if sc.premise_holds {
                let w = epsilon_delta_witness(a, b, &inp.shape, gamma, eps, &traces)?;
                checks.push(BoundCheck {
                    name: "epsilon-delta witness found".into(),
                    claimed: 1.0,
                    measured: if w == EpsilonDelta::NotFound { 0.0 } else { 1.0 },
                    pass: w != EpsilonDelta::NotFound,
                });
                report.insert("epsilon_delta".into(), to_value(&w));
            }
        }
        (None, None) => {}
        _ => return Err(CliError::input("compare needs both \"a\" and \"b\" or neither")),
    }
    if let Some(vectors) = &inp.vectors {
        if let Some(v) = vectors.iter().find(|v| v.len() != blocks) {
            return Err(CliError::input(format!("rank vector of length {} for {blocks} blocks", v.len())));
        }
        let k = config.n.unwrap_or(4) as u64;
        let ord = RankOrder { blocks };
        report.insert(
            "perforation_violations".into(),
            to_value(&almost_unperforated_check(&ord, vectors, k)),
        );
        report.insert("divisibility_violations".into(), to_value(&almost_divisible_check(&ord, vectors, k)));
    }
    Ok(Body {
        reconstruction_residual: None,
        checks,
        report: Value::Object(report),
    })
}
