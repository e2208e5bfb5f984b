use serde::{Deserialize, Serialize};

use super::{
    balance, blackadar_witness, hereditary_peel_with_witness, two_commutator, verify_witness, Base, BoundCheck,
    Comparison, DecompCertificate, DecompError,
};
use crate::matcore::{her_compress, in_her_with_tol, opnorm, range_basis, MatC, ZERO_FLOOR};
use crate::random::InstanceRng;

/// Approximate decomposer used inside each hereditary block: for trace-zero
/// `h ∈ her(support)` it returns at most `pair_count()` pairs in
/// `her(support)` leaving a residual of norm at most `lambda()·‖h‖`.
pub trait StageDecomposer {
    fn name(&self) -> String;
    fn lambda(&self) -> f64;
    fn pair_count(&self) -> usize;
    /// Constant `C` with `‖x_i‖, ‖y_i‖ ≤ (C‖h‖)^{1/2}`, when one is known.
    fn constant(&self) -> Option<f64>;
    fn decompose(&self, support: &MatC, h: &MatC, tol: f64) -> Result<Vec<(MatC, MatC)>, DecompError>;
}

/// Exact decomposition in the corner cut out by the support of the block,
/// via [`two_commutator`]; factors are balanced to equal norms.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactDecomposer;

impl StageDecomposer for ExactDecomposer {
    fn name(&self) -> String {
        "exact".into()
    }

    fn lambda(&self) -> f64 {
        0.0
    }

    fn pair_count(&self) -> usize {
        2
    }

    fn constant(&self) -> Option<f64> {
        None
    }

    fn decompose(&self, support: &MatC, h: &MatC, tol: f64) -> Result<Vec<(MatC, MatC)>, DecompError> {
        let q = range_basis(support)?;
        let r = q.ncols();
        if r < 2 {
            // a trace-zero element of a one-dimensional corner is zero
            return Ok(Vec::new());
        }
        let hc = MatC::from_dmatrix(q.adjoint() * h.as_dmatrix() * &q)?;
        let cert = two_commutator(&hc, Base::Scalar, tol)?;
        let lift = |m: &MatC| MatC::wrap(&q * m.as_dmatrix() * q.adjoint());
        Ok(cert
            .pairs
            .iter()
            .map(|(x, y)| {
                let (bx, by) = balance(x, y);
                (lift(&bx), lift(&by))
            })
            .collect())
    }
}

/// Exact pairs scaled to reproduce `(1 − λ)h`, leaving residual `λh`.
#[derive(Debug, Clone, Copy)]
pub struct DampedDecomposer {
    pub lambda: f64,
}

impl StageDecomposer for DampedDecomposer {
    fn name(&self) -> String {
        format!("damped({})", self.lambda)
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn pair_count(&self) -> usize {
        2
    }

    fn constant(&self) -> Option<f64> {
        None
    }

    fn decompose(&self, support: &MatC, h: &MatC, tol: f64) -> Result<Vec<(MatC, MatC)>, DecompError> {
        let t = (1.0 - self.lambda).sqrt();
        Ok(ExactDecomposer
            .decompose(support, h, tol)?
            .into_iter()
            .map(|(x, y)| (x.scale_re(t), y.scale_re(t)))
            .collect())
    }
}

/// Smallest `L₁ ≥ 1` with `λ^{L₁} < 1/(2L)`.
pub fn lambda_power_count(lambda: f64, l: usize) -> Result<usize, DecompError> {
    if !(0.0..1.0).contains(&lambda) || l == 0 {
        return Err(DecompError::BadInput {
            detail: format!("need 0 <= lambda < 1 and L >= 1 (got lambda = {lambda}, L = {l})"),
        });
    }
    let goal = 1.0 / (2.0 * l as f64);
    let mut k = 1;
    let mut p = lambda;
    while p >= goal {
        p *= lambda;
        k += 1;
    }
    Ok(k)
}

/// Pairwise orthogonal positive blocks `e_1, …, e_K` of one matrix algebra
/// with Blackadar witnesses for `e_j ≾ e_{j+1}^{⊕L}`, and optionally an
/// entry block `e_0 ≾ e_1^{⊕L}` that need not be orthogonal to the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FackTower {
    pub blocks: Vec<MatC>,
    #[serde(rename = "L")]
    pub l: usize,
    pub witnesses: Vec<MatC>,
    #[serde(default)]
    pub entry: Option<MatC>,
    #[serde(default)]
    pub entry_witness: Option<MatC>,
}

impl FackTower {
    pub fn new(blocks: Vec<MatC>, l: usize, tol: f64) -> Result<Self, DecompError> {
        if blocks.is_empty() || l == 0 {
            return Err(DecompError::InvalidTower {
                detail: "need at least one block and L >= 1".into(),
            });
        }
        let mut witnesses = Vec::with_capacity(blocks.len() - 1);
        for j in 0..blocks.len() - 1 {
            witnesses.push(Self::witness_for(&blocks[j], &blocks[j + 1], l, j + 1)?);
        }
        let tower = FackTower {
            blocks,
            l,
            witnesses,
            entry: None,
            entry_witness: None,
        };
        tower.verify(tol)?;
        Ok(tower)
    }

    pub fn with_entry(mut self, e0: MatC, tol: f64) -> Result<Self, DecompError> {
        let x = Self::witness_for(&e0, &self.blocks[0], self.l, 0)?;
        self.entry = Some(e0);
        self.entry_witness = Some(x);
        self.verify(tol)?;
        Ok(self)
    }

    fn witness_for(a: &MatC, b: &MatC, l: usize, j: usize) -> Result<MatC, DecompError> {
        match blackadar_witness(a, b, l)? {
            Comparison::Witness(x) => Ok(x),
            Comparison::NotComparable { rank_a, capacity } => Err(DecompError::InvalidTower {
                detail: format!("block {j} has rank {rank_a} > L * rank of block {} = {capacity}", j + 1),
            }),
        }
    }

    /// Ranks `r_1 ≥ r_2 ≥ …` with `r_{j+1} = ⌈r_j / L⌉`, taking `r_1` as
    /// large as the ambient dimension allows.
    pub fn rank_schedule(dim: usize, depth: usize, l: usize) -> Result<Vec<usize>, DecompError> {
        if depth == 0 || l == 0 {
            return Err(DecompError::InvalidTower {
                detail: "depth and L must be positive".into(),
            });
        }
        let schedule = |r1: usize| -> Vec<usize> {
            let mut v = vec![r1];
            for _ in 1..depth {
                let last = *v.last().unwrap();
                v.push(last.div_ceil(l));
            }
            v
        };
        let mut best = None;
        for r1 in 1..=dim {
            let s = schedule(r1);
            if s.iter().sum::<usize>() <= dim {
                best = Some(s);
            } else {
                break;
            }
        }
        best.ok_or_else(|| DecompError::InvalidTower {
            detail: format!("depth {depth} does not fit in dimension {dim}"),
        })
    }

    /// Random tower in `M_dim`: consecutive columns of a Haar unitary span
    /// the blocks, with eigenvalues drawn from `[1/4, 1]`. When `L·r_1`
    /// covers the whole space the identity is attached as entry block.
    pub fn build(dim: usize, depth: usize, l: usize, rng: &mut InstanceRng, tol: f64) -> Result<Self, DecompError> {
        let ranks = Self::rank_schedule(dim, depth, l)?;
        let u = rng.unitary(dim);
        let mut blocks = Vec::with_capacity(depth);
        let mut off = 0;
        for &r in &ranks {
            let mut diag = vec![0.0; dim];
            for x in diag.iter_mut().skip(off).take(r) {
                *x = rng.uniform_in(0.25, 1.0);
            }
            off += r;
            blocks.push((&(&u * &MatC::from_real_diag(&diag)) * &u.adjoint()).hermitian_part());
        }
        let tower = FackTower::new(blocks, l, tol)?;
        if l * ranks[0] >= dim {
            tower.with_entry(MatC::identity(dim), tol)
        } else {
            Ok(tower)
        }
    }

    pub fn depth(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].dim()
    }

    /// Checks orthogonality and every stored witness; returns the worst
    /// relative deviation.
    pub fn verify(&self, tol: f64) -> Result<f64, DecompError> {
        let d = self.dim();
        for b in &self.blocks {
            b.ensure_dim(d)?;
        }
        if self.witnesses.len() + 1 != self.blocks.len() {
            return Err(DecompError::InvalidTower {
                detail: "need one witness per consecutive pair of blocks".into(),
            });
        }
        let mut worst = 0.0f64;
        for i in 0..self.depth() {
            for j in 0..i {
                let a = &self.blocks[i];
                let b = &self.blocks[j];
                let dev = opnorm(&(a * b)) / (opnorm(a) * opnorm(b)).max(ZERO_FLOOR);
                if dev > tol {
                    return Err(DecompError::InvalidTower {
                        detail: format!("blocks {} and {} are not orthogonal ({dev:e})", j + 1, i + 1),
                    });
                }
                worst = worst.max(dev);
            }
        }
        for j in 0..self.witnesses.len() {
            let dev = verify_witness(&self.blocks[j], &self.blocks[j + 1], self.l, &self.witnesses[j])?;
            if dev > tol {
                return Err(DecompError::InvalidTower {
                    detail: format!("witness {} fails by {dev:e}", j + 1),
                });
            }
            worst = worst.max(dev);
        }
        match (&self.entry, &self.entry_witness) {
            (Some(e0), Some(x)) => {
                let dev = verify_witness(e0, &self.blocks[0], self.l, x)?;
                if dev > tol {
                    return Err(DecompError::InvalidTower {
                        detail: format!("entry witness fails by {dev:e}"),
                    });
                }
                worst = worst.max(dev);
            }
            (None, None) => {}
            _ => {
                return Err(DecompError::InvalidTower {
                    detail: "entry block and entry witness must come together".into(),
                })
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FackOptions {
    pub tol: f64,
    /// Fail unless the final residual is at most this multiple of `‖h‖`.
    pub target_residual: Option<f64>,
}

impl Default for FackOptions {
    fn default() -> Self {
        FackOptions {
            tol: crate::matcore::DEFAULT_TOL,
            target_residual: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FackStage {
    pub stage: usize,
    pub h_norm: f64,
    pub h_norm_bound: f64,
    pub h_prime_norm: f64,
    pub h_prime_bound: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FackReport {
    pub certificate: DecompCertificate,
    pub stages: Vec<FackStage>,
    pub lambda: f64,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "L1")]
    pub l1: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub group_count: usize,
    pub decomposer: String,
}

type Pairs = Vec<(MatC, MatC)>;

/// Truncated Fack technique over a finite tower.
///
/// Starting from `h_1 = h` (or the tail of peeling `h` off the entry block),
/// each stage runs `L₁` rounds of the stage decomposer inside `her(e_n)`,
/// leaving `h_n'`, then peels `h_n'` into `her(e_{n+1})` to get `h_{n+1}`.
/// The last stage's `h_K'` is the certificate residual. Stage factors are
/// summed over orthogonal blocks into `L₁M` pairs, and the peeling pairs
/// into `2L` pairs split by stage parity, plus `L` entry pairs, for
/// `3L + L₁M` pairs in total.
pub fn fack_engine(
    h: &MatC,
    tower: &FackTower,
    decomposer: &dyn StageDecomposer,
    opts: FackOptions,
) -> Result<FackReport, DecompError> {
    let tol = opts.tol;
    h.validate()?;
    let dim = tower.dim();
    h.ensure_dim(dim)?;
    let l = tower.l;
    let lambda = decomposer.lambda();
    let l1 = lambda_power_count(lambda, l)?;
    let m = decomposer.pair_count();
    let group_count = 3 * l + l1 * m;
    let k_depth = tower.depth();
    let report = |certificate, stages| FackReport {
        certificate,
        stages,
        lambda,
        l,
        l1,
        m,
        group_count,
        decomposer: decomposer.name(),
    };

    let hn = opnorm(h);
    let trace = h.trace().norm();
    if trace > tol * hn.max(ZERO_FLOOR) * dim as f64 {
        return Err(DecompError::NonzeroTrace { trace });
    }
    if hn <= ZERO_FLOOR {
        return Ok(report(DecompCertificate::zero(h.clone(), group_count), Vec::new()));
    }
    let floor = 1e-12 * hn;
    let mut checks = Vec::new();

    let zeros = |count: usize| -> Pairs { (0..count).map(|_| (MatC::zeros(dim), MatC::zeros(dim))).collect() };
    let mut entry_pairs = zeros(l);
    let mut current = h.clone();
    match (&tower.entry, &tower.entry_witness) {
        (Some(e0), Some(x)) => {
            require_hereditary(e0, h, tol)?;
            let peel = hereditary_peel_with_witness(h, x, l)?;
            checks.extend(prefixed("entry", peel.bound_checks));
            entry_pairs = peel.pairs;
            current = peel.tail;
        }
        _ => require_hereditary(&tower.blocks[0], h, tol)?,
    }

    let mut stage_pairs: Vec<Pairs> = Vec::with_capacity(k_depth);
    let mut peel_pairs: Vec<Pairs> = Vec::with_capacity(k_depth);
    let mut stages = Vec::with_capacity(k_depth);
    for n in 1..=k_depth {
        let e = &tower.blocks[n - 1];
        let h_n = current;
        let mut r = h_n.clone();
        let mut pairs = Vec::with_capacity(l1 * m);
        let mut iterations = 0;
        for _ in 0..l1 {
            let rn = opnorm(&r);
            if rn <= floor {
                break;
            }
            let got = decomposer.decompose(e, &r, tol)?;
            check_contract(n, decomposer, e, &r, rn, &got, floor)?;
            r = &r - &super::commutator_sum(dim, &got);
            let count = got.len();
            pairs.extend(got);
            pairs.extend(zeros(m - count));
            iterations += 1;
        }
        pairs.extend(zeros(l1 * m - pairs.len()));
        stage_pairs.push(pairs);

        let stage = FackStage {
            stage: n,
            h_norm: opnorm(&h_n),
            h_norm_bound: l as f64 * 2f64.powi(1 - n as i32) * hn,
            h_prime_norm: opnorm(&r),
            h_prime_bound: 2f64.powi(-(n as i32)) * hn,
            iterations,
        };
        checks.push(BoundCheck::upper_with_slack(
            format!("stage {n}: |h_n'| <= 2^-n |h|"),
            stage.h_prime_bound,
            stage.h_prime_norm,
            1e-6,
        ));
        checks.push(BoundCheck::upper_with_slack(
            format!("stage {n}: |h_n| <= L 2^(1-n) |h|"),
            stage.h_norm_bound,
            stage.h_norm,
            1e-6,
        ));
        stages.push(stage);

        if n < k_depth {
            let peel = hereditary_peel_with_witness(&r, &tower.witnesses[n - 1], l)?;
            checks.extend(prefixed(&format!("stage {n}"), peel.bound_checks));
            peel_pairs.push(peel.pairs);
            current = peel.tail;
        } else {
            current = r;
        }
    }
    let residual = current;
    let final_norm = opnorm(&residual);
    if let Some(t) = opts.target_residual {
        if final_norm > t * hn {
            return Err(DecompError::TowerTooShallow {
                depth: k_depth,
                achieved: final_norm / hn,
                target: t,
            });
        }
    }

    // group summands living in mutually orthogonal corners
    let mut groups: Vec<Vec<(MatC, MatC)>> = Vec::with_capacity(group_count);
    for p in entry_pairs {
        groups.push(vec![p]);
    }
    for i in 0..l1 * m {
        groups.push(stage_pairs.iter().map(|s| s[i].clone()).collect());
    }
    for parity in [1usize, 0] {
        for j in 0..l {
            groups.push(
                peel_pairs
                    .iter()
                    .enumerate()
                    .filter(|(idx, _)| (idx + 1) % 2 == parity)
                    .map(|(_, s)| s[j].clone())
                    .collect(),
            );
        }
    }
    let mut cross = 0.0f64;
    let mut grouped = Vec::with_capacity(group_count);
    for g in &groups {
        for (a, (xa, _)) in g.iter().enumerate() {
            for (b, (_, yb)) in g.iter().enumerate() {
                if a != b {
                    cross = cross.max(opnorm(&(xa * yb))).max(opnorm(&(yb * xa)));
                }
            }
        }
        let mut x = MatC::zeros(dim);
        let mut y = MatC::zeros(dim);
        for (xi, yi) in g {
            x += xi;
            y += yi;
        }
        grouped.push((x, y));
    }
    checks.push(BoundCheck::upper(
        "grouping: cross-stage products vanish",
        tol * hn.max(1.0),
        cross,
    ));
    let mut cert = DecompCertificate::assemble(h.clone(), grouped, residual, checks);
    cert.measurements.insert("final_residual_ratio".into(), final_norm / hn);
    cert.measurements.insert("group_count".into(), group_count as f64);
    Ok(report(cert, stages))
}

fn require_hereditary(e: &MatC, h: &MatC, tol: f64) -> Result<(), DecompError> {
    if in_her_with_tol(e, h, tol.max(1e-9))? {
        return Ok(());
    }
    let c = her_compress(e, h)?;
    Err(DecompError::NotInHereditary {
        deviation: opnorm(&(h - &c)),
    })
}

fn prefixed(prefix: &str, checks: Vec<BoundCheck>) -> Vec<BoundCheck> {
    checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{prefix}: {}", c.name);
            c
        })
        .collect()
}

fn check_contract(
    stage: usize,
    dec: &dyn StageDecomposer,
    support: &MatC,
    input: &MatC,
    input_norm: f64,
    pairs: &[(MatC, MatC)],
    floor: f64,
) -> Result<(), DecompError> {
    let fail = |detail: String| Err(DecompError::StageContract { stage, detail });
    if pairs.len() > dec.pair_count() {
        return fail(format!("returned {} pairs, promised at most {}", pairs.len(), dec.pair_count()));
    }
    let rest = input - &super::commutator_sum(input.dim(), pairs);
    let rest_norm = opnorm(&rest);
    if rest_norm > dec.lambda() * input_norm * (1.0 + 1e-6) + floor {
        return fail(format!(
            "residual {rest_norm:e} exceeds lambda * |h| = {:e}",
            dec.lambda() * input_norm
        ));
    }
    if let Some(c) = dec.constant() {
        let cap = (c * input_norm).sqrt() * (1.0 + 1e-6);
        for (x, y) in pairs {
            if opnorm(x) > cap || opnorm(y) > cap {
                return fail(format!("factor norm above (C|h|)^(1/2) = {cap:e}"));
            }
        }
    }
    for (x, y) in pairs {
        for f in [x, y] {
            let c = her_compress(support, f)?;
            if opnorm(&(f - &c)) > 1e-8 * opnorm(f).max(floor) {
                return fail("factor leaves the hereditary block".into());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_zero_in(e: &MatC, rng: &mut InstanceRng) -> MatC {
        let g = rng.matrix(e.dim());
        let c = her_compress(e, &g).unwrap();
        let p = crate::matcore::support_projection(e).unwrap();
        let shift = c.trace() / p.trace().re;
        &c - &p.scale(shift)
    }

    #[test]
    fn power_count() {
        assert_eq!(lambda_power_count(0.0, 1).unwrap(), 1);
        assert_eq!(lambda_power_count(0.5, 1).unwrap(), 2);
        assert_eq!(lambda_power_count(0.5, 2).unwrap(), 3);
        assert!(lambda_power_count(1.0, 1).is_err());
    }

    #[test]
    fn schedule_fits() {
        assert_eq!(FackTower::rank_schedule(64, 4, 2).unwrap(), vec![33, 17, 9, 5]);
        assert!(FackTower::rank_schedule(3, 4, 1).is_err());
    }

    #[test]
    fn exact_single_stage() {
        let mut rng = InstanceRng::new(1);
        let tower = FackTower::build(8, 1, 1, &mut rng, 1e-9).unwrap();
        let h = trace_zero_in(&tower.blocks[0], &mut rng);
        let rep = fack_engine(&h, &tower, &ExactDecomposer, FackOptions::default()).unwrap();
        assert_eq!(rep.l1, 1);
        assert!(opnorm(&rep.certificate.residual) <= 1e-12);
        assert!(rep.certificate.all_pass(), "{:?}", rep.certificate.failed_checks());
    }

    #[test]
    fn damped_depth_four() {
        let mut rng = InstanceRng::new(2);
        let tower = FackTower::build(24, 4, 1, &mut rng, 1e-9).unwrap();
        let h = trace_zero_in(&tower.blocks[0], &mut rng);
        let rep = fack_engine(&h, &tower, &DampedDecomposer { lambda: 0.5 }, FackOptions::default()).unwrap();
        let hn = opnorm(&h);
        assert!(opnorm(&rep.certificate.residual) <= hn / 16.0);
        assert_eq!(rep.certificate.pairs.len(), rep.group_count);
        assert_eq!(rep.group_count, 3 + 2 * 2);
        assert!(rep.certificate.all_pass(), "{:?}", rep.certificate.failed_checks());
    }

    #[test]
    fn entry_block_takes_any_trace_zero() {
        let mut rng = InstanceRng::new(3);
        let tower = FackTower::build(16, 3, 2, &mut rng, 1e-9).unwrap();
        assert!(tower.entry.is_some());
        let h = rng.trace_zero(16);
        let rep = fack_engine(&h, &tower, &DampedDecomposer { lambda: 0.5 }, FackOptions::default()).unwrap();
        assert!(rep.certificate.all_pass(), "{:?}", rep.certificate.failed_checks());
        assert!(rep.certificate.reconstruction_residual <= 1e-8);
    }

    #[test]
    fn shallow_tower_reported() {
        let mut rng = InstanceRng::new(4);
        let tower = FackTower::build(12, 2, 1, &mut rng, 1e-9).unwrap();
        let h = trace_zero_in(&tower.blocks[0], &mut rng);
        let opts = FackOptions {
            target_residual: Some(1e-6),
            ..FackOptions::default()
        };
        assert!(matches!(
            fack_engine(&h, &tower, &DampedDecomposer { lambda: 0.5 }, opts),
            Err(DecompError::TowerTooShallow { .. })
        ));
    }

    struct Liar;

    impl StageDecomposer for Liar {
        fn name(&self) -> String {
            "liar".into()
        }
        fn lambda(&self) -> f64 {
            0.1
        }
        fn pair_count(&self) -> usize {
            1
        }
        fn constant(&self) -> Option<f64> {
            None
        }
        fn decompose(&self, _: &MatC, _: &MatC, _: f64) -> Result<Vec<(MatC, MatC)>, DecompError> {
            Ok(Vec::new())
        }
    }

    #[test]
    fn contract_violation_detected() {
        let mut rng = InstanceRng::new(5);
        let tower = FackTower::build(8, 2, 1, &mut rng, 1e-9).unwrap();
        let h = trace_zero_in(&tower.blocks[0], &mut rng);
        assert!(matches!(
            fack_engine(&h, &tower, &Liar, FackOptions::default()),
            Err(DecompError::StageContract { stage: 1, .. })
        ));
    }
}
