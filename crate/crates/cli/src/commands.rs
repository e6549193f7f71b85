use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rand::Rng;
use serde_json::{json, Value};

use infgroups::gaussrep::{
    commutant_check, rep_certify_pair, rep_operator, GaussRepParams, Motion, RepGenerator,
};
use infgroups::groups::{cq, verify_relations, GroupElement, GroupKind, Mat, RelationInputs, CQ};
use infgroups::io::{load_matrix, MatrixData};
use infgroups::linalg::{c, eye, inverse, matrix_json, CMat, C64};
use infgroups::matrixfn::{canonical_form, check_r_identities, require_hermitian};
use infgroups::sampling::{self, Rng64};
use infgroups::spherical::{asf_estimate, eval_spherical, gram_psd_certify, vacuum_element, SphericalParams};
use infgroups::tensorrep::{
    commutant_sp_o_check, gk_relations_check, gk_unitarity_check, lemma_1_1_check, r_dependence_check,
    GkGenerator, GkParams, SpOGenerator, SpORepParams,
};
use infgroups::Certificate;

use crate::config::{Command, RunConfig};

/// Certificates in declaration order plus command-specific artifacts.
pub struct Outcome {
    pub certificates: Vec<Certificate>,
    pub artifacts: Value,
}

impl Outcome {
    fn certs(certificates: Vec<Certificate>) -> Self {
        Self { certificates, artifacts: Value::Null }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    rng: Rng64,
}

impl Ctx<'_> {
    fn kind(&self, default: GroupKind) -> GroupKind {
        self.cfg.kind.and_then(|k| k.parse().ok()).unwrap_or(default)
    }

    fn symmetric_kind(&self) -> Result<GroupKind> {
        let kind = self.kind(GroupKind::Sp);
        if !kind.is_symmetric_type() {
            bail!("{} needs --kind sp or --kind o", self.cfg.command);
        }
        Ok(kind)
    }

    fn trunc(&self, default: (usize, usize)) -> (usize, usize) {
        self.cfg.truncation.unwrap_or(default)
    }

    fn degree(&self, default: usize) -> usize {
        self.cfg.degree.unwrap_or(default)
    }

    fn samples(&self, default: usize) -> usize {
        self.cfg.samples.unwrap_or(default)
    }

    fn hermitian(&mut self, path: &Option<PathBuf>, m: usize, scale: f64) -> Result<CMat> {
        match path {
            Some(p) => {
                let a = load(p)?.float;
                require_hermitian(&a)?;
                Ok(a)
            }
            None => Ok(sampling::random_hermitian(&mut self.rng, m, scale)),
        }
    }
}

fn load(path: &PathBuf) -> Result<MatrixData> {
    load_matrix(path).with_context(|| format!("reading {}", path.display()))
}

fn gl_element(g: &CMat) -> Result<GroupElement<C64>> {
    if g.nrows() != g.ncols() {
        bail!("g must be square");
    }
    Ok(GroupElement::from_matrix(GroupKind::GL, g.nrows(), Mat::from_cmat(g))?)
}

fn real_symmetric(rng: &mut Rng64, n: usize, antisymmetric: bool) -> CMat {
    let mut b = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-0.6..0.6);
            if antisymmetric {
                if i != j {
                    b[(i, j)] = c(v, 0.0);
                    b[(j, i)] = c(-v, 0.0);
                }
            } else {
                b[(i, j)] = c(v, 0.0);
                b[(j, i)] = c(v, 0.0);
            }
        }
    }
    b
}

pub fn run(command: &Command, cfg: &RunConfig) -> Result<Outcome> {
    let mut ctx = Ctx { cfg, rng: sampling::rng(cfg.seed) };
    match command {
        Command::VerifyRelations { x, y, b, g } => verify(&mut ctx, [x, y, b, g]),
        Command::Spherical { a, beta } => spherical(&mut ctx, a, *beta),
        Command::GramCheck { a, beta } => gram(&mut ctx, a, *beta),
        Command::RepMatrix { a, z, g, h, beta } => rep_matrix(&mut ctx, a, z, g, h, *beta),
        Command::Commutant { a, z, u, beta } => commutant(&mut ctx, a, z, u, *beta),
        Command::FourierFixedpoint { a } => {
            let a = match a {
                Some(p) => load(p)?.float,
                None => CMat::zeros(1, 1),
            };
            Ok(Outcome::certs(vec![lemma_1_1_check(&a)?]))
        }
        Command::CanonicalForm { a } => canonical(&mut ctx, a),
        Command::GkCheck { a, z } => gk(&mut ctx, a, z),
        Command::Asf { a, g, beta, count } => asf(&mut ctx, a, g, *beta, *count),
    }
}

fn int_matrix(rng: &mut Rng64, r: usize, cols: usize) -> Mat<CQ> {
    Mat::from_fn(r, cols, |_, _| cq(rng.gen_range(-3..=3), 1))
}

fn unimodular(rng: &mut Rng64, m: usize) -> Mat<CQ> {
    let l = Mat::from_fn(m, m, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => cq(1, 1),
        std::cmp::Ordering::Greater => cq(rng.gen_range(-2..=2), 1),
        _ => cq(0, 1),
    });
    l.mul(&l.transpose())
}

fn verify(ctx: &mut Ctx, files: [&Option<PathBuf>; 4]) -> Result<Outcome> {
    let kind = ctx.symmetric_kind()?;
    let given = files.iter().filter(|f| f.is_some()).count();
    if given != 0 && given != 4 {
        bail!("verify-relations needs all of --x --y --b --g, or none");
    }
    if given == 4 {
        let data: Vec<MatrixData> = files.iter().map(|f| load(f.as_ref().unwrap())).collect::<Result<_>>()?;
        let n = data[0].float.ncols();
        let cert = if data.iter().all(|d| d.exact.is_some()) {
            let ex: Vec<Mat<CQ>> = data.iter().map(|d| d.exact.clone().unwrap()).collect();
            let g = GroupElement::from_matrix(GroupKind::GL, ex[3].rows(), ex[3].clone())?;
            verify_relations(&RelationInputs::new(ex[0].clone(), ex[1].clone(), ex[2].clone(), g), n, kind)?
        } else {
            let f: Vec<Mat<C64>> = data.iter().map(|d| Mat::from_cmat(&d.float)).collect();
            let g = GroupElement::from_matrix(GroupKind::GL, f[3].rows(), f[3].clone())?;
            verify_relations(&RelationInputs::new(f[0].clone(), f[1].clone(), f[2].clone(), g), n, kind)?
        };
        return Ok(Outcome::certs(vec![cert]));
    }
    let (m, n) = (4, 2);
    let mut out = Vec::new();
    for _ in 0..ctx.samples(5) {
        let rng = &mut ctx.rng;
        let g = GroupElement::from_matrix(GroupKind::GL, m, unimodular(rng, m))?;
        let mut inp = RelationInputs::new(int_matrix(rng, m, n), int_matrix(rng, m, n), int_matrix(rng, m, m), g);
        inp.second = Some((int_matrix(rng, m, n), int_matrix(rng, m, n)));
        out.push(verify_relations(&inp, n, kind)?);
    }
    Ok(Outcome::certs(out))
}

fn spherical(ctx: &mut Ctx, a: &Option<PathBuf>, beta: f64) -> Result<Outcome> {
    let (m, _) = ctx.trunc((1, 1));
    let a = ctx.hermitian(a, m, 0.6)?;
    let params = SphericalParams::new(a.clone(), beta)?;
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for i in 0..ctx.samples(20) {
        let w = 1 + i % 3;
        let g = gl_element(&sampling::random_diagonalizable(&mut ctx.rng, w, 0.4, 2.5))?;
        let phi = eval_spherical(&params, &g)?;
        let vac = vacuum_element(&GaussRepParams::gl(a.clone(), beta, w, 0), &g)?;
        worst = worst.max((phi - vac).norm());
        values.push(json!([phi.re, phi.im]));
    }
    let inputs = json!({"params": params.describe(), "seed": ctx.cfg.seed, "samples": values.len()});
    let cert = Certificate::new("spherical function equals vacuum integral", &inputs, worst, 1e-9);
    Ok(Outcome { certificates: vec![cert], artifacts: json!({"values": values}) })
}

fn gram(ctx: &mut Ctx, a: &Option<PathBuf>, beta: f64) -> Result<Outcome> {
    let (m, _) = ctx.trunc((1, 1));
    let params = SphericalParams::new(ctx.hermitian(a, m, 0.6)?, beta)?;
    let samples = (0..ctx.samples(40))
        .map(|i| gl_element(&sampling::random_invertible(&mut ctx.rng, 1 + i % 3, 0.5, 2.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::certs(vec![gram_psd_certify(&params, &samples, ctx.cfg.seed)?]))
}

fn motion(rng: &mut Rng64, k: usize, n: usize) -> Motion {
    let g = sampling::random_invertible(rng, k, 0.7, 1.4);
    Motion { h: sampling::random_complex(rng, k, n, 0.5), g }
}

fn gauss_params(
    ctx: &mut Ctx,
    a: &Option<PathBuf>,
    z: &Option<PathBuf>,
    beta: f64,
    degree: usize,
) -> Result<GaussRepParams> {
    let (m, k) = ctx.trunc((1, 2));
    let a = ctx.hermitian(a, m, 0.5)?;
    let mut params = GaussRepParams::gl(a, beta, k, ctx.degree(degree));
    if let Some(p) = z {
        params.z = load(p)?.float;
        params.n = params.z.nrows();
    }
    params.validate()?;
    Ok(params)
}

fn rep_matrix(
    ctx: &mut Ctx,
    a: &Option<PathBuf>,
    z: &Option<PathBuf>,
    g: &Option<PathBuf>,
    h: &Option<PathBuf>,
    beta: f64,
) -> Result<Outcome> {
    let params = gauss_params(ctx, a, z, beta, 3)?;
    let (k, n) = (params.k, params.n);
    let mut first = motion(&mut ctx.rng, k, n);
    if let Some(p) = g {
        first.g = load(p)?.float;
    }
    if let Some(p) = h {
        first.h = load(p)?.float;
    }
    let gen = RepGenerator::Motion(first.clone()).motion(k, n)?;
    let basis = params.basis()?;
    let op = rep_operator(&params, &RepGenerator::Motion(gen.clone()), &basis)?;
    let mut certs = Vec::new();
    for _ in 0..ctx.samples(3) {
        let other = motion(&mut ctx.rng, k, n);
        certs.push(rep_certify_pair(&params, &RepGenerator::Motion(gen.clone()), &RepGenerator::Motion(other), &basis)?);
    }
    Ok(Outcome { certificates: certs, artifacts: json!({"operator": op.to_json()}) })
}

fn commutant(
    ctx: &mut Ctx,
    a: &Option<PathBuf>,
    z: &Option<PathBuf>,
    u: &Option<PathBuf>,
    beta: f64,
) -> Result<Outcome> {
    let kind = ctx.kind(GroupKind::GL);
    let u_given = match u {
        Some(p) => Some(load(p)?.float),
        None => None,
    };
    let count = ctx.samples(4);
    if kind == GroupKind::GL {
        let params = gauss_params(ctx, a, z, beta, 2)?;
        let u = u_given.unwrap_or_else(|| eye(params.m) * c(0.0, 0.7).exp());
        let basis = params.basis()?;
        let samples: Vec<RepGenerator> =
            (0..count).map(|_| RepGenerator::Motion(motion(&mut ctx.rng, params.k, params.n))).collect();
        let report = commutant_check(&params, &u, &samples, &basis)?;
        let artifacts = json!({"commutator": report.commutator, "membership_defect": report.membership_defect});
        return Ok(Outcome { certificates: vec![report.certificate], artifacts });
    }
    let (m, k) = ctx.trunc((2, 1));
    let a = match a {
        Some(p) => load(p)?.float,
        None => CMat::zeros(m, m),
    };
    let params = SpORepParams::new(kind, a, k, ctx.degree(2))?;
    let u = u_given.unwrap_or_else(|| eye(m));
    let basis = params.basis()?;
    let mut samples = vec![SpOGenerator::Reflection];
    for _ in 0..count {
        let rng = &mut ctx.rng;
        let g = CMat::from_fn(k, k, |_, _| c(rng.gen_range(-1.0..1.0), 0.0)) + eye(k) * c(1.5, 0.0);
        samples.push(SpOGenerator::Diag(g));
        samples.push(SpOGenerator::GammaU(real_symmetric(rng, k, kind == GroupKind::O)));
    }
    let report = commutant_sp_o_check(&params, &u, &samples, &basis, None)?;
    let artifacts = json!({"commutator": report.commutator, "member": report.member});
    Ok(Outcome { certificates: vec![report.certificate], artifacts })
}

fn admissible(ctx: &mut Ctx, a: &Option<PathBuf>, kind: GroupKind, q: usize) -> Result<CMat> {
    Ok(match a {
        Some(p) => load(p)?.float,
        None if kind == GroupKind::Sp => sampling::random_sp_hermitian(&mut ctx.rng, q),
        None => sampling::random_o_hermitian(&mut ctx.rng, q.div_ceil(2)),
    })
}

fn canonical(ctx: &mut Ctx, a: &Option<PathBuf>) -> Result<Outcome> {
    let kind = ctx.symmetric_kind()?;
    let a = admissible(ctx, a, kind, 4)?;
    let form = canonical_form(&a, kind)?;
    let inputs = json!({"kind": kind.name(), "A": matrix_json(&a)});
    let r = form.r_for_original()?;
    let certs = vec![
        Certificate::new("canonical form", &inputs, form.residual, 1e-10),
        Certificate::new("canonical frame unitary", &inputs, form.unitarity, 1e-12),
        check_r_identities(&a, &r)?,
    ];
    let artifacts = json!({
        "spectrum": form.spectrum,
        "zero_block": form.zero_block,
        "d": matrix_json(&form.d),
        "R": matrix_json(&r),
    });
    Ok(Outcome { certificates: certs, artifacts })
}

fn gk(ctx: &mut Ctx, a: &Option<PathBuf>, z: &Option<PathBuf>) -> Result<Outcome> {
    let kind = ctx.symmetric_kind()?;
    let q_default = if kind == GroupKind::Sp { 1 } else { 2 };
    let (q_hint, k_hint) = ctx.trunc((q_default, 2 / q_default));
    let a = admissible(ctx, a, kind, q_hint)?;
    let q = a.nrows();
    let k = if q == q_hint { k_hint } else { (2 / q).max(1) };
    if q * k > crate::config::MAX_COORDS {
        bail!("truncation guard: q*K = {} exceeds {}", q * k, crate::config::MAX_COORDS);
    }
    let z = match z {
        Some(p) => load(p)?.float,
        None => sampling::random_invertible(&mut ctx.rng, q, 0.7, 1.3),
    };
    let params = GkParams::from_canonical(kind, a, z, k, ctx.degree(2))?;
    let basis = params.basis()?;
    let antisym = kind == GroupKind::O;
    let rng = &mut ctx.rng;
    let x1 = sampling::random_complex(rng, k, q, 0.4);
    let x2 = sampling::random_complex(rng, k, q, 0.4);
    let y1 = sampling::random_complex(rng, k, q, 0.4);
    let y2 = sampling::random_complex(rng, k, q, 0.4);
    let g = sampling::random_invertible(rng, k, 0.8, 1.25);
    let b = real_symmetric(rng, k, antisym);
    let gens = [
        GkGenerator::Delta(sampling::random_complex(rng, q, q, 0.5)),
        GkGenerator::Diag(g.clone()),
        GkGenerator::ThetaX(x1.clone()),
        GkGenerator::ThetaY(y1.clone()),
        GkGenerator::GammaU(b.clone()),
    ];
    let x = sampling::random_invertible(rng, q, 0.7, 1.3);
    let partner = params.equal_r_partner(&x)?;
    let certs = vec![
        gk_unitarity_check(&params, &gens, &basis)?,
        gk_relations_check(&params, &x1, &x2, &y1, &y2, &basis)?,
        r_dependence_check(&params, &partner, &g, &b, &basis)?,
    ];
    Ok(Outcome { certificates: certs, artifacts: json!({"params": params.describe()}) })
}

fn asf(ctx: &mut Ctx, a: &Option<PathBuf>, g: &Option<PathBuf>, beta: f64, count: usize) -> Result<Outcome> {
    let (m, _) = ctx.trunc((1, 1));
    let a = ctx.hermitian(a, m, 0.5)?;
    let g = match g {
        Some(p) => load(p)?.float,
        None => sampling::random_invertible(&mut ctx.rng, 2, 0.6, 1.6),
    };
    if inverse(&g).is_none() {
        bail!("g is singular");
    }
    let el = gl_element(&g)?;
    let params = GaussRepParams::gl(a, beta, el.window(), 0);
    let report = asf_estimate(&params, &el, None, count)?;
    let artifacts = json!({
        "values": report.values.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
        "stabilization_index": report.stabilization_index,
        "limit": [report.limit.re, report.limit.im],
        "oracle": [report.oracle.re, report.oracle.im],
    });
    Ok(Outcome { certificates: vec![report.certificate], artifacts })
}
