//! Harmonic forms, cohomology and Hodge numbers of a CE model.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::exterior::{Form, Monomial};
use crate::identities::IdentityError;
use crate::linalg::{nullspace, rank, Matrix, Residual};
use crate::models::{DiffOps, ModelTag, OperatorModel};
use crate::operator::LinOp;
use crate::report::Record;
use crate::scalar::Field;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonicError {
    #[error("harmonic analysis needs d; the {0} model has none")]
    NoDifferential(ModelTag),
    #[error("harmonic {0}-forms are not spanned by forms of pure bidegree")]
    ImpureComponent(usize),
    #[error(transparent)]
    Identity(#[from] IdentityError),
}

/// The Laplacians {X, X*} used here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaplacianKind {
    D,
    Del,
    DelBar,
    N,
    NBar,
    NPlusNBar,
    DelMinusDelBar,
}

impl LaplacianKind {
    pub const ALL: [LaplacianKind; 7] = [
        LaplacianKind::D,
        LaplacianKind::Del,
        LaplacianKind::DelBar,
        LaplacianKind::N,
        LaplacianKind::NBar,
        LaplacianKind::NPlusNBar,
        LaplacianKind::DelMinusDelBar,
    ];

    pub fn label(self) -> &'static str {
        match self {
            LaplacianKind::D => "Δ_d",
            LaplacianKind::Del => "Δ_∂",
            LaplacianKind::DelBar => "Δ_∂̄",
            LaplacianKind::N => "Δ_N",
            LaplacianKind::NBar => "Δ_N̄",
            LaplacianKind::NPlusNBar => "Δ_{N+N̄}",
            LaplacianKind::DelMinusDelBar => "Δ_{∂−∂̄}",
        }
    }
}

fn diff<F>(m: &OperatorModel<F>) -> Result<&DiffOps<F>, HarmonicError> {
    m.diff.as_ref().ok_or(HarmonicError::NoDifferential(m.tag))
}

fn lap_of<F: Field>(x: &LinOp<F>) -> LinOp<F> {
    x.anticommutator(&x.adjoint())
}

/// The Laplacian of the given kind.
pub fn laplacian<F: Field>(m: &OperatorModel<F>, kind: LaplacianKind) -> Result<LinOp<F>, HarmonicError> {
    Ok(match kind {
        LaplacianKind::N => lap_of(&m.n),
        LaplacianKind::NBar => lap_of(&m.n_bar),
        LaplacianKind::NPlusNBar => lap_of(&m.n.add(&m.n_bar)),
        LaplacianKind::D => lap_of(&diff(m)?.d),
        LaplacianKind::Del => lap_of(&diff(m)?.del),
        LaplacianKind::DelBar => lap_of(&diff(m)?.del_bar),
        LaplacianKind::DelMinusDelBar => {
            let d = diff(m)?;
            lap_of(&d.del.sub(&d.del_bar))
        }
    })
}

fn degree_basis(k: usize) -> Vec<Monomial> {
    Monomial::all().filter(|m| m.degree() == k).collect()
}

fn bidegree_basis(p: usize, q: usize) -> Vec<Monomial> {
    Monomial::all().filter(|m| m.p() == p && m.q() == q).collect()
}

/// Matrix of the operators stacked vertically, restricted to columns `cols`.
fn stacked<F: Field>(ops: &[&LinOp<F>], cols: &[Monomial]) -> Matrix<F> {
    ops.iter()
        .flat_map(|op| Monomial::all().map(move |r| cols.iter().map(|&c| op.entry(r, c).clone()).collect()))
        .collect()
}

fn kernel_on<F: Field>(ops: &[&LinOp<F>], cols: &[Monomial]) -> Vec<Form<F>> {
    nullspace(&stacked(ops, cols), cols.len())
        .into_iter()
        .map(|v| {
            let mut f = Form::zero();
            for (&m, c) in cols.iter().zip(v) {
                f.set(m, c);
            }
            f
        })
        .collect()
}

/// Basis of the kernel of `op` in degree k.
pub fn kernel<F: Field>(op: &LinOp<F>, k: usize) -> Vec<Form<F>> {
    kernel_on(&[op], &degree_basis(k))
}

/// Kernel bases in degrees 0..=6.
pub fn kernel_by_degree<F: Field>(op: &LinOp<F>) -> Vec<Vec<Form<F>>> {
    (0..=6).map(|k| kernel(op, k)).collect()
}

/// dim ker(d on Λ^k) − dim im(d on Λ^{k−1}), from ranks of d.
pub fn ce_cohomology_dims<F: Field>(d: &LinOp<F>) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=6).map(|k| rank(&stacked(&[d], &degree_basis(k)))).collect();
    (0..=6)
        .map(|k| degree_basis(k).len() - ranks[k] - if k > 0 { ranks[k - 1] } else { 0 })
        .collect()
}

/// h^{p,q}, indexed h[p][q].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct HodgeDiamond {
    pub h: [[usize; 4]; 4],
}

impl HodgeDiamond {
    pub fn get(&self, p: usize, q: usize) -> usize {
        self.h[p][q]
    }
}

impl fmt::Display for HodgeDiamond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..=6usize {
            let entries: Vec<String> = (0..=3usize)
                .rev()
                .filter(|&p| k >= p && k - p <= 3)
                .map(|p| self.h[p][k - p].to_string())
                .collect();
            let pad = 3 * (4 - entries.len());
            writeln!(f, "{}{}", " ".repeat(pad), entries.join("     "))?;
        }
        Ok(())
    }
}

/// h^{p,q} = dim(ker Δ_d ∩ Λ^{p,q}); errors unless these spaces span every
/// harmonic space.
pub fn hodge_diamond<F: Field>(m: &OperatorModel<F>) -> Result<HodgeDiamond, HarmonicError> {
    let delta = laplacian(m, LaplacianKind::D)?;
    let mut h = [[0; 4]; 4];
    for (p, row) in h.iter_mut().enumerate() {
        for (q, v) in row.iter_mut().enumerate() {
            *v = kernel_on(&[&delta], &bidegree_basis(p, q)).len();
        }
    }
    for k in 0..=6 {
        let split: usize = (0..=3).filter(|&p| k >= p && k - p <= 3).map(|p| h[p][k - p]).sum();
        if split != kernel(&delta, k).len() {
            return Err(HarmonicError::ImpureComponent(k));
        }
    }
    Ok(HodgeDiamond { h })
}

/// Everything computed by [`analyze`].
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicReport {
    pub model: ModelTag,
    pub name: String,
    pub betti: Vec<usize>,
    pub cohomology: Vec<usize>,
    pub diamond: HodgeDiamond,
    pub records: Vec<Record>,
}

fn max_residual<F: Field>(op: &LinOp<F>, forms: &[Form<F>]) -> Residual {
    forms.iter().fold(Residual::zero(), |acc, f| acc.max(Residual::of(op.apply(f).coeffs())))
}

/// The eight first-order conditions on harmonic forms, and
/// ker Δ_d = ker Δ_{∂−∂̄} ∩ ker Δ_N ∩ ker Δ_N̄ checked in both directions.
pub fn verify_harmonic_characterization<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<Record>, HarmonicError> {
    let d = diff(m)?;
    let delta = laplacian(m, LaplacianKind::D)?;
    let harmonic: Vec<Form<F>> = kernel_by_degree(&delta).into_iter().flatten().collect();
    let conditions: [(&str, &str, &LinOp<F>); 8] = [
        ("harmonic.vanishing.del", "∂", &d.del),
        ("harmonic.vanishing.del_bar", "∂̄", &d.del_bar),
        ("harmonic.vanishing.del_star", "∂*", &d.del_star),
        ("harmonic.vanishing.del_bar_star", "∂̄*", &d.del_bar_star),
        ("harmonic.vanishing.n", "N", &m.n),
        ("harmonic.vanishing.n_bar", "N̄", &m.n_bar),
        ("harmonic.vanishing.n_star", "N*", &m.n_star),
        ("harmonic.vanishing.n_bar_star", "N̄*", &m.n_bar_star),
    ];
    let mut out: Vec<Record> = conditions
        .iter()
        .map(|(name, sym, op)| {
            let r = max_residual(op, &harmonic);
            let reference = format!("harmonic forms are annihilated by {sym}");
            Record::new(name, &reference, m.tag, r.value, r.passes::<F>(tol))
                .with_detail(format!("{} harmonic forms", harmonic.len()))
        })
        .collect();

    let triple = [
        laplacian(m, LaplacianKind::DelMinusDelBar)?,
        laplacian(m, LaplacianKind::N)?,
        laplacian(m, LaplacianKind::NBar)?,
    ];
    let refs: Vec<&LinOp<F>> = triple.iter().collect();
    let forward = refs.iter().fold(Residual::zero(), |acc, op| acc.max(max_residual(op, &harmonic)));
    out.push(
        Record::new(
            "harmonic.intersection.forward",
            "ker Δ_d ⊆ ker Δ_{∂−∂̄} ∩ ker Δ_N ∩ ker Δ_N̄",
            m.tag,
            forward.value,
            forward.passes::<F>(tol),
        ),
    );
    let mut mismatch = 0;
    for k in 0..=6 {
        let inter = kernel_on(&refs, &degree_basis(k));
        let back = max_residual(&delta, &inter);
        let dims_equal = inter.len() == kernel(&delta, k).len();
        if !(back.passes::<F>(tol) && dims_equal) {
            mismatch += 1;
        }
    }
    out.push(
        Record::new(
            "harmonic.intersection.backward",
            "ker Δ_{∂−∂̄} ∩ ker Δ_N ∩ ker Δ_N̄ ⊆ ker Δ_d",
            m.tag,
            mismatch as f64,
            mismatch == 0,
        )
        .with_detail("residual counts degrees that disagree"),
    );
    Ok(out)
}

/// ω∧η = 0 and Λ_ω η = 0 for every harmonic 3-form η.
pub fn verify_primitivity<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<Record>, HarmonicError> {
    let delta = laplacian(m, LaplacianKind::D)?;
    let three = kernel(&delta, 3);
    let wedge = max_residual(&m.l_omega, &three);
    let contract = max_residual(&m.lambda_omega, &three);
    let detail = format!("{} harmonic 3-forms", three.len());
    Ok(vec![
        Record::new("harmonic.primitive.wedge", "harmonic 3-forms are primitive: ω∧η = 0", m.tag, wedge.value, wedge.passes::<F>(tol))
            .with_detail(detail.clone()),
        Record::new(
            "harmonic.primitive.contract",
            "harmonic 3-forms are primitive: Λ_ω η = 0",
            m.tag,
            contract.value,
            contract.passes::<F>(tol),
        )
        .with_detail(detail),
    ])
}

/// Structural checks: Δ_d self-adjoint with nonnegative diagonal, and
/// ker Δ_d = ker d ∩ ker d*.
fn verify_structure<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<Record>, HarmonicError> {
    let d = diff(m)?;
    let delta = laplacian(m, LaplacianKind::D)?;
    let herm = Residual::of(delta.sub(&delta.adjoint()).entries());
    let negative_diag = Monomial::all().filter(|&x| delta.entry(x, x).re_f64() < -tol).count();
    let mut mismatch = 0;
    for k in 0..=6 {
        if kernel_on(&[&d.d, &d.d_star], &degree_basis(k)).len() != kernel(&delta, k).len() {
            mismatch += 1;
        }
    }
    Ok(vec![
        Record::new(
            "harmonic.self_adjoint",
            "Δ_d is self-adjoint and nonnegative",
            m.tag,
            herm.value.max(negative_diag as f64),
            herm.passes::<F>(tol) && negative_diag == 0,
        ),
        Record::new("harmonic.d_dstar", "ker Δ_d = ker d ∩ ker d*", m.tag, mismatch as f64, mismatch == 0)
            .with_detail("residual counts degrees that disagree"),
    ])
}

/// Harmonic dimensions, cohomology, Hodge numbers and all checks.
pub fn analyze<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<HarmonicReport, HarmonicError> {
    let d = diff(m)?;
    let delta = laplacian(m, LaplacianKind::D)?;
    let betti: Vec<usize> = (0..=6).map(|k| kernel(&delta, k).len()).collect();
    let cohomology = ce_cohomology_dims(&d.d);
    let diff_count: usize = betti.iter().zip(&cohomology).map(|(a, b)| a.abs_diff(*b)).sum();
    let betti_text = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let mut records = vec![Record::new(
        "harmonic.betti",
        "dim ker Δ_d equals the Lie algebra cohomology in each degree",
        m.tag,
        diff_count as f64,
        diff_count == 0,
    )
    .with_detail(format!("harmonic ({}) cohomology ({})", betti_text(&betti), betti_text(&cohomology)))];

    let diamond = match hodge_diamond(m) {
        Ok(h) => h,
        Err(HarmonicError::ImpureComponent(k)) => {
            records.push(
                Record::new("harmonic.hodge_numbers", "harmonic forms split by bidegree", m.tag, 1.0, false)
                    .with_detail(format!("degree {k} is not spanned by pure forms")),
            );
            HodgeDiamond { h: [[0; 4]; 4] }
        }
        Err(e) => return Err(e),
    };
    if records.len() == 1 {
        let h = &diamond.h;
        let asym = (0..4).flat_map(|p| (0..4).map(move |q| (p, q))).filter(|&(p, q)| h[p][q] != h[q][p]).count();
        let bad = asym + h[3][0] + h[0][3];
        records.push(
            Record::new(
                "harmonic.hodge_numbers",
                "harmonic forms split by bidegree with h^{p,q} = h^{q,p} and h^{3,0} = h^{0,3} = 0",
                m.tag,
                bad as f64,
                bad == 0,
            )
            .with_detail(format!(
                "h21={} h12={} h30={} h03={}",
                h[2][1], h[1][2], h[3][0], h[0][3]
            )),
        );
    }
    records.extend(verify_harmonic_characterization(m, tol)?);
    records.extend(verify_primitivity(m, tol)?);
    records.extend(verify_structure(m, tol)?);
    records.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(HarmonicReport { model: m.tag, name: m.name.clone(), betti, cohomology, diamond, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_ce_complex, build_flat_model, StructureFile};
    use crate::scalar::Scalar;

    fn s3s3() -> OperatorModel<Scalar> {
        OperatorModel::from_ce(&build_ce_complex(&StructureFile::bundled_s3s3()).unwrap()).unwrap()
    }

    #[test]
    fn s3s3_harmonic_report() {
        let m = s3s3();
        let r = analyze(&m, 0.0).unwrap();
        assert_eq!(r.betti, vec![1, 0, 0, 2, 0, 0, 1]);
        assert_eq!(r.cohomology, r.betti);
        assert_eq!(r.diamond.get(2, 1), 1);
        assert_eq!(r.diamond.get(1, 2), 1);
        assert_eq!(r.diamond.get(3, 0), 0);
        assert_eq!(r.diamond.get(0, 0), 1);
        assert_eq!(r.diamond.get(3, 3), 1);
        for rec in &r.records {
            assert!(rec.pass, "{rec:?}");
        }
        assert_eq!(r.records.iter().filter(|x| x.name.starts_with("harmonic.vanishing.")).count(), 8);
    }

    #[test]
    fn laplacians_bigrading() {
        let m = s3s3();
        for k in [LaplacianKind::Del, LaplacianKind::DelBar, LaplacianKind::N, LaplacianKind::NBar, LaplacianKind::NPlusNBar] {
            assert!(laplacian(&m, k).unwrap().preserves_bigrading(), "{}", k.label());
        }
        assert!(!laplacian(&m, LaplacianKind::D).unwrap().preserves_bigrading());
    }

    #[test]
    fn abelian_cohomology_is_exterior_algebra() {
        let mut f = StructureFile::bundled_s3s3();
        f.structure_constants.clear();
        let m = OperatorModel::from_ce(&build_ce_complex::<Scalar>(&f).unwrap()).unwrap();
        let r = analyze(&m, 0.0).unwrap();
        assert_eq!(r.betti, vec![1, 6, 15, 20, 15, 6, 1]);
        assert_eq!(r.cohomology, r.betti);
        // Every form is harmonic, so primitivity and h^{3,0} = 0 fail.
        let failed: Vec<_> = r.records.iter().filter(|x| !x.pass).map(|x| x.name.as_str()).collect();
        assert_eq!(failed, ["harmonic.hodge_numbers", "harmonic.primitive.contract", "harmonic.primitive.wedge"]);
        assert_eq!(r.diamond.get(3, 0), 1);
    }

    #[test]
    fn flat_model_has_no_d() {
        let m = OperatorModel::from_flat(&build_flat_model::<Scalar>(&"1".parse().unwrap()).unwrap());
        assert_eq!(analyze(&m, 0.0).unwrap_err(), HarmonicError::NoDifferential(ModelTag::Flat));
    }

    #[test]
    fn diamond_text() {
        let r = analyze(&s3s3(), 0.0).unwrap();
        let text = r.diamond.to_string();
        assert_eq!(text.lines().count(), 7);
        assert_eq!(text.lines().nth(3).unwrap().split_whitespace().collect::<Vec<_>>(), ["0", "1", "1", "0"]);
    }
}
