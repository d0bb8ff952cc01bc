//! The two model complexes: the flat fiber model with N given on a unit
//! coframe, and Chevalley–Eilenberg complexes of 6-dimensional Lie algebras
//! carrying an SU(3)-structure.
//!
//! Conventions: de^i = −Σ_{j<k} c^i_{jk} e^j∧e^k, J acts on 1-forms by
//! J(e^j) = Σ_m J[m][j] e^m, and the (1,0)-coframe is ξ_k = e^{2k−1} − i J(e^{2k−1}).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{holomorphic_volume, kahler_form, Form, FormError, Monomial, Parity};
use crate::linalg::{fit, invert, Fit, Matrix, Residual};
use crate::operator::{LinOp, OpError};
use crate::scalar::{Field, Scalar, ScalarError};

/// The bundled S³×S³ structure file.
pub const S3S3_JSON: &str = include_str!("../models/s3s3.json");
/// The bundled abelian (flat ℂ³) structure file.
pub const FLAT_C3_JSON: &str = include_str!("../models/flat_c3.json");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("cannot read structure file: {0}")]
    Parse(String),
    #[error("dimension must be 6, got {0}")]
    Dim(usize),
    #[error("structure constant index out of range in entry {0:?}")]
    Index((usize, usize, usize)),
    #[error("structure constants not antisymmetric at c^{i}_{{{j}{k}}}")]
    NotAntisymmetric { i: usize, j: usize, k: usize },
    #[error("not a Lie algebra: {0}")]
    NotALieAlgebra(String),
    #[error("invalid complex structure: {0}")]
    InvalidComplexStructure(String),
    #[error("invalid SU(3)-structure: {0}")]
    InvalidSu3(String),
    #[error("λ must be a nonzero real number, got {0}")]
    BadLambda(String),
    #[error("d has a nonzero component of forbidden bidegree {0:?}")]
    ForbiddenBidegree(Vec<(i32, i32)>),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Op(#[from] OpError),
}

/// Which kind of model an operator set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ModelTag {
    #[serde(rename = "flat")]
    Flat,
    #[serde(rename = "CE")]
    Ce,
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelTag::Flat => "flat",
            ModelTag::Ce => "CE",
        })
    }
}

/// A number in a structure file: an integer or a scalar string.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    fn to_scalar(&self, disc: u32) -> Result<Scalar, ScalarError> {
        match self {
            Number::Int(n) => Ok(Scalar::ratio(*n, 1)),
            Number::Text(s) => Scalar::parse_in(s, disc),
        }
    }
}

fn default_disc() -> u32 {
    crate::scalar::DEFAULT_D
}

/// On-disk description of a Chevalley–Eilenberg model.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct StructureFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub provenance: Option<String>,
    pub dim: usize,
    /// Entries [i, j, k, c^i_{jk}], 1-based.
    pub structure_constants: Vec<(usize, usize, usize, Number)>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<Number>>,
    #[serde(default)]
    pub omega: Option<BTreeMap<String, String>>,
    #[serde(rename = "Omega")]
    pub big_omega: BTreeMap<String, String>,
    #[serde(rename = "field_D", default = "default_disc")]
    pub field_d: u32,
}

impl StructureFile {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    pub fn bundled_s3s3() -> Self {
        Self::from_json(S3S3_JSON).expect("bundled file parses")
    }

    pub fn bundled_flat_c3() -> Self {
        Self::from_json(FLAT_C3_JSON).expect("bundled file parses")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Replaces ω by the given form.
    pub fn with_omega(mut self, omega: &Form<Scalar>) -> Self {
        self.omega = Some(omega.terms().map(|(m, c)| (m.to_string(), c.to_string())).collect());
        self
    }
}

/// (ω, Ω, λ) on a unit (1,0)-coframe.
#[derive(Clone, Debug, PartialEq)]
pub struct SU3Structure<F> {
    pub omega: Form<F>,
    pub big_omega: Form<F>,
    /// Solved from dω = 3λ ReΩ when possible; always Some in the flat model.
    pub lambda: Option<F>,
}

impl<F: Field> SU3Structure<F> {
    /// Checks the algebraic conditions: ω real of type (1,1) with ω³ ≠ 0,
    /// Ω of type (3,0) with ⟨Ω, Ω⟩ = 1.
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidSu3(m.to_string()));
        if !self.omega.sub(&self.omega.conj()).is_zero() {
            return bad("ω is not real");
        }
        if !self.omega.sub(&self.omega.bigrade(1, 1)).is_zero() {
            return bad("ω is not of type (1,1)");
        }
        if self.omega.power(3).is_zero() {
            return bad("ω³ = 0");
        }
        if !self.big_omega.sub(&self.big_omega.bigrade(3, 0)).is_zero() {
            return bad("Ω is not of type (3,0)");
        }
        if !self.big_omega.inner(&self.big_omega).sub_ref(&F::one()).is_zero() {
            return bad("⟨Ω, Ω⟩ ≠ 1");
        }
        Ok(())
    }

    /// κ with ω = κ · iΣξ_k∧ξ̄_k, if ω has that form.
    pub fn kappa(&self) -> Option<F> {
        match fit(self.omega.coeffs(), kahler_form::<F>().coeffs()) {
            Fit::Constant { c, residual } if residual.passes::<F>(1e-12) => Some(c),
            _ => None,
        }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> SU3Structure<G> {
        SU3Structure {
            omega: self.omega.map(f),
            big_omega: self.big_omega.map(f),
            lambda: self.lambda.as_ref().map(f),
        }
    }
}

/// One structure constant c^i_{jk} (1-based, j < k).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: String,
}

/// The Chevalley–Eilenberg complex of invariant forms.
#[derive(Clone, Debug)]
pub struct CEComplex<F> {
    pub name: String,
    pub field_d: u32,
    pub constants: Vec<StructureConstant>,
    /// J acting on the real coframe.
    pub j: Matrix<F>,
    /// Row m holds generator m (ξ₁, ξ₂, ξ₃, ξ̄₁, ξ̄₂, ξ̄₃) in the real coframe.
    pub coframe: Matrix<F>,
    pub su3: SU3Structure<F>,
    pub d: LinOp<F>,
}

type Constants<F> = Vec<Vec<Vec<F>>>;

fn parse_constants<F: Field>(file: &StructureFile) -> Result<(Constants<F>, Vec<StructureConstant>), ModelError> {
    let mut exact: Vec<Vec<Vec<Scalar>>> = vec![vec![vec![Scalar::zero_in(file.field_d); 6]; 6]; 6];
    let mut seen = vec![vec![vec![false; 6]; 6]; 6];
    for (i, j, k, v) in &file.structure_constants {
        let (i, j, k) = (*i, *j, *k);
        if !(1..=6).contains(&i) || !(1..=6).contains(&j) || !(1..=6).contains(&k) || j == k {
            return Err(ModelError::Index((i, j, k)));
        }
        let v = v.to_scalar(file.field_d)?;
        let (i0, j0, k0) = (i - 1, j - 1, k - 1);
        let (a, b, v) = if j0 < k0 { (j0, k0, v) } else { (k0, j0, v.neg_ref()) };
        if seen[i0][a][b] && exact[i0][a][b] != v {
            return Err(ModelError::NotAntisymmetric { i, j, k });
        }
        seen[i0][a][b] = true;
        exact[i0][b][a] = v.neg_ref();
        exact[i0][a][b] = v;
    }
    let mut listed = Vec::new();
    for (i, plane) in exact.iter().enumerate() {
        for j in 0..6 {
            for k in j + 1..6 {
                if !Field::is_zero(&plane[j][k]) {
                    listed.push(StructureConstant { i: i + 1, j: j + 1, k: k + 1, value: plane[j][k].to_string() });
                }
            }
        }
    }
    let c = exact
        .iter()
        .map(|p| p.iter().map(|r| r.iter().map(F::from_scalar).collect()).collect())
        .collect();
    Ok((c, listed))
}

fn check_jacobi<F: Field>(c: &Constants<F>) -> Result<(), ModelError> {
    for l in 0..6 {
        for i in 0..6 {
            for j in i + 1..6 {
                for k in j + 1..6 {
                    let mut s = F::zero();
                    for m in 0..6 {
                        s = s
                            .add_ref(&c[m][j][k].mul_ref(&c[l][m][i]))
                            .add_ref(&c[m][k][i].mul_ref(&c[l][m][j]))
                            .add_ref(&c[m][i][j].mul_ref(&c[l][m][k]));
                    }
                    if !s.is_zero() {
                        return Err(ModelError::NotALieAlgebra(format!(
                            "Jacobi identity fails for (e{}, e{}, e{}) in component {}",
                            i + 1,
                            j + 1,
                            k + 1,
                            l + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn parse_j<F: Field>(file: &StructureFile) -> Result<Matrix<F>, ModelError> {
    if file.j.len() != 6 || file.j.iter().any(|r| r.len() != 6) {
        return Err(ModelError::InvalidComplexStructure("J must be 6×6".into()));
    }
    let mut out = Vec::new();
    for row in &file.j {
        let mut r = Vec::new();
        for x in row {
            let s = x.to_scalar(file.field_d)?;
            if !s.is_rational() {
                return Err(ModelError::InvalidComplexStructure("J entries must be rational".into()));
            }
            r.push(F::from_scalar(&s));
        }
        out.push(r);
    }
    let sq = crate::linalg::matmul(&out, &out);
    let t: Matrix<F> = (0..6).map(|a| (0..6).map(|b| out[b][a].clone()).collect()).collect();
    let tt = crate::linalg::matmul(&t, &out);
    for a in 0..6 {
        for b in 0..6 {
            let delta = if a == b { F::one() } else { F::zero() };
            if !sq[a][b].add_ref(&delta).is_zero() {
                return Err(ModelError::InvalidComplexStructure("J² ≠ −Id".into()));
            }
            if !tt[a][b].sub_ref(&delta).is_zero() {
                return Err(ModelError::InvalidComplexStructure("J is not orthogonal".into()));
            }
        }
    }
    Ok(out)
}

fn parse_form<F: Field>(entries: &BTreeMap<String, String>, disc: u32) -> Result<Form<F>, ModelError> {
    let f = Form::from_strings(entries.iter().map(|(a, b)| (a.as_str(), b.as_str())), disc)?;
    Ok(f.map(F::from_scalar))
}

/// Assembles d on the invariant-form algebra from a structure file.
pub fn build_ce_complex<F: Field>(file: &StructureFile) -> Result<CEComplex<F>, ModelError> {
    if file.dim != 6 {
        return Err(ModelError::Dim(file.dim));
    }
    Scalar::sqrt_d(file.field_d)?;
    let (c, constants) = parse_constants::<F>(file)?;
    check_jacobi(&c)?;
    let j = parse_j::<F>(file)?;

    let mut coframe: Matrix<F> = Vec::new();
    for k in 0..3 {
        let row: Vec<F> = (0..6)
            .map(|m| {
                let base = if m == 2 * k { F::one() } else { F::zero() };
                base.sub_ref(&F::i().mul_ref(&j[m][2 * k]))
            })
            .collect();
        coframe.push(row);
    }
    for k in 0..3 {
        let row = coframe[k].iter().map(F::conj).collect();
        coframe.push(row);
    }
    for (k, row) in coframe.iter().enumerate().take(3) {
        for m in 0..6 {
            let jm = (0..6).fold(F::zero(), |acc, a| acc.add_ref(&j[m][a].mul_ref(&row[a])));
            if !jm.sub_ref(&F::i().mul_ref(&row[m])).is_zero() {
                return Err(ModelError::InvalidComplexStructure(format!("ξ{} is not of type (1,0)", k + 1)));
            }
        }
    }
    let inv = invert(&coframe).ok_or_else(|| ModelError::InvalidComplexStructure("degenerate coframe".into()))?;

    let e: Vec<Form<F>> = (0..6)
        .map(|a| (0..6).fold(Form::zero(), |acc, m| acc.add(&Form::generator(m).scale(&inv[a][m]))))
        .collect();
    let de: Vec<Form<F>> = (0..6)
        .map(|i| {
            let mut acc = Form::zero();
            for a in 0..6 {
                for b in a + 1..6 {
                    if !c[i][a][b].is_structural_zero() {
                        acc = acc.sub(&e[a].wedge(&e[b]).scale(&c[i][a][b]));
                    }
                }
            }
            acc
        })
        .collect();
    let images: [Form<F>; 6] = std::array::from_fn(|m| {
        (0..6).fold(Form::zero(), |acc, a| acc.add(&de[a].scale(&coframe[m][a])))
    });
    let d = LinOp::derivation_extend(&images, Parity::Odd)?;
    if !d.compose(&d).is_zero() {
        return Err(ModelError::NotALieAlgebra("d² ≠ 0".into()));
    }

    let omega = match &file.omega {
        Some(w) => parse_form(w, file.field_d)?,
        None => kahler_form(),
    };
    let big_omega = parse_form(&file.big_omega, file.field_d)?;
    let mut su3 = SU3Structure { omega, big_omega, lambda: None };
    su3.validate()?;
    su3.lambda = solve_lambda(&d, &su3).ok();

    Ok(CEComplex {
        name: file.name.clone().unwrap_or_else(|| "unnamed".into()),
        field_d: file.field_d,
        constants,
        j,
        coframe,
        su3,
        d,
    })
}

/// λ from dω = 3λ ReΩ, or the reason it is not defined.
fn solve_lambda<F: Field>(d: &LinOp<F>, su3: &SU3Structure<F>) -> Result<F, String> {
    let domega = d.apply(&su3.omega);
    let three_re = su3.big_omega.re().scale(&F::from_i64(3));
    match fit(domega.coeffs(), three_re.coeffs()) {
        Fit::Constant { c, residual } if residual.passes::<F>(1e-9) => Ok(c),
        Fit::Constant { .. } => Err("dω is not proportional to ReΩ".into()),
        Fit::RhsZero { .. } => Err("ReΩ = 0".into()),
    }
}

/// Outcome of checking dω = 3λ ReΩ and d ImΩ = −2λ ω².
#[derive(Clone, Debug, Serialize)]
pub struct NkReport {
    pub model: String,
    pub lambda: Option<String>,
    pub residual_domega: f64,
    pub residual_dimomega: f64,
    pub pass: bool,
    pub reason: Option<String>,
}

/// Checks the nearly Kähler structure equations, solving for λ.
pub fn verify_nk<F: Field>(ce: &CEComplex<F>, tol: f64) -> NkReport {
    let su3 = &ce.su3;
    let domega = ce.d.apply(&su3.omega);
    let three_re = su3.big_omega.re().scale(&F::from_i64(3));
    let (lambda, r1) = match fit(domega.coeffs(), three_re.coeffs()) {
        Fit::Constant { c, residual } => (c, residual),
        Fit::RhsZero { residual } => (F::zero(), residual),
    };
    let lhs2 = ce.d.apply(&su3.big_omega.im());
    let rhs2 = su3.omega.power(2).scale(&F::from_i64(-2).mul_ref(&lambda));
    let r2 = Residual::of(lhs2.sub(&rhs2).coeffs());
    let small = |x: &F| if F::EXACT { Field::is_zero(x) } else { x.magnitude() <= tol };
    let mut reason = None;
    if !(r1.passes::<F>(tol) && r2.passes::<F>(tol)) {
        reason = Some("structure equations have nonzero residual".to_string());
    } else if small(&lambda) {
        reason = Some("λ = 0".to_string());
    } else if !small(&lambda.conj().sub_ref(&lambda)) {
        reason = Some("λ is not real".to_string());
    }
    NkReport {
        model: ce.name.clone(),
        lambda: Some(lambda.render()),
        residual_domega: r1.value,
        residual_dimomega: r2.value,
        pass: reason.is_none(),
        reason,
    }
}

/// Searches scales s in the grid for ω/s² passing [`verify_nk`].
pub fn calibrate_nk<F: Field>(template: &CEComplex<F>, grid: &[Scalar], tol: f64) -> Option<CEComplex<F>> {
    if verify_nk(template, tol).pass {
        return Some(template.clone());
    }
    for s in grid {
        let Ok(inv) = s.mul_ref(s).inv() else { continue };
        let mut cand = template.clone();
        cand.su3.omega = template.su3.omega.scale(&F::from_scalar(&inv));
        if verify_nk(&cand, tol).pass {
            cand.su3.lambda = solve_lambda(&cand.d, &cand.su3).ok();
            return Some(cand);
        }
    }
    None
}

/// The four bidegree components of d.
#[derive(Clone, Debug)]
pub struct HodgeSplit<F> {
    pub n: LinOp<F>,
    pub del: LinOp<F>,
    pub del_bar: LinOp<F>,
    pub n_bar: LinOp<F>,
}

/// Splits d = N + ∂ + ∂̄ + N̄ and checks nothing else is present.
pub fn hodge_split_d<F: Field>(d: &LinOp<F>) -> Result<HodgeSplit<F>, ModelError> {
    let split = HodgeSplit {
        n: d.bidegree_component(2, -1),
        del: d.bidegree_component(1, 0),
        del_bar: d.bidegree_component(0, 1),
        n_bar: d.bidegree_component(-1, 2),
    };
    let rest = d.sub(&split.n).sub(&split.del).sub(&split.del_bar).sub(&split.n_bar);
    if !rest.is_zero() {
        return Err(ModelError::ForbiddenBidegree(rest.bidegree_support()));
    }
    Ok(split)
}

/// The flat fiber model: N on a unit coframe, no differential.
#[derive(Clone, Debug)]
pub struct FlatNKModel<F> {
    pub lambda: F,
    pub su3: SU3Structure<F>,
    pub n: LinOp<F>,
    pub n_bar: LinOp<F>,
    pub l_omega: LinOp<F>,
    pub lambda_omega: LinOp<F>,
    pub l_big_omega: LinOp<F>,
    pub lambda_big_omega: LinOp<F>,
}

/// Ω = −i ξ₁∧ξ₂∧ξ₃, the phase matching dω = 3λ ReΩ for the table below.
pub fn standard_big_omega<F: Field>() -> Form<F> {
    holomorphic_volume::<F>().scale(&F::i().neg_ref())
}

/// Builds N from N(ξ̄₁) = λξ₂∧ξ₃, N(ξ̄₂) = −λξ₁∧ξ₃, N(ξ̄₃) = λξ₁∧ξ₂ and
/// N(ξ_k) = 0, with ω = iΣξ_k∧ξ̄_k.
pub fn build_flat_model<F: Field>(lambda: &Scalar) -> Result<FlatNKModel<F>, ModelError> {
    if Field::is_zero(lambda) || !lambda.is_real() {
        return Err(ModelError::BadLambda(lambda.to_string()));
    }
    let l = F::from_scalar(lambda);
    let x = |k| Form::<F>::xi(k);
    let mut images: [Form<F>; 6] = std::array::from_fn(|_| Form::zero());
    images[3] = x(2).wedge(&x(3)).scale(&l);
    images[4] = x(1).wedge(&x(3)).scale(&l.neg_ref());
    images[5] = x(1).wedge(&x(2)).scale(&l);
    let n = LinOp::derivation_extend(&images, Parity::Odd)?;
    let n_bar = n.conjugate();
    let su3 = SU3Structure { omega: kahler_form(), big_omega: standard_big_omega(), lambda: Some(l.clone()) };
    su3.validate()?;
    Ok(FlatNKModel {
        lambda: l,
        l_omega: LinOp::mult(&su3.omega),
        lambda_omega: LinOp::contraction(&su3.omega),
        l_big_omega: LinOp::mult(&su3.big_omega),
        lambda_big_omega: LinOp::contraction(&su3.big_omega),
        su3,
        n,
        n_bar,
    })
}

/// ∂, ∂̄, d and their adjoints, present on CE models only.
#[derive(Clone, Debug)]
pub struct DiffOps<F> {
    pub d: LinOp<F>,
    pub d_star: LinOp<F>,
    pub del: LinOp<F>,
    pub del_bar: LinOp<F>,
    pub del_star: LinOp<F>,
    pub del_bar_star: LinOp<F>,
}

/// All operators of a model, materialized once.
#[derive(Clone, Debug)]
pub struct OperatorModel<F> {
    pub tag: ModelTag,
    pub name: String,
    /// The constant of dω = 3λ ReΩ (the table constant in the flat model).
    pub lambda: F,
    /// ω = κ · iΣξ_k∧ξ̄_k.
    pub kappa: F,
    pub omega: Form<F>,
    pub big_omega: Form<F>,
    pub l_omega: LinOp<F>,
    pub lambda_omega: LinOp<F>,
    pub l_big_omega: LinOp<F>,
    pub lambda_big_omega: LinOp<F>,
    pub n: LinOp<F>,
    pub n_bar: LinOp<F>,
    pub n_star: LinOp<F>,
    pub n_bar_star: LinOp<F>,
    pub diff: Option<DiffOps<F>>,
}

impl<F: Field> OperatorModel<F> {
    pub fn from_flat(m: &FlatNKModel<F>) -> Self {
        OperatorModel {
            tag: ModelTag::Flat,
            name: "flat fiber model".into(),
            lambda: m.lambda.clone(),
            kappa: F::one(),
            omega: m.su3.omega.clone(),
            big_omega: m.su3.big_omega.clone(),
            l_omega: m.l_omega.clone(),
            lambda_omega: m.lambda_omega.clone(),
            l_big_omega: m.l_big_omega.clone(),
            lambda_big_omega: m.lambda_big_omega.clone(),
            n_star: m.n.adjoint(),
            n_bar_star: m.n_bar.adjoint(),
            n: m.n.clone(),
            n_bar: m.n_bar.clone(),
            diff: None,
        }
    }

    /// Splits d and materializes every operator. λ may be zero here (the
    /// abelian model); ω must be a multiple of iΣξ_k∧ξ̄_k.
    pub fn from_ce(ce: &CEComplex<F>) -> Result<Self, ModelError> {
        let split = hodge_split_d(&ce.d)?;
        let lambda = solve_lambda(&ce.d, &ce.su3).or_else(|e| {
            if ce.d.apply(&ce.su3.omega).is_zero() {
                Ok(F::zero())
            } else {
                Err(ModelError::InvalidSu3(e))
            }
        })?;
        let kappa = ce
            .su3
            .kappa()
            .ok_or_else(|| ModelError::InvalidSu3("ω is not a multiple of iΣξ_k∧ξ̄_k".into()))?;
        let omega = ce.su3.omega.clone();
        let big_omega = ce.su3.big_omega.clone();
        Ok(OperatorModel {
            tag: ModelTag::Ce,
            name: ce.name.clone(),
            lambda,
            kappa,
            l_omega: LinOp::mult(&omega),
            lambda_omega: LinOp::contraction(&omega),
            l_big_omega: LinOp::mult(&big_omega),
            lambda_big_omega: LinOp::contraction(&big_omega),
            omega,
            big_omega,
            n_star: split.n.adjoint(),
            n_bar_star: split.n_bar.adjoint(),
            n: split.n,
            n_bar: split.n_bar,
            diff: Some(DiffOps {
                d_star: ce.d.adjoint(),
                d: ce.d.clone(),
                del_star: split.del.adjoint(),
                del_bar_star: split.del_bar.adjoint(),
                del: split.del,
                del_bar: split.del_bar,
            }),
        })
    }
}

impl OperatorModel<Scalar> {
    pub fn to_float(&self) -> OperatorModel<Complex64> {
        let op = |a: &LinOp<Scalar>| a.to_float();
        OperatorModel {
            tag: self.tag,
            name: self.name.clone(),
            lambda: self.lambda.to_complex(),
            kappa: self.kappa.to_complex(),
            omega: self.omega.to_float(),
            big_omega: self.big_omega.to_float(),
            l_omega: op(&self.l_omega),
            lambda_omega: op(&self.lambda_omega),
            l_big_omega: op(&self.l_big_omega),
            lambda_big_omega: op(&self.lambda_big_omega),
            n: op(&self.n),
            n_bar: op(&self.n_bar),
            n_star: op(&self.n_star),
            n_bar_star: op(&self.n_bar_star),
            diff: self.diff.as_ref().map(|d| DiffOps {
                d: op(&d.d),
                d_star: op(&d.d_star),
                del: op(&d.del),
                del_bar: op(&d.del_bar),
                del_star: op(&d.del_star),
                del_bar_star: op(&d.del_bar_star),
            }),
        }
    }
}

/// Image of a single monomial, for spot checks.
pub fn apply_to<F: Field>(op: &LinOp<F>, m: Monomial) -> Form<F> {
    op.apply(&Form::monomial(m, F::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = Scalar;

    fn sc(x: &str) -> S {
        x.parse().unwrap()
    }

    #[test]
    fn flat_model_table() {
        let m = build_flat_model::<S>(&sc("1")).unwrap();
        assert_eq!(m.n.apply(&Form::xi_bar(2)), Form::xi(1).wedge(&Form::xi(3)).neg());
        assert!(m.n.apply(&Form::one()).is_zero());
        assert!(m.n.apply(&Form::xi(1)).is_zero());
        assert!(build_flat_model::<S>(&sc("0")).is_err());
        assert!(build_flat_model::<S>(&sc("i")).is_err());
    }

    #[test]
    fn flat_nijenhuis_squares() {
        let m = build_flat_model::<S>(&sc("1")).unwrap();
        // N̄N(ξ̄₁) = −iλ² ξ̄₁∧ω with ω = iΣξξ̄.
        let lhs = m.n_bar.apply(&m.n.apply(&Form::xi_bar(1)));
        assert_eq!(lhs, Form::xi_bar(1).wedge(&m.su3.omega).scale(&sc("-i")));
        let w = m.n.apply(&m.su3.omega);
        assert_eq!(w, m.su3.big_omega.scale(&sc("3")));
    }

    #[test]
    fn bundled_s3s3_is_nearly_kahler() {
        let ce = build_ce_complex::<S>(&StructureFile::bundled_s3s3()).unwrap();
        let rep = verify_nk(&ce, 0.0);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.lambda.as_deref(), Some("1/3"));
        let split = hodge_split_d(&ce.d).unwrap();
        // N equals the table with λ = 1/3.
        let flat = build_flat_model::<S>(&sc("1/3")).unwrap();
        assert_eq!(split.n, flat.n);
        assert_eq!(ce.su3.kappa(), Some(sc("1/2")));
    }

    #[test]
    fn scaled_omega_fails_and_is_recalibrated() {
        let ce = build_ce_complex::<S>(&StructureFile::bundled_s3s3()).unwrap();
        let mut bad = ce.clone();
        bad.su3.omega = ce.su3.omega.scale(&sc("2"));
        assert!(!verify_nk(&bad, 0.0).pass);
        bad.su3.omega = ce.su3.omega.scale(&sc("3"));
        let grid: Vec<S> = ["1/2", "1", "r", "2"].iter().map(|x| sc(x)).collect();
        let fixed = calibrate_nk(&bad, &grid, 0.0).unwrap();
        assert_eq!(fixed.su3.omega, ce.su3.omega);
        let same = calibrate_nk(&ce, &grid, 0.0).unwrap();
        assert_eq!(same.su3.omega, ce.su3.omega);
    }

    #[test]
    fn abelian_model() {
        let ce = build_ce_complex::<S>(&StructureFile::bundled_flat_c3()).unwrap();
        assert!(ce.d.is_zero());
        let rep = verify_nk(&ce, 0.0);
        assert!(!rep.pass);
        assert_eq!(rep.reason.as_deref(), Some("λ = 0"));
        let m = OperatorModel::from_ce(&ce).unwrap();
        assert!(m.n.is_zero() && m.n_bar.is_zero());
        assert!(Field::is_zero(&m.lambda));
    }

    #[test]
    fn structure_file_errors() {
        let mut f = StructureFile::bundled_s3s3();
        f.structure_constants[0].3 = Number::Text("1".into());
        assert!(matches!(build_ce_complex::<S>(&f), Err(ModelError::NotALieAlgebra(_))));
        let mut f = StructureFile::bundled_s3s3();
        f.j[0][1] = Number::Int(2);
        assert!(matches!(build_ce_complex::<S>(&f), Err(ModelError::InvalidComplexStructure(_))));
        let mut f = StructureFile::bundled_s3s3();
        f.structure_constants.push((1, 5, 3, Number::Text("-1".into())));
        assert!(matches!(build_ce_complex::<S>(&f), Err(ModelError::NotAntisymmetric { .. })));
        let mut f = StructureFile::bundled_s3s3();
        f.structure_constants.push((7, 1, 2, Number::Int(1)));
        assert!(matches!(build_ce_complex::<S>(&f), Err(ModelError::Index(_))));
        assert!(StructureFile::from_json("{").is_err());
    }

    #[test]
    fn float_build_matches() {
        let ce = build_ce_complex::<Complex64>(&StructureFile::bundled_s3s3()).unwrap();
        let rep = verify_nk(&ce, 1e-10);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.residual_domega <= 1e-12);
    }
}
