//! Operator identities of nearly Kähler geometry, checked as matrix
//! identities on a model.
//!
//! Each identity is an [`Expr`] pair over the model's cached operators. Its
//! Hermitian-adjoint dual and complex-conjugate dual are obtained by
//! rewriting the expressions and are evaluated as well.
//!
//! Constants that scale with ω are stated for ω = κ·iΣξ_k∧ξ̄_k; κ = 1 on the
//! flat model.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{fit, Fit, Residual};
use crate::models::{ModelTag, OperatorModel};
use crate::operator::{LinOp, OpError};
use crate::exterior::{Monomial, Parity};
use crate::scalar::Field;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error("operator {0} is not available on the {1} model")]
    MissingOperator(&'static str, ModelTag),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Op(#[from] OpError),
}

/// A named operator of the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    N,
    NBar,
    NStar,
    NBarStar,
    Del,
    DelBar,
    DelStar,
    DelBarStar,
    D,
    DStar,
    LOmega,
    LambdaOmega,
    LBigOmega,
    LambdaBigOmega,
    LBigOmegaBar,
    LambdaBigOmegaBar,
    Id,
}

impl Atom {
    fn name(self) -> &'static str {
        match self {
            Atom::N => "N",
            Atom::NBar => "N̄",
            Atom::NStar => "N*",
            Atom::NBarStar => "N̄*",
            Atom::Del => "∂",
            Atom::DelBar => "∂̄",
            Atom::DelStar => "∂*",
            Atom::DelBarStar => "∂̄*",
            Atom::D => "d",
            Atom::DStar => "d*",
            Atom::LOmega => "L_ω",
            Atom::LambdaOmega => "Λ_ω",
            Atom::LBigOmega => "L_Ω",
            Atom::LambdaBigOmega => "Λ_Ω",
            Atom::LBigOmegaBar => "L_Ω̄",
            Atom::LambdaBigOmegaBar => "Λ_Ω̄",
            Atom::Id => "Id",
        }
    }

    fn parity(self) -> Parity {
        match self {
            Atom::LOmega | Atom::LambdaOmega | Atom::Id => Parity::Even,
            _ => Parity::Odd,
        }
    }

    fn adjoint(self) -> Atom {
        use Atom::*;
        match self {
            N => NStar,
            NStar => N,
            NBar => NBarStar,
            NBarStar => NBar,
            Del => DelStar,
            DelStar => Del,
            DelBar => DelBarStar,
            DelBarStar => DelBar,
            D => DStar,
            DStar => D,
            LOmega => LambdaOmega,
            LambdaOmega => LOmega,
            LBigOmega => LambdaBigOmega,
            LambdaBigOmega => LBigOmega,
            LBigOmegaBar => LambdaBigOmegaBar,
            LambdaBigOmegaBar => LBigOmegaBar,
            Id => Id,
        }
    }

    fn conj(self) -> Atom {
        use Atom::*;
        match self {
            N => NBar,
            NBar => N,
            NStar => NBarStar,
            NBarStar => NStar,
            Del => DelBar,
            DelBar => Del,
            DelStar => DelBarStar,
            DelBarStar => DelStar,
            LBigOmega => LBigOmegaBar,
            LBigOmegaBar => LBigOmega,
            LambdaBigOmega => LambdaBigOmegaBar,
            LambdaBigOmegaBar => LambdaBigOmega,
            other => other,
        }
    }

    fn eval<F: Field>(self, m: &OperatorModel<F>) -> Result<LinOp<F>, IdentityError> {
        let diff = |f: fn(&crate::models::DiffOps<F>) -> &LinOp<F>| {
            m.diff.as_ref().map(|d| f(d).clone()).ok_or(IdentityError::MissingOperator(self.name(), m.tag))
        };
        Ok(match self {
            Atom::N => m.n.clone(),
            Atom::NBar => m.n_bar.clone(),
            Atom::NStar => m.n_star.clone(),
            Atom::NBarStar => m.n_bar_star.clone(),
            Atom::Del => diff(|d| &d.del)?,
            Atom::DelBar => diff(|d| &d.del_bar)?,
            Atom::DelStar => diff(|d| &d.del_star)?,
            Atom::DelBarStar => diff(|d| &d.del_bar_star)?,
            Atom::D => diff(|d| &d.d)?,
            Atom::DStar => diff(|d| &d.d_star)?,
            Atom::LOmega => m.l_omega.clone(),
            Atom::LambdaOmega => m.lambda_omega.clone(),
            Atom::LBigOmega => m.l_big_omega.clone(),
            Atom::LambdaBigOmega => m.lambda_big_omega.clone(),
            Atom::LBigOmegaBar => LinOp::mult(&m.big_omega.conj()),
            Atom::LambdaBigOmegaBar => LinOp::contraction(&m.big_omega.conj()),
            Atom::Id => LinOp::identity(),
        })
    }
}

/// Multiplication by an integer function of the bidegree.
#[derive(Clone, Debug, PartialEq)]
pub struct Grading {
    label: String,
    conj_label: String,
    table: [[i64; 4]; 4],
}

impl Grading {
    pub fn new(label: &str, conj_label: &str, f: impl Fn(i64, i64) -> i64) -> Self {
        let table = std::array::from_fn(|p| std::array::from_fn(|q| f(p as i64, q as i64)));
        Grading { label: label.into(), conj_label: conj_label.into(), table }
    }

    fn conj(&self) -> Grading {
        let table = std::array::from_fn(|p| std::array::from_fn(|q| self.table[q][p]));
        Grading { label: self.conj_label.clone(), conj_label: self.label.clone(), table }
    }
}

/// An operator expression over model atoms.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr<F> {
    Atom(Atom),
    Grading(Grading),
    Compose(Box<Expr<F>>, Box<Expr<F>>),
    /// Supercommutator.
    Bracket(Box<Expr<F>>, Box<Expr<F>>),
    /// {X, X*}.
    Laplacian(Box<Expr<F>>),
    Add(Box<Expr<F>>, Box<Expr<F>>),
    Sub(Box<Expr<F>>, Box<Expr<F>>),
    Scale(F, Box<Expr<F>>),
}

pub fn atom<F>(a: Atom) -> Expr<F> {
    Expr::Atom(a)
}

pub fn comp<F>(a: Expr<F>, b: Expr<F>) -> Expr<F> {
    Expr::Compose(Box::new(a), Box::new(b))
}

pub fn br<F>(a: Expr<F>, b: Expr<F>) -> Expr<F> {
    Expr::Bracket(Box::new(a), Box::new(b))
}

pub fn lap<F>(a: Expr<F>) -> Expr<F> {
    Expr::Laplacian(Box::new(a))
}

pub fn add<F>(a: Expr<F>, b: Expr<F>) -> Expr<F> {
    Expr::Add(Box::new(a), Box::new(b))
}

pub fn sub<F>(a: Expr<F>, b: Expr<F>) -> Expr<F> {
    Expr::Sub(Box::new(a), Box::new(b))
}

pub fn scale<F>(c: F, a: Expr<F>) -> Expr<F> {
    Expr::Scale(c, Box::new(a))
}

impl<F: Field> Expr<F> {
    fn parity(&self) -> Parity {
        match self {
            Expr::Atom(a) => a.parity(),
            Expr::Grading(_) | Expr::Laplacian(_) => Parity::Even,
            Expr::Compose(a, b) | Expr::Bracket(a, b) => a.parity().add(b.parity()),
            Expr::Add(a, _) | Expr::Sub(a, _) => a.parity(),
            Expr::Scale(_, a) => a.parity(),
        }
    }

    pub fn eval(&self, m: &OperatorModel<F>) -> Result<LinOp<F>, IdentityError> {
        Ok(match self {
            Expr::Atom(a) => a.eval(m)?,
            Expr::Grading(g) => LinOp::grading(|p, q| F::from_i64(g.table[p][q])),
            Expr::Compose(a, b) => a.eval(m)?.compose(&b.eval(m)?),
            Expr::Bracket(a, b) => a.eval(m)?.supercommutator(&b.eval(m)?)?,
            Expr::Laplacian(x) => {
                let v = x.eval(m)?;
                v.supercommutator(&x.adjoint().eval(m)?)?
            }
            Expr::Add(a, b) => a.eval(m)?.add(&b.eval(m)?),
            Expr::Sub(a, b) => a.eval(m)?.sub(&b.eval(m)?),
            Expr::Scale(c, a) => a.eval(m)?.scale(c),
        })
    }

    /// The Hermitian adjoint, written in terms of the adjoint atoms.
    pub fn adjoint(&self) -> Expr<F> {
        match self {
            Expr::Atom(a) => Expr::Atom(a.adjoint()),
            Expr::Grading(g) => Expr::Grading(g.clone()),
            Expr::Compose(a, b) => comp(b.adjoint(), a.adjoint()),
            Expr::Bracket(a, b) => br(b.adjoint(), a.adjoint()),
            Expr::Laplacian(x) => lap(x.as_ref().clone()),
            Expr::Add(a, b) => add(a.adjoint(), b.adjoint()),
            Expr::Sub(a, b) => sub(a.adjoint(), b.adjoint()),
            Expr::Scale(c, a) => scale(c.conj(), a.adjoint()),
        }
    }

    /// The complex conjugate, written in terms of the conjugate atoms.
    pub fn conj(&self) -> Expr<F> {
        match self {
            Expr::Atom(a) => Expr::Atom(a.conj()),
            Expr::Grading(g) => Expr::Grading(g.conj()),
            Expr::Compose(a, b) => comp(a.conj(), b.conj()),
            Expr::Bracket(a, b) => br(a.conj(), b.conj()),
            Expr::Laplacian(x) => lap(x.conj()),
            Expr::Add(a, b) => add(a.conj(), b.conj()),
            Expr::Sub(a, b) => sub(a.conj(), b.conj()),
            Expr::Scale(c, a) => scale(c.conj(), a.conj()),
        }
    }

    fn is_compound(&self) -> bool {
        matches!(self, Expr::Add(..) | Expr::Sub(..) | Expr::Scale(..))
    }
}

impl<F: Field> fmt::Display for Expr<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr<F>| if e.is_compound() { format!("({e})") } else { e.to_string() };
        match self {
            Expr::Atom(a) => f.write_str(a.name()),
            Expr::Grading(g) => write!(f, "({})", g.label),
            Expr::Compose(a, b) => write!(f, "{}{}", wrap(a), wrap(b)),
            Expr::Bracket(a, b) => {
                if a.parity().both_odd(b.parity()) {
                    write!(f, "{{{a}, {b}}}")
                } else {
                    write!(f, "[{a}, {b}]")
                }
            }
            Expr::Laplacian(x) => match x.as_ref() {
                Expr::Atom(a) => write!(f, "Δ_{}", a.name()),
                _ => write!(f, "Δ_{{{x}}}"),
            },
            Expr::Add(a, b) => write!(f, "{a} + {b}"),
            Expr::Sub(a, b) => write!(f, "{a} − {}", wrap(b)),
            Expr::Scale(c, a) if c.render() == "1" => write!(f, "{a}"),
            Expr::Scale(c, a) => write!(f, "({})·{}", c.render(), wrap(a)),
        }
    }
}

/// One identity lhs = c · rhs; `c` is `None` for plain equality.
#[derive(Clone, Debug)]
pub struct Identity<F> {
    pub name: &'static str,
    pub reference: &'static str,
    pub lhs: Expr<F>,
    pub rhs: Expr<F>,
    pub constant: Option<F>,
    /// Also check each of the sixteen blocks Λ^{p,q} separately.
    pub blockwise: bool,
    pub note: Option<String>,
}

/// Result of checking one identity.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    #[serde(rename = "paper_ref")]
    pub reference: String,
    pub lhs: String,
    pub rhs: String,
    pub model: ModelTag,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_constant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_constant: Option<String>,
    pub adjoint_dual: bool,
    pub conjugate_dual: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn pinned_residual<F: Field>(lhs: &LinOp<F>, rhs: &LinOp<F>, c: Option<&F>) -> Residual {
    let target = match c {
        Some(c) => rhs.scale(c),
        None => rhs.clone(),
    };
    Residual::of(lhs.sub(&target).entries())
}

/// Evaluates an identity and its two duals.
pub fn evaluate<F: Field>(id: &Identity<F>, m: &OperatorModel<F>, tol: f64) -> Result<IdentityCheck, IdentityError> {
    let l = id.lhs.eval(m)?;
    let r = id.rhs.eval(m)?;
    let res = pinned_residual(&l, &r, id.constant.as_ref());
    let fitted_constant = id.constant.as_ref().map(|_| match fit(l.entries(), r.entries()) {
        Fit::Constant { c, residual } if residual.passes::<F>(tol) => c.render(),
        Fit::Constant { .. } => "not proportional".to_string(),
        Fit::RhsZero { residual } if residual.passes::<F>(tol) => "undetermined (both sides vanish)".to_string(),
        Fit::RhsZero { .. } => "not proportional (right side vanishes)".to_string(),
    });

    let cbar = id.constant.as_ref().map(F::conj);
    let adj = pinned_residual(&id.lhs.adjoint().eval(m)?, &id.rhs.adjoint().eval(m)?, cbar.as_ref());
    let conj = pinned_residual(&id.lhs.conj().eval(m)?, &id.rhs.conj().eval(m)?, cbar.as_ref());

    let mut blocks = None;
    let mut blocks_ok = true;
    if id.blockwise {
        let target = match &id.constant {
            Some(c) => r.scale(c),
            None => r.clone(),
        };
        let diff = l.sub(&target);
        let mut good = 0;
        for p in 0..=3 {
            for q in 0..=3 {
                if Residual::of(diff.restrict(p, q).entries()).passes::<F>(tol) {
                    good += 1;
                }
            }
        }
        blocks_ok = good == 16;
        blocks = Some(format!("{good}/16 blocks Λ^{{p,q}} with zero residual"));
    }

    let adjoint_dual = adj.passes::<F>(tol);
    let conjugate_dual = conj.passes::<F>(tol);
    let rhs = match &id.constant {
        Some(c) if c.render() == "1" => id.rhs.to_string(),
        Some(c) => format!("({})·{}", c.render(), wrap_display(&id.rhs)),
        None => id.rhs.to_string(),
    };
    Ok(IdentityCheck {
        name: id.name.to_string(),
        reference: id.reference.to_string(),
        lhs: id.lhs.to_string(),
        rhs,
        model: m.tag,
        residual: res.value,
        fitted_constant,
        expected_constant: id.constant.as_ref().map(F::render),
        adjoint_dual,
        conjugate_dual,
        blocks,
        pass: res.passes::<F>(tol) && adjoint_dual && conjugate_dual && blocks_ok,
        note: id.note.clone(),
    })
}

fn wrap_display<F: Field>(e: &Expr<F>) -> String {
    if e.is_compound() {
        format!("({e})")
    } else {
        e.to_string()
    }
}

/// Evaluates a batch; references shared within the batch get the
/// statement appended so every record has its own.
fn run<F: Field>(ids: Vec<Identity<F>>, m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    let mut out: Vec<IdentityCheck> = ids.iter().map(|id| evaluate(id, m, tol)).collect::<Result<_, _>>()?;
    let shared: Vec<bool> =
        out.iter().map(|c| out.iter().filter(|o| o.reference == c.reference).count() > 1).collect();
    for ((c, s), id) in out.iter_mut().zip(shared).zip(&ids) {
        if s {
            c.reference = match &id.constant {
                Some(k) if k.is_zero() => format!("{} ({} = 0)", c.reference, id.lhs),
                _ => format!("{} ({} ∝ {})", c.reference, id.lhs, id.rhs),
            };
        }
    }
    Ok(out)
}

fn a<F>(x: Atom) -> Expr<F> {
    atom(x)
}

fn c<F: Field>(s: &str) -> F {
    F::from_scalar(&s.parse().expect("constant"))
}

fn i_times<F: Field>(x: &F) -> F {
    F::i().mul_ref(x)
}

fn require_ce<F: Field>(m: &OperatorModel<F>) -> Result<(), IdentityError> {
    match m.diff {
        Some(_) => Ok(()),
        None => Err(IdentityError::MissingOperator("∂", m.tag)),
    }
}

/// The four Kähler identities; requires ∂ω = ∂̄ω = 0.
pub fn check_kahler_identities<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    use Atom::*;
    require_ce(m)?;
    let diff = m.diff.as_ref().expect("checked");
    let del_w = Residual::of(diff.del.apply(&m.omega).coeffs());
    let delbar_w = Residual::of(diff.del_bar.apply(&m.omega).coeffs());
    if !(del_w.passes::<F>(tol) && delbar_w.passes::<F>(tol)) {
        return Err(IdentityError::Precondition("∂ω = ∂̄ω = 0 does not hold".into()));
    }
    let ik = i_times(&m.kappa);
    let reference = "Kähler identities for the Hodge components of d";
    let mk = |name, l: Expr<F>, r: Expr<F>, k: F| Identity {
        name,
        reference,
        lhs: l,
        rhs: r,
        constant: Some(k),
        blockwise: false,
        note: None,
    };
    run(
        vec![
            mk("kahler.lambda_del", br(a(LambdaOmega), a(Del)), a(DelBarStar), ik.clone()),
            mk("kahler.lambda_delbar", br(a(LambdaOmega), a(DelBar)), a(DelStar), ik.neg_ref()),
            mk("kahler.l_delstar", br(a(LOmega), a(DelStar)), a(DelBar), ik.clone()),
            mk("kahler.l_delbarstar", br(a(LOmega), a(DelBarStar)), a(Del), ik.neg_ref()),
        ],
        m,
        tol,
    )
}

/// [L_ω, Λ_ω] = κ²(p+q−3).
pub fn check_lefschetz<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    use Atom::*;
    let id = Identity {
        name: "lefschetz.h",
        reference: "Lefschetz relation [L_ω, Λ_ω] acting on (p,q)-forms",
        lhs: br(a(LOmega), a(LambdaOmega)),
        rhs: Expr::Grading(Grading::new("p+q−3", "p+q−3", |p, q| p + q - 3)),
        constant: Some(m.kappa.mul_ref(&m.kappa)),
        blockwise: true,
        note: Some("[Λ_ω, L_ω] = κ²(3−p−q)".into()),
    };
    run(vec![id], m, tol)
}

/// C² = iμ(p−q)L_ω with C = N + N̄ and μ = λ²/κ; on CE models also
/// C² = −{∂, ∂̄}.
pub fn check_c_squared<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    use Atom::*;
    let cc = || add(a(N), a(NBar));
    let mu = m.lambda.mul_ref(&m.lambda).div_ref(&m.kappa).map_err(|_| {
        IdentityError::Precondition("κ = 0".into())
    })?;
    let grading = Grading::new("p−q", "q−p", |p, q| p - q);
    let mut ids = vec![Identity {
        name: "c_squared.scalar",
        reference: "C² is the scalar operator iλ²(p−q)L_ω",
        lhs: comp(cc(), cc()),
        rhs: scale(F::i(), comp(Expr::Grading(grading), a(LOmega))),
        constant: Some(mu),
        blockwise: true,
        note: Some("constant is λ²/κ".into()),
    }];
    if m.diff.is_some() {
        ids.push(Identity {
            name: "c_squared.del_delbar",
            reference: "C² = −{∂, ∂̄}",
            lhs: comp(cc(), cc()),
            rhs: br(a(Del), a(DelBar)),
            constant: Some(F::from_i64(-1)),
            blockwise: false,
            note: None,
        });
    }
    run(ids, m, tol)
}

/// Laplacian relations; the flat model runs only Δ_{N+N̄} = Δ_N + Δ_N̄.
pub fn check_laplacian_relations<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    use Atom::*;
    let eq = |name, reference, lhs, rhs| Identity { name, reference, lhs, rhs, constant: None, blockwise: false, note: None };
    let c_op = || add(a(N), a(NBar));
    let mut ids = vec![eq(
        "laplacian.n_plus_nbar",
        "Δ_{N+N̄} = Δ_N + Δ_N̄",
        lap(c_op()),
        add(lap(a(N)), lap(a(NBar))),
    )];
    if m.diff.is_some() {
        let r = Grading::new("(3−p−q)(p−q)", "(3−p−q)(q−p)", |p, q| (3 - p - q) * (p - q));
        ids.push(Identity {
            name: "laplacian.r_scalar",
            reference: "Δ_∂ − Δ_∂̄ is multiplication by λ²(3−p−q)(p−q)",
            lhs: sub(lap(a(Del)), lap(a(DelBar))),
            rhs: Expr::Grading(r),
            constant: Some(m.lambda.mul_ref(&m.lambda)),
            blockwise: true,
            note: Some("constant is λ², with λ from dω = 3λ ReΩ".into()),
        });
        ids.push(eq(
            "laplacian.decomposition",
            "Δ_d = Δ_∂ + Δ_∂̄ + Δ_{N+N̄} − {∂, ∂̄*} − {∂̄, ∂*}",
            lap(a(D)),
            sub(
                sub(add(add(lap(a(Del)), lap(a(DelBar))), lap(c_op())), br(a(Del), a(DelBarStar))),
                br(a(DelBar), a(DelStar)),
            ),
        ));
        ids.push(eq(
            "laplacian.del_minus_delbar",
            "Δ_d = Δ_{∂−∂̄} + Δ_{N+N̄}",
            lap(a(D)),
            add(lap(sub(a(Del), a(DelBar))), lap(c_op())),
        ));
        ids.push(eq(
            "laplacian.sum_three",
            "Δ_d = Δ_{∂−∂̄} + Δ_N + Δ_N̄",
            lap(a(D)),
            add(add(lap(sub(a(Del), a(DelBar))), lap(a(N))), lap(a(NBar))),
        ));
        ids.push(eq(
            "laplacian.expanded",
            "Δ_d = Δ_∂ + Δ_∂̄ + Δ_N + Δ_N̄ − {∂*, ∂̄} − {∂, ∂̄*}",
            lap(a(D)),
            sub(
                sub(
                    add(add(add(lap(a(Del)), lap(a(DelBar))), lap(a(N))), lap(a(NBar))),
                    br(a(DelStar), a(DelBar)),
                ),
                br(a(Del), a(DelBarStar)),
            ),
        ));
    }
    run(ids, m, tol)
}

/// λ[L_Ω, Λ_ω] = κN.
pub fn check_n_bracket<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    use Atom::*;
    let id = Identity {
        name: "n_bracket",
        reference: "λ[L_Ω, Λ_ω] = N",
        lhs: scale(m.lambda.clone(), br(a(LBigOmega), a(LambdaOmega))),
        rhs: a(N),
        constant: Some(m.kappa.clone()),
        blockwise: false,
        note: Some("constant is κ".into()),
    };
    run(vec![id], m, tol)
}

/// The four vanishing brackets, the two chains of equalities, and the
/// expression of ∂² through L_Ω.
pub fn check_commutator_relations<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    use Atom::*;
    require_ce(m)?;
    let zero = |name, x: Atom, y: Atom| Identity {
        name,
        reference: "vanishing brackets {N*, ∂̄} = {N̄*, ∂} = {N, ∂̄*} = {N̄, ∂*} = 0",
        lhs: br(a(x), a(y)),
        rhs: a(Id),
        constant: Some(F::zero()),
        blockwise: false,
        note: None,
    };
    let eq = |name, reference, lhs, rhs, note: Option<&str>| Identity {
        name,
        reference,
        lhs,
        rhs,
        constant: Some(F::from_i64(-1)),
        blockwise: false,
        note: note.map(str::to_string),
    };
    let chain1 = "{∂̄*, ∂} = −{N, ∂*} = −{N̄*, ∂̄}";
    let chain2 = "{∂*, ∂̄} = −{N̄, ∂̄*} = −{N*, ∂}";
    run(
        vec![
            zero("commutators.nstar_delbar", NStar, DelBar),
            zero("commutators.nbarstar_del", NBarStar, Del),
            zero("commutators.n_delbarstar", N, DelBarStar),
            zero("commutators.nbar_delstar", NBar, DelStar),
            eq("commutators.chain1_n", chain1, br(a(DelBarStar), a(Del)), br(a(N), a(DelStar)), None),
            eq("commutators.chain1_nbarstar", chain1, br(a(DelBarStar), a(Del)), br(a(NBarStar), a(DelBar)), None),
            eq("commutators.chain2_nbar", chain2, br(a(DelStar), a(DelBar)), br(a(NBar), a(DelBarStar)), None),
            eq(
                "commutators.chain2_nstar",
                chain2,
                br(a(DelStar), a(DelBar)),
                br(a(NStar), a(Del)),
                Some("the variant −{N*, ∂*} has the wrong bidegree"),
            ),
            Identity {
                name: "commutators.del_squared",
                reference: "½{∂, ∂} = iλ{L_Ω, ∂*}",
                lhs: scale(c("1/2"), br(a(Del), a(Del))),
                rhs: br(a(LBigOmega), a(DelStar)),
                constant: Some(i_times(&m.lambda)),
                blockwise: false,
                note: Some("the factor λ follows from λ[L_Ω, Λ_ω] = N; λ⁻¹ fails".into()),
            },
            Identity {
                name: "commutators.l_bigomega_del",
                reference: "{L_Ω, ∂} = 0",
                lhs: br(a(LBigOmega), a(Del)),
                rhs: a(Id),
                constant: Some(F::zero()),
                blockwise: false,
                note: None,
            },
        ],
        m,
        tol,
    )
}

/// The bidegree components of d² = 0; on the flat model N² = N̄² = 0.
pub fn check_d_squared_components<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    use Atom::*;
    let reference = "components of d² = 0 by bidegree";
    let zero = |name, lhs: Expr<F>| Identity {
        name,
        reference,
        lhs,
        rhs: a(Id),
        constant: Some(F::zero()),
        blockwise: false,
        note: None,
    };
    let mut ids = vec![zero("d_squared.n_n", br(a(N), a(N))), zero("d_squared.nbar_nbar", br(a(NBar), a(NBar)))];
    if m.diff.is_some() {
        ids.extend([
            zero("d_squared.n_del", br(a(N), a(Del))),
            zero("d_squared.delbar_n_del_del", add(br(a(DelBar), a(N)), comp(a(Del), a(Del)))),
            zero("d_squared.n_nbar_del_delbar", add(br(a(N), a(NBar)), br(a(Del), a(DelBar)))),
            zero("d_squared.del_nbar_delbar_delbar", add(br(a(Del), a(NBar)), comp(a(DelBar), a(DelBar)))),
            zero("d_squared.nbar_delbar", br(a(NBar), a(DelBar))),
        ]);
    }
    run(ids, m, tol)
}

/// Brackets of N with L_ω and Λ_ω, and {N, N̄*} = 0.
pub fn check_kodaira_n<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    use Atom::*;
    let k2 = i_times(&m.kappa.mul_ref(&F::from_i64(2)));
    let reference = "Kodaira-type identities for N";
    let note = "the variant with L_ω and Λ_ω exchanged fails by bidegree";
    let mk = |name, l: Expr<F>, r: Expr<F>, k: F| Identity {
        name,
        reference,
        lhs: l,
        rhs: r,
        constant: Some(k),
        blockwise: false,
        note: Some(note.to_string()),
    };
    run(
        vec![
            mk("kodaira.l_nstar", br(a(LOmega), a(NStar)), a(NBar), k2.clone()),
            mk("kodaira.l_nbarstar", br(a(LOmega), a(NBarStar)), a(N), k2.neg_ref()),
            mk("kodaira.lambda_n", br(a(LambdaOmega), a(N)), a(NBarStar), k2.clone()),
            mk("kodaira.lambda_nbar", br(a(LambdaOmega), a(NBar)), a(NStar), k2.neg_ref()),
            Identity {
                name: "kodaira.n_nbarstar",
                reference: "{N, N̄*} = 0",
                lhs: br(a(N), a(NBarStar)),
                rhs: a(Id),
                constant: Some(F::zero()),
                blockwise: false,
                note: None,
            },
        ],
        m,
        tol,
    )
}

/// The two Kodaira-type statements with L_ω and Λ_ω exchanged,
/// [L_ω, N] = 2iN̄* and [Λ_ω, N*] = 2iN̄. Both fail in every model: the
/// two sides have different bidegrees.
pub fn literal_kodaira_statements<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    use Atom::*;
    let two_i = c::<F>("2 i");
    let reference = "Kodaira-type identities with L_ω and Λ_ω exchanged";
    run(
        vec![
            Identity {
                name: "kodaira_literal.l_n",
                reference,
                lhs: br(a(LOmega), a(N)),
                rhs: a(NBarStar),
                constant: Some(two_i.clone()),
                blockwise: false,
                note: None,
            },
            Identity {
                name: "kodaira_literal.lambda_nstar",
                reference,
                lhs: br(a(LambdaOmega), a(NStar)),
                rhs: a(NBar),
                constant: Some(two_i),
                blockwise: false,
                note: None,
            },
        ],
        m,
        tol,
    )
}

/// Every check that applies to the model, sorted by name.
pub fn run_identity_suite<F: Field>(m: &OperatorModel<F>, tol: f64) -> Result<Vec<IdentityCheck>, IdentityError> {
    let mut out = Vec::new();
    if m.diff.is_some() {
        out.extend(check_kahler_identities(m, tol)?);
        out.extend(check_commutator_relations(m, tol)?);
    }
    out.extend(check_lefschetz(m, tol)?);
    out.extend(check_c_squared(m, tol)?);
    out.extend(check_laplacian_relations(m, tol)?);
    out.extend(check_n_bracket(m, tol)?);
    out.extend(check_d_squared_components(m, tol)?);
    out.extend(check_kodaira_n(m, tol)?);
    out.sort_by(|x, y| x.name.cmp(&y.name));
    Ok(out)
}

/// Bidegree shift of a homogeneous operator, for reporting.
pub fn bidegree_of<F: Field>(op: &LinOp<F>) -> Option<(i32, i32)> {
    let s = op.bidegree_support();
    (s.len() == 1).then(|| s[0])
}

/// Image of one monomial under an expression.
pub fn apply_expr<F: Field>(e: &Expr<F>, m: &OperatorModel<F>, x: Monomial) -> Result<crate::exterior::Form<F>, IdentityError> {
    Ok(e.eval(m)?.apply(&crate::exterior::Form::monomial(x, F::one())))
}
