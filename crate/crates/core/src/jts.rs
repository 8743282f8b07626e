//! The Jordan triple system on finite products of type-I matrix spaces.
//!
//! A factor `I(p,q)` is the space of complex `p x q` matrices with the triple
//! product `{x,y,z} = x y* z + z y* x`. Elements of a product domain carry one
//! block per factor; operators are assembled as dense matrices acting on the
//! vectorized element (column-major inside a block, blocks concatenated in
//! factor order).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::numerics::{fro, CMatrix, C64};

/// One irreducible type-I factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    p: usize,
    q: usize,
    genus: usize,
    rank: usize,
}

impl Factor {
    /// Builds `I(p,q)` and validates its genus against the trace form of a
    /// primitive tripotent.
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::Invalid(format!("factor I({p},{q}) needs p, q >= 1")));
        }
        let factor = Factor {
            p,
            q,
            genus: p + q,
            rank: p.min(q),
        };
        let single = Domain {
            factors: vec![factor],
            total_dim: p * q,
        };
        let c = Element::unit(&single, 0, 0, 0);
        let tr = trace_form(&single, &c, &c)?;
        if (tr.re - factor.genus as f64).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Invalid(format!(
                "genus validation failed for I({p},{q}): tr T(c,c) = {tr}"
            )));
        }
        Ok(factor)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.p * self.q
    }
}

/// A Hermitian positive Jordan triple system given as a product of type-I
/// factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    factors: Vec<Factor>,
    total_dim: usize,
}

impl Domain {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("a domain needs at least one factor".into()));
        }
        let total_dim = factors.iter().map(Factor::dim).sum();
        Ok(Domain { factors, total_dim })
    }

    /// `I(p,q)`.
    pub fn type1(p: usize, q: usize) -> Result<Self> {
        Domain::new(vec![Factor::new(p, q)?])
    }

    /// Complex hyperbolic space of dimension `n`, realized as `I(1,n)`.
    pub fn complex_hyperbolic(n: usize) -> Result<Self> {
        Domain::type1(1, n)
    }

    /// The polydisk `I(1,1)^l`.
    pub fn polydisk(l: usize) -> Result<Self> {
        Domain::new(vec![Factor::new(1, 1)?; l])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Total rank (sum of factor ranks).
    pub fn rank(&self) -> usize {
        self.factors.iter().map(Factor::rank).sum()
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1
    }

    /// Offset of factor `i` inside the vectorized element.
    pub fn offset(&self, i: usize) -> usize {
        self.factors[..i].iter().map(Factor::dim).sum()
    }

    /// Factor `i` as a domain of its own.
    pub fn factor_domain(&self, i: usize) -> Domain {
        let f = self.factors[i];
        Domain {
            factors: vec![f],
            total_dim: f.dim(),
        }
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        let shapes_ok = x.blocks.len() == self.factors.len()
            && x.blocks
                .iter()
                .zip(&self.factors)
                .all(|(b, f)| b.shape() == (f.p, f.q));
        if !shapes_ok {
            return Err(Error::ShapeMismatch {
                expected: self.to_string(),
                found: x.shape_string(),
            });
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("element"));
        }
        Ok(())
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.len() == 1 {
            let fac = self.factors[0];
            return write!(f, "type1:{},{}", fac.p, fac.q);
        }
        write!(f, "product:")?;
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "type1:{},{}", fac.p, fac.q)?;
        }
        Ok(())
    }
}

fn parse_type1(s: &str) -> Result<Factor> {
    let body = s
        .strip_prefix("type1:")
        .ok_or_else(|| Error::Parse(format!("expected `type1:<p>,<q>`, got `{s}`")))?;
    let (p, q) = body
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected `<p>,<q>` in `{s}`")))?;
    let p: usize = p
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad p in `{s}`")))?;
    let q: usize = q
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad q in `{s}`")))?;
    Factor::new(p, q).map_err(|e| Error::Parse(e.to_string()))
}

impl FromStr for Domain {
    type Err = Error;

    /// `type1:<p>,<q>` or `product:type1:<p>,<q>;type1:<p>,<q>;...`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("product:") {
            let factors = rest
                .split(';')
                .map(|part| parse_type1(part.trim()))
                .collect::<Result<Vec<_>>>()?;
            Domain::new(factors).map_err(|e| Error::Parse(e.to_string()))
        } else {
            Domain::new(vec![parse_type1(s)?])
        }
    }
}

/// A point of the ambient space (equivalently a tangent vector at the origin).
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    blocks: Vec<CMatrix>,
}

impl Element {
    pub fn new(d: &Domain, blocks: Vec<CMatrix>) -> Result<Self> {
        let x = Element { blocks };
        d.check(&x)?;
        Ok(x)
    }

    pub fn zeros(d: &Domain) -> Self {
        Element {
            blocks: d.factors.iter().map(|f| CMatrix::zeros(f.p, f.q)).collect(),
        }
    }

    /// The matrix unit `E_{row,col}` in factor `factor`.
    pub fn unit(d: &Domain, factor: usize, row: usize, col: usize) -> Self {
        let mut x = Element::zeros(d);
        x.blocks[factor][(row, col)] = C64::new(1.0, 0.0);
        x
    }

    /// The `k`-th coordinate basis vector in vectorization order.
    pub fn basis(d: &Domain, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); d.total_dim];
        v[k] = C64::new(1.0, 0.0);
        Element::from_vec_unchecked(d, &v)
    }

    pub fn from_vec(d: &Domain, v: &[C64]) -> Result<Self> {
        if v.len() != d.total_dim {
            return Err(Error::ShapeMismatch {
                expected: format!("{} coordinates", d.total_dim),
                found: format!("{} coordinates", v.len()),
            });
        }
        let x = Element::from_vec_unchecked(d, v);
        d.check(&x)?;
        Ok(x)
    }

    fn from_vec_unchecked(d: &Domain, v: &[C64]) -> Self {
        let mut off = 0;
        let blocks = d
            .factors
            .iter()
            .map(|f| {
                let b = CMatrix::from_column_slice(f.p, f.q, &v[off..off + f.dim()]);
                off += f.dim();
                b
            })
            .collect();
        Element { blocks }
    }

    /// Reshapes a coordinate vector like `self`.
    pub fn like(&self, v: &[C64]) -> Element {
        let mut off = 0;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let n = b.len();
                let out = CMatrix::from_column_slice(b.nrows(), b.ncols(), &v[off..off + n]);
                off += n;
                out
            })
            .collect();
        Element { blocks }
    }

    /// Column-major inside each block, blocks concatenated.
    pub fn to_vec(&self) -> Vec<C64> {
        self.blocks
            .iter()
            .flat_map(|b| b.as_slice().iter().copied())
            .collect()
    }

    pub fn to_dvector(&self) -> DVector<C64> {
        DVector::from_vec(self.to_vec())
    }

    /// Real coordinates `(x_1, y_1, ..., x_n, y_n)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.to_vec().iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_real(d: &Domain, r: &[f64]) -> Result<Self> {
        if r.len() != 2 * d.total_dim {
            return Err(Error::ShapeMismatch {
                expected: format!("{} real coordinates", 2 * d.total_dim),
                found: format!("{} real coordinates", r.len()),
            });
        }
        let v: Vec<C64> = r.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        Element::from_vec(d, &v)
    }

    /// The block of factor `i` as an element of [`Domain::factor_domain`].
    pub fn factor_element(&self, i: usize) -> Element {
        Element {
            blocks: vec![self.blocks[i].clone()],
        }
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut CMatrix {
        &mut self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<CMatrix>) -> Self {
        Element { blocks }
    }

    pub fn is_finite(&self) -> bool {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Euclidean (Frobenius) norm over all coordinates.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| fro(b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    pub fn conj(&self) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| b.map(|z| z.conj())).collect(),
        }
    }

    fn shape_string(&self) -> String {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{}x{}", b.nrows(), b.ncols()))
            .collect();
        format!("blocks [{}]", parts.join(", "))
    }

    fn zip_with(&self, other: &Element, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Element {
        assert_eq!(
            self.blocks.len(),
            other.blocks.len(),
            "element block count mismatch"
        );
        Element {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| -b).collect(),
        }
    }
}

impl Mul<f64> for &Element {
    type Output = Element;
    fn mul(self, s: f64) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| b * C64::new(s, 0.0)).collect(),
        }
    }
}

impl Mul<f64> for Element {
    type Output = Element;
    fn mul(self, s: f64) -> Element {
        &self * s
    }
}

/// A complex-linear operator on the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub matrix: CMatrix,
}

impl LinearMap {
    pub fn apply(&self, x: &Element) -> Element {
        x.like((&self.matrix * x.to_dvector()).as_slice())
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn identity(d: &Domain) -> Self {
        LinearMap {
            matrix: CMatrix::identity(d.total_dim, d.total_dim),
        }
    }
}

/// A complex-antilinear operator stored as "conjugate, then multiply".
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearMap {
    pub matrix: CMatrix,
}

impl AntilinearMap {
    pub fn apply(&self, y: &Element) -> Element {
        let v = y.conj().to_dvector();
        y.like((&self.matrix * v).as_slice())
    }

    /// `self ∘ other`, which is complex-linear.
    pub fn compose(&self, other: &AntilinearMap) -> LinearMap {
        LinearMap {
            matrix: &self.matrix * other.matrix.map(|z| z.conj()),
        }
    }
}

fn check_all(d: &Domain, xs: &[&Element]) -> Result<()> {
    xs.iter().try_for_each(|x| d.check(x))
}

fn triple_block(x: &CMatrix, y: &CMatrix, z: &CMatrix) -> CMatrix {
    let ys = y.adjoint();
    x * &ys * z + z * &ys * x
}

fn triple_unchecked(x: &Element, y: &Element, z: &Element) -> Element {
    let blocks = x
        .blocks
        .iter()
        .zip(&y.blocks)
        .zip(&z.blocks)
        .map(|((a, b), c)| triple_block(a, b, c))
        .collect();
    Element { blocks }
}

/// `{x,y,z} = x y* z + z y* x` in every factor.
pub fn triple_product(d: &Domain, x: &Element, y: &Element, z: &Element) -> Result<Element> {
    check_all(d, &[x, y, z])?;
    Ok(triple_unchecked(x, y, z))
}

fn assemble(d: &Domain, column: impl Fn(&Element) -> Element) -> CMatrix {
    let n = d.total_dim;
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n {
        let image = column(&Element::basis(d, k)).to_vec();
        m.set_column(k, &DVector::from_vec(image));
    }
    m
}

/// `T(x,y) w = {x,y,w}`.
pub fn t_operator(d: &Domain, x: &Element, y: &Element) -> Result<LinearMap> {
    check_all(d, &[x, y])?;
    Ok(LinearMap {
        matrix: assemble(d, |w| triple_unchecked(x, y, w)),
    })
}

/// `Q(x) y = ½ {x,y,x} = x y* x`.
pub fn q_apply(d: &Domain, x: &Element, y: &Element) -> Result<Element> {
    check_all(d, &[x, y])?;
    Ok(triple_unchecked(x, y, x) * 0.5)
}

/// The antilinear operator `Q(x)`.
pub fn q_operator(d: &Domain, x: &Element) -> Result<AntilinearMap> {
    d.check(x)?;
    // basis vectors are real, so column k is Q(x) e_k
    Ok(AntilinearMap {
        matrix: assemble(d, |w| triple_unchecked(x, w, x) * 0.5),
    })
}

/// `B(x,y) = id - T(x,y) + Q(x)Q(y)`.
pub fn bergman_operator(d: &Domain, x: &Element, y: &Element) -> Result<LinearMap> {
    let t = t_operator(d, x, y)?;
    let qq = q_operator(d, x)?.compose(&q_operator(d, y)?);
    let n = d.total_dim;
    Ok(LinearMap {
        matrix: CMatrix::identity(n, n) - t.matrix + qq.matrix,
    })
}

/// `(1 - x y*) w (1 - y* x)` per factor: the type-I closed form of `B(x,y) w`.
pub fn bergman_factorized(d: &Domain, x: &Element, y: &Element, w: &Element) -> Result<Element> {
    check_all(d, &[x, y, w])?;
    let blocks = d
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (xb, yb, wb) = (&x.blocks[i], &y.blocks[i], &w.blocks[i]);
            let left = CMatrix::identity(f.p, f.p) - xb * yb.adjoint();
            let right = CMatrix::identity(f.q, f.q) - yb.adjoint() * xb;
            left * wb * right
        })
        .collect();
    Ok(Element { blocks })
}

/// `z^(2k+1)`, with `z^(1) = z` and `z^(2p+1) = Q(z) z^(2p-1)`.
pub fn odd_power(d: &Domain, z: &Element, k: usize) -> Result<Element> {
    d.check(z)?;
    let mut acc = z.clone();
    for _ in 0..k {
        acc = triple_unchecked(z, &acc, z) * 0.5;
    }
    Ok(acc)
}

/// The Hermitian form `(u|v) = tr T(u,v)`.
pub fn trace_form(d: &Domain, u: &Element, v: &Element) -> Result<C64> {
    Ok(t_operator(d, u, v)?.trace())
}

/// Per-factor genus `p + q`.
pub fn genus(d: &Domain) -> Vec<usize> {
    d.factors.iter().map(Factor::genus).collect()
}

/// Norm of
/// `{x,y,{u,v,w}} - {u,v,{x,y,w}} - {{x,y,u},v,w} + {u,{v,x,y},w}`.
pub fn jordan_identity_residual(
    d: &Domain,
    x: &Element,
    y: &Element,
    u: &Element,
    v: &Element,
    w: &Element,
) -> Result<f64> {
    check_all(d, &[x, y, u, v, w])?;
    let t = triple_unchecked;
    let lhs = &t(x, y, &t(u, v, w)) - &t(u, v, &t(x, y, w));
    let rhs = &t(&t(x, y, u), v, w) - &t(u, &t(v, x, y), w);
    Ok((&lhs - &rhs).norm())
}
