//! Numerical solving of zero-dimensional projective systems in complex
//! double precision.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{rational_to_f64, ComplexDouble, Field, PrimeField, Rationals};
use crate::groebner::{groebner_basis_modular, projective_degree, GroebnerBasis};
use crate::linalg::{complex_nullspace, complex_row_space};
use crate::monomial::{monomials_of_degree, Monomial};
use crate::points::{normalize_point, projective_distance, PointSet};
use crate::poly::{GradedForm, Poly, Side};
use crate::random::{rng, Rng64};

/// Two points closer than this (projective distance) are identified.
pub const DEDUPE_TOL: f64 = 1e-6;

/// Maximal accepted relative backward residual.
pub const RESIDUAL_TOL: f64 = 1e-7;

/// Number of random charts tried before giving up.
pub const MAX_CHARTS: usize = 5;

type C = Complex64;

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub points: PointSet<ComplexDouble>,
    /// Points that absorbed more than one raw solution.
    pub multiplicity: Vec<bool>,
    pub residual: f64,
    pub method: String,
    pub flags: Vec<String>,
    pub expected: usize,
}

impl SolveReport {
    pub fn is_clean(&self) -> bool {
        self.flags.is_empty() && self.points.len() == self.expected && self.residual <= RESIDUAL_TOL
    }
}

/// Serializable summary of a report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveSummary {
    pub count: usize,
    pub expected: usize,
    pub residual: f64,
    pub method: String,
    pub flags: Vec<String>,
}

impl From<&SolveReport> for SolveSummary {
    fn from(r: &SolveReport) -> Self {
        SolveSummary {
            count: r.points.len(),
            expected: r.expected,
            residual: r.residual,
            method: r.method.clone(),
            flags: r.flags.clone(),
        }
    }
}

/// Result of clustering raw solutions.
#[derive(Clone, Debug)]
pub struct Deduped {
    pub points: Vec<Vec<C>>,
    pub sizes: Vec<usize>,
    pub ambiguous: bool,
}

fn align_phase(rep: &[C], p: &[C]) -> Vec<C> {
    let dot: C = p.iter().zip(rep).map(|(x, y)| x.conj() * y).sum();
    if dot.norm() == 0.0 {
        return p.to_vec();
    }
    let ph = dot / dot.norm();
    let nr: f64 = rep.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let np: f64 = p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    p.iter().map(|c| c * ph * (nr / np)).collect()
}

/// Clusters points whose projective distance is at most `tol`; each
/// representative is the cluster mean. Distances in `(tol, 10·tol]` set the
/// ambiguity flag.
pub fn dedupe_points(raw: &[Vec<C>], tol: f64) -> Deduped {
    let mut clusters: Vec<Vec<Vec<C>>> = Vec::new();
    let mut ambiguous = false;
    for p in raw {
        let mut placed = false;
        for cl in clusters.iter_mut() {
            let d = projective_distance(&cl[0], p);
            if d <= tol {
                cl.push(align_phase(&cl[0], p));
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push(vec![p.clone()]);
        }
    }
    for i in 0..clusters.len() {
        for j in 0..i {
            let d = projective_distance(&clusters[i][0], &clusters[j][0]);
            if d > tol && d <= 10.0 * tol {
                ambiguous = true;
            }
        }
        for a in &clusters[i] {
            if projective_distance(a, &clusters[i][0]) > tol {
                ambiguous = true;
            }
        }
    }
    let points = clusters
        .iter()
        .map(|cl| {
            let n = cl[0].len();
            let mean: Vec<C> = (0..n).map(|k| cl.iter().map(|p| p[k]).sum::<C>() / cl.len() as f64).collect();
            normalize_point(&ComplexDouble::default(), &mean).unwrap_or(mean)
        })
        .collect();
    Deduped { points, sizes: clusters.iter().map(|c| c.len()).collect(), ambiguous }
}

/// A homogeneous system prepared for evaluation and Newton steps.
struct NumSystem {
    forms: Vec<Poly<ComplexDouble>>,
    grads: Vec<Vec<Poly<ComplexDouble>>>,
    scales: Vec<f64>,
    nvars: usize,
}

impl NumSystem {
    fn new(forms: &[GradedForm<ComplexDouble>]) -> Self {
        let nvars = forms[0].nvars();
        let forms: Vec<Poly<ComplexDouble>> = forms.iter().map(|f| f.poly().clone()).collect();
        let grads = forms.iter().map(|f| (0..nvars).map(|k| f.derivative(k)).collect()).collect();
        let scales = forms.iter().map(|f| f.terms().iter().map(|(_, c)| c.norm()).sum::<f64>().max(f64::MIN_POSITIVE)).collect();
        NumSystem { forms, grads, scales, nvars }
    }

    /// Max relative residual at a point normalized to max-modulus 1.
    fn residual(&self, x: &[C]) -> f64 {
        let x = normalize_point(&ComplexDouble::default(), x).unwrap_or_else(|| x.to_vec());
        self.forms.iter().zip(&self.scales).map(|(f, s)| f.eval(&x).norm() / s).fold(0.0, f64::max)
    }

    fn newton(&self, x0: &[C]) -> Vec<C> {
        let cc = ComplexDouble::default();
        let mut x = normalize_point(&cc, x0).unwrap_or_else(|| x0.to_vec());
        let mut best = (self.residual(&x), x.clone());
        for _ in 0..30 {
            let k = (0..self.nvars).max_by(|&a, &b| x[a].norm().partial_cmp(&x[b].norm()).unwrap()).unwrap();
            let free: Vec<usize> = (0..self.nvars).filter(|&j| j != k).collect();
            let m = self.forms.len();
            let jac = DMatrix::from_fn(m, free.len(), |i, j| self.grads[i][free[j]].eval(&x) / self.scales[i]);
            let rhs = DVector::from_fn(m, |i, _| -self.forms[i].eval(&x) / self.scales[i]);
            let svd = jac.svd(true, true);
            let Ok(step) = svd.solve(&rhs, 1e-14) else { break };
            for (j, &v) in free.iter().enumerate() {
                x[v] += step[j];
            }
            x = normalize_point(&cc, &x).unwrap_or(x);
            let r = self.residual(&x);
            if r < best.0 {
                best = (r, x.clone());
            }
            if step.norm() < 1e-15 {
                break;
            }
        }
        best.1
    }
}

fn random_complex(g: &mut Rng64) -> C {
    C::new(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0))
}

/// A random well-conditioned complex change of coordinates.
fn random_chart(g: &mut Rng64, n: usize) -> DMatrix<C> {
    loop {
        let a = DMatrix::from_fn(n, n, |_, _| random_complex(g));
        let sv = a.clone().svd(false, false).singular_values;
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let smax = sv.iter().copied().fold(0.0, f64::max);
        if smin > 0.1 * smax {
            return a;
        }
    }
}

fn substitute(form: &GradedForm<ComplexDouble>, a: &DMatrix<C>) -> GradedForm<ComplexDouble> {
    let rows: Vec<Vec<C>> = (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect()).collect();
    form.linear_substitute(&rows)
}

pub(crate) fn eigenvalues(m: &DMatrix<C>) -> Vec<C> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let schur = m.clone().schur();
    match schur.eigenvalues() {
        Some(v) => v.iter().copied().collect(),
        None => {
            let (_, t) = schur.unpack();
            (0..t.nrows()).map(|i| t[(i, i)]).collect()
        }
    }
}

/// Roots of `Σ c_k t^k` (ascending coefficients), dropping roots at infinity.
pub fn univariate_roots(coeffs: &[C]) -> Vec<C> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-13 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let comp = DMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -coeffs[deg - 1 - j] / lead
        } else if i == j + 1 {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let eval = |t: C| coeffs[..=deg].iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * t + c);
    let deval = |t: C| {
        (1..=deg).rev().fold(C::new(0.0, 0.0), |acc, k| acc * t + coeffs[k] * k as f64)
    };
    eigenvalues(&comp)
        .into_iter()
        .map(|mut t| {
            for _ in 0..5 {
                let d = deval(t);
                if d.norm() == 0.0 {
                    break;
                }
                let nt = t - eval(t) / d;
                if eval(nt).norm() < eval(t).norm() {
                    t = nt;
                } else {
                    break;
                }
            }
            t
        })
        .collect()
}

/// Coefficients in `y` of an affine polynomial in `(x, y)`: entry `k` is a
/// polynomial in `x` (ascending coefficients).
fn coeffs_in_y(p: &Poly<ComplexDouble>, degx: usize, degy: usize) -> Vec<Vec<C>> {
    let mut out = vec![vec![C::new(0.0, 0.0); degx + 1]; degy + 1];
    for (m, c) in p.terms() {
        out[m.exp(1) as usize][m.exp(0) as usize] += c;
    }
    out
}

fn eval_univariate(c: &[C], t: C) -> C {
    c.iter().rev().fold(C::new(0.0, 0.0), |acc, a| acc * t + a)
}

/// Determinant of the Sylvester matrix of two polynomials in `y` whose
/// coefficients have been evaluated.
fn sylvester_det(fy: &[C], gy: &[C]) -> C {
    let (a, b) = (fy.len() - 1, gy.len() - 1);
    let n = a + b;
    let mut m = DMatrix::from_element(n, n, C::new(0.0, 0.0));
    for i in 0..b {
        for (k, c) in fy.iter().rev().enumerate() {
            m[(i, i + k)] = *c;
        }
    }
    for i in 0..a {
        for (k, c) in gy.iter().rev().enumerate() {
            m[(b + i, i + k)] = *c;
        }
    }
    m.determinant()
}

fn finish_report(
    sys: &NumSystem,
    raw: Vec<Vec<C>>,
    expected: usize,
    method: &str,
    mut flags: Vec<String>,
) -> Result<SolveReport> {
    let polished: Vec<Vec<C>> = raw.iter().map(|p| sys.newton(p)).collect();
    let dd = dedupe_points(&polished, DEDUPE_TOL);
    if dd.ambiguous {
        flags.push("ambiguous-cluster".into());
    }
    let multiplicity: Vec<bool> = dd.sizes.iter().map(|&s| s > 1).collect();
    if multiplicity.iter().any(|&m| m) {
        flags.push("multiple-root".into());
    }
    let points: Vec<Vec<C>> = dd.points.iter().map(|p| sys.newton(p)).collect();
    let residual = points.iter().map(|p| sys.residual(p)).fold(0.0, f64::max);
    if residual > RESIDUAL_TOL {
        flags.push("residual".into());
    }
    if points.len() != expected {
        flags.push(format!("count {} != {expected}", points.len()));
    }
    let cc = ComplexDouble::default();
    let set = match PointSet::new(&cc, sys.nvars - 1, points.clone()) {
        Ok(s) => s,
        Err(_) => {
            flags.push("collision-after-polish".into());
            let dd2 = dedupe_points(&points, DEDUPE_TOL);
            PointSet::new(&cc, sys.nvars - 1, dd2.points)?
        }
    };
    Ok(SolveReport { points: set, multiplicity, residual, method: method.into(), flags, expected })
}

/// Intersection of two plane curves by a hidden-variable resultant on a
/// random chart, companion eigenvalues, back-substitution and Newton.
pub fn intersect_plane_curves<F: Field>(f: &GradedForm<F>, g: &GradedForm<F>) -> Result<SolveReport> {
    if f.nvars() != 3 || g.nvars() != 3 {
        return Err(Error::InvalidArgument("plane curves need 3 variables".into()));
    }
    let cc = ComplexDouble::default();
    let fc = f.map_field(&cc, |c| f.field().to_complex(c).expect("complex embedding"));
    let gc = g.map_field(&cc, |c| g.field().to_complex(c).expect("complex embedding"));
    let (a, b) = (fc.degree() as usize, gc.degree() as usize);
    if a == 0 || b == 0 || fc.is_zero() || gc.is_zero() {
        return Err(Error::InvalidArgument("curves must have positive degree".into()));
    }
    let sys = NumSystem::new(&[fc.clone(), gc.clone()]);
    let expected = a * b;
    let mut last = None;
    for attempt in 0..MAX_CHARTS {
        let mut gen = rng(0x5eed_0000 + attempt as u64);
        let chart = random_chart(&mut gen, 3);
        let one = C::new(1.0, 0.0);
        let fa = substitute(&fc, &chart).poly().specialize(2, &one);
        let ga = substitute(&gc, &chart).poly().specialize(2, &one);
        let fy = coeffs_in_y(&fa, a, a);
        let gy = coeffs_in_y(&ga, b, b);
        let npts = a * b + 1;
        let values: Vec<C> = (0..npts)
            .map(|k| {
                let t = C::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / npts as f64);
                let fyt: Vec<C> = fy.iter().map(|c| eval_univariate(c, t)).collect();
                let gyt: Vec<C> = gy.iter().map(|c| eval_univariate(c, t)).collect();
                sylvester_det(&fyt, &gyt)
            })
            .collect();
        let res: Vec<C> = (0..npts)
            .map(|j| {
                values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * C::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / npts as f64))
                    .sum::<C>()
                    / npts as f64
            })
            .collect();
        let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let coef_scale = fy.iter().chain(gy.iter()).flatten().map(|c| c.norm()).fold(0.0, f64::max);
        if scale <= 1e-10 * coef_scale.powi((a + b) as i32) {
            return Err(Error::Degenerate("curves share a component".into()));
        }
        let xs = univariate_roots(&res);
        let mut raw = Vec::with_capacity(xs.len());
        for x in xs {
            let fyx: Vec<C> = fy.iter().map(|c| eval_univariate(c, x)).collect();
            let gyx: Vec<C> = gy.iter().map(|c| eval_univariate(c, x)).collect();
            let mut cands = univariate_roots(&fyx);
            cands.extend(univariate_roots(&gyx));
            let score = |y: C| eval_univariate(&fyx, y).norm() / (1.0 + y.norm()).powi(a as i32)
                + eval_univariate(&gyx, y).norm() / (1.0 + y.norm()).powi(b as i32);
            let Some(y) = cands.into_iter().min_by(|p, q| score(*p).partial_cmp(&score(*q)).unwrap()) else { continue };
            let yv = DVector::from_vec(vec![x, y, one]);
            let p = &chart * yv;
            raw.push(p.iter().copied().collect::<Vec<C>>());
        }
        let rep = finish_report(&sys, raw, expected, "resultant-companion", Vec::new())?;
        if rep.is_clean() {
            return Ok(rep);
        }
        log::debug!("plane intersection chart {attempt} unclean: {:?}", rep.flags);
        last = Some(rep);
    }
    Ok(last.unwrap())
}

/// Rational homogeneous system solved through a Gröbner basis over the
/// rationals on a random affine chart and eigenvectors of a multiplication
/// matrix.
pub fn solve_system(gens: &[GradedForm<Rationals>]) -> Result<SolveReport> {
    let first = gens.first().ok_or_else(|| Error::InvalidArgument("empty system".into()))?;
    let nvars = first.nvars();
    let fp = PrimeField::new(32003)?;
    let modp: Vec<Poly<PrimeField>> = gens
        .iter()
        .map(|g| g.poly().to_prime(&fp).ok_or_else(|| Error::InvalidArgument("denominator vanishes mod p".into())))
        .collect::<Result<_>>()?;
    let hgb = GroebnerBasis::new(&fp, nvars, &modp)?;
    let degree = projective_degree(&hgb)?;
    let cc = ComplexDouble::default();
    let complex_gens: Vec<GradedForm<ComplexDouble>> = gens.iter().map(|g| g.to_complex(&cc)).collect();
    let sys = NumSystem::new(&complex_gens);
    let mut last = None;
    for attempt in 0..MAX_CHARTS {
        let mut gen = rng(0xc4a7_0000 + attempt as u64);
        let a: Vec<Vec<i64>> = loop {
            let a: Vec<Vec<i64>> = (0..nvars).map(|_| (0..nvars).map(|_| gen.gen_range(-4..=4)).collect()).collect();
            let m = DMatrix::from_fn(nvars, nvars, |i, j| a[i][j] as f64);
            if m.determinant().abs() > 0.5 {
                break a;
            }
        };
        let arat: Vec<Vec<_>> = a.iter().map(|r| r.iter().map(|&x| Rationals.from_i64(x)).collect()).collect();
        let last_var = nvars - 1;
        let affine: Vec<Poly<Rationals>> = gens
            .iter()
            .map(|g| g.poly().linear_substitute(&arat, nvars).specialize(last_var, &Rationals.from_i64(1)))
            .collect();
        let affine_p: Vec<Poly<PrimeField>> = affine.iter().map(|p| p.to_prime(&fp).unwrap()).collect();
        let qd = GroebnerBasis::new(&fp, nvars - 1, &affine_p)?.quotient_dimension()?;
        if qd != degree {
            log::debug!("chart {attempt} meets infinity ({qd} of {degree})");
            continue;
        }
        let gb = groebner_basis_modular(nvars - 1, &affine)?;
        let basis = gb.standard_monomials()?;
        if basis.len() != degree {
            continue;
        }
        let idx = |m: &Monomial| basis.iter().position(|b| b == m);
        let coords = |p: &Poly<Rationals>| -> Vec<C> {
            let r = gb.reduce(p);
            let mut v = vec![C::new(0.0, 0.0); basis.len()];
            for (m, c) in r.terms() {
                v[idx(m).expect("normal form in standard monomials")] = C::new(rational_to_f64(c), 0.0);
            }
            v
        };
        let s = basis.len();
        let lin: Vec<i64> = (0..nvars - 1).map(|_| gen.gen_range(1..=9) * if gen.gen_bool(0.5) { 1 } else { -1 }).collect();
        let fpoly = Poly::from_terms(
            &Rationals,
            nvars - 1,
            lin.iter().enumerate().map(|(i, &c)| (Monomial::var(i), Rationals.from_i64(c))),
        );
        let mut mt = DMatrix::from_element(s, s, C::new(0.0, 0.0));
        for (j, b) in basis.iter().enumerate() {
            let prod = fpoly.mul(&Poly::term(&Rationals, nvars - 1, *b, Rationals.from_i64(1)));
            let col = coords(&prod);
            for (i, c) in col.into_iter().enumerate() {
                // transpose: row j holds NF(f b_j)
                mt[(j, i)] = c;
            }
        }
        let var_coords: Vec<Vec<C>> =
            (0..nvars - 1).map(|i| coords(&Poly::var(&Rationals, nvars - 1, i))).collect();
        let one_idx = idx(&Monomial::one()).ok_or_else(|| Error::Numerical("1 is not standard".into()))?;
        let mut raw = Vec::with_capacity(s);
        let mut flags = Vec::new();
        let evs = eigenvalues(&mt);
        for lam in &evs {
            let shifted = &mt - DMatrix::from_diagonal_element(s, s, *lam);
            let ns = smallest_singular_vector(&shifted);
            if ns.1 > 1e-6 * mt.norm().max(1.0) {
                flags.push("eigenvector-residual".into());
            }
            let v = ns.0;
            if v[one_idx].norm() < 1e-12 {
                flags.push("eigenvector-at-infinity".into());
                continue;
            }
            let v: Vec<C> = v.iter().map(|c| c / v[one_idx]).collect();
            let mut y: Vec<C> = var_coords.iter().map(|cv| cv.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
            y.push(C::new(1.0, 0.0));
            let x: Vec<C> = (0..nvars).map(|i| (0..nvars).map(|j| y[j] * a[i][j] as f64).sum()).collect();
            raw.push(x);
        }
        let rep = finish_report(&sys, raw, degree, "groebner-eigen", flags)?;
        if rep.is_clean() {
            return Ok(rep);
        }
        last = Some(rep);
    }
    last.ok_or_else(|| Error::Degenerate("every chart met solutions at infinity".into()))
}

fn smallest_singular_vector(m: &DMatrix<C>) -> (Vec<C>, f64) {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.unwrap();
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(k, s)| (k, *s))
        .unwrap();
    ((0..m.ncols()).map(|j| vt[(k, j)].conj()).collect(), s)
}

/// Matrix of `Σ l_i ∂/∂x_i : S_{t+1} → S_t` in monomial coordinates.
fn derivation_matrix(nvars: usize, t: u32, l: &[C]) -> DMatrix<C> {
    let src = monomials_of_degree(nvars, t + 1);
    let dst = monomials_of_degree(nvars, t);
    let mut m = DMatrix::from_element(dst.len(), src.len(), C::new(0.0, 0.0));
    for (j, mon) in src.iter().enumerate() {
        for (i, li) in l.iter().enumerate() {
            let e = mon.exp(i);
            if e == 0 {
                continue;
            }
            let q = Monomial::var(i).quotient_of(mon);
            let row = dst.binary_search_by(|x| q.cmp(x)).expect("monomial present");
            m[(row, j)] += li * e as f64;
        }
    }
    m
}

/// `(I_t)^⊥ ⊆ S_t` for the ideal generated by `gens`, as an orthonormal basis
/// (columns) in monomial coordinates.
fn dual_piece(gens: &[GradedForm<ComplexDouble>], nvars: usize, t: u32, tol: f64) -> DMatrix<C> {
    let mons = monomials_of_degree(nvars, t);
    let mut rows: Vec<Vec<C>> = Vec::new();
    for g in gens {
        if g.degree() > t {
            continue;
        }
        for m in monomials_of_degree(nvars, t - g.degree()) {
            let p = g.poly().mul_term(&m, &C::new(1.0, 0.0));
            let norm = p.terms().iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
            // pairing weight α! turns the ideal element into a functional on S_t
            rows.push(mons.iter().map(|a| p.coefficient(a) * a.factorial_product() as f64 / norm).collect());
        }
    }
    let ncols = mons.len();
    if rows.is_empty() {
        return DMatrix::identity(ncols, ncols);
    }
    let a = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    let ns = complex_nullspace(&a, tol);
    DMatrix::from_fn(ncols, ns.len(), |i, j| ns[j][i])
}

/// Complex homogeneous system solved by the eigenstructure of
/// differentiation operators on the dual of the ideal in two consecutive
/// degrees where the Hilbert function has stabilized.
pub fn solve_system_numeric(gens: &[GradedForm<ComplexDouble>], expected: Option<usize>) -> Result<SolveReport> {
    let first = gens.first().ok_or_else(|| Error::InvalidArgument("empty system".into()))?;
    if gens.iter().any(|g| g.side() != first.side() || g.nvars() != first.nvars()) {
        return Err(Error::InvalidArgument("inconsistent system".into()));
    }
    let nvars = first.nvars();
    let tol = 1e-9;
    let sys = NumSystem::new(&gens.iter().map(|g| relabel(g)).collect::<Vec<_>>());
    let dmax = gens.iter().map(|g| g.degree()).max().unwrap();
    let mut prev = dual_piece(gens, nvars, dmax, tol);
    let mut found = None;
    for t in dmax..dmax + 8 {
        let next = dual_piece(gens, nvars, t + 1, tol);
        let matches = expected.map_or(true, |e| e == prev.ncols());
        if prev.ncols() == next.ncols() && matches && prev.ncols() > 0 {
            found = Some((t, prev, next));
            break;
        }
        prev = next;
    }
    let (t, dt, dt1) = found.ok_or(Error::NotZeroDimensional)?;
    let s = dt.ncols();
    let mut last = None;
    for attempt in 0..MAX_CHARTS {
        let mut gen = rng(0xd0a1_0000 + attempt as u64);
        let l0: Vec<C> = (0..nvars).map(|_| random_complex(&mut gen)).collect();
        let l1: Vec<C> = (0..nvars).map(|_| random_complex(&mut gen)).collect();
        let proj = |l: &[C]| dt.adjoint() * derivation_matrix(nvars, t, l) * &dt1;
        let a0 = proj(&l0);
        let a1 = proj(&l1);
        let Some(a0inv) = a0.clone().try_inverse() else { continue };
        let m = &a0inv * &a1;
        let coords: Vec<DMatrix<C>> = (0..nvars)
            .map(|i| {
                let mut e = vec![C::new(0.0, 0.0); nvars];
                e[i] = C::new(1.0, 0.0);
                proj(&e)
            })
            .collect();
        let mut raw = Vec::with_capacity(s);
        let mut flags = Vec::new();
        for lam in eigenvalues(&m) {
            let shifted = &m - DMatrix::from_diagonal_element(s, s, lam);
            let (c, _) = smallest_singular_vector(&shifted);
            let c = DVector::from_vec(c);
            let w0 = &a0 * &c;
            let denom = w0.dotc(&w0);
            if denom.norm() < 1e-24 {
                flags.push("eigenvector-degenerate".into());
                continue;
            }
            let p: Vec<C> = coords.iter().map(|ai| w0.dotc(&(ai * &c)) / denom).collect();
            raw.push(p);
        }
        let rep = finish_report(&sys, raw, expected.unwrap_or(s), "dual-eigen", flags)?;
        if rep.is_clean() {
            return Ok(rep);
        }
        last = Some(rep);
    }
    last.ok_or_else(|| Error::Numerical("singular eigenproblem on every chart".into()))
}

fn relabel(g: &GradedForm<ComplexDouble>) -> GradedForm<ComplexDouble> {
    if g.side() == Side::S {
        g.clone()
    } else {
        GradedForm::new(Side::S, g.degree(), g.poly().clone()).expect("homogeneous")
    }
}

/// Orthonormal row-space helper reexported for constructions.
pub fn orthonormal_rows(a: &DMatrix<C>, tol: f64) -> Vec<Vec<C>> {
    complex_row_space(a, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_form;

    fn cform(terms: &[(&[u32], f64)]) -> GradedForm<ComplexDouble> {
        let cc = ComplexDouble::default();
        let p = Poly::from_terms(&cc, terms[0].0.len(), terms.iter().map(|(e, c)| (Monomial::new(e), C::new(*c, 0.0))));
        GradedForm::new(Side::S, terms[0].0.iter().sum(), p).unwrap()
    }

    #[test]
    fn dedupe_examples() {
        let one = C::new(1.0, 0.0);
        let z = C::new(0.0, 0.0);
        let d = dedupe_points(&[vec![one, z, z], vec![one, z, z]], DEDUPE_TOL);
        assert_eq!(d.points.len(), 1);
        let d = dedupe_points(&[vec![one, C::new(1e-9, 0.0), z], vec![one, z, z]], DEDUPE_TOL);
        assert_eq!(d.points.len(), 1);
        assert!(!d.ambiguous);
        let d = dedupe_points(&[vec![one, C::new(5e-6, 0.0), z], vec![one, z, z]], DEDUPE_TOL);
        assert_eq!(d.points.len(), 2);
        assert!(d.ambiguous);
    }

    #[test]
    fn conic_and_line() {
        let conic = cform(&[(&[2, 0, 0], 1.0), (&[0, 1, 1], -1.0)]);
        let line = cform(&[(&[1, 0, 0], 1.0)]);
        let rep = intersect_plane_curves(&conic, &line).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.flags);
        let cc = ComplexDouble::default();
        let o = C::new(1.0, 0.0);
        let z = C::new(0.0, 0.0);
        let expect = PointSet::new(&cc, 2, vec![vec![z, o, z], vec![z, z, o]]).unwrap();
        assert!(rep.points.same_set(&expect));
    }

    #[test]
    fn random_cubics_meet_in_nine_points() {
        let mut g = rng(3);
        let f = random_form(&mut g, Side::S, 3, 3);
        let h = random_form(&mut g, Side::S, 3, 3);
        let rep = intersect_plane_curves(&f, &h).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.flags);
        assert_eq!(rep.points.len(), 9);
    }

    #[test]
    fn grid_cubics_by_groebner() {
        let f = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[3, 0, 0], 1), (&[2, 0, 1], -3), (&[1, 0, 2], 2)]).unwrap();
        let g = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[0, 3, 0], 1), (&[0, 2, 1], -3), (&[0, 1, 2], 2)]).unwrap();
        let rep = solve_system(&[f, g]).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.flags);
        let cc = ComplexDouble::default();
        let grid: Vec<Vec<C>> = (0..3)
            .flat_map(|i| (0..3).map(move |j| vec![C::new(i as f64, 0.0), C::new(j as f64, 0.0), C::new(1.0, 0.0)]))
            .collect();
        assert!(rep.points.same_set(&PointSet::new(&cc, 2, grid).unwrap()));
    }

    #[test]
    fn three_quadrics_both_methods() {
        let mut g = rng(9);
        let gens: Vec<_> = (0..3).map(|_| random_form(&mut g, Side::S, 4, 2)).collect();
        let a = solve_system(&gens).unwrap();
        assert!(a.is_clean(), "{:?}", a.flags);
        assert_eq!(a.points.len(), 8);
        let cc = ComplexDouble::default();
        let cg: Vec<_> = gens.iter().map(|f| f.to_complex(&cc)).collect();
        let b = solve_system_numeric(&cg, Some(8)).unwrap();
        assert!(b.is_clean(), "{:?}", b.flags);
        assert!(a.points.same_set(&b.points));
    }
}
