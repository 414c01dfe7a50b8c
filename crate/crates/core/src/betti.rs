//! Minimal graded free resolutions over prime fields, Betti tables and the
//! resolution-general predicate.
//!
//! The resolution is built degree by degree: in each internal degree `j` the
//! kernel of the last differential is computed by linear algebra, and its
//! minimal generators are a complement of `R_1 · K_{j-1}`. Generators chosen
//! this way never have constant entries.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::groebner::GroebnerBasis;
use crate::linalg::Matrix;
use crate::monomial::{binomial, monomials_of_degree, Monomial};
use crate::points::{evaluation_matrix, ideal_piece, PointSet};
use crate::poly::Poly;
use crate::random::rng;

/// Primes used when an exact input has to be reduced.
pub const BETTI_PRIMES: [u64; 3] = [32003, 65537, 1_000_003];

/// Seeds compared by [`generic_betti`].
pub const GENERIC_SEEDS: usize = 3;

/// Resampling rounds before [`generic_betti`] gives up.
pub const GENERIC_RETRIES: usize = 10;

/// Graded Betti numbers of `R/I`, so `β_{0,0} = 1` and `β_{1,j}` counts
/// minimal generators of `I` in degree `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    nvars: usize,
    entries: BTreeMap<(usize, u32), usize>,
}

#[derive(Serialize, Deserialize)]
struct BettiEntry {
    i: usize,
    j: u32,
    beta: usize,
}

#[derive(Serialize, Deserialize)]
struct BettiJson {
    nvars: usize,
    entries: Vec<BettiEntry>,
}

impl Serialize for BettiTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self.entries.iter().map(|(&(i, j), &beta)| BettiEntry { i, j, beta }).collect();
        BettiJson { nvars: self.nvars, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BettiTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = BettiJson::deserialize(d)?;
        Ok(BettiTable::from_entries(j.nvars, j.entries.into_iter().map(|e| ((e.i, e.j), e.beta))))
    }
}

impl BettiTable {
    pub fn from_entries(nvars: usize, entries: impl IntoIterator<Item = ((usize, u32), usize)>) -> Self {
        let entries = entries.into_iter().filter(|(_, b)| *b > 0).collect();
        BettiTable { nvars, entries }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: u32) -> usize {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, u32), usize)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// Degrees of the minimal generators of `I`, with repetition.
    pub fn generator_degrees(&self) -> Vec<u32> {
        self.shifts(1)
    }

    /// Twists of the `i`-th free module, ascending with repetition.
    pub fn shifts(&self, i: usize) -> Vec<u32> {
        self.entries
            .iter()
            .filter(|((a, _), _)| *a == i)
            .flat_map(|(&(_, j), &b)| std::iter::repeat(j).take(b))
            .collect()
    }

    pub fn length(&self) -> usize {
        self.entries.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn total(&self, i: usize) -> usize {
        self.entries.iter().filter(|((a, _), _)| *a == i).map(|(_, b)| b).sum()
    }

    /// `dim (R/I)_k` read off the table through the Hilbert series.
    pub fn hilbert_function(&self, k: u32) -> i64 {
        let m = self.nvars as u64 - 1;
        self.entries
            .iter()
            .filter(|((_, j), _)| *j <= k)
            .map(|(&(i, j), &b)| {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                sign * b as i64 * binomial(u64::from(k - j) + m, m) as i64
            })
            .sum()
    }

    /// Macaulay-style diagram: column `i`, row `j - i`.
    pub fn diagram(&self) -> String {
        let len = self.length();
        let rows = self.entries.keys().map(|&(i, j)| j as usize - i).max().unwrap_or(0);
        let cell = |v: usize| if v == 0 { ".".to_string() } else { v.to_string() };
        let width = self.entries.values().map(|v| v.to_string().len()).max().unwrap_or(1).max(1);
        let mut s = String::new();
        s.push_str(&format!("{:>7}", ""));
        for i in 0..=len {
            s.push_str(&format!(" {:>width$}", i));
        }
        s.push_str("\ntotal:");
        for i in 0..=len {
            s.push_str(&format!(" {:>width$}", self.total(i)));
        }
        for r in 0..=rows {
            s.push_str(&format!("\n{:>5}:", r));
            for i in 0..=len {
                s.push_str(&format!(" {:>width$}", cell(self.get(i, (i + r) as u32))));
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("betti tables serialize")
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.diagram())
    }
}

/// Sparse element of a graded free module: `(component, monomial, coefficient)`.
pub type ModuleElem = Vec<(usize, Monomial, u64)>;

/// A minimal graded free resolution of `R/I` over a prime field.
#[derive(Clone, Debug)]
pub struct Resolution {
    field: PrimeField,
    nvars: usize,
    /// Twists of the generators of `F_i`; `F_0 = R`.
    degrees: Vec<Vec<u32>>,
    /// `maps[i][k]` is the image in `F_i` of the `k`-th generator of `F_{i+1}`.
    maps: Vec<Vec<ModuleElem>>,
}

impl Resolution {
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn degrees(&self) -> &[Vec<u32>] {
        &self.degrees
    }

    pub fn maps(&self) -> &[Vec<ModuleElem>] {
        &self.maps
    }

    pub fn betti_table(&self) -> BettiTable {
        let mut e = BTreeMap::new();
        for (i, ds) in self.degrees.iter().enumerate() {
            for &j in ds {
                *e.entry((i, j)).or_insert(0) += 1;
            }
        }
        BettiTable { nvars: self.nvars, entries: e }
    }

    /// Differential `F_{i+1} → F_i` as a matrix of polynomials
    /// (rows: components of `F_i`, columns: generators of `F_{i+1}`).
    pub fn differential(&self, i: usize) -> Vec<Vec<Poly<PrimeField>>> {
        let f = &self.field;
        let rows = self.degrees[i].len();
        let mut out = vec![vec![Poly::zero(f, self.nvars); self.maps[i].len()]; rows];
        for (k, img) in self.maps[i].iter().enumerate() {
            for (comp, m, c) in img {
                out[*comp][k] = out[*comp][k].add(&Poly::term(f, self.nvars, *m, *c));
            }
        }
        out
    }

    /// Whether some differential has a nonzero constant entry.
    pub fn has_constant_entries(&self) -> bool {
        self.maps.iter().flatten().flatten().any(|(_, m, c)| m.degree() == 0 && *c != 0)
    }
}

struct Echelon {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    fn new(p: u64) -> Self {
        Echelon { p, rows: Vec::new() }
    }

    fn reduce(&self, v: &mut [u64]) {
        for (piv, r) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (a, b) in v.iter_mut().zip(r) {
                    *a = (*a + (self.p - c) * b % self.p) % self.p;
                }
            }
        }
    }

    /// Adds `v` if independent of the current rows.
    fn insert(&mut self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(piv) = w.iter().position(|&c| c != 0) else { return false };
        let inv = mod_pow(w[piv], self.p - 2, self.p);
        for a in w.iter_mut() {
            *a = *a * inv % self.p;
        }
        self.rows.push((piv, w));
        true
    }
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Monomial bases of `R_k`, cached by degree.
struct MonomialCache {
    nvars: usize,
    lists: HashMap<u32, Vec<Monomial>>,
}

impl MonomialCache {
    fn get(&mut self, k: u32) -> &[Monomial] {
        let n = self.nvars;
        self.lists.entry(k).or_insert_with(|| monomials_of_degree(n, k))
    }

    fn index(&mut self, m: &Monomial) -> usize {
        self.get(m.degree()).binary_search_by(|x| m.cmp(x)).expect("monomial present")
    }
}

/// Coordinates of a free module `⊕ R(-a_k)` in one degree.
struct Layout {
    offsets: Vec<Option<usize>>,
    dim: usize,
}

fn layout(cache: &mut MonomialCache, degs: &[u32], j: u32) -> Layout {
    let mut offsets = Vec::with_capacity(degs.len());
    let mut dim = 0;
    for &a in degs {
        if a <= j {
            offsets.push(Some(dim));
            dim += cache.get(j - a).len();
        } else {
            offsets.push(None);
        }
    }
    Layout { offsets, dim }
}

fn to_dense(cache: &mut MonomialCache, lay: &Layout, e: &ModuleElem) -> Vec<u64> {
    let mut v = vec![0; lay.dim];
    for (comp, m, c) in e {
        let off = lay.offsets[*comp].expect("component present in degree");
        v[off + cache.index(m)] = *c;
    }
    v
}

fn to_sparse(cache: &mut MonomialCache, degs: &[u32], lay: &Layout, v: &[u64], j: u32) -> ModuleElem {
    let mut out = Vec::new();
    for (comp, off) in lay.offsets.iter().enumerate() {
        let Some(off) = off else { continue };
        let mons = cache.get(j - degs[comp]).to_vec();
        for (k, m) in mons.iter().enumerate() {
            if v[off + k] != 0 {
                out.push((comp, *m, v[off + k]));
            }
        }
    }
    out
}

fn shift(e: &ModuleElem, m: &Monomial) -> ModuleElem {
    e.iter().map(|(c, a, x)| (*c, a.mul(m), *x)).collect()
}

fn nullspace_mod(fp: &PrimeField, rows: usize, cols: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    if cols.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_columns(fp, rows, &cols);
    m.nullspace()
}

/// Minimal resolution of `R/I` for homogeneous generators over a prime field,
/// computed in internal degrees `≤ bound`.
pub fn minimal_resolution(
    fp: &PrimeField,
    nvars: usize,
    gens: &[Poly<PrimeField>],
    bound: u32,
) -> Result<Resolution> {
    let p = fp.modulus();
    let mut gdeg = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        gdeg.push(g.homogeneous_degree().ok_or(Error::NotHomogeneous(0))?);
    }
    let gens: Vec<&Poly<PrimeField>> = gens.iter().filter(|g| !g.is_zero()).collect();
    let mut cache = MonomialCache { nvars, lists: HashMap::new() };
    let mut degrees: Vec<Vec<u32>> = vec![vec![0]];
    let mut maps: Vec<Vec<ModuleElem>> = Vec::new();
    let vars: Vec<Monomial> = (0..nvars).map(Monomial::var).collect();
    for level in 0..=nvars {
        let src = degrees[level].clone();
        let mut new_degs = Vec::new();
        let mut new_maps = Vec::new();
        let mut prev_kernel: Vec<ModuleElem> = Vec::new();
        for j in 0..=bound {
            let lay = layout(&mut cache, &src, j);
            let kernel: Vec<Vec<u64>> = if level == 0 {
                let mut ech = Echelon::new(p);
                let mut basis = Vec::new();
                for (g, &d) in gens.iter().zip(&gdeg) {
                    if d > j {
                        continue;
                    }
                    for m in cache.get(j - d).to_vec() {
                        let e: ModuleElem = g.terms().iter().map(|(a, c)| (0, a.mul(&m), *c)).collect();
                        let v = to_dense(&mut cache, &lay, &e);
                        if ech.insert(&v) {
                            basis.push(v);
                        }
                    }
                }
                basis
            } else {
                let tgt = degrees[level - 1].clone();
                let tlay = layout(&mut cache, &tgt, j);
                let mut cols = Vec::with_capacity(lay.dim);
                for (k, &a) in src.iter().enumerate() {
                    if a > j {
                        continue;
                    }
                    for m in cache.get(j - a).to_vec() {
                        let img = shift(&maps[level - 1][k], &m);
                        cols.push(to_dense(&mut cache, &tlay, &img));
                    }
                }
                nullspace_mod(fp, tlay.dim, cols)
            };
            let mut ech = Echelon::new(p);
            for e in &prev_kernel {
                for x in &vars {
                    ech.insert(&to_dense(&mut cache, &lay, &shift(e, x)));
                }
            }
            for v in &kernel {
                if ech.insert(v) {
                    new_degs.push(j);
                    new_maps.push(to_sparse(&mut cache, &src, &lay, v, j));
                }
            }
            prev_kernel = kernel.iter().map(|v| to_sparse(&mut cache, &src, &lay, v, j)).collect();
        }
        if new_degs.is_empty() {
            break;
        }
        degrees.push(new_degs);
        maps.push(new_maps);
    }
    Ok(Resolution { field: *fp, nvars, degrees, maps })
}

/// Upper bound for the internal degrees in a minimal resolution, from the
/// Taylor resolution of the initial ideal.
pub fn taylor_degree_bound(fp: &PrimeField, nvars: usize, gens: &[Poly<PrimeField>]) -> Result<u32> {
    let gb = GroebnerBasis::new(fp, nvars, gens)?;
    let leads = gb.lead_monomials();
    let lcm_all = leads.iter().fold(Monomial::one(), |a, b| a.lcm(b)).degree();
    let mut ds: Vec<u32> = leads.iter().map(|m| m.degree()).collect();
    ds.sort_unstable_by(|a, b| b.cmp(a));
    let top: u32 = ds.iter().take(nvars).sum();
    Ok(lcm_all.min(top))
}

/// Betti table of the ideal generated by homogeneous forms over an exact
/// field. Rational input is reduced modulo [`BETTI_PRIMES`]; the first two
/// primes must agree, otherwise the entrywise smallest table is kept.
pub fn graded_betti<F: Field>(gens: &[Poly<F>]) -> Result<BettiTable> {
    let first = gens.first().ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
    let field = first.field();
    if !field.is_exact() {
        return Err(Error::Unsupported("Betti tables need an exact field".into()));
    }
    for g in gens {
        if !g.is_zero() && !g.is_homogeneous() {
            return Err(Error::NotHomogeneous(g.total_degree().unwrap_or(0)));
        }
    }
    let nvars = first.nvars();
    let mut tables = Vec::new();
    for &p in &BETTI_PRIMES {
        let fp = PrimeField::new(p)?;
        let Some(red) = reduce_all(gens, &fp) else { continue };
        let own = red.len() == gens.len() && matches!(field.tag(), crate::field::FieldTag::PrimeField { .. });
        let bound = taylor_degree_bound(&fp, nvars, &red)?;
        let t = minimal_resolution(&fp, nvars, &red, bound)?.betti_table();
        if own {
            return Ok(t);
        }
        tables.push(t);
        if tables.len() == 2 && tables[0] == tables[1] {
            return Ok(tables.remove(0));
        }
    }
    tables
        .into_iter()
        .min_by_key(|t| t.entries().map(|(_, b)| b).sum::<usize>())
        .ok_or_else(|| Error::Unsupported("no usable prime for Betti computation".into()))
}

fn reduce_all<F: Field>(gens: &[Poly<F>], fp: &PrimeField) -> Option<Vec<Poly<PrimeField>>> {
    gens.iter()
        .map(|g| {
            let terms: Option<Vec<_>> =
                g.terms().iter().map(|(m, c)| g.field().reduce_mod(c, fp).map(|x| (*m, x))).collect();
            Some(Poly::from_terms(fp, g.nvars(), terms?))
        })
        .collect()
}

/// First degree where the Hilbert function of the points reaches `len`.
fn saturation_degree<F: Field>(z: &PointSet<F>) -> u32 {
    let s = z.len();
    (0..).find(|&t| crate::points::hilbert_function(z, t) == s).expect("points impose independent conditions eventually")
}

/// Minimal resolution of the ideal of a set of points over a prime field.
pub fn points_resolution(z: &PointSet<PrimeField>) -> Result<Resolution> {
    let nvars = z.n() + 1;
    let t = saturation_degree(z);
    let mut gens = Vec::new();
    for k in 1..=t + 1 {
        gens.extend(ideal_piece(z, k).basis().iter().map(|v| {
            Poly::from_coords(z.field(), nvars, &monomials_of_degree(nvars, k), v)
        }));
    }
    minimal_resolution(z.field(), nvars, &gens, t + 1 + z.n() as u32)
}

pub fn points_betti(z: &PointSet<PrimeField>) -> Result<BettiTable> {
    Ok(points_resolution(z)?.betti_table())
}

/// Betti table of `s` random points of `P^n` over `F_p`, required to agree
/// across [`GENERIC_SEEDS`] consecutive seeds.
pub fn generic_betti_mod(n: usize, s: usize, seed: u64, p: u64) -> Result<BettiTable> {
    use rand::Rng;
    if s == 0 {
        return Err(Error::InvalidArgument("need at least one point".into()));
    }
    let fp = PrimeField::new(p)?;
    for round in 0..GENERIC_RETRIES as u64 {
        let mut tables = Vec::new();
        for k in 0..GENERIC_SEEDS as u64 {
            let mut g = rng(seed.wrapping_mul(1_000_003).wrapping_add(round * 97 + k));
            let pts: Vec<Vec<u64>> = (0..s).map(|_| (0..=n).map(|_| g.gen_range(0..p)).collect()).collect();
            match PointSet::new(&fp, n, pts) {
                Ok(z) => tables.push(points_betti(&z)?),
                Err(_) => break,
            }
        }
        if tables.len() == GENERIC_SEEDS && tables.windows(2).all(|w| w[0] == w[1]) {
            return Ok(tables.remove(0));
        }
        log::info!("generic Betti table for ({n},{s}) unstable in round {round}; resampling");
    }
    Err(Error::Degenerate(format!("no stable generic Betti table for {s} points in P^{n}")))
}

pub fn generic_betti(n: usize, s: usize, seed: u64) -> Result<BettiTable> {
    generic_betti_mod(n, s, seed, BETTI_PRIMES[0])
}

fn generic_cached(n: usize, s: usize, p: u64) -> Result<BettiTable> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, u64), BettiTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(n, s, p)) {
        return Ok(t.clone());
    }
    let t = generic_betti_mod(n, s, 0, p)?;
    cache.lock().unwrap().insert((n, s, p), t.clone());
    Ok(t)
}

/// Whether `Z` has the Betti table of general points.
///
/// Exact coordinates compare the full table modulo a prime. Complex
/// coordinates compare the Hilbert function and the number of minimal
/// generators in each degree; a numerically ambiguous rank is reported as
/// [`Error::Indeterminate`].
pub fn is_resolution_general<F: Field>(z: &PointSet<F>) -> Result<bool> {
    if z.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let field = z.field();
    if field.is_exact() {
        for &p in &BETTI_PRIMES[..2] {
            let fp = PrimeField::new(p)?;
            let pts: Option<Vec<Vec<u64>>> =
                z.points().iter().map(|q| q.iter().map(|c| field.reduce_mod(c, &fp)).collect()).collect();
            let Some(pts) = pts else { continue };
            let Ok(zp) = PointSet::new(&fp, z.n(), pts) else { continue };
            return Ok(points_betti(&zp)? == generic_cached(z.n(), z.len(), p)?);
        }
        return Err(Error::Unsupported("points collide modulo every test prime".into()));
    }
    let generic = generic_cached(z.n(), z.len(), BETTI_PRIMES[0])?;
    let nvars = z.n() + 1;
    let s = z.len();
    let top = generic.generator_degrees().into_iter().max().unwrap_or(1);
    let mut prev: Vec<Vec<F::Elem>> = Vec::new();
    for j in 0..=top {
        let ev = evaluation_matrix(z, j);
        let info = ev.rank_info();
        if info.ambiguous {
            return Err(indeterminate(&info));
        }
        let expected_hf = s.min(binomial(z.n() as u64 + u64::from(j), u64::from(j)) as usize);
        if info.rank != expected_hf {
            return Ok(false);
        }
        let piece = ideal_piece(z, j);
        let ideal_dim = piece.dim();
        let mons = monomials_of_degree(nvars, j);
        let mut products = Vec::new();
        for v in &prev {
            let f = Poly::from_coords(field, nvars, &monomials_of_degree(nvars, j - 1), v);
            for k in 0..nvars {
                products.push(f.mul(&Poly::var(field, nvars, k)).coords(&mons));
            }
        }
        let old = if products.is_empty() {
            0
        } else {
            let m = Matrix::from_rows(field, mons.len(), &products);
            let info = m.rank_info();
            if info.ambiguous {
                return Err(indeterminate(&info));
            }
            info.rank
        };
        let new_gens = ideal_dim.saturating_sub(old);
        if new_gens != generic.get(1, j) {
            return Ok(false);
        }
        prev = piece.basis().to_vec();
    }
    Ok(true)
}

fn indeterminate(info: &crate::linalg::RankInfo) -> Error {
    let value = info
        .singular_values
        .iter()
        .copied()
        .filter(|&s| s > info.threshold / 10.0 && s < info.threshold * 10.0)
        .fold(0.0, f64::max);
    Error::Indeterminate { value, threshold: info.threshold }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_points(n: usize, s: usize, seed: u64, p: u64) -> PointSet<PrimeField> {
        let fp = PrimeField::new(p).unwrap();
        let mut g = rng(seed);
        let pts = (0..s).map(|_| (0..=n).map(|_| g.gen_range(0..p)).collect()).collect();
        PointSet::new(&fp, n, pts).unwrap()
    }

    #[test]
    fn seven_points_in_the_plane() {
        let t = points_betti(&random_points(2, 7, 1, 32003)).unwrap();
        assert_eq!(t.get(0, 0), 1);
        assert_eq!(t.shifts(1), vec![3, 3, 3]);
        assert_eq!(t.shifts(2), vec![4, 5]);
        assert_eq!(t.length(), 2);
    }

    #[test]
    fn eight_points_hilbert_burch_degrees() {
        let res = points_resolution(&random_points(2, 8, 2, 32003)).unwrap();
        let t = res.betti_table();
        assert_eq!(t.shifts(1), vec![3, 3, 4]);
        assert_eq!(t.shifts(2), vec![5, 5]);
        assert!(!res.has_constant_entries());
        let hb = res.differential(1);
        for col in 0..2 {
            let degs: Vec<u32> = (0..3).map(|r| hb[r][col].total_degree().unwrap()).collect();
            assert_eq!(degs, vec![2, 2, 1]);
        }
    }

    #[test]
    fn complete_intersection_of_two_conics() {
        let fp = PrimeField::new(32003).unwrap();
        let x = |e: &[u32]| Poly::term(&fp, 3, Monomial::new(e), 1);
        let f = x(&[2, 0, 0]).sub(&x(&[0, 2, 0]));
        let g = x(&[0, 2, 0]).sub(&x(&[0, 0, 2]));
        let t = graded_betti(&[f, g]).unwrap();
        assert_eq!(t.shifts(1), vec![2, 2]);
        assert_eq!(t.shifts(2), vec![4]);
        assert_eq!(t.hilbert_function(5), 4);
    }

    #[test]
    fn table_reproduces_hilbert_function() {
        let z = random_points(3, 8, 4, 65537);
        let t = points_betti(&z).unwrap();
        for k in 0..8 {
            assert_eq!(t.hilbert_function(k), crate::points::hilbert_function(&z, k) as i64);
        }
    }

    #[test]
    fn json_roundtrip_and_diagram() {
        let t = BettiTable::from_entries(3, [((0, 0), 1), ((1, 3), 3), ((2, 4), 1), ((2, 5), 1)]);
        let back: BettiTable = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(t, back);
        let d = t.diagram();
        assert!(d.contains("total: 1 3 2"), "{d}");
        assert!(d.contains("    2: . 3 1"), "{d}");
        assert!(d.contains("    3: . . 1"), "{d}");
    }

    #[test]
    fn points_on_a_conic_are_special() {
        let fp = PrimeField::new(32003).unwrap();
        let pts: Vec<Vec<u64>> = (1..=7u64).map(|a| vec![1, a, a * a]).collect();
        let z = PointSet::new(&fp, 2, pts).unwrap();
        assert!(!is_resolution_general(&z).unwrap());
        assert!(is_resolution_general(&random_points(2, 7, 11, 32003)).unwrap());
    }
}
