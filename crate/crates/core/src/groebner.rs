//! Buchberger's algorithm under grevlex with sugar selection and the
//! Gebauer–Möller criteria, plus a multi-modular variant over the rationals.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{is_prime, rational_reconstruct, Field, PrimeField, Rationals};
use crate::monomial::{monomials_of_degree, Monomial};
use crate::poly::{GradedForm, Poly};

/// Coefficient size above which rational Buchberger gives up.
pub const MAX_RATIONAL_BITS: u64 = 20_000;

/// A reduced Gröbner basis: monic, inter-reduced, sorted by ascending leading monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<F: Field> {
    field: F,
    nvars: usize,
    polys: Vec<Poly<F>>,
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

/// Full normal form of `p` with respect to `basis` (all terms reduced).
pub fn normal_form<F: Field>(p: &Poly<F>, basis: &[&Poly<F>]) -> Poly<F> {
    let f = p.field().clone();
    let nvars = p.nvars();
    let mut work: BTreeMap<Monomial, F::Elem> = p.terms().iter().cloned().collect();
    let mut rem: Vec<(Monomial, F::Elem)> = Vec::new();
    while let Some((m, c)) = work.pop_last() {
        let reducer = basis.iter().find(|g| g.lead_monomial().is_some_and(|lm| lm.divides(&m)));
        match reducer {
            None => rem.push((m, c)),
            Some(g) => {
                let (lm, lc) = g.lead().unwrap();
                let factor = f.neg(&f.div(&c, lc));
                let shift = lm.quotient_of(&m);
                for (t, a) in &g.terms()[1..] {
                    let key = t.mul(&shift);
                    let v = f.mul(a, &factor);
                    match work.get_mut(&key) {
                        Some(x) => {
                            *x = f.add(x, &v);
                            if f.is_zero(x) {
                                work.remove(&key);
                            }
                        }
                        None => {
                            work.insert(key, v);
                        }
                    }
                }
            }
        }
    }
    Poly::from_terms(&f, nvars, rem)
}

fn s_poly<F: Field>(a: &Poly<F>, b: &Poly<F>, lcm: &Monomial) -> Poly<F> {
    let f = a.field();
    let (la, ca) = a.lead().unwrap();
    let (lb, cb) = b.lead().unwrap();
    let pa = a.mul_term(&la.quotient_of(lcm), &f.inv(ca).unwrap());
    let pb = b.mul_term(&lb.quotient_of(lcm), &f.inv(cb).unwrap());
    pa.sub(&pb)
}

fn poly_sugar<F: Field>(p: &Poly<F>) -> u32 {
    p.total_degree().unwrap_or(0)
}

fn max_bits<F: Field>(p: &Poly<F>) -> u64 {
    p.terms().iter().map(|(_, c)| p.field().size_bits(c)).max().unwrap_or(0)
}

struct Buchberger<F: Field> {
    polys: Vec<Poly<F>>,
    sugar: Vec<u32>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
}

impl<F: Field> Buchberger<F> {
    fn lm(&self, i: usize) -> Monomial {
        self.polys[i].lead_monomial().unwrap()
    }

    fn update(&mut self, h: usize) {
        let lh = self.lm(h);
        // drop old pairs made redundant by h
        let lms: Vec<Monomial> = (0..self.polys.len()).map(|i| self.lm(i)).collect();
        self.pairs.retain(|p| {
            !(lh.divides(&p.lcm) && lms[p.i].lcm(&lh) != p.lcm && lms[p.j].lcm(&lh) != p.lcm)
        });
        let sh = self.sugar[h];
        let mut new: Vec<(Pair, bool)> = (0..h)
            .filter(|&g| self.active[g])
            .map(|g| {
                let lcm = lms[g].lcm(&lh);
                let sugar = (self.sugar[g] + lcm.degree() - lms[g].degree()).max(sh + lcm.degree() - lh.degree());
                (Pair { i: g, j: h, lcm, sugar }, lms[g].is_coprime(&lh))
            })
            .collect();
        // M criterion: remove pairs whose lcm is properly divisible by another's
        let lcms: Vec<Monomial> = new.iter().map(|(p, _)| p.lcm).collect();
        new = new
            .into_iter()
            .filter(|(p, _)| !lcms.iter().any(|l| l.divides(&p.lcm) && *l != p.lcm))
            .collect();
        // F criterion: one pair per lcm, none if a coprime pair shares it
        let mut by_lcm: BTreeMap<Monomial, (Pair, bool)> = BTreeMap::new();
        for (p, cop) in new {
            match by_lcm.get_mut(&p.lcm) {
                Some(entry) => entry.1 |= cop,
                None => {
                    by_lcm.insert(p.lcm, (p, cop));
                }
            }
        }
        // B criterion: coprime leading monomials
        self.pairs.extend(by_lcm.into_values().filter(|(_, cop)| !cop).map(|(p, _)| p));
        for g in 0..h {
            if self.active[g] && lh.divides(&lms[g]) {
                self.active[g] = false;
            }
        }
    }

    fn add(&mut self, p: Poly<F>, sugar: u32) {
        self.polys.push(p.monic());
        self.sugar.push(sugar);
        self.active.push(true);
        let h = self.polys.len() - 1;
        self.update(h);
    }

    fn next_pair(&mut self) -> Option<Pair> {
        let idx = (0..self.pairs.len()).min_by(|&a, &b| {
            let (pa, pb) = (&self.pairs[a], &self.pairs[b]);
            pa.sugar.cmp(&pb.sugar).then(pa.lcm.cmp(&pb.lcm)).then((pa.i, pa.j).cmp(&(pb.i, pb.j)))
        })?;
        Some(self.pairs.swap_remove(idx))
    }
}

impl<F: Field> GroebnerBasis<F> {
    /// Computes the reduced Gröbner basis of the ideal generated by `gens`.
    pub fn new(field: &F, nvars: usize, gens: &[Poly<F>]) -> Result<Self> {
        for g in gens {
            if g.nvars() != nvars {
                return Err(Error::NvarsMismatch(nvars, g.nvars()));
            }
        }
        if !field.is_exact() {
            return Err(Error::Unsupported("Gröbner bases need an exact field".into()));
        }
        let mut bb = Buchberger { polys: Vec::new(), sugar: Vec::new(), active: Vec::new(), pairs: Vec::new() };
        let mut sorted: Vec<&Poly<F>> = gens.iter().filter(|g| !g.is_zero()).collect();
        sorted.sort_by_key(|g| g.lead_monomial());
        for g in sorted {
            let active: Vec<&Poly<F>> = bb.active_polys();
            let r = normal_form(g, &active);
            if !r.is_zero() {
                let s = poly_sugar(&r);
                bb.add(r, s);
            }
        }
        while let Some(pair) = bb.next_pair() {
            let s = s_poly(&bb.polys[pair.i], &bb.polys[pair.j], &pair.lcm);
            let active = bb.active_polys();
            let r = normal_form(&s, &active);
            if r.is_zero() {
                continue;
            }
            let bits = max_bits(&r);
            if bits > MAX_RATIONAL_BITS {
                return Err(Error::CoefficientBlowup(bits));
            }
            let sugar = pair.sugar.max(poly_sugar(&r));
            bb.add(r, sugar);
        }
        let minimal: Vec<Poly<F>> =
            (0..bb.polys.len()).filter(|&i| bb.active[i]).map(|i| bb.polys[i].clone()).collect();
        Ok(Self::interreduce(field, nvars, minimal))
    }

    fn interreduce(field: &F, nvars: usize, mut minimal: Vec<Poly<F>>) -> Self {
        minimal.sort_by_key(|g| g.lead_monomial());
        let mut out = Vec::with_capacity(minimal.len());
        for i in 0..minimal.len() {
            let others: Vec<&Poly<F>> = minimal.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g).collect();
            let lead = minimal[i].lead().unwrap().clone();
            let tail = Poly::from_terms(field, nvars, minimal[i].terms()[1..].iter().cloned());
            let red = normal_form(&tail, &others);
            out.push(Poly::term(field, nvars, lead.0, lead.1).add(&red).monic());
        }
        GroebnerBasis { field: field.clone(), nvars, polys: out }
    }

    pub fn from_forms(forms: &[GradedForm<F>]) -> Result<Self> {
        let first = forms.first().ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
        let polys: Vec<Poly<F>> = forms.iter().map(|g| g.poly().clone()).collect();
        Self::new(first.field(), first.nvars(), &polys)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn polys(&self) -> &[Poly<F>] {
        &self.polys
    }
    pub fn len(&self) -> usize {
        self.polys.len()
    }
    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn lead_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().map(|g| g.lead_monomial().unwrap()).collect()
    }

    pub fn reduce(&self, p: &Poly<F>) -> Poly<F> {
        let refs: Vec<&Poly<F>> = self.polys.iter().collect();
        normal_form(p, &refs)
    }

    pub fn contains(&self, p: &Poly<F>) -> bool {
        self.reduce(p).is_zero()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.polys.iter().any(|g| g.lead_monomial() == Some(Monomial::one()))
    }

    fn in_lead_ideal(&self, m: &Monomial) -> bool {
        self.polys.iter().any(|g| g.lead_monomial().unwrap().divides(m))
    }

    /// Finitely many standard monomials, i.e. a pure power of every variable leads some element.
    pub fn is_zero_dimensional(&self) -> bool {
        let lms = self.lead_monomials();
        (0..self.nvars).all(|i| lms.iter().any(|m| m.degree() == m.exp(i) && m.exp(i) > 0))
            || self.is_unit_ideal()
    }

    /// Standard monomials of a zero-dimensional ideal, ascending.
    pub fn standard_monomials(&self) -> Result<Vec<Monomial>> {
        if !self.is_zero_dimensional() {
            return Err(Error::NotZeroDimensional);
        }
        if self.is_unit_ideal() {
            return Ok(Vec::new());
        }
        let mut seen: HashSet<Monomial> = HashSet::new();
        let mut frontier = vec![Monomial::one()];
        seen.insert(Monomial::one());
        while let Some(m) = frontier.pop() {
            for i in 0..self.nvars {
                let next = m.mul(&Monomial::var(i));
                if !seen.contains(&next) && !self.in_lead_ideal(&next) {
                    seen.insert(next);
                    frontier.push(next);
                }
            }
        }
        let mut out: Vec<Monomial> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    pub fn quotient_dimension(&self) -> Result<usize> {
        Ok(self.standard_monomials()?.len())
    }

    /// Number of standard monomials of degree `t` (the Hilbert function of a
    /// homogeneous ideal).
    pub fn hilbert_function(&self, t: u32) -> usize {
        monomials_of_degree(self.nvars, t).iter().filter(|m| !self.in_lead_ideal(m)).count()
    }

    pub fn max_degree(&self) -> u32 {
        self.polys.iter().filter_map(|g| g.total_degree()).max().unwrap_or(0)
    }
}

impl<F: Field> Buchberger<F> {
    fn active_polys(&self) -> Vec<&Poly<F>> {
        (0..self.polys.len()).filter(|&i| self.active[i]).map(|i| &self.polys[i]).collect()
    }
}

/// Quotient dimension of the ideal generated by `gens`.
pub fn quotient_dimension<F: Field>(field: &F, nvars: usize, gens: &[Poly<F>]) -> Result<usize> {
    GroebnerBasis::new(field, nvars, gens)?.quotient_dimension()
}

/// Eventual value of the Hilbert function of a homogeneous ideal whose
/// projective zero set is finite: its degree.
pub fn projective_degree<F: Field>(gb: &GroebnerBasis<F>) -> Result<usize> {
    let start = gb.max_degree();
    let mut prev = gb.hilbert_function(start);
    let mut stable = 0;
    for t in start + 1..start + 40 {
        let h = gb.hilbert_function(t);
        if h == prev {
            stable += 1;
            if stable >= gb.nvars() as u32 + 1 {
                return Ok(h);
            }
        } else if h > prev && t > start + 2 * gb.nvars() as u32 + 4 {
            return Err(Error::NotZeroDimensional);
        } else {
            stable = 0;
        }
        prev = h;
    }
    Err(Error::NotZeroDimensional)
}

/// Primes below 2^31 used by the modular algorithm, descending.
pub fn modular_primes() -> impl Iterator<Item = u64> {
    (1u64 << 20..(1u64 << 31) - 1).rev().filter(|&p| is_prime(p))
}

/// Reduced Gröbner basis over the rationals via Gröbner bases modulo
/// several primes, Chinese remaindering and rational reconstruction. The
/// result is checked against one further prime.
pub fn groebner_basis_modular(nvars: usize, gens: &[Poly<Rationals>]) -> Result<GroebnerBasis<Rationals>> {
    type Image = (Vec<Monomial>, Vec<Vec<(Monomial, u64)>>);
    let mut primes = modular_primes();
    let mut images: HashMap<Vec<Monomial>, (Vec<u64>, Vec<Image>)> = HashMap::new();
    let mut last: Option<GroebnerBasis<Rationals>> = None;
    for _round in 0..300 {
        let p = primes.next().ok_or_else(|| Error::Numerical("ran out of primes".into()))?;
        let fp = PrimeField::new(p)?;
        let Some(red) = gens.iter().map(|g| g.to_prime(&fp)).collect::<Option<Vec<_>>>() else { continue };
        let gb = GroebnerBasis::new(&fp, nvars, &red)?;
        let lms = gb.lead_monomials();
        let support: Vec<Vec<(Monomial, u64)>> = gb.polys.iter().map(|g| g.terms().to_vec()).collect();
        let entry = images.entry(lms.clone()).or_default();
        entry.0.push(p);
        entry.1.push((lms.clone(), support));
        // use the leading-monomial pattern seen most often
        let best = images.iter().max_by_key(|(k, v)| (v.0.len(), std::cmp::Reverse((*k).clone()))).unwrap();
        if best.0 != &lms {
            continue;
        }
        let (ps, imgs) = best.1;
        let Some(cand) = reconstruct(nvars, ps, imgs) else { continue };
        if last.as_ref() == Some(&cand) {
            // verify with a fresh prime
            let q = primes.next().ok_or_else(|| Error::Numerical("ran out of primes".into()))?;
            let fq = PrimeField::new(q)?;
            if let (Some(redq), Some(candq)) = (
                gens.iter().map(|g| g.to_prime(&fq)).collect::<Option<Vec<_>>>(),
                cand.polys.iter().map(|g| g.to_prime(&fq)).collect::<Option<Vec<_>>>(),
            ) {
                let gbq = GroebnerBasis::new(&fq, nvars, &redq)?;
                if gbq.polys == candq {
                    return Ok(cand);
                }
            }
        }
        last = Some(cand);
    }
    Err(Error::Numerical("modular Gröbner basis did not stabilize".into()))
}

fn reconstruct(
    nvars: usize,
    primes: &[u64],
    images: &[(Vec<Monomial>, Vec<Vec<(Monomial, u64)>>)],
) -> Option<GroebnerBasis<Rationals>> {
    let npolys = images[0].1.len();
    let mut modulus = BigInt::one();
    for &p in primes {
        modulus *= BigInt::from(p);
    }
    let mut polys = Vec::with_capacity(npolys);
    for k in 0..npolys {
        let mut support: Vec<Monomial> = images.iter().flat_map(|im| im.1[k].iter().map(|t| t.0)).collect();
        support.sort();
        support.dedup();
        let mut terms = Vec::with_capacity(support.len());
        for m in support.iter().rev() {
            // CRT of the residues
            let mut acc = BigInt::zero();
            let mut modsofar = BigInt::one();
            for (im, &p) in images.iter().zip(primes) {
                let r = im.1[k].iter().find(|t| t.0 == *m).map_or(0, |t| t.1);
                let pb = BigInt::from(p);
                let cur = acc.clone() % &pb;
                let cur = ((cur % &pb) + &pb) % &pb;
                let diff = ((BigInt::from(r) - cur) % &pb + &pb) % &pb;
                let inv = mod_inverse(&(modsofar.clone() % &pb), &pb)?;
                let t = (diff * inv) % &pb;
                acc += &modsofar * t;
                modsofar *= &pb;
            }
            let q: BigRational = rational_reconstruct(&acc, &modulus)?;
            if !q.is_zero() {
                terms.push((*m, q));
            }
        }
        polys.push(Poly::from_terms(&Rationals, nvars, terms));
    }
    Some(GroebnerBasis { field: Rationals, nvars, polys })
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd_lcm(m);
    if !e.0.gcd.is_one() {
        return None;
    }
    Some(((e.0.x % m) + m) % m)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;

    fn fp() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    fn poly(f: &PrimeField, nvars: usize, terms: &[(&[u32], i64)]) -> Poly<PrimeField> {
        Poly::from_terms(f, nvars, terms.iter().map(|(e, c)| (Monomial::new(e), f.from_i64(*c))))
    }

    #[test]
    fn variables_are_their_own_basis() {
        let f = fp();
        let gens = vec![poly(&f, 3, &[(&[1, 0, 0], 1)]), poly(&f, 3, &[(&[0, 1, 0], 1)])];
        let gb = GroebnerBasis::new(&f, 3, &gens).unwrap();
        assert_eq!(gb.len(), 2);
        assert_eq!(gb.hilbert_function(4), 1);
        // on the chart u2 = 1 the ideal is a single point
        let chart: Vec<_> = gens.iter().map(|g| g.specialize(2, &1)).collect();
        assert_eq!(quotient_dimension(&f, 2, &chart).unwrap(), 1);
    }

    #[test]
    fn two_conics_meet_in_four_points() {
        let f = fp();
        let a = poly(&f, 2, &[(&[2, 0], 1), (&[0, 2], 1), (&[0, 0], -5)]);
        let b = poly(&f, 2, &[(&[1, 1], 1), (&[0, 0], -2)]);
        assert_eq!(quotient_dimension(&f, 2, &[a, b]).unwrap(), 4);
    }

    #[test]
    fn positive_dimensional_is_rejected() {
        let f = fp();
        let a = poly(&f, 2, &[(&[1, 1], 1)]);
        assert_eq!(quotient_dimension(&f, 2, &[a]), Err(Error::NotZeroDimensional));
    }

    #[test]
    fn modular_matches_direct_over_rationals() {
        let gens: Vec<Poly<Rationals>> = vec![
            Poly::from_terms(&Rationals, 2, vec![(Monomial::new(&[2, 0]), q(3, 1)), (Monomial::new(&[0, 1]), q(-1, 2)), (Monomial::new(&[0, 0]), q(7, 1))]),
            Poly::from_terms(&Rationals, 2, vec![(Monomial::new(&[1, 1]), q(2, 1)), (Monomial::new(&[1, 0]), q(5, 3)), (Monomial::new(&[0, 0]), q(-1, 1))]),
        ];
        let direct = GroebnerBasis::new(&Rationals, 2, &gens).unwrap();
        let modular = groebner_basis_modular(2, &gens).unwrap();
        assert_eq!(direct, modular);
    }

    #[test]
    fn grid_cubics_have_degree_nine() {
        let f = fp();
        // (x0)(x0 - x2)(x0 - 2 x2) and the same in x1, on the chart x2 = 1
        let a = poly(&f, 2, &[(&[3, 0], 1), (&[2, 0], -3), (&[1, 0], 2)]);
        let b = poly(&f, 2, &[(&[0, 3], 1), (&[0, 2], -3), (&[0, 1], 2)]);
        assert_eq!(quotient_dimension(&f, 2, &[a, b]).unwrap(), 9);
    }
}
