//! Finite abelian groups written as direct products of cyclic groups, the
//! homomorphisms between them, and kernel codes built by enumeration.
//!
//! A kernel code is the set of words `(g_1, ..., g_N)` whose combined image
//! `mu_1(g_1) + ... + mu_N(g_N)` is the identity of the target group. A
//! concatenated kernel code appends the images of linear forms `h_i` to each
//! kernel word.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Default cap on the number of words a single enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;

/// Upper bound on domain size for exhaustive homomorphism validation.
pub const EXHAUSTIVE_VALIDATION_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("cyclic order {0} is invalid (every order must be at least 2)")]
    InvalidOrder(u64),
    #[error("group has no cyclic factors")]
    EmptyGroup,
    #[error("group cardinality overflows u64")]
    CardinalityOverflow,
    #[error("element has {got} residues but the group has {expected} factors")]
    ArityMismatch { expected: usize, got: usize },
    #[error("element does not belong to group {0}")]
    ForeignElement(GroupSpec),
    #[error("generator image {index} has order not dividing {order}")]
    NotAHomomorphism { index: usize, order: u64 },
    #[error("homomorphism fails additivity on {a} + {b}")]
    AdditivityViolated { a: String, b: String },
    #[error("no default homomorphism from {from} to {to}; supply generator images")]
    NoDefaultHomomorphism { from: GroupSpec, to: GroupSpec },
    #[error("homomorphism {index} maps {found} but the word coordinate lives in {expected}")]
    DomainMismatch {
        index: usize,
        expected: GroupSpec,
        found: GroupSpec,
    },
    #[error("homomorphism {index} lands in {found}, expected {expected}")]
    CodomainMismatch {
        index: usize,
        expected: GroupSpec,
        found: GroupSpec,
    },
    #[error("expected {expected} homomorphisms, got {got}")]
    HomomorphismCount { expected: usize, got: usize },
    #[error("enumeration of {description} words exceeds the budget of {budget}")]
    BudgetExceeded { description: String, budget: u64 },
    #[error("subset marker must not be the identity")]
    IdentityMarker,
    #[error("linear form has arity {form} but the word has length {word}")]
    FormArity { form: usize, word: usize },
    #[error("word coordinates do not share a single group")]
    MixedWord,
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

/// A finite abelian group `Z_{m_1} x ... x Z_{m_k}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    orders: Arc<[u64]>,
}

impl GroupSpec {
    pub fn new(orders: &[u64]) -> Result<Self> {
        if orders.is_empty() {
            return Err(AlgebraError::EmptyGroup);
        }
        if let Some(&bad) = orders.iter().find(|&&m| m < 2) {
            return Err(AlgebraError::InvalidOrder(bad));
        }
        let spec = GroupSpec {
            orders: orders.into(),
        };
        spec.cardinality()?;
        Ok(spec)
    }

    pub fn cyclic(order: u64) -> Result<Self> {
        Self::new(&[order])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn cardinality(&self) -> Result<u64> {
        self.orders
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .ok_or(AlgebraError::CardinalityOverflow)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            spec: self.clone(),
            residues: vec![0; self.rank()],
        }
    }

    /// Builds an element, reducing each residue modulo its factor order.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.rank() {
            return Err(AlgebraError::ArityMismatch {
                expected: self.rank(),
                got: residues.len(),
            });
        }
        let residues = residues
            .iter()
            .zip(self.orders.iter())
            .map(|(&r, &m)| r.rem_euclid(m as i64) as u64)
            .collect();
        Ok(GroupElement {
            spec: self.clone(),
            residues,
        })
    }

    /// The `j`-th canonical generator (1 in factor `j`, 0 elsewhere).
    pub fn generator(&self, j: usize) -> GroupElement {
        let mut e = self.identity();
        e.residues[j] = 1;
        e
    }

    fn check(&self, e: &GroupElement) -> Result<()> {
        if &e.spec != self {
            return Err(AlgebraError::ForeignElement(self.clone()));
        }
        Ok(())
    }

    /// Every element of the group in lexicographic order of residues.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        // cardinality is validated at construction
        let total = self.cardinality().unwrap_or(0);
        (0..total).map(move |mut idx| {
            let mut residues = vec![0; self.rank()];
            for (slot, &m) in residues.iter_mut().zip(self.orders.iter()).rev() {
                *slot = idx % m;
                idx /= m;
            }
            GroupElement {
                spec: self.clone(),
                residues,
            }
        })
    }

    /// Whether every element prints as a single decimal digit per factor.
    pub fn is_digit_printable(&self) -> bool {
        self.orders.iter().all(|&m| m <= 10)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.orders.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "Z{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An element of a [`GroupSpec`], stored as canonical residues.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    spec: GroupSpec,
    residues: Vec<u64>,
}

impl GroupElement {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_identity(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.spec.check(other)?;
        let residues = self
            .residues
            .iter()
            .zip(&other.residues)
            .zip(self.spec.orders.iter())
            .map(|((&a, &b), &m)| (a + b) % m)
            .collect();
        Ok(GroupElement {
            spec: self.spec.clone(),
            residues,
        })
    }

    pub fn neg(&self) -> GroupElement {
        let residues = self
            .residues
            .iter()
            .zip(self.spec.orders.iter())
            .map(|(&a, &m)| (m - a) % m)
            .collect();
        GroupElement {
            spec: self.spec.clone(),
            residues,
        }
    }

    /// `k * self`, with negative `k` meaning `|k| * (-self)`.
    pub fn scale(&self, k: i64) -> GroupElement {
        let residues = self
            .residues
            .iter()
            .zip(self.spec.orders.iter())
            .map(|(&a, &m)| {
                let k = k.rem_euclid(m as i64) as u128;
                ((a as u128 * k) % m as u128) as u64
            })
            .collect();
        GroupElement {
            spec: self.spec.clone(),
            residues,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.spec.is_digit_printable();
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 && !digits {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.spec, self)
    }
}

/// A homomorphism between finite abelian groups, fixed by where it sends the
/// canonical generators of its domain.
#[derive(Clone, PartialEq, Eq)]
pub struct Homomorphism {
    domain: GroupSpec,
    codomain: GroupSpec,
    images: Vec<GroupElement>,
}

impl Homomorphism {
    /// Validates that `m_j * images[j]` is the identity for every factor.
    pub fn new(domain: GroupSpec, codomain: GroupSpec, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != domain.rank() {
            return Err(AlgebraError::ArityMismatch {
                expected: domain.rank(),
                got: images.len(),
            });
        }
        for (index, (img, &order)) in images.iter().zip(domain.orders()).enumerate() {
            codomain.check(img)?;
            if !img.scale(order as i64).is_identity() {
                return Err(AlgebraError::NotAHomomorphism { index, order });
            }
        }
        Ok(Homomorphism {
            domain,
            codomain,
            images,
        })
    }

    pub fn identity(group: &GroupSpec) -> Self {
        let images = (0..group.rank()).map(|j| group.generator(j)).collect();
        Homomorphism {
            domain: group.clone(),
            codomain: group.clone(),
            images,
        }
    }

    pub fn trivial(domain: &GroupSpec, codomain: &GroupSpec) -> Self {
        Homomorphism {
            domain: domain.clone(),
            codomain: codomain.clone(),
            images: vec![codomain.identity(); domain.rank()],
        }
    }

    /// The reduction `Z_m -> Z_s`, `x -> x mod s`; requires `s | m`.
    pub fn reduction(m: u64, s: u64) -> Result<Self> {
        let domain = GroupSpec::cyclic(m)?;
        let codomain = GroupSpec::cyclic(s)?;
        if !m.is_multiple_of(s) {
            return Err(AlgebraError::NoDefaultHomomorphism {
                from: domain,
                to: codomain,
            });
        }
        let image = codomain.generator(0);
        Self::new(domain, codomain, vec![image])
    }

    /// The default map used when a construction asks for "the" homomorphism
    /// from `domain` into `codomain`: identity when the groups agree,
    /// reduction between cyclic groups when the target order divides the
    /// source order.
    pub fn default_between(domain: &GroupSpec, codomain: &GroupSpec) -> Result<Self> {
        if domain == codomain {
            return Ok(Self::identity(domain));
        }
        match (domain.orders(), codomain.orders()) {
            ([m], [s]) if m % s == 0 => Self::reduction(*m, *s),
            _ => Err(AlgebraError::NoDefaultHomomorphism {
                from: domain.clone(),
                to: codomain.clone(),
            }),
        }
    }

    pub fn domain(&self) -> &GroupSpec {
        &self.domain
    }

    pub fn codomain(&self) -> &GroupSpec {
        &self.codomain
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        self.domain.check(x)?;
        let mut acc = self.codomain.identity();
        for (&r, img) in x.residues.iter().zip(&self.images) {
            acc = acc.add(&img.scale(r as i64))?;
        }
        Ok(acc)
    }

    /// Checks `phi(a + b) = phi(a) + phi(b)` over every pair of the domain.
    /// Domains larger than [`EXHAUSTIVE_VALIDATION_LIMIT`] are only checked
    /// on generators, which [`Homomorphism::new`] already did.
    pub fn validate_exhaustive(&self) -> Result<()> {
        if self.domain.cardinality()? > EXHAUSTIVE_VALIDATION_LIMIT {
            return Ok(());
        }
        let elems: Vec<_> = self.domain.elements().collect();
        let images = elems
            .iter()
            .map(|e| self.apply(e))
            .collect::<Result<Vec<_>>>()?;
        for (a, fa) in elems.iter().zip(&images) {
            for (b, fb) in elems.iter().zip(&images) {
                if self.apply(&a.add(b)?)? != fa.add(fb)? {
                    return Err(AlgebraError::AdditivityViolated {
                        a: a.to_string(),
                        b: b.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {:?}", self.domain, self.codomain, self.images)
    }
}

/// A tuple of group elements. Kernel words may mix factor groups; words fed to
/// [`concat_encode`] must share one group.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    coords: Vec<GroupElement>,
}

impl Word {
    pub fn new(coords: Vec<GroupElement>) -> Self {
        Word { coords }
    }

    /// Parses a word over `group` from small integer coordinates, one per
    /// position (only for single-factor groups).
    pub fn from_residues(group: &GroupSpec, residues: &[i64]) -> Result<Self> {
        residues
            .iter()
            .map(|&r| group.element(&[r]))
            .collect::<Result<Vec<_>>>()
            .map(Word::new)
    }

    pub fn coords(&self) -> &[GroupElement] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// The common group of all coordinates, if there is one.
    pub fn uniform_group(&self) -> Option<&GroupSpec> {
        let first = self.coords.first()?.spec();
        self.coords
            .iter()
            .all(|c| c.spec() == first)
            .then_some(first)
    }

    pub fn add(&self, other: &Word) -> Result<Word> {
        if self.len() != other.len() {
            return Err(AlgebraError::ArityMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()
            .map(Word::new)
    }

    pub fn neg(&self) -> Word {
        Word::new(self.coords.iter().map(GroupElement::neg).collect())
    }

    fn digit_printable(&self) -> bool {
        self.coords.iter().all(|c| c.spec().is_digit_printable())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.digit_printable() { "" } else { "," };
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A linear form `h(g_1, ..., g_k) = c_1 g_1 + ... + c_k g_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    coefficients: Vec<i64>,
}

impl LinearForm {
    pub fn new(coefficients: Vec<i64>) -> Self {
        LinearForm { coefficients }
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn apply(&self, word: &Word) -> Result<GroupElement> {
        if word.len() != self.arity() {
            return Err(AlgebraError::FormArity {
                form: self.arity(),
                word: word.len(),
            });
        }
        let group = word.uniform_group().ok_or(AlgebraError::MixedWord)?;
        let mut acc = group.identity();
        for (c, g) in self.coefficients.iter().zip(word.coords()) {
            acc = acc.add(&g.scale(*c))?;
        }
        Ok(acc)
    }
}

/// Enumeration limit for exponential searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget(pub u64);

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget(DEFAULT_ENUMERATION_BUDGET)
    }
}

impl EnumerationBudget {
    fn admit(&self, factors: &[GroupSpec]) -> Result<u64> {
        let describe = || {
            if factors.windows(2).all(|w| w[0] == w[1]) && !factors.is_empty() {
                let card = factors[0]
                    .cardinality()
                    .map_or("?".into(), |c| c.to_string());
                format!("{card}^{}", factors.len())
            } else {
                factors
                    .iter()
                    .map(|g| g.cardinality().map_or("?".into(), |c| c.to_string()))
                    .collect::<Vec<_>>()
                    .join("*")
            }
        };
        let mut total: u64 = 1;
        for g in factors {
            total = match total.checked_mul(g.cardinality()?) {
                Some(t) if t <= self.0 => t,
                _ => {
                    return Err(AlgebraError::BudgetExceeded {
                        description: describe(),
                        budget: self.0,
                    })
                }
            };
        }
        Ok(total)
    }
}

/// Lexicographic odometer over a product of groups.
#[derive(Debug, Clone)]
pub struct WordIter {
    factors: Vec<GroupSpec>,
    digits: Vec<u64>,
    radices: Vec<u64>,
    remaining: u64,
}

impl WordIter {
    fn new(factors: Vec<GroupSpec>, total: u64) -> Self {
        let radices: Vec<u64> = factors.iter().flat_map(|g| g.orders().to_vec()).collect();
        WordIter {
            digits: vec![0; radices.len()],
            radices,
            factors,
            remaining: total,
        }
    }

    fn current(&self) -> Word {
        let mut offset = 0;
        let coords = self
            .factors
            .iter()
            .map(|g| {
                let residues = self.digits[offset..offset + g.rank()].to_vec();
                offset += g.rank();
                GroupElement {
                    spec: g.clone(),
                    residues,
                }
            })
            .collect();
        Word::new(coords)
    }

    fn advance(&mut self) {
        for (d, &m) in self.digits.iter_mut().zip(&self.radices).rev() {
            *d += 1;
            if *d < m {
                return;
            }
            *d = 0;
        }
    }
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.remaining == 0 {
            return None;
        }
        let w = self.current();
        self.remaining -= 1;
        self.advance();
        Some(w)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

impl ExactSizeIterator for WordIter {}

/// Every element of `factors[0] x ... x factors[N-1]` in lexicographic order.
pub fn enumerate_product(factors: &[GroupSpec], budget: EnumerationBudget) -> Result<WordIter> {
    let total = budget.admit(factors)?;
    Ok(WordIter::new(factors.to_vec(), total))
}

/// Every word of `G^len` in lexicographic order.
pub fn enumerate_words(
    group: &GroupSpec,
    len: usize,
    budget: EnumerationBudget,
) -> Result<WordIter> {
    enumerate_product(&vec![group.clone(); len], budget)
}

/// Words `g` over `factors` with `mu_1(g_1) + ... + mu_N(g_N) = 0` in `target`.
pub fn kernel_code(
    factors: &[GroupSpec],
    mus: &[Homomorphism],
    target: &GroupSpec,
    budget: EnumerationBudget,
) -> Result<Vec<Word>> {
    check_maps(factors, mus, target)?;
    let mut out = Vec::new();
    for w in enumerate_product(factors, budget)? {
        if combined_image(mus, target, &w)?.is_identity() {
            out.push(w);
        }
    }
    Ok(out)
}

fn check_maps(factors: &[GroupSpec], mus: &[Homomorphism], target: &GroupSpec) -> Result<()> {
    if factors.len() != mus.len() {
        return Err(AlgebraError::HomomorphismCount {
            expected: factors.len(),
            got: mus.len(),
        });
    }
    for (index, (g, mu)) in factors.iter().zip(mus).enumerate() {
        if mu.domain() != g {
            return Err(AlgebraError::DomainMismatch {
                index,
                expected: g.clone(),
                found: mu.domain().clone(),
            });
        }
        if mu.codomain() != target {
            return Err(AlgebraError::CodomainMismatch {
                index,
                expected: target.clone(),
                found: mu.codomain().clone(),
            });
        }
    }
    Ok(())
}

fn combined_image(mus: &[Homomorphism], target: &GroupSpec, w: &Word) -> Result<GroupElement> {
    let mut acc = target.identity();
    for (mu, g) in mus.iter().zip(w.coords()) {
        acc = acc.add(&mu.apply(g)?)?;
    }
    Ok(acc)
}

/// The kernel code of length `n + 1` over `group` under the default maps
/// into `target`.
pub fn default_kernel(
    group: &GroupSpec,
    target: &GroupSpec,
    n: usize,
    budget: EnumerationBudget,
) -> Result<Vec<Word>> {
    let mu = Homomorphism::default_between(group, target)?;
    let factors = vec![group.clone(); n + 1];
    kernel_code(&factors, &vec![mu; n + 1], target, budget)
}

/// Kernel words of length `n + 1` whose first coordinate maps to `marker`.
pub fn kernel_subset(
    group: &GroupSpec,
    target: &GroupSpec,
    n: usize,
    marker: &GroupElement,
    budget: EnumerationBudget,
) -> Result<Vec<Word>> {
    target.check(marker)?;
    if marker.is_identity() {
        return Err(AlgebraError::IdentityMarker);
    }
    let mu = Homomorphism::default_between(group, target)?;
    let factors = vec![group.clone(); n + 1];
    let mus = vec![mu.clone(); n + 1];
    check_maps(&factors, &mus, target)?;
    let mut out = Vec::new();
    for w in enumerate_product(&factors, budget)? {
        if &mu.apply(&w.coords()[0])? == marker && combined_image(&mus, target, &w)?.is_identity() {
            out.push(w);
        }
    }
    Ok(out)
}

/// Appends `h_1(w), ..., h_r(w)` to `w`.
pub fn concat_encode(w: &Word, forms: &[LinearForm]) -> Result<Word> {
    let mut coords = w.coords().to_vec();
    for form in forms {
        coords.push(form.apply(w)?);
    }
    Ok(Word::new(coords))
}
