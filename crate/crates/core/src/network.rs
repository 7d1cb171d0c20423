//! Reaction network representation: complexes, reactions, homogenisation
//! and induced subnetworks.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A formal nonnegative combination of species. Only nonzero coefficients are
/// stored, so two complexes compare equal iff their coefficient maps agree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Complex {
    coefficients: BTreeMap<usize, Rational>,
}

impl Complex {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut complex = Self::empty();
        for (species, coeff) in terms {
            if coeff.is_negative() {
                return Err(Error::InvalidNetwork(format!(
                    "negative coefficient {} for species index {species}",
                    rational::format_rational(&coeff)
                )));
            }
            complex.add(species, &coeff);
        }
        Ok(complex)
    }

    /// Convenience constructor for integer coefficients.
    pub fn from_ints(terms: &[(usize, i64)]) -> Result<Self> {
        Self::new(terms.iter().map(|&(s, c)| (s, rational::int(c))))
    }

    pub fn coefficient(&self, species: usize) -> Rational {
        self.coefficients
            .get(&species)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coefficients.iter().map(|(&s, c)| (s, c))
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn molecularity(&self) -> Rational {
        self.coefficients
            .values()
            .fold(Rational::zero(), |acc, c| acc + c)
    }

    pub fn max_species_index(&self) -> Option<usize> {
        self.coefficients.keys().next_back().copied()
    }

    pub(crate) fn add(&mut self, species: usize, coeff: &Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self
            .coefficients
            .entry(species)
            .or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coefficients.remove(&species);
        }
    }

    fn without(&self, dropped: &HashSet<usize>, renumber: &[Option<usize>]) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .filter(|(s, _)| !dropped.contains(s))
            .filter_map(|(&s, c)| renumber[s].map(|t| (t, c.clone())))
            .collect();
        Self { coefficients }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reaction {
    pub reactant: Complex,
    pub product: Complex,
}

impl Reaction {
    pub fn new(reactant: Complex, product: Complex) -> Result<Self> {
        if reactant == product {
            return Err(Error::InvalidNetwork(
                "reactant and product complexes are identical".into(),
            ));
        }
        Ok(Self { reactant, product })
    }

    /// product − reactant coefficient of one species.
    pub fn net_change(&self, species: usize) -> Rational {
        self.product.coefficient(species) - self.reactant.coefficient(species)
    }

    /// Reactant molecularity minus product molecularity.
    pub fn molecularity_deficit(&self) -> Rational {
        self.reactant.molecularity() - self.product.molecularity()
    }
}

/// An ordered set of species and an ordered set of irreversible reactions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Crn {
    species: Vec<String>,
    reactions: Vec<Reaction>,
}

impl Crn {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self> {
        let mut seen = HashSet::new();
        for name in &species {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidNetwork(format!("duplicate species `{name}`")));
            }
        }
        for (j, reaction) in reactions.iter().enumerate() {
            let top = reaction
                .reactant
                .max_species_index()
                .into_iter()
                .chain(reaction.product.max_species_index())
                .max();
            if let Some(top) = top {
                if top >= species.len() {
                    return Err(Error::InvalidNetwork(format!(
                        "reaction {j} references species index {top} but only {} species exist",
                        species.len()
                    )));
                }
            }
            if reaction.reactant == reaction.product {
                return Err(Error::InvalidNetwork(format!(
                    "reaction {j} has identical reactant and product"
                )));
            }
        }
        Ok(Self { species, reactions })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn num_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    /// Every reaction conserves molecularity.
    pub fn is_homogeneous(&self) -> bool {
        self.reactions
            .iter()
            .all(|r| r.reactant.molecularity() == r.product.molecularity())
    }

    /// Adds `new_species`, balancing each reaction's molecularity. Reaction `j`
    /// with deficit `d` gains `max(0,-d) + padding[j]` in its reactant and
    /// `max(0,d) + padding[j]` in its product. An empty `padding` means zero.
    pub fn homogenise(&self, new_species: &str, padding: &[Rational]) -> Result<Crn> {
        if self.species_index(new_species).is_some() {
            return Err(Error::NameCollision(new_species.to_string()));
        }
        if !padding.is_empty() && padding.len() != self.num_reactions() {
            return Err(Error::Dimension(format!(
                "padding has {} entries for {} reactions",
                padding.len(),
                self.num_reactions()
            )));
        }
        if padding.iter().any(Signed::is_negative) {
            return Err(Error::InvalidArgument("padding must be nonnegative".into()));
        }
        let idx = self.num_species();
        let mut species = self.species.clone();
        species.push(new_species.to_string());
        let reactions = self
            .reactions
            .iter()
            .enumerate()
            .map(|(j, r)| {
                let d = r.molecularity_deficit();
                let pad = padding.get(j).cloned().unwrap_or_else(Rational::zero);
                let mut reactant = r.reactant.clone();
                let mut product = r.product.clone();
                reactant.add(idx, &(rational::max_zero(&-d.clone()) + &pad));
                product.add(idx, &(rational::max_zero(&d) + &pad));
                Reaction { reactant, product }
            })
            .collect();
        Crn::new(species, reactions)
    }

    /// Keeps the listed species and reactions, deleting dropped species from
    /// every complex. Reactions that collapse to `C -> C` are reported.
    pub fn induced_subnetwork(
        &self,
        keep_species: &BTreeSet<usize>,
        keep_reactions: &BTreeSet<usize>,
    ) -> Result<Crn> {
        if let Some(&s) = keep_species.iter().find(|&&s| s >= self.num_species()) {
            return Err(Error::InvalidArgument(format!(
                "species index {s} out of range"
            )));
        }
        if let Some(&j) = keep_reactions.iter().find(|&&j| j >= self.num_reactions()) {
            return Err(Error::InvalidArgument(format!(
                "reaction index {j} out of range"
            )));
        }
        let dropped: HashSet<usize> = (0..self.num_species())
            .filter(|s| !keep_species.contains(s))
            .collect();
        let mut renumber = vec![None; self.num_species()];
        for (new, &old) in keep_species.iter().enumerate() {
            renumber[old] = Some(new);
        }
        let species = keep_species
            .iter()
            .map(|&s| self.species[s].clone())
            .collect();
        let mut degenerate = Vec::new();
        let mut reactions = Vec::new();
        for &j in keep_reactions {
            let r = &self.reactions[j];
            let reactant = r.reactant.without(&dropped, &renumber);
            let product = r.product.without(&dropped, &renumber);
            if reactant == product {
                degenerate.push(j);
            } else {
                reactions.push(Reaction { reactant, product });
            }
        }
        if !degenerate.is_empty() {
            return Err(Error::DegenerateReactions(degenerate));
        }
        Crn::new(species, reactions)
    }

    /// Species indices as a set, for use with `induced_subnetwork`.
    pub fn all_species(&self) -> BTreeSet<usize> {
        (0..self.num_species()).collect()
    }

    pub fn all_reactions(&self) -> BTreeSet<usize> {
        (0..self.num_reactions()).collect()
    }

    /// Human-readable form of one complex, `2 X + Y` or `0`.
    pub fn format_complex(&self, complex: &Complex) -> String {
        if complex.is_empty() {
            return "0".to_string();
        }
        complex
            .terms()
            .map(|(s, c)| {
                if c == &rational::one() {
                    self.species[s].clone()
                } else {
                    format!("{} {}", rational::format_rational(c), self.species[s])
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn format_reaction(&self, j: usize) -> String {
        let r = &self.reactions[j];
        format!(
            "{} -> {}",
            self.format_complex(&r.reactant),
            self.format_complex(&r.product)
        )
    }
}
