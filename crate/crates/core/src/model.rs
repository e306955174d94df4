//! Syntactic and semantic objects shared by every analysis: terms, atoms,
//! rules, interpretations, and substitutions.
//!
//! Symbols are interned per rule set, so terms are small `Copy` values and
//! equality is a plain integer comparison. Constants, variables, and nulls
//! live in disjoint id spaces; variables are additionally scoped per rule
//! (two rules may both use id 0 for their first variable).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

/// A term of the logic: a constant, a variable, or a labelled null.
///
/// Nulls never appear in parsed rules; they are introduced by rule
/// applications and by the instantiation substitutions of the pair checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Constant(u32),
    Variable(u32),
    Null(u32),
}

impl Term {
    pub fn is_null(self) -> bool {
        matches!(self, Term::Null(_))
    }

    pub fn is_variable(self) -> bool {
        matches!(self, Term::Variable(_))
    }
}

/// A predicate applied to an ordered list of terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: u32,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: u32, args: Vec<Term>) -> Self {
        Atom { predicate, args }
    }

    /// Iterator over the variable ids occurring in this atom.
    pub fn variables(&self) -> impl Iterator<Item = u32> + '_ {
        self.args.iter().filter_map(|t| match t {
            Term::Variable(v) => Some(*v),
            _ => None,
        })
    }

    pub fn has_null(&self) -> bool {
        self.args.iter().any(|t| t.is_null())
    }
}

/// Interns strings to dense u32 ids.
#[derive(Clone, Debug, Default)]
pub struct Interner {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Predicate and constant tables of one rule set.
///
/// Predicates and constants are separate namespaces; `p(p)` is legal and
/// denotes a predicate and a constant that merely share a spelling.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    pub predicates: Interner,
    pub constants: Interner,
}

impl SymbolTable {
    pub fn predicate_name(&self, id: u32) -> String {
        match self.predicates.name(id) {
            Some(n) => n.to_string(),
            None => format!("_p{id}"),
        }
    }

    pub fn constant_name(&self, id: u32) -> String {
        match self.constants.name(id) {
            Some(n) => n.to_string(),
            None => format!("_c{id}"), // fresh constants from pair checks
        }
    }
}

/// An existential rule `body -> head` with per-rule variable scope.
///
/// Universal variables are exactly the variables occurring in the body;
/// head variables that do not occur in the body are existentially
/// quantified. Safety (each universally quantified head variable occurs in
/// the body) therefore holds by construction.
#[derive(Clone, Debug)]
pub struct Rule {
    pub id: usize,
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
    var_names: Vec<String>,
    existential: Vec<bool>,
}

/// Error raised when assembling a structurally invalid rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleError {
    EmptyBody,
    EmptyHead,
}

impl std::fmt::Display for RuleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RuleError::EmptyBody => write!(f, "rule has an empty body"),
            RuleError::EmptyHead => write!(f, "rule has an empty head"),
        }
    }
}

impl std::error::Error for RuleError {}

impl Rule {
    /// Builds a rule, deriving the universal/existential split from where
    /// each variable occurs. Variable ids in the atoms must index into
    /// `var_names`.
    pub fn new(
        id: usize,
        body: Vec<Atom>,
        head: Vec<Atom>,
        var_names: Vec<String>,
    ) -> Result<Self, RuleError> {
        if body.is_empty() {
            return Err(RuleError::EmptyBody);
        }
        if head.is_empty() {
            return Err(RuleError::EmptyHead);
        }
        let mut in_body = vec![false; var_names.len()];
        for atom in &body {
            for v in atom.variables() {
                in_body[v as usize] = true;
            }
        }
        let mut existential = vec![false; var_names.len()];
        for atom in &head {
            for v in atom.variables() {
                if !in_body[v as usize] {
                    existential[v as usize] = true;
                }
            }
        }
        Ok(Rule {
            id,
            body,
            head,
            var_names,
            existential,
        })
    }

    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: u32) -> &str {
        &self.var_names[v as usize]
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn is_existential_var(&self, v: u32) -> bool {
        self.existential[v as usize]
    }

    /// Ids of the existentially quantified variables, ascending.
    pub fn existential_vars(&self) -> Vec<u32> {
        (0..self.var_names.len() as u32)
            .filter(|&v| self.existential[v as usize])
            .collect()
    }

    /// True when the head introduces no existential variables.
    pub fn is_datalog(&self) -> bool {
        self.existential.iter().all(|&e| !e)
    }

    /// Predicates occurring in the body.
    pub fn body_predicates(&self) -> HashSet<u32> {
        self.body.iter().map(|a| a.predicate).collect()
    }

    /// Predicates occurring in the head.
    pub fn head_predicates(&self) -> HashSet<u32> {
        self.head.iter().map(|a| a.predicate).collect()
    }
}

/// A validated collection of rules sharing one symbol table.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub symbols: SymbolTable,
    /// predicate id -> arity, covering every predicate of every rule.
    pub arities: HashMap<u32, usize>,
}

impl RuleSet {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// All predicate ids used anywhere in the rule set.
    pub fn predicates(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.arities.keys().copied().collect();
        ids.sort_unstable();
        ids
    }
}

/// A finite set of atoms over constants and nulls.
///
/// Insertion order is preserved so that iteration (and hence search order
/// in the homomorphism checks) is reproducible. Membership and subset
/// tests are hash-based.
#[derive(Clone, Debug, Default)]
pub struct Interpretation {
    atoms: Vec<Atom>,
    present: HashSet<Atom>,
    by_predicate: HashMap<u32, Vec<usize>>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Self {
        let mut i = Self::new();
        for a in atoms {
            i.insert(a);
        }
        i
    }

    /// Inserts an atom; duplicates are ignored (set semantics).
    pub fn insert(&mut self, atom: Atom) -> bool {
        debug_assert!(
            atom.args.iter().all(|t| !t.is_variable()),
            "interpretations contain no variables"
        );
        if self.present.contains(&atom) {
            return false;
        }
        self.present.insert(atom.clone());
        self.by_predicate
            .entry(atom.predicate)
            .or_default()
            .push(self.atoms.len());
        self.atoms.push(atom);
        true
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.present.contains(atom)
    }

    pub fn contains_all<'a, I: IntoIterator<Item = &'a Atom>>(&self, atoms: I) -> bool {
        atoms.into_iter().all(|a| self.contains(a))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    /// Atoms with the given predicate, in insertion order.
    pub fn with_predicate(&self, predicate: u32) -> impl Iterator<Item = &Atom> {
        self.by_predicate
            .get(&predicate)
            .into_iter()
            .flatten()
            .map(move |&i| &self.atoms[i])
    }

    pub fn candidate_count(&self, predicate: u32) -> usize {
        self.by_predicate.get(&predicate).map_or(0, |v| v.len())
    }

    /// All distinct terms occurring in the interpretation, ascending.
    pub fn terms(&self) -> Vec<Term> {
        let mut ts: Vec<Term> = self
            .atoms
            .iter()
            .flat_map(|a| a.args.iter().copied())
            .collect();
        ts.sort_unstable();
        ts.dedup();
        ts
    }

    pub fn union(&self, other: &Interpretation) -> Interpretation {
        let mut out = self.clone();
        for a in other.iter() {
            out.insert(a.clone());
        }
        out
    }
}

/// A mapping from variables to terms; constants and nulls are fixed points.
///
/// Backed by an ordered map so iteration, equality, and debug output are
/// deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<u32, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, Term)>>(pairs: I) -> Self {
        Substitution {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn bind(&mut self, var: u32, term: Term) {
        self.map.insert(var, term);
    }

    pub fn get(&self, var: u32) -> Option<Term> {
        self.map.get(&var).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, Term)> + '_ {
        self.map.iter().map(|(&v, &t)| (v, t))
    }

    /// Image of a single term. Terms outside the domain are unchanged.
    pub fn apply(&self, term: Term) -> Term {
        match term {
            Term::Variable(v) => self.map.get(&v).copied().unwrap_or(term),
            _ => term,
        }
    }

    /// Term-wise application to an atom.
    pub fn apply_atom(&self, atom: &Atom) -> Atom {
        Atom {
            predicate: atom.predicate,
            args: atom.args.iter().map(|&t| self.apply(t)).collect(),
        }
    }

    pub fn apply_atoms(&self, atoms: &[Atom]) -> Vec<Atom> {
        atoms.iter().map(|a| self.apply_atom(a)).collect()
    }

    /// Concatenation: `self` then `other`, so `t (self.then(other)) = (t self) other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<u32, Term> = BTreeMap::new();
        for (&v, &t) in &self.map {
            map.insert(v, other.apply(t));
        }
        for (&v, &t) in &other.map {
            map.entry(v).or_insert(t);
        }
        Substitution { map }
    }

    /// Restriction that is the identity on the given existential variables
    /// and agrees with `self` elsewhere (the "universal part").
    pub fn restrict_universal(&self, is_existential: impl Fn(u32) -> bool) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(&v, _)| !is_existential(v))
                .map(|(&v, &t)| (v, t))
                .collect(),
        }
    }

    /// Mirror image of [`Substitution::restrict_universal`]: identity on
    /// universal variables, agrees with `self` on existential ones.
    pub fn restrict_existential(&self, is_existential: impl Fn(u32) -> bool) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(&v, _)| is_existential(v))
                .map(|(&v, &t)| (v, t))
                .collect(),
        }
    }
}

/// Renders a term for diagnostics; fresh constants and nulls get reserved
/// spellings that cannot clash with parsed symbols.
pub fn term_to_text(term: Term, symbols: &SymbolTable, var_names: &[String]) -> String {
    match term {
        Term::Constant(c) => symbols.constant_name(c),
        Term::Variable(v) => {
            let mut s = String::from("?");
            match var_names.get(v as usize) {
                Some(n) => s.push_str(n),
                None => {
                    let _ = write!(s, "v{v}");
                }
            }
            s
        }
        Term::Null(n) => format!("_:n{n}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(id: u32) -> Term {
        Term::Constant(id)
    }
    fn v(id: u32) -> Term {
        Term::Variable(id)
    }
    fn n(id: u32) -> Term {
        Term::Null(id)
    }

    #[test]
    fn apply_substitution_pointwise() {
        let s = Substitution::from_pairs([(0, c(7))]);
        let a = Atom::new(0, vec![v(0), v(1)]);
        assert_eq!(s.apply_atom(&a), Atom::new(0, vec![c(7), v(1)]));
    }

    #[test]
    fn empty_substitution_is_identity() {
        let s = Substitution::new();
        let a = Atom::new(0, vec![v(0), v(1)]);
        assert_eq!(s.apply_atom(&a), a);
    }

    #[test]
    fn substitution_maps_variables_to_any_term_kind() {
        let s = Substitution::from_pairs([(1, v(0)), (2, n(5))]);
        let a = Atom::new(3, vec![v(1), v(2)]);
        assert_eq!(s.apply_atom(&a), Atom::new(3, vec![v(0), n(5)]));
    }

    #[test]
    fn constants_and_nulls_are_fixed_points() {
        let s = Substitution::from_pairs([(0, c(1))]);
        assert_eq!(s.apply(c(9)), c(9));
        assert_eq!(s.apply(n(4)), n(4));
    }

    #[test]
    fn restrict_splits_by_quantifier() {
        // {v0 -> ?x, v1 -> c}, existentials = {v0}
        let s = Substitution::from_pairs([(0, v(5)), (1, c(2))]);
        let is_ex = |vid: u32| vid == 0;
        let forall = s.restrict_universal(is_ex);
        assert_eq!(forall, Substitution::from_pairs([(1, c(2))]));
        let exists = s.restrict_existential(is_ex);
        assert_eq!(exists, Substitution::from_pairs([(0, v(5))]));
        let empty = Substitution::new();
        assert_eq!(empty.restrict_universal(is_ex), Substitution::new());
    }

    #[test]
    fn concatenation_is_associative_on_atoms() {
        let sigma = Substitution::from_pairs([(0, v(1))]);
        let tau = Substitution::from_pairs([(1, v(2)), (3, c(0))]);
        let rho = Substitution::from_pairs([(2, n(1))]);
        let atom = Atom::new(0, vec![v(0), v(1), v(2), v(3)]);
        let left = sigma.then(&tau).then(&rho).apply_atom(&atom);
        let right = sigma.then(&tau.then(&rho)).apply_atom(&atom);
        let stepwise = rho.apply_atom(&tau.apply_atom(&sigma.apply_atom(&atom)));
        assert_eq!(left, right);
        assert_eq!(left, stepwise);
    }

    #[test]
    fn interpretation_deduplicates() {
        let mut i = Interpretation::new();
        assert!(i.insert(Atom::new(0, vec![c(0)])));
        assert!(!i.insert(Atom::new(0, vec![c(0)])));
        assert_eq!(i.len(), 1);
        assert!(i.contains(&Atom::new(0, vec![c(0)])));
    }

    #[test]
    fn rule_derives_existentials_from_occurrence() {
        // a(?x) -> r(?x, ?v)
        let body = vec![Atom::new(0, vec![v(0)])];
        let head = vec![Atom::new(1, vec![v(0), v(1)])];
        let r = Rule::new(0, body, head, vec!["x".into(), "v".into()]).unwrap();
        assert!(!r.is_existential_var(0));
        assert!(r.is_existential_var(1));
        assert_eq!(r.existential_vars(), vec![1]);
        assert!(!r.is_datalog());
    }

    #[test]
    fn rule_rejects_empty_sides() {
        let atom = vec![Atom::new(0, vec![c(0)])];
        assert_eq!(
            Rule::new(0, vec![], atom.clone(), vec![]).unwrap_err(),
            RuleError::EmptyBody
        );
        assert_eq!(
            Rule::new(0, atom, vec![], vec![]).unwrap_err(),
            RuleError::EmptyHead
        );
    }
}
