//! Whole-project view: contract registry, C3 inheritance linearization, and
//! state-variable resolution across inheritance.

use crate::frontend::{CommentLine, ContractDef, ContractKind, SourceUnit, StateVarDecl};
use std::collections::{BTreeMap, BTreeSet};

/// Identity of a state variable: the contract that declares it plus its name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateVarId {
    /// Registry key of the defining contract.
    pub contract: String,
    pub name: String,
}

impl std::fmt::Display for StateVarId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.contract, self.name)
    }
}

#[derive(Debug, Clone)]
pub struct ContractRecord {
    /// Registry key: the bare name, or `name@file` when the name is
    /// duplicated across files.
    pub key: String,
    pub name: String,
    pub file: String,
    pub def: ContractDef,
}

#[derive(Debug, Clone)]
pub struct StateVarMeta {
    pub decl: StateVarDecl,
    pub file: String,
}

#[derive(Debug, Clone, Default)]
pub struct ProjectModel {
    pub contracts: BTreeMap<String, ContractRecord>,
    /// Bare contract name to registry keys (sorted; >1 entry on duplicates).
    pub by_name: BTreeMap<String, Vec<String>>,
    /// Contract key to its C3 linearization (the contract itself first).
    /// Contracts whose hierarchy could not be resolved fall back to `[self]`
    /// and appear in `unresolved`.
    pub linearizations: BTreeMap<String, Vec<String>>,
    pub unresolved: BTreeSet<String>,
    pub state_var_index: BTreeMap<StateVarId, StateVarMeta>,
    /// Comment lines per file, kept for suppression annotations.
    pub comments: BTreeMap<String, Vec<CommentLine>>,
    /// Struct and enum names declared anywhere in the project.
    pub value_types: BTreeSet<String>,
    pub file_count: usize,
    pub degraded_file_count: usize,
    pub warnings: Vec<String>,
}

impl ProjectModel {
    /// Linearization for a contract given by registry key or bare name.
    pub fn linearize(&self, contract: &str) -> Option<&[String]> {
        if let Some(lin) = self.linearizations.get(contract) {
            return Some(lin);
        }
        let keys = self.by_name.get(contract)?;
        self.linearizations.get(&keys[0]).map(|v| v.as_slice())
    }

    /// Walk the linearization from the most-derived contract and return the
    /// first declaration of `var_name`. Unresolved contracts only see their
    /// own declarations (partial resolution).
    pub fn resolve_state_var(&self, contract_key: &str, var_name: &str) -> Option<StateVarId> {
        if self.unresolved.contains(contract_key) {
            let id = StateVarId {
                contract: contract_key.to_string(),
                name: var_name.to_string(),
            };
            return self.state_var_index.contains_key(&id).then_some(id);
        }
        for key in self.linearizations.get(contract_key)? {
            let id = StateVarId {
                contract: key.clone(),
                name: var_name.to_string(),
            };
            if self.state_var_index.contains_key(&id) {
                return Some(id);
            }
        }
        None
    }

    /// True when `contract_key`'s resolution is limited to its own
    /// declarations because its hierarchy did not resolve.
    pub fn is_partial(&self, contract_key: &str) -> bool {
        self.unresolved.contains(contract_key)
    }

    pub fn contract_kind(&self, key: &str) -> Option<ContractKind> {
        self.contracts.get(key).map(|r| r.def.kind)
    }

    /// All state variables visible to `contract_key` (its whole
    /// linearization).
    pub fn visible_state_vars(&self, contract_key: &str) -> Vec<StateVarId> {
        let mut out = Vec::new();
        if let Some(lin) = self.linearizations.get(contract_key) {
            for key in lin {
                if let Some(rec) = self.contracts.get(key) {
                    for v in &rec.def.state_vars {
                        out.push(StateVarId {
                            contract: key.clone(),
                            name: v.name.clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Merge parsed units into a project model. Never fails; an empty input
/// yields an empty model.
pub fn build_project_model(units: &[SourceUnit]) -> ProjectModel {
    let mut model = ProjectModel {
        file_count: units.len(),
        degraded_file_count: units.iter().filter(|u| !u.diagnostics.is_empty()).count(),
        ..Default::default()
    };

    // Registry. Names duplicated across files get file-qualified keys.
    let mut name_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for unit in units {
        for c in &unit.contracts {
            *name_counts.entry(c.name.as_str()).or_default() += 1;
        }
    }
    for unit in units {
        if !unit.comments.is_empty() {
            model
                .comments
                .insert(unit.path.clone(), unit.comments.clone());
        }
        model
            .value_types
            .extend(unit.value_type_names.iter().cloned());
        for c in &unit.contracts {
            let duplicated = name_counts[c.name.as_str()] > 1;
            let key = if duplicated {
                format!("{}@{}", c.name, unit.path)
            } else {
                c.name.clone()
            };
            if duplicated {
                model.warnings.push(format!(
                    "contract name `{}` is defined in multiple files; using file-qualified key `{}`",
                    c.name, key
                ));
            }
            model
                .by_name
                .entry(c.name.clone())
                .or_default()
                .push(key.clone());
            model.contracts.insert(
                key.clone(),
                ContractRecord {
                    key,
                    name: c.name.clone(),
                    file: unit.path.clone(),
                    def: c.clone(),
                },
            );
        }
    }
    for keys in model.by_name.values_mut() {
        keys.sort();
    }

    // Linearizations.
    let keys: Vec<String> = model.contracts.keys().cloned().collect();
    let mut memo: BTreeMap<String, Option<Vec<String>>> = BTreeMap::new();
    for key in &keys {
        let mut visiting = BTreeSet::new();
        let lin = linearize_key(&model, key, &mut memo, &mut visiting);
        match lin {
            Some(l) => {
                model.linearizations.insert(key.clone(), l);
            }
            None => {
                model.warnings.push(format!(
                    "could not resolve the inheritance hierarchy of `{}`",
                    key
                ));
                model.unresolved.insert(key.clone());
                model
                    .linearizations
                    .insert(key.clone(), vec![key.clone()]);
            }
        }
    }

    // State-variable index.
    let records: Vec<(String, String, Vec<StateVarDecl>)> = model
        .contracts
        .values()
        .map(|r| (r.key.clone(), r.file.clone(), r.def.state_vars.clone()))
        .collect();
    for (key, file, vars) in records {
        for v in vars {
            let id = StateVarId {
                contract: key.clone(),
                name: v.name.clone(),
            };
            if model.state_var_index.contains_key(&id) {
                model
                    .warnings
                    .push(format!("duplicate state variable `{}`", id));
                continue;
            }
            model.state_var_index.insert(
                id,
                StateVarMeta {
                    decl: v,
                    file: file.clone(),
                },
            );
        }
    }

    // Shadowing across a linearization: most-derived declaration wins at
    // resolution time; surface a warning so users notice.
    let mut shadow_warnings = Vec::new();
    for (key, lin) in &model.linearizations {
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        for ancestor in lin {
            if let Some(rec) = model.contracts.get(ancestor) {
                for v in &rec.def.state_vars {
                    if let Some(first) = seen.get(v.name.as_str()) {
                        shadow_warnings.push(format!(
                            "state variable `{}` in `{}` shadows the declaration in `{}` (linearization of `{}`)",
                            v.name, first, ancestor, key
                        ));
                    } else {
                        seen.insert(&v.name, ancestor);
                    }
                }
            }
        }
    }
    model.warnings.extend(shadow_warnings);
    model
}

/// Resolve a base name to a registry key, preferring a same-file definition
/// when the name is duplicated.
fn resolve_base(model: &ProjectModel, name: &str, from_file: &str) -> Option<String> {
    let keys = model.by_name.get(name)?;
    if keys.len() == 1 {
        return Some(keys[0].clone());
    }
    keys.iter()
        .find(|k| {
            model
                .contracts
                .get(*k)
                .is_some_and(|r| r.file == from_file)
        })
        .or_else(|| keys.first())
        .cloned()
}

/// C3 linearization with Solidity's convention: bases written left to right
/// are merged so the rightmost base is the most derived.
fn linearize_key(
    model: &ProjectModel,
    key: &str,
    memo: &mut BTreeMap<String, Option<Vec<String>>>,
    visiting: &mut BTreeSet<String>,
) -> Option<Vec<String>> {
    if let Some(cached) = memo.get(key) {
        return cached.clone();
    }
    if !visiting.insert(key.to_string()) {
        return None; // inheritance cycle
    }
    let record = model.contracts.get(key)?;
    let mut base_keys = Vec::new();
    for base in &record.def.bases {
        // Dotted base names (aliased imports) resolve by their last segment.
        let bare = base.rsplit('.').next().unwrap_or(base);
        match resolve_base(model, bare, &record.file) {
            Some(k) => base_keys.push(k),
            None => {
                visiting.remove(key);
                memo.insert(key.to_string(), None);
                return None;
            }
        }
    }
    let mut sequences: Vec<Vec<String>> = Vec::new();
    for base in base_keys.iter().rev() {
        match linearize_key(model, base, memo, visiting) {
            Some(lin) => sequences.push(lin),
            None => {
                visiting.remove(key);
                memo.insert(key.to_string(), None);
                return None;
            }
        }
    }
    if !base_keys.is_empty() {
        sequences.push(base_keys.iter().rev().cloned().collect());
    }
    let merged = c3_merge(sequences)?;
    let mut result = vec![key.to_string()];
    result.extend(merged);
    visiting.remove(key);
    memo.insert(key.to_string(), Some(result.clone()));
    Some(result)
}

fn c3_merge(mut sequences: Vec<Vec<String>>) -> Option<Vec<String>> {
    let mut result = Vec::new();
    loop {
        sequences.retain(|s| !s.is_empty());
        if sequences.is_empty() {
            return Some(result);
        }
        let head = sequences
            .iter()
            .map(|s| &s[0])
            .find(|h| !sequences.iter().any(|s| s[1..].contains(h)))?
            .clone();
        result.push(head.clone());
        for s in &mut sequences {
            s.retain(|x| *x != head);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_source;

    fn model_of(files: &[(&str, &str)]) -> ProjectModel {
        let units: Vec<SourceUnit> = files
            .iter()
            .map(|(path, src)| parse_source(src, path))
            .collect();
        build_project_model(&units)
    }

    #[test]
    fn leaf_contract_linearizes_to_itself() {
        let m = model_of(&[("a.sol", "contract C { uint x; }")]);
        assert_eq!(m.linearize("C").unwrap(), &["C"]);
        assert_eq!(m.file_count, 1);
        assert_eq!(m.degraded_file_count, 0);
    }

    #[test]
    fn single_chain() {
        let m = model_of(&[("a.sol", "contract A {} contract B is A {}")]);
        assert_eq!(m.linearize("B").unwrap(), &["B", "A"]);
    }

    #[test]
    fn diamond_follows_solidity_order() {
        let m = model_of(&[(
            "a.sol",
            "contract A {} contract B is A {} contract C is A {} contract D is B, C {}",
        )]);
        assert_eq!(m.linearize("D").unwrap(), &["D", "C", "B", "A"]);
    }

    #[test]
    fn unresolved_base_marks_contract() {
        let m = model_of(&[("a.sol", "contract X is Missing { uint x; }")]);
        assert!(m.unresolved.contains("X"));
        assert_eq!(m.linearize("X").unwrap(), &["X"]);
        assert!(m.warnings.iter().any(|w| w.contains("X")));
        // partial resolution still sees own declarations
        assert!(m.resolve_state_var("X", "x").is_some());
        assert!(m.is_partial("X"));
    }

    #[test]
    fn inheritance_cycle_is_unresolved() {
        let m = model_of(&[("a.sol", "contract A is B {} contract B is A {}")]);
        assert!(m.unresolved.contains("A"));
        assert!(m.unresolved.contains("B"));
    }

    #[test]
    fn resolution_walks_linearization() {
        let m = model_of(&[
            ("a.sol", "contract A { uint y; }"),
            ("b.sol", "contract B is A { uint z; }"),
        ]);
        let id = m.resolve_state_var("B", "y").unwrap();
        assert_eq!(id.contract, "A");
        let id = m.resolve_state_var("B", "z").unwrap();
        assert_eq!(id.contract, "B");
        assert!(m.resolve_state_var("B", "msg").is_none());
    }

    #[test]
    fn shadowed_var_resolves_to_most_derived() {
        let m = model_of(&[(
            "a.sol",
            "contract A { uint fee; } contract B is A { uint fee; }",
        )]);
        let id = m.resolve_state_var("B", "fee").unwrap();
        assert_eq!(id.contract, "B");
        assert!(m.warnings.iter().any(|w| w.contains("shadows")));
    }

    #[test]
    fn duplicate_names_across_files_get_qualified_keys() {
        let m = model_of(&[
            ("a.sol", "contract C { uint x; }"),
            ("b.sol", "contract C { uint y; }"),
        ]);
        assert_eq!(m.contracts.len(), 2);
        assert!(m.contracts.contains_key("C@a.sol"));
        assert!(m.contracts.contains_key("C@b.sol"));
        assert!(m.warnings.iter().any(|w| w.contains("multiple files")));
    }

    #[test]
    fn linearization_deterministic_under_file_order() {
        let files = [
            ("a.sol", "contract A {}"),
            ("b.sol", "contract B is A {}"),
            ("c.sol", "contract C is A {}"),
            ("d.sol", "contract D is B, C {}"),
        ];
        let m1 = model_of(&files);
        let mut rev = files;
        rev.reverse();
        let m2 = model_of(&rev);
        assert_eq!(m1.linearizations, m2.linearizations);
    }

    #[test]
    fn empty_input_empty_model() {
        let m = build_project_model(&[]);
        assert_eq!(m.file_count, 0);
        assert!(m.contracts.is_empty());
    }

    #[test]
    fn degraded_count_tracks_diagnostics() {
        let m = model_of(&[("a.sol", "contract C { uint x; }"), ("b.sol", "contract {")]);
        assert_eq!(m.degraded_file_count, 1);
    }

    /// Cross-check against an independent reference implementation of the
    /// merge on a deeper hierarchy.
    #[test]
    fn c3_matches_reference_on_deeper_diamond() {
        let m = model_of(&[(
            "a.sol",
            "contract O {}\n\
             contract A is O {}\n\
             contract B is O {}\n\
             contract C is O {}\n\
             contract K1 is C, B, A {}\n\
             contract K2 is B, A {}\n\
             contract Z is K2, K1 {}",
        )]);
        // Reference: Solidity order reverses the base lists relative to the
        // Python MRO convention; Z(K2,K1), K1(C,B,A), K2(B,A) corresponds to
        // Python Z(K1,K2), K1(A,B,C), K2(A,B) whose MRO is
        // Z K1 K2 A B C O. Most-derived-first with our storage:
        assert_eq!(
            m.linearize("Z").unwrap(),
            &["Z", "K1", "K2", "A", "B", "C", "O"]
        );
    }
}
