//! Problem instances, colorings, the switch-count objective and feasibility.
//!
//! A multi-car paint shop instance is a fixed queue of cars (the *word*),
//! where each car belongs to an ensemble of interchangeable configurations,
//! and a quota per ensemble saying how many of its cars get the black filler.
//! A solution is a two-coloring of the queue that meets every quota; its cost
//! is the number of adjacent pairs with different colors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a car ensemble. Ids within one instance are dense `0..M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnsembleId(pub u32);

impl EnsembleId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EnsembleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

/// Filler color. `White < Black` is the tie-break order used by the exact oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn flipped(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }

    pub fn is_black(self) -> bool {
        self == Color::Black
    }
}

/// The fixed sequence of cars entering the paint shop.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CarWord(Vec<EnsembleId>);

impl CarWord {
    pub fn new(positions: Vec<EnsembleId>) -> Self {
        CarWord(positions)
    }

    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        CarWord(ids.into_iter().map(EnsembleId).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[EnsembleId] {
        &self.0
    }

    pub fn get(&self, position: usize) -> EnsembleId {
        self.0[position]
    }
}

/// Black-paint quota per ensemble.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderSpec(BTreeMap<EnsembleId, usize>);

impl OrderSpec {
    pub fn new(quotas: BTreeMap<EnsembleId, usize>) -> Self {
        OrderSpec(quotas)
    }

    pub fn get(&self, ensemble: EnsembleId) -> Option<usize> {
        self.0.get(&ensemble).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EnsembleId, usize)> + '_ {
        self.0.iter().map(|(&e, &k)| (e, k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(u32, usize)> for OrderSpec {
    fn from_iter<T: IntoIterator<Item = (u32, usize)>>(iter: T) -> Self {
        OrderSpec(iter.into_iter().map(|(e, k)| (EnsembleId(e), k)).collect())
    }
}

/// A validated problem instance: word, quotas and a label.
///
/// Construction checks every invariant, so the solvers can index ensembles
/// and quotas without further checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    name: String,
    word: CarWord,
    orders: OrderSpec,
    // positions of every ensemble, indexed by ensemble id
    members: Vec<Vec<usize>>,
    quotas: Vec<usize>,
}

impl ProblemInstance {
    pub fn new(name: impl Into<String>, word: CarWord, orders: OrderSpec) -> Result<Self> {
        Self::check(word, orders).map(|(word, orders, members, quotas)| ProblemInstance {
            name: name.into(),
            word,
            orders,
            members,
            quotas,
        })
        .map_err(Error::Input)
    }

    /// Convenience constructor from raw ids and `(ensemble, quota)` pairs.
    pub fn from_parts(
        name: impl Into<String>,
        word: &[u32],
        quotas: &[(u32, usize)],
    ) -> Result<Self> {
        Self::new(
            name,
            CarWord::from_ids(word.iter().copied()),
            quotas.iter().copied().collect(),
        )
    }

    #[allow(clippy::type_complexity)]
    fn check(
        word: CarWord,
        orders: OrderSpec,
    ) -> std::result::Result<(CarWord, OrderSpec, Vec<Vec<usize>>, Vec<usize>), String> {
        if word.is_empty() {
            return Err("word must contain at least one car".into());
        }
        let n_ensembles = orders.len();
        for (expected, (id, _)) in orders.iter().enumerate() {
            if id.index() != expected {
                return Err(format!(
                    "quotas: ensemble ids must be dense 0..{n_ensembles}, found id {} where {expected} was expected",
                    id.0
                ));
            }
        }
        let mut members = vec![Vec::new(); n_ensembles];
        for (pos, id) in word.as_slice().iter().enumerate() {
            match members.get_mut(id.index()) {
                Some(list) => list.push(pos),
                None => {
                    return Err(format!("word[{pos}]: ensemble {} has no quota entry", id.0));
                }
            }
        }
        let mut quotas = Vec::with_capacity(n_ensembles);
        for (id, k) in orders.iter() {
            let m = members[id.index()].len();
            if m == 0 {
                return Err(format!("quotas[{}]: ensemble does not occur in the word", id.0));
            }
            if k > m {
                return Err(format!(
                    "quotas[{}]: quota {k} exceeds the ensemble's {m} cars",
                    id.0
                ));
            }
            quotas.push(k);
        }
        Ok((word, orders, members, quotas))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn word(&self) -> &CarWord {
        &self.word
    }

    pub fn orders(&self) -> &OrderSpec {
        &self.orders
    }

    /// Number of cars `N`.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_ensembles(&self) -> usize {
        self.quotas.len()
    }

    pub fn ensemble_of(&self, position: usize) -> EnsembleId {
        self.word.get(position)
    }

    /// Positions of `ensemble`, ascending.
    pub fn members(&self, ensemble: EnsembleId) -> &[usize] {
        &self.members[ensemble.index()]
    }

    pub fn quota(&self, ensemble: EnsembleId) -> usize {
        self.quotas[ensemble.index()]
    }

    pub fn multiplicity(&self, ensemble: EnsembleId) -> usize {
        self.members[ensemble.index()].len()
    }

    pub fn ensembles(&self) -> impl Iterator<Item = EnsembleId> {
        (0..self.quotas.len() as u32).map(EnsembleId)
    }

    /// Positions whose color is forced by a saturated (`k = #C`) or empty
    /// (`k = 0`) quota.
    pub fn fixed_positions(&self) -> BTreeMap<usize, Color> {
        let mut fixed = BTreeMap::new();
        for e in self.ensembles() {
            let k = self.quota(e);
            let m = self.multiplicity(e);
            let forced = if k == 0 {
                Color::White
            } else if k == m {
                Color::Black
            } else {
                continue;
            };
            for &p in self.members(e) {
                fixed.insert(p, forced);
            }
        }
        fixed
    }

    /// Number of cars whose color is not forced.
    pub fn free_count(&self) -> usize {
        self.ensembles()
            .filter(|&e| {
                let k = self.quota(e);
                k != 0 && k != self.multiplicity(e)
            })
            .map(|e| self.multiplicity(e))
            .sum()
    }

    pub fn validate(&self, coloring: &Coloring) -> Result<ValidityReport> {
        self.check_len(coloring)?;
        let mut blacks = vec![0usize; self.n_ensembles()];
        for (pos, color) in coloring.iter().enumerate() {
            if color.is_black() {
                blacks[self.ensemble_of(pos).index()] += 1;
            }
        }
        let deviations: Vec<_> = self
            .ensembles()
            .map(|e| EnsembleDeviation {
                ensemble: e,
                blacks: blacks[e.index()],
                quota: self.quota(e),
            })
            .collect();
        let valid = deviations.iter().all(|d| d.delta() == 0);
        Ok(ValidityReport { valid, deviations })
    }

    pub fn is_valid(&self, coloring: &Coloring) -> bool {
        self.validate(coloring).map(|r| r.valid).unwrap_or(false)
    }

    pub fn count_switches(&self, coloring: &Coloring) -> Result<usize> {
        count_switches(&self.word, coloring)
    }

    pub(crate) fn check_len(&self, coloring: &Coloring) -> Result<()> {
        if coloring.len() != self.len() {
            return Err(Error::input(format!(
                "coloring has {} entries but the word has {} cars",
                coloring.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// Black count versus quota for one ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleDeviation {
    pub ensemble: EnsembleId,
    pub blacks: usize,
    pub quota: usize,
}

impl EnsembleDeviation {
    /// `#black - k`: positive means surplus black.
    pub fn delta(&self) -> i64 {
        self.blacks as i64 - self.quota as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    pub valid: bool,
    pub deviations: Vec<EnsembleDeviation>,
}

impl ValidityReport {
    pub fn delta(&self, ensemble: EnsembleId) -> i64 {
        self.deviations[ensemble.index()].delta()
    }
}

/// One color per car, aligned to the word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coloring(Vec<Color>);

impl Coloring {
    pub fn new(colors: Vec<Color>) -> Self {
        Coloring(colors)
    }

    pub fn uniform(len: usize, color: Color) -> Self {
        Coloring(vec![color; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Color> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Color] {
        &self.0
    }

    pub fn get(&self, position: usize) -> Color {
        self.0[position]
    }

    pub fn set(&mut self, position: usize, color: Color) {
        self.0[position] = color;
    }

    /// Number of adjacent pairs with different colors.
    pub fn switches(&self) -> usize {
        self.0.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn complement(&self) -> Coloring {
        Coloring(self.0.iter().map(|c| c.flipped()).collect())
    }
}

impl FromStr for Coloring {
    type Err = Error;

    /// Parses strings such as `"BWWB"`.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                'B' | 'b' => Ok(Color::Black),
                'W' | 'w' => Ok(Color::White),
                other => Err(Error::input(format!("coloring[{i}]: unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Coloring)
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            f.write_str(if c.is_black() { "B" } else { "W" })?;
        }
        Ok(())
    }
}

/// The objective `f(w)`: number of color switches along the queue.
pub fn count_switches(word: &CarWord, coloring: &Coloring) -> Result<usize> {
    if word.len() != coloring.len() {
        return Err(Error::input(format!(
            "coloring has {} entries but the word has {} cars",
            coloring.len(),
            word.len()
        )));
    }
    Ok(coloring.switches())
}

/// On-disk representation of an instance: `{"name":..,"word":[..],"quotas":{"id":k}}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    word: Vec<u32>,
    quotas: BTreeMap<u32, usize>,
}

impl ProblemInstance {
    /// Canonical single-line JSON followed by a newline.
    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            name: self.name.clone(),
            word: self.word.as_slice().iter().map(|e| e.0).collect(),
            quotas: self.orders.iter().map(|(e, k)| (e.0, k)).collect(),
        };
        let mut out = serde_json::to_string(&file).expect("instance serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_labeled(text, "<instance>")
    }

    fn from_json_labeled(text: &str, label: &str) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: label.to_string(),
            message,
        };
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        let orders = file.quotas.into_iter().collect();
        let word = CarWord::from_ids(file.word);
        Self::check(word, orders)
            .map(|(word, orders, members, quotas)| ProblemInstance {
                name: file.name,
                word,
                orders,
                members,
                quotas,
            })
            .map_err(parse_err)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json_labeled(&text, &path.display().to_string())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}
