//! Ising and QUBO encodings of the paint shop problem.
//!
//! Spin convention: `+1` is a black car, `-1` a white car.
//!
//! The encoded Hamiltonian is `H = H_A + lambda * H_B` where
//!
//! * `H_A = -sum_i s_i s_{i+1}` rewards equal colors on neighbouring cars, and
//! * `H_B = sum_C [ (#C - 2k(C)) sum_{i in C} s_i + sum_{i<j in C} s_i s_j ]`
//!   is a k-hot penalty per ensemble.
//!
//! For an ensemble of `m` cars with quota `k` and `k'` black cars, writing
//! `a = 2k - m` and `b = 2k' - m`, its penalty is `((b - a)^2 - a^2 - m) / 2`:
//! the minimum sits at `k' = k` and every unit of deviation costs
//! `2 (k' - k)^2`. The constant `-(a^2 + m) / 2` on the feasible set is not
//! removed, so only energy differences are meaningful.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{Color, Coloring, ProblemInstance};

/// Spin value of a black car.
pub const BLACK: i8 = 1;
/// Spin value of a white car.
pub const WHITE: i8 = -1;

pub fn color_to_spin(color: Color) -> i8 {
    match color {
        Color::Black => BLACK,
        Color::White => WHITE,
    }
}

pub fn spin_to_color(spin: i8) -> Color {
    if spin > 0 {
        Color::Black
    } else {
        Color::White
    }
}

/// A vector of `±1` spins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::input(format!(
                "spin[{pos}] = {} is not +1 or -1",
                spins[pos]
            )));
        }
        Ok(SpinVector(spins))
    }

    pub(crate) fn from_raw(spins: Vec<i8>) -> Self {
        debug_assert!(spins.iter().all(|&s| s == 1 || s == -1));
        SpinVector(spins)
    }

    pub fn from_coloring(coloring: &Coloring) -> Self {
        SpinVector(coloring.iter().map(color_to_spin).collect())
    }

    pub fn to_coloring(&self) -> Coloring {
        Coloring::new(self.0.iter().map(|&s| spin_to_color(s)).collect())
    }

    /// The `index`-th state of an exhaustive enumeration: bit `i` set means `+1`.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        SpinVector((0..len).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }
}

/// Positive multiplier of the constraint penalty.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PenaltyWeight(f64);

impl PenaltyWeight {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::input(format!("penalty weight must be positive, got {lambda}")));
        }
        Ok(PenaltyWeight(lambda))
    }

    /// `lambda = N`, the number of cars.
    pub fn for_instance(instance: &ProblemInstance) -> Self {
        PenaltyWeight(instance.len() as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Sparse Ising model `offset + sum h_i s_i + sum_{i<j} J_ij s_i s_j`.
///
/// Zero coefficients are never stored. `var_to_position` maps each variable
/// back to its car position; it is the identity until the model is conditioned.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n_vars: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    var_to_position: Vec<usize>,
}

impl IsingModel {
    pub fn new(n_vars: usize) -> Self {
        IsingModel {
            n_vars,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: 0.0,
            var_to_position: (0..n_vars).collect(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn var_to_position(&self) -> &[usize] {
        &self.var_to_position
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.linear.get(&i).copied().unwrap_or(0.0)
    }

    /// Coupling between `i` and `j` in either order.
    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    pub fn linear_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.linear.iter().map(|(&i, &v)| (i, v))
    }

    pub fn quadratic_terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.quadratic.iter().map(|(&k, &v)| (k, v))
    }

    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    pub fn add_linear(&mut self, i: usize, value: f64) {
        assert!(i < self.n_vars, "variable {i} out of range");
        accumulate(&mut self.linear, i, value);
    }

    /// Adds `value` to `J_ij`; the pair is stored as `(min, max)`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, value: f64) {
        assert!(i != j, "self-coupling on variable {i}");
        assert!(i < self.n_vars && j < self.n_vars, "pair ({i}, {j}) out of range");
        let key = if i < j { (i, j) } else { (j, i) };
        accumulate(&mut self.quadratic, key, value);
    }

    /// `self += factor * other`, for models over the same variables.
    pub fn add_scaled(&mut self, other: &IsingModel, factor: f64) {
        assert_eq!(self.n_vars, other.n_vars);
        for (i, v) in other.linear_terms() {
            self.add_linear(i, factor * v);
        }
        for ((i, j), v) in other.quadratic_terms() {
            self.add_quadratic(i, j, factor * v);
        }
        self.offset += factor * other.offset;
    }

    pub fn is_zero(&self) -> bool {
        self.linear.is_empty() && self.quadratic.is_empty()
    }

    pub fn energy(&self, spins: &SpinVector) -> Result<f64> {
        if spins.len() != self.n_vars {
            return Err(Error::input(format!(
                "spin vector has {} entries but the model has {} variables",
                spins.len(),
                self.n_vars
            )));
        }
        Ok(self.energy_of(spins.as_slice()))
    }

    pub(crate) fn energy_of(&self, s: &[i8]) -> f64 {
        let lin: f64 = self.linear.iter().map(|(&i, &h)| h * f64::from(s[i])).sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .map(|(&(i, j), &c)| c * f64::from(s[i] * s[j]))
            .sum();
        self.offset + lin + quad
    }

    /// Removes the variables in `assignments` (index -> spin), folding their
    /// couplings into the survivors' fields and the offset. Energies of every
    /// completion are preserved exactly for integer coefficients.
    pub fn condition(&self, assignments: &BTreeMap<usize, i8>) -> Result<IsingModel> {
        for (&i, &v) in assignments {
            if i >= self.n_vars {
                return Err(Error::input(format!(
                    "cannot fix variable {i}: model has {} variables",
                    self.n_vars
                )));
            }
            if v != 1 && v != -1 {
                return Err(Error::input(format!("variable {i} fixed to {v}, not +1 or -1")));
            }
        }
        let mut new_index = vec![usize::MAX; self.n_vars];
        let mut positions = Vec::with_capacity(self.n_vars - assignments.len());
        for (var, slot) in new_index.iter_mut().enumerate() {
            if !assignments.contains_key(&var) {
                *slot = positions.len();
                positions.push(self.var_to_position[var]);
            }
        }
        let mut reduced = IsingModel::new(positions.len());
        reduced.var_to_position = positions;
        reduced.offset = self.offset;

        for (&i, &h) in &self.linear {
            match assignments.get(&i) {
                Some(&v) => reduced.offset += h * f64::from(v),
                None => reduced.add_linear(new_index[i], h),
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            match (assignments.get(&i), assignments.get(&j)) {
                (Some(&vi), Some(&vj)) => reduced.offset += c * f64::from(vi * vj),
                (Some(&vi), None) => reduced.add_linear(new_index[j], c * f64::from(vi)),
                (None, Some(&vj)) => reduced.add_linear(new_index[i], c * f64::from(vj)),
                (None, None) => reduced.add_quadratic(new_index[i], new_index[j], c),
            }
        }
        Ok(reduced)
    }

    /// Substitutes `s = 2x - 1`.
    pub fn to_qubo(&self) -> QuboModel {
        let mut q = QuboModel::new(self.n_vars);
        q.offset = self.offset;
        for (&i, &h) in &self.linear {
            q.add(i, i, 2.0 * h);
            q.offset -= h;
        }
        for (&(i, j), &c) in &self.quadratic {
            q.add(i, j, 4.0 * c);
            q.add(i, i, -2.0 * c);
            q.add(j, j, -2.0 * c);
            q.offset += c;
        }
        q
    }

    /// Smallest over largest nonzero coefficient magnitude.
    pub fn precision_ratio(&self) -> Result<f64> {
        let mags = self
            .linear
            .values()
            .chain(self.quadratic.values())
            .map(|v| v.abs());
        let (lo, hi) = mags.fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
        if hi == 0.0 {
            return Err(Error::Undefined("precision ratio of a model without coefficients".into()));
        }
        Ok(lo / hi)
    }

    /// Compressed adjacency for the samplers.
    pub fn adjacency(&self) -> Adjacency {
        let n = self.n_vars;
        let mut degree = vec![0usize; n];
        for &(i, j) in self.quadratic.keys() {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + degree[i];
        }
        let mut fill = start.clone();
        let mut neighbors = vec![0u32; start[n]];
        let mut weights = vec![0.0; start[n]];
        for (&(i, j), &c) in &self.quadratic {
            neighbors[fill[i]] = j as u32;
            weights[fill[i]] = c;
            fill[i] += 1;
            neighbors[fill[j]] = i as u32;
            weights[fill[j]] = c;
            fill[j] += 1;
        }
        Adjacency {
            field: (0..n).map(|i| self.linear(i)).collect(),
            start,
            neighbors,
            weights,
            offset: self.offset,
        }
    }
}

fn accumulate<K: Ord + Copy>(map: &mut BTreeMap<K, f64>, key: K, value: f64) {
    if value == 0.0 {
        return;
    }
    let entry = map.entry(key).or_insert(0.0);
    *entry += value;
    if *entry == 0.0 {
        map.remove(&key);
    }
}

/// CSR view of an Ising model used by the local-search samplers.
#[derive(Debug, Clone)]
pub struct Adjacency {
    pub field: Vec<f64>,
    pub start: Vec<usize>,
    pub neighbors: Vec<u32>,
    pub weights: Vec<f64>,
    pub offset: f64,
}

impl Adjacency {
    pub fn n_vars(&self) -> usize {
        self.field.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.start[i]..self.start[i + 1];
        self.neighbors[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&j, &w)| (j as usize, w))
    }

    /// `h_i + sum_j J_ij s_j` for every variable.
    pub fn local_fields(&self, spins: &[i8]) -> Vec<f64> {
        (0..self.n_vars())
            .map(|i| self.field[i] + self.row(i).map(|(j, w)| w * f64::from(spins[j])).sum::<f64>())
            .collect()
    }

    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = self.offset;
        for (i, &s) in spins.iter().enumerate() {
            let si = f64::from(s);
            e += self.field[i] * si;
            for (j, w) in self.row(i) {
                if j > i {
                    e += w * si * f64::from(spins[j]);
                }
            }
        }
        e
    }
}

/// The ferromagnetic chain `H_A = -sum s_i s_{i+1}`.
pub fn chain_model(instance: &ProblemInstance) -> IsingModel {
    let n = instance.len();
    let mut model = IsingModel::new(n);
    for i in 1..n {
        model.add_quadratic(i - 1, i, -1.0);
    }
    model
}

/// The unscaled k-hot penalty `H_B`, summed over all ensembles.
pub fn penalty_model(instance: &ProblemInstance) -> IsingModel {
    let mut model = IsingModel::new(instance.len());
    for e in instance.ensembles() {
        let members = instance.members(e);
        let bias = members.len() as f64 - 2.0 * instance.quota(e) as f64;
        for (a, &i) in members.iter().enumerate() {
            model.add_linear(i, bias);
            for &j in &members[a + 1..] {
                model.add_quadratic(i, j, 1.0);
            }
        }
    }
    model
}

/// `H_A + lambda H_B` over one spin per car.
pub fn encode(instance: &ProblemInstance, lambda: PenaltyWeight) -> IsingModel {
    let mut model = chain_model(instance);
    model.add_scaled(&penalty_model(instance), lambda.value());
    model
}

/// Encodes with the default `lambda = N`.
pub fn encode_default(instance: &ProblemInstance) -> IsingModel {
    encode(instance, PenaltyWeight::for_instance(instance))
}

/// Spin assignments of the cars whose color is forced by their quota.
pub fn forced_spins(instance: &ProblemInstance) -> BTreeMap<usize, i8> {
    instance
        .fixed_positions()
        .into_iter()
        .map(|(p, c)| (p, color_to_spin(c)))
        .collect()
}

/// QUBO `offset + sum_{i<=j} q_ij x_i x_j` over `x in {0,1}`; diagonal is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    n_vars: usize,
    q: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboModel {
    pub fn new(n_vars: usize) -> Self {
        QuboModel {
            n_vars,
            q: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.q.get(&key).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.q.iter().map(|(&k, &v)| (k, v))
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.n_vars && j < self.n_vars, "pair ({i}, {j}) out of range");
        let key = if i <= j { (i, j) } else { (j, i) };
        accumulate(&mut self.q, key, value);
    }

    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_empty()
    }

    pub fn energy(&self, x: &[bool]) -> Result<f64> {
        if x.len() != self.n_vars {
            return Err(Error::input(format!(
                "binary vector has {} entries but the model has {} variables",
                x.len(),
                self.n_vars
            )));
        }
        let sum: f64 = self
            .q
            .iter()
            .filter(|(&(i, j), _)| x[i] && x[j])
            .map(|(_, &v)| v)
            .sum();
        Ok(self.offset + sum)
    }

    /// Substitutes `x = (s + 1) / 2`.
    pub fn to_ising(&self) -> IsingModel {
        let mut model = IsingModel::new(self.n_vars);
        model.offset = self.offset;
        for (&(i, j), &v) in &self.q {
            if i == j {
                model.add_linear(i, v / 2.0);
                model.offset += v / 2.0;
            } else {
                model.add_quadratic(i, j, v / 4.0);
                model.add_linear(i, v / 4.0);
                model.add_linear(j, v / 4.0);
                model.offset += v / 4.0;
            }
        }
        model
    }
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    n_vars: usize,
    offset: f64,
    #[serde(serialize_with = "linear_map")]
    linear: &'a BTreeMap<usize, f64>,
    #[serde(serialize_with = "pair_map")]
    quadratic: &'a BTreeMap<(usize, usize), f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    var_to_position: Option<&'a [usize]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFileIn {
    n_vars: usize,
    offset: f64,
    linear: BTreeMap<String, f64>,
    quadratic: BTreeMap<String, f64>,
    var_to_position: Option<Vec<usize>>,
}

fn linear_map<S: Serializer>(map: &&BTreeMap<usize, f64>, ser: S) -> Result<S::Ok, S::Error> {
    let mut out = ser.serialize_map(Some(map.len()))?;
    for (i, v) in map.iter() {
        out.serialize_entry(&i.to_string(), v)?;
    }
    out.end()
}

fn pair_map<S: Serializer>(
    map: &&BTreeMap<(usize, usize), f64>,
    ser: S,
) -> Result<S::Ok, S::Error> {
    let mut out = ser.serialize_map(Some(map.len()))?;
    for ((i, j), v) in map.iter() {
        out.serialize_entry(&format!("{i},{j}"), v)?;
    }
    out.end()
}

impl IsingModel {
    /// JSON export: `n_vars`, `offset`, `linear` (`"i"` -> h) and
    /// `quadratic` (`"i,j"` -> J), keys in numeric order.
    pub fn to_json(&self) -> String {
        let identity = self.var_to_position.iter().enumerate().all(|(v, &p)| v == p);
        let file = ModelFileOut {
            n_vars: self.n_vars,
            offset: self.offset,
            linear: &self.linear,
            quadratic: &self.quadratic,
            var_to_position: (!identity).then_some(self.var_to_position.as_slice()),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("model serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse {
            path: "<model>".into(),
            message,
        };
        let file: ModelFileIn = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let mut model = IsingModel::new(file.n_vars);
        if !file.offset.is_finite() {
            return Err(bad("offset must be finite".into()));
        }
        model.offset = file.offset;
        let index = |key: &str| -> Result<usize> {
            let i: usize = key
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad variable index {key:?}")))?;
            if i >= file.n_vars {
                return Err(bad(format!("variable {i} out of range")));
            }
            Ok(i)
        };
        for (key, v) in &file.linear {
            model.add_linear(index(key)?, *v);
        }
        for (key, v) in &file.quadratic {
            let (a, b) = key
                .split_once(',')
                .ok_or_else(|| bad(format!("bad pair key {key:?}")))?;
            let (i, j) = (index(a)?, index(b)?);
            if i >= j {
                return Err(bad(format!("pair key {key:?} must satisfy i < j")));
            }
            model.add_quadratic(i, j, *v);
        }
        if let Some(map) = file.var_to_position {
            if map.len() != file.n_vars {
                return Err(bad("var_to_position length differs from n_vars".into()));
            }
            model.var_to_position = map;
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}
