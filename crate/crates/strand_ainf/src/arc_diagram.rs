//! Arc diagrams: oriented intervals carrying places, matched in twin pairs.
//!
//! Every interval with `k` places has `k + 1` steps, counting the two exterior
//! steps that run off to the interval endpoints. Steps are numbered globally,
//! interval by interval, and the numbering is what `HData` bitmasks refer to.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Most steps a diagram may have, since step coverage is stored in a `u64`.
pub const MAX_STEPS: usize = 64;
/// Most pairs a diagram may have, since per-pair variants are packed in 4-bit nibbles of a `u64`.
pub const MAX_PAIRS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalId(pub usize);

/// One of the two places of a pair, in the order the pair line lists them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    First,
    Second,
}

impl Slot {
    pub fn twin(self) -> Slot {
        match self {
            Slot::First => Slot::Second,
            Slot::Second => Slot::First,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Slot::First => 0,
            Slot::Second => 1,
        }
    }

    pub fn from_index(i: usize) -> Slot {
        if i == 0 {
            Slot::First
        } else {
            Slot::Second
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArcError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("place `{0}` appears more than once")]
    DuplicatePlace(String),
    #[error("name `{0}` is used by more than one pair or interval")]
    DuplicateName(String),
    #[error("pair `{pair}` has {count} places; pairs need exactly 2")]
    PairSize { pair: String, count: usize },
    #[error("place `{0}` is not matched by any pair")]
    Unmatched(String),
    #[error("place `{0}` is matched by more than one pair")]
    MatchedTwice(String),
    #[error("pair mentions unknown place `{0}`")]
    UnknownPlace(String),
    #[error("interval `{0}` has no places")]
    EmptyInterval(String),
    #[error("surgery along the matching produces a circle through step {0}")]
    SurgeryCircle(usize),
    #[error("diagram too large: {what} is {found}, limit {limit}")]
    TooLarge {
        what: &'static str,
        found: usize,
        limit: usize,
    },
    #[error("no pair or place named `{0}`")]
    UnknownName(String),
    #[error("bad ordering: {0}")]
    Ordering(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub name: String,
    pub interval: IntervalId,
    /// Position along the interval, starting at 0.
    pub position: usize,
    pub pair: PairId,
    pub slot: Slot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub name: String,
    pub places: [PlaceId; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub name: String,
    pub places: Vec<PlaceId>,
    pub first_step: StepId,
}

/// The restriction of a diagram to one pair: four global steps in the order
/// first-place-below, first-place-above, second-place-below, second-place-above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fragment {
    pub pair: PairId,
    pub steps: [StepId; 4],
}

impl Fragment {
    pub fn below(&self, slot: Slot) -> StepId {
        self.steps[2 * slot.index()]
    }

    pub fn above(&self, slot: Slot) -> StepId {
        self.steps[2 * slot.index() + 1]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub skip_surgery_check: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcDiagram {
    intervals: Vec<Interval>,
    places: Vec<Place>,
    pairs: Vec<Pair>,
    step_count: usize,
    fragments: Vec<Fragment>,
}

impl ArcDiagram {
    pub fn parse(text: &str) -> Result<Self, ArcError> {
        Self::parse_with(text, ParseOptions::default())
    }

    pub fn parse_with(text: &str, options: ParseOptions) -> Result<Self, ArcError> {
        let mut intervals: Vec<(String, Vec<String>)> = Vec::new();
        let mut pairs: Vec<(String, Vec<String>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let syntax = |column: usize, message: &str| ArcError::Syntax {
                line: lineno + 1,
                column,
                message: message.to_string(),
            };
            let indent = line.len() - line.trim_start().len();
            let body = line.trim();
            let (keyword, rest) = body
                .split_once(char::is_whitespace)
                .ok_or_else(|| syntax(indent + 1, "expected `interval` or `pair` followed by a name"))?;
            let Some((name, tokens)) = rest.split_once(':') else {
                return Err(syntax(indent + keyword.len() + 2, "missing `:` after name"));
            };
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(syntax(indent + keyword.len() + 2, "name must be a single token"));
            }
            let tokens: Vec<String> = tokens.split_whitespace().map(str::to_string).collect();
            match keyword {
                "interval" => intervals.push((name.to_string(), tokens)),
                "pair" => pairs.push((name.to_string(), tokens)),
                other => {
                    return Err(syntax(indent + 1, &format!("unknown keyword `{other}`")));
                }
            }
        }
        Self::build(intervals, pairs, options)
    }

    /// Builds a diagram from interval place lists and pair place lists.
    pub fn build(
        intervals: Vec<(String, Vec<String>)>,
        pairs: Vec<(String, Vec<String>)>,
        options: ParseOptions,
    ) -> Result<Self, ArcError> {
        let mut names = std::collections::HashSet::new();
        for (name, _) in intervals.iter().chain(pairs.iter()) {
            if !names.insert(name.as_str()) {
                return Err(ArcError::DuplicateName(name.clone()));
            }
        }
        if pairs.len() > MAX_PAIRS {
            return Err(ArcError::TooLarge {
                what: "pair count",
                found: pairs.len(),
                limit: MAX_PAIRS,
            });
        }

        let mut place_index: HashMap<String, PlaceId> = HashMap::new();
        let mut place_list: Vec<(String, IntervalId, usize)> = Vec::new();
        let mut built_intervals = Vec::new();
        let mut step = 0usize;
        for (i, (name, tokens)) in intervals.into_iter().enumerate() {
            if tokens.is_empty() {
                return Err(ArcError::EmptyInterval(name));
            }
            let mut ids = Vec::new();
            for (pos, token) in tokens.into_iter().enumerate() {
                let id = PlaceId(place_list.len());
                if place_index.insert(token.clone(), id).is_some() {
                    return Err(ArcError::DuplicatePlace(token));
                }
                place_list.push((token, IntervalId(i), pos));
                ids.push(id);
            }
            let first_step = StepId(step);
            step += ids.len() + 1;
            built_intervals.push(Interval {
                name,
                places: ids,
                first_step,
            });
        }
        if step > MAX_STEPS {
            return Err(ArcError::TooLarge {
                what: "step count",
                found: step,
                limit: MAX_STEPS,
            });
        }

        let mut owner: Vec<Option<(PairId, Slot)>> = vec![None; place_list.len()];
        let mut built_pairs = Vec::new();
        for (k, (name, tokens)) in pairs.into_iter().enumerate() {
            if tokens.len() != 2 {
                return Err(ArcError::PairSize {
                    pair: name,
                    count: tokens.len(),
                });
            }
            let mut ids = [PlaceId(0); 2];
            for (j, token) in tokens.iter().enumerate() {
                let id = *place_index
                    .get(token)
                    .ok_or_else(|| ArcError::UnknownPlace(token.clone()))?;
                if owner[id.0].is_some() {
                    return Err(ArcError::MatchedTwice(token.clone()));
                }
                owner[id.0] = Some((PairId(k), Slot::from_index(j)));
                ids[j] = id;
            }
            built_pairs.push(Pair { name, places: ids });
        }

        let mut places = Vec::with_capacity(place_list.len());
        for (idx, (name, interval, position)) in place_list.into_iter().enumerate() {
            let (pair, slot) = owner[idx].ok_or_else(|| ArcError::Unmatched(name.clone()))?;
            places.push(Place {
                name,
                interval,
                position,
                pair,
                slot,
            });
        }

        let mut z = ArcDiagram {
            intervals: built_intervals,
            places,
            pairs: built_pairs,
            step_count: step,
            fragments: Vec::new(),
        };
        z.fragments = (0..z.pairs.len())
            .map(|k| {
                let [a, b] = z.pairs[k].places;
                Fragment {
                    pair: PairId(k),
                    steps: [z.step_below(a), z.step_above(a), z.step_below(b), z.step_above(b)],
                }
            })
            .collect();
        if !options.skip_surgery_check {
            z.surgery_check()?;
        }
        Ok(z)
    }

    /// Walks the 1-manifold obtained by gluing each place to its twin. Each
    /// walk starts on the bottom exterior step of an interval; on reaching a
    /// place it jumps to the step just above the twin. Any step left unvisited
    /// lies on a closed loop.
    fn surgery_check(&self) -> Result<(), ArcError> {
        let mut visited = vec![false; self.step_count];
        for interval in &self.intervals {
            let mut step = interval.first_step;
            loop {
                if visited[step.0] {
                    break;
                }
                visited[step.0] = true;
                match self.place_above_step(step) {
                    None => break,
                    Some(place) => step = self.step_above(self.twin(place)),
                }
            }
        }
        match visited.iter().position(|v| !v) {
            Some(s) => Err(ArcError::SurgeryCircle(s)),
            None => Ok(()),
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn place(&self, id: PlaceId) -> &Place {
        &self.places[id.0]
    }

    pub fn pair(&self, id: PairId) -> &Pair {
        &self.pairs[id.0]
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn fragment(&self, pair: PairId) -> &Fragment {
        &self.fragments[pair.0]
    }

    pub fn twin(&self, place: PlaceId) -> PlaceId {
        let p = &self.places[place.0];
        self.pairs[p.pair.0].places[p.slot.twin().index()]
    }

    pub fn place_of(&self, pair: PairId, slot: Slot) -> PlaceId {
        self.pairs[pair.0].places[slot.index()]
    }

    pub fn step_below(&self, place: PlaceId) -> StepId {
        let p = &self.places[place.0];
        StepId(self.intervals[p.interval.0].first_step.0 + p.position)
    }

    pub fn step_above(&self, place: PlaceId) -> StepId {
        StepId(self.step_below(place).0 + 1)
    }

    /// The place at the top end of a step, or `None` for a top exterior step.
    pub fn place_above_step(&self, step: StepId) -> Option<PlaceId> {
        let interval = self.interval_of_step(step);
        let offset = step.0 - interval.first_step.0;
        interval.places.get(offset).copied()
    }

    /// The place at the bottom end of a step, or `None` for a bottom exterior step.
    pub fn place_below_step(&self, step: StepId) -> Option<PlaceId> {
        let interval = self.interval_of_step(step);
        let offset = step.0 - interval.first_step.0;
        offset.checked_sub(1).map(|k| interval.places[k])
    }

    fn interval_of_step(&self, step: StepId) -> &Interval {
        let k = self
            .intervals
            .partition_point(|iv| iv.first_step.0 <= step.0)
            .saturating_sub(1);
        &self.intervals[k]
    }

    pub fn place_by_name(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p.name == name).map(PlaceId)
    }

    pub fn pair_by_name(&self, name: &str) -> Option<PairId> {
        self.pairs.iter().position(|p| p.name == name).map(PairId)
    }

    /// Diagram made of `names.len()` disjoint copies of the one-pair fragment,
    /// pair `X` having places `x` and `x'` on intervals of their own.
    pub fn disjoint_fragments(names: &[&str]) -> Self {
        let mut intervals = Vec::new();
        let mut pairs = Vec::new();
        for name in names {
            let p = name.to_lowercase();
            let q = format!("{p}'");
            intervals.push((format!("{p}_1"), vec![p.clone()]));
            intervals.push((format!("{p}_2"), vec![q.clone()]));
            pairs.push((name.to_string(), vec![p, q]));
        }
        Self::build(intervals, pairs, ParseOptions::default())
            .expect("disjoint fragments always form a valid arc diagram")
    }
}

impl fmt::Display for ArcDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for iv in &self.intervals {
            write!(f, "interval {}:", iv.name)?;
            for p in &iv.places {
                write!(f, " {}", self.places[p.0].name)?;
            }
            writeln!(f)?;
        }
        for pair in &self.pairs {
            writeln!(
                f,
                "pair {}: {} {}",
                pair.name, self.places[pair.places[0].0].name, self.places[pair.places[1].0].name
            )?;
        }
        Ok(())
    }
}

/// A total order on pairs together with a choice of unprimed place in each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOrdering {
    /// Pairs from smallest to largest.
    order: Vec<PairId>,
    rank: Vec<usize>,
    unprimed: Vec<Slot>,
}

impl PairOrdering {
    pub fn new(order: Vec<PairId>, unprimed: Vec<Slot>) -> Result<Self, ArcError> {
        let n = unprimed.len();
        let mut rank = vec![usize::MAX; n];
        for (r, p) in order.iter().enumerate() {
            if p.0 >= n || rank[p.0] != usize::MAX {
                return Err(ArcError::Ordering("pair order is not a permutation".into()));
            }
            rank[p.0] = r;
        }
        if order.len() != n {
            return Err(ArcError::Ordering("pair order is not a permutation".into()));
        }
        Ok(PairOrdering {
            order,
            rank,
            unprimed,
        })
    }

    /// Places ordered as listed along intervals; pairs by their earliest place,
    /// the earlier place of each pair being unprimed.
    pub fn default_for(z: &ArcDiagram) -> Self {
        let mut order: Vec<PairId> = (0..z.pair_count()).map(PairId).collect();
        let min_place = |p: PairId| z.pair(p).places.iter().map(|x| x.0).min().unwrap();
        order.sort_by_key(|&p| min_place(p));
        let unprimed = z
            .pairs()
            .iter()
            .map(|pair| {
                if pair.places[0].0 < pair.places[1].0 {
                    Slot::First
                } else {
                    Slot::Second
                }
            })
            .collect();
        PairOrdering::new(order, unprimed).expect("sorted pair list is a permutation")
    }

    /// Parses `P<Q<R;p<p',q<q'`. Pairs missing from the within-pair section keep
    /// their default unprimed place.
    pub fn parse(z: &ArcDiagram, spec: &str) -> Result<Self, ArcError> {
        let default = Self::default_for(z);
        let (pair_part, place_part) = match spec.split_once(';') {
            Some((a, b)) => (a, Some(b)),
            None => (spec, None),
        };
        let mut order = Vec::new();
        if pair_part.trim().is_empty() {
            order = default.order.clone();
        } else {
            for name in pair_part.split('<') {
                let name = name.trim();
                order.push(
                    z.pair_by_name(name)
                        .ok_or_else(|| ArcError::UnknownName(name.to_string()))?,
                );
            }
        }
        let mut unprimed = default.unprimed.clone();
        if let Some(places) = place_part {
            for item in places.split(',').filter(|s| !s.trim().is_empty()) {
                let (a, b) = item
                    .split_once('<')
                    .ok_or_else(|| ArcError::Ordering(format!("expected `x<y` in `{item}`")))?;
                let a = z
                    .place_by_name(a.trim())
                    .ok_or_else(|| ArcError::UnknownName(a.trim().to_string()))?;
                let b = z
                    .place_by_name(b.trim())
                    .ok_or_else(|| ArcError::UnknownName(b.trim().to_string()))?;
                if z.twin(a) != b {
                    return Err(ArcError::Ordering(format!("`{item}` does not name twin places")));
                }
                let pa = z.place(a);
                unprimed[pa.pair.0] = pa.slot;
            }
        }
        PairOrdering::new(order, unprimed)
    }

    pub fn order(&self) -> &[PairId] {
        &self.order
    }

    pub fn rank(&self, pair: PairId) -> usize {
        self.rank[pair.0]
    }

    pub fn unprimed(&self, pair: PairId) -> Slot {
        self.unprimed[pair.0]
    }

    pub fn to_spec(&self, z: &ArcDiagram) -> String {
        let pairs: Vec<&str> = self.order.iter().map(|p| z.pair(*p).name.as_str()).collect();
        let places: Vec<String> = self
            .order
            .iter()
            .map(|&p| {
                let first = z.place_of(p, self.unprimed(p));
                let second = z.twin(first);
                format!("{}<{}", z.place(first).name, z.place(second).name)
            })
            .collect();
        format!("{};{}", pairs.join("<"), places.join(","))
    }
}
