//! Wall-clock stage timings, kept in execution order.

use std::time::Instant;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StageTimings {
    stages: Vec<(String, f64)>,
}

impl StageTimings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs `f`, adding its duration in seconds under `name`.
    pub fn time<R>(&mut self, name: &str, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let out = f();
        self.add(name, start.elapsed().as_secs_f64());
        out
    }

    /// Accumulates into an existing stage of the same name.
    pub fn add(&mut self, name: &str, seconds: f64) {
        match self.stages.iter_mut().find(|(n, _)| n == name) {
            Some((_, s)) => *s += seconds,
            None => self.stages.push((name.to_string(), seconds)),
        }
    }

    pub fn extend(&mut self, other: &StageTimings) {
        for (n, s) in &other.stages {
            self.add(n, *s);
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.stages.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    pub fn total(&self) -> f64 {
        self.stages.iter().map(|(_, s)| s).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.stages.iter().map(|(n, s)| (n.as_str(), *s))
    }

    /// Stage with the largest time; earliest stage wins ties.
    pub fn dominant(&self) -> Option<(&str, f64)> {
        self.iter()
            .fold(None, |best: Option<(&str, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            })
    }
}

impl Serialize for StageTimings {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(Some(self.stages.len()))?;
        for (n, s) in &self.stages {
            map.serialize_entry(n, s)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for StageTimings {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let map = std::collections::BTreeMap::<String, f64>::deserialize(de)?;
        Ok(Self {
            stages: map.into_iter().collect(),
        })
    }
}
