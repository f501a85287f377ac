use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub number: usize,
    /// Seconds.
    pub downbeat: f64,
}

/// Downbeat times of one MIDI file. Measure numbers run 1, 2, ...
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MeasureMap {
    pub measures: Vec<MeasureEntry>,
    /// End of the final measure.
    pub end_time: f64,
}

impl MeasureMap {
    pub fn from_downbeats(downbeats: &[f64], end_time: f64) -> Result<Self, EvalError> {
        let m = Self {
            measures: downbeats
                .iter()
                .enumerate()
                .map(|(i, &downbeat)| MeasureEntry { number: i + 1, downbeat })
                .collect(),
            end_time,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.measures.is_empty() {
            return Err(EvalError::BadMeasureMap("no measures".into()));
        }
        for (i, m) in self.measures.iter().enumerate() {
            if m.number != i + 1 {
                return Err(EvalError::BadMeasureMap(format!("measure {} numbered {}", i + 1, m.number)));
            }
            if i > 0 && m.downbeat <= self.measures[i - 1].downbeat {
                return Err(EvalError::BadMeasureMap(format!("downbeat of measure {} not increasing", m.number)));
            }
        }
        if self.end_time <= self.measures.last().expect("nonempty").downbeat {
            return Err(EvalError::BadMeasureMap("end time not after the last downbeat".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    /// Downbeat of 1-based measure `m`; `m = len + 1` is the end time.
    pub fn boundary(&self, m: usize) -> Option<f64> {
        match m {
            0 => None,
            m if m <= self.len() => Some(self.measures[m - 1].downbeat),
            m if m == self.len() + 1 => Some(self.end_time),
            _ => None,
        }
    }

    /// `[downbeat(first), downbeat(last + 1))`, the final measure running to
    /// the end time.
    pub fn interval(&self, first: usize, last: usize) -> Result<(f64, f64), EvalError> {
        if first == 0 || first > last || last > self.len() {
            return Err(EvalError::BadMeasureRange { first, last, measures: self.len() });
        }
        Ok((self.boundary(first).expect("checked"), self.boundary(last + 1).expect("checked")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals() {
        let m = MeasureMap::from_downbeats(&[0.0, 2.0, 4.0], 6.0).unwrap();
        assert_eq!(m.interval(1, 1).unwrap(), (0.0, 2.0));
        assert_eq!(m.interval(2, 3).unwrap(), (2.0, 6.0));
        assert!(m.interval(0, 1).is_err());
        assert!(m.interval(3, 4).is_err());
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(MeasureMap::from_downbeats(&[0.0, 0.0], 1.0).is_err());
        assert!(MeasureMap::from_downbeats(&[0.0, 1.0], 1.0).is_err());
        assert!(MeasureMap::from_downbeats(&[], 1.0).is_err());
        let mut m = MeasureMap::from_downbeats(&[0.0, 1.0], 2.0).unwrap();
        m.measures[1].number = 3;
        assert!(m.validate().is_err());
    }
}
