use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A duplicate-free, ascending set of device indices transmitting in one slot.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule(Vec<usize>);

impl Schedule {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Schedule(v)
    }

    pub fn empty() -> Self {
        Schedule(Vec::new())
    }

    pub fn singleton(device: usize) -> Self {
        Schedule(vec![device])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, device: usize) -> bool {
        self.0.binary_search(&device).is_ok()
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset_of(&self, other: &Schedule) -> bool {
        self.iter().all(|d| other.contains(d))
    }

    /// Checks every index is below `n_devices`.
    pub fn check_range(&self, n_devices: usize) -> Result<()> {
        match self.0.last() {
            Some(&d) if d >= n_devices => Err(Error::DeviceOutOfRange { device: d, n_devices }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for Schedule {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Schedule::new(iter)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_order_and_duplicates() {
        let s = Schedule::new([3, 1, 3, 0]);
        assert_eq!(s.members(), &[0, 1, 3]);
        assert_eq!(s.to_string(), "{0,1,3}");
        assert!(s.contains(3) && !s.contains(2));
    }

    #[test]
    fn range_check() {
        assert!(Schedule::new([0, 4]).check_range(5).is_ok());
        assert!(matches!(
            Schedule::new([0, 5]).check_range(5),
            Err(Error::DeviceOutOfRange { device: 5, .. })
        ));
    }
}
