//! Enumeration limits shared by every exhaustive routine.
//!
//! Each limit can be overridden from the environment (see [`Caps::from_env`]),
//! which is how the command-line tool exposes them.

use crate::error::{Error, Result};

/// Upper bounds for exhaustive work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest group whose elements may be enumerated.
    pub max_group_order: usize,
    /// Largest predicted size of a single hom enumeration.
    pub max_hom_count: u128,
    /// Largest direct-sum group handed to the isomorphism oracle.
    pub oracle_max_order: usize,
    /// Node budget of one oracle search.
    pub oracle_max_nodes: u64,
    /// Largest `|X| + |Y|` for brute-force Hall checks.
    pub hall_max_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_group_order: 1024,
            max_hom_count: 10_000_000,
            oracle_max_order: 1296,
            oracle_max_nodes: 10_000_000,
            hall_max_vertices: 20,
        }
    }
}

pub const ENV_MAX_GROUP_ORDER: &str = "EXTCAT_MAX_GROUP_ORDER";
pub const ENV_MAX_HOM_COUNT: &str = "EXTCAT_MAX_HOM_COUNT";
pub const ENV_ORACLE_MAX_ORDER: &str = "EXTCAT_ORACLE_MAX_ORDER";
pub const ENV_ORACLE_MAX_NODES: &str = "EXTCAT_ORACLE_MAX_NODES";
pub const ENV_HALL_MAX_VERTICES: &str = "EXTCAT_HALL_MAX_VERTICES";

impl Caps {
    /// Defaults overridden by any `EXTCAT_*` variables that are set.
    pub fn from_env() -> Result<Self> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        fn parse<T: std::str::FromStr>(key: &str, v: Option<String>, dflt: T) -> Result<T> {
            match v {
                None => Ok(dflt),
                Some(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("{key}={s:?} is not a valid limit"))),
            }
        }
        let d = Caps::default();
        Ok(Caps {
            max_group_order: parse(ENV_MAX_GROUP_ORDER, lookup(ENV_MAX_GROUP_ORDER), d.max_group_order)?,
            max_hom_count: parse(ENV_MAX_HOM_COUNT, lookup(ENV_MAX_HOM_COUNT), d.max_hom_count)?,
            oracle_max_order: parse(ENV_ORACLE_MAX_ORDER, lookup(ENV_ORACLE_MAX_ORDER), d.oracle_max_order)?,
            oracle_max_nodes: parse(ENV_ORACLE_MAX_NODES, lookup(ENV_ORACLE_MAX_NODES), d.oracle_max_nodes)?,
            hall_max_vertices: parse(ENV_HALL_MAX_VERTICES, lookup(ENV_HALL_MAX_VERTICES), d.hall_max_vertices)?,
        })
    }

    /// Limit used for element enumeration of direct sums: the oracle bound
    /// when it is the larger of the two.
    pub fn sum_order_limit(&self) -> usize {
        self.max_group_order.max(self.oracle_max_order)
    }

    pub(crate) fn check_order(&self, what: &'static str, order: usize) -> Result<()> {
        if order > self.max_group_order {
            return Err(Error::cap(what, order as u128, self.max_group_order as u128));
        }
        Ok(())
    }
}
