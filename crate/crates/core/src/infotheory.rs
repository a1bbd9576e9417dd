//! Empirical (maximum-likelihood) mutual information estimators.

use std::fmt;
use std::str::FromStr;

use ndarray::IxDyn;

use crate::dataset::ContingencyTable;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Logarithm base shared by information quantities and the `log N` terms of
/// the description length. Any fixed base gives the same optimal structure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn log<T: Scalar>(self, x: T) -> T {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Natural => "natural",
            LogBase::Two => "two",
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" | "e" | "nats" => Ok(LogBase::Natural),
            "two" | "2" | "bits" => Ok(LogBase::Two),
            other => Err(Error::InvalidParameters(format!("unknown log base `{other}`"))),
        }
    }
}

/// A non-negative, finite amount of information.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Information<T>(T);

impl<T: Scalar> Information<T> {
    /// Clamps small negative rounding residue to zero.
    pub fn new(value: T) -> Self {
        debug_assert!(value.is_finite());
        Self(value.max(T::zero()))
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// I(X;Y) of a two-way table, with zero cells contributing nothing.
pub fn mutual_information<T: Scalar>(
    table: &ContingencyTable,
    base: LogBase,
) -> Result<Information<T>> {
    check_table(table, 2)?;
    let counts = table.counts();
    let (nx, ny) = (table.shape()[0], table.shape()[1]);
    let row: Vec<u64> = (0..nx)
        .map(|x| (0..ny).map(|y| counts[IxDyn(&[x, y])]).sum())
        .collect();
    let col: Vec<u64> = (0..ny)
        .map(|y| (0..nx).map(|x| counts[IxDyn(&[x, y])]).sum())
        .collect();
    let total = T::from_count(table.total());

    let mut sum = T::zero();
    for x in 0..nx {
        for y in 0..ny {
            let n = counts[IxDyn(&[x, y])];
            if n == 0 {
                continue;
            }
            let n = T::from_count(n);
            let ratio = n * total / (T::from_count(row[x]) * T::from_count(col[y]));
            sum = sum + n / total * base.log(ratio);
        }
    }
    Ok(Information::new(sum))
}

/// I(X;Y|C) of a three-way table whose last axis is the conditioning variable.
pub fn conditional_mutual_information<T: Scalar>(
    table: &ContingencyTable,
    base: LogBase,
) -> Result<Information<T>> {
    check_table(table, 3)?;
    let counts = table.counts();
    let (nx, ny, nc) = (table.shape()[0], table.shape()[1], table.shape()[2]);
    let total = T::from_count(table.total());

    let mut sum = T::zero();
    let mut xc = vec![0u64; nx];
    let mut yc = vec![0u64; ny];
    for c in 0..nc {
        xc.fill(0);
        yc.fill(0);
        let mut nc_total = 0u64;
        for x in 0..nx {
            for y in 0..ny {
                let n = counts[IxDyn(&[x, y, c])];
                xc[x] += n;
                yc[y] += n;
                nc_total += n;
            }
        }
        if nc_total == 0 {
            continue;
        }
        let stratum = T::from_count(nc_total);
        for x in 0..nx {
            for y in 0..ny {
                let n = counts[IxDyn(&[x, y, c])];
                if n == 0 {
                    continue;
                }
                let n = T::from_count(n);
                let ratio = n * stratum / (T::from_count(xc[x]) * T::from_count(yc[y]));
                sum = sum + n / total * base.log(ratio);
            }
        }
    }
    Ok(Information::new(sum))
}

fn check_table(table: &ContingencyTable, arity: usize) -> Result<()> {
    if table.arity() != arity {
        return Err(Error::WrongArity {
            expected: arity,
            found: table.arity(),
        });
    }
    if table.total() == 0 {
        return Err(Error::EmptyTable);
    }
    Ok(())
}
