//! Closed-form test solutions for the moment-problem experiments.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunctionId {
    /// `t/2` up to `1/2`, then `t − 1/4`.
    XA,
    /// The hat `2t`, `2 − 2t`.
    XB,
    /// Indicator of `[1/4, 3/4]`.
    XC,
    /// `2t`.
    XLin2t,
    /// `t²`.
    XSq,
}

impl TestFunctionId {
    pub const ALL: [TestFunctionId; 5] = [Self::XA, Self::XB, Self::XC, Self::XLin2t, Self::XSq];

    pub fn name(self) -> &'static str {
        match self {
            Self::XA => "x_a",
            Self::XB => "x_b",
            Self::XC => "x_c",
            Self::XLin2t => "x_lin2t",
            Self::XSq => "x_sq",
        }
    }

    pub fn eval(self, t: f64) -> f64 {
        match self {
            Self::XA => {
                if t <= 0.5 {
                    t / 2.0
                } else {
                    t - 0.25
                }
            }
            Self::XB => {
                if t <= 0.5 {
                    2.0 * t
                } else {
                    2.0 - 2.0 * t
                }
            }
            Self::XC => {
                if (0.25..=0.75).contains(&t) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::XLin2t => 2.0 * t,
            Self::XSq => t * t,
        }
    }

    /// Points where the function or its derivative jumps.
    pub fn breakpoints(self) -> &'static [f64] {
        match self {
            Self::XA | Self::XB => &[0.5],
            Self::XC => &[0.25, 0.75],
            Self::XLin2t | Self::XSq => &[],
        }
    }
}

impl fmt::Display for TestFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunctionId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| format!("unknown test function '{s}'"))
    }
}
