use std::fmt;

/// Binary class label. Class I (normal) is `-1`, class II (anomalous) is `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Normal,
    Anomalous,
}

impl Label {
    pub fn value(self) -> f64 {
        match self {
            Label::Normal => -1.0,
            Label::Anomalous => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Normal => -1,
            Label::Anomalous => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(Label::Normal),
            1 => Some(Label::Anomalous),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

/// Sign function with `sgn(0) = +1`.
pub fn sgn(x: f64) -> Label {
    if x >= 0.0 {
        Label::Anomalous
    } else {
        Label::Normal
    }
}
