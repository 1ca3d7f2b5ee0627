use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::drawlist::Rgba8;

const VIRIDIS_STOPS: [[u8; 3]; 5] = [
    [0x44, 0x01, 0x54],
    [0x3b, 0x52, 0x8b],
    [0x21, 0x91, 0x8c],
    [0x5e, 0xc9, 0x62],
    [0xfd, 0xe7, 0x25],
];

/// 256-entry color lookup table.
#[derive(Clone, PartialEq, Eq)]
pub struct Colormap {
    name: Option<&'static str>,
    lut: Box<[Rgba8; 256]>,
}

impl fmt::Debug for Colormap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name {
            Some(n) => write!(f, "Colormap({n})"),
            None => write!(f, "Colormap(custom)"),
        }
    }
}

impl Default for Colormap {
    fn default() -> Self {
        Self::viridis()
    }
}

fn interpolate(stops: &[[u8; 3]]) -> Box<[Rgba8; 256]> {
    let segs = (stops.len() - 1) as f64;
    let mut lut = Box::new([Rgba8::BLACK; 256]);
    for (i, slot) in lut.iter_mut().enumerate() {
        let t = i as f64 / 255.0 * segs;
        let k = (t.floor() as usize).min(stops.len() - 2);
        let f = t - k as f64;
        let ch = |c: usize| {
            let (a, b) = (stops[k][c] as f64, stops[k + 1][c] as f64);
            (a + (b - a) * f + 0.5).floor() as u8
        };
        *slot = Rgba8::opaque(ch(0), ch(1), ch(2));
    }
    lut
}

impl Colormap {
    /// Piecewise-linear approximation of viridis through five stops.
    pub fn viridis() -> Self {
        Self {
            name: Some("viridis"),
            lut: interpolate(&VIRIDIS_STOPS),
        }
    }

    pub fn gray() -> Self {
        Self {
            name: Some("gray"),
            lut: interpolate(&[[0, 0, 0], [255, 255, 255]]),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "viridis" => Some(Self::viridis()),
            "gray" | "grey" => Some(Self::gray()),
            _ => None,
        }
    }

    pub fn from_lut(entries: &[Rgba8]) -> Result<Self, String> {
        let lut: [Rgba8; 256] = entries
            .try_into()
            .map_err(|_| format!("colormap needs exactly 256 entries, got {}", entries.len()))?;
        Ok(Self {
            name: None,
            lut: Box::new(lut),
        })
    }

    pub fn entries(&self) -> &[Rgba8; 256] {
        &self.lut
    }

    /// Nearest entry for a normalized value; NaN maps to entry 0.
    pub fn lookup(&self, norm: f64) -> Rgba8 {
        let norm = if norm.is_nan() { 0.0 } else { norm.clamp(0.0, 1.0) };
        self.lut[(norm * 255.0 + 0.5).floor() as usize]
    }
}

impl Serialize for Colormap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.name {
            Some(n) => s.serialize_str(n),
            None => self.lut.as_slice().serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Colormap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Table(Vec<Rgba8>),
        }
        match Repr::deserialize(d)? {
            Repr::Name(n) => Colormap::from_name(&n)
                .ok_or_else(|| de::Error::custom(format!("unknown colormap {n:?}, expected viridis or gray"))),
            Repr::Table(t) => Colormap::from_lut(&t).map_err(de::Error::custom),
        }
    }
}
