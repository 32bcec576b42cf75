//! The candidate feature pool: classical quality indices plus content and
//! artefact features, computed per frame, per channel, per scale.
//!
//! Keys render in the `NAME-channel-Sλ` notation used by model files and
//! feature caches (the detail-loss score renders bare as `E-ADM`). The full
//! pool enumerates exactly 165 entries; see [`PoolSpec::full`].

mod bl_ed;
mod content;
mod extract;
mod quality;
mod temporal;

pub use bl_ed::compute_bl_ed;
pub use content::{colorfulness, spatial_information};
pub use extract::{FeatureExtractor, EXTRACTOR_VERSION};
pub use quality::{compute_psnr, compute_ssim, compute_vif_scale, SsimMode};
pub use temporal::{compute_ti, motion_compensated_residual};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Y,
    Cb,
    Cr,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Y, Channel::Cb, Channel::Cr];

    pub fn index(self) -> usize {
        match self {
            Channel::Y => 0,
            Channel::Cb => 1,
            Channel::Cr => 2,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Y => "Y",
            Channel::Cb => "Cb",
            Channel::Cr => "Cr",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureName {
    Psnr,
    Ssim,
    MsSsim,
    Vif,
    Ti,
    Bl,
    Ed,
    Si,
    DeltaSi,
    DeltaTi,
    Tp,
    DeltaTp,
    Luma,
    Cf,
    DeltaCf,
    Eadm,
}

impl FeatureName {
    fn label(self) -> &'static str {
        match self {
            FeatureName::Psnr => "PSNR",
            FeatureName::Ssim => "SSIM",
            FeatureName::MsSsim => "MS-SSIM",
            FeatureName::Vif => "VIF",
            FeatureName::Ti => "TI",
            FeatureName::Bl => "BL",
            FeatureName::Ed => "ED",
            FeatureName::Si => "SI",
            FeatureName::DeltaSi => "ΔSI",
            FeatureName::DeltaTi => "ΔTI",
            FeatureName::Tp => "TP",
            FeatureName::DeltaTp => "ΔTP",
            FeatureName::Luma => "LUMA",
            FeatureName::Cf => "CF",
            FeatureName::DeltaCf => "ΔCF",
            FeatureName::Eadm => "E-ADM",
        }
    }
}

/// Identifies one feature: a name applied on a channel at a pyramid scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureKey {
    pub name: FeatureName,
    pub channel: Channel,
    /// Pyramid scale, 1-based.
    pub scale: u8,
}

impl FeatureKey {
    pub fn new(name: FeatureName, channel: Channel, scale: u8) -> Self {
        debug_assert!((1..=4).contains(&scale));
        Self {
            name,
            channel,
            scale,
        }
    }

    /// The detail-loss metric key; channel/scale carry no meaning for it.
    pub fn eadm() -> Self {
        Self {
            name: FeatureName::Eadm,
            channel: Channel::Y,
            scale: 1,
        }
    }
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.name == FeatureName::Eadm {
            f.write_str("E-ADM")
        } else {
            write!(f, "{}-{}-S{}", self.name.label(), self.channel, self.scale)
        }
    }
}

impl FromStr for FeatureKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "E-ADM" {
            return Ok(FeatureKey::eadm());
        }
        let bad = || Error::InvalidInput(format!("unrecognized feature key `{s}`"));
        let mut it = s.rsplitn(3, '-');
        let scale_part = it.next().ok_or_else(bad)?;
        let channel_part = it.next().ok_or_else(bad)?;
        let name_part = it.next().ok_or_else(bad)?;
        let scale: u8 = scale_part
            .strip_prefix('S')
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        if !(1..=4).contains(&scale) {
            return Err(bad());
        }
        let channel = match channel_part {
            "Y" => Channel::Y,
            "Cb" => Channel::Cb,
            "Cr" => Channel::Cr,
            _ => return Err(bad()),
        };
        // ASCII `d` aliases accepted for the delta features
        let name = match name_part {
            "PSNR" => FeatureName::Psnr,
            "SSIM" => FeatureName::Ssim,
            "MS-SSIM" => FeatureName::MsSsim,
            "VIF" => FeatureName::Vif,
            "TI" => FeatureName::Ti,
            "BL" => FeatureName::Bl,
            "ED" => FeatureName::Ed,
            "SI" => FeatureName::Si,
            "ΔSI" | "dSI" => FeatureName::DeltaSi,
            "ΔTI" | "dTI" => FeatureName::DeltaTi,
            "TP" => FeatureName::Tp,
            "ΔTP" | "dTP" => FeatureName::DeltaTp,
            "LUMA" => FeatureName::Luma,
            "CF" => FeatureName::Cf,
            "ΔCF" | "dCF" => FeatureName::DeltaCf,
            _ => return Err(bad()),
        };
        Ok(FeatureKey {
            name,
            channel,
            scale,
        })
    }
}

impl serde::Serialize for FeatureKey {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for FeatureKey {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Versioned, ordered enumeration of feature keys. Model training, caches
/// and serialized vectors all follow this order, so it must be stable.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolSpec {
    version: String,
    keys: Vec<FeatureKey>,
}

/// Names enumerated over the full channel x scale grid, in canonical order.
const GRID_NAMES: [FeatureName; 13] = [
    FeatureName::Psnr,
    FeatureName::Ssim,
    FeatureName::MsSsim,
    FeatureName::Vif,
    FeatureName::Ti,
    FeatureName::Bl,
    FeatureName::Ed,
    FeatureName::Si,
    FeatureName::DeltaSi,
    FeatureName::DeltaTi,
    FeatureName::Tp,
    FeatureName::DeltaTp,
    FeatureName::Luma,
];

impl PoolSpec {
    /// The complete candidate pool: the detail-loss score, thirteen features
    /// over the 3-channel x 4-scale grid, and the two joint-chroma
    /// colorfulness features over the 4 scales. 1 + 13*12 + 2*4 = 165.
    pub fn full() -> Self {
        let mut keys = Vec::with_capacity(165);
        keys.push(FeatureKey::eadm());
        for name in GRID_NAMES {
            for channel in Channel::ALL {
                for scale in 1..=4 {
                    keys.push(FeatureKey::new(name, channel, scale));
                }
            }
        }
        for name in [FeatureName::Cf, FeatureName::DeltaCf] {
            for scale in 1..=4 {
                keys.push(FeatureKey::new(name, Channel::Y, scale));
            }
        }
        Self {
            version: "pool-v1".into(),
            keys,
        }
    }

    /// The six fusion-core features: the detail-loss score, the four
    /// luma fidelity scales and the luma temporal feature at scale 3.
    pub fn core_six() -> Vec<FeatureKey> {
        let mut keys = vec![FeatureKey::eadm()];
        for scale in 1..=4 {
            keys.push(FeatureKey::new(FeatureName::Vif, Channel::Y, scale));
        }
        keys.push(FeatureKey::new(FeatureName::Ti, Channel::Y, 3));
        keys
    }

    pub fn from_keys(version: impl Into<String>, keys: Vec<FeatureKey>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for key in &keys {
            if !seen.insert(*key) {
                return Err(Error::InvalidInput(format!(
                    "duplicate feature key `{key}`"
                )));
            }
        }
        Ok(Self {
            version: version.into(),
            keys,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn keys(&self) -> &[FeatureKey] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, key: FeatureKey) -> bool {
        self.keys.contains(&key)
    }

    /// Drop keys whose preconditions cannot hold at the given luma geometry
    /// (4:2:0 chroma assumed at half size). Multiscale SSIM needs at least
    /// 32 px per side at its channel/scale; everything else needs the
    /// 4-scale pyramid, i.e. 16 px per side of the channel plane.
    pub fn restricted_to_geometry(&self, luma_width: usize, luma_height: usize) -> PoolSpec {
        let keys = self
            .keys
            .iter()
            .copied()
            .filter(|key| {
                let (mut w, mut h) = match key.channel {
                    Channel::Y => (luma_width, luma_height),
                    _ => (luma_width / 2, luma_height / 2),
                };
                if key.name == FeatureName::Cf || key.name == FeatureName::DeltaCf {
                    w = luma_width / 2;
                    h = luma_height / 2;
                }
                if w.min(h) < 16 {
                    return false;
                }
                if key.name == FeatureName::MsSsim {
                    let at_scale = w.min(h) >> (key.scale - 1);
                    return at_scale >= 32;
                }
                true
            })
            .collect();
        PoolSpec {
            version: format!("{}-r{}x{}", self.version, luma_width, luma_height),
            keys,
        }
    }

    /// Render as the versioned pool file format: a header line followed by
    /// one key per line.
    pub fn render(&self) -> String {
        let mut out = format!("# vqfuse feature pool {}\n", self.version);
        for key in &self.keys {
            out.push_str(&key.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut version = None;
        let mut keys = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if version.is_none() {
                    let rest = rest.trim();
                    version = rest
                        .strip_prefix("vqfuse feature pool")
                        .map(|v| v.trim().to_string());
                }
                continue;
            }
            keys.push(line.parse::<FeatureKey>()?);
        }
        let version = version.ok_or_else(|| {
            Error::MalformedInput(
                "pool file missing `# vqfuse feature pool <version>` header".into(),
            )
        })?;
        Self::from_keys(version, keys)
    }
}

/// Named per-frame feature values in pool order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub frame_index: usize,
    entries: Vec<(FeatureKey, f64)>,
}

impl FeatureVector {
    pub fn new(frame_index: usize) -> Self {
        Self {
            frame_index,
            entries: Vec::new(),
        }
    }

    /// Append a value; rejects non-finite values and duplicate keys.
    pub fn push(&mut self, key: FeatureKey, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFiniteFeature(key));
        }
        if self.get(key).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate feature `{key}` in vector"
            )));
        }
        self.entries.push((key, value));
        Ok(())
    }

    pub fn get(&self, key: FeatureKey) -> Option<f64> {
        self.entries
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureKey, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn keys(&self) -> impl Iterator<Item = FeatureKey> + '_ {
        self.entries.iter().map(|(k, _)| *k)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Mean of per-frame vectors; every frame must carry the same key list.
/// This is the frame-to-sequence aggregation rule for every feature.
pub fn aggregate_mean(frames: &[FeatureVector]) -> Result<FeatureVector> {
    let first = frames
        .first()
        .ok_or_else(|| Error::InvalidInput("cannot aggregate an empty frame list".into()))?;
    let keys: Vec<FeatureKey> = first.keys().collect();
    let mut sums = vec![0.0; keys.len()];
    for frame in frames {
        if frame.len() != keys.len() {
            return Err(Error::InvalidInput(
                "inconsistent feature keys across frames".into(),
            ));
        }
        for (i, key) in keys.iter().enumerate() {
            let v = frame.get(*key).ok_or(Error::MissingFeature(*key))?;
            sums[i] += v;
        }
    }
    let mut out = FeatureVector::new(0);
    for (key, sum) in keys.iter().zip(sums) {
        out.push(*key, sum / frames.len() as f64)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_pool_has_165_entries() {
        let pool = PoolSpec::full();
        assert_eq!(pool.len(), 165);
        // no duplicates
        let set: BTreeSet<_> = pool.keys().iter().collect();
        assert_eq!(set.len(), 165);
    }

    #[test]
    fn pool_contains_the_published_selections() {
        let pool = PoolSpec::full();
        for text in [
            "E-ADM",
            "TI-Y-S3",
            "VIF-Y-S1",
            "VIF-Y-S2",
            "VIF-Y-S3",
            "VIF-Y-S4",
            "ED-Y-S4",
            "BL-Y-S2",
            "VIF-Cb-S1",
            "ΔTI-Cb-S4",
            "PSNR-Y-S4",
            "ΔSI-Cr-S1",
        ] {
            let key: FeatureKey = text.parse().unwrap();
            assert!(pool.contains(key), "pool missing {text}");
        }
    }

    #[test]
    fn key_rendering_round_trips() {
        let pool = PoolSpec::full();
        for key in pool.keys() {
            let text = key.to_string();
            let back: FeatureKey = text.parse().unwrap();
            assert_eq!(*key, back, "round trip failed for {text}");
        }
    }

    #[test]
    fn ascii_delta_alias_accepted() {
        let a: FeatureKey = "ΔTI-Cb-S4".parse().unwrap();
        let b: FeatureKey = "dTI-Cb-S4".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "ΔTI-Cb-S4");
    }

    #[test]
    fn pool_file_round_trips() {
        let pool = PoolSpec::full();
        let text = pool.render();
        let parsed = PoolSpec::parse(&text).unwrap();
        assert_eq!(parsed, pool);
    }

    #[test]
    fn enumeration_order_is_stable() {
        let a = PoolSpec::full();
        let b = PoolSpec::full();
        assert_eq!(a.keys(), b.keys());
        assert_eq!(a.keys()[0], FeatureKey::eadm());
    }

    #[test]
    fn core_six() {
        let six = PoolSpec::core_six();
        assert_eq!(six.len(), 6);
        assert_eq!(six[0], FeatureKey::eadm());
    }

    #[test]
    fn geometry_restriction_drops_small_multiscale() {
        let pool = PoolSpec::full().restricted_to_geometry(96, 96);
        // chroma plane is 48x48: multiscale keys beyond scale 1 are gone
        assert!(pool.contains("MS-SSIM-Cb-S1".parse().unwrap()));
        assert!(!pool.contains("MS-SSIM-Cb-S2".parse().unwrap()));
        // luma 96: scales 1 (96) and 2 (48) survive, 3 (24) does not
        assert!(pool.contains("MS-SSIM-Y-S2".parse().unwrap()));
        assert!(!pool.contains("MS-SSIM-Y-S3".parse().unwrap()));
        assert!(pool.contains("PSNR-Cb-S4".parse().unwrap()));
    }

    #[test]
    fn vector_rejects_non_finite() {
        let mut v = FeatureVector::new(0);
        let key = FeatureKey::eadm();
        assert!(matches!(
            v.push(key, f64::NAN),
            Err(Error::NonFiniteFeature(_))
        ));
    }

    #[test]
    fn aggregate_is_columnwise_mean() {
        let key = FeatureKey::new(FeatureName::Psnr, Channel::Y, 1);
        let mut a = FeatureVector::new(0);
        a.push(key, 10.0).unwrap();
        let mut b = FeatureVector::new(1);
        b.push(key, 20.0).unwrap();
        let mean = aggregate_mean(&[a, b]).unwrap();
        assert_eq!(mean.get(key), Some(15.0));
    }
}
