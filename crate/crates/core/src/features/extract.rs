//! Per-frame feature extraction.
//!
//! One [`FrameCache`] lives for the duration of a single frame's
//! extraction and lazily shares the expensive intermediates (channel
//! pyramids, optical flow, motion-compensated residual chains, subband
//! sums) across every key that needs them.

use std::cell::OnceCell;

use crate::eadm::compute_eadm;
use crate::error::Result;
use crate::features::{
    colorfulness, compute_bl_ed, compute_psnr, compute_ssim, compute_ti, compute_vif_scale,
    motion_compensated_residual, spatial_information, Channel, FeatureKey, FeatureName,
    FeatureVector, PoolSpec, SsimMode,
};
use crate::plane::Plane;
use crate::transforms::{build_scale_pyramid, lucas_kanade_flow, FlowField};
use crate::video::{chroma_to_luma_geometry, FramePair};

/// Bumped whenever extraction semantics change; cache entries written by a
/// different extractor version are never reused.
pub const EXTRACTOR_VERSION: &str = "v1";

const SCALES: usize = 4;

pub struct FeatureExtractor {
    pool: PoolSpec,
    alpha: f64,
}

impl FeatureExtractor {
    pub fn new(pool: PoolSpec, alpha: f64) -> Self {
        Self { pool, alpha }
    }

    pub fn pool(&self) -> &PoolSpec {
        &self.pool
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Compute every pool key for one frame. `prev` is the preceding frame
    /// pair of the same sequences; temporal features are 0 without it.
    pub fn extract(&self, pair: &FramePair, prev: Option<&FramePair>) -> Result<FeatureVector> {
        let cache = FrameCache::new(pair, prev, self.alpha);
        let mut out = FeatureVector::new(pair.frame_index);
        for &key in self.pool.keys() {
            out.push(key, cache.value(key)?)?;
        }
        Ok(out)
    }
}

const REF: usize = 0;
const TEST: usize = 1;

struct FrameCache<'a> {
    pair: &'a FramePair,
    prev: Option<&'a FramePair>,
    alpha: f64,
    pyramids: [[OnceCell<Vec<Plane>>; 3]; 2],
    prev_pyramids: [[OnceCell<Vec<Plane>>; 3]; 2],
    flows: [OnceCell<Option<FlowField>>; 2],
    residual_pyramids: [[OnceCell<Option<Vec<Plane>>>; 3]; 2],
    bl_ed: [[OnceCell<(f64, f64)>; SCALES]; 3],
    eadm: OnceCell<f64>,
}

fn get_or_try<T>(cell: &OnceCell<T>, init: impl FnOnce() -> Result<T>) -> Result<&T> {
    if cell.get().is_none() {
        let value = init()?;
        let _ = cell.set(value);
    }
    Ok(cell.get().expect("cell initialized above"))
}

impl<'a> FrameCache<'a> {
    fn new(pair: &'a FramePair, prev: Option<&'a FramePair>, alpha: f64) -> Self {
        Self {
            pair,
            prev,
            alpha,
            pyramids: Default::default(),
            prev_pyramids: Default::default(),
            flows: Default::default(),
            residual_pyramids: Default::default(),
            bl_ed: Default::default(),
            eadm: OnceCell::new(),
        }
    }

    fn planes(&self, side: usize) -> &'a [Plane; 3] {
        if side == REF {
            &self.pair.ref_planes
        } else {
            &self.pair.test_planes
        }
    }

    fn prev_planes(&self, side: usize) -> Option<&'a [Plane; 3]> {
        self.prev.map(|p| {
            if side == REF {
                &p.ref_planes
            } else {
                &p.test_planes
            }
        })
    }

    fn pyramid(&self, side: usize, channel: Channel) -> Result<&[Plane]> {
        let cell = &self.pyramids[side][channel.index()];
        get_or_try(cell, || {
            build_scale_pyramid(&self.planes(side)[channel.index()], SCALES)
        })
        .map(|v| v.as_slice())
    }

    fn prev_pyramid(&self, side: usize, channel: Channel) -> Result<Option<&[Plane]>> {
        let Some(planes) = self.prev_planes(side) else {
            return Ok(None);
        };
        let cell = &self.prev_pyramids[side][channel.index()];
        get_or_try(cell, || {
            build_scale_pyramid(&planes[channel.index()], SCALES)
        })
        .map(|v| Some(v.as_slice()))
    }

    /// Flow of this side's luma between the previous and current frame.
    fn flow(&self, side: usize) -> &Option<FlowField> {
        self.flows[side].get_or_init(|| {
            self.prev_planes(side)
                .map(|prev| lucas_kanade_flow(&prev[0], &self.planes(side)[0]))
        })
    }

    /// Scale chain of the motion-compensated residual. Chroma is aligned to
    /// the luma grid (nearest neighbor) so the luma flow applies to it.
    fn residual_pyramid(&self, side: usize, channel: Channel) -> Result<Option<&[Plane]>> {
        let cell = &self.residual_pyramids[side][channel.index()];
        let value = get_or_try(cell, || {
            let Some(prev) = self.prev_planes(side) else {
                return Ok(None);
            };
            let flow = self
                .flow(side)
                .as_ref()
                .expect("flow exists when prev does");
            let curr = self.planes(side);
            let lw = curr[0].width();
            let lh = curr[0].height();
            let residual = if channel == Channel::Y {
                motion_compensated_residual(&prev[0], &curr[0], flow)
            } else {
                let i = channel.index();
                let prev_full = chroma_to_luma_geometry(&prev[i], lw, lh);
                let curr_full = chroma_to_luma_geometry(&curr[i], lw, lh);
                motion_compensated_residual(&prev_full, &curr_full, flow)
            };
            Ok(Some(build_scale_pyramid(&residual, SCALES)?))
        })?;
        Ok(value.as_ref().map(|v| v.as_slice()))
    }

    fn bl_ed(&self, channel: Channel, scale: u8) -> Result<(f64, f64)> {
        let cell = &self.bl_ed[channel.index()][(scale - 1) as usize];
        get_or_try(cell, || {
            let r = &self.pyramid(REF, channel)?[(scale - 1) as usize];
            let t = &self.pyramid(TEST, channel)?[(scale - 1) as usize];
            let out = compute_bl_ed(r, t);
            Ok((out.bl, out.ed))
        })
        .copied()
    }

    fn ti(&self, side: usize, channel: Channel, scale: u8) -> Result<f64> {
        match self.prev_pyramid(side, channel)? {
            None => Ok(0.0), // first frame
            Some(prev) => {
                let curr = self.pyramid(side, channel)?;
                let s = (scale - 1) as usize;
                Ok(compute_ti(&curr[s], &prev[s]))
            }
        }
    }

    fn tp(&self, side: usize, channel: Channel, scale: u8) -> Result<f64> {
        match self.residual_pyramid(side, channel)? {
            None => Ok(0.0),
            Some(pyr) => {
                let level = &pyr[(scale - 1) as usize];
                Ok(level.energy() / level.data().len() as f64)
            }
        }
    }

    fn si(&self, side: usize, channel: Channel, scale: u8) -> Result<f64> {
        Ok(spatial_information(
            &self.pyramid(side, channel)?[(scale - 1) as usize],
        ))
    }

    fn cf(&self, side: usize, scale: u8) -> Result<f64> {
        let s = (scale - 1) as usize;
        let cb = &self.pyramid(side, Channel::Cb)?[s];
        let cr = &self.pyramid(side, Channel::Cr)?[s];
        Ok(colorfulness(cb, cr))
    }

    fn value(&self, key: FeatureKey) -> Result<f64> {
        let s = (key.scale - 1) as usize;
        let ch = key.channel;
        match key.name {
            FeatureName::Psnr => Ok(compute_psnr(
                &self.pyramid(REF, ch)?[s],
                &self.pyramid(TEST, ch)?[s],
            )),
            FeatureName::Ssim => compute_ssim(
                &self.pyramid(REF, ch)?[s],
                &self.pyramid(TEST, ch)?[s],
                SsimMode::Single,
            ),
            FeatureName::MsSsim => compute_ssim(
                &self.pyramid(REF, ch)?[s],
                &self.pyramid(TEST, ch)?[s],
                SsimMode::Multiscale,
            ),
            FeatureName::Vif => Ok(compute_vif_scale(
                &self.pyramid(REF, ch)?[s],
                &self.pyramid(TEST, ch)?[s],
            )),
            FeatureName::Ti => self.ti(REF, ch, key.scale),
            FeatureName::DeltaTi => {
                Ok(self.ti(TEST, ch, key.scale)? - self.ti(REF, ch, key.scale)?)
            }
            FeatureName::Bl => Ok(self.bl_ed(ch, key.scale)?.0),
            FeatureName::Ed => Ok(self.bl_ed(ch, key.scale)?.1),
            FeatureName::Si => self.si(REF, ch, key.scale),
            FeatureName::DeltaSi => {
                Ok(self.si(TEST, ch, key.scale)? - self.si(REF, ch, key.scale)?)
            }
            FeatureName::Tp => self.tp(REF, ch, key.scale),
            FeatureName::DeltaTp => {
                Ok(self.tp(TEST, ch, key.scale)? - self.tp(REF, ch, key.scale)?)
            }
            FeatureName::Luma => Ok(self.pyramid(REF, ch)?[s].mean()),
            FeatureName::Cf => self.cf(REF, key.scale),
            FeatureName::DeltaCf => Ok(self.cf(TEST, key.scale)? - self.cf(REF, key.scale)?),
            FeatureName::Eadm => Ok(*self.eadm.get_or_init(|| {
                let prev_ref = self.prev_planes(REF).map(|p| &p[0]);
                compute_eadm(self.pair, prev_ref, self.alpha)
            })),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn synthetic_pair(w: usize, h: usize, seed: u64, frame_index: usize) -> FramePair {
        let mut rng = Rng::new(seed + frame_index as u64);
        let t = frame_index as f64;
        let y = Plane::from_fn(w, h, |x, y| {
            (0.5 + 0.3 * (((x as f64 + t) / 13.0).sin() * ((y as f64) / 11.0).cos())
                + 0.02 * (rng.next_f64() - 0.5))
                .clamp(0.0, 1.0)
        });
        let cb = Plane::from_fn(w / 2, h / 2, |x, y| {
            0.5 + 0.1 * (((x + y) as f64 + t) / 9.0).sin()
        });
        let cr = Plane::from_fn(w / 2, h / 2, |x, _| {
            0.5 - 0.08 * ((x as f64 - t) / 7.0).cos()
        });
        FramePair::new(
            [y.clone(), cb.clone(), cr.clone()],
            [y, cb, cr],
            frame_index,
        )
        .unwrap()
    }

    fn degraded_pair(base: &FramePair, passes: usize) -> FramePair {
        use crate::synth::blur_plane as blur_passes;
        FramePair::new(
            base.ref_planes.clone(),
            [
                blur_passes(&base.test_planes[0], passes),
                blur_passes(&base.test_planes[1], passes),
                blur_passes(&base.test_planes[2], passes),
            ],
            base.frame_index,
        )
        .unwrap()
    }

    #[test]
    fn full_pool_yields_165_values() {
        let extractor = FeatureExtractor::new(PoolSpec::full(), 0.3);
        let prev = synthetic_pair(512, 512, 7, 0);
        let pair = synthetic_pair(512, 512, 7, 1);
        let vector = extractor.extract(&pair, Some(&prev)).unwrap();
        assert_eq!(vector.len(), 165);
    }

    #[test]
    fn identity_pair_zeroes_differences() {
        let pool = PoolSpec::full().restricted_to_geometry(96, 96);
        let extractor = FeatureExtractor::new(pool, 0.3);
        let prev = synthetic_pair(96, 96, 3, 0);
        let pair = synthetic_pair(96, 96, 3, 1);
        let vector = extractor.extract(&pair, Some(&prev)).unwrap();
        for (key, value) in vector.iter() {
            match key.name {
                FeatureName::DeltaSi
                | FeatureName::DeltaTi
                | FeatureName::DeltaTp
                | FeatureName::DeltaCf
                | FeatureName::Bl
                | FeatureName::Ed => {
                    assert_eq!(value, 0.0, "{key} should be 0 on an identity pair")
                }
                FeatureName::Eadm => assert_eq!(value, 1.0),
                FeatureName::Psnr => assert_eq!(value, 60.0),
                _ => {}
            }
        }
    }

    #[test]
    fn restricted_pool_preserves_selection_order() {
        let keys: Vec<FeatureKey> = [
            "E-ADM",
            "TI-Y-S3",
            "VIF-Cb-S1",
            "ΔTI-Cb-S4",
            "PSNR-Y-S4",
            "ΔSI-Cr-S1",
        ]
        .iter()
        .map(|t| t.parse().unwrap())
        .collect();
        let pool = PoolSpec::from_keys("m2-set", keys.clone()).unwrap();
        let extractor = FeatureExtractor::new(pool, 0.3);
        let prev = synthetic_pair(96, 96, 11, 0);
        let pair = synthetic_pair(96, 96, 11, 1);
        let vector = extractor.extract(&pair, Some(&prev)).unwrap();
        let got: Vec<FeatureKey> = vector.keys().collect();
        assert_eq!(got, keys);
    }

    #[test]
    fn blur_moves_features_in_the_expected_direction() {
        let pool = PoolSpec::from_keys(
            "probe",
            vec![
                "ΔSI-Y-S1".parse().unwrap(),
                "BL-Y-S1".parse().unwrap(),
                "VIF-Y-S1".parse().unwrap(),
            ],
        )
        .unwrap();
        let extractor = FeatureExtractor::new(pool, 0.3);
        let prev = synthetic_pair(96, 96, 5, 0);
        let clean = synthetic_pair(96, 96, 5, 1);
        let blurred = degraded_pair(&clean, 6);
        let v = extractor.extract(&blurred, Some(&prev)).unwrap();
        assert!(v.get("ΔSI-Y-S1".parse().unwrap()).unwrap() < 0.0);
        assert!(v.get("BL-Y-S1".parse().unwrap()).unwrap() > 0.0);
        assert!(v.get("VIF-Y-S1".parse().unwrap()).unwrap() < 1.0);
    }

    #[test]
    fn first_frame_has_zero_temporal_features() {
        let pool = PoolSpec::from_keys(
            "temporal",
            vec![
                "TI-Y-S3".parse().unwrap(),
                "TP-Y-S1".parse().unwrap(),
                "ΔTI-Cb-S4".parse().unwrap(),
            ],
        )
        .unwrap();
        let extractor = FeatureExtractor::new(pool, 0.3);
        let pair = synthetic_pair(96, 96, 9, 0);
        let v = extractor.extract(&pair, None).unwrap();
        for (key, value) in v.iter() {
            assert_eq!(value, 0.0, "{key}");
        }
    }

    #[test]
    fn temporal_flicker_raises_the_ti_delta() {
        // test sequence alternates a brightness offset the reference lacks
        let key: FeatureKey = "ΔTI-Y-S1".parse().unwrap();
        let pool = PoolSpec::from_keys("flicker", vec![key]).unwrap();
        let extractor = FeatureExtractor::new(pool, 0.3);
        let base = synthetic_pair(96, 96, 13, 0);
        let mut curr = synthetic_pair(96, 96, 13, 1);
        let flicker = |planes: &mut [Plane; 3], amount: f64| {
            planes[0] = planes[0].map(|v| (v + amount).clamp(0.0, 1.0));
        };
        let mut prev = base.clone();
        flicker(&mut prev.test_planes, -0.04);
        flicker(&mut curr.test_planes, 0.04);
        let v = extractor.extract(&curr, Some(&prev)).unwrap();
        // oracle: the delta is the flicker the reference does not share
        let delta = v.get(key).unwrap();
        assert!(delta > 0.05, "flicker should raise the temporal delta, got {delta}");
    }
}
