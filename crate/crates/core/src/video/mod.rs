//! Deterministic ingestion of raw planar video and pairing of test frames
//! with their reference counterparts.
//!
//! Supported containers: headerless planar YUV 4:2:0 (8-bit, or 10-bit
//! little-endian) and Y4M. Geometry always comes from the caller's
//! [`VideoSpec`]; a conflicting Y4M header is reported as a warning on the
//! handle and the declared spec wins.

use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChromaFormat {
    #[serde(rename = "420")]
    C420,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VideoSpec {
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    pub bit_depth: u8,
    pub chroma: ChromaFormat,
    pub frame_count: usize,
}

impl VideoSpec {
    pub fn new(width: usize, height: usize, fps: f64, bit_depth: u8, frame_count: usize) -> Self {
        Self {
            width,
            height,
            fps,
            bit_depth,
            chroma: ChromaFormat::C420,
            frame_count,
        }
    }

    /// Geometry sanity for stored media. Source (reference) material is
    /// additionally required to be at least 64 px per side by
    /// `validate_source`; re-sampled test storage may be smaller.
    pub fn validate(&self) -> Result<()> {
        if !self.width.is_multiple_of(2) || !self.height.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "frame geometry must be even, got {}x{}",
                self.width, self.height
            )));
        }
        if self.width < 16 || self.height < 16 {
            return Err(Error::Config(format!(
                "frame geometry too small: {}x{}",
                self.width, self.height
            )));
        }
        if self.bit_depth != 8 && self.bit_depth != 10 {
            return Err(Error::Config(format!(
                "bit depth must be 8 or 10, got {}",
                self.bit_depth
            )));
        }
        if self.frame_count < 2 {
            return Err(Error::Config(
                "sequences need at least 2 frames (temporal features use the previous frame)"
                    .into(),
            ));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::Config(format!("invalid fps {}", self.fps)));
        }
        Ok(())
    }

    pub fn validate_source(&self) -> Result<()> {
        self.validate()?;
        if self.width < 64 || self.height < 64 {
            return Err(Error::Config(format!(
                "source geometry must be at least 64x64, got {}x{}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    /// Samples per frame (luma plus two quarter-size chroma planes).
    pub fn samples_per_frame(&self) -> usize {
        self.width * self.height + 2 * (self.width / 2) * (self.height / 2)
    }

    pub fn bytes_per_sample(&self) -> usize {
        if self.bit_depth > 8 {
            2
        } else {
            1
        }
    }

    pub fn frame_bytes(&self) -> usize {
        self.samples_per_frame() * self.bytes_per_sample()
    }

    fn max_code(&self) -> f64 {
        ((1u32 << self.bit_depth) - 1) as f64
    }
}

/// Co-registered reference/test planes at a given frame index. Planes are
/// normalized intensities in `[0,1]`; chroma is stored at half geometry.
#[derive(Debug, Clone)]
pub struct FramePair {
    pub ref_planes: [Plane; 3],
    pub test_planes: [Plane; 3],
    pub frame_index: usize,
}

impl FramePair {
    pub fn new(
        ref_planes: [Plane; 3],
        test_planes: [Plane; 3],
        frame_index: usize,
    ) -> Result<Self> {
        for i in 0..3 {
            if !ref_planes[i].same_geometry(&test_planes[i]) {
                return Err(Error::Config(format!(
                    "reference/test geometry mismatch on plane {i}: {}x{} vs {}x{}",
                    ref_planes[i].width(),
                    ref_planes[i].height(),
                    test_planes[i].width(),
                    test_planes[i].height()
                )));
            }
        }
        Ok(Self {
            ref_planes,
            test_planes,
            frame_index,
        })
    }
}

#[derive(Debug)]
enum Container {
    Raw,
    Y4m { frame_offsets: Vec<u64> },
}

/// Single-consumer reader for one sequence.
#[derive(Debug)]
pub struct SequenceHandle {
    file: File,
    path: PathBuf,
    spec: VideoSpec,
    container: Container,
    /// Luma geometry frames are upsampled to before use (declared for
    /// re-sampled test content).
    target: Option<(usize, usize)>,
    warnings: Vec<String>,
}

/// Open a raw `.yuv`/`.y4m` sequence. The byte size of raw files must match
/// the spec exactly; Y4M files must contain at least `frame_count` frames.
pub fn open_sequence(path: impl AsRef<Path>, spec: VideoSpec) -> Result<SequenceHandle> {
    spec.validate()?;
    let path = path.as_ref();
    let is_y4m = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("y4m"))
        .unwrap_or(false);
    let mut file = File::open(path)?;
    let mut warnings = Vec::new();
    let container = if is_y4m {
        let offsets = parse_y4m(&mut file, &spec, &mut warnings)?;
        Container::Y4m {
            frame_offsets: offsets,
        }
    } else {
        let actual = file.metadata()?.len();
        let expected = (spec.frame_bytes() * spec.frame_count) as u64;
        if actual != expected {
            return Err(Error::MalformedInput(format!(
                "{}: size mismatch, expected {} bytes ({} frames of {}), found {}",
                path.display(),
                expected,
                spec.frame_count,
                spec.frame_bytes(),
                actual
            )));
        }
        Container::Raw
    };
    Ok(SequenceHandle {
        file,
        path: path.to_path_buf(),
        spec,
        container,
        target: None,
        warnings,
    })
}

fn parse_y4m(file: &mut File, spec: &VideoSpec, warnings: &mut Vec<String>) -> Result<Vec<u64>> {
    let mut header = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        let n = file.read(&mut byte)?;
        if n == 0 {
            return Err(Error::MalformedInput(
                "y4m: unexpected end of file in header".into(),
            ));
        }
        if byte[0] == b'\n' {
            break;
        }
        header.push(byte[0]);
        if header.len() > 512 {
            return Err(Error::MalformedInput("y4m: oversized stream header".into()));
        }
    }
    let header = String::from_utf8_lossy(&header).into_owned();
    if !header.starts_with("YUV4MPEG2") {
        return Err(Error::MalformedInput(
            "y4m: missing YUV4MPEG2 signature".into(),
        ));
    }
    let mut hdr_w = None;
    let mut hdr_h = None;
    for token in header.split_ascii_whitespace().skip(1) {
        match token.as_bytes()[0] {
            b'W' => hdr_w = token[1..].parse::<usize>().ok(),
            b'H' => hdr_h = token[1..].parse::<usize>().ok(),
            b'C' if !token[1..].starts_with("420") => {
                return Err(Error::MalformedInput(format!(
                    "y4m: unsupported chroma format {}",
                    &token[1..]
                )));
            }
            _ => {}
        }
    }
    if let (Some(w), Some(h)) = (hdr_w, hdr_h) {
        if w != spec.width || h != spec.height {
            warnings.push(format!(
                "y4m header geometry {w}x{h} overridden by declared {}x{}",
                spec.width, spec.height
            ));
        }
    }
    // index frame payloads
    let mut offsets = Vec::new();
    let frame_bytes = spec.frame_bytes() as u64;
    loop {
        let mut line = Vec::new();
        loop {
            let n = file.read(&mut byte)?;
            if n == 0 {
                if !line.is_empty() {
                    return Err(Error::MalformedInput("y4m: truncated frame header".into()));
                }
                if offsets.len() < spec.frame_count {
                    return Err(Error::MalformedInput(format!(
                        "y4m: {} frames declared but only {} present",
                        spec.frame_count,
                        offsets.len()
                    )));
                }
                if offsets.len() > spec.frame_count {
                    warnings.push(format!(
                        "y4m: {} frames present, using declared {}",
                        offsets.len(),
                        spec.frame_count
                    ));
                }
                return Ok(offsets);
            }
            if byte[0] == b'\n' {
                break;
            }
            line.push(byte[0]);
            if line.len() > 256 {
                return Err(Error::MalformedInput("y4m: oversized frame header".into()));
            }
        }
        if !line.starts_with(b"FRAME") {
            return Err(Error::MalformedInput("y4m: expected FRAME marker".into()));
        }
        let pos = file.stream_position()?;
        offsets.push(pos);
        file.seek(SeekFrom::Start(pos + frame_bytes))?;
    }
}

impl SequenceHandle {
    /// Declare that frames must be bilinearly upsampled to the given luma
    /// geometry before use (re-sampled test content).
    pub fn with_upsample_to(mut self, width: usize, height: usize) -> Self {
        if width != self.spec.width || height != self.spec.height {
            self.target = Some((width, height));
        }
        self
    }

    pub fn spec(&self) -> &VideoSpec {
        &self.spec
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Luma geometry frames come out at (after any declared upsampling).
    pub fn output_geometry(&self) -> (usize, usize) {
        self.target.unwrap_or((self.spec.width, self.spec.height))
    }

    pub fn frame_count(&self) -> usize {
        self.spec.frame_count
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Read one frame as normalized planes; re-reading the same index is
    /// bit-identical.
    pub fn read_frame(&mut self, index: usize) -> Result<[Plane; 3]> {
        if index >= self.spec.frame_count {
            return Err(Error::OutOfRange {
                index,
                count: self.spec.frame_count,
            });
        }
        let offset = match &self.container {
            Container::Raw => (index * self.spec.frame_bytes()) as u64,
            Container::Y4m { frame_offsets } => frame_offsets[index],
        };
        self.file.seek(SeekFrom::Start(offset))?;
        let mut buf = vec![0u8; self.spec.frame_bytes()];
        self.file.read_exact(&mut buf).map_err(|e| {
            Error::MalformedInput(format!(
                "{}: short read at frame {index}: {e}",
                self.path.display()
            ))
        })?;

        let w = self.spec.width;
        let h = self.spec.height;
        let cw = w / 2;
        let ch = h / 2;
        let max_code = self.spec.max_code();
        let decode = |bytes: &[u8], pw: usize, ph: usize| -> Plane {
            let mut data = Vec::with_capacity(pw * ph);
            if self.spec.bit_depth > 8 {
                for pair in bytes.chunks_exact(2) {
                    let code = u16::from_le_bytes([pair[0], pair[1]]) as f64;
                    data.push(code.min(max_code) / max_code);
                }
            } else {
                for &b in bytes {
                    data.push(b as f64 / max_code);
                }
            }
            Plane::from_vec(pw, ph, data)
        };
        let bps = self.spec.bytes_per_sample();
        let y_len = w * h * bps;
        let c_len = cw * ch * bps;
        let mut planes = [
            decode(&buf[..y_len], w, h),
            decode(&buf[y_len..y_len + c_len], cw, ch),
            decode(&buf[y_len + c_len..y_len + 2 * c_len], cw, ch),
        ];
        if let Some((tw, th)) = self.target {
            planes = [
                planes[0].resize_bilinear(tw, th),
                planes[1].resize_bilinear(tw / 2, th / 2),
                planes[2].resize_bilinear(tw / 2, th / 2),
            ];
        }
        Ok(planes)
    }
}

/// Read a co-registered pair from two handles. Geometries must agree after
/// any declared upsampling of the test content.
pub fn read_frame_pair(
    reference: &mut SequenceHandle,
    test: &mut SequenceHandle,
    index: usize,
) -> Result<FramePair> {
    let count = reference.frame_count().min(test.frame_count());
    if index >= count {
        return Err(Error::OutOfRange { index, count });
    }
    if reference.output_geometry() != test.output_geometry() {
        let (rw, rh) = reference.output_geometry();
        let (tw, th) = test.output_geometry();
        return Err(Error::Config(format!(
            "geometry mismatch with no upsampling rule: reference {rw}x{rh}, test {tw}x{th}"
        )));
    }
    let ref_planes = reference.read_frame(index)?;
    let test_planes = test.read_frame(index)?;
    FramePair::new(ref_planes, test_planes, index)
}

/// Nearest-neighbor chroma upsampling to luma geometry, used when a feature
/// needs chroma aligned to the full-resolution grid.
pub fn chroma_to_luma_geometry(chroma: &Plane, luma_width: usize, luma_height: usize) -> Plane {
    chroma.resize_nearest(luma_width, luma_height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_raw(path: &Path, spec: &VideoSpec, mut sample: impl FnMut(usize, usize) -> u8) {
        let mut bytes = Vec::new();
        for f in 0..spec.frame_count {
            for i in 0..spec.samples_per_frame() {
                bytes.push(sample(f, i));
            }
        }
        let mut file = File::create(path).unwrap();
        file.write_all(&bytes).unwrap();
    }

    #[test]
    fn open_checks_byte_size() {
        let dir = tempfile::tempdir().unwrap();
        let spec = VideoSpec::new(64, 64, 30.0, 8, 5);
        let good = dir.path().join("good.yuv");
        write_raw(&good, &spec, |f, i| ((f * 31 + i) % 251) as u8);
        let handle = open_sequence(&good, spec).unwrap();
        assert_eq!(handle.frame_count(), 5);

        // one byte short
        let bad = dir.path().join("bad.yuv");
        let bytes = std::fs::read(&good).unwrap();
        std::fs::write(&bad, &bytes[..bytes.len() - 1]).unwrap();
        match open_sequence(&bad, spec) {
            Err(Error::MalformedInput(msg)) => {
                assert!(msg.contains("expected"), "{msg}");
            }
            other => panic!("expected malformed-input error, got {other:?}"),
        }
    }

    #[test]
    fn ten_bit_normalization_maps_max_code_to_one() {
        let dir = tempfile::tempdir().unwrap();
        let spec = VideoSpec::new(16, 16, 24.0, 10, 2);
        let path = dir.path().join("ten.yuv");
        let mut bytes = Vec::new();
        for _ in 0..spec.frame_count {
            for _ in 0..spec.samples_per_frame() {
                bytes.extend_from_slice(&1023u16.to_le_bytes());
            }
        }
        std::fs::write(&path, bytes).unwrap();
        let mut handle = open_sequence(&path, spec).unwrap();
        let planes = handle.read_frame(0).unwrap();
        assert!(planes[0].data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn normalization_is_order_preserving() {
        let dir = tempfile::tempdir().unwrap();
        let spec = VideoSpec::new(16, 16, 24.0, 8, 2);
        let path = dir.path().join("ord.yuv");
        write_raw(&path, &spec, |_, i| (i % 256) as u8);
        let mut handle = open_sequence(&path, spec).unwrap();
        let y = &handle.read_frame(0).unwrap()[0];
        for i in 1..255.min(y.data().len()) {
            assert!(y.data()[i] > y.data()[i - 1]);
        }
    }

    #[test]
    fn rereading_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let spec = VideoSpec::new(32, 32, 30.0, 8, 3);
        let path = dir.path().join("re.yuv");
        write_raw(&path, &spec, |f, i| ((f + i * 7) % 256) as u8);
        let mut handle = open_sequence(&path, spec).unwrap();
        let a = handle.read_frame(1).unwrap();
        let b = handle.read_frame(1).unwrap();
        assert_eq!(a[0], b[0]);
        assert_eq!(a[1], b[1]);
        assert_eq!(a[2], b[2]);
    }

    #[test]
    fn identical_files_give_identical_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let spec = VideoSpec::new(32, 32, 30.0, 8, 2);
        let path = dir.path().join("same.yuv");
        write_raw(&path, &spec, |f, i| ((f * 13 + i * 3) % 256) as u8);
        let mut r = open_sequence(&path, spec).unwrap();
        let mut t = open_sequence(&path, spec).unwrap();
        let pair = read_frame_pair(&mut r, &mut t, 0).unwrap();
        assert_eq!(pair.ref_planes[0], pair.test_planes[0]);
    }

    #[test]
    fn index_at_frame_count_is_out_of_range() {
        let dir = tempfile::tempdir().unwrap();
        let spec = VideoSpec::new(16, 16, 30.0, 8, 2);
        let path = dir.path().join("oob.yuv");
        write_raw(&path, &spec, |_, _| 0);
        let mut r = open_sequence(&path, spec).unwrap();
        let mut t = open_sequence(&path, spec).unwrap();
        assert!(matches!(
            read_frame_pair(&mut r, &mut t, 2),
            Err(Error::OutOfRange { index: 2, count: 2 })
        ));
    }

    #[test]
    fn declared_upsampling_matches_direct_oracle() {
        let dir = tempfile::tempdir().unwrap();
        let half = VideoSpec::new(16, 16, 30.0, 8, 2);
        let path = dir.path().join("half.yuv");
        write_raw(&path, &half, |_, i| ((i * 11) % 256) as u8);

        let mut stored = open_sequence(&path, half).unwrap();
        let raw = stored.read_frame(0).unwrap();
        let mut upsampled = open_sequence(&path, half).unwrap().with_upsample_to(32, 32);
        let got = upsampled.read_frame(0).unwrap();
        assert_eq!(got[0].width(), 32);
        assert_eq!(got[1].width(), 16);

        // independent bilinear oracle on the luma plane
        for y in 0..32usize {
            for x in 0..32usize {
                let sx = ((x as f64 + 0.5) * 0.5 - 0.5).clamp(0.0, 15.0);
                let sy = ((y as f64 + 0.5) * 0.5 - 0.5).clamp(0.0, 15.0);
                let x0 = sx.floor() as usize;
                let y0 = sy.floor() as usize;
                let x1 = (x0 + 1).min(15);
                let y1 = (y0 + 1).min(15);
                let fx = sx - x0 as f64;
                let fy = sy - y0 as f64;
                let expect = raw[0].at(x0, y0) * (1.0 - fx) * (1.0 - fy)
                    + raw[0].at(x1, y0) * fx * (1.0 - fy)
                    + raw[0].at(x0, y1) * (1.0 - fx) * fy
                    + raw[0].at(x1, y1) * fx * fy;
                assert!((got[0].at(x, y) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn geometry_mismatch_without_rule_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let big = VideoSpec::new(32, 32, 30.0, 8, 2);
        let small = VideoSpec::new(16, 16, 30.0, 8, 2);
        let big_path = dir.path().join("big.yuv");
        let small_path = dir.path().join("small.yuv");
        write_raw(&big_path, &big, |_, _| 128);
        write_raw(&small_path, &small, |_, _| 128);
        let mut r = open_sequence(&big_path, big).unwrap();
        let mut t = open_sequence(&small_path, small).unwrap();
        assert!(matches!(
            read_frame_pair(&mut r, &mut t, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn y4m_round_trip_with_header_override() {
        let dir = tempfile::tempdir().unwrap();
        let spec = VideoSpec::new(16, 16, 25.0, 8, 2);
        let path = dir.path().join("clip.y4m");
        let mut bytes = Vec::new();
        // header deliberately disagrees on geometry
        bytes.extend_from_slice(b"YUV4MPEG2 W32 H32 F25:1 Ip A1:1 C420jpeg\n");
        for f in 0..2u8 {
            bytes.extend_from_slice(b"FRAME\n");
            for i in 0..spec.samples_per_frame() {
                bytes.push(f.wrapping_mul(100).wrapping_add(i as u8));
            }
        }
        std::fs::write(&path, bytes).unwrap();
        let mut handle = open_sequence(&path, spec).unwrap();
        assert_eq!(handle.warnings().len(), 1);
        let planes = handle.read_frame(1).unwrap();
        assert!((planes[0].at(0, 0) - 100.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_chroma_upsampling_doubles_pixels() {
        let chroma = Plane::from_fn(2, 2, |x, y| (x + 2 * y) as f64);
        let up = chroma_to_luma_geometry(&chroma, 4, 4);
        assert_eq!(up.at(0, 0), 0.0);
        assert_eq!(up.at(1, 1), 0.0);
        assert_eq!(up.at(2, 0), 1.0);
        assert_eq!(up.at(3, 3), 3.0);
    }
}
