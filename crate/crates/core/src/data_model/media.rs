//! Raw binary clip containers.
//!
//! Layout: 4-byte magic, four little-endian `u32` dims `(T, H, W, C)`, then a
//! row-major payload (`u8` intensities for video, little-endian `f32`
//! displacements for flow). No compression, no codec.

use std::path::Path;

use super::access;
use crate::error::{Error, Result};

pub const VIDEO_MAGIC: &[u8; 4] = b"M3VD";
pub const FLOW_MAGIC: &[u8; 4] = b"M3FL";
const HEADER_LEN: usize = 4 + 4 * 4;
const MIN_SIDE: usize = 8;

/// `T×H×W×3` RGB clip, row-major with channels innermost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoClip {
    frames: usize,
    height: usize,
    width: usize,
    data: Vec<u8>,
}

impl VideoClip {
    pub fn new(frames: usize, height: usize, width: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(frames, height, width).map_err(Error::invalid)?;
        if data.len() != frames * height * width * 3 {
            return Err(Error::invalid(format!(
                "video payload has {} bytes, expected {}",
                data.len(),
                frames * height * width * 3
            )));
        }
        Ok(Self { frames, height, width, data })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn width(&self) -> usize {
        self.width
    }
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn frame(&self, t: usize) -> &[u8] {
        let len = self.height * self.width * 3;
        &self.data[t * len..(t + 1) * len]
    }

    /// Luma (`0.299R + 0.587G + 0.114B`) of frame `t`, row-major.
    pub fn frame_luma(&self, t: usize) -> Vec<f64> {
        self.frame(t).chunks_exact(3).map(luma).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len());
        out.extend_from_slice(VIDEO_MAGIC);
        for d in [self.frames, self.height, self.width, 3] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_bytes(bytes: &[u8], origin: &Path) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != VIDEO_MAGIC {
            return Err(Error::NotVideoFile(origin.to_path_buf()));
        }
        let (t, h, w, c) = read_dims(bytes, origin)?;
        if c != 3 {
            return Err(corrupt(origin, "video channel count must be 3"));
        }
        check_dims(t, h, w).map_err(|m| corrupt(origin, &m))?;
        let expected = t * h * w * 3;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != expected {
            return Err(corrupt(origin, &format!("payload has {} bytes, expected {expected}", payload.len())));
        }
        Ok(Self { frames: t, height: h, width: w, data: payload.to_vec() })
    }
}

#[inline]
pub(crate) fn luma(px: &[u8]) -> f64 {
    0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64
}

/// `T×H×W×2` optical flow `(dx, dy)` in pixels/frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowClip {
    frames: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl FlowClip {
    pub fn new(frames: usize, height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(frames, height, width).map_err(Error::invalid)?;
        if data.len() != frames * height * width * 2 {
            return Err(Error::invalid(format!(
                "flow payload has {} values, expected {}",
                data.len(),
                frames * height * width * 2
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("flow values must be finite"));
        }
        Ok(Self { frames, height, width, data })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn width(&self) -> usize {
        self.width
    }
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Iterator over `(dx, dy)` for every pixel of every frame.
    pub fn vectors(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.data.chunks_exact(2).map(|v| (v[0] as f64, v[1] as f64))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 4);
        out.extend_from_slice(FLOW_MAGIC);
        for d in [self.frames, self.height, self.width, 2] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], origin: &Path) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != FLOW_MAGIC {
            return Err(Error::NotFlowFile(origin.to_path_buf()));
        }
        let (t, h, w, c) = read_dims(bytes, origin)?;
        if c != 2 {
            return Err(corrupt(origin, "flow channel count must be 2"));
        }
        check_dims(t, h, w).map_err(|m| corrupt(origin, &m))?;
        let expected = t * h * w * 2;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != expected * 4 {
            return Err(corrupt(origin, &format!("payload has {} bytes, expected {}", payload.len(), expected * 4)));
        }
        let data: Vec<f32> = payload.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(corrupt(origin, "non-finite flow value"));
        }
        Ok(Self { frames: t, height: h, width: w, data })
    }
}

fn check_dims(t: usize, h: usize, w: usize) -> std::result::Result<(), String> {
    if t < 1 {
        return Err("clip must have at least one frame".into());
    }
    if h < MIN_SIDE || w < MIN_SIDE {
        return Err(format!("frame {h}x{w} is smaller than {MIN_SIDE}x{MIN_SIDE}"));
    }
    Ok(())
}

fn read_dims(bytes: &[u8], origin: &Path) -> Result<(usize, usize, usize, usize)> {
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(origin, "truncated header"));
    }
    let d = |i: usize| {
        let o = 4 + 4 * i;
        u32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as usize
    };
    Ok((d(0), d(1), d(2), d(3)))
}

fn corrupt(origin: &Path, msg: &str) -> Error {
    Error::CorruptFile(format!("{}: {msg}", origin.display()))
}

pub fn read_video_file(path: &Path) -> Result<VideoClip> {
    VideoClip::from_bytes(&access::read_bytes(path)?, path)
}

pub fn write_video_file(clip: &VideoClip, path: &Path) -> Result<()> {
    access::write_bytes(path, &clip.to_bytes())
}

pub fn read_flow_file(path: &Path) -> Result<FlowClip> {
    FlowClip::from_bytes(&access::read_bytes(path)?, path)
}

pub fn write_flow_file(clip: &FlowClip, path: &Path) -> Result<()> {
    access::write_bytes(path, &clip.to_bytes())
}
