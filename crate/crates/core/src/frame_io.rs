//! Frame persistence and sequence discovery.
//!
//! Binary PPM (`P6`, maxval 255) is the reference format and is bit-exact:
//! channels are read as `byte / 255` and written as `round(channel · 255)`.
//! 8-bit RGB/RGBA PNG is also accepted.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use regex::Regex;

use crate::detector::FlickerMap;
use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};
use crate::report::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "ppm" => Some(ImageFormat::Ppm),
            "png" => Some(ImageFormat::Png),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Ppm => "ppm",
            ImageFormat::Png => "png",
        }
    }
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl HeaderCursor<'_> {
    fn error(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Format {
            path: self.path.to_path_buf(),
            offset: offset as u64,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments; at least one separator is required.
    fn skip_separator(&mut self) -> Result<()> {
        let start = self.pos;
        loop {
            match self.data.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(&b) = self.data.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' || b == b'\r' {
                            break;
                        }
                    }
                }
                Some(_) if self.pos > start => return Ok(()),
                Some(&b) => {
                    return Err(self.error(
                        self.pos,
                        format!("expected whitespace, found byte 0x{b:02x}"),
                    ))
                }
                None => return Err(self.error(self.pos, "unexpected end of header")),
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.data.get(start) {
                Some(&b) => self.error(start, format!("expected {what}, found byte 0x{b:02x}")),
                None => self.error(
                    start,
                    format!("unexpected end of header while reading {what}"),
                ),
            });
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error(start, format!("{what} is out of range")))
    }
}

/// Decodes a binary `P6` image with maxval 255.
pub fn decode_ppm(data: &[u8], path: &Path) -> Result<Frame> {
    let mut cur = HeaderCursor { data, pos: 0, path };
    if data.len() < 2 || &data[..2] != b"P6" {
        return Err(cur.error(0, "missing P6 magic number"));
    }
    cur.pos = 2;
    cur.skip_separator()?;
    let width_at = cur.pos;
    let width = cur.number("width")?;
    cur.skip_separator()?;
    let height_at = cur.pos;
    let height = cur.number("height")?;
    cur.skip_separator()?;
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 {
        return Err(cur.error(width_at, "width is zero"));
    }
    if height == 0 {
        return Err(cur.error(height_at, "height is zero"));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval {
            path: path.to_path_buf(),
            offset: maxval_at as u64,
            maxval,
        });
    }
    // exactly one whitespace byte separates the header from the raster
    match data.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        Some(&b) => {
            return Err(cur.error(
                cur.pos,
                format!("expected whitespace after maxval, found byte 0x{b:02x}"),
            ))
        }
        None => return Err(cur.error(cur.pos, "unexpected end of header")),
    }
    let width = usize::try_from(width).map_err(|_| cur.error(width_at, "width too large"))?;
    let height = usize::try_from(height).map_err(|_| cur.error(height_at, "height too large"))?;
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| cur.error(width_at, "image dimensions overflow"))?;
    let raster = &data[cur.pos..];
    if raster.len() < expected {
        return Err(cur.error(
            data.len(),
            format!(
                "truncated raster: {} of {expected} bytes present",
                raster.len()
            ),
        ));
    }
    if raster.len() > expected {
        return Err(cur.error(
            cur.pos + expected,
            format!("{} trailing bytes after raster", raster.len() - expected),
        ));
    }
    Frame::from_rgb8(width, height, raster)
}

pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend(frame.to_rgb8());
    out
}

fn decode_png(data: &[u8], path: &Path) -> Result<Frame> {
    let unsupported = |message: String| Error::UnsupportedImage {
        path: path.to_path_buf(),
        message,
    };
    let format_err = |e: png::DecodingError| Error::Format {
        path: path.to_path_buf(),
        offset: 0,
        message: e.to_string(),
    };
    let decoder = png::Decoder::new(std::io::Cursor::new(data));
    let mut reader = decoder.read_info().map_err(format_err)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| unsupported("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(format_err)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(unsupported(format!(
            "{:?} bit depth (8-bit required)",
            info.bit_depth
        )));
    }
    let bytes = &buf[..info.buffer_size()];
    let (w, h) = (info.width as usize, info.height as usize);
    let rgb: Vec<u8> = match info.color_type {
        png::ColorType::Rgb => bytes.to_vec(),
        png::ColorType::Rgba => bytes
            .chunks_exact(4)
            .flat_map(|p| [p[0], p[1], p[2]])
            .collect(),
        other => {
            return Err(unsupported(format!(
                "{other:?} color type (RGB or RGBA required)"
            )))
        }
    };
    Frame::from_rgb8(w, h, &rgb)
}

fn encode_png(frame: &Frame, w: &mut dyn Write) -> std::io::Result<()> {
    let mut enc = png::Encoder::new(w, frame.width() as u32, frame.height() as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header().map_err(std::io::Error::other)?;
    writer
        .write_image_data(&frame.to_rgb8())
        .map_err(std::io::Error::other)?;
    writer.finish().map_err(std::io::Error::other)
}

fn format_for(path: &Path) -> Result<ImageFormat> {
    ImageFormat::from_path(path).ok_or_else(|| Error::UnsupportedImage {
        path: path.to_path_buf(),
        message: "unknown extension (expected .ppm or .png)".into(),
    })
}

pub fn read_frame(path: &Path) -> Result<Frame> {
    let format = format_for(path)?;
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    match format {
        ImageFormat::Ppm => decode_ppm(&data, path),
        ImageFormat::Png => decode_png(&data, path),
    }
}

/// Writes by extension; the file appears only once fully written.
pub fn write_frame(frame: &Frame, path: &Path) -> Result<()> {
    match format_for(path)? {
        ImageFormat::Ppm => {
            let bytes = encode_ppm(frame);
            write_atomic(path, |w| w.write_all(&bytes))
        }
        ImageFormat::Png => write_atomic(path, |w| encode_png(frame, w)),
    }
}

/// Writes a flicker map as a binary PBM (`P4`); flagged pixels are black (1).
pub fn write_mask(map: &FlickerMap, path: &Path) -> Result<()> {
    let mut bytes = format!("P4\n{} {}\n", map.width, map.height).into_bytes();
    for row in map.flags.chunks(map.width.max(1)) {
        for byte in row.chunks(8) {
            let packed = byte
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &f)| acc | (u8::from(f) << (7 - i)));
            bytes.push(packed);
        }
    }
    write_atomic(path, |w| w.write_all(&bytes))
}

/// Where to find a numbered frame sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceLocator {
    /// Every `<prefix><digits>.ppm|png` file in a directory (one prefix only).
    Directory(PathBuf),
    /// A file pattern whose name holds `%d`, `%0Nd` or `{}` for the index.
    Pattern(PathBuf),
}

impl SequenceLocator {
    pub fn parse(spec: &str) -> Self {
        let path = PathBuf::from(spec);
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.contains("{}") || name.contains('%') {
            SequenceLocator::Pattern(path)
        } else {
            SequenceLocator::Directory(path)
        }
    }

    fn describe(&self) -> String {
        match self {
            SequenceLocator::Directory(p) | SequenceLocator::Pattern(p) => p.display().to_string(),
        }
    }
}

fn pattern_regex(name: &str) -> Result<Regex> {
    let placeholder = Regex::new(r"\{\}|%0?\d*d").expect("static regex");
    let mut found = 0;
    let mut out = String::from("^");
    let mut last = 0;
    for m in placeholder.find_iter(name) {
        out.push_str(&regex::escape(&name[last..m.start()]));
        let token = m.as_str();
        let width = token.trim_start_matches('%').trim_end_matches('d');
        if token != "{}" && width.starts_with('0') && width.len() > 1 {
            let n: usize = width[1..]
                .parse()
                .map_err(|_| Error::invalid("sequence pattern", name.to_string()))?;
            out.push_str(&format!(r"(\d{{{n},}})"));
        } else {
            out.push_str(r"(\d+)");
        }
        last = m.end();
        found += 1;
    }
    if found != 1 {
        return Err(Error::invalid(
            "sequence pattern",
            format!("{name:?} must contain exactly one index placeholder"),
        ));
    }
    out.push_str(&regex::escape(&name[last..]));
    out.push('$');
    Ok(Regex::new(&out).expect("escaped pattern is valid"))
}

/// Lists matching files sorted by numeric index, enforcing contiguity.
pub fn discover_sequence(loc: &SequenceLocator) -> Result<Vec<(u64, PathBuf)>> {
    let (dir, re) = match loc {
        SequenceLocator::Directory(dir) => (
            dir.clone(),
            Regex::new(r"^(.*?)(\d+)\.((?i:ppm|png))$").expect("static regex"),
        ),
        SequenceLocator::Pattern(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let name = p
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| Error::invalid("sequence pattern", p.display().to_string()))?;
            (dir, pattern_regex(name)?)
        }
    };
    let entries = fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut found: Vec<(String, u64, PathBuf)> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(&dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(caps) = re.captures(name) else {
            continue;
        };
        if !entry.path().is_file() {
            continue;
        }
        let (prefix, digits) = match loc {
            SequenceLocator::Directory(_) => {
                let ext = caps[3].to_ascii_lowercase();
                (format!("{}*.{ext}", &caps[1]), &caps[2])
            }
            SequenceLocator::Pattern(_) => (String::new(), caps.get(1).map_or("", |m| m.as_str())),
        };
        let index = digits
            .parse::<u64>()
            .map_err(|_| Error::invalid("frame index", format!("{name}: index out of range")))?;
        found.push((prefix, index, entry.path()));
    }
    if found.is_empty() {
        return Err(Error::NotFound(loc.describe()));
    }
    let first_group = found[0].0.clone();
    if let Some(other) = found.iter().find(|f| f.0 != first_group) {
        return Err(Error::invalid(
            "sequence directory",
            format!(
                "{} holds more than one numbered series ({first_group} and {}); use a pattern",
                dir.display(),
                other.0
            ),
        ));
    }
    let mut files: Vec<(u64, PathBuf)> = found.into_iter().map(|(_, i, p)| (i, p)).collect();
    files.sort();
    for w in files.windows(2) {
        let (prev, (idx, path)) = (w[0].0, &w[1]);
        if *idx == prev {
            return Err(Error::DuplicateIndex {
                path: path.clone(),
                index: *idx,
            });
        }
        if *idx != prev + 1 {
            return Err(Error::SequenceGap {
                path: path.clone(),
                previous: prev,
                found: *idx,
            });
        }
    }
    Ok(files)
}

pub fn load_sequence(loc: &SequenceLocator) -> Result<FrameSequence> {
    let files = discover_sequence(loc)?;
    let mut frames: Vec<Frame> = Vec::with_capacity(files.len());
    for (_, path) in &files {
        let frame = read_frame(path)?;
        if let Some(first) = frames.first() {
            if !first.same_size(&frame) {
                return Err(Error::SequenceDimension {
                    path: path.clone(),
                    width: frame.width(),
                    height: frame.height(),
                    expected_width: first.width(),
                    expected_height: first.height(),
                });
            }
        }
        frames.push(frame);
    }
    FrameSequence::new(frames)
}

/// Digits used for zero-padded indices of an `n`-frame sequence.
pub fn index_width(n: usize) -> usize {
    n.saturating_sub(1).to_string().len().max(4)
}

/// Writes `dir/<prefix><index>.<ext>` for every frame; returns the paths.
pub fn write_sequence(
    seq: &FrameSequence,
    dir: &Path,
    prefix: &str,
    format: ImageFormat,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let width = index_width(seq.len());
    seq.frames()
        .iter()
        .enumerate()
        .map(|(i, frame)| {
            let path = dir.join(format!("{prefix}{i:0width$}.{}", format.extension()));
            write_frame(frame, &path)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::palette::{PaletteColor, Rgb};

    fn p(s: &str) -> &Path {
        Path::new(s)
    }

    #[test]
    fn decodes_minimal_header() {
        let mut data = b"P6\n2 1\n255\n".to_vec();
        data.extend([255, 0, 0, 0, 0, 255]);
        let f = decode_ppm(&data, p("t.ppm")).unwrap();
        assert_eq!((f.width(), f.height()), (2, 1));
        assert_eq!(
            f.pixels(),
            &[PaletteColor::Red.code(), PaletteColor::Blue.code()]
        );
        assert_eq!(encode_ppm(&f), data);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut data = b"P6 # made by hand\n1\t1 # size\n255\r".to_vec();
        data.extend([1, 2, 3]);
        let f = decode_ppm(&data, p("t.ppm")).unwrap();
        assert_eq!(f.pixels()[0], Rgb::from_u8([1, 2, 3]));
    }

    #[test]
    fn errors_name_offsets() {
        let path = p("bad.ppm");
        let offset = |data: &[u8]| match decode_ppm(data, path) {
            Err(Error::Format { offset, .. }) => offset,
            other => panic!("expected format error, got {other:?}"),
        };
        assert_eq!(offset(b"P3\n1 1\n255\n"), 0);
        assert_eq!(offset(b"P6\nx 1\n255\n"), 3);
        assert_eq!(offset(b"P6\n2 1\n255\n\x00\x00\x00"), 14);
        assert_eq!(offset(b"P6\n1 1\n255\n\x00\x00\x00\x00"), 14);
        assert_eq!(offset(b"P6\n1 1\n255"), 10);
        assert_eq!(offset(b"P6\n0 1\n255\n"), 3);
        assert!(matches!(
            decode_ppm(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00", path),
            Err(Error::UnsupportedMaxval {
                offset: 7,
                maxval: 65535,
                ..
            })
        ));
    }

    #[test]
    fn locator_kinds() {
        assert!(matches!(
            SequenceLocator::parse("frames/"),
            SequenceLocator::Directory(_)
        ));
        assert!(matches!(
            SequenceLocator::parse("frames/f_%04d.ppm"),
            SequenceLocator::Pattern(_)
        ));
        assert!(matches!(
            SequenceLocator::parse("frames/f{}.png"),
            SequenceLocator::Pattern(_)
        ));
    }

    #[test]
    fn pattern_translation() {
        let re = pattern_regex("f_%04d.ppm").unwrap();
        assert!(re.is_match("f_0012.ppm"));
        assert!(!re.is_match("f_12.ppm"));
        assert!(pattern_regex("a{}.ppm").unwrap().is_match("a7.ppm"));
        assert!(pattern_regex("a%d.ppm").unwrap().is_match("a123.ppm"));
        assert!(pattern_regex("a.ppm").is_err());
        assert!(pattern_regex("a{}_{}.ppm").is_err());
    }

    #[test]
    fn index_width_grows() {
        assert_eq!(index_width(1), 4);
        assert_eq!(index_width(10_000), 4);
        assert_eq!(index_width(10_001), 5);
    }
}
