//! Minimal PBM/PGM readers (P1, P2, P4, P5) for bitmap ingestion.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major, one byte per pixel, 255 = foreground ink.
    pub pixels: Vec<u8>,
}

/// Tokens of the ASCII header: whitespace separated, `#` starts a comment.
fn tokens(data: &[u8]) -> impl Iterator<Item = (usize, &[u8])> + '_ {
    let mut pos = 0;
    core::iter::from_fn(move || {
        while pos < data.len() {
            if data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
            } else if data[pos].is_ascii_whitespace() {
                pos += 1;
            } else {
                break;
            }
        }
        if pos >= data.len() {
            return None;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() && data[pos] != b'#' {
            pos += 1;
        }
        Some((pos, &data[start..pos]))
    })
}

fn ascii_int(tok: &[u8]) -> Result<usize> {
    let s = core::str::from_utf8(tok).context("non-ascii header token")?;
    s.parse().with_context(|| format!("bad integer {s:?}"))
}

pub fn read_image(path: &Path) -> Result<Image> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut toks = tokens(&data);
    let (_, magic) = toks.next().context("empty image file")?;
    match magic {
        b"P1" => {
            let (_, w) = toks.next().context("missing width")?;
            let (_, h) = toks.next().context("missing height")?;
            let (width, height) = (ascii_int(w)?, ascii_int(h)?);
            let mut pixels = Vec::with_capacity(width * height);
            // P1 allows digits to run together; read digit by digit.
            for (_, tok) in toks {
                for &c in tok {
                    match c {
                        b'0' => pixels.push(0),
                        b'1' => pixels.push(255),
                        _ => bail!("bad P1 digit {:?}", c as char),
                    }
                }
            }
            if pixels.len() < width * height {
                bail!("truncated P1 data");
            }
            pixels.truncate(width * height);
            Ok(Image { width, height, pixels })
        }
        b"P2" => {
            let (_, w) = toks.next().context("missing width")?;
            let (_, h) = toks.next().context("missing height")?;
            let (_, m) = toks.next().context("missing maxval")?;
            let (width, height, maxval) = (ascii_int(w)?, ascii_int(h)?, ascii_int(m)?);
            if maxval == 0 || maxval > 255 {
                bail!("unsupported maxval {maxval}");
            }
            let mut pixels = Vec::with_capacity(width * height);
            for (_, tok) in toks.by_ref() {
                pixels.push((ascii_int(tok)? * 255 / maxval) as u8);
                if pixels.len() == width * height {
                    break;
                }
            }
            if pixels.len() < width * height {
                bail!("truncated P2 data");
            }
            Ok(Image { width, height, pixels })
        }
        b"P4" => {
            let (_, w) = toks.next().context("missing width")?;
            let (end, h) = toks.next().context("missing height")?;
            let (width, height) = (ascii_int(w)?, ascii_int(h)?);
            let raster = &data[end + 1..];
            let row_bytes = width.div_ceil(8);
            if raster.len() < row_bytes * height {
                bail!("truncated P4 data");
            }
            let mut pixels = Vec::with_capacity(width * height);
            for row in 0..height {
                for col in 0..width {
                    let byte = raster[row * row_bytes + col / 8];
                    let bit = byte >> (7 - col % 8) & 1;
                    pixels.push(if bit == 1 { 255 } else { 0 });
                }
            }
            Ok(Image { width, height, pixels })
        }
        b"P5" => {
            let (_, w) = toks.next().context("missing width")?;
            let (_, h) = toks.next().context("missing height")?;
            let (end, m) = toks.next().context("missing maxval")?;
            let (width, height, maxval) = (ascii_int(w)?, ascii_int(h)?, ascii_int(m)?);
            if maxval == 0 || maxval > 255 {
                bail!("unsupported maxval {maxval}");
            }
            let raster = &data[end + 1..];
            if raster.len() < width * height {
                bail!("truncated P5 data");
            }
            let pixels =
                raster[..width * height].iter().map(|&p| (p as usize * 255 / maxval) as u8).collect();
            Ok(Image { width, height, pixels })
        }
        other => bail!("unsupported magic {:?}", String::from_utf8_lossy(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn load(bytes: &[u8]) -> Image {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(bytes).unwrap();
        read_image(f.path()).unwrap()
    }

    #[test]
    fn reads_ascii_pbm() {
        let img = load(b"P1\n# comment\n3 2\n1 0 1\n0 1 0\n");
        assert_eq!((img.width, img.height), (3, 2));
        assert_eq!(img.pixels, vec![255, 0, 255, 0, 255, 0]);
    }

    #[test]
    fn reads_binary_pgm() {
        let img = load(b"P5\n2 2\n255\n\x00\x80\xff\x01");
        assert_eq!(img.pixels, vec![0, 128, 255, 1]);
    }

    #[test]
    fn reads_binary_pbm_with_padding() {
        // Width 9 forces two raster bytes per row.
        let mut bytes = b"P4\n9 1\n".to_vec();
        bytes.extend_from_slice(&[0b10000000, 0b10000000]);
        let img = load(&bytes);
        assert_eq!(img.pixels[0], 255);
        assert_eq!(img.pixels[8], 255);
        assert!(img.pixels[1..8].iter().all(|&p| p == 0));
    }
}
