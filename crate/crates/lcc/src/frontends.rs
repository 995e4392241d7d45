//! Converters from external media to scoreable payloads.
//!
//! Every loader records the transform parameters it applied, so a payload
//! is fully determined by the source bytes plus the recorded provenance.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::coding::{infer_precision, SymbolString};
use crate::hierarchy::DataTensor;
use crate::{Error, Result};

/// Default character budget for text inputs.
pub const DEFAULT_TEXT_BUDGET: usize = 7500;

/// What a loaded input contains.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Payload {
    Text(SymbolString),
    Tensor(DataTensor),
    Bits(Vec<u8>),
}

/// A tagged raw input plus the parameters that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalSource {
    pub kind: String,
    pub payload: Payload,
    /// Source path or generator spec plus every transform parameter.
    pub provenance: BTreeMap<String, String>,
}

/// Loads UTF-8 text: NFC-normalised, truncated to `budget` characters,
/// distinct characters enumerated to symbol ids in first-appearance order.
/// Case is preserved.
pub fn load_text(path: &Path, budget: Option<usize>) -> Result<SignalSource> {
    let raw = std::fs::read(path)?;
    let text = String::from_utf8(raw)
        .map_err(|e| Error::Format(format!("{} is not valid UTF-8: {e}", path.display())))?;
    if text.is_empty() {
        return Err(Error::EmptyInput("text file"));
    }
    let source = text_to_symbols(&text, budget);
    let mut provenance = BTreeMap::new();
    provenance.insert("path".into(), path.display().to_string());
    merge_provenance(&mut provenance, &source);
    Ok(SignalSource {
        kind: "text".into(),
        provenance,
        payload: source.payload,
    })
}

/// [`load_text`] on an in-memory string.
pub fn text_to_symbols(text: &str, budget: Option<usize>) -> SignalSource {
    let budget = budget.unwrap_or(DEFAULT_TEXT_BUDGET);
    let chars: Vec<char> = text.nfc().take(budget).collect();
    let symbols = SymbolString::enumerated(&chars);
    let mut provenance = BTreeMap::new();
    provenance.insert("normalization".into(), "NFC".into());
    provenance.insert("char_budget".into(), budget.to_string());
    provenance.insert("chars".into(), chars.len().to_string());
    provenance.insert("alphabet_size".into(), symbols.alphabet_size().to_string());
    SignalSource {
        kind: "text".into(),
        payload: Payload::Text(symbols),
        provenance,
    }
}

fn merge_provenance(into: &mut BTreeMap<String, String>, from: &SignalSource) {
    for (k, v) in &from.provenance {
        into.entry(k.clone()).or_insert_with(|| v.clone());
    }
}

/// Loads a raster image (PNG/PGM/PPM) as an n=2 tensor with channel values
/// in [0,1]; the inferred precision is recorded in the provenance.
pub fn load_image(path: &Path) -> Result<SignalSource> {
    let img = image::open(path)?;
    let (tensor, channels) = match img {
        image::DynamicImage::ImageLuma8(g) => {
            let (w, h) = g.dimensions();
            let data: Vec<f64> = g.pixels().map(|p| p.0[0] as f64 / 255.0).collect();
            (DataTensor::new(vec![h as usize, w as usize], 1, data)?, 1)
        }
        other => {
            let rgb = other.to_rgb8();
            let (w, h) = rgb.dimensions();
            let mut data = Vec::with_capacity((w * h * 3) as usize);
            for p in rgb.pixels() {
                data.extend(p.0.iter().map(|&v| v as f64 / 255.0));
            }
            (DataTensor::new(vec![h as usize, w as usize], 3, data)?, 3)
        }
    };
    let precision = infer_precision(&tensor.data)?;
    let mut provenance = BTreeMap::new();
    provenance.insert("path".into(), path.display().to_string());
    provenance.insert("channels".into(), channels.to_string());
    provenance.insert(
        "shape".into(),
        format!("{}x{}", tensor.shape[0], tensor.shape[1]),
    );
    provenance.insert("normalized".into(), "[0,1]".into());
    provenance.insert("inferred_precision".into(), precision.bits().to_string());
    Ok(SignalSource {
        kind: "image".into(),
        payload: Payload::Tensor(tensor),
        provenance,
    })
}

/// Writes an RGB (m=3) or grayscale (m=1) tensor as PNG/PPM/PGM.
pub fn write_image(tensor: &DataTensor, path: &Path) -> Result<()> {
    if tensor.shape.len() != 2 {
        return Err(Error::InvalidInput("only 2-D tensors can be written as images".into()));
    }
    let (rows, cols) = (tensor.shape[0] as u32, tensor.shape[1] as u32);
    let to_byte = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    match tensor.m {
        1 => {
            let buf: Vec<u8> = tensor.data.iter().map(|&v| to_byte(v)).collect();
            let img = image::GrayImage::from_raw(cols, rows, buf)
                .expect("dimensions match buffer");
            img.save(path)?;
        }
        3 => {
            let buf: Vec<u8> = tensor.data.iter().map(|&v| to_byte(v)).collect();
            let img = image::RgbImage::from_raw(cols, rows, buf)
                .expect("dimensions match buffer");
            img.save(path)?;
        }
        m => {
            return Err(Error::InvalidInput(format!(
                "cannot write {m}-channel tensor as an image"
            )))
        }
    }
    Ok(())
}

/// STFT parameters for the audio frontend.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StftConfig {
    pub window: usize,
    pub hop: usize,
    /// Magnitudes are floored here before taking log10.
    pub log_floor: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        StftConfig {
            window: 1024,
            hop: 512,
            log_floor: 1e-10,
        }
    }
}

/// Loads PCM WAV audio (mixed down to mono) and converts it to a
/// log-magnitude spectrogram: an n=1 tensor of frames with
/// `window/2 + 1` frequency bins, Hann windowed.
pub fn load_audio(path: &Path, cfg: &StftConfig) -> Result<SignalSource> {
    let mut reader = hound::WavReader::open(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    let samples: Vec<f64> = match spec.sample_format {
        hound::SampleFormat::Int => {
            let max = (1i64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 / max))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(e.to_string()))?
        }
        hound::SampleFormat::Float => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(e.to_string()))?,
    };
    let mono: Vec<f64> = samples
        .chunks(channels)
        .map(|c| c.iter().sum::<f64>() / channels as f64)
        .collect();
    let tensor = spectrogram(&mono, cfg)?;
    let mut provenance = BTreeMap::new();
    provenance.insert("path".into(), path.display().to_string());
    provenance.insert("sample_rate".into(), spec.sample_rate.to_string());
    provenance.insert("samples".into(), mono.len().to_string());
    provenance.insert("window".into(), cfg.window.to_string());
    provenance.insert("hop".into(), cfg.hop.to_string());
    provenance.insert("window_fn".into(), "hann".into());
    provenance.insert("log_floor".into(), format!("{:e}", cfg.log_floor));
    provenance.insert("frames".into(), tensor.shape[0].to_string());
    Ok(SignalSource {
        kind: "audio".into(),
        payload: Payload::Tensor(tensor),
        provenance,
    })
}

/// Hann-windowed log10-magnitude STFT. Frame count is
/// `(samples - window) / hop + 1`.
pub fn spectrogram(samples: &[f64], cfg: &StftConfig) -> Result<DataTensor> {
    if samples.len() < cfg.window {
        return Err(Error::InvalidInput(format!(
            "need at least {} samples for one frame, got {}",
            cfg.window,
            samples.len()
        )));
    }
    if cfg.hop == 0 || cfg.window == 0 {
        return Err(Error::Config("window and hop must be positive".into()));
    }
    let frames = (samples.len() - cfg.window) / cfg.hop + 1;
    let bins = cfg.window / 2 + 1;
    let hann: Vec<f64> = (0..cfg.window)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / cfg.window as f64;
            0.5 * (1.0 - t.cos())
        })
        .collect();

    let mut planner = rustfft::FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(cfg.window);
    let mut data = Vec::with_capacity(frames * bins);
    let mut buf = vec![rustfft::num_complex::Complex::default(); cfg.window];
    for f in 0..frames {
        let start = f * cfg.hop;
        for (i, b) in buf.iter_mut().enumerate() {
            *b = rustfft::num_complex::Complex::new(samples[start + i] * hann[i], 0.0);
        }
        fft.process(&mut buf);
        for b in buf.iter().take(bins) {
            let mag = b.norm().max(cfg.log_floor);
            data.push(mag.log10());
        }
    }
    DataTensor::new(vec![frames], bins, data)
}

/// Writes 16-bit PCM mono WAV; used by the examples and tests.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate: u32) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer =
        hound::WavWriter::create(path, spec).map_err(|e| Error::Format(e.to_string()))?;
    for &s in samples {
        let v = (s.clamp(-1.0, 1.0) * i16::MAX as f64).round() as i16;
        writer.write_sample(v).map_err(|e| Error::Format(e.to_string()))?;
    }
    writer.finalize().map_err(|e| Error::Format(e.to_string()))?;
    Ok(())
}

/// Loads a bit file: ASCII `0`/`1` with whitespace ignored, or packed
/// bytes (MSB first) when `packed` is set.
pub fn load_bits(path: &Path, packed: bool) -> Result<Vec<u8>> {
    let raw = std::fs::read(path)?;
    let bits = if packed {
        raw.iter()
            .flat_map(|byte| (0..8).rev().map(move |i| (byte >> i) & 1))
            .collect()
    } else {
        let mut bits = Vec::with_capacity(raw.len());
        for &b in &raw {
            match b {
                b'0' => bits.push(0),
                b'1' => bits.push(1),
                b' ' | b'\n' | b'\r' | b'\t' => {}
                other => {
                    return Err(Error::Format(format!(
                        "unexpected byte {other:#x} in bit file"
                    )))
                }
            }
        }
        bits
    };
    if bits.is_empty() {
        return Err(Error::EmptyInput("bit file"));
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_enumeration_and_budget() {
        let s = text_to_symbols("abc", None);
        match &s.payload {
            Payload::Text(t) => {
                assert_eq!(t.symbols(), &[0, 1, 2]);
                assert_eq!(t.alphabet_size(), 3);
            }
            _ => panic!("expected text"),
        }
        let long: String = "ab".repeat(10_000);
        let s = text_to_symbols(&long, Some(7500));
        match &s.payload {
            Payload::Text(t) => assert_eq!(t.len(), 7500),
            _ => panic!("expected text"),
        }
    }

    #[test]
    fn irish_sample_alphabet_size() {
        let irish = "Tá an teach beag agus tá an fear mór. Níl sé anseo inniu. \
                     Bhí an lá go breá agus chuaigh na páistí go dtí an trá.";
        let s = text_to_symbols(irish, None);
        match &s.payload {
            Payload::Text(t) => {
                let a = t.alphabet_size();
                assert!(
                    (15..=40).contains(&a),
                    "letters plus space, accents and punctuation, got {a}"
                );
            }
            _ => panic!("expected text"),
        }
        assert!(s.provenance.contains_key("alphabet_size"));
    }

    #[test]
    fn spectrogram_frame_count_formula() {
        let cfg = StftConfig {
            window: 64,
            hop: 16,
            log_floor: 1e-10,
        };
        for samples in [64usize, 65, 80, 128, 1000] {
            let signal = vec![0.0; samples];
            let t = spectrogram(&signal, &cfg).unwrap();
            assert_eq!(t.shape[0], (samples - 64) / 16 + 1);
            assert_eq!(t.m, 33);
        }
    }

    #[test]
    fn silent_signal_sits_at_the_log_floor() {
        let cfg = StftConfig {
            window: 64,
            hop: 32,
            log_floor: 1e-10,
        };
        let t = spectrogram(&vec![0.0; 256], &cfg).unwrap();
        assert!(t.data.iter().all(|&v| (v - (-10.0)).abs() < 1e-9));
    }

    #[test]
    fn sine_concentrates_in_one_bin_band() {
        let rate = 16_000.0;
        let freq = 440.0;
        let samples: Vec<f64> = (0..16_000)
            .map(|i| (std::f64::consts::TAU * freq * i as f64 / rate).sin())
            .collect();
        let cfg = StftConfig::default();
        let t = spectrogram(&samples, &cfg).unwrap();
        // expected bin: 440 / (16000/1024) = 28.16
        for f in 0..t.shape[0] {
            let frame = t.cell(f);
            let peak = frame
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap();
            assert!((27..=29).contains(&peak), "peak bin {peak}");
        }
    }

    #[test]
    fn bits_ascii_and_packed_agree() {
        let dir = tempfile::tempdir().unwrap();
        let ascii = dir.path().join("a.bits");
        std::fs::write(&ascii, "1010 1111\n0000 0001").unwrap();
        let a = load_bits(&ascii, false).unwrap();
        let packed = dir.path().join("b.bits");
        std::fs::write(&packed, [0b1010_1111u8, 0b0000_0001]).unwrap();
        let b = load_bits(&packed, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn image_roundtrip_via_ppm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.ppm");
        let img = crate::generate::toy_image();
        write_image(&img, &path).unwrap();
        let loaded = load_image(&path).unwrap();
        match loaded.payload {
            Payload::Tensor(t) => {
                assert_eq!(t.shape, vec![8, 8]);
                assert_eq!(t.m, 3);
                for (a, b) in t.data.iter().zip(&img.data) {
                    assert!((a - b).abs() < 1e-12);
                }
                assert_eq!(loaded.provenance["inferred_precision"], "8");
            }
            _ => panic!("expected tensor"),
        }
    }
}
