//! `vqfuse predict`: score one test sequence against its reference with a
//! trained model; per-frame CSV plus a one-line summary.

use std::path::Path;

use anyhow::{Context, Result};
use vqfuse_core::fusion::FusionModel;
use vqfuse_core::pipeline::predict_sequence;
use vqfuse_core::video::{open_sequence, VideoSpec};

pub struct PredictArgs<'a> {
    pub model: &'a Path,
    pub reference: &'a Path,
    pub test: &'a Path,
    pub spec: VideoSpec,
    /// Stored geometry of a re-sampled test sequence.
    pub test_geometry: Option<(usize, usize)>,
    pub out: Option<&'a Path>,
}

pub fn run(args: &PredictArgs) -> Result<()> {
    let model = FusionModel::load(args.model)
        .with_context(|| format!("loading model {}", args.model.display()))?;
    let mut reference = open_sequence(args.reference, args.spec)?;
    let mut test_spec = args.spec;
    if let Some((w, h)) = args.test_geometry {
        test_spec.width = w;
        test_spec.height = h;
    }
    let mut test = open_sequence(args.test, test_spec)?;
    if args.test_geometry.is_some() {
        test = test.with_upsample_to(args.spec.width, args.spec.height);
    }
    let (per_frame, mean) = predict_sequence(&mut reference, &mut test, &model)?;

    if let Some(out) = args.out {
        let mut csv = format!(
            "# vqfuse v1 config={}\nframe,score\n",
            model.provenance.config_hash
        );
        for (i, score) in per_frame.iter().enumerate() {
            csv.push_str(&format!("{i},{score}\n"));
        }
        std::fs::write(out, csv)?;
    }
    println!(
        "{}: Q = {mean:.4} over {} frames (model {}, alpha {}, beta {})",
        args.test.display(),
        per_frame.len(),
        args.model.display(),
        model.alpha,
        model.beta
    );
    Ok(())
}
