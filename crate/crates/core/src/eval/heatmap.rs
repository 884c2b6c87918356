use ndarray::{Array2, ArrayView3, Axis};

use crate::error::{Error, Result};

/// Heat map for one finding: the weighted sum of C feature maps (C×H×W),
/// where `weights[i]` is the final-layer weight connecting feature map `i`
/// to the finding's output.
pub fn heatmap(feature_maps: ArrayView3<'_, f64>, weights: &[f64]) -> Result<Array2<f64>> {
    let (c, h, w) = feature_maps.dim();
    if weights.len() != c {
        return Err(Error::LengthMismatch {
            left: weights.len(),
            right: c,
        });
    }
    let mut out = Array2::zeros((h, w));
    for (map, &weight) in feature_maps.axis_iter(Axis(0)).zip(weights) {
        out.scaled_add(weight, &map);
    }
    Ok(out)
}
