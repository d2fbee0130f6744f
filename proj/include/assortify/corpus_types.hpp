#pragma once

#include "assortify/types.hpp"

#include <string>
#include <vector>

namespace assortify::corpus {

/// How channels from the indexed convolutional layers are concatenated into
/// one activation vector. Offsets must be contiguous and cover [0, v_img).
struct LayerOffset {
  std::string layer;
  int start = 0;
  int count = 0;
};

/// Pre-extracted activation summary for one product: one vector per image,
/// one channel-max value per indexed channel.
struct ActivationSummary {
  std::string product_id;
  std::vector<Vector> images;  // each of length v_img, entries >= 0
};

/// Per-channel binarization thresholds fitted at quantile q.
struct ThresholdVector {
  Vector threshold;
  double quantile = 0.0;
};

}  // namespace assortify::corpus
