#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace assortify {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using IntMatrix = MatrixX<int>;
using IntVector = VectorX<int>;

/// One catalog item. `vertical` is the assortment slot label, `price_cents`
/// the integer price used for budget arithmetic.
struct Product {
  std::string id;
  std::string vertical;
  std::int64_t price_cents = 0;
  std::string title;
  std::vector<std::string> attributes;
};

/// Set of visual word ids, kept sorted and duplicate-free.
struct VisualDocument {
  std::vector<int> word_ids;
};

/// Bag of text word ids; duplicates carry multiplicity.
struct TextDocument {
  std::vector<int> tokens;
};

/// Per-product document pair. A product enters the corpus only if at least
/// one modality is present.
struct DocumentTuple {
  std::string product_id;
  std::optional<VisualDocument> visual;
  std::optional<TextDocument> text;
};

/// One browsing session; `product_ids` has set semantics (sorted, unique).
struct ClickSession {
  std::string session_id;
  std::vector<std::string> product_ids;
};

struct PurchaseRecord {
  std::string user_id;
  std::string product_id;
  std::int64_t ts = 0;  // seconds since epoch
};

}  // namespace assortify
