#include "intentforge/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace intentforge {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::DegenerateBatch: return "degenerate-batch";
    case ErrorKind::InvalidRate: return "invalid-rate";
    case ErrorKind::StaleCache: return "stale-cache";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::SessionIntegrity: return "session-integrity";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Featurize: return "featurize";
    case ErrorKind::Split: return "split";
    case ErrorKind::DegenerateLabels: return "degenerate-labels";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::Index: return "index";
    case ErrorKind::InsufficientMemory: return "insufficient-memory";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::IncompatibleArtifacts: return "incompatible-artifacts";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Format: return "format";
  }
  return "unknown";
}

void Matrix::fill(double v) noexcept { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace intentforge
