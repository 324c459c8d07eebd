#pragma once

namespace fbmclt {

/// Hurst index restricted to the long-memory range 1/2 < H < 1.
class Hurst {
 public:
  /// Throws ConfigError unless 0.5 < h < 1.
  explicit Hurst(double h);

  double value() const noexcept { return h_; }
  /// alpha_H = H (2H - 1).
  double alpha() const noexcept { return alpha_; }

  friend bool operator==(const Hurst& a, const Hurst& b) noexcept { return a.h_ == b.h_; }

 private:
  double h_;
  double alpha_;
};

}  // namespace fbmclt
