#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rotnum {

/// Weighted histogram on the circle (-1/2, 1/2] with B equal bins.
/// Bin b covers (-1/2 + b/B, -1/2 + (b+1)/B].
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::size_t bins = 1024) : weights_(bins, 0.0) {
    if (bins == 0) throw std::invalid_argument("EmpiricalMeasure: bin count must be positive");
  }

  std::size_t bins() const { return weights_.size(); }

  /// Adds weight at circle point p (any real; reduced mod 1).
  void add(double p, double weight = 1.0);

  /// Adds all weight of another measure with the same bin count.
  void merge(const EmpiricalMeasure& other);

  std::size_t bin_of(double p) const;
  double bin_left(std::size_t b) const { return -0.5 + double(b) / double(bins()); }
  double bin_right(std::size_t b) const { return -0.5 + double(b + 1) / double(bins()); }
  double bin_center(std::size_t b) const { return -0.5 + (double(b) + 0.5) / double(bins()); }

  double total_weight() const { return total_; }
  /// Normalized mass of bin b (0 when empty).
  double mass(std::size_t b) const { return total_ > 0.0 ? weights_[b] / total_ : 0.0; }
  std::vector<double> masses() const;

  /// Largest |mass(b) - 1/B|.
  double max_deviation_from_uniform() const;

  /// Mass folded onto the projective line: bin b of the result holds bins b
  /// and b + B/2 (antipodal points). Requires an even bin count.
  EmpiricalMeasure antipodal_quotient() const;

  /// Sum of mass(b) * fn(bin_center(b)).
  template <typename Fn>
  double integrate(Fn&& fn) const {
    double s = 0.0;
    for (std::size_t b = 0; b < bins(); ++b) {
      if (weights_[b] != 0.0) s += mass(b) * fn(bin_center(b));
    }
    return s;
  }

 private:
  std::vector<double> weights_;
  double total_ = 0.0;
};

}  // namespace rotnum
