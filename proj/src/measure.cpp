#include "rotnum/measure.hpp"

#include <algorithm>
#include <cmath>

#include "rotnum/circle.hpp"

namespace rotnum {

std::size_t EmpiricalMeasure::bin_of(double p) const {
  const double v = wrap_turn(p);
  const double u = std::ceil((v + 0.5) * double(bins())) - 1.0;
  if (u < 0.0) return 0;
  return std::min(static_cast<std::size_t>(u), bins() - 1);
}

void EmpiricalMeasure::add(double p, double weight) {
  weights_[bin_of(p)] += weight;
  total_ += weight;
}

void EmpiricalMeasure::merge(const EmpiricalMeasure& other) {
  if (other.bins() != bins()) throw std::invalid_argument("EmpiricalMeasure::merge: bin mismatch");
  for (std::size_t b = 0; b < bins(); ++b) weights_[b] += other.weights_[b];
  total_ += other.total_;
}

std::vector<double> EmpiricalMeasure::masses() const {
  std::vector<double> m(bins());
  for (std::size_t b = 0; b < bins(); ++b) m[b] = mass(b);
  return m;
}

double EmpiricalMeasure::max_deviation_from_uniform() const {
  const double u = 1.0 / double(bins());
  double worst = 0.0;
  for (std::size_t b = 0; b < bins(); ++b) worst = std::max(worst, std::abs(mass(b) - u));
  return worst;
}

EmpiricalMeasure EmpiricalMeasure::antipodal_quotient() const {
  if (bins() % 2 != 0) throw std::invalid_argument("antipodal_quotient: bin count must be even");
  const std::size_t half = bins() / 2;
  EmpiricalMeasure q(half);
  for (std::size_t b = 0; b < half; ++b) {
    q.weights_[b] = weights_[b] + weights_[b + half];
  }
  q.total_ = total_;
  return q;
}

}  // namespace rotnum
