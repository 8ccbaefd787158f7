#include "isoeb/isotonic.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace isoeb {

namespace {

struct Block {
  std::size_t begin;
  std::size_t end;
  double wsum;   // accumulated weight
  double wxsum;  // accumulated weighted values
  double value() const { return wxsum / wsum; }
};

}  // namespace

IsotonicFit pava(std::span<const double> x, std::span<const double> w,
                 Cone cone) {
  const std::size_t p = x.size();
  if (p == 0) throw std::invalid_argument("pava: empty input");
  if (w.size() != p)
    throw std::invalid_argument("pava: weight length mismatch");
  for (double wi : w)
    if (!(wi > 0.0)) throw std::invalid_argument("pava: weights must be > 0");

  // Stack of pooled blocks. For the nonincreasing cone a violation is a
  // block mean strictly below its successor; ties are feasible and are not
  // pooled. Pooled means use accumulated weighted sums rather than running
  // averages to limit cancellation.
  std::vector<Block> stack;
  stack.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    Block b{i, i + 1, w[i], w[i] * x[i]};
    while (!stack.empty() && stack.back().value() < b.value()) {
      b.begin = stack.back().begin;
      b.wsum += stack.back().wsum;
      b.wxsum += stack.back().wxsum;
      stack.pop_back();
    }
    stack.push_back(b);
  }

  IsotonicFit fit;
  fit.values.resize(p);
  fit.blocks.reserve(stack.size());
  for (const Block& b : stack) {
    double v = b.value();
    if (cone == Cone::NonincreasingNonneg && v < 0.0) v = 0.0;
    fit.blocks.push_back({b.begin, b.end, v});
    for (std::size_t i = b.begin; i < b.end; ++i) fit.values[i] = v;
  }
  double obj = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double d = x[i] - fit.values[i];
    obj += w[i] * d * d;
  }
  fit.objective = obj;
  return fit;
}

IsotonicFit pava(std::span<const double> x, Cone cone) {
  std::vector<double> w(x.size(), 1.0);
  return pava(x, w, cone);
}

std::vector<double> min_max_slopes(std::span<const double> x) {
  const std::size_t p = x.size();
  if (p == 0) throw std::invalid_argument("min_max_slopes: empty input");

  std::vector<double> prefix(p + 1, 0.0);
  for (std::size_t i = 0; i < p; ++i) prefix[i + 1] = prefix[i] + x[i];
  const auto avg = [&](std::size_t h, std::size_t j) {
    return (prefix[j + 1] - prefix[h]) / static_cast<double>(j - h + 1);
  };

  // maxavg[h] = max_{j >= i} avg(h..j), maintained while i goes p-1 -> 0 via
  // maxavg[h] <- max(avg(h..i), maxavg[h]); the answer at i is the min over
  // h <= i, clamped at zero.
  std::vector<double> out(p, 0.0);
  std::vector<double> maxavg(p, -std::numeric_limits<double>::infinity());
  for (std::size_t ii = p; ii-- > 0;) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h <= ii; ++h) {
      maxavg[h] = std::max(maxavg[h], avg(h, ii));
      best = std::min(best, maxavg[h]);
    }
    out[ii] = std::max(best, 0.0);
  }
  return out;
}

VarianceProfile lcm_cusum_tau(std::span<const double> x_squared,
                              double lambda) {
  if (lambda < 0.0)
    throw std::invalid_argument("lcm_cusum_tau: lambda must be >= 0");
  std::vector<double> centered(x_squared.begin(), x_squared.end());
  for (double& v : centered) v -= lambda;
  VarianceProfile profile;
  profile.v = min_max_slopes(centered);
  return profile;
}

}  // namespace isoeb
