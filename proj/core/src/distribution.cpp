/*
   Copyright 2026 The locdep Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "locdep/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "locdep/error.hpp"

namespace locdep {

DiscreteDist::DiscreteDist(std::vector<double> values, std::vector<double> probs)
    : values_(std::move(values)), probs_(std::move(probs)) {
  if (values_.empty() || values_.size() != probs_.size())
    throw Error(ErrorCode::InvalidArgument, "discrete distribution needs matching nonempty values/probs");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "probabilities must sum to 1");
  for (auto& p : probs_) p /= total;
  cumulative_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    acc += probs_[k];
    cumulative_[k] = acc;
  }
  cumulative_.back() = 1.0;
}

double DiscreteDist::mean() const noexcept {
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) m += values_[k] * probs_[k];
  return m;
}

double DiscreteDist::draw(double u) const noexcept {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return values_[static_cast<std::size_t>(it - cumulative_.begin())];
}

SourceDist rademacher() { return DiscreteDist({-1.0, 1.0}, {0.5, 0.5}); }

SourceDist bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "bernoulli p must lie in [0,1]");
  return DiscreteDist({0.0, 1.0}, {1.0 - p, p});
}

SourceDist standard_normal() { return NormalDist{0.0, 1.0}; }
SourceDist uniform01() { return UniformDist{0.0, 1.0}; }

double draw(const SourceDist& dist, std::array<double, 2> u) noexcept {
  struct Visitor {
    std::array<double, 2> u;
    double operator()(const DiscreteDist& d) const noexcept { return d.draw(u[0]); }
    double operator()(const NormalDist& d) const noexcept {
      const double r = std::sqrt(-2.0 * std::log(u[0]));
      return d.mean + d.sd * r * std::cos(2.0 * std::numbers::pi * u[1]);
    }
    double operator()(const UniformDist& d) const noexcept { return d.lo + (d.hi - d.lo) * u[0]; }
  };
  return std::visit(Visitor{u}, dist);
}

double mean(const SourceDist& dist) noexcept {
  struct Visitor {
    double operator()(const DiscreteDist& d) const noexcept { return d.mean(); }
    double operator()(const NormalDist& d) const noexcept { return d.mean; }
    double operator()(const UniformDist& d) const noexcept { return 0.5 * (d.lo + d.hi); }
  };
  return std::visit(Visitor{}, dist);
}

bool is_discrete(const SourceDist& dist) noexcept { return std::holds_alternative<DiscreteDist>(dist); }

std::string describe(const SourceDist& dist) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* d = std::get_if<DiscreteDist>(&dist)) {
    os << "discrete{";
    for (std::size_t k = 0; k < d->size(); ++k) os << (k ? "," : "") << d->values()[k] << ":" << d->probs()[k];
    os << "}";
  } else if (const auto* nd = std::get_if<NormalDist>(&dist)) {
    os << "normal{" << nd->mean << "," << nd->sd << "}";
  } else {
    const auto& ud = std::get<UniformDist>(dist);
    os << "uniform{" << ud.lo << "," << ud.hi << "}";
  }
  return os.str();
}

} // namespace locdep
