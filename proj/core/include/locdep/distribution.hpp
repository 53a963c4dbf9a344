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

#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

namespace locdep {

/// Finite distribution; sampled by inverse CDF from one uniform.
class DiscreteDist {
public:
  DiscreteDist(std::vector<double> values, std::vector<double> probs);

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return values_.size(); }
  double mean() const noexcept;
  double draw(double u) const noexcept;

private:
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

struct NormalDist {
  double mean = 0.0;
  double sd = 1.0;
};

struct UniformDist {
  double lo = 0.0;
  double hi = 1.0;
};

using SourceDist = std::variant<DiscreteDist, NormalDist, UniformDist>;

SourceDist rademacher();
SourceDist bernoulli(double p);
SourceDist standard_normal();
SourceDist uniform01();

double draw(const SourceDist& dist, std::array<double, 2> u) noexcept;
double mean(const SourceDist& dist) noexcept;
bool is_discrete(const SourceDist& dist) noexcept;
std::string describe(const SourceDist& dist);

} // namespace locdep
