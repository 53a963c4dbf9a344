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

#include "locdep/enumeration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "locdep/error.hpp"

namespace locdep {

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_chunks(std::size_t chunks, unsigned threads, const std::function<void(std::size_t)>& body) {
  threads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(chunks, 1)));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) return;
        try {
          body(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(chunks);
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

struct Odometer {
  std::vector<const DiscreteDist*> dists;

  explicit Odometer(const LatentSourceField& field) {
    for (const auto& d : field.sources()) {
      const auto* dd = std::get_if<DiscreteDist>(&d);
      if (!dd) throw Error(ErrorCode::EnumerationCapExceeded, "field has a continuous source; not enumerable");
      dists.push_back(dd);
    }
  }

  double total() const {
    double t = 1.0;
    for (const auto* d : dists) t *= static_cast<double>(d->size());
    return t;
  }

  // Visits outcomes [first, last) in mixed-radix order.
  void run(std::uint64_t first, std::uint64_t last,
           const std::function<void(std::uint64_t, double, std::span<const double>)>& fn) const {
    const std::size_t w = dists.size();
    std::vector<std::size_t> digit(w);
    std::uint64_t r = first;
    for (std::size_t t = w; t-- > 0;) {
      digit[t] = r % dists[t]->size();
      r /= dists[t]->size();
    }
    std::vector<double> vals(w);
    std::vector<double> prefix(w + 1, 1.0);
    for (std::size_t t = 0; t < w; ++t) {
      vals[t] = dists[t]->values()[digit[t]];
      prefix[t + 1] = prefix[t] * dists[t]->probs()[digit[t]];
    }
    for (std::uint64_t k = first; k < last; ++k) {
      fn(k, prefix[w], vals);
      std::size_t t = w;
      while (t > 0) {
        --t;
        if (++digit[t] < dists[t]->size()) break;
        digit[t] = 0;
      }
      for (std::size_t u = t; u < w; ++u) {
        vals[u] = dists[u]->values()[digit[u]];
        prefix[u + 1] = prefix[u] * dists[u]->probs()[digit[u]];
      }
    }
  }
};

std::uint64_t checked_total(const Odometer& odo, std::uint64_t cap) {
  const double total = odo.total();
  if (total > static_cast<double>(cap))
    throw Error(ErrorCode::EnumerationCapExceeded,
                "outcome count " + std::to_string(total) + " exceeds cap " + std::to_string(cap));
  return static_cast<std::uint64_t>(std::llround(total));
}

} // namespace

void enumerate_field(const LatentSourceField& field, std::uint64_t cap,
                     const std::function<void(double, std::span<const double>, std::span<const double>)>& fn) {
  const Odometer odo(field);
  const std::uint64_t total = checked_total(odo, cap);
  std::vector<double> values(field.size());
  odo.run(0, total, [&](std::uint64_t, double p, std::span<const double> src) {
    field.evaluate(src, values);
    fn(p, src, values);
  });
}

ExactLaw::ExactLaw(std::size_t n, std::vector<double> probs, std::vector<double> values)
    : n_(n), probs_(std::move(probs)), values_(std::move(values)) {
  if (values_.size() != n_ * probs_.size()) throw Error(ErrorCode::InvalidSize, "law rows must have n entries");
}

double ExactLaw::expectation(const std::function<double(std::span<const double>)>& fn) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) acc += probs_[k] * fn(row(k));
  return acc;
}

ExactLaw exact_law(const LatentSourceField& field, std::uint64_t cap, unsigned threads) {
  const Odometer odo(field);
  const std::uint64_t total = checked_total(odo, cap);
  const std::size_t n = field.size();
  std::vector<double> probs(total);
  std::vector<double> values(total * n);
  const std::uint64_t chunk = 4096;
  const std::size_t chunks = static_cast<std::size_t>((total + chunk - 1) / chunk);
  parallel_chunks(chunks, threads, [&](std::size_t c) {
    const std::uint64_t first = c * chunk;
    const std::uint64_t last = std::min(total, first + chunk);
    odo.run(first, last, [&](std::uint64_t k, double p, std::span<const double> src) {
      probs[k] = p;
      field.evaluate(src, std::span<double>(values.data() + k * n, n));
    });
  });
  return ExactLaw(n, std::move(probs), std::move(values));
}

} // namespace locdep
