#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "ttr/core.hpp"
#include "ttr/rng.hpp"

namespace ttr {

// One tunable dimension of a box search space.
struct DimensionSpec {
  enum class Kind { LogUniform, LinearUniform, Discrete, Fixed };

  std::string name;
  Kind kind = Kind::LinearUniform;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<ParamValue> values;  // Discrete
  ParamValue fixed_value;          // Fixed

  static DimensionSpec log_uniform(std::string name, double lo, double hi) {
    DimensionSpec d;
    d.name = std::move(name);
    d.kind = Kind::LogUniform;
    d.lo = lo;
    d.hi = hi;
    return d;
  }

  static DimensionSpec linear_uniform(std::string name, double lo, double hi) {
    DimensionSpec d;
    d.name = std::move(name);
    d.kind = Kind::LinearUniform;
    d.lo = lo;
    d.hi = hi;
    return d;
  }

  static DimensionSpec discrete(std::string name, std::vector<ParamValue> values) {
    DimensionSpec d;
    d.name = std::move(name);
    d.kind = Kind::Discrete;
    d.values = std::move(values);
    return d;
  }

  static DimensionSpec fixed(std::string name, ParamValue value) {
    DimensionSpec d;
    d.name = std::move(name);
    d.kind = Kind::Fixed;
    d.fixed_value = std::move(value);
    return d;
  }

  void validate() const {
    switch (kind) {
      case Kind::LogUniform:
        if (!(lo > 0.0)) throw Error("InvalidDimension", name + ": log-uniform needs lo > 0");
        [[fallthrough]];
      case Kind::LinearUniform:
        if (!(lo < hi)) throw Error("InvalidDimension", name + ": needs lo < hi");
        break;
      case Kind::Discrete: {
        if (values.empty()) throw Error("InvalidDimension", name + ": empty discrete set");
        std::set<std::string> seen;
        for (const auto& v : values) {
          if (!seen.insert(param_value_str(v)).second) {
            throw Error("InvalidDimension", name + ": duplicate discrete value");
          }
        }
        break;
      }
      case Kind::Fixed:
        break;
    }
  }

  friend bool operator==(const DimensionSpec&, const DimensionSpec&) = default;
};

// Either a box of independent dimensions sampled quasirandomly, or an
// explicit list of points sampled without replacement.
struct SearchSpace {
  enum class Kind { Box, OptList };

  Kind kind = Kind::Box;
  std::vector<DimensionSpec> dimensions;        // Box
  std::vector<HyperparameterPoint> opt_list;    // OptList

  static SearchSpace box(std::vector<DimensionSpec> dims) {
    SearchSpace s;
    s.kind = Kind::Box;
    s.dimensions = std::move(dims);
    return s;
  }

  static SearchSpace optlist(std::vector<HyperparameterPoint> points) {
    SearchSpace s;
    s.kind = Kind::OptList;
    s.opt_list = std::move(points);
    return s;
  }

  void validate() const {
    if (kind == Kind::Box) {
      std::set<std::string> names;
      for (const auto& dim : dimensions) {
        dim.validate();
        if (!names.insert(dim.name).second) {
          throw Error("InvalidSearchSpace", "duplicate dimension name '" + dim.name + "'");
        }
      }
    } else {
      if (opt_list.empty()) throw Error("InvalidSearchSpace", "empty point list");
      const auto& first = opt_list.front().entries;
      for (const auto& point : opt_list) {
        if (point.entries.size() != first.size()) {
          throw Error("InvalidSearchSpace", "list points must share one key set");
        }
        for (const auto& [name, value] : point.entries) {
          if (first.find(name) == first.end()) {
            throw Error("InvalidSearchSpace", "list points must share one key set");
          }
        }
      }
    }
  }

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

namespace detail {

inline int nth_prime(std::size_t n) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                               41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
  if (n < sizeof(primes) / sizeof(primes[0])) return primes[static_cast<int>(n)];
  // Fall back to trial division beyond the table.
  int candidate = primes[sizeof(primes) / sizeof(primes[0]) - 1];
  std::size_t count = sizeof(primes) / sizeof(primes[0]) - 1;
  while (count < n) {
    ++candidate;
    bool is_prime = true;
    for (int d = 2; d * d <= candidate; ++d) {
      if (candidate % d == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) ++count;
  }
  return candidate;
}

// Radical-inverse sequence in one prime base with an independent random digit
// permutation per digit level. Deterministic given (base, seed_key).
class ScrambledHalton {
 public:
  ScrambledHalton(int base, std::uint64_t seed_key) : base_(base) {
    // Enough levels that the dropped tail is below double precision.
    int levels = 0;
    for (double weight = 1.0 / base; weight > 1e-18; weight /= base) ++levels;
    perms_.resize(static_cast<std::size_t>(levels));
    for (std::size_t level = 0; level < perms_.size(); ++level) {
      auto& perm = perms_[level];
      perm.resize(static_cast<std::size_t>(base));
      std::iota(perm.begin(), perm.end(), 0);
      SplitMix64 rng(mix_seed(seed_key, level));
      rng.shuffle(perm);
    }
  }

  double at(std::uint64_t index) const {
    double value = 0.0;
    double weight = 1.0 / base_;
    std::uint64_t rest = index;
    for (const auto& perm : perms_) {
      const auto digit = static_cast<std::size_t>(rest % static_cast<std::uint64_t>(base_));
      rest /= static_cast<std::uint64_t>(base_);
      value += weight * perm[digit];
      weight /= base_;
    }
    return value;
  }

 private:
  int base_;
  std::vector<std::vector<int>> perms_;
};

// Maps a unit coordinate through one dimension's transform.
inline ParamValue map_unit(double u, const DimensionSpec& dim) {
  switch (dim.kind) {
    case DimensionSpec::Kind::LogUniform:
      return dim.lo * std::pow(dim.hi / dim.lo, u);
    case DimensionSpec::Kind::LinearUniform:
      return dim.lo + u * (dim.hi - dim.lo);
    case DimensionSpec::Kind::Discrete: {
      const auto k = dim.values.size();
      const auto bucket = std::min(static_cast<std::size_t>(u * static_cast<double>(k)), k - 1);
      return dim.values[bucket];
    }
    case DimensionSpec::Kind::Fixed:
      return dim.fixed_value;
  }
  throw Error("InvalidDimension", "unreachable dimension kind");
}

}  // namespace detail

// Draws n points from a box space with a seeded scrambled-Halton sequence,
// one prime base per tunable dimension. Deterministic given (space, n, seed).
inline std::vector<HyperparameterPoint> sample_quasirandom(const SearchSpace& space,
                                                           std::size_t count,
                                                           std::uint64_t seed) {
  if (space.kind != SearchSpace::Kind::Box) {
    throw Error("WrongSpaceKind", "quasirandom sampling needs a box search space");
  }
  if (space.dimensions.empty()) throw Error("EmptySpace", "search space has no dimensions");
  space.validate();

  std::vector<detail::ScrambledHalton> sequences;
  sequences.reserve(space.dimensions.size());
  std::size_t tunable = 0;
  for (std::size_t d = 0; d < space.dimensions.size(); ++d) {
    if (space.dimensions[d].kind == DimensionSpec::Kind::Fixed) continue;
    sequences.emplace_back(detail::nth_prime(tunable), mix_seed(seed, d));
    ++tunable;
  }

  std::vector<HyperparameterPoint> points(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t seq = 0;
    for (const auto& dim : space.dimensions) {
      const double u =
          dim.kind == DimensionSpec::Kind::Fixed ? 0.0 : sequences[seq++].at(i);
      points[i].entries.emplace(dim.name, detail::map_unit(u, dim));
    }
  }
  return points;
}

// A uniformly random size-n subset of the list in seeded shuffled order.
inline std::vector<HyperparameterPoint> sample_optlist(const SearchSpace& space,
                                                       std::size_t count, std::uint64_t seed) {
  if (space.kind != SearchSpace::Kind::OptList) {
    throw Error("WrongSpaceKind", "without-replacement sampling needs a point list");
  }
  space.validate();
  if (count > space.opt_list.size()) {
    throw Error("BudgetExceedsList", "asked for " + std::to_string(count) + " points from a list of " +
                                         std::to_string(space.opt_list.size()));
  }
  std::vector<std::size_t> order(space.opt_list.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  rng.shuffle(order);

  std::vector<HyperparameterPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(space.opt_list[order[i]]);
  return out;
}

// Greedily grows a point set by visiting the per-workload rankings
// round-robin in the order given, each visit adding that ranking's best
// candidate not already chosen. Output order is insertion order.
inline std::vector<std::string> build_optlist(
    const std::vector<std::vector<std::string>>& rankings, std::size_t budget) {
  if (budget < 1) throw Error("InvalidBudget", "budget must be >= 1");
  std::set<std::string> available;
  for (const auto& ranking : rankings) {
    if (ranking.empty()) throw Error("EmptyRanking", "every ranking must be nonempty");
    available.insert(ranking.begin(), ranking.end());
  }
  if (available.size() < budget) {
    throw Error("InsufficientCandidates",
                "rankings contain " + std::to_string(available.size()) +
                    " distinct candidates, need " + std::to_string(budget));
  }

  std::vector<std::string> chosen;
  std::set<std::string> chosen_set;
  std::vector<std::size_t> cursor(rankings.size(), 0);
  while (chosen.size() < budget) {
    for (std::size_t w = 0; w < rankings.size() && chosen.size() < budget; ++w) {
      auto& pos = cursor[w];
      while (pos < rankings[w].size() && chosen_set.count(rankings[w][pos]) != 0) ++pos;
      if (pos == rankings[w].size()) continue;
      chosen.push_back(rankings[w][pos]);
      chosen_set.insert(rankings[w][pos]);
    }
  }
  return chosen;
}

}  // namespace ttr
