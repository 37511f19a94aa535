#include "desctrack/matching.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "desctrack/errors.hpp"

namespace desctrack {

void MatcherConfig::validate() const {
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("matcher.rho must be in (0, 1]");
}

int hamming_distance(const BinaryDescriptor& a, const BinaryDescriptor& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) d += std::popcount(a.words[i] ^ b.words[i]);
  return d;
}

int hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("binary descriptor length mismatch");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::popcount(a[i] ^ b[i]);
  return d;
}

double l2_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw std::invalid_argument("float descriptor dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

double l2_distance(const FloatDescriptor& a, const FloatDescriptor& b) {
  return l2_distance(std::span<const float>(a.values), std::span<const float>(b.values));
}

bool is_ambiguous(double best, std::optional<double> second, const MatcherConfig& cfg) {
  if (!second) return !cfg.single_candidate_unambiguous;
  if (*second == 0.0) return true;
  return best / *second >= cfg.rho;
}

namespace {

struct Nearest {
  std::size_t index = 0;
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
};

template <typename Desc, typename Dist>
std::vector<Nearest> nearest_all(const std::vector<Desc>& query, const std::vector<Desc>& train,
                                 Dist dist) {
  std::vector<Nearest> out(query.size());
  for (std::size_t q = 0; q < query.size(); ++q) {
    Nearest n;
    for (std::size_t t = 0; t < train.size(); ++t) {
      const double d = dist(query[q], train[t]);
      if (d < n.best) {
        n.second = n.best;
        n.best = d;
        n.index = t;
      } else if (d < n.second) {
        n.second = d;
      }
    }
    out[q] = n;
  }
  return out;
}

template <typename Desc, typename Dist>
std::vector<MatchRecord> match_impl(const std::vector<Desc>& query, const std::vector<Desc>& train,
                                    const MatcherConfig& cfg, Dist dist) {
  std::vector<MatchRecord> out;
  if (train.empty() || query.empty()) return out;
  const auto forward = nearest_all(query, train, dist);
  std::vector<Nearest> backward;
  if (cfg.cross_check) backward = nearest_all(train, query, dist);

  out.reserve(query.size());
  for (std::size_t q = 0; q < query.size(); ++q) {
    const Nearest& n = forward[q];
    if (cfg.cross_check && backward[n.index].index != q) continue;
    MatchRecord m;
    m.query_idx = q;
    m.train_idx = n.index;
    m.best_distance = n.best;
    if (train.size() > 1) m.second_distance = n.second;
    m.ambiguous = is_ambiguous(m.best_distance, m.second_distance, cfg);
    out.push_back(m);
  }
  return out;
}

}  // namespace

std::vector<MatchRecord> brute_force_match(const DescriptorSet& query, const DescriptorSet& train,
                                           const MatcherConfig& cfg) {
  cfg.validate();
  if (query.kind() != train.kind()) {
    throw std::invalid_argument(std::string("cannot match ") + to_string(query.kind()) +
                                " descriptors against " + to_string(train.kind()));
  }
  if (query.kind() == DescriptorKind::Binary) {
    return match_impl(query.binary(), train.binary(), cfg,
                      [](const BinaryDescriptor& a, const BinaryDescriptor& b) {
                        return static_cast<double>(hamming_distance(a, b));
                      });
  }
  return match_impl(query.floats(), train.floats(), cfg,
                    [](const FloatDescriptor& a, const FloatDescriptor& b) {
                      return l2_distance(a, b);
                    });
}

std::vector<MatchRecord> filter_unambiguous(std::span<const MatchRecord> matches) {
  std::vector<MatchRecord> out;
  for (const auto& m : matches) {
    if (!m.ambiguous) out.push_back(m);
  }
  return out;
}

}  // namespace desctrack
