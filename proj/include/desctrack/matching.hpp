#pragma once

#include <optional>
#include <span>
#include <vector>

#include "desctrack/description.hpp"

namespace desctrack {

struct MatchRecord {
  std::size_t query_idx = 0;
  std::size_t train_idx = 0;
  double best_distance = 0.0;
  std::optional<double> second_distance;
  bool ambiguous = false;

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

struct MatcherConfig {
  /// A match is ambiguous when best / second >= rho.
  double rho = 0.8;
  bool cross_check = false;
  /// Matches without a second candidate count as unambiguous unless cleared.
  bool single_candidate_unambiguous = true;

  void validate() const;
};

int hamming_distance(const BinaryDescriptor& a, const BinaryDescriptor& b);
/// Bit strings of arbitrary length; throws std::invalid_argument on mismatch.
int hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

double l2_distance(const FloatDescriptor& a, const FloatDescriptor& b);
/// Throws std::invalid_argument on dimension mismatch.
double l2_distance(std::span<const float> a, std::span<const float> b);

/// Ratio-test verdict for a best/second pair. A zero second distance (a
/// duplicate) is ambiguous.
bool is_ambiguous(double best, std::optional<double> second, const MatcherConfig& cfg);

/// Exhaustive nearest neighbour of every query descriptor among `train`, with
/// the second-best distance and the ratio-test flag. Ties go to the lowest
/// train index. With cross_check only mutual nearest neighbours survive.
/// Output is ordered by query index.
std::vector<MatchRecord> brute_force_match(const DescriptorSet& query, const DescriptorSet& train,
                                           const MatcherConfig& cfg = {});

/// Matches with ambiguous == false, order preserved.
std::vector<MatchRecord> filter_unambiguous(std::span<const MatchRecord> matches);

}  // namespace desctrack
