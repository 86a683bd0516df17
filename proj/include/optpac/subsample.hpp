#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "optpac/core.hpp"

namespace optpac {

/// w ∈ {1..5}^k; digits[0] is the choice at the top level of the recursion.
struct RowSelector {
  std::vector<int> digits;

  std::size_t k() const noexcept { return digits.size(); }
  bool operator==(const RowSelector&) const = default;
};

/// 1-based closed interval [first, last].
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const noexcept { return last - first + 1; }
  bool operator==(const IndexRange&) const = default;
};

/// Ranges of the row selected by w: the anchor [1,1] plus
/// ranges[j-1] = [6^{k-j}·w_j + 1, 6^{k-j}·(w_j + 1)] for j = 1..k.
struct RowRanges {
  IndexRange prefix{1, 1};
  std::vector<IndexRange> ranges;

  std::size_t total_size() const noexcept;
};

std::uint64_t ipow(std::uint64_t base, unsigned exp);

/// k with base^k == m, if any.
std::optional<unsigned> exact_log(std::uint64_t base, std::uint64_t m);
inline std::optional<unsigned> exact_log6(std::uint64_t m) { return exact_log(6, m); }

/// Largest base^k <= m (m >= 1).
std::uint64_t largest_power_at_most(std::uint64_t base, std::uint64_t m);

/// Row size (6^k + 4)/5.
std::size_t row_size(unsigned k);

/// Number of rows 5^k.
std::size_t row_count(unsigned k);

/// Lexicographic rank in [0, 5^k) ↔ selector, digits[0] most significant.
RowSelector selector_from_rank(unsigned k, std::uint64_t rank);
std::uint64_t rank_of(const RowSelector& w);

/// Throws BadShape unless w has k >= 1 digits in 1..5.
RowRanges row_ranges(unsigned k, const RowSelector& w);

/// The row for w as a view over S, in the order the recursion concatenates it:
/// anchor, then ranges[k-1], ..., ranges[0]. Costs O(|row|).
/// Throws BadShape unless |S| = 6^k with k = w.k().
TrainingSequence extract_row(const TrainingSequence& s, const RowSelector& w);

/// All 5^k rows of the recursive split, in recursion order (which is the
/// lexicographic order of w). Oracle only; k <= 6.
std::vector<TrainingSequence> enumerate_rows_recursive(const TrainingSequence& s,
                                                       const TrainingSequence& t = {});

/// All 3^k rows of the four-way split used by the Hanneke baseline; |S| = 4^k.
std::vector<TrainingSequence> enumerate_rows_hanneke(const TrainingSequence& s,
                                                     const TrainingSequence& t = {});

}  // namespace optpac
