#include "optpac/subsample.hpp"

#include <string>

namespace optpac {

namespace {

constexpr unsigned kMaxEnumerationDepth = 6;

void rows_recursive(const TrainingSequence& s, const TrainingSequence& t,
                    std::vector<TrainingSequence>& out) {
  if (s.size() < 6) {
    out.push_back(concat(s, t));
    return;
  }
  const std::size_t part = s.size() / 6;
  const TrainingSequence s0 = s.slice(0, part);
  for (std::size_t i = 1; i <= 5; ++i) rows_recursive(s0, concat(s.slice(i * part, part), t), out);
}

void rows_hanneke(const TrainingSequence& s, const TrainingSequence& t,
                  std::vector<TrainingSequence>& out) {
  if (s.size() <= 3) {
    out.push_back(concat(s, t));
    return;
  }
  const std::size_t part = s.size() / 4;
  const TrainingSequence s0 = s.slice(0, part);
  const TrainingSequence s1 = s.slice(part, part);
  const TrainingSequence s2 = s.slice(2 * part, part);
  const TrainingSequence s3 = s.slice(3 * part, part);
  rows_hanneke(s0, concat(concat(s2, s3), t), out);
  rows_hanneke(s0, concat(concat(s1, s3), t), out);
  rows_hanneke(s0, concat(concat(s1, s2), t), out);
}

}  // namespace

std::size_t RowRanges::total_size() const noexcept {
  std::size_t n = prefix.size();
  for (const auto& r : ranges) n += r.size();
  return n;
}

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

std::optional<unsigned> exact_log(std::uint64_t base, std::uint64_t m) {
  if (base < 2 || m == 0) return std::nullopt;
  unsigned k = 0;
  while (m % base == 0) {
    m /= base;
    ++k;
  }
  if (m != 1) return std::nullopt;
  return k;
}

std::uint64_t largest_power_at_most(std::uint64_t base, std::uint64_t m) {
  if (base < 2 || m == 0) throw BadParams("largest_power_at_most needs base >= 2 and m >= 1");
  std::uint64_t p = 1;
  while (p <= m / base) p *= base;
  return p;
}

std::size_t row_size(unsigned k) { return static_cast<std::size_t>((ipow(6, k) + 4) / 5); }

std::size_t row_count(unsigned k) { return static_cast<std::size_t>(ipow(5, k)); }

RowSelector selector_from_rank(unsigned k, std::uint64_t rank) {
  if (rank >= ipow(5, k)) throw BadShape("row rank out of range");
  RowSelector w;
  w.digits.assign(k, 1);
  for (unsigned j = k; j-- > 0;) {
    w.digits[j] = static_cast<int>(rank % 5) + 1;
    rank /= 5;
  }
  return w;
}

std::uint64_t rank_of(const RowSelector& w) {
  std::uint64_t rank = 0;
  for (int digit : w.digits) {
    if (digit < 1 || digit > 5) throw BadShape("selector digit outside 1..5");
    rank = rank * 5 + static_cast<std::uint64_t>(digit - 1);
  }
  return rank;
}

RowRanges row_ranges(unsigned k, const RowSelector& w) {
  if (k == 0) throw BadShape("row selector needs k >= 1");
  if (w.k() != k)
    throw BadShape("selector has " + std::to_string(w.k()) + " digits, expected " + std::to_string(k));
  RowRanges out;
  out.ranges.reserve(k);
  for (unsigned j = 1; j <= k; ++j) {
    const int digit = w.digits[j - 1];
    if (digit < 1 || digit > 5) throw BadShape("selector digit outside 1..5");
    const std::size_t block = static_cast<std::size_t>(ipow(6, k - j));
    const auto wj = static_cast<std::size_t>(digit);
    out.ranges.push_back({block * wj + 1, block * (wj + 1)});
  }
  return out;
}

TrainingSequence extract_row(const TrainingSequence& s, const RowSelector& w) {
  const auto k = exact_log6(s.size());
  if (!k || *k == 0) throw BadShape("row extraction needs |S| = 6^k with k >= 1, got " + std::to_string(s.size()));
  if (*k != w.k()) throw BadShape("selector length does not match log6|S|");
  const RowRanges rr = row_ranges(*k, w);

  std::vector<std::size_t> positions;
  positions.reserve(rr.total_size());
  positions.push_back(rr.prefix.first - 1);
  for (auto it = rr.ranges.rbegin(); it != rr.ranges.rend(); ++it)
    for (std::size_t p = it->first; p <= it->last; ++p) positions.push_back(p - 1);
  return s.select(positions);
}

std::vector<TrainingSequence> enumerate_rows_recursive(const TrainingSequence& s,
                                                       const TrainingSequence& t) {
  const auto k = exact_log6(s.size());
  if (!k) throw BadShape("recursive split needs |S| = 6^k, got " + std::to_string(s.size()));
  if (*k > kMaxEnumerationDepth) throw BadShape("recursive enumeration is limited to k <= 6");
  std::vector<TrainingSequence> out;
  out.reserve(row_count(*k));
  rows_recursive(s, t, out);
  return out;
}

std::vector<TrainingSequence> enumerate_rows_hanneke(const TrainingSequence& s,
                                                     const TrainingSequence& t) {
  if (s.size() > 3 && !exact_log(4, s.size()))
    throw BadShape("four-way split needs |S| = 4^k, got " + std::to_string(s.size()));
  std::vector<TrainingSequence> out;
  rows_hanneke(s, t, out);
  return out;
}

}  // namespace optpac
