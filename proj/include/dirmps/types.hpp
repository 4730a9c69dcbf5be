#ifndef DIRMPS_TYPES_HPP
#define DIRMPS_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirmps {

using DocId = std::string;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyPoolError : public Error {
 public:
  using Error::Error;
};

class UnsupportedMetricError : public Error {
 public:
  using Error::Error;
};

/// Ordered list of documents shown on one result page.
struct RankingAction {
  std::vector<DocId> page;

  std::size_t size() const { return page.size(); }
  bool empty() const { return page.empty(); }

  /// Throws InvalidInputError if a document appears twice.
  void validate() const;
};

/// Binary click vector over one page; clicks[i] is the click at rank i+1.
struct Observation {
  std::vector<std::uint8_t> clicks;

  std::size_t size() const { return clicks.size(); }

  /// Reads the vector left to right as a binary integer (rank 1 is the
  /// most significant bit). Used as the deterministic tie-break key.
  std::uint64_t as_integer() const {
    std::uint64_t v = 0;
    for (std::uint8_t c : clicks) v = (v << 1) | (c ? 1u : 0u);
    return v;
  }

  static Observation from_integer(std::uint64_t value, std::size_t length) {
    Observation o;
    o.clicks.resize(length);
    for (std::size_t i = 0; i < length; ++i)
      o.clicks[length - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1u);
    return o;
  }

  friend bool operator==(const Observation& a, const Observation& b) {
    return a.clicks == b.clicks;
  }
  friend bool operator<(const Observation& a, const Observation& b) {
    if (a.clicks.size() != b.clicks.size())
      return a.clicks.size() < b.clicks.size();
    return a.as_integer() < b.as_integer();
  }
};

/// Examination probabilities b_1..b_M per rank, non-increasing, in (0,1].
struct RankBias {
  std::vector<double> biases;

  std::size_t size() const { return biases.size(); }
  double at_rank(std::size_t rank) const { return biases.at(rank - 1); }

  /// The DCG-style bias b_i = 1 / log2(i + 1); b_1 = 1.
  static RankBias dcg_default(std::size_t m);

  void validate() const;
};

}  // namespace dirmps

#endif  // DIRMPS_TYPES_HPP
