#include "dirmps/types.hpp"

#include <cmath>
#include <unordered_set>

namespace dirmps {

void RankingAction::validate() const {
  std::unordered_set<DocId> seen;
  for (const DocId& d : page) {
    if (!seen.insert(d).second)
      throw InvalidInputError("duplicate document in page: " + d);
  }
}

RankBias RankBias::dcg_default(std::size_t m) {
  RankBias b;
  b.biases.reserve(m);
  for (std::size_t i = 1; i <= m; ++i)
    b.biases.push_back(1.0 / std::log2(static_cast<double>(i) + 1.0));
  return b;
}

void RankBias::validate() const {
  double prev = 1.0;
  for (double b : biases) {
    if (!(b > 0.0 && b <= 1.0))
      throw InvalidInputError("rank bias outside (0,1]");
    if (b > prev + 1e-15)
      throw InvalidInputError("rank bias must be non-increasing");
    prev = b;
  }
}

}  // namespace dirmps
