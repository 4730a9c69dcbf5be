#include "dirmps/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace dirmps {
namespace oracle {

// Everything below recomputes the model quantities from their defining
// formulas with no planner code on the path; agreement with the planner
// is the point of this module, shared helpers would defeat it.

namespace {

struct Dist {
  std::vector<DocId> docs;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

double page_utility(const std::vector<std::size_t>& page, const Dist& d) {
  double u = 0.0;
  for (std::size_t i = 0; i < page.size(); ++i) {
    const double r = d.mean[static_cast<Eigen::Index>(page[i])];
    const double var = d.cov(static_cast<Eigen::Index>(page[i]),
                             static_cast<Eigen::Index>(page[i]));
    const double gain = std::pow(2.0, r) - 1.0 +
                        std::pow(2.0, r - 1.0) * std::pow(std::log(2.0), 2) *
                            var;
    u += gain / (std::log(static_cast<double>(i) + 2.0) / std::log(2.0));
  }
  return u;
}

double observation_probability(const std::vector<std::size_t>& page,
                               const Observation& obs, const Dist& d,
                               const RankBias& bias) {
  double prob = 1.0;
  for (std::size_t i = 0; i < page.size(); ++i) {
    const double click =
        bias.biases[i] * d.mean[static_cast<Eigen::Index>(page[i])];
    prob *= obs.clicks[i] ? click : 1.0 - click;
  }
  return prob;
}

Dist condition(const Dist& d, const std::vector<std::size_t>& page,
               const Observation& obs) {
  const Eigen::Index n = d.mean.size();
  const Eigen::Index k = static_cast<Eigen::Index>(page.size());
  std::vector<bool> ranked(static_cast<std::size_t>(n), false);
  for (std::size_t i : page) ranked[i] = true;

  std::vector<Eigen::Index> rest;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!ranked[static_cast<std::size_t>(i)]) rest.push_back(i);
  const Eigen::Index r = static_cast<Eigen::Index>(rest.size());

  Eigen::MatrixXd s_aa(k, k), s_ra(r, k), s_rr(r, r);
  Eigen::VectorXd innov(k), mean_r(r);
  for (Eigen::Index i = 0; i < k; ++i) {
    innov[i] = static_cast<double>(obs.clicks[static_cast<std::size_t>(i)]) -
               d.mean[static_cast<Eigen::Index>(page[static_cast<std::size_t>(i)])];
    for (Eigen::Index j = 0; j < k; ++j)
      s_aa(i, j) = d.cov(static_cast<Eigen::Index>(page[static_cast<std::size_t>(i)]),
                         static_cast<Eigen::Index>(page[static_cast<std::size_t>(j)]));
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    mean_r[i] = d.mean[rest[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < k; ++j)
      s_ra(i, j) = d.cov(rest[static_cast<std::size_t>(i)],
                         static_cast<Eigen::Index>(page[static_cast<std::size_t>(j)]));
    for (Eigen::Index j = 0; j < r; ++j)
      s_rr(i, j) =
          d.cov(rest[static_cast<std::size_t>(i)], rest[static_cast<std::size_t>(j)]);
  }

  const Eigen::MatrixXd inv = s_aa.inverse();
  Dist out;
  for (Eigen::Index i : rest)
    out.docs.push_back(d.docs[static_cast<std::size_t>(i)]);
  out.mean = mean_r + s_ra * inv * innov;
  out.cov = s_rr - s_ra * inv * s_ra.transpose();
  for (Eigen::Index i = 0; i < r; ++i)
    out.mean[i] = std::min(1.0, std::max(0.0, out.mean[i]));
  return out;
}

void ordered_selections(std::size_t n, std::size_t k,
                        const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> chosen;
  std::vector<bool> used(n, false);
  auto rec = [&](auto&& self) -> void {
    if (chosen.size() == k) {
      visit(chosen);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      chosen.push_back(i);
      self(self);
      chosen.pop_back();
      used[i] = false;
    }
  };
  rec(rec);
}

// Best final-page utility by trying every ordered selection.
double best_final_page(const Dist& d, std::size_t m,
                       std::vector<std::size_t>* argmax) {
  double best = -std::numeric_limits<double>::infinity();
  ordered_selections(static_cast<std::size_t>(d.mean.size()), m,
                     [&](const std::vector<std::size_t>& page) {
                       const double u = page_utility(page, d);
                       if (u > best) {
                         best = u;
                         if (argmax) *argmax = page;
                       }
                     });
  return best;
}

RankingAction to_action(const std::vector<std::size_t>& page,
                        const std::vector<DocId>& docs) {
  RankingAction a;
  for (std::size_t i : page) a.page.push_back(docs[i]);
  return a;
}

}  // namespace

std::pair<double, OraclePlan> exhaustive_bellman(const RelevanceBelief& belief,
                                                 const PlanConfig& config,
                                                 const RankBias& bias) {
  config.validate(belief.size());
  if (belief.size() > 6 || config.page_size > 2 || config.pages > 2)
    throw CapacityError("oracle limits: N <= 6, M <= 2, T <= 2");
  if (config.obs_mass != 1.0)
    throw InvalidInputError("oracle evaluates the full observation space");

  Dist prior{belief.doc_ids, belief.mean, belief.cov};
  const auto m = static_cast<std::size_t>(config.page_size);

  if (config.pages == 1) {
    std::vector<std::size_t> page;
    const double u = best_final_page(prior, m, &page);
    return {u, {to_action(page, prior.docs), {}}};
  }

  double best = -std::numeric_limits<double>::infinity();
  OraclePlan best_plan;
  ordered_selections(belief.size(), m, [&](const std::vector<std::size_t>& p1) {
    double u = page_utility(p1, prior);
    std::map<Observation, RankingAction> table;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << m); ++v) {
      const Observation obs = Observation::from_integer(v, m);
      const double prob = observation_probability(p1, obs, prior, bias);
      const Dist posterior = condition(prior, p1, obs);
      std::vector<std::size_t> p2;
      const double u2 = best_final_page(posterior, m, &p2);
      u += config.lambda * prob * u2;
      table[obs] = to_action(p2, posterior.docs);
    }
    if (u > best) {
      best = u;
      best_plan = {to_action(p1, prior.docs), std::move(table)};
    }
  });
  return {best, best_plan};
}

double exhaustive_esl(const std::vector<double>& joint,
                      const std::vector<std::size_t>& ranking) {
  double sum = 0.0;
  for (double p : joint) {
    if (!(p >= 0.0)) throw InvalidInputError("negative joint probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidInputError("joint table does not sum to 1");

  double total = 0.0;
  for (std::size_t v = 0; v < joint.size(); ++v) {
    for (std::size_t rank = 0; rank < ranking.size(); ++rank) {
      if ((v >> ranking[rank]) & 1u) {
        total += joint[v] * static_cast<double>(rank);
        break;
      }
    }
  }
  return total;
}

}  // namespace oracle
}  // namespace dirmps
