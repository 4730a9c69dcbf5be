#include "dirmps/relevance_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace dirmps {

namespace {
constexpr double kRidge = 1e-8;
constexpr double kSingularTol = 1e-12;
}  // namespace

void ScoreEnsemble::validate() const {
  if (doc_ids.empty()) throw InvalidInputError("ensemble has no documents");
  if (scores.cols() < 2)
    throw InsufficientSamplesError(
        "ensemble needs at least 2 retrieval methods");
  if (static_cast<std::size_t>(scores.rows()) != doc_ids.size())
    throw InvalidInputError("ensemble rows do not match doc_ids");
  if (!scores.allFinite())
    throw InvalidInputError("ensemble contains non-finite scores");
}

std::ptrdiff_t RelevanceBelief::index_of(const DocId& doc) const {
  auto it = std::find(doc_ids.begin(), doc_ids.end(), doc);
  if (it == doc_ids.end()) return -1;
  return it - doc_ids.begin();
}

void RelevanceBelief::validate(double tol) const {
  const auto n = static_cast<Eigen::Index>(doc_ids.size());
  if (mean.size() != n || cov.rows() != n || cov.cols() != n)
    throw InvalidInputError("belief dimensions disagree");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(mean[i] >= 0.0 && mean[i] <= 1.0))
      throw InvalidInputError("belief mean outside [0,1]");
    if (cov(i, i) < 0.0)
      throw InvalidInputError("negative variance in belief");
  }
  if (n > 0) {
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > tol)
      throw InvalidInputError("belief covariance not symmetric");
    if (min_eigenvalue(cov) < -tol)
      throw InvalidInputError("belief covariance not PSD");
  }
}

ScoreEnsemble min_max_normalize(const ScoreEnsemble& ensemble) {
  ensemble.validate();
  ScoreEnsemble out = ensemble;
  for (Eigen::Index c = 0; c < out.scores.cols(); ++c) {
    const double lo = out.scores.col(c).minCoeff();
    const double hi = out.scores.col(c).maxCoeff();
    if (hi > lo) {
      out.scores.col(c) = (out.scores.col(c).array() - lo) / (hi - lo);
    } else {
      // A flat column carries no signal; midpoint rather than all-0.
      out.scores.col(c).setConstant(0.5);
    }
  }
  return out;
}

RelevanceBelief build_belief(const ScoreEnsemble& ensemble,
                             bool cross_doc_covariance) {
  ensemble.validate();
  if (ensemble.scores.minCoeff() < 0.0 || ensemble.scores.maxCoeff() > 1.0)
    throw InvalidInputError("build_belief expects scores normalized to [0,1]");

  const Eigen::Index n = ensemble.scores.rows();
  const Eigen::Index m = ensemble.scores.cols();

  RelevanceBelief belief;
  belief.doc_ids = ensemble.doc_ids;
  belief.mean = ensemble.scores.rowwise().mean();

  const Eigen::MatrixXd centered =
      ensemble.scores.colwise() - belief.mean;
  if (cross_doc_covariance) {
    belief.cov =
        centered * centered.transpose() / static_cast<double>(m - 1);
    belief.cov = 0.5 * (belief.cov + belief.cov.transpose());
    if (min_eigenvalue(belief.cov) < -1e-9)
      belief.cov = project_to_psd(belief.cov);
  } else {
    Eigen::VectorXd var =
        centered.array().square().rowwise().sum() / static_cast<double>(m - 1);
    belief.cov = var.asDiagonal();
  }
  for (Eigen::Index i = 0; i < n; ++i)
    belief.cov(i, i) = std::max(belief.cov(i, i), 0.0);
  return belief;
}

RelevanceBelief condition_on_observation(const RelevanceBelief& belief,
                                         const RankingAction& action,
                                         const Observation& obs) {
  action.validate();
  if (obs.size() != action.size())
    throw InvalidInputError("observation length does not match action");

  const Eigen::Index n = static_cast<Eigen::Index>(belief.size());
  const Eigen::Index k = static_cast<Eigen::Index>(action.size());

  std::vector<Eigen::Index> ranked;
  ranked.reserve(action.size());
  std::vector<bool> is_ranked(belief.size(), false);
  for (const DocId& d : action.page) {
    const std::ptrdiff_t idx = belief.index_of(d);
    if (idx < 0)
      throw InvalidInputError("ranked document not in belief: " + d);
    ranked.push_back(static_cast<Eigen::Index>(idx));
    is_ranked[static_cast<std::size_t>(idx)] = true;
  }
  std::vector<Eigen::Index> rest;
  rest.reserve(belief.size() - action.size());
  for (Eigen::Index i = 0; i < n; ++i)
    if (!is_ranked[static_cast<std::size_t>(i)]) rest.push_back(i);
  const Eigen::Index r = static_cast<Eigen::Index>(rest.size());

  Eigen::VectorXd mean_a(k), mean_r(r);
  Eigen::MatrixXd s_aa(k, k), s_ra(r, k), s_rr(r, r);
  for (Eigen::Index i = 0; i < k; ++i) {
    mean_a[i] = belief.mean[ranked[i]];
    for (Eigen::Index j = 0; j < k; ++j)
      s_aa(i, j) = belief.cov(ranked[i], ranked[j]);
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    mean_r[i] = belief.mean[rest[i]];
    for (Eigen::Index j = 0; j < k; ++j)
      s_ra(i, j) = belief.cov(rest[i], ranked[j]);
    for (Eigen::Index j = 0; j < r; ++j)
      s_rr(i, j) = belief.cov(rest[i], rest[j]);
  }

  Eigen::VectorXd innovation(k);
  for (Eigen::Index i = 0; i < k; ++i)
    innovation[i] = static_cast<double>(obs.clicks[i]) - mean_a[i];

  Eigen::LDLT<Eigen::MatrixXd> ldlt(s_aa);
  bool usable = ldlt.info() == Eigen::Success;
  if (usable && k > 0) usable = ldlt.vectorD().minCoeff() > kSingularTol;
  if (!usable) {
    Eigen::MatrixXd ridged = s_aa;
    ridged.diagonal().array() += kRidge;
    ldlt.compute(ridged);
  }

  RelevanceBelief post;
  post.doc_ids.reserve(rest.size());
  for (Eigen::Index i : rest) post.doc_ids.push_back(belief.doc_ids[i]);
  if (k == 0) {
    post.mean = mean_r;
    post.cov = s_rr;
    return post;
  }

  post.mean = mean_r + s_ra * ldlt.solve(innovation);
  post.cov = s_rr - s_ra * ldlt.solve(s_ra.transpose());
  post.cov = 0.5 * (post.cov + post.cov.transpose());
  for (Eigen::Index i = 0; i < r; ++i) {
    post.mean[i] = std::clamp(post.mean[i], 0.0, 1.0);
    // Schur complements of PSD matrices stay PSD; only roundoff can push
    // a diagonal entry below zero.
    post.cov(i, i) = std::max(post.cov(i, i), 0.0);
  }
  return post;
}

Eigen::MatrixXd project_to_psd(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out =
      es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace dirmps
