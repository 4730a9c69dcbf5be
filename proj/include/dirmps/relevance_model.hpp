#ifndef DIRMPS_RELEVANCE_MODEL_HPP
#define DIRMPS_RELEVANCE_MODEL_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "dirmps/types.hpp"

namespace dirmps {

/// Raw retrieval scores for one topic's document pool.
/// Rows are documents, columns are retrieval methods.
struct ScoreEnsemble {
  std::vector<DocId> doc_ids;
  Eigen::MatrixXd scores;

  std::size_t num_docs() const { return doc_ids.size(); }
  std::size_t num_methods() const {
    return static_cast<std::size_t>(scores.cols());
  }

  /// At least 1 document, at least 2 methods, all scores finite,
  /// matrix dimensions consistent with doc_ids.
  void validate() const;
};

/// Gaussian belief over document relevance: mean probabilities of
/// relevance and a symmetric PSD covariance over the pool.
struct RelevanceBelief {
  std::vector<DocId> doc_ids;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  std::size_t size() const { return doc_ids.size(); }

  /// Index of `doc` in this belief, or -1.
  std::ptrdiff_t index_of(const DocId& doc) const;

  /// Mean in [0,1], cov symmetric PSD within `tol`, dimensions agree.
  void validate(double tol = 1e-9) const;
};

/// Linearly maps each score column onto [0,1]. A column whose values are
/// all equal carries no ranking signal and maps to the midpoint 0.5.
ScoreEnsemble min_max_normalize(const ScoreEnsemble& ensemble);

/// Builds the belief from a normalized ensemble: per-document mean over
/// methods and unbiased (n-1) sample variance. With cross_doc_covariance
/// the full between-document sample covariance over methods is kept
/// (method agreement acts as the correlation signal); otherwise the
/// covariance is diagonal.
RelevanceBelief build_belief(const ScoreEnsemble& ensemble,
                             bool cross_doc_covariance);

/// Conditions the belief on the clicks observed for a ranked page and
/// returns the belief over the remaining (non-ranked) documents:
///   mean'  = r_rest + S_ra S_aa^-1 (o - r_a)
///   cov'   = S_rr - S_ra S_aa^-1 S_ar
/// Posterior means are clamped to [0,1] after the full update. A singular
/// S_aa is handled by a ridge of 1e-8 on its diagonal, never an error.
/// Ranked documents are consumed: they do not appear in the result.
RelevanceBelief condition_on_observation(const RelevanceBelief& belief,
                                         const RankingAction& action,
                                         const Observation& obs);

/// Nearest PSD matrix by eigenvalue clipping (symmetrizes first).
Eigen::MatrixXd project_to_psd(const Eigen::MatrixXd& m);

/// Minimum eigenvalue of the symmetrized matrix; >= -tol means PSD-ish.
double min_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace dirmps

#endif  // DIRMPS_RELEVANCE_MODEL_HPP
