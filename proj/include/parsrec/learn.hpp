#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace parsrec {

/// Ridge-regression model: y ≈ w·x + b, intercept unpenalized.
struct LinearModel {
    std::vector<double> weights;
    double intercept = 0.0;
};

/// L2-regularized logistic model. `degenerate` marks pairs whose training
/// labels were all identical; those carry a Laplace-smoothed constant
/// probability in the intercept.
struct LogisticModel {
    std::vector<double> weights;
    double intercept = 0.0;
    bool degenerate = false;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 12;
    int min_leaf = 2;
    int features_per_split = 0;  // 0 = ceil(sqrt(p))
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;                // majority label, leaves only
    double weighted_decrease = 0;  // Gini decrease scaled by node fraction
};

struct Tree {
    std::vector<TreeNode> nodes;
};

struct Forest {
    std::vector<Tree> trees;
    ForestParams params;
    int n_features = 0;
};

/// Minimizes ||Xw + b - y||^2 + lambda*||w||^2 via normal equations on the
/// centered system. With lambda = 0 and a singular system the minimum-norm
/// solution is returned. Deterministic.
LinearModel fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda);

double predict_linear(const LinearModel& m, const std::vector<double>& x);

/// Newton ascent on the L2-penalized log-likelihood from zero initialization,
/// stopping when the gradient infinity-norm drops below tol. All-same-label
/// input yields an intercept-only degenerate model with Laplace-smoothed
/// constant probability.
LogisticModel fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double lambda = 1e-3, double tol = 1e-6, int max_iter = 500);

/// Overflow-safe sigmoid of w·x + b.
double predict_proba(const LogisticModel& m, const std::vector<double>& x);

/// CART forest: Gini impurity, bootstrap rows, per-tree sub-seeds derived
/// from the master seed so results are independent of scheduling.
Forest fit_forest(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                  const ForestParams& params);

int predict_tree(const Tree& t, const Eigen::RowVectorXd& x);

/// Per-feature sum of weighted Gini decreases, averaged over trees, then
/// normalized to sum 1 (an all-zero vector stays all-zero).
std::vector<double> forest_importance(const Forest& f);

}  // namespace parsrec
