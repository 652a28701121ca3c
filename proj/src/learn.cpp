#include "parsrec/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace parsrec {

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

LinearModel fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
    if (X.rows() != y.size())
        throw std::invalid_argument("fit_ridge: row count does not match target length");
    if (X.rows() < 1) throw std::invalid_argument("fit_ridge: empty data");
    if (lambda < 0) throw std::invalid_argument("fit_ridge: negative lambda");

    const Eigen::Index n = X.rows(), p = X.cols();
    Eigen::RowVectorXd x_mean = X.colwise().mean();
    double y_mean = y.mean();
    Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    Eigen::VectorXd yc = y.array() - y_mean;

    Eigen::VectorXd w;
    if (lambda == 0.0) {
        // Minimum-norm least squares; handles rank-deficient systems.
        w = Xc.completeOrthogonalDecomposition().solve(yc);
    } else {
        Eigen::MatrixXd A = Xc.transpose() * Xc;
        A.diagonal().array() += lambda;
        w = A.ldlt().solve(Xc.transpose() * yc);
    }

    LinearModel m;
    m.weights = to_std(w);
    m.intercept = y_mean - x_mean.dot(w);
    (void)n;
    return m;
}

double predict_linear(const LinearModel& m, const std::vector<double>& x) {
    if (x.size() != m.weights.size())
        throw std::invalid_argument("predict_linear: dimension mismatch");
    return std::inner_product(x.begin(), x.end(), m.weights.begin(), m.intercept);
}

LogisticModel fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double lambda, double tol, int max_iter) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n < 1) throw std::invalid_argument("fit_logistic: empty data");
    if (y.size() != n)
        throw std::invalid_argument("fit_logistic: row count does not match label length");

    double pos = y.sum();
    if (pos == 0.0 || pos == static_cast<double>(n)) {
        // Degenerate labels: Laplace-smoothed constant probability.
        double lo = 1.0 / (n + 2.0), hi = 1.0 - lo;
        double rate = std::clamp(pos / n, lo, hi);
        LogisticModel m;
        m.weights.assign(p, 0.0);
        m.intercept = std::log(rate / (1.0 - rate));
        m.degenerate = true;
        return m;
    }

    // Newton iterations on theta = [w; b] with penalty on w only. A fixed
    // tiny diagonal bump keeps the Hessian invertible on separable data.
    Eigen::MatrixXd Xa(n, p + 1);
    Xa.leftCols(p) = X;
    Xa.col(p).setOnes();
    Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p + 1, lambda);
    penalty(p) = 0.0;

    auto neg_loglik = [&](const Eigen::VectorXd& theta) {
        Eigen::VectorXd z = Xa * theta;
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            // log(1 + exp(z)) computed stably
            double zi = z(i);
            double lse = zi > 0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
            ll += y(i) * zi - lse;
        }
        return -ll + 0.5 * lambda * theta.head(p).squaredNorm();
    };

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
    double loss = neg_loglik(theta);
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd z = Xa * theta;
        Eigen::VectorXd prob = z.unaryExpr([](double v) { return sigmoid(v); });
        Eigen::VectorXd grad = Xa.transpose() * (y - prob) - penalty.cwiseProduct(theta);
        if (grad.lpNorm<Eigen::Infinity>() < tol) break;

        Eigen::VectorXd wdiag = prob.array() * (1.0 - prob.array());
        Eigen::MatrixXd H = Xa.transpose() * wdiag.asDiagonal() * Xa;
        H.diagonal() += penalty;
        H.diagonal().array() += 1e-10;
        Eigen::VectorXd step = H.ldlt().solve(grad);

        // Halve the step until the penalized loss does not increase.
        double scale = 1.0;
        Eigen::VectorXd cand = theta + step;
        double cand_loss = neg_loglik(cand);
        int halvings = 0;
        while (cand_loss > loss && halvings < 40) {
            scale *= 0.5;
            cand = theta + scale * step;
            cand_loss = neg_loglik(cand);
            ++halvings;
        }
        if (cand_loss > loss) break;
        theta = cand;
        loss = cand_loss;
    }

    LogisticModel m;
    m.weights = to_std(theta.head(p));
    m.intercept = theta(p);
    return m;
}

double predict_proba(const LogisticModel& m, const std::vector<double>& x) {
    if (x.size() != m.weights.size())
        throw std::invalid_argument("predict_proba: dimension mismatch");
    double z = std::inner_product(x.begin(), x.end(), m.weights.begin(), m.intercept);
    return sigmoid(z);
}

namespace {

double gini_from_counts(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double acc = 0.0;
    for (int c : counts) {
        double f = static_cast<double>(c) / total;
        acc += f * f;
    }
    return 1.0 - acc;
}

struct TreeBuilder {
    const Eigen::MatrixXd& X;
    const std::vector<int>& labels;
    int n_labels;
    const ForestParams& params;
    int mtry;
    std::mt19937_64 rng;
    Tree tree;
    double root_size = 0;

    int build(std::vector<int>& idx, int depth) {
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        std::vector<int> counts(n_labels, 0);
        for (int i : idx) ++counts[labels[i]];
        const int n = static_cast<int>(idx.size());
        const double node_gini = gini_from_counts(counts, n);
        const int majority =
            static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());

        bool can_split = depth < params.max_depth && n >= 2 * params.min_leaf && node_gini > 0.0;
        int best_feature = -1;
        double best_threshold = 0.0, best_decrease = 0.0;

        if (can_split) {
            // Sample mtry candidate features without replacement.
            const int p = static_cast<int>(X.cols());
            std::vector<int> feats(p);
            std::iota(feats.begin(), feats.end(), 0);
            for (int k = 0; k < mtry; ++k) {
                std::uniform_int_distribution<int> pick(k, p - 1);
                std::swap(feats[k], feats[pick(rng)]);
            }
            std::vector<std::pair<double, int>> vals(n);
            std::vector<int> left_counts(n_labels);
            for (int k = 0; k < mtry; ++k) {
                const int f = feats[k];
                for (int i = 0; i < n; ++i) vals[i] = {X(idx[i], f), labels[idx[i]]};
                std::sort(vals.begin(), vals.end());
                std::fill(left_counts.begin(), left_counts.end(), 0);
                int nl = 0;
                for (int i = 0; i + 1 < n; ++i) {
                    ++left_counts[vals[i].second];
                    ++nl;
                    if (vals[i].first == vals[i + 1].first) continue;
                    const int nr = n - nl;
                    if (nl < params.min_leaf || nr < params.min_leaf) continue;
                    double gl = gini_from_counts(left_counts, nl);
                    std::vector<int> right_counts(n_labels);
                    for (int c = 0; c < n_labels; ++c) right_counts[c] = counts[c] - left_counts[c];
                    double gr = gini_from_counts(right_counts, nr);
                    double decrease = node_gini -
                                      (static_cast<double>(nl) / n) * gl -
                                      (static_cast<double>(nr) / n) * gr;
                    // Tie-break on the threshold value, which depends only on
                    // column contents: split choice (and hence importance) is
                    // then invariant under feature permutation when every
                    // feature is a candidate.
                    double threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                    if (decrease > best_decrease ||
                        (decrease == best_decrease && best_feature >= 0 &&
                         threshold < best_threshold)) {
                        best_decrease = decrease;
                        best_feature = f;
                        best_threshold = threshold;
                    }
                }
            }
        }

        if (best_feature < 0 || best_decrease <= 0.0) {
            tree.nodes[node_id].label = majority;
            return node_id;
        }

        std::vector<int> left_idx, right_idx;
        for (int i : idx) {
            (X(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
        }
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        tree.nodes[node_id].weighted_decrease = (n / root_size) * best_decrease;
        int l = build(left_idx, depth + 1);
        int r = build(right_idx, depth + 1);
        tree.nodes[node_id].left = l;
        tree.nodes[node_id].right = r;
        return node_id;
    }
};

}  // namespace

Forest fit_forest(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                  const ForestParams& params) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (n < 1 || p < 1) throw std::invalid_argument("fit_forest: empty data");
    if (static_cast<int>(labels.size()) != n)
        throw std::invalid_argument("fit_forest: label length mismatch");

    int n_labels = 1 + *std::max_element(labels.begin(), labels.end());
    int mtry = params.features_per_split > 0
                   ? std::min(params.features_per_split, p)
                   : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p))));

    Forest forest;
    forest.params = params;
    forest.n_features = p;
    forest.trees.resize(params.n_trees);
    for (int t = 0; t < params.n_trees; ++t) {
        // Per-tree sub-seed keeps output independent of evaluation order.
        std::seed_seq seq{params.seed, static_cast<std::uint64_t>(t)};
        TreeBuilder builder{X, labels, n_labels, params, mtry, std::mt19937_64(seq), {}, 0};
        std::vector<int> idx(n);
        std::uniform_int_distribution<int> row(0, n - 1);
        for (int i = 0; i < n; ++i) idx[i] = row(builder.rng);
        builder.root_size = static_cast<double>(n);
        builder.build(idx, 0);
        forest.trees[t] = std::move(builder.tree);
    }
    return forest;
}

int predict_tree(const Tree& t, const Eigen::RowVectorXd& x) {
    int node = 0;
    while (t.nodes[node].feature >= 0) {
        const TreeNode& nd = t.nodes[node];
        node = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    return t.nodes[node].label;
}

std::vector<double> forest_importance(const Forest& f) {
    std::vector<double> imp(f.n_features, 0.0);
    for (const Tree& t : f.trees) {
        for (const TreeNode& nd : t.nodes) {
            if (nd.feature >= 0) imp[nd.feature] += nd.weighted_decrease;
        }
    }
    double total = 0.0;
    for (double& v : imp) {
        v /= std::max<std::size_t>(f.trees.size(), 1);
        total += v;
    }
    if (total > 0.0) {
        for (double& v : imp) v /= total;
    }
    return imp;
}

}  // namespace parsrec
