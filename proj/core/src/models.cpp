#include "burstwatch/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "burstwatch/evaluation.hpp"
#include "burstwatch/rng.hpp"

namespace burstwatch::models {

using ordered_json = nlohmann::ordered_json;

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::WeightedLinearSvm: return "weighted-linear-svm";
        case ModelKind::LinearRegression: return "linear-regression";
        case ModelKind::Cart: return "cart";
    }
    return "?";
}

ModelKind model_kind_from_string(std::string_view s) {
    if (s == "weighted-linear-svm") return ModelKind::WeightedLinearSvm;
    if (s == "linear-regression") return ModelKind::LinearRegression;
    if (s == "cart") return ModelKind::Cart;
    throw ConfigError("unknown model kind: " + std::string(s));
}

std::vector<double> FeatureScaler::apply(std::span<const double> x) const {
    if (x.size() != mean.size())
        throw ContractViolation("feature vector width does not match the model schema");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = stddev[i] > 0.0 ? (x[i] - mean[i]) / stddev[i] : 0.0;
    return out;
}

FeatureScaler fit_scaler(const Dataset& data) {
    FeatureScaler scaler;
    if (data.empty()) return scaler;
    const std::size_t d = data.front().x.size();
    scaler.mean.assign(d, 0.0);
    scaler.stddev.assign(d, 0.0);
    for (const auto& inst : data)
        for (std::size_t i = 0; i < d; ++i) scaler.mean[i] += inst.x[i];
    const double n = static_cast<double>(data.size());
    for (std::size_t i = 0; i < d; ++i) scaler.mean[i] /= n;
    for (const auto& inst : data)
        for (std::size_t i = 0; i < d; ++i) {
            const double dv = inst.x[i] - scaler.mean[i];
            scaler.stddev[i] += dv * dv;
        }
    for (std::size_t i = 0; i < d; ++i) scaler.stddev[i] = std::sqrt(scaler.stddev[i] / n);
    return scaler;
}

LinearParams train_weighted_svm(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, int positive_weight,
                                const TrainingConfig& config) {
    if (x.empty() || x.size() != y.size())
        throw ContractViolation("training set shape mismatch");
    bool has_pos = false, has_neg = false;
    for (int label : y) (label > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw DegenerateDataError("weighted SVM needs both classes in the training set");

    const std::size_t n = x.size();
    const std::size_t d = x.front().size();
    const std::size_t da = d + 1;  // augmented constant column carries the bias
    const double lambda = 1.0 / (config.reg_c * static_cast<double>(n));
    const double radius = 1.0 / std::sqrt(lambda);

    std::vector<double> theta(da, 0.0);
    std::vector<double> avg(da, 0.0);
    std::vector<double> grad(da);
    const int avg_from = std::max(1, config.epochs / 2);
    int averaged = 0;

    for (int t = 1; t <= config.epochs; ++t) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double score = theta[d];
            const auto& xi = x[i];
            for (std::size_t j = 0; j < d; ++j) score += theta[j] * xi[j];
            const double yi = y[i] > 0 ? 1.0 : -1.0;
            if (yi * score < 1.0) {
                const double u = y[i] > 0 ? static_cast<double>(positive_weight) : 1.0;
                for (std::size_t j = 0; j < d; ++j) grad[j] += u * yi * xi[j];
                grad[d] += u * yi;
            }
        }
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double shrink = 1.0 - 1.0 / static_cast<double>(t);  // eta*lambda == 1/t
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < da; ++j) {
            theta[j] = shrink * theta[j] + eta * grad[j] / static_cast<double>(n);
            norm_sq += theta[j] * theta[j];
        }
        if (norm_sq > radius * radius) {
            const double scale = radius / std::sqrt(norm_sq);
            for (double& v : theta) v *= scale;
        }
        if (t >= avg_from) {
            ++averaged;
            for (std::size_t j = 0; j < da; ++j) avg[j] += (theta[j] - avg[j]) / averaged;
        }
    }

    LinearParams params;
    params.weights.assign(avg.begin(), avg.begin() + static_cast<std::ptrdiff_t>(d));
    params.bias = avg[d];
    return params;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double train_fraction,
                                             std::uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ConfigError("train fraction must lie strictly between 0 and 1");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < data.size(); ++i)
        (data[i].label > 0 ? pos : neg).push_back(i);

    Rng rng(seed);
    auto shuffle = [&rng](std::vector<std::size_t>& idx) {
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.below(i)]);
    };
    shuffle(pos);
    shuffle(neg);

    Dataset tns, tts;
    auto take = [&](const std::vector<std::size_t>& idx) {
        if (idx.empty()) return;
        std::size_t n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(idx.size())));
        if (idx.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        else n_train = 1;
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_train ? tns : tts).push_back(data[idx[i]]);
    };
    take(pos);
    take(neg);
    return {std::move(tns), std::move(tts)};
}

namespace {

double f_beta_or_zero(std::span<const int> predicted, std::span<const int> truth,
                      double beta, double* precision_out, double* recall_out) {
    const auto metrics = eval::precision_recall_f(predicted, truth, beta);
    if (precision_out) *precision_out = metrics.precision.value_or(0.0);
    if (recall_out) *recall_out = metrics.recall.value_or(0.0);
    return metrics.f.value_or(0.0);
}

int linear_label(const LinearParams& params, std::span<const double> scaled,
                 double* raw_score) {
    double score = params.bias;
    for (std::size_t i = 0; i < scaled.size(); ++i) score += params.weights[i] * scaled[i];
    if (raw_score) *raw_score = score;
    return score >= 0.0 ? 1 : -1;
}

}  // namespace

std::vector<TrainedModel> optimize_classifier_multi(const Dataset& tns, const Dataset& tts,
                                                    const TrainingConfig& config,
                                                    std::span<const double> betas) {
    if (betas.empty()) throw ConfigError("no F-beta objectives requested");
    if (tns.empty() || tts.empty())
        throw DegenerateDataError("optimize_classifier needs non-empty TNS and TTS");
    std::int64_t tns_pos = 0, tns_neg = 0, tts_pos = 0;
    for (const auto& inst : tns) (inst.label > 0 ? tns_pos : tns_neg) += 1;
    for (const auto& inst : tts) tts_pos += inst.label > 0 ? 1 : 0;
    if (tns_pos == 0 || tns_neg == 0)
        throw DegenerateDataError("TNS must contain both classes");
    if (tts_pos == 0) throw DegenerateDataError("TTS has no positive instance; F undefined");

    const std::int64_t pnr = (tns_neg + tns_pos - 1) / tns_pos;  // ceil
    const int grid_max = static_cast<int>(2 * std::max<std::int64_t>(pnr, 1));
    if (grid_max < 1) throw ConfigError("empty class-weight grid");

    FeatureScaler scaler = fit_scaler(tns);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    xs.reserve(tns.size());
    for (const auto& inst : tns) {
        xs.push_back(scaler.apply(inst.x));
        ys.push_back(inst.label);
    }
    std::vector<std::vector<double>> xt;
    std::vector<int> yt;
    xt.reserve(tts.size());
    for (const auto& inst : tts) {
        xt.push_back(scaler.apply(inst.x));
        yt.push_back(inst.label);
    }
    const double prior = static_cast<double>(tns_pos + tts_pos) /
                         static_cast<double>(tns.size() + tts.size());

    std::vector<TrainedModel> out(betas.size());
    std::vector<double> f_max(betas.size(), 0.0);
    std::vector<bool> improved(betas.size(), false);
    for (std::size_t b = 0; b < betas.size(); ++b) {
        out[b].kind = ModelKind::WeightedLinearSvm;
        out[b].task = features::Task::BurstClassification;
        out[b].scaler = scaler;
        out[b].beta = betas[b];
        out[b].train_positive_fraction = prior;
    }

    std::vector<int> predicted(tts.size());
    for (int w = 1; w <= grid_max; ++w) {
        LinearParams candidate = train_weighted_svm(xs, ys, w, config);
        for (std::size_t i = 0; i < xt.size(); ++i)
            predicted[i] = linear_label(candidate, xt[i], nullptr);
        for (std::size_t b = 0; b < betas.size(); ++b) {
            WeightTraceRow row;
            row.w = w;
            row.f = f_beta_or_zero(predicted, yt, betas[b], &row.precision, &row.recall);
            out[b].trace.push_back(row);
            if (row.f > f_max[b]) {  // strict improvement keeps the smallest tied w
                f_max[b] = row.f;
                out[b].params = candidate;
                out[b].chosen_weight = w;
                improved[b] = true;
            }
        }
    }
    for (std::size_t b = 0; b < betas.size(); ++b) {
        if (!improved[b]) {
            // every grid point scored 0; fall back to the unweighted classifier
            out[b].params = train_weighted_svm(xs, ys, 1, config);
            out[b].chosen_weight = 1;
        }
        out[b].tts_f = f_max[b];
    }
    return out;
}

TrainedModel optimize_classifier(const Dataset& tns, const Dataset& tts,
                                 const TrainingConfig& config) {
    const double beta[] = {config.beta};
    return std::move(optimize_classifier_multi(tns, tts, config, beta).front());
}

int predict_label(const TrainedModel& model, std::span<const double> x, double* raw_score) {
    if (model.kind != ModelKind::WeightedLinearSvm)
        throw ContractViolation("predict_label requires a classifier model");
    const auto scaled = model.scaler.apply(x);
    return linear_label(std::get<LinearParams>(model.params), scaled, raw_score);
}

namespace {

/// Gaussian elimination with partial pivoting; returns false on a
/// (numerically) singular system.
bool solve_linear_system(std::vector<double> a, std::vector<double> b, std::size_t n,
                         std::vector<double>& out) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        max_diag = std::max(max_diag, std::abs(a[i * n + i]));
    const double tol = std::max(max_diag, 1.0) * 1e-12;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[pivot * n + k])) pivot = i;
        if (std::abs(a[pivot * n + k]) < tol) return false;
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[pivot * n + j]);
            std::swap(b[k], b[pivot]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / a[k * n + k];
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double rhs = b[k];
        for (std::size_t j = k + 1; j < n; ++j) rhs -= a[k * n + j] * out[j];
        out[k] = rhs / a[k * n + k];
    }
    return true;
}

LinearParams train_ols(const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y, const TrainingConfig& config) {
    const std::size_t n = x.size();
    const std::size_t d = x.front().size();
    const std::size_t da = d + 1;
    std::vector<double> gram(da * da, 0.0);
    std::vector<double> rhs(da, 0.0);
    auto at = [&](const std::vector<double>& row, std::size_t j) {
        return j < d ? row[j] : 1.0;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < da; ++j) {
            const double xj = at(x[i], j);
            rhs[j] += xj * y[i];
            for (std::size_t k = j; k < da; ++k) gram[j * da + k] += xj * at(x[i], k);
        }
    }
    for (std::size_t j = 0; j < da; ++j)
        for (std::size_t k = 0; k < j; ++k) gram[j * da + k] = gram[k * da + j];

    std::vector<double> solution;
    if (!solve_linear_system(gram, rhs, da, solution)) {
        if (!config.allow_ridge_fallback)
            throw DegenerateDataError("singular normal equations and ridge fallback disabled");
        double trace = 0.0;
        for (std::size_t j = 0; j < da; ++j) trace += gram[j * da + j];
        const double ridge = std::max(trace / static_cast<double>(da), 1.0) * 1e-6;
        for (std::size_t j = 0; j < da; ++j) gram[j * da + j] += ridge;
        if (!solve_linear_system(gram, rhs, da, solution))
            throw DegenerateDataError("normal equations remain singular under ridge");
    }
    LinearParams params;
    params.weights.assign(solution.begin(), solution.begin() + static_cast<std::ptrdiff_t>(d));
    params.bias = solution[d];
    return params;
}

struct CartBuilder {
    const std::vector<std::vector<double>>& x;
    const std::vector<double>& y;
    const TrainingConfig& config;
    std::vector<CartNode> nodes;

    static double sse_of(const std::vector<double>& y, const std::vector<std::size_t>& idx) {
        double sum = 0.0, sq = 0.0;
        for (std::size_t i : idx) {
            sum += y[i];
            sq += y[i] * y[i];
        }
        const double n = static_cast<double>(idx.size());
        return sq - sum * sum / n;
    }

    int build(std::vector<std::size_t> idx, int depth) {
        const double n = static_cast<double>(idx.size());
        double sum = 0.0;
        for (std::size_t i : idx) sum += y[i];
        const double mean = sum / n;

        CartNode node;
        node.value = mean;
        const int node_id = static_cast<int>(nodes.size());
        nodes.push_back(node);

        const double node_sse = sse_of(y, idx);
        if (depth >= config.cart_max_depth ||
            idx.size() < 2 * static_cast<std::size_t>(config.cart_min_leaf) ||
            node_sse <= 1e-12)
            return node_id;

        const std::size_t d = x.front().size();
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_total = node_sse - 1e-12;
        std::vector<std::size_t> order;
        for (std::size_t f = 0; f < d; ++f) {
            order = idx;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (x[a][f] != x[b][f]) return x[a][f] < x[b][f];
                return a < b;
            });
            double left_sum = 0.0, left_sq = 0.0;
            double total_sum = 0.0, total_sq = 0.0;
            for (std::size_t i : order) {
                total_sum += y[i];
                total_sq += y[i] * y[i];
            }
            for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
                const double yi = y[order[pos]];
                left_sum += yi;
                left_sq += yi * yi;
                const double xv = x[order[pos]][f];
                const double xn = x[order[pos + 1]][f];
                if (xv == xn) continue;
                const std::size_t nl = pos + 1;
                const std::size_t nr = order.size() - nl;
                if (nl < static_cast<std::size_t>(config.cart_min_leaf) ||
                    nr < static_cast<std::size_t>(config.cart_min_leaf))
                    continue;
                const double right_sum = total_sum - left_sum;
                const double right_sq = total_sq - left_sq;
                const double sse_l = left_sq - left_sum * left_sum / static_cast<double>(nl);
                const double sse_r = right_sq - right_sum * right_sum / static_cast<double>(nr);
                const double total = sse_l + sse_r;
                if (total < best_total) {
                    best_total = total;
                    best_feature = static_cast<int>(f);
                    best_threshold = xv + (xn - xv) / 2.0;
                    if (best_threshold <= xv) best_threshold = xn;  // midpoint underflow
                }
            }
        }
        if (best_feature < 0) return node_id;

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx)
            (x[i][static_cast<std::size_t>(best_feature)] < best_threshold ? left_idx
                                                                           : right_idx)
                .push_back(i);
        if (left_idx.empty() || right_idx.empty()) return node_id;

        nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
        nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
        const int left = build(std::move(left_idx), depth + 1);
        nodes[static_cast<std::size_t>(node_id)].left = left;
        const int right = build(std::move(right_idx), depth + 1);
        nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }
};

double cart_predict(const CartParams& tree, std::span<const double> scaled) {
    int node = 0;
    while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const CartNode& n = tree.nodes[static_cast<std::size_t>(node)];
        node = scaled[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return tree.nodes[static_cast<std::size_t>(node)].value;
}

}  // namespace

TrainedModel train_regressor(const Dataset& train, RegressorKind kind,
                             const TrainingConfig& config) {
    if (train.empty()) throw DegenerateDataError("empty regression training set");
    FeatureScaler scaler = fit_scaler(train);
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    xs.reserve(train.size());
    double target_sum = 0.0;
    for (const auto& inst : train) {
        xs.push_back(scaler.apply(inst.x));
        ys.push_back(inst.log_target);
        target_sum += inst.log_target;
    }

    TrainedModel model;
    model.scaler = std::move(scaler);
    model.train_target_mean = target_sum / static_cast<double>(train.size());
    if (kind == RegressorKind::LinearRegression) {
        model.kind = ModelKind::LinearRegression;
        model.params = train_ols(xs, ys, config);
    } else {
        model.kind = ModelKind::Cart;
        CartBuilder builder{xs, ys, config, {}};
        std::vector<std::size_t> idx(train.size());
        std::iota(idx.begin(), idx.end(), 0);
        builder.build(std::move(idx), 0);
        model.params = CartParams{std::move(builder.nodes)};
    }
    return model;
}

double predict_time(const TrainedModel& model, std::span<const double> x) {
    const auto scaled = model.scaler.apply(x);
    if (model.kind == ModelKind::LinearRegression) {
        const auto& params = std::get<LinearParams>(model.params);
        double acc = params.bias;
        for (std::size_t i = 0; i < scaled.size(); ++i) acc += params.weights[i] * scaled[i];
        return acc;
    }
    if (model.kind == ModelKind::Cart)
        return cart_predict(std::get<CartParams>(model.params), scaled);
    throw ContractViolation("predict_time requires a regressor model");
}

std::string TrainedModel::to_json() const {
    ordered_json j;
    j["kind"] = to_string(kind);
    j["stage"] = stage_tag;
    j["task"] = features::to_string(task);
    j["schema_version"] = schema_version;
    j["beta"] = beta;
    j["chosen_weight"] = chosen_weight;
    j["tts_f"] = tts_f;
    j["train_positive_fraction"] = train_positive_fraction;
    j["train_target_mean"] = train_target_mean;
    j["scaler"] = {{"mean", scaler.mean}, {"stddev", scaler.stddev}};
    if (std::holds_alternative<LinearParams>(params)) {
        const auto& p = std::get<LinearParams>(params);
        j["params"] = {{"weights", p.weights}, {"bias", p.bias}};
    } else {
        const auto& tree = std::get<CartParams>(params);
        ordered_json nodes = ordered_json::array();
        for (const auto& n : tree.nodes) {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"value", n.value},
                             {"left", n.left},
                             {"right", n.right}});
        }
        j["params"] = {{"nodes", std::move(nodes)}};
    }
    ordered_json trace_json = ordered_json::array();
    for (const auto& row : trace)
        trace_json.push_back({{"w", row.w},
                              {"f", row.f},
                              {"precision", row.precision},
                              {"recall", row.recall}});
    j["trace"] = std::move(trace_json);
    return j.dump(2) + "\n";
}

TrainedModel TrainedModel::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    TrainedModel m;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    m.stage_tag = j.at("stage").get<std::string>();
    m.task = features::task_from_string(j.at("task").get<std::string>());
    m.schema_version = j.at("schema_version").get<int>();
    m.beta = j.at("beta").get<double>();
    m.chosen_weight = j.at("chosen_weight").get<int>();
    m.tts_f = j.at("tts_f").get<double>();
    m.train_positive_fraction = j.at("train_positive_fraction").get<double>();
    m.train_target_mean = j.at("train_target_mean").get<double>();
    m.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    m.scaler.stddev = j.at("scaler").at("stddev").get<std::vector<double>>();
    const auto& params = j.at("params");
    if (params.contains("weights")) {
        LinearParams p;
        p.weights = params.at("weights").get<std::vector<double>>();
        p.bias = params.at("bias").get<double>();
        m.params = std::move(p);
    } else {
        CartParams tree;
        for (const auto& n : params.at("nodes")) {
            CartNode node;
            node.feature = n.at("feature").get<int>();
            node.threshold = n.at("threshold").get<double>();
            node.value = n.at("value").get<double>();
            node.left = n.at("left").get<int>();
            node.right = n.at("right").get<int>();
            tree.nodes.push_back(node);
        }
        m.params = std::move(tree);
    }
    for (const auto& row : j.at("trace")) {
        WeightTraceRow t;
        t.w = row.at("w").get<int>();
        t.f = row.at("f").get<double>();
        t.precision = row.at("precision").get<double>();
        t.recall = row.at("recall").get<double>();
        m.trace.push_back(t);
    }
    return m;
}

}  // namespace burstwatch::models
