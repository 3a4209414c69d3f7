#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evidencer/error.h"
#include "evidencer/ranker.h"

namespace evidencer {

namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double Margin(const LogisticModel &model, const FeatureVector &features) {
  double z = model.bias;
  for (const auto &[id, value] : features) {
    auto it = model.weights.find(id);
    if (it != model.weights.end()) z += it->second * value;
  }
  return z;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double ParseDouble(std::string_view s, size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("bad number '" + std::string(s) + "'", line_no);
  }
  return v;
}

}  // namespace

LogisticModel LogisticModel::negated() const {
  LogisticModel out;
  out.bias = -bias;
  for (const auto &[id, w] : weights) out.weights[id] = -w;
  return out;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_score(const LogisticModel &model, const FeatureVector &features) {
  return sigmoid(Margin(model, features));
}

double logistic_loss(const LogisticModel &model, std::span<const LabeledExample> data,
                     double l2) {
  double total = 0.0;
  for (const LabeledExample &ex : data) {
    double z = Margin(model, ex.features);
    // -log(sigmoid(z)) = softplus(-z); -log(1 - sigmoid(z)) = softplus(z)
    total += ex.positive ? Softplus(-z) : Softplus(z);
  }
  double loss = data.empty() ? 0.0 : total / static_cast<double>(data.size());
  double norm2 = 0.0;
  for (const auto &[id, w] : model.weights) norm2 += w * w;
  return loss + 0.5 * l2 * norm2;
}

LogisticModel logistic_gradient(const LogisticModel &model,
                                std::span<const LabeledExample> data, double l2) {
  LogisticModel grad;
  for (const auto &[id, w] : model.weights) grad.weights[id] = l2 * w;
  if (data.empty()) return grad;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (const LabeledExample &ex : data) {
    double residual = (sigmoid(Margin(model, ex.features)) - (ex.positive ? 1.0 : 0.0)) * inv_n;
    grad.bias += residual;
    for (const auto &[id, value] : ex.features) grad.weights[id] += residual * value;
  }
  return grad;
}

LogisticModel train_logistic(std::span<const LabeledExample> data, const TrainConfig &config,
                             std::vector<double> *loss_history) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "no training data");
  if (!(config.learning_rate > 0) || !(config.l2 >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive, l2 non-negative");
  }
  LogisticModel model;
  for (const LabeledExample &ex : data) {
    for (const auto &[id, value] : ex.features) {
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite feature value for " + id);
      }
      model.weights.emplace(id, 0.0);
    }
  }
  double loss = logistic_loss(model, data, config.l2);
  if (loss_history) loss_history->assign(1, loss);
  double step = config.learning_rate;
  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    LogisticModel grad = logistic_gradient(model, data, config.l2);
    bool accepted = false;
    for (int halvings = 0; halvings < 40 && !accepted; ++halvings) {
      LogisticModel next = model;
      next.bias -= step * grad.bias;
      for (auto &[id, w] : next.weights) w -= step * grad.weights[id];
      double next_loss = logistic_loss(next, data, config.l2);
      if (next_loss <= loss) {
        model = std::move(next);
        loss = next_loss;
        accepted = true;
      } else {
        step *= 0.5;
      }
    }
    if (loss_history) loss_history->push_back(loss);
    if (!accepted) break;  // converged to floating-point resolution
  }
  return model;
}

std::string format_model(const LogisticModel &model) {
  std::string out = "bias " + FormatDouble(model.bias) + "\n";
  for (const auto &[id, w] : model.weights) out += id + " " + FormatDouble(w) + "\n";
  return out;
}

LogisticModel parse_model(std::istream &in) {
  LogisticModel model;
  bool have_bias = false;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string id, value, extra;
    if (!(fields >> id >> value) || (fields >> extra)) {
      throw ParseError("expected '<feature_id> <weight>'", line_no);
    }
    if (!have_bias) {
      if (id != "bias") throw ParseError("model must start with 'bias <value>'", line_no);
      model.bias = ParseDouble(value, line_no);
      have_bias = true;
      continue;
    }
    if (!model.weights.emplace(id, ParseDouble(value, line_no)).second) {
      throw ParseError("duplicate feature '" + id + "'", line_no);
    }
  }
  if (!have_bias) throw ParseError("model has no bias line", line_no);
  return model;
}

void save_model(const LogisticModel &model, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model " + path.string());
  out << format_model(model);
}

LogisticModel load_model(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model " + path.string());
  try {
    return parse_model(in);
  } catch (const ParseError &e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

}  // namespace evidencer
