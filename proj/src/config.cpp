#include "ssbe/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ssbe/errors.hpp"

namespace ssbe {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Object reader that tracks the JSON path and rejects unknown keys.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(join(path_, item.key()), "unknown key");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), join(path_, key));
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(join(path_, key), "expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(join(path_, key), "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
            throw ConfigError(join(path_, key), "expected a nonnegative integer");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(join(path_, key), e.what());
    }
  }

  std::string field(const std::string& key) const { return join(path_, key); }
  const json& raw(const std::string& key) const { return j_.at(key); }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

MethodSelection method_from_string(const std::string& s, const std::string& field) {
  if (s == "pinn") return MethodSelection::PINN;
  if (s == "ssbe") return MethodSelection::SSBE;
  if (s == "both") return MethodSelection::Both;
  throw ConfigError(field, "unknown method '" + s + "' (expected pinn, ssbe or both)");
}

}  // namespace

std::string to_string(MethodSelection m) {
  switch (m) {
    case MethodSelection::PINN: return "pinn";
    case MethodSelection::SSBE: return "ssbe";
    case MethodSelection::Both: return "both";
  }
  return "?";
}

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu3"; }

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu3") return Activation::Relu3Sixth;
  throw InvalidArgument("unknown activation '" + name + "' (expected tanh or relu3)");
}

int ExperimentConfig::input_dim() const {
  switch (problem) {
    case ProblemKind::PoissonDisk: return 2;
    case ProblemKind::HeatSquare: return 3;
    case ProblemKind::NonlinearElliptic: return 2;
    case ProblemKind::HighDimPoisson: return problem_params.dim;
  }
  return 0;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("name", "must not be empty");
  const OperatorCoefficients& c = problem_params.coefficients;
  if (c.k_power < 1) throw ConfigError("problem.k", "must be >= 1");
  if (problem_params.dim < 2) throw ConfigError("problem.dim", "must be >= 2");
  if (layer_sizes.size() < 2) throw ConfigError("architecture.layer_sizes", "needs at least input and output sizes");
  for (int s : layer_sizes) {
    if (s < 1) throw ConfigError("architecture.layer_sizes", "sizes must be positive");
  }
  if (layer_sizes.front() != input_dim()) {
    throw ConfigError("architecture.layer_sizes",
                      "input size must be " + std::to_string(input_dim()) + " for this problem");
  }
  if (layer_sizes.back() != 1) throw ConfigError("architecture.layer_sizes", "output size must be 1");
  if (samples.n_interior < 1) throw ConfigError("samples.n_interior", "must be >= 1");
  if (samples.n_boundary_per_chart < 1) throw ConfigError("samples.n_boundary_per_chart", "must be >= 1");
  if (samples.n_initial < 0) throw ConfigError("samples.n_initial", "must be >= 0");
  if (samples.n_time < 0) throw ConfigError("samples.n_time", "must be >= 0");
  const bool parabolic = problem == ProblemKind::HeatSquare;
  if (parabolic && samples.n_initial < 1) {
    throw ConfigError("samples.n_initial", "must be >= 1 for time-dependent problems");
  }
  if (parabolic && full_parabolic && samples.n_time < 1) {
    throw ConfigError("samples.n_time", "must be >= 1 when loss.full_parabolic is set");
  }
  const std::pair<const char*, double> ws[] = {{"weights.residual", weights.residual},
                                               {"weights.initial", weights.initial},
                                               {"weights.boundary_l2", weights.boundary_l2},
                                               {"weights.boundary_h1", weights.boundary_h1}};
  for (const auto& [field, w] : ws) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError(field, "must be finite and >= 0");
  }
  if (weights_preset != "none" && weights_preset != "chart_sum") {
    throw ConfigError("weights.preset", "unknown preset '" + weights_preset + "' (expected none or chart_sum)");
  }
  if (schedule.total_steps < 0) throw ConfigError("optimizer.total_steps", "must be >= 0");
  if (!(schedule.lr_start > 0.0)) throw ConfigError("optimizer.lr_start", "must be > 0");
  if (!(schedule.lr_end > 0.0)) throw ConfigError("optimizer.lr_end", "must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("optimizer.beta1", "must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("optimizer.beta2", "must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("optimizer.epsilon", "must be > 0");
  if (log_every < 1) throw ConfigError("output.log_every", "must be >= 1");
}

std::string ExperimentConfig::resolved_output_dir() const {
  if (!output_dir.empty()) return output_dir;
  const char* root = std::getenv("SSBE_OUTPUT_ROOT");
  const std::filesystem::path base = (root && *root) ? std::filesystem::path(root) : std::filesystem::path("runs");
  return (base / name).string();
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  {
    Section root(j, "");
    root.read("name", c.name);
    if (root.has("problem")) {
      Section p = root.child("problem");
      std::string kind = to_string(c.problem);
      p.read("kind", kind);
      try {
        c.problem = problem_kind_from_string(kind);
      } catch (const Error& e) {
        throw ConfigError(p.field("kind"), e.what());
      }
      OperatorCoefficients& oc = c.problem_params.coefficients;
      p.read("alpha", oc.alpha);
      p.read("beta", oc.beta);
      p.read("gamma", oc.gamma);
      p.read("k", oc.k_power);
      p.read("dim", c.problem_params.dim);
    }
    if (root.has("method")) {
      std::string m;
      root.read("method", m);
      c.method = method_from_string(m, "method");
    }
    if (root.has("architecture")) {
      Section a = root.child("architecture");
      if (a.has("layer_sizes")) {
        const json& ls = a.raw("layer_sizes");
        if (!ls.is_array()) throw ConfigError(a.field("layer_sizes"), "expected an array of integers");
        c.layer_sizes.clear();
        for (const json& v : ls) {
          if (!v.is_number_integer()) throw ConfigError(a.field("layer_sizes"), "expected an array of integers");
          c.layer_sizes.push_back(v.get<int>());
        }
      }
      if (a.has("activation")) {
        std::string act;
        a.read("activation", act);
        try {
          c.activation = activation_from_string(act);
        } catch (const Error& e) {
          throw ConfigError(a.field("activation"), e.what());
        }
      }
    }
    if (root.has("samples")) {
      Section s = root.child("samples");
      s.read("n_interior", c.samples.n_interior);
      s.read("n_boundary_per_chart", c.samples.n_boundary_per_chart);
      s.read("n_initial", c.samples.n_initial);
      s.read("n_time", c.samples.n_time);
    }
    if (root.has("weights")) {
      Section w = root.child("weights");
      w.read("residual", c.weights.residual);
      w.read("initial", c.weights.initial);
      w.read("boundary_l2", c.weights.boundary_l2);
      w.read("boundary_h1", c.weights.boundary_h1);
      w.read("preset", c.weights_preset);
    }
    if (root.has("loss")) {
      Section l = root.child("loss");
      l.read("full_parabolic", c.full_parabolic);
      if (l.has("metric_weighting")) {
        bool mw = false;
        l.read("metric_weighting", mw);
        c.metric_weighting = mw;
      }
    }
    if (root.has("optimizer")) {
      Section o = root.child("optimizer");
      o.read("total_steps", c.schedule.total_steps);
      o.read("lr_start", c.schedule.lr_start);
      o.read("lr_end", c.schedule.lr_end);
      o.read("beta1", c.beta1);
      o.read("beta2", c.beta2);
      o.read("epsilon", c.epsilon);
    }
    if (root.has("seeds")) {
      Section s = root.child("seeds");
      s.read("params", c.param_seed);
      s.read("sampling", c.sampling_seed);
    }
    if (root.has("eval")) {
      Section e = root.child("eval");
      e.read("grid", c.eval_grid);
      e.read("pointwise_csv", c.pointwise_csv);
    }
    if (root.has("output")) {
      Section o = root.child("output");
      o.read("dir", c.output_dir);
      o.read("log_every", c.log_every);
      o.read("checkpoint", c.write_checkpoint);
    }
  }
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  const OperatorCoefficients& oc = c.problem_params.coefficients;
  json j = {
      {"name", c.name},
      {"problem",
       {{"kind", to_string(c.problem)},
        {"alpha", oc.alpha},
        {"beta", oc.beta},
        {"gamma", oc.gamma},
        {"k", oc.k_power},
        {"dim", c.problem_params.dim}}},
      {"method", to_string(c.method)},
      {"architecture", {{"layer_sizes", c.layer_sizes}, {"activation", to_string(c.activation)}}},
      {"samples",
       {{"n_interior", c.samples.n_interior},
        {"n_boundary_per_chart", c.samples.n_boundary_per_chart},
        {"n_initial", c.samples.n_initial},
        {"n_time", c.samples.n_time}}},
      {"weights",
       {{"residual", c.weights.residual},
        {"initial", c.weights.initial},
        {"boundary_l2", c.weights.boundary_l2},
        {"boundary_h1", c.weights.boundary_h1},
        {"preset", c.weights_preset}}},
      {"loss",
       {{"full_parabolic", c.full_parabolic},
        {"metric_weighting", c.metric_weighting ? json(*c.metric_weighting) : json(nullptr)}}},
      {"optimizer",
       {{"total_steps", c.schedule.total_steps},
        {"lr_start", c.schedule.lr_start},
        {"lr_end", c.schedule.lr_end},
        {"beta1", c.beta1},
        {"beta2", c.beta2},
        {"epsilon", c.epsilon}}},
      {"seeds", {{"params", c.param_seed}, {"sampling", c.sampling_seed}}},
      {"eval", {{"grid", c.eval_grid}, {"pointwise_csv", c.pointwise_csv}}},
      {"output", {{"dir", c.output_dir}, {"log_every", c.log_every}, {"checkpoint", c.write_checkpoint}}},
  };
  return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "file not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

}  // namespace ssbe
