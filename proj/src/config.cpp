#include "pcminimax/config.hpp"

#include <cmath>
#include <fstream>

namespace pcm {

using nlohmann::json;

namespace {

const json& require_field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(path + key, "missing required field");
  return obj.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(field, "must be finite");
  return d;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  return obj.contains(key) ? number(obj.at(key), path + key) : fallback;
}

std::size_t count(const json& v, const std::string& field, std::size_t min_value) {
  if (!v.is_number_integer()) throw ConfigError(field, "must be an integer");
  const auto i = v.get<long long>();
  if (i < static_cast<long long>(min_value))
    throw ConfigError(field, "must be >= " + std::to_string(min_value));
  return static_cast<std::size_t>(i);
}

std::vector<double> numbers(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

bool flag_or(const json& obj, const std::string& key, bool fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(path + key, "must be true or false");
  return obj.at(key).get<bool>();
}

WeightFunction parse_weight(const json& w, const std::filesystem::path& base_dir) {
  if (!w.is_object()) throw ConfigError("weight", "must be an object");
  const json& kind_v = require_field(w, "kind", "weight.");
  if (!kind_v.is_string()) throw ConfigError("weight.kind", "must be a string");
  const std::string kind = kind_v.get<std::string>();
  const std::string p = "weight.";
  try {
    if (kind == "indicator")
      return WeightFunction::indicator(number_or(w, "start", 0.0, p), number(require_field(w, "end", p), p + "end"),
                                       number_or(w, "level", 1.0, p));
    if (kind == "exponential-decay")
      return WeightFunction::exponential_decay(number_or(w, "amplitude", 1.0, p),
                                               number(require_field(w, "rate", p), p + "rate"),
                                               number_or(w, "support_end", INFINITY, p));
    if (kind == "windowed-cosine")
      return WeightFunction::windowed_cosine(number_or(w, "amplitude", 1.0, p),
                                             number(require_field(w, "frequency", p), p + "frequency"),
                                             number_or(w, "phase", 0.0, p),
                                             number(require_field(w, "window_end", p), p + "window_end"));
    if (kind == "piecewise-constant")
      return WeightFunction::piecewise_constant(numbers(require_field(w, "breakpoints", p), p + "breakpoints"),
                                                numbers(require_field(w, "values", p), p + "values"));
    if (kind == "sampled-grid") {
      if (w.contains("csv")) {
        if (!w.at("csv").is_string()) throw ConfigError("weight.csv", "must be a path string");
        std::filesystem::path csv = w.at("csv").get<std::string>();
        if (csv.is_relative()) csv = base_dir / csv;
        if (!std::filesystem::exists(csv)) throw ConfigError("weight.csv", "file not found: " + csv.string());
        return WeightFunction::from_csv(csv);
      }
      return WeightFunction::sampled_grid(numbers(require_field(w, "values", p), p + "values"),
                                          number(require_field(w, "step", p), p + "step"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("weight", e.what());
  }
  throw ConfigError("weight.kind", "unknown kind \"" + kind +
                                       "\" (expected indicator, exponential-decay, windowed-cosine, "
                                       "piecewise-constant or sampled-grid)");
}

TailModel parse_tail(const json& t) {
  if (!t.is_object()) throw ConfigError("tail", "must be an object");
  const json& kind_v = require_field(t, "kind", "tail.");
  if (!kind_v.is_string()) throw ConfigError("tail.kind", "must be a string");
  const std::string kind = kind_v.get<std::string>();
  TailModel tail;
  if (kind == "finite") {
    tail.kind = TailKind::finite;
    return tail;
  }
  if (kind == "geometric")
    tail.kind = TailKind::geometric;
  else if (kind == "power")
    tail.kind = TailKind::power;
  else
    throw ConfigError("tail.kind", "unknown kind \"" + kind + "\" (expected finite, geometric or power)");
  tail.rate = number(require_field(t, "rate", "tail."), "tail.rate");
  return tail;
}

}  // namespace

TailModel default_tail(const WeightFunction& w, double period) {
  if (w.kind() == WeightKind::exponential_decay && std::isinf(w.support_end()))
    return {TailKind::geometric, std::exp(-w.parameters()[1] * period)};
  return {};
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  ExperimentConfig cfg;
  cfg.weight = parse_weight(require_field(doc, "weight", ""), base_dir);

  cfg.period = number(require_field(doc, "period", ""), "period");
  if (!(cfg.period > 0.0)) throw ConfigError("period", "must be positive");
  cfg.K = count(require_field(doc, "K", ""), "K", 1);
  cfg.J = count(require_field(doc, "J", ""), "J", 1);

  const json& n = require_field(doc, "N", "");
  if (n.is_array()) {
    if (n.empty()) throw ConfigError("N", "list must not be empty");
    for (std::size_t i = 0; i < n.size(); ++i) cfg.horizons.push_back(count(n[i], "N[" + std::to_string(i) + "]", 0));
    for (std::size_t i = 1; i < cfg.horizons.size(); ++i)
      if (cfg.horizons[i] <= cfg.horizons[i - 1]) throw ConfigError("N", "list must be strictly ascending");
  } else {
    cfg.horizons.push_back(count(n, "N", 0));
  }
  if (cfg.horizons.back() + 1 > cfg.J)
    throw ConfigError("N", "largest N = " + std::to_string(cfg.horizons.back()) + " needs J >= N + 1 (J = " +
                               std::to_string(cfg.J) + ")");

  cfg.power = number(require_field(doc, "P", ""), "P");
  if (!(cfg.power > 0.0)) throw ConfigError("P", "must be positive");

  if (doc.contains("quad_nodes")) cfg.quad_nodes = count(doc.at("quad_nodes"), "quad_nodes", 2);
  if (cfg.quad_nodes < 2 * cfg.K) throw ConfigError("quad_nodes", "must be at least 2K");

  cfg.tail = doc.contains("tail") ? parse_tail(doc.at("tail")) : default_tail(cfg.weight, cfg.period);

  if (doc.contains("eigen")) {
    const json& e = doc.at("eigen");
    if (!e.is_object()) throw ConfigError("eigen", "must be an object");
    cfg.eigen.tol = number_or(e, "tol", cfg.eigen.tol, "eigen.");
    if (!(cfg.eigen.tol > 0.0)) throw ConfigError("eigen.tol", "must be positive");
    if (e.contains("max_iter")) cfg.eigen.max_iter = count(e.at("max_iter"), "eigen.max_iter", 1);
    if (e.contains("seed")) cfg.eigen.seed = count(e.at("seed"), "eigen.seed", 0);
  }

  if (doc.contains("montecarlo")) {
    const json& m = doc.at("montecarlo");
    if (!m.is_object()) throw ConfigError("montecarlo", "must be an object");
    if (m.contains("replicates")) cfg.mc.replicates = count(m.at("replicates"), "montecarlo.replicates", 1);
    if (m.contains("seed")) cfg.mc.seed = count(m.at("seed"), "montecarlo.seed", 0);
  }

  if (doc.contains("pc_check")) {
    const json& c = doc.at("pc_check");
    if (!c.is_object()) throw ConfigError("pc_check", "must be an object");
    cfg.pc_check.enabled = true;
    if (c.contains("paths")) cfg.pc_check.paths = count(c.at("paths"), "pc_check.paths", kMinEnsemble);
    if (c.contains("u_grid")) cfg.pc_check.u_grid = count(c.at("u_grid"), "pc_check.u_grid", 1);
    if (c.contains("periods")) cfg.pc_check.periods = count(c.at("periods"), "pc_check.periods", 2);
    if (cfg.pc_check.u_grid < 2 * cfg.K) throw ConfigError("pc_check.u_grid", "must be at least 2K");
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (!o.is_object()) throw ConfigError("output", "must be an object");
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) throw ConfigError("output.dir", "must be a path string");
      cfg.output.dir = o.at("dir").get<std::string>();
    }
    cfg.output.operator_csv = flag_or(o, "operator_csv", false, "output.");
    cfg.output.spectral_csv = flag_or(o, "spectral_csv", false, "output.");
    cfg.output.trace_csv = flag_or(o, "trace_csv", false, "output.");
    cfg.output.path_csv = flag_or(o, "path_csv", false, "output.");
    if (o.contains("spectral_grid")) cfg.output.spectral_grid = count(o.at("spectral_grid"), "output.spectral_grid", 1);
  }
  if (cfg.output.dir.is_relative()) cfg.output.dir = base_dir / cfg.output.dir;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace pcm
